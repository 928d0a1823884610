//! Independent reference computations used by the test suites.
//!
//! Nothing here calls into the library's evaluation paths: Legendre values
//! come from explicit polynomial coefficients, integrals from an adaptive
//! Gauss-Kronrod rule with hard-coded nodes.
#![allow(dead_code, clippy::excessive_precision)]

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

/// Coefficients (ascending powers) of the Legendre polynomial `P_n`, built
/// with Bonnet's recurrence on coefficient vectors.
pub fn legendre_coeffs(n: u32) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for k in 1..n {
        let k = f64::from(k);
        let mut next = vec![0.0; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += (2.0 * k + 1.0) * c / (k + 1.0);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= k * c / (k + 1.0);
        }
        prev = cur;
        cur = next;
    }
    cur
}

pub fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn legendre_poly_derivative(n: u32, k: u32, x: f64) -> f64 {
    let mut c = legendre_coeffs(n);
    for _ in 0..k {
        c = poly_derivative(&c);
    }
    horner(&c, x)
}

/// `(-1)^m (1 - x^2)^{m/2} d^m P_n(x)` from explicit coefficients (`m >= 0`).
pub fn assoc_legendre_poly(n: u32, m: u32, x: f64) -> f64 {
    if m > n {
        return 0.0;
    }
    let s = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    s * (1.0 - x * x).powf(f64::from(m) / 2.0) * legendre_poly_derivative(n, m, x)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature: the interval with the
/// largest error estimate is bisected until the summed estimate drops below
/// `rel_tol` times the integral of `|f|`, or 4000 intervals are in use.
pub fn gauss_kronrod(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let scale = {
        let g = |x: f64| f(x).abs();
        gk15(&g, a, b).0.max(f64::MIN_POSITIVE)
    };
    let tol = rel_tol * scale;
    // (lo, hi, value, err)
    let mut parts = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..4000 {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= tol {
            break;
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (lv, le) = gk15(&f, lo, mid);
        let (rv, re) = gk15(&f, mid, hi);
        parts.push((lo, mid, lv, le));
        parts.push((mid, hi, rv, re));
    }
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    parts.iter().map(|p| p.2).sum()
}

/// Solid angle of the spherical triangle with the given unit vertices, by
/// l'Huilier's theorem.
pub fn lhuilier_solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let ang = |u: [f64; 3], v: [f64; 3]| {
        let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt().atan2(dot)
    };
    let (ea, eb, ec) = (ang(b, c), ang(a, c), ang(a, b));
    let s = 0.5 * (ea + eb + ec);
    let t = (s / 2.0).tan() * ((s - ea) / 2.0).tan() * ((s - eb) / 2.0).tan() * ((s - ec) / 2.0).tan();
    4.0 * t.sqrt().atan()
}

pub fn normalize(p: [f64; 3]) -> [f64; 3] {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / r, p[1] / r, p[2] / r]
}

/// Koch snowflake area after `depth` iterations, as the partial sum
/// `A0 (1 + sum_{k=1}^{depth} 3 4^{k-1} / 9^k)`.
pub fn koch_area_series(base_area: f64, depth: u32) -> f64 {
    let mut sum = 1.0;
    for k in 1..=depth {
        sum += 3.0 * 4f64.powi(k as i32 - 1) / 9f64.powi(k as i32);
    }
    base_area * sum
}

/// `int_0^gamma (3 cos^2 t - 1) sin t dt = cos(gamma) sin^2(gamma)`.
pub fn zonal_cap_factor(gamma: f64) -> f64 {
    gamma.cos() * gamma.sin().powi(2)
}

fn exact_legendre_coeffs(n: u32) -> Vec<BigRational> {
    let int = |k: u32| BigRational::from_integer(BigInt::from(k));
    let mut prev = vec![BigRational::one()];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![BigRational::zero(), BigRational::one()];
    for k in 1..n {
        let mut next = vec![BigRational::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * int(2 * k + 1) / int(k + 1);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * int(k) / int(k + 1);
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn exact_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn exact_derivative(c: &[BigRational], times: u32) -> Vec<BigRational> {
    let mut c = c.to_vec();
    for _ in 0..times {
        c = if c.len() <= 1 {
            vec![BigRational::zero()]
        } else {
            c.iter().enumerate().skip(1).map(|(i, v)| v * BigRational::from_integer(BigInt::from(i))).collect()
        };
    }
    c
}

/// `int_{x0}^1 P_n^m P_{n+2}^m dx` in exact rational arithmetic, with
/// `x0 = num / den`. The integrand `(1 - x^2)^m d^m P_n d^m P_{n+2}` is a
/// polynomial, so only the final conversion rounds.
pub fn exact_product_integral(n: u32, m: u32, num: i64, den: i64) -> f64 {
    if m > n {
        return 0.0;
    }
    let one_minus_sq = vec![BigRational::one(), BigRational::zero(), -BigRational::one()];
    let mut poly = exact_mul(
        &exact_derivative(&exact_legendre_coeffs(n), m),
        &exact_derivative(&exact_legendre_coeffs(n + 2), m),
    );
    for _ in 0..m {
        poly = exact_mul(&poly, &one_minus_sq);
    }
    let x0 = BigRational::new(BigInt::from(num), BigInt::from(den));
    let mut power = x0.clone();
    let mut total = BigRational::zero();
    for (k, c) in poly.iter().enumerate() {
        let kp1 = BigRational::from_integer(BigInt::from(k + 1));
        total += c * (BigRational::one() - &power) / kp1;
        power *= &x0;
    }
    total.to_f64().expect("finite value")
}
