//! Identity suites behind `verify-identities`.
//!
//! Each suite compares two independent evaluation routes and records the
//! worst scaled discrepancy against a fixed tolerance.

use std::f64::consts::PI;

use conekit::harmonics::{laplace_second_rep_exact, laplace_second_rep_lhs, sph_harm};
use conekit::legendre::{
    assoc_legendre, assoc_legendre_deriv, christoffel_darboux_sum, ode_reduction_residual, product_integral_closed_form, wronskian,
};
use conekit::quadrature::gauss_legendre;
use conekit::{Complex64, Result, SphericalDirection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub cases: usize,
    pub max_err: f64,
    pub tol: f64,
    pub pass: bool,
}

struct Tally {
    cases: usize,
    max_err: f64,
}

impl Tally {
    fn new() -> Self {
        Self { cases: 0, max_err: 0.0 }
    }

    fn record(&mut self, err: f64) {
        self.cases += 1;
        // NaN must fail the suite.
        self.max_err = if err.is_nan() { f64::INFINITY } else { self.max_err.max(err) };
    }

    fn finish(self, suite: &'static str, tol: f64) -> SuiteResult {
        SuiteResult { suite, cases: self.cases, max_err: self.max_err, tol, pass: self.cases > 0 && self.max_err <= tol }
    }
}

/// Random points per `(n, m)` in the Christoffel-Darboux suite.
const CD_POINTS: usize = 50;
/// Random directions in the harmonic suites.
const DIRECTIONS: usize = 64;
/// Colatitudes for the azimuthal integral representation.
const LAPLACE_THETAS: [f64; 5] = [0.15, 0.35, 0.55, 0.75, 0.95];
/// Trapezoid nodes for the azimuthal integral representation.
const LAPLACE_NODES: usize = 4096;

pub fn run_all(n_max: u32, seed: u64) -> Result<Vec<SuiteResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        product_integrals(n_max)?,
        christoffel_darboux(n_max, &mut rng)?,
        christoffel_darboux_at_zero(n_max)?,
        order_reduction(n_max, &mut rng)?,
        orthonormality(n_max)?,
        conjugation(n_max, &mut rng)?,
        addition_theorem(n_max, &mut rng)?,
        laplace_representation(n_max)?,
    ])
}

fn x0_grid() -> impl Iterator<Item = f64> {
    (0..10).map(|j| -0.9 + 0.2 * f64::from(j))
}

/// Closed form of `int_{x0}^1 P_n^m P_{n+2}^m` against Gauss-Legendre, which
/// is exact for the polynomial integrand.
fn product_integrals(n_max: u32) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for n in 0..=n_max {
        let g = gauss_legendre(n as usize + 4);
        for m in -(n as i32)..=n as i32 {
            for x0 in x0_grid() {
                let half = 0.5 * (1.0 - x0);
                let (mut sum, mut abs) = (0.0, 0.0);
                for (x, w) in g.nodes.iter().zip(&g.weights) {
                    let x = x0 + half * (x + 1.0);
                    let v = assoc_legendre(n, m, x)? * assoc_legendre(n + 2, m, x)?;
                    sum += w * half * v;
                    abs += w * half * v.abs();
                }
                let closed = product_integral_closed_form(n, m, x0)?;
                t.record((closed - sum).abs() / abs.max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(t.finish("legendre-product-integral", 1e-10))
}

fn christoffel_darboux(n_max: u32, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for n in 0..=n_max {
        for m in 0..=n {
            for _ in 0..CD_POINTS {
                let x: f64 = rng.gen_range(-0.999..0.999);
                let lhs = wronskian(n, m as i32, x)?;
                let rhs = christoffel_darboux_sum(n, m, x)?;
                // Near a zero of the Wronskian, scale by its two terms.
                let mi = m as i32;
                let terms = (assoc_legendre(n, mi, x)? * assoc_legendre_deriv(n + 2, mi, x)?)
                    .abs()
                    .max((assoc_legendre_deriv(n, mi, x)? * assoc_legendre(n + 2, mi, x)?).abs());
                t.record((lhs - rhs).abs() / lhs.abs().max(terms).max(1e-300));
            }
        }
    }
    Ok(t.finish("christoffel-darboux", 1e-9))
}

fn christoffel_darboux_at_zero(n_max: u32) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for n in 0..=n_max {
        for m in 0..=n {
            t.record(christoffel_darboux_sum(n, m, 0.0)?.abs());
        }
    }
    Ok(t.finish("christoffel-darboux-at-zero", 0.0))
}

fn order_reduction(n_max: u32, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for n in 1..=n_max {
        for m in 1..=n {
            for _ in 0..8 {
                let r = ode_reduction_residual(n, m, rng.gen_range(-0.95..0.95))?;
                t.record(r.residual.abs() / r.magnitude.max(1.0));
            }
        }
    }
    Ok(t.finish("order-reduction", 1e-5))
}

/// Gram matrix of `Y_n^m`, `n <= n_max`, by a product rule exact for degree
/// `2 n_max` polynomials on the sphere.
fn orthonormality(n_max: u32) -> Result<SuiteResult> {
    let g = gauss_legendre(n_max as usize + 2);
    let phis = 2 * n_max as usize + 2;
    let index: Vec<(u32, i32)> = (0..=n_max).flat_map(|n| (-(n as i32)..=n as i32).map(move |m| (n, m))).collect();
    let mut gram = vec![Complex64::new(0.0, 0.0); index.len() * index.len()];
    for (x, w) in g.nodes.iter().zip(&g.weights) {
        let theta = x.acos();
        for j in 0..phis {
            let d = SphericalDirection { theta, phi: 2.0 * PI * j as f64 / phis as f64 };
            let y: Vec<Complex64> = index.iter().map(|&(n, m)| sph_harm(n, m, d)).collect::<Result<_>>()?;
            let weight = w * 2.0 * PI / phis as f64;
            for (a, ya) in y.iter().enumerate() {
                for (b, yb) in y.iter().enumerate() {
                    gram[a * index.len() + b] += ya * yb.conj() * weight;
                }
            }
        }
    }
    let mut t = Tally::new();
    for a in 0..index.len() {
        for b in 0..index.len() {
            let want = if a == b { 1.0 } else { 0.0 };
            t.record((gram[a * index.len() + b] - want).norm());
        }
    }
    Ok(t.finish("harmonic-orthonormality", 1e-12))
}

fn random_direction(rng: &mut ChaCha8Rng) -> SphericalDirection {
    SphericalDirection { theta: rng.gen_range(-1.0f64..1.0).acos(), phi: rng.gen_range(0.0..2.0 * PI) }
}

/// `Y_n^{-m} = (-1)^m conj(Y_n^m)`.
fn conjugation(n_max: u32, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..DIRECTIONS {
        let d = random_direction(rng);
        for n in 0..=n_max {
            for m in 1..=n as i32 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let a = sph_harm(n, -m, d)?;
                let b = sph_harm(n, m, d)?.conj() * sign;
                t.record((a - b).norm());
            }
        }
    }
    Ok(t.finish("harmonic-conjugation", 1e-12))
}

/// `sum_m |Y_n^m|^2 = (2n + 1) / 4 pi`.
fn addition_theorem(n_max: u32, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for _ in 0..DIRECTIONS {
        let d = random_direction(rng);
        for n in 0..=n_max {
            let s: f64 = (-(n as i32)..=n as i32).map(|m| sph_harm(n, m, d).map(|y| y.norm_sqr())).sum::<Result<f64>>()?;
            let want = f64::from(2 * n + 1) / (4.0 * PI);
            t.record((s - want).abs() / want);
        }
    }
    Ok(t.finish("addition-theorem", 1e-12))
}

/// The azimuthal integral against `i^|m| (N - |m|)!/N! P_N^|m|(cos t)`.
fn laplace_representation(n_max: u32) -> Result<SuiteResult> {
    let mut t = Tally::new();
    for n in 0..=n_max {
        for m in -(n as i32)..=n as i32 {
            for &theta in &LAPLACE_THETAS {
                let lhs = laplace_second_rep_lhs(n, m, theta, LAPLACE_NODES)?;
                let want = laplace_second_rep_exact(n, m, theta)?.expect("|m| <= N");
                // Scale by the zonal value, which bounds every order.
                let scale = laplace_second_rep_exact(n, 0, theta)?.expect("m = 0").norm().max(want.norm());
                t.record((lhs - want).norm() / scale);
            }
        }
    }
    Ok(t.finish("laplace-representation", 1e-9))
}

pub fn render_table(results: &[SuiteResult]) -> String {
    let mut s = format!("{:<30} {:>7} {:>11} {:>9}  result\n", "suite", "cases", "max_err", "tol");
    for r in results {
        s.push_str(&format!(
            "{:<30} {:>7} {:>11.3e} {:>9.1e}  {}\n",
            r.suite,
            r.cases,
            r.max_err,
            r.tol,
            if r.pass { "pass" } else { "FAIL" }
        ));
    }
    s
}
