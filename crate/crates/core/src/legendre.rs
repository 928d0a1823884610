//! Associated Legendre functions on `[-1, 1]`, their complex extension to the
//! strip `-1 < Re z < 1`, and closed-form product integrals.
//!
//! # Conventions
//!
//! For `0 <= m <= n`
//!
//! ```text
//! P_n^m(x)  = (-1)^m (1 - x^2)^{m/2} d^m/dx^m P_n(x)
//! P_n^-m(x) = (-1)^m (n - m)! / (n + m)! * P_n^m(x)
//! ```
//!
//! and `P_n^m = 0` whenever `|m| > n`. The Condon-Shortley phase is included
//! in `P_n^m`, and the negative-order formula carries its own `(-1)^m`. Tables
//! that use a different negative-order convention differ from these values by
//! a sign for odd `m`.
//!
//! Evaluation fixes `m`, seeds `P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}` and
//! ascends in `n` with the three-term recurrence
//! `(n - m + 1) P_{n+1}^m = (2n + 1) x P_n^m - (n + m) P_{n-1}^m`.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

use crate::error::{ensure, Result};

/// Largest supported degree.
pub const MAX_DEGREE: u32 = 64;

/// A (degree, order) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LegendreOrder {
    pub n: u32,
    pub m: i32,
}

impl LegendreOrder {
    pub fn new(n: u32, m: i32) -> Self {
        Self { n, m }
    }

    /// True when the function is identically zero (`|m| > n`).
    pub fn vanishes(&self) -> bool {
        self.m.unsigned_abs() > self.n
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        assoc_legendre(self.n, self.m, x)
    }
}

/// `ln(a! / b!)`, accumulated as a sum of logarithms.
pub(crate) fn ln_factorial_ratio(a: u32, b: u32) -> f64 {
    if a >= b {
        (b + 1..=a).map(|k| f64::from(k).ln()).sum()
    } else {
        -(a + 1..=b).map(|k| f64::from(k).ln()).sum::<f64>()
    }
}

/// `(n - m)! / (n + m)!` for `0 <= m <= n`, exponentiated once from log space.
pub fn factorial_ratio(n: u32, m: u32) -> f64 {
    debug_assert!(m <= n);
    ln_factorial_ratio(n - m, n + m).exp()
}

/// Multiplier taking `P_n^m` to `P_n^-m`: `(-1)^m (n-m)!/(n+m)!`.
pub fn negative_order_factor(n: u32, m: u32) -> f64 {
    if m > n {
        return 0.0;
    }
    sign(m) * factorial_ratio(n, m)
}

fn sign(m: u32) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn double_factorial_odd(m: u32) -> f64 {
    // (2m - 1)!!
    (1..=m).fold(1.0, |acc, k| acc * f64::from(2 * k - 1))
}

/// Arithmetic shared by the real and complex evaluation paths. Keeping one
/// generic implementation makes the complex function agree bit-for-bit with
/// the real one on the real axis.
trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self> + Div<f64, Output = Self>
{
    fn from_real(v: f64) -> Self;
    /// `sqrt(1 - z^2)` on the principal branch.
    fn sqrt_one_minus_square(self) -> Self;
}

impl Scalar for f64 {
    fn from_real(v: f64) -> Self {
        v
    }
    fn sqrt_one_minus_square(self) -> Self {
        (1.0 - self * self).sqrt()
    }
}

impl Scalar for Complex64 {
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn sqrt_one_minus_square(self) -> Self {
        (Complex64::new(1.0, 0.0) - self * self).sqrt()
    }
}

/// Ascending recurrence in `n` for fixed `m`, starting from `seed = value at n = m`.
/// Writes degrees `m..=nmax` into `out[m..=nmax]`.
fn ascend<T: Scalar>(nmax: u32, m: u32, z: T, seed: T, out: &mut [T]) {
    let m_us = m as usize;
    out[m_us] = seed;
    if nmax == m {
        return;
    }
    out[m_us + 1] = z * seed * f64::from(2 * m + 1);
    for j in (m + 1)..nmax {
        let ju = j as usize;
        out[ju + 1] = (z * out[ju] * f64::from(2 * j + 1) - out[ju - 1] * f64::from(j + m)) / f64::from(j - m + 1);
    }
}

fn column_generic<T: Scalar>(nmax: u32, m: u32, z: T) -> Vec<T> {
    let mut out = vec![T::from_real(0.0); nmax as usize + 1];
    if m > nmax {
        return out;
    }
    let w = z.sqrt_one_minus_square();
    let mut w_pow = T::from_real(1.0);
    for _ in 0..m {
        w_pow = w_pow * w;
    }
    let seed = w_pow * (sign(m) * double_factorial_odd(m));
    ascend(nmax, m, z, seed, &mut out);
    out
}

fn check_real_domain(x: f64) -> Result<()> {
    ensure!(x.abs() <= 1.0, Domain, "x = {x} lies outside [-1, 1]");
    Ok(())
}

fn check_degree(n: u32) -> Result<()> {
    ensure!(n <= MAX_DEGREE + 2, Domain, "degree {n} exceeds the supported maximum {MAX_DEGREE}");
    Ok(())
}

/// `P_n^m(x)` for `n = 0..=nmax` and fixed `m >= 0` (entries with `n < m` are zero).
pub fn assoc_legendre_column(nmax: u32, m: u32, x: f64) -> Result<Vec<f64>> {
    check_real_domain(x)?;
    check_degree(nmax)?;
    Ok(column_generic(nmax, m, x))
}

/// Associated Legendre function `P_n^m(x)`.
///
/// ```
/// use conekit::legendre::assoc_legendre;
/// assert_eq!(assoc_legendre(2, 0, 0.0).unwrap(), -0.5);
/// assert_eq!(assoc_legendre(1, 1, 0.0).unwrap(), -1.0);
/// ```
pub fn assoc_legendre(n: u32, m: i32, x: f64) -> Result<f64> {
    check_real_domain(x)?;
    check_degree(n)?;
    let am = m.unsigned_abs();
    if am > n {
        return Ok(0.0);
    }
    let value = column_generic(n, am, x)[n as usize];
    Ok(if m < 0 { negative_order_factor(n, am) * value } else { value })
}

/// Derivative `d/dx P_n^m(x)`.
///
/// In the interior this uses `(1 - x^2) P' = (n + m) P_{n-1}^m - n x P_n^m`.
/// At `x = +-1` the derivative is finite for even `m` and singular for odd `m`.
pub fn assoc_legendre_deriv(n: u32, m: i32, x: f64) -> Result<f64> {
    check_real_domain(x)?;
    check_degree(n)?;
    let am = m.unsigned_abs();
    if am > n {
        return Ok(0.0);
    }
    let factor = if m < 0 { negative_order_factor(n, am) } else { 1.0 };
    let d = if x.abs() == 1.0 {
        if am % 2 == 1 {
            return Err(crate::error::Error::Singularity(format!(
                "d/dx P_{n}^{m} is unbounded at x = {x} (odd order)"
            )));
        }
        match am {
            0 => {
                let s = if x < 0.0 { sign(n + 1) } else { 1.0 };
                s * f64::from(n) * f64::from(n + 1) / 2.0
            }
            // d/dx[(1 - x^2) P_n''] = -2x P_n'' at the endpoints
            2 => -2.0 * x * legendre_poly_derivative(n, 2, x),
            _ => 0.0,
        }
    } else {
        let col = column_generic(n, am, x);
        let p_n = col[n as usize];
        let p_prev = if n == 0 { 0.0 } else { col[n as usize - 1] };
        (f64::from(n + am) * p_prev - f64::from(n) * x * p_n) / (1.0 - x * x)
    };
    Ok(factor * d)
}

/// `d^k/dx^k P_n(x)` of the Legendre polynomial, for any real `x`.
///
/// The derivatives `Q_n^k = d^k P_n` satisfy the same recurrence in `n` as
/// `P_n^k`, seeded by `Q_k^k = (2k - 1)!!`.
pub fn legendre_poly_derivative(n: u32, k: u32, x: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut out = vec![0.0; n as usize + 1];
    ascend(n, k, x, double_factorial_odd(k), &mut out);
    out[n as usize]
}

/// Complex extension `P_n^m(z) = (-1)^m (1 - z^2)^{m/2} d^m P_n(z)` with the
/// square root taken on the principal branch of `sqrt(1 - z^2)`.
///
/// The branch cut of the principal root lies on `(-inf, 0]`, which the map
/// `z -> 1 - z^2` only reaches for real `|z| >= 1`; on the strip
/// `-1 < Re z < 1` the function is analytic. On the real axis the result
/// agrees bit-for-bit with [`assoc_legendre`].
pub fn assoc_legendre_complex(n: u32, m: i32, z: Complex64) -> Result<Complex64> {
    ensure!(z.re > -1.0 && z.re < 1.0, Domain, "Re z = {} outside (-1, 1)", z.re);
    check_degree(n)?;
    let am = m.unsigned_abs();
    if am > n {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let value = column_generic(n, am, z)[n as usize];
    Ok(if m < 0 { value * negative_order_factor(n, am) } else { value })
}

/// Closed form of `int_{x0}^1 P_n^m P_{n+2}^m dx`.
///
/// The integral equals `(1 - x0^2) (P_{n+2}' P_n - P_{n+2} P_n') / (4n + 6)`
/// at `x0`. The derivative relation removes the `(1 - x^2)` factor exactly,
/// which gives
///
/// ```text
/// [(n + m + 2) P_n P_{n+1} - (n + m) P_{n-1} P_{n+2} - 2 x0 P_n P_{n+2}] / (4n + 6)
/// ```
///
/// evaluated without division by `1 - x0^2`. Negative orders are reduced to
/// `|m|` through the negative-order factors of both functions.
pub fn product_integral_closed_form(n: u32, m: i32, x0: f64) -> Result<f64> {
    ensure!(x0 > -1.0 && x0 < 1.0, Domain, "x0 = {x0} outside (-1, 1)");
    check_degree(n)?;
    let am = m.unsigned_abs();
    if am > n {
        return Ok(0.0);
    }
    let col = column_generic(n + 2, am, x0);
    let p = |k: u32| col[k as usize];
    let p_prev = if n == 0 { 0.0 } else { p(n - 1) };
    let boundary = f64::from(n + am + 2) * p(n) * p(n + 1) - f64::from(n + am) * p_prev * p(n + 2) - 2.0 * x0 * p(n) * p(n + 2);
    let value = boundary / f64::from(4 * n + 6);
    Ok(if m < 0 {
        negative_order_factor(n, am) * negative_order_factor(n + 2, am) * value
    } else {
        value
    })
}

/// Coefficients of the Christoffel-Darboux type expansion of
/// `P_n^m P_{n+2}^m' - P_n^m' P_{n+2}^m` for fixed `(n, m)`, `0 <= m <= n`.
///
/// `a_k = (2k + 1)/(k - m + 1)` and `b_k = (k + m + 1)/(k - m + 2)` for
/// `k >= m`, both zero for `k < m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WronskianCoefficients {
    pub n: u32,
    pub m: u32,
}

impl WronskianCoefficients {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        ensure!(m <= n, Domain, "order {m} exceeds degree {n}");
        Ok(Self { n, m })
    }

    pub fn a(&self, k: u32) -> f64 {
        if self.m > k {
            0.0
        } else {
            f64::from(2 * k + 1) / f64::from(k - self.m + 1)
        }
    }

    pub fn b(&self, k: u32) -> f64 {
        if self.m > k {
            0.0
        } else {
            f64::from(k + self.m + 1) / f64::from(k - self.m + 2)
        }
    }

    /// Whether `n - m` is even (sum over `P_{m+2j}^m`) or odd (over `P_{m+1+2j}^m`).
    pub fn is_even(&self) -> bool {
        (self.n - self.m).is_multiple_of(2)
    }

    /// Index of the last term, `(n - m)/2` or `(n - m - 1)/2`.
    pub fn last_index(&self) -> u32 {
        (self.n - self.m) / 2
    }

    /// Degree multiplying the `j`-th coefficient.
    pub fn degree_of(&self, j: u32) -> u32 {
        let base = if self.is_even() { self.m } else { self.m + 1 };
        base + 2 * j
    }

    /// `c_j` (even case) or `c~_j` (odd case).
    pub fn coefficient(&self, j: u32) -> f64 {
        if j == self.last_index() {
            return self.a(self.n);
        }
        let k0 = self.degree_of(j);
        (k0..self.n).fold(self.a(k0), |acc, k| acc * self.b(k))
    }

    pub fn coefficients(&self) -> Vec<f64> {
        (0..=self.last_index()).map(|j| self.coefficient(j)).collect()
    }
}

/// Right-hand side `2 a_{n+1} x sum_j c_j [P_{d_j}^m(x)]^2` of the
/// Christoffel-Darboux type identity.
pub fn christoffel_darboux_sum(n: u32, m: u32, x: f64) -> Result<f64> {
    check_real_domain(x)?;
    check_degree(n)?;
    let coeffs = WronskianCoefficients::new(n, m)?;
    let col = column_generic(n, m, x);
    let sum: f64 = (0..=coeffs.last_index())
        .map(|j| {
            let p = col[coeffs.degree_of(j) as usize];
            coeffs.coefficient(j) * p * p
        })
        .sum();
    Ok(2.0 * coeffs.a(n + 1) * x * sum)
}

/// Direct Wronskian combination `P_n^m P_{n+2}^m' - P_n^m' P_{n+2}^m`.
pub fn wronskian(n: u32, m: i32, x: f64) -> Result<f64> {
    Ok(assoc_legendre(n, m, x)? * assoc_legendre_deriv(n + 2, m, x)?
        - assoc_legendre_deriv(n, m, x)? * assoc_legendre(n + 2, m, x)?)
}

/// Finite-difference residual of the order-reduction identity
/// `d/dx[(1 - x^2)^m d^m P_n] + C (1 - x^2)^{m-1} d^{m-1} P_n = 0`
/// with `C = n(n + 1) - m(m - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResidual {
    pub residual: f64,
    /// Largest magnitude among the two terms, for scaling tolerances.
    pub magnitude: f64,
}

/// Centered-difference step for [`ode_reduction_residual`].
pub const ODE_STEP: f64 = 1e-5;

pub fn ode_reduction_residual(n: u32, m: u32, x: f64) -> Result<OdeResidual> {
    ensure!(m >= 1 && m <= n, Domain, "order reduction needs 1 <= m <= n, got n = {n}, m = {m}");
    ensure!(x.abs() < 1.0, Domain, "x = {x} outside (-1, 1)");
    let outer = |t: f64| (1.0 - t * t).powi(m as i32) * legendre_poly_derivative(n, m, t);
    let derivative = (outer(x + ODE_STEP) - outer(x - ODE_STEP)) / (2.0 * ODE_STEP);
    let c = f64::from(n * (n + 1)) - f64::from(m * (m - 1));
    let lower = c * (1.0 - x * x).powi(m as i32 - 1) * legendre_poly_derivative(n, m - 1, x);
    Ok(OdeResidual {
        residual: derivative + lower,
        magnitude: derivative.abs().max(lower.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn low_degree_values() {
        assert_eq!(assoc_legendre(2, 0, 0.0).unwrap(), -0.5);
        assert_eq!(assoc_legendre(1, 1, 0.0).unwrap(), -1.0);
        assert_eq!(assoc_legendre(3, 4, 0.2).unwrap(), 0.0);
        assert_eq!(assoc_legendre(3, -4, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn degree_five_order_three_matches_symbolic_derivative() {
        let expected = oracle::assoc_legendre_poly(5, 3, 0.3);
        // (-1)^3 (0.91)^{3/2} (3780 x^2 - 420)/8 at x = 0.3
        assert!(rel(expected, 0.91f64.powf(1.5) * 9.975) < 1e-14);
        assert!(rel(assoc_legendre(5, 3, 0.3).unwrap(), expected) < 1e-13);
    }

    #[test]
    fn negative_order_uses_signed_factorial_ratio() {
        let x = 0.41;
        let p = assoc_legendre(4, 3, x).unwrap();
        let q = assoc_legendre(4, -3, x).unwrap();
        assert!(rel(q, -p / 5040.0) < 1e-14);
        let p2 = assoc_legendre(4, 2, x).unwrap();
        assert!(rel(assoc_legendre(4, -2, x).unwrap(), p2 * 2.0 / 720.0) < 1e-14);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        assert!(matches!(assoc_legendre(3, 1, 1.0001), Err(crate::Error::Domain(_))));
        assert!(assoc_legendre(3, 1, f64::NAN).is_err());
        assert!(assoc_legendre(3, 1, -1.0).is_ok());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(assoc_legendre_deriv(2, 0, 0.0).unwrap(), 0.0);
        assert!((assoc_legendre_deriv(2, 0, 0.5).unwrap() - 1.5).abs() < 1e-15);
        let fd = oracle::central_difference(|t| assoc_legendre(4, 2, t).unwrap(), 0.2, 1e-5);
        assert!(rel(assoc_legendre_deriv(4, 2, 0.2).unwrap(), fd) < 1e-6);
    }

    #[test]
    fn derivative_at_endpoints() {
        assert!(matches!(assoc_legendre_deriv(3, 1, 1.0), Err(crate::Error::Singularity(_))));
        for n in 0..8u32 {
            let v = f64::from(n * (n + 1)) / 2.0;
            assert!((assoc_legendre_deriv(n, 0, 1.0).unwrap() - v).abs() < 1e-12);
            let s = if n % 2 == 0 { -1.0 } else { 1.0 };
            assert!((assoc_legendre_deriv(n, 0, -1.0).unwrap() - s * v).abs() < 1e-12);
        }
        // m = 2 compared with one-sided limits of the interior formula
        for n in 2..7u32 {
            for x in [1.0, -1.0] {
                let inner = assoc_legendre_deriv(n, 2, x * (1.0 - 1e-7)).unwrap();
                let edge = assoc_legendre_deriv(n, 2, x).unwrap();
                assert!((inner - edge).abs() < 1e-4 * edge.abs().max(1.0), "n={n} x={x}");
            }
        }
        assert_eq!(assoc_legendre_deriv(6, 4, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn complex_examples() {
        let z = Complex64::new(0.4, 0.0);
        assert_eq!(assoc_legendre_complex(2, 1, z).unwrap().re, assoc_legendre(2, 1, 0.4).unwrap());
        let v = assoc_legendre_complex(2, 0, Complex64::new(0.0, 0.5)).unwrap();
        assert!((v - Complex64::new(-0.875, 0.0)).norm() < 1e-15);
        assert!(assoc_legendre_complex(2, 0, Complex64::new(1.0, 0.1)).is_err());
    }

    #[test]
    fn complex_extension_is_holomorphic() {
        let z = Complex64::new(0.1, 0.2);
        let h = 1e-6;
        let f = |w| assoc_legendre_complex(3, 2, w).unwrap();
        let along_real = (f(z + h) - f(z - h)) / (2.0 * h);
        let i = Complex64::new(0.0, 1.0);
        let along_imag = (f(z + i * h) - f(z - i * h)) / (2.0 * i * h);
        assert!((along_real - along_imag).norm() < 1e-6 * along_real.norm().max(1.0));
    }

    #[test]
    fn closed_form_examples() {
        assert!((product_integral_closed_form(0, 0, 0.5).unwrap() - 0.1875).abs() < 1e-15);
        assert!(product_integral_closed_form(3, 1, -1.0 + 1e-12).unwrap().abs() < 1e-9);
        let exact = oracle::gauss_kronrod(
            |x| assoc_legendre(4, 4, x).unwrap() * assoc_legendre(6, 4, x).unwrap(),
            0.3,
            1.0,
            1e-14,
        );
        assert!(rel(product_integral_closed_form(4, 4, 0.3).unwrap(), exact) < 1e-9);
        assert_eq!(product_integral_closed_form(2, 3, 0.3).unwrap(), 0.0);
        assert!(product_integral_closed_form(2, 1, 1.0).is_err());
    }

    #[test]
    fn closed_form_negative_order() {
        let x0 = 0.35;
        let direct = oracle::gauss_kronrod(
            |x| assoc_legendre(5, -3, x).unwrap() * assoc_legendre(7, -3, x).unwrap(),
            x0,
            1.0,
            1e-16,
        );
        assert!(rel(product_integral_closed_form(5, -3, x0).unwrap(), direct) < 1e-9);
    }

    #[test]
    fn christoffel_darboux_examples() {
        assert_eq!(christoffel_darboux_sum(2, 0, 0.0).unwrap(), 0.0);
        let direct = wronskian(3, 1, 0.6).unwrap();
        assert!(rel(christoffel_darboux_sum(3, 1, 0.6).unwrap(), direct) < 1e-10);
        let c = WronskianCoefficients::new(5, 5).unwrap();
        let p = assoc_legendre(5, 5, 0.2).unwrap();
        let single = 2.0 * c.a(6) * 0.2 * c.a(5) * p * p;
        assert!(rel(christoffel_darboux_sum(5, 5, 0.2).unwrap(), single) < 1e-14);
    }

    #[test]
    fn coefficient_invariants() {
        for n in 0..14u32 {
            for m in 0..=n {
                let c = WronskianCoefficients::new(n, m).unwrap();
                assert_eq!(c.coefficient(c.last_index()), c.a(n));
                assert!(c.coefficients().iter().all(|&v| v > 0.0));
                if m > 0 {
                    assert_eq!(c.a(m - 1), 0.0);
                    assert_eq!(c.b(m - 1), 0.0);
                }
            }
        }
        assert!(WronskianCoefficients::new(2, 3).is_err());
    }

    #[test]
    fn order_reduction_examples() {
        let r = ode_reduction_residual(2, 1, 0.4).unwrap();
        assert!(r.residual.abs() < 1e-6);
        for x in [-0.8, -0.1, 0.3, 0.95] {
            assert!(ode_reduction_residual(1, 1, x).unwrap().residual.abs() < 1e-9);
        }
        let r = ode_reduction_residual(6, 3, -0.7).unwrap();
        assert!(r.residual.abs() < 1e-5 * r.magnitude.max(1.0));
        assert!(ode_reduction_residual(3, 0, 0.1).is_err());
    }

    #[test]
    fn poly_derivatives_match_coefficients() {
        for n in 0..12u32 {
            for k in 0..=n + 1 {
                for x in [-0.9, -0.2, 0.0, 0.5, 1.0] {
                    let want = oracle::legendre_poly_derivative(n, k, x);
                    let got = legendre_poly_derivative(n, k, x);
                    assert!((want - got).abs() <= 1e-11 * want.abs().max(1.0), "n={n} k={k} x={x}");
                }
            }
        }
    }
}
