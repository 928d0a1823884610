//! Spherical harmonics and Laplace's second integral representation.
//!
//! ```text
//! Y_N^m(theta, phi) = (-1)^m sqrt((2N+1)/(4 pi) (N-m)!/(N+m)!) e^{i m phi} P_N^m(cos theta)
//! ```
//!
//! with `P_N^m` from [`crate::legendre`] (Condon-Shortley phase included, so
//! the two signs cancel for `m >= 0`). The functions are orthonormal on the
//! unit sphere and satisfy `conj(Y_N^m) = (-1)^m Y_N^{-m}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::legendre::{assoc_legendre, assoc_legendre_column, ln_factorial_ratio, MAX_DEGREE};

/// A point on the unit sphere in colatitude/azimuth coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalDirection {
    /// Colatitude in `[0, pi]`.
    pub theta: f64,
    /// Azimuth in `[0, 2 pi)`.
    pub phi: f64,
}

impl SphericalDirection {
    /// Builds a direction, wrapping the azimuth into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        ensure!((0.0..=PI).contains(&theta), Domain, "colatitude {theta} outside [0, pi]");
        ensure!(phi.is_finite(), Domain, "azimuth {phi} is not finite");
        let mut phi = phi.rem_euclid(2.0 * PI);
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn from_cartesian(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        ensure!(r > 0.0, Domain, "zero vector has no direction");
        let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
        Self::new(rho.atan2(v[2]), v[1].atan2(v[0]))
    }

    /// `(sin t cos p, sin t sin p, cos t)`.
    pub fn to_cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Great-circle distance, accurate for nearby and antipodal points.
    pub fn geodesic_distance(&self, other: &Self) -> f64 {
        let a = self.to_cartesian();
        let b = other.to_cartesian();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt().atan2(dot)
    }
}

fn parity(m: i32) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^m sqrt((2N+1)/(4 pi) (N-m)!/(N+m)!)`, valid for negative `m`.
pub fn normalization(n: u32, m: i32) -> f64 {
    let am = m.unsigned_abs();
    debug_assert!(am <= n);
    let ln_ratio = if m >= 0 {
        ln_factorial_ratio(n - am, n + am)
    } else {
        ln_factorial_ratio(n + am, n - am)
    };
    parity(m) * (f64::from(2 * n + 1) / (4.0 * PI)).sqrt() * (0.5 * ln_ratio).exp()
}

fn check_order(n: u32, m: i32) -> Result<()> {
    ensure!(m.unsigned_abs() <= n, Domain, "order {m} exceeds degree {n}");
    ensure!(n <= MAX_DEGREE, Domain, "degree {n} exceeds the supported maximum {MAX_DEGREE}");
    Ok(())
}

/// The azimuth-free factor `Y_N^m(theta, 0)`, a real number.
pub fn sph_harm_theta(n: u32, m: i32, theta: f64) -> Result<f64> {
    check_order(n, m)?;
    Ok(normalization(n, m) * assoc_legendre(n, m, theta.cos().clamp(-1.0, 1.0))?)
}

/// Spherical harmonic `Y_N^m` at a direction.
pub fn sph_harm(n: u32, m: i32, dir: SphericalDirection) -> Result<Complex64> {
    let radial = sph_harm_theta(n, m, dir.theta)?;
    Ok(Complex64::from_polar(radial, f64::from(m) * dir.phi))
}

/// Precomputed normalizations for evaluating every `Y_n^m(theta, 0)` with
/// `n <= nmax` at one colatitude in `O(nmax^2)` work.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    nmax: u32,
    /// `norms[n][m]` for `0 <= m <= n`.
    norms: Vec<Vec<f64>>,
}

impl HarmonicTable {
    pub fn new(nmax: u32) -> Result<Self> {
        ensure!(nmax <= MAX_DEGREE, Domain, "degree {nmax} exceeds the supported maximum {MAX_DEGREE}");
        let norms = (0..=nmax).map(|n| (0..=n as i32).map(|m| normalization(n, m)).collect()).collect();
        Ok(Self { nmax, norms })
    }

    pub fn nmax(&self) -> u32 {
        self.nmax
    }

    /// Index of `(n, m)` in the buffer filled by [`Self::evaluate`].
    pub fn index(n: u32, m: i32) -> usize {
        let n = n as i64;
        (n * n + n + i64::from(m)) as usize
    }

    pub fn len(&self) -> usize {
        ((self.nmax + 1) * (self.nmax + 1)) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Fills `out[index(n, m)] = Y_n^m(theta, 0)` for every `n <= nmax`,
    /// `|m| <= n`, with `x = cos(theta)`.
    pub fn evaluate(&self, x: f64, out: &mut [f64]) -> Result<()> {
        ensure!(out.len() >= self.len(), Config, "output buffer too short");
        for m in 0..=self.nmax {
            let column = assoc_legendre_column(self.nmax, m, x)?;
            for n in m..=self.nmax {
                let v = self.norms[n as usize][m as usize] * column[n as usize];
                out[Self::index(n, m as i32)] = v;
                if m > 0 {
                    // Y_n^{-m}(theta, 0) = (-1)^m Y_n^m(theta, 0)
                    out[Self::index(n, -(m as i32))] = parity(m as i32) * v;
                }
            }
        }
        Ok(())
    }
}

/// Default trapezoid node count for [`laplace_second_rep_lhs`].
pub fn laplace_default_nodes(n: u32, m: i32) -> usize {
    4 * (n as usize + m.unsigned_abs() as usize) + 64
}

/// Trapezoid approximation of
/// `(1 / 2 pi) int_0^{2 pi} e^{i m psi} (cos t + i sin t cos psi)^{-(N+1)} d psi`.
///
/// The power is taken through the principal logarithm. For `0 <= t < pi/2`
/// the base has real part `cos t > 0`, so the logarithm never meets its cut.
pub fn laplace_second_rep_lhs(n: u32, m: i32, theta: f64, nodes: usize) -> Result<Complex64> {
    ensure!((0.0..PI / 2.0).contains(&theta), Domain, "colatitude {theta} outside [0, pi/2)");
    ensure!(nodes >= 1, Config, "need at least one trapezoid node");
    let (st, ct) = theta.sin_cos();
    let power = -f64::from(n + 1);
    let samples: Vec<Complex64> = (0..nodes)
        .map(|j| {
            let psi = 2.0 * PI * j as f64 / nodes as f64;
            let base = Complex64::new(ct, st * psi.cos());
            (base.ln() * power).exp() * Complex64::from_polar(1.0, f64::from(m) * psi)
        })
        .collect();
    Ok(crate::sum::pairwise_complex(&samples) / nodes as f64)
}

/// The real right-hand side `((N - m)! (-1)^m / N!) P_N^m(cos t)`, with
/// `(N - m)!` read as `(N + |m|)!` for negative `m` and zero for `|m| > N`.
///
/// The azimuthal integral is not equal to this expression in general: the
/// integral picks up the phase `i^|m|` and is even in `m` (see
/// [`laplace_second_rep_exact`]). The two agree when `|m|` is a multiple of
/// four and `m >= 0`, or `m = 0`.
pub fn laplace_second_rep_rhs(n: u32, m: i32, theta: f64) -> Result<f64> {
    ensure!((0.0..PI / 2.0).contains(&theta), Domain, "colatitude {theta} outside [0, pi/2)");
    if m.unsigned_abs() > n {
        return Ok(0.0);
    }
    let top = i64::from(n) - i64::from(m);
    let ratio = ln_factorial_ratio(top as u32, n).exp();
    Ok(ratio * parity(m) * assoc_legendre(n, m, theta.cos())?)
}

/// Exact value of the azimuthal integral for `|m| <= N`:
/// `i^|m| (N - |m|)! / N! P_N^|m|(cos t)`. Returns `None` for `|m| > N`,
/// where the integral is nonzero but has no closed form here.
pub fn laplace_second_rep_exact(n: u32, m: i32, theta: f64) -> Result<Option<Complex64>> {
    ensure!((0.0..PI / 2.0).contains(&theta), Domain, "colatitude {theta} outside [0, pi/2)");
    let am = m.unsigned_abs();
    if am > n {
        return Ok(None);
    }
    let magnitude = ln_factorial_ratio(n - am, n).exp() * assoc_legendre(n, am as i32, theta.cos())?;
    let phase = match am % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    Ok(Some(phase * magnitude))
}
