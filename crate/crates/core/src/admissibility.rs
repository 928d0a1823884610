//! Source-cone and medium-cone admissibility tests.
//!
//! A cone is an admissible source when some degree-2 harmonic has a nonzero
//! integral over its cross-section. It is an admissible medium when, for each
//! degree `N`, the matrix `C_N` of cap inner products
//! `I_N^{k,l} = int_{C cap S^2} Y_{N+2}^k conj(Y_N^l) dS`, `|k|, |l| <= N`, has
//! nonzero determinant. Both are certified one-sidedly: a value counts as
//! nonzero when it exceeds ten times its error bound, and a failure to certify
//! is reported as inconclusive, never as inadmissibility. The medium condition
//! quantifies over every `N`; a computation up to `N_max` certifies only those
//! degrees.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::geometry::{ApertureBounds, ConeSpec};
use crate::harmonics::{normalization, sph_harm, HarmonicTable, SphericalDirection};
use crate::legendre::product_integral_closed_form;
use crate::linalg::{scaled_determinant, ComplexMatrix, ScaledDeterminant};
use crate::quadrature::{integrate_cap_many, QuadStatus, QuadratureSpec};

/// Ratio a value must exceed its error bound by to count as nonzero.
pub const CERTIFY_FACTOR: f64 = 10.0;
/// Default largest degree for medium checks.
pub const DEFAULT_NMAX: u32 = 8;
/// Largest degree accepted by medium checks.
pub const MAX_NMAX: u32 = 12;

/// The zero `theta0 = arccos(1/sqrt 3)` of `3 cos^2 theta - 1`, which splits
/// the cap into the region where `Y_2^0` is positive (`theta < theta0`) and
/// where it is negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicAngle {
    pub theta0: f64,
}

impl MagicAngle {
    pub fn new() -> Self {
        Self { theta0: (1.0 / 3f64.sqrt()).acos() }
    }

    pub fn degrees(&self) -> f64 {
        self.theta0.to_degrees()
    }

    /// `3 cos^2 theta0 - 1`.
    pub fn residual(&self) -> f64 {
        3.0 * self.theta0.cos().powi(2) - 1.0
    }
}

impl Default for MagicAngle {
    fn default() -> Self {
        Self::new()
    }
}

/// `int_0^gamma (3 cos^2 t - 1) sin t dt = cos(gamma) sin^2(gamma)`; the
/// degree-2 zonal integral over a circular cap is
/// `sqrt(5 / 4 pi) pi cos(gamma) sin^2(gamma)`.
pub fn zonal_cap_factor(gamma: f64) -> f64 {
    gamma.cos() * gamma.sin().powi(2)
}

/// `int_{C_gamma} Y_2^0 dS` in closed form.
pub fn circular_zonal_integral(gamma: f64) -> f64 {
    (5.0 / (4.0 * PI)).sqrt() * PI * zonal_cap_factor(gamma)
}

/// `F(gamma1) + F(gamma2) - F(theta0)` with `F` = [`zonal_cap_factor`]; the
/// sandwich criterion holds when this is positive.
pub fn sandwich_margin(gamma1: f64, gamma2: f64) -> f64 {
    zonal_cap_factor(gamma1) + zonal_cap_factor(gamma2) - zonal_cap_factor(MagicAngle::new().theta0)
}

pub fn sandwich_holds(gamma1: f64, gamma2: f64) -> bool {
    sandwich_margin(gamma1, gamma2) > 0.0
}

/// Analytic sufficient conditions for a source cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceCriterion {
    /// Every circular cone of aperture in `(0, pi/2)`.
    Circular,
    /// `C` inside `C_theta0`: `Y_2^0` is positive on the cap.
    SmallAngle,
    /// `C` inside `C_gamma2` and outside the open `C_theta0`, `gamma2 < pi/2`:
    /// `Y_2^0` is negative almost everywhere on the cap.
    Hollow,
    /// `C_gamma1` inside `C` inside `C_gamma2` with a positive
    /// [`sandwich_margin`].
    Sandwich,
}

/// Criteria that hold for a cone with the given aperture bounds. Each is a
/// closed-form trigonometric test.
pub fn source_shortcuts(bounds: &ApertureBounds) -> Vec<SourceCriterion> {
    let theta0 = MagicAngle::new().theta0;
    let mut hits = Vec::new();
    if bounds.circular && bounds.outer > 0.0 && bounds.outer < FRAC_PI_2 {
        hits.push(SourceCriterion::Circular);
    }
    if bounds.outer <= theta0 {
        hits.push(SourceCriterion::SmallAngle);
    }
    if bounds.min_colatitude >= theta0 && bounds.outer > theta0 && bounds.outer < FRAC_PI_2 {
        hits.push(SourceCriterion::Hollow);
    }
    if bounds.inner > 0.0 && bounds.outer < FRAC_PI_2 && sandwich_holds(bounds.inner, bounds.outer) {
        hits.push(SourceCriterion::Sandwich);
    }
    hits
}

/// A cap integral with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderIntegral {
    pub m: i32,
    pub value: Complex64,
    pub err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceVerdict {
    /// Some integral exceeds ten times its error bound.
    Admissible,
    /// Every integral is within ten error bounds of zero. This does not show
    /// the cone is inadmissible.
    NotDetected,
    /// Quadrature did not reach the requested tolerance.
    BelowTolerance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceReport {
    /// `int Y_2^m dS` for `m = -2..=2`.
    pub integrals: Vec<OrderIntegral>,
    pub max_abs: f64,
    pub verdict: SourceVerdict,
    pub criteria_hits: Vec<SourceCriterion>,
    pub status: QuadStatus,
}

/// Integrates the five degree-2 harmonics over the cone's cross-section.
pub fn source_check(cone: &ConeSpec, spec: &QuadratureSpec) -> Result<SourceReport> {
    let f = |d: SphericalDirection, out: &mut [Complex64]| {
        for (slot, m) in out.iter_mut().zip(-2..=2) {
            *slot = sph_harm(2, m, d).unwrap_or_default();
        }
    };
    let q = integrate_cap_many(&f, 5, cone, spec)?;
    let integrals: Vec<OrderIntegral> =
        (-2..=2).zip(q.values.iter().zip(&q.errors)).map(|(m, (v, e))| OrderIntegral { m, value: *v, err: *e }).collect();
    let max_abs = integrals.iter().map(|i| i.value.norm()).fold(0.0, f64::max);
    let verdict = if q.status == QuadStatus::Unconverged {
        SourceVerdict::BelowTolerance
    } else if integrals.iter().any(|i| i.value.norm() > CERTIFY_FACTOR * i.err) {
        SourceVerdict::Admissible
    } else {
        SourceVerdict::NotDetected
    };
    Ok(SourceReport { integrals, max_abs, verdict, criteria_hits: source_shortcuts(&cone.aperture_bounds()), status: q.status })
}

/// The matrix `I_N^{k,l}`, rows `k = -N..=N` and columns `l = -N..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapIntegralTable {
    pub n: u32,
    pub entries: ComplexMatrix,
    /// Per-entry error estimates, row-major.
    pub errors: Vec<f64>,
    /// Largest entry error.
    pub err: f64,
    pub status: QuadStatus,
}

impl CapIntegralTable {
    pub fn entry(&self, k: i32, l: i32) -> Complex64 {
        let n = self.n as i32;
        self.entries.get((k + n) as usize, (l + n) as usize)
    }

    pub fn entry_err(&self, k: i32, l: i32) -> f64 {
        let n = self.n as i32;
        self.errors[((k + n) * (2 * n + 1) + l + n) as usize]
    }

    /// Largest `|I_N^{k,l}|` with `k != l`.
    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.entries.dim();
        (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| self.entries.get(i, j).norm()).fold(0.0, f64::max)
    }
}

fn table_offsets(n_max: u32) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(n_max as usize + 2);
    let mut acc = 0;
    for n in 0..=n_max as usize {
        offsets.push(acc);
        acc += (2 * n + 1) * (2 * n + 1);
    }
    offsets.push(acc);
    offsets
}

/// Tables for every `N <= n_max`, integrated on one shared set of nodes.
pub fn cap_integral_tables(cone: &ConeSpec, n_max: u32, spec: &QuadratureSpec) -> Result<Vec<CapIntegralTable>> {
    ensure!(n_max <= MAX_NMAX, Config, "degree {n_max} exceeds the supported maximum {MAX_NMAX}");
    let harmonics = HarmonicTable::new(n_max + 2)?;
    let offsets = table_offsets(n_max);
    let dim = offsets[n_max as usize + 1];
    let f = |d: SphericalDirection, out: &mut [Complex64]| {
        let mut y = vec![0.0; harmonics.len()];
        harmonics.evaluate(d.theta.cos().clamp(-1.0, 1.0), &mut y).expect("buffer sized by the table");
        // e^{i j phi} for j = -2 n_max ..= 2 n_max
        let span = 2 * n_max as i32;
        let waves: Vec<Complex64> = (-span..=span).map(|j| Complex64::from_polar(1.0, f64::from(j) * d.phi)).collect();
        for n in 0..=n_max {
            let ni = n as i32;
            let width = (2 * n + 1) as usize;
            let base = offsets[n as usize];
            for k in -ni..=ni {
                let a = y[HarmonicTable::index(n + 2, k)];
                for l in -ni..=ni {
                    let b = y[HarmonicTable::index(n, l)];
                    let slot = base + (k + ni) as usize * width + (l + ni) as usize;
                    out[slot] = waves[(k - l + span) as usize] * (a * b);
                }
            }
        }
    };
    let q = integrate_cap_many(&f, dim, cone, spec)?;
    (0..=n_max)
        .map(|n| {
            let range = offsets[n as usize]..offsets[n as usize + 1];
            let errors = q.errors[range.clone()].to_vec();
            let err = errors.iter().copied().fold(0.0, f64::max);
            let converged = errors.iter().zip(&q.l1[range.clone()]).all(|(e, s)| *e <= spec.target_rel_tol * s);
            Ok(CapIntegralTable {
                n,
                entries: ComplexMatrix::from_rows((2 * n + 1) as usize, q.values[range].to_vec())?,
                errors,
                err,
                status: if converged { QuadStatus::Converged } else { QuadStatus::Unconverged },
            })
        })
        .collect()
}

/// The table for one degree.
pub fn cap_integral_table(cone: &ConeSpec, n: u32, spec: &QuadratureSpec) -> Result<CapIntegralTable> {
    Ok(cap_integral_tables(cone, n, spec)?.pop().expect("at least one table"))
}

/// `I_N^{m,m}` over the circular cap of aperture `rho`, without quadrature:
/// `2 pi c_{N+2,m} c_{N,m} int_{cos rho}^1 P_{N+2}^m P_N^m dx` with the
/// harmonic normalizations `c`. Off-diagonal entries vanish on circular caps.
pub fn circular_diagonal_closed_form(n: u32, m: i32, rho: f64) -> Result<f64> {
    ensure!(rho > 0.0 && rho < FRAC_PI_2, Domain, "aperture {rho} outside (0, pi/2)");
    ensure!(m.unsigned_abs() <= n, Domain, "order {m} exceeds degree {n}");
    let integral = product_integral_closed_form(n, m, rho.cos())?;
    Ok(2.0 * PI * normalization(n + 2, m) * normalization(n, m) * integral)
}

/// `D_N` for the circular cone, as a product of closed-form diagonal entries.
pub fn circular_determinant_closed_form(n: u32, rho: f64) -> Result<f64> {
    (-(n as i32)..=n as i32).map(|m| circular_diagonal_closed_form(n, m, rho)).product()
}

/// Determinant of one degree's projection matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeDeterminant {
    pub n: u32,
    pub det: ScaledDeterminant,
    pub status: QuadStatus,
}

impl DegreeDeterminant {
    pub fn from_table(table: &CapIntegralTable) -> Self {
        Self { n: table.n, det: scaled_determinant(&table.entries, table.err), status: table.status }
    }

    pub fn is_certified(&self) -> bool {
        self.status == QuadStatus::Converged && self.det.is_certified()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediumVerdict {
    /// Every determinant up to this degree is certified nonzero. Degrees
    /// above it are not examined.
    AdmissibleUpTo(u32),
    /// The determinant at this degree could not be separated from zero.
    InconclusiveAt(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediumReport {
    pub determinants: Vec<DegreeDeterminant>,
    pub verdict: MediumVerdict,
}

pub fn medium_check(cone: &ConeSpec, n_max: u32, spec: &QuadratureSpec) -> Result<MediumReport> {
    let tables = cap_integral_tables(cone, n_max, spec)?;
    let determinants: Vec<DegreeDeterminant> = tables.iter().map(DegreeDeterminant::from_table).collect();
    let verdict = match determinants.iter().find(|d| !d.is_certified()) {
        Some(d) => MediumVerdict::InconclusiveAt(d.n),
        None => MediumVerdict::AdmissibleUpTo(n_max),
    };
    Ok(MediumReport { determinants, verdict })
}
