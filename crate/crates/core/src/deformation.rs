//! Scans of projection determinants along a star-shaped deformation
//! `theta < t sigma(phi) + (1 - t) rho0` of a circular cone.
//!
//! At `t = 0` the member is the circular cone of aperture `rho0`, whose
//! determinants are known in closed form and nonzero. The determinants are
//! real-analytic in `t`, so they can vanish only on a countable set; the scan
//! locates candidates for that set on a grid and refines each one by a
//! golden-section search on `|D_N|`. Candidates are reported as suspected
//! zeros only; the scan never claims a determinant vanishes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::admissibility::{cap_integral_table, cap_integral_tables, DegreeDeterminant, MAX_NMAX};
use crate::error::{ensure, Result};
use crate::geometry::{cap_hausdorff, CapDistance, ConeSpec, RadialProfile};
use crate::quadrature::{QuadStatus, QuadratureSpec};

/// `min(rho0 / (2 g_sup), epsilon_user)` with `g_sup = sup (sigma - rho0)`:
/// every member with `t > -value` keeps its radius above `rho0 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilon0 {
    pub value: f64,
    pub g_sup: f64,
    pub epsilon_user: f64,
}

/// Samples per Fourier degree when locating `sup sigma`.
const SUP_SAMPLES_PER_DEGREE: usize = 64;

/// `sup sigma`, from a sample grid polished by golden section.
fn profile_max(profile: &RadialProfile) -> f64 {
    -profile_extreme(profile, -1.0)
}

/// `inf sigma`, from a sample grid polished by golden section.
fn profile_min(profile: &RadialProfile) -> f64 {
    profile_extreme(profile, 1.0)
}

/// `min sign * sigma`.
fn profile_extreme(profile: &RadialProfile, sign: f64) -> f64 {
    let count = SUP_SAMPLES_PER_DEGREE * (profile.degree() + 1);
    let h = 2.0 * PI / count as f64;
    let (j, _) = (0..count)
        .map(|j| (j, sign * profile.eval(h * j as f64)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let centre = h * j as f64;
    let polished = golden_section_min(|phi| Ok(sign * profile.eval(phi)), centre - h, centre + h, 1e-12)
        .map(|g| g.f_min)
        .unwrap_or(f64::INFINITY);
    polished.min(sign * profile.eval(centre))
}

/// Slack on `min sigma >= rho0` absorbing the polishing error.
const MIN_SLACK: f64 = 1e-12;

pub fn compute_epsilon0(profile: &RadialProfile, rho0: f64, epsilon_user: f64) -> Result<Epsilon0> {
    ensure!(epsilon_user > 0.0, Config, "epsilon {epsilon_user} must be positive");
    ensure!(rho0 > 0.0, InvalidGeometry, "rho0 = {rho0} must be positive");
    let lower = profile_min(profile);
    ensure!(lower >= rho0 - MIN_SLACK, InvalidGeometry, "profile minimum {lower} is below rho0 = {rho0}");
    let g_sup = profile_max(profile) - rho0;
    // g_sup = 0 for sigma = rho0; the whole negative range is then harmless.
    let value = if g_sup > 0.0 { (rho0 / (2.0 * g_sup)).min(epsilon_user) } else { epsilon_user };
    Ok(Epsilon0 { value, g_sup, epsilon_user })
}

/// Result of a golden-section minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenMin {
    pub x: f64,
    pub f_min: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub iterations: u32,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopped when the
/// bracket is narrower than `width`.
pub fn golden_section_min<F>(mut f: F, mut lo: f64, mut hi: f64, width: f64) -> Result<GoldenMin>
where
    F: FnMut(f64) -> Result<f64>,
{
    ensure!(lo < hi, Config, "empty bracket [{lo}, {hi}]");
    ensure!(width > 0.0, Config, "width {width} must be positive");
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    let mut iterations = 0;
    while hi - lo > width {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b)?;
        }
        iterations += 1;
    }
    let (x, f_min) = if fa <= fb { (a, fa) } else { (b, fb) };
    Ok(GoldenMin { x, f_min, lo, hi, iterations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroKind {
    /// A grid-local minimum of `|D_N|` below the zero threshold.
    SmallMinimum,
    /// The phase of `D_N` turns by more than a quarter turn between
    /// neighbouring grid points (a sign change when `D_N` is real).
    PhaseReversal,
}

/// A parameter interval on which `D_N` may vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuspectedZero {
    pub n: u32,
    pub lo: f64,
    pub hi: f64,
    /// Golden-section iterations spent on the interval.
    pub depth: u32,
    /// Smallest `ln |D_N|` seen during refinement.
    pub min_log_abs: f64,
    pub kind: ZeroKind,
}

impl SuspectedZero {
    pub fn contains(&self, rho: f64) -> bool {
        (self.lo..=self.hi).contains(&rho)
    }

    pub fn centre(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Scan parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub n_max: u32,
    pub grid_size: usize,
    /// Also scan `(-epsilon0, 0)`.
    pub include_negative: bool,
    /// User bound on the negative range; only used with `include_negative`.
    pub epsilon_user: f64,
    /// Target width of refined suspect intervals.
    pub refine_width: f64,
}

impl ScanConfig {
    pub fn new(n_max: u32, grid_size: usize) -> Self {
        Self { n_max, grid_size, include_negative: false, epsilon_user: 0.5, refine_width: 1e-6 }
    }
}

/// Determinants on a parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationScan {
    pub rho_grid: Vec<f64>,
    /// `log_abs_det[N][j] = ln |D_N(rho_j)|`.
    pub log_abs_det: Vec<Vec<f64>>,
    /// Bounds on the error of `ln |D_N(rho_j)|` (relative error of `|D_N|`).
    pub err_bounds: Vec<Vec<f64>>,
    pub phases: Vec<Vec<Complex64>>,
    pub normalized: Vec<Vec<f64>>,
    /// Grid indices where quadrature missed its tolerance.
    pub unconverged: Vec<usize>,
    pub suspected_zeros: Vec<SuspectedZero>,
    pub epsilon0: Option<Epsilon0>,
}

/// Multiplier on the propagated error in the zero threshold.
const ERR_THRESHOLD_FACTOR: f64 = 1e3;
/// Fraction of the median `|D_N|` in the zero threshold.
const MEDIAN_THRESHOLD_FACTOR: f64 = 1e-12;
/// Phase turn between neighbours that opens a bracket.
const PHASE_JUMP: f64 = PI / 2.0;

fn member(profile: &RadialProfile, rho0: f64, t: f64) -> Result<ConeSpec> {
    ConeSpec::deformed(profile.clone(), rho0, t)
}

/// `ln |D_N|` at one parameter.
fn log_abs_at(profile: &RadialProfile, rho0: f64, n: u32, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let table = cap_integral_table(&member(profile, rho0, t)?, n, spec)?;
    Ok(DegreeDeterminant::from_table(&table).det.log_abs)
}

fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NEG_INFINITY;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

/// Grid brackets `(lo, hi, kind)` for one degree.
///
/// `log_abs` is `ln |D|`, `rel_err` the relative error of `|D|`.
pub fn find_brackets(log_abs: &[f64], rel_err: &[f64], phases: &[Complex64]) -> Vec<(usize, usize, ZeroKind)> {
    let n = log_abs.len();
    let floor = median(log_abs) + MEDIAN_THRESHOLD_FACTOR.ln();
    let below = |j: usize| log_abs[j] < floor || rel_err[j] * ERR_THRESHOLD_FACTOR > 1.0;
    let mut out = Vec::new();
    for j in 0..n {
        let left = j == 0 || log_abs[j] <= log_abs[j - 1];
        let right = j + 1 == n || log_abs[j] <= log_abs[j + 1];
        if left && right && below(j) {
            out.push((j.saturating_sub(1), (j + 1).min(n - 1), ZeroKind::SmallMinimum));
        }
        if j + 1 < n {
            let (a, b) = (phases[j], phases[j + 1]);
            if a.norm() > 0.0 && b.norm() > 0.0 && (b / a).arg().abs() > PHASE_JUMP {
                out.push((j, j + 1, ZeroKind::PhaseReversal));
            }
        }
    }
    out
}

fn grid(config: &ScanConfig, eps: Option<Epsilon0>) -> Vec<f64> {
    let g = config.grid_size;
    let start = match eps {
        // Stay strictly inside (-epsilon0, 1].
        Some(e) => -e.value * (1.0 - 1.0 / g as f64),
        None => 0.0,
    };
    let mut out: Vec<f64> = (0..g).map(|j| start + (1.0 - start) * j as f64 / (g - 1) as f64).collect();
    if start < 0.0 {
        // Put the circular anchor on the grid.
        let k = out.iter().position(|&r| r >= 0.0).unwrap_or(g - 1);
        out[k] = 0.0;
        out.dedup();
    }
    out
}

/// Scans `|D_N|`, `N <= n_max`, along the deformation of `profile` from the
/// circular cone of aperture `rho0`.
pub fn scan(profile: &RadialProfile, rho0: f64, config: &ScanConfig, spec: &QuadratureSpec) -> Result<DeformationScan> {
    ensure!(config.grid_size >= 3, Config, "grid needs at least 3 points");
    ensure!(config.n_max <= MAX_NMAX, Config, "degree {} exceeds {MAX_NMAX}", config.n_max);
    ensure!(config.refine_width > 0.0, Config, "refinement width must be positive");
    spec.validate()?;
    let eps = if config.include_negative { Some(compute_epsilon0(profile, rho0, config.epsilon_user)?) } else { None };
    let rho_grid = grid(config, eps);
    let columns: Vec<Vec<DegreeDeterminant>> = rho_grid
        .par_iter()
        .map(|&t| Ok(cap_integral_tables(&member(profile, rho0, t)?, config.n_max, spec)?.iter().map(DegreeDeterminant::from_table).collect()))
        .collect::<Result<_>>()?;
    let nn = config.n_max as usize + 1;
    let pick = |f: &dyn Fn(&DegreeDeterminant) -> f64| -> Vec<Vec<f64>> {
        (0..nn).map(|n| columns.iter().map(|c| f(&c[n])).collect()).collect()
    };
    let log_abs_det = pick(&|d| d.det.log_abs);
    let err_bounds = pick(&|d| d.det.rel_err());
    let normalized = pick(&|d| d.det.normalized);
    let phases: Vec<Vec<Complex64>> = (0..nn).map(|n| columns.iter().map(|c| c[n].det.phase).collect()).collect();
    let unconverged =
        (0..rho_grid.len()).filter(|&j| columns[j].iter().any(|d| d.status == QuadStatus::Unconverged)).collect();

    let brackets: Vec<(u32, f64, f64, ZeroKind)> = (0..nn)
        .flat_map(|n| {
            find_brackets(&log_abs_det[n], &err_bounds[n], &phases[n])
                .into_iter()
                .map(|(a, b, kind)| (n as u32, rho_grid[a], rho_grid[b], kind))
                .collect::<Vec<_>>()
        })
        .collect();
    let refined: Vec<SuspectedZero> = brackets
        .par_iter()
        .map(|&(n, lo, hi, kind)| {
            let g = golden_section_min(|t| log_abs_at(profile, rho0, n, t, spec), lo, hi, config.refine_width)?;
            Ok(SuspectedZero { n, lo: g.lo, hi: g.hi, depth: g.iterations, min_log_abs: g.f_min, kind })
        })
        .collect::<Result<_>>()?;
    Ok(DeformationScan {
        rho_grid,
        log_abs_det,
        err_bounds,
        phases,
        normalized,
        unconverged,
        suspected_zeros: merge_suspects(refined, config.refine_width),
        epsilon0: eps,
    })
}

/// Merges intervals of the same degree that overlap or lie within `gap`.
fn merge_suspects(mut zs: Vec<SuspectedZero>, gap: f64) -> Vec<SuspectedZero> {
    zs.sort_by(|a, b| a.n.cmp(&b.n).then(a.lo.total_cmp(&b.lo)));
    let mut out: Vec<SuspectedZero> = Vec::new();
    for z in zs {
        match out.last_mut() {
            Some(p) if p.n == z.n && z.lo <= p.hi + gap => {
                p.hi = p.hi.max(z.hi);
                p.depth = p.depth.max(z.depth);
                p.min_log_abs = p.min_log_abs.min(z.min_log_abs);
                if z.kind == ZeroKind::PhaseReversal {
                    p.kind = ZeroKind::PhaseReversal;
                }
            }
            _ => out.push(z),
        }
    }
    out
}

impl DeformationScan {
    pub fn is_suspect(&self, rho: f64) -> bool {
        self.suspected_zeros.iter().any(|z| z.contains(rho))
    }

    /// Total length of the suspect intervals.
    pub fn suspect_measure(&self) -> f64 {
        self.suspected_zeros.iter().map(|z| z.hi - z.lo).sum()
    }

    /// Every determinant at grid point `j` is certified nonzero.
    pub fn certified_at(&self, j: usize) -> bool {
        !self.unconverged.contains(&j) && self.normalized.iter().zip(&self.err_bounds).all(|(v, e)| e[j] * 10.0 < 1.0 && v[j] > 0.0)
    }

    /// `rho,N,log_abs_det,err_bound,suspect` rows ordered by `rho`, then `N`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rho,N,log_abs_det,err_bound,suspect\n");
        for (j, &rho) in self.rho_grid.iter().enumerate() {
            for n in 0..self.log_abs_det.len() {
                let suspect = self.suspected_zeros.iter().any(|z| z.n as usize == n && z.contains(rho));
                s.push_str(&format!("{rho},{n},{},{:e},{}\n", self.log_abs_det[n][j], self.err_bounds[n][j], suspect));
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NearestAdmissible {
    Found { rho: f64, distance: CapDistance },
    /// No certified, non-suspect grid member lies within the distance bound.
    NotFound,
}

/// Boundary samples used for the distance in [`nearest_admissible`].
pub const DISTANCE_RESOLUTION: usize = 512;

/// Largest grid parameter whose member is certified, lies outside every
/// suspected-zero interval, and whose cap is within Hausdorff distance `delta`
/// of the cap of `sigma`.
pub fn nearest_admissible(profile: &RadialProfile, rho0: f64, delta: f64, scan: &DeformationScan) -> Result<NearestAdmissible> {
    ensure!(delta > 0.0, Config, "distance bound {delta} must be positive");
    ensure!(scan.rho_grid.last().is_some_and(|&r| r >= 1.0), Config, "scan does not reach the target member");
    let target = ConeSpec::deformed(profile.clone(), rho0, 1.0)?;
    for j in (0..scan.rho_grid.len()).rev() {
        let rho = scan.rho_grid[j];
        if scan.is_suspect(rho) || !scan.certified_at(j) {
            continue;
        }
        let distance = cap_hausdorff(&member(profile, rho0, rho)?, &target, DISTANCE_RESOLUTION)?;
        if distance.value < delta {
            return Ok(NearestAdmissible::Found { rho, distance });
        }
        // The distance grows as rho decreases, so no smaller rho qualifies.
        return Ok(NearestAdmissible::NotFound);
    }
    Ok(NearestAdmissible::NotFound)
}
