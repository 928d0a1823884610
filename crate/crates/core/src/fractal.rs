//! Box-counting dimension of planar point sets and the dimension test for
//! Sobolev membership of characteristic functions.
//!
//! A region `D` in `R^n` has `1_D` in `H^{tau, p}` whenever the Minkowski
//! dimension of its boundary is below `n - p tau`.

use rayon::prelude::*;

use crate::error::{ensure, Result};

/// Smallest ratio between the coarsest and finest box sizes.
pub const MIN_SCALE_DECADES: f64 = 2.0;
/// Fraction of scales dropped at each end of the regression.
pub const TRIM_FRACTION: f64 = 0.2;
/// Half-width of the band around `n - p tau` treated as a tie.
pub const MEMBERSHIP_BAND: f64 = 1e-12;

/// Geometrically spaced box sizes from `coarse` down to `fine`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRange {
    pub coarse: f64,
    pub fine: f64,
    pub steps: usize,
}

impl ScaleRange {
    pub fn new(coarse: f64, fine: f64, steps: usize) -> Self {
        Self { coarse, fine, steps }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.fine > 0.0 && self.fine.is_finite() && self.coarse.is_finite(),
            Config,
            "box sizes must be positive and finite"
        );
        ensure!(self.steps >= 5, Config, "need at least 5 scales, got {}", self.steps);
        ensure!(
            (self.coarse / self.fine).log10() >= MIN_SCALE_DECADES - 1e-12,
            Config,
            "scale range [{}, {}] spans less than {MIN_SCALE_DECADES} decades",
            self.fine,
            self.coarse
        );
        Ok(())
    }

    /// Decreasing box sizes.
    pub fn scales(&self) -> Vec<f64> {
        let ratio = (self.fine / self.coarse).ln();
        (0..self.steps).map(|j| self.coarse * (ratio * j as f64 / (self.steps - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimEstimate {
    /// Decreasing box sizes.
    pub scales: Vec<f64>,
    /// Occupied boxes at each scale, averaged over grid offsets.
    pub counts: Vec<f64>,
    /// Least-squares slope of `ln count` against `ln (1 / scale)`.
    pub slope: f64,
    pub r_squared: f64,
    /// Twice the standard error of the slope.
    pub confidence_halfwidth: f64,
    /// Indices into `scales` used by the regression.
    pub fit_range: (usize, usize),
}

/// Grid offset `j` in units of the box size, from the `R2` low-discrepancy
/// sequence. Offset 0 is the unshifted grid.
pub fn grid_offset(j: usize) -> [f64; 2] {
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_2;
    let j = j as f64;
    [(j * A1).fract(), (j * A2).fract()]
}

/// Boxes of side `scale` containing at least one point, with the grid shifted
/// by `offset * scale`.
pub fn box_count(points: &[[f64; 2]], scale: f64, offset: [f64; 2]) -> usize {
    let mut cells: Vec<(i64, i64)> = points
        .iter()
        .map(|p| (((p[0] / scale) + offset[0]).floor() as i64, ((p[1] / scale) + offset[1]).floor() as i64))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

/// Box-counting dimension of `points`, averaging the counts over
/// `grid_offsets` shifted grids and regressing over the middle scales.
///
/// Counts only resolve the underlying set down to the point spacing, so
/// `scales.fine` should stay above it; see [`densify_polyline`].
pub fn box_dimension(points: &[[f64; 2]], scales: ScaleRange, grid_offsets: usize) -> Result<BoxDimEstimate> {
    scales.validate()?;
    ensure!(grid_offsets >= 1, Config, "need at least one grid offset");
    ensure!(!points.is_empty(), Config, "empty point set");
    ensure!(points.iter().all(|p| p[0].is_finite() && p[1].is_finite()), Config, "non-finite point");
    let sizes = scales.scales();
    let jobs: Vec<(usize, usize)> = (0..sizes.len()).flat_map(|s| (0..grid_offsets).map(move |o| (s, o))).collect();
    let raw: Vec<usize> = jobs.par_iter().map(|&(s, o)| box_count(points, sizes[s], grid_offset(o))).collect();
    let counts: Vec<f64> = raw.chunks(grid_offsets).map(|c| c.iter().sum::<usize>() as f64 / grid_offsets as f64).collect();

    let drop = (TRIM_FRACTION * sizes.len() as f64).floor() as usize;
    let (lo, hi) = (drop, sizes.len() - drop);
    let xs: Vec<f64> = sizes[lo..hi].iter().map(|s| -s.ln()).collect();
    let ys: Vec<f64> = counts[lo..hi].iter().map(|c| c.ln()).collect();
    let fit = least_squares(&xs, &ys);
    ensure!(fit.sxx > 0.0, Config, "degenerate scale range");
    Ok(BoxDimEstimate {
        scales: sizes,
        counts,
        slope: fit.slope,
        r_squared: fit.r_squared,
        confidence_halfwidth: 2.0 * fit.slope_se,
        fit_range: (lo, hi),
    })
}

struct LineFit {
    slope: f64,
    r_squared: f64,
    slope_se: f64,
    sxx: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let ssr = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    let slope_se = if xs.len() > 2 { (ssr / (m - 2.0) / sxx).sqrt() } else { 0.0 };
    LineFit { slope, r_squared, slope_se, sxx }
}

/// Vertices of a polyline with extra points inserted so that consecutive
/// points are at most `max_spacing` apart.
pub fn densify_polyline(vertices: &[[f64; 2]], closed: bool, max_spacing: f64) -> Result<Vec<[f64; 2]>> {
    ensure!(max_spacing > 0.0, Config, "spacing {max_spacing} must be positive");
    let n = vertices.len();
    let edges = if closed { n } else { n.saturating_sub(1) };
    let mut out = Vec::with_capacity(n);
    for i in 0..edges {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let k = (len / max_spacing).ceil().max(1.0) as usize;
        for j in 0..k {
            let s = j as f64 / k as f64;
            out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
    }
    if !closed {
        if let Some(&last) = vertices.last() {
            out.push(last);
        }
    }
    Ok(out)
}

/// `(n - dim) / p`: smoothness below which the dimension test admits `1_D`.
pub fn smoothness_bound(dim: f64, n: u32, p: f64) -> f64 {
    (f64::from(n) - dim) / p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    /// `dim + confidence < n - p tau`.
    Member,
    /// `dim - confidence > n - p tau`; the dimension test fails, which
    /// indicates but does not prove non-membership.
    NonMemberIndicated,
    Inconclusive,
}

/// Dimension test for `1_D` in `H^{tau, p}(R^n)`, given an estimate `dim` of
/// the boundary dimension and its confidence half-width.
pub fn sobolev_membership(dim: f64, confidence: f64, n: u32, p: f64, tau: f64) -> Result<Membership> {
    ensure!(n == 2 || n == 3, Domain, "ambient dimension {n} must be 2 or 3");
    ensure!(p >= 1.0, Domain, "integrability {p} must be at least 1");
    ensure!(tau >= 0.0, Domain, "smoothness {tau} must be nonnegative");
    ensure!(confidence >= 0.0 && dim.is_finite(), Domain, "invalid dimension estimate");
    let threshold = f64::from(n) - p * tau;
    let band = confidence + MEMBERSHIP_BAND;
    Ok(if dim + band < threshold {
        Membership::Member
    } else if dim - band > threshold {
        Membership::NonMemberIndicated
    } else {
        Membership::Inconclusive
    })
}
