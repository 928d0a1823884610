//! Cones with vertex at the origin, described by their cross-section on the
//! unit sphere.
//!
//! A cone is either circular (`theta < rho`), star-shaped (`theta < sigma(phi)`
//! for a periodic profile `sigma`), a member of the linear deformation
//! `theta < t sigma(phi) + (1 - t) rho0`, or the central projection of a
//! planar polygon placed in the plane `x3 = 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{ensure, Error, Result};
use crate::harmonics::SphericalDirection;

/// Profile evaluations per Fourier degree when bounding a profile.
const BOUND_SAMPLES_PER_DEGREE: usize = 64;
/// Smallest number of samples used when bounding a profile.
const MIN_BOUND_SAMPLES: usize = 256;
/// Fraction of `min sigma` used as `rho0` when none is given.
pub const DEFAULT_RHO0_FRACTION: f64 = 0.9;

/// A continuous `2 pi`-periodic profile `sigma(phi)` stored as the truncated
/// Fourier series `sigma = c_0 + 2 Re sum_{k=1}^M c_k e^{i k phi}`.
///
/// Only nonnegative frequencies are stored, so `sigma` is real by
/// construction; `c_0` is real.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    coeffs: Vec<Complex64>,
    rho0_lower: f64,
}

/// Conservative range of a profile: `lower <= sigma(phi) <= upper` for all
/// `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileBounds {
    pub lower: f64,
    pub upper: f64,
}

impl RadialProfile {
    /// Builds a profile from `c_0, ..., c_M`. When `rho0` is omitted it
    /// defaults to [`DEFAULT_RHO0_FRACTION`] times the lower bound of `sigma`.
    pub fn from_fourier(mut coeffs: Vec<Complex64>, rho0: Option<f64>) -> Result<Self> {
        ensure!(!coeffs.is_empty(), InvalidGeometry, "profile needs at least the mean coefficient");
        ensure!(
            coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            InvalidGeometry,
            "profile coefficients must be finite"
        );
        ensure!(
            coeffs[0].im.abs() <= 1e-12 * coeffs[0].re.abs().max(1.0),
            InvalidGeometry,
            "mean coefficient must be real, got imaginary part {}",
            coeffs[0].im
        );
        coeffs[0].im = 0.0;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        let mut profile = Self { coeffs, rho0_lower: 0.0 };
        let b = profile.bounds();
        ensure!(b.upper < FRAC_PI_2, InvalidGeometry, "profile reaches {} >= pi/2", b.upper);
        let rho0 = match rho0 {
            Some(r) => r,
            None => DEFAULT_RHO0_FRACTION * b.lower,
        };
        ensure!(rho0 > 0.0, InvalidGeometry, "rho0 = {rho0} must be positive");
        ensure!(
            b.lower > rho0,
            InvalidGeometry,
            "profile minimum {} does not exceed rho0 = {rho0}",
            b.lower
        );
        profile.rho0_lower = rho0;
        Ok(profile)
    }

    /// Constant profile `sigma = value`.
    pub fn constant(value: f64, rho0: Option<f64>) -> Result<Self> {
        Self::from_fourier(vec![Complex64::new(value, 0.0)], rho0)
    }

    /// Trigonometric interpolant of `values` taken at `phi_j = 2 pi j / len`.
    pub fn from_samples(values: &[f64], rho0: Option<f64>) -> Result<Self> {
        ensure!(values.len() >= 3, InvalidGeometry, "need at least 3 profile samples");
        ensure!(values.iter().all(|v| v.is_finite()), InvalidGeometry, "profile samples must be finite");
        let n = values.len();
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        let mut coeffs: Vec<Complex64> = buf[..=n / 2].iter().map(|c| c * scale).collect();
        coeffs[0].im = 0.0;
        if n.is_multiple_of(2) {
            // The Nyquist mode is its own mirror image.
            coeffs[n / 2] *= 0.5;
        }
        Self::from_fourier(coeffs, rho0)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Highest frequency `M` present.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn rho0_lower(&self) -> f64 {
        self.rho0_lower
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let step = Complex64::from_polar(1.0, phi);
        let mut w = step;
        let mut acc = 0.0;
        for c in &self.coeffs[1..] {
            acc += (c * w).re;
            w *= step;
        }
        self.coeffs[0].re + 2.0 * acc
    }

    /// Upper bound on `|sigma'|`: `2 sum k |c_k|`.
    pub fn lipschitz_bound(&self) -> f64 {
        2.0 * self.coeffs.iter().enumerate().map(|(k, c)| k as f64 * c.norm()).sum::<f64>()
    }

    /// Values at `phi_j = 2 pi j / count`.
    pub fn samples(&self, count: usize) -> Vec<f64> {
        (0..count).map(|j| self.eval(2.0 * PI * j as f64 / count as f64)).collect()
    }

    /// Sampled extrema widened by the Lipschitz bound times half the spacing,
    /// so the true extrema are enclosed.
    pub fn bounds(&self) -> ProfileBounds {
        let count = (BOUND_SAMPLES_PER_DEGREE * (self.degree() + 1)).max(MIN_BOUND_SAMPLES);
        let s = self.samples(count);
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let slack = self.lipschitz_bound() * PI / count as f64;
        ProfileBounds { lower: lo - slack, upper: hi + slack }
    }

    /// `sigma(phi - alpha)`: the profile of the cone rotated by `alpha` about
    /// the `x3` axis.
    pub fn rotated(&self, alpha: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, -(k as f64) * alpha))
            .collect();
        Self { coeffs, rho0_lower: self.rho0_lower }
    }
}

/// `t sigma(phi) + (1 - t) rho0`, the boundary colatitude of the deformation
/// member at parameter `t`.
pub fn deformed_radius(profile: &RadialProfile, rho0: f64, t: f64, phi: f64) -> Result<f64> {
    let r = t * profile.eval(phi) + (1.0 - t) * rho0;
    ensure!(
        r > 0.0 && r < FRAC_PI_2,
        InvalidGeometry,
        "deformed radius {r} at phi = {phi}, t = {t} leaves (0, pi/2)"
    );
    Ok(r)
}

/// Centered circular caps enclosing and enclosed by a cone's cross-section.
///
/// `C_inner` is contained in the cone and the cone is contained in
/// `C_outer`; the cone avoids the open cap `C_min_colatitude`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureBounds {
    /// Largest centered aperture contained in the cone, `0` if none.
    pub inner: f64,
    /// Smallest centered aperture containing the cone.
    pub outer: f64,
    /// Smallest colatitude attained by the cone, `0` when it contains the axis.
    pub min_colatitude: f64,
    /// The cone is exactly the circular cone of aperture `outer`.
    pub circular: bool,
}

/// A cone with vertex at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeSpec {
    /// `theta < rho`.
    Circular { rho: f64 },
    /// `theta < sigma(phi)`.
    Star { profile: RadialProfile },
    /// `theta < t sigma(phi) + (1 - t) rho0`.
    Deformed { profile: RadialProfile, rho0: f64, t: f64 },
    /// Central projection of a planar polygon in `x3 = 1`.
    Indicator { region: IndicatorRegion },
}

impl ConeSpec {
    pub fn circular(rho: f64) -> Result<Self> {
        let c = Self::Circular { rho };
        c.validate()?;
        Ok(c)
    }

    pub fn star(profile: RadialProfile) -> Result<Self> {
        let c = Self::Star { profile };
        c.validate()?;
        Ok(c)
    }

    pub fn deformed(profile: RadialProfile, rho0: f64, t: f64) -> Result<Self> {
        let c = Self::Deformed { profile, rho0, t };
        c.validate()?;
        Ok(c)
    }

    pub fn indicator(region: IndicatorRegion) -> Self {
        Self::Indicator { region }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Circular { rho } => {
                ensure!(
                    *rho > 0.0 && *rho < FRAC_PI_2,
                    InvalidGeometry,
                    "aperture {rho} outside (0, pi/2); a half space is not a cone of this kind"
                );
            }
            Self::Star { profile } => {
                let b = profile.bounds();
                ensure!(
                    b.lower > profile.rho0_lower() && b.upper < FRAC_PI_2,
                    InvalidGeometry,
                    "profile range [{}, {}] not inside (rho0, pi/2)",
                    b.lower,
                    b.upper
                );
            }
            Self::Deformed { profile, rho0, t } => {
                ensure!(*t <= 1.0 && t.is_finite(), InvalidGeometry, "deformation parameter {t} exceeds 1");
                ensure!(*rho0 > 0.0, InvalidGeometry, "rho0 = {rho0} must be positive");
                let (lo, hi) = deformed_range(profile.bounds(), *rho0, *t);
                ensure!(
                    lo > 0.0 && hi < FRAC_PI_2,
                    InvalidGeometry,
                    "deformed radius range [{lo}, {hi}] leaves (0, pi/2) at t = {t}"
                );
            }
            Self::Indicator { region } => {
                ensure!(
                    region.bounding_aperture() < FRAC_PI_2,
                    InvalidGeometry,
                    "polygon is not contained in a convex circular cone"
                );
            }
        }
        Ok(())
    }

    /// Boundary colatitude in direction `phi`. Indicator regions answer only
    /// when they are star-shaped about the axis.
    pub fn theta_max(&self, phi: f64) -> Result<f64> {
        match self {
            Self::Circular { rho } => Ok(*rho),
            Self::Star { profile } => Ok(profile.eval(phi)),
            Self::Deformed { profile, rho0, t } => deformed_radius(profile, *rho0, *t, phi),
            Self::Indicator { region } => region.radial_colatitude(phi),
        }
    }

    /// True when the cross-section is `{theta < theta_max(phi)}`.
    pub fn is_radial(&self) -> bool {
        match self {
            Self::Indicator { region } => region.is_star_shaped(),
            _ => true,
        }
    }

    pub fn aperture_bounds(&self) -> ApertureBounds {
        match self {
            Self::Circular { rho } => ApertureBounds { inner: *rho, outer: *rho, min_colatitude: 0.0, circular: true },
            Self::Star { profile } => {
                let b = profile.bounds();
                ApertureBounds { inner: b.lower, outer: b.upper, min_colatitude: 0.0, circular: false }
            }
            Self::Deformed { profile, rho0, t } => {
                let (lo, hi) = deformed_range(profile.bounds(), *rho0, *t);
                let circular = *t == 0.0;
                ApertureBounds { inner: lo, outer: hi, min_colatitude: 0.0, circular }
            }
            Self::Indicator { region } => region.aperture_bounds(),
        }
    }

    /// The cone rotated by `alpha` about the `x3` axis.
    pub fn rotated(&self, alpha: f64) -> Self {
        match self {
            Self::Circular { rho } => Self::Circular { rho: *rho },
            Self::Star { profile } => Self::Star { profile: profile.rotated(alpha) },
            Self::Deformed { profile, rho0, t } => Self::Deformed { profile: profile.rotated(alpha), rho0: *rho0, t: *t },
            Self::Indicator { region } => Self::Indicator { region: region.rotated(alpha) },
        }
    }

    pub fn contains(&self, dir: SphericalDirection) -> bool {
        match self {
            Self::Indicator { region } => region.contains(dir),
            other => other.theta_max(dir.phi).is_ok_and(|t| dir.theta < t),
        }
    }
}

fn deformed_range(b: ProfileBounds, rho0: f64, t: f64) -> (f64, f64) {
    let a = t * b.lower + (1.0 - t) * rho0;
    let c = t * b.upper + (1.0 - t) * rho0;
    (a.min(c), a.max(c))
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = sub(b, a);
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    norm(sub(p, [a[0] + s * d[0], a[1] + s * d[1]]))
}

/// A cone cross-section given as a simple polygon in the plane `x3 = 1`.
///
/// A point `(x, y)` of the polygon corresponds to the direction of
/// `(x, y, 1)`, so its colatitude is `atan(sqrt(x^2 + y^2))`. Vertices are
/// stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorRegion {
    vertices: Vec<[f64; 2]>,
}

impl IndicatorRegion {
    /// Accepts either orientation and stores the polygon counter-clockwise.
    /// Simplicity (no self-intersections) is assumed, not checked.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        ensure!(vertices.len() >= 3, InvalidGeometry, "polygon needs at least 3 vertices");
        ensure!(
            vertices.iter().all(|v| v[0].is_finite() && v[1].is_finite()),
            InvalidGeometry,
            "polygon vertices must be finite"
        );
        let area = signed_area(&vertices);
        ensure!(area != 0.0, InvalidGeometry, "polygon has zero area");
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| norm(sub(b, a))).sum()
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Even-odd rule.
    pub fn contains_planar(&self, p: [f64; 2]) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn contains(&self, dir: SphericalDirection) -> bool {
        if dir.theta >= FRAC_PI_2 {
            return false;
        }
        let r = dir.theta.tan();
        self.contains_planar([r * dir.phi.cos(), r * dir.phi.sin()])
    }

    /// Colatitude of the farthest vertex.
    pub fn bounding_aperture(&self) -> f64 {
        self.vertices.iter().map(|&v| norm(v)).fold(0.0, f64::max).atan()
    }

    fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        self.edges().map(|(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
    }

    pub fn aperture_bounds(&self) -> ApertureBounds {
        let d = self.boundary_distance([0.0, 0.0]).atan();
        let (inner, min_colatitude) = if self.contains_planar([0.0, 0.0]) { (d, 0.0) } else { (0.0, d) };
        ApertureBounds { inner, outer: self.bounding_aperture(), min_colatitude, circular: false }
    }

    /// Star-shaped about the axis: every ray from the origin leaves the
    /// polygon exactly once, i.e. each edge turns strictly counter-clockwise
    /// as seen from the origin.
    pub fn is_star_shaped(&self) -> bool {
        self.contains_planar([0.0, 0.0]) && self.edges().all(|(a, b)| cross(a, b) > 0.0)
    }

    /// Distance from the origin to the boundary along the ray at angle `phi`.
    pub fn radial_radius(&self, phi: f64) -> Result<f64> {
        ensure!(
            self.is_star_shaped(),
            Unsupported,
            "polygon is not star-shaped about the axis and has no radial description"
        );
        let d = [phi.cos(), phi.sin()];
        for (a, b) in self.edges() {
            // Solve s d = a + u (b - a) with s > 0, u in [0, 1].
            let e = sub(b, a);
            let den = cross(d, e);
            if den == 0.0 {
                continue;
            }
            let s = cross(a, e) / den;
            let u = cross(a, d) / den;
            if s > 0.0 && (-1e-14..=1.0 + 1e-14).contains(&u) {
                return Ok(s);
            }
        }
        Err(Error::InvalidGeometry(format!("ray at phi = {phi} misses the polygon boundary")))
    }

    /// `atan(radial_radius(phi))`.
    pub fn radial_colatitude(&self, phi: f64) -> Result<f64> {
        Ok(self.radial_radius(phi)?.atan())
    }

    pub fn rotated(&self, alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        let vertices = self.vertices.iter().map(|v| [c * v[0] - s * v[1], s * v[0] + c * v[1]]).collect();
        Self { vertices }
    }

    /// The polygon scaled about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        ensure!(factor > 0.0 && factor.is_finite(), InvalidGeometry, "scale factor {factor} must be positive");
        Ok(Self { vertices: self.vertices.iter().map(|v| [v[0] * factor, v[1] * factor]).collect() })
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    let terms: Vec<f64> = (0..n).map(|i| cross(v[i], v[(i + 1) % n])).collect();
    0.5 * crate::sum::pairwise(&terms)
}

/// Largest supported Koch iteration depth.
pub const KOCH_MAX_DEPTH: u32 = 8;
/// Default bounding aperture of [`koch_cross_section`].
pub const KOCH_DEFAULT_APERTURE: f64 = FRAC_PI_2 - 0.15;

/// Koch snowflake vertices after `depth` iterations, centred at the origin
/// with circumradius `radius`. Counter-clockwise, `3 * 4^depth` vertices.
pub fn koch_snowflake(depth: u32, radius: f64) -> Result<Vec<[f64; 2]>> {
    ensure!(
        depth <= KOCH_MAX_DEPTH,
        Resource,
        "Koch depth {depth} exceeds {KOCH_MAX_DEPTH} ({} vertices)",
        3usize << (2 * depth)
    );
    ensure!(radius > 0.0 && radius.is_finite(), InvalidGeometry, "circumradius {radius} must be positive");
    let mut pts: Vec<[f64; 2]> = (0..3)
        .map(|k| {
            let a = FRAC_PI_2 + 2.0 * PI * f64::from(k) / 3.0;
            [radius * a.cos(), radius * a.sin()]
        })
        .collect();
    let (s60, c60) = (PI / 3.0).sin_cos();
    for _ in 0..depth {
        let n = pts.len();
        let mut next = Vec::with_capacity(4 * n);
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let d = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
            let p1 = [a[0] + d[0], a[1] + d[1]];
            let p3 = [a[0] + 2.0 * d[0], a[1] + 2.0 * d[1]];
            // Clockwise turn points outward for a counter-clockwise polygon.
            let peak = [p1[0] + c60 * d[0] + s60 * d[1], p1[1] - s60 * d[0] + c60 * d[1]];
            next.extend_from_slice(&[a, p1, peak, p3]);
        }
        pts = next;
    }
    Ok(pts)
}

/// Koch snowflake cross-section whose bounding cap has the default aperture.
pub fn koch_cross_section(depth: u32) -> Result<IndicatorRegion> {
    koch_cross_section_with_aperture(depth, KOCH_DEFAULT_APERTURE)
}

/// Koch snowflake cross-section scaled so that its farthest vertex has
/// colatitude `aperture`.
pub fn koch_cross_section_with_aperture(depth: u32, aperture: f64) -> Result<IndicatorRegion> {
    ensure!(
        aperture > 0.0 && aperture < FRAC_PI_2,
        InvalidGeometry,
        "aperture {aperture} outside (0, pi/2)"
    );
    IndicatorRegion::new(koch_snowflake(depth, aperture.tan())?)
}

/// Discrete Hausdorff distance between two cap boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapDistance {
    /// Geodesic distance in radians.
    pub value: f64,
    /// Largest geodesic gap between consecutive boundary samples; the
    /// continuous distance differs from `value` by at most this much.
    pub sampling_gap: f64,
}

/// Hausdorff distance between the boundary curves of two radial cones,
/// sampled at `resolution` equally spaced azimuths.
pub fn cap_hausdorff(a: &ConeSpec, b: &ConeSpec, resolution: usize) -> Result<CapDistance> {
    ensure!(resolution >= 4, Config, "resolution {resolution} below 4");
    let curve = |c: &ConeSpec| -> Result<Vec<[f64; 3]>> {
        ensure!(c.is_radial(), Unsupported, "cone has no radial description");
        (0..resolution)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / resolution as f64;
                Ok(SphericalDirection { theta: c.theta_max(phi)?, phi }.to_cartesian())
            })
            .collect()
    };
    let pa = curve(a)?;
    let pb = curve(b)?;
    let directed = |from: &[[f64; 3]], to: &[[f64; 3]]| {
        from.iter()
            .map(|p| to.iter().map(|q| angle(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let gap = |pts: &[[f64; 3]]| (0..pts.len()).map(|j| angle(&pts[j], &pts[(j + 1) % pts.len()])).fold(0.0, f64::max);
    Ok(CapDistance { value: directed(&pa, &pb).max(directed(&pb, &pa)), sampling_gap: gap(&pa).max(gap(&pb)) })
}

fn angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt().atan2(dot)
}
