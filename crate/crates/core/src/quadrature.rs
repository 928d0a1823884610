//! Deterministic integration over cone cross-sections on the unit sphere.
//!
//! Radial cones `{theta < T(phi)}` use a product rule: Gauss-Legendre in the
//! colatitude on `[0, T(phi)]` along each of a set of equally spaced azimuths,
//! and the trapezoid rule in the azimuth. Both counts are doubled until two
//! successive results agree; the reported error is their difference.
//!
//! Polygonal cross-sections are fanned into triangles from the origin of the
//! plane `x3 = 1`, each integrated with a collapsed Gauss rule against the
//! central-projection Jacobian `(1 + x^2 + y^2)^{-3/2}` and split four ways
//! until the children agree with the parent.
//!
//! Every reduction runs in a fixed order, so results are bitwise identical for
//! any thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::geometry::{ConeSpec, IndicatorRegion};
use crate::harmonics::SphericalDirection;
use crate::sum::{pairwise_rows, pairwise_rows_real};

/// Smallest accepted relative tolerance.
pub const MIN_REL_TOL: f64 = 1e-14;
/// Roundoff allowance per unit of `int |f|`, added to every error estimate.
const ROUNDOFF: f64 = 8.0 * f64::EPSILON;

/// Node counts and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss nodes in the colatitude along one azimuth (per axis on polygon
    /// triangles, halved).
    pub theta_nodes: usize,
    /// Trapezoid nodes in the azimuth.
    pub phi_nodes: usize,
    /// Convergence is declared when every component's error estimate is at
    /// most this fraction of `int |f|`.
    pub target_rel_tol: f64,
    /// Number of doublings attempted after the first comparison.
    pub max_refinements: u32,
    /// Depth limit of the four-way split on polygon triangles.
    pub max_subdivision_depth: u32,
}

impl QuadratureSpec {
    /// Counts that integrate products of harmonics of degrees `N` and `N + 2`
    /// on circular caps almost exactly at the first level.
    pub fn for_degree(n: u32) -> Self {
        let n = n as usize;
        Self {
            theta_nodes: 2 * (n + 2) + 8,
            phi_nodes: 4 * n + 16,
            target_rel_tol: 1e-10,
            max_refinements: 4,
            max_subdivision_depth: 6,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.target_rel_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.theta_nodes >= 4, Config, "theta_nodes = {} below 4", self.theta_nodes);
        ensure!(self.phi_nodes >= 4, Config, "phi_nodes = {} below 4", self.phi_nodes);
        ensure!(
            self.target_rel_tol >= MIN_REL_TOL && self.target_rel_tol < 1.0,
            Config,
            "tolerance {} outside [{MIN_REL_TOL}, 1)",
            self.target_rel_tol
        );
        ensure!(self.theta_nodes << self.max_refinements <= 1 << 16, Config, "refinement would exceed 65536 nodes");
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::for_degree(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadStatus {
    Converged,
    /// The last refinement still missed the tolerance; values and errors are
    /// reported as computed.
    Unconverged,
}

/// Result of a vector-valued integration.
#[derive(Debug, Clone, PartialEq)]
pub struct CapQuadrature {
    pub values: Vec<Complex64>,
    /// Per-component error estimates.
    pub errors: Vec<f64>,
    /// Per-component `int |f|`.
    pub l1: Vec<f64>,
    pub status: QuadStatus,
    /// Doublings performed.
    pub refinements: u32,
}

impl CapQuadrature {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Result of a scalar integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapIntegral {
    pub value: Complex64,
    pub err: f64,
    pub status: QuadStatus,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss-Legendre rule by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> GaussLegendre {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussLegendre { nodes, weights }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Integrates the `dim`-component integrand `f` over `{theta < theta_max(phi)}`.
///
/// `theta_max` may reach `pi`, which covers the whole sphere.
pub fn integrate_radial_many<F, T>(f: &F, dim: usize, theta_max: &T, spec: &QuadratureSpec) -> Result<CapQuadrature>
where
    F: Fn(SphericalDirection, &mut [Complex64]) + Sync,
    T: Fn(f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    let mut nt = spec.theta_nodes;
    let mut np = spec.phi_nodes;
    let (mut prev, _) = radial_level(f, dim, theta_max, nt, np)?;
    let mut refinements = 0;
    loop {
        nt *= 2;
        np *= 2;
        refinements += 1;
        let (cur, l1) = radial_level(f, dim, theta_max, nt, np)?;
        let (errors, ok) = compare(&prev, &cur, &l1, spec.target_rel_tol);
        if ok || refinements > spec.max_refinements {
            let status = if ok { QuadStatus::Converged } else { QuadStatus::Unconverged };
            return Ok(CapQuadrature { values: cur, errors, l1, status, refinements });
        }
        prev = cur;
    }
}

fn compare(coarse: &[Complex64], fine: &[Complex64], l1: &[f64], tol: f64) -> (Vec<f64>, bool) {
    let errors: Vec<f64> = coarse.iter().zip(fine).zip(l1).map(|((a, b), s)| (a - b).norm() + ROUNDOFF * s).collect();
    let ok = errors.iter().zip(l1).all(|(e, s)| *e <= tol * s);
    (errors, ok)
}

fn radial_level<F, T>(f: &F, dim: usize, theta_max: &T, nt: usize, np: usize) -> Result<(Vec<Complex64>, Vec<f64>)>
where
    F: Fn(SphericalDirection, &mut [Complex64]) + Sync,
    T: Fn(f64) -> Result<f64> + Sync,
{
    let rule = gauss_legendre(nt);
    let rays: Vec<(Vec<Complex64>, Vec<f64>)> = (0..np)
        .into_par_iter()
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / np as f64;
            let top = theta_max(phi)?;
            ensure!(top > 0.0 && top <= PI, InvalidGeometry, "boundary colatitude {top} at phi = {phi}");
            let half = 0.5 * top;
            let mut buf = vec![Complex64::new(0.0, 0.0); dim];
            let mut rows = Vec::with_capacity(nt);
            let mut abs_rows = Vec::with_capacity(nt);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let theta = half * (1.0 + x);
                let weight = w * half * theta.sin();
                f(SphericalDirection { theta, phi }, &mut buf);
                rows.push(buf.iter().map(|v| v * weight).collect::<Vec<_>>());
                abs_rows.push(buf.iter().map(|v| v.norm() * weight).collect::<Vec<_>>());
            }
            Ok((pairwise_rows(&rows, dim), pairwise_rows_real(&abs_rows, dim)))
        })
        .collect::<Result<_>>()?;
    let h = 2.0 * PI / np as f64;
    let (vals, abss): (Vec<_>, Vec<_>) = rays.into_iter().unzip();
    let value = pairwise_rows(&vals, dim).into_iter().map(|v| v * h).collect();
    let l1 = pairwise_rows_real(&abss, dim).into_iter().map(|v| v * h).collect();
    Ok((value, l1))
}

/// Integrates a `dim`-component integrand over the cross-section of `cone`.
pub fn integrate_cap_many<F>(f: &F, dim: usize, cone: &ConeSpec, spec: &QuadratureSpec) -> Result<CapQuadrature>
where
    F: Fn(SphericalDirection, &mut [Complex64]) + Sync,
{
    cone.validate()?;
    match cone {
        ConeSpec::Indicator { region } => integrate_planar_polygon_many(f, dim, region, spec),
        _ => integrate_radial_many(f, dim, &|phi| cone.theta_max(phi), spec),
    }
}

/// `int_{C cap S^2} f dS` for a scalar integrand.
pub fn integrate_cap<F>(f: F, cone: &ConeSpec, spec: &QuadratureSpec) -> Result<CapIntegral>
where
    F: Fn(SphericalDirection) -> Complex64 + Sync,
{
    let q = integrate_cap_many(&|d, out: &mut [Complex64]| out[0] = f(d), 1, cone, spec)?;
    Ok(CapIntegral { value: q.values[0], err: q.errors[0], status: q.status })
}

/// Scalar form of [`integrate_planar_polygon_many`].
pub fn integrate_planar_polygon<F>(f: F, region: &IndicatorRegion, spec: &QuadratureSpec) -> Result<CapIntegral>
where
    F: Fn(SphericalDirection) -> Complex64 + Sync,
{
    let q = integrate_planar_polygon_many(&|d, out: &mut [Complex64]| out[0] = f(d), 1, region, spec)?;
    Ok(CapIntegral { value: q.values[0], err: q.errors[0], status: q.status })
}

/// Integrates over the central projection of a planar polygon.
///
/// Each fan triangle `(0, v_i, v_{i+1})` contributes with the sign of its
/// orientation, so polygons that are not star-shaped about the origin are
/// handled exactly.
pub fn integrate_planar_polygon_many<F>(
    f: &F,
    dim: usize,
    region: &IndicatorRegion,
    spec: &QuadratureSpec,
) -> Result<CapQuadrature>
where
    F: Fn(SphericalDirection, &mut [Complex64]) + Sync,
{
    spec.validate()?;
    let order = (spec.theta_nodes / 2).max(4);
    let rule = gauss_legendre(order);
    let v = region.vertices();
    let n = v.len();
    let ctx = TriangleContext { f, dim, rule: &rule, tol: spec.target_rel_tol, max_depth: spec.max_subdivision_depth };
    let parts: Vec<TrianglePart> = (0..n).into_par_iter().map(|i| ctx.adaptive([0.0, 0.0], v[i], v[(i + 1) % n], 0)).collect();
    let values = pairwise_rows(&parts.iter().map(|p| p.value.clone()).collect::<Vec<_>>(), dim);
    let errors = pairwise_rows_real(&parts.iter().map(|p| p.err.clone()).collect::<Vec<_>>(), dim);
    let l1 = pairwise_rows_real(&parts.iter().map(|p| p.l1.clone()).collect::<Vec<_>>(), dim);
    let converged = parts.iter().all(|p| p.converged);
    let refinements = parts.iter().map(|p| p.depth).max().unwrap_or(0);
    let status = if converged { QuadStatus::Converged } else { QuadStatus::Unconverged };
    Ok(CapQuadrature { values, errors, l1, status, refinements })
}

struct TriangleContext<'a, F> {
    f: &'a F,
    dim: usize,
    rule: &'a GaussLegendre,
    tol: f64,
    max_depth: u32,
}

struct TrianglePart {
    value: Vec<Complex64>,
    err: Vec<f64>,
    l1: Vec<f64>,
    converged: bool,
    depth: u32,
}

type Pt = [f64; 2];

fn mid(a: Pt, b: Pt) -> Pt {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

impl<F> TriangleContext<'_, F>
where
    F: Fn(SphericalDirection, &mut [Complex64]) + Sync,
{
    /// Collapsed product rule on the triangle `(a, b, c)`:
    /// `p(u, v) = a + u (b - a) + u v (c - b)` with Jacobian `2 A u`, where
    /// `A` is the signed area.
    fn rule_on(&self, a: Pt, b: Pt, c: Pt) -> (Vec<Complex64>, Vec<f64>) {
        let twice_area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut rows = Vec::with_capacity(self.rule.nodes.len().pow(2));
        let mut abs_rows = Vec::with_capacity(rows.capacity());
        for (xu, wu) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let u = 0.5 * (1.0 + xu);
            for (xv, wv) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let v = 0.5 * (1.0 + xv);
                let x = a[0] + u * (b[0] - a[0]) + u * v * (c[0] - b[0]);
                let y = a[1] + u * (b[1] - a[1]) + u * v * (c[1] - b[1]);
                let r2 = x * x + y * y;
                let weight = 0.25 * wu * wv * u * twice_area / (1.0 + r2).powf(1.5);
                let dir = SphericalDirection { theta: r2.sqrt().atan(), phi: y.atan2(x).rem_euclid(2.0 * PI) };
                (self.f)(dir, &mut buf);
                rows.push(buf.iter().map(|z| z * weight).collect::<Vec<_>>());
                abs_rows.push(buf.iter().map(|z| z.norm() * weight.abs()).collect::<Vec<_>>());
            }
        }
        (pairwise_rows(&rows, self.dim), pairwise_rows_real(&abs_rows, self.dim))
    }

    fn children(a: Pt, b: Pt, c: Pt) -> [[Pt; 3]; 4] {
        let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
        [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
    }

    fn adaptive(&self, a: Pt, b: Pt, c: Pt, depth: u32) -> TrianglePart {
        let (coarse, _) = self.rule_on(a, b, c);
        let kids = Self::children(a, b, c);
        let parts: Vec<_> = kids.iter().map(|k| self.rule_on(k[0], k[1], k[2])).collect();
        let fine = pairwise_rows(&parts.iter().map(|p| p.0.clone()).collect::<Vec<_>>(), self.dim);
        let l1 = pairwise_rows_real(&parts.iter().map(|p| p.1.clone()).collect::<Vec<_>>(), self.dim);
        let (err, ok) = compare(&coarse, &fine, &l1, self.tol);
        if ok || depth >= self.max_depth {
            return TrianglePart { value: fine, err, l1, converged: ok, depth };
        }
        let sub: Vec<TrianglePart> = kids.iter().map(|k| self.adaptive(k[0], k[1], k[2], depth + 1)).collect();
        TrianglePart {
            value: pairwise_rows(&sub.iter().map(|p| p.value.clone()).collect::<Vec<_>>(), self.dim),
            err: pairwise_rows_real(&sub.iter().map(|p| p.err.clone()).collect::<Vec<_>>(), self.dim),
            l1: pairwise_rows_real(&sub.iter().map(|p| p.l1.clone()).collect::<Vec<_>>(), self.dim),
            converged: sub.iter().all(|p| p.converged),
            depth: sub.iter().map(|p| p.depth).max().unwrap_or(depth),
        }
    }
}
