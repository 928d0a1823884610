use std::path::{Path, PathBuf};

use conekit::admissibility::{circular_determinant_closed_form, SourceCriterion};
use conekit::deformation::{nearest_admissible, ZeroKind};
use conekit::fractal::{densify_polyline, smoothness_bound};
use conekit::{
    box_dimension, medium_check, scan, sobolev_membership, source_check, ConeSpec, Membership, MediumVerdict,
    NearestAdmissible, QuadStatus, QuadratureSpec, ScaleRange, ScanConfig, SourceVerdict,
};
use serde::Serialize;
use serde_json::Value;

use crate::cone_file::ConeFile;
use crate::identities;
use crate::report::{Bounded, Header, QuadratureEcho};

/// Failure classes, mapped to exit codes by `main`.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or input files: exit 1.
    Input(String),
    /// A numerical module refused or failed: exit 2.
    Module(String),
}

impl From<conekit::Error> for Failure {
    fn from(e: conekit::Error) -> Self {
        Failure::Module(e.to_string())
    }
}

/// What a command produced.
pub struct Outcome {
    /// Whether the check passed; `false` maps to exit 2.
    pub pass: bool,
    /// The JSON report body.
    pub report: Value,
    /// Text for standard output when the report goes to a file.
    pub summary: String,
    /// Extra files to write: `(path, contents)`.
    pub files: Vec<(PathBuf, String)>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn load_cone(path: &Path) -> Result<(ConeFile, ConeSpec), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let file = ConeFile::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let cone = file.build().map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((file, cone))
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Failure::Input(format!("--tol {tol} must lie in (0, 1)")))
    }
}

fn criterion_name(c: SourceCriterion) -> &'static str {
    match c {
        SourceCriterion::Circular => "circular",
        SourceCriterion::SmallAngle => "small-angle",
        SourceCriterion::Hollow => "hollow",
        SourceCriterion::Sandwich => "sandwich",
    }
}

fn status_name(s: QuadStatus) -> &'static str {
    match s {
        QuadStatus::Converged => "converged",
        QuadStatus::Unconverged => "unconverged",
    }
}

#[derive(Serialize)]
struct OrderEntry {
    m: i32,
    value: Bounded,
}

#[derive(Serialize)]
struct SourceBody {
    #[serde(flatten)]
    header: Header,
    cone: Value,
    quadrature: QuadratureEcho,
    verdict: &'static str,
    numeric_verdict: &'static str,
    criteria: Vec<&'static str>,
    dominant_m: i32,
    integrals: Vec<OrderEntry>,
    status: &'static str,
}

pub fn source(cone_path: &Path, tol: f64) -> Result<Outcome, Failure> {
    check_tol(tol)?;
    let (file, cone) = load_cone(cone_path)?;
    let spec = QuadratureSpec::default().with_tol(tol);
    let r = source_check(&cone, &spec)?;
    let numeric_verdict = match r.verdict {
        SourceVerdict::Admissible => "admissible",
        SourceVerdict::NotDetected => "not-detected",
        SourceVerdict::BelowTolerance => "below-tolerance",
    };
    // Any analytic criterion settles admissibility on its own.
    let pass = r.verdict == SourceVerdict::Admissible || !r.criteria_hits.is_empty();
    let dominant = r.integrals.iter().max_by(|a, b| a.value.norm().total_cmp(&b.value.norm())).map_or(0, |i| i.m);
    let body = SourceBody {
        header: Header::new("source-check"),
        cone: file.to_value(),
        quadrature: (&spec).into(),
        verdict: if pass { "admissible" } else { numeric_verdict },
        numeric_verdict,
        criteria: r.criteria_hits.iter().map(|&c| criterion_name(c)).collect(),
        dominant_m: dominant,
        integrals: r.integrals.iter().map(|i| OrderEntry { m: i.m, value: Bounded::new(i.value, i.err) }).collect(),
        status: status_name(r.status),
    };
    let summary = format!("source-check: {} (dominant m = {dominant}, max |I| = {:.6e})\n", body.verdict, r.max_abs);
    Ok(Outcome { pass, report: to_value(&body), summary, files: vec![] })
}

#[derive(Serialize)]
struct DeterminantEntry {
    #[serde(rename = "N")]
    n: u32,
    det: Bounded,
    log_abs_det: f64,
    normalized: f64,
    normalized_err: f64,
    certified: bool,
    status: &'static str,
}

#[derive(Serialize)]
struct MediumBody {
    #[serde(flatten)]
    header: Header,
    cone: Value,
    quadrature: QuadratureEcho,
    nmax: u32,
    verdict: &'static str,
    verified_up_to: Option<u32>,
    inconclusive_at: Option<u32>,
    determinants: Vec<DeterminantEntry>,
}

pub fn medium(cone_path: &Path, n_max: u32, tol: f64) -> Result<Outcome, Failure> {
    check_tol(tol)?;
    let (file, cone) = load_cone(cone_path)?;
    let spec = QuadratureSpec::for_degree(n_max).with_tol(tol);
    let r = medium_check(&cone, n_max, &spec)?;
    let (pass, up_to, at) = match r.verdict {
        MediumVerdict::AdmissibleUpTo(n) => (true, Some(n), None),
        MediumVerdict::InconclusiveAt(n) => (false, None, Some(n)),
    };
    let determinants = r
        .determinants
        .iter()
        .map(|d| {
            let abs = d.det.log_abs.exp();
            DeterminantEntry {
                n: d.n,
                det: Bounded::new(d.det.phase * abs, abs * d.det.rel_err()),
                log_abs_det: d.det.log_abs,
                normalized: d.det.normalized,
                normalized_err: d.det.err,
                certified: d.is_certified(),
                status: status_name(d.status),
            }
        })
        .collect();
    let body = MediumBody {
        header: Header::new("medium-check"),
        cone: file.to_value(),
        quadrature: (&spec).into(),
        nmax: n_max,
        verdict: if pass { "admissible-up-to-nmax" } else { "inconclusive" },
        verified_up_to: up_to,
        inconclusive_at: at,
        determinants,
    };
    let summary = match r.verdict {
        MediumVerdict::AdmissibleUpTo(n) => format!("medium-check: every determinant certified nonzero for N <= {n}\n"),
        MediumVerdict::InconclusiveAt(n) => format!("medium-check: determinant at N = {n} not separated from zero\n"),
    };
    Ok(Outcome { pass, report: to_value(&body), summary, files: vec![] })
}

#[derive(Serialize)]
struct SuspectEntry {
    #[serde(rename = "N")]
    n: u32,
    lo: f64,
    hi: f64,
    kind: &'static str,
    refinement_steps: u32,
    min_log_abs_det: f64,
}

#[derive(Serialize)]
struct AnchorEntry {
    #[serde(rename = "N")]
    n: u32,
    log_abs_det: f64,
    err_bound: f64,
    closed_form_log_abs_det: f64,
}

#[derive(Serialize)]
struct Epsilon0Entry {
    value: f64,
    g_sup: f64,
    epsilon_user: f64,
}

#[derive(Serialize)]
struct NearestEntry {
    delta: f64,
    found: bool,
    rho: Option<f64>,
    distance: Option<f64>,
    sampling_gap: Option<f64>,
}

#[derive(Serialize)]
struct ScanBody {
    #[serde(flatten)]
    header: Header,
    cone: Value,
    quadrature: QuadratureEcho,
    nmax: u32,
    grid: usize,
    rho_range: [f64; 2],
    epsilon0: Option<Epsilon0Entry>,
    anchor: Vec<AnchorEntry>,
    unconverged_rho: Vec<f64>,
    suspected_zeros: Vec<SuspectEntry>,
    suspect_measure: f64,
    nearest_admissible: Option<NearestEntry>,
}

pub struct ScanArgs<'a> {
    pub cone: &'a Path,
    pub n_max: u32,
    pub grid: usize,
    pub tol: f64,
    pub csv: Option<PathBuf>,
    pub negative: bool,
    pub epsilon: f64,
    pub delta: Option<f64>,
}

pub fn deform(a: &ScanArgs<'_>) -> Result<Outcome, Failure> {
    check_tol(a.tol)?;
    let (file, cone) = load_cone(a.cone)?;
    let ConeSpec::Deformed { profile, rho0, .. } = &cone else {
        return Err(Failure::Input(format!("{}: deform-scan needs a cone of type `deformed`", a.cone.display())));
    };
    if a.grid < 3 {
        return Err(Failure::Input("--grid must be at least 3".into()));
    }
    let spec = QuadratureSpec::for_degree(a.n_max).with_tol(a.tol);
    let config = ScanConfig { include_negative: a.negative, epsilon_user: a.epsilon, ..ScanConfig::new(a.n_max, a.grid) };
    let s = scan(profile, *rho0, &config, &spec)?;

    let j0 = s.rho_grid.iter().position(|&r| r == 0.0).expect("the grid contains the circular anchor");
    let anchor = (0..=a.n_max)
        .map(|n| {
            Ok(AnchorEntry {
                n,
                log_abs_det: s.log_abs_det[n as usize][j0],
                err_bound: s.err_bounds[n as usize][j0],
                closed_form_log_abs_det: circular_determinant_closed_form(n, *rho0)?.ln(),
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let nearest = match a.delta {
        Some(delta) => Some(match nearest_admissible(profile, *rho0, delta, &s)? {
            NearestAdmissible::Found { rho, distance } => NearestEntry {
                delta,
                found: true,
                rho: Some(rho),
                distance: Some(distance.value),
                sampling_gap: Some(distance.sampling_gap),
            },
            NearestAdmissible::NotFound => NearestEntry { delta, found: false, rho: None, distance: None, sampling_gap: None },
        }),
        None => None,
    };
    let body = ScanBody {
        header: Header::new("deform-scan"),
        cone: file.to_value(),
        quadrature: (&spec).into(),
        nmax: a.n_max,
        grid: s.rho_grid.len(),
        rho_range: [s.rho_grid[0], *s.rho_grid.last().expect("nonempty grid")],
        epsilon0: s.epsilon0.map(|e| Epsilon0Entry { value: e.value, g_sup: e.g_sup, epsilon_user: e.epsilon_user }),
        anchor,
        unconverged_rho: s.unconverged.iter().map(|&j| s.rho_grid[j]).collect(),
        suspected_zeros: s
            .suspected_zeros
            .iter()
            .map(|z| SuspectEntry {
                n: z.n,
                lo: z.lo,
                hi: z.hi,
                kind: match z.kind {
                    ZeroKind::SmallMinimum => "small-minimum",
                    ZeroKind::PhaseReversal => "phase-reversal",
                },
                refinement_steps: z.depth,
                min_log_abs_det: z.min_log_abs,
            })
            .collect(),
        suspect_measure: s.suspect_measure(),
        nearest_admissible: nearest,
    };
    let pass = s.unconverged.is_empty();
    let summary = format!(
        "deform-scan: {} grid points, {} suspected zero interval(s), {} unconverged point(s)\n",
        s.rho_grid.len(),
        s.suspected_zeros.len(),
        s.unconverged.len()
    );
    let files = a.csv.iter().map(|p| (p.clone(), s.to_csv())).collect();
    Ok(Outcome { pass, report: to_value(&body), summary, files })
}

#[derive(Serialize)]
struct IdentityBody {
    #[serde(flatten)]
    header: Header,
    nmax: u32,
    seed: u64,
    suites: Vec<identities::SuiteResult>,
    pass: bool,
}

pub fn verify(n_max: u32, seed: u64) -> Result<Outcome, Failure> {
    if n_max > conekit::admissibility::MAX_NMAX {
        return Err(Failure::Input(format!("--nmax {n_max} exceeds {}", conekit::admissibility::MAX_NMAX)));
    }
    let suites = identities::run_all(n_max, seed)?;
    let pass = suites.iter().all(|s| s.pass);
    let summary = identities::render_table(&suites);
    let body = IdentityBody { header: Header::new("verify-identities"), nmax: n_max, seed, suites, pass };
    Ok(Outcome { pass, report: to_value(&body), summary, files: vec![] })
}

/// Reads `x,y` rows; blank lines, `#` comments and one leading header line
/// are skipped. Commas, semicolons and whitespace all separate fields.
pub fn read_points(path: &Path) -> Result<Vec<[f64; 2]>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    let mut header_allowed = true;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c == ';' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok().filter(|x| x.is_finite())).collect();
        match parsed.as_deref() {
            Some([x, y]) => out.push([*x, *y]),
            _ if header_allowed => {}
            _ => return Err(Failure::Input(format!("{}:{}: expected two numbers `x,y`", path.display(), i + 1))),
        }
        header_allowed = false;
    }
    if out.is_empty() {
        return Err(Failure::Input(format!("{}: no points", path.display())));
    }
    Ok(out)
}

/// `coarse:fine:steps`.
pub fn parse_scales(s: &str) -> Result<ScaleRange, Failure> {
    let bad = || Failure::Input(format!("--scales `{s}`: expected coarse:fine:steps"));
    let parts: Vec<&str> = s.split(':').collect();
    let [c, f, n] = parts.as_slice() else { return Err(bad()) };
    Ok(ScaleRange::new(c.parse().map_err(|_| bad())?, f.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?))
}

/// Default range: a quarter of the bounding box down by 2.5 decades.
fn default_scales(points: &[[f64; 2]]) -> ScaleRange {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let coarse = (hi[0] - lo[0]).max(hi[1] - lo[1]) / 4.0;
    ScaleRange::new(coarse, coarse / 10f64.powf(2.5), 16)
}

#[derive(Serialize)]
struct MembershipEntry {
    n: u32,
    p: f64,
    tau: f64,
    threshold: f64,
    smoothness_bound: f64,
    verdict: Membership,
}

#[derive(Serialize)]
struct FractalBody {
    #[serde(flatten)]
    header: Header,
    points: usize,
    grid_offsets: usize,
    scales: Vec<f64>,
    counts: Vec<f64>,
    fit_range: [usize; 2],
    slope: f64,
    r_squared: f64,
    confidence_halfwidth: f64,
    membership: Option<MembershipEntry>,
}

pub struct FractalArgs<'a> {
    pub points: &'a Path,
    pub scales: Option<String>,
    pub offsets: usize,
    pub densify: Option<f64>,
    pub tau: Option<f64>,
    pub n: u32,
    pub p: f64,
}

pub fn fractal(a: &FractalArgs<'_>) -> Result<Outcome, Failure> {
    let mut points = read_points(a.points)?;
    if let Some(spacing) = a.densify {
        points = densify_polyline(&points, true, spacing).map_err(|e| Failure::Input(e.to_string()))?;
    }
    let range = match &a.scales {
        Some(s) => parse_scales(s)?,
        None => default_scales(&points),
    };
    range.validate().map_err(|e| Failure::Input(e.to_string()))?;
    if a.offsets == 0 {
        return Err(Failure::Input("--offsets must be at least 1".into()));
    }
    let e = box_dimension(&points, range, a.offsets)?;
    let membership = match a.tau {
        Some(tau) => {
            let verdict =
                sobolev_membership(e.slope, e.confidence_halfwidth, a.n, a.p, tau).map_err(|err| Failure::Input(err.to_string()))?;
            Some(MembershipEntry {
                n: a.n,
                p: a.p,
                tau,
                threshold: f64::from(a.n) - a.p * tau,
                smoothness_bound: smoothness_bound(e.slope, a.n, a.p),
                verdict,
            })
        }
        None => None,
    };
    let pass = membership.as_ref().is_none_or(|m| m.verdict == Membership::Member);
    let mut summary = format!("fractal-dim: slope {:.5} +- {:.5} (r^2 = {:.6})\n", e.slope, e.confidence_halfwidth, e.r_squared);
    if let Some(m) = &membership {
        summary.push_str(&format!("membership at tau = {}: {:?}\n", m.tau, m.verdict));
    }
    let body = FractalBody {
        header: Header::new("fractal-dim"),
        points: points.len(),
        grid_offsets: a.offsets,
        scales: e.scales,
        counts: e.counts,
        fit_range: [e.fit_range.0, e.fit_range.1],
        slope: e.slope,
        r_squared: e.r_squared,
        confidence_halfwidth: e.confidence_halfwidth,
        membership,
    };
    Ok(Outcome { pass, report: to_value(&body), summary, files: vec![] })
}
