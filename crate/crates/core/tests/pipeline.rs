use std::f64::consts::PI;

use conekit::admissibility::{cap_integral_tables, circular_zonal_integral};
use conekit::{medium_check, source_check, ConeSpec, IndicatorRegion, QuadratureSpec, RadialProfile};

const RHO: f64 = 0.6;

/// Regular polygon inscribed in the circle of the cap's cross-section.
fn inscribed_polygon(sides: usize) -> ConeSpec {
    let r = RHO.tan();
    let v = (0..sides).map(|k| 2.0 * PI * k as f64 / sides as f64).map(|a| [r * a.cos(), r * a.sin()]).collect();
    ConeSpec::indicator(IndicatorRegion::new(v).unwrap())
}

#[test]
fn inscribed_polygons_approach_the_circular_cap() {
    let spec = QuadratureSpec::default();
    let want = circular_zonal_integral(RHO);
    let mut last = f64::INFINITY;
    for sides in [16, 64, 256] {
        let r = source_check(&inscribed_polygon(sides), &spec).unwrap();
        let zonal = r.integrals.iter().find(|i| i.m == 0).unwrap().value;
        let gap = (zonal.re - want).abs();
        assert!(gap < last, "{sides} sides: {gap:e}");
        last = gap;
    }
    assert!(last < 1e-3 * want.abs(), "{last:e}");
}

#[test]
fn constant_profile_matches_circular_cone() {
    let spec = QuadratureSpec::for_degree(4);
    let star = ConeSpec::star(RadialProfile::constant(RHO, None).unwrap()).unwrap();
    let circ = ConeSpec::circular(RHO).unwrap();
    let a = cap_integral_tables(&star, 4, &spec).unwrap();
    let b = cap_integral_tables(&circ, 4, &spec).unwrap();
    for (ta, tb) in a.iter().zip(&b) {
        let n = ta.n as i32;
        for k in -n..=n {
            for l in -n..=n {
                assert!((ta.entry(k, l) - tb.entry(k, l)).norm() < 1e-12, "N = {n}, ({k}, {l})");
            }
        }
    }
}

#[test]
fn mildly_perturbed_cone_passes_both_checks() {
    let profile = RadialProfile::from_samples(&[0.62, 0.6, 0.58, 0.6, 0.61, 0.59], None).unwrap();
    let cone = ConeSpec::star(profile).unwrap();
    let source = source_check(&cone, &QuadratureSpec::default()).unwrap();
    assert!(source.integrals.iter().any(|i| i.value.norm() > 10.0 * i.err));
    let medium = medium_check(&cone, 4, &QuadratureSpec::for_degree(4)).unwrap();
    assert!(medium.determinants.iter().all(|d| d.is_certified()));
}
