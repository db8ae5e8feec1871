use deltaprime::curve::{
    bracket_potentials, curve_from_curvature, geometric_potential, map_to_strip, v_tau, CurvatureProfile, CurveConfig,
    CurveModel, PlanarCurve,
};
use proptest::prelude::*;

fn profiles() -> Vec<CurvatureProfile> {
    vec![
        CurvatureProfile::Line,
        CurvatureProfile::GaussianBump { c: 0.5 },
        CurvatureProfile::GaussianBump { c: -1.0 },
        CurvatureProfile::TwoBump { c: 0.4, s0: 3.0 },
    ]
}

/// Signed curvature from sampled positions alone, by five-point differences.
fn curvature_from_points(curve: &PlanarCurve, s: f64) -> f64 {
    let h = 1e-2;
    let p: Vec<[f64; 2]> = (-2..=2).map(|k| curve.point(s + k as f64 * h).unwrap()).collect();
    let d1 = |i: usize| (p[0][i] - 8.0 * p[1][i] + 8.0 * p[3][i] - p[4][i]) / (12.0 * h);
    let d2 = |i: usize| (-p[0][i] + 16.0 * p[1][i] - 30.0 * p[2][i] + 16.0 * p[3][i] - p[4][i]) / (12.0 * h * h);
    d2(0) * d1(1) - d1(0) * d2(1)
}

#[test]
fn curvature_survives_reconstruction() {
    for profile in profiles() {
        let curve = curve_from_curvature(&profile).unwrap();
        for i in 0..=60 {
            let s = -9.0 + 0.3 * i as f64;
            let k = curvature_from_points(&curve, s);
            assert!((k - profile.gamma(s)).abs() < 1e-8, "{profile:?} at {s}: {k}");
        }
    }
}

#[test]
fn reconstruction_is_unit_speed() {
    let curve = curve_from_curvature(&CurvatureProfile::TwoBump { c: 0.4, s0: 3.0 }).unwrap();
    for i in 0..=200 {
        let s = -19.0 + 0.19 * i as f64;
        let d = curve.jet(s).unwrap().d1;
        assert!((d[0].hypot(d[1]) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn bump_turns_by_its_total_curvature() {
    let c = 0.5;
    let PlanarCurve::Reconstructed(r) = curve_from_curvature(&CurvatureProfile::GaussianBump { c }).unwrap() else {
        panic!("expected a reconstructed curve");
    };
    let turn = r.angle(15.0).unwrap() - r.angle(-15.0).unwrap();
    assert!((turn + c * std::f64::consts::PI.sqrt()).abs() < 1e-10, "{turn}");
}

#[test]
fn circle_orientation_gives_positive_curvature() {
    // Γ(s) = (R sin(s/R), R cos(s/R)) runs clockwise
    let r = 2.0;
    let curve = PlanarCurve::Circle { radius: r };
    assert!((curvature_from_points(&curve, 0.4) - 1.0 / r).abs() < 1e-9);
}

#[test]
fn normal_offset_reaches_distance_u() {
    let model = CurveModel::from_config(&CurveConfig::gaussian_bump(0.5)).unwrap();
    let (s, u) = (0.3, 0.4);
    let x = map_to_strip(&model.curve, s, u, model.injectivity).unwrap();
    let dist = (0..=4000)
        .map(|i| {
            let p = model.curve.point(-4.0 + 0.002 * i as f64).unwrap();
            (p[0] - x[0]).hypot(p[1] - x[1])
        })
        .fold(f64::INFINITY, f64::min);
    assert!((dist - u).abs() < 1e-5, "{dist}");
    assert!(map_to_strip(&model.curve, s, model.injectivity, model.injectivity).is_err());
}

#[test]
fn bump_potential_matches_hand_derivatives() {
    let (c, s, u) = (1.0f64, 0.7f64, 0.1f64);
    let e = (-s * s).exp();
    let gamma = c * e;
    let d1 = -2.0 * s * c * e;
    let d2 = (4.0 * s * s - 2.0) * c * e;
    // written through g = 1 + uγ: ½(g_ss/g³ − 3g_s²/g⁴) + g_s²/(4g⁴) − γ²/(4g²)
    let g = 1.0 + u * gamma;
    let (gs, gss) = (u * d1, u * d2);
    let oracle = 0.5 * (gss / g.powi(3) - 3.0 * gs * gs / g.powi(4)) + gs * gs / (4.0 * g.powi(4))
        - gamma * gamma / (4.0 * g * g);
    let v = geometric_potential(&CurvatureProfile::GaussianBump { c }, s, u).unwrap();
    assert!((v - oracle).abs() < 1e-10, "{v} vs {oracle}");
}

#[test]
fn potential_sandwich_on_a_dense_grid() {
    for profile in profiles() {
        let bounds = profile.bounds(20.0);
        for &frac in &[0.05, 0.125, 0.25] {
            let a = if bounds.gamma_plus > 0.0 { frac / bounds.gamma_plus } else { frac };
            let bp = bracket_potentials(&bounds, &profile, a).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for i in 0..=400 {
                let s = -8.0 + 16.0 * i as f64 / 400.0;
                for k in 0..=40 {
                    let u = -a + 2.0 * a * k as f64 / 40.0;
                    let v = geometric_potential(&profile, s, u).unwrap();
                    lo = lo.min(v - bp.minus(s));
                    hi = hi.max(v - bp.plus(s));
                }
            }
            assert!(lo >= -1e-12 && hi <= 1e-12, "{profile:?} a = {a}: {lo} {hi}");
        }
    }
}

#[test]
fn v_tau_is_controlled_by_tails() {
    let profile = CurvatureProfile::GaussianBump { c: 1.0 };
    let a = 0.05;
    for &tau in &[0.0, 1.0, 2.0, 4.0, 8.0] {
        let t = profile.tail_bound(tau);
        let inner = 1.0 - a * profile.bounds(20.0).gamma_plus;
        let sup = a * t.d2gamma_plus / (2.0 * inner.powi(3))
            + 5.0 * (a * t.dgamma_plus).powi(2) / (4.0 * inner.powi(4))
            + t.gamma_plus.powi(2) / (4.0 * inner * inner);
        let v = v_tau(&profile, a, tau).unwrap();
        assert!(v <= 0.0 && v.abs() <= sup * (1.0 + 1e-12), "tau {tau}: {v} vs {sup}");
    }
    assert!(v_tau(&profile, a, 8.0).unwrap().abs() < 1e-20);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwich_at_random_points(c in -1.5f64..1.5, frac in 0.0f64..0.25, s in -6.0f64..6.0, t in -1.0f64..1.0) {
        let profile = CurvatureProfile::GaussianBump { c };
        let bounds = profile.bounds(20.0);
        let a = if bounds.gamma_plus > 0.0 { frac / bounds.gamma_plus } else { frac };
        let bp = bracket_potentials(&bounds, &profile, a).unwrap();
        let v = geometric_potential(&profile, s, t * a).unwrap();
        prop_assert!(bp.minus(s) - 1e-12 <= v && v <= bp.plus(s) + 1e-12);
    }

    #[test]
    fn reflection_flips_the_sign_of_curvature(c in -1.0f64..1.0, s0 in 1.0f64..4.0, s in -8.0f64..8.0) {
        let p = CurvatureProfile::TwoBump { c, s0 };
        prop_assert_eq!(p.reflected().gamma(s), -p.gamma(s));
    }
}
