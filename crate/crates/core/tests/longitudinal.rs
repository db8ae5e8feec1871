use deltaprime::curve::CurvatureProfile;
use deltaprime::longitudinal::{
    build_comparison_operator, lemma_long_check, lowest_eigenvalues_1d, LongGrid, Operator1DSpec, Potential1D,
};
use nalgebra::DMatrix;

/// Galerkin matrix of `-c d²/ds² + W` in the Dirichlet sine basis of `(-L, L)`.
///
/// Matrix elements of `W` reduce to cosine moments `∫ W cos(kπ(s+L)/2L)`, taken by the
/// composite Simpson rule.
fn sine_basis_eigenvalues(w: impl Fn(f64) -> f64, c: f64, l: f64, modes: usize, quad: usize) -> Vec<f64> {
    let width = 2.0 * l;
    let h = width / quad as f64;
    let samples: Vec<f64> = (0..=quad).map(|i| w(-l + i as f64 * h)).collect();
    let moment = |k: usize| {
        let mut acc = 0.0;
        for (i, v) in samples.iter().enumerate() {
            let wt = if i == 0 || i == quad {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let x = i as f64 * h;
            acc += wt * v * (k as f64 * std::f64::consts::PI * x / width).cos();
        }
        acc * h / 3.0 / l
    };
    let m: Vec<f64> = (0..=2 * modes + 2).map(moment).collect();
    let mut a = DMatrix::<f64>::zeros(modes, modes);
    for i in 0..modes {
        for j in 0..modes {
            let (p, q) = (i + 1, j + 1);
            // sin(pθ) sin(qθ) = (cos((p-q)θ) - cos((p+q)θ)) / 2
            let mut v = 0.5 * (m[p.abs_diff(q)] - m[p + q]);
            if i == j {
                v += c * (p as f64 * std::f64::consts::PI / width).powi(2);
            }
            a[(i, j)] = v;
        }
    }
    let mut e: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().cloned().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn sine_basis_oracle_reproduces_harmonic_levels() {
    let e = sine_basis_eigenvalues(|s| s * s, 1.0, 10.0, 120, 4000);
    for j in 0..3 {
        assert!((e[j] - (2 * j + 1) as f64).abs() < 1e-8, "{}", e[j]);
    }
}

#[test]
fn bump_ground_state_matches_dense_oracle() {
    let p = CurvatureProfile::GaussianBump { c: 1.0 };
    let (l, n) = (40.0, 1600);
    let sp = lowest_eigenvalues_1d(&build_comparison_operator(&p, l, n), 1).unwrap();
    assert_eq!(sp.values.len(), 1);
    let q = p.clone();
    let oracle = sine_basis_eigenvalues(
        move |s| {
            let g = q.gamma(s);
            -0.25 * g * g
        },
        1.0,
        l,
        400,
        16000,
    );
    let tol = 10.0 * sp.err_disc[0] + 1e-10;
    assert!((sp.values[0] - oracle[0]).abs() < tol, "{} vs {} (tol {tol})", sp.values[0], oracle[0]);
    assert!(oracle[1] > 0.0);
}

#[test]
fn richardson_order_is_two() {
    for p in [CurvatureProfile::GaussianBump { c: 1.0 }, CurvatureProfile::TwoBump { c: 0.8, s0: 2.0 }] {
        let sp = lowest_eigenvalues_1d(&build_comparison_operator(&p, 30.0, 600), 3).unwrap();
        assert!(!sp.values.is_empty());
        for o in &sp.orders {
            assert!((o - 2.0).abs() < 0.1, "{o}");
        }
    }
}

#[test]
fn dirichlet_box_monotone_in_length() {
    let p = CurvatureProfile::GaussianBump { c: 1.0 };
    let h = 0.05;
    let mut prev = f64::INFINITY;
    for l in [10.0, 20.0, 40.0, 80.0] {
        let n = (2.0 * l / h) as usize;
        let sp = lowest_eigenvalues_1d(&build_comparison_operator(&p, l, n), 1).unwrap();
        let v = sp.values[0];
        assert!(v <= prev + 1e-10, "{l}: {v} > {prev}");
        prev = v;
    }
}

#[test]
fn every_curved_family_binds() {
    for p in [
        CurvatureProfile::GaussianBump { c: 0.3 },
        CurvatureProfile::GaussianBump { c: -1.0 },
        CurvatureProfile::TwoBump { c: 0.4, s0: 3.0 },
    ] {
        let op = build_comparison_operator(&p, 30.0, 600).with_truncation(deltaprime::longitudinal::Truncation::adaptive());
        let sp = lowest_eigenvalues_1d(&op, 1).unwrap();
        assert_eq!(sp.values.len(), 1, "{p:?}");
        assert!(sp.values[0] < 0.0);
    }
}

#[test]
fn empty_list_for_nonnegative_potential() {
    let op = Operator1DSpec::new(1.0, Potential1D::new(|s: f64| (-s * s).exp()), 20.0, 400);
    assert!(lowest_eigenvalues_1d(&op, 2).unwrap().values.is_empty());
}

#[test]
fn bracket_differences_shrink_linearly() {
    let p = CurvatureProfile::GaussianBump { c: 1.0 };
    let chk = lemma_long_check(&p, &p.bounds(20.0), &[0.08, 0.04, 0.02], 1, LongGrid::default()).unwrap();
    eprintln!("{chk:#?}");
    assert!(chk.stable, "{:?}", chk.per_a);
    for sign in ["Plus", "Minus"] {
        let d: Vec<f64> = chk
            .residuals
            .iter()
            .filter(|r| format!("{:?}", r.sign) == sign)
            .map(|r| r.diff)
            .collect();
        for w in d.windows(2) {
            assert!(w[1] <= 0.5 * w[0] * 1.05, "{d:?}");
        }
    }
}
