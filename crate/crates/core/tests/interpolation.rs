use std::sync::Arc;

use bakhvalov_fem::interpolants::build_bundle;
use bakhvalov_fem::mesh::{generate, MeshFamily, MeshSpec};
use bakhvalov_fem::problem::{paper_test, paper_test_problem};
use bakhvalov_fem::study::{fitted_rate, interpolation_study, StudyConfig};

#[test]
fn layer_corrected_interpolant_agrees_away_from_transition() {
    for k in 1..=4 {
        let eps = 1e-6;
        let bvp = paper_test_problem(eps).unwrap();
        let mesh = Arc::new(generate(&MeshSpec::kopteva(32, k as f64 + 1.0, eps, 1.25 * (k as f64 + 1.0))).unwrap());
        let b = build_bundle(bvp.exact().unwrap(), mesh.clone(), k).unwrap();
        let half = mesh.intervals() / 2;
        for i in (0..mesh.intervals()).filter(|&i| i != half - 1 && i != half - 2) {
            for s in 0..=50 {
                let xi = s as f64 / 50.0;
                assert_eq!(b.layer_corrected.eval_local(i, xi).0, b.layer_interp.eval_local(i, xi).0);
            }
        }
    }
}

#[test]
fn modified_interpolant_is_in_the_space() {
    for k in 1..=4 {
        let eps = 1e-8;
        let bvp = paper_test_problem(eps).unwrap();
        let mesh = Arc::new(generate(&MeshSpec::roos(16, k as f64 + 1.0, eps)).unwrap());
        let b = build_bundle(bvp.exact().unwrap(), mesh.clone(), k).unwrap();
        let p = &b.modified;
        assert!(p.eval(0.0).abs() < 1e-15 && p.eval(1.0).abs() < 1e-15);
        for i in 0..mesh.intervals() - 1 {
            let left = p.eval_local(i, 1.0).0;
            let right = p.eval_local(i + 1, 0.0).0;
            assert!((left - right).abs() < 1e-15, "k={k} node {}", i + 1);
        }
        // Pi u = u^I - P E coefficientwise
        for (m, v) in p.coefficients().iter().enumerate() {
            let expected = b.u_interp.coefficients()[m] - b.correction.coefficients()[m];
            assert!((v - expected).abs() <= 1e-15, "k={k} m={m}");
        }
    }
}

#[test]
fn correction_holds_layer_values_on_transition_element() {
    let eps = 1e-6;
    let k = 3;
    let bvp = paper_test_problem(eps).unwrap();
    let mesh = Arc::new(generate(&MeshSpec::roos(16, 4.0, eps)).unwrap());
    let b = build_bundle(bvp.exact().unwrap(), mesh.clone(), k).unwrap();
    let x = mesh.nodes();
    let (x7, h7) = (x[7], x[8] - x[7]);
    for (m, &c) in b.correction.coefficients().iter().enumerate() {
        if (21..24).contains(&m) {
            let pos = x7 + (m - 21) as f64 / 3.0 * h7;
            assert_eq!(c, paper_test::layer_part(pos, eps));
        } else {
            assert_eq!(c, 0.0, "m={m}");
        }
    }
}

#[test]
fn interpolation_rates_on_both_meshes() {
    let ns = vec![64, 128, 256, 512, 1024];
    let config = StudyConfig {
        intervals: Some(ns.clone()),
        epsilons: vec![1e-4, 1e-6, 1e-9],
        ..StudyConfig::default()
    };
    for family in [MeshFamily::RoosB, MeshFamily::KoptevaB] {
        for k in 1..=4 {
            let recs = interpolation_study(&config, family, k).unwrap();
            let col = |f: fn(&bakhvalov_fem::study::InterpolationRecord) -> f64| -> Vec<f64> {
                recs.iter().map(f).collect()
            };
            let kf = k as f64;
            let r_inf = fitted_rate(&ns, &col(|r| r.u_inf)).unwrap();
            let r_l2 = fitted_rate(&ns, &col(|r| r.u_l2)).unwrap();
            let r_en = fitted_rate(&ns, &col(|r| r.u_energy)).unwrap();
            assert!((r_inf - (kf + 1.0)).abs() <= 0.25, "{family} k={k}: {r_inf}");
            assert!((r_l2 - (kf + 1.0)).abs() <= 0.25, "{family} k={k}: {r_l2}");
            assert!((r_en - kf).abs() <= 0.25, "{family} k={k}: {r_en}");
        }
    }
}

#[test]
fn correction_decays_at_least_like_n_to_minus_sigma() {
    let ns: Vec<usize> = (3..=10).map(|p| 1 << p).collect();
    let config = StudyConfig {
        intervals: Some(ns),
        ..StudyConfig::default()
    };
    for family in [MeshFamily::RoosB, MeshFamily::KoptevaB] {
        for k in 1..=4 {
            let recs = interpolation_study(&config, family, k).unwrap();
            let e: Vec<f64> = recs.iter().map(|r| r.correction_energy).collect();
            // the correction is a stored value, not a difference, so no round-off floor applies
            let rates: Vec<f64> = e.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
            let fitted = rates[rates.len() - 3..].iter().sum::<f64>() / 3.0;
            assert!(fitted >= k as f64 + 1.0 - 0.25, "{family} k={k}: {rates:?}");
        }
    }
}
