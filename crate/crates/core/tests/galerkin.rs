mod common;

use std::sync::Arc;

use bakhvalov_fem::assembly::{assemble, assemble_with};
use bakhvalov_fem::banded::{self, BandedMatrix, BandedSystem};
use bakhvalov_fem::mesh::{generate, MeshSpec};
use bakhvalov_fem::norms::{error_norms, error_norms_with, norms_of, NormOptions};
use bakhvalov_fem::problem::{paper_test, paper_test_problem};
use bakhvalov_fem::space::PiecewisePolynomial;
use bakhvalov_fem::{galerkin_solve, Error};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{dense_lu_solve, dense_stiffness, rel_close, BubblePoly};

#[test]
fn stiffness_matches_dense_oracle() {
    for eps in [1e-2, 1e-6] {
        for k in 1..=4 {
            let bvp = paper_test_problem(eps).unwrap();
            let mesh = generate(&MeshSpec::roos(8, k as f64 + 1.0, eps)).unwrap();
            let sys = assemble(&bvp, &mesh, k).unwrap();
            let oracle = dense_stiffness(&bvp, &mesh, k);
            for (i, (row, orow)) in sys.matrix.to_dense().iter().zip(&oracle).enumerate() {
                for (j, (&a, &o)) in row.iter().zip(orow).enumerate() {
                    if o == 0.0 {
                        assert_eq!(a, 0.0, "k={k} ({i},{j})");
                    } else {
                        assert!(rel_close(a, o, 1e-12), "k={k} ({i},{j}): {a} vs {o}");
                    }
                }
            }
        }
    }
}

#[test]
fn load_vector_converges_with_quadrature() {
    // The exponential layer in f is not integrated exactly; a 20-point rule
    // serves as reference for the default rule on a graded mesh.
    let bvp = paper_test_problem(1e-4).unwrap();
    let mesh = generate(&MeshSpec::kopteva(32, 3.0, 1e-4, 3.75)).unwrap();
    let fine = assemble_with(&bvp, &mesh, 2, 20).unwrap();
    let coarse = assemble(&bvp, &mesh, 2).unwrap();
    let scale = fine.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for (a, b) in coarse.rhs.iter().zip(&fine.rhs) {
        assert!((a - b).abs() <= 1e-3 * scale);
    }
}

#[test]
fn banded_solver_matches_dense_lu() {
    let mut rng = StdRng::seed_from_u64(7);
    for &(n, kl, ku) in &[(50, 3, 3), (100, 2, 4), (64, 4, 1), (10, 0, 0)] {
        let mut m = BandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                m.set(i, j, rng.random::<f64>() - 0.5);
            }
            m.add(i, i, (kl + ku + 1) as f64);
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let expected = dense_lu_solve(&m.to_dense(), &rhs);
        let got = banded::solve(BandedSystem { matrix: m, rhs }).unwrap();
        let scale = expected.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn banded_solver_pivots_on_weak_diagonal() {
    let mut rng = StdRng::seed_from_u64(11);
    let n = 80;
    let mut m = BandedMatrix::zeros(n, 3, 3);
    for i in 0..n {
        for j in i.saturating_sub(3)..(i + 4).min(n) {
            m.set(i, j, rng.random::<f64>() * 2.0 - 1.0);
        }
        m.set(i, i, 1e-3 * (rng.random::<f64>() - 0.5));
    }
    let rhs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let expected = dense_lu_solve(&m.to_dense(), &rhs);
    let sys = BandedSystem { matrix: m, rhs };
    let got = banded::solve(sys).unwrap();
    let scale = expected.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() <= 1e-10 * scale);
    }
}

#[test]
fn residual_of_large_high_order_system() {
    let eps = 1e-6;
    let bvp = paper_test_problem(eps).unwrap();
    let mesh = generate(&MeshSpec::roos(1024, 5.0, eps)).unwrap();
    let sys = assemble(&bvp, &mesh, 4).unwrap();
    let x = banded::solve(sys.clone()).unwrap();
    let x_inf = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let b_inf = sys.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let bound = 1e-9 * (sys.matrix.norm_inf() * x_inf + b_inf);
    assert!(sys.residual_inf(&x) <= bound, "{} > {bound}", sys.residual_inf(&x));
}

#[test]
fn polynomials_in_the_space_are_reproduced() {
    let polys: [&[f64]; 4] = [&[1.0], &[-1.0, 2.0], &[0.3, 1.0, -2.0], &[1.0, 0.0, 0.0, 5.0]];
    for k in 2..=4 {
        for q in polys.iter().filter(|q| q.len() < k) {
            for eps in [0.05, 1e-3, 1e-8] {
                for spec in [
                    MeshSpec::roos(32, k as f64 + 1.0, eps),
                    MeshSpec::kopteva(32, k as f64 + 1.0, eps, 1.25 * (k as f64 + 1.0)),
                    MeshSpec::original(32, k as f64 + 1.0, eps, 2.0),
                    MeshSpec::uniform(32, eps),
                ] {
                    let bvp = BubblePoly::new(q.to_vec()).problem(eps);
                    let ex = bvp.exact().unwrap().clone();
                    let uh = galerkin_solve(&bvp, generate(&spec).unwrap(), k).unwrap();
                    let e = error_norms(&uh, &*ex.u, &*ex.u_prime, eps);
                    assert!(e.e_energy < 1e-10, "k={k} q={q:?} {spec:?}: {e:?}");
                }
            }
        }
    }
}

#[test]
fn quadratic_form_is_coercive() {
    // c + b'/2 = 1/2 for the test problem, so alpha = min(1, gamma) = 1/2
    let alpha = 0.5;
    let mut rng = StdRng::seed_from_u64(3);
    for (k, eps) in [(1, 1e-3), (2, 1e-6), (3, 1e-8), (4, 1e-4)] {
        let bvp = paper_test_problem(eps).unwrap();
        let mesh = Arc::new(generate(&MeshSpec::roos(32, k as f64 + 1.0, eps)).unwrap());
        let sys = assemble(&bvp, &mesh, k).unwrap();
        for _ in 0..25 {
            let v: Vec<f64> = (0..sys.dim()).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let a = sys.matrix.quadratic_form(&v);
            let mut coeffs = vec![0.0];
            coeffs.extend(&v);
            coeffs.push(0.0);
            let vh = PiecewisePolynomial::new(mesh.clone(), k, coeffs).unwrap();
            let norm = norms_of(&vh, eps).e_energy;
            assert!(a >= 0.5 * alpha * norm * norm, "k={k}: {a} vs {}", norm * norm);
        }
    }
}

#[test]
fn solve_is_bitwise_deterministic() {
    let bvp = paper_test_problem(1e-7).unwrap();
    let spec = MeshSpec::kopteva(128, 4.0, 1e-7, 5.0);
    let a = galerkin_solve(&bvp, generate(&spec).unwrap(), 3).unwrap();
    let b = galerkin_solve(&bvp, generate(&spec).unwrap(), 3).unwrap();
    let bits = |p: &PiecewisePolynomial| p.coefficients().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
    let ea = error_norms(&a, |x| paper_test::u(x, 1e-7), |x| paper_test::u_prime(x, 1e-7), 1e-7);
    let eb = error_norms(&b, |x| paper_test::u(x, 1e-7), |x| paper_test::u_prime(x, 1e-7), 1e-7);
    assert_eq!(ea.e_energy.to_bits(), eb.e_energy.to_bits());
}

#[test]
fn low_order_reference_errors() {
    let eps = 1e-8;
    let bvp = paper_test_problem(eps).unwrap();
    for (n, expected) in [(16, 0.167), (32, 0.0834)] {
        let uh = galerkin_solve(&bvp, generate(&MeshSpec::roos(n, 2.0, eps)).unwrap(), 1).unwrap();
        let e = error_norms(&uh, |x| paper_test::u(x, eps), |x| paper_test::u_prime(x, eps), eps);
        assert!(rel_close(e.e_energy, expected, 0.02), "N={n}: {}", e.e_energy);
    }
}

#[test]
fn norms_are_stable_under_extra_refinement() {
    use rayon::prelude::*;
    let once = NormOptions {
        extra_doublings: 1,
        ..NormOptions::default()
    };
    let mut cases = Vec::new();
    for k in 1..=4usize {
        let top = if k <= 2 { 2048 } else { 1024 };
        let mut n = 8;
        while n <= top {
            for eps in [1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9] {
                cases.push((MeshSpec::roos(n, k as f64 + 1.0, eps), k));
                cases.push((MeshSpec::kopteva(n, k as f64 + 1.0, eps, 1.25 * (k as f64 + 1.0)), k));
            }
            n *= 2;
        }
    }
    let worst = cases
        .par_iter()
        .map(|(spec, k)| {
            let eps = spec.epsilon;
            let bvp = paper_test_problem(eps).unwrap();
            let uh = galerkin_solve(&bvp, generate(spec).unwrap(), *k).unwrap();
            let u = |x| paper_test::u(x, eps);
            let du = |x| paper_test::u_prime(x, eps);
            let a = error_norms(&uh, u, du, eps).e_energy;
            let b = error_norms_with(&uh, u, du, eps, &once).e_energy;
            (a - b).abs() / b
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn norm_identities() {
    let eps = 1e-3;
    let bvp = paper_test_problem(eps).unwrap();
    let mesh = generate(&MeshSpec::roos(16, 3.0, eps)).unwrap();
    let uh = galerkin_solve(&bvp, mesh, 2).unwrap();
    let e = error_norms(&uh, |x| paper_test::u(x, eps), |x| paper_test::u_prime(x, eps), eps);
    assert!(e.e_energy >= e.e_l2);
    assert!(e.e_inf >= e.e_l2);
}

#[test]
fn singular_system_reports_pivot() {
    let mut m = BandedMatrix::zeros(4, 1, 1);
    m.set(0, 0, 1.0);
    m.set(2, 2, 1.0);
    m.set(3, 3, 1.0);
    let err = banded::solve(BandedSystem { matrix: m, rhs: vec![1.0; 4] }).unwrap_err();
    assert!(matches!(err, Error::SingularPivot { index: 1 }));
    assert!(err.is_numerical());
}
