//! Galerkin discretization of `a(u, v) = eps (u', v') - (b u', v) + (c u, v)`.

use std::sync::Arc;

use crate::banded::{self, BandedMatrix, BandedSystem};
use crate::basis::ReferenceBasis;
use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::problem::TwoPointBVP;
use crate::quadrature::QuadratureRule;
use crate::space::{node_count, PiecewisePolynomial};

/// Default number of Gauss points per element for polynomial degree `k`.
pub fn default_quadrature_points(degree: usize) -> usize {
    degree + 2
}

pub fn assemble(bvp: &TwoPointBVP, mesh: &Mesh1D, degree: usize) -> Result<BandedSystem> {
    assemble_with(bvp, mesh, degree, default_quadrature_points(degree))
}

/// Assembles the stiffness matrix and load vector on the interior nodes
/// (homogeneous Dirichlet values eliminated). Unknown `m - 1` corresponds to
/// global node `m`.
pub fn assemble_with(
    bvp: &TwoPointBVP,
    mesh: &Mesh1D,
    degree: usize,
    quad_points: usize,
) -> Result<BandedSystem> {
    let basis = ReferenceBasis::new(degree)?;
    let rule = QuadratureRule::gauss_legendre(quad_points)?;
    if let Some(i) = mesh.nodes().windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonIncreasingMesh(i + 1));
    }

    let k = degree;
    let nodes = node_count(mesh, k);
    let n = nodes - 2;
    let mut matrix = BandedMatrix::zeros(n, k, k);
    let mut rhs = vec![0.0; n];

    let tab = basis.tabulate(rule.points());
    let eps = bvp.epsilon;
    let width = k + 1;
    let mut local = vec![0.0; width * width];
    let mut local_rhs = vec![0.0; width];

    for (e, w) in mesh.nodes().windows(2).enumerate() {
        let (x0, h) = (w[0], w[1] - w[0]);
        local.iter_mut().for_each(|v| *v = 0.0);
        local_rhs.iter_mut().for_each(|v| *v = 0.0);

        for (p, (t, wt)) in rule.iter().enumerate() {
            let x = x0 + t * h;
            let jw = wt * h;
            let (bx, cx, fx) = ((bvp.b)(x), (bvp.c)(x), (bvp.f)(x));
            let phi = tab.values(p);
            let dphi = tab.derivatives(p);
            for a in 0..width {
                let (va, da) = (phi[a], dphi[a] / h);
                local_rhs[a] += jw * fx * va;
                for bb in 0..width {
                    let (vb, db) = (phi[bb], dphi[bb] / h);
                    local[a * width + bb] += jw * (eps * db * da - bx * db * va + cx * vb * va);
                }
            }
        }

        let first = e * k;
        for a in 0..width {
            let ga = first + a;
            if ga == 0 || ga == nodes - 1 {
                continue;
            }
            rhs[ga - 1] += local_rhs[a];
            for bb in 0..width {
                let gb = first + bb;
                if gb == 0 || gb == nodes - 1 {
                    continue;
                }
                matrix.add(ga - 1, gb - 1, local[a * width + bb]);
            }
        }
    }
    Ok(BandedSystem { matrix, rhs })
}

/// Solves the discrete problem and returns `u^N` with zero boundary values.
pub fn galerkin_solve(
    bvp: &TwoPointBVP,
    mesh: impl Into<Arc<Mesh1D>>,
    degree: usize,
) -> Result<PiecewisePolynomial> {
    galerkin_solve_with(bvp, mesh, degree, default_quadrature_points(degree))
}

pub fn galerkin_solve_with(
    bvp: &TwoPointBVP,
    mesh: impl Into<Arc<Mesh1D>>,
    degree: usize,
    quad_points: usize,
) -> Result<PiecewisePolynomial> {
    let mesh = mesh.into();
    let system = assemble_with(bvp, &mesh, degree, quad_points)?;
    let interior = banded::solve(system)?;
    let mut coefficients = Vec::with_capacity(interior.len() + 2);
    coefficients.push(0.0);
    coefficients.extend(interior);
    coefficients.push(0.0);
    PiecewisePolynomial::new(mesh, degree, coefficients)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, MeshSpec};
    use crate::problem::scalar;

    #[test]
    fn hat_function_stiffness_diagonal() {
        // eps = 1 stiffness only: zero b and c
        let mut bvp = TwoPointBVP::new(0.5, scalar(|_| 0.0), scalar(|_| 0.0), scalar(|_| 0.0)).unwrap();
        bvp.epsilon = 1.0;
        let mesh = generate(&MeshSpec::uniform(4, 0.5)).unwrap();
        let sys = assemble(&bvp, &mesh, 1).unwrap();
        assert_eq!(sys.dim(), 3);
        for i in 0..3 {
            assert!((sys.matrix.get(i, i) - 8.0).abs() < 1e-13);
        }
        assert!((sys.matrix.get(0, 1) + 4.0).abs() < 1e-13);
    }

    #[test]
    fn full_hat_function_row() {
        // k=1, N=4, eps=1, b=2, c=1: A_ii = 2/h + 2h/3, A_{i,i+1} = -1/h - 2*(1/2) + h/6
        let mut bvp = TwoPointBVP::new(0.5, scalar(|_| 2.0), scalar(|_| 1.0), scalar(|_| 0.0)).unwrap();
        bvp.epsilon = 1.0;
        let mesh = generate(&MeshSpec::uniform(4, 0.5)).unwrap();
        let sys = assemble(&bvp, &mesh, 1).unwrap();
        let h = 0.25;
        assert!((sys.matrix.get(1, 1) - (2.0 / h + 2.0 * h / 3.0)).abs() < 1e-13);
        // -(b theta_{i+1}', theta_i) = -2 * (1/h) * (h/2) = -1
        assert!((sys.matrix.get(1, 2) - (-1.0 / h - 1.0 + h / 6.0)).abs() < 1e-13);
        assert!((sys.matrix.get(1, 0) - (-1.0 / h + 1.0 + h / 6.0)).abs() < 1e-13);
    }

    #[test]
    fn zero_forcing_gives_zero_solution() {
        let bvp = TwoPointBVP::new(1e-4, scalar(|x| 3.0 - x), scalar(|_| 1.0), scalar(|_| 0.0)).unwrap();
        let mesh = generate(&MeshSpec::roos(16, 3.0, 1e-4)).unwrap();
        let sys = assemble(&bvp, &mesh, 2).unwrap();
        assert!(sys.rhs.iter().all(|&v| v == 0.0));
        let u = galerkin_solve(&bvp, mesh, 2).unwrap();
        assert!(u.coefficients().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_degree_zero() {
        let bvp = TwoPointBVP::new(1e-2, scalar(|_| 2.0), scalar(|_| 1.0), scalar(|_| 1.0)).unwrap();
        let mesh = generate(&MeshSpec::uniform(4, 0.5)).unwrap();
        assert!(matches!(assemble(&bvp, &mesh, 0), Err(Error::InvalidDegree { .. })));
    }

    #[test]
    fn bandwidth_is_degree() {
        let bvp = crate::problem::paper_test_problem(1e-3).unwrap();
        let mesh = generate(&MeshSpec::roos(8, 4.0, 1e-3)).unwrap();
        let sys = assemble(&bvp, &mesh, 3).unwrap();
        assert_eq!(sys.dim(), 3 * 8 - 1);
        let dense = sys.matrix.to_dense();
        for (i, row) in dense.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if i.abs_diff(j) > 3 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }
}
