//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use bakhvalov_fem::mesh::Mesh1D;
use bakhvalov_fem::problem::{scalar, ExactSolution, TwoPointBVP};
use nalgebra::{DMatrix, DVector};

/// 5-point Gauss-Legendre on [-1, 1], hard-coded.
const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite 5-point rule with `panels` equal panels on [a, b].
pub fn composite_gauss<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GL5_X.iter().zip(GL5_W) {
            sum += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * sum
}

/// Lagrange shape `j` of degree `k` on equidistant nodes of [0, 1], product form.
pub fn shape(k: usize, j: usize, xi: f64) -> f64 {
    let tj = j as f64 / k as f64;
    (0..=k)
        .filter(|&m| m != j)
        .map(|m| {
            let tm = m as f64 / k as f64;
            (xi - tm) / (tj - tm)
        })
        .product()
}

/// Derivative of [`shape`] by the product rule.
pub fn shape_derivative(k: usize, j: usize, xi: f64) -> f64 {
    let tj = j as f64 / k as f64;
    let mut total = 0.0;
    for skip in (0..=k).filter(|&m| m != j) {
        let mut term = 1.0 / (tj - skip as f64 / k as f64);
        for m in (0..=k).filter(|&m| m != j && m != skip) {
            let tm = m as f64 / k as f64;
            term *= (xi - tm) / (tj - tm);
        }
        total += term;
    }
    total
}

/// Dense stiffness matrix on interior nodes, built element by element with
/// 20 quadrature points per element (four 5-point panels).
pub fn dense_stiffness(bvp: &TwoPointBVP, mesh: &Mesh1D, k: usize) -> Vec<Vec<f64>> {
    let n_int = k * mesh.intervals() - 1;
    let mut a = vec![vec![0.0; n_int]; n_int];
    let x = mesh.nodes();
    for e in 0..mesh.intervals() {
        let (x0, h) = (x[e], x[e + 1] - x[e]);
        for r in 0..=k {
            for c in 0..=k {
                let (gr, gc) = (e * k + r, e * k + c);
                if gr == 0 || gc == 0 || gr == k * mesh.intervals() || gc == k * mesh.intervals() {
                    continue;
                }
                let val = composite_gauss(0.0, 1.0, 4, |t| {
                    let pos = x0 + t * h;
                    let (vr, dr) = (shape(k, r, t), shape_derivative(k, r, t) / h);
                    let (vc, dc) = (shape(k, c, t), shape_derivative(k, c, t) / h);
                    bvp.epsilon * dc * dr - (bvp.b)(pos) * dc * vr + (bvp.c)(pos) * vc * vr
                }) * h;
                a[gr - 1][gc - 1] += val;
            }
        }
    }
    a
}

pub fn dense_lu_solve(a: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let b = DVector::from_column_slice(rhs);
    let x = m.lu().solve(&b).expect("dense oracle: singular matrix");
    x.iter().copied().collect()
}

/// Polynomial `p(x) = x (1 - x) q(x)` with `q` given by coefficients in
/// ascending powers, together with `p'` and `p''`.
pub struct BubblePoly {
    q: Vec<f64>,
}

impl BubblePoly {
    pub fn new(q: Vec<f64>) -> Self {
        Self { q }
    }

    pub fn degree(&self) -> usize {
        self.q.len() + 1
    }

    /// Coefficients of p in ascending powers.
    fn coeffs(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.q.len() + 2];
        for (i, &qi) in self.q.iter().enumerate() {
            p[i + 1] += qi;
            p[i + 2] -= qi;
        }
        p
    }

    pub fn eval(&self, x: f64, order: usize) -> f64 {
        let mut c = self.coeffs();
        for _ in 0..order {
            c = c.iter().enumerate().skip(1).map(|(i, v)| i as f64 * v).collect();
        }
        c.iter().rev().fold(0.0, |acc, v| acc * x + v)
    }

    /// The problem with b = 3 - x, c = 1 whose exact solution is this polynomial.
    pub fn problem(self, epsilon: f64) -> TwoPointBVP {
        let p = Arc::new(self);
        let (p0, p1, p2) = (p.clone(), p.clone(), p);
        let f = scalar(move |x| {
            -epsilon * p0.eval(x, 2) - (3.0 - x) * p0.eval(x, 1) + p0.eval(x, 0)
        });
        TwoPointBVP::new(epsilon, scalar(|x| 3.0 - x), scalar(|_| 1.0), f)
            .unwrap()
            .with_b_prime(scalar(|_| -1.0))
            .with_exact(ExactSolution {
                u: scalar(move |x| p1.eval(x, 0)),
                u_prime: scalar(move |x| p2.eval(x, 1)),
                decomposition: None,
            })
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs()
}
