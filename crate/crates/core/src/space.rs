//! Continuous piecewise polynomials of degree k on a [`Mesh1D`].
//!
//! Global nodes are numbered left to right: node `i k + j` is
//! `x_i + (j/k) h_i`, so element `i` owns nodes `i k ..= i k + k` and shares
//! its end nodes with its neighbours.

use std::sync::Arc;

use crate::basis::ReferenceBasis;
use crate::error::{Error, Result};
use crate::mesh::Mesh1D;

#[derive(Debug, Clone)]
pub struct PiecewisePolynomial {
    mesh: Arc<Mesh1D>,
    basis: Arc<ReferenceBasis>,
    coefficients: Vec<f64>,
}

/// Number of global nodes `kN + 1`.
pub fn node_count(mesh: &Mesh1D, degree: usize) -> usize {
    degree * mesh.intervals() + 1
}

/// Coordinate of global node `m`.
pub fn node_position(mesh: &Mesh1D, degree: usize, m: usize) -> f64 {
    let (i, j) = (m / degree, m % degree);
    if i == mesh.intervals() {
        return mesh.nodes()[i];
    }
    let x = mesh.nodes();
    if j == 0 {
        x[i]
    } else {
        x[i] + (j as f64 / degree as f64) * (x[i + 1] - x[i])
    }
}

impl PiecewisePolynomial {
    pub fn new(mesh: Arc<Mesh1D>, degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        let basis = Arc::new(ReferenceBasis::new(degree)?);
        Self::with_basis(mesh, basis, coefficients)
    }

    pub fn with_basis(
        mesh: Arc<Mesh1D>,
        basis: Arc<ReferenceBasis>,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        let expected = node_count(&mesh, basis.degree());
        if coefficients.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coefficients.len(),
            });
        }
        Ok(Self {
            mesh,
            basis,
            coefficients,
        })
    }

    pub fn zero(mesh: Arc<Mesh1D>, degree: usize) -> Result<Self> {
        let n = node_count(&mesh, degree);
        Self::new(mesh, degree, vec![0.0; n])
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn basis(&self) -> &Arc<ReferenceBasis> {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn node_position(&self, m: usize) -> f64 {
        node_position(&self.mesh, self.degree(), m)
    }

    /// Local coefficients of element `i`.
    pub fn element_coefficients(&self, i: usize) -> &[f64] {
        let k = self.degree();
        &self.coefficients[i * k..=i * k + k]
    }

    /// Value and derivative on element `i` at reference coordinate `xi`.
    pub fn eval_local(&self, i: usize, xi: f64) -> (f64, f64) {
        let h = self.mesh.step(i);
        let mut v = 0.0;
        let mut d = 0.0;
        for (j, &c) in self.element_coefficients(i).iter().enumerate() {
            if c != 0.0 {
                v += c * self.basis.value(j, xi);
                d += c * self.basis.derivative(j, xi);
            }
        }
        (v, d / h)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.mesh.locate(x);
        let xs = self.mesh.nodes();
        self.eval_local(i, (x - xs[i]) / (xs[i + 1] - xs[i])).0
    }

    /// Derivative at `x`; at interior mesh nodes the right-hand element is used.
    pub fn eval_derivative(&self, x: f64) -> f64 {
        let i = self.mesh.locate(x);
        let xs = self.mesh.nodes();
        self.eval_local(i, (x - xs[i]) / (xs[i + 1] - xs[i])).1
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.coefficients.len() != other.coefficients.len()
            || self.degree() != other.degree()
            || self.mesh.nodes() != other.mesh.nodes()
        {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len(),
                got: other.coefficients.len(),
            });
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            coefficients,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            coefficients,
            ..self.clone()
        })
    }
}
