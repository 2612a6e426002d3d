//! Lagrange interpolation and the layer-corrected interpolant
//! `Pi u = S^I + pi E = u^I - P E`.
//!
//! `P E` keeps only the Lagrange data of `E` at `x_{N/2-1}` and at the
//! interior nodes of the transition element `I_{N/2-1}`. Removing it from
//! `E^I` yields an interpolant whose layer part is stable in `L^2` on the
//! transition element.

use std::sync::Arc;

use crate::basis::ReferenceBasis;
use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::problem::ExactSolution;
use crate::space::{node_count, node_position, PiecewisePolynomial};

/// Interpolant taking the value `f(x_m)` at every global node.
pub fn lagrange_interp<F>(f: F, mesh: impl Into<Arc<Mesh1D>>, degree: usize) -> Result<PiecewisePolynomial>
where
    F: Fn(f64) -> f64,
{
    let mesh = mesh.into();
    let basis = Arc::new(ReferenceBasis::new(degree)?);
    let coefficients = (0..node_count(&mesh, degree))
        .map(|m| f(node_position(&mesh, degree, m)))
        .collect();
    PiecewisePolynomial::with_basis(mesh, basis, coefficients)
}

/// Global node indices carrying the correction: `x_{N/2-1}` and
/// `x_{N/2-1+j/k}`, `j = 1..k-1`.
pub fn correction_nodes(mesh: &Mesh1D, degree: usize) -> std::ops::Range<usize> {
    let start = (mesh.intervals() / 2 - 1) * degree;
    start..start + degree
}

#[derive(Debug, Clone)]
pub struct InterpolantBundle {
    pub u_interp: PiecewisePolynomial,
    pub smooth_interp: PiecewisePolynomial,
    pub layer_interp: PiecewisePolynomial,
    /// `pi E = E^I - P E`
    pub layer_corrected: PiecewisePolynomial,
    /// `P E`
    pub correction: PiecewisePolynomial,
    /// `Pi u = S^I + pi E`
    pub modified: PiecewisePolynomial,
}

pub fn build_bundle(
    exact: &ExactSolution,
    mesh: impl Into<Arc<Mesh1D>>,
    degree: usize,
) -> Result<InterpolantBundle> {
    let dec = exact
        .decomposition
        .as_ref()
        .ok_or(Error::MissingDecomposition)?;
    let mesh = mesh.into();
    if mesh.intervals() < 4 || mesh.intervals() % 2 != 0 {
        return Err(Error::InvalidIntervalCount(mesh.intervals()));
    }
    let u_interp = lagrange_interp(|x| (exact.u)(x), mesh.clone(), degree)?;
    let smooth_interp = lagrange_interp(|x| (dec.smooth)(x), mesh.clone(), degree)?;
    let layer_interp = lagrange_interp(|x| (dec.layer)(x), mesh.clone(), degree)?;

    let mut correction = PiecewisePolynomial::zero(mesh.clone(), degree)?;
    for m in correction_nodes(&mesh, degree) {
        correction.coefficients_mut()[m] = layer_interp.coefficients()[m];
    }
    let layer_corrected = layer_interp.sub(&correction)?;
    let modified = smooth_interp.add(&layer_corrected)?;

    Ok(InterpolantBundle {
        u_interp,
        smooth_interp,
        layer_interp,
        layer_corrected,
        correction,
        modified,
    })
}
