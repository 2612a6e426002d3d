//! Error norms `||.||_inf`, `||.||` and `||v||_eps = (eps |v|_1^2 + ||v||^2)^(1/2)`
//! by composite Gauss quadrature with per-element panel doubling.

use rayon::prelude::*;

use crate::mesh::Mesh1D;
use crate::quadrature::QuadratureRule;
use crate::space::PiecewisePolynomial;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriple {
    pub e_inf: f64,
    pub e_l2: f64,
    pub e_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    /// Gauss points per panel; `None` means `k + 3`.
    pub points_per_panel: Option<usize>,
    pub initial_panels: usize,
    pub max_panels: usize,
    pub rel_tol: f64,
    /// Doublings performed after an element has been accepted.
    pub extra_doublings: u32,
    /// Uniform samples per element for the max-norm estimate.
    pub samples_per_element: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            points_per_panel: None,
            initial_panels: 4,
            max_panels: 64,
            rel_tol: 1e-10,
            extra_doublings: 0,
            samples_per_element: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ElementSums {
    sup: f64,
    l2: f64,
    h1: f64,
}

fn converged(old: f64, new: f64, tol: f64) -> bool {
    (new - old).abs() <= tol * new.abs().max(f64::MIN_POSITIVE)
}

/// Core routine: `diff(i, xi)` returns the error value and its x-derivative
/// on element `i` at reference coordinate `xi`.
fn integrate<D>(mesh: &Mesh1D, degree: usize, epsilon: f64, opts: &NormOptions, diff: D) -> ErrorTriple
where
    D: Fn(usize, f64) -> (f64, f64) + Sync,
{
    let q = opts.points_per_panel.unwrap_or(degree + 3);
    let rule = QuadratureRule::gauss_legendre(q).expect("at least one quadrature point");
    let x = mesh.nodes();

    let panel_sums = |i: usize, panels: usize| -> (f64, f64) {
        let h = x[i + 1] - x[i];
        let width = 1.0 / panels as f64;
        let mut l2 = 0.0;
        let mut h1 = 0.0;
        for p in 0..panels {
            let start = p as f64 * width;
            for (t, w) in rule.iter() {
                let (e, de) = diff(i, start + t * width);
                l2 += w * width * e * e;
                h1 += w * width * de * de;
            }
        }
        (l2 * h, h1 * h)
    };

    let element = |i: usize| -> ElementSums {
        let mut panels = opts.initial_panels.max(1);
        let (mut l2, mut h1) = panel_sums(i, panels);
        let mut extra = 0;
        while panels < opts.max_panels {
            panels *= 2;
            let (nl2, nh1) = panel_sums(i, panels);
            let done = converged(l2, nl2, opts.rel_tol)
                && converged(epsilon * h1 + l2, epsilon * nh1 + nl2, opts.rel_tol);
            l2 = nl2;
            h1 = nh1;
            if done {
                if extra >= opts.extra_doublings {
                    break;
                }
                extra += 1;
            }
        }

        let mut sup = 0.0f64;
        let samples = opts.samples_per_element.max(2);
        for s in 0..samples {
            let xi = s as f64 / (samples - 1) as f64;
            sup = sup.max(diff(i, xi).0.abs());
        }
        for j in 1..degree {
            sup = sup.max(diff(i, j as f64 / degree as f64).0.abs());
        }
        ElementSums { sup, l2, h1 }
    };

    let parts: Vec<ElementSums> = (0..mesh.intervals()).into_par_iter().map(element).collect();
    // fixed-order reduction keeps results bitwise reproducible
    let mut total = ElementSums::default();
    for p in &parts {
        total.sup = total.sup.max(p.sup);
        total.l2 += p.l2;
        total.h1 += p.h1;
    }
    ErrorTriple {
        e_inf: total.sup,
        e_l2: total.l2.sqrt(),
        e_energy: (epsilon * total.h1 + total.l2).sqrt(),
    }
}

/// Norms of `u - fem`, with `du` the derivative of `u`.
pub fn error_norms<U, DU>(fem: &PiecewisePolynomial, u: U, du: DU, epsilon: f64) -> ErrorTriple
where
    U: Fn(f64) -> f64 + Sync,
    DU: Fn(f64) -> f64 + Sync,
{
    error_norms_with(fem, u, du, epsilon, &NormOptions::default())
}

pub fn error_norms_with<U, DU>(
    fem: &PiecewisePolynomial,
    u: U,
    du: DU,
    epsilon: f64,
    opts: &NormOptions,
) -> ErrorTriple
where
    U: Fn(f64) -> f64 + Sync,
    DU: Fn(f64) -> f64 + Sync,
{
    let mesh = fem.mesh();
    let x = mesh.nodes();
    integrate(mesh, fem.degree(), epsilon, opts, |i, xi| {
        let pos = x[i] + xi * (x[i + 1] - x[i]);
        let (v, dv) = fem.eval_local(i, xi);
        (u(pos) - v, du(pos) - dv)
    })
}

/// Norms of `v` itself.
pub fn norms_of(v: &PiecewisePolynomial, epsilon: f64) -> ErrorTriple {
    error_norms(v, |_| 0.0, |_| 0.0, epsilon)
}

/// Norms of `f - g` for two functions given with their derivatives,
/// integrated over the elements of `mesh`.
#[allow(clippy::too_many_arguments)]
pub fn distance<F, DF, G, DG>(
    mesh: &Mesh1D,
    degree: usize,
    f: F,
    df: DF,
    g: G,
    dg: DG,
    epsilon: f64,
) -> ErrorTriple
where
    F: Fn(f64) -> f64 + Sync,
    DF: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
    DG: Fn(f64) -> f64 + Sync,
{
    let x = mesh.nodes();
    integrate(mesh, degree, epsilon, &NormOptions::default(), |i, xi| {
        let pos = x[i] + xi * (x[i + 1] - x[i]);
        (f(pos) - g(pos), df(pos) - dg(pos))
    })
}
