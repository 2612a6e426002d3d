//! Two-point boundary value problems `-eps u'' - b u' + c u = f` on (0, 1)
//! with `u(0) = u(1) = 0`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Number of uniform points used when sampling coefficient conditions.
pub const COEFFICIENT_SAMPLES: usize = 1000;

pub fn scalar<F>(f: F) -> ScalarFn
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Smooth/layer split `u = S + E` of an exact solution.
#[derive(Clone)]
pub struct LayerDecomposition {
    pub smooth: ScalarFn,
    pub smooth_prime: ScalarFn,
    pub layer: ScalarFn,
    pub layer_prime: ScalarFn,
}

#[derive(Clone)]
pub struct ExactSolution {
    pub u: ScalarFn,
    pub u_prime: ScalarFn,
    pub decomposition: Option<LayerDecomposition>,
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactSolution")
            .field("decomposition", &self.decomposition.is_some())
            .finish()
    }
}

#[derive(Clone)]
pub struct TwoPointBVP {
    pub epsilon: f64,
    pub b: ScalarFn,
    /// Analytic `b'`; central differences are used when absent.
    pub b_prime: Option<ScalarFn>,
    pub c: ScalarFn,
    pub f: ScalarFn,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for TwoPointBVP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoPointBVP")
            .field("epsilon", &self.epsilon)
            .field("exact", &self.exact)
            .finish_non_exhaustive()
    }
}

/// Sampled lower bounds of `b` and `c + b'/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub beta: f64,
    pub gamma: f64,
}

impl TwoPointBVP {
    pub fn new(epsilon: f64, b: ScalarFn, c: ScalarFn, f: ScalarFn) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            b,
            b_prime: None,
            c,
            f,
            exact: None,
        })
    }

    pub fn with_b_prime(mut self, b_prime: ScalarFn) -> Self {
        self.b_prime = Some(b_prime);
        self
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    fn b_derivative(&self, x: f64) -> f64 {
        match &self.b_prime {
            Some(db) => db(x),
            None => {
                let h = 1e-5;
                ((self.b)(x + h) - (self.b)(x - h)) / (2.0 * h)
            }
        }
    }

    /// Samples `b` and `c + b'/2` on [`COEFFICIENT_SAMPLES`] uniform points.
    pub fn coefficient_bounds(&self) -> CoefficientBounds {
        let mut beta = f64::INFINITY;
        let mut gamma = f64::INFINITY;
        for i in 0..COEFFICIENT_SAMPLES {
            let x = i as f64 / (COEFFICIENT_SAMPLES - 1) as f64;
            beta = beta.min((self.b)(x));
            gamma = gamma.min((self.c)(x) + 0.5 * self.b_derivative(x));
        }
        CoefficientBounds { beta, gamma }
    }

    /// Rejects data violating `b > 1` or `c + b'/2 > 0` on the sample grid.
    pub fn validate(&self) -> Result<CoefficientBounds> {
        let bounds = self.coefficient_bounds();
        if !(bounds.beta > 1.0) {
            return Err(Error::Coefficients(format!(
                "min b = {} is not above 1",
                bounds.beta
            )));
        }
        if !(bounds.gamma > 0.0) {
            return Err(Error::Coefficients(format!(
                "min (c + b'/2) = {} is not positive",
                bounds.gamma
            )));
        }
        Ok(bounds)
    }

    pub fn exact(&self) -> Result<&ExactSolution> {
        self.exact.as_ref().ok_or(Error::MissingExactSolution)
    }
}

/// Closed forms for `u(x) = (1 - x)(1 - exp(-2x/eps))`.
pub mod paper_test {
    fn layer(x: f64, eps: f64) -> f64 {
        (-2.0 * x / eps).exp()
    }

    pub fn u(x: f64, eps: f64) -> f64 {
        (1.0 - x) * (1.0 - layer(x, eps))
    }

    pub fn u_prime(x: f64, eps: f64) -> f64 {
        -1.0 + layer(x, eps) * (1.0 + 2.0 * (1.0 - x) / eps)
    }

    pub fn u_second(x: f64, eps: f64) -> f64 {
        -(2.0 / eps) * layer(x, eps) * (2.0 + 2.0 * (1.0 - x) / eps)
    }

    pub fn b(x: f64) -> f64 {
        3.0 - x
    }

    pub fn f(x: f64, eps: f64) -> f64 {
        -eps * u_second(x, eps) - b(x) * u_prime(x, eps) + u(x, eps)
    }

    pub fn smooth(x: f64) -> f64 {
        1.0 - x
    }

    pub fn layer_part(x: f64, eps: f64) -> f64 {
        -(1.0 - x) * layer(x, eps)
    }

    pub fn layer_part_prime(x: f64, eps: f64) -> f64 {
        layer(x, eps) * (1.0 + 2.0 * (1.0 - x) / eps)
    }
}

/// `-eps u'' - (3 - x) u' + u = f` with exact solution
/// `u = (1 - x)(1 - exp(-2x/eps))`, `S = 1 - x`, `E = -(1 - x) exp(-2x/eps)`.
pub fn paper_test_problem(epsilon: f64) -> Result<TwoPointBVP> {
    let eps = epsilon;
    let exact = ExactSolution {
        u: scalar(move |x| paper_test::u(x, eps)),
        u_prime: scalar(move |x| paper_test::u_prime(x, eps)),
        decomposition: Some(LayerDecomposition {
            smooth: scalar(paper_test::smooth),
            smooth_prime: scalar(|_| -1.0),
            layer: scalar(move |x| paper_test::layer_part(x, eps)),
            layer_prime: scalar(move |x| paper_test::layer_part_prime(x, eps)),
        }),
    };
    Ok(TwoPointBVP::new(
        eps,
        scalar(paper_test::b),
        scalar(|_| 1.0),
        scalar(move |x| paper_test::f(x, eps)),
    )?
    .with_b_prime(scalar(|_| -1.0))
    .with_exact(exact))
}

/// Same coefficients as [`paper_test_problem`] with the layer-free exact
/// solution `u = x(1 - x)`, which lies in every finite element space with
/// `k >= 2`.
pub fn quadratic_problem(epsilon: f64) -> Result<TwoPointBVP> {
    let eps = epsilon;
    let exact = ExactSolution {
        u: scalar(|x| x * (1.0 - x)),
        u_prime: scalar(|x| 1.0 - 2.0 * x),
        decomposition: Some(LayerDecomposition {
            smooth: scalar(|x| x * (1.0 - x)),
            smooth_prime: scalar(|x| 1.0 - 2.0 * x),
            layer: scalar(|_| 0.0),
            layer_prime: scalar(|_| 0.0),
        }),
    };
    Ok(TwoPointBVP::new(
        eps,
        scalar(paper_test::b),
        scalar(|_| 1.0),
        scalar(move |x| 2.0 * eps - (3.0 - x) * (1.0 - 2.0 * x) + x * (1.0 - x)),
    )?
    .with_b_prime(scalar(|_| -1.0))
    .with_exact(exact))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    PaperTest,
    Quadratic,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::PaperTest => "paper-test",
            ProblemKind::Quadratic => "quadratic",
        }
    }

    pub fn build(self, epsilon: f64) -> Result<TwoPointBVP> {
        match self {
            ProblemKind::PaperTest => paper_test_problem(epsilon),
            ProblemKind::Quadratic => quadratic_problem(epsilon),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper-test" | "paper_test" => Ok(ProblemKind::PaperTest),
            "quadratic" => Ok(ProblemKind::Quadratic),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }
}

/// Scaled layer values at the two nodes bracketing the transition element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerBoundReport {
    /// `|E(x_{N/2-1})| N^sigma`
    pub before_transition: f64,
    /// `|E(x_{N/2})| eps^-sigma`
    pub after_transition: f64,
}

pub fn check_layer_bounds(bvp: &TwoPointBVP, mesh: &Mesh1D, sigma: f64) -> Result<LayerBoundReport> {
    let exact = bvp.exact()?;
    let dec = exact
        .decomposition
        .as_ref()
        .ok_or(Error::MissingDecomposition)?;
    let n = mesh.intervals();
    let x = mesh.nodes();
    let before = (dec.layer)(x[n / 2 - 1]).abs() * (n as f64).powf(sigma);
    let after = (dec.layer)(x[n / 2]).abs() * bvp.epsilon.powf(-sigma);
    Ok(LayerBoundReport {
        before_transition: before,
        after_transition: after,
    })
}
