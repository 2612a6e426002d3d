//! Lagrange shape functions on equidistant nodes `j/k` of [0, 1].

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBasis {
    degree: usize,
    nodes: Vec<f64>,
    /// `1 / prod_{m != j} (xi_j - xi_m)`
    denominators: Vec<f64>,
}

impl ReferenceBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::InvalidDegree {
                degree,
                max: MAX_DEGREE,
            });
        }
        let nodes: Vec<f64> = (0..=degree).map(|j| j as f64 / degree as f64).collect();
        let denominators = (0..=degree)
            .map(|j| {
                let prod: f64 = (0..=degree)
                    .filter(|&m| m != j)
                    .map(|m| nodes[j] - nodes[m])
                    .product();
                1.0 / prod
            })
            .collect();
        Ok(Self {
            degree,
            nodes,
            denominators,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn value(&self, j: usize, xi: f64) -> f64 {
        let prod: f64 = (0..=self.degree)
            .filter(|&m| m != j)
            .map(|m| xi - self.nodes[m])
            .product();
        prod * self.denominators[j]
    }

    pub fn derivative(&self, j: usize, xi: f64) -> f64 {
        let mut sum = 0.0;
        for l in (0..=self.degree).filter(|&l| l != j) {
            let prod: f64 = (0..=self.degree)
                .filter(|&m| m != j && m != l)
                .map(|m| xi - self.nodes[m])
                .product();
            sum += prod;
        }
        sum * self.denominators[j]
    }

    /// Writes all shape values at `xi` into `out`.
    pub fn values_into(&self, xi: f64, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate().take(self.len()) {
            *o = self.value(j, xi);
        }
    }

    pub fn derivatives_into(&self, xi: f64, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate().take(self.len()) {
            *o = self.derivative(j, xi);
        }
    }

    /// Shape values and derivatives tabulated at each point of `points`.
    pub fn tabulate(&self, points: &[f64]) -> Tabulation {
        let width = self.len();
        let mut values = vec![0.0; points.len() * width];
        let mut derivatives = vec![0.0; points.len() * width];
        for (p, &xi) in points.iter().enumerate() {
            self.values_into(xi, &mut values[p * width..(p + 1) * width]);
            self.derivatives_into(xi, &mut derivatives[p * width..(p + 1) * width]);
        }
        Tabulation {
            width,
            values,
            derivatives,
        }
    }
}

/// Row-major table of shape values/derivatives, one row per point.
#[derive(Debug, Clone)]
pub struct Tabulation {
    width: usize,
    values: Vec<f64>,
    derivatives: Vec<f64>,
}

impl Tabulation {
    pub fn values(&self, point: usize) -> &[f64] {
        &self.values[point * self.width..(point + 1) * self.width]
    }

    pub fn derivatives(&self, point: usize) -> &[f64] {
        &self.derivatives[point * self.width..(point + 1) * self.width]
    }
}
