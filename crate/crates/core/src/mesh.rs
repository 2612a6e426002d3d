//! Bakhvalov-type layer-adapted meshes on [0, 1].
//!
//! Every mesh is the image of the uniform parameter grid `t_i = i/N` under a
//! piecewise generating map: logarithmic inside the boundary layer at `x = 0`
//! and linear on the coarse part. Three families differ only in where the
//! logarithmic branch ends:
//!
//! * [`MeshFamily::RoosB`]: `x = -sigma eps ln(1 - 2(1 - eps) t)` on `[0, 1/2]`.
//! * [`MeshFamily::KoptevaB`]: `x = -sigma eps ln(1 - 2t)` on `[0, theta]` with
//!   `theta = 1/2 - C1 eps`.
//! * [`MeshFamily::OriginalB`]: as `KoptevaB`, with an eps-dependent constant
//!   in place of `C1`.
//!
//! The linear branch is fixed by continuity at the breakpoint. When
//! `eps > 1/N` all families fall back to the uniform mesh.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeshFamily {
    RoosB,
    KoptevaB,
    OriginalB,
    Uniform,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 4] = [
        MeshFamily::RoosB,
        MeshFamily::KoptevaB,
        MeshFamily::OriginalB,
        MeshFamily::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::RoosB => "roos-b",
            MeshFamily::KoptevaB => "kopteva-b",
            MeshFamily::OriginalB => "original-b",
            MeshFamily::Uniform => "uniform",
        }
    }

    pub fn is_layer_adapted(self) -> bool {
        !matches!(self, MeshFamily::Uniform)
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "roosb" | "roos" => Ok(MeshFamily::RoosB),
            "koptevab" | "kopteva" => Ok(MeshFamily::KoptevaB),
            "originalb" | "original" | "bakhvalov" => Ok(MeshFamily::OriginalB),
            "uniform" => Ok(MeshFamily::Uniform),
            _ => Err(Error::Config(format!("unknown mesh type `{s}`"))),
        }
    }
}

/// Parameters of a mesh. `c1` is only read by `KoptevaB`, `c_eps` only by
/// `OriginalB`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSpec {
    pub family: MeshFamily,
    pub intervals: usize,
    pub sigma: f64,
    pub epsilon: f64,
    pub c1: f64,
    pub c_eps: f64,
}

impl MeshSpec {
    pub const DEFAULT_C_EPS: f64 = 1.0;

    pub fn new(family: MeshFamily, intervals: usize, sigma: f64, epsilon: f64) -> Self {
        Self {
            family,
            intervals,
            sigma,
            epsilon,
            c1: 1.0,
            c_eps: Self::DEFAULT_C_EPS,
        }
    }

    pub fn roos(intervals: usize, sigma: f64, epsilon: f64) -> Self {
        Self::new(MeshFamily::RoosB, intervals, sigma, epsilon)
    }

    pub fn kopteva(intervals: usize, sigma: f64, epsilon: f64, c1: f64) -> Self {
        Self {
            c1,
            ..Self::new(MeshFamily::KoptevaB, intervals, sigma, epsilon)
        }
    }

    pub fn original(intervals: usize, sigma: f64, epsilon: f64, c_eps: f64) -> Self {
        Self {
            c_eps,
            ..Self::new(MeshFamily::OriginalB, intervals, sigma, epsilon)
        }
    }

    pub fn uniform(intervals: usize, epsilon: f64) -> Self {
        Self::new(MeshFamily::Uniform, intervals, 1.0, epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        if self.intervals < 4 || self.intervals % 2 != 0 {
            return Err(Error::InvalidIntervalCount(self.intervals));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if !(self.sigma >= 1.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidSigma(self.sigma));
        }
        if let Some(c) = self.breakpoint_constant() {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::InvalidBreakpointConstant(c));
            }
            let theta = 0.5 - c * self.epsilon;
            if !(theta > 0.0 && theta < 0.5) {
                return Err(Error::BreakpointOutOfRange(theta));
            }
        }
        Ok(())
    }

    /// Family actually used for node generation: layer-adapted families
    /// degrade to uniform when `eps > 1/N`.
    pub fn effective_family(&self) -> MeshFamily {
        if self.epsilon > 1.0 / self.intervals as f64 {
            MeshFamily::Uniform
        } else {
            self.family
        }
    }

    fn breakpoint_constant(&self) -> Option<f64> {
        match self.family {
            MeshFamily::KoptevaB => Some(self.c1),
            MeshFamily::OriginalB => Some(self.c_eps),
            _ => None,
        }
    }

    fn generator(&self) -> Generator {
        let (sigma, eps) = (self.sigma, self.epsilon);
        match self.effective_family() {
            MeshFamily::Uniform => Generator::Identity,
            MeshFamily::RoosB => Generator::Roos {
                sigma,
                eps,
                slope: 2.0 * (1.0 + sigma * eps * eps.ln()),
            },
            MeshFamily::KoptevaB | MeshFamily::OriginalB => {
                let c = self.breakpoint_constant().unwrap_or(1.0);
                Generator::Kopteva {
                    sigma,
                    eps,
                    theta: 0.5 - c * eps,
                    slope: (1.0 + sigma * eps * (2.0 * c * eps).ln()) / (0.5 + c * eps),
                }
            }
        }
    }

    /// Evaluates the generating map at `t` in [0, 1].
    pub fn map(&self, t: f64) -> f64 {
        self.generator().eval(t)
    }

    /// Breakpoint `t*` of the generating map together with the values of
    /// the logarithmic and the linear branch formula at `t*`.
    pub fn breakpoint_branches(&self) -> Option<(f64, f64, f64)> {
        self.generator().branches_at_breakpoint()
    }
}

#[derive(Debug, Clone, Copy)]
enum Generator {
    Identity,
    Roos { sigma: f64, eps: f64, slope: f64 },
    Kopteva { sigma: f64, eps: f64, theta: f64, slope: f64 },
}

impl Generator {
    fn eval(self, t: f64) -> f64 {
        match self {
            Generator::Identity => t,
            Generator::Roos { sigma, eps, slope } => {
                if t <= 0.5 {
                    -sigma * eps * (1.0 - 2.0 * (1.0 - eps) * t).ln()
                } else {
                    1.0 - slope * (1.0 - t)
                }
            }
            Generator::Kopteva { sigma, eps, theta, slope } => {
                if t <= theta {
                    -sigma * eps * (1.0 - 2.0 * t).ln()
                } else {
                    1.0 - slope * (1.0 - t)
                }
            }
        }
    }

    fn branches_at_breakpoint(self) -> Option<(f64, f64, f64)> {
        match self {
            Generator::Identity => None,
            Generator::Roos { sigma, eps, slope } => {
                let t = 0.5;
                let left = -sigma * eps * (1.0 - 2.0 * (1.0 - eps) * t).ln();
                Some((t, left, 1.0 - slope * (1.0 - t)))
            }
            Generator::Kopteva { sigma, eps, theta, slope } => {
                let left = -sigma * eps * (1.0 - 2.0 * theta).ln();
                Some((theta, left, 1.0 - slope * (1.0 - theta)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshWarning {
    /// `C > 1/(eps N)`: the breakpoint lies further than one parameter step
    /// below `t = 1/2`.
    BreakpointConstantTooLarge { constant: f64, limit: f64 },
}

impl fmt::Display for MeshWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshWarning::BreakpointConstantTooLarge { constant, limit } => write!(
                f,
                "breakpoint constant {constant} exceeds 1/(eps N) = {limit}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    spec: MeshSpec,
    family: MeshFamily,
    warnings: Vec<MeshWarning>,
}

/// Generates the mesh `x_i = map(i/N)`, `i = 0..=N`.
pub fn generate(spec: &MeshSpec) -> Result<Mesh1D> {
    spec.validate()?;
    let n = spec.intervals;
    let family = spec.effective_family();
    let generator = spec.generator();

    let mut warnings = Vec::new();
    if family.is_layer_adapted() {
        if let Some(c) = spec.breakpoint_constant() {
            let limit = 1.0 / (spec.epsilon * n as f64);
            if c > limit {
                let w = MeshWarning::BreakpointConstantTooLarge { constant: c, limit };
                log::warn!("{family} mesh, N = {n}, eps = {:e}: {w}", spec.epsilon);
                warnings.push(w);
            }
        }
    }

    let mut nodes: Vec<f64> = (0..=n)
        .map(|i| generator.eval(i as f64 / n as f64))
        .collect();
    nodes[0] = 0.0;
    nodes[n] = 1.0;

    let mesh = Mesh1D {
        nodes,
        spec: *spec,
        family,
        warnings,
    };
    mesh.check_monotone()?;
    Ok(mesh)
}

impl Mesh1D {
    /// Builds a mesh from explicit nodes. The spec is kept for provenance only.
    pub fn from_nodes(nodes: Vec<f64>, spec: MeshSpec) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::NonIncreasingMesh(0));
        }
        let mesh = Mesh1D {
            nodes,
            family: spec.family,
            spec,
            warnings: Vec::new(),
        };
        mesh.check_monotone()?;
        Ok(mesh)
    }

    fn check_monotone(&self) -> Result<()> {
        if self.nodes[0] != 0.0 {
            return Err(Error::NonIncreasingMesh(0));
        }
        if *self.nodes.last().unwrap() != 1.0 {
            return Err(Error::NonIncreasingMesh(self.nodes.len() - 1));
        }
        for (i, w) in self.nodes.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::NonIncreasingMesh(i + 1));
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spec(&self) -> &MeshSpec {
        &self.spec
    }

    pub fn family(&self) -> MeshFamily {
        self.family
    }

    pub fn warnings(&self) -> &[MeshWarning] {
        &self.warnings
    }

    /// Number of intervals N.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn step(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| w[1] - w[0])
    }

    /// Index of the element containing `x`; points on interior nodes belong
    /// to the element on their right.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.intervals();
        let idx = self.nodes.partition_point(|&node| node <= x);
        idx.saturating_sub(1).min(n - 1)
    }

    /// Largest value of `h_i^mu exp(-x_i/eps) / (eps^mu N^-mu)` over the fine
    /// part `0 <= i <= N/2 - 2`.
    pub fn max_layer_decay_ratio(&self, mu: f64) -> f64 {
        let n = self.intervals();
        let eps = self.spec.epsilon;
        let scale = (eps / n as f64).powf(mu);
        (0..=n / 2 - 2)
            .map(|i| self.step(i).powf(mu) * (-self.nodes[i] / eps).exp() / scale)
            .fold(0.0, f64::max)
    }

    /// Writes `i,x_i,h_i` rows; `h_N` is left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,x_i,h_i")?;
        let n = self.intervals();
        for (i, x) in self.nodes.iter().enumerate() {
            if i < n {
                writeln!(out, "{i},{x},{}", self.step(i))?;
            } else {
                writeln!(out, "{i},{x},")?;
            }
        }
        Ok(())
    }
}

/// Outcome of the step-size inequality chains on a Bakhvalov-type mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepSizeReport {
    /// `h_0 <= h_1 <= ... <= h_{N/2-2}`
    pub fine_monotone: bool,
    /// `sigma eps / 4 <= h_{N/2-2} <= sigma eps`
    pub last_fine_step: bool,
    /// `sigma eps / 2 <= h_{N/2-1} <= 2 sigma / N`
    pub transition_step: bool,
    /// `1/N <= h_i <= 2/N` for `N/2 <= i <= N-1`
    pub coarse_steps: bool,
    /// Diagnostic only: `x_{N/2} <= 1/2`.
    pub midpoint_below_half: bool,
}

impl StepSizeReport {
    pub fn all_hold(&self) -> bool {
        self.fine_monotone && self.last_fine_step && self.transition_step && self.coarse_steps
    }
}

/// Evaluates the four step-size chains exactly as stated.
pub fn check_lemma2(mesh: &Mesh1D) -> StepSizeReport {
    let n = mesh.intervals();
    let half = n / 2;
    let sigma = mesh.spec.sigma;
    let eps = mesh.spec.epsilon;
    let inv_n = 1.0 / n as f64;
    let h: Vec<f64> = mesh.steps().collect();

    let fine_monotone = h[..=half - 2].windows(2).all(|w| w[0] <= w[1]);
    let last = h[half - 2];
    let last_fine_step = 0.25 * sigma * eps <= last && last <= sigma * eps;
    let tr = h[half - 1];
    let transition_step = 0.5 * sigma * eps <= tr && tr <= 2.0 * sigma * inv_n;
    let coarse_steps = h[half..].iter().all(|&hi| inv_n <= hi && hi <= 2.0 * inv_n);

    StepSizeReport {
        fine_monotone,
        last_fine_step,
        transition_step,
        coarse_steps,
        midpoint_below_half: mesh.nodes[half] <= 0.5,
    }
}
