//! Convergence studies over (mesh family, k, N, eps) and their tabulation.
//!
//! For each (family, k, N) the uniform error is `e^N = max_eps ||u - u^N||_eps`
//! and the rate between consecutive N is `log2(e^N / e^{2N})`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::assembly::galerkin_solve_with;
use crate::error::{Error, Result};
use crate::interpolants::build_bundle;
use crate::mesh::{generate, MeshFamily, MeshSpec};
use crate::norms::{error_norms, norms_of, ErrorTriple};
use crate::problem::ProblemKind;

pub const DEFAULT_EPSILONS: [f64; 6] = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9];
pub const MAX_STUDY_DEGREE: usize = 10;

/// Errors below this are treated as round-off; rates involving them are
/// not reported.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaRule {
    /// `sigma = k + 1`
    DegreePlusOne,
    Fixed(f64),
}

impl SigmaRule {
    pub fn sigma(self, degree: usize) -> f64 {
        match self {
            SigmaRule::DegreePlusOne => degree as f64 + 1.0,
            SigmaRule::Fixed(s) => s,
        }
    }
}

impl std::str::FromStr for SigmaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "k+1" {
            return Ok(SigmaRule::DegreePlusOne);
        }
        t.parse::<f64>()
            .map(SigmaRule::Fixed)
            .map_err(|_| Error::Config(format!("sigma must be a number or `k+1`, got `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreakpointRule {
    /// `C1 = 5(k + 1)/4`
    FiveQuartersDegreePlusOne,
    Fixed(f64),
}

impl BreakpointRule {
    pub fn c1(self, degree: usize) -> f64 {
        match self {
            BreakpointRule::FiveQuartersDegreePlusOne => 5.0 * (degree as f64 + 1.0) / 4.0,
            BreakpointRule::Fixed(c) => c,
        }
    }
}

impl std::str::FromStr for BreakpointRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "5(k+1)/4" {
            return Ok(BreakpointRule::FiveQuartersDegreePlusOne);
        }
        t.parse::<f64>()
            .map(BreakpointRule::Fixed)
            .map_err(|_| Error::Config(format!("c1 must be a number or `5(k+1)/4`, got `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub families: Vec<MeshFamily>,
    pub degrees: Vec<usize>,
    pub sigma: SigmaRule,
    pub c1: BreakpointRule,
    pub c_eps: f64,
    /// `None` selects 8, 16, ..., 2048 for k <= 2 and 8, ..., 1024 otherwise.
    pub intervals: Option<Vec<usize>>,
    pub epsilons: Vec<f64>,
    pub problem: ProblemKind,
    /// Gauss points per element in assembly; `None` means `k + 2`.
    pub quad_points: Option<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            families: vec![MeshFamily::RoosB, MeshFamily::KoptevaB],
            degrees: vec![1, 2, 3, 4],
            sigma: SigmaRule::DegreePlusOne,
            c1: BreakpointRule::FiveQuartersDegreePlusOne,
            c_eps: MeshSpec::DEFAULT_C_EPS,
            intervals: None,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            problem: ProblemKind::PaperTest,
            quad_points: None,
        }
    }
}

/// Default N sequence for degree `k`.
pub fn default_intervals(degree: usize) -> Vec<usize> {
    let top = if degree <= 2 { 2048 } else { 1024 };
    std::iter::successors(Some(8usize), |n| Some(n * 2))
        .take_while(|&n| n <= top)
        .collect()
}

impl StudyConfig {
    pub fn intervals_for(&self, degree: usize) -> Vec<usize> {
        let mut ns = self
            .intervals
            .clone()
            .unwrap_or_else(|| default_intervals(degree));
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    pub fn mesh_spec(&self, family: MeshFamily, degree: usize, intervals: usize, epsilon: f64) -> MeshSpec {
        MeshSpec {
            family,
            intervals,
            sigma: self.sigma.sigma(degree),
            epsilon,
            c1: self.c1.c1(degree),
            c_eps: self.c_eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.degrees.is_empty() || self.epsilons.is_empty() {
            return Err(Error::Config("families, degrees and epsilons must be non-empty".into()));
        }
        if let Some(&k) = self.degrees.iter().find(|&&k| k == 0 || k > MAX_STUDY_DEGREE) {
            return Err(Error::InvalidDegree {
                degree: k,
                max: MAX_STUDY_DEGREE,
            });
        }
        if let Some(&e) = self.epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::InvalidEpsilon(e));
        }
        for &k in &self.degrees {
            let ns = self.intervals_for(k);
            if ns.is_empty() {
                return Err(Error::Config("empty N list".into()));
            }
            if let Some(&n) = ns.iter().find(|&&n| n < 4 || n % 2 != 0) {
                return Err(Error::InvalidIntervalCount(n));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub family: MeshFamily,
    pub degree: usize,
    pub sigma: f64,
    pub intervals: usize,
    pub epsilon: f64,
    /// Error triple, or the failure message of this run.
    pub outcome: std::result::Result<ErrorTriple, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub family: MeshFamily,
    pub degree: usize,
    pub intervals: usize,
    /// `max_eps ||u - u^N||_eps`; `None` if any run for this N failed.
    pub e_max: Option<f64>,
    /// `log2(e^N / e^{next N})` normalised by `log2(N_next / N)`.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub records: Vec<ConvergenceRecord>,
    pub table: Vec<TableEntry>,
}

impl StudyResult {
    pub fn entry(&self, family: MeshFamily, degree: usize, intervals: usize) -> Option<&TableEntry> {
        self.table
            .iter()
            .find(|e| e.family == family && e.degree == degree && e.intervals == intervals)
    }
}

/// One Galerkin run: mesh, solve, error norms.
pub fn run_single(
    problem: ProblemKind,
    spec: &MeshSpec,
    degree: usize,
    quad_points: Option<usize>,
) -> Result<ErrorTriple> {
    let bvp = problem.build(spec.epsilon)?;
    let exact = bvp.exact()?.clone();
    let mesh = generate(spec)?;
    let q = quad_points.unwrap_or(degree + 2);
    let uh = galerkin_solve_with(&bvp, mesh, degree, q)?;
    Ok(error_norms(&uh, &*exact.u, &*exact.u_prime, spec.epsilon))
}

pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let mut tasks = Vec::new();
    for &family in &config.families {
        for &k in &config.degrees {
            for n in config.intervals_for(k) {
                for &eps in &config.epsilons {
                    tasks.push((family, k, n, eps));
                }
            }
        }
    }

    let records: Vec<ConvergenceRecord> = tasks
        .par_iter()
        .map(|&(family, k, n, eps)| {
            let spec = config.mesh_spec(family, k, n, eps);
            let outcome = run_single(config.problem, &spec, k, config.quad_points).map_err(|e| {
                log::warn!("{family} k={k} N={n} eps={eps:e} failed: {e}");
                e.to_string()
            });
            ConvergenceRecord {
                family,
                degree: k,
                sigma: spec.sigma,
                intervals: n,
                epsilon: eps,
                outcome,
            }
        })
        .collect();

    let table = aggregate(&records);
    Ok(StudyResult { records, table })
}

/// Maximum over eps per (family, k, N) and rates between consecutive N.
pub fn aggregate(records: &[ConvergenceRecord]) -> Vec<TableEntry> {
    let mut groups: BTreeMap<(MeshFamily, usize), BTreeMap<usize, Option<f64>>> = BTreeMap::new();
    for r in records {
        let slot = groups
            .entry((r.family, r.degree))
            .or_default()
            .entry(r.intervals)
            .or_insert(Some(0.0));
        *slot = match (*slot, &r.outcome) {
            (Some(m), Ok(e)) if e.e_energy.is_finite() => Some(m.max(e.e_energy)),
            _ => None,
        };
    }

    let mut table = Vec::new();
    for ((family, degree), by_n) in groups {
        let rows: Vec<(usize, Option<f64>)> = by_n.into_iter().collect();
        for (idx, &(n, e)) in rows.iter().enumerate() {
            let rate = rows.get(idx + 1).and_then(|&(n2, e2)| rate_between(n, e?, n2, e2?));
            table.push(TableEntry {
                family,
                degree,
                intervals: n,
                e_max: e,
                rate,
            });
        }
    }
    table
}

pub fn rate_between(n1: usize, e1: f64, n2: usize, e2: f64) -> Option<f64> {
    if !(e1 >= ROUNDOFF_FLOOR && e2 >= ROUNDOFF_FLOOR) || !e1.is_finite() || !e2.is_finite() {
        return None;
    }
    Some((e1 / e2).log2() / (n2 as f64 / n1 as f64).log2())
}

/// Mean of the consecutive-N rates over the last three pairs.
pub fn fitted_rate(ns: &[usize], errors: &[f64]) -> Option<f64> {
    let rates: Vec<f64> = ns
        .windows(2)
        .zip(errors.windows(2))
        .filter_map(|(n, e)| rate_between(n[0], e[0], n[1], e[1]))
        .collect();
    if rates.is_empty() {
        return None;
    }
    let tail = &rates[rates.len().saturating_sub(3)..];
    Some(tail.iter().sum::<f64>() / tail.len() as f64)
}

/// Renders `x` as `0.ddd E±ee` with a mantissa in [0.1, 1).
pub fn format_sci3(x: f64) -> String {
    if x == 0.0 {
        return "0.000E+00".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let a = x.abs();
    let mut exp = a.log10().floor() as i32 + 1;
    let mut digits = (a / 10f64.powi(exp) * 1000.0).round();
    if digits >= 1000.0 {
        digits /= 10.0;
        exp += 1;
    }
    if digits < 100.0 {
        // log10 rounding put the mantissa below 0.1
        exp -= 1;
        digits = (a / 10f64.powi(exp) * 1000.0).round();
    }
    let esign = if exp < 0 { '-' } else { '+' };
    format!("{sign}0.{:03}E{esign}{:02}", digits as u64, exp.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Table,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

pub const CSV_HEADER: &str = "family,k,sigma,N,epsilon,e_inf,e_l2,e_energy";

pub fn write_csv<W: Write>(records: &[ConvergenceRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let mut sorted: Vec<&ConvergenceRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (a.family, a.degree, a.intervals)
            .cmp(&(b.family, b.degree, b.intervals))
            .then(b.epsilon.total_cmp(&a.epsilon))
    });
    for r in sorted {
        match &r.outcome {
            Ok(e) => writeln!(
                out,
                "{},{},{},{},{:e},{:e},{:e},{:e}",
                r.family, r.degree, r.sigma, r.intervals, r.epsilon, e.e_inf, e.e_l2, e.e_energy
            )?,
            Err(_) => writeln!(
                out,
                "{},{},{},{},{:e},FAILED,FAILED,FAILED",
                r.family, r.degree, r.sigma, r.intervals, r.epsilon
            )?,
        }
    }
    Ok(())
}

/// Aligned text table: one row per N, an `e^N`/`r^N` column pair per
/// (k, family).
pub fn render_table(table: &[TableEntry]) -> String {
    let mut columns: Vec<(usize, MeshFamily)> = table.iter().map(|e| (e.degree, e.family)).collect();
    columns.sort_unstable();
    columns.dedup();
    let mut ns: Vec<usize> = table.iter().map(|e| e.intervals).collect();
    ns.sort_unstable();
    ns.dedup();

    let cell = 20;
    let mut s = String::new();
    let _ = write!(s, "{:>6}", "");
    for (k, fam) in &columns {
        let _ = write!(s, " | {:^cell$}", format!("k={k} {fam}"));
    }
    s.push('\n');
    let _ = write!(s, "{:>6}", "N");
    for _ in &columns {
        let _ = write!(s, " | {:>11} {:>8}", "e^N", "r^N");
    }
    s.push('\n');
    s.push_str(&"-".repeat(6 + columns.len() * (cell + 3)));
    s.push('\n');
    for n in ns {
        let _ = write!(s, "{n:>6}");
        for &(k, fam) in &columns {
            let entry = table
                .iter()
                .find(|e| e.degree == k && e.family == fam && e.intervals == n);
            let (err, rate) = match entry {
                None => (String::new(), String::new()),
                Some(e) => (
                    e.e_max.map(format_sci3).unwrap_or_else(|| "FAILED".into()),
                    e.rate.map(|r| format!("{r:.2}")).unwrap_or_else(|| "—".into()),
                ),
            };
            let _ = write!(s, " | {err:>11} {rate:>8}");
        }
        s.push('\n');
    }
    s
}

pub fn emit<W: Write>(result: &StudyResult, format: OutputFormat, mut out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(&result.records, out),
        OutputFormat::Table => out.write_all(render_table(&result.table).as_bytes()),
    }
}

/// Interpolation errors of `u^I` and the size of the correction `P E`,
/// each maximised over the eps list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationRecord {
    pub family: MeshFamily,
    pub degree: usize,
    pub intervals: usize,
    pub u_inf: f64,
    pub u_l2: f64,
    pub u_energy: f64,
    pub correction_energy: f64,
}

pub fn interpolation_study(
    config: &StudyConfig,
    family: MeshFamily,
    degree: usize,
) -> Result<Vec<InterpolationRecord>> {
    config
        .intervals_for(degree)
        .into_par_iter()
        .map(|n| {
            let mut rec = InterpolationRecord {
                family,
                degree,
                intervals: n,
                u_inf: 0.0,
                u_l2: 0.0,
                u_energy: 0.0,
                correction_energy: 0.0,
            };
            for &eps in &config.epsilons {
                let bvp = config.problem.build(eps)?;
                let exact = bvp.exact()?;
                let mesh = Arc::new(generate(&config.mesh_spec(family, degree, n, eps))?);
                let bundle = build_bundle(exact, mesh, degree)?;
                let e = error_norms(&bundle.u_interp, &*exact.u, &*exact.u_prime, eps);
                let pe = norms_of(&bundle.correction, eps);
                rec.u_inf = rec.u_inf.max(e.e_inf);
                rec.u_l2 = rec.u_l2.max(e.e_l2);
                rec.u_energy = rec.u_energy.max(e.e_energy);
                rec.correction_energy = rec.correction_energy.max(pe.e_energy);
            }
            Ok(rec)
        })
        .collect()
}
