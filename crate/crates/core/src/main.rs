use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use bakhvalov_fem::config::{merge_list, merge_single, ConfigFile};
use bakhvalov_fem::mesh::{check_lemma2, generate, MeshFamily, MeshSpec};
use bakhvalov_fem::norms::error_norms;
use bakhvalov_fem::problem::{check_layer_bounds, ProblemKind};
use bakhvalov_fem::study::{
    self, format_sci3, BreakpointRule, OutputFormat, SigmaRule, StudyConfig,
};
use bakhvalov_fem::{galerkin_solve, Error};

const EXIT_INVALID: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "bakhvalov", version, about = "Galerkin FEM on Bakhvalov-type meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the mesh nodes and step sizes as CSV.
    Mesh(RunArgs),
    /// Solve one problem and write sampled values of u^N and u.
    Solve(RunArgs),
    /// Run a convergence sweep over (mesh type, k, N, eps).
    Study(RunArgs),
    /// Check step-size and layer bounds and tabulate interpolation errors.
    Verify(RunArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// roos-b, kopteva-b, original-b or uniform (repeatable)
    #[arg(long = "mesh-type")]
    mesh_type: Vec<MeshFamily>,
    /// Polynomial degree (repeatable)
    #[arg(long = "k")]
    k: Vec<usize>,
    /// Mesh grading parameter, a number or `k+1`
    #[arg(long)]
    sigma: Option<SigmaRule>,
    /// Breakpoint constant of kopteva-b, a number or `5(k+1)/4`
    #[arg(long)]
    c1: Option<BreakpointRule>,
    /// Breakpoint constant of original-b
    #[arg(long = "c-eps")]
    c_eps: Option<f64>,
    /// Number of mesh intervals (repeatable)
    #[arg(long = "N")]
    n: Vec<usize>,
    /// Perturbation parameter (repeatable)
    #[arg(long)]
    epsilon: Vec<f64>,
    /// paper-test or quadratic
    #[arg(long)]
    problem: Option<ProblemKind>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or table
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Sample points per element for `solve`
    #[arg(long)]
    samples: Option<usize>,
    /// Plain-text key=value file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Flags merged with the config file.
struct Settings {
    families: Vec<MeshFamily>,
    degrees: Vec<usize>,
    sigma: Option<SigmaRule>,
    c1: Option<BreakpointRule>,
    c_eps: Option<f64>,
    intervals: Vec<usize>,
    epsilons: Vec<f64>,
    problem: ProblemKind,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    samples: usize,
}

impl Settings {
    fn resolve(args: RunArgs) -> Result<Self, Error> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("cannot read {}: {io}", path.display())),
                other => other,
            })?,
            None => ConfigFile::default(),
        };
        Ok(Self {
            families: merge_list(args.mesh_type, &file, "mesh-type")?,
            degrees: merge_list(args.k, &file, "k")?,
            sigma: merge_single(args.sigma, &file, "sigma")?,
            c1: merge_single(args.c1, &file, "c1")?,
            c_eps: merge_single(args.c_eps, &file, "c-eps")?,
            intervals: merge_list(args.n, &file, "N")?,
            epsilons: merge_list(args.epsilon, &file, "epsilon")?,
            problem: merge_single(args.problem, &file, "problem")?.unwrap_or(ProblemKind::PaperTest),
            out: merge_single(args.out.map(|p| p.display().to_string()), &file, "out")?
                .map(PathBuf::from),
            format: merge_single(args.format, &file, "format")?,
            samples: merge_single(args.samples, &file, "samples")?.unwrap_or(10),
        })
    }

    fn study_config(&self) -> StudyConfig {
        let defaults = StudyConfig::default();
        StudyConfig {
            families: if self.families.is_empty() {
                defaults.families
            } else {
                self.families.clone()
            },
            degrees: if self.degrees.is_empty() {
                defaults.degrees
            } else {
                self.degrees.clone()
            },
            sigma: self.sigma.unwrap_or(defaults.sigma),
            c1: self.c1.unwrap_or(defaults.c1),
            c_eps: self.c_eps.unwrap_or(defaults.c_eps),
            intervals: (!self.intervals.is_empty()).then(|| self.intervals.clone()),
            epsilons: if self.epsilons.is_empty() {
                defaults.epsilons
            } else {
                self.epsilons.clone()
            },
            problem: self.problem,
            quad_points: None,
        }
    }

    /// Single-run parameters: first family, degree, N and eps.
    fn single(&self) -> Result<(MeshSpec, usize), Error> {
        let cfg = self.study_config();
        let family = self.families.first().copied().unwrap_or(MeshFamily::RoosB);
        let k = self.degrees.first().copied().unwrap_or(1);
        let n = self.intervals.first().copied().unwrap_or(64);
        let eps = self.epsilons.first().copied().unwrap_or(1e-6);
        let spec = cfg.mesh_spec(family, k, n, eps);
        spec.validate()?;
        Ok((spec, k))
    }

    fn writer(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

fn cmd_mesh(s: &Settings) -> Result<(), Error> {
    let (spec, _) = s.single()?;
    let mesh = generate(&spec)?;
    let mut out = s.writer()?;
    mesh.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_solve(s: &Settings) -> Result<(), Error> {
    let (spec, k) = s.single()?;
    let bvp = s.problem.build(spec.epsilon)?;
    bvp.validate()?;
    let exact = bvp.exact()?.clone();
    let mesh = Arc::new(generate(&spec)?);
    let uh = galerkin_solve(&bvp, mesh.clone(), k)?;

    let samples = s.samples.max(1);
    let mut out = s.writer()?;
    writeln!(out, "x,u_N,u_exact,error")?;
    let x = mesh.nodes();
    let mut emit = |pos: f64, v: f64| -> io::Result<()> {
        let u = (exact.u)(pos);
        writeln!(out, "{pos:e},{v:e},{u:e},{:e}", u - v)
    };
    for i in 0..mesh.intervals() {
        for j in 0..samples {
            let xi = j as f64 / samples as f64;
            emit(x[i] + xi * (x[i + 1] - x[i]), uh.eval_local(i, xi).0)?;
        }
    }
    emit(1.0, uh.eval_local(mesh.intervals() - 1, 1.0).0)?;
    out.flush()?;

    let e = error_norms(&uh, &*exact.u, &*exact.u_prime, spec.epsilon);
    eprintln!(
        "{} k={} N={} eps={:e}: e_inf={:e} e_l2={:e} e_energy={:e}",
        mesh.family(),
        k,
        spec.intervals,
        spec.epsilon,
        e.e_inf,
        e.e_l2,
        e.e_energy
    );
    Ok(())
}

fn cmd_study(s: &Settings) -> Result<bool, Error> {
    let cfg = s.study_config();
    let result = study::run_study(&cfg)?;
    let mut out = s.writer()?;
    study::emit(&result, s.format.unwrap_or(OutputFormat::Table), &mut out)?;
    out.flush()?;
    Ok(result.records.iter().all(|r| r.outcome.is_ok()))
}

fn rate_cell(prev: Option<f64>, cur: f64) -> String {
    match prev.and_then(|p| study::rate_between(1, p, 2, cur)) {
        Some(r) => format!("{r:.2}"),
        None => "—".into(),
    }
}

fn cmd_verify(s: &Settings) -> Result<(), Error> {
    let cfg = s.study_config();
    cfg.validate()?;
    let mut out = s.writer()?;

    writeln!(out, "# step-size chains and layer bounds")?;
    writeln!(
        out,
        "{:>10} {:>2} {:>6} {:>8} {:>6} {:>6} {:>6} {:>6} {:>8} {:>12} {:>12}",
        "mesh", "k", "N", "eps", "mono", "fine", "trans", "coarse", "x<=1/2", "|E|N^s", "|E|eps^-s"
    )?;
    let yn = |b: bool| if b { "ok" } else { "FAIL" };
    for &family in &cfg.families {
        for &k in &cfg.degrees {
            for n in cfg.intervals_for(k) {
                for &eps in &cfg.epsilons {
                    let spec = cfg.mesh_spec(family, k, n, eps);
                    let mesh = generate(&spec)?;
                    let r = check_lemma2(&mesh);
                    let bvp = cfg.problem.build(eps)?;
                    let lb = check_layer_bounds(&bvp, &mesh, spec.sigma)?;
                    writeln!(
                        out,
                        "{:>10} {:>2} {:>6} {:>8.0e} {:>6} {:>6} {:>6} {:>6} {:>8} {:>12.4e} {:>12.4e}",
                        mesh.family(),
                        k,
                        n,
                        eps,
                        yn(r.fine_monotone),
                        yn(r.last_fine_step),
                        yn(r.transition_step),
                        yn(r.coarse_steps),
                        if r.midpoint_below_half { "yes" } else { "no" },
                        lb.before_transition,
                        lb.after_transition
                    )?;
                }
            }
        }
    }

    writeln!(out, "\n# interpolation errors (max over eps)")?;
    writeln!(
        out,
        "{:>10} {:>2} {:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6}",
        "mesh", "k", "N", "Linf(u-uI)", "rate", "L2(u-uI)", "rate", "E(u-uI)", "rate", "E(PE)", "rate"
    )?;
    for &family in &cfg.families {
        for &k in &cfg.degrees {
            let recs = study::interpolation_study(&cfg, family, k)?;
            let mut prev: Option<&study::InterpolationRecord> = None;
            for r in &recs {
                writeln!(
                    out,
                    "{:>10} {:>2} {:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6} {:>10} {:>6}",
                    family,
                    k,
                    r.intervals,
                    format_sci3(r.u_inf),
                    rate_cell(prev.map(|p| p.u_inf), r.u_inf),
                    format_sci3(r.u_l2),
                    rate_cell(prev.map(|p| p.u_l2), r.u_l2),
                    format_sci3(r.u_energy),
                    rate_cell(prev.map(|p| p.u_energy), r.u_energy),
                    format_sci3(r.correction_energy),
                    rate_cell(prev.map(|p| p.correction_energy), r.correction_energy),
                )?;
                prev = Some(r);
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let (args, run): (RunArgs, fn(&Settings) -> Result<bool, Error>) = match cli.command {
        Command::Mesh(a) => (a, |s| cmd_mesh(s).map(|_| true)),
        Command::Solve(a) => (a, |s| cmd_solve(s).map(|_| true)),
        Command::Study(a) => (a, cmd_study),
        Command::Verify(a) => (a, |s| cmd_verify(s).map(|_| true)),
    };

    let settings = match Settings::resolve(args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match run(&settings) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some runs failed; see the FAILED entries");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
