//! Argument parsing and the subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pairdeg_core::continuation::{
    locate_critical_epsilon3_with, run_sweep, EventKind, SweepParameter, SweepPlan,
};
use pairdeg_core::degeneracy::{find_degeneracies, DegeneracyConfig, DegeneracyKind};
use pairdeg_core::discriminant::{discriminant_polynomial_with, eigenvalues, ReconstructionConfig};
use pairdeg_core::model::{ModelSpec, PairingModel};
use pairdeg_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formats::{self, FormatError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pairdeg",
    version,
    about = "Eigenvalue degeneracies of Richardson-Gaudin pairing Hamiltonians"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the commutation identities at random couplings.
    Verify(VerifyArgs),
    /// Eigenvalues of H at one coupling.
    Spectrum(SpectrumArgs),
    /// Discriminant polynomial coefficients.
    Discriminant(DiscriminantArgs),
    /// Find and classify all degeneracies.
    Roots(RootsArgs),
    /// Follow degeneracies along a parameter sweep.
    Sweep(SweepArgs),
    /// Locate the critical epsilon3 where the two level crossings collide.
    Critical(CriticalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Spec file (JSON).
    #[arg(long, value_name = "PATH", conflicts_with = "spec_json")]
    pub spec: Option<PathBuf>,
    /// Inline spec JSON.
    #[arg(long, value_name = "JSON")]
    pub spec_json: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the result here; a summary goes to stdout.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Couplings are drawn uniformly from the disk of this radius.
    #[arg(long, default_value_t = 5.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub g: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub g_im: f64,
    /// Include the Hamiltonian matrix.
    #[arg(long)]
    pub matrix: bool,
}

#[derive(Debug, Args)]
pub struct ReconstructionArgs {
    /// Relative cutoff for trailing coefficients.
    #[arg(long, default_value_t = 1e-9)]
    pub trim_tol: f64,
    /// Largest accepted interpolation residual.
    #[arg(long, default_value_t = 1e-6)]
    pub residual_tol: f64,
}

impl ReconstructionArgs {
    fn config(&self) -> ReconstructionConfig {
        ReconstructionConfig {
            trim_tol: self.trim_tol,
            residual_tol: self.residual_tol,
            ..ReconstructionConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct DiscriminantArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub reconstruction: ReconstructionArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub reconstruction: ReconstructionArgs,
    #[arg(long, default_value_t = 1e-5)]
    pub cluster_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub min_cluster_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub coincidence_tol: f64,
    #[arg(long, default_value_t = 1e3)]
    pub escape_radius: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub q_crossing_gap: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub q_coalescence_gap: f64,
    #[arg(long, default_value_t = 128)]
    pub monodromy_steps: usize,
    /// Skip monodromy and the Q-test; kinds follow from multiplicity.
    #[arg(long)]
    pub multiplicity_only: bool,
}

impl ClassifyArgs {
    fn config(&self) -> DegeneracyConfig {
        DegeneracyConfig {
            reconstruction: self.reconstruction.config(),
            cluster_tol: self.cluster_tol,
            min_cluster_tol: self.min_cluster_tol,
            coincidence_tol: self.coincidence_tol,
            escape_radius: self.escape_radius,
            q_crossing_gap: self.q_crossing_gap,
            q_coalescence_gap: self.q_coalescence_gap,
            monodromy_steps: self.monodromy_steps,
            multiplicity_only: self.multiplicity_only,
            ..DegeneracyConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub classify: ClassifyArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParameterArg {
    Epsilon3,
    Zeta,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// fig1, fig2a, fig2b or fig2c.
    #[arg(long, conflicts_with_all = ["spec", "spec_json", "parameter"])]
    pub preset: Option<String>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, requires_all = ["from", "to"])]
    pub parameter: Option<ParameterArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub initial_step: Option<f64>,
    #[arg(long)]
    pub min_step: Option<f64>,
    #[arg(long)]
    pub max_displacement: Option<f64>,
    #[arg(long)]
    pub event_tol: Option<f64>,
    #[command(flatten)]
    pub classify: ClassifyArgs,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 2.5)]
    pub hi: f64,
    /// Bisection stops once the bracket is narrower than this.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub classify: ClassifyArgs,
}

/// Failure of a subcommand, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<pairdeg_core::Error> for Failure {
    fn from(e: pairdeg_core::Error) -> Self {
        use pairdeg_core::Error as E;
        match e {
            E::InvalidSpec(_)
            | E::DegenerateEpsilon { .. }
            | E::PreconditionViolated(_)
            | E::DimensionMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

/// What a subcommand produced: the serialized result, a human summary, and
/// whether it counts as success.
pub struct Outcome {
    pub data: String,
    pub summary: String,
    pub success: bool,
}

fn load_spec(input: &InputArgs) -> Result<ModelSpec, Failure> {
    let text = match (&input.spec, &input.spec_json) {
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
        (None, Some(inline)) => inline.clone(),
        _ => {
            return Err(Failure::Usage(
                "exactly one of --spec or --spec-json is required".into(),
            ))
        }
    };
    Ok(formats::spec_from_json(&text)?)
}

fn json_only(out: &OutputArgs, what: &str) -> Result<(), Failure> {
    if out.format == Format::Csv {
        return Err(Failure::Usage(format!("{what} output is JSON only")));
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, Failure> {
    json_only(&args.output, "verify")?;
    let spec = load_spec(&args.input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let samples: Vec<Complex64> = (0..args.samples)
        .map(|_| {
            let r = args.radius * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let report = PairingModel::new(&spec)?.verify_identities(&samples, args.tol)?;
    let mut summary = String::new();
    for c in &report.checks {
        summary += &format!(
            "{:<28} {:>10.3e}  {}\n",
            c.name,
            c.max_residual,
            if c.passed { "ok" } else { "FAILED" }
        );
    }
    summary += if report.all_passed() {
        "all identities hold\n"
    } else {
        "identity violated\n"
    };
    Ok(Outcome {
        data: pretty(&formats::IdentityReportJson::from(&report)),
        summary,
        success: report.all_passed(),
    })
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Outcome, Failure> {
    json_only(&args.output, "spectrum")?;
    let spec = load_spec(&args.input)?;
    let g = Complex64::new(args.g, args.g_im);
    let model = PairingModel::new(&spec)?;
    let h = model.hamiltonian(g);
    let values = eigenvalues(&h)?.sorted();
    let mut summary = format!("g = {} {:+}i, dim = {}\n", g.re, g.im, values.len());
    for e in &values {
        summary += &format!("{:>22.15e} {:>+22.15e}i\n", e.re, e.im);
    }
    let out = formats::SpectrumJson {
        g: formats::to_pair(g),
        eigenvalues: values.iter().map(|&z| formats::to_pair(z)).collect(),
        hamiltonian: args.matrix.then(|| (&h).into()),
    };
    Ok(Outcome {
        data: pretty(&out),
        summary,
        success: true,
    })
}

pub fn discriminant(args: &DiscriminantArgs) -> Result<Outcome, Failure> {
    json_only(&args.output, "discriminant")?;
    let spec = load_spec(&args.input)?;
    let model = PairingModel::new(&spec)?;
    let poly = discriminant_polynomial_with(model.pencil(), &args.reconstruction.config())?;
    let mut summary = format!("degree = {}\n", poly.degree());
    for (k, c) in poly.coeffs().iter().enumerate() {
        summary += &format!("|c{k}| = {:.6e}\n", c.norm());
    }
    Ok(Outcome {
        data: pretty(&formats::PolynomialJson::from(&poly)),
        summary,
        success: true,
    })
}

pub fn roots(args: &RootsArgs) -> Result<Outcome, Failure> {
    json_only(&args.output, "roots")?;
    let spec = load_spec(&args.input)?;
    let set = find_degeneracies(&spec, &args.classify.config())?;
    let crossings = set.crossings().count();
    let eps = set.count_kind(DegeneracyKind::Ep);
    let clusters = set.count_kind(DegeneracyKind::EpCluster);
    let mut summary = format!(
        "M={}, crossings={crossings}, EPs={eps}",
        set.total_root_count
    );
    if clusters > 0 {
        summary += &format!(", EP-clusters={clusters}");
    }
    summary += "\n";
    summary += &format!(
        "{:>24} {:>24} {:>4}  {:<22} {}\n",
        "re g", "im g", "mult", "kind", "consistent"
    );
    for d in &set.degeneracies {
        summary += &format!(
            "{:>24.15e} {:>24.15e} {:>4}  {:<22} {}\n",
            d.location.re,
            d.location.im,
            d.multiplicity,
            d.kind.map_or("-", |k| k.as_str()),
            d.evidence.consistent
        );
    }
    Ok(Outcome {
        data: formats::degeneracies_to_json(&set) + "\n",
        summary,
        success: true,
    })
}

pub fn sweep_plan(args: &SweepArgs) -> Result<SweepPlan, Failure> {
    let mut plan = match (&args.preset, args.parameter) {
        (Some(name), None) => SweepPlan::preset(name).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown preset {name:?}; expected one of {}",
                SweepPlan::PRESETS.join(", ")
            ))
        })?,
        (None, Some(p)) => {
            let spec = load_spec(&args.input)?;
            let parameter = match p {
                ParameterArg::Epsilon3 => SweepParameter::Epsilon3,
                ParameterArg::Zeta => SweepParameter::Zeta,
            };
            SweepPlan::new(spec, parameter, args.from.unwrap(), args.to.unwrap())
        }
        _ => {
            return Err(Failure::Usage(
                "give either --preset or --parameter with --from/--to".into(),
            ))
        }
    };
    if let Some(v) = args.initial_step {
        plan.initial_step = v;
    }
    if let Some(v) = args.min_step {
        plan.min_step = v;
    }
    if let Some(v) = args.max_displacement {
        plan.max_displacement = v;
    }
    if let Some(v) = args.event_tol {
        plan.event_tol = v;
    }
    plan.escape_radius = args.classify.escape_radius;
    plan.degeneracy = args.classify.config();
    plan.validate()?;
    Ok(plan)
}

pub fn sweep(args: &SweepArgs) -> Result<Outcome, Failure> {
    let plan = sweep_plan(args)?;
    let result = run_sweep(&plan)?;
    let mut summary = format!(
        "steps={}, trajectories={}, collisions={}, splits={}, entries={}, escapes={}\n",
        result.steps.len(),
        result.trajectories.len(),
        result.count(EventKind::Collision),
        result.count(EventKind::Split),
        result.count(EventKind::Entry),
        result.count(EventKind::Escape),
    );
    for e in &result.events {
        summary += &format!(
            "{:<9} {}={:.7} g={:.6}{:+.6}i mult={}\n",
            e.kind, plan.parameter, e.parameter, e.location.re, e.location.im, e.multiplicity
        );
    }
    let data = match args.output.format {
        Format::Json => pretty(&formats::SweepJson::from(&result)),
        Format::Csv => formats::sweep_to_csv(&result)?,
    };
    Ok(Outcome {
        data,
        summary,
        success: true,
    })
}

pub fn critical(args: &CriticalArgs) -> Result<Outcome, Failure> {
    json_only(&args.output, "critical")?;
    let spec = load_spec(&args.input)?;
    let cp = locate_critical_epsilon3_with(
        &spec,
        (args.lo, args.hi),
        args.tol,
        &args.classify.config(),
    )?;
    let mut summary = format!(
        "epsilon3_cr={:.10} (bracket width {:.1e})\n",
        cp.epsilon3,
        cp.width()
    );
    if let Some(d) = &cp.collision {
        summary += &format!(
            "collision at g={:.8}{:+.2e}i, multiplicity {}\n",
            d.location.re, d.location.im, d.multiplicity
        );
    }
    Ok(Outcome {
        data: pretty(&formats::CriticalJson::from(&cp)),
        summary,
        success: true,
    })
}

fn output_of(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Verify(a) => &a.output,
        Command::Spectrum(a) => &a.output,
        Command::Discriminant(a) => &a.output,
        Command::Roots(a) => &a.output,
        Command::Sweep(a) => &a.output,
        Command::Critical(a) => &a.output,
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Verify(a) => verify(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Discriminant(a) => discriminant(a),
        Command::Roots(a) => roots(a),
        Command::Sweep(a) => sweep(a),
        Command::Critical(a) => critical(a),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Without `--output` the result goes to `stdout` and the summary to
/// `stderr`; with it the summary goes to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Numerical(msg)) = &f;
            let _ = writeln!(stderr, "error: {msg}");
            return f.code();
        }
    };
    let written = match &output_of(&cli.command).output {
        Some(path) => std::fs::write(path, &outcome.data)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))
            .and_then(|_| {
                stdout
                    .write_all(outcome.summary.as_bytes())
                    .map_err(|e| e.to_string())
            }),
        None => stdout
            .write_all(outcome.data.as_bytes())
            .and_then(|_| stderr.write_all(outcome.summary.as_bytes()))
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    if outcome.success {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}
