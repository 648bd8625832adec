//! `dtorus`: generation, verification, Wigner functions, spectra, indices,
//! canonical transforms and convergence sweeps from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use dtorus::canonical::{build_metaplectic, SymplecticMap};
use dtorus::deformed::{QBranch, QOscillator};
use dtorus::io::{
    convergence_table, decomposition_table, fourier_distance, operator_table, operator_to_json, spectrum_table, transform_report_json,
    transform_report_table, wigner_table, IndexReport, StateSpec, Table,
};
use dtorus::limits::{
    fujikawa_index, limiting_spectrum, phase_basis_wigner_limit, q_oscillator_profile, weak_convergence_sweep,
    wigner_even_odd_decomposition, ConvergenceTarget, NumberProfile, PhaseProfile, ProfileCase, ProfileSign,
};
use dtorus::number_phase::{wigner_number_phase, PhasePair};
use dtorus::operators::{clock_operator, fourier_operator, shift_operator};
use dtorus::schwinger::SchwingerOperator;
use dtorus::verify::{run_suite, Suite, VerifyConfig, DEFAULT_SAMPLES};
use dtorus::wigner::wigner_function;
use dtorus::{Dimension, LatticeVector, OperatorMatrix, TorusError};

/// Largest dimension accepted on the command line.
const MAX_DIM: i64 = 1024;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verify(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Verify(_) => 1,
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<TorusError> for CliError {
    fn from(e: TorusError) -> Self {
        match e {
            TorusError::Io(_) => Self::Io(e.to_string()),
            TorusError::NonScalarPower(_) | TorusError::PhaseMismatch(_) | TorusError::BranchAmbiguity(_) => Self::Verify(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "dtorus", version, about = "Quantum mechanics on the discrete torus Z_D × Z_D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an operator matrix.
    Gen(GenArgs),
    /// Run invariant suites and print the residual table.
    Verify(VerifyArgs),
    /// Write a Wigner function on the torus or number-phase grid.
    Wigner(WignerArgs),
    /// Write the q-oscillator spectrum of a lattice pair.
    Spectrum(SpectrumArgs),
    /// Write the index of a limiting spectrum profile.
    Index(IndexArgs),
    /// Write a weak-convergence sweep over prime dimensions.
    Converge(ConvergeArgs),
    /// Build and verify the unitary realising a symplectic map.
    Transform(TransformArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OperatorKind {
    U,
    V,
    Fourier,
    Schwinger,
    /// The unitary phase operator `E_phi`.
    Phase,
    /// The number exponential `E_N`.
    NumberExp,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long = "d")]
    dim: i64,
    #[arg(long, value_enum)]
    kind: OperatorKind,
    /// Lattice vector `m1,m2` for `schwinger`.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<LatticeVector>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Schwinger,
    Qosc,
    Sl2,
    Wigner,
    Numberphase,
    Transforms,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Schwinger => Suite::Schwinger,
            SuiteArg::Qosc => Suite::QOscillator,
            SuiteArg::Sl2 => Suite::Sl2,
            SuiteArg::Wigner => Suite::Wigner,
            SuiteArg::Numberphase => Suite::NumberPhase,
            SuiteArg::Transforms => Suite::Transforms,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "d")]
    dim: i64,
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, env = "DTORUS_TOL", default_value_t = dtorus::verify::DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WignerBasis {
    Torus,
    NumberPhase,
}

#[derive(Args, Debug)]
struct WignerArgs {
    #[arg(long = "d")]
    dim: i64,
    /// `fock:n`, `phase:l`, `u:k`, `v:l`, `random:<seed>` or `file:<path>`.
    #[arg(long)]
    state: StateSpec,
    /// `torus` unless `--decompose` is given.
    #[arg(long, value_enum)]
    basis: Option<WignerBasis>,
    /// Split the action-angle function into even and odd parts.
    #[arg(long)]
    decompose: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Auto,
    Plus,
    Minus,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long = "d")]
    dim: i64,
    #[arg(long, allow_hyphen_values = true)]
    m: LatticeVector,
    #[arg(long, allow_hyphen_values = true)]
    mp: LatticeVector,
    #[arg(long, value_enum, default_value = "auto")]
    branch: BranchArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    /// `m × m′ = 1`.
    Unit,
    /// `m × m′ = (D − 1)/4`.
    Quarter,
    /// `1/γ0 ± n`.
    Linear,
    /// `C + [n]` of the q-oscillator with `m × m′ = --cross`.
    Qosc,
    /// The sine profile with `m × m′ = --cross`.
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Args, Debug)]
struct IndexArgs {
    #[arg(long = "d")]
    dim: i64,
    #[arg(long, value_enum)]
    case: CaseArg,
    #[arg(long, value_enum, default_value = "plus")]
    sign: SignArg,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    cross: i64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ObservableArg {
    /// `E_N^{m1}` against `e^{−iγN̂}`.
    En,
    /// `E_phi` against multiplication by `e^{iφ}`.
    Ephi,
    /// The phase-basis Wigner function against its continuum form.
    PhaseWigner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Gaussian,
    /// A single number state at the middle of the range.
    Delta,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    /// Comma-separated primes.
    #[arg(long)]
    primes: String,
    #[arg(long, value_enum)]
    observable: ObservableArg,
    #[arg(long, value_enum, default_value = "gaussian")]
    profile: ProfileArg,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Gaussian centre; defaults to 4 for `en` and π otherwise.
    #[arg(long)]
    center: Option<f64>,
    /// Gaussian width; defaults to 1.5 for `en` and 0.5 otherwise.
    #[arg(long)]
    width: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long = "d")]
    dim: i64,
    /// Rows of `R` as `a,b,c,d`.
    #[arg(long, allow_hyphen_values = true)]
    r: SymplecticMap,
    #[arg(long, env = "DTORUS_TOL", default_value_t = dtorus::verify::DEFAULT_TOLERANCE)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

fn dimension(d: i64) -> CliResult<Dimension> {
    if d > MAX_DIM {
        return Err(CliError::Usage(format!("dimension {d} exceeds the command-line limit {MAX_DIM}")));
    }
    let dim = Dimension::new(d)?;
    if let Some(w) = dim.prime_warning() {
        eprintln!("warning: {w}");
    }
    Ok(dim)
}

fn emit(output: &Output, default: Format, json: impl FnOnce() -> String, table: impl FnOnce() -> Table) -> CliResult<()> {
    let text = match output.format.unwrap_or(default) {
        Format::Json => json(),
        Format::Csv => table().to_csv(),
    };
    write_text(output.out.as_deref(), &text)
}

fn emit_table(output: &Output, table: Table) -> CliResult<()> {
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Json => table.to_json(),
        Format::Csv => table.to_csv(),
    };
    write_text(output.out.as_deref(), &text)
}

fn write_text(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn cmd_gen(args: GenArgs) -> CliResult<()> {
    let dim = dimension(args.dim)?;
    if args.kind != OperatorKind::Schwinger && args.m.is_some() {
        eprintln!("warning: --m is only used with --kind schwinger");
    }
    let op: OperatorMatrix = match args.kind {
        OperatorKind::U => shift_operator(dim),
        OperatorKind::V => clock_operator(dim),
        OperatorKind::Fourier => fourier_operator(dim),
        OperatorKind::Schwinger => {
            let m = args.m.ok_or_else(|| CliError::Usage("--kind schwinger requires --m m1,m2".into()))?;
            SchwingerOperator::build(dim, m).operator().clone()
        }
        OperatorKind::Phase => PhasePair::build(dim).e_phi,
        OperatorKind::NumberExp => PhasePair::build(dim).e_n,
    };
    emit(&args.output, Format::Json, || operator_to_json(&op), || operator_table(&op))
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let dim = dimension(args.dim)?;
    if !(args.tol >= 0.0) {
        return Err(CliError::Usage(format!("tolerance {} must be non-negative", args.tol)));
    }
    let config = VerifyConfig { dim, tolerance: args.tol, seed: args.seed, samples: args.samples };
    let report = run_suite(args.suite.into(), &config);
    for w in report.warnings.iter().filter(|w| Some(*w) != dim.prime_warning().as_ref()) {
        eprintln!("warning: {w}");
    }
    emit_table(&args.output, report.to_table())?;
    let failed: Vec<String> = report.failures().map(|c| format!("{}/{}", c.suite, c.name)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(format!("{} check(s) failed: {}", failed.len(), failed.join(", "))))
    }
}

fn cmd_wigner(args: WignerArgs) -> CliResult<()> {
    let dim = dimension(args.dim)?;
    let state = args.state.resolve(dim)?;
    let mut table = if args.decompose {
        if args.basis == Some(WignerBasis::Torus) {
            eprintln!("warning: --decompose uses the number-phase grid");
        }
        decomposition_table(&wigner_even_odd_decomposition(&state)?)
    } else {
        match args.basis.unwrap_or(WignerBasis::Torus) {
            WignerBasis::Torus => wigner_table(&wigner_function(&state)),
            WignerBasis::NumberPhase => wigner_table(&wigner_number_phase(&state)),
        }
    };
    table.comment(format!("state={}", args.state));
    if let Some(seed) = args.state.seed() {
        table.comment(format!("seed={seed}"));
    }
    emit_table(&args.output, table)
}

fn cmd_spectrum(args: SpectrumArgs) -> CliResult<()> {
    let dim = dimension(args.dim)?;
    let osc = match args.branch {
        BranchArg::Auto => QOscillator::build(dim, args.m, args.mp)?,
        BranchArg::Plus => QOscillator::build_on_branch(dim, args.m, args.mp, QBranch::Plus)?,
        BranchArg::Minus => QOscillator::build_on_branch(dim, args.m, args.mp, QBranch::Minus)?,
    };
    if let Some(w) = &osc.warning {
        eprintln!("warning: {w}");
    }
    emit_table(&args.output, spectrum_table(&osc))
}

fn cmd_index(args: IndexArgs) -> CliResult<()> {
    let dim = dimension(args.dim)?;
    let sign = match args.sign {
        SignArg::Plus => ProfileSign::Plus,
        SignArg::Minus => ProfileSign::Minus,
    };
    let cross = args.cross.rem_euclid(dim.di());
    let (profile, label) = match args.case {
        CaseArg::Unit => (limiting_spectrum(dim, ProfileCase::UnitCross, sign)?, "unit".to_string()),
        CaseArg::Quarter => (limiting_spectrum(dim, ProfileCase::QuarterCross, sign)?, "quarter".to_string()),
        CaseArg::Linear => (limiting_spectrum(dim, ProfileCase::Linear, sign)?, "linear".to_string()),
        CaseArg::Custom => (limiting_spectrum(dim, ProfileCase::Custom(cross), sign)?, format!("custom:{cross}")),
        CaseArg::Qosc => {
            if (dim.gamma0() * cross as f64).sin().abs() < 1e-12 {
                return Err(TorusError::DegenerateDeformation { cross, dim: dim.d() }.into());
            }
            let branch = if sign == ProfileSign::Plus { QBranch::Plus } else { QBranch::Minus };
            (q_oscillator_profile(dim, cross, branch), format!("qosc:{cross}"))
        }
    };
    let report = IndexReport::new(&profile, label, fujikawa_index(&profile));
    emit(&args.output, Format::Json, || report.to_json(), || report.to_table())
}

fn cmd_converge(args: ConvergeArgs) -> CliResult<()> {
    let primes = dtorus::io::parse_prime_list(&args.primes)?;
    if let Some(&p) = primes.iter().find(|&&p| p > MAX_DIM) {
        return Err(CliError::Usage(format!("dimension {p} exceeds the command-line limit {MAX_DIM}")));
    }
    let phase_gaussian = || PhaseProfile::Gaussian { center: args.center.unwrap_or(PI), width: args.width.unwrap_or(0.5) };
    let report = match args.observable {
        ObservableArg::En => {
            let profile = match args.profile {
                ProfileArg::Gaussian => NumberProfile::Gaussian { center: args.center.unwrap_or(4.0), width: args.width.unwrap_or(1.5) },
                ProfileArg::Delta => NumberProfile::MidpointDelta,
            };
            weak_convergence_sweep(&primes, ConvergenceTarget::NumberExponential { gamma: args.gamma, profile })?
        }
        ObservableArg::Ephi | ObservableArg::PhaseWigner => {
            let profile = match args.profile {
                ProfileArg::Gaussian => phase_gaussian(),
                ProfileArg::Delta => PhaseProfile::NumberState(0),
            };
            if args.observable == ObservableArg::Ephi {
                weak_convergence_sweep(&primes, ConvergenceTarget::PhaseOperator(profile))?
            } else {
                phase_basis_wigner_limit(&primes, profile)?
            }
        }
    };
    emit_table(&args.output, convergence_table(&report))
}

fn cmd_transform(args: TransformArgs) -> CliResult<()> {
    let dim = dimension(args.dim)?;
    let op = build_metaplectic(dim, args.r)?;
    emit(&args.output, Format::Json, || transform_report_json(&op), || transform_report_table(&op))?;
    let worst = op.unitary_residual.max(op.max_conjugation_residual());
    if worst <= args.tol {
        let fd = fourier_distance(&op);
        if fd <= args.tol {
            eprintln!("note: G equals the Fourier operator up to a global phase (distance {fd:.2e})");
        }
        Ok(())
    } else {
        Err(CliError::Verify(format!("metaplectic residual {worst:e} exceeds tolerance {:e}", args.tol)))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Wigner(a) => cmd_wigner(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Index(a) => cmd_index(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Transform(a) => cmd_transform(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
