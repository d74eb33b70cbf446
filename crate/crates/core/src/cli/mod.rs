//! Batch command-line front end.
//!
//! Every subcommand reads plain files, writes data to stdout (or
//! `--output`), and writes diagnostics to stderr. Exit codes: 0 on success,
//! 2 on invalid input, 3 when a numerical solve does not converge.

mod commands;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

pub use output::{fmt_num, json_text, round_sig};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pgm,
}

#[derive(Debug, Parser)]
#[command(
    name = "qconcept",
    version,
    about = "Hidden-measurement Bloch geometry, entanglement, interference and word-gas statistics",
    args_override_self = true
)]
pub struct Cli {
    /// JSON object whose keys supply flag values; explicit flags win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write data here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Output format (defaults depend on the subcommand)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// JSON tolerance overrides applied when validating input states
    #[arg(long, global = true, value_name = "FILE")]
    pub tolerances: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membrane collapse runs: decoherence onto the measurement simplex, a
    /// uniform break point and the detached sub-region. CSV columns
    /// run,outcome,lambda_0..lambda_{N-1}; JSON gives full traces.
    Measure(MeasureArgs),
    /// Born rule from the membrane: compares Born probabilities, sub-region
    /// volumes and Monte Carlo outcome frequencies.
    BornCheck(BornCheckArgs),
    /// Categorical-perception warping between two qubit stimuli measured in
    /// the z basis (Light/Dark diameter). CSV columns
    /// theta_a,theta_b,d_stim,d_percept,kind.
    Percept(PerceptArgs),
    /// Entangled superposition a1·ψ⊗φ + a2·φ⊗ψ and the tripartite
    /// r_A ⊕ r_B ⊕ r_corr decomposition of a two-qubit state.
    Entangle(EntangleArgs),
    /// Bell-CHSH value S = E(A,B) + E(A,B') + E(A',B) − E(A',B') for
    /// spin measurements on a two-qubit state (default: singlet).
    Chsh(ChshArgs),
    /// Marginal laws (no-signaling) for the four joint measurements, from
    /// counts (setting,outcome_a,outcome_b,count) or a model state.
    Nosignal(NosignalArgs),
    /// Bose-Einstein and Maxwell-Boltzmann fits of a text's word
    /// occupation numbers under total number and energy constraints.
    WordgasFit(WordgasArgs),
    /// Zipf exponent of a text's rank-frequency spectrum.
    Zipf(ZipfArgs),
    /// Two-entity style microstate counting under MB, BE and FD rules.
    Microstates(MicrostatesArgs),
    /// "X and Y" versus "X or Y" connective counts in a corpus.
    Connectives(ConnectivesArgs),
    /// Disjunction interference terms and over/underextension of
    /// concept-combination data (label,p1,p2,p12).
    Interference(InterferenceArgs),
    /// Superposed-Gaussian screen |ψ₁ + ψ₂|²/2 for concept-combination data.
    RenderScreen(RenderScreenArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Pure state JSON {dim, amplitudes:[[re,im],...]}
    #[arg(long)]
    pub state: PathBuf,
    /// Basis JSON {eigenstates:[state,...]}; default computational
    #[arg(long)]
    pub basis: Option<PathBuf>,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
}

#[derive(Debug, Args)]
pub struct BornCheckArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    /// Pure state JSON; default equal superposition of --dim levels
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long)]
    pub basis: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    pub runs: u64,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PerceptArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub theta_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_b: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_b: f64,
    /// CSV with columns theta_a,theta_b (one pair per row)
    #[arg(long, conflicts_with_all = ["theta_a", "theta_b"])]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EntangleArgs {
    /// Two-qubit pure state or operator-state JSON
    #[arg(long, conflicts_with_all = ["psi", "phi"])]
    pub state: Option<PathBuf>,
    #[arg(long, requires = "phi")]
    pub psi: Option<PathBuf>,
    #[arg(long, requires = "psi")]
    pub phi: Option<PathBuf>,
    /// Complex coefficient "re,im"
    #[arg(long, default_value = "0.7071067811865476,0", allow_negative_numbers = true)]
    pub a1: String,
    #[arg(long, default_value = "-0.7071067811865476,0", allow_negative_numbers = true)]
    pub a2: String,
    #[arg(long, default_value_t = 1e-10)]
    pub product_tol: f64,
}

#[derive(Debug, Args)]
pub struct Settings {
    /// Unit direction "x,y,z"
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub a_prime: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub b_prime: Option<String>,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    /// Two-qubit state JSON; default singlet
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Args)]
pub struct NosignalArgs {
    /// Counts CSV setting,outcome_a,outcome_b,count
    #[arg(long, conflicts_with = "state")]
    pub input: Option<PathBuf>,
    /// Model two-qubit state JSON; default singlet
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
    /// Standard errors allowed on empirical marginals
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
    /// Fixed marginal threshold; overrides --sigmas for counts
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Be,
    Mb,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LadderChoice {
    Linear,
    Power,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// UTF-8 text file
    #[arg(long, required_unless_present = "sample")]
    pub input: Option<PathBuf>,
    /// Use the bundled public-domain sample text
    #[arg(long, conflicts_with = "input")]
    pub sample: bool,
    /// Keep apostrophes between letters inside words
    #[arg(long)]
    pub keep_apostrophes: bool,
}

#[derive(Debug, Args)]
pub struct WordgasArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
    pub model: ModelChoice,
    #[arg(long, value_enum, default_value_t = LadderChoice::Linear)]
    pub ladder: LadderChoice,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta_e: f64,
    #[arg(long, default_value_t = 0.0)]
    pub e0: f64,
    /// Comma-separated exponents for a BE power-ladder search
    #[arg(long)]
    pub p_grid: Option<String>,
    /// Write the spectrum CSV rank,token,count,energy here
    #[arg(long)]
    pub spectrum_out: Option<PathBuf>,
    /// Write plot-ready CSV log_energy,log_count_data,log_count_be,log_count_mb here
    #[arg(long)]
    pub plot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZipfArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatsChoice {
    Mb,
    Be,
    Fd,
    All,
}

#[derive(Debug, Args)]
pub struct MicrostatesArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_enum, default_value_t = StatsChoice::All)]
    pub stats: StatsChoice,
}

#[derive(Debug, Args)]
pub struct ConnectivesArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Ordered word pair "x,y"; repeatable
    #[arg(long, required = true)]
    pub pair: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Dataset CSV label,p1,p2,p12
    #[arg(long, required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// Use the built-in synthetic 24-exemplar demonstration dataset
    #[arg(long, conflicts_with = "input")]
    pub synthetic: bool,
}

#[derive(Debug, Args)]
pub struct InterferenceArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
}

#[derive(Debug, Args)]
pub struct RenderScreenArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// Layout CSV label,x,y,width in dataset order; default 6-column grid
    #[arg(long)]
    pub layout: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    /// Screen bounds "x_min,x_max,y_min,y_max"
    #[arg(long, allow_negative_numbers = true)]
    pub bounds: Option<String>,
}

/// Flag tokens for a JSON config object: `true` becomes a bare flag, arrays
/// repeat the flag, `false` and `null` are dropped.
fn config_tokens(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let Value::Object(map) = value else {
        return Err(Error::InvalidInput("config file must hold a JSON object".into()));
    };
    let scalar = |v: &Value| -> Result<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(Error::InvalidInput(format!("unsupported config value {other}"))),
        }
    };
    let mut out = Vec::new();
    for (key, v) in &map {
        let flag = format!("--{key}");
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    out.push(flag.clone());
                    out.push(scalar(item)?);
                }
            }
            other => {
                out.push(flag);
                out.push(scalar(other)?);
            }
        }
    }
    Ok(out)
}

fn find_config(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Inserts config-supplied flags right after the subcommand name so that
/// flags given on the command line, which come later, take precedence.
fn expand_config(args: &[String]) -> Result<Vec<String>> {
    let Some(path) = find_config(args) else {
        return Ok(args.to_vec());
    };
    let tokens = config_tokens(&path)?;
    let names: Vec<String> = Cli::command_names();
    let pos = args
        .iter()
        .skip(1)
        .position(|a| names.contains(a))
        .map(|p| p + 2)
        .unwrap_or(args.len());
    let mut out = args[..pos].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&args[pos..]);
    Ok(out)
}

impl Cli {
    fn command_names() -> Vec<String> {
        use clap::CommandFactory;
        Cli::command()
            .get_subcommands()
            .map(|c| c.get_name().to_string())
            .collect()
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                2
            } else {
                let _ = write!(stdout, "{}", e.render());
                0
            };
            return code;
        }
    };
    match commands::dispatch(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
