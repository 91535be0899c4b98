//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use seplab_core::Caps;

use crate::render::Format;
use crate::{caps, cmd_comm, cmd_extremal, cmd_games};

#[derive(Debug, Parser)]
#[command(name = "seplab", version, about = "Separation automata for parity games: a desk-scale laboratory")]
pub struct Cli {
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output never depends on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Raise or lower a cap, `name=value[,name=value...]`; applied after SEPLAB_CAPS.
    #[arg(long = "cap", global = true)]
    pub caps: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one graph, or count classes over every graph on [n].
    Classify(ClassifyArgs),
    /// Check that an automaton separates, in time t or eventually.
    Verify(VerifyArgs),
    /// Refute automata with at most n states at d = 2.
    Refute(RefuteArgs),
    /// Solve a parity arena, or compare both solvers on every small arena.
    Solve(SolveArgs),
    /// Search for fooling words, or re-check a fooling certificate.
    Fool(FoolArgs),
    /// Shifting, the border condition and the product bounds.
    #[command(subcommand)]
    Extremal(ExtremalCommand),
    /// Disjointness tuples, box covers and thresholds.
    #[command(subcommand)]
    Comm(CommCommand),
    /// Time bounds of separating automata against q * n.
    Bounds(BoundsArgs),
    /// Derived parameters and the communication-bound arithmetic.
    Params(ParamsArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, conflicts_with_all = ["n", "d"])]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Time bound; omit for eventual acceptance.
    #[arg(long)]
    pub time: Option<u32>,
    /// Only walks from this node count.
    #[arg(long)]
    pub initial: Option<u32>,
}

#[derive(Debug, Args)]
pub struct RefuteArgs {
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pub automaton: Option<PathBuf>,
    /// Every canonical automaton with at most --states states.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 2)]
    pub states: u32,
    #[arg(long)]
    pub n: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Via {
    Separator,
    Direct,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
    pub arena: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Via::Separator)]
    pub via: Via,
    /// Separator to use; defaults to the n + 2 state counter.
    #[arg(long)]
    pub automaton: Option<PathBuf>,
    /// Skip checking that the separator separates.
    #[arg(long)]
    pub trust: bool,
    /// Compare both solvers on every arena with at most --n nodes, d = 2.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct FoolArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    #[arg(long, required_unless_present = "check")]
    pub n: Option<u64>,
    #[arg(long, required_unless_present = "check")]
    pub t: Option<u64>,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Block-wise search over disjoint tuples instead of the general search.
    #[arg(long, conflicts_with = "check")]
    pub structured: bool,
    /// Re-check a pair or certificate written by an earlier run.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ExtremalCommand {
    /// Apply S_ij to a family, or run the seeded shifting suite.
    Shift(ShiftArgs),
    /// Compress a pair of families until the first is left-compressed.
    Compress(CompressArgs),
    /// Border condition against farness, over every ideal.
    FiCheck(GridArgs),
    /// The closed-form product bound and its rational bracket.
    Bound(PointArgs),
    /// Brute-force maximum product against the closed-form bound.
    Maxprod(GridArgs),
    /// Probability suite: the product lemma, Chernoff tails and the Topsoe bound.
    Prob(GridArgs),
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    #[arg(long, conflicts_with = "trials")]
    pub family: Option<PathBuf>,
    #[arg(long, requires = "family")]
    pub i: Option<u32>,
    #[arg(long, requires = "family")]
    pub j: Option<u32>,
    /// Number of random (F, G, t, i < j) trials.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 6)]
    pub n: u32,
    #[arg(long, default_value_t = 3)]
    pub a: u32,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub g: PathBuf,
}

/// Every point with `n' <= n`, `a' <= a`, `t < a' < n'`, or one `t` only.
#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub t: Option<u32>,
    /// Only the point (n, a) itself, not the grid below it.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub t: u32,
}

#[derive(Debug, Subcommand)]
pub enum CommCommand {
    /// List D (disjoint tuples) or I (close tuples).
    Gen(GenArgs),
    /// Check a box-cover certificate.
    Check(CheckArgs),
    /// Exact minimum cover of D by I-avoiding boxes.
    Mincover(InstanceArgs),
    /// The lower-bound formula and whether it applies.
    Bound(InstanceArgs),
    /// The quantity A^{k,n}_{a,t} by brute force.
    #[command(name = "A")]
    A(AArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    D,
    I,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = Which::D)]
    pub which: Which,
    #[arg(long, default_value = "1/2")]
    pub gamma: String,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub cert: PathBuf,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long, default_value = "1/2")]
    pub gamma: String,
}

#[derive(Debug, Args)]
pub struct AArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub t: u32,
    #[arg(long)]
    pub k: u32,
    /// Also compute every k' up to this value and check the recursion.
    #[arg(long)]
    pub k_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, conflicts_with = "all")]
    pub automaton: Option<PathBuf>,
    /// Every canonical automaton with at most --states states, plus the counter separator.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 3)]
    pub states: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long, required_unless_present = "grid")]
    pub n: Option<u64>,
    #[arg(long, required_unless_present = "grid")]
    pub t: Option<u64>,
    /// n in {10^4, 10^5, 10^6}, t in {8n, 16n, n^(5/4)/10^3}.
    #[arg(long)]
    pub grid: bool,
}

/// What a subcommand produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    /// Exit 0 when `pass`, 1 otherwise.
    pub fn verdict(pass: bool, stdout: String) -> Self {
        Outcome { code: if pass { 0 } else { 1 }, stdout, stderr: String::new() }
    }
}

pub struct Ctx {
    pub caps: Caps,
    pub jobs: usize,
    pub seed: u64,
    pub format: Format,
}

impl Ctx {
    pub fn unsupported(&self, what: &str) -> anyhow::Error {
        anyhow::anyhow!("{what} does not support --format {:?}", self.format)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

/// Parses `args` (program name first) and runs the command. Usage errors,
/// cap refusals and bad input all give exit code 2.
pub fn run<I, T>(args: I, env_caps: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli, env_caps) {
        Ok(out) => out,
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e:#}\n") },
    }
}

fn execute(cli: &Cli, env_caps: Option<&str>) -> Result<Outcome> {
    let jobs = match cli.jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let ctx = Ctx { caps: caps::resolve(env_caps, &cli.caps)?, jobs, seed: cli.seed, format: cli.format };
    match &cli.command {
        Command::Classify(a) => cmd_games::classify(a, &ctx),
        Command::Verify(a) => cmd_games::verify(a, &ctx),
        Command::Refute(a) => cmd_games::refute(a, &ctx),
        Command::Solve(a) => cmd_games::solve(a, &ctx),
        Command::Fool(a) => cmd_games::fool(a, &ctx),
        Command::Bounds(a) => cmd_games::bounds(a, &ctx),
        Command::Params(a) => cmd_games::params(a, &ctx),
        Command::Extremal(c) => cmd_extremal::run(c, &ctx),
        Command::Comm(c) => cmd_comm::run(c, &ctx),
    }
}
