use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shex_core::gen::Range;
use shex_core::validate::Algorithm;

#[derive(Parser, Debug)]
#[command(name = "shex", version, about = "Shape expression validation over edge-labelled graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a graph against a schema.
    Validate(ValidateArgs),
    /// Report the classes a schema belongs to.
    Check(CheckArgs),
    /// Print the maximal multi-type typing.
    FindTypes(FindTypesArgs),
    /// Generate a random graph conforming to a schema.
    Gen(GenArgs),
    /// Time validation on generated graphs and emit CSV.
    Bench(BenchArgs),
    /// Queries on single bag expressions.
    #[command(subcommand)]
    Rbe(RbeCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Single,
    Multi,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Multi)]
    pub mode: ModeArg,
    /// refine, s-refine, rbe0-refine, flood or brute.
    #[arg(long, default_value = "refine", value_parser = parse_algorithm)]
    pub algo: Algorithm,
    /// Lines `node<TAB>type`.
    #[arg(long)]
    pub pretyping: Option<PathBuf>,
    /// List edges whose source received no type besides TOP.
    #[arg(long)]
    pub report_remaining: bool,
    /// Print the resulting typing.
    #[arg(long)]
    pub emit_typing: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub schema: PathBuf,
    /// Also decide unambiguity of every rule.
    #[arg(long)]
    pub unambiguity: bool,
    /// Also decide satisfiability of every rule.
    #[arg(long)]
    pub sat: bool,
}

#[derive(Args, Debug)]
pub struct FindTypesArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Machine)]
    pub format: Format,
}

fn parse_range(s: &str) -> Result<Range, String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let num = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("`{x}`: {e}"));
    Ok(Range::new(num(lo)?, num(hi)?))
}

#[derive(Args, Debug)]
pub struct MultiplicityArgs {
    /// Repetitions drawn for `?`.
    #[arg(long, default_value = "0..1", value_parser = parse_range)]
    pub opt: Range,
    /// Repetitions drawn for `+`.
    #[arg(long, default_value = "1..15", value_parser = parse_range)]
    pub plus: Range,
    /// Repetitions drawn for `*`.
    #[arg(long, default_value = "0..15", value_parser = parse_range)]
    pub star: Range,
    /// How far above `n` a draw for `[n;m]` may go.
    #[arg(long, default_value_t = 15)]
    pub interval_span: u64,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub schema: PathBuf,
    /// Number of non-leaf nodes.
    #[arg(long)]
    pub nodes: usize,
    /// Random seed; a fresh one is drawn and printed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Graph output; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Root pre-typing output.
    #[arg(long)]
    pub roots: Option<PathBuf>,
    #[command(flatten)]
    pub multiplicities: MultiplicityArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_algorithm)]
    pub algos: Vec<Algorithm>,
    /// Runs per cell; the first is discarded.
    #[arg(long, default_value_t = 4)]
    pub repeats: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV output; standard output when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub multiplicities: MultiplicityArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Inter1Choice {
    Auto,
    Flow,
    Enumerate,
    Ilp,
}

#[derive(Subcommand, Debug)]
pub enum RbeCommand {
    /// Is the bag in the language of the expression?
    Member {
        #[arg(long)]
        expr: String,
        /// Comma separated symbols, e.g. `a,a,b`.
        #[arg(long, allow_hyphen_values = true)]
        bag: String,
    },
    /// Is the language of the expression non-empty?
    Sat {
        #[arg(long)]
        expr: String,
    },
    /// Do a product of symbol disjunctions and an expression share a bag?
    Inter1 {
        /// Groups such as `(a | b), (a | c), d`.
        #[arg(long)]
        rbe1: String,
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value_t = Inter1Choice::Auto)]
        method: Inter1Choice,
    },
    /// Does every label sequence have at most one typed reading?
    Unambiguous {
        /// Typed symbols `label::type`.
        #[arg(long)]
        expr: String,
    },
}
