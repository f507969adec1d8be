use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(name = "superpat", version, about = "Superpatterns, greedy automata and k-DFA walk statistics")]
pub struct Cli {
    /// Worker threads (0 = one per core). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Largest k for which S_k is enumerated.
    #[arg(long, global = true)]
    pub max_perm_k: Option<usize>,

    /// Largest number of words or states one enumeration may visit.
    #[arg(long, global = true)]
    pub max_states: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Test whether a permutation is a pattern of a word.
    Contains(ContainsArgs),
    /// List the permutations of [k] contained in a word.
    Census(CensusArgs),
    /// Test a word for the superpattern property, or search all words.
    Superpattern(SuperpatternArgs),
    /// Exhaustive F(k, n): most patterns of S_k in a word of [k]^n.
    FOracle(FOracleArgs),
    /// Build, render, walk and census weighted DFAs.
    Dfa(DfaArgs),
    /// Cheapen a greedy (or any) DFA into a k-DFA.
    Cheapen(CheapenArgs),
    /// Walk a word through a DFA.
    Walk(WalkArgs),
    /// Monte-Carlo estimate of P(v, L, eps).
    EstimateP(EstimatePArgs),
    /// Exact P(v, L, eps) by enumeration.
    ExactP(ExactPArgs),
    /// X/Y decomposition of a permutation's walk, or rank-sum statistics.
    Decompose(DecomposeArgs),
    /// Empirical frequencies of the window shortfall events.
    Concentration(ConcentrationArgs),
    /// Closed-form bounds, constants and predicates.
    Bounds(BoundsArgs),
    /// Bi-directional circular pattern containment.
    Bcp(BcpArgs),
}

#[derive(Debug, Clone, Args)]
pub struct WordInput {
    /// Word letters, 1-based.
    #[arg(long, num_args = 0.., allow_hyphen_values = false, conflicts_with = "word_file")]
    pub word: Option<Vec<u32>>,
    /// File holding a word in text format (optional `r=<int>` header line).
    #[arg(long)]
    pub word_file: Option<PathBuf>,
    /// Alphabet size; defaults to the header or the largest letter.
    #[arg(long)]
    pub r: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct PermInput {
    /// Permutation in one-line notation.
    #[arg(long, num_args = 0.., conflicts_with = "perm_file")]
    pub perm: Option<Vec<u32>>,
    #[arg(long)]
    pub perm_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ContainsArgs {
    #[command(flatten)]
    pub word: WordInput,
    #[command(flatten)]
    pub perm: PermInput,
}

#[derive(Debug, Clone, Args)]
pub struct CensusArgs {
    #[command(flatten)]
    pub word: WordInput,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SuperpatternArgs {
    #[command(flatten)]
    pub word: WordInput,
    #[arg(long)]
    pub k: usize,
    /// Search all of [r]^n for n <= n-max instead of testing one word.
    #[arg(long)]
    pub search: bool,
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct FOracleArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DfaKind {
    Greedy,
    Subset,
    TwoTrack,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct DfaSource {
    /// Which construction to use.
    #[arg(long = "dfa", value_enum)]
    pub kind: Option<DfaKind>,
    /// Read a DFA in JSON form instead.
    #[arg(long)]
    pub dfa_file: Option<PathBuf>,
    #[command(flatten)]
    pub word: WordInput,
    /// Alphabet size for subset, two-track and random DFAs.
    #[arg(long)]
    pub k: Option<usize>,
    /// State count for random DFAs.
    #[arg(long)]
    pub states: Option<usize>,
    /// Seed for random DFAs.
    #[arg(long = "dfa-seed", default_value_t = 0)]
    pub dfa_seed: u64,
    /// Cheapen the DFA before use.
    #[arg(long)]
    pub cheapened: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DfaArgs {
    #[command(subcommand)]
    pub action: DfaAction,
}

#[derive(Debug, Clone, Subcommand)]
pub enum DfaAction {
    /// Build a DFA and print it (JSON, or DOT with --format dot).
    Build(DfaBuildArgs),
    /// Build a DFA and print it as DOT.
    Dot(DfaBuildArgs),
    /// Root-walk (or start-state walk) cost of a word.
    Cost(DfaCostArgs),
    /// Distribution of root-walk costs over S_k, and the count within a budget.
    Census(DfaCensusArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DfaBuildArgs {
    #[arg(value_enum)]
    pub kind: DfaKind,
    #[command(flatten)]
    pub word: WordInput,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub states: Option<usize>,
    #[arg(long = "dfa-seed", default_value_t = 0)]
    pub dfa_seed: u64,
    /// Draw the infinite-cost self-loops too.
    #[arg(long)]
    pub include_inf: bool,
    /// Name letters a, b, c, ... in DOT output.
    #[arg(long)]
    pub alpha_letters: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DfaCostArgs {
    #[command(flatten)]
    pub dfa: DfaSource,
    /// Letters to read.
    #[arg(long, num_args = 0..)]
    pub walk: Vec<u32>,
    /// Start state label (default: root).
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct DfaCensusArgs {
    #[command(flatten)]
    pub dfa: DfaSource,
    /// Cost budget n.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CheapenArgs {
    #[command(flatten)]
    pub dfa: DfaSource,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub dfa: DfaSource,
    #[arg(long, num_args = 0..)]
    pub walk: Vec<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComparatorArg {
    /// cost < threshold
    Lt,
    /// cost <= threshold
    Le,
}

#[derive(Debug, Clone, Args)]
pub struct ExactPArgs {
    #[command(flatten)]
    pub dfa: DfaSource,
    #[arg(long = "L")]
    pub len: usize,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<i64>,
    #[arg(long, value_enum, default_value_t = ComparatorArg::Lt)]
    pub comparator: ComparatorArg,
    /// Maximize over all start states.
    #[arg(long)]
    pub max_over_states: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EstimatePArgs {
    #[command(flatten)]
    pub dfa: DfaSource,
    #[arg(long = "L")]
    pub len: usize,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<i64>,
    #[arg(long, value_enum, default_value_t = ComparatorArg::Lt)]
    pub comparator: ComparatorArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub dfa: DfaSource,
    #[command(flatten)]
    pub perm: PermInput,
    /// Sample this many permutations and report rank-sum statistics instead.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tail parameter for the rank-sum statistics.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ConcentrationArgs {
    #[command(flatten)]
    pub dfa: DfaSource,
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long)]
    pub epsilon_star: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    E,
    Two,
    Ten,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 10)]
    pub k: u64,
    #[arg(long = "L", default_value_t = 3)]
    pub len: u64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.3)]
    pub epsilon_star: f64,
    #[arg(long = "M", default_value_t = 4)]
    pub m: usize,
    /// Alphabet size for the infeasibility certificate.
    #[arg(long)]
    pub r: Option<u64>,
    /// Word length for the infeasibility and circular-pattern checks.
    #[arg(long)]
    pub n: Option<u64>,
    /// Upper bound on F(k, n); computed exhaustively when omitted and small.
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long, value_enum, default_value_t = LogBaseArg::E)]
    pub log_base: LogBaseArg,
}

#[derive(Debug, Clone, Args)]
pub struct BcpArgs {
    #[command(flatten)]
    pub word: WordInput,
    #[command(flatten)]
    pub perm: PermInput,
    /// Rotations of the word only, not of its reversal.
    #[arg(long)]
    pub one_way: bool,
    /// Count all permutations of [k] contained as circular patterns instead.
    #[arg(long)]
    pub k: Option<usize>,
}
