//! The `superpat` command-line tool.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 when a resource cap
//! refuses an enumeration, 64 on a usage error.

pub mod args;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde::Serialize;

use superpat_core::bounds::{self, LogBase, LogValue};
use superpat_core::dfa::{self, DfaDocument, DotOptions};
use superpat_core::patterns::{self, Permutation, Word};
use superpat_core::walks::{self, Comparator};
use superpat_core::{Automaton, Caps, Error, ExtCost, SubsetDfa, WeightedDfa};

use args::*;
use report::{emit_report, emit_text, Envelope};

pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_resource() => EXIT_RESOURCE,
            CliError::Core(_) | CliError::Io(_) => EXIT_DOMAIN,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv`, runs the command on a dedicated thread pool and writes the
/// report to stdout. Returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("usage error");
            eprintln!("{line}");
            return EXIT_USAGE;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run_cli(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, honoring `--threads`.
pub fn run_cli(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let text = pool.install(|| run(cli))?;
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn caps_for(cli: &Cli) -> CliResult<Caps> {
    let mut caps = Caps::from_env()?;
    if let Some(k) = cli.max_perm_k {
        caps.max_perm_k = k;
    }
    if let Some(s) = cli.max_states {
        caps.max_states = s;
    }
    Ok(caps)
}

fn render<T: Serialize>(cli: &Cli, command: &str, caps: Caps, result: T) -> CliResult<String> {
    let env = Envelope::new(command, caps, result);
    Ok(match cli.format {
        Format::Text => emit_text(&env)?,
        Format::Json | Format::Dot => emit_report(&env)?,
    })
}

/// Runs the command and returns the text it prints.
pub fn run(cli: &Cli) -> CliResult<String> {
    let caps = caps_for(cli)?;
    match &cli.command {
        Command::Contains(a) => contains(cli, caps, a),
        Command::Census(a) => census(cli, caps, a),
        Command::Superpattern(a) => superpattern(cli, caps, a),
        Command::FOracle(a) => render(cli, "f-oracle", caps, patterns::f_oracle(a.k, a.n, &caps)?),
        Command::Dfa(a) => match &a.action {
            DfaAction::Build(b) => dfa_build(cli, caps, b, cli.format == Format::Dot),
            DfaAction::Dot(b) => dfa_build(cli, caps, b, true),
            DfaAction::Cost(c) => walk(cli, caps, "dfa cost", &c.dfa, &c.walk, c.start),
            DfaAction::Census(c) => dfa_census(cli, caps, c),
        },
        Command::Cheapen(a) => cheapen(cli, caps, a),
        Command::Walk(a) => walk(cli, caps, "walk", &a.dfa, &a.walk, a.start),
        Command::EstimateP(a) => estimate_p(cli, caps, a),
        Command::ExactP(a) => exact_p(cli, caps, a),
        Command::Decompose(a) => decompose(cli, caps, a),
        Command::Concentration(a) => concentration(cli, caps, a),
        Command::Bounds(a) => bounds_report(cli, caps, a),
        Command::Bcp(a) => bcp(cli, caps, a),
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_word(w: &WordInput) -> CliResult<Word> {
    let word = match (&w.word, &w.word_file) {
        (Some(letters), _) => Word::from_letters(letters.clone())?,
        (None, Some(path)) => Word::parse(&read_file(path)?)?,
        (None, None) => return Err(CliError::Usage("a word is required (--word or --word-file)".into())),
    };
    Ok(match w.r {
        Some(r) => word.with_alphabet(r)?,
        None => word,
    })
}

fn load_perm(p: &PermInput) -> CliResult<Permutation> {
    match (&p.perm, &p.perm_file) {
        (Some(images), _) => Ok(Permutation::new(images.clone())?),
        (None, Some(path)) => Ok(Permutation::parse(&read_file(path)?)?),
        (None, None) => Err(CliError::Usage("a permutation is required (--perm or --perm-file)".into())),
    }
}

#[derive(Serialize)]
struct ContainsResult {
    word: Word,
    perm: Permutation,
    contains: bool,
    /// Lexicographically least embedding.
    witness: Option<Vec<usize>>,
    /// Greedy embedding, when the word is over exactly `[k]`.
    greedy: Option<Option<Vec<usize>>>,
}

fn contains(cli: &Cli, caps: Caps, a: &ContainsArgs) -> CliResult<String> {
    let word = load_word(&a.word)?;
    let perm = load_perm(&a.perm)?;
    let witness = patterns::find_embedding(&word, &perm).map(|e| e.indices);
    let greedy = (word.alphabet_size() as usize == perm.len())
        .then(|| patterns::greedy_embed(&word, &perm))
        .transpose()?
        .map(|g| g.map(|e| e.indices));
    let result = ContainsResult {
        contains: witness.is_some(),
        word,
        perm,
        witness,
        greedy,
    };
    render(cli, "contains", caps, result)
}

#[derive(Serialize)]
struct CensusResult {
    k: usize,
    n: usize,
    count: usize,
    witness: Word,
    patterns: Vec<Permutation>,
}

fn census(cli: &Cli, caps: Caps, a: &CensusArgs) -> CliResult<String> {
    let word = load_word(&a.word)?;
    let set = patterns::pattern_set(&word, a.k, &caps)?;
    let result = CensusResult {
        k: a.k,
        n: word.len(),
        count: set.len(),
        witness: word,
        patterns: set.into_iter().collect(),
    };
    render(cli, "census", caps, result)
}

#[derive(Serialize)]
struct SuperpatternResult {
    k: usize,
    word: Word,
    is_superpattern: bool,
    count: usize,
    missing: Vec<Permutation>,
}

fn superpattern(cli: &Cli, caps: Caps, a: &SuperpatternArgs) -> CliResult<String> {
    if a.search {
        let r = a
            .word
            .r
            .ok_or_else(|| CliError::Usage("--search needs --r".into()))? as usize;
        let n_max = a
            .n_max
            .ok_or_else(|| CliError::Usage("--search needs --n-max".into()))?;
        let res = patterns::exhaustive_f_search(a.k, r, n_max, &caps)?;
        return render(cli, "superpattern search", caps, res);
    }
    let word = load_word(&a.word)?;
    caps.check_perm_k(a.k)?;
    let set = patterns::pattern_set(&word, a.k, &caps)?;
    let missing: Vec<Permutation> = Permutation::all(a.k).filter(|p| !set.contains(p)).collect();
    let result = SuperpatternResult {
        k: a.k,
        is_superpattern: missing.is_empty(),
        count: set.len(),
        word,
        missing,
    };
    render(cli, "superpattern", caps, result)
}

/// A DFA from any of the builders.
enum AnyDfa {
    Table(WeightedDfa),
    Subset(SubsetDfa),
}

macro_rules! with_dfa {
    ($dfa:expr, $a:ident => $body:expr) => {
        match $dfa {
            AnyDfa::Table($a) => $body,
            AnyDfa::Subset($a) => $body,
        }
    };
}

trait StateByLabel: Automaton {
    fn state_by_label(&self, label: Option<i64>) -> CliResult<Self::State>;
}

impl StateByLabel for WeightedDfa {
    fn state_by_label(&self, label: Option<i64>) -> CliResult<usize> {
        match label {
            None => Ok(self.root()),
            Some(l) => self
                .index_of(l)
                .ok_or_else(|| Error::UnknownState(l.to_string()).into()),
        }
    }
}

impl StateByLabel for SubsetDfa {
    fn state_by_label(&self, label: Option<i64>) -> CliResult<u64> {
        match label {
            None => Ok(self.root()),
            Some(l) if l >= 0 && self.contains_state(l as u64) => Ok(l as u64),
            Some(l) => Err(Error::UnknownState(l.to_string()).into()),
        }
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("{kind} DFA needs --{flag}")))
}

fn build_dfa(
    kind: DfaKind,
    word: &WordInput,
    k: Option<usize>,
    states: Option<usize>,
    seed: u64,
) -> CliResult<AnyDfa> {
    Ok(match kind {
        DfaKind::Greedy => AnyDfa::Table(dfa::build_greedy_dfa(&load_word(word)?)),
        DfaKind::Subset => AnyDfa::Subset(SubsetDfa::new(require(k, "k", "subset")?)?),
        DfaKind::TwoTrack => AnyDfa::Table(dfa::build_two_track_dfa(require(k, "k", "two-track")?)?),
        DfaKind::Random => AnyDfa::Table(dfa::random_k_dfa(
            require(k, "k", "random")?,
            require(states, "states", "random")?,
            seed,
        )?),
    })
}

fn load_dfa(src: &DfaSource) -> CliResult<AnyDfa> {
    let d = match (src.kind, &src.dfa_file) {
        (_, Some(path)) => AnyDfa::Table(serde_json::from_str(&read_file(path)?)?),
        (Some(kind), None) => build_dfa(kind, &src.word, src.k, src.states, src.dfa_seed)?,
        (None, None) => return Err(CliError::Usage("a DFA is required (--dfa or --dfa-file)".into())),
    };
    Ok(match d {
        AnyDfa::Table(t) if src.cheapened => AnyDfa::Table(dfa::cheapen(&t)?),
        other => other,
    })
}

fn table_of(d: AnyDfa) -> CliResult<WeightedDfa> {
    Ok(match d {
        AnyDfa::Table(t) => t,
        AnyDfa::Subset(s) => s.to_table()?,
    })
}

#[derive(Serialize)]
struct DfaBuildResult {
    is_k_dfa: bool,
    dfa: DfaDocument,
}

fn dfa_build(cli: &Cli, caps: Caps, b: &DfaBuildArgs, dot: bool) -> CliResult<String> {
    let table = table_of(build_dfa(b.kind, &b.word, b.k, b.states, b.dfa_seed)?)?;
    if dot {
        return Ok(table.to_dot(&DotOptions {
            include_infinite_loops: b.include_inf,
            alphabetic: b.alpha_letters,
        }));
    }
    let result = DfaBuildResult {
        is_k_dfa: dfa::is_k_dfa(&table),
        dfa: DfaDocument::from(&table),
    };
    render(cli, "dfa build", caps, result)
}

#[derive(Serialize)]
struct WalkResult {
    walk: Vec<u32>,
    states: Vec<String>,
    step_costs: Vec<ExtCost>,
    total_cost: ExtCost,
}

fn walk(cli: &Cli, caps: Caps, command: &str, src: &DfaSource, w: &[u32], start: Option<i64>) -> CliResult<String> {
    let d = load_dfa(src)?;
    let result = with_dfa!(&d, a => {
        let v = a.state_by_label(start)?;
        let tr = dfa::walk_cost(a, v, w)?;
        WalkResult {
            walk: w.to_vec(),
            states: tr.states.iter().map(|&s| a.state_label(s)).collect(),
            step_costs: tr.step_costs,
            total_cost: tr.total_cost,
        }
    });
    render(cli, command, caps, result)
}

#[derive(Serialize)]
struct CensusEntry {
    cost: ExtCost,
    count: u64,
}

#[derive(Serialize)]
struct DfaCensusResult {
    k: usize,
    total: u64,
    distribution: Vec<CensusEntry>,
    budget: Option<u64>,
    count: Option<u64>,
}

fn dfa_census(cli: &Cli, caps: Caps, c: &DfaCensusArgs) -> CliResult<String> {
    let d = load_dfa(&c.dfa)?;
    let (k, census) = with_dfa!(&d, a => (a.alphabet_size(), dfa::cost_census(a, &caps)?));
    let result = DfaCensusResult {
        k,
        total: census.values().sum(),
        budget: c.budget,
        count: c.budget.map(|n| dfa::count_at_most(&census, n)),
        distribution: census
            .into_iter()
            .map(|(cost, count)| CensusEntry { cost, count })
            .collect(),
    };
    render(cli, "dfa census", caps, result)
}

fn cheapen(cli: &Cli, caps: Caps, a: &CheapenArgs) -> CliResult<String> {
    let table = table_of(load_dfa(&a.dfa)?)?;
    let cheap = dfa::cheapen(&table)?;
    let result = DfaBuildResult {
        is_k_dfa: dfa::is_k_dfa(&cheap),
        dfa: DfaDocument::from(&cheap),
    };
    render(cli, "cheapen", caps, result)
}

fn comparator(c: ComparatorArg) -> Comparator {
    match c {
        ComparatorArg::Lt => Comparator::Less,
        ComparatorArg::Le => Comparator::LessEq,
    }
}

#[derive(Serialize)]
struct ExactPResult {
    k: usize,
    #[serde(rename = "L")]
    len: usize,
    epsilon: f64,
    state: Option<String>,
    max_over_states: bool,
    #[serde(flatten)]
    p: walks::ExactP,
}

fn exact_p(cli: &Cli, caps: Caps, a: &ExactPArgs) -> CliResult<String> {
    let d = load_dfa(&a.dfa)?;
    let cmp = comparator(a.comparator);
    let result = with_dfa!(&d, dfa => {
        let (p, state) = if a.max_over_states {
            (walks::exact_p_max(dfa, a.len, a.epsilon, cmp, &caps)?, None)
        } else {
            let v = dfa.state_by_label(a.start)?;
            (walks::exact_p(dfa, v, a.len, a.epsilon, cmp, &caps)?, Some(dfa.state_label(v)))
        };
        ExactPResult {
            k: dfa.alphabet_size(),
            len: a.len,
            epsilon: a.epsilon,
            state,
            max_over_states: a.max_over_states,
            p,
        }
    });
    render(cli, "exact-p", caps, result)
}

fn estimate_p(cli: &Cli, caps: Caps, a: &EstimatePArgs) -> CliResult<String> {
    let d = load_dfa(&a.dfa)?;
    let cmp = comparator(a.comparator);
    let report = with_dfa!(&d, dfa => {
        let v = dfa.state_by_label(a.start)?;
        walks::estimate_p(dfa, v, a.len, a.epsilon, a.samples, a.seed, cmp, &caps)?
    });
    render(cli, "estimate-p", caps, report)
}

#[derive(Serialize)]
struct DecomposeResult {
    perm: Permutation,
    total_cost: u64,
    rank_sum: u64,
    slack_sum: u64,
    #[serde(flatten)]
    decomposition: walks::Decomposition,
}

fn decompose(cli: &Cli, caps: Caps, a: &DecomposeArgs) -> CliResult<String> {
    let d = load_dfa(&a.dfa)?;
    if let Some(samples) = a.samples {
        let report = with_dfa!(&d, dfa => walks::rank_sum_experiment(dfa, a.epsilon, samples, a.seed, &caps)?);
        return render(cli, "decompose", caps, report);
    }
    let perm = load_perm(&a.perm)?;
    let dec = with_dfa!(&d, dfa => walks::xy_decompose(dfa, &perm)?);
    let result = DecomposeResult {
        perm,
        total_cost: dec.total_cost(),
        rank_sum: dec.rank_sum(),
        slack_sum: dec.slack_sum(),
        decomposition: dec,
    };
    render(cli, "decompose", caps, result)
}

fn concentration(cli: &Cli, caps: Caps, a: &ConcentrationArgs) -> CliResult<String> {
    let d = load_dfa(&a.dfa)?;
    let report = with_dfa!(&d, dfa => walks::concentration_experiment(dfa, a.m, a.epsilon_star, a.samples, a.seed, &caps)?);
    render(cli, "concentration", caps, report)
}

#[derive(Serialize)]
struct BoundsResult {
    k: u64,
    #[serde(rename = "L")]
    len: u64,
    epsilon: f64,
    ln_for_l_bound: f64,
    ln_birthday_ratio: f64,
    ln_birthday_bound: Option<f64>,
    ln_hoeffding_x_bound: f64,
    theorem: bounds::TheoremConstants,
    con: bounds::ConConstants,
    m: usize,
    log_base: LogBase,
    loworder_hypothesis: bool,
    certificate: Option<Certificate>,
}

#[derive(Serialize)]
struct Certificate {
    r: Option<u64>,
    n: u64,
    f_upper: f64,
    f_source: &'static str,
    /// `C(r, k) F < k!`: no word of `[r]^n` is a k-superpattern.
    infeasible: Option<bool>,
    /// `k! <= 2 n F`: necessary for a circular superpattern of length n.
    gupta_check: bool,
}

fn bounds_report(cli: &Cli, caps: Caps, a: &BoundsArgs) -> CliResult<String> {
    let base = match a.log_base {
        LogBaseArg::E => LogBase::Natural,
        LogBaseArg::Two => LogBase::Two,
        LogBaseArg::Ten => LogBase::Ten,
    };
    let alpha = a.len as f64 / a.k as f64;
    let certificate = match a.n {
        None => None,
        Some(n) => {
            let (f, source) = match a.f {
                Some(f) => (f, "given"),
                None => {
                    let o = patterns::f_oracle(a.k as usize, n as usize, &caps)?;
                    (o.max_count as f64, "f-oracle")
                }
            };
            let log_f = LogValue::from_value(f)?;
            Some(Certificate {
                r: a.r,
                n,
                f_upper: f,
                f_source: source,
                infeasible: a.r.map(|r| bounds::infeasibility(a.k, r, log_f)),
                gupta_check: bounds::gupta_check(a.k, n, log_f),
            })
        }
    };
    let result = BoundsResult {
        k: a.k,
        len: a.len,
        epsilon: a.epsilon,
        ln_for_l_bound: bounds::for_l_bound(a.k, a.len, a.epsilon)?.ln(),
        ln_birthday_ratio: bounds::birthday_ratio(a.k, a.len)?.ln(),
        ln_birthday_bound: bounds::birthday_bound(a.k, alpha).ok().map(LogValue::ln),
        ln_hoeffding_x_bound: bounds::hoeffding_x_bound(a.k, a.epsilon)?.ln(),
        theorem: bounds::theorem_constants(a.epsilon_star)?,
        con: bounds::con_constants(a.epsilon_star, a.m)?,
        m: a.m,
        log_base: base,
        loworder_hypothesis: bounds::loworder_predicate(a.k, a.epsilon, base)?,
        certificate,
    };
    render(cli, "bounds", caps, result)
}

#[derive(Serialize)]
struct BcpResult {
    word: Word,
    bidirectional: bool,
    perm: Option<Permutation>,
    contains: Option<bool>,
    k: Option<usize>,
    count: Option<usize>,
    total: Option<u128>,
}

fn bcp(cli: &Cli, caps: Caps, a: &BcpArgs) -> CliResult<String> {
    let word = load_word(&a.word)?;
    let bidirectional = !a.one_way;
    let result = if let Some(k) = a.k {
        caps.check_perm_k(k)?;
        let count = Permutation::all(k)
            .filter(|p| patterns::circular_contains(&word, p, bidirectional))
            .count();
        BcpResult {
            word,
            bidirectional,
            perm: None,
            contains: None,
            k: Some(k),
            count: Some(count),
            total: Some((1..=k as u128).product()),
        }
    } else {
        let perm = load_perm(&a.perm)?;
        let contains = patterns::circular_contains(&word, &perm, bidirectional);
        BcpResult {
            word,
            bidirectional,
            perm: Some(perm),
            contains: Some(contains),
            k: None,
            count: None,
            total: None,
        }
    };
    render(cli, "bcp", caps, result)
}
