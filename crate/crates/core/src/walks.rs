//! Random permutational words and walk-cost statistics on k-DFAs.
//!
//! Monte-Carlo routines draw sample `i` from a ChaCha8 stream keyed by
//! `(seed, i)`, so results do not depend on how rayon splits the work.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::caps::{falling_factorial, Caps};
use crate::dfa::{row_is_permutation, Automaton, ExtCost};
use crate::error::{Error, Result};
use crate::patterns::{Letter, Permutation};

/// Confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.99;

/// Largest state space scanned per step by the T-statistic in
/// [`concentration_experiment`].
pub const CON2_MAX_STATES: u128 = 1 << 12;

/// An injective word over `[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PermutationalWord {
    k: usize,
    letters: Vec<Letter>,
}

impl PermutationalWord {
    pub fn new(k: usize, letters: Vec<Letter>) -> Result<Self> {
        let mut seen = vec![false; k + 1];
        for &t in &letters {
            if t == 0 || t as usize > k {
                return Err(Error::LetterOutOfRange {
                    letter: t,
                    alphabet: k as u32,
                });
            }
            if seen[t as usize] {
                return Err(Error::RepeatedLetter(t));
            }
            seen[t as usize] = true;
        }
        Ok(PermutationalWord { k, letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn into_permutation(self) -> Result<Permutation> {
        if self.letters.len() != self.k {
            return Err(Error::NotPermutation(format!("{:?}", self.letters)));
        }
        Permutation::new(self.letters)
    }
}

/// The generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform injective word of length `len` over `[k]`: the first `len`
/// entries of a partial Fisher-Yates shuffle of `[k]`.
pub fn sample_perm_word<R: Rng + ?Sized>(k: usize, len: usize, rng: &mut R) -> Result<PermutationalWord> {
    if len > k {
        return Err(Error::InvalidArgument(format!(
            "word length {len} exceeds alphabet size {k}"
        )));
    }
    let mut pool: Vec<Letter> = (1..=k as Letter).collect();
    let (head, _) = pool.partial_shuffle(rng, len);
    Ok(PermutationalWord {
        k,
        letters: head.to_vec(),
    })
}

/// `w|_E`: the letters at the 1-based positions in `indices`, in increasing
/// position order.
pub fn restriction(w: &PermutationalWord, indices: &[usize]) -> Result<PermutationalWord> {
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    let mut letters = Vec::with_capacity(idx.len());
    for i in idx {
        if i == 0 || i > w.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: w.len(),
            });
        }
        letters.push(w.letters[i - 1]);
    }
    Ok(PermutationalWord { k: w.k, letters })
}

/// How a walk cost is compared with the threshold `(1/2 - ε)kL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Comparator {
    /// `cost < threshold`, the definition of `P(v, L, ε)`.
    #[default]
    #[serde(rename = "<")]
    Less,
    /// `cost <= threshold`, the definition of a bad word.
    #[serde(rename = "<=")]
    LessEq,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Less => "<",
            Comparator::LessEq => "<=",
        })
    }
}

/// Cost threshold `(1/2 - ε) k L`.
pub fn threshold(k: usize, len: usize, epsilon: f64) -> f64 {
    (0.5 - epsilon) * k as f64 * len as f64
}

/// `cost ⋈ threshold`. Thresholds within 1e-9 (relative) of an integer are
/// treated as that integer, so decimal inputs such as ε = 0.1 compare as the
/// exact rational they denote.
pub(crate) fn cost_below(cost: ExtCost, threshold: f64, cmp: Comparator) -> bool {
    let Some(c) = cost.finite() else {
        return false;
    };
    let nearest = threshold.round();
    let thr = if (threshold - nearest).abs() <= 1e-9 * threshold.abs().max(1.0) {
        nearest
    } else {
        threshold
    };
    let c = c as f64;
    match cmp {
        Comparator::Less => c < thr,
        Comparator::LessEq => c <= thr,
    }
}

/// Checks the k-DFA property, skipping the scan for automata that hold it by
/// construction but are too large to enumerate.
pub(crate) fn ensure_k_dfa<A: Automaton>(a: &A, caps: &Caps) -> Result<()> {
    if a.known_k_dfa() {
        return Ok(());
    }
    caps.check_states("automaton states", a.state_count())?;
    let k = a.alphabet_size();
    for v in a.states() {
        if !row_is_permutation((1..=k as Letter).map(|t| a.cost(v, t)), k) {
            return Err(Error::NotKDfa(format!(
                "cost row at state {} is not a permutation of [{k}]",
                a.state_label(v)
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactP {
    /// Injective words meeting the threshold.
    pub favorable: u64,
    /// All injective words of the length, `k!/(k-L)!`.
    pub total: u64,
    pub probability: f64,
    pub threshold: f64,
    pub comparator: Comparator,
}

/// `P(v, L, ε)` by enumerating every injective word of length `len`.
pub fn exact_p<A: Automaton>(
    a: &A,
    v: A::State,
    len: usize,
    epsilon: f64,
    cmp: Comparator,
    caps: &Caps,
) -> Result<ExactP> {
    let k = a.alphabet_size();
    if !a.contains_state(v) {
        return Err(Error::UnknownState(format!("{v:?}")));
    }
    if len > k {
        return Err(Error::InvalidArgument(format!(
            "word length {len} exceeds alphabet size {k}"
        )));
    }
    if k > 127 {
        return Err(Error::Resource {
            what: "exact-P alphabet k",
            requested: k as u128,
            cap: 127,
        });
    }
    let total = falling_factorial(k, len);
    caps.check_states("injective words k!/(k-L)!", total)?;
    ensure_k_dfa(a, caps)?;
    let thr = threshold(k, len, epsilon);

    fn go<A: Automaton>(
        a: &A,
        v: A::State,
        used: u128,
        left: usize,
        acc: ExtCost,
        thr: f64,
        cmp: Comparator,
    ) -> u64 {
        if left == 0 {
            return cost_below(acc, thr, cmp) as u64;
        }
        let k = a.alphabet_size() as Letter;
        (1..=k)
            .filter(|t| used >> t & 1 == 0)
            .map(|t| go(a, a.delta(v, t), used | 1 << t, left - 1, acc + a.cost(v, t), thr, cmp))
            .sum()
    }

    let favorable = if len == 0 {
        cost_below(ExtCost::ZERO, thr, cmp) as u64
    } else {
        (1..=k as Letter)
            .into_par_iter()
            .map(|t| go(a, a.delta(v, t), 1 << t, len - 1, a.cost(v, t), thr, cmp))
            .sum()
    };
    let total = total as u64;
    Ok(ExactP {
        favorable,
        total,
        probability: favorable as f64 / total as f64,
        threshold: thr,
        comparator: cmp,
    })
}

/// `P(L, ε) = max_v P(v, L, ε)` over every state.
pub fn exact_p_max<A: Automaton>(
    a: &A,
    len: usize,
    epsilon: f64,
    cmp: Comparator,
    caps: &Caps,
) -> Result<ExactP> {
    let per_word = falling_factorial(a.alphabet_size(), len);
    caps.check_states(
        "states x injective words",
        a.state_count().saturating_mul(per_word),
    )?;
    let mut best: Option<ExactP> = None;
    for v in a.states() {
        let p = exact_p(a, v, len, epsilon, cmp, caps)?;
        if best.is_none_or(|b| p.favorable > b.favorable) {
            best = Some(p);
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("automaton has no states".into()))
}

/// Two-sided Clopper-Pearson interval at [`CONFIDENCE`].
pub fn clopper_pearson(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let alpha = 1.0 - CONFIDENCE;
    let (x, n) = (successes as f64, trials as f64);
    let low = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0)
            .expect("positive shape parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x)
            .expect("positive shape parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    let p = x / n;
    (low.clamp(0.0, p), high.clamp(p, 1.0))
}

/// Monte-Carlo estimate of `P(v, L, ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub threshold: f64,
    pub comparator: Comparator,
    pub k: usize,
    #[serde(rename = "L")]
    pub len: usize,
    pub epsilon: f64,
    pub state: String,
}

#[allow(clippy::too_many_arguments)]
pub fn estimate_p<A: Automaton>(
    a: &A,
    v: A::State,
    len: usize,
    epsilon: f64,
    samples: u64,
    seed: u64,
    cmp: Comparator,
    caps: &Caps,
) -> Result<EstimateReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    if !a.contains_state(v) {
        return Err(Error::UnknownState(format!("{v:?}")));
    }
    let k = a.alphabet_size();
    if len > k {
        return Err(Error::InvalidArgument(format!(
            "word length {len} exceeds alphabet size {k}"
        )));
    }
    ensure_k_dfa(a, caps)?;
    let thr = threshold(k, len, epsilon);
    let hits = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = sample_rng(seed, i);
            let w = sample_perm_word(k, len, &mut rng).expect("len <= k");
            let mut u = v;
            let mut acc = ExtCost::ZERO;
            for &t in w.letters() {
                acc = acc + a.cost(u, t);
                u = a.delta(u, t);
            }
            cost_below(acc, thr, cmp)
        })
        .count() as u64;
    let (ci_low, ci_high) = clopper_pearson(hits, samples);
    Ok(EstimateReport {
        estimate: hits as f64 / samples as f64,
        ci_low,
        ci_high,
        confidence: CONFIDENCE,
        samples,
        hits,
        seed,
        threshold: thr,
        comparator: cmp,
        k,
        len,
        epsilon,
        state: a.state_label(v),
    })
}

/// Per-step split of a permutation's root-walk cost: `C_j = X_j + Y_j`,
/// where `X_j` is the rank of `C_j` among the costs `S_j` of the letters not
/// yet read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub costs: Vec<u64>,
    pub ranks: Vec<u64>,
    pub slacks: Vec<u64>,
}

impl Decomposition {
    pub fn total_cost(&self) -> u64 {
        self.costs.iter().sum()
    }

    pub fn rank_sum(&self) -> u64 {
        self.ranks.iter().sum()
    }

    pub fn slack_sum(&self) -> u64 {
        self.slacks.iter().sum()
    }
}

/// X/Y decomposition of the root walk of `tau`. Only the rows visited by the
/// walk are checked to be permutations of `[k]`.
pub fn xy_decompose<A: Automaton>(a: &A, tau: &Permutation) -> Result<Decomposition> {
    let k = a.alphabet_size();
    if tau.len() != k {
        return Err(Error::AlphabetMismatch {
            word: k as u32,
            pattern: tau.len(),
        });
    }
    let mut v = a.root();
    let mut row = vec![0u64; k + 1];
    let mut used = vec![false; k + 1];
    let mut out = Decomposition {
        costs: Vec::with_capacity(k),
        ranks: Vec::with_capacity(k),
        slacks: Vec::with_capacity(k),
    };
    for &t in tau.images() {
        for s in 1..=k as Letter {
            row[s as usize] = a.cost(v, s).finite().unwrap_or(u64::MAX);
        }
        if !row_is_permutation(row[1..].iter().map(|&c| ExtCost::Finite(c)), k) {
            return Err(Error::NotKDfa(format!(
                "cost row at state {} is not a permutation of [{k}]",
                a.state_label(v)
            )));
        }
        let c = row[t as usize];
        let rank = 1 + (1..=k)
            .filter(|&s| !used[s] && row[s] < c)
            .count() as u64;
        out.costs.push(c);
        out.ranks.push(rank);
        out.slacks.push(c - rank);
        used[t as usize] = true;
        v = a.delta(v, t);
    }
    Ok(out)
}

/// `T_{v,j,x}` for every state and its minimum `T_{j,x}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TStatistic<S> {
    pub per_state: Vec<(S, u64)>,
    pub min: u64,
}

/// Counts, at each state `v`, the letters `t <= x` whose cost at `v` equals
/// the cost at `v` of some letter of `prefix`.
pub fn t_statistic<A: Automaton>(a: &A, prefix: &[Letter], x: usize, caps: &Caps) -> Result<TStatistic<A::State>> {
    let k = a.alphabet_size();
    PermutationalWord::new(k, prefix.to_vec())?;
    if x > k {
        return Err(Error::InvalidArgument(format!("x = {x} exceeds k = {k}")));
    }
    caps.check_states("automaton states", a.state_count())?;
    let per_state: Vec<(A::State, u64)> = a
        .states()
        .map(|v| {
            let hit: Vec<ExtCost> = prefix.iter().map(|&s| a.cost(v, s)).collect();
            let count = (1..=x as Letter)
                .filter(|&t| hit.contains(&a.cost(v, t)))
                .count() as u64;
            (v, count)
        })
        .collect();
    let min = per_state.iter().map(|&(_, c)| c).min().unwrap_or(0);
    Ok(TStatistic { per_state, min })
}

/// Incremental `T_{v,j,x}` over all states of a small automaton, for a fixed
/// set of `x` values.
struct TTracker<'a, A: Automaton> {
    a: &'a A,
    states: Vec<A::State>,
    xs: Vec<usize>,
    /// `hits[si][xi][c]`: letters `t <= xs[xi]` with cost `c` at state `si`.
    hits: Vec<Vec<Vec<u64>>>,
    seen: Vec<Vec<bool>>,
    t: Vec<Vec<u64>>,
}

impl<'a, A: Automaton> TTracker<'a, A> {
    fn new(a: &'a A, xs: Vec<usize>) -> Self {
        let k = a.alphabet_size();
        let states: Vec<A::State> = a.states().collect();
        let hits = states
            .iter()
            .map(|&v| {
                xs.iter()
                    .map(|&x| {
                        let mut h = vec![0u64; k + 1];
                        for t in 1..=x as Letter {
                            h[a.cost(v, t).finite().expect("k-DFA cost") as usize] += 1;
                        }
                        h
                    })
                    .collect()
            })
            .collect();
        let n = states.len();
        TTracker {
            a,
            states,
            xs,
            hits,
            seen: vec![vec![false; k + 1]; n],
            t: vec![vec![0; 0]; n],
        }
    }

    fn reset(&mut self) {
        for s in &mut self.seen {
            s.iter_mut().for_each(|b| *b = false);
        }
        let m = self.xs.len();
        for t in &mut self.t {
            t.clear();
            t.resize(m, 0);
        }
    }

    /// Adds `letter` to the prefix.
    fn push(&mut self, letter: Letter) {
        for (si, &v) in self.states.iter().enumerate() {
            let c = self.a.cost(v, letter).finite().expect("k-DFA cost") as usize;
            if !self.seen[si][c] {
                self.seen[si][c] = true;
                for xi in 0..self.xs.len() {
                    self.t[si][xi] += self.hits[si][xi][c];
                }
            }
        }
    }

    fn min(&self, xi: usize) -> u64 {
        self.t.iter().map(|t| t[xi]).min().unwrap_or(0)
    }

    fn at(&self, si: usize, xi: usize) -> u64 {
        self.t[si][xi]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationCell {
    pub m1: usize,
    pub m2: usize,
    /// Frequency of the rank-shortfall event in the window `m1 k/M < j <= (m1+1) k/M`.
    pub con1_frequency: f64,
    pub con1_ci_high: f64,
    /// Frequency of the T-shortfall event with `T` minimized over all states.
    pub con2_frequency: Option<f64>,
    /// The same event with `T` evaluated at the root only.
    pub con2_root_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub k: usize,
    pub m: usize,
    pub epsilon_star: f64,
    pub samples: u64,
    pub seed: u64,
    pub c_con1: f64,
    /// `exp(-c_con1 k)`.
    pub con1_bound: f64,
    /// Why the T-shortfall columns are absent, if they are.
    pub con2_skipped: Option<String>,
    pub cells: Vec<ConcentrationCell>,
}

/// Integers `j` with `m1 k / M < j <= (m1 + 1) k / M`.
fn window(m1: usize, k: usize, m: usize) -> std::ops::RangeInclusive<usize> {
    (m1 * k / m + 1)..=((m1 + 1) * k / m)
}

/// Empirical frequencies of the two shortfall events over uniform random
/// permutations, for every `(m1, m2) ∈ [M-1]^2`.
pub fn concentration_experiment<A: Automaton>(
    a: &A,
    m: usize,
    epsilon_star: f64,
    samples: u64,
    seed: u64,
    caps: &Caps,
) -> Result<ConcentrationReport> {
    if m < 2 {
        return Err(Error::InvalidArgument("M must be at least 2".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    ensure_k_dfa(a, caps)?;
    let k = a.alphabet_size();
    let cells: Vec<(usize, usize)> = (1..m).flat_map(|m1| (1..m).map(move |m2| (m1, m2))).collect();
    let xs: Vec<usize> = (1..m).map(|m2| m2 * k / m).collect();
    let con2_enabled = a.state_count() <= CON2_MAX_STATES;
    let root_index = if con2_enabled {
        a.states().position(|v| v == a.root())
    } else {
        None
    };
    let ncell = cells.len();

    // per cell: [con1 hits, con2 hits, con2-at-root hits]
    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || {
                (
                    vec![[0u64; 3]; ncell],
                    con2_enabled.then(|| TTracker::new(a, xs.clone())),
                )
            },
            |(mut acc, mut tracker), i| {
                let mut rng = sample_rng(seed, i);
                let tau = sample_perm_word(k, k, &mut rng)
                    .and_then(PermutationalWord::into_permutation)
                    .expect("length-k injective word");
                let d = xy_decompose(a, &tau).expect("checked k-DFA");
                for (ci, &(m1, m2)) in cells.iter().enumerate() {
                    let count = window(m1, k, m)
                        .filter(|&j| d.ranks[j - 1] * m as u64 > (m2 * (k - j + 1)) as u64)
                        .count() as f64;
                    let need = (1.0 - epsilon_star) * (1.0 - m2 as f64 / m as f64) * k as f64 / m as f64;
                    if count < need {
                        acc[ci][0] += 1;
                    }
                }
                if let Some(tr) = tracker.as_mut() {
                    tr.reset();
                    // flags[ci] = (any state-min shortfall, any root shortfall)
                    let mut flags = vec![(false, false); ncell];
                    for j in 1..=k {
                        for (ci, &(m1, m2)) in cells.iter().enumerate() {
                            if !window(m1, k, m).contains(&j) {
                                continue;
                            }
                            let need = (1.0 - epsilon_star) * (m2 as f64 / m as f64) * (j - 1) as f64;
                            let xi = m2 - 1;
                            if (tr.min(xi) as f64) < need {
                                flags[ci].0 = true;
                            }
                            if let Some(r) = root_index {
                                if (tr.at(r, xi) as f64) < need {
                                    flags[ci].1 = true;
                                }
                            }
                        }
                        tr.push(tau.images()[j - 1]);
                    }
                    for (ci, (any_min, any_root)) in flags.into_iter().enumerate() {
                        acc[ci][1] += any_min as u64;
                        acc[ci][2] += any_root as u64;
                    }
                }
                (acc, tracker)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || vec![[0u64; 3]; ncell],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    for i in 0..3 {
                        a[i] += b[i];
                    }
                }
                x
            },
        );

    let n = samples as f64;
    let c_con1 = crate::bounds::con_constants(epsilon_star, m)?.c_con1;
    Ok(ConcentrationReport {
        k,
        m,
        epsilon_star,
        samples,
        seed,
        c_con1,
        con1_bound: (-c_con1 * k as f64).exp(),
        con2_skipped: (!con2_enabled).then(|| {
            format!(
                "state space {} exceeds {CON2_MAX_STATES} states",
                a.state_count()
            )
        }),
        cells: cells
            .iter()
            .zip(counts)
            .map(|(&(m1, m2), c)| ConcentrationCell {
                m1,
                m2,
                con1_frequency: c[0] as f64 / n,
                con1_ci_high: clopper_pearson(c[0], samples).1,
                con2_frequency: con2_enabled.then(|| c[1] as f64 / n),
                con2_root_frequency: con2_enabled.then(|| c[2] as f64 / n),
            })
            .collect(),
    })
}

/// Monte-Carlo summary of `Σ X_j` over uniform random permutations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSumReport {
    pub k: usize,
    pub samples: u64,
    pub seed: u64,
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    /// `E[Σ X_j] = Σ_j (k - j + 2) / 2 = (k^2 + 3k) / 4`.
    pub exact_mean: f64,
    pub epsilon: f64,
    /// `(1/4 - ε) k^2`.
    pub tail_threshold: f64,
    /// Frequency of `Σ X_j <= tail_threshold`.
    pub tail_frequency: f64,
    pub tail_ci_high: f64,
}

pub fn rank_sum_experiment<A: Automaton>(
    a: &A,
    epsilon: f64,
    samples: u64,
    seed: u64,
    caps: &Caps,
) -> Result<RankSumReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    ensure_k_dfa(a, caps)?;
    let k = a.alphabet_size();
    let tail_threshold = (0.25 - epsilon) * (k * k) as f64;
    // sums of x and x^2 are exact integers, so the reduction is order-free
    let (sum, sum_sq, tail) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let tau = sample_perm_word(k, k, &mut rng)
                .and_then(PermutationalWord::into_permutation)
                .expect("length-k injective word");
            let x = xy_decompose(a, &tau).expect("checked k-DFA").rank_sum() as u128;
            (x, x * x, ((x as f64) <= tail_threshold) as u64)
        })
        .reduce(|| (0, 0, 0), |p, q| (p.0 + q.0, p.1 + q.1, p.2 + q.2));
    let n = samples as f64;
    let mean = sum as f64 / n;
    let var = if samples > 1 {
        (sum_sq as f64 - sum as f64 * mean) / (n - 1.0)
    } else {
        0.0
    };
    Ok(RankSumReport {
        k,
        samples,
        seed,
        mean,
        std_error: (var / n).sqrt(),
        exact_mean: (k * k + 3 * k) as f64 / 4.0,
        epsilon,
        tail_threshold,
        tail_frequency: tail as f64 / n,
        tail_ci_high: clopper_pearson(tail, samples).1,
    })
}

/// Distribution of `Σ_j q(v_{j-1}, τ(j))` on the two-track automaton, where
/// each step cost is `m q + r` with `r ∈ [m]`.
pub fn two_track_q_sums(k: usize, samples: u64, seed: u64) -> Result<BTreeMap<u64, u64>> {
    let d = crate::dfa::build_two_track_dfa(k)?;
    let m = (k / 2) as u64;
    let per_sample: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let w = sample_perm_word(k, k, &mut rng).expect("length-k injective word");
            let mut v = d.root();
            let mut q = 0;
            for &t in w.letters() {
                let c = d.cost(v, t).finite().expect("two-track costs are finite");
                q += (c - 1) / m;
                v = d.delta(v, t);
            }
            q
        })
        .collect();
    let mut out = BTreeMap::new();
    for q in per_sample {
        *out.entry(q).or_default() += 1;
    }
    Ok(out)
}
