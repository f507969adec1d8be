//! Weighted DFAs with extended costs.
//!
//! Every automaton here is total on `V x [k]`: each (state, letter) pair has a
//! successor and a cost in `{0, 1, 2, ...} ∪ {∞}`. Walk costs add step costs
//! with `∞` absorbing. A *k-DFA* is one whose cost row at every state is a
//! permutation of `[k]`.
//!
//! Tabular automata are [`WeightedDfa`]; the subset automaton, whose state
//! space is `2^k`, is [`SubsetDfa`] and computes rows on demand.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::hash::Hash;
use std::ops::Add;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::patterns::{Letter, Word};

/// A cost in `{0, 1, 2, ...} ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtCost {
    Finite(u64),
    Infinite,
}

impl ExtCost {
    pub const ZERO: ExtCost = ExtCost::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtCost::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtCost::Finite(c) => Some(c),
            ExtCost::Infinite => None,
        }
    }

    /// `None` only on finite overflow.
    pub fn checked_add(self, other: ExtCost) -> Option<ExtCost> {
        match (self, other) {
            (ExtCost::Finite(a), ExtCost::Finite(b)) => a.checked_add(b).map(ExtCost::Finite),
            _ => Some(ExtCost::Infinite),
        }
    }
}

impl Add for ExtCost {
    type Output = ExtCost;

    fn add(self, other: ExtCost) -> ExtCost {
        self.checked_add(other).expect("finite walk cost overflowed u64")
    }
}

impl fmt::Display for ExtCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtCost::Finite(c) => write!(f, "{c}"),
            ExtCost::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtCost {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtCost::Finite(c) => s.serialize_u64(*c),
            ExtCost::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtCost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(c) => Ok(ExtCost::Finite(c)),
            Repr::Str(s) if s == "inf" => Ok(ExtCost::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a cost or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// A total weighted automaton over `[k]`.
///
/// `delta` and `cost` may assume `v` is a state and `t ∈ [k]`; the checked
/// entry point is [`walk_cost`].
pub trait Automaton: Sync {
    type State: Copy + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn alphabet_size(&self) -> usize;
    fn root(&self) -> Self::State;
    fn contains_state(&self, v: Self::State) -> bool;
    fn delta(&self, v: Self::State, t: Letter) -> Self::State;
    fn cost(&self, v: Self::State, t: Letter) -> ExtCost;
    fn state_count(&self) -> u128;
    fn states(&self) -> Box<dyn Iterator<Item = Self::State> + '_>;
    /// True when every cost row is a permutation of `[k]` by construction.
    fn known_k_dfa(&self) -> bool {
        false
    }
    /// Display name of a state.
    fn state_label(&self, v: Self::State) -> String {
        format!("{v:?}")
    }
}

/// The walk `v_0, ..., v_L` induced by a word, with its step costs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkTrace<S> {
    pub states: Vec<S>,
    pub step_costs: Vec<ExtCost>,
    pub total_cost: ExtCost,
}

impl<S: Copy> WalkTrace<S> {
    pub fn end(&self) -> S {
        *self.states.last().expect("a walk has at least its start state")
    }
}

/// Walks `w` from `start`, accumulating cost.
pub fn walk_cost<A: Automaton>(a: &A, start: A::State, w: &[Letter]) -> Result<WalkTrace<A::State>> {
    if !a.contains_state(start) {
        return Err(Error::UnknownState(format!("{start:?}")));
    }
    let k = a.alphabet_size();
    let mut states = Vec::with_capacity(w.len() + 1);
    let mut step_costs = Vec::with_capacity(w.len());
    let mut total = ExtCost::ZERO;
    let mut v = start;
    states.push(v);
    for &t in w {
        if t == 0 || t as usize > k {
            return Err(Error::LetterOutOfRange {
                letter: t,
                alphabet: k as u32,
            });
        }
        let c = a.cost(v, t);
        total = total
            .checked_add(c)
            .ok_or_else(|| Error::InvalidArgument("walk cost overflowed u64".into()))?;
        step_costs.push(c);
        v = a.delta(v, t);
        states.push(v);
    }
    Ok(WalkTrace {
        states,
        step_costs,
        total_cost: total,
    })
}

/// Whether the cost row `row[t - 1]` is exactly a permutation of `[k]`.
pub(crate) fn row_is_permutation(row: impl IntoIterator<Item = ExtCost>, k: usize) -> bool {
    let mut seen = vec![false; k + 1];
    let mut n = 0;
    for c in row {
        n += 1;
        match c.finite() {
            Some(c) if c >= 1 && (c as usize) <= k && !seen[c as usize] => seen[c as usize] = true,
            _ => return false,
        }
    }
    n == k
}

/// Every state's cost row is a permutation of `[k]`.
pub fn is_k_dfa<A: Automaton>(a: &A) -> bool {
    let k = a.alphabet_size();
    a.states()
        .all(|v| row_is_permutation((1..=k as Letter).map(|t| a.cost(v, t)), k))
}

/// A tabular weighted DFA with states `0..N` and display labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDfa {
    k: usize,
    root: usize,
    labels: Vec<i64>,
    delta: Vec<usize>,
    cost: Vec<ExtCost>,
}

impl WeightedDfa {
    /// `delta[v * k + (t - 1)]` and `cost[v * k + (t - 1)]` for state index `v`.
    pub fn new(
        k: usize,
        root: usize,
        labels: Vec<i64>,
        delta: Vec<usize>,
        cost: Vec<ExtCost>,
    ) -> Result<Self> {
        let n = labels.len();
        if root >= n {
            return Err(Error::UnknownState(root.to_string()));
        }
        if delta.len() != n * k || cost.len() != n * k {
            return Err(Error::InvalidArgument(format!(
                "transition table must have {} entries, got delta={} cost={}",
                n * k,
                delta.len(),
                cost.len()
            )));
        }
        if let Some(&bad) = delta.iter().find(|&&u| u >= n) {
            return Err(Error::UnknownState(bad.to_string()));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate state labels".into()));
        }
        Ok(WeightedDfa {
            k,
            root,
            labels,
            delta,
            cost,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> i64 {
        self.labels[v]
    }

    /// State index carrying `label`.
    pub fn index_of(&self, label: i64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn row(&self, v: usize) -> &[ExtCost] {
        &self.cost[v * self.k..(v + 1) * self.k]
    }

    /// Edges other than the `∞` self-loops, as `(from, letter, to, cost)`
    /// labels, ordered by state then letter.
    pub fn finite_edges(&self) -> Vec<(i64, Letter, i64, u64)> {
        let mut out = Vec::new();
        for v in 0..self.len() {
            for t in 1..=self.k as Letter {
                if let ExtCost::Finite(c) = self.cost(v, t) {
                    out.push((self.labels[v], t, self.labels[self.delta(v, t)], c));
                }
            }
        }
        out
    }

    /// Graphviz rendering; edge labels read `t (cost)`.
    pub fn to_dot(&self, opts: &DotOptions) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph dfa {{");
        let _ = writeln!(s, "  rankdir=LR;");
        let _ = writeln!(s, "  node [shape=circle];");
        let _ = writeln!(s, "  start [shape=point];");
        for (v, l) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "  \"{l}\";");
            if v == self.root {
                let _ = writeln!(s, "  start -> \"{l}\";");
            }
        }
        for v in 0..self.len() {
            for t in 1..=self.k as Letter {
                let c = self.cost(v, t);
                let u = self.delta(v, t);
                if !c.is_finite() && u == v && !opts.include_infinite_loops {
                    continue;
                }
                let letter = opts.letter_name(t);
                let _ = writeln!(
                    s,
                    "  \"{}\" -> \"{}\" [label=\"{} ({})\"];",
                    self.labels[v],
                    self.labels[u],
                    letter,
                    match c {
                        ExtCost::Finite(c) => c.to_string(),
                        ExtCost::Infinite => "∞".to_string(),
                    }
                );
            }
        }
        s.push_str("}\n");
        s
    }

    /// Copies any automaton with at most `caps.max_states` states into a table.
    pub fn from_automaton<A: Automaton>(a: &A, caps: &Caps, label: impl Fn(A::State) -> i64) -> Result<Self> {
        caps.check_states("automaton states", a.state_count())?;
        let states: Vec<A::State> = a.states().collect();
        let index: std::collections::HashMap<A::State, usize> =
            states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let k = a.alphabet_size();
        let mut delta = Vec::with_capacity(states.len() * k);
        let mut cost = Vec::with_capacity(states.len() * k);
        for &v in &states {
            for t in 1..=k as Letter {
                delta.push(index[&a.delta(v, t)]);
                cost.push(a.cost(v, t));
            }
        }
        WeightedDfa::new(
            k,
            index[&a.root()],
            states.iter().map(|&s| label(s)).collect(),
            delta,
            cost,
        )
    }
}

impl Automaton for WeightedDfa {
    type State = usize;

    fn alphabet_size(&self) -> usize {
        self.k
    }

    fn root(&self) -> usize {
        self.root
    }

    fn contains_state(&self, v: usize) -> bool {
        v < self.labels.len()
    }

    #[inline]
    fn delta(&self, v: usize, t: Letter) -> usize {
        self.delta[v * self.k + t as usize - 1]
    }

    #[inline]
    fn cost(&self, v: usize, t: Letter) -> ExtCost {
        self.cost[v * self.k + t as usize - 1]
    }

    fn state_count(&self) -> u128 {
        self.labels.len() as u128
    }

    fn states(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        Box::new(0..self.labels.len())
    }

    fn state_label(&self, v: usize) -> String {
        self.labels[v].to_string()
    }
}

#[derive(Debug, Clone, Default)]
pub struct DotOptions {
    /// Also draw the `∞` self-loops, which are omitted by default.
    pub include_infinite_loops: bool,
    /// Name letters `a, b, c, ...` instead of `1, 2, 3, ...`.
    pub alphabetic: bool,
}

impl DotOptions {
    fn letter_name(&self, t: Letter) -> String {
        if self.alphabetic && t <= 26 {
            ((b'a' + (t - 1) as u8) as char).to_string()
        } else {
            t.to_string()
        }
    }
}

/// Serialized form: `rows` lists `state, letter -> (next, cost)` by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaDocument {
    pub k: usize,
    pub root: i64,
    pub states: Vec<i64>,
    pub rows: Vec<DfaRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaRow {
    pub state: i64,
    pub letter: Letter,
    pub next: i64,
    pub cost: ExtCost,
}

impl From<&WeightedDfa> for DfaDocument {
    fn from(d: &WeightedDfa) -> Self {
        let mut rows = Vec::with_capacity(d.len() * d.k);
        for v in 0..d.len() {
            for t in 1..=d.k as Letter {
                rows.push(DfaRow {
                    state: d.labels[v],
                    letter: t,
                    next: d.labels[d.delta(v, t)],
                    cost: d.cost(v, t),
                });
            }
        }
        DfaDocument {
            k: d.k,
            root: d.labels[d.root],
            states: d.labels.clone(),
            rows,
        }
    }
}

impl TryFrom<DfaDocument> for WeightedDfa {
    type Error = Error;

    fn try_from(doc: DfaDocument) -> Result<Self> {
        let n = doc.states.len();
        let k = doc.k;
        let index = |label: i64| {
            doc.states
                .iter()
                .position(|&l| l == label)
                .ok_or_else(|| Error::UnknownState(label.to_string()))
        };
        let mut delta = vec![None; n * k];
        let mut cost = vec![ExtCost::Infinite; n * k];
        for row in &doc.rows {
            if row.letter == 0 || row.letter as usize > k {
                return Err(Error::LetterOutOfRange {
                    letter: row.letter,
                    alphabet: k as u32,
                });
            }
            let slot = index(row.state)? * k + row.letter as usize - 1;
            if delta[slot].is_some() {
                return Err(Error::Parse(format!(
                    "duplicate row for state {} letter {}",
                    row.state, row.letter
                )));
            }
            delta[slot] = Some(index(row.next)?);
            cost[slot] = row.cost;
        }
        let delta = delta
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| {
                    Error::Parse(format!(
                        "missing row for state {} letter {}",
                        doc.states[i / k],
                        i % k + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        WeightedDfa::new(k, index(doc.root)?, doc.states.clone(), delta, cost)
    }
}

impl Serialize for WeightedDfa {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DfaDocument::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedDfa {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DfaDocument::deserialize(d)?;
        WeightedDfa::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// The greedy automaton of a word `sigma` over `[k]`.
///
/// States are the positions `0..=n` (root 0). Reading `t` at `v` jumps to the
/// next occurrence `u > v` of `t` at cost `u - v`, or stays at `v` at cost
/// `∞` if `t` does not occur after `v`.
#[allow(clippy::needless_range_loop)]
pub fn build_greedy_dfa(sigma: &Word) -> WeightedDfa {
    let k = sigma.alphabet_size() as usize;
    let letters = sigma.letters();
    let n = letters.len();
    let mut delta = vec![0; (n + 1) * k];
    let mut cost = vec![ExtCost::Infinite; (n + 1) * k];
    // next occurrence after v, updated right to left
    let mut next: Vec<Option<usize>> = vec![None; k + 1];
    for v in (0..=n).rev() {
        for t in 1..=k {
            let slot = v * k + t - 1;
            match next[t] {
                Some(u) => {
                    delta[slot] = u;
                    cost[slot] = ExtCost::Finite((u - v) as u64);
                }
                None => delta[slot] = v,
            }
        }
        if v > 0 {
            next[letters[v - 1] as usize] = Some(v);
        }
    }
    WeightedDfa {
        k,
        root: 0,
        labels: (0..=n as i64).collect(),
        delta,
        cost,
    }
}

/// The lexicographically least permutation `pi` of `[k]` with
/// `pi(t) <= caps[t - 1]`, if one exists.
fn least_dominating_permutation(caps: &[ExtCost]) -> Option<Vec<u64>> {
    let k = caps.len();
    let bound = |c: ExtCost| c.finite().map_or(k as u64, |c| c.min(k as u64));
    let mut used = vec![false; k + 1];
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        // smallest value that still leaves a feasible completion
        let mut chosen = None;
        for val in 1..=bound(caps[i]) {
            if used[val as usize] {
                continue;
            }
            used[val as usize] = true;
            if completion_feasible(&caps[i + 1..], &used, k) {
                chosen = Some(val);
                break;
            }
            used[val as usize] = false;
        }
        out.push(chosen?);
    }
    Some(out)
}

/// Hall's condition for assigning the unused values of `[k]` to `rest` with
/// `value <= cap`.
fn completion_feasible(rest: &[ExtCost], used: &[bool], k: usize) -> bool {
    let mut bounds: Vec<u64> = rest
        .iter()
        .map(|c| c.finite().map_or(k as u64, |c| c.min(k as u64)))
        .collect();
    bounds.sort_unstable();
    let free: Vec<u64> = (1..=k as u64).filter(|&v| !used[v as usize]).collect();
    bounds
        .iter()
        .enumerate()
        .all(|(i, &b)| free.get(i).is_some_and(|&v| v <= b))
}

/// Replaces each cost row by a permutation of `[k]` that is pointwise no
/// larger, keeping states and transitions.
///
/// Letters whose cost is at most `k` keep that cost; the remaining letters
/// take the remaining values in ascending letter order. For a greedy DFA the
/// finite part of each row is injective, so this always succeeds. Rows that
/// are not injective on their small values fall back to the lexicographically
/// least dominating permutation.
pub fn cheapen(a: &WeightedDfa) -> Result<WeightedDfa> {
    let k = a.k;
    let mut cost = Vec::with_capacity(a.cost.len());
    for v in 0..a.len() {
        let row = a.row(v);
        let mut pi = vec![0u64; k];
        let mut taken = vec![false; k + 1];
        let mut injective = true;
        for (i, c) in row.iter().enumerate() {
            if let Some(c) = c.finite().filter(|&c| c <= k as u64) {
                if c == 0 || taken[c as usize] {
                    injective = false;
                    break;
                }
                taken[c as usize] = true;
                pi[i] = c;
            }
        }
        let pi = if injective {
            let mut free = (1..=k as u64).filter(|&x| !taken[x as usize]);
            for slot in pi.iter_mut().filter(|p| **p == 0) {
                *slot = free.next().expect("as many free values as free letters");
            }
            pi
        } else {
            least_dominating_permutation(row).ok_or_else(|| Error::Infeasible(a.labels[v].to_string()))?
        };
        cost.extend(pi.into_iter().map(ExtCost::Finite));
    }
    Ok(WeightedDfa {
        cost,
        ..a.clone()
    })
}

/// The automaton that remembers which letters have been read.
///
/// States are subsets of `[k]` as bitmasks (bit `t - 1` for letter `t`),
/// root `∅`, and `delta(v, t) = v ∪ {t}`. At `v`, unread letters cost
/// `1, ..., k - |v|` and read letters cost `k - |v| + 1, ..., k`, each group
/// in ascending letter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetDfa {
    k: usize,
}

impl SubsetDfa {
    pub const MAX_K: usize = 64;
    /// Largest k for which [`SubsetDfa::to_table`] materializes `2^k` states.
    pub const MAX_TABLE_K: usize = 10;

    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > Self::MAX_K {
            return Err(Error::Resource {
                what: "subset-DFA alphabet k",
                requested: k as u128,
                cap: Self::MAX_K as u128,
            });
        }
        Ok(SubsetDfa { k })
    }

    pub fn to_table(&self) -> Result<WeightedDfa> {
        if self.k > Self::MAX_TABLE_K {
            return Err(Error::Resource {
                what: "subset-DFA table alphabet k",
                requested: self.k as u128,
                cap: Self::MAX_TABLE_K as u128,
            });
        }
        let caps = Caps {
            max_states: 1 << Self::MAX_TABLE_K,
            ..Caps::default()
        };
        WeightedDfa::from_automaton(self, &caps, |mask| mask as i64)
    }
}

impl Automaton for SubsetDfa {
    type State = u64;

    fn alphabet_size(&self) -> usize {
        self.k
    }

    fn root(&self) -> u64 {
        0
    }

    fn contains_state(&self, v: u64) -> bool {
        self.k == 64 || v >> self.k == 0
    }

    #[inline]
    fn delta(&self, v: u64, t: Letter) -> u64 {
        v | 1 << (t - 1)
    }

    #[inline]
    fn cost(&self, v: u64, t: Letter) -> ExtCost {
        let bit = 1u64 << (t - 1);
        let below = v & (bit - 1);
        let size = v.count_ones() as u64;
        let c = if v & bit == 0 {
            t as u64 - below.count_ones() as u64
        } else {
            self.k as u64 - size + below.count_ones() as u64 + 1
        };
        ExtCost::Finite(c)
    }

    fn state_count(&self) -> u128 {
        1u128 << self.k
    }

    fn states(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        let end = 1u128 << self.k;
        Box::new((0..end).map(|m| m as u64))
    }

    fn known_k_dfa(&self) -> bool {
        true
    }

    fn state_label(&self, v: u64) -> String {
        let members: Vec<String> = (1..=self.k)
            .filter(|t| v >> (t - 1) & 1 == 1)
            .map(|t| t.to_string())
            .collect();
        format!("{{{}}}", members.join(","))
    }
}

/// Two-track automaton for even `k = 2m`, states `-m..=m`, root 0.
///
/// Letters of `A = [m]` step down and letters of `B = [2m] \ [m]` step up,
/// holding at the boundary states. Costs: `t` at negative states; `t + m`
/// for `t ∈ A` and `t - m` for `t ∈ B` at non-negative states.
pub fn build_two_track_dfa(k: usize) -> Result<WeightedDfa> {
    if k == 0 || !k.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "two-track DFA is defined for even k only, got k = {k}"
        )));
    }
    let m = (k / 2) as i64;
    let labels: Vec<i64> = (-m..=m).collect();
    let index = |label: i64| (label + m) as usize;
    let mut delta = Vec::with_capacity(labels.len() * k);
    let mut cost = Vec::with_capacity(labels.len() * k);
    for &v in &labels {
        for t in 1..=k as i64 {
            let in_a = t <= m;
            let next = if in_a && v != -m {
                v - 1
            } else if !in_a && v != m {
                v + 1
            } else {
                v
            };
            let c = if v < 0 {
                t
            } else if in_a {
                t + m
            } else {
                t - m
            };
            delta.push(index(next));
            cost.push(ExtCost::Finite(c as u64));
        }
    }
    WeightedDfa::new(k, index(0), labels, delta, cost)
}

/// A k-DFA with `n` states, uniform random transitions and independent
/// uniform random cost rows. Deterministic in `seed`.
pub fn random_k_dfa(k: usize, n: usize, seed: u64) -> Result<WeightedDfa> {
    if n == 0 {
        return Err(Error::InvalidArgument("state count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delta = Vec::with_capacity(n * k);
    let mut cost = Vec::with_capacity(n * k);
    let mut row: Vec<u64> = (1..=k as u64).collect();
    for _ in 0..n {
        for _ in 0..k {
            delta.push(rng.random_range(0..n));
        }
        row.shuffle(&mut rng);
        cost.extend(row.iter().map(|&c| ExtCost::Finite(c)));
    }
    WeightedDfa::new(k, 0, (0..n as i64).collect(), delta, cost)
}

/// Distribution of root-walk costs over all of `S_k`.
pub fn cost_census<A: Automaton>(a: &A, caps: &Caps) -> Result<BTreeMap<ExtCost, u64>> {
    let k = a.alphabet_size();
    caps.check_perm_k(k)?;
    if k == 0 {
        return Ok(BTreeMap::from([(ExtCost::ZERO, 1)]));
    }
    fn go<A: Automaton>(
        a: &A,
        k: usize,
        v: A::State,
        used: u64,
        depth: usize,
        acc: ExtCost,
        out: &mut BTreeMap<ExtCost, u64>,
    ) {
        if depth == k {
            *out.entry(acc).or_default() += 1;
            return;
        }
        for t in 1..=k as Letter {
            if used >> t & 1 == 0 {
                go(a, k, a.delta(v, t), used | 1 << t, depth + 1, acc + a.cost(v, t), out);
            }
        }
    }
    let per_first: Vec<BTreeMap<ExtCost, u64>> = (1..=k as Letter)
        .into_par_iter()
        .map(|t| {
            let mut out = BTreeMap::new();
            let r = a.root();
            go(a, k, a.delta(r, t), 1 << t, 1, a.cost(r, t), &mut out);
            out
        })
        .collect();
    let mut total = BTreeMap::new();
    for m in per_first {
        for (c, n) in m {
            *total.entry(c).or_default() += n;
        }
    }
    Ok(total)
}

/// Number of `tau ∈ S_k` whose root walk costs at most `budget`.
pub fn cheap_perm_count<A: Automaton>(a: &A, budget: u64, caps: &Caps) -> Result<u64> {
    Ok(count_at_most(&cost_census(a, caps)?, budget))
}

/// Cumulative count of a census up to `budget`.
pub fn count_at_most(census: &BTreeMap<ExtCost, u64>, budget: u64) -> u64 {
    census
        .range(..=ExtCost::Finite(budget))
        .map(|(_, n)| n)
        .sum()
}
