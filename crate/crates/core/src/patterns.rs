//! Words, permutations and pattern containment.
//!
//! A permutation `tau` of length `k` is a *pattern* of a word `sigma` when
//! some length-`k` subsequence of `sigma` is order-isomorphic to `tau`. Any
//! such subsequence uses exactly `k` distinct values, so containment reduces
//! to: for some `k`-subset `Y` of the values of `sigma`, restrict `sigma` to
//! `Y`, relabel `Y` to `[k]` by rank, and greedily embed `tau` into the
//! result. Over the alphabet `[k]` the greedy (leftmost-next-occurrence)
//! embedding succeeds exactly when an embedding exists.
//!
//! Letters and positions are 1-based everywhere.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::{saturating_pow, Caps};
use crate::error::{Error, Result};

/// A letter of an alphabet `[r] = {1, ..., r}`.
pub type Letter = u32;

/// A finite word over `[r]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
    alphabet: u32,
}

impl Word {
    pub fn new(letters: Vec<Letter>, alphabet: u32) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l > alphabet) {
            return Err(Error::LetterOutOfRange {
                letter: bad,
                alphabet,
            });
        }
        Ok(Word { letters, alphabet })
    }

    /// Builds a word whose alphabet is its largest letter.
    pub fn from_letters(letters: Vec<Letter>) -> Result<Self> {
        let alphabet = letters.iter().copied().max().unwrap_or(0);
        Word::new(letters, alphabet)
    }

    pub fn empty(alphabet: u32) -> Self {
        Word {
            letters: Vec::new(),
            alphabet,
        }
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

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet
    }

    /// Same letters, declared over a larger (or equal) alphabet.
    pub fn with_alphabet(&self, alphabet: u32) -> Result<Self> {
        Word::new(self.letters.clone(), alphabet)
    }

    pub fn reversed(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().copied().collect(),
            alphabet: self.alphabet,
        }
    }

    /// The rotation `w(i), ..., w(n), w(1), ..., w(i-1)` for 1-based `i`.
    pub fn rotation(&self, i: usize) -> Result<Word> {
        let n = self.len();
        if i == 0 || i > n.max(1) {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let mut letters = Vec::with_capacity(n);
        letters.extend_from_slice(&self.letters[(i - 1).min(n)..]);
        letters.extend_from_slice(&self.letters[..(i - 1).min(n)]);
        Ok(Word {
            letters,
            alphabet: self.alphabet,
        })
    }

    /// Applies the letter map `a -> rho[a - 1]`; `rho` must be a bijection on
    /// the alphabet.
    pub fn relabeled(&self, rho: &Permutation) -> Result<Word> {
        if rho.len() != self.alphabet as usize {
            return Err(Error::AlphabetMismatch {
                word: self.alphabet,
                pattern: rho.len(),
            });
        }
        let images = rho.images();
        Ok(Word {
            letters: self
                .letters
                .iter()
                .map(|&a| images[a as usize - 1])
                .collect(),
            alphabet: self.alphabet,
        })
    }

    /// Distinct letters, ascending.
    pub fn values(&self) -> Vec<Letter> {
        let set: BTreeSet<Letter> = self.letters.iter().copied().collect();
        set.into_iter().collect()
    }

    /// Parses the text format: whitespace-separated 1-based integers, with an
    /// optional leading `r=<int>` line. Without a header the alphabet is the
    /// largest letter.
    pub fn parse(text: &str) -> Result<Word> {
        let mut alphabet = None;
        let mut body = text;
        let trimmed = text.trim_start();
        if let Some(rest) = trimmed.strip_prefix("r=") {
            let (head, tail) = rest.split_once('\n').unwrap_or((rest, ""));
            let r: u32 = head
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad alphabet header `r={}`", head.trim())))?;
            alphabet = Some(r);
            body = tail;
        }
        let letters = parse_integers(body)?;
        match alphabet {
            Some(r) => Word::new(letters, r),
            None => Word::from_letters(letters),
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letters.iter().join(" "))
    }
}

fn parse_integers(text: &str) -> Result<Vec<Letter>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<Letter>()
                .map_err(|_| Error::Parse(format!("expected a positive integer, got `{tok}`")))
        })
        .collect()
}

/// A permutation of `[k]` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Letter>", into = "Vec<Letter>")]
pub struct Permutation {
    images: Vec<Letter>,
}

impl Permutation {
    pub fn new(images: Vec<Letter>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k + 1];
        for &x in &images {
            if x == 0 || x as usize > k || seen[x as usize] {
                return Err(Error::NotPermutation(images.iter().join(" ")));
            }
            seen[x as usize] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(k: usize) -> Self {
        Permutation {
            images: (1..=k as Letter).collect(),
        }
    }

    pub fn images(&self) -> &[Letter] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn reversed(&self) -> Permutation {
        Permutation {
            images: self.images.iter().rev().copied().collect(),
        }
    }

    /// The next permutation in lexicographic order, if any.
    pub fn next_lex(&self) -> Option<Permutation> {
        let mut a = self.images.clone();
        next_permutation(&mut a).then_some(Permutation { images: a })
    }

    /// All of `S_k` in lexicographic order.
    pub fn all(k: usize) -> AllPermutations {
        AllPermutations {
            next: Some((1..=k as Letter).collect()),
        }
    }

    pub fn parse(text: &str) -> Result<Permutation> {
        Permutation::new(parse_integers(text)?)
    }
}

impl TryFrom<Vec<Letter>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<Letter>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<Letter> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Permutation::parse(s)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.images.iter().join(" "))
    }
}

/// Iterator over `S_k` in lexicographic order.
pub struct AllPermutations {
    next: Option<Vec<Letter>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { images: current })
    }
}

/// Rearranges `a` into its lexicographic successor; false if `a` was the last.
pub(crate) fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Strictly increasing 1-based positions `i_1 < ... < i_k` in a word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Embedding {
    pub indices: Vec<usize>,
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.indices.iter().join(" "))
    }
}

/// Leftmost-next-occurrence embedding of `targets` (exact letters) into
/// `letters`, 1-based positions.
fn greedy_positions(letters: &[Letter], targets: impl IntoIterator<Item = Letter>) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    let mut pos = 0usize;
    for t in targets {
        let off = letters[pos..].iter().position(|&l| l == t)?;
        pos += off + 1;
        out.push(pos);
    }
    Some(out)
}

/// The greedy embedding of `tau` into a word over `[k]`, `k = |tau|`.
pub fn greedy_embed(sigma: &Word, tau: &Permutation) -> Result<Option<Embedding>> {
    if sigma.alphabet_size() as usize != tau.len() {
        return Err(Error::AlphabetMismatch {
            word: sigma.alphabet_size(),
            pattern: tau.len(),
        });
    }
    Ok(greedy_positions(sigma.letters(), tau.images().iter().copied())
        .map(|indices| Embedding { indices }))
}

/// Greedy embedding of `tau` into `sigma` restricted to the value set `ys`
/// (sorted ascending), reported in `sigma`'s positions.
fn greedy_on_values(sigma: &[Letter], ys: &[Letter], tau: &Permutation) -> Option<Vec<usize>> {
    greedy_positions(sigma, tau.images().iter().map(|&x| ys[x as usize - 1]))
}

/// The lexicographically least embedding of `tau` in `sigma`, if any.
///
/// For each value set the greedy embedding is pointwise minimal, so the
/// minimum over value sets is the overall lexicographic minimum.
pub fn find_embedding(sigma: &Word, tau: &Permutation) -> Option<Embedding> {
    let k = tau.len();
    if k == 0 {
        return Some(Embedding { indices: vec![] });
    }
    sigma
        .values()
        .into_iter()
        .combinations(k)
        .filter_map(|ys| greedy_on_values(sigma.letters(), &ys, tau))
        .min()
        .map(|indices| Embedding { indices })
}

/// Whether `tau` is a pattern of `sigma`.
pub fn is_pattern(sigma: &Word, tau: &Permutation) -> bool {
    let k = tau.len();
    if k == 0 {
        return true;
    }
    sigma
        .values()
        .into_iter()
        .combinations(k)
        .any(|ys| greedy_on_values(sigma.letters(), &ys, tau).is_some())
}

/// Next-occurrence table for a word over `[k]`: `next[i * (k + 1) + t]` is the
/// smallest 0-based position `p >= i` with `w[p] = t`, or `n` if none.
struct NextTable {
    k: usize,
    n: usize,
    next: Vec<usize>,
}

impl NextTable {
    fn new(letters: &[Letter], k: usize) -> Self {
        let n = letters.len();
        let stride = k + 1;
        let mut next = vec![n; (n + 1) * stride];
        for i in (0..n).rev() {
            let (head, tail) = next.split_at_mut((i + 1) * stride);
            head[i * stride..].copy_from_slice(&tail[..stride]);
            head[i * stride + letters[i] as usize] = i;
        }
        NextTable { k, n, next }
    }

    #[inline]
    fn after(&self, i: usize, t: usize) -> usize {
        self.next[i * (self.k + 1) + t]
    }
}

/// Depth-first walk over the prefix tree of injective words that greedily
/// embed into a word over `[k]`; `visit` sees each complete permutation.
fn for_each_full_pattern(letters: &[Letter], k: usize, visit: &mut impl FnMut(&[Letter])) {
    let table = NextTable::new(letters, k);
    let mut prefix = Vec::with_capacity(k);
    fn go(
        table: &NextTable,
        pos: usize,
        used: u64,
        prefix: &mut Vec<Letter>,
        visit: &mut impl FnMut(&[Letter]),
    ) {
        if prefix.len() == table.k {
            visit(prefix);
            return;
        }
        if pos >= table.n {
            return;
        }
        for t in 1..=table.k {
            if used & (1 << t) != 0 {
                continue;
            }
            let p = table.after(pos, t);
            if p < table.n {
                prefix.push(t as Letter);
                go(table, p + 1, used | (1 << t), prefix, visit);
                prefix.pop();
            }
        }
    }
    go(&table, 0, 0, &mut prefix, visit);
}

/// Number of `tau` in `S_k` contained in a word over `[k]`.
pub(crate) fn count_full_patterns(letters: &[Letter], k: usize) -> usize {
    let mut count = 0;
    for_each_full_pattern(letters, k, &mut |_| count += 1);
    count
}

/// Restriction of `sigma` to the sorted value set `ys`, relabeled to `[|ys|]`.
fn restrict_relabel(sigma: &[Letter], ys: &[Letter]) -> Vec<Letter> {
    sigma
        .iter()
        .filter_map(|l| ys.binary_search(l).ok().map(|r| r as Letter + 1))
        .collect()
}

/// All `tau` in `S_k` that are patterns of `sigma`.
pub fn pattern_set(sigma: &Word, k: usize, caps: &Caps) -> Result<BTreeSet<Permutation>> {
    caps.check_perm_k(k)?;
    let mut out = BTreeSet::new();
    if k == 0 {
        out.insert(Permutation::identity(0));
        return Ok(out);
    }
    for ys in sigma.values().into_iter().combinations(k) {
        let restricted = restrict_relabel(sigma.letters(), &ys);
        for_each_full_pattern(&restricted, k, &mut |p| {
            out.insert(Permutation { images: p.to_vec() });
        });
    }
    Ok(out)
}

pub(crate) fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Whether `sigma` contains every permutation of `[k]`.
pub fn is_superpattern(sigma: &Word, k: usize, caps: &Caps) -> Result<bool> {
    Ok(pattern_set(sigma, k, caps)?.len() as u128 == factorial(k))
}

/// Result of the exhaustive F(k, n) computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FOracle {
    pub k: usize,
    pub n: usize,
    pub max_count: usize,
    pub witness: Word,
    /// Canonical (first-occurrence-ordered) words examined.
    pub words_examined: u64,
}

/// All words of length `n` over `[r]` in which letters first appear in the
/// order 1, 2, 3, ... (restricted growth strings). Every word is a letter
/// relabeling of exactly one of these, and each is the lexicographically
/// least member of its relabeling class.
pub fn canonical_words(r: usize, n: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(r: usize, n: usize, max: usize, cur: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for l in 1..=(max + 1).min(r) {
            cur.push(l as Letter);
            go(r, n, max.max(l), cur, out);
            cur.pop();
        }
    }
    go(r, n, 0, &mut cur, &mut out);
    out
}

/// F(k, n): the maximum number of permutations of `[k]` contained in a word
/// of `[k]^n`, with the lexicographically least maximizing word.
pub fn f_oracle(k: usize, n: usize, caps: &Caps) -> Result<FOracle> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if k > caps.f_oracle_max_k {
        return Err(Error::Resource {
            what: "f-oracle alphabet k",
            requested: k as u128,
            cap: caps.f_oracle_max_k as u128,
        });
    }
    if n > caps.f_oracle_max_n {
        return Err(Error::Resource {
            what: "f-oracle length n",
            requested: n as u128,
            cap: caps.f_oracle_max_n as u128,
        });
    }
    let words = canonical_words(k, n);
    let words_examined = words.len() as u64;
    let (max_count, witness) = words
        .into_par_iter()
        .map(|w| (count_full_patterns(&w, k), w))
        .reduce_with(best_of)
        .expect("at least one word of every length");
    Ok(FOracle {
        k,
        n,
        max_count,
        witness: Word::new(witness, k as u32)?,
        words_examined,
    })
}

/// Higher count wins; ties go to the lexicographically smaller word.
fn best_of(a: (usize, Vec<Letter>), b: (usize, Vec<Letter>)) -> (usize, Vec<Letter>) {
    if (b.0, std::cmp::Reverse(&b.1)) > (a.0, std::cmp::Reverse(&a.1)) {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FSearchRow {
    pub n: usize,
    pub exists_superpattern: bool,
    /// Lexicographically least superpattern of this length, if any.
    pub witness: Option<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FSearch {
    pub k: usize,
    pub r: usize,
    pub n_max: usize,
    pub rows: Vec<FSearchRow>,
    /// Least `n` with a superpattern: exactly f(k; r) when present.
    pub minimal_length: Option<usize>,
}

/// For each `n <= n_max`, whether some word of `[r]^n` is a k-superpattern.
pub fn exhaustive_f_search(k: usize, r: usize, n_max: usize, caps: &Caps) -> Result<FSearch> {
    caps.check_perm_k(k)?;
    caps.check_states("words r^n_max", saturating_pow(r as u128, n_max))?;
    let target = factorial(k);
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let witness = canonical_words(r, n)
            .into_par_iter()
            .filter(|w| {
                let word = Word {
                    letters: w.clone(),
                    alphabet: r as u32,
                };
                pattern_set(&word, k, caps)
                    .map(|s| s.len() as u128 == target)
                    .unwrap_or(false)
            })
            .min();
        rows.push(FSearchRow {
            n,
            exists_superpattern: witness.is_some(),
            witness: witness.map(|letters| Word {
                letters,
                alphabet: r as u32,
            }),
        });
    }
    let minimal_length = rows.iter().find(|row| row.exists_superpattern).map(|row| row.n);
    Ok(FSearch {
        k,
        r,
        n_max,
        rows,
        minimal_length,
    })
}

/// Circular containment: `tau` is a pattern of some rotation of `sigma`, or,
/// when `bidirectional`, of some rotation of its reversal.
pub fn circular_contains(sigma: &Word, tau: &Permutation, bidirectional: bool) -> bool {
    let n = sigma.len();
    if n == 0 {
        return is_pattern(sigma, tau);
    }
    let rotations_contain = |w: &Word| {
        (1..=n).any(|i| {
            let rot = w.rotation(i).expect("rotation index in range");
            is_pattern(&rot, tau)
        })
    };
    rotations_contain(sigma) || (bidirectional && rotations_contain(&sigma.reversed()))
}

pub fn ascent_count(tau: &Permutation) -> usize {
    tau.images().windows(2).filter(|w| w[0] < w[1]).count()
}

/// `m` concatenated copies of `1, 2, ..., k`.
pub fn repeat_word(k: usize, m: usize) -> Word {
    let letters = (0..m).flat_map(|_| 1..=k as Letter).collect();
    Word {
        letters,
        alphabet: k as u32,
    }
}
