use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use proptest::prelude::*;
use superpat_core::bounds::{self, LogValue};
use superpat_core::dfa::{self, Automaton};
use superpat_core::patterns::{self, Letter, Permutation, Word};
use superpat_core::walks::{self, Comparator};
use superpat_core::{Caps, ExtCost, SubsetDfa, WeightedDfa};

fn caps() -> Caps {
    Caps::default()
}

/// Containment by trying every increasing index tuple.
fn brute_contains(sigma: &[Letter], tau: &[Letter]) -> bool {
    fn go(sigma: &[Letter], tau: &[Letter], from: usize, picked: &mut Vec<Letter>) -> bool {
        if picked.len() == tau.len() {
            return (0..tau.len())
                .all(|i| (0..tau.len()).all(|j| (tau[i] < tau[j]) == (picked[i] < picked[j])));
        }
        for i in from..sigma.len() {
            picked.push(sigma[i]);
            if go(sigma, tau, i + 1, picked) {
                return true;
            }
            picked.pop();
        }
        false
    }
    go(sigma, tau, 0, &mut Vec::new())
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

fn word_strategy(max_k: u32, max_n: usize) -> impl Strategy<Value = Word> {
    (1..=max_k, 0..=max_n).prop_flat_map(|(k, n)| {
        prop::collection::vec(1..=k, n).prop_map(move |v| Word::new(v, k).unwrap())
    })
}

/// Every word over `[k]` of length at most `max_len`, shortest first.
fn all_words(k: u32, max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<Letter>| {
                (1..=k).map(move |t| {
                    let mut x = w.clone();
                    x.push(t);
                    x
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn walk_total<A: Automaton>(a: &A, v: A::State, w: &[Letter]) -> ExtCost {
    dfa::walk_cost(a, v, w).unwrap().total_cost
}

fn f_table() -> &'static HashMap<(usize, usize), u64> {
    static TABLE: OnceLock<HashMap<(usize, usize), u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut m = HashMap::new();
        for k in 1..=3 {
            for n in 0..=9 {
                m.insert((k, n), patterns::f_oracle(k, n, &caps()).unwrap().max_count as u64);
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_equivalence(sigma in word_strategy(6, 10)) {
        let k = sigma.alphabet_size() as usize;
        let a = dfa::build_greedy_dfa(&sigma);
        for tau in Permutation::all(k) {
            let brute = brute_contains(sigma.letters(), tau.images());
            let greedy = patterns::greedy_embed(&sigma, &tau).unwrap();
            let total = walk_total(&a, a.root(), tau.images());
            prop_assert_eq!(patterns::is_pattern(&sigma, &tau), brute);
            prop_assert_eq!(greedy.is_some(), brute);
            prop_assert_eq!(total <= ExtCost::Finite(sigma.len() as u64), brute);
            // a successful walk ends at the last embedded position
            match greedy {
                Some(e) => prop_assert_eq!(total, ExtCost::Finite(*e.indices.last().unwrap() as u64)),
                None => prop_assert_eq!(total, ExtCost::Infinite),
            }
        }
    }

    #[test]
    fn counting_reduction(r in 1u32..=5, letters in prop::collection::vec(1u32..=5, 0..=8), k in 1usize..=3) {
        let letters: Vec<Letter> = letters.into_iter().map(|x| (x - 1) % r + 1).collect();
        let n = letters.len();
        let sigma = Word::new(letters, r).unwrap();
        let count = patterns::pattern_set(&sigma, k, &caps()).unwrap().len() as u64;
        prop_assert!(count <= binomial(r as u64, k as u64) * f_table()[&(k, n)]);
    }

    #[test]
    fn relabeling_invariance(sigma in word_strategy(5, 9), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        // over [k] a bijection of letters permutes S_k; for k < r it does not
        let r = sigma.alphabet_size() as usize;
        let k = r;
        let mut images: Vec<Letter> = (1..=r as Letter).collect();
        images.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let rho = Permutation::new(images).unwrap();
        let relabeled = sigma.relabeled(&rho).unwrap();
        prop_assert_eq!(
            patterns::pattern_set(&relabeled, k, &caps()).unwrap().len(),
            patterns::pattern_set(&sigma, k, &caps()).unwrap().len()
        );
    }

    #[test]
    fn cost_additivity(sigma in word_strategy(5, 10), u in prop::collection::vec(1u32..=5, 0..6), w in prop::collection::vec(1u32..=5, 0..6)) {
        let k = sigma.alphabet_size();
        let fold = |x: Vec<u32>| x.into_iter().map(|t| (t - 1) % k + 1).collect::<Vec<_>>();
        let (u, w) = (fold(u), fold(w));
        let a = dfa::build_greedy_dfa(&sigma);
        for v in a.states() {
            let uw: Vec<Letter> = u.iter().chain(&w).copied().collect();
            let first = dfa::walk_cost(&a, v, &u).unwrap();
            let second = walk_total(&a, first.end(), &w);
            prop_assert_eq!(walk_total(&a, v, &uw), first.total_cost + second);
        }
    }

    #[test]
    fn cheapening_dominates(sigma in word_strategy(4, 8)) {
        let a = dfa::build_greedy_dfa(&sigma);
        let c = dfa::cheapen(&a).unwrap();
        prop_assert!(dfa::is_k_dfa(&c));
        let k = sigma.alphabet_size();
        for w in all_words(k, 5) {
            for v in a.states() {
                prop_assert!(walk_total(&c, v, &w) <= walk_total(&a, v, &w));
            }
        }
    }

    #[test]
    fn census_monotone(k in 1usize..=5, states in 1usize..=8, seed in any::<u64>()) {
        let a = dfa::random_k_dfa(k, states, seed).unwrap();
        let census = dfa::cost_census(&a, &caps()).unwrap();
        let mut prev = 0;
        for n in 0..=(k * k) as u64 {
            let c = dfa::count_at_most(&census, n);
            prop_assert!(c >= prev);
            if n < k as u64 {
                prop_assert_eq!(c, 0);
            }
            prev = c;
        }
        prop_assert_eq!(prev, factorial(k));
    }

    #[test]
    fn prefix_cost_monotone(k in 2usize..=40, states in 1usize..=6, seed in any::<u64>(), cut in 0usize..=40) {
        let a = dfa::random_k_dfa(k, states, seed).unwrap();
        let mut rng = walks::sample_rng(seed, 0);
        let w = walks::sample_perm_word(k, k, &mut rng).unwrap();
        let prefix = &w.letters()[..cut.min(k)];
        prop_assert!(walk_total(&a, a.root(), prefix) <= walk_total(&a, a.root(), w.letters()));
    }

    #[test]
    fn for_l_bound_sound(k in 2usize..=6, states in 1usize..=6, seed in any::<u64>()) {
        let a = dfa::random_k_dfa(k, states, seed).unwrap();
        for len in 0..=k {
            for eps in [0.1, 0.25, 0.5] {
                let p = walks::exact_p_max(&a, len, eps, Comparator::Less, &caps()).unwrap();
                let bound = bounds::for_l_bound(k as u64, len as u64, eps).unwrap();
                prop_assert!(p.probability <= bound.value() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn infeasibility_antitone(k in 1u64..=12, r in 1u64..=30, a in 0.0f64..1e6, b in 0.0f64..1e6) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let lo = LogValue::from_value(lo).unwrap();
        let hi = LogValue::from_value(hi).unwrap();
        // larger F never turns "infeasible" on
        prop_assert!(!bounds::infeasibility(k, r, hi) || bounds::infeasibility(k, r, lo));
    }
}

#[test]
fn f_oracle_monotone_with_anchors() {
    for k in 1..=3 {
        let row: Vec<u64> = (0..=9).map(|n| f_table()[&(k, n)]).collect();
        assert!(row.windows(2).all(|w| w[0] <= w[1]), "k={k}: {row:?}");
        assert_eq!(row[k], 1);
        assert_eq!(row[k * k], factorial(k));
    }
    for n in 4..=8 {
        let a = patterns::f_oracle(4, n, &caps()).unwrap().max_count as u64;
        let b = patterns::f_oracle(4, n + 1, &caps()).unwrap().max_count as u64;
        assert!(a <= b);
    }
    assert_eq!(patterns::f_oracle(4, 4, &caps()).unwrap().max_count, 1);
}

#[test]
fn f_oracle_refuses_past_caps() {
    let err = patterns::f_oracle(5, 6, &caps()).unwrap_err();
    assert!(err.is_resource());
}

#[test]
fn ascent_guarantee() {
    for k in 1..=6 {
        for m in 1..=k {
            let w = patterns::repeat_word(k, m);
            let set = patterns::pattern_set(&w, k, &caps()).unwrap();
            for tau in Permutation::all(k) {
                if patterns::ascent_count(&tau) + m >= k {
                    assert!(set.contains(&tau), "k={k} m={m} tau={tau}");
                }
            }
            if m == k.div_ceil(2) {
                assert!(2 * set.len() as u64 >= factorial(k), "k={k}");
            }
        }
    }
}

#[test]
fn reversal_flips_ascents() {
    for k in 1..=7 {
        for tau in Permutation::all(k) {
            assert_eq!(
                patterns::ascent_count(&tau.reversed()),
                k - 1 - patterns::ascent_count(&tau)
            );
        }
    }
}

#[test]
fn cheapening_dominates_exhaustively_over_k3() {
    for letters in all_words(3, 6) {
        let sigma = Word::new(letters, 3).unwrap();
        let a = dfa::build_greedy_dfa(&sigma);
        let c = dfa::cheapen(&a).unwrap();
        assert!(dfa::is_k_dfa(&c));
        for w in all_words(3, 4) {
            for v in a.states() {
                assert!(walk_total(&c, v, &w) <= walk_total(&a, v, &w));
            }
        }
    }
}

#[test]
fn subset_dfa_has_zero_slack() {
    for k in 1..=7 {
        let a = SubsetDfa::new(k).unwrap();
        for tau in Permutation::all(k) {
            let d = walks::xy_decompose(&a, &tau).unwrap();
            assert!(d.slacks.iter().all(|&y| y == 0), "k={k} tau={tau}");
        }
    }
}

#[test]
fn two_track_costs_split() {
    for k in (2..=10).step_by(2) {
        let a = dfa::build_two_track_dfa(k).unwrap();
        let m = (k / 2) as u64;
        let mut r_of: BTreeMap<Letter, u64> = BTreeMap::new();
        for v in a.states() {
            for t in 1..=k as Letter {
                let c = a.cost(v, t).finite().unwrap();
                let (q, r) = ((c - 1) / m, (c - 1) % m + 1);
                assert!(q <= 1 && (1..=m).contains(&r));
                assert_eq!(*r_of.entry(t).or_insert(r), r, "k={k} t={t}");
            }
        }
    }
}

fn fixed_dfas(k: usize) -> Vec<WeightedDfa> {
    let mut out = vec![SubsetDfa::new(k).unwrap().to_table().unwrap()];
    out.extend((0..3).map(|s| dfa::random_k_dfa(k, 2 * k, s).unwrap()));
    out
}

#[test]
fn ranks_are_independent_uniforms() {
    for k in 1..=5 {
        for a in fixed_dfas(k) {
            let mut joint: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
            for tau in Permutation::all(k) {
                let d = walks::xy_decompose(&a, &tau).unwrap();
                *joint.entry(d.ranks).or_default() += 1;
            }
            // the product of uniforms on [k], [k-1], ..., [1] puts mass 1/k! on each tuple
            assert_eq!(joint.len() as u64, factorial(k));
            for (x, count) in joint {
                assert_eq!(count, 1);
                assert!(x.iter().enumerate().all(|(j, &xj)| (1..=(k - j) as u64).contains(&xj)));
            }
        }
    }
}

#[test]
fn rank_sum_mean_is_exact() {
    for k in 1..=6 {
        for a in fixed_dfas(k) {
            let total: u64 = Permutation::all(k)
                .map(|tau| walks::xy_decompose(&a, &tau).unwrap().rank_sum())
                .sum();
            assert_eq!(4 * total, factorial(k) * (k * k + 3 * k) as u64);
        }
    }
}

#[test]
fn doubling_inequality() {
    for k in 2..=6 {
        let mut dfas = vec![SubsetDfa::new(k).unwrap().to_table().unwrap()];
        dfas.extend((0..4).map(|s| dfa::random_k_dfa(k, 3, 100 + s).unwrap()));
        for a in &dfas {
            let states = a.len() as f64;
            for len in 1..=k {
                for m in 1..=k / len {
                    for eps in [0.1, 0.25, 0.5] {
                        let p_l = walks::exact_p_max(a, len, eps, Comparator::Less, &caps()).unwrap();
                        let p_ml = walks::exact_p_max(a, m * len, eps, Comparator::Less, &caps()).unwrap();
                        assert!(
                            p_ml.probability <= m as f64 * states * p_l.probability + 1e-12,
                            "k={k} L={len} M={m} eps={eps}"
                        );
                    }
                }
            }
        }
    }
}
