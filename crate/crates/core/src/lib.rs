//! Superpatterns on small alphabets.
//!
//! - [`patterns`]: words, permutations, containment, exhaustive oracles and
//!   explicit word constructions.
//! - [`dfa`]: weighted DFAs with extended costs, the greedy automaton of a
//!   word, cheapening to a k-DFA, the subset and two-track k-DFAs, and the
//!   per-automaton census of cheap permutations.
//! - [`walks`]: random permutational words, exact and Monte-Carlo
//!   probabilities of cheap walks, the X/Y cost decomposition and
//!   concentration experiments.
//! - [`bounds`]: log-space evaluators for the closed-form bounds.

pub mod bounds;
pub mod caps;
pub mod dfa;
mod error;
pub mod patterns;
pub mod walks;

pub use caps::Caps;
pub use dfa::{Automaton, ExtCost, SubsetDfa, WalkTrace, WeightedDfa};
pub use error::{Error, Result};
pub use patterns::{Embedding, Letter, Permutation, Word};
