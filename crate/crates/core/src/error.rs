use thiserror::Error;

/// Errors produced by the library.
///
/// `Resource` is kept distinct from domain errors so callers (the CLI in
/// particular) can tell an enumeration that was refused for size apart from
/// an input that is simply invalid.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} outside alphabet [1, {alphabet}]")]
    LetterOutOfRange { letter: u32, alphabet: u32 },

    #[error("not a permutation: {0}")]
    NotPermutation(String),

    #[error("alphabet mismatch: word is over [{word}] but pattern has length {pattern}")]
    AlphabetMismatch { word: u32, pattern: usize },

    #[error("not a permutational word: letter {0} repeats")]
    RepeatedLetter(u32),

    #[error("index {index} outside [1, {len}]")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unknown state {0}")]
    UnknownState(String),

    #[error("not a k-DFA: {0}")]
    NotKDfa(String),

    #[error("no dominating permutation exists for the cost row at state {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("resource cap exceeded: {what} = {requested} > {cap}")]
    Resource {
        what: &'static str,
        requested: u128,
        cap: u128,
    },
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
