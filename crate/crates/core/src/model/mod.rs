//! Groups presented by generator words and their finite level actions.

mod alphabet;
mod chain;
mod perm;
pub mod search;

pub use alphabet::{GeneratorAlphabet, Letter, Word};
pub use chain::{validate_chain, ActionLevel, ChainModel, LevelChecks, PathPoint, ValidationReport};
pub use perm::LevelPermutation;
pub use search::{enumerate_words, WordBound, WordImages};

/// Free reduction of `w` over the alphabet of `model`.
pub fn reduce_word(model: &ChainModel, w: &Word) -> crate::Result<Word> {
    model.alphabet().reduce(w)
}
