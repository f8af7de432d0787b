//! Deterministic enumeration of reduced words.
//!
//! Order: by length, then lexicographically by letter index, where the plain
//! symbols come first and the formal inverses after them. Every bounded
//! search in the crate walks this order, so the first witness found is the
//! canonical one.

use crate::error::{Error, Result};
use crate::model::{ChainModel, GeneratorAlphabet, LevelPermutation, Word};

/// Default cap on the number of candidate words a single search may visit.
pub const DEFAULT_CAP: usize = 1 << 20;

/// A word-length bound together with a candidate budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordBound {
    pub max_len: usize,
    pub cap: usize,
}

impl WordBound {
    pub const fn new(max_len: usize) -> Self {
        WordBound {
            max_len,
            cap: DEFAULT_CAP,
        }
    }

    pub const fn with_cap(self, cap: usize) -> Self {
        WordBound { cap, ..self }
    }
}

impl From<usize> for WordBound {
    fn from(max_len: usize) -> Self {
        WordBound::new(max_len)
    }
}

/// All reduced words of length at most `bound.max_len`, in enumeration order.
pub fn enumerate_words(alphabet: &GeneratorAlphabet, bound: WordBound) -> Result<Vec<Word>> {
    let letters = alphabet.letters();
    let mut out = vec![Word::empty()];
    let mut layer_start = 0;
    for _ in 0..bound.max_len {
        let layer_end = out.len();
        for i in layer_start..layer_end {
            for &l in &letters {
                let w = &out[i];
                if let Some(&last) = w.letters().last() {
                    if alphabet.inverse_letter(last) == l {
                        continue;
                    }
                }
                if out.len() >= bound.cap {
                    return Err(Error::Budget { cap: bound.cap });
                }
                let mut next = w.clone();
                next.push(l);
                out.push(next);
            }
        }
        layer_start = layer_end;
    }
    Ok(out)
}

/// Reduced words paired with their images at a fixed level.
#[derive(Debug, Clone)]
pub struct WordImages {
    pub level: usize,
    pub entries: Vec<(Word, LevelPermutation)>,
}

impl WordImages {
    /// Enumerates words and computes their level images incrementally
    /// (`image(w·l) = image(w) ∘ image(l)`).
    pub fn compute(model: &ChainModel, level: usize, bound: WordBound) -> Result<Self> {
        model.check_level(level)?;
        let alphabet = model.alphabet();
        let letters = alphabet.letters();
        let n = model.point_count(level);
        let mut entries = vec![(Word::empty(), LevelPermutation::identity(level, n))];
        let mut layer_start = 0;
        for _ in 0..bound.max_len {
            let layer_end = entries.len();
            for i in layer_start..layer_end {
                for &l in &letters {
                    if let Some(&last) = entries[i].0.letters().last() {
                        if alphabet.inverse_letter(last) == l {
                            continue;
                        }
                    }
                    if entries.len() >= bound.cap {
                        return Err(Error::Budget { cap: bound.cap });
                    }
                    let (w, p) = &entries[i];
                    let mut next = w.clone();
                    next.push(l);
                    let img = p.compose(model.letter_image(level, l));
                    entries.push((next, img));
                }
            }
            layer_start = layer_end;
        }
        Ok(WordImages { level, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Word, LevelPermutation)> {
        self.entries.iter()
    }
}
