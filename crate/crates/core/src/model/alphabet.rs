//! Generator alphabets and free-group words over them.
//!
//! A word acts on the left: the last letter acts first. Symbols may be
//! declared involutive, in which case the formal inverse is identified with
//! the symbol itself and `aa` cancels during reduction.

use std::fmt;

use crate::error::{invalid, Result};

/// A generator or a formal inverse of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub const fn plain(generator: usize) -> Self {
        Letter {
            generator,
            inverse: false,
        }
    }

    pub const fn inv(generator: usize) -> Self {
        Letter {
            generator,
            inverse: true,
        }
    }
}

/// Ordered, named generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorAlphabet {
    symbols: Vec<String>,
    involutive: Vec<bool>,
}

fn valid_symbol(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl GeneratorAlphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let n = symbols.len();
        Self::with_involutions(symbols, vec![false; n])
    }

    pub fn with_involutions(symbols: Vec<String>, involutive: Vec<bool>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(invalid("generator alphabet is empty"));
        }
        if symbols.len() != involutive.len() {
            return Err(invalid("involution flags do not match the symbol count"));
        }
        for (i, s) in symbols.iter().enumerate() {
            if !valid_symbol(s) {
                return Err(invalid(format!("invalid generator name {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(invalid(format!("duplicate generator name {s:?}")));
            }
        }
        Ok(GeneratorAlphabet {
            symbols,
            involutive,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, generator: usize) -> &str {
        &self.symbols[generator]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    pub fn is_involutive(&self, generator: usize) -> bool {
        self.involutive[generator]
    }

    pub fn involutions(&self) -> &[bool] {
        &self.involutive
    }

    /// Extends the alphabet with fresh, non-involutive symbols.
    pub fn extended<S: Into<String>>(&self, extra: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut symbols = self.symbols.clone();
        let mut involutive = self.involutive.clone();
        for s in extra {
            symbols.push(s.into());
            involutive.push(false);
        }
        Self::with_involutions(symbols, involutive)
    }

    /// Letters in enumeration order: plain symbols first, then the formal
    /// inverses of the non-involutive symbols.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> = (0..self.len()).map(Letter::plain).collect();
        out.extend(
            (0..self.len())
                .filter(|&g| !self.involutive[g])
                .map(Letter::inv),
        );
        out
    }

    /// Canonical representative of a letter (involutive inverses collapse).
    pub fn normalize(&self, letter: Letter) -> Letter {
        if letter.inverse && self.involutive[letter.generator] {
            Letter::plain(letter.generator)
        } else {
            letter
        }
    }

    pub fn inverse_letter(&self, letter: Letter) -> Letter {
        self.normalize(Letter {
            generator: letter.generator,
            inverse: !letter.inverse,
        })
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        for l in word.letters() {
            if l.generator >= self.len() {
                return Err(invalid(format!(
                    "letter index {} outside alphabet of size {}",
                    l.generator,
                    self.len()
                )));
            }
        }
        Ok(())
    }

    /// Free reduction: normalizes involutive letters and cancels adjacent
    /// inverse pairs until none remain.
    pub fn reduce(&self, word: &Word) -> Result<Word> {
        self.check_word(word)?;
        let mut out: Vec<Letter> = Vec::with_capacity(word.len());
        for &l in word.letters() {
            let l = self.normalize(l);
            if out.last() == Some(&self.inverse_letter(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(Word(out))
    }

    pub fn inverse(&self, word: &Word) -> Word {
        Word(
            word.letters()
                .iter()
                .rev()
                .map(|&l| self.inverse_letter(l))
                .collect(),
        )
    }

    /// Reduced concatenation `a·b`.
    pub fn multiply(&self, a: &Word, b: &Word) -> Result<Word> {
        self.reduce(&a.concat(b))
    }

    /// Renders a word as `a*b^-1*c`; the empty word renders as `1`.
    pub fn render(&self, word: &Word) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        word.letters()
            .iter()
            .map(|l| {
                if l.inverse {
                    format!("{}^-1", self.symbols[l.generator])
                } else {
                    self.symbols[l.generator].clone()
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses `*`-separated tokens `name`, `name^-1` or `name^k`; `1` and the
    /// empty string denote the identity. The result is reduced.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for token in text.split('*') {
            let token = token.trim();
            let (name, exp) = match token.split_once('^') {
                Some((name, exp)) => {
                    let exp: i64 = exp
                        .trim()
                        .parse()
                        .map_err(|_| invalid(format!("bad exponent in {token:?}")))?;
                    (name.trim(), exp)
                }
                None => (token, 1),
            };
            let g = self
                .index_of(name)
                .ok_or_else(|| invalid(format!("unknown generator {name:?}")))?;
            let letter = if exp < 0 { Letter::inv(g) } else { Letter::plain(g) };
            for _ in 0..exp.unsigned_abs() {
                letters.push(letter);
            }
        }
        self.reduce(&Word(letters))
    }
}

/// A word over an alphabet and its formal inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// `g^k` for a single generator; negative exponents use the inverse.
    pub fn power(generator: usize, k: i64) -> Self {
        let l = if k < 0 {
            Letter::inv(generator)
        } else {
            Letter::plain(generator)
        };
        Word(vec![l; k.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "g{}", l.generator)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> GeneratorAlphabet {
        GeneratorAlphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn cancels_inverse_pair() {
        let al = ab();
        let w = Word::new(vec![Letter::plain(0), Letter::inv(0)]);
        assert_eq!(al.reduce(&w).unwrap(), Word::empty());
    }

    #[test]
    fn single_cancellation() {
        let al = ab();
        let w = Word::new(vec![
            Letter::plain(0),
            Letter::plain(1),
            Letter::inv(1),
            Letter::plain(0),
        ]);
        assert_eq!(al.reduce(&w).unwrap(), Word::power(0, 2));
    }

    #[test]
    fn empty_is_fixed() {
        assert_eq!(ab().reduce(&Word::empty()).unwrap(), Word::empty());
    }

    #[test]
    fn foreign_letter_rejected() {
        let w = Word::letter(Letter::plain(5));
        assert!(matches!(ab().reduce(&w), Err(crate::Error::InvalidInput(_))));
    }

    #[test]
    fn involutions_collapse() {
        let al = GeneratorAlphabet::with_involutions(
            vec!["a".into(), "b".into()],
            vec![true, false],
        )
        .unwrap();
        let w = Word::new(vec![Letter::inv(0), Letter::plain(1), Letter::inv(1), Letter::plain(0)]);
        assert_eq!(al.reduce(&w).unwrap(), Word::empty());
        assert_eq!(al.letters(), vec![Letter::plain(0), Letter::plain(1), Letter::inv(1)]);
    }

    #[test]
    fn bad_alphabets() {
        assert!(GeneratorAlphabet::new(Vec::<String>::new()).is_err());
        assert!(GeneratorAlphabet::new(["a", "a"]).is_err());
        assert!(GeneratorAlphabet::new(["a^-1"]).is_err());
        assert!(GeneratorAlphabet::new(["1"]).is_err());
    }

    #[test]
    fn parse_and_render() {
        let al = ab();
        let w = al.parse_word("a^2 * b^-1").unwrap();
        assert_eq!(al.render(&w), "a*a*b^-1");
        assert_eq!(al.parse_word(&al.render(&w)).unwrap(), w);
        assert_eq!(al.render(&Word::empty()), "1");
        assert_eq!(al.parse_word("1").unwrap(), Word::empty());
        assert!(al.parse_word("c").is_err());
        assert_eq!(al.parse_word("a*a^-1").unwrap(), Word::empty());
    }
}
