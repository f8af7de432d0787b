use crate::error::{invalid, Result};

/// A bijection of the finite level set `X_ℓ`, stored as an image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelPermutation {
    level: usize,
    images: Vec<usize>,
}

impl LevelPermutation {
    pub fn new(level: usize, images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || seen[y] {
                return Err(invalid(format!(
                    "image table at level {level} is not a permutation of {n} points"
                )));
            }
            seen[y] = true;
        }
        Ok(LevelPermutation { level, images })
    }

    pub(crate) fn new_unchecked(level: usize, images: Vec<usize>) -> Self {
        LevelPermutation { level, images }
    }

    pub fn identity(level: usize, n: usize) -> Self {
        LevelPermutation {
            level,
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from cycle notation, e.g. `(0 1 2)(3 4)`.
    pub fn from_cycles(level: usize, n: usize, text: &str) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| invalid(format!("expected '(' in cycle notation {text:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| invalid(format!("unclosed cycle in {text:?}")))?;
            let cycle: Vec<usize> = open[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| invalid(format!("bad point {s:?} in cycle notation")))
                })
                .collect::<Result<_>>()?;
            for (i, &x) in cycle.iter().enumerate() {
                if x >= n {
                    return Err(invalid(format!("point {x} outside 0..{n}")));
                }
                images[x] = cycle[(i + 1) % cycle.len()];
            }
            rest = open[close + 1..].trim_start();
        }
        Self::new(level, images)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LevelPermutation) -> LevelPermutation {
        debug_assert_eq!(self.images.len(), other.images.len());
        LevelPermutation {
            level: self.level,
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> LevelPermutation {
        let mut inv = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        LevelPermutation {
            level: self.level,
            images: inv,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn fixes(&self, x: usize) -> bool {
        self.images[x] == x
    }

    /// Order as a group element (lcm of cycle lengths).
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.images.len()];
        let mut order = 1u64;
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            order = lcm(order, len);
        }
        order
    }

    /// Cycle notation with fixed points omitted; identity renders as `()`.
    pub fn cycles(&self) -> String {
        let mut seen = vec![false; self.images.len()];
        let mut out = String::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x.to_string());
                x = self.images[x];
            }
            out.push('(');
            out.push_str(&cycle.join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_roundtrip() {
        let p = LevelPermutation::from_cycles(2, 5, "(0 1 2)(3 4)").unwrap();
        assert_eq!(p.images(), &[1, 2, 0, 4, 3]);
        assert_eq!(p.order(), 6);
        assert_eq!(p.cycles(), "(0 1 2)(3 4)");
        assert_eq!(
            LevelPermutation::from_cycles(2, 5, &p.cycles()).unwrap(),
            p
        );
    }

    #[test]
    fn compose_applies_right_first() {
        let a = LevelPermutation::new(1, vec![1, 2, 0]).unwrap();
        let b = LevelPermutation::new(1, vec![0, 2, 1]).unwrap();
        // (a∘b)(1) = a(b(1)) = a(2) = 0
        assert_eq!(a.compose(&b).apply(1), 0);
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(LevelPermutation::new(0, vec![0, 0]).is_err());
        assert!(LevelPermutation::new(0, vec![2, 0]).is_err());
        assert!(LevelPermutation::from_cycles(0, 2, "(0 2)").is_err());
    }
}
