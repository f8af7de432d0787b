use std::collections::HashSet;

use super::assemble;
use crate::error::{invalid, Result};
use crate::model::{ChainModel, GeneratorAlphabet, LevelPermutation};

/// Multiplication table of a finite group on `{0, …, N−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl CayleyTable {
    /// Checks closure, associativity, identity and inverses.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n) {
            return Err(invalid("Cayley table must be square and non-empty"));
        }
        if table.iter().flatten().any(|&v| v >= n) {
            return Err(invalid("Cayley table entry out of range"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| invalid("Cayley table has no identity"))?;
        for x in 0..n {
            if !(0..n).any(|y| table[x][y] == identity) {
                return Err(invalid(format!("element {x} has no inverse")));
            }
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(invalid(format!("not associative at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        Ok(CayleyTable { table, identity })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        CayleyTable::new((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect())
    }

    pub fn klein_four() -> Self {
        CayleyTable::new((0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect())
            .expect("klein four table")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
}

/// Two product models on a shared tree: level 1 is the finite set `X`
/// carrying each group's left translation action, deeper levels are
/// `X × Z/(m_1⋯m_k)` with the odometer step `t` on the second factor.
///
/// Generators are `g<i>` for every non-identity element `i`, then `t`.
pub fn build_product_toy(
    first: &CayleyTable,
    second: &CayleyTable,
    arities: &[usize],
) -> Result<(ChainModel, ChainModel)> {
    let n = first.order();
    if second.order() != n {
        return Err(invalid("product toys need groups of the same order"));
    }
    if n < 4 {
        return Err(invalid(format!("product toys need order at least 4, got {n}")));
    }
    if let Some(&a) = arities.iter().find(|&&a| a < 2) {
        return Err(invalid(format!("odometer arity {a} is below 2")));
    }
    let build = |g: &CayleyTable, tag: &str| -> Result<ChainModel> {
        let elems: Vec<usize> = (0..n).filter(|&i| i != g.identity()).collect();
        let mut names: Vec<String> = elems.iter().map(|i| format!("g{i}")).collect();
        let mut invol: Vec<bool> = elems
            .iter()
            .map(|&i| g.mul(i, i) == g.identity())
            .collect();
        names.push("t".into());
        invol.push(false);
        let alphabet = GeneratorAlphabet::with_involutions(names, invol)?;
        // moduli[l] = size of the odometer factor at level l (l ≥ 1)
        let mut moduli = vec![1usize, 1];
        for &a in arities {
            moduli.push(moduli.last().unwrap() * a);
        }
        let sizes: Vec<usize> = moduli
            .iter()
            .enumerate()
            .map(|(l, &m)| if l == 0 { 1 } else { n * m })
            .collect();
        let t_index = elems.len();
        assemble(
            format!("product({tag})"),
            alphabet,
            &sizes,
            |l, gen, idx| {
                if l == 0 {
                    return 0;
                }
                let (x, y) = (idx % n, idx / n);
                if gen == t_index {
                    x + n * ((y + 1) % moduli[l])
                } else {
                    g.mul(elems[gen], x) + n * y
                }
            },
            |l, idx| {
                if l == 1 {
                    0
                } else {
                    let (x, y) = (idx % n, idx / n);
                    x + n * (y % moduli[l - 1])
                }
            },
        )
    };
    Ok((build(first, "first")?, build(second, "second")?))
}

/// The permutation group generated by the generator images at `level`.
pub fn level_group(model: &ChainModel, level: usize) -> Result<Vec<LevelPermutation>> {
    model.check_level(level)?;
    let gens = model.levels()[level].generator_images();
    let id = LevelPermutation::identity(level, model.point_count(level));
    let mut seen: HashSet<LevelPermutation> = HashSet::from([id.clone()]);
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let h = g.compose(&elems[i]);
            if seen.insert(h.clone()) {
                elems.push(h);
            }
        }
        i += 1;
    }
    Ok(elems)
}

pub fn max_element_order(elems: &[LevelPermutation]) -> u64 {
    elems.iter().map(LevelPermutation::order).max().unwrap_or(1)
}
