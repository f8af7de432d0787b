//! Builders for example chain models and the DOT tree export.

mod arithmetic;
mod automaton;
mod dot;
mod product;

pub use arithmetic::{build_dihedral, build_heisenberg, build_odometer};
pub use automaton::{
    adding_machine_spec, build_automaton_group, build_grigorchuk, grigorchuk_spec, AutomatonSpec,
    StateDef,
};
pub use dot::export_tree;
pub use product::{build_product_toy, level_group, max_element_order, CayleyTable};

#[cfg(test)]
#[allow(unused_imports)]
pub(crate) use arithmetic::{heisenberg_mul, HeisenbergLevel};

use crate::error::Result;
use crate::model::{ActionLevel, ChainModel, GeneratorAlphabet, LevelPermutation};

/// Index of the tree vertex spelled by `letters` (first letter least
/// significant), so that dropping the last letter is the projection.
pub fn tree_index(arity: usize, letters: &[usize]) -> usize {
    letters.iter().rev().fold(0, |acc, &x| acc * arity + x)
}

/// Builds a model from level sizes, an action formula and a projection
/// formula, with basepoint 0 at every level.
pub(crate) fn assemble(
    name: String,
    alphabet: GeneratorAlphabet,
    sizes: &[usize],
    action: impl Fn(usize, usize, usize) -> usize,
    projection: impl Fn(usize, usize) -> usize,
) -> Result<ChainModel> {
    let mut levels = Vec::with_capacity(sizes.len());
    for (l, &n) in sizes.iter().enumerate() {
        let images = (0..alphabet.len())
            .map(|g| LevelPermutation::new(l, (0..n).map(|x| action(l, g, x)).collect()))
            .collect::<Result<Vec<_>>>()?;
        let proj = (l > 0).then(|| (0..n).map(|x| projection(l, x)).collect());
        levels.push(ActionLevel::new(l, images, proj, 0)?);
    }
    ChainModel::new(name, alphabet, levels)
}
