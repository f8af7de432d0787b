//! Clopen-set algebra and the regularity checks.
//!
//! A word `w` is *trivial on* a clopen `C` at depth `k` when its level-`k`
//! image fixes every point of `X_k` lying in `C`. A single fixed cell at the
//! checking depth is only an over-approximation of a fixed set, so every
//! triviality certificate here uses a cylinder strictly coarser than the
//! depth at which it is checked.

mod adapted;
mod clopen;
mod lqa;
mod probes;

pub use adapted::{
    fixed_cylinder_set, is_adapted, topological_freeness_check, AdaptedSetReport,
    AdaptedVerdict, FreenessWitness,
};
pub use clopen::{translate_clopen, Clopen};
pub use lqa::{
    kernel_normality_check, lqa_violation_search, LqaReport, LqaWitness, NormalityWitness,
};
pub use probes::{
    ascending_chain_probe, germ_hausdorff_witness, verify_separating_step, ChainProbeReport,
    ChainStep, GermWitness,
};

use crate::error::{invalid, Result};
use crate::model::{ChainModel, LevelPermutation};

/// Outcome of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    /// A replayable witness was found.
    Witness(W),
    /// Nothing found within the stated bounds. Never an unconditional negative.
    UpToBounds,
}

impl<W> Verdict<W> {
    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Witness(w) => Some(w),
            Verdict::UpToBounds => None,
        }
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, Verdict::Witness(_))
    }
}

/// `fixed[r][c]` is true when `p` fixes every point of `X_{p.level()}` over
/// the cell `c ∈ X_r`.
pub(crate) fn fixed_cylinders(model: &ChainModel, p: &LevelPermutation) -> Vec<Vec<bool>> {
    let depth = p.level();
    let mut fixed: Vec<Vec<bool>> = vec![Vec::new(); depth + 1];
    fixed[depth] = (0..p.len()).map(|x| p.fixes(x)).collect();
    for r in (0..depth).rev() {
        fixed[r] = (0..model.point_count(r))
            .map(|c| model.children(r, c).iter().all(|&y| fixed[r + 1][y]))
            .collect();
    }
    fixed
}

/// Whether `p` acts as the identity on every point of `C` at `p`'s level.
pub(crate) fn trivial_on(model: &ChainModel, p: &LevelPermutation, c: &Clopen) -> Result<bool> {
    if c.resolution() > p.level() {
        return Err(invalid(format!(
            "clopen at resolution {} is finer than checking depth {}",
            c.resolution(),
            p.level()
        )));
    }
    Ok(c.points_at(model, p.level())?.into_iter().all(|x| p.fixes(x)))
}
