use std::collections::BTreeSet;

use super::{fixed_cylinders, trivial_on, translate_clopen, Clopen, Verdict};
use crate::error::{invalid, Result};
use crate::model::{ChainModel, Word, WordBound, WordImages};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdaptedVerdict {
    AdaptedUpToBound,
    /// `word·U` meets `U` without being equal to it.
    Violated { word: Word, translate: Clopen },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedSetReport {
    pub clopen: Clopen,
    pub word_len: usize,
    pub verdict: AdaptedVerdict,
    /// Distinct translates of `U` seen; the observed index `[G : G_U]`.
    pub translate_count: usize,
}

impl AdaptedSetReport {
    pub fn is_adapted(&self) -> bool {
        self.verdict == AdaptedVerdict::AdaptedUpToBound
    }

    /// Replays a violation with `translate_clopen`. Adapted verdicts replay
    /// trivially.
    pub fn verify(&self, model: &ChainModel) -> Result<bool> {
        match &self.verdict {
            AdaptedVerdict::AdaptedUpToBound => Ok(true),
            AdaptedVerdict::Violated { word, translate } => {
                let t = translate_clopen(model, word, &self.clopen)?;
                Ok(&t == translate
                    && !t.is_disjoint(&self.clopen, model)?
                    && !t.same_set(&self.clopen, model)?)
            }
        }
    }
}

/// Tests `w·U = U` or `w·U ∩ U = ∅` for all reduced words up to the bound.
pub fn is_adapted(model: &ChainModel, u: &Clopen, bound: impl Into<WordBound>) -> Result<AdaptedSetReport> {
    let bound = bound.into();
    if u.is_empty() {
        return Err(invalid("adaptedness is defined for non-empty clopen sets"));
    }
    let images = WordImages::compute(model, u.resolution(), bound)?;
    let mut translates = BTreeSet::new();
    for (w, p) in images.iter() {
        let mut cells: Vec<usize> = u.cells().iter().map(|&c| p.apply(c)).collect();
        cells.sort_unstable();
        let meets = cells.iter().any(|c| u.cells().binary_search(c).is_ok());
        if meets && cells != u.cells() {
            let translate = Clopen::from_sorted(u.resolution(), cells);
            translates.insert(translate.cells().to_vec());
            return Ok(AdaptedSetReport {
                clopen: u.clone(),
                word_len: bound.max_len,
                verdict: AdaptedVerdict::Violated {
                    word: w.clone(),
                    translate,
                },
                translate_count: translates.len(),
            });
        }
        translates.insert(cells);
    }
    Ok(AdaptedSetReport {
        clopen: u.clone(),
        word_len: bound.max_len,
        verdict: AdaptedVerdict::AdaptedUpToBound,
        translate_count: translates.len(),
    })
}

/// Cells of `X_ℓ` fixed by the level image of `w`: the level-`ℓ`
/// over-approximation of `Fix(w)`.
pub fn fixed_cylinder_set(model: &ChainModel, w: &Word, level: usize) -> Result<Clopen> {
    let p = model.level_image(w, level)?;
    Ok(Clopen::from_sorted(
        level,
        (0..p.len()).filter(|&x| p.fixes(x)).collect(),
    ))
}

/// A word that is nontrivial at `depth` yet acts trivially on a whole
/// cylinder coarser than `depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreenessWitness {
    pub word: Word,
    pub cylinder: Clopen,
    pub depth: usize,
}

impl FreenessWitness {
    pub fn verify(&self, model: &ChainModel) -> Result<bool> {
        if self.cylinder.is_empty() || self.cylinder.resolution() >= self.depth {
            return Ok(false);
        }
        let p = model.level_image(&self.word, self.depth)?;
        Ok(!p.is_identity() && trivial_on(model, &p, &self.cylinder)?)
    }
}

/// Searches for a word acting nontrivially that fixes every point of some
/// cylinder. `depth` caps the cylinder level; triviality is certified at the
/// model's deepest level, strictly below which the cylinder must lie. The
/// witness has the coarsest such cylinder (lowest level, then lowest cell),
/// and among those the first word in enumeration order.
pub fn topological_freeness_check(
    model: &ChainModel,
    bound: impl Into<WordBound>,
    depth: usize,
) -> Result<Verdict<FreenessWitness>> {
    model.check_level(depth)?;
    let top = model.depth();
    if top == 0 {
        return Err(invalid("freeness needs a model of depth at least 1"));
    }
    let max_cyl = depth.min(top - 1);
    let images = WordImages::compute(model, top, bound.into())?;
    let tables: Vec<(&Word, Vec<Vec<bool>>)> = images
        .iter()
        .filter(|(_, p)| !p.is_identity())
        .map(|(w, p)| (w, fixed_cylinders(model, p)))
        .collect();
    // coarsest cylinder first, then word order
    for r in 0..=max_cyl {
        for (w, fixed) in &tables {
            if let Some(c) = fixed[r].iter().position(|&f| f) {
                return Ok(Verdict::Witness(FreenessWitness {
                    word: (*w).clone(),
                    cylinder: Clopen::from_sorted(r, vec![c]),
                    depth: top,
                }));
            }
        }
    }
    Ok(Verdict::UpToBounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_dihedral, build_grigorchuk, build_odometer};

    #[test]
    fn basepoint_cylinder_is_adapted_with_full_index() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        for l in 0..=3 {
            let u = Clopen::basepoint_cylinder(&m, l).unwrap();
            let r = is_adapted(&m, &u, 8).unwrap();
            assert!(r.is_adapted());
            assert_eq!(r.translate_count, m.point_count(l));
        }
    }

    #[test]
    fn adjacent_pair_is_not_adapted() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let u = Clopen::new(&m, 2, [0, 1]).unwrap();
        let r = is_adapted(&m, &u, 1).unwrap();
        match &r.verdict {
            AdaptedVerdict::Violated { word, translate } => {
                assert_eq!(word, &Word::power(0, 1));
                assert_eq!(translate.cells(), &[1, 2]);
            }
            v => panic!("expected violation, got {v:?}"),
        }
        assert!(r.verify(&m).unwrap());
    }

    #[test]
    fn parity_class_is_adapted() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let u = Clopen::new(&m, 2, [0, 2]).unwrap();
        let r = is_adapted(&m, &u, 4).unwrap();
        assert!(r.is_adapted());
        assert_eq!(r.translate_count, 2);
    }

    #[test]
    fn empty_clopen_rejected() {
        let m = build_odometer(&[2, 2]).unwrap();
        assert!(is_adapted(&m, &Clopen::empty(), 2).is_err());
    }

    #[test]
    fn fixed_sets() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        assert!(fixed_cylinder_set(&m, &Word::empty(), 3)
            .unwrap()
            .same_set(&Clopen::full(), &m)
            .unwrap());
        for l in 1..=3 {
            assert!(fixed_cylinder_set(&m, &Word::power(0, 1), l).unwrap().is_empty());
        }
        let g = build_grigorchuk(3).unwrap();
        let d = g.alphabet().parse_word("d").unwrap();
        let fixed = fixed_cylinder_set(&g, &d, 3).unwrap();
        let left = Clopen::cylinder(&g, 1, 0).unwrap();
        assert!(left.is_subset(&fixed, &g).unwrap());
    }

    #[test]
    fn dihedral_flip_fixes_only_zero() {
        let m = build_dihedral(3, 3).unwrap();
        let s = m.alphabet().parse_word("s").unwrap();
        for l in 1..=3 {
            assert_eq!(fixed_cylinder_set(&m, &s, l).unwrap().cells(), &[0]);
        }
    }

    #[test]
    fn odometer_is_free_up_to_bounds() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        assert_eq!(topological_freeness_check(&m, 7, 3).unwrap(), Verdict::UpToBounds);
    }

    #[test]
    fn grigorchuk_d_is_a_freeness_witness() {
        let g = build_grigorchuk(4).unwrap();
        let v = topological_freeness_check(&g, 1, 3).unwrap();
        let w = v.witness().expect("witness");
        assert_eq!(g.alphabet().render(&w.word), "d");
        assert_eq!(w.cylinder, Clopen::cylinder(&g, 1, 0).unwrap());
        assert!(w.verify(&g).unwrap());
    }

    #[test]
    fn dihedral_is_free_up_to_bounds() {
        let m = build_dihedral(3, 3).unwrap();
        for d in 1..=3 {
            assert_eq!(topological_freeness_check(&m, 1, d).unwrap(), Verdict::UpToBounds);
        }
    }
}
