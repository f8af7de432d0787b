use std::collections::BTreeMap;

use super::coe::Direction;
use crate::error::{invalid, Result};
use crate::model::{ChainModel, Word, WordBound, WordImages};
use crate::regularity::{is_adapted, Clopen};

/// The restriction of a stabilizer word of `U` to the points of `U` at
/// depth `D`: `images[i]` is the image of the `i`-th point in sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolonomyMap {
    pub word: Word,
    pub images: Vec<usize>,
}

/// Distinct restrictions to `U` of the words of length `≤ L` that map `U`
/// onto itself, each with its first word in enumeration order.
pub fn restricted_holonomy(
    model: &ChainModel,
    u: &Clopen,
    bound: impl Into<WordBound>,
    depth: usize,
) -> Result<Vec<HolonomyMap>> {
    let bound = bound.into();
    model.check_level(depth)?;
    if u.resolution() > depth {
        return Err(invalid(format!(
            "clopen {u} is finer than the depth {depth}"
        )));
    }
    let report = is_adapted(model, u, bound)?;
    if !report.is_adapted() {
        return Err(invalid(format!("{u} is not adapted within word length {}", bound.max_len)));
    }
    let pts = u.points_at(model, depth)?;
    let images = WordImages::compute(model, depth, bound)?;
    let mut seen: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
    let mut out = Vec::new();
    for (w, p) in images.iter() {
        let img: Vec<usize> = pts.iter().map(|&x| p.apply(x)).collect();
        let mut sorted = img.clone();
        sorted.sort_unstable();
        if sorted != pts {
            continue;
        }
        if seen.insert(img.clone(), ()).is_none() {
            out.push(HolonomyMap {
                word: w.clone(),
                images: img,
            });
        }
    }
    Ok(out)
}

/// Matched holonomy restrictions under the cell bijection `h`, up to the
/// recorded bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnEquivCertificate {
    pub u1: Clopen,
    pub u2: Clopen,
    pub depth: usize,
    pub max_len: usize,
    /// `(x, h(x))` for the points of `U1` at depth `D`, sorted.
    pub h: Vec<(usize, usize)>,
    /// `(w1, w2)` with `h ∘ w1 ∘ h⁻¹ = w2` on `U2`.
    pub forward: Vec<(Word, Word)>,
    /// `(w2, w1)` with `h⁻¹ ∘ w2 ∘ h = w1` on `U1`.
    pub backward: Vec<(Word, Word)>,
}

impl ReturnEquivCertificate {
    /// Replays every matched pair and checks that each holonomy set,
    /// recomputed at the recorded bounds, is fully matched.
    pub fn verify(&self, m1: &ChainModel, m2: &ChainModel) -> Result<bool> {
        let Ok(hm) = CellMatch::new(m1, &self.u1, m2, &self.u2, &self.h, self.depth) else {
            return Ok(false);
        };
        let h1 = restricted_holonomy(m1, &self.u1, self.max_len, self.depth)?;
        let h2 = restricted_holonomy(m2, &self.u2, self.max_len, self.depth)?;
        let fw: Vec<&Word> = self.forward.iter().map(|(a, _)| a).collect();
        let bw: Vec<&Word> = self.backward.iter().map(|(a, _)| a).collect();
        if h1.iter().map(|m| &m.word).collect::<Vec<_>>() != fw
            || h2.iter().map(|m| &m.word).collect::<Vec<_>>() != bw
        {
            return Ok(false);
        }
        for (w1, w2) in &self.forward {
            let a = hm.restriction(m1, w1, true)?;
            let b = hm.restriction(m2, w2, false)?;
            match (a, b) {
                (Some(a), Some(b)) if hm.conjugate(&a, true) == b => {}
                _ => return Ok(false),
            }
        }
        for (w2, w1) in &self.backward {
            let a = hm.restriction(m2, w2, false)?;
            let b = hm.restriction(m1, w1, true)?;
            match (a, b) {
                (Some(a), Some(b)) if hm.conjugate(&a, false) == b => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReturnEquivOutcome {
    Certified(ReturnEquivCertificate),
    /// The conjugate of `word`'s restriction is missing from the other set.
    Unmatched { direction: Direction, word: Word },
}

/// Sorted points of `U1`, `U2` at depth `D` and the index bijection.
struct CellMatch {
    pts1: Vec<usize>,
    pts2: Vec<usize>,
    fwd: Vec<usize>,
    bwd: Vec<usize>,
    depth: usize,
}

impl CellMatch {
    fn new(
        m1: &ChainModel,
        u1: &Clopen,
        m2: &ChainModel,
        u2: &Clopen,
        h: &[(usize, usize)],
        depth: usize,
    ) -> Result<CellMatch> {
        let pts1 = u1.points_at(m1, depth)?;
        let pts2 = u2.points_at(m2, depth)?;
        if pts1.len() != pts2.len() || h.len() != pts1.len() {
            return Err(invalid(format!(
                "cell counts differ: {} in U1, {} in U2, {} in h",
                pts1.len(),
                pts2.len(),
                h.len()
            )));
        }
        let mut fwd = vec![usize::MAX; pts1.len()];
        let mut bwd = vec![usize::MAX; pts2.len()];
        for &(x, y) in h {
            let i = pts1
                .binary_search(&x)
                .map_err(|_| invalid(format!("h maps {x}, which is not a point of U1")))?;
            let j = pts2
                .binary_search(&y)
                .map_err(|_| invalid(format!("h hits {y}, which is not a point of U2")))?;
            if fwd[i] != usize::MAX || bwd[j] != usize::MAX {
                return Err(invalid("h is not a bijection"));
            }
            fwd[i] = j;
            bwd[j] = i;
        }
        Ok(CellMatch {
            pts1,
            pts2,
            fwd,
            bwd,
            depth,
        })
    }

    /// Restriction of `w` to the chosen side as an index map, if `w`
    /// stabilizes it.
    fn restriction(&self, m: &ChainModel, w: &Word, first: bool) -> Result<Option<Vec<usize>>> {
        let pts = if first { &self.pts1 } else { &self.pts2 };
        let p = m.level_image(w, self.depth)?;
        Ok(pts
            .iter()
            .map(|&x| pts.binary_search(&p.apply(x)).ok())
            .collect())
    }

    /// `h ∘ φ ∘ h⁻¹` when `from_first`, else `h⁻¹ ∘ φ ∘ h`.
    fn conjugate(&self, phi: &[usize], from_first: bool) -> Vec<usize> {
        let (to, back) = if from_first {
            (&self.fwd, &self.bwd)
        } else {
            (&self.bwd, &self.fwd)
        };
        (0..phi.len()).map(|j| to[phi[back[j]]]).collect()
    }

    fn as_indices(&self, map: &HolonomyMap, first: bool) -> Vec<usize> {
        let pts = if first { &self.pts1 } else { &self.pts2 };
        map.images
            .iter()
            .map(|y| pts.binary_search(y).expect("stabilizer image"))
            .collect()
    }
}

/// Checks that conjugation by the cell bijection `h` carries the truncated
/// holonomy of `U1` onto that of `U2` and back.
#[allow(clippy::too_many_arguments)]
pub fn return_equivalence_check(
    m1: &ChainModel,
    u1: &Clopen,
    m2: &ChainModel,
    u2: &Clopen,
    h: &[(usize, usize)],
    bound: impl Into<WordBound>,
    depth: usize,
) -> Result<ReturnEquivOutcome> {
    let bound = bound.into();
    let hm = CellMatch::new(m1, u1, m2, u2, h, depth)?;
    let h1 = restricted_holonomy(m1, u1, bound, depth)?;
    let h2 = restricted_holonomy(m2, u2, bound, depth)?;
    let idx1: BTreeMap<Vec<usize>, &Word> = h1.iter().map(|m| (hm.as_indices(m, true), &m.word)).collect();
    let idx2: BTreeMap<Vec<usize>, &Word> = h2.iter().map(|m| (hm.as_indices(m, false), &m.word)).collect();

    let mut forward = Vec::with_capacity(h1.len());
    for m in &h1 {
        let conj = hm.conjugate(&hm.as_indices(m, true), true);
        match idx2.get(&conj) {
            Some(&w2) => forward.push((m.word.clone(), w2.clone())),
            None => {
                return Ok(ReturnEquivOutcome::Unmatched {
                    direction: Direction::Forward,
                    word: m.word.clone(),
                })
            }
        }
    }
    let mut backward = Vec::with_capacity(h2.len());
    for m in &h2 {
        let conj = hm.conjugate(&hm.as_indices(m, false), false);
        match idx1.get(&conj) {
            Some(&w1) => backward.push((m.word.clone(), w1.clone())),
            None => {
                return Ok(ReturnEquivOutcome::Unmatched {
                    direction: Direction::Backward,
                    word: m.word.clone(),
                })
            }
        }
    }
    Ok(ReturnEquivOutcome::Certified(ReturnEquivCertificate {
        u1: u1.clone(),
        u2: u2.clone(),
        depth,
        max_len: bound.max_len,
        h: hm.pts1.iter().zip(&hm.fwd).map(|(&x, &j)| (x, hm.pts2[j])).collect(),
        forward,
        backward,
    }))
}

/// The identity matching on the points of `U` at depth `D`.
pub fn identity_matching(model: &ChainModel, u: &Clopen, depth: usize) -> Result<Vec<(usize, usize)>> {
    Ok(u.points_at(model, depth)?.into_iter().map(|x| (x, x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_odometer, build_product_toy, CayleyTable};

    #[test]
    fn even_residues_mod_eight() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let u = Clopen::cylinder(&m, 1, 0).unwrap();
        let h = restricted_holonomy(&m, &u, 4, 3).unwrap();
        let words: Vec<String> = h.iter().map(|x| m.alphabet().render(&x.word)).collect();
        // t^4 and t^-4 agree mod 8
        assert_eq!(words, vec!["1", "t*t", "t^-1*t^-1", "t*t*t*t"]);
    }

    #[test]
    fn zero_length_is_identity_only() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let h = restricted_holonomy(&m, &Clopen::full(), 0, 3).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].images, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn identity_matching_certifies() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let u = Clopen::cylinder(&m, 1, 0).unwrap();
        let h = identity_matching(&m, &u, 3).unwrap();
        let ReturnEquivOutcome::Certified(c) = return_equivalence_check(&m, &u, &m, &u, &h, 4, 3).unwrap() else {
            panic!("expected certificate");
        };
        assert!(c.verify(&m, &m).unwrap());
    }

    #[test]
    fn swapped_cells_fail() {
        let m = build_odometer(&[2, 2]).unwrap();
        let u = Clopen::full();
        let h = vec![(0, 1), (1, 0), (2, 2), (3, 3)];
        match return_equivalence_check(&m, &u, &m, &u, &h, 4, 2).unwrap() {
            ReturnEquivOutcome::Unmatched { direction, word } => {
                assert_eq!(direction, Direction::Forward);
                assert_eq!(m.alphabet().render(&word), "t");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn product_toys_share_fiber_holonomy() {
        let (a, b) = build_product_toy(&CayleyTable::cyclic(4).unwrap(), &CayleyTable::klein_four(), &[2, 2])
            .unwrap();
        let u = Clopen::cylinder(&a, 1, 0).unwrap();
        let h = identity_matching(&a, &u, 3).unwrap();
        let out = return_equivalence_check(&a, &u, &b, &u, &h, 3, 3).unwrap();
        assert!(matches!(out, ReturnEquivOutcome::Certified(_)));
    }

    #[test]
    fn count_mismatch_rejected() {
        let m = build_odometer(&[2, 2]).unwrap();
        let u1 = Clopen::cylinder(&m, 1, 0).unwrap();
        let h = identity_matching(&m, &u1, 2).unwrap();
        assert!(return_equivalence_check(&m, &u1, &m, &Clopen::full(), &h, 2, 2).is_err());
    }
}
