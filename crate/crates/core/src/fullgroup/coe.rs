use std::fmt;

use super::piecewise::{validate_piecewise, PiecewiseElement};
use crate::error::{invalid, Result};
use crate::model::{ActionLevel, ChainModel, LevelPermutation, Word, WordBound, WordImages};
use crate::regularity::Clopen;

/// Which model's generators are being expressed in the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Generators of the first model, words of the second.
    Forward,
    /// Generators of the second model, words of the first.
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "first-to-second",
            Direction::Backward => "second-to-first",
        })
    }
}

/// Writes the level-`D` permutation `f` as a piecewise element of the
/// target, `D = f.level()`.
///
/// Cells are visited from the root down. A cell becomes a piece as soon as
/// one word of length `≤ L` agrees with `f` on all its points at depth `D`;
/// otherwise its children are tried. Pieces stay strictly coarser than `D`,
/// so `None` means some cell of `X_{D−1}` has no such word.
pub fn express_in_full_group(
    target: &ChainModel,
    f: &LevelPermutation,
    bound: impl Into<WordBound>,
) -> Result<Option<PiecewiseElement>> {
    let depth = f.level();
    target.check_level(depth)?;
    if depth == 0 {
        return Err(invalid("full-group expressions need depth at least 1"));
    }
    if f.len() != target.point_count(depth) {
        return Err(invalid(format!(
            "permutation has {} points, level {depth} has {}",
            f.len(),
            target.point_count(depth)
        )));
    }
    let images = WordImages::compute(target, depth, bound.into())?;
    let mut pieces = Vec::new();
    let mut stack = vec![(0usize, 0usize)];
    while let Some((l, c)) = stack.pop() {
        let pts = target.descendants(l, c, depth);
        let hit = images
            .iter()
            .find(|(_, p)| pts.iter().all(|&x| p.apply(x) == f.apply(x)));
        match hit {
            Some((w, _)) => pieces.push((Clopen::from_sorted(l, vec![c]), w.clone())),
            None if l + 1 < depth => {
                stack.extend(target.children(l, c).iter().rev().map(|&k| (l + 1, k)));
            }
            None => return Ok(None),
        }
    }
    PiecewiseElement::new(target, pieces).map(Some)
}

/// Generator tables in both directions, valid up to the recorded bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeCertificate {
    /// `(generator of model 1, element over model 2)`.
    pub forward: Vec<(String, PiecewiseElement)>,
    /// `(generator of model 2, element over model 1)`.
    pub backward: Vec<(String, PiecewiseElement)>,
    pub max_len: usize,
    pub depth: usize,
}

impl CoeCertificate {
    pub fn swapped(&self) -> CoeCertificate {
        CoeCertificate {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            max_len: self.max_len,
            depth: self.depth,
        }
    }

    pub fn max_pieces(&self) -> usize {
        self.forward
            .iter()
            .chain(&self.backward)
            .map(|(_, pe)| pe.pieces().len())
            .max()
            .unwrap_or(0)
    }

    /// Every entry validates over its target, stays coarser than the depth
    /// and reproduces the generator's level-`D` image.
    pub fn verify(&self, m1: &ChainModel, m2: &ChainModel) -> Result<bool> {
        if !m1.same_tree(m2, self.depth) || self.depth == 0 {
            return Ok(false);
        }
        Ok(table_replays(m1, m2, &self.forward, self.depth)?
            && table_replays(m2, m1, &self.backward, self.depth)?)
    }
}

fn table_replays(
    source: &ChainModel,
    target: &ChainModel,
    table: &[(String, PiecewiseElement)],
    depth: usize,
) -> Result<bool> {
    if table.len() != source.alphabet().len() {
        return Ok(false);
    }
    for (g, (name, pe)) in table.iter().enumerate() {
        if name != source.alphabet().symbol(g) || pe.resolution() >= depth {
            return Ok(false);
        }
        if validate_piecewise(target, pe, depth).is_err() {
            return Ok(false);
        }
        let image = source.level_image(&Word::power(g, 1), depth)?;
        if pe.cell_map(target, depth)? != image.images() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoeOutcome {
    Certified(CoeCertificate),
    /// No expression within bounds for this generator.
    NotFound { direction: Direction, generator: String },
}

fn express_all(
    source: &ChainModel,
    target: &ChainModel,
    bound: WordBound,
    depth: usize,
    direction: Direction,
) -> Result<std::result::Result<Vec<(String, PiecewiseElement)>, CoeOutcome>> {
    let mut table = Vec::new();
    for g in 0..source.alphabet().len() {
        let name = source.alphabet().symbol(g).to_string();
        let f = source.level_image(&Word::power(g, 1), depth)?;
        match express_in_full_group(target, &f, bound)? {
            Some(pe) => table.push((name, pe)),
            None => {
                return Ok(Err(CoeOutcome::NotFound {
                    direction,
                    generator: name,
                }))
            }
        }
    }
    Ok(Ok(table))
}

/// Expresses every generator of each model in the full group of the other
/// at depth `D`. The models must share their tree down to `D`.
pub fn coe_check(
    m1: &ChainModel,
    m2: &ChainModel,
    bound: impl Into<WordBound>,
    depth: usize,
) -> Result<CoeOutcome> {
    let bound = bound.into();
    m1.check_level(depth)?;
    m2.check_level(depth)?;
    if depth == 0 {
        return Err(invalid("coe_check needs depth at least 1"));
    }
    if !m1.same_tree(m2, depth) {
        return Err(invalid(format!(
            "models {} and {} do not share their tree down to level {depth}",
            m1.name(),
            m2.name()
        )));
    }
    let forward = match express_all(m1, m2, bound, depth, Direction::Forward)? {
        Ok(t) => t,
        Err(fail) => return Ok(fail),
    };
    let backward = match express_all(m2, m1, bound, depth, Direction::Backward)? {
        Ok(t) => t,
        Err(fail) => return Ok(fail),
    };
    Ok(CoeOutcome::Certified(CoeCertificate {
        forward,
        backward,
        max_len: bound.max_len,
        depth,
    }))
}

/// A new generator `name` acting by `image` on `U` and trivially outside;
/// `source` is the stabilizer word it replaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistGenerator {
    pub name: String,
    pub source: Word,
    pub image: Word,
}

/// Extends the alphabet of `m` by one symbol per twist generator. The new
/// symbol acts by its image word on points of `U` and fixes the rest; at
/// levels coarser than `U` the action is the projected one, which must be
/// well defined.
pub fn twist_action(m: &ChainModel, u: &Clopen, twists: &[TwistGenerator]) -> Result<ChainModel> {
    if u.is_empty() {
        return Err(invalid("the twist set must be non-empty"));
    }
    if twists.is_empty() {
        return Err(invalid("a twist needs at least one generator"));
    }
    let r = u.resolution();
    let u_cells = u.refine(m, r)?;
    for t in twists {
        for (role, w) in [("source", &t.source), ("image", &t.image)] {
            m.check_word(w)?;
            let p = m.level_image(w, r)?;
            let mut moved: Vec<usize> = u_cells.cells().iter().map(|&c| p.apply(c)).collect();
            moved.sort_unstable();
            if moved != u_cells.cells() {
                return Err(invalid(format!(
                    "{role} word {} of {} does not stabilize {u}",
                    m.alphabet().render(w),
                    t.name
                )));
            }
        }
    }
    let alphabet = m.alphabet().extended(twists.iter().map(|t| t.name.clone()))?;
    let top = m.depth();
    // deep[l][k] for l ≥ r
    let mut deep: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 1];
    for l in r..=top {
        deep[l] = twists
            .iter()
            .map(|t| {
                let p = m.level_image(&t.image, l)?;
                Ok((0..m.point_count(l))
                    .map(|x| if u.contains_point(m, l, x) { p.apply(x) } else { x })
                    .collect())
            })
            .collect::<Result<_>>()?;
    }
    for l in (0..r).rev() {
        deep[l] = (0..twists.len())
            .map(|k| {
                (0..m.point_count(l))
                    .map(|x| {
                        let images: Vec<usize> = m
                            .children(l, x)
                            .iter()
                            .map(|&y| m.ancestor(l + 1, deep[l + 1][k][y], l))
                            .collect();
                        if images.windows(2).any(|w| w[0] != w[1]) {
                            return Err(invalid(format!(
                                "twist generator {} has no well-defined action at level {l}",
                                twists[k].name
                            )));
                        }
                        Ok(images[0])
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()?;
    }
    let levels = m
        .levels()
        .iter()
        .enumerate()
        .map(|(l, lv)| {
            let mut gens = lv.generator_images().to_vec();
            for img in &deep[l] {
                gens.push(LevelPermutation::new(l, img.clone())?);
            }
            ActionLevel::new(l, gens, lv.projection().map(<[usize]>::to_vec), lv.basepoint())
        })
        .collect::<Result<Vec<_>>>()?;
    ChainModel::new(format!("{}+twist", m.name()), alphabet, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullgroup::piecewise::canonicalize;
    use crate::gallery::{build_grigorchuk, build_odometer, build_product_toy, CayleyTable};
    use crate::model::validate_chain;
    use crate::regularity::topological_freeness_check;

    #[test]
    fn own_generator_is_a_single_piece() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let f = m.level_image(&Word::power(0, 1), 3).unwrap();
        let pe = express_in_full_group(&m, &f, 1).unwrap().unwrap();
        assert_eq!(pe, PiecewiseElement::global(Word::power(0, 1)));
    }

    #[test]
    fn cell_swap_is_not_expressible() {
        let m = build_odometer(&[2, 2]).unwrap();
        let f = LevelPermutation::from_cycles(2, 4, "(0 1)").unwrap();
        assert_eq!(express_in_full_group(&m, &f, 4).unwrap(), None);
    }

    #[test]
    fn product_toys_are_orbit_equivalent() {
        let (a, b) = build_product_toy(&CayleyTable::cyclic(4).unwrap(), &CayleyTable::klein_four(), &[2, 2])
            .unwrap();
        let CoeOutcome::Certified(cert) = coe_check(&a, &b, 1, 3).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.max_pieces() <= 4);
        assert!(cert.verify(&a, &b).unwrap());
        assert!(cert.swapped().verify(&b, &a).unwrap());
        let step = &cert.forward[0].1;
        assert_eq!(step.pieces().len(), 4);
        assert_eq!(step.distinct_words().len(), 2);
    }

    #[test]
    fn plus_one_squared_has_two_words() {
        let (a, b) = build_product_toy(&CayleyTable::cyclic(4).unwrap(), &CayleyTable::klein_four(), &[2])
            .unwrap();
        let f = a.level_image(&Word::power(0, 1), 2).unwrap();
        let pe = express_in_full_group(&b, &f, 1).unwrap().unwrap();
        let sq = crate::fullgroup::compose_piecewise(&b, &pe, &pe).unwrap();
        validate_piecewise(&b, &sq, 2).unwrap();
        let sq = canonicalize(&b, &sq).unwrap();
        assert_eq!(sq.distinct_words().len(), 2);
    }

    #[test]
    fn self_check_is_single_pieces() {
        let g = build_grigorchuk(3).unwrap();
        let CoeOutcome::Certified(cert) = coe_check(&g, &g, 1, 3).unwrap() else {
            panic!("expected a certificate");
        };
        assert_eq!(cert.max_pieces(), 1);
    }

    #[test]
    fn different_trees_rejected() {
        let a = build_odometer(&[2, 2]).unwrap();
        let b = build_odometer(&[2, 3]).unwrap();
        assert!(coe_check(&a, &b, 1, 2).is_err());
    }

    fn twisted() -> (ChainModel, ChainModel) {
        let m = build_odometer(&[2, 2, 2, 2]).unwrap();
        let u = Clopen::cylinder(&m, 1, 0).unwrap();
        let tw = TwistGenerator {
            name: "s".into(),
            source: Word::power(0, 2),
            image: Word::power(0, -2),
        };
        let ext = twist_action(&m, &u, &[tw]).unwrap();
        (m, ext)
    }

    #[test]
    fn twist_acts_inside_only() {
        let (m, ext) = twisted();
        assert!(validate_chain(&ext).is_valid());
        let s = ext.alphabet().parse_word("s").unwrap();
        let p = ext.level_image(&s, 4).unwrap();
        for x in 0..16 {
            let want = if x % 2 == 0 { (x + 14) % 16 } else { x };
            assert_eq!(p.apply(x), want);
        }
        let CoeOutcome::Certified(cert) = coe_check(&m, &ext, 2, 4).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.verify(&m, &ext).unwrap());
        assert_eq!(cert.backward[1].1.pieces().len(), 2);
    }

    #[test]
    fn twist_breaks_freeness() {
        let (_, ext) = twisted();
        let v = topological_freeness_check(&ext, 1, 4).unwrap();
        let w = v.witness().expect("witness");
        assert_eq!(ext.alphabet().render(&w.word), "s");
        let u = Clopen::cylinder(&ext, 1, 0).unwrap();
        assert!(w.cylinder.is_disjoint(&u, &ext).unwrap());
    }

    #[test]
    fn twist_rejects_non_stabilizing_word() {
        let m = build_odometer(&[2, 2]).unwrap();
        let u = Clopen::cylinder(&m, 1, 0).unwrap();
        let tw = TwistGenerator {
            name: "s".into(),
            source: Word::power(0, 2),
            image: Word::power(0, 1),
        };
        assert!(twist_action(&m, &u, &[tw]).is_err());
    }
}
