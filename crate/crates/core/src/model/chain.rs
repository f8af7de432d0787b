use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::model::search::{WordBound, WordImages};
use crate::model::{GeneratorAlphabet, LevelPermutation, Letter, Word};

/// One finite level `X_ℓ` of a chain model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionLevel {
    level: usize,
    generator_images: Vec<LevelPermutation>,
    inverse_images: Vec<LevelPermutation>,
    projection: Option<Vec<usize>>,
    basepoint: usize,
}

impl ActionLevel {
    /// `projection` must be `None` exactly at level 0.
    pub fn new(
        level: usize,
        generator_images: Vec<LevelPermutation>,
        projection: Option<Vec<usize>>,
        basepoint: usize,
    ) -> Result<Self> {
        let n = generator_images
            .first()
            .map(LevelPermutation::len)
            .ok_or_else(|| invalid(format!("level {level} has no generator images")))?;
        if n == 0 {
            return Err(invalid(format!("level {level} is empty")));
        }
        for p in &generator_images {
            if p.len() != n {
                return Err(invalid(format!(
                    "generator images at level {level} disagree on the point count"
                )));
            }
        }
        if basepoint >= n {
            return Err(invalid(format!("basepoint {basepoint} outside level {level}")));
        }
        match (&projection, level) {
            (Some(_), 0) => return Err(invalid("level 0 cannot carry a projection")),
            (None, l) if l > 0 => {
                return Err(invalid(format!("level {l} is missing its projection")))
            }
            (Some(p), _) if p.len() != n => {
                return Err(invalid(format!(
                    "projection at level {level} has {} entries, expected {n}",
                    p.len()
                )))
            }
            _ => {}
        }
        let generator_images: Vec<LevelPermutation> = generator_images
            .into_iter()
            .map(|p| LevelPermutation::new_unchecked(level, p.images().to_vec()))
            .collect();
        let inverse_images = generator_images.iter().map(|p| p.inverse()).collect();
        Ok(ActionLevel {
            level,
            generator_images,
            inverse_images,
            projection,
            basepoint,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn point_count(&self) -> usize {
        self.generator_images[0].len()
    }

    pub fn generator_images(&self) -> &[LevelPermutation] {
        &self.generator_images
    }

    pub fn projection(&self) -> Option<&[usize]> {
        self.projection.as_deref()
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }
}

/// A finitely generated group acting level by level on a rooted tree of
/// finite sets: the truncated odometer `X_0 ← X_1 ← ⋯ ← X_{L_max}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainModel {
    name: String,
    alphabet: GeneratorAlphabet,
    levels: Vec<ActionLevel>,
    children: Vec<Vec<Vec<usize>>>,
}

impl ChainModel {
    /// Structural checks only. Chain properties (transitivity, equivariance,
    /// uniform fibers) are reported by [`validate_chain`].
    pub fn new(
        name: impl Into<String>,
        alphabet: GeneratorAlphabet,
        levels: Vec<ActionLevel>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("a chain model needs at least level 0"));
        }
        for (i, lvl) in levels.iter().enumerate() {
            if lvl.level != i {
                return Err(invalid(format!(
                    "levels must be dense: found level {} at position {i}",
                    lvl.level
                )));
            }
            if lvl.generator_images.len() != alphabet.len() {
                return Err(invalid(format!(
                    "level {i} has {} generator images for {} symbols",
                    lvl.generator_images.len(),
                    alphabet.len()
                )));
            }
            if let Some(proj) = &lvl.projection {
                let below = levels[i - 1].point_count();
                if let Some(&bad) = proj.iter().find(|&&y| y >= below) {
                    return Err(invalid(format!(
                        "projection at level {i} maps to {bad}, outside level {} of size {below}",
                        i - 1
                    )));
                }
            }
        }
        if levels[0].point_count() != 1 {
            return Err(invalid("level 0 must be a single point"));
        }
        let mut children = Vec::with_capacity(levels.len());
        for i in 0..levels.len() {
            let mut fib = vec![Vec::new(); levels[i].point_count()];
            if let Some(next) = levels.get(i + 1) {
                for (y, &x) in next.projection.as_ref().unwrap().iter().enumerate() {
                    fib[x].push(y);
                }
            }
            children.push(fib);
        }
        Ok(ChainModel {
            name: name.into(),
            alphabet,
            levels,
            children,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &GeneratorAlphabet {
        &self.alphabet
    }

    pub fn levels(&self) -> &[ActionLevel] {
        &self.levels
    }

    /// `L_max`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn point_count(&self, level: usize) -> usize {
        self.levels[level].point_count()
    }

    pub fn basepoint(&self, level: usize) -> usize {
        self.levels[level].basepoint
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            Err(Error::LevelOutOfRange {
                level,
                max: self.depth(),
            })
        } else {
            Ok(())
        }
    }

    pub fn check_point(&self, level: usize, x: usize) -> Result<()> {
        self.check_level(level)?;
        if x >= self.point_count(level) {
            return Err(invalid(format!("point {x} outside level {level}")));
        }
        Ok(())
    }

    pub fn letter_image(&self, level: usize, letter: Letter) -> &LevelPermutation {
        let lvl = &self.levels[level];
        if letter.inverse && !self.alphabet.is_involutive(letter.generator) {
            &lvl.inverse_images[letter.generator]
        } else {
            &lvl.generator_images[letter.generator]
        }
    }

    /// Image of `x ∈ X_ℓ` under its projection to `X_{to}` (`to ≤ level`).
    pub fn ancestor(&self, level: usize, x: usize, to: usize) -> usize {
        debug_assert!(to <= level);
        let mut x = x;
        for l in (to + 1..=level).rev() {
            x = self.levels[l].projection.as_ref().unwrap()[x];
        }
        x
    }

    /// Points of `X_{ℓ+1}` lying over `x ∈ X_ℓ`.
    pub fn children(&self, level: usize, x: usize) -> &[usize] {
        &self.children[level][x]
    }

    /// All points of `X_{to}` lying over `x ∈ X_ℓ`, in ascending order.
    pub fn descendants(&self, level: usize, x: usize, to: usize) -> Vec<usize> {
        let mut current = vec![x];
        for l in level..to {
            current = current
                .iter()
                .flat_map(|&c| self.children[l][c].iter().copied())
                .collect();
        }
        current.sort_unstable();
        current
    }

    /// True if both models have identical point sets and projections at every
    /// level up to `depth`.
    pub fn same_tree(&self, other: &ChainModel, depth: usize) -> bool {
        depth <= self.depth()
            && depth <= other.depth()
            && (0..=depth).all(|l| {
                self.point_count(l) == other.point_count(l)
                    && self.levels[l].projection == other.levels[l].projection
            })
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        self.alphabet.check_word(w)
    }

    /// Composite of the generator images along `w` at level `ℓ`; the last
    /// letter acts first.
    pub fn level_image(&self, w: &Word, level: usize) -> Result<LevelPermutation> {
        self.check_level(level)?;
        self.check_word(w)?;
        let n = self.point_count(level);
        let perms: Vec<&LevelPermutation> = w
            .letters()
            .iter()
            .rev()
            .map(|&l| self.letter_image(level, l))
            .collect();
        let images = (0..n)
            .map(|x| perms.iter().fold(x, |y, p| p.apply(y)))
            .collect();
        Ok(LevelPermutation::new_unchecked(level, images))
    }

    /// Membership of `w` in `G_ℓ`: the level-`ℓ` image fixes the basepoint.
    pub fn stabilizer_member(&self, w: &Word, level: usize) -> Result<bool> {
        let p = self.level_image(w, level)?;
        Ok(p.fixes(self.basepoint(level)))
    }

    /// Reduced words of length at most `L` acting trivially on `X_ℓ`,
    /// including the empty word.
    pub fn kernel_words(&self, level: usize, bound: impl Into<WordBound>) -> Result<Vec<Word>> {
        let images = WordImages::compute(self, level, bound.into())?;
        Ok(images
            .entries
            .into_iter()
            .filter(|(_, p)| p.is_identity())
            .map(|(w, _)| w)
            .collect())
    }

    /// Points reachable from `x` by words of length at most `max_len`.
    pub fn orbit_of_point(&self, level: usize, x: usize, max_len: usize) -> Result<BTreeSet<usize>> {
        self.check_point(level, x)?;
        let letters = self.alphabet.letters();
        let mut seen = BTreeSet::from([x]);
        let mut frontier = vec![x];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for &y in &frontier {
                for &l in &letters {
                    let z = self.letter_image(level, l).apply(y);
                    if seen.insert(z) {
                        next.push(z);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(seen)
    }

    /// Orbits of the level action, each sorted, ordered by least element.
    pub fn orbits(&self, level: usize) -> Vec<Vec<usize>> {
        let n = self.point_count(level);
        let mut seen = vec![false; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut i = 0;
            while i < orbit.len() {
                let y = orbit[i];
                for p in &self.levels[level].generator_images {
                    let z = p.apply(y);
                    if !seen[z] {
                        seen[z] = true;
                        orbit.push(z);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    /// The path through `x ∈ X_ℓ` from the root.
    pub fn path_point(&self, level: usize, x: usize) -> Result<PathPoint> {
        self.check_point(level, x)?;
        let coordinates = (0..=level).map(|l| self.ancestor(level, x, l)).collect();
        Ok(PathPoint { coordinates })
    }

    /// The basepoint path `e_0, e_1, …, e_D`.
    pub fn base_path(&self, depth: usize) -> Result<PathPoint> {
        self.check_level(depth)?;
        Ok(PathPoint {
            coordinates: (0..=depth).map(|l| self.basepoint(l)).collect(),
        })
    }

    /// Replaces the display name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// A truncated point of the inverse limit: `x_0, x_1, …, x_D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathPoint {
    coordinates: Vec<usize>,
}

impl PathPoint {
    pub fn new(model: &ChainModel, coordinates: Vec<usize>) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(invalid("a path point needs at least the root coordinate"));
        }
        let depth = coordinates.len() - 1;
        model.check_level(depth)?;
        for (l, &x) in coordinates.iter().enumerate() {
            model.check_point(l, x)?;
            if l > 0 && model.ancestor(l, x, l - 1) != coordinates[l - 1] {
                return Err(invalid(format!(
                    "path coordinate {x} at level {l} does not project to {}",
                    coordinates[l - 1]
                )));
            }
        }
        Ok(PathPoint { coordinates })
    }

    pub fn depth(&self) -> usize {
        self.coordinates.len() - 1
    }

    pub fn coordinates(&self) -> &[usize] {
        &self.coordinates
    }

    pub fn at(&self, level: usize) -> usize {
        self.coordinates[level]
    }
}

/// Chain checks for one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelChecks {
    pub level: usize,
    pub orbit_count: usize,
    pub transitive: bool,
    /// First `(generator, point)` with `proj(g·x) ≠ g·proj(x)`.
    pub equivariance_violation: Option<(usize, usize)>,
    pub basepoint_compatible: bool,
    pub fibers_uniform: bool,
}

impl LevelChecks {
    pub fn passed(&self) -> bool {
        self.transitive
            && self.equivariance_violation.is_none()
            && self.basepoint_compatible
            && self.fibers_uniform
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub levels: Vec<LevelChecks>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.levels.iter().all(LevelChecks::passed)
    }

    pub fn first_failure(&self) -> Option<&LevelChecks> {
        self.levels.iter().find(|l| !l.passed())
    }
}

/// Exhaustive chain validation at every level.
pub fn validate_chain(model: &ChainModel) -> ValidationReport {
    let mut levels = Vec::with_capacity(model.levels.len());
    for (l, lvl) in model.levels.iter().enumerate() {
        let orbit_count = model.orbits(l).len();
        let mut checks = LevelChecks {
            level: l,
            orbit_count,
            transitive: orbit_count == 1,
            equivariance_violation: None,
            basepoint_compatible: true,
            fibers_uniform: true,
        };
        if let Some(proj) = &lvl.projection {
            let below = &model.levels[l - 1];
            'outer: for (g, p) in lvl.generator_images.iter().enumerate() {
                let q = &below.generator_images[g];
                for x in 0..lvl.point_count() {
                    if proj[p.apply(x)] != q.apply(proj[x]) {
                        checks.equivariance_violation = Some((g, x));
                        break 'outer;
                    }
                }
            }
            checks.basepoint_compatible = proj[lvl.basepoint] == below.basepoint;
            let n = lvl.point_count();
            let m = below.point_count();
            let sizes = &model.children[l - 1];
            checks.fibers_uniform =
                n % m == 0 && sizes.iter().all(|f| f.len() == n / m);
        }
        levels.push(checks);
    }
    ValidationReport { levels }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z/2^d with t = +1, built directly so this module does not depend on
    /// the gallery.
    pub(crate) fn cyclic_tower(depth: usize) -> ChainModel {
        let alphabet = GeneratorAlphabet::new(["t"]).unwrap();
        let levels = (0..=depth)
            .map(|l| {
                let n = 1usize << l;
                let t = LevelPermutation::new(l, (0..n).map(|x| (x + 1) % n).collect()).unwrap();
                let proj = (l > 0).then(|| (0..n).map(|x| x % (n / 2)).collect());
                ActionLevel::new(l, vec![t], proj, 0).unwrap()
            })
            .collect();
        ChainModel::new("tower", alphabet, levels).unwrap()
    }

    #[test]
    fn empty_word_is_identity() {
        let m = cyclic_tower(3);
        assert!(m.level_image(&Word::empty(), 3).unwrap().is_identity());
    }

    #[test]
    fn stabilizer_membership() {
        let m = cyclic_tower(3);
        assert!(!m.stabilizer_member(&Word::power(0, 1), 3).unwrap());
        assert!(m.stabilizer_member(&Word::power(0, 8), 3).unwrap());
        assert!(m.stabilizer_member(&Word::empty(), 2).unwrap());
    }

    #[test]
    fn kernel_of_length_zero_is_identity_only() {
        let m = cyclic_tower(3);
        assert_eq!(m.kernel_words(2, 0).unwrap(), vec![Word::empty()]);
    }

    #[test]
    fn kernel_at_level_two() {
        let m = cyclic_tower(3);
        let k = m.kernel_words(2, 4).unwrap();
        assert_eq!(k, vec![Word::empty(), Word::power(0, 4), Word::power(0, -4)]);
    }

    #[test]
    fn orbit_with_short_words() {
        let m = cyclic_tower(3);
        let o = m.orbit_of_point(3, 0, 3).unwrap();
        assert_eq!(o, BTreeSet::from([0, 1, 2, 3, 5, 6, 7]));
        assert_eq!(m.orbit_of_point(3, 0, 0).unwrap(), BTreeSet::from([0]));
        assert_eq!(m.orbit_of_point(3, 5, 8).unwrap().len(), 8);
    }

    #[test]
    fn rerouted_projection_breaks_equivariance() {
        let m = cyclic_tower(2);
        let mut levels = m.levels().to_vec();
        let mut proj = levels[2].projection.clone().unwrap();
        proj[3] = 0;
        proj[1] = 1;
        // swap two edges: fibers stay uniform, equivariance breaks
        levels[2] = ActionLevel::new(2, levels[2].generator_images.clone(), Some(proj), 0).unwrap();
        let bad = ChainModel::new("bad", m.alphabet().clone(), levels).unwrap();
        let report = validate_chain(&bad);
        assert!(!report.is_valid());
        let fail = report.first_failure().unwrap();
        assert_eq!(fail.level, 2);
        let (g, x) = fail.equivariance_violation.unwrap();
        let lvl = &bad.levels()[2];
        let p = &lvl.generator_images()[g];
        let proj = lvl.projection().unwrap();
        assert_ne!(
            proj[p.apply(x)],
            bad.levels()[1].generator_images()[g].apply(proj[x])
        );
    }

    #[test]
    fn two_orbits_fail_transitivity() {
        let alphabet = GeneratorAlphabet::new(["t"]).unwrap();
        let l0 = ActionLevel::new(0, vec![LevelPermutation::identity(0, 1)], None, 0).unwrap();
        let l1 = ActionLevel::new(1, vec![LevelPermutation::identity(1, 2)], Some(vec![0, 0]), 0)
            .unwrap();
        let m = ChainModel::new("split", alphabet, vec![l0, l1]).unwrap();
        let report = validate_chain(&m);
        assert!(!report.levels[1].transitive);
        assert_eq!(report.levels[1].orbit_count, 2);
        assert!(report.levels[1].equivariance_violation.is_none());
    }

    #[test]
    fn structural_errors() {
        let alphabet = GeneratorAlphabet::new(["t"]).unwrap();
        let l1 = ActionLevel::new(1, vec![LevelPermutation::identity(1, 2)], Some(vec![0, 0]), 0)
            .unwrap();
        assert!(ChainModel::new("x", alphabet.clone(), vec![l1.clone()]).is_err());
        assert!(ActionLevel::new(1, vec![LevelPermutation::identity(1, 2)], None, 0).is_err());
        let l0 = ActionLevel::new(0, vec![LevelPermutation::identity(0, 1)], None, 0).unwrap();
        let bad1 =
            ActionLevel::new(1, vec![LevelPermutation::identity(1, 2)], Some(vec![0, 1]), 0)
                .unwrap();
        assert!(ChainModel::new("x", alphabet, vec![l0, bad1]).is_err());
    }

    #[test]
    fn path_points() {
        let m = cyclic_tower(3);
        let p = m.path_point(3, 5).unwrap();
        assert_eq!(p.coordinates(), &[0, 1, 1, 5]);
        assert!(PathPoint::new(&m, vec![0, 1, 0]).is_err());
        assert!(PathPoint::new(&m, vec![0, 1, 3]).is_ok());
    }
}
