use super::{fixed_cylinders, trivial_on, Clopen, Verdict};
use crate::error::{invalid, Result};
use crate::model::{ChainModel, PathPoint, Word, WordBound, WordImages};

/// One consecutive pair `H_i ⊆ H_{i+1}` of the probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub lower: usize,
    pub upper: usize,
    pub inclusion_holds: bool,
    /// First word of `H_{i+1} \ H_i` when the step is strict.
    pub separating: Option<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainProbeReport {
    pub point: PathPoint,
    pub depths: Vec<usize>,
    /// `H_i`: words trivial on the cylinder of `x` at `depths[i]`.
    pub members: Vec<Vec<Word>>,
    pub steps: Vec<ChainStep>,
    /// Level at which triviality was certified (the model depth).
    pub check_depth: usize,
}

impl ChainProbeReport {
    pub fn strict_increases(&self) -> impl Iterator<Item = &ChainStep> {
        self.steps.iter().filter(|s| s.separating.is_some())
    }

    /// Replays one strict step: the separating word is trivial on the finer
    /// cylinder and nontrivial on the coarser one.
    pub fn verify_step(&self, model: &ChainModel, step: &ChainStep) -> Result<bool> {
        let Some(w) = &step.separating else {
            return Ok(true);
        };
        verify_separating_step(model, &self.point, step.lower, step.upper, w, self.check_depth)
    }
}

/// Whether `word` is trivial on the cylinder of `point` at `upper` and
/// nontrivial on the one at `lower`, checked at `check_depth`.
pub fn verify_separating_step(
    model: &ChainModel,
    point: &PathPoint,
    lower: usize,
    upper: usize,
    word: &Word,
    check_depth: usize,
) -> Result<bool> {
    if lower >= upper || upper >= check_depth || point.depth() < upper {
        return Ok(false);
    }
    let p = model.level_image(word, check_depth)?;
    let coarse = Clopen::cylinder(model, lower, point.at(lower))?;
    let fine = Clopen::cylinder(model, upper, point.at(upper))?;
    Ok(trivial_on(model, &p, &fine)? && !trivial_on(model, &p, &coarse)?)
}

/// Computes `H_i` = reduced words (length ≤ L) trivial on the cylinder of
/// `x` at level `depths[i]`, certified at the model depth, and reports the
/// strict increases of `H_1 ⊆ H_2 ⊆ ⋯`.
pub fn ascending_chain_probe(
    model: &ChainModel,
    point: &PathPoint,
    depths: &[usize],
    bound: impl Into<WordBound>,
) -> Result<ChainProbeReport> {
    let top = model.depth();
    if depths.is_empty() {
        return Err(invalid("the probe needs at least one depth"));
    }
    if depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("probe depths must be strictly increasing"));
    }
    let deepest = *depths.last().unwrap();
    if deepest >= top {
        return Err(invalid(format!(
            "probe depth {deepest} must be below the model depth {top}"
        )));
    }
    if point.depth() < deepest {
        return Err(invalid(format!(
            "path point has depth {}, probe needs {deepest}",
            point.depth()
        )));
    }
    PathPoint::new(model, point.coordinates().to_vec())?;

    let images = WordImages::compute(model, top, bound.into())?;
    let mut members: Vec<Vec<Word>> = vec![Vec::new(); depths.len()];
    for (w, p) in images.iter() {
        let fixed = fixed_cylinders(model, p);
        for (i, &l) in depths.iter().enumerate() {
            if fixed[l][point.at(l)] {
                members[i].push(w.clone());
            }
        }
    }
    let steps = depths
        .windows(2)
        .zip(members.windows(2))
        .map(|(d, m)| {
            let (lo, hi) = (&m[0], &m[1]);
            ChainStep {
                lower: d[0],
                upper: d[1],
                inclusion_holds: lo.iter().all(|w| hi.contains(w)),
                separating: hi.iter().find(|w| !lo.contains(w)).cloned(),
            }
        })
        .collect();
    Ok(ChainProbeReport {
        point: point.clone(),
        depths: depths.to_vec(),
        members,
        steps,
        check_depth: top,
    })
}

/// Finite-depth shadow of a non-Hausdorff germ at `x`: `word` fixes the path
/// of `x`, and for every level `ℓ ≤ depth − 2` it is nontrivial on the
/// cylinder `U_ℓ(x)` while acting trivially on the recorded sub-cylinder
/// `trivial_cells[ℓ] ⊊ U_ℓ(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GermWitness {
    pub word: Word,
    pub point: PathPoint,
    pub trivial_cells: Vec<Clopen>,
    pub depth: usize,
}

impl GermWitness {
    pub fn verify(&self, model: &ChainModel) -> Result<bool> {
        let n = self.depth;
        if n < 2 || self.point.depth() != n || self.trivial_cells.len() != n - 1 {
            return Ok(false);
        }
        PathPoint::new(model, self.point.coordinates().to_vec())?;
        let p = model.level_image(&self.word, n)?;
        if !p.fixes(self.point.at(n)) {
            return Ok(false);
        }
        for (l, cell) in self.trivial_cells.iter().enumerate() {
            let nbhd = Clopen::cylinder(model, l, self.point.at(l))?;
            if cell.resolution() <= l
                || cell.resolution() >= n
                || cell.cells().len() != 1
                || !cell.is_subset(&nbhd, model)?
                || !trivial_on(model, &p, cell)?
                || trivial_on(model, &p, &nbhd)?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Searches for a [`GermWitness`] at `x`, which must be given at the full
/// model depth.
pub fn germ_hausdorff_witness(
    model: &ChainModel,
    point: &PathPoint,
    bound: impl Into<WordBound>,
) -> Result<Verdict<GermWitness>> {
    let n = model.depth();
    if point.depth() != n {
        return Err(invalid(format!(
            "path point has depth {}, expected the model depth {n}",
            point.depth()
        )));
    }
    PathPoint::new(model, point.coordinates().to_vec())?;
    if n < 2 {
        return Ok(Verdict::UpToBounds);
    }
    let images = WordImages::compute(model, n, bound.into())?;
    'words: for (w, p) in images.iter() {
        if p.is_identity() || !p.fixes(point.at(n)) {
            continue;
        }
        let fixed = fixed_cylinders(model, p);
        let mut trivial_cells = Vec::with_capacity(n - 1);
        for l in 0..=n - 2 {
            if fixed[l][point.at(l)] {
                continue 'words;
            }
            // coarsest trivial cylinder strictly inside U_ℓ(x), above depth n
            let mut found = None;
            let mut frontier = vec![point.at(l)];
            for r in l + 1..n {
                frontier = frontier
                    .iter()
                    .flat_map(|&c| model.children(r - 1, c).iter().copied())
                    .collect();
                frontier.sort_unstable();
                if let Some(&c) = frontier.iter().find(|&&c| fixed[r][c]) {
                    found = Some(Clopen::from_sorted(r, vec![c]));
                    break;
                }
            }
            match found {
                Some(c) => trivial_cells.push(c),
                None => continue 'words,
            }
        }
        return Ok(Verdict::Witness(GermWitness {
            word: w.clone(),
            point: point.clone(),
            trivial_cells,
            depth: n,
        }));
    }
    Ok(Verdict::UpToBounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_dihedral, build_grigorchuk, build_odometer, tree_index};

    #[test]
    fn odometer_chain_is_flat() {
        let m = build_odometer(&[2, 2, 2, 2]).unwrap();
        let x = m.base_path(4).unwrap();
        let r = ascending_chain_probe(&m, &x, &[1, 2, 3], 8).unwrap();
        assert!(r.members.iter().all(|h| h == &vec![Word::empty()]));
        assert_eq!(r.strict_increases().count(), 0);
    }

    #[test]
    fn single_depth_probe_is_vacuous() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let x = m.base_path(3).unwrap();
        let r = ascending_chain_probe(&m, &x, &[1], 3).unwrap();
        assert!(r.steps.is_empty());
    }

    #[test]
    fn grigorchuk_chain_increases() {
        let g = build_grigorchuk(4).unwrap();
        let x = g.base_path(4).unwrap();
        let r = ascending_chain_probe(&g, &x, &[1, 2, 3], 4).unwrap();
        assert!(r.steps.iter().all(|s| s.inclusion_holds));
        let strict: Vec<_> = r.strict_increases().collect();
        assert!(!strict.is_empty());
        for s in strict {
            assert!(r.verify_step(&g, s).unwrap());
        }
    }

    #[test]
    fn probe_rejects_bad_depths() {
        let g = build_grigorchuk(3).unwrap();
        let x = g.base_path(3).unwrap();
        assert!(ascending_chain_probe(&g, &x, &[2, 1], 2).is_err());
        assert!(ascending_chain_probe(&g, &x, &[1, 3], 2).is_err());
    }

    #[test]
    fn odometer_germs_are_hausdorff() {
        let m = build_odometer(&[2, 2, 2, 2]).unwrap();
        let x = m.base_path(4).unwrap();
        assert_eq!(germ_hausdorff_witness(&m, &x, 8).unwrap(), Verdict::UpToBounds);
    }

    #[test]
    fn dihedral_germs_are_hausdorff() {
        let m = build_dihedral(3, 3).unwrap();
        let x = m.base_path(3).unwrap();
        assert_eq!(germ_hausdorff_witness(&m, &x, 3).unwrap(), Verdict::UpToBounds);
    }

    #[test]
    fn grigorchuk_non_hausdorff_germ_on_right_spine() {
        let g = build_grigorchuk(4).unwrap();
        let leaf = tree_index(2, &[1, 1, 1, 1]);
        let x = g.path_point(4, leaf).unwrap();
        let v = germ_hausdorff_witness(&g, &x, 4).unwrap();
        let w = v.witness().expect("witness");
        assert!(w.verify(&g).unwrap());
    }

    #[test]
    fn empty_word_bound_finds_nothing() {
        let g = build_grigorchuk(4).unwrap();
        let x = g.path_point(4, tree_index(2, &[1, 1, 1, 1])).unwrap();
        assert_eq!(germ_hausdorff_witness(&g, &x, 0).unwrap(), Verdict::UpToBounds);
    }
}
