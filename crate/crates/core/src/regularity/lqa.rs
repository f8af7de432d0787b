use super::{fixed_cylinders, is_adapted, trivial_on, Clopen, Verdict};
use crate::error::{invalid, Result};
use crate::model::{ChainModel, Word, WordBound, WordImages};

/// Evidence against local quasi-analyticity: `word` is trivial on the inner
/// set `V ⊆ U` but not on the outer set `U`, both checked at `depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LqaWitness {
    pub word: Word,
    pub inner: Clopen,
    pub outer: Clopen,
    pub depth: usize,
}

impl LqaWitness {
    pub fn verify(&self, model: &ChainModel) -> Result<bool> {
        if self.inner.is_empty()
            || self.inner.resolution() >= self.depth
            || !self.inner.is_subset(&self.outer, model)?
        {
            return Ok(false);
        }
        let p = model.level_image(&self.word, self.depth)?;
        Ok(trivial_on(model, &p, &self.inner)? && !trivial_on(model, &p, &self.outer)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LqaReport {
    pub verdict: Verdict<LqaWitness>,
    /// False when `U` failed the adaptedness test at the same word bound.
    pub outer_adapted: bool,
}

/// Searches for `w` and a cylinder `V ⊆ U` such that `w` is trivial on `V`
/// and nontrivial on `U`.
///
/// `depth` caps the resolution of the candidate cylinders `V`. Triviality and
/// nontriviality are both certified at the model's deepest level, and `V`
/// must be strictly coarser than that level. Candidates are tried coarsest
/// first.
pub fn lqa_violation_search(
    model: &ChainModel,
    outer: &Clopen,
    bound: impl Into<WordBound>,
    depth: usize,
) -> Result<LqaReport> {
    let bound = bound.into();
    if outer.is_empty() {
        return Err(invalid("the outer set must be a non-empty clopen"));
    }
    model.check_level(depth)?;
    let outer_adapted = is_adapted(model, outer, bound)?.is_adapted();
    let top = model.depth();
    if top == 0 {
        return Ok(LqaReport {
            verdict: Verdict::UpToBounds,
            outer_adapted,
        });
    }
    let max_inner = depth.min(top - 1);
    let mut candidates = Vec::new();
    for r in 0..=max_inner {
        for c in 0..model.point_count(r) {
            let v = Clopen::from_sorted(r, vec![c]);
            if v.is_subset(outer, model)? {
                candidates.push(v);
            }
        }
    }
    let outer_points = outer.points_at(model, top)?;
    let images = WordImages::compute(model, top, bound)?;
    let tables: Vec<(&Word, Vec<Vec<bool>>)> = images
        .iter()
        .filter(|(_, p)| !outer_points.iter().all(|&x| p.fixes(x)))
        .map(|(w, p)| (w, fixed_cylinders(model, p)))
        .collect();
    for v in &candidates {
        if let Some((w, _)) = tables
            .iter()
            .find(|(_, fixed)| fixed[v.resolution()][v.cells()[0]])
        {
            return Ok(LqaReport {
                verdict: Verdict::Witness(LqaWitness {
                    word: (*w).clone(),
                    inner: v.clone(),
                    outer: outer.clone(),
                    depth: top,
                }),
                outer_adapted,
            });
        }
    }
    Ok(LqaReport {
        verdict: Verdict::UpToBounds,
        outer_adapted,
    })
}

/// `kernel` is trivial on `V`, `conjugator` stabilizes `U`, and
/// `conjugator·kernel·conjugator⁻¹` is not trivial on `V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalityWitness {
    pub conjugator: Word,
    pub kernel: Word,
    pub inner: Clopen,
    pub outer: Clopen,
    pub depth: usize,
}

impl NormalityWitness {
    pub fn verify(&self, model: &ChainModel) -> Result<bool> {
        if self.inner.resolution() >= self.depth || !self.inner.is_subset(&self.outer, model)? {
            return Ok(false);
        }
        let u = model.level_image(&self.conjugator, self.depth)?;
        let w = model.level_image(&self.kernel, self.depth)?;
        let outer_pts = self.outer.points_at(model, self.depth)?;
        let mut moved: Vec<usize> = outer_pts.iter().map(|&x| u.apply(x)).collect();
        moved.sort_unstable();
        if moved != outer_pts {
            return Ok(false);
        }
        let conj = u.compose(&w).compose(&u.inverse());
        Ok(trivial_on(model, &w, &self.inner)? && !trivial_on(model, &conj, &self.inner)?)
    }
}

/// Tests whether the words trivial on `V` are closed under conjugation by
/// the stabilizer words of `U`, all checked at depth `D`.
pub fn kernel_normality_check(
    model: &ChainModel,
    inner: &Clopen,
    outer: &Clopen,
    bound: impl Into<WordBound>,
    depth: usize,
) -> Result<Verdict<NormalityWitness>> {
    let bound = bound.into();
    model.check_level(depth)?;
    if inner.is_empty() {
        return Err(invalid("the inner set must be non-empty"));
    }
    if !inner.is_subset(outer, model)? {
        return Err(invalid(format!("inner set {inner} is not contained in {outer}")));
    }
    if inner.resolution() >= depth {
        return Err(invalid(format!(
            "inner set resolution {} must be below the checking depth {depth}",
            inner.resolution()
        )));
    }
    if outer.resolution() > depth {
        return Err(invalid(format!(
            "outer set resolution {} exceeds the checking depth {depth}",
            outer.resolution()
        )));
    }
    let images = WordImages::compute(model, depth, bound)?;
    let inner_pts = inner.points_at(model, depth)?;
    let outer_pts = outer.points_at(model, depth)?;

    let kernel: Vec<_> = images
        .iter()
        .skip(1)
        .filter(|(_, p)| inner_pts.iter().all(|&x| p.fixes(x)))
        .collect();
    let stabilizer: Vec<_> = images
        .iter()
        .skip(1)
        .filter(|(_, p)| {
            let mut moved: Vec<usize> = outer_pts.iter().map(|&x| p.apply(x)).collect();
            moved.sort_unstable();
            moved == outer_pts
        })
        .map(|(u, p)| (u, p.inverse()))
        .collect();

    for (w, pw) in &kernel {
        for (u, pu_inv) in &stabilizer {
            // (u w u⁻¹)(x) = x  ⇔  w(u⁻¹ x) = u⁻¹ x
            let ok = inner_pts.iter().all(|&x| pw.fixes(pu_inv.apply(x)));
            if !ok {
                return Ok(Verdict::Witness(NormalityWitness {
                    conjugator: (*u).clone(),
                    kernel: (*w).clone(),
                    inner: inner.clone(),
                    outer: outer.clone(),
                    depth,
                }));
            }
        }
    }
    Ok(Verdict::UpToBounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_grigorchuk, build_heisenberg, build_odometer};

    #[test]
    fn grigorchuk_d_on_left_half() {
        let g = build_grigorchuk(4).unwrap();
        let r = lqa_violation_search(&g, &Clopen::full(), 1, 2).unwrap();
        let w = r.verdict.witness().expect("witness");
        assert_eq!(g.alphabet().render(&w.word), "d");
        assert_eq!(w.inner, Clopen::cylinder(&g, 1, 0).unwrap());
        assert!(w.verify(&g).unwrap());
        assert!(r.outer_adapted);
    }

    #[test]
    fn grigorchuk_deeper_pair() {
        let g = build_grigorchuk(4).unwrap();
        let outer = Clopen::cylinder(&g, 1, 0).unwrap();
        let r = lqa_violation_search(&g, &outer, 4, 2).unwrap();
        let w = r.verdict.witness().expect("witness within L = 4");
        assert_eq!(w.inner.resolution(), 2);
        assert!(w.verify(&g).unwrap());
    }

    #[test]
    fn odometer_has_no_lqa_witness() {
        let m = build_odometer(&[2, 3, 2]).unwrap();
        for d in 0..=3 {
            let r = lqa_violation_search(&m, &Clopen::full(), 8, d).unwrap();
            assert_eq!(r.verdict, Verdict::UpToBounds);
        }
    }

    #[test]
    fn empty_outer_rejected() {
        let m = build_odometer(&[2, 2]).unwrap();
        assert!(lqa_violation_search(&m, &Clopen::empty(), 2, 1).is_err());
    }

    #[test]
    fn abelian_kernel_is_normal() {
        let m = build_odometer(&[2, 2, 2, 2]).unwrap();
        let v = Clopen::basepoint_cylinder(&m, 2).unwrap();
        let u = Clopen::basepoint_cylinder(&m, 1).unwrap();
        assert_eq!(kernel_normality_check(&m, &v, &u, 8, 4).unwrap(), Verdict::UpToBounds);
    }

    #[test]
    fn grigorchuk_kernel_not_normal() {
        let g = build_grigorchuk(4).unwrap();
        let v = Clopen::cylinder(&g, 2, 0).unwrap();
        let u = Clopen::cylinder(&g, 1, 0).unwrap();
        let verdict = kernel_normality_check(&g, &v, &u, 4, 4).unwrap();
        let w = verdict.witness().expect("conjugation witness");
        assert!(w.verify(&g).unwrap());
    }

    #[test]
    fn heisenberg_nested_cylinders_normal() {
        let h = build_heisenberg(2, 3, 2).unwrap();
        let v = Clopen::basepoint_cylinder(&h, 1).unwrap();
        let verdict = kernel_normality_check(&h, &v, &Clopen::full(), 2, 2).unwrap();
        assert_eq!(verdict, Verdict::UpToBounds);
    }

    #[test]
    fn normality_preconditions() {
        let g = build_grigorchuk(3).unwrap();
        let v = Clopen::cylinder(&g, 2, 0).unwrap();
        let u = Clopen::cylinder(&g, 1, 1).unwrap();
        assert!(kernel_normality_check(&g, &v, &u, 2, 3).is_err());
        let u = Clopen::cylinder(&g, 1, 0).unwrap();
        assert!(kernel_normality_check(&g, &v, &u, 2, 2).is_err());
    }
}
