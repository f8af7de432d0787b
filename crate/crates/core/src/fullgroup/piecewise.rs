use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::model::{ChainModel, LevelPermutation, Word};
use crate::regularity::Clopen;

/// Why a piece table fails to define a full-group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PiecewiseDefect {
    /// The cell lies in two pieces.
    Overlap { level: usize, cell: usize },
    /// The cell lies in no piece.
    Uncovered { level: usize, cell: usize },
    /// Two cells are sent to `image`.
    NotBijective { depth: usize, image: usize },
    /// The checking depth is coarser than the pieces.
    DepthBelowResolution { resolution: usize, depth: usize },
}

impl fmt::Display for PiecewiseDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiecewiseDefect::Overlap { level, cell } => {
                write!(f, "cell {level}:{cell} is covered by more than one piece")
            }
            PiecewiseDefect::Uncovered { level, cell } => {
                write!(f, "cell {level}:{cell} is not covered by any piece")
            }
            PiecewiseDefect::NotBijective { depth, image } => {
                write!(f, "cell {depth}:{image} has two preimages")
            }
            PiecewiseDefect::DepthBelowResolution { resolution, depth } => {
                write!(f, "depth {depth} is coarser than the piece resolution {resolution}")
            }
        }
    }
}

/// An element of the topological full group: a clopen partition with a
/// group word on each part.
///
/// All domains share one resolution. Words are over the alphabet of the
/// model the element is used with.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiecewiseElement {
    resolution: usize,
    pieces: Vec<(Clopen, Word)>,
}

impl PiecewiseElement {
    /// Refines all domains to the finest resolution present and orders the
    /// pieces by their least cell. Partition and bijectivity are checked by
    /// [`validate_piecewise`].
    pub fn new(model: &ChainModel, pieces: Vec<(Clopen, Word)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(invalid("a piecewise element needs at least one piece"));
        }
        let resolution = pieces.iter().map(|(c, _)| c.resolution()).max().unwrap();
        let mut out = Vec::with_capacity(pieces.len());
        for (c, w) in pieces {
            if c.is_empty() {
                return Err(invalid("piece domains must be non-empty"));
            }
            model.check_word(&w)?;
            out.push((c.refine(model, resolution)?, w));
        }
        out.sort_by_key(|(c, _)| c.cells()[0]);
        Ok(PiecewiseElement {
            resolution,
            pieces: out,
        })
    }

    /// The group element `w` as a single piece.
    pub fn global(w: Word) -> Self {
        PiecewiseElement {
            resolution: 0,
            pieces: vec![(Clopen::full(), w)],
        }
    }

    pub fn identity() -> Self {
        Self::global(Word::empty())
    }

    /// One piece per cell of `X_resolution`.
    pub(crate) fn from_cell_words(resolution: usize, words: Vec<Word>) -> Self {
        PiecewiseElement {
            resolution,
            pieces: words
                .into_iter()
                .enumerate()
                .map(|(c, w)| (Clopen::from_sorted(resolution, vec![c]), w))
                .collect(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn pieces(&self) -> &[(Clopen, Word)] {
        &self.pieces
    }

    /// Distinct piece words, in first-appearance order.
    pub fn distinct_words(&self) -> Vec<&Word> {
        let mut out: Vec<&Word> = Vec::new();
        for (_, w) in &self.pieces {
            if !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    /// The word on each cell of `X_resolution`, after checking the partition.
    pub fn cell_words(&self, model: &ChainModel) -> Result<Vec<Word>> {
        model.check_level(self.resolution)?;
        let n = model.point_count(self.resolution);
        let mut table: Vec<Option<Word>> = vec![None; n];
        for (c, w) in &self.pieces {
            if c.resolution() != self.resolution {
                return Err(invalid("piece resolutions disagree"));
            }
            for &x in c.cells() {
                if x >= n {
                    return Err(invalid(format!("cell {x} outside level {}", self.resolution)));
                }
                if table[x].is_some() {
                    return Err(Error::Piecewise(PiecewiseDefect::Overlap {
                        level: self.resolution,
                        cell: x,
                    }));
                }
                table[x] = Some(w.clone());
            }
        }
        table
            .into_iter()
            .enumerate()
            .map(|(x, w)| {
                w.ok_or(Error::Piecewise(PiecewiseDefect::Uncovered {
                    level: self.resolution,
                    cell: x,
                }))
            })
            .collect()
    }

    /// The induced map on `X_depth` (`depth ≥ resolution`); not checked for
    /// bijectivity.
    pub fn cell_map(&self, model: &ChainModel, depth: usize) -> Result<Vec<usize>> {
        model.check_level(depth)?;
        if depth < self.resolution {
            return Err(Error::Piecewise(PiecewiseDefect::DepthBelowResolution {
                resolution: self.resolution,
                depth,
            }));
        }
        let words = self.cell_words(model)?;
        let images: Vec<LevelPermutation> = words
            .iter()
            .map(|w| model.level_image(w, depth))
            .collect::<Result<_>>()?;
        Ok((0..model.point_count(depth))
            .map(|x| images[model.ancestor(depth, x, self.resolution)].apply(x))
            .collect())
    }
}

/// Accepts iff the pieces partition the space and the induced map on
/// `X_depth` is a bijection.
pub fn validate_piecewise(model: &ChainModel, pe: &PiecewiseElement, depth: usize) -> Result<()> {
    let map = pe.cell_map(model, depth)?;
    let mut hit = vec![false; map.len()];
    for &y in &map {
        if std::mem::replace(&mut hit[y], true) {
            return Err(Error::Piecewise(PiecewiseDefect::NotBijective { depth, image: y }));
        }
    }
    Ok(())
}

/// Image of `x ∈ X_level` (`level ≥ resolution`).
pub fn apply_piecewise(model: &ChainModel, pe: &PiecewiseElement, level: usize, x: usize) -> Result<usize> {
    model.check_point(level, x)?;
    if level < pe.resolution {
        return Err(Error::Piecewise(PiecewiseDefect::DepthBelowResolution {
            resolution: pe.resolution,
            depth: level,
        }));
    }
    let words = pe.cell_words(model)?;
    let w = &words[model.ancestor(level, x, pe.resolution)];
    Ok(model.level_image(w, level)?.apply(x))
}

/// `a ∘ b` (apply `b` first), one piece per cell of the common resolution.
pub fn compose_piecewise(model: &ChainModel, a: &PiecewiseElement, b: &PiecewiseElement) -> Result<PiecewiseElement> {
    let r = a.resolution.max(b.resolution);
    let aw = a.cell_words(model)?;
    let bw = b.cell_words(model)?;
    let alphabet = model.alphabet();
    let words = (0..model.point_count(r))
        .map(|c| {
            let w2 = &bw[model.ancestor(r, c, b.resolution)];
            let moved = model.level_image(w2, r)?.apply(c);
            let w1 = &aw[model.ancestor(r, moved, a.resolution)];
            alphabet.multiply(w1, w2)
        })
        .collect::<Result<_>>()?;
    Ok(PiecewiseElement::from_cell_words(r, words))
}

/// Cell `w·c` carries `w⁻¹`.
pub fn invert_piecewise(model: &ChainModel, pe: &PiecewiseElement) -> Result<PiecewiseElement> {
    validate_piecewise(model, pe, pe.resolution)?;
    let r = pe.resolution;
    let words = pe.cell_words(model)?;
    let mut out = vec![Word::empty(); model.point_count(r)];
    for (c, w) in words.iter().enumerate() {
        out[model.level_image(w, r)?.apply(c)] = model.alphabet().inverse(w);
    }
    Ok(PiecewiseElement::from_cell_words(r, out))
}

/// Reduces words, drops to the least resolution at which every cell carries
/// a single word, and merges each maximal cylinder with a constant word
/// into one piece. Idempotent. The comparison is syntactic: distinct words
/// with equal actions stay distinct.
pub fn canonicalize(model: &ChainModel, pe: &PiecewiseElement) -> Result<PiecewiseElement> {
    let top = pe.resolution;
    let words: Vec<Word> = pe
        .cell_words(model)?
        .iter()
        .map(|w| model.alphabet().reduce(w))
        .collect::<Result<_>>()?;
    // uniform[l][c] = the common word of all level-`top` cells under c
    let mut uniform: Vec<Vec<Option<Word>>> = vec![Vec::new(); top + 1];
    uniform[top] = words.into_iter().map(Some).collect();
    for l in (0..top).rev() {
        uniform[l] = (0..model.point_count(l))
            .map(|c| {
                let kids = model.children(l, c);
                let first = uniform[l + 1][kids[0]].clone()?;
                kids.iter()
                    .all(|&k| uniform[l + 1][k].as_ref() == Some(&first))
                    .then_some(first)
            })
            .collect();
    }
    let r = (0..=top)
        .find(|&l| uniform[l].iter().all(Option::is_some))
        .unwrap_or(top);
    let mut pieces: Vec<(Clopen, Word)> = Vec::new();
    for l in 0..=r {
        for c in 0..model.point_count(l) {
            let Some(w) = &uniform[l][c] else { continue };
            let parent_uniform = l > 0 && uniform[l - 1][model.ancestor(l, c, l - 1)].is_some();
            if !parent_uniform {
                let dom = Clopen::from_sorted(l, vec![c]).refine(model, r)?;
                pieces.push((dom, w.clone()));
            }
        }
    }
    pieces.sort_by_key(|(c, _)| c.cells()[0]);
    Ok(PiecewiseElement {
        resolution: r,
        pieces,
    })
}
