use std::fmt;

use crate::error::{invalid, Result};
use crate::model::{ChainModel, Word};

/// A finite union of cylinder sets, given as a set of cells of `X_ℓ` at a
/// stated resolution `ℓ`. Cells are kept sorted and deduplicated.
///
/// Refinement never happens implicitly; [`Clopen::canonicalize`] gives the
/// coarsest description of the same set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clopen {
    resolution: usize,
    cells: Vec<usize>,
}

impl Clopen {
    pub fn new(model: &ChainModel, resolution: usize, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        model.check_level(resolution)?;
        let mut cells: Vec<usize> = cells.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        if let Some(&bad) = cells.iter().find(|&&c| c >= model.point_count(resolution)) {
            return Err(invalid(format!(
                "cell {bad} outside level {resolution} of size {}",
                model.point_count(resolution)
            )));
        }
        Ok(Clopen { resolution, cells })
    }

    /// The whole space, at resolution 0.
    pub fn full() -> Self {
        Clopen {
            resolution: 0,
            cells: vec![0],
        }
    }

    /// The declared empty clopen.
    pub fn empty() -> Self {
        Clopen {
            resolution: 0,
            cells: Vec::new(),
        }
    }

    /// The whole space described at resolution `level`.
    pub fn full_at(model: &ChainModel, level: usize) -> Result<Self> {
        Clopen::new(model, level, 0..model.point_count(level))
    }

    /// The single cylinder over `x ∈ X_ℓ`.
    pub fn cylinder(model: &ChainModel, level: usize, x: usize) -> Result<Self> {
        model.check_point(level, x)?;
        Ok(Clopen {
            resolution: level,
            cells: vec![x],
        })
    }

    /// The cylinder `U_ℓ` around the basepoint.
    pub fn basepoint_cylinder(model: &ChainModel, level: usize) -> Result<Self> {
        model.check_level(level)?;
        Ok(Clopen {
            resolution: level,
            cells: vec![model.basepoint(level)],
        })
    }

    pub(crate) fn from_sorted(resolution: usize, cells: Vec<usize>) -> Self {
        Clopen { resolution, cells }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn check(&self, model: &ChainModel) -> Result<()> {
        model.check_level(self.resolution)?;
        match self.cells.last() {
            Some(&c) if c >= model.point_count(self.resolution) => Err(invalid(format!(
                "clopen cell {c} does not exist at level {} of model {}",
                self.resolution,
                model.name()
            ))),
            _ => Ok(()),
        }
    }

    /// Replaces each cell by its full fiber at `level ≥ resolution`.
    pub fn refine(&self, model: &ChainModel, level: usize) -> Result<Clopen> {
        self.check(model)?;
        model.check_level(level)?;
        if level < self.resolution {
            return Err(invalid(format!(
                "cannot refine from level {} to coarser level {level}",
                self.resolution
            )));
        }
        let mut cells: Vec<usize> = self
            .cells
            .iter()
            .flat_map(|&c| model.descendants(self.resolution, c, level))
            .collect();
        cells.sort_unstable();
        Ok(Clopen {
            resolution: level,
            cells,
        })
    }

    /// Points of `X_level` inside the set (`level ≥ resolution`).
    pub fn points_at(&self, model: &ChainModel, level: usize) -> Result<Vec<usize>> {
        Ok(self.refine(model, level)?.cells)
    }

    /// True if the point `x ∈ X_level` lies in the set (`level ≥ resolution`).
    pub fn contains_point(&self, model: &ChainModel, level: usize, x: usize) -> bool {
        level >= self.resolution
            && self
                .cells
                .binary_search(&model.ancestor(level, x, self.resolution))
                .is_ok()
    }

    /// The coarsest resolution describing the same set. Idempotent; the
    /// empty set canonicalizes to the declared empty clopen.
    pub fn canonicalize(&self, model: &ChainModel) -> Result<Clopen> {
        self.check(model)?;
        if self.cells.is_empty() {
            return Ok(Clopen::empty());
        }
        for r in 0..self.resolution {
            let mut coarse: Vec<usize> = self
                .cells
                .iter()
                .map(|&c| model.ancestor(self.resolution, c, r))
                .collect();
            coarse.dedup();
            coarse.sort_unstable();
            coarse.dedup();
            let candidate = Clopen {
                resolution: r,
                cells: coarse,
            };
            if candidate.refine(model, self.resolution)?.cells == self.cells {
                return Ok(candidate);
            }
        }
        Ok(self.clone())
    }

    fn common(&self, other: &Clopen, model: &ChainModel) -> Result<(Clopen, Clopen)> {
        let r = self.resolution.max(other.resolution);
        Ok((self.refine(model, r)?, other.refine(model, r)?))
    }

    pub fn union(&self, other: &Clopen, model: &ChainModel) -> Result<Clopen> {
        let (a, b) = self.common(other, model)?;
        let mut cells = a.cells;
        cells.extend(b.cells);
        cells.sort_unstable();
        cells.dedup();
        Ok(Clopen {
            resolution: a.resolution,
            cells,
        })
    }

    pub fn intersection(&self, other: &Clopen, model: &ChainModel) -> Result<Clopen> {
        let (a, b) = self.common(other, model)?;
        let cells = a
            .cells
            .into_iter()
            .filter(|c| b.cells.binary_search(c).is_ok())
            .collect();
        Ok(Clopen {
            resolution: a.resolution,
            cells,
        })
    }

    pub fn complement(&self, model: &ChainModel) -> Result<Clopen> {
        self.check(model)?;
        let cells = (0..model.point_count(self.resolution))
            .filter(|c| self.cells.binary_search(c).is_err())
            .collect();
        Ok(Clopen {
            resolution: self.resolution,
            cells,
        })
    }

    pub fn is_subset(&self, other: &Clopen, model: &ChainModel) -> Result<bool> {
        let (a, b) = self.common(other, model)?;
        Ok(a.cells.iter().all(|c| b.cells.binary_search(c).is_ok()))
    }

    /// Equality as subsets of the Cantor space.
    pub fn same_set(&self, other: &Clopen, model: &ChainModel) -> Result<bool> {
        let (a, b) = self.common(other, model)?;
        Ok(a.cells == b.cells)
    }

    pub fn is_disjoint(&self, other: &Clopen, model: &ChainModel) -> Result<bool> {
        Ok(self.intersection(other, model)?.is_empty())
    }

    /// Parses `level:c1,c2,…`; `level:` is the empty set at that level.
    pub fn parse(model: &ChainModel, text: &str) -> Result<Clopen> {
        let (level, cells) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| invalid(format!("clopen {text:?} must look like level:cells")))?;
        let level: usize = level
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad clopen level in {text:?}")))?;
        let cells = cells
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| invalid(format!("bad clopen cell {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Clopen::new(model, level, cells)
    }
}

impl fmt::Display for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.resolution)?;
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Cellwise image of `U` under the level image of `w` at `U`'s resolution.
pub fn translate_clopen(model: &ChainModel, w: &Word, u: &Clopen) -> Result<Clopen> {
    u.check(model)?;
    let p = model.level_image(w, u.resolution)?;
    let mut cells: Vec<usize> = u.cells.iter().map(|&c| p.apply(c)).collect();
    cells.sort_unstable();
    Ok(Clopen {
        resolution: u.resolution,
        cells,
    })
}
