use std::fmt::Write;

use crate::error::Result;
use crate::model::ChainModel;

/// DOT text for the tree of cells down to `depth`. Vertices are named
/// `level:index` and listed level by level in index order; each edge joins
/// a cell to one of its children.
pub fn export_tree(model: &ChainModel, depth: usize) -> Result<String> {
    model.check_level(depth)?;
    let mut out = String::new();
    writeln!(out, "digraph tree {{").unwrap();
    writeln!(out, "  label=\"{}\";", model.name().replace('"', "'")).unwrap();
    for l in 0..=depth {
        for x in 0..model.point_count(l) {
            writeln!(out, "  \"{l}:{x}\";").unwrap();
        }
    }
    for l in 0..depth {
        for x in 0..model.point_count(l) {
            for &c in model.children(l, x) {
                writeln!(out, "  \"{l}:{x}\" -> \"{}:{c}\";", l + 1).unwrap();
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_grigorchuk, build_odometer};

    fn counts(text: &str) -> (usize, usize) {
        let edges = text.lines().filter(|l| l.contains("->")).count();
        let verts = text
            .lines()
            .filter(|l| l.trim_start().starts_with('"') && !l.contains("->"))
            .count();
        (verts, edges)
    }

    #[test]
    fn depth_zero_is_single_vertex() {
        let m = build_odometer(&[2, 2]).unwrap();
        assert_eq!(counts(&export_tree(&m, 0).unwrap()), (1, 0));
    }

    #[test]
    fn binary_depth_two() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let t = export_tree(&m, 2).unwrap();
        assert_eq!(counts(&t), (7, 6));
        assert_eq!(t, export_tree(&m, 2).unwrap());
    }

    #[test]
    fn out_degrees_match_arity() {
        let m = build_odometer(&[2, 3, 2]).unwrap();
        let t = export_tree(&m, 3).unwrap();
        for (l, n) in [(0, 2), (1, 3), (2, 2)] {
            for x in 0..m.point_count(l) {
                let prefix = format!("  \"{l}:{x}\" ->");
                assert_eq!(t.lines().filter(|s| s.starts_with(&prefix)).count(), n);
            }
        }
    }

    #[test]
    fn too_deep_rejected() {
        let g = build_grigorchuk(2).unwrap();
        assert!(export_tree(&g, 3).is_err());
    }
}
