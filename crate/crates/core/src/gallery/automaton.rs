//! Self-similar groups given by wreath recursion over a constant-arity tree.

use std::collections::BTreeMap;

use super::assemble;
use crate::error::{invalid, Error, Result};
use crate::model::{ChainModel, GeneratorAlphabet, LevelPermutation};

/// One automaton state: a root permutation of the letters and a section
/// state for every letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDef {
    pub name: String,
    pub perm: Vec<usize>,
    pub sections: Vec<String>,
}

impl StateDef {
    /// Parses `state NAME = perm (0 1) sections 0:e 1:b`. The leading
    /// `state` keyword is optional; letters without a section go to
    /// `identity`.
    pub fn parse(line: &str, arity: usize, identity: &str) -> Result<StateDef> {
        let line = line.trim();
        let line = line.strip_prefix("state").map(str::trim_start).unwrap_or(line);
        let (name, rest) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("state line {line:?} lacks '='")))?;
        let name = name.trim().to_string();
        let rest = rest.trim();
        let rest = rest
            .strip_prefix("perm")
            .ok_or_else(|| invalid(format!("state {name}: expected 'perm'")))?;
        let (perm_text, sect_text) = match rest.find("sections") {
            Some(i) => (&rest[..i], &rest[i + "sections".len()..]),
            None => (rest, ""),
        };
        let perm_text = perm_text.trim();
        let perm = if perm_text.is_empty() || perm_text == "()" || perm_text == "id" {
            (0..arity).collect()
        } else {
            LevelPermutation::from_cycles(1, arity, perm_text)?.images().to_vec()
        };
        let mut sections = vec![identity.to_string(); arity];
        for item in sect_text.split_whitespace() {
            let (letter, target) = item
                .split_once(':')
                .ok_or_else(|| invalid(format!("state {name}: bad section {item:?}")))?;
            let x: usize = letter
                .parse()
                .map_err(|_| invalid(format!("state {name}: bad letter {letter:?}")))?;
            if x >= arity {
                return Err(invalid(format!("state {name}: letter {x} outside 0..{arity}")));
            }
            sections[x] = target.to_string();
        }
        Ok(StateDef { name, perm, sections })
    }

    pub fn render(&self) -> String {
        let perm = LevelPermutation::new_unchecked(1, self.perm.clone()).cycles();
        let sections: Vec<String> = self
            .sections
            .iter()
            .enumerate()
            .map(|(x, s)| format!("{x}:{s}"))
            .collect();
        format!("state {} = perm {} sections {}", self.name, perm, sections.join(" "))
    }
}

/// A finite automaton over the alphabet `{0, …, arity−1}` with a named
/// identity state. The identity may be listed among `states` only with a
/// trivial permutation and identity sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonSpec {
    arity: usize,
    identity: String,
    states: Vec<StateDef>,
}

impl AutomatonSpec {
    pub fn new(arity: usize, identity: impl Into<String>, states: Vec<StateDef>) -> Result<Self> {
        let identity = identity.into();
        if arity < 2 {
            return Err(invalid(format!("automaton arity {arity} is below 2")));
        }
        let mut names: BTreeMap<&str, usize> = BTreeMap::new();
        names.insert(&identity, usize::MAX);
        let mut kept = Vec::new();
        for s in &states {
            if s.perm.len() != arity || s.sections.len() != arity {
                return Err(invalid(format!("state {} does not match arity {arity}", s.name)));
            }
            LevelPermutation::new(1, s.perm.clone())
                .map_err(|_| invalid(format!("state {}: root map is not a permutation", s.name)))?;
            if s.name == identity {
                let trivial = s.perm.iter().enumerate().all(|(i, &j)| i == j)
                    && s.sections.iter().all(|t| t == &identity);
                if !trivial {
                    return Err(invalid(format!("identity state {identity} must act trivially")));
                }
                continue;
            }
            if names.insert(&s.name, kept.len()).is_some() {
                return Err(invalid(format!("duplicate state {}", s.name)));
            }
            kept.push(s.clone());
        }
        for s in &kept {
            if let Some(t) = s.sections.iter().find(|t| !names.contains_key(t.as_str())) {
                return Err(invalid(format!("state {}: unknown section state {t}", s.name)));
            }
        }
        Ok(AutomatonSpec {
            arity,
            identity,
            states: kept,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn identity(&self) -> &str {
        &self.identity
    }

    /// Non-identity states, in declaration order.
    pub fn states(&self) -> &[StateDef] {
        &self.states
    }

    /// Section of state `s` at letter `x`, `None` for the identity.
    fn section(&self, s: usize, x: usize) -> Option<usize> {
        let t = &self.states[s].sections[x];
        self.states.iter().position(|d| &d.name == t)
    }

    /// States equal to their own inverse, as the greatest relation `R` with
    /// `(p, q) ∈ R ⇒ π_p π_q = id` and `(s_{p, π_q x}, s_{q, x}) ∈ R`.
    pub fn involutions(&self) -> Vec<bool> {
        let k = self.states.len() + 1;
        let idx = |s: Option<usize>| s.map_or(0, |i| i + 1);
        let perm = |i: usize| -> Vec<usize> {
            if i == 0 {
                (0..self.arity).collect()
            } else {
                self.states[i - 1].perm.clone()
            }
        };
        let sec = |i: usize, x: usize| if i == 0 { 0 } else { idx(self.section(i - 1, x)) };
        let mut rel = vec![vec![false; k]; k];
        for p in 0..k {
            for q in 0..k {
                let (pp, pq) = (perm(p), perm(q));
                rel[p][q] = (0..self.arity).all(|x| pp[pq[x]] == x);
            }
        }
        loop {
            let mut changed = false;
            for p in 0..k {
                for q in 0..k {
                    if rel[p][q] {
                        let pq = perm(q);
                        if !(0..self.arity).all(|x| rel[sec(p, pq[x])][sec(q, x)]) {
                            rel[p][q] = false;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (1..k).map(|p| rel[p][p]).collect()
    }
}

/// The standard first Grigorchuk group: `a` swaps the root letter,
/// `b = (a, c)`, `c = (a, d)`, `d = (e, b)`.
pub fn grigorchuk_spec() -> AutomatonSpec {
    let lines = [
        "state a = perm (0 1) sections 0:e 1:e",
        "state b = perm () sections 0:a 1:c",
        "state c = perm () sections 0:a 1:d",
        "state d = perm () sections 0:e 1:b",
    ];
    let states = lines
        .iter()
        .map(|l| StateDef::parse(l, 2, "e").expect("grigorchuk state"))
        .collect();
    AutomatonSpec::new(2, "e", states).expect("grigorchuk spec")
}

/// The binary adding machine `a = σ(e, a)`.
pub fn adding_machine_spec() -> AutomatonSpec {
    let s = StateDef::parse("state a = perm (0 1) sections 0:e 1:a", 2, "e").expect("adding machine");
    AutomatonSpec::new(2, "e", vec![s]).expect("adding machine spec")
}

/// Evaluates the recursion level by level. Generators are the non-identity
/// states; a non-transitive level is rejected with its orbits.
pub fn build_automaton_group(spec: &AutomatonSpec, depth: usize) -> Result<ChainModel> {
    if depth == 0 {
        return Err(invalid("automaton model needs depth at least 1"));
    }
    if spec.states.is_empty() {
        return Err(Error::NotTransitive {
            level: 1,
            orbits: spec.arity,
            decomposition: (0..spec.arity).map(|x| vec![x]).collect(),
        });
    }
    let n = spec.arity;
    let k = spec.states.len();
    let sizes: Vec<usize> = (0..=depth as u32).map(|l| n.pow(l)).collect();
    // tables[l][s][i]: image of vertex i at level l under state s
    let mut tables: Vec<Vec<Vec<usize>>> = vec![vec![vec![0]; k]];
    for l in 1..=depth {
        let prev = &tables[l - 1];
        let level: Vec<Vec<usize>> = (0..k)
            .map(|s| {
                (0..sizes[l])
                    .map(|i| {
                        let (x, rest) = (i % n, i / n);
                        let tail = spec.section(s, x).map_or(rest, |t| prev[t][rest]);
                        spec.states[s].perm[x] + n * tail
                    })
                    .collect()
            })
            .collect();
        tables.push(level);
    }
    let names: Vec<String> = spec.states.iter().map(|s| s.name.clone()).collect();
    let alphabet = GeneratorAlphabet::with_involutions(names, spec.involutions())?;
    let model = assemble(
        format!("automaton({})", spec.states.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(",")),
        alphabet,
        &sizes,
        |l, g, x| tables[l][g][x],
        |l, x| x % sizes[l - 1],
    )?;
    for l in 1..=depth {
        let orbits = model.orbits(l);
        if orbits.len() > 1 {
            return Err(Error::NotTransitive {
                level: l,
                orbits: orbits.len(),
                decomposition: orbits,
            });
        }
    }
    Ok(model)
}

pub fn build_grigorchuk(depth: usize) -> Result<ChainModel> {
    Ok(build_automaton_group(&grigorchuk_spec(), depth)?.renamed("grigorchuk"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_odometer, tree_index};
    use crate::model::{validate_chain, Word};

    #[test]
    fn adding_machine_matches_odometer() {
        let a = build_automaton_group(&adding_machine_spec(), 4).unwrap();
        let o = build_odometer(&[2, 2, 2, 2]).unwrap();
        for l in 0..=4 {
            assert_eq!(a.levels()[l].generator_images(), o.levels()[l].generator_images());
        }
    }

    #[test]
    fn identity_only_spec_rejected() {
        let spec = AutomatonSpec::new(2, "e", vec![]).unwrap();
        assert!(matches!(build_automaton_group(&spec, 2), Err(Error::NotTransitive { .. })));
    }

    #[test]
    fn non_transitive_reports_orbits() {
        let s = StateDef::parse("state b = perm () sections 0:b 1:b", 2, "e").unwrap();
        let spec = AutomatonSpec::new(2, "e", vec![s]).unwrap();
        match build_automaton_group(&spec, 2) {
            Err(Error::NotTransitive { level, orbits, .. }) => assert_eq!((level, orbits), (1, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grigorchuk_generators_are_involutions() {
        let g = build_grigorchuk(5).unwrap();
        assert!(validate_chain(&g).is_valid());
        assert_eq!(g.alphabet().involutions(), &[true; 4]);
        for l in 0..=5 {
            for s in 0..4 {
                let p = g.levels()[l].generator_images()[s].clone();
                assert!(p.compose(&p).is_identity());
            }
            let bcd = g.alphabet().parse_word("b*c*d").unwrap();
            assert!(g.level_image(&bcd, l).unwrap().is_identity());
        }
    }

    #[test]
    fn adding_machine_is_not_an_involution() {
        assert_eq!(adding_machine_spec().involutions(), vec![false]);
    }

    #[test]
    fn grigorchuk_d_fixes_left_subtree() {
        let g = build_grigorchuk(4).unwrap();
        let d = g.alphabet().parse_word("d").unwrap();
        for l in 1..=4 {
            let p = g.level_image(&d, l).unwrap();
            for x in g.descendants(1, 0, l) {
                assert!(p.fixes(x));
            }
        }
        assert!(g.level_image(&d, 2).unwrap().is_identity());
        assert!(!g.level_image(&d, 3).unwrap().is_identity());
    }

    #[test]
    fn grigorchuk_level_one_kernel() {
        let g = build_grigorchuk(3).unwrap();
        let k: Vec<String> = g
            .kernel_words(1, 1)
            .unwrap()
            .iter()
            .map(|w| g.alphabet().render(w))
            .collect();
        assert_eq!(k, vec!["1", "b", "c", "d"]);
    }

    #[test]
    fn a_swaps_top_cells() {
        let g = build_grigorchuk(2).unwrap();
        let a = g.level_image(&Word::power(0, 1), 1).unwrap();
        assert_eq!(a.images(), &[1, 0]);
        assert_eq!(tree_index(2, &[1, 0]), 1);
    }

    #[test]
    fn state_line_round_trip() {
        let s = StateDef::parse("state b = perm () sections 0:a 1:c", 2, "e").unwrap();
        assert_eq!(StateDef::parse(&s.render(), 2, "e").unwrap(), s);
        assert!(StateDef::parse("b perm ()", 2, "e").is_err());
        assert!(StateDef::parse("b = perm () sections 5:a", 2, "e").is_err());
    }

    #[test]
    fn unknown_section_rejected() {
        let s = StateDef::parse("x = perm (0 1) sections 1:y", 2, "e").unwrap();
        assert!(AutomatonSpec::new(2, "e", vec![s]).is_err());
    }
}
