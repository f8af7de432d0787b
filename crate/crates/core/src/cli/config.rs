//! The INI-like run configuration.
//!
//! ```text
//! [model]
//! builder = grigorchuk
//! depth = 4
//! [command]
//! name = lqa
//! [bounds]
//! L = 3
//! D = 3
//! ```
//!
//! Keys are `key = value`; `#` and `;` start comment lines. Automaton states
//! are written `state NAME = perm (0 1) sections 0:e 1:b`. Unknown sections
//! and keys, and repeated keys, are errors reported with their line.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::gallery::{
    build_automaton_group, build_dihedral, build_grigorchuk, build_heisenberg, build_odometer,
    build_product_toy, AutomatonSpec, CayleyTable, StateDef,
};
use crate::model::search::DEFAULT_CAP;
use crate::model::{ActionLevel, ChainModel, GeneratorAlphabet, LevelPermutation};

pub const COMMANDS: [&str; 11] = [
    "validate",
    "report",
    "freeness",
    "lqa",
    "normality",
    "chain-probe",
    "germ",
    "coe",
    "return-equiv",
    "twist",
    "export-dot",
];

/// How to build a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSource {
    Odometer { arities: Vec<usize> },
    Dihedral { p: u64, depth: usize },
    Heisenberg { p: u64, q: u64, depth: usize },
    Grigorchuk { depth: usize },
    Automaton { spec: AutomatonSpec, depth: usize },
    /// `which` (1 or 2) selects the primary model of the pair.
    ProductToy {
        first: CayleyTable,
        second: CayleyTable,
        arities: Vec<usize>,
        which: usize,
    },
    Explicit(ExplicitModel),
}

/// Level tables given directly: `perm.<level>.<generator>` in cycle
/// notation (identity when absent) and `proj.<level>` as a comma list
/// (default `x mod |X_{level−1}|`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitModel {
    pub generators: Vec<String>,
    pub involutions: Vec<String>,
    pub sizes: Vec<usize>,
    pub perms: BTreeMap<(usize, String), String>,
    pub projections: BTreeMap<usize, Vec<usize>>,
}

impl ModelSource {
    /// Builds the model and, for product toys, its partner.
    pub fn build(&self) -> Result<(ChainModel, Option<ChainModel>)> {
        Ok(match self {
            ModelSource::Odometer { arities } => (build_odometer(arities)?, None),
            ModelSource::Dihedral { p, depth } => (build_dihedral(*p, *depth)?, None),
            ModelSource::Heisenberg { p, q, depth } => (build_heisenberg(*p, *q, *depth)?, None),
            ModelSource::Grigorchuk { depth } => (build_grigorchuk(*depth)?, None),
            ModelSource::Automaton { spec, depth } => (build_automaton_group(spec, *depth)?, None),
            ModelSource::ProductToy {
                first,
                second,
                arities,
                which,
            } => {
                let (a, b) = build_product_toy(first, second, arities)?;
                if *which == 1 {
                    (a, Some(b))
                } else {
                    (b, Some(a))
                }
            }
            ModelSource::Explicit(e) => (e.build()?, None),
        })
    }
}

impl ExplicitModel {
    fn build(&self) -> Result<ChainModel> {
        let invol: Vec<bool> = self
            .generators
            .iter()
            .map(|g| self.involutions.contains(g))
            .collect();
        if let Some(bad) = self.involutions.iter().find(|g| !self.generators.contains(g)) {
            return Err(invalid(format!("involution {bad} is not a generator")));
        }
        let alphabet = GeneratorAlphabet::with_involutions(self.generators.clone(), invol)?;
        if self.sizes.first() != Some(&1) {
            return Err(invalid("explicit models start with a single root point (sizes = 1,…)"));
        }
        for (l, g) in self.perms.keys() {
            if *l >= self.sizes.len() || !self.generators.contains(g) {
                return Err(invalid(format!("perm.{l}.{g} names no level or generator")));
            }
        }
        let mut levels = Vec::new();
        for (l, &n) in self.sizes.iter().enumerate() {
            let gens = self
                .generators
                .iter()
                .map(|g| match self.perms.get(&(l, g.clone())) {
                    Some(text) => LevelPermutation::from_cycles(l, n, text),
                    None => Ok(LevelPermutation::identity(l, n)),
                })
                .collect::<Result<Vec<_>>>()?;
            let proj = (l > 0).then(|| {
                self.projections
                    .get(&l)
                    .cloned()
                    .unwrap_or_else(|| (0..n).map(|x| x % self.sizes[l - 1]).collect())
            });
            levels.push(ActionLevel::new(l, gens, proj, 0)?);
        }
        ChainModel::new("explicit", alphabet, levels)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Word length `L`.
    pub max_len: usize,
    /// Depth `D`; the model depth when absent.
    pub depth: Option<usize>,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub model: ModelSource,
    pub model2: Option<ModelSource>,
    pub command: String,
    /// Command parameters other than `name`, already checked against the
    /// command's key set. `twist` may repeat and is kept in order.
    pub params: BTreeMap<String, String>,
    pub twists: Vec<String>,
    pub bounds: Bounds,
    pub artifact_name: Option<String>,
    pub report_name: Option<String>,
}

fn command_keys(cmd: &str) -> &'static [&'static str] {
    match cmd {
        "validate" | "report" | "freeness" | "coe" => &[],
        "lqa" => &["outer"],
        "normality" => &["inner", "outer"],
        "chain-probe" => &["point", "depths"],
        "germ" => &["point"],
        "return-equiv" => &["u1", "u2", "h"],
        "twist" => &["set"],
        "export-dot" => &["depth"],
        _ => &[],
    }
}

struct Line<'a> {
    no: usize,
    key: &'a str,
    value: &'a str,
}

fn err(no: usize, msg: impl std::fmt::Display) -> crate::Error {
    invalid(format!("line {no}: {msg}"))
}

fn parse_num<T: std::str::FromStr>(l: &Line) -> Result<T> {
    l.value
        .parse()
        .map_err(|_| err(l.no, format!("{} must be a number, got {:?}", l.key, l.value)))
}

fn parse_list(l: &Line) -> Result<Vec<usize>> {
    l.value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| err(l.no, format!("{} must be a comma list of numbers", l.key)))
        })
        .collect()
}

fn parse_table(l: &Line) -> Result<CayleyTable> {
    let v = l.value;
    let t = if v == "klein4" {
        Ok(CayleyTable::klein_four())
    } else if let Some(n) = v.strip_prefix("cyclic") {
        let n = n
            .parse()
            .map_err(|_| err(l.no, format!("bad cyclic group {v:?}")))?;
        CayleyTable::cyclic(n)
    } else {
        let rows = v
            .split(';')
            .map(|row| {
                row.split_whitespace()
                    .map(|s| s.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| err(l.no, format!("bad Cayley table {v:?}")))?;
        CayleyTable::new(rows)
    };
    t.map_err(|e| err(l.no, e))
}

/// Keys of one section, with duplicate detection.
struct Section<'a> {
    name: &'a str,
    lines: Vec<Line<'a>>,
    states: Vec<(usize, &'a str)>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&Line<'a>> {
        self.lines.iter().find(|l| l.key == key)
    }

    fn need(&self, key: &str) -> Result<&Line<'a>> {
        self.get(key)
            .ok_or_else(|| invalid(format!("[{}] is missing the key {key:?}", self.name)))
    }

    fn check_keys(&self, allowed: &[&str], repeatable: &[&str]) -> Result<()> {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for l in &self.lines {
            if !allowed.contains(&l.key) {
                return Err(err(l.no, format!("unknown key {:?} in [{}]", l.key, self.name)));
            }
            if let Some(first) = seen.insert(l.key, l.no) {
                if !repeatable.contains(&l.key) {
                    return Err(err(l.no, format!("duplicate key {:?} (first at line {first})", l.key)));
                }
            }
        }
        Ok(())
    }
}

fn parse_model(sec: &Section) -> Result<ModelSource> {
    let builder = sec.need("builder")?;
    let depth = || -> Result<usize> { parse_num(sec.need("depth")?) };
    let keys: &[&str] = match builder.value {
        "odometer" => &["builder", "arities"],
        "dihedral" => &["builder", "p", "depth"],
        "heisenberg" => &["builder", "p", "q", "depth"],
        "grigorchuk" => &["builder", "depth"],
        "automaton" => &["builder", "arity", "identity", "depth"],
        "product-toy" => &["builder", "group1", "group2", "arities", "which"],
        "explicit" => &["builder", "generators", "involutions", "sizes"],
        other => return Err(err(builder.no, format!("unknown builder {other:?}"))),
    };
    if builder.value == "explicit" {
        for l in &sec.lines {
            if !keys.contains(&l.key) && !l.key.starts_with("perm.") && !l.key.starts_with("proj.") {
                return Err(err(l.no, format!("unknown key {:?} in [{}]", l.key, sec.name)));
            }
        }
        let extra: Vec<&str> = sec.lines.iter().map(|l| l.key).filter(|k| k.contains('.')).collect();
        let mut allowed = keys.to_vec();
        allowed.extend(extra);
        sec.check_keys(&allowed, &[])?;
    } else {
        sec.check_keys(keys, &[])?;
    }
    if builder.value != "automaton" {
        if let Some((no, _)) = sec.states.first() {
            return Err(err(*no, "state lines are only allowed for the automaton builder"));
        }
    }
    Ok(match builder.value {
        "odometer" => ModelSource::Odometer {
            arities: parse_list(sec.need("arities")?)?,
        },
        "dihedral" => ModelSource::Dihedral {
            p: parse_num(sec.need("p")?)?,
            depth: depth()?,
        },
        "heisenberg" => ModelSource::Heisenberg {
            p: parse_num(sec.need("p")?)?,
            q: parse_num(sec.need("q")?)?,
            depth: depth()?,
        },
        "grigorchuk" => ModelSource::Grigorchuk { depth: depth()? },
        "automaton" => {
            let arity: usize = parse_num(sec.need("arity")?)?;
            let identity = sec.get("identity").map_or("e", |l| l.value);
            let states = sec
                .states
                .iter()
                .map(|(no, text)| StateDef::parse(text, arity, identity).map_err(|e| err(*no, e)))
                .collect::<Result<Vec<_>>>()?;
            ModelSource::Automaton {
                spec: AutomatonSpec::new(arity, identity, states)?,
                depth: depth()?,
            }
        }
        "product-toy" => {
            let which = match sec.get("which") {
                None => 1,
                Some(l) => match parse_num(l)? {
                    w @ (1 | 2) => w,
                    _ => return Err(err(l.no, "which must be 1 or 2")),
                },
            };
            ModelSource::ProductToy {
                first: parse_table(sec.need("group1")?)?,
                second: parse_table(sec.need("group2")?)?,
                arities: parse_list(sec.need("arities")?)?,
                which,
            }
        }
        _ => {
            let names = |l: &Line| -> Vec<String> {
                l.value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            };
            let mut perms = BTreeMap::new();
            let mut projections = BTreeMap::new();
            for l in &sec.lines {
                if let Some(rest) = l.key.strip_prefix("perm.") {
                    let (lv, g) = rest
                        .split_once('.')
                        .ok_or_else(|| err(l.no, "perm keys look like perm.<level>.<generator>"))?;
                    let lv = lv.parse().map_err(|_| err(l.no, "bad level in perm key"))?;
                    perms.insert((lv, g.to_string()), l.value.to_string());
                } else if let Some(lv) = l.key.strip_prefix("proj.") {
                    let lv = lv.parse().map_err(|_| err(l.no, "bad level in proj key"))?;
                    projections.insert(lv, parse_list(l)?);
                }
            }
            ModelSource::Explicit(ExplicitModel {
                generators: names(sec.need("generators")?),
                involutions: sec.get("involutions").map(names).unwrap_or_default(),
                sizes: parse_list(sec.need("sizes")?)?,
                perms,
                projections,
            })
        }
    })
}

/// Strict parse of the configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(no, "unclosed section header"))?
                .trim();
            if !["model", "model2", "command", "bounds", "output"].contains(&name) {
                return Err(err(no, format!("unknown section [{name}]")));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(err(no, format!("section [{name}] appears twice")));
            }
            sections.push(Section {
                name,
                lines: Vec::new(),
                states: Vec::new(),
            });
            continue;
        }
        let sec = sections
            .last_mut()
            .ok_or_else(|| err(no, "key outside any section"))?;
        if line.starts_with("state ") {
            sec.states.push((no, line));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(no, format!("expected key = value, got {line:?}")))?;
        sec.lines.push(Line {
            no,
            key: key.trim(),
            value: value.trim(),
        });
    }
    let find = |name: &str| sections.iter().find(|s| s.name == name);
    for s in &sections {
        if s.name != "model" && s.name != "model2" {
            if let Some((no, _)) = s.states.first() {
                return Err(err(*no, format!("state lines are not allowed in [{}]", s.name)));
            }
        }
    }

    let model = parse_model(find("model").ok_or_else(|| invalid("missing [model] section"))?)?;
    let model2 = find("model2").map(parse_model).transpose()?;

    let cmd_sec = find("command").ok_or_else(|| invalid("missing [command] section"))?;
    let name = cmd_sec.need("name")?;
    if !COMMANDS.contains(&name.value) {
        return Err(err(name.no, format!("unknown command {:?}", name.value)));
    }
    let mut allowed = vec!["name"];
    allowed.extend(command_keys(name.value));
    let repeatable: &[&str] = if name.value == "twist" {
        allowed.push("twist");
        &["twist"]
    } else {
        &[]
    };
    cmd_sec.check_keys(&allowed, repeatable)?;
    let params = cmd_sec
        .lines
        .iter()
        .filter(|l| l.key != "name" && l.key != "twist")
        .map(|l| (l.key.to_string(), l.value.to_string()))
        .collect();
    let twists = cmd_sec
        .lines
        .iter()
        .filter(|l| l.key == "twist")
        .map(|l| l.value.to_string())
        .collect();

    let mut bounds = Bounds {
        max_len: 4,
        depth: None,
        budget: DEFAULT_CAP,
    };
    if let Some(b) = find("bounds") {
        b.check_keys(&["L", "D", "budget"], &[])?;
        if let Some(l) = b.get("L") {
            bounds.max_len = parse_num(l)?;
        }
        if let Some(l) = b.get("D") {
            bounds.depth = Some(parse_num(l)?);
        }
        if let Some(l) = b.get("budget") {
            bounds.budget = parse_num(l)?;
            if bounds.budget == 0 {
                return Err(err(l.no, "budget must be positive"));
            }
        }
    }
    let (mut artifact_name, mut report_name) = (None, None);
    if let Some(o) = find("output") {
        o.check_keys(&["artifact", "report"], &[])?;
        for (key, slot) in [("artifact", &mut artifact_name), ("report", &mut report_name)] {
            if let Some(l) = o.get(key) {
                if l.value.is_empty() || l.value.contains(['/', '\\']) || l.value.starts_with('.') {
                    return Err(err(l.no, format!("{key} must be a plain file name")));
                }
                *slot = Some(l.value.to_string());
            }
        }
    }
    Ok(RunConfig {
        model,
        model2,
        command: name.value.to_string(),
        params,
        twists,
        bounds,
        artifact_name,
        report_name,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_odometer() {
        let cfg = parse_config("[model]\nbuilder = odometer\narities = 2,2,2\n[command]\nname = validate\n").unwrap();
        assert_eq!(cfg.model, ModelSource::Odometer { arities: vec![2, 2, 2] });
        assert_eq!(cfg.command, "validate");
        assert_eq!(cfg.bounds.max_len, 4);
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let e = parse_config("[model]\nbuilder = odometer\narities = 2\ncolour = red\n[command]\nname = validate\n")
            .unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
        assert!(e.to_string().contains("colour"));
    }

    #[test]
    fn grigorchuk_lqa() {
        let cfg = parse_config(
            "[model]\nbuilder = grigorchuk\ndepth = 4\n[command]\nname = lqa\n[bounds]\nL = 3\nD = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.model, ModelSource::Grigorchuk { depth: 4 });
        assert_eq!(cfg.bounds.max_len, 3);
        assert_eq!(cfg.bounds.depth, Some(3));
    }

    #[test]
    fn automaton_states() {
        let text = "[model]\nbuilder = automaton\narity = 2\ndepth = 3\n\
                    state a = perm (0 1) sections 0:e 1:a\n[command]\nname = report\n";
        let cfg = parse_config(text).unwrap();
        let (m, partner) = cfg.model.build().unwrap();
        assert!(partner.is_none());
        assert_eq!(m.point_count(3), 8);
    }

    #[test]
    fn explicit_model() {
        let text = "[model]\nbuilder = explicit\ngenerators = t\nsizes = 1,2,4\n\
                    perm.1.t = (0 1)\nperm.2.t = (0 1 2 3)\n[command]\nname = validate\n";
        let (m, _) = parse_config(text).unwrap().model.build().unwrap();
        assert_eq!(m.depth(), 2);
    }

    #[test]
    fn structural_errors() {
        assert!(parse_config("builder = odometer\n").is_err());
        assert!(parse_config("[model]\nbuilder = odometer\narities = 2\n").is_err());
        assert!(parse_config("[model]\nbuilder = nope\n[command]\nname = validate\n").is_err());
        assert!(parse_config("[model]\nbuilder = odometer\narities = 2\n[command]\nname = fly\n").is_err());
        assert!(parse_config("[model]\nbuilder = odometer\narities = 2\narities = 3\n[command]\nname = validate\n").is_err());
        assert!(parse_config("[model]\nbuilder = odometer\narities = 2\n[command]\nname = lqa\nu1 = 0:0\n").is_err());
        assert!(parse_config("[model]\nbuilder = odometer\narities = 2\n[command]\nname = validate\n[extra]\n").is_err());
        assert!(parse_config("[model]\nbuilder = odometer\narities = x\n[command]\nname = validate\n").is_err());
    }

    #[test]
    fn twist_lines_repeat() {
        let text = "[model]\nbuilder = odometer\narities = 2,2\n[command]\nname = twist\nset = 1:0\n\
                    twist = s: t^2 -> t^-2\ntwist = r: 1 -> 1\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.twists.len(), 2);
        assert_eq!(cfg.params["set"], "1:0");
    }
}
