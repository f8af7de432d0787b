//! Line-oriented text form of witnesses and certificates.
//!
//! One record per line, fields separated by tabs, `#` starts a comment. The
//! first record is `kind`. Words are written in the alphabet of the model
//! they belong to, clopens as `level:c1,c2`, path points as `depth:x`.
//! Certificates carry `claim\tup-to-bounds`.

use std::fmt::Write;

use crate::error::{invalid, Result};
use crate::fullgroup::{CoeCertificate, PiecewiseElement, ReturnEquivCertificate};
use crate::model::{ChainModel, PathPoint, Word};
use crate::regularity::{
    ChainProbeReport, Clopen, FreenessWitness, GermWitness, LqaWitness, NormalityWitness,
};

/// Replayable strict steps of an ascending chain probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSteps {
    pub point: PathPoint,
    pub check_depth: usize,
    /// `(lower, upper, separating word)`.
    pub steps: Vec<(usize, usize, Word)>,
}

impl ChainSteps {
    pub fn from_report(r: &ChainProbeReport) -> Self {
        ChainSteps {
            point: r.point.clone(),
            check_depth: r.check_depth,
            steps: r
                .strict_increases()
                .map(|s| (s.lower, s.upper, s.separating.clone().expect("strict step")))
                .collect(),
        }
    }

    pub fn verify(&self, model: &ChainModel) -> Result<bool> {
        for (lo, hi, w) in &self.steps {
            if !crate::regularity::verify_separating_step(model, &self.point, *lo, *hi, w, self.check_depth)? {
                return Ok(false);
            }
        }
        Ok(!self.steps.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Artifact {
    Freeness(FreenessWitness),
    Lqa(LqaWitness),
    Normality(NormalityWitness),
    ChainProbe(ChainSteps),
    Germ(GermWitness),
    Coe(CoeCertificate),
    ReturnEquiv(ReturnEquivCertificate),
}

fn point_text(p: &PathPoint) -> String {
    format!("{}:{}", p.depth(), p.at(p.depth()))
}

fn write_pieces(out: &mut String, tag: &str, table: &[(String, PiecewiseElement)], target: &ChainModel) {
    for (g, pe) in table {
        for (c, w) in pe.pieces() {
            writeln!(out, "{tag}\t{g}\t{c}\t{}", target.alphabet().render(w)).unwrap();
        }
    }
}

fn second<'a>(m2: Option<&'a ChainModel>, kind: &str) -> Result<&'a ChainModel> {
    m2.ok_or_else(|| invalid(format!("a {kind} artifact needs two models")))
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Freeness(_) => "freeness",
            Artifact::Lqa(_) => "lqa",
            Artifact::Normality(_) => "normality",
            Artifact::ChainProbe(_) => "chain-probe",
            Artifact::Germ(_) => "germ",
            Artifact::Coe(_) => "coe",
            Artifact::ReturnEquiv(_) => "return-equiv",
        }
    }

    /// Renders the artifact. `m2` is required for the two-model kinds.
    pub fn render(&self, m1: &ChainModel, m2: Option<&ChainModel>) -> Result<String> {
        let al = m1.alphabet();
        let mut o = String::new();
        writeln!(o, "kind\t{}", self.kind()).unwrap();
        writeln!(o, "model\t{}", m1.name()).unwrap();
        match self {
            Artifact::Freeness(w) => {
                writeln!(o, "claim\twitness").unwrap();
                writeln!(o, "word\t{}", al.render(&w.word)).unwrap();
                writeln!(o, "cylinder\t{}", w.cylinder).unwrap();
                writeln!(o, "depth\t{}", w.depth).unwrap();
            }
            Artifact::Lqa(w) => {
                writeln!(o, "claim\twitness").unwrap();
                writeln!(o, "word\t{}", al.render(&w.word)).unwrap();
                writeln!(o, "inner\t{}", w.inner).unwrap();
                writeln!(o, "outer\t{}", w.outer).unwrap();
                writeln!(o, "depth\t{}", w.depth).unwrap();
            }
            Artifact::Normality(w) => {
                writeln!(o, "claim\twitness").unwrap();
                writeln!(o, "conjugator\t{}", al.render(&w.conjugator)).unwrap();
                writeln!(o, "kernel\t{}", al.render(&w.kernel)).unwrap();
                writeln!(o, "inner\t{}", w.inner).unwrap();
                writeln!(o, "outer\t{}", w.outer).unwrap();
                writeln!(o, "depth\t{}", w.depth).unwrap();
            }
            Artifact::ChainProbe(c) => {
                writeln!(o, "claim\twitness").unwrap();
                writeln!(o, "point\t{}", point_text(&c.point)).unwrap();
                writeln!(o, "depth\t{}", c.check_depth).unwrap();
                for (lo, hi, w) in &c.steps {
                    writeln!(o, "step\t{lo}\t{hi}\t{}", al.render(w)).unwrap();
                }
            }
            Artifact::Germ(g) => {
                writeln!(o, "claim\twitness").unwrap();
                writeln!(o, "word\t{}", al.render(&g.word)).unwrap();
                writeln!(o, "point\t{}", point_text(&g.point)).unwrap();
                writeln!(o, "depth\t{}", g.depth).unwrap();
                for c in &g.trivial_cells {
                    writeln!(o, "trivial\t{c}").unwrap();
                }
            }
            Artifact::Coe(c) => {
                let m2 = second(m2, "coe")?;
                writeln!(o, "model2\t{}", m2.name()).unwrap();
                writeln!(o, "claim\tup-to-bounds").unwrap();
                writeln!(o, "max_len\t{}", c.max_len).unwrap();
                writeln!(o, "depth\t{}", c.depth).unwrap();
                write_pieces(&mut o, "forward", &c.forward, m2);
                write_pieces(&mut o, "backward", &c.backward, m1);
            }
            Artifact::ReturnEquiv(c) => {
                let m2 = second(m2, "return-equiv")?;
                writeln!(o, "model2\t{}", m2.name()).unwrap();
                writeln!(o, "claim\tup-to-bounds").unwrap();
                writeln!(o, "max_len\t{}", c.max_len).unwrap();
                writeln!(o, "depth\t{}", c.depth).unwrap();
                writeln!(o, "u1\t{}", c.u1).unwrap();
                writeln!(o, "u2\t{}", c.u2).unwrap();
                for (x, y) in &c.h {
                    writeln!(o, "h\t{x}\t{y}").unwrap();
                }
                for (a, b) in &c.forward {
                    writeln!(o, "forward\t{}\t{}", al.render(a), m2.alphabet().render(b)).unwrap();
                }
                for (a, b) in &c.backward {
                    writeln!(o, "backward\t{}\t{}", m2.alphabet().render(a), al.render(b)).unwrap();
                }
            }
        }
        Ok(o)
    }

    /// Parses an artifact against the model(s) it refers to.
    pub fn parse(text: &str, m1: &ChainModel, m2: Option<&ChainModel>) -> Result<Artifact> {
        let recs = Records::new(text)?;
        let kind = recs.one("kind")?;
        let name = recs.one("model")?;
        if name != m1.name() {
            return Err(invalid(format!("artifact is for model {name:?}, not {:?}", m1.name())));
        }
        let al = m1.alphabet();
        let word = |key: &str| -> Result<Word> { al.parse_word(recs.one(key)?) };
        let clopen = |key: &str| -> Result<Clopen> { Clopen::parse(m1, recs.one(key)?) };
        let depth = || -> Result<usize> { recs.number("depth") };
        let point = || -> Result<PathPoint> {
            let text = recs.one("point")?;
            let (d, x) = text
                .split_once(':')
                .ok_or_else(|| invalid(format!("bad point {text:?}")))?;
            let d = d.parse().map_err(|_| invalid(format!("bad point {text:?}")))?;
            let x = x.parse().map_err(|_| invalid(format!("bad point {text:?}")))?;
            m1.path_point(d, x)
        };
        let art = match kind {
            "freeness" => Artifact::Freeness(FreenessWitness {
                word: word("word")?,
                cylinder: clopen("cylinder")?,
                depth: depth()?,
            }),
            "lqa" => Artifact::Lqa(LqaWitness {
                word: word("word")?,
                inner: clopen("inner")?,
                outer: clopen("outer")?,
                depth: depth()?,
            }),
            "normality" => Artifact::Normality(NormalityWitness {
                conjugator: word("conjugator")?,
                kernel: word("kernel")?,
                inner: clopen("inner")?,
                outer: clopen("outer")?,
                depth: depth()?,
            }),
            "chain-probe" => {
                let steps = recs
                    .all("step", 3)?
                    .into_iter()
                    .map(|(n, f)| Ok((num(f[0], n)?, num(f[1], n)?, al.parse_word(f[2])?)))
                    .collect::<Result<_>>()?;
                Artifact::ChainProbe(ChainSteps {
                    point: point()?,
                    check_depth: depth()?,
                    steps,
                })
            }
            "germ" => Artifact::Germ(GermWitness {
                word: word("word")?,
                point: point()?,
                trivial_cells: recs
                    .all("trivial", 1)?
                    .into_iter()
                    .map(|(_, f)| Clopen::parse(m1, f[0]))
                    .collect::<Result<_>>()?,
                depth: depth()?,
            }),
            "coe" => {
                let m2 = second(m2, "coe")?;
                check_second(&recs, m2)?;
                recs.expect_claim()?;
                Artifact::Coe(CoeCertificate {
                    forward: read_pieces(&recs, "forward", m2)?,
                    backward: read_pieces(&recs, "backward", m1)?,
                    max_len: recs.number("max_len")?,
                    depth: depth()?,
                })
            }
            "return-equiv" => {
                let m2 = second(m2, "return-equiv")?;
                check_second(&recs, m2)?;
                recs.expect_claim()?;
                let h = recs
                    .all("h", 2)?
                    .into_iter()
                    .map(|(n, f)| Ok((num(f[0], n)?, num(f[1], n)?)))
                    .collect::<Result<_>>()?;
                let pairs = |key: &str, a: &ChainModel, b: &ChainModel| -> Result<Vec<(Word, Word)>> {
                    recs.all(key, 2)?
                        .into_iter()
                        .map(|(_, f)| Ok((a.alphabet().parse_word(f[0])?, b.alphabet().parse_word(f[1])?)))
                        .collect()
                };
                Artifact::ReturnEquiv(ReturnEquivCertificate {
                    u1: clopen("u1")?,
                    u2: Clopen::parse(m2, recs.one("u2")?)?,
                    depth: depth()?,
                    max_len: recs.number("max_len")?,
                    h,
                    forward: pairs("forward", m1, m2)?,
                    backward: pairs("backward", m2, m1)?,
                })
            }
            other => return Err(invalid(format!("unknown artifact kind {other:?}"))),
        };
        Ok(art)
    }

    /// Replays the artifact from model primitives.
    pub fn verify(&self, m1: &ChainModel, m2: Option<&ChainModel>) -> Result<bool> {
        match self {
            Artifact::Freeness(w) => w.verify(m1),
            Artifact::Lqa(w) => w.verify(m1),
            Artifact::Normality(w) => w.verify(m1),
            Artifact::ChainProbe(c) => c.verify(m1),
            Artifact::Germ(g) => g.verify(m1),
            Artifact::Coe(c) => c.verify(m1, second(m2, "coe")?),
            Artifact::ReturnEquiv(c) => c.verify(m1, second(m2, "return-equiv")?),
        }
    }
}

fn num(text: &str, line: usize) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| invalid(format!("line {line}: expected a number, got {text:?}")))
}

fn check_second(recs: &Records, m2: &ChainModel) -> Result<()> {
    let name = recs.one("model2")?;
    if name != m2.name() {
        return Err(invalid(format!("artifact second model is {name:?}, not {:?}", m2.name())));
    }
    Ok(())
}

fn read_pieces(recs: &Records, key: &str, target: &ChainModel) -> Result<Vec<(String, PiecewiseElement)>> {
    let mut groups: Vec<(String, Vec<(Clopen, Word)>)> = Vec::new();
    for (_, f) in recs.all(key, 3)? {
        let piece = (Clopen::parse(target, f[1])?, target.alphabet().parse_word(f[2])?);
        match groups.last_mut() {
            Some((g, pieces)) if g == f[0] => pieces.push(piece),
            _ => groups.push((f[0].to_string(), vec![piece])),
        }
    }
    groups
        .into_iter()
        .map(|(g, pieces)| Ok((g, PiecewiseElement::new(target, pieces)?)))
        .collect()
}

/// Non-comment records with their 1-based line numbers.
struct Records<'a> {
    lines: Vec<(usize, &'a str, Vec<&'a str>)>,
}

impl<'a> Records<'a> {
    fn new(text: &'a str) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let key = fields.next().unwrap_or_default().trim();
            lines.push((i + 1, key, fields.collect()));
        }
        Ok(Records { lines })
    }

    fn one(&self, key: &str) -> Result<&'a str> {
        let mut hits = self.lines.iter().filter(|(_, k, _)| *k == key);
        let (n, _, f) = hits
            .next()
            .ok_or_else(|| invalid(format!("artifact lacks a {key:?} record")))?;
        if let Some((m, _, _)) = hits.next() {
            return Err(invalid(format!("line {m}: duplicate {key:?} record (first at line {n})")));
        }
        match f.as_slice() {
            [v] => Ok(v.trim()),
            _ => Err(invalid(format!("line {n}: {key:?} takes one field"))),
        }
    }

    fn number(&self, key: &str) -> Result<usize> {
        let v = self.one(key)?;
        v.parse()
            .map_err(|_| invalid(format!("record {key:?} must be a number, got {v:?}")))
    }

    fn all(&self, key: &str, arity: usize) -> Result<Vec<(usize, Vec<&'a str>)>> {
        self.lines
            .iter()
            .filter(|(_, k, _)| *k == key)
            .map(|(n, _, f)| {
                if f.len() == arity {
                    Ok((*n, f.iter().map(|s| s.trim()).collect()))
                } else {
                    Err(invalid(format!("line {n}: {key:?} takes {arity} fields")))
                }
            })
            .collect()
    }

    fn expect_claim(&self) -> Result<()> {
        match self.one("claim")? {
            "up-to-bounds" => Ok(()),
            other => Err(invalid(format!("certificate claim must be up-to-bounds, got {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fullgroup::{coe_check, identity_matching, return_equivalence_check, CoeOutcome, ReturnEquivOutcome};
    use crate::gallery::{build_grigorchuk, build_odometer, build_product_toy, tree_index, CayleyTable};
    use crate::regularity::{ascending_chain_probe, germ_hausdorff_witness, kernel_normality_check, lqa_violation_search, topological_freeness_check};

    fn round_trip(a: &Artifact, m1: &ChainModel, m2: Option<&ChainModel>) {
        let text = a.render(m1, m2).unwrap();
        let back = Artifact::parse(&text, m1, m2).unwrap();
        assert_eq!(&back, a);
        assert!(back.verify(m1, m2).unwrap());
        assert_eq!(back.render(m1, m2).unwrap(), text);
    }

    #[test]
    fn grigorchuk_witnesses_round_trip() {
        let g = build_grigorchuk(4).unwrap();
        let f = topological_freeness_check(&g, 1, 3).unwrap();
        round_trip(&Artifact::Freeness(f.witness().unwrap().clone()), &g, None);
        let l = lqa_violation_search(&g, &Clopen::full(), 1, 2).unwrap();
        round_trip(&Artifact::Lqa(l.verdict.witness().unwrap().clone()), &g, None);
        let v = Clopen::cylinder(&g, 2, 0).unwrap();
        let u = Clopen::cylinder(&g, 1, 0).unwrap();
        let n = kernel_normality_check(&g, &v, &u, 4, 4).unwrap();
        round_trip(&Artifact::Normality(n.witness().unwrap().clone()), &g, None);
        let x = g.base_path(4).unwrap();
        let p = ascending_chain_probe(&g, &x, &[1, 2, 3], 4).unwrap();
        round_trip(&Artifact::ChainProbe(ChainSteps::from_report(&p)), &g, None);
        let x = g.path_point(4, tree_index(2, &[1, 1, 1, 1])).unwrap();
        let gw = germ_hausdorff_witness(&g, &x, 4).unwrap();
        round_trip(&Artifact::Germ(gw.witness().unwrap().clone()), &g, None);
    }

    #[test]
    fn certificates_round_trip() {
        let (a, b) = build_product_toy(&CayleyTable::cyclic(4).unwrap(), &CayleyTable::klein_four(), &[2, 2])
            .unwrap();
        let CoeOutcome::Certified(c) = coe_check(&a, &b, 1, 3).unwrap() else { panic!() };
        round_trip(&Artifact::Coe(c), &a, Some(&b));
        let m = build_odometer(&[2, 2, 2]).unwrap();
        let u = Clopen::cylinder(&m, 1, 0).unwrap();
        let h = identity_matching(&m, &u, 3).unwrap();
        let ReturnEquivOutcome::Certified(c) = return_equivalence_check(&m, &u, &m, &u, &h, 3, 3).unwrap() else {
            panic!()
        };
        round_trip(&Artifact::ReturnEquiv(c), &m, Some(&m));
    }

    #[test]
    fn tampered_witness_fails_replay() {
        let g = build_grigorchuk(4).unwrap();
        let text = "kind\tlqa\nmodel\tgrigorchuk\nclaim\twitness\nword\ta\ninner\t1:0\nouter\t0:0\ndepth\t4\n";
        let a = Artifact::parse(text, &g, None).unwrap();
        assert!(!a.verify(&g, None).unwrap());
    }

    #[test]
    fn malformed_records_rejected() {
        let g = build_grigorchuk(3).unwrap();
        assert!(Artifact::parse("kind\tlqa\n", &g, None).is_err());
        assert!(Artifact::parse("kind\tnope\nmodel\tgrigorchuk\n", &g, None).is_err());
        assert!(Artifact::parse("kind\tlqa\nmodel\tother\n", &g, None).is_err());
        let dup = "kind\tfreeness\nmodel\tgrigorchuk\nword\td\nword\td\ncylinder\t1:0\ndepth\t3\n";
        assert!(Artifact::parse(dup, &g, None).is_err());
    }
}
