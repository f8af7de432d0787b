use std::fmt::Write;

use super::config::{parse_config, RunConfig};
use crate::artifact::{Artifact, ChainSteps};
use crate::error::{invalid, Error, Result};
use crate::fullgroup::{
    coe_check, identity_matching, return_equivalence_check, twist_action, CoeCertificate,
    CoeOutcome, ReturnEquivOutcome, TwistGenerator,
};
use crate::gallery::export_tree;
use crate::model::{validate_chain, ChainModel, PathPoint, WordBound};
use crate::regularity::{
    ascending_chain_probe, germ_hausdorff_witness, kernel_normality_check, lqa_violation_search,
    topological_freeness_check, Clopen, Verdict,
};

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// The check passed, or a certificate was produced.
    Pass,
    /// The property fails and a witness was produced.
    Violated,
    /// Nothing conclusive within the bounds.
    Inconclusive,
    InputError,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violated => 1,
            Status::Inconclusive => 2,
            Status::InputError => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub status: Status,
    pub report: String,
    /// `(file name, contents)`.
    pub artifact: Option<(String, String)>,
}

fn failure(err: Error, mut report: String) -> RunOutcome {
    let status = match err {
        Error::Budget { .. } => Status::Inconclusive,
        _ => Status::InputError,
    };
    writeln!(report, "error: {err}").unwrap();
    RunOutcome {
        status,
        report,
        artifact: None,
    }
}

/// Parses and runs a configuration; parse errors give status 3.
pub fn run_text(config: &str) -> RunOutcome {
    match parse_config(config) {
        Ok(cfg) => run(&cfg),
        Err(e) => failure(e, String::new()),
    }
}

/// Runs the configured command. Deterministic: equal configurations give
/// byte-identical outcomes.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    let mut report = String::new();
    match execute(cfg, &mut report) {
        Ok((status, artifact)) => RunOutcome {
            status,
            report,
            artifact,
        },
        Err(e) => failure(e, report),
    }
}

/// Re-checks an emitted artifact against the models of `cfg`.
pub fn verify(cfg: &RunConfig, artifact: &str) -> RunOutcome {
    let mut report = String::new();
    let result = (|| -> Result<Status> {
        let models = Models::build(cfg)?;
        let (m1, m2) = if cfg.command == "twist" {
            let ext = twisted(cfg, &models.primary)?;
            (models.primary, ext)
        } else {
            (models.primary, models.second)
        };
        let art = Artifact::parse(artifact, &m1, Some(&m2))?;
        writeln!(report, "verify: {}", art.kind()).unwrap();
        let ok = art.verify(&m1, Some(&m2))?;
        writeln!(report, "result: {}", if ok { "replays" } else { "does not replay" }).unwrap();
        Ok(if ok { Status::Pass } else { Status::Violated })
    })();
    match result {
        Ok(status) => RunOutcome {
            status,
            report,
            artifact: None,
        },
        Err(e) => failure(e, report),
    }
}

struct Models {
    primary: ChainModel,
    second: ChainModel,
}

impl Models {
    fn build(cfg: &RunConfig) -> Result<Models> {
        let (primary, partner) = cfg.model.build()?;
        let second = match (&cfg.model2, partner) {
            (Some(src), _) => src.build()?.0,
            (None, Some(p)) => p,
            (None, None) => primary.clone(),
        };
        Ok(Models { primary, second })
    }
}

fn clopen_param(cfg: &RunConfig, m: &ChainModel, key: &str) -> Result<Option<Clopen>> {
    cfg.params.get(key).map(|t| Clopen::parse(m, t)).transpose()
}

fn point_param(cfg: &RunConfig, m: &ChainModel) -> Result<PathPoint> {
    match cfg.params.get("point") {
        None => m.base_path(m.depth()),
        Some(text) => {
            let (d, x) = text
                .split_once(':')
                .ok_or_else(|| invalid(format!("point must look like depth:index, got {text:?}")))?;
            let d = d.trim().parse().map_err(|_| invalid(format!("bad point {text:?}")))?;
            let x = x.trim().parse().map_err(|_| invalid(format!("bad point {text:?}")))?;
            m.path_point(d, x)
        }
    }
}

fn parse_twist(m: &ChainModel, text: &str) -> Result<TwistGenerator> {
    let (name, rest) = text
        .split_once(':')
        .ok_or_else(|| invalid(format!("twist must look like NAME: SOURCE -> IMAGE, got {text:?}")))?;
    let (source, image) = rest
        .split_once("->")
        .ok_or_else(|| invalid(format!("twist {text:?} lacks '->'")))?;
    Ok(TwistGenerator {
        name: name.trim().to_string(),
        source: m.alphabet().parse_word(source)?,
        image: m.alphabet().parse_word(image)?,
    })
}

fn twisted(cfg: &RunConfig, m: &ChainModel) -> Result<ChainModel> {
    let set = clopen_param(cfg, m, "set")?.ok_or_else(|| invalid("twist needs a `set` clopen"))?;
    let twists = cfg
        .twists
        .iter()
        .map(|t| parse_twist(m, t))
        .collect::<Result<Vec<_>>>()?;
    twist_action(m, &set, &twists)
}

fn write_coe(report: &mut String, cert: &CoeCertificate, m1: &ChainModel, m2: &ChainModel) {
    for (tag, table, target) in [("forward", &cert.forward, m2), ("backward", &cert.backward, m1)] {
        for (g, pe) in table {
            let pieces: Vec<String> = pe
                .pieces()
                .iter()
                .map(|(c, w)| format!("{c}->{}", target.alphabet().render(w)))
                .collect();
            writeln!(report, "{tag} {g}: {}", pieces.join(" ")).unwrap();
        }
    }
}

type Executed = (Status, Option<(String, String)>);

fn execute(cfg: &RunConfig, report: &mut String) -> Result<Executed> {
    let models = Models::build(cfg)?;
    let m = &models.primary;
    let second = &models.second;
    let depth = cfg.bounds.depth.unwrap_or(m.depth());
    m.check_level(depth)?;
    let bound = WordBound::new(cfg.bounds.max_len).with_cap(cfg.bounds.budget);
    let (l, d) = (cfg.bounds.max_len, depth);
    writeln!(report, "model: {}", m.name()).unwrap();
    writeln!(report, "command: {}", cfg.command).unwrap();
    writeln!(report, "bounds: L={l} D={d}").unwrap();

    let name_for = |default: &str| cfg.artifact_name.clone().unwrap_or_else(|| default.to_string());
    let emit = |report: &mut String, art: Artifact, default: &str, m2: Option<&ChainModel>| -> Result<Option<(String, String)>> {
        let text = art.render(m, m2)?;
        let name = name_for(default);
        writeln!(report, "artifact: {name}").unwrap();
        Ok(Some((name, text)))
    };

    let (status, artifact) = match cfg.command.as_str() {
        "validate" => {
            let v = validate_chain(m);
            for c in &v.levels {
                writeln!(
                    report,
                    "level {}: points={} orbits={} equivariance={} basepoint={} fibers={}",
                    c.level,
                    m.point_count(c.level),
                    c.orbit_count,
                    c.equivariance_violation
                        .map_or("ok".to_string(), |(g, x)| format!(
                            "fails({} at {x})",
                            m.alphabet().symbol(g)
                        )),
                    if c.basepoint_compatible { "ok" } else { "fails" },
                    if c.fibers_uniform { "uniform" } else { "ragged" },
                )
                .unwrap();
            }
            if v.is_valid() {
                writeln!(report, "result: valid").unwrap();
                (Status::Pass, None)
            } else {
                writeln!(report, "result: invalid at level {}", v.first_failure().unwrap().level).unwrap();
                (Status::Violated, None)
            }
        }
        "report" => {
            let al = m.alphabet();
            let gens: Vec<String> = (0..al.len())
                .map(|g| {
                    if al.is_involutive(g) {
                        format!("{} (involution)", al.symbol(g))
                    } else {
                        al.symbol(g).to_string()
                    }
                })
                .collect();
            writeln!(report, "generators: {}", gens.join(", ")).unwrap();
            for lv in 0..=m.depth() {
                writeln!(report, "level {lv}: points={} orbits={}", m.point_count(lv), m.orbits(lv).len()).unwrap();
            }
            let kernel = m.kernel_words(d, bound)?;
            let shown: Vec<String> = kernel.iter().take(16).map(|w| al.render(w)).collect();
            writeln!(
                report,
                "kernel at level {d}: {} words of length <= {l}: {}{}",
                kernel.len(),
                shown.join(" "),
                if kernel.len() > shown.len() { " ..." } else { "" }
            )
            .unwrap();
            writeln!(report, "result: reported").unwrap();
            (Status::Pass, None)
        }
        "freeness" => match topological_freeness_check(m, bound, d)? {
            Verdict::Witness(w) => {
                writeln!(
                    report,
                    "result: not-free witness word={} cylinder={} depth={}",
                    m.alphabet().render(&w.word),
                    w.cylinder,
                    w.depth
                )
                .unwrap();
                let a = emit(report, Artifact::Freeness(w), "freeness-witness.tsv", None)?;
                (Status::Violated, a)
            }
            Verdict::UpToBounds => {
                writeln!(report, "result: free-up-to-bounds(L={l}, D={d})").unwrap();
                (Status::Pass, None)
            }
        },
        "lqa" => {
            let outer = clopen_param(cfg, m, "outer")?.unwrap_or_else(Clopen::full);
            let r = lqa_violation_search(m, &outer, bound, d)?;
            writeln!(report, "outer: {outer} adapted={}", r.outer_adapted).unwrap();
            match r.verdict {
                Verdict::Witness(w) => {
                    writeln!(
                        report,
                        "result: not-lqa witness word={} inner={} depth={}",
                        m.alphabet().render(&w.word),
                        w.inner,
                        w.depth
                    )
                    .unwrap();
                    let a = emit(report, Artifact::Lqa(w), "lqa-witness.tsv", None)?;
                    (Status::Violated, a)
                }
                Verdict::UpToBounds => {
                    writeln!(report, "result: lqa-up-to-bounds(L={l}, D={d})").unwrap();
                    (Status::Pass, None)
                }
            }
        }
        "normality" => {
            let inner = clopen_param(cfg, m, "inner")?.ok_or_else(|| invalid("normality needs an `inner` clopen"))?;
            let outer = clopen_param(cfg, m, "outer")?.unwrap_or_else(Clopen::full);
            writeln!(report, "inner: {inner} outer: {outer}").unwrap();
            match kernel_normality_check(m, &inner, &outer, bound, d)? {
                Verdict::Witness(w) => {
                    writeln!(
                        report,
                        "result: not-normal conjugator={} kernel={}",
                        m.alphabet().render(&w.conjugator),
                        m.alphabet().render(&w.kernel)
                    )
                    .unwrap();
                    let a = emit(report, Artifact::Normality(w), "normality-witness.tsv", None)?;
                    (Status::Violated, a)
                }
                Verdict::UpToBounds => {
                    writeln!(report, "result: normal-up-to-bounds(L={l}, D={d})").unwrap();
                    (Status::Pass, None)
                }
            }
        }
        "chain-probe" => {
            let point = point_param(cfg, m)?;
            let depths: Vec<usize> = match cfg.params.get("depths") {
                Some(t) => t
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| invalid(format!("bad depths {t:?}"))))
                    .collect::<Result<_>>()?,
                None => (1..d.min(m.depth())).collect(),
            };
            let r = ascending_chain_probe(m, &point, &depths, bound)?;
            for (dep, h) in r.depths.iter().zip(&r.members) {
                writeln!(report, "H at depth {dep}: {} words", h.len()).unwrap();
            }
            for s in &r.steps {
                let sep = s
                    .separating
                    .as_ref()
                    .map_or("none".to_string(), |w| m.alphabet().render(w));
                writeln!(report, "step {}->{}: inclusion={} separating={sep}", s.lower, s.upper, s.inclusion_holds).unwrap();
            }
            if r.strict_increases().next().is_some() {
                writeln!(report, "result: strictly-increasing").unwrap();
                let a = emit(report, Artifact::ChainProbe(ChainSteps::from_report(&r)), "chain-probe-witness.tsv", None)?;
                (Status::Violated, a)
            } else {
                writeln!(report, "result: stationary-up-to-bounds(L={l})").unwrap();
                (Status::Pass, None)
            }
        }
        "germ" => {
            let point = point_param(cfg, m)?;
            match germ_hausdorff_witness(m, &point, bound)? {
                Verdict::Witness(g) => {
                    writeln!(report, "result: non-hausdorff witness word={}", m.alphabet().render(&g.word)).unwrap();
                    let a = emit(report, Artifact::Germ(g), "germ-witness.tsv", None)?;
                    (Status::Violated, a)
                }
                Verdict::UpToBounds => {
                    writeln!(report, "result: hausdorff-up-to-bounds(L={l})").unwrap();
                    (Status::Pass, None)
                }
            }
        }
        "coe" => {
            writeln!(report, "model2: {}", second.name()).unwrap();
            match coe_check(m, second, bound, d)? {
                CoeOutcome::Certified(c) => {
                    write_coe(report, &c, m, second);
                    writeln!(report, "result: coe-certificate(L={l}, D={d}) max pieces {}", c.max_pieces()).unwrap();
                    let a = emit(report, Artifact::Coe(c), "coe-certificate.tsv", Some(second))?;
                    (Status::Pass, a)
                }
                CoeOutcome::NotFound { direction, generator } => {
                    writeln!(report, "result: not-found-within-bounds {direction} generator {generator}").unwrap();
                    (Status::Inconclusive, None)
                }
            }
        }
        "return-equiv" => {
            writeln!(report, "model2: {}", second.name()).unwrap();
            let u1 = clopen_param(cfg, m, "u1")?.unwrap_or_else(Clopen::full);
            let u2 = match cfg.params.get("u2") {
                Some(t) => Clopen::parse(second, t)?,
                None => Clopen::parse(second, &u1.to_string())?,
            };
            let h = match cfg.params.get("h").map(String::as_str) {
                None | Some("identity") => identity_matching(m, &u1, d)?,
                Some(t) => t
                    .split(',')
                    .map(|pair| {
                        let (x, y) = pair
                            .split_once('>')
                            .ok_or_else(|| invalid(format!("h entries look like x>y, got {pair:?}")))?;
                        let x = x.trim().parse().map_err(|_| invalid(format!("bad h entry {pair:?}")))?;
                        let y = y.trim().parse().map_err(|_| invalid(format!("bad h entry {pair:?}")))?;
                        Ok((x, y))
                    })
                    .collect::<Result<_>>()?,
            };
            writeln!(report, "u1: {u1} u2: {u2}").unwrap();
            match return_equivalence_check(m, &u1, second, &u2, &h, bound, d)? {
                ReturnEquivOutcome::Certified(c) => {
                    writeln!(
                        report,
                        "result: return-equivalent-up-to-bounds(L={l}, D={d}) matched {}+{}",
                        c.forward.len(),
                        c.backward.len()
                    )
                    .unwrap();
                    let a = emit(report, Artifact::ReturnEquiv(c), "return-equiv-certificate.tsv", Some(second))?;
                    (Status::Pass, a)
                }
                ReturnEquivOutcome::Unmatched { direction, word } => {
                    let source = if direction == crate::fullgroup::Direction::Forward { m } else { second };
                    writeln!(
                        report,
                        "result: unmatched {direction} restriction of {}",
                        source.alphabet().render(&word)
                    )
                    .unwrap();
                    (Status::Inconclusive, None)
                }
            }
        }
        "twist" => {
            let ext = twisted(cfg, m)?;
            writeln!(report, "extended: {} generators {}", ext.name(), ext.alphabet().symbols().join(",")).unwrap();
            let valid = validate_chain(&ext).is_valid();
            writeln!(report, "extended valid: {valid}").unwrap();
            match topological_freeness_check(&ext, bound, d)? {
                Verdict::Witness(w) => writeln!(
                    report,
                    "extended freeness: witness word={} cylinder={}",
                    ext.alphabet().render(&w.word),
                    w.cylinder
                )
                .unwrap(),
                Verdict::UpToBounds => writeln!(report, "extended freeness: free-up-to-bounds").unwrap(),
            }
            match coe_check(m, &ext, bound, d)? {
                CoeOutcome::Certified(c) => {
                    write_coe(report, &c, m, &ext);
                    writeln!(report, "result: coe-certificate(L={l}, D={d}) max pieces {}", c.max_pieces()).unwrap();
                    let a = emit(report, Artifact::Coe(c), "twist-certificate.tsv", Some(&ext))?;
                    (if valid { Status::Pass } else { Status::Violated }, a)
                }
                CoeOutcome::NotFound { direction, generator } => {
                    writeln!(report, "result: not-found-within-bounds {direction} generator {generator}").unwrap();
                    (Status::Inconclusive, None)
                }
            }
        }
        "export-dot" => {
            let dd = match cfg.params.get("depth") {
                Some(t) => t.trim().parse().map_err(|_| invalid(format!("bad depth {t:?}")))?,
                None => d,
            };
            let text = export_tree(m, dd)?;
            let name = name_for("tree.dot");
            writeln!(report, "result: exported depth {dd}").unwrap();
            writeln!(report, "artifact: {name}").unwrap();
            (Status::Pass, Some((name, text)))
        }
        other => return Err(invalid(format!("unknown command {other:?}"))),
    };
    Ok((status, artifact))
}
