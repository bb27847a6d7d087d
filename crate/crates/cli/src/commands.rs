//! One function per verb. Each returns a JSON report, the constructed
//! artifact (if any) and whether the checked property holds.

use std::path::{Path, PathBuf};

use clap::{Subcommand, ValueEnum};
use parcause::games::{
    check_strategy, compose, copycat, determinism_witness, dual, find_iso, find_strategy_iso, hide_events, par, pseudo_pullback_ef,
    pullback_edc, race, Strategy,
};
use parcause::io::{self, format_rational};
use parcause::probability::{
    compose_valuations, conjunction, drop, duplication, prob_sum, push_forward,
    validate_valuation, ProbStrategy, Valuation,
};
use parcause::realisations::{enumerate_extremals, er, er_family, ges_of, pr};
use parcause::structures::{family_of, irreducibles, validate_family, validate_map};
use parcause::{Budget, Error, EventSet, Family, Result, StructMap, Structure, ValidationReport};
use serde_json::{json, Value};

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Validate a structure, map, family or strategy file
    Validate { file: PathBuf },
    /// List configurations, optionally up to a size
    Configs {
        file: PathBuf,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// The family of configurations of a structure
    Family { file: PathBuf },
    /// Irreducible configurations of a structure or family
    Irreducibles { file: PathBuf },
    /// Extremal causal realisations up to a size
    Extremals {
        file: PathBuf,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// The ese of prime extremals of a general structure or family
    Er { file: PathBuf },
    /// The general event structure of a structure
    Ges { file: PathBuf },
    /// The edc of prime configurations of a stable family
    Pr { file: PathBuf },
    /// Restrict a structure to the visible events
    Hide {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        visible: Vec<String>,
    },
    /// The dual game
    Dual { file: PathBuf },
    /// Parallel composition of two games
    Par { left: PathBuf, right: PathBuf },
    /// The copycat strategy on a game
    Copycat { file: PathBuf },
    /// Check that a game is race-free
    Racefree { file: PathBuf },
    /// Pullback of two maps with a common target
    Pullback {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Edc)]
        mode: Mode,
    },
    /// Composition of strategies `sigma: A ⇸ B` and `tau: B ⇸ C`
    Compose { sigma: PathBuf, tau: PathBuf },
    /// Check the strategy axioms
    CheckStrategy { file: PathBuf },
    /// Check determinism of a structure or a strategy
    Deterministic { file: PathBuf },
    /// Search for an isomorphism between two structures or strategies
    Iso { left: PathBuf, right: PathBuf },
    /// The drop function `d[y; x1, ..., xn]` of a valuation
    Drop {
        structure: PathBuf,
        valuation: PathBuf,
        /// The configuration `y`, comma separated
        #[arg(long, default_value = "")]
        y: String,
        /// One configuration `xi` above `y` per occurrence, comma separated
        #[arg(long = "x")]
        xs: Vec<String>,
    },
    /// Validate a configuration-valuation
    CheckValuation { structure: PathBuf, valuation: PathBuf },
    /// Compose two probabilistic strategies
    ComposeProb {
        sigma: PathBuf,
        sigma_valuation: PathBuf,
        tau: PathBuf,
        tau_valuation: PathBuf,
    },
    /// Push a valuation forward along a rigid map
    Pushforward { map: PathBuf, valuation: PathBuf },
    /// Probabilistic sum: a game, then strategy, valuation, weight triples
    Probsum {
        game: PathBuf,
        #[arg(num_args = 0..)]
        branches: Vec<String>,
    },
    /// Conjunction of two strategies in the same game
    Conj { left: PathBuf, right: PathBuf },
    /// The duplication strategy on a game
    Dup { file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Edc,
    Ef,
}

pub struct Outcome {
    pub report: Value,
    pub artifact: Option<String>,
    pub ok: bool,
}

impl Outcome {
    fn report(report: Value, ok: bool) -> Self {
        Outcome { report, artifact: None, ok }
    }

    fn built(report: Value, artifact: String) -> Self {
        Outcome { report, artifact: Some(artifact), ok: true }
    }
}

// ---------------------------------------------------------------- loading

enum Doc {
    Structure(Structure),
    Map(StructMap),
    Family(Family),
    Strategy(Strategy),
}

fn read(path: &Path) -> Result<(String, Value)> {
    let text = io::read_file(path)?;
    let v = serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Ok((text, v))
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load(path: &Path, b: &Budget) -> Result<Doc> {
    let (text, v) = read(path)?;
    let base = io::base_of(path);
    let has = |k: &str| v.get(k).is_some();
    let doc = if has("sigma") {
        io::strategy_from_value(v, &base, b).map(Doc::Strategy)
    } else if has("mapping") {
        io::map_from_value(v, &base).map(Doc::Map)
    } else if has("carrier") {
        io::parse_family(&text).map(Doc::Family)
    } else {
        io::structure_from_value(v).map(Doc::Structure)
    };
    in_file(path, doc)
}

fn wrong(path: &Path, want: &str) -> Error {
    Error::Format(format!("{}: expected {want}", path.display()))
}

fn structure(path: &Path, b: &Budget) -> Result<Structure> {
    match load(path, b)? {
        Doc::Structure(s) => Ok(s),
        _ => Err(wrong(path, "a structure")),
    }
}

/// A structure, or the inner structure of a strategy.
fn carrier(path: &Path, b: &Budget) -> Result<Structure> {
    match load(path, b)? {
        Doc::Structure(s) => Ok(s),
        Doc::Strategy(s) => Ok(s.inner),
        _ => Err(wrong(path, "a structure or strategy")),
    }
}

fn strategy(path: &Path, b: &Budget) -> Result<Strategy> {
    match load(path, b)? {
        Doc::Strategy(s) => Ok(s),
        _ => Err(wrong(path, "a strategy")),
    }
}

fn map(path: &Path, b: &Budget) -> Result<StructMap> {
    match load(path, b)? {
        Doc::Map(f) => Ok(f),
        _ => Err(wrong(path, "a map")),
    }
}

fn family(path: &Path, b: &Budget) -> Result<Family> {
    match load(path, b)? {
        Doc::Family(f) => Ok(f),
        Doc::Structure(s) => family_of(&s, b),
        _ => Err(wrong(path, "a structure or family")),
    }
}

fn valuation(path: &Path, s: &Structure, b: &Budget) -> Result<Valuation> {
    in_file(path, io::parse_valuation(&io::read_file(path)?, s, b))
}

fn set(s: &Structure, ids: &[String]) -> Result<EventSet> {
    let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
    s.set_of(&ids).map_err(|e| Error::Format(e.to_string()))
}

fn set_list(s: &Structure, ids: &str) -> Result<EventSet> {
    let ids: Vec<String> = ids.split(',').map(str::trim).filter(|i| !i.is_empty()).map(String::from).collect();
    set(s, &ids)
}

// ---------------------------------------------------------------- rendering

fn report_value(r: &ValidationReport) -> Value {
    let mut v = serde_json::to_value(r).expect("reports serialise");
    v["valid"] = json!(r.is_valid());
    v
}

fn names(s: &Structure, xs: &[EventSet]) -> Value {
    json!(xs.iter().map(|&x| s.set_names(x)).collect::<Vec<_>>())
}

fn structure_out(s: &Structure) -> Outcome {
    let report = json!({"events": s.len(), "structure": io::structure_to_value(s)});
    Outcome::built(report, io::write_structure(s))
}

fn strategy_out(s: &Strategy) -> Outcome {
    let report = json!({"events": s.inner.len(), "strategy": io::strategy_to_value(s)});
    Outcome::built(report, io::write_strategy(s))
}

fn prob_out(p: &ProbStrategy) -> Outcome {
    let doc = json!({
        "strategy": io::strategy_to_value(&p.strategy),
        "valuation": io::valuation_to_value(&p.strategy.inner, &p.valuation),
    });
    let report = json!({"events": p.strategy.inner.len(), "result": doc.clone()});
    Outcome::built(report, io::to_canonical(&doc))
}

fn map_value(f: &StructMap) -> Value {
    let m: serde_json::Map<String, Value> = f
        .named_pairs()
        .into_iter()
        .map(|(s, t)| (s, t.map(Value::String).unwrap_or(Value::Null)))
        .collect();
    Value::Object(m)
}

// ---------------------------------------------------------------- verbs

pub fn run(cmd: &Cmd, b: &Budget) -> Result<Outcome> {
    match cmd {
        Cmd::Validate { file } => {
            let (what, r) = match load(file, b)? {
                Doc::Structure(s) => ("structure", s.validate(b)?),
                Doc::Map(f) => ("map", validate_map(&f, b)?),
                Doc::Family(f) => ("family", validate_family(&f, b)?),
                Doc::Strategy(s) => ("strategy", check_strategy(&s, b)?),
            };
            let mut v = report_value(&r);
            v["file"] = json!(what);
            Ok(Outcome::report(v, r.is_valid()))
        }
        Cmd::Configs { file, max_size } => {
            let (s, cs) = match load(file, b)? {
                Doc::Family(f) => {
                    let cs: Vec<Value> = f.configs().iter().map(|&x| json!(f.set_names(x))).collect();
                    return Ok(Outcome::report(json!({"count": cs.len(), "configs": cs}), true));
                }
                Doc::Structure(s) => {
                    let cs = match max_size {
                        Some(n) => s.configs(*n, b)?,
                        None => s.all_configs(b)?,
                    };
                    (s, cs)
                }
                _ => return Err(wrong(file, "a structure or family")),
            };
            Ok(Outcome::report(json!({"count": cs.len(), "configs": names(&s, &cs)}), true))
        }
        Cmd::Family { file } => {
            let f = family_of(&structure(file, b)?, b)?;
            let report = json!({"family": io::family_to_value(&f)});
            Ok(Outcome::built(report, io::write_family(&f)))
        }
        Cmd::Irreducibles { file } => {
            let f = family(file, b)?;
            let irr: Vec<Vec<String>> = irreducibles(&f).into_iter().map(|x| f.set_names(x)).collect();
            Ok(Outcome::report(json!({"count": irr.len(), "irreducibles": irr}), true))
        }
        Cmd::Extremals { file, max_size } => {
            let f = family(file, b)?;
            let max = max_size.unwrap_or(b.max_config_size);
            let ext = enumerate_extremals(&f, max, b)?;
            let list: Vec<Value> = ext
                .iter()
                .map(|r| {
                    let mut v = io::realisation_to_value(r, &f);
                    v["prime"] = json!(r.top().is_some());
                    v
                })
                .collect();
            Ok(Outcome::report(json!({"count": list.len(), "max_size": max, "extremals": list}), true))
        }
        Cmd::Er { file } => {
            let s = match load(file, b)? {
                Doc::Family(f) => er_family(&f, b)?.structure,
                Doc::Structure(s) => er(&s, b)?.structure,
                _ => return Err(wrong(file, "a general structure or family")),
            };
            Ok(structure_out(&s))
        }
        Cmd::Ges { file } => Ok(structure_out(&ges_of(&structure(file, b)?, b)?)),
        Cmd::Pr { file } => Ok(structure_out(&pr(&family(file, b)?, b)?.structure)),
        Cmd::Hide { file, visible } => {
            let s = structure(file, b)?;
            Ok(structure_out(&hide_events(&s, set(&s, visible)?)?))
        }
        Cmd::Dual { file } => Ok(structure_out(&dual(&structure(file, b)?)?)),
        Cmd::Par { left, right } => Ok(structure_out(&par(&structure(left, b)?, &structure(right, b)?)?)),
        Cmd::Copycat { file } => Ok(strategy_out(&copycat(&structure(file, b)?, b)?)),
        Cmd::Racefree { file } => {
            let a = structure(file, b)?;
            Ok(match race(&a, b)? {
                None => Outcome::report(json!({"race_free": true}), true),
                Some((x, e, f)) => Outcome::report(
                    json!({"race_free": false, "witness": {"config": a.set_names(x), "events": [a.name(e), a.name(f)]}}),
                    false,
                ),
            })
        }
        Cmd::Pullback { f, g, mode } => pullback(&map(f, b)?, &map(g, b)?, *mode, b),
        Cmd::Compose { sigma, tau } => Ok(strategy_out(&compose(&strategy(sigma, b)?, &strategy(tau, b)?, b)?)),
        Cmd::CheckStrategy { file } => {
            let r = check_strategy(&strategy(file, b)?, b)?;
            Ok(Outcome::report(report_value(&r), r.is_valid()))
        }
        Cmd::Deterministic { file } => {
            let s = carrier(file, b)?;
            Ok(match determinism_witness(&s, b)? {
                None => Outcome::report(json!({"deterministic": true}), true),
                Some(x) => Outcome::report(json!({"deterministic": false, "witness": s.set_names(x)}), false),
            })
        }
        Cmd::Iso { left, right } => {
            let found = match (load(left, b)?, load(right, b)?) {
                (Doc::Structure(p), Doc::Structure(q)) => find_iso(&p, &q, b)?,
                (Doc::Strategy(p), Doc::Strategy(q)) => find_strategy_iso(&p, &q, b)?,
                _ => return Err(Error::Usage("iso compares two structures or two strategies".into())),
            };
            Ok(match found {
                Some(f) => Outcome::report(json!({"isomorphic": true, "iso": map_value(&f)}), true),
                None => Outcome::report(json!({"isomorphic": false}), false),
            })
        }
        Cmd::Drop { structure: sp, valuation: vp, y, xs } => {
            let s = carrier(sp, b)?;
            let v = valuation(vp, &s, b)?;
            let lists = xs.iter().map(|x| set_list(&s, x)).collect::<Result<Vec<_>>>()?;
            let d = drop(&s, &v, set_list(&s, y)?, &lists)?;
            Ok(Outcome::report(json!({"drop": format_rational(&d)}), true))
        }
        Cmd::CheckValuation { structure: sp, valuation: vp } => {
            let s = carrier(sp, b)?;
            let r = validate_valuation(&s, &valuation(vp, &s, b)?, b)?;
            Ok(Outcome::report(report_value(&r), r.is_valid()))
        }
        Cmd::ComposeProb { sigma, sigma_valuation, tau, tau_valuation } => {
            let sp = prob_strategy(sigma, sigma_valuation, b)?;
            let tp = prob_strategy(tau, tau_valuation, b)?;
            Ok(prob_out(&compose_valuations(&sp, &tp, b)?))
        }
        Cmd::Pushforward { map: mp, valuation: vp } => {
            let f = map(mp, b)?;
            let v = push_forward(&f, &valuation(vp, &f.source, b)?, b)?;
            let report = json!({"valuation": io::valuation_to_value(&f.target, &v)});
            Ok(Outcome::built(report, io::write_valuation(&f.target, &v)))
        }
        Cmd::Probsum { game, branches } => {
            if branches.len() % 3 != 0 {
                return Err(Error::Usage("branches come as strategy, valuation, weight triples".into()));
            }
            let mut ps = Vec::new();
            let mut ws = Vec::new();
            for t in branches.chunks(3) {
                ps.push(prob_strategy(Path::new(&t[0]), Path::new(&t[1]), b)?);
                ws.push(io::parse_rational(&t[2])?);
            }
            Ok(prob_out(&prob_sum(&structure(game, b)?, &ps, &ws, b)?))
        }
        Cmd::Conj { left, right } => Ok(strategy_out(&conjunction(&strategy(left, b)?, &strategy(right, b)?, b)?)),
        Cmd::Dup { file } => Ok(strategy_out(&duplication(&structure(file, b)?, b)?)),
    }
}

fn prob_strategy(sp: &Path, vp: &Path, b: &Budget) -> Result<ProbStrategy> {
    let strategy = strategy(sp, b)?;
    let valuation = valuation(vp, &strategy.inner, b)?;
    Ok(ProbStrategy { strategy, valuation })
}

fn pullback(f: &StructMap, g: &StructMap, mode: Mode, b: &Budget) -> Result<Outcome> {
    if f.target != g.target {
        return Err(Error::Usage("pullback maps need a common target".into()));
    }
    let (s, p1, p2) = match mode {
        Mode::Edc => {
            let p = pullback_edc(f, g, b)?;
            (p.structure, p.proj1, p.proj2)
        }
        Mode::Ef => {
            let total = |h: &StructMap| -> Result<Vec<usize>> {
                h.mapping
                    .iter()
                    .map(|m| m.ok_or_else(|| Error::Usage("pullback maps must be total".into())))
                    .collect()
            };
            let ef = pseudo_pullback_ef(
                &family_of(&f.source, b)?,
                &total(f)?,
                &family_of(&g.source, b)?,
                &total(g)?,
                &family_of(&f.target, b)?,
                b,
            )?;
            let e = er_family(&ef.family, b)?;
            let leg = |proj: &[usize], target: &Structure| {
                StructMap::new(e.structure.clone(), target.clone(), e.tops.iter().map(|&t| Some(proj[t])).collect())
            };
            let p1 = leg(&ef.proj1, &f.source)?;
            let p2 = leg(&ef.proj2, &g.source)?;
            (e.structure.clone(), p1, p2)
        }
    };
    let mut out = structure_out(&s);
    out.report["proj1"] = map_value(&p1);
    out.report["proj2"] = map_value(&p2);
    Ok(out)
}
