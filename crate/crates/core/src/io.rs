//! JSON reading and canonical writing for every value the library consumes
//! or produces.
//!
//! Emitted documents have sorted keys, two-space indentation and a trailing
//! newline, so equal values always serialise to identical bytes.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::error::{format_err, Error, Result};
use crate::eventset::EventSet;
use crate::games::Strategy;
use crate::probability::Valuation;
use crate::realisations::Realisation;
use crate::structures::{Consistency, Family, Kind, Polarity, StructMap, Structure, StructureBuilder};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EventDoc {
    id: String,
    polarity: Option<Polarity>,
    class: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnablingDoc {
    set: Vec<String>,
    event: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    kind: Kind,
    events: Vec<EventDoc>,
    #[serde(default)]
    causality: Vec<(String, String)>,
    #[serde(default)]
    enablings: Vec<EnablingDoc>,
    conflicts: Option<Vec<Vec<String>>>,
    consistent: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    carrier: Vec<String>,
    configs: Vec<Vec<String>>,
    #[serde(default)]
    classes: Vec<Vec<String>>,
    polarity: Option<BTreeMap<String, Polarity>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValueDoc {
    config: Vec<String>,
    value: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuationDoc {
    values: Vec<ValueDoc>,
    #[serde(default)]
    complete_by_lmc: bool,
}

fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what}: {e}")))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Format(format!("{what}: {e}")))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Canonical text of a JSON value.
pub fn to_canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- structures

pub fn structure_from_value(v: Value) -> Result<Structure> {
    let doc: StructureDoc = from_value(v, "structure")?;
    let mut b = StructureBuilder::new(doc.kind);
    for e in &doc.events {
        b = b.full_event(&e.id, e.polarity, e.class.as_deref());
    }
    for (x, y) in doc.causality {
        b = b.cause_raw(x, y);
    }
    for en in doc.enablings {
        b = b.enable_raw(en.set, en.event);
    }
    if let Some(c) = doc.conflicts {
        b = b.conflicts_raw(c);
    }
    if let Some(c) = doc.consistent {
        b = b.consistent_raw(c);
    }
    b.build()
}

pub fn parse_structure(text: &str) -> Result<Structure> {
    structure_from_value(parse_json(text, "structure")?)
}

pub fn structure_to_value(s: &Structure) -> Value {
    let names = |x: EventSet| s.set_names(x);
    let events: Vec<Value> = (0..s.len())
        .map(|e| {
            let mut m = serde_json::Map::new();
            m.insert("id".into(), json!(s.name(e)));
            if let Some(p) = s.polarity(e) {
                m.insert("polarity".into(), json!(p.symbol()));
            }
            if s.class_name(e) != s.name(e) {
                m.insert("class".into(), json!(s.class_name(e)));
            }
            Value::Object(m)
        })
        .collect();
    let mut m = serde_json::Map::new();
    m.insert("kind".into(), json!(s.kind().as_str()));
    m.insert("events".into(), Value::Array(events));
    if s.kind().is_prime_like() {
        let pairs: Vec<Value> = s
            .immediate_causality()
            .into_iter()
            .map(|(a, b)| json!([s.name(a), s.name(b)]))
            .collect();
        m.insert("causality".into(), Value::Array(pairs));
    } else {
        let mut ens: Vec<(EventSet, usize)> = s.enablings().to_vec();
        ens.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.canonical_cmp(&b.0)));
        let ens: Vec<Value> = ens
            .into_iter()
            .map(|(x, e)| json!({"set": names(x), "event": s.name(e)}))
            .collect();
        m.insert("enablings".into(), Value::Array(ens));
    }
    match s.consistency() {
        Consistency::Conflicts(cs) => {
            m.insert("conflicts".into(), json!(cs.iter().map(|&x| names(x)).collect::<Vec<_>>()));
        }
        Consistency::Explicit(gs) => {
            m.insert("consistent".into(), json!(gs.iter().map(|&x| names(x)).collect::<Vec<_>>()));
        }
    }
    Value::Object(m)
}

pub fn write_structure(s: &Structure) -> String {
    to_canonical(&structure_to_value(s))
}

// ---------------------------------------------------------------- maps

/// A structure given inline or as a path, resolved against `base`.
fn structure_ref(v: Value, base: &Path) -> Result<Structure> {
    match v {
        Value::String(p) => {
            let path = base.join(p);
            parse_structure(&read_file(&path)?)
        }
        other => structure_from_value(other),
    }
}

fn mapping_from_value(source: &Structure, target: &Structure, v: Value) -> Result<Vec<Option<usize>>> {
    let m: BTreeMap<String, Option<String>> = from_value(v, "mapping")?;
    let mut out = vec![None; source.len()];
    for (k, t) in m {
        let e = source
            .index_of(&k)
            .ok_or_else(|| Error::Format(format!("mapping: unknown source event `{k}`")))?;
        out[e] = match t {
            Some(t) => Some(
                target
                    .index_of(&t)
                    .ok_or_else(|| Error::Format(format!("mapping: unknown target event `{t}`")))?,
            ),
            None => None,
        };
    }
    Ok(out)
}

fn mapping_to_value(f: &StructMap) -> Value {
    let m: serde_json::Map<String, Value> = f
        .named_pairs()
        .into_iter()
        .map(|(s, t)| (s, t.map(Value::String).unwrap_or(Value::Null)))
        .collect();
    Value::Object(m)
}

pub fn map_from_value(v: Value, base: &Path) -> Result<StructMap> {
    let Value::Object(mut m) = v else {
        return format_err("map: expected an object");
    };
    let mut take = |k: &str| m.remove(k).ok_or_else(|| Error::Format(format!("map: missing `{k}`")));
    let source = structure_ref(take("source")?, base)?;
    let target = structure_ref(take("target")?, base)?;
    let mapping = take("mapping")?;
    if let Some(k) = m.keys().next() {
        return format_err(format!("map: unknown field `{k}`"));
    }
    let mapping = mapping_from_value(&source, &target, mapping)?;
    StructMap::new(source, target, mapping)
}

pub fn parse_map(text: &str, base: &Path) -> Result<StructMap> {
    map_from_value(parse_json(text, "map")?, base)
}

pub fn map_to_value(f: &StructMap) -> Value {
    json!({
        "source": structure_to_value(&f.source),
        "target": structure_to_value(&f.target),
        "mapping": mapping_to_value(f),
    })
}

pub fn write_map(f: &StructMap) -> String {
    to_canonical(&map_to_value(f))
}

// ---------------------------------------------------------------- strategies

pub fn strategy_from_value(v: Value, base: &Path, budget: &Budget) -> Result<Strategy> {
    let Value::Object(mut m) = v else {
        return format_err("strategy: expected an object");
    };
    let mut take = |k: &str| m.remove(k).ok_or_else(|| Error::Format(format!("strategy: missing `{k}`")));
    let game = structure_ref(take("game")?, base)?;
    let inner = structure_ref(take("inner")?, base)?;
    let sigma = take("sigma")?;
    if let Some(k) = m.keys().next() {
        return format_err(format!("strategy: unknown field `{k}`"));
    }
    let mapping = mapping_from_value(&inner, &game, sigma)?;
    Strategy::new(StructMap::new(inner, game, mapping)?, budget)
}

pub fn parse_strategy(text: &str, base: &Path, budget: &Budget) -> Result<Strategy> {
    strategy_from_value(parse_json(text, "strategy")?, base, budget)
}

pub fn strategy_to_value(s: &Strategy) -> Value {
    json!({
        "game": structure_to_value(&s.game),
        "inner": structure_to_value(&s.inner),
        "sigma": mapping_to_value(&s.sigma),
    })
}

pub fn write_strategy(s: &Strategy) -> String {
    to_canonical(&strategy_to_value(s))
}

/// Whether a document looks like a strategy rather than a bare structure.
pub fn is_strategy_doc(text: &str) -> bool {
    matches!(serde_json::from_str::<Value>(text), Ok(Value::Object(m)) if m.contains_key("sigma"))
}

// ---------------------------------------------------------------- families

pub fn parse_family(text: &str) -> Result<Family> {
    let doc: FamilyDoc = from_value(parse_json(text, "family")?, "family")?;
    let look = |id: &str| -> Result<usize> {
        doc.carrier
            .iter()
            .position(|c| c == id)
            .ok_or_else(|| Error::Format(format!("family: unknown event id `{id}`")))
    };
    let mut classes = doc.carrier.clone();
    let mut seen = vec![false; doc.carrier.len()];
    for cls in &doc.classes {
        let Some(first) = cls.iter().min() else { continue };
        for id in cls {
            let e = look(id)?;
            if seen[e] {
                return format_err(format!("family: `{id}` lies in two classes"));
            }
            seen[e] = true;
            classes[e] = first.clone();
        }
    }
    let polarity = match &doc.polarity {
        None => None,
        Some(p) => {
            let mut out = Vec::new();
            for id in &doc.carrier {
                out.push(*p.get(id).ok_or_else(|| Error::Format(format!("family: no polarity for `{id}`")))?);
            }
            if p.len() != doc.carrier.len() {
                return format_err("family: polarity mentions an unknown event");
            }
            Some(out)
        }
    };
    let mut configs = Vec::new();
    for c in &doc.configs {
        let mut x = EventSet::EMPTY;
        for id in c {
            x.insert(look(id)?);
        }
        configs.push(x);
    }
    Family::new(doc.carrier.clone(), classes, polarity, configs)
}

pub fn family_to_value(f: &Family) -> Value {
    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in 0..f.len() {
        groups.entry(f.class_name(e)).or_default().push(f.name(e));
    }
    let classes: Vec<Vec<&str>> = groups.into_values().filter(|g| g.len() > 1).collect();
    let mut m = serde_json::Map::new();
    m.insert("carrier".into(), json!(f.names()));
    m.insert(
        "configs".into(),
        json!(f.configs().iter().map(|&x| f.set_names(x)).collect::<Vec<_>>()),
    );
    m.insert("classes".into(), json!(classes));
    if let Some(p) = f.polarity() {
        let pol: serde_json::Map<String, Value> =
            (0..f.len()).map(|e| (f.name(e).to_string(), json!(p[e].symbol()))).collect();
        m.insert("polarity".into(), Value::Object(pol));
    }
    Value::Object(m)
}

pub fn write_family(f: &Family) -> String {
    to_canonical(&family_to_value(f))
}

// ---------------------------------------------------------------- rationals and valuations

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Format(format!("`{s}` is not a rational of the form num/den"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Always `num/den` in lowest terms with a positive denominator.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_valuation(text: &str, s: &Structure, budget: &Budget) -> Result<Valuation> {
    let doc: ValuationDoc = from_value(parse_json(text, "valuation")?, "valuation")?;
    let mut values = HashMap::new();
    for entry in doc.values {
        let ids: Vec<&str> = entry.config.iter().map(String::as_str).collect();
        let x = s.set_of(&ids).map_err(|e| Error::Format(format!("valuation: {e}")))?;
        if values.insert(x, parse_rational(&entry.value)?).is_some() {
            return format_err(format!("valuation: {:?} is given twice", entry.config));
        }
    }
    if doc.complete_by_lmc {
        Valuation::complete_by_lmc(s, values, budget)
    } else {
        Valuation::new(s, values, budget)
    }
}

pub fn valuation_to_value(s: &Structure, v: &Valuation) -> Value {
    let values: Vec<Value> = v
        .table()
        .into_iter()
        .map(|(x, q)| json!({"config": s.set_names(x), "value": format_rational(&q)}))
        .collect();
    json!({"values": values, "complete_by_lmc": false})
}

pub fn write_valuation(s: &Structure, v: &Valuation) -> String {
    to_canonical(&valuation_to_value(s, v))
}

// ---------------------------------------------------------------- realisations

pub fn realisation_to_value(r: &Realisation, f: &Family) -> Value {
    let label: serde_json::Map<String, Value> = (0..r.len())
        .map(|e| (r.names()[e].clone(), json!(f.name(r.labels()[e]))))
        .collect();
    let order: Vec<Value> = r
        .covers()
        .into_iter()
        .map(|(a, b)| json!([r.names()[a], r.names()[b]]))
        .collect();
    json!({"elements": r.names(), "order": order, "label": label})
}

/// Resolves `path` and returns its parent, the base for relative references.
pub fn base_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}
