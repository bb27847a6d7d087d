use std::collections::HashSet;

use super::{fmt_set, Kind, Structure, ValidationReport, Violation};
use crate::budget::Budget;
use crate::error::{usage, Error, Result};
use crate::eventset::EventSet;

/// A partial function between the events of two structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructMap {
    pub source: Structure,
    pub target: Structure,
    pub mapping: Vec<Option<usize>>,
}

impl StructMap {
    pub fn new(source: Structure, target: Structure, mapping: Vec<Option<usize>>) -> Result<Self> {
        if mapping.len() != source.len() {
            return usage("mapping length differs from the number of source events");
        }
        if mapping.iter().flatten().any(|&t| t >= target.len()) {
            return usage("mapping points outside the target");
        }
        Ok(StructMap {
            source,
            target,
            mapping,
        })
    }

    /// Builds a map from source-name to target-name pairs; unlisted events
    /// are undefined.
    pub fn from_names(source: Structure, target: Structure, pairs: &[(&str, Option<&str>)]) -> Result<Self> {
        let mut mapping = vec![None; source.len()];
        for (s, t) in pairs {
            let i = source.id(s)?;
            mapping[i] = match t {
                Some(t) => Some(target.id(t)?),
                None => None,
            };
        }
        StructMap::new(source, target, mapping)
    }

    pub fn identity(s: &Structure) -> Self {
        StructMap {
            source: s.clone(),
            target: s.clone(),
            mapping: (0..s.len()).map(Some).collect(),
        }
    }

    pub fn apply(&self, e: usize) -> Option<usize> {
        self.mapping[e]
    }

    pub fn image(&self, x: EventSet) -> EventSet {
        x.iter().filter_map(|e| self.mapping[e]).collect()
    }

    pub fn domain(&self) -> EventSet {
        (0..self.source.len()).filter(|&e| self.mapping[e].is_some()).collect()
    }

    pub fn is_total(&self) -> bool {
        self.mapping.iter().all(|m| m.is_some())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &StructMap) -> Result<StructMap> {
        if self.target != other.source {
            return usage("maps do not compose: target and source differ");
        }
        Ok(StructMap {
            source: self.source.clone(),
            target: other.target.clone(),
            mapping: self
                .mapping
                .iter()
                .map(|m| m.and_then(|t| other.mapping[t]))
                .collect(),
        })
    }

    /// Pairs of names, undefined events mapped to `None`.
    pub fn named_pairs(&self) -> Vec<(String, Option<String>)> {
        (0..self.source.len())
            .map(|e| {
                (
                    self.source.name(e).to_string(),
                    self.mapping[e].map(|t| self.target.name(t).to_string()),
                )
            })
            .collect()
    }

    /// Total and order preserving.
    pub fn is_rigid(&self) -> bool {
        self.is_total()
            && (0..self.source.len()).all(|b| {
                self.source.strict_down(b).iter().all(|a| {
                    self.target
                        .leq(self.mapping[a].unwrap(), self.mapping[b].unwrap())
                })
            })
    }

    pub fn validate(&self, budget: &Budget) -> Result<ValidationReport> {
        validate_map(self, budget)
    }
}

/// Checks the map conditions appropriate to the kinds of the endpoints.
pub fn validate_map(f: &StructMap, budget: &Budget) -> Result<ValidationReport> {
    let (s, t) = (&f.source, &f.target);
    let mut r = ValidationReport::default();
    let name = |e: usize| s.name(e).to_string();

    if let (Some(ps), Some(pt)) = (s.polarities(), t.polarities()) {
        for e in 0..s.len() {
            if let Some(img) = f.mapping[e] {
                if ps[e] != pt[img] {
                    r.push(
                        Violation::new("polarity-preservation", "event and image differ in polarity")
                            .with_events(vec![name(e), t.name(img).into()]),
                    );
                }
            }
        }
    }

    if s.kind() == Kind::General && t.kind() == Kind::General {
        for x in s.consistent_sets(budget)? {
            let img = f.image(x);
            if !t.is_consistent(img) {
                r.push(
                    Violation::new("consistency-preservation", "image of a consistent set is inconsistent")
                        .with_sets(vec![s.set_names(x), t.set_names(img)]),
                );
            }
            if let Some((a, b)) = collision(f, x) {
                r.push(
                    Violation::new("local-injectivity", "two events of a consistent set share an image")
                        .with_events(vec![name(a), name(b)])
                        .with_sets(vec![s.set_names(x)]),
                );
            }
        }
        for &(y, e) in s.enablings() {
            let Some(img) = f.mapping[e] else { continue };
            let fy = f.image(y);
            let ok = t.is_consistent(fy)
                && t
                    .enablings()
                    .iter()
                    .any(|&(z, u)| u == img && z.is_subset(fy));
            if !ok && s.is_consistent(y) {
                r.push(
                    Violation::new(
                        "enabling-preservation",
                        format!("{} enables {} but its image does not enable {}", fmt_set(&s.set_names(y)), name(e), t.name(img)),
                    )
                    .with_events(vec![name(e)])
                    .with_sets(vec![s.set_names(y)]),
                );
            }
        }
        return Ok(r);
    }

    for class in s.classes() {
        let defined: Vec<usize> = class.iter().filter(|&e| f.mapping[e].is_some()).collect();
        if !defined.is_empty() && defined.len() != class.len() {
            let undefined = class.iter().find(|&e| f.mapping[e].is_none()).unwrap();
            r.push(
                Violation::new("equi-definedness", "equivalent events must be defined together")
                    .with_events(vec![name(defined[0]), name(undefined)]),
            );
        }
        for w in defined.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !t.equiv(f.mapping[a].unwrap(), f.mapping[b].unwrap()) {
                r.push(
                    Violation::new("equivalence-preservation", "equivalent events have inequivalent images")
                        .with_events(vec![name(a), name(b)]),
                );
            }
        }
    }

    let target_configs = t.config_index(budget)?;
    for x in s.all_configs(budget)? {
        let img = f.image(x);
        if !target_configs.set.contains(&img) {
            r.push(
                Violation::new("configuration-image", "image of a configuration is not a configuration")
                    .with_sets(vec![s.set_names(x), t.set_names(img)]),
            );
        }
        for a in x {
            for b in x {
                if a < b {
                    if let (Some(p), Some(q)) = (f.mapping[a], f.mapping[b]) {
                        if t.equiv(p, q) && !s.equiv(a, b) {
                            r.push(
                                Violation::new(
                                    "equivalence-reflection",
                                    "events of a configuration with equivalent images are not equivalent",
                                )
                                .with_events(vec![name(a), name(b)])
                                .with_sets(vec![s.set_names(x)]),
                            );
                        }
                    }
                }
            }
        }
    }
    dedup_violations(&mut r);
    Ok(r)
}

fn collision(f: &StructMap, x: EventSet) -> Option<(usize, usize)> {
    let v: Vec<usize> = x.iter().collect();
    for (i, &a) in v.iter().enumerate() {
        for &b in &v[i + 1..] {
            if let (Some(p), Some(q)) = (f.mapping[a], f.mapping[b]) {
                if p == q {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// Keeps the first witness configuration per offending event pair.
fn dedup_violations(r: &mut ValidationReport) {
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    r.violations.retain(|v| {
        if v.axiom != "equivalence-reflection" {
            return true;
        }
        seen.insert(v.events.clone())
    });
}

/// Equi-defined with equivalent results.
pub fn maps_equivalent(f: &StructMap, g: &StructMap) -> Result<bool> {
    if f.source != g.source || f.target != g.target {
        return Err(Error::Usage("maps have different endpoints".into()));
    }
    Ok(f.mapping.iter().zip(&g.mapping).all(|(a, b)| match (a, b) {
        (None, None) => true,
        (Some(p), Some(q)) => f.target.equiv(*p, *q),
        _ => false,
    }))
}
