use std::collections::HashSet;

use super::{Consistency, Kind, Parts, Polarity, Structure, ValidationReport, Violation};
use crate::budget::{Budget, Meter};
use crate::error::{format_err, usage, Result};
use crate::eventset::{maximal, sort_canonical, EventSet, MAX_EVENTS};

/// An explicit finite family of configurations over a named carrier,
/// optionally with an equivalence on the carrier and a polarity.
#[derive(Debug, Clone)]
pub struct Family {
    names: Vec<String>,
    classes: Vec<String>,
    class_of: Vec<usize>,
    polarity: Option<Vec<Polarity>>,
    configs: Vec<EventSet>,
    members: HashSet<EventSet>,
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.class_of == other.class_of
            && self.polarity == other.polarity
            && self.configs == other.configs
    }
}

impl Eq for Family {}

impl Family {
    /// `classes[e]` names the equivalence class of carrier event `e`.
    pub fn new(
        names: Vec<String>,
        classes: Vec<String>,
        polarity: Option<Vec<Polarity>>,
        configs: Vec<EventSet>,
    ) -> Result<Family> {
        let n = names.len();
        if n > MAX_EVENTS {
            return format_err(format!("carrier exceeds {MAX_EVENTS} events"));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        for w in order.windows(2) {
            if names[w[0]] == names[w[1]] {
                return format_err(format!("duplicate event id `{}`", names[w[0]]));
            }
        }
        let mut new_of = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        let sorted: Vec<String> = order.iter().map(|&o| names[o].clone()).collect();
        let sorted_classes: Vec<String> = order.iter().map(|&o| classes[o].clone()).collect();
        let mut class_list = sorted_classes.clone();
        class_list.sort();
        class_list.dedup();
        let class_of = sorted_classes
            .iter()
            .map(|c| class_list.binary_search(c).unwrap())
            .collect();
        let polarity = polarity.map(|p| order.iter().map(|&o| p[o]).collect());
        let mut configs: Vec<EventSet> = configs.iter().map(|x| x.map(|e| new_of[e])).collect();
        sort_canonical(&mut configs);
        let members = configs.iter().copied().collect();
        Ok(Family {
            names: sorted,
            classes: sorted_classes,
            class_of,
            polarity,
            configs,
            members,
        })
    }

    /// Builds a family from named configurations with the identity
    /// equivalence.
    pub fn from_named(carrier: &[&str], configs: &[&[&str]]) -> Result<Family> {
        let names: Vec<String> = carrier.iter().map(|s| s.to_string()).collect();
        let mut sets = Vec::new();
        for c in configs {
            let mut x = EventSet::EMPTY;
            for e in *c {
                match carrier.iter().position(|n| n == e) {
                    Some(i) => x.insert(i),
                    None => return format_err(format!("unknown event id `{e}`")),
                }
            }
            sets.push(x);
        }
        Family::new(names.clone(), names, None, sets)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn set_names(&self, x: EventSet) -> Vec<String> {
        x.iter().map(|e| self.names[e].clone()).collect()
    }

    pub fn set_of(&self, names: &[&str]) -> Option<EventSet> {
        names.iter().map(|n| self.index_of(n)).collect()
    }

    pub fn class_name(&self, e: usize) -> &str {
        &self.classes[e]
    }

    pub fn class_names(&self) -> &[String] {
        &self.classes
    }

    pub fn equiv(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn has_trivial_equivalence(&self) -> bool {
        let mut seen = HashSet::new();
        self.class_of.iter().all(|c| seen.insert(*c))
    }

    pub fn polarity(&self) -> Option<&[Polarity]> {
        self.polarity.as_deref()
    }

    pub fn configs(&self) -> &[EventSet] {
        &self.configs
    }

    pub fn contains(&self, x: EventSet) -> bool {
        self.members.contains(&x)
    }

    pub fn is_unambiguous(&self, x: EventSet) -> bool {
        let mut seen = HashSet::new();
        x.iter().all(|e| seen.insert(self.class_of[e]))
    }

    /// Some member includes both sets.
    pub fn bounded(&self, y: EventSet, z: EventSet) -> bool {
        let u = y.union(z);
        self.configs.iter().any(|w| u.is_subset(*w))
    }

    /// Least member including `x`, in canonical order.
    pub fn first_bound(&self, x: EventSet) -> Option<EventSet> {
        self.configs.iter().copied().find(|w| x.is_subset(*w))
    }

    /// `y` covers `x` within the family.
    pub fn covers(&self, x: EventSet, y: EventSet) -> bool {
        x != y
            && x.is_subset(y)
            && !self
                .configs
                .iter()
                .any(|w| *w != x && *w != y && x.is_subset(*w) && w.is_subset(y))
    }

    /// Members of the family lying inside `x`.
    pub fn below(&self, x: EventSet) -> Vec<EventSet> {
        self.configs.iter().copied().filter(|y| y.is_subset(x)).collect()
    }

    /// `⋂{y ∈ F | a ∈ y ⊆ x}`.
    pub fn prime_config(&self, a: usize, x: EventSet) -> EventSet {
        self.configs
            .iter()
            .filter(|y| y.contains(a) && y.is_subset(x))
            .fold(x, |acc, y| acc.intersection(*y))
    }

    /// Events reachable inside `x` by securing chains of members.
    pub fn secured_part(&self, x: EventSet) -> EventSet {
        let mut reach = vec![EventSet::EMPTY];
        let mut seen: HashSet<EventSet> = HashSet::new();
        seen.insert(EventSet::EMPTY);
        let mut got = EventSet::EMPTY;
        while let Some(y) = reach.pop() {
            got = got.union(y);
            for e in x.difference(y) {
                let z = y.with(e);
                if self.contains(z) && seen.insert(z) {
                    reach.push(z);
                }
            }
        }
        got
    }

    /// The members satisfying `keep`.
    pub(crate) fn restrict(&self, keep: impl Fn(EventSet) -> bool) -> Family {
        let mut f = self.clone();
        f.configs.retain(|x| keep(*x));
        f.members = f.configs.iter().copied().collect();
        f
    }
}

/// The configurations of a structure as a family, with its equivalence.
pub fn family_of(s: &Structure, budget: &Budget) -> Result<Family> {
    let classes = (0..s.len()).map(|e| s.class_name(e).to_string()).collect();
    Family::new(
        s.names().to_vec(),
        classes,
        s.polarities().map(|p| p.to_vec()),
        s.all_configs(budget)?,
    )
}

/// Checks the family axioms, and reports stability.
pub fn validate_family(f: &Family, budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport::default();
    let mut meter = Meter::new(budget, "family validation");
    let names = |x: EventSet| f.set_names(x);

    if !f.contains(EventSet::EMPTY) {
        r.push(Violation::new("empty-member", "the empty configuration is missing"));
    }
    let cs = f.configs();
    for (i, &y) in cs.iter().enumerate() {
        for &z in &cs[i + 1..] {
            meter.tick()?;
            let u = y.union(z);
            if f.contains(u) {
                continue;
            }
            if let Some(w) = f.first_bound(u) {
                r.push(
                    Violation::new("union-closure", "compatible members whose union is missing")
                        .with_sets(vec![names(y), names(z), names(w), names(u)]),
                );
            }
        }
    }
    for &x in cs {
        let ups: Vec<EventSet> = cs.iter().copied().filter(|&y| f.covers(x, y)).collect();
        for (i, &y) in ups.iter().enumerate() {
            for &z in &ups[i + 1..] {
                meter.tick()?;
                let u = y.union(z);
                if f.contains(u) {
                    continue;
                }
                if let Some(w) = f.first_bound(u) {
                    r.push(
                        Violation::new(
                            "coverability",
                            "two covers of a member are bounded but their union is missing",
                        )
                        .with_sets(vec![names(x), names(y), names(z), names(w), names(u)]),
                    );
                }
            }
        }
    }
    for &x in cs {
        meter.tick()?;
        let got = f.secured_part(x);
        if got != x {
            r.push(
                Violation::new("securing-chain", "events of a member have no securing chain")
                    .with_events(names(x.difference(got)))
                    .with_sets(vec![names(x)]),
            );
        }
    }

    r.set("stable", is_stable(f, &mut meter)?);
    if !f.has_trivial_equivalence() {
        let ef = stable_ef_violation(f, budget)?;
        r.set("stable_ef", ef.is_none());
        if let Some(v) = ef {
            r.notes.push(format!("not a stable equivalence family: {}", v.detail));
        }
    }
    r.notes.push("finite family: union closure checked on pairs of members".into());
    Ok(r)
}

fn is_stable(f: &Family, meter: &mut Meter) -> Result<bool> {
    let cs = f.configs();
    for (i, &y) in cs.iter().enumerate() {
        for &z in &cs[i + 1..] {
            meter.tick()?;
            if f.bounded(y, z) && !f.contains(y.intersection(z)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// First violated clause of stability for equivalence families, if any.
pub fn stable_ef_violation(f: &Family, budget: &Budget) -> Result<Option<Violation>> {
    let mut meter = Meter::new(budget, "stability check");
    let cs = f.configs();
    for &z in cs.iter().filter(|z| f.is_unambiguous(**z)) {
        let below = f.below(z);
        for (i, &x) in below.iter().enumerate() {
            for &y in &below[i + 1..] {
                meter.tick()?;
                if !f.contains(x.intersection(y)) {
                    return Ok(Some(
                        Violation::new(
                            "stable-intersection",
                            "members inside an unambiguous member have a missing intersection",
                        )
                        .with_sets(vec![f.set_names(x), f.set_names(y), f.set_names(z)]),
                    ));
                }
            }
        }
    }
    for &x in cs {
        for a in x {
            meter.tick()?;
            let ok = cs
                .iter()
                .any(|z| z.contains(a) && z.is_subset(x) && f.is_unambiguous(*z));
            if !ok {
                return Ok(Some(
                    Violation::new(
                        "stable-unambiguous-cover",
                        "an event of a member lies in no unambiguous member below it",
                    )
                    .with_events(vec![f.name(a).into()])
                    .with_sets(vec![f.set_names(x)]),
                ));
            }
        }
    }
    Ok(None)
}

/// Members with a unique event forcing the whole member.
pub fn irreducibles(f: &Family) -> Vec<EventSet> {
    let mut out = Vec::new();
    for &x in f.configs() {
        let forcing = x
            .iter()
            .filter(|&e| {
                f.configs()
                    .iter()
                    .all(|y| !(y.contains(e) && y.is_subset(x)) || *y == x)
            })
            .count();
        if forcing == 1 {
            out.push(x);
        }
    }
    out
}

/// The replete general event structure whose configurations are `f`.
pub fn canonical_ges(f: &Family) -> Result<Structure> {
    if !f.has_trivial_equivalence() {
        return usage("canonical_ges needs the identity equivalence; use pr instead");
    }
    let mut p = Parts::new(Kind::General, f.names().to_vec());
    p.polarity = f.polarity().map(|p| p.to_vec());
    let mut enablings = Vec::new();
    for &y in f.configs() {
        for a in y {
            enablings.push((y.without(a), a));
        }
    }
    // keep the minimal enabling sets per event
    let minimal: Vec<(EventSet, usize)> = enablings
        .iter()
        .copied()
        .filter(|&(x, a)| {
            !enablings
                .iter()
                .any(|&(z, b)| b == a && z != x && z.is_subset(x))
        })
        .collect();
    p.enablings = minimal;
    p.consistency = Consistency::Explicit(maximal(f.configs()));
    Structure::from_parts(p)
}

/// A prime-like structure read as a general one: `X ⊢ p` iff
/// `X ∈ Con` and `[p] ⊆ X ∪ {p}`.
pub fn prime_as_general(s: &Structure) -> Result<Structure> {
    if !s.kind().is_prime_like() {
        return Ok(s.clone());
    }
    if !s.has_trivial_equivalence() {
        return usage("only structures with the identity equivalence embed as general structures");
    }
    let mut p = s.to_parts();
    p.kind = Kind::General;
    p.causality.clear();
    p.enablings = (0..s.len()).map(|e| (s.strict_down(e), e)).collect();
    Structure::from_parts(p)
}
