//! Event structures in four flavours: prime, general, with equivalence
//! (ese) and with disjunctive causes (edc).
//!
//! A [`Structure`] holds events in lexicographic name order; every index in
//! the public API refers to that order. Prime-like kinds carry a causal
//! order, the general kind carries an enabling relation. Consistency is
//! either a list of minimal inconsistent sets or a list of generators whose
//! subsets are exactly the consistent sets.

mod family;
mod map;
mod report;

pub use family::{canonical_ges, family_of, irreducibles, prime_as_general, stable_ef_violation, validate_family, Family};
pub use map::{maps_equivalent, validate_map, StructMap};
pub use report::{ValidationReport, Violation};

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::budget::{Budget, Meter};
use crate::error::{format_err, Error, Result};
use crate::eventset::{maximal, minimal, sort_canonical, EventSet, MAX_EVENTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Prime,
    General,
    Ese,
    Edc,
}

impl Kind {
    /// Kinds whose causality is a partial order on events.
    pub fn is_prime_like(self) -> bool {
        !matches!(self, Kind::General)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Prime => "prime",
            Kind::General => "general",
            Kind::Ese => "ese",
            Kind::Edc => "edc",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Plus => Polarity::Minus,
            Polarity::Minus => Polarity::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Polarity::Plus => "+",
            Polarity::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    /// Minimal inconsistent sets; a set is consistent iff it contains none.
    Conflicts(Vec<EventSet>),
    /// Generators; a set is consistent iff it is contained in one of them.
    Explicit(Vec<EventSet>),
}

impl Consistency {
    pub fn all_consistent() -> Self {
        Consistency::Conflicts(Vec::new())
    }

    fn remap(&self, f: &impl Fn(usize) -> usize) -> Consistency {
        let go = |v: &Vec<EventSet>| {
            let mut out: Vec<EventSet> = v.iter().map(|s| s.map(f)).collect();
            sort_canonical(&mut out);
            out
        };
        match self {
            Consistency::Conflicts(v) => Consistency::Conflicts(go(v)),
            Consistency::Explicit(v) => Consistency::Explicit(go(v)),
        }
    }
}

/// Materialised configurations, cached inside a structure after the first
/// complete enumeration.
#[derive(Debug)]
pub(crate) struct ConfigIndex {
    pub(crate) list: Vec<EventSet>,
    pub(crate) set: HashSet<EventSet>,
}

/// Index-based description used by constructions; names need not be sorted.
#[derive(Debug, Clone)]
pub(crate) struct Parts {
    pub kind: Kind,
    pub names: Vec<String>,
    pub classes: Vec<String>,
    pub polarity: Option<Vec<Polarity>>,
    pub causality: Vec<(usize, usize)>,
    pub enablings: Vec<(EventSet, usize)>,
    pub consistency: Consistency,
}

impl Parts {
    pub(crate) fn new(kind: Kind, names: Vec<String>) -> Self {
        Parts {
            kind,
            classes: names.clone(),
            names,
            polarity: None,
            causality: Vec::new(),
            enablings: Vec::new(),
            consistency: Consistency::all_consistent(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Structure {
    kind: Kind,
    names: Vec<String>,
    index: HashMap<String, usize>,
    class_names: Vec<String>,
    class_of: Vec<usize>,
    classes: Vec<EventSet>,
    polarity: Option<Vec<Polarity>>,
    down: Vec<EventSet>,
    enablings: Vec<(EventSet, usize)>,
    consistency: Consistency,
    configs: OnceLock<Arc<ConfigIndex>>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.names == other.names
            && self.class_names == other.class_names
            && self.polarity == other.polarity
            && self.down == other.down
            && self.enablings == other.enablings
            && self.consistency == other.consistency
    }
}

impl Eq for Structure {}

impl Structure {
    pub fn builder(kind: Kind) -> StructureBuilder {
        StructureBuilder::new(kind)
    }

    /// The empty structure of the given kind.
    pub fn empty(kind: Kind) -> Structure {
        Structure::from_parts(Parts::new(kind, Vec::new())).expect("empty structure")
    }

    pub(crate) fn from_parts(parts: Parts) -> Result<Structure> {
        let Parts {
            kind,
            names,
            classes,
            polarity,
            causality,
            enablings,
            consistency,
        } = parts;
        let n = names.len();
        if n > MAX_EVENTS {
            return Err(Error::Resource(format!(
                "{n} events exceeds the limit of {MAX_EVENTS}"
            )));
        }
        if classes.len() != n || polarity.as_ref().is_some_and(|p| p.len() != n) {
            return Err(Error::Internal("mismatched event tables".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        for w in order.windows(2) {
            if names[w[0]] == names[w[1]] {
                return format_err(format!("duplicate event id `{}`", names[w[0]]));
            }
        }
        for name in &names {
            if name.is_empty() {
                return format_err("event ids must be nonempty");
            }
        }
        let mut new_of = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        let remap = |e: usize| new_of[e];
        let sorted_names: Vec<String> = order.iter().map(|&o| names[o].clone()).collect();
        let sorted_classes: Vec<String> = order.iter().map(|&o| classes[o].clone()).collect();
        let sorted_pol = polarity.map(|p| order.iter().map(|&o| p[o]).collect::<Vec<_>>());

        let mut class_list: Vec<String> = sorted_classes.clone();
        class_list.sort();
        class_list.dedup();
        let class_of: Vec<usize> = sorted_classes
            .iter()
            .map(|c| class_list.binary_search(c).unwrap())
            .collect();
        let mut class_sets = vec![EventSet::EMPTY; class_list.len()];
        for (e, &c) in class_of.iter().enumerate() {
            class_sets[c].insert(e);
        }

        let mut preds = vec![EventSet::EMPTY; n];
        for &(a, b) in &causality {
            if a >= n || b >= n {
                return Err(Error::Internal("causality index out of range".into()));
            }
            preds[remap(b)].insert(remap(a));
        }
        let mut down: Vec<EventSet> = (0..n).map(|e| preds[e].with(e)).collect();
        loop {
            let mut changed = false;
            for e in 0..n {
                let mut acc = down[e];
                for p in down[e] {
                    acc = acc.union(down[p]);
                }
                if acc != down[e] {
                    down[e] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut ens: Vec<(EventSet, usize)> = enablings
            .iter()
            .map(|&(y, e)| (y.map(remap), remap(e)))
            .collect();
        ens.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.canonical_cmp(&b.0)));
        ens.dedup();

        let index = sorted_names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Structure {
            kind,
            names: sorted_names,
            index,
            class_names: sorted_classes,
            class_of,
            classes: class_sets,
            polarity: sorted_pol,
            down,
            enablings: ens,
            consistency: consistency.remap(&remap),
            configs: OnceLock::new(),
        })
    }

    pub(crate) fn to_parts(&self) -> Parts {
        Parts {
            kind: self.kind,
            names: self.names.clone(),
            classes: self.class_names.clone(),
            polarity: self.polarity.clone(),
            causality: self.immediate_causality(),
            enablings: self.enablings.clone(),
            consistency: self.consistency.clone(),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn all(&self) -> EventSet {
        EventSet::full(self.len())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Looks up a name, failing with a format error.
    pub fn id(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::Format(format!("unknown event id `{name}`")))
    }

    pub fn set_of(&self, names: &[&str]) -> Result<EventSet> {
        names.iter().map(|n| self.id(n)).collect()
    }

    pub fn set_names(&self, x: EventSet) -> Vec<String> {
        x.iter().map(|e| self.names[e].clone()).collect()
    }

    pub fn has_polarity(&self) -> bool {
        self.polarity.is_some()
    }

    pub fn polarity(&self, e: usize) -> Option<Polarity> {
        self.polarity.as_ref().map(|p| p[e])
    }

    pub fn polarities(&self) -> Option<&[Polarity]> {
        self.polarity.as_deref()
    }

    /// Events of the given polarity (empty when unpolarised).
    pub fn of_polarity(&self, pol: Polarity) -> EventSet {
        match &self.polarity {
            Some(p) => (0..self.len()).filter(|&e| p[e] == pol).collect(),
            None => EventSet::EMPTY,
        }
    }

    pub fn class_name(&self, e: usize) -> &str {
        &self.class_names[e]
    }

    pub fn class_of(&self, e: usize) -> usize {
        self.class_of[e]
    }

    /// Equivalence classes, indexed by sorted class name.
    pub fn classes(&self) -> &[EventSet] {
        &self.classes
    }

    pub fn class_set(&self, e: usize) -> EventSet {
        self.classes[self.class_of[e]]
    }

    pub fn equiv(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn has_trivial_equivalence(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// No two distinct events of `x` are equivalent.
    pub fn is_unambiguous(&self, x: EventSet) -> bool {
        let mut seen = HashSet::new();
        x.iter().all(|e| seen.insert(self.class_of[e]))
    }

    /// `[e]`, including `e`. For general structures this is `{e}`.
    pub fn down(&self, e: usize) -> EventSet {
        self.down[e]
    }

    pub fn strict_down(&self, e: usize) -> EventSet {
        self.down[e].without(e)
    }

    pub fn down_closure(&self, x: EventSet) -> EventSet {
        x.iter().fold(EventSet::EMPTY, |acc, e| acc.union(self.down[e]))
    }

    pub fn is_down_closed(&self, x: EventSet) -> bool {
        x.iter().all(|e| self.down[e].is_subset(x))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.down[b].contains(a)
    }

    /// Events strictly above `e`.
    pub fn strict_up(&self, e: usize) -> EventSet {
        (0..self.len())
            .filter(|&b| b != e && self.down[b].contains(e))
            .collect()
    }

    /// Immediate causal dependencies (the Hasse diagram), sorted.
    pub fn immediate_causality(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.len() {
            let below = self.strict_down(b);
            for a in below {
                let covered = below
                    .without(a)
                    .iter()
                    .any(|c| self.down[c].contains(a) && c != a);
                if !covered {
                    out.push((a, b));
                }
            }
        }
        out.sort();
        out
    }

    pub fn is_immediate(&self, a: usize, b: usize) -> bool {
        a != b
            && self.down[b].contains(a)
            && !self
                .strict_down(b)
                .without(a)
                .iter()
                .any(|c| self.down[c].contains(a))
    }

    pub fn enablings(&self) -> &[(EventSet, usize)] {
        &self.enablings
    }

    pub fn consistency(&self) -> &Consistency {
        &self.consistency
    }

    pub fn is_consistent(&self, x: EventSet) -> bool {
        if x.is_empty() {
            return true;
        }
        match &self.consistency {
            Consistency::Conflicts(cs) => !cs.iter().any(|c| c.is_subset(x)),
            Consistency::Explicit(gs) => gs.iter().any(|g| x.is_subset(*g)),
        }
    }

    /// Whether `e` may be added to the configuration `x`.
    pub fn enabled_at(&self, x: EventSet, e: usize) -> bool {
        if x.contains(e) || !self.is_consistent(x.with(e)) {
            return false;
        }
        if self.kind.is_prime_like() {
            self.strict_down(e).is_subset(x)
        } else {
            self.enablings
                .iter()
                .any(|&(y, t)| t == e && y.is_subset(x))
        }
    }

    /// Saturation from the empty set: the events of `x` reachable by a
    /// securing chain inside `x`.
    pub fn secured_part(&self, x: EventSet) -> EventSet {
        let mut got = EventSet::EMPTY;
        loop {
            let mut grew = false;
            for e in x.difference(got) {
                let ok = if self.kind.is_prime_like() {
                    self.strict_down(e).is_subset(got)
                } else {
                    self.enablings
                        .iter()
                        .any(|&(y, t)| t == e && y.is_subset(got))
                };
                if ok {
                    got.insert(e);
                    grew = true;
                }
            }
            if !grew {
                return got;
            }
        }
    }

    pub fn is_config(&self, x: EventSet) -> bool {
        if !x.is_subset(self.all()) || !self.is_consistent(x) {
            return false;
        }
        if self.kind.is_prime_like() {
            self.is_down_closed(x)
        } else {
            self.secured_part(x) == x
        }
    }

    /// Configurations of size at most `max_size` in canonical order.
    pub fn configs(&self, max_size: usize, budget: &Budget) -> Result<Vec<EventSet>> {
        if let Some(idx) = self.configs.get() {
            return Ok(idx.list.iter().copied().filter(|x| x.len() <= max_size).collect());
        }
        let (list, complete) = self.enumerate(max_size, budget)?;
        if complete {
            let set = list.iter().copied().collect();
            let _ = self.configs.set(Arc::new(ConfigIndex { list: list.clone(), set }));
        }
        Ok(list)
    }

    /// Every finite configuration (all of them, the structure being finite).
    pub fn all_configs(&self, budget: &Budget) -> Result<Vec<EventSet>> {
        Ok(self.config_index(budget)?.list.clone())
    }

    pub(crate) fn config_index(&self, budget: &Budget) -> Result<Arc<ConfigIndex>> {
        if let Some(idx) = self.configs.get() {
            return Ok(idx.clone());
        }
        self.configs(usize::MAX, budget)?;
        self.configs
            .get()
            .cloned()
            .ok_or_else(|| Error::Internal("configuration cache not filled".into()))
    }

    /// Membership in the (materialised) configuration set.
    pub fn has_config(&self, x: EventSet, budget: &Budget) -> Result<bool> {
        Ok(self.config_index(budget)?.set.contains(&x))
    }

    /// Layered search by single-event extension. Returns the list and whether
    /// the size bound cut anything off.
    fn enumerate(&self, max_size: usize, budget: &Budget) -> Result<(Vec<EventSet>, bool)> {
        let mut meter = Meter::new(budget, "configuration enumeration");
        let mut out = vec![EventSet::EMPTY];
        let mut layer = vec![EventSet::EMPTY];
        let mut size = 0;
        let mut truncated = false;
        while !layer.is_empty() {
            let mut next: HashSet<EventSet> = HashSet::new();
            for &x in &layer {
                for e in self.all().difference(x) {
                    meter.tick()?;
                    if self.enabled_at(x, e) {
                        next.insert(x.with(e));
                    }
                }
            }
            size += 1;
            if next.is_empty() {
                break;
            }
            if size > max_size {
                truncated = true;
                break;
            }
            let mut v: Vec<EventSet> = next.into_iter().collect();
            v.sort_by(|a, b| a.canonical_cmp(b));
            out.extend(v.iter().copied());
            layer = v;
        }
        Ok((out, !truncated))
    }

    pub fn maximal_configs(&self, budget: &Budget) -> Result<Vec<EventSet>> {
        Ok(maximal(&self.all_configs(budget)?))
    }

    /// Every consistent subset of the events, canonical order.
    pub fn consistent_sets(&self, budget: &Budget) -> Result<Vec<EventSet>> {
        let mut meter = Meter::new(budget, "consistent-set enumeration");
        let mut out = Vec::new();
        let n = self.len();
        // increasing index sequences; consistency is subset-closed
        let mut stack = vec![(EventSet::EMPTY, 0usize)];
        while let Some((x, from)) = stack.pop() {
            out.push(x);
            for e in from..n {
                meter.tick()?;
                let y = x.with(e);
                if self.is_consistent(y) {
                    stack.push((y, e + 1));
                }
            }
        }
        sort_canonical(&mut out);
        Ok(out)
    }

    /// Minimal inconsistent sets, canonical order.
    pub fn minimal_inconsistent(&self, budget: &Budget) -> Result<Vec<EventSet>> {
        if let Consistency::Conflicts(cs) = &self.consistency {
            return Ok(minimal(cs));
        }
        let mut meter = Meter::new(budget, "conflict enumeration");
        let mut found = Vec::new();
        let n = self.len();
        let mut stack = vec![(EventSet::EMPTY, 0usize)];
        while let Some((x, from)) = stack.pop() {
            for e in from..n {
                meter.tick()?;
                let y = x.with(e);
                if self.is_consistent(y) {
                    stack.push((y, e + 1));
                } else if y.iter().all(|d| self.is_consistent(y.without(d))) {
                    found.push(y);
                }
            }
        }
        sort_canonical(&mut found);
        Ok(found)
    }

    /// Same structure with consistency stored as minimal conflicts.
    pub fn with_conflicts(&self, budget: &Budget) -> Result<Structure> {
        let mut p = self.to_parts();
        p.consistency = Consistency::Conflicts(self.minimal_inconsistent(budget)?);
        Structure::from_parts(p)
    }

    /// Same structure with consistency stored as maximal consistent sets.
    pub fn with_explicit(&self, budget: &Budget) -> Result<Structure> {
        let mut p = self.to_parts();
        p.consistency = Consistency::Explicit(maximal(&self.consistent_sets(budget)?));
        Structure::from_parts(p)
    }

    pub fn with_polarity(&self, polarity: Option<Vec<Polarity>>) -> Result<Structure> {
        let mut p = self.to_parts();
        p.polarity = polarity;
        Structure::from_parts(p)
    }

    pub fn with_kind(&self, kind: Kind) -> Result<Structure> {
        let mut p = self.to_parts();
        p.kind = kind;
        Structure::from_parts(p)
    }

    /// Rename every event; `rename` must be injective.
    pub fn renamed(&self, rename: impl Fn(usize, &str) -> String) -> Result<Structure> {
        let mut p = self.to_parts();
        p.names = (0..self.len()).map(|e| rename(e, &self.names[e])).collect();
        let classes_renamed = self.has_trivial_equivalence();
        if classes_renamed {
            p.classes = p.names.clone();
        }
        Structure::from_parts(p)
    }

    /// The sub-structure on `keep` with restricted order, consistency,
    /// equivalence and polarity. Names are kept.
    pub(crate) fn sub_structure(&self, keep: EventSet, kind: Kind) -> Result<Structure> {
        let idx: Vec<usize> = keep.iter().collect();
        let mut new_of = vec![usize::MAX; self.len()];
        for (i, &e) in idx.iter().enumerate() {
            new_of[e] = i;
        }
        let remap = |x: EventSet| x.intersection(keep).map(|e| new_of[e]);
        let mut p = Parts::new(kind, idx.iter().map(|&e| self.names[e].clone()).collect());
        p.classes = idx.iter().map(|&e| self.class_names[e].clone()).collect();
        p.polarity = self.polarity.as_ref().map(|pol| idx.iter().map(|&e| pol[e]).collect());
        for &b in &idx {
            for a in self.strict_down(b).intersection(keep) {
                p.causality.push((new_of[a], new_of[b]));
            }
        }
        p.enablings = self
            .enablings
            .iter()
            .filter(|(y, e)| keep.contains(*e) && y.is_subset(keep))
            .map(|&(y, e)| (remap(y), new_of[e]))
            .collect();
        p.consistency = match &self.consistency {
            Consistency::Conflicts(cs) => {
                Consistency::Conflicts(cs.iter().filter(|c| c.is_subset(keep)).map(|&c| remap(c)).collect())
            }
            Consistency::Explicit(gs) => Consistency::Explicit(gs.iter().map(|&g| remap(g)).collect()),
        };
        Structure::from_parts(p)
    }

    /// Checks every axiom of the structure's kind.
    pub fn validate(&self, budget: &Budget) -> Result<ValidationReport> {
        validate(self, budget)
    }
}

/// Builds a prime-like structure whose consistent sets are exactly the
/// subsets of its configurations, given any superset of its maximal
/// configurations.
pub(crate) fn prime_like_from_configs(
    kind: Kind,
    names: Vec<String>,
    classes: Vec<String>,
    polarity: Option<Vec<Polarity>>,
    down: &[EventSet],
    configs: &[EventSet],
) -> Result<Structure> {
    let mut causality = Vec::new();
    for (b, d) in down.iter().enumerate() {
        for a in d.without(b) {
            causality.push((a, b));
        }
    }
    let mut p = Parts::new(kind, names);
    p.classes = classes;
    p.polarity = polarity;
    p.causality = causality;
    p.consistency = Consistency::Explicit(maximal(configs));
    Structure::from_parts(p)
}

/// Name-based construction, as read from files or written in tests.
#[derive(Debug, Clone)]
pub struct StructureBuilder {
    kind: Kind,
    events: Vec<(String, Option<Polarity>, Option<String>)>,
    causality: Vec<(String, String)>,
    enablings: Vec<(Vec<String>, String)>,
    conflicts: Option<Vec<Vec<String>>>,
    consistent: Option<Vec<Vec<String>>>,
}

impl StructureBuilder {
    pub fn new(kind: Kind) -> Self {
        StructureBuilder {
            kind,
            events: Vec::new(),
            causality: Vec::new(),
            enablings: Vec::new(),
            conflicts: None,
            consistent: None,
        }
    }

    pub fn event(mut self, id: &str) -> Self {
        self.events.push((id.to_string(), None, None));
        self
    }

    pub fn events(mut self, ids: &[&str]) -> Self {
        for id in ids {
            self = self.event(id);
        }
        self
    }

    pub fn pos(mut self, id: &str) -> Self {
        self.events.push((id.to_string(), Some(Polarity::Plus), None));
        self
    }

    pub fn neg(mut self, id: &str) -> Self {
        self.events.push((id.to_string(), Some(Polarity::Minus), None));
        self
    }

    pub fn full_event(mut self, id: &str, pol: Option<Polarity>, class: Option<&str>) -> Self {
        self.events
            .push((id.to_string(), pol, class.map(|c| c.to_string())));
        self
    }

    /// Put the listed events in one equivalence class named `class`.
    pub fn class(mut self, class: &str, ids: &[&str]) -> Self {
        for (id, _, c) in self.events.iter_mut() {
            if ids.contains(&id.as_str()) {
                *c = Some(class.to_string());
            }
        }
        self
    }

    pub fn cause(mut self, below: &str, above: &str) -> Self {
        self.causality.push((below.to_string(), above.to_string()));
        self
    }

    pub fn enable(mut self, set: &[&str], event: &str) -> Self {
        self.enablings.push((
            set.iter().map(|s| s.to_string()).collect(),
            event.to_string(),
        ));
        self
    }

    pub fn conflict(mut self, set: &[&str]) -> Self {
        self.conflicts
            .get_or_insert_with(Vec::new)
            .push(set.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn consistent(mut self, set: &[&str]) -> Self {
        self.consistent
            .get_or_insert_with(Vec::new)
            .push(set.iter().map(|s| s.to_string()).collect());
        self
    }

    pub(crate) fn conflicts_raw(mut self, sets: Vec<Vec<String>>) -> Self {
        self.conflicts = Some(sets);
        self
    }

    pub(crate) fn consistent_raw(mut self, sets: Vec<Vec<String>>) -> Self {
        self.consistent = Some(sets);
        self
    }

    pub(crate) fn enable_raw(mut self, set: Vec<String>, event: String) -> Self {
        self.enablings.push((set, event));
        self
    }

    pub(crate) fn cause_raw(mut self, below: String, above: String) -> Self {
        self.causality.push((below, above));
        self
    }

    pub fn build(self) -> Result<Structure> {
        let n = self.events.len();
        let mut index = HashMap::new();
        for (i, (id, _, _)) in self.events.iter().enumerate() {
            if id.is_empty() {
                return format_err("event ids must be nonempty");
            }
            if index.insert(id.clone(), i).is_some() {
                return format_err(format!("duplicate event id `{id}`"));
            }
        }
        let look = |id: &str| -> Result<usize> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::Format(format!("unknown event id `{id}`")))
        };
        let look_set = |ids: &[String]| -> Result<EventSet> {
            let mut s = EventSet::EMPTY;
            for id in ids {
                s.insert(look(id)?);
            }
            Ok(s)
        };
        let polarized = self.events.iter().filter(|e| e.1.is_some()).count();
        if polarized != 0 && polarized != n {
            return format_err("polarity must be given for all events or none");
        }
        if self.kind == Kind::General && !self.causality.is_empty() {
            return format_err("general event structures take enablings, not causality");
        }
        if self.kind != Kind::General && !self.enablings.is_empty() {
            return format_err(format!("{} structures take causality, not enablings", self.kind));
        }
        if self.conflicts.is_some() && self.consistent.is_some() {
            return format_err("give either conflicts or consistent sets, not both");
        }
        let mut p = Parts::new(self.kind, self.events.iter().map(|e| e.0.clone()).collect());
        p.classes = self
            .events
            .iter()
            .map(|(id, _, c)| c.clone().unwrap_or_else(|| id.clone()))
            .collect();
        if polarized == n && n > 0 {
            p.polarity = Some(self.events.iter().map(|e| e.1.unwrap()).collect());
        }
        for (a, b) in &self.causality {
            p.causality.push((look(a)?, look(b)?));
        }
        for (set, e) in &self.enablings {
            p.enablings.push((look_set(set)?, look(e)?));
        }
        p.consistency = if let Some(cs) = &self.consistent {
            Consistency::Explicit(cs.iter().map(|s| look_set(s)).collect::<Result<_>>()?)
        } else {
            Consistency::Conflicts(
                self.conflicts
                    .unwrap_or_default()
                    .iter()
                    .map(|s| look_set(s))
                    .collect::<Result<_>>()?,
            )
        };
        Structure::from_parts(p)
    }
}

fn validate(s: &Structure, budget: &Budget) -> Result<ValidationReport> {
    let mut r = ValidationReport {
        kind: Some(s.kind),
        ..Default::default()
    };
    let names = |x: EventSet| s.set_names(x);
    let n = s.len();

    if matches!(s.kind, Kind::Prime | Kind::General) && !s.has_trivial_equivalence() {
        for c in s.classes() {
            if c.len() > 1 {
                r.push(
                    Violation::new(
                        "trivial-equivalence",
                        format!("{} structures carry the identity equivalence", s.kind),
                    )
                    .with_events(names(*c)),
                );
            }
        }
    }

    if let Some(pol) = s.polarities() {
        for c in s.classes() {
            let first = c.first().map(|e| pol[e]);
            if let Some(bad) = c.iter().find(|&e| Some(pol[e]) != first) {
                r.push(
                    Violation::new("polarity-respects-equivalence", "equivalent events differ in polarity")
                        .with_events(vec![s.name(c.first().unwrap()).into(), s.name(bad).into()]),
                );
            }
        }
    }

    if s.kind.is_prime_like() {
        for a in 0..n {
            for b in (a + 1)..n {
                if s.leq(a, b) && s.leq(b, a) {
                    r.push(
                        Violation::new("partial-order", "causality has a cycle")
                            .with_events(vec![s.name(a).into(), s.name(b).into()]),
                    );
                }
            }
        }
        for e in 0..n {
            if !s.is_consistent(EventSet::singleton(e)) {
                r.push(
                    Violation::new("singleton-consistency", "{e} must be consistent")
                        .with_events(vec![s.name(e).into()]),
                );
            }
        }
        // X consistent, e <= e' in X  implies  X + e consistent
        match s.consistency() {
            Consistency::Conflicts(cs) => {
                for &k in cs {
                    for e in k {
                        for up in s.strict_up(e) {
                            let x = k.without(e).with(up);
                            if s.is_consistent(x) {
                                r.push(
                                    Violation::new(
                                        "consistency-down-closure",
                                        format!(
                                            "{} consistent, {} <= {} but adding {} is inconsistent",
                                            fmt_set(&names(x)),
                                            s.name(e),
                                            s.name(up),
                                            s.name(e)
                                        ),
                                    )
                                    .with_events(vec![s.name(e).into(), s.name(up).into()])
                                    .with_sets(vec![names(x)]),
                                );
                            }
                        }
                    }
                }
            }
            Consistency::Explicit(gs) => {
                for &g in gs {
                    let closure = s.down_closure(g);
                    if !s.is_consistent(closure) {
                        let missing = closure.difference(g);
                        r.push(
                            Violation::new(
                                "consistency-down-closure",
                                "a consistent set is not consistent with its causes",
                            )
                            .with_events(names(missing))
                            .with_sets(vec![names(g)]),
                        );
                    }
                }
            }
        }
        if s.kind == Kind::Edc {
            for p in 0..n {
                let below = s.down(p);
                for p1 in below {
                    for p2 in below {
                        if p1 < p2 && s.equiv(p1, p2) {
                            // report only at the lowest event above both
                            let lower = below
                                .without(p)
                                .iter()
                                .any(|q| s.down(q).contains(p1) && s.down(q).contains(p2));
                            if !lower {
                                r.push(
                                    Violation::new(
                                        "edc",
                                        "an event depends on two distinct equivalent events",
                                    )
                                    .with_events(vec![
                                        s.name(p1).into(),
                                        s.name(p2).into(),
                                        s.name(p).into(),
                                    ]),
                                );
                            }
                        }
                    }
                }
            }
        }
        if s.has_polarity() {
            r.set("polarized", true);
        }
    } else {
        for &(y, e) in s.enablings() {
            if !s.is_consistent(y) {
                r.push(
                    Violation::new("enabling-consistency", "enabling set must be consistent")
                        .with_events(vec![s.name(e).into()])
                        .with_sets(vec![names(y)]),
                );
            }
        }
        r.set("replete", is_replete(s, budget)?);
    }
    Ok(r)
}

pub(crate) fn fmt_set(v: &[String]) -> String {
    format!("{{{}}}", v.join(","))
}

/// The three repleteness clauses for general event structures.
pub fn is_replete(s: &Structure, budget: &Budget) -> Result<bool> {
    if s.kind.is_prime_like() {
        return Ok(true);
    }
    for e in 0..s.len() {
        if !s
            .enablings()
            .iter()
            .any(|&(y, t)| t == e && s.is_consistent(y))
        {
            return Ok(false);
        }
    }
    let configs = s.all_configs(budget)?;
    let maxc = maximal(&configs);
    for x in s.consistent_sets(budget)? {
        if !maxc.iter().any(|c| x.is_subset(*c)) {
            return Ok(false);
        }
    }
    for &(y, e) in s.enablings() {
        if !s.is_consistent(y) {
            continue;
        }
        let bound = y.with(e);
        if !configs.iter().any(|c| c.contains(e) && c.is_subset(bound)) {
            return Ok(false);
        }
    }
    Ok(true)
}
