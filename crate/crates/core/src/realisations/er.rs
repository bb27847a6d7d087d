use std::collections::{HashMap, HashSet};

use super::{CanonKey, Realisation};
use crate::budget::{Budget, Meter};
use crate::error::{usage, Error, Result};
use crate::eventset::{maximal, EventSet, MAX_EVENTS};
use crate::structures::{
    family_of, prime_like_from_configs, validate_map, Consistency, Family, Kind, Parts, StructMap, Structure,
};

/// A prime extremal: its down-set among the primes found so far (including
/// itself) and the label of its top.
#[derive(Debug, Clone)]
pub(crate) struct Prime {
    pub down: EventSet,
    pub top: usize,
    pub key: CanonKey,
}

/// Prime extremals and the configurations they generate, before naming.
pub(crate) struct ErCore<'a> {
    pub family: &'a Family,
    pub primes: Vec<Prime>,
    pub configs: Vec<EventSet>,
}

impl ErCore<'_> {
    /// The extremal realisation `max : (x, ⪯) → A` of a configuration.
    pub fn realisation_of(&self, x: EventSet) -> Realisation {
        let idx: Vec<usize> = x.iter().collect();
        let pos = |e: usize| idx.iter().position(|&k| k == e).unwrap();
        Realisation::from_down(
            idx.iter()
                .map(|&e| format!("p{}:{}", e + 1, self.family.name(self.primes[e].top)))
                .collect(),
            idx.iter().map(|&e| self.primes[e].down.intersection(x).map(pos)).collect(),
            idx.iter().map(|&e| self.primes[e].top).collect(),
        )
    }

    fn image(&self, x: EventSet) -> EventSet {
        x.iter().map(|e| self.primes[e].top).collect()
    }
}

/// Grows prime extremals by grafting a top onto every extremal of the
/// previous size, which by the domain correspondence are exactly the
/// configurations built from the primes found so far.
pub(crate) fn er_core<'a>(f: &'a Family, max_size: Option<usize>, budget: &Budget) -> Result<ErCore<'a>> {
    let mut meter = Meter::new(budget, "prime extremal enumeration");
    let mut core = ErCore {
        family: f,
        primes: Vec::new(),
        configs: vec![EventSet::EMPTY],
    };
    let mut keys: HashSet<CanonKey> = HashSet::new();
    let mut layer = vec![EventSet::EMPTY];
    let mut k = 1;
    while !layer.is_empty() && max_size.is_none_or(|m| k <= m) {
        for &x in &layer {
            let rx = core.realisation_of(x);
            let img = core.image(x);
            for a in 0..f.len() {
                meter.tick()?;
                if !f.contains(img.with(a)) {
                    continue;
                }
                let cand = graft(&rx, a);
                if cand.collapse(f, budget)?.is_some() {
                    continue;
                }
                let key = cand.canonical_key(budget)?;
                if !keys.insert(key.clone()) {
                    continue;
                }
                if k > budget.max_iso_nodes {
                    return Err(Error::Resource(format!(
                        "prime extremal with {k} elements exceeds max_iso_nodes = {}",
                        budget.max_iso_nodes
                    )));
                }
                if core.primes.len() >= MAX_EVENTS {
                    return Err(Error::Resource(format!("more than {MAX_EVENTS} prime extremals")));
                }
                let id = core.primes.len();
                core.primes.push(Prime {
                    down: x.with(id),
                    top: a,
                    key,
                });
            }
        }
        let prev: HashSet<EventSet> = layer.iter().copied().collect();
        let mut next: HashSet<EventSet> = HashSet::new();
        for &x in &layer {
            for (e, p) in core.primes.iter().enumerate() {
                meter.tick()?;
                if x.contains(e) || !p.down.without(e).is_subset(x) {
                    continue;
                }
                let y = x.with(e);
                if next.contains(&y) || !f.contains(core.image(y)) {
                    continue;
                }
                let ok = y.iter().all(|m| {
                    let is_max = y.iter().all(|o| o == m || !core.primes[o].down.contains(m));
                    !is_max || prev.contains(&y.without(m))
                });
                if ok {
                    next.insert(y);
                }
            }
        }
        let mut v: Vec<EventSet> = next.into_iter().collect();
        v.sort_by(|a, b| a.canonical_cmp(b));
        core.configs.extend(v.iter().copied());
        layer = v;
        k += 1;
    }
    Ok(core)
}

fn graft(r: &Realisation, a: usize) -> Realisation {
    let n = r.len();
    let mut names = r.names().to_vec();
    names.push("top".into());
    let mut down: Vec<EventSet> = (0..n).map(|e| r.down(e)).collect();
    down.push(EventSet::full(n + 1));
    let mut label = r.labels().to_vec();
    label.push(a);
    Realisation::from_down(names, down, label)
}

/// `er` of a family together with the counit labelling.
#[derive(Debug, Clone)]
pub struct ErResult {
    pub structure: Structure,
    /// For each event of `structure`, the family event labelling its top.
    pub tops: Vec<usize>,
    pub family: Family,
    keys: HashMap<CanonKey, usize>,
}

impl ErResult {
    /// The event of `structure` whose prime extremal is isomorphic to `r`.
    pub fn event_of(&self, r: &Realisation, budget: &Budget) -> Result<Option<usize>> {
        Ok(self.keys.get(&r.canonical_key(budget)?).copied())
    }

    /// `max_A : ges(er(A)) → A`, defined when the family came from `target`.
    pub fn counit(&self, target: &Structure, budget: &Budget) -> Result<StructMap> {
        let g = ges_of(&self.structure, budget)?;
        let mut mapping = vec![None; g.len()];
        for e in 0..self.structure.len() {
            let class = g.id(self.structure.class_name(e))?;
            mapping[class] = Some(target.id(self.family.name(self.tops[e]))?);
        }
        StructMap::new(g, target.clone(), mapping)
    }
}

/// The ese of prime extremals of a family (with its equivalence).
pub fn er_family(f: &Family, budget: &Budget) -> Result<ErResult> {
    let core = er_core(f, None, budget)?;
    let n = core.primes.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&core.primes[a], &core.primes[b]);
        (pa.down.len(), &pa.key).cmp(&(pb.down.len(), &pb.key))
    });
    let mut rank = vec![0; n];
    for (r, &p) in order.iter().enumerate() {
        rank[p] = r;
    }
    let names: Vec<String> = (0..n)
        .map(|p| format!("p{}:{}", rank[p] + 1, f.name(core.primes[p].top)))
        .collect();
    let classes: Vec<String> = (0..n)
        .map(|p| f.class_name(core.primes[p].top).to_string())
        .collect();
    let polarity = f
        .polarity()
        .map(|pol| (0..n).map(|p| pol[core.primes[p].top]).collect());
    let down: Vec<EventSet> = core.primes.iter().map(|p| p.down).collect();
    let structure = prime_like_from_configs(Kind::Ese, names.clone(), classes, polarity, &down, &core.configs)?;
    let mut tops = vec![0; n];
    let mut keys = HashMap::new();
    for p in 0..n {
        let e = structure.id(&names[p])?;
        tops[e] = core.primes[p].top;
        keys.insert(core.primes[p].key.clone(), e);
    }
    Ok(ErResult {
        structure,
        tops,
        family: f.clone(),
        keys,
    })
}

/// `er` of a general event structure.
pub fn er(g: &Structure, budget: &Budget) -> Result<ErResult> {
    if g.kind() != Kind::General {
        return usage("er takes a general event structure");
    }
    er_family(&family_of(g, budget)?, budget)
}

/// The general event structure on equivalence classes.
pub fn ges_of(s: &Structure, budget: &Budget) -> Result<Structure> {
    if s.kind() == Kind::General {
        return Ok(s.clone());
    }
    let nc = s.classes().len();
    let class_name = |c: usize| s.class_name(s.classes()[c].first().unwrap()).to_string();
    let names: Vec<String> = (0..nc).map(class_name).collect();
    let to_classes = |x: EventSet| x.iter().map(|e| s.class_of(e)).collect::<EventSet>();
    let mut p = Parts::new(Kind::General, names);
    p.polarity = s
        .polarities()
        .map(|pol| (0..nc).map(|c| pol[s.classes()[c].first().unwrap()]).collect());
    p.enablings = (0..s.len())
        .map(|e| (to_classes(s.down(e)).without(s.class_of(e)), s.class_of(e)))
        .collect();
    let images: Vec<EventSet> = s.maximal_configs(budget)?.into_iter().map(to_classes).collect();
    p.consistency = Consistency::Explicit(maximal(&images));
    Structure::from_parts(p)
}

/// The map induced on equivalence classes.
pub fn ges_of_map(f: &StructMap, budget: &Budget) -> Result<StructMap> {
    let gs = ges_of(&f.source, budget)?;
    let gt = ges_of(&f.target, budget)?;
    let mut mapping = vec![None; gs.len()];
    for e in 0..f.source.len() {
        let c = gs.id(f.source.class_name(e))?;
        mapping[c] = match f.mapping[e] {
            Some(t) => Some(gt.id(f.target.class_name(t))?),
            None => None,
        };
    }
    StructMap::new(gs, gt, mapping)
}

/// Given `f : ges(Q) → A`, a map `h : Q → er(A)` with `max_A ∘ ges(h) = f`.
pub fn factor_through_er(f: &StructMap, q: &Structure, era: &ErResult, budget: &Budget) -> Result<StructMap> {
    let gq = ges_of(q, budget)?;
    if gq != f.source {
        return usage("the map does not start at ges of the given structure");
    }
    let fam = &era.family;
    let label_of = |e: usize| -> Result<Option<usize>> {
        let c = gq.id(q.class_name(e))?;
        Ok(match f.mapping[c] {
            Some(t) => Some(
                fam.index_of(f.target.name(t))
                    .ok_or_else(|| Error::Usage("map target is not the structure er was built from".into()))?,
            ),
            None => None,
        })
    };
    let mut labels = Vec::with_capacity(q.len());
    for e in 0..q.len() {
        labels.push(label_of(e)?);
    }
    let defined: EventSet = (0..q.len()).filter(|&e| labels[e].is_some()).collect();

    // candidate images: the greedy collapse of each event's own history, and
    // the images induced on it by the collapses of events above it
    let mut cands: Vec<Vec<usize>> = vec![Vec::new(); q.len()];
    for e in defined {
        let keep = q.down(e).intersection(defined);
        let idx: Vec<usize> = keep.iter().collect();
        let pos = |d: usize| idx.iter().position(|&k| k == d).unwrap();
        let r = Realisation::from_down(
            idx.iter().map(|&d| q.name(d).to_string()).collect(),
            idx.iter().map(|&d| q.down(d).intersection(keep).map(pos)).collect(),
            idx.iter().map(|&d| labels[d].unwrap()).collect(),
        );
        if !r.is_realisation(fam) {
            return usage(format!("history of {} is not a realisation of the target", q.name(e)));
        }
        let c = r.collapse_to_extremal(fam, budget)?;
        for (i, &d) in idx.iter().enumerate() {
            let b = c.block[i];
            let sub = c.target.restrict(c.target.down(b));
            if let Some(p) = era.event_of(&sub, budget)? {
                if !cands[d].contains(&p) {
                    cands[d].push(p);
                }
            }
        }
    }
    for e in defined {
        if cands[e].is_empty() {
            return Err(Error::Internal(format!("no prime extremal for {}", q.name(e))));
        }
        cands[e].sort();
    }
    let evs: Vec<usize> = defined.iter().collect();
    let mut mapping = vec![None; q.len()];
    let mut meter = Meter::new(budget, "factorisation search");
    if assign(&evs, 0, &cands, &mut mapping, q, &era.structure, budget, &mut meter)? {
        return StructMap::new(q.clone(), era.structure.clone(), mapping);
    }
    Err(Error::Internal("no factorisation through er found".into()))
}

#[allow(clippy::too_many_arguments)]
fn assign(
    evs: &[usize],
    i: usize,
    cands: &[Vec<usize>],
    mapping: &mut Vec<Option<usize>>,
    q: &Structure,
    target: &Structure,
    budget: &Budget,
    meter: &mut Meter,
) -> Result<bool> {
    if i == evs.len() {
        let h = StructMap::new(q.clone(), target.clone(), mapping.clone())?;
        return Ok(validate_map(&h, budget)?.is_valid());
    }
    let e = evs[i];
    for &p in &cands[e] {
        meter.tick()?;
        // keep causal images consistent with those already chosen
        let ok = evs[..i].iter().all(|&d| {
            let hd = mapping[d].unwrap();
            !q.leq(d, e) || target.leq(hd, p)
        });
        if !ok {
            continue;
        }
        mapping[e] = Some(p);
        if assign(evs, i + 1, cands, mapping, q, target, budget, meter)? {
            return Ok(true);
        }
        mapping[e] = None;
    }
    Ok(false)
}

/// `h` is a map and `max_A ∘ ges(h) = f`.
pub fn check_factorisation(f: &StructMap, h: &StructMap, era: &ErResult, budget: &Budget) -> Result<bool> {
    if !validate_map(h, budget)?.is_valid() {
        return Ok(false);
    }
    let counit = era.counit(&f.target, budget)?;
    let composite = ges_of_map(h, budget)?.then(&counit)?;
    Ok(composite.mapping == f.mapping)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1() -> Structure {
        Structure::builder(Kind::General)
            .events(&["a", "b", "c", "d"])
            .enable(&[], "a")
            .enable(&[], "b")
            .enable(&["a"], "c")
            .enable(&["b"], "c")
            .enable(&["a", "b", "c"], "d")
            .build()
            .unwrap()
    }

    #[test]
    fn er_of_the_or_and_structure_has_six_primes() {
        let b = Budget::default();
        let r = er(&ex1(), &b).unwrap();
        let s = &r.structure;
        assert_eq!(s.len(), 6);
        assert!(s.validate(&b).unwrap().is_valid());
        let tops: Vec<&str> = r.tops.iter().map(|&t| r.family.name(t)).collect();
        let count = |l: &str| tops.iter().filter(|&&t| t == l).count();
        assert_eq!((count("a"), count("b"), count("c"), count("d")), (1, 1, 2, 2));
        let counit = r.counit(&ex1(), &b).unwrap();
        assert!(validate_map(&counit, &b).unwrap().is_valid());
    }

    #[test]
    fn ges_of_er_recovers_configurations() {
        let b = Budget::default();
        let g = ex1();
        let r = er(&g, &b).unwrap();
        let back = ges_of(&r.structure, &b).unwrap();
        assert_eq!(back.names(), g.names());
        assert_eq!(back.all_configs(&b).unwrap(), g.all_configs(&b).unwrap());
    }

    #[test]
    fn counit_factors_through_identity() {
        let b = Budget::default();
        let g = ex1();
        let r = er(&g, &b).unwrap();
        let f = r.counit(&g, &b).unwrap();
        let h = factor_through_er(&f, &r.structure, &r, &b).unwrap();
        assert!(check_factorisation(&f, &h, &r, &b).unwrap());
        let id = StructMap::identity(&r.structure);
        assert!(crate::structures::maps_equivalent(&h, &id).unwrap());
    }
}
