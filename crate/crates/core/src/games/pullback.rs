use std::collections::HashSet;

use crate::budget::{Budget, Meter};
use crate::error::{usage, Error, Result};
use crate::eventset::{sort_canonical, EventSet, MAX_EVENTS};
use crate::realisations::{pr, PrResult};
use crate::structures::{family_of, validate_map, Family, StructMap, Structure};

/// The pseudo pullback of two total maps of equivalence families.
#[derive(Debug, Clone)]
pub struct EfPullback {
    pub family: Family,
    /// Left and right component of each carrier event.
    pub proj1: Vec<usize>,
    pub proj2: Vec<usize>,
}

/// Pairs `(a, b)` with `f(a) ≡ g(b)`, componentwise equivalence, and the
/// members whose projections stay members along a securing chain.
pub fn pseudo_pullback_ef(
    a: &Family,
    f: &[usize],
    b: &Family,
    g: &[usize],
    c: &Family,
    budget: &Budget,
) -> Result<EfPullback> {
    if f.len() != a.len() || g.len() != b.len() {
        return usage("pullback maps must be total");
    }
    if f.iter().chain(g).any(|&t| t >= c.len()) {
        return usage("pullback maps point outside the common target");
    }
    let mut pairs = Vec::new();
    for i in 0..a.len() {
        for j in 0..b.len() {
            if c.equiv(f[i], g[j]) {
                pairs.push((i, j));
            }
        }
    }
    if pairs.len() > MAX_EVENTS {
        return Err(Error::Resource(format!("pullback has more than {MAX_EVENTS} events")));
    }
    // chains of single additions; bounded unions of members are members, so
    // this reaches every set whose events are each secured
    let mut meter = Meter::new(budget, "pullback enumeration");
    let proj = |z: EventSet| -> (EventSet, EventSet) {
        z.iter().fold((EventSet::EMPTY, EventSet::EMPTY), |(l, r), d| {
            (l.with(pairs[d].0), r.with(pairs[d].1))
        })
    };
    let mut configs = vec![EventSet::EMPTY];
    let mut layer = vec![EventSet::EMPTY];
    while !layer.is_empty() {
        let mut next: HashSet<EventSet> = HashSet::new();
        for &z in &layer {
            for d in 0..pairs.len() {
                if z.contains(d) {
                    continue;
                }
                meter.tick()?;
                let y = z.with(d);
                let (l, r) = proj(y);
                if a.contains(l) && b.contains(r) {
                    next.insert(y);
                }
            }
        }
        let mut v: Vec<EventSet> = next.into_iter().collect();
        sort_canonical(&mut v);
        configs.extend(v.iter().copied());
        layer = v;
    }
    let names = pairs
        .iter()
        .map(|&(i, j)| format!("{}|{}", a.name(i), b.name(j)))
        .collect();
    let classes = pairs
        .iter()
        .map(|&(i, j)| format!("{}|{}", a.class_name(i), b.class_name(j)))
        .collect();
    let polarity = match (a.polarity(), b.polarity()) {
        (Some(pa), Some(pb)) if pairs.iter().all(|&(i, j)| pa[i] == pb[j]) => {
            Some(pairs.iter().map(|&(i, _)| pa[i]).collect())
        }
        _ => None,
    };
    // the carrier gets sorted by name
    let family = Family::new(names, classes, polarity, configs)?;
    let mut proj1 = vec![0; pairs.len()];
    let mut proj2 = vec![0; pairs.len()];
    for &(i, j) in &pairs {
        let e = family
            .index_of(&format!("{}|{}", a.name(i), b.name(j)))
            .ok_or_else(|| Error::Internal("pullback event lost".into()))?;
        proj1[e] = i;
        proj2[e] = j;
    }
    Ok(EfPullback { family, proj1, proj2 })
}

/// The members that are unions of unambiguous members.
pub fn stable_part(f: &Family) -> Family {
    let unamb: Vec<EventSet> = f.configs().iter().copied().filter(|x| f.is_unambiguous(*x)).collect();
    f.restrict(|x| {
        unamb
            .iter()
            .filter(|y| y.is_subset(x))
            .fold(EventSet::EMPTY, |u, y| u.union(*y))
            == x
    })
}

/// A pullback of edc's with its two projections.
#[derive(Debug, Clone)]
pub struct EdcPullback {
    pub structure: Structure,
    pub proj1: StructMap,
    pub proj2: StructMap,
    /// The pullback family before taking prime configurations.
    pub family: EfPullback,
    /// For each event, its top in the family and its prime configuration.
    pub tops: Vec<usize>,
    pub sets: Vec<EventSet>,
}

/// Pullback of total maps of edc's into a structure with the identity
/// equivalence: `Pr` of the stable part of the family pullback.
pub fn pullback_edc(f: &StructMap, g: &StructMap, budget: &Budget) -> Result<EdcPullback> {
    if f.target != g.target {
        return usage("pullback maps must share their target");
    }
    if !f.is_total() || !g.is_total() {
        return usage("pullback maps must be total");
    }
    if !f.source.kind().is_prime_like() || !g.source.kind().is_prime_like() || !f.target.kind().is_prime_like() {
        return usage("pullbacks are taken over edc's");
    }
    if !f.target.has_trivial_equivalence() {
        return usage("the common target must have the identity equivalence");
    }
    let (fa, fb, fc) = (
        family_of(&f.source, budget)?,
        family_of(&g.source, budget)?,
        family_of(&f.target, budget)?,
    );
    let fm: Vec<usize> = f.mapping.iter().map(|m| m.unwrap()).collect();
    let gm: Vec<usize> = g.mapping.iter().map(|m| m.unwrap()).collect();
    let ef = pseudo_pullback_ef(&fa, &fm, &fb, &gm, &fc, budget)?;
    let PrResult { structure, tops, sets } = pr(&stable_part(&ef.family), budget)?;
    let proj1 = StructMap::new(
        structure.clone(),
        f.source.clone(),
        tops.iter().map(|&t| Some(ef.proj1[t])).collect(),
    )?;
    let proj2 = StructMap::new(
        structure.clone(),
        g.source.clone(),
        tops.iter().map(|&t| Some(ef.proj2[t])).collect(),
    )?;
    Ok(EdcPullback {
        structure,
        proj1,
        proj2,
        family: ef,
        tops,
        sets,
    })
}

/// Every map `h : D → Q` with `p1 ∘ h = c1` and `p2 ∘ h = c2` for a cone
/// `(c1, c2)` over a candidate `(Q, p1, p2)`.
pub fn mediating_maps(
    c1: &StructMap,
    c2: &StructMap,
    p1: &StructMap,
    p2: &StructMap,
    budget: &Budget,
) -> Result<Vec<StructMap>> {
    if c1.source != c2.source || p1.source != p2.source || c1.target != p1.target || c2.target != p2.target {
        return usage("cone and candidate do not match");
    }
    let (d, q) = (&c1.source, &p1.source);
    let options: Vec<Vec<Option<usize>>> = (0..d.len())
        .map(|e| {
            let mut v: Vec<Option<usize>> = (0..q.len())
                .filter(|&t| p1.mapping[t] == c1.mapping[e] && p2.mapping[t] == c2.mapping[e])
                .map(Some)
                .collect();
            if c1.mapping[e].is_none() && c2.mapping[e].is_none() {
                v.push(None);
            }
            v
        })
        .collect();
    let mut meter = Meter::new(budget, "mediating map search");
    let mut out = Vec::new();
    let mut current = vec![None; d.len()];
    fn go(
        i: usize,
        options: &[Vec<Option<usize>>],
        current: &mut Vec<Option<usize>>,
        d: &Structure,
        q: &Structure,
        meter: &mut Meter,
        budget: &Budget,
        out: &mut Vec<StructMap>,
    ) -> Result<()> {
        if i == options.len() {
            let h = StructMap::new(d.clone(), q.clone(), current.clone())?;
            if validate_map(&h, budget)?.is_valid() {
                out.push(h);
            }
            return Ok(());
        }
        for &o in &options[i] {
            meter.tick()?;
            current[i] = o;
            go(i + 1, options, current, d, q, meter, budget, out)?;
        }
        current[i] = None;
        Ok(())
    }
    go(0, &options, &mut current, d, q, &mut meter, budget, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Kind;

    fn chain() -> Structure {
        Structure::builder(Kind::Edc)
            .events(&["a", "b"])
            .cause("a", "b")
            .build()
            .unwrap()
    }

    #[test]
    fn pullback_along_identity_is_a_copy() {
        let b = Budget::default();
        let s = chain();
        let id = StructMap::identity(&s);
        let pb = pullback_edc(&id, &id, &b).unwrap();
        assert_eq!(pb.structure.len(), 2);
        assert_eq!(pb.structure.all_configs(&b).unwrap().len(), 3);
        assert!(validate_map(&pb.proj1, &b).unwrap().is_valid());
        let ms = mediating_maps(&pb.proj1, &pb.proj2, &pb.proj1, &pb.proj2, &b).unwrap();
        assert_eq!(ms.len(), 1);
    }

    #[test]
    fn parallel_causes_both_synchronise() {
        // two equivalent causes over one event meet a single copy of it
        let b = Budget::default();
        let target = Structure::builder(Kind::Prime).events(&["m", "w"]).cause("m", "w").build().unwrap();
        let s = Structure::builder(Kind::Edc)
            .events(&["m", "w1", "w2"])
            .class("w", &["w1", "w2"])
            .cause("m", "w1")
            .build()
            .unwrap();
        let f = StructMap::from_names(s, target.clone(), &[("m", Some("m")), ("w1", Some("w")), ("w2", Some("w"))]).unwrap();
        let id = StructMap::identity(&target);
        let pb = pullback_edc(&f, &id, &b).unwrap();
        assert_eq!(pb.structure.len(), 3);
        assert!(pb.structure.validate(&b).unwrap().is_valid());
    }
}
