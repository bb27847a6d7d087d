use std::collections::HashSet;

use crate::budget::{Budget, Meter};
use crate::error::{usage, Error, Result};
use crate::eventset::{maximal, EventSet, MAX_EVENTS};
use crate::structures::{prime_like_from_configs, stable_ef_violation, Family, Kind, Structure};

/// `Pr` of a stable equivalence family, with the prime configurations.
#[derive(Debug, Clone)]
pub struct PrResult {
    pub structure: Structure,
    /// For each event, the family event it is a prime configuration of.
    pub tops: Vec<usize>,
    /// For each event, its prime configuration.
    pub sets: Vec<EventSet>,
}

/// The edc of prime configurations `[a]_x` of unambiguous members.
pub fn pr(f: &Family, budget: &Budget) -> Result<PrResult> {
    if let Some(v) = stable_ef_violation(f, budget)? {
        return usage(format!("family is not stable ({}): {}", v.axiom, v.detail));
    }
    let mut meter = Meter::new(budget, "prime configuration enumeration");
    let mut seen: HashSet<(usize, EventSet)> = HashSet::new();
    let mut primes: Vec<(usize, EventSet)> = Vec::new();
    for &x in f.configs().iter().filter(|x| f.is_unambiguous(**x)) {
        for a in x {
            meter.tick()?;
            let p = f.prime_config(a, x);
            if seen.insert((a, p)) {
                primes.push((a, p));
            }
        }
    }
    primes.sort_by(|a, b| a.1.canonical_cmp(&b.1).then(a.0.cmp(&b.0)));
    if primes.len() > MAX_EVENTS {
        return Err(Error::Resource(format!("more than {MAX_EVENTS} prime configurations")));
    }
    let n = primes.len();
    let mut down = vec![EventSet::EMPTY; n];
    for i in 0..n {
        for j in 0..n {
            if primes[j].1.is_subset(primes[i].1) {
                if i != j && primes[i].1 == primes[j].1 {
                    return Err(Error::Internal("two primes share a prime configuration".into()));
                }
                down[i].insert(j);
            }
        }
    }
    // configurations: down-closed sets of primes whose union is a member
    let union = |z: EventSet| z.iter().fold(EventSet::EMPTY, |u, p| u.union(primes[p].1));
    let mut configs = vec![EventSet::EMPTY];
    let mut layer = vec![EventSet::EMPTY];
    while !layer.is_empty() {
        let mut next: HashSet<EventSet> = HashSet::new();
        for &z in &layer {
            for p in 0..n {
                meter.tick()?;
                if z.contains(p) || !down[p].without(p).is_subset(z) {
                    continue;
                }
                let y = z.with(p);
                if f.contains(union(y)) {
                    next.insert(y);
                }
            }
        }
        let mut v: Vec<EventSet> = next.into_iter().collect();
        v.sort_by(|a, b| a.canonical_cmp(b));
        configs.extend(v.iter().copied());
        layer = v;
    }
    let names: Vec<String> = (0..n)
        .map(|i| format!("p{}:{}", i + 1, f.name(primes[i].0)))
        .collect();
    let classes = (0..n).map(|i| f.class_name(primes[i].0).to_string()).collect();
    let polarity = f.polarity().map(|pol| (0..n).map(|i| pol[primes[i].0]).collect());
    let structure = prime_like_from_configs(Kind::Edc, names.clone(), classes, polarity, &down, &configs)?;
    let mut tops = vec![0; n];
    let mut sets = vec![EventSet::EMPTY; n];
    for (i, name) in names.iter().enumerate() {
        let e = structure.id(name)?;
        tops[e] = primes[i].0;
        sets[e] = primes[i].1;
    }
    Ok(PrResult { structure, tops, sets })
}

/// The largest sub-structure whose events depend on no two distinct
/// equivalent events.
pub fn coreflect_edc(s: &Structure) -> Result<Structure> {
    if !s.kind().is_prime_like() {
        return usage("coreflect_edc takes an ese");
    }
    let keep: EventSet = (0..s.len()).filter(|&p| s.is_unambiguous(s.down(p))).collect();
    s.sub_structure(keep, Kind::Edc)
}

/// Drops the equivalence; the configurations become the unambiguous ones.
pub fn forget_equiv(s: &Structure, budget: &Budget) -> Result<Structure> {
    if !s.kind().is_prime_like() {
        return usage("forget_equiv takes an edc");
    }
    let unamb: Vec<EventSet> = s
        .all_configs(budget)?
        .into_iter()
        .filter(|x| s.is_unambiguous(*x))
        .collect();
    let down: Vec<EventSet> = (0..s.len()).map(|e| s.down(e)).collect();
    let names = s.names().to_vec();
    prime_like_from_configs(
        Kind::Prime,
        names.clone(),
        names,
        s.polarities().map(|p| p.to_vec()),
        &down,
        &maximal(&unamb),
    )
}
