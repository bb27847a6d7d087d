use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::budget::{Budget, Meter};
use crate::error::{usage, Error, Result};
use crate::eventset::EventSet;
use crate::games::Strategy;
use crate::structures::{Polarity, Structure, ValidationReport, Violation};

/// A total table from the configurations of a structure to rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    values: HashMap<EventSet, BigRational>,
}

/// A strategy paired with a configuration-valuation on its inner structure.
#[derive(Debug, Clone)]
pub struct ProbStrategy {
    pub strategy: Strategy,
    pub valuation: Valuation,
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Valuation {
    /// Requires a value on every configuration of `s`.
    pub fn new(s: &Structure, values: HashMap<EventSet, BigRational>, budget: &Budget) -> Result<Valuation> {
        for x in s.all_configs(budget)? {
            if !values.contains_key(&x) {
                return usage(format!("no value for configuration {:?}", s.set_names(x)));
            }
        }
        for x in values.keys() {
            if !s.is_config(*x) {
                return usage(format!("{:?} is not a configuration", s.set_names(*x)));
            }
        }
        Ok(Valuation { values })
    }

    /// Fills the missing values from below: `v(y) = v(x)` where `x` drops
    /// from `y` every Opponent event with no Player event above it.
    pub fn complete_by_lmc(s: &Structure, given: HashMap<EventSet, BigRational>, budget: &Budget) -> Result<Valuation> {
        let mut values = given;
        let neg = s.of_polarity(Polarity::Minus);
        if s.polarities().is_none() && !s.is_empty() {
            return usage("completion by lmc needs a polarity");
        }
        for y in s.all_configs(budget)? {
            if values.contains_key(&y) {
                continue;
            }
            let trailing: EventSet = y
                .intersection(neg)
                .iter()
                .filter(|&e| s.strict_up(e).intersection(y).is_subset(neg))
                .collect();
            let base = y.difference(trailing);
            match values.get(&base) {
                Some(v) => {
                    let v = v.clone();
                    values.insert(y, v);
                }
                None => return usage(format!("no value for configuration {:?}", s.set_names(y))),
            }
        }
        Valuation::new(s, values, budget)
    }

    pub fn constant_one(s: &Structure, budget: &Budget) -> Result<Valuation> {
        let values = s
            .all_configs(budget)?
            .into_iter()
            .map(|x| (x, BigRational::one()))
            .collect();
        Ok(Valuation { values })
    }

    pub fn get(&self, x: EventSet) -> Result<&BigRational> {
        self.values
            .get(&x)
            .ok_or_else(|| Error::Usage("valuation has no value for this set".into()))
    }

    /// Values in canonical configuration order.
    pub fn table(&self) -> Vec<(EventSet, BigRational)> {
        let mut v: Vec<(EventSet, BigRational)> = self.values.iter().map(|(x, q)| (*x, q.clone())).collect();
        v.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        v
    }
}

/// `v(y) − Σ_I (−1)^{|I|+1} v(⋃_{i∈I} xᵢ)` over the nonempty `I` whose union
/// is a configuration.
pub fn drop(s: &Structure, v: &Valuation, y: EventSet, xs: &[EventSet]) -> Result<BigRational> {
    if !s.is_config(y) || xs.iter().any(|x| !s.is_config(*x)) {
        return usage("drop is taken over configurations");
    }
    if xs.iter().any(|x| !y.is_subset(*x)) {
        return usage("drop needs y below every xᵢ");
    }
    if xs.len() > 20 {
        return Err(Error::Resource("drop over more than 20 configurations".into()));
    }
    let mut d = v.get(y)?.clone();
    for mask in 1u32..(1 << xs.len()) {
        let u = (0..xs.len())
            .filter(|i| mask & (1 << i) != 0)
            .fold(EventSet::EMPTY, |u, i| u.union(xs[i]));
        if !s.is_config(u) {
            continue;
        }
        if mask.count_ones() % 2 == 1 {
            d -= v.get(u)?;
        } else {
            d += v.get(u)?;
        }
    }
    Ok(d)
}

/// `v(y) / v(x)` for `x ⊆ y`.
pub fn conditional(v: &Valuation, x: EventSet, y: EventSet) -> Result<BigRational> {
    if !x.is_subset(y) {
        return usage("conditioning needs x ⊆ y");
    }
    let vx = v.get(x)?;
    if vx.is_zero() {
        return Err(Error::Undefined("conditioning on a configuration of probability 0".into()));
    }
    Ok(v.get(y)? / vx)
}

/// Normalisation, values in [0,1], lmc, and the drop condition across
/// Player extensions. Also reports the multiplicative LMC as a property.
pub fn validate_valuation(s: &Structure, v: &Valuation, budget: &Budget) -> Result<ValidationReport> {
    let pol = match s.polarities() {
        Some(p) => p,
        None if s.is_empty() => &[],
        None => return usage("valuations live on structures with polarity"),
    };
    let configs = s.all_configs(budget)?;
    for x in &configs {
        v.get(*x)?;
    }
    let mut r = ValidationReport::default();
    let names = |x: EventSet| s.set_names(x);
    if !v.get(EventSet::EMPTY)?.is_one() {
        r.push(Violation::new("normalization", "the empty configuration must have value 1").with_sets(vec![vec![]]));
    }
    for &x in &configs {
        let q = v.get(x)?;
        if q.is_negative() || *q > BigRational::one() {
            r.push(Violation::new("unit-interval", format!("value {q} is outside [0,1]")).with_sets(vec![names(x)]));
        }
    }
    for &x in &configs {
        for e in s.all().difference(x) {
            if pol[e] == Polarity::Minus && s.enabled_at(x, e) && v.get(x)? != v.get(x.with(e))? {
                r.push(
                    Violation::new("lmc", "an Opponent extension changes the value")
                        .with_sets(vec![names(x), names(x.with(e))]),
                );
            }
        }
    }
    let pos = s.of_polarity(Polarity::Plus);
    let mut meter = Meter::new(budget, "drop condition check");
    'outer: for &y in &configs {
        let ups: Vec<EventSet> = configs
            .iter()
            .copied()
            .filter(|x| *x != y && y.is_subset(*x) && x.difference(y).is_subset(pos))
            .collect();
        // a member including another does not change the drop
        let mut antichains: Vec<Vec<usize>> = (0..ups.len()).map(|i| vec![i]).collect();
        let mut start = 0;
        while start < antichains.len() {
            let end = antichains.len();
            for k in start..end {
                meter.tick()?;
                let chain = antichains[k].clone();
                let xs: Vec<EventSet> = chain.iter().map(|&i| ups[i]).collect();
                let d = drop(s, v, y, &xs)?;
                if d.is_negative() {
                    let mut sets = vec![names(y)];
                    sets.extend(xs.iter().map(|x| names(*x)));
                    r.push(Violation::new("positive-drop", format!("drop is {d}")).with_sets(sets));
                    break 'outer;
                }
                for j in chain.last().unwrap() + 1..ups.len() {
                    if chain.iter().all(|&i| !ups[i].is_subset(ups[j]) && !ups[j].is_subset(ups[i])) {
                        let mut c = chain.clone();
                        c.push(j);
                        antichains.push(c);
                    }
                }
            }
            start = end;
        }
    }
    let mut lmc = true;
    for &x in &configs {
        for e in s.all().difference(x).intersection(pos) {
            for f in s.all().difference(x).difference(pos) {
                if s.enabled_at(x, e) && s.enabled_at(x, f) && s.is_config(x.with(e).with(f)) {
                    let lhs = v.get(x.with(e).with(f))? * v.get(x)?;
                    let rhs = v.get(x.with(e))? * v.get(x.with(f))?;
                    if lhs != rhs {
                        lmc = false;
                    }
                }
            }
        }
    }
    r.set("LMC", lmc);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Kind;

    fn intro_strat() -> Structure {
        Structure::builder(Kind::Edc)
            .neg("1")
            .neg("2")
            .pos("w1")
            .pos("w2")
            .class("w", &["w1", "w2"])
            .cause("1", "w1")
            .cause("2", "w2")
            .build()
            .unwrap()
    }

    fn intro_val(s: &Structure, p1: BigRational, p2: BigRational, q: BigRational) -> Valuation {
        let (w1, w2) = (s.id("w1").unwrap(), s.id("w2").unwrap());
        let values = s
            .all_configs(&Budget::default())
            .unwrap()
            .into_iter()
            .map(|x| {
                let v = match (x.contains(w1), x.contains(w2)) {
                    (true, true) => q.clone(),
                    (true, false) => p1.clone(),
                    (false, true) => p2.clone(),
                    _ => BigRational::one(),
                };
                (x, v)
            })
            .collect();
        Valuation::new(s, values, &Budget::default()).unwrap()
    }

    #[test]
    fn intro_drop_is_inclusion_exclusion() {
        let s = intro_strat();
        let v = intro_val(&s, ratio(7, 10), ratio(7, 10), ratio(3, 10));
        let y = s.set_of(&["1", "2"]).unwrap();
        let xs = [s.set_of(&["1", "2", "w1"]).unwrap(), s.set_of(&["1", "2", "w2"]).unwrap()];
        assert_eq!(drop(&s, &v, y, &xs).unwrap(), ratio(-1, 10));
        assert_eq!(drop(&s, &v, y, &[]).unwrap(), BigRational::one());
        let r = validate_valuation(&s, &v, &Budget::default()).unwrap();
        let bad: Vec<_> = r.violations_of("positive-drop").collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].detail, "drop is -1/10");
        assert_eq!(bad[0].sets[0], vec!["1", "2"]);
    }

    #[test]
    fn good_intro_valuations() {
        let s = intro_strat();
        let b = Budget::default();
        for (p, q) in [(ratio(1, 2), ratio(1, 4)), (ratio(1, 1), ratio(1, 1))] {
            let v = intro_val(&s, p.clone(), p, q);
            let r = validate_valuation(&s, &v, &b).unwrap();
            assert!(r.is_valid(), "{r:?}");
            assert_eq!(r.property("LMC"), Some(true));
        }
        let v = intro_val(&s, ratio(1, 2), ratio(1, 2), ratio(1, 4));
        let one = s.set_of(&["1"]).unwrap();
        let won = s.set_of(&["1", "w1"]).unwrap();
        assert_eq!(conditional(&v, one, won).unwrap(), ratio(1, 2));
    }

    #[test]
    fn completion_by_lmc() {
        let s = intro_strat();
        let b = Budget::default();
        let mut given = HashMap::new();
        given.insert(EventSet::EMPTY, BigRational::one());
        given.insert(s.set_of(&["1", "w1"]).unwrap(), ratio(1, 2));
        given.insert(s.set_of(&["2", "w2"]).unwrap(), ratio(1, 2));
        given.insert(s.set_of(&["1", "2", "w1", "w2"]).unwrap(), ratio(1, 4));
        let v = Valuation::complete_by_lmc(&s, given, &b).unwrap();
        assert_eq!(v.get(s.set_of(&["1", "2", "w1"]).unwrap()).unwrap(), &ratio(1, 2));
        assert_eq!(v, intro_val(&s, ratio(1, 2), ratio(1, 2), ratio(1, 4)));
    }

    #[test]
    fn zero_conditioning_is_undefined() {
        let s = intro_strat();
        let v = intro_val(&s, BigRational::zero(), ratio(1, 2), BigRational::zero());
        let won = s.set_of(&["1", "w1"]).unwrap();
        assert!(matches!(conditional(&v, won, won), Err(Error::Undefined(_))));
    }
}
