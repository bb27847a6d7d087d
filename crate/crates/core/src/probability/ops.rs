use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::valuation::{ProbStrategy, Valuation};
use crate::budget::Budget;
use crate::error::{usage, Error, Result};
use crate::eventset::EventSet;
use crate::games::{check_game, compose_full, pullback_edc, Strategy};
use crate::structures::{Consistency, Kind, Parts, Polarity, StructMap, Structure};

/// `v(x) = v_S(π₁ˢ x) · v_T(π₂ᵀ x)` on the composite.
pub fn compose_valuations(sp: &ProbStrategy, tp: &ProbStrategy, budget: &Budget) -> Result<ProbStrategy> {
    let comp = compose_full(&sp.strategy, &tp.strategy, budget)?;
    let inner = &comp.strategy.inner;
    let mut values = HashMap::new();
    for x in inner.all_configs(budget)? {
        let (_, s, t) = comp.witness(x);
        let v = sp.valuation.get(s)? * tp.valuation.get(t)?;
        values.insert(x, v);
    }
    Ok(ProbStrategy {
        valuation: Valuation::new(inner, values, budget)?,
        strategy: comp.strategy,
    })
}

/// `(f v)(y) = Σ_{f x = y} v(x)` along a rigid map.
pub fn push_forward(f: &StructMap, v: &Valuation, budget: &Budget) -> Result<Valuation> {
    if !f.is_rigid() {
        return usage("push-forward needs a rigid map");
    }
    let mut values: HashMap<EventSet, BigRational> = f
        .target
        .all_configs(budget)?
        .into_iter()
        .map(|y| (y, BigRational::zero()))
        .collect();
    for x in f.source.all_configs(budget)? {
        let y = f.image(x);
        let slot = values
            .get_mut(&y)
            .ok_or_else(|| Error::Usage("the map sends a configuration outside the target".into()))?;
        *slot += v.get(x)?;
    }
    Valuation::new(&f.target, values, budget)
}

/// A rigid map of strategies over the same game along which the pushed
/// valuation stays below `v2`.
pub fn is_2cell(
    f: &StructMap,
    sigma: &Strategy,
    sigma2: &Strategy,
    v: &Valuation,
    v2: &Valuation,
    budget: &Budget,
) -> Result<bool> {
    if f.source != sigma.inner || f.target != sigma2.inner || sigma.game != sigma2.game {
        return usage("the map does not run between the two strategies");
    }
    if !f.is_rigid() {
        return Ok(false);
    }
    if (0..f.source.len()).any(|s| sigma2.apply(f.apply(s).unwrap()) != sigma.apply(s)) {
        return Ok(false);
    }
    let pushed = push_forward(f, v, budget)?;
    for y in f.target.all_configs(budget)? {
        if pushed.get(y)? > v2.get(y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The least strategy: the moves of the game reachable by Opponent alone.
pub fn bottom(game: &Structure, budget: &Budget) -> Result<Strategy> {
    check_game(game)?;
    let neg = game.of_polarity(Polarity::Minus);
    let keep: EventSet = (0..game.len()).filter(|&e| game.down(e).is_subset(neg)).collect();
    let inner = game.sub_structure(keep, Kind::Edc)?;
    let mapping = (0..inner.len()).map(|e| game.index_of(inner.name(e))).collect();
    Strategy::new(StructMap::new(inner, game.clone(), mapping)?, budget)
}

/// `Σ pᵢ σᵢ`: events reachable by Opponent alone are shared and named
/// `g.<move>`; every other event of branch `i` becomes `b<i>.<event>`,
/// branches exclude each other, and events over the same move are
/// equivalent.
pub fn prob_sum(game: &Structure, branches: &[ProbStrategy], weights: &[BigRational], budget: &Budget) -> Result<ProbStrategy> {
    if branches.len() != weights.len() {
        return usage("one weight per branch");
    }
    let total = weights.iter().fold(BigRational::zero(), |a, w| a + w);
    if total > BigRational::one() || weights.iter().any(|w| *w < BigRational::zero()) {
        return usage("weights must form a sub-probability distribution");
    }
    for b in branches {
        if b.strategy.game != *game {
            return usage("every branch must be over the given game");
        }
    }
    let shell = bottom(game, budget)?;
    // glued events first, then the branch events
    let mut names: Vec<String> = (0..shell.inner.len()).map(|e| format!("g.{}", shell.inner.name(e))).collect();
    let mut classes = names.clone();
    let mut polarity: Vec<Polarity> = (0..shell.inner.len()).map(|e| shell.inner.polarity(e).unwrap()).collect();
    let mut to_game: Vec<usize> = (0..shell.inner.len()).map(|e| shell.apply(e)).collect();
    let mut causality = Vec::new();
    for (b, e) in shell.inner.immediate_causality() {
        causality.push((b, e));
    }
    // for each branch event, its index in the sum
    let mut place: Vec<Vec<usize>> = Vec::new();
    let neg = |s: &Structure, e: usize| s.down(e).is_subset(s.of_polarity(Polarity::Minus));
    for (i, br) in branches.iter().enumerate() {
        let s = &br.strategy.inner;
        let mut at = vec![usize::MAX; s.len()];
        let mut glued_seen = EventSet::EMPTY;
        for e in 0..s.len() {
            if neg(s, e) {
                let g = br.strategy.apply(e);
                let k = shell
                    .inner
                    .index_of(game.name(g))
                    .ok_or_else(|| Error::Usage("an Opponent-only event lies outside the game's Opponent part".into()))?;
                if glued_seen.contains(k) {
                    return usage("two Opponent-only events of a branch share a move");
                }
                glued_seen.insert(k);
                at[e] = k;
            } else {
                at[e] = names.len();
                names.push(format!("b{}.{}", i + 1, s.name(e)));
                // events over one move are equivalent across branches
                classes.push(format!("m.{}", game.name(br.strategy.apply(e))));
                polarity.push(s.polarity(e).unwrap());
                to_game.push(br.strategy.apply(e));
            }
        }
        for (a, b) in s.immediate_causality() {
            if !neg(s, b) {
                causality.push((at[a], at[b]));
            }
        }
        place.push(at);
    }
    let mut gens = Vec::new();
    for (i, br) in branches.iter().enumerate() {
        for x in br.strategy.inner.maximal_configs(budget)? {
            gens.push(x.iter().map(|e| place[i][e]).collect::<EventSet>());
        }
    }
    gens.extend(shell.inner.maximal_configs(budget)?);
    let mut p = Parts::new(Kind::Edc, names.clone());
    p.classes = classes;
    p.polarity = Some(polarity);
    p.causality = causality;
    p.consistency = Consistency::Explicit(gens);
    let inner = Structure::from_parts(p)?;
    let mapping: Vec<Option<usize>> = (0..inner.len())
        .map(|e| {
            let k = names.iter().position(|n| n == inner.name(e)).unwrap();
            Some(to_game[k])
        })
        .collect();
    let strategy = Strategy::new(StructMap::new(inner.clone(), game.clone(), mapping)?, budget)?;

    let glued = shell.inner.len();
    let mut values = HashMap::new();
    for x in inner.all_configs(budget)? {
        let own: Vec<usize> = x
            .iter()
            .map(|e| names.iter().position(|n| n == inner.name(e)).unwrap())
            .collect();
        let branch = own.iter().find(|&&k| k >= glued).map(|&k| branch_of(&place, k));
        let v = match branch {
            None => BigRational::one(),
            Some(i) => {
                let back: EventSet = (0..place[i].len()).filter(|&e| own.contains(&place[i][e])).collect();
                &weights[i] * branches[i].valuation.get(back)?
            }
        };
        values.insert(x, v);
    }
    Ok(ProbStrategy {
        valuation: Valuation::new(&inner, values, budget)?,
        strategy,
    })
}

fn branch_of(place: &[Vec<usize>], k: usize) -> usize {
    place.iter().position(|at| at.contains(&k)).expect("branch event")
}

/// `σ₁ ∧ σ₂`: the pullback of two strategies in the same game.
pub fn conjunction(s1: &Strategy, s2: &Strategy, budget: &Budget) -> Result<Strategy> {
    if s1.game != s2.game {
        return usage("conjunction needs strategies in the same game");
    }
    let pb = pullback_edc(&s1.sigma, &s2.sigma, budget)?;
    let map = pb.proj1.then(&s1.sigma)?;
    let pol: Vec<Polarity> = (0..pb.structure.len())
        .map(|e| s1.game.polarity(map.apply(e).unwrap()).unwrap())
        .collect();
    let inner = pb.structure.with_polarity(Some(pol))?;
    Strategy::new(StructMap::new(inner, s1.game.clone(), map.mapping)?, budget)
}

/// The valuation transported along an isomorphism `f : S → S'`.
pub fn transport(f: &StructMap, v: &Valuation, budget: &Budget) -> Result<Valuation> {
    let mut values = HashMap::new();
    for x in f.source.all_configs(budget)? {
        values.insert(f.image(x), v.get(x)?.clone());
    }
    Valuation::new(&f.target, values, budget)
}

/// Sorted `name set → value` view, handy for comparisons and reports.
pub fn named_table(s: &Structure, v: &Valuation) -> BTreeMap<Vec<String>, BigRational> {
    v.table().into_iter().map(|(x, q)| (s.set_names(x), q)).collect()
}
