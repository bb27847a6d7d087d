use std::collections::BTreeMap;

use super::game::{arena, Sides, Strategy};
use super::hiding::hide_events;
use super::pullback::{pullback_edc, EdcPullback};
use super::game::{par, par_many};
use crate::budget::{Budget, Meter};
use crate::error::{usage, Result};
use crate::eventset::EventSet;
use crate::structures::{Kind, Polarity, StructMap, Structure, ValidationReport, Violation};

/// `τ ⊙ σ` together with the pullback it was cut from.
#[derive(Debug, Clone)]
pub struct Composition {
    pub strategy: Strategy,
    pub pullback: EdcPullback,
    /// For each composite event, the pullback event it comes from.
    pub origin: Vec<usize>,
    /// For each pullback event, its `S` event when it lies over `σ`.
    pub s_part: Vec<Option<usize>>,
    /// For each pullback event, its `T` event when it lies over `τ`.
    pub t_part: Vec<Option<usize>>,
}

impl Composition {
    /// The pullback configuration under a composite configuration, split
    /// into its `S` and `T` parts.
    pub fn witness(&self, x: EventSet) -> (EventSet, EventSet, EventSet) {
        let p = &self.pullback.structure;
        let z = p.down_closure(x.iter().map(|e| self.origin[e]).collect());
        let s = z.iter().filter_map(|e| self.s_part[e]).collect();
        let t = z.iter().filter_map(|e| self.t_part[e]).collect();
        (z, s, t)
    }
}

pub fn compose(sigma: &Strategy, tau: &Strategy, budget: &Budget) -> Result<Strategy> {
    Ok(compose_full(sigma, tau, budget)?.strategy)
}

/// Synchronise `σ ∥ C` with `A ∥ τ` over `A ∥ B ∥ C` and hide `B`.
pub fn compose_full(sigma: &Strategy, tau: &Strategy, budget: &Budget) -> Result<Composition> {
    let ss = sigma.sides()?;
    let ts = tau.sides()?;
    if ss.right != ts.left {
        return usage("the middle games of the two strategies differ");
    }
    let (a, b, c) = (&ss.left, &ss.right, &ts.right);
    let (s, t) = (&sigma.inner, &tau.inner);
    let z = par_many(&[a, b, c])?.with_polarity(None)?;
    let x = par(s, c)?.with_polarity(None)?;
    let y = par(a, t)?.with_polarity(None)?;
    let comp_name = |sides: &Sides, offset: usize, e: usize| -> String {
        let (side, i) = sides.place[e];
        let comp = if side == 0 { &sides.left } else { &sides.right };
        format!("{}.{}", side + offset, comp.name(i))
    };
    let mut fx = vec![None; x.len()];
    for e in 0..s.len() {
        let to = comp_name(&ss, 0, sigma.apply(e));
        fx[x.id(&format!("0.{}", s.name(e)))?] = Some(z.id(&to)?);
    }
    for e in 0..c.len() {
        fx[x.id(&format!("1.{}", c.name(e)))?] = Some(z.id(&format!("2.{}", c.name(e)))?);
    }
    let mut gy = vec![None; y.len()];
    for e in 0..a.len() {
        gy[y.id(&format!("0.{}", a.name(e)))?] = Some(z.id(&format!("0.{}", a.name(e)))?);
    }
    for e in 0..t.len() {
        let to = comp_name(&ts, 1, tau.apply(e));
        gy[y.id(&format!("1.{}", t.name(e)))?] = Some(z.id(&to)?);
    }
    let f = StructMap::new(x.clone(), z.clone(), fx)?;
    let g = StructMap::new(y.clone(), z.clone(), gy)?;
    let pb = pullback_edc(&f, &g, budget)?;
    let p = &pb.structure;

    let over = |e: usize| f.apply(pb.proj1.apply(e).unwrap()).unwrap();
    let game = arena(a, c)?;
    let visible: EventSet = (0..p.len()).filter(|&e| !z.name(over(e)).starts_with("1.")).collect();
    let hidden = hide_events(p, visible)?;
    // composite events in prime-configuration order
    let mut order: Vec<usize> = visible.iter().collect();
    order.sort_by(|&u, &v| pb.sets[u].canonical_cmp(&pb.sets[v]).then(pb.tops[u].cmp(&pb.tops[v])));
    let game_event = |e: usize| -> Result<usize> {
        let zn = z.name(over(e));
        let gn = if let Some(rest) = zn.strip_prefix("2.") { format!("1.{rest}") } else { zn.to_string() };
        game.id(&gn)
    };
    let mut new_name = BTreeMap::new();
    for (k, &e) in order.iter().enumerate() {
        new_name.insert(p.name(e).to_string(), format!("p{}:{}", k + 1, game.name(game_event(e)?)));
    }
    let mut parts = hidden.to_parts();
    parts.kind = Kind::Edc;
    parts.names = parts.names.iter().map(|n| new_name[n].clone()).collect();
    // each class is named after its least member
    let mut class_name: BTreeMap<String, String> = BTreeMap::new();
    for (old, new) in hidden.names().iter().zip(&parts.names) {
        let cls = hidden.class_name(hidden.id(old)?).to_string();
        let entry = class_name.entry(cls).or_insert_with(|| new.clone());
        if new < entry {
            *entry = new.clone();
        }
    }
    parts.classes = (0..hidden.len())
        .map(|e| class_name[hidden.class_name(e)].clone())
        .collect();
    let pol = game.polarities().unwrap();
    parts.polarity = Some(
        (0..hidden.len())
            .map(|e| Ok(pol[game_event(p.id(hidden.name(e))?)?]))
            .collect::<Result<Vec<_>>>()?,
    );
    let inner = Structure::from_parts(parts)?;
    let mut origin = vec![0; inner.len()];
    let mut mapping = vec![None; inner.len()];
    for (old, new) in &new_name {
        let e = inner.id(new)?;
        origin[e] = p.id(old)?;
        mapping[e] = Some(game_event(origin[e])?);
    }
    let strategy = Strategy::new(StructMap::new(inner, game, mapping)?, budget)?;

    let s_part = (0..p.len())
        .map(|e| {
            let n = x.name(pb.proj1.apply(e).unwrap());
            n.strip_prefix("0.").map(|r| s.id(r)).transpose()
        })
        .collect::<Result<Vec<_>>>()?;
    let t_part = (0..p.len())
        .map(|e| {
            let n = y.name(pb.proj2.apply(e).unwrap());
            n.strip_prefix("1.").map(|r| t.id(r)).transpose()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Composition {
        strategy,
        pullback: pb,
        origin,
        s_part,
        t_part,
    })
}

/// The five strategy axioms; each is reported as a property and every
/// failure carries a witness.
pub fn check_strategy(sigma: &Strategy, budget: &Budget) -> Result<ValidationReport> {
    let s = &sigma.inner;
    let a = &sigma.game;
    let mut r = ValidationReport::default();
    let name = |e: usize| s.name(e).to_string();
    let pol = |e: usize| s.polarity(e).unwrap();

    let mut innocent = true;
    for (u, v) in s.immediate_causality() {
        if (pol(u) == Polarity::Plus || pol(v) == Polarity::Minus) && !a.is_immediate(sigma.apply(u), sigma.apply(v)) {
            innocent = false;
            r.push(
                Violation::new("innocence", "an immediate dependency is not reflected in the game")
                    .with_events(vec![name(u), name(v)]),
            );
        }
    }
    r.set("innocence", innocent);

    let mut receptive = true;
    for x in s.all_configs(budget)? {
        let ax = sigma.sigma.image(x);
        for m in a.all().difference(ax).intersection(a.of_polarity(Polarity::Minus)) {
            if !a.enabled_at(ax, m) {
                continue;
            }
            let answered = s
                .all()
                .difference(x)
                .iter()
                .any(|e| sigma.apply(e) == m && s.enabled_at(x, e));
            if !answered {
                receptive = false;
                r.push(
                    Violation::new("receptivity", format!("Opponent move {} is not answered", a.name(m)))
                        .with_events(vec![a.name(m).to_string()])
                        .with_sets(vec![s.set_names(x)]),
                );
            }
        }
    }
    r.set("receptivity", receptive);

    let mut meter = Meter::new(budget, "positive-consistency check");
    let mut pos_consistent = true;
    let positive = s.of_polarity(Polarity::Plus);
    for x in s.all().subsets() {
        meter.tick()?;
        // Con is closed under down-closure, so the image is taken of [X]
        if s.is_consistent(x) || !a.is_consistent(sigma.sigma.image(s.down_closure(x))) {
            continue;
        }
        let plus = s.down_closure(x).intersection(positive);
        if s.is_consistent(plus) {
            pos_consistent = false;
            r.push(
                Violation::new(
                    "positive-consistency",
                    "a set with consistent image and consistent positive history is inconsistent",
                )
                .with_sets(vec![s.set_names(x)]),
            );
            break;
        }
    }
    r.set("positive-consistency", pos_consistent);

    let mut non_redundant = true;
    for u in 0..s.len() {
        for v in u + 1..s.len() {
            if s.equiv(u, v)
                && pol(u) == Polarity::Minus
                && pol(v) == Polarity::Minus
                && s.strict_down(u) == s.strict_down(v)
            {
                non_redundant = false;
                r.push(
                    Violation::new("non-redundancy", "two equivalent Opponent events share their history")
                        .with_events(vec![name(u), name(v)]),
                );
            }
        }
    }
    r.set("non-redundancy", non_redundant);

    let mut saturated = true;
    for u in 0..s.len() {
        for v in u + 1..s.len() {
            if sigma.apply(u) == sigma.apply(v) && !s.equiv(u, v) {
                saturated = false;
                r.push(
                    Violation::new("equivalence-saturation", "events with a common image are not equivalent")
                        .with_events(vec![name(u), name(v)]),
                );
            }
        }
    }
    r.set("equivalence-saturation", saturated);
    Ok(r)
}

/// A set whose Opponent history is consistent although it is not.
pub fn determinism_witness(s: &Structure, budget: &Budget) -> Result<Option<EventSet>> {
    if s.polarities().is_none() && !s.is_empty() {
        return usage("determinism needs a polarity");
    }
    let neg = s.of_polarity(Polarity::Minus);
    let mut meter = Meter::new(budget, "determinism check");
    for x in s.all().subsets() {
        meter.tick()?;
        if !s.is_consistent(x) && s.is_consistent(s.down_closure(x).intersection(neg)) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// `[X]⁻ ∈ Con ⟹ X ∈ Con` for every finite `X`.
pub fn is_deterministic(s: &Structure, budget: &Budget) -> Result<bool> {
    Ok(determinism_witness(s, budget)?.is_none())
}

/// The same property phrased with covering steps: a Player extension never
/// excludes another extension.
pub fn is_deterministic_by_covers(s: &Structure, budget: &Budget) -> Result<bool> {
    if s.polarities().is_none() && !s.is_empty() {
        return usage("determinism needs a polarity");
    }
    for x in s.all_configs(budget)? {
        let enabled: Vec<usize> = s.all().difference(x).iter().filter(|&e| s.enabled_at(x, e)).collect();
        for &e in &enabled {
            if s.polarity(e) != Some(Polarity::Plus) {
                continue;
            }
            for &f in &enabled {
                if f != e && !s.is_config(x.with(e).with(f)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::copycat;

    fn intro_game() -> Structure {
        Structure::builder(Kind::Prime).neg("1").neg("2").pos("w").build().unwrap()
    }

    fn intro_strategy() -> Strategy {
        let s = Structure::builder(Kind::Edc)
            .neg("1")
            .neg("2")
            .pos("w1")
            .pos("w2")
            .class("w", &["w1", "w2"])
            .cause("1", "w1")
            .cause("2", "w2")
            .build()
            .unwrap();
        let f = StructMap::from_names(
            s,
            intro_game(),
            &[("1", Some("1")), ("2", Some("2")), ("w1", Some("w")), ("w2", Some("w"))],
        )
        .unwrap();
        Strategy::new(f, &Budget::default()).unwrap()
    }

    #[test]
    fn intro_strategy_satisfies_the_axioms() {
        let b = Budget::default();
        let r = check_strategy(&intro_strategy(), &b).unwrap();
        assert!(r.is_valid(), "{r:?}");
        assert!(is_deterministic(&intro_strategy().inner, &b).unwrap());
        assert!(is_deterministic_by_covers(&intro_strategy().inner, &b).unwrap());
    }

    #[test]
    fn copycat_then_intro_strategy_has_the_same_shape() {
        let b = Budget::default();
        let sigma = intro_strategy();
        let cc = copycat(&intro_game(), &b).unwrap();
        let comp = compose(&sigma, &cc, &b).unwrap();
        assert_eq!(comp.inner.len(), 4);
        assert!(check_strategy(&comp, &b).unwrap().is_valid());
    }
}
