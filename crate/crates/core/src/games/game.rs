use crate::budget::Budget;
use crate::error::{usage, Error, Result};
use crate::eventset::EventSet;
use crate::structures::{validate_map, Consistency, Kind, Parts, Polarity, StructMap, Structure};

/// A game is a prime-like structure with trivial equivalence and total
/// polarity.
pub fn check_game(a: &Structure) -> Result<()> {
    if !a.kind().is_prime_like() {
        return usage("a game must be a prime event structure");
    }
    if !a.has_trivial_equivalence() {
        return usage("a game must have the identity equivalence");
    }
    if a.polarities().is_none() && !a.is_empty() {
        return usage("a game needs a polarity on every event");
    }
    Ok(())
}

/// Reverses every polarity.
pub fn dual(a: &Structure) -> Result<Structure> {
    if a.is_empty() {
        return Ok(a.clone());
    }
    let Some(pol) = a.polarities() else {
        return usage("dual needs a polarity");
    };
    a.with_polarity(Some(pol.iter().map(|p| p.flip()).collect()))
}

/// `A ∥ B` with events tagged `0.` and `1.`.
pub fn par(a: &Structure, b: &Structure) -> Result<Structure> {
    par_many(&[a, b])
}

/// Juxtaposition of several structures; component `i` is tagged `i.`.
/// Polarity is kept when every component has one.
pub fn par_many(parts: &[&Structure]) -> Result<Structure> {
    let kind = if parts.iter().any(|s| !s.kind().is_prime_like()) {
        return usage("parallel composition takes prime-like structures");
    } else if parts.iter().any(|s| s.kind() == Kind::Ese) {
        Kind::Ese
    } else if parts.iter().all(|s| s.kind() == Kind::Prime) {
        Kind::Prime
    } else {
        Kind::Edc
    };
    let mut names = Vec::new();
    let mut classes = Vec::new();
    let mut offsets = Vec::new();
    for (i, s) in parts.iter().enumerate() {
        offsets.push(names.len());
        for e in 0..s.len() {
            names.push(format!("{i}.{}", s.name(e)));
            classes.push(format!("{i}.{}", s.class_name(e)));
        }
    }
    let shift = |i: usize, x: EventSet| x.map(|e| e + offsets[i]);
    let mut p = Parts::new(kind, names);
    p.classes = classes;
    if parts.iter().all(|s| s.is_empty() || s.polarities().is_some()) {
        p.polarity = Some(
            parts
                .iter()
                .flat_map(|s| s.polarities().unwrap_or(&[]).iter().copied())
                .collect(),
        );
    }
    for (i, s) in parts.iter().enumerate() {
        for (a, b) in s.immediate_causality() {
            p.causality.push((a + offsets[i], b + offsets[i]));
        }
    }
    let all_conflicts = parts
        .iter()
        .all(|s| matches!(s.consistency(), Consistency::Conflicts(_)));
    p.consistency = if all_conflicts {
        let mut cs = Vec::new();
        for (i, s) in parts.iter().enumerate() {
            if let Consistency::Conflicts(v) = s.consistency() {
                cs.extend(v.iter().map(|&c| shift(i, c)));
            }
        }
        Consistency::Conflicts(cs)
    } else {
        // products of the maximal consistent sets of each side
        let mut gens = vec![EventSet::EMPTY];
        for (i, s) in parts.iter().enumerate() {
            let own: Vec<EventSet> = match s.consistency() {
                Consistency::Explicit(g) if !g.is_empty() => g.clone(),
                Consistency::Explicit(_) => vec![EventSet::EMPTY],
                Consistency::Conflicts(_) => crate::eventset::maximal(&s.consistent_sets(&Budget::default())?),
            };
            let mut next = Vec::new();
            for g in &gens {
                for h in &own {
                    next.push(g.union(shift(i, *h)));
                }
            }
            gens = next;
        }
        Consistency::Explicit(gens)
    };
    Structure::from_parts(p)
}

/// `x ⊑_A y`: `x ⊇⁻ x∩y ⊆⁺ y`.
pub fn scott_leq(x: EventSet, y: EventSet, a: &Structure) -> Result<bool> {
    check_game(a)?;
    if !a.is_config(x) || !a.is_config(y) {
        return usage("scott_leq takes configurations of the game");
    }
    let m = x.intersection(y);
    let neg = a.of_polarity(Polarity::Minus);
    let pos = a.of_polarity(Polarity::Plus);
    Ok(x.difference(m).is_subset(neg) && y.difference(m).is_subset(pos))
}

/// Whenever two moves of opposite polarity are enabled at a configuration
/// they can occur together.
pub fn is_race_free(a: &Structure, budget: &Budget) -> Result<bool> {
    Ok(race(a, budget)?.is_none())
}

/// A configuration and two enabled moves of opposite polarity that cannot
/// occur together.
pub fn race(a: &Structure, budget: &Budget) -> Result<Option<(EventSet, usize, usize)>> {
    check_game(a)?;
    for x in a.all_configs(budget)? {
        let enabled: Vec<usize> = a.all().difference(x).iter().filter(|&e| a.enabled_at(x, e)).collect();
        for &e in &enabled {
            for &f in &enabled {
                if a.polarity(e) == Some(Polarity::Minus)
                    && a.polarity(f) == Some(Polarity::Plus)
                    && !a.is_config(x.with(e).with(f))
                {
                    return Ok(Some((x, e, f)));
                }
            }
        }
    }
    Ok(None)
}

/// A total polarity-preserving map from a polarized edc to a game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub inner: Structure,
    pub game: Structure,
    pub sigma: StructMap,
}

impl Strategy {
    /// Checks the pre-strategy conditions on `sigma`.
    pub fn new(sigma: StructMap, budget: &Budget) -> Result<Strategy> {
        check_game(&sigma.target)?;
        if !sigma.source.kind().is_prime_like() || (sigma.source.polarities().is_none() && !sigma.source.is_empty()) {
            return usage("a strategy needs a polarized edc");
        }
        if !sigma.is_total() {
            return usage("a strategy map must be total");
        }
        let r = validate_map(&sigma, budget)?;
        if let Some(v) = r.violations.first() {
            return usage(format!("not a map of structures ({}): {}", v.axiom, v.detail));
        }
        Ok(Strategy {
            inner: sigma.source.clone(),
            game: sigma.target.clone(),
            sigma,
        })
    }

    pub fn apply(&self, s: usize) -> usize {
        self.sigma.mapping[s].expect("strategies are total")
    }

    /// Splits the game into `A` and `B` of `A⊥ ∥ B`. A game without `0.`/`1.`
    /// tags is read as a game from the empty game.
    pub fn sides(&self) -> Result<Sides> {
        Sides::of(&self.game)
    }
}

/// The two components of a game `A⊥ ∥ B` and where each event lives.
#[derive(Debug, Clone)]
pub struct Sides {
    pub left: Structure,
    pub right: Structure,
    /// For each game event: 0 or 1 and its index in that component.
    pub place: Vec<(usize, usize)>,
}

impl Sides {
    pub fn of(game: &Structure) -> Result<Sides> {
        check_game(game)?;
        let tag = |e: usize| -> Option<usize> {
            let n = game.name(e);
            if n.starts_with("0.") {
                Some(0)
            } else if n.starts_with("1.") {
                Some(1)
            } else {
                None
            }
        };
        let tags: Vec<Option<usize>> = (0..game.len()).map(tag).collect();
        let untagged = tags.iter().all(|t| t.is_none());
        if !untagged && tags.iter().any(|t| t.is_none()) {
            return usage("game events must all be tagged `0.` or `1.`");
        }
        let side_of = |e: usize| if untagged { 1 } else { tags[e].unwrap() };
        let pick = |side: usize| -> EventSet { (0..game.len()).filter(|&e| side_of(e) == side).collect() };
        let strip = |x: &Structure| -> Result<Structure> {
            if untagged {
                Ok(x.clone())
            } else {
                x.renamed(|_, n| n[2..].to_string())
            }
        };
        let left = strip(&game.sub_structure(pick(0), game.kind())?)?;
        let left = dual(&left)?;
        let right = strip(&game.sub_structure(pick(1), game.kind())?)?;
        let place = (0..game.len())
            .map(|e| {
                let n = game.name(e);
                let (side, local) = if untagged { (1, n) } else { (side_of(e), &n[2..]) };
                let comp = if side == 0 { &left } else { &right };
                comp.id(local).map(|i| (side, i))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Sides { left, right, place })
    }
}

/// The game `A⊥ ∥ B` a strategy from `A` to `B` lives in.
pub fn arena(a: &Structure, b: &Structure) -> Result<Structure> {
    par(&dual(a)?, b)
}

/// Copycat on `A`: `A⊥ ∥ A` where each Player move waits for its
/// Opponent copy on the other side.
pub fn copycat(a: &Structure, budget: &Budget) -> Result<Strategy> {
    check_game(a)?;
    let game = arena(a, a)?;
    let mut p = game.to_parts();
    p.kind = Kind::Edc;
    for c in 0..a.len() {
        let l = game.id(&format!("0.{}", a.name(c)))?;
        let r = game.id(&format!("1.{}", a.name(c)))?;
        match a.polarity(c) {
            Some(Polarity::Plus) => p.causality.push((l, r)),
            _ => p.causality.push((r, l)),
        }
    }
    let temp = Structure::from_parts(p.clone())?;
    p.consistency = Consistency::Explicit(temp.maximal_configs(budget)?);
    let inner = Structure::from_parts(p)?;
    let mapping = (0..inner.len()).map(|e| game.index_of(inner.name(e))).collect();
    let sigma = StructMap::new(inner, game, mapping)?;
    if !sigma.is_total() {
        return Err(Error::Internal("copycat lost an event".into()));
    }
    Strategy::new(sigma, budget)
}
