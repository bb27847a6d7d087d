use std::collections::HashSet;

use crate::budget::{Budget, Meter};
use crate::error::{usage, Error, Result};
use crate::eventset::EventSet;
use crate::games::{arena, check_game, dual, is_deterministic, is_race_free, par, Strategy};
use crate::structures::{prime_like_from_configs, Kind, Polarity, StructMap, Structure};

/// One order `q(x, y₁, y₂; χ)` with a top. Element `(c, a)` sits at
/// `c·n + a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Shape {
    carrier: EventSet,
    down: Vec<(usize, EventSet)>,
    top: usize,
}

impl Shape {
    fn down_of(&self, e: usize) -> EventSet {
        self.down.iter().find(|(k, _)| *k == e).map(|(_, d)| *d).unwrap()
    }

    /// A rigid inclusion into `other`.
    fn below(&self, other: &Shape) -> bool {
        self.carrier.is_subset(other.carrier)
            && self.down.iter().all(|&(e, d)| other.down_of(e) == d)
    }
}

/// `A` is deterministic for Opponent when `A⊥` is deterministic.
pub fn deterministic_for_opponent(a: &Structure, budget: &Budget) -> Result<bool> {
    is_deterministic(&dual(a)?, budget)
}

/// `δ_A : A ⇸ A ∥ A` built from balanced triples and choice functions.
pub fn duplication(a: &Structure, budget: &Budget) -> Result<Strategy> {
    check_game(a)?;
    if !is_race_free(a, budget)? {
        return usage("duplication needs a race-free game");
    }
    let n = a.len();
    if 3 * n > crate::eventset::MAX_EVENTS {
        return Err(Error::Resource("game too large to duplicate".into()));
    }
    let game = arena(a, &par(a, a)?)?;
    let game_of = |p: usize| -> usize {
        let (c, e) = (p / n, p % n);
        let name = match c {
            0 => format!("0.{}", a.name(e)),
            1 => format!("1.0.{}", a.name(e)),
            _ => format!("1.1.{}", a.name(e)),
        };
        game.id(&name).expect("game event")
    };
    let pos = a.of_polarity(Polarity::Plus);
    let neg = a.of_polarity(Polarity::Minus);
    let configs = a.all_configs(budget)?;
    let mut meter = Meter::new(budget, "duplication enumeration");
    let mut shapes: Vec<Shape> = Vec::new();
    let mut seen: HashSet<Shape> = HashSet::new();
    let lift = |c: usize, x: EventSet| x.map(|e| c * n + e);
    for &x in &configs {
        for &y1 in &configs {
            for &y2 in &configs {
                meter.tick()?;
                let balanced = y1.union(y2).intersection(pos).is_subset(x)
                    && x.intersection(neg).is_subset(y1.union(y2));
                if !balanced {
                    continue;
                }
                let choosers: Vec<usize> = x.intersection(neg).iter().collect();
                for bits in 0u64..(1 << choosers.len()) {
                    meter.tick()?;
                    let chi = |k: usize| if bits & (1 << k) == 0 { 1 } else { 2 };
                    let ok = choosers
                        .iter()
                        .enumerate()
                        .all(|(k, &e)| if chi(k) == 1 { y1.contains(e) } else { y2.contains(e) });
                    if !ok {
                        continue;
                    }
                    let carrier = lift(0, x).union(lift(1, y1)).union(lift(2, y2));
                    let mut preds = vec![EventSet::EMPTY; 3 * n];
                    for c in 0..3 {
                        let y = [x, y1, y2][c];
                        for e in y {
                            preds[c * n + e] = lift(c, a.strict_down(e));
                        }
                    }
                    for (c, y) in [(1, y1), (2, y2)] {
                        for e in y.intersection(pos) {
                            preds[c * n + e].insert(e);
                        }
                    }
                    for (k, &e) in choosers.iter().enumerate() {
                        preds[e].insert(chi(k) * n + e);
                    }
                    let Some(down) = close(carrier, &preds) else { continue };
                    let Some(top) = carrier.iter().find(|&p| down[p] == carrier) else { continue };
                    let shape = Shape {
                        carrier,
                        down: carrier.iter().map(|p| (p, down[p])).collect(),
                        top,
                    };
                    if seen.insert(shape.clone()) {
                        shapes.push(shape);
                    }
                }
            }
        }
    }
    if shapes.len() > crate::eventset::MAX_EVENTS {
        return Err(Error::Resource("duplication has too many events".into()));
    }
    shapes.sort_by(|s, t| {
        (s.carrier.len(), game.name(game_of(s.top)), s.carrier.bits())
            .cmp(&(t.carrier.len(), game.name(game_of(t.top)), t.carrier.bits()))
            .then_with(|| format!("{:?}", s.down).cmp(&format!("{:?}", t.down)))
    });
    let m = shapes.len();
    let down: Vec<EventSet> = (0..m)
        .map(|i| (0..m).filter(|&j| shapes[j].below(&shapes[i])).collect())
        .collect();
    let tops: Vec<usize> = shapes.iter().map(|s| game_of(s.top)).collect();
    let image = |x: EventSet| -> EventSet { x.iter().map(|d| tops[d]).collect() };
    let mut confs = vec![EventSet::EMPTY];
    let mut layer = vec![EventSet::EMPTY];
    while !layer.is_empty() {
        let mut next = HashSet::new();
        for &z in &layer {
            for d in 0..m {
                meter.tick()?;
                if !z.contains(d) && down[d].without(d).is_subset(z) && game.is_consistent(image(z.with(d))) {
                    next.insert(z.with(d));
                }
            }
        }
        layer = next.into_iter().collect();
        confs.extend(layer.iter().copied());
    }
    let names: Vec<String> = (0..m).map(|i| format!("q{}:{}", i + 1, game.name(tops[i]))).collect();
    let classes: Vec<String> = tops.iter().map(|&t| game.name(t).to_string()).collect();
    let polarity = tops.iter().map(|&t| game.polarity(t).unwrap()).collect();
    let inner = prime_like_from_configs(Kind::Edc, names.clone(), classes, Some(polarity), &down, &confs)?;
    let mut mapping = vec![None; m];
    for (i, name) in names.iter().enumerate() {
        mapping[inner.id(name)?] = Some(tops[i]);
    }
    Strategy::new(StructMap::new(inner, game, mapping)?, budget)
}

/// Transitive closure restricted to `carrier`; `None` on a cycle.
fn close(carrier: EventSet, preds: &[EventSet]) -> Option<Vec<EventSet>> {
    let mut down = vec![EventSet::EMPTY; preds.len()];
    for p in carrier {
        down[p] = preds[p].with(p);
    }
    loop {
        let mut changed = false;
        for p in carrier {
            let acc = down[p].iter().fold(down[p], |acc, q| acc.union(down[q]));
            if acc != down[p] {
                down[p] = acc;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for p in carrier {
        for q in down[p].without(p) {
            if down[q].contains(p) {
                return None;
            }
        }
    }
    Some(down)
}
