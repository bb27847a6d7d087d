//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use parcause::eventset::EventSet;
use parcause::games::{arena, compose, copycat, dual, find_strategy_iso, par, Sides, Strategy};
use parcause::probability::{bottom, duplication};
use parcause::realisations::Realisation;
use parcause::structures::{validate_map, Consistency, Family, Kind, StructMap, Structure, StructureBuilder};
use parcause::Budget;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn budget() -> Budget {
    Budget::default()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- configurations

/// Consistency read straight off the stored data.
pub fn consistent(s: &Structure, x: EventSet) -> bool {
    match s.consistency() {
        Consistency::Conflicts(cs) => cs.iter().all(|c| !c.is_subset(x)),
        Consistency::Explicit(gs) => gs.iter().any(|g| x.is_subset(*g)),
    }
}

/// Some ordering of `x` in which every event is enabled by what precedes it.
fn securable(s: &Structure, x: EventSet, done: EventSet) -> bool {
    if done == x {
        return true;
    }
    x.difference(done).iter().any(|e| {
        let enabled = s.enablings().iter().any(|&(y, t)| t == e && y.is_subset(done));
        enabled && consistent(s, done.with(e)) && securable(s, x, done.with(e))
    })
}

/// Every subset of the events, filtered by the definition of configuration.
pub fn oracle_configs(s: &Structure) -> Vec<EventSet> {
    let n = s.len();
    assert!(n <= 12, "oracle is for small structures");
    let mut out = Vec::new();
    for bits in 0u128..(1 << n) {
        let x = EventSet::from_bits(bits);
        if !consistent(s, x) {
            continue;
        }
        let ok = if s.kind().is_prime_like() {
            x.iter().all(|e| (0..n).all(|d| !s.leq(d, e) || x.contains(d)))
        } else {
            securable(s, x, EventSet::EMPTY)
        };
        if ok {
            out.push(x);
        }
    }
    out.sort_by(EventSet::canonical_cmp);
    out
}

// ---------------------------------------------------------------- extremality

/// `order[a]` is the set of elements below `a`, reflexively.
fn is_realisation(order: &[EventSet], label: &[usize], f: &Family) -> bool {
    let k = order.len();
    (0u128..(1 << k)).map(EventSet::from_bits).all(|x| {
        let down_closed = x.iter().all(|a| order[a].is_subset(x));
        !down_closed || f.contains(x.iter().map(|a| label[a]).collect())
    })
}

fn is_partial_order(order: &[EventSet]) -> bool {
    let k = order.len();
    (0..k).all(|a| order[a].contains(a))
        && (0..k).all(|a| order[a].iter().all(|b| order[b].is_subset(order[a])))
        && (0..k).all(|a| order[a].iter().all(|b| b == a || !order[b].contains(a)))
}

fn partitions(items: &[usize], same: &dyn Fn(usize, usize) -> bool, out: &mut Vec<Vec<usize>>) {
    fn go(i: usize, items: &[usize], same: &dyn Fn(usize, usize) -> bool, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == items.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            let fits = (0..i).filter(|&j| cur[j] == b).all(|j| same(items[i], items[j]));
            if fits {
                cur.push(b);
                go(i + 1, items, same, cur, blocks.max(b + 1), out);
                cur.pop();
            }
        }
    }
    go(0, items, same, &mut Vec::new(), 0, out);
}

/// Tests every total map out of `r`: each label-respecting partition of the
/// carrier, with every admissible order on the blocks.
pub fn oracle_is_extremal(r: &Realisation, f: &Family) -> bool {
    let n = r.len();
    let label = r.labels();
    let down: Vec<EventSet> = (0..n).map(|e| r.down(e)).collect();
    let items: Vec<usize> = (0..n).collect();
    let mut parts = Vec::new();
    partitions(&items, &|a, b| label[a] == label[b], &mut parts);
    for block in parts {
        let k = block.iter().copied().max().map_or(0, |m| m + 1);
        let blabel: Vec<usize> = (0..k).map(|b| label[block.iter().position(|&x| x == b).unwrap()]).collect();
        let image = |x: EventSet| -> EventSet { x.iter().map(|e| block[e]).collect() };
        if k == n {
            // a bijection: only strictly weaker orders can fail to be isomorphisms
            for b in 0..n {
                for a in down[b].without(b) {
                    let covering = down[b].without(b).iter().all(|c| c == a || !down[c].contains(a));
                    if !covering {
                        continue;
                    }
                    let mut weaker: Vec<EventSet> = (0..n).map(|e| image(down[e])).collect();
                    weaker[block[b]].remove(block[a]);
                    if is_partial_order(&weaker) && is_realisation(&weaker, &blabel, f) {
                        return false;
                    }
                }
            }
            continue;
        }
        // the strongest relation under which images of down-sets stay down-sets
        let bound: Vec<EventSet> = (0..k)
            .map(|b| {
                (0..n)
                    .filter(|&e| block[e] == b)
                    .fold(EventSet::full(k), |acc, e| acc.intersection(image(down[e])))
            })
            .collect();
        if is_partial_order(&bound) {
            // fewer relations only add down-sets, so the bound is the best case
            if is_realisation(&bound, &blabel, f) {
                return false;
            }
            continue;
        }
        let strict: Vec<(usize, usize)> = (0..k).flat_map(|b| bound[b].without(b).iter().map(move |a| (a, b))).collect();
        assert!(strict.len() <= 16, "oracle bound too large");
        for mask in 0u32..(1 << strict.len()) {
            let mut order: Vec<EventSet> = (0..k).map(EventSet::singleton).collect();
            for (i, &(a, b)) in strict.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    order[b].insert(a);
                }
            }
            if is_partial_order(&order) && is_realisation(&order, &blabel, f) {
                return false;
            }
        }
    }
    true
}

/// Every realisation of `f` on at most `max` elements, one per labelled
/// order (not up to isomorphism).
pub fn all_small_realisations(f: &Family, max: usize) -> Vec<Realisation> {
    let mut out = Vec::new();
    for k in 0..=max {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|b| (0..k).filter(move |&a| a != b).map(move |a| (a, b))).collect();
        let mut orders: Vec<Vec<EventSet>> = Vec::new();
        for mask in 0u64..(1 << pairs.len()) {
            let mut order: Vec<EventSet> = (0..k).map(EventSet::singleton).collect();
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    order[b].insert(a);
                }
            }
            if is_partial_order(&order) {
                orders.push(order);
            }
        }
        let labels_count = f.len().pow(k as u32);
        for order in &orders {
            for mut code in 0..labels_count {
                let mut label = Vec::with_capacity(k);
                for _ in 0..k {
                    label.push(code % f.len());
                    code /= f.len();
                }
                if is_realisation(order, &label, f) {
                    let names = (0..k).map(|i| format!("r{i}")).collect();
                    let rel: Vec<(usize, usize)> = (0..k).flat_map(|b| order[b].without(b).iter().map(move |a| (a, b))).collect();
                    out.push(Realisation::new(names, &rel, label).unwrap());
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- generators

const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn pick_subset(rng: &mut StdRng, from: &[usize], max: usize) -> Vec<usize> {
    let size = rng.gen_range(1..=max.min(from.len()).max(1));
    let mut pool = from.to_vec();
    let mut out = Vec::new();
    while out.len() < size && !pool.is_empty() {
        let i = rng.gen_range(0..pool.len());
        out.push(pool.swap_remove(i));
    }
    out
}

/// A general event structure on `n` events with random enablings and
/// binary conflicts.
pub fn random_general(rng: &mut StdRng, n: usize) -> Structure {
    let mut b = StructureBuilder::new(Kind::General).events(&NAMES[..n]);
    for e in 0..n {
        let others: Vec<usize> = (0..n).filter(|&d| d != e).collect();
        if others.is_empty() || rng.gen_bool(0.35) {
            b = b.enable(&[], NAMES[e]);
        }
        if !others.is_empty() {
            for _ in 0..rng.gen_range(1..=2) {
                let set: Vec<&str> = pick_subset(rng, &others, 2).into_iter().map(|d| NAMES[d]).collect();
                b = b.enable(&set, NAMES[e]);
            }
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        if n >= 2 {
            let x = rng.gen_range(0..n);
            let y = (x + rng.gen_range(1..n)) % n;
            b = b.conflict(&[NAMES[x], NAMES[y]]);
        }
    }
    b.build().unwrap()
}

/// A prime-like structure of the given kind: a random order compatible with
/// the index order, binary conflicts, and (for ese/edc) a random equivalence.
pub fn random_prime_like(rng: &mut StdRng, n: usize, kind: Kind) -> Structure {
    let mut b = StructureBuilder::new(kind);
    for (e, name) in NAMES[..n].iter().enumerate() {
        let class = if matches!(kind, Kind::Ese | Kind::Edc) && rng.gen_bool(0.4) {
            Some(format!("k{}", rng.gen_range(0..2)))
        } else {
            None
        };
        let _ = e;
        b = b.full_event(name, None, class.as_deref());
    }
    let down = random_order(rng, n);
    for j in 0..n {
        for i in down[j].without(j) {
            b = b.cause(NAMES[i], NAMES[j]);
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        if let Some((x, y)) = random_conflict(rng, &down) {
            b = b.conflict(&[NAMES[x], NAMES[y]]);
        }
    }
    b.build().unwrap()
}

/// A random order compatible with the index order, as down-sets.
fn random_order(rng: &mut StdRng, n: usize) -> Vec<EventSet> {
    let mut down: Vec<EventSet> = (0..n).map(EventSet::singleton).collect();
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(0.3) {
                let d = down[i];
                down[j] = down[j].union(d);
            }
        }
    }
    down
}

/// Two events no down-set holds together, so their conflict keeps every
/// down-closure consistent.
fn random_conflict(rng: &mut StdRng, down: &[EventSet]) -> Option<(usize, usize)> {
    let n = down.len();
    if n < 2 {
        return None;
    }
    let x = rng.gen_range(0..n);
    let y = (x + rng.gen_range(1..n)) % n;
    let together = down.iter().any(|d| d.contains(x) && d.contains(y));
    (!together).then_some((x, y))
}

/// A prime game on at most `n` events.
pub fn random_game(rng: &mut StdRng, n: usize) -> Structure {
    let mut b = StructureBuilder::new(Kind::Prime);
    for name in &NAMES[..n] {
        b = if rng.gen_bool(0.5) { b.pos(name) } else { b.neg(name) };
    }
    let down = random_order(rng, n);
    for j in 0..n {
        for i in down[j].without(j) {
            b = b.cause(NAMES[i], NAMES[j]);
        }
    }
    if rng.gen_bool(0.4) {
        if let Some((x, y)) = random_conflict(rng, &down) {
            b = b.conflict(&[NAMES[x], NAMES[y]]);
        }
    }
    b.build().unwrap()
}

// ---------------------------------------------------------------- strategies

/// `σ ∥ τ : A ∥ C ⇸ B ∥ D`, with game events `0.i.a` / `1.i.b` for component `i`.
pub fn par_strategies(s: &Strategy, t: &Strategy, b: &Budget) -> Strategy {
    let (ss, ts) = (s.sides().unwrap(), t.sides().unwrap());
    let left = par(&ss.left, &ts.left).unwrap();
    let right = par(&ss.right, &ts.right).unwrap();
    let game = arena(&left, &right).unwrap();
    let inner = par(&s.inner, &t.inner).unwrap();
    let target = |i: usize, sides: &Sides, g: usize| -> usize {
        let (side, local) = sides.place[g];
        let comp = if side == 0 { &sides.left } else { &sides.right };
        game.id(&format!("{side}.{i}.{}", comp.name(local))).unwrap()
    };
    let mapping = (0..inner.len())
        .map(|e| {
            let n = inner.name(e);
            let (i, rest) = (n[..1].parse::<usize>().unwrap(), &n[2..]);
            Some(if i == 0 {
                target(0, &ss, s.apply(s.inner.id(rest).unwrap()))
            } else {
                target(1, &ts, t.apply(t.inner.id(rest).unwrap()))
            })
        })
        .collect();
    Strategy::new(StructMap::new(inner, game, mapping).unwrap(), b).unwrap()
}

/// The same strategy over a game whose events are renamed by `rename`;
/// `rename` must give an isomorphic game.
pub fn retag(s: &Strategy, rename: impl Fn(&str) -> String, b: &Budget) -> Strategy {
    let game = s.game.renamed(|_, n| rename(n)).unwrap();
    let mapping = (0..s.inner.len())
        .map(|e| Some(game.id(&rename(s.game.name(s.apply(e)))).unwrap()))
        .collect();
    Strategy::new(StructMap::new(s.inner.clone(), game, mapping).unwrap(), b).unwrap()
}

/// `A⊥` of a game, for building arenas by hand.
pub fn opp(a: &Structure) -> Structure {
    dual(a).unwrap()
}

// ---------------------------------------------------------------- duplication

/// Moves `1.<i>.x` of a right side built as nested pairs to the flat `1.<k>.x`.
pub fn flatten<'a>(nested: &'a [(&'a str, &'a str)]) -> impl Fn(&str) -> String + 'a {
    move |n: &str| {
        for (from, to) in nested {
            if let Some(rest) = n.strip_prefix(from) {
                return format!("{to}{rest}");
            }
        }
        n.to_string()
    }
}

/// Some 2-cell `s ⇒ t`: a map of event structures over the game.
/// Backtracks over images with the same move whose history fits.
pub fn find_two_cell(s: &Strategy, t: &Strategy) -> Option<StructMap> {
    assert_eq!(s.game, t.game);
    let hist = |st: &Strategy, e: usize| -> EventSet { st.inner.down(e).iter().map(|d| st.apply(d)).collect() };
    let mut order: Vec<usize> = (0..s.inner.len()).collect();
    order.sort_by_key(|&e| s.inner.down(e).len());
    let cands: Vec<Vec<usize>> = (0..s.inner.len())
        .map(|e| {
            let mine = hist(s, e);
            (0..t.inner.len())
                .filter(|&c| t.apply(c) == s.apply(e) && hist(t, c).is_subset(mine))
                .collect()
        })
        .collect();
    fn go(
        k: usize,
        order: &[usize],
        cands: &[Vec<usize>],
        s: &Strategy,
        t: &Strategy,
        img: &mut Vec<Option<usize>>,
    ) -> Option<StructMap> {
        if k == order.len() {
            let f = StructMap::new(s.inner.clone(), t.inner.clone(), img.clone()).ok()?;
            return validate_map(&f, &budget()).unwrap().is_valid().then_some(f);
        }
        let e = order[k];
        for &c in &cands[e] {
            img[e] = Some(c);
            // the image of a history is a configuration
            let under = s.inner.down(e);
            let fx: EventSet = under.iter().map(|d| img[d].unwrap()).collect();
            if fx.len() == under.len() && t.inner.is_down_closed(fx) && t.inner.is_consistent(fx) {
                if let Some(f) = go(k + 1, order, cands, s, t, img) {
                    return Some(f);
                }
            }
        }
        img[e] = None;
        None
    }
    go(0, &order, &cands, s, t, &mut vec![None; s.inner.len()])
}

pub struct Coassociativity {
    pub iso: bool,
    pub two_cells: bool,
}

/// `(δ ∥ id) ⊙ δ` against `(id ∥ δ) ⊙ δ`, both over `A ⇸ A ∥ A ∥ A`.
pub fn coassociativity(a: &Structure, b: &Budget) -> Coassociativity {
    let delta = duplication(a, b).unwrap();
    let id = copycat(a, b).unwrap();
    let lhs = compose(&delta, &par_strategies(&delta, &id, b), b).unwrap();
    let rhs = compose(&delta, &par_strategies(&id, &delta, b), b).unwrap();
    let lhs = retag(&lhs, flatten(&[("1.0.0.", "1.0."), ("1.0.1.", "1.1."), ("1.1.", "1.2.")]), b);
    let rhs = retag(&rhs, flatten(&[("1.0.", "1.0."), ("1.1.0.", "1.1."), ("1.1.1.", "1.2.")]), b);
    Coassociativity {
        iso: find_strategy_iso(&lhs, &rhs, b).unwrap().is_some(),
        two_cells: find_two_cell(&lhs, &rhs).is_some() && find_two_cell(&rhs, &lhs).is_some(),
    }
}

/// `(⊥ ∥ id) ⊙ δ ≅ id ≅ (id ∥ ⊥) ⊙ δ` with `⊥ : A ⇸ ∅`.
pub fn counit_laws(a: &Structure, b: &Budget) -> bool {
    let delta = duplication(a, b).unwrap();
    let id = copycat(a, b).unwrap();
    let eps = bottom(&arena(a, &Structure::empty(Kind::Prime)).unwrap(), b).unwrap();
    let left = compose(&delta, &par_strategies(&eps, &id, b), b).unwrap();
    let left = retag(&left, flatten(&[("1.1.", "1.")]), b);
    let right = compose(&delta, &par_strategies(&id, &eps, b), b).unwrap();
    let right = retag(&right, flatten(&[("1.0.", "1.")]), b);
    find_strategy_iso(&left, &id, b).unwrap().is_some() && find_strategy_iso(&right, &id, b).unwrap().is_some()
}

// ---------------------------------------------------------------- pullbacks

/// The edc pullback `P` of the counterexample and the bipullback from the
/// family pullback, each with its two legs.
pub fn pullback_candidates(b: &Budget) -> Vec<(&'static str, StructMap, StructMap)> {
    use parcause::fixtures::*;
    use parcause::games::{pseudo_pullback_ef, pullback_edc};
    use parcause::realisations::er_family;
    use parcause::structures::family_of;
    let p = pullback_edc(&appb_f(), &appb_g(), b).unwrap();
    let (fa, fb, fc) = (
        family_of(&appb_a(), b).unwrap(),
        family_of(&appb_b(), b).unwrap(),
        family_of(&appb_c(), b).unwrap(),
    );
    let fm: Vec<usize> = appb_f().mapping.iter().map(|m| m.unwrap()).collect();
    let gm: Vec<usize> = appb_g().mapping.iter().map(|m| m.unwrap()).collect();
    let ef = pseudo_pullback_ef(&fa, &fm, &fb, &gm, &fc, b).unwrap();
    let e = er_family(&ef.family, b).unwrap();
    let leg = |proj: &[usize], target: Structure| {
        StructMap::new(e.structure.clone(), target, e.tops.iter().map(|&t| Some(proj[t])).collect()).unwrap()
    };
    vec![
        ("P", p.proj1, p.proj2),
        ("bipullback", leg(&ef.proj1, appb_a()), leg(&ef.proj2, appb_b())),
    ]
}

// ---------------------------------------------------------------- agreement

/// Compares the optimised paths with the oracles on one structure: the
/// configurations, the extremality of every enumerated extremal, the
/// extremality verdict on every realisation with at most `small` elements,
/// and completeness of the enumeration on those.
pub fn oracle_agreement(s: &Structure, small: usize) -> Result<(), String> {
    use parcause::realisations::enumerate_extremals;
    use parcause::structures::family_of;
    let b = budget();
    let fast = s.all_configs(&b).map_err(|e| e.to_string())?;
    let slow = oracle_configs(s);
    if fast != slow {
        return Err(format!("configurations differ: {} vs {}", fast.len(), slow.len()));
    }
    let f = family_of(s, &b).map_err(|e| e.to_string())?;
    let ext = enumerate_extremals(&f, s.len(), &b).map_err(|e| e.to_string())?;
    for r in &ext {
        if !oracle_is_extremal(r, &f) {
            return Err(format!("enumerated realisation is not extremal: {r:?}"));
        }
    }
    for r in all_small_realisations(&f, small) {
        let fast = r.is_extremal(&f, &b).map_err(|e| e.to_string())?;
        let slow = oracle_is_extremal(&r, &f);
        if fast != slow {
            return Err(format!("is_extremal says {fast}, oracle says {slow} on {r:?}"));
        }
        if slow {
            let mut found = false;
            for e in &ext {
                if e.is_isomorphic(&r, &b).map_err(|e| e.to_string())? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(format!("extremal missing from the enumeration: {r:?}"));
            }
        }
    }
    Ok(())
}
