mod common;

use std::collections::HashMap;

use common::*;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use parcause::eventset::EventSet;
use parcause::fixtures::*;
use parcause::games::*;
use parcause::probability::*;
use parcause::structures::*;
use parcause::{Budget, Structure as S};
use proptest::prelude::{any, prop_assert_eq, proptest, ProptestConfig};

fn q(n: i64, d: i64) -> BigRational {
    ratio(n, d)
}

fn prob(strategy: Strategy, b: &Budget) -> ProbStrategy {
    let valuation = Valuation::constant_one(&strategy.inner, b).unwrap();
    ProbStrategy { strategy, valuation }
}

fn strat(inner: S, game: S, pairs: &[(&str, &str)]) -> Strategy {
    let pairs: Vec<(&str, Option<&str>)> = pairs.iter().map(|(a, b)| (*a, Some(*b))).collect();
    Strategy::new(StructMap::from_names(inner, game, &pairs).unwrap(), &budget()).unwrap()
}

fn set(s: &S, ids: &[&str]) -> EventSet {
    s.set_of(ids).unwrap()
}

fn valid(s: &S, v: &Valuation) -> bool {
    validate_valuation(s, v, &budget()).unwrap().is_valid()
}

// ---------------------------------------------------------------- drop

#[test]
fn drop_base_cases() {
    let s = intro_strat();
    let v = intro_val_good();
    let y = set(&s, &["1"]);
    let x = set(&s, &["1", "w1"]);
    assert_eq!(drop(&s, &v, y, &[]).unwrap(), q(1, 1));
    assert_eq!(drop(&s, &v, y, &[x]).unwrap(), q(1, 2));
}

#[test]
fn drop_of_the_introductory_valuation() {
    let s = intro_strat();
    let y = set(&s, &["1", "2"]);
    let xs = [set(&s, &["1", "2", "w1"]), set(&s, &["1", "2", "w2"])];
    for (p1, p2, qq) in [(q(1, 2), q(1, 2), q(1, 4)), (q(7, 10), q(7, 10), q(3, 10)), (q(1, 1), q(1, 1), q(1, 1)), (q(1, 3), q(2, 5), q(0, 1))] {
        let v = intro_valuation(p1.clone(), p2.clone(), qq.clone());
        let d = drop(&s, &v, y, &xs).unwrap();
        assert_eq!(d, BigRational::one() - &p1 - &p2 + &qq);
        assert_eq!(!d.is_negative(), &p1 + &p2 - &qq <= BigRational::one());
    }
}

#[test]
fn validating_the_introductory_valuations() {
    let b = budget();
    let s = intro_strat();
    assert!(valid(&s, &Valuation::constant_one(&s, &b).unwrap()));
    assert!(valid(&s, &intro_val_sure()));
    assert!(valid(&s, &intro_val_good()));
    let r = validate_valuation(&s, &intro_val_bad(), &b).unwrap();
    let v: Vec<_> = r.violations_of("positive-drop").collect();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].detail, "drop is -1/10");
    assert_eq!(r.violations.len(), 1);
}

#[test]
fn malformed_valuations_are_flagged() {
    let b = budget();
    let s = intro_strat();
    let mut t: HashMap<EventSet, BigRational> = intro_val_good().table().into_iter().collect();
    t.insert(EventSet::EMPTY, q(1, 2));
    t.insert(set(&s, &["1"]), q(3, 2));
    t.insert(set(&s, &["2"]), q(1, 3));
    let v = Valuation::new(&s, t, &b).unwrap();
    let r = validate_valuation(&s, &v, &b).unwrap();
    assert!(r.violated("normalization"));
    assert!(r.violated("unit-interval"));
    assert!(r.violated("lmc"));
}

#[test]
fn conditional_probabilities() {
    let s = intro_strat();
    let v = intro_val_good();
    let one = set(&s, &["1"]);
    let onew = set(&s, &["1", "w1"]);
    assert_eq!(conditional(&v, one, one).unwrap(), q(1, 1));
    assert_eq!(conditional(&v, one, onew).unwrap(), q(1, 2));
    let v = intro_valuation(q(1, 3), q(1, 2), q(1, 6));
    let (x, y, z) = (set(&s, &["1"]), set(&s, &["1", "2", "w1"]), set(&s, &["1", "2", "w1", "w2"]));
    assert_eq!(
        conditional(&v, x, z).unwrap(),
        conditional(&v, y, z).unwrap() * conditional(&v, x, y).unwrap()
    );
    let zero = intro_valuation(q(0, 1), q(1, 2), q(0, 1));
    assert!(matches!(conditional(&zero, onew, set(&s, &["1", "2", "w1"])), Err(parcause::Error::Undefined(_))));
}

#[test]
fn lmc_holds_multiplicatively_on_valid_valuations() {
    let b = budget();
    let s = intro_strat();
    for v in [intro_val_good(), intro_val_sure(), intro_valuation(q(1, 3), q(2, 3), q(2, 9))] {
        let r = validate_valuation(&s, &v, &b).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.property("LMC"), Some(true));
    }
}

/// The drop condition read directly: every finite family above `y`, not
/// only antichains.
fn oracle_valid(s: &S, v: &Valuation) -> bool {
    let b = budget();
    let cs = s.all_configs(&b).unwrap();
    if !v.get(EventSet::EMPTY).unwrap().is_one() {
        return false;
    }
    if cs.iter().any(|x| v.get(*x).unwrap().is_negative() || *v.get(*x).unwrap() > BigRational::one()) {
        return false;
    }
    for &y in &cs {
        let ups: Vec<EventSet> = cs.iter().copied().filter(|x| *x != y && y.is_subset(*x)).collect();
        for mask in 1u32..(1 << ups.len()) {
            let mut d = v.get(y).unwrap().clone();
            for sub in 1u32..=mask {
                if sub & !mask != 0 {
                    continue;
                }
                let u = (0..ups.len()).filter(|i| sub & (1 << i) != 0).fold(EventSet::EMPTY, |u, i| u.union(ups[i]));
                if !cs.contains(&u) {
                    continue;
                }
                if sub.count_ones() % 2 == 1 {
                    d -= v.get(u).unwrap();
                } else {
                    d += v.get(u).unwrap();
                }
            }
            if d.is_negative() {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn validation_agrees_with_the_definition_on_player_structures(seed in any::<u64>(), n in 0usize..=4) {
        use rand::Rng;
        let b = budget();
        let mut r = rng(seed);
        let s = random_prime_like(&mut r, n, Kind::Prime).with_polarity(Some(vec![Polarity::Plus; n])).unwrap();
        let values: HashMap<EventSet, BigRational> = s
            .all_configs(&b)
            .unwrap()
            .into_iter()
            .map(|x| {
                let v = if x.is_empty() { q(1, 1) } else { q(r.gen_range(0..=4), 4) };
                (x, v)
            })
            .collect();
        let v = Valuation::new(&s, values, &b).unwrap();
        prop_assert_eq!(valid(&s, &v), oracle_valid(&s, &v));
    }
}

// ---------------------------------------------------------------- composition

#[test]
fn composing_with_copycat_keeps_the_valuation() {
    let b = budget();
    let s = intro_strategy();
    let sp = ProbStrategy { strategy: s.clone(), valuation: intro_val_good() };
    let cc = prob(copycat(&intro_game(), &b).unwrap(), &b);
    let c = compose_valuations(&sp, &cc, &b).unwrap();
    assert!(valid(&c.strategy.inner, &c.valuation));
    let iso = find_strategy_iso(&c.strategy, &s, &b).unwrap().unwrap();
    let moved = transport(&iso, &c.valuation, &b).unwrap();
    assert_eq!(moved, intro_val_good());
}

#[test]
fn deterministic_composites_stay_deterministic() {
    let b = budget();
    let n = neg_then_pos();
    let a = prob(answer_strategy(), &b);
    let cc = prob(copycat(&n, &b).unwrap(), &b);
    let c = compose_valuations(&a, &cc, &b).unwrap();
    assert_eq!(c.valuation, Valuation::constant_one(&c.strategy.inner, &b).unwrap());
}

#[test]
fn a_hidden_response_carries_its_probability() {
    let b = budget();
    // against the introductory strategy: play 1, and once w is seen play a
    let game = arena(&intro_game(), &single_pos()).unwrap();
    let inner = S::builder(Kind::Edc).pos("0.1").neg("0.w").pos("1.a").cause("0.w", "1.a").build().unwrap();
    let tau = prob(strat(inner, game, &[("0.1", "0.1"), ("0.w", "0.w"), ("1.a", "1.a")]), &b);
    let sp = ProbStrategy { strategy: intro_strategy(), valuation: intro_val_good() };
    let c = compose_valuations(&sp, &tau, &b).unwrap();
    let s = &c.strategy.inner;
    assert_eq!(s.len(), 1);
    assert_eq!(c.valuation.get(s.all()).unwrap(), &q(1, 2));
    assert!(valid(s, &c.valuation));
}

#[test]
fn composites_of_fixture_pairs_are_valuations() {
    let b = budget();
    let pairs: Vec<(ProbStrategy, ProbStrategy)> = vec![
        (
            ProbStrategy { strategy: intro_strategy(), valuation: intro_val_good() },
            prob(copycat(&intro_game(), &b).unwrap(), &b),
        ),
        (
            ProbStrategy { strategy: intro_strategy(), valuation: intro_valuation(q(1, 3), q(2, 3), q(1, 9)) },
            prob(copycat(&intro_game(), &b).unwrap(), &b),
        ),
        (prob(copycat(&single_pos(), &b).unwrap(), &b), prob(duplication(&single_pos(), &b).unwrap(), &b)),
        (prob(answer_strategy(), &b), prob(copycat(&neg_then_pos(), &b).unwrap(), &b)),
    ];
    for (sp, tp) in &pairs {
        let c = compose_valuations(sp, tp, &b).unwrap();
        assert!(valid(&c.strategy.inner, &c.valuation));
    }
}

// ---------------------------------------------------------------- 2-cells

#[test]
fn push_forward_along_the_identity() {
    let b = budget();
    let s = intro_strat();
    let v = intro_val_good();
    assert_eq!(push_forward(&StructMap::identity(&s), &v, &b).unwrap(), v);
    let e = S::empty(Kind::Edc);
    let pushed = push_forward(&StructMap::identity(&e), &Valuation::constant_one(&e, &b).unwrap(), &b).unwrap();
    assert!(pushed.get(EventSet::EMPTY).unwrap().is_one());
}

#[test]
fn push_forward_merges_equivalent_causes() {
    let b = budget();
    let game = single_pos();
    let src = S::builder(Kind::Edc)
        .pos("w1")
        .pos("w2")
        .class("w", &["w1", "w2"])
        .conflict(&["w1", "w2"])
        .build()
        .unwrap();
    let tgt = S::builder(Kind::Edc).pos("w").build().unwrap();
    let sigma = strat(src.clone(), game.clone(), &[("w1", "a"), ("w2", "a")]);
    let sigma2 = strat(tgt.clone(), game, &[("w", "a")]);
    let f = StructMap::from_names(src.clone(), tgt.clone(), &[("w1", Some("w")), ("w2", Some("w"))]).unwrap();
    assert!(f.is_rigid());
    assert!(validate_map(&f, &b).unwrap().is_valid());
    let v: HashMap<_, _> = [
        (EventSet::EMPTY, q(1, 1)),
        (set(&src, &["w1"]), q(1, 2)),
        (set(&src, &["w2"]), q(1, 4)),
    ]
    .into_iter()
    .collect();
    let v = Valuation::new(&src, v, &b).unwrap();
    assert!(valid(&src, &v));
    let pushed = push_forward(&f, &v, &b).unwrap();
    assert_eq!(pushed.get(set(&tgt, &["w"])).unwrap(), &q(3, 4));
    assert!(valid(&tgt, &pushed));
    assert!(is_2cell(&f, &sigma, &sigma2, &v, &Valuation::constant_one(&tgt, &b).unwrap(), &b).unwrap());
}

#[test]
fn push_forward_along_a_rigid_embedding() {
    let b = budget();
    let s = intro_strat();
    let part = S::builder(Kind::Edc).neg("1").neg("2").pos("w1").cause("1", "w1").build().unwrap();
    let f = StructMap::from_names(part.clone(), s.clone(), &[("1", Some("1")), ("2", Some("2")), ("w1", Some("w1"))]).unwrap();
    assert!(f.is_rigid());
    let v: HashMap<_, _> = part
        .all_configs(&b)
        .unwrap()
        .into_iter()
        .map(|x| (x, if x.contains(part.id("w1").unwrap()) { q(1, 2) } else { q(1, 1) }))
        .collect();
    let v = Valuation::new(&part, v, &b).unwrap();
    assert!(valid(&part, &v));
    let pushed = push_forward(&f, &v, &b).unwrap();
    assert!(valid(&s, &pushed));
    assert!(pushed.get(set(&s, &["2", "w2"])).unwrap().is_zero());
    let sub = strat(part, intro_game(), &[("1", "1"), ("2", "2"), ("w1", "w")]);
    assert!(is_2cell(&f, &sub, &intro_strategy(), &v, &intro_val_good(), &b).unwrap());
    assert!(!is_2cell(&f, &sub, &intro_strategy(), &Valuation::constant_one(&sub.inner, &b).unwrap(), &intro_val_good(), &b).unwrap());
}

// ---------------------------------------------------------------- sums and conjunction

#[test]
fn sums_of_probabilistic_strategies() {
    let b = budget();
    let sp = ProbStrategy { strategy: intro_strategy(), valuation: intro_val_good() };
    let one = prob_sum(&intro_game(), &[sp.clone()], &[q(1, 1)], &b).unwrap();
    let iso = find_strategy_iso(&one.strategy, &sp.strategy, &b).unwrap().unwrap();
    assert_eq!(transport(&iso, &one.valuation, &b).unwrap(), sp.valuation);

    let none = prob_sum(&intro_game(), &[], &[], &b).unwrap();
    let bot = bottom(&intro_game(), &b).unwrap();
    assert!(find_strategy_iso(&none.strategy, &bot, &b).unwrap().is_some());
    assert_eq!(bot.inner.len(), 2);
    assert!(check_strategy(&bot, &b).unwrap().is_valid());

    let a = prob(strat(S::builder(Kind::Edc).pos("a").build().unwrap(), single_pos(), &[("a", "a")]), &b);
    let two = prob_sum(&single_pos(), &[a.clone(), a], &[q(1, 2), q(1, 2)], &b).unwrap();
    let s = &two.strategy.inner;
    assert_eq!(s.len(), 2);
    for e in 0..2 {
        assert_eq!(two.valuation.get(EventSet::singleton(e)).unwrap(), &q(1, 2));
    }
    assert!(!s.is_consistent(s.all()));
    assert!(valid(s, &two.valuation));
    assert!(check_strategy(&two.strategy, &b).unwrap().is_valid());
}

#[test]
fn conjunctions() {
    let b = budget();
    for s in [answer_strategy(), copycat(&neg_then_pos(), &b).unwrap(), copycat(&intro_game(), &b).unwrap()] {
        let c = conjunction(&s, &s, &b).unwrap();
        assert!(find_strategy_iso(&c, &s, &b).unwrap().is_some());
    }
    // two parallel causes over one move pair up across the copies
    let s = intro_strategy();
    let c = conjunction(&s, &s, &b).unwrap();
    assert_eq!(c.inner.len(), 6);
    assert!(check_strategy(&c, &b).unwrap().is_valid());
    let diagonal: Vec<(String, Option<String>)> = (0..s.inner.len())
        .map(|e| {
            let n = s.inner.name(e);
            let d = c.inner.names().iter().find(|m| m.ends_with(&format!(":{n}|{n}"))).unwrap();
            (n.to_string(), Some(d.clone()))
        })
        .collect();
    let refs: Vec<(&str, Option<&str>)> = diagonal.iter().map(|(a, b)| (a.as_str(), b.as_deref())).collect();
    let diag = StructMap::from_names(s.inner.clone(), c.inner.clone(), &refs).unwrap();
    assert!(diag.is_rigid());
    assert!(validate_map(&diag, &b).unwrap().is_valid());
    // two answers to different Opponent moves
    let game = S::builder(Kind::Prime).neg("n1").neg("n2").pos("p1").pos("p2").cause("n1", "p1").cause("n2", "p2").build().unwrap();
    let left = S::builder(Kind::Edc).neg("n1").neg("n2").pos("p1").cause("n1", "p1").build().unwrap();
    let right = S::builder(Kind::Edc).neg("n1").neg("n2").pos("p2").cause("n2", "p2").build().unwrap();
    let s1 = strat(left, game.clone(), &[("n1", "n1"), ("n2", "n2"), ("p1", "p1")]);
    let s2 = strat(right, game.clone(), &[("n1", "n1"), ("n2", "n2"), ("p2", "p2")]);
    let c = conjunction(&s1, &s2, &b).unwrap();
    let images = |s: &Strategy| -> Vec<EventSet> {
        let mut v: Vec<EventSet> = s.inner.all_configs(&b).unwrap().into_iter().map(|x| s.sigma.image(x)).collect();
        v.sort_by(EventSet::canonical_cmp);
        v.dedup();
        v
    };
    let (i1, i2) = (images(&s1), images(&s2));
    let both: Vec<EventSet> = i1.iter().copied().filter(|x| i2.contains(x)).collect();
    assert_eq!(images(&c), both);
    assert_eq!(c.inner.len(), 2);
}

// ---------------------------------------------------------------- duplication

#[test]
fn duplication_shapes() {
    let b = budget();
    let p = duplication(&single_pos(), &b).unwrap();
    assert_eq!(p.inner.len(), 3);
    assert!(p.inner.has_trivial_equivalence());
    let n = duplication(&single_neg(), &b).unwrap();
    assert_eq!(n.inner.len(), 4);
    assert!(!n.inner.has_trivial_equivalence());
    assert!(check_strategy(&n, &b).unwrap().is_valid());
    let e = duplication(&S::empty(Kind::Prime), &b).unwrap();
    assert!(e.inner.is_empty());
    assert!(duplication(&race_game(), &b).is_err());
}

#[test]
fn duplication_is_deterministic_when_opponent_is() {
    let b = budget();
    let mut checked = 0;
    let mut games: Vec<S> = games().into_iter().map(|g| g.1).collect();
    let mut r = rng(7);
    for n in 0..=3 {
        for _ in 0..6 {
            games.push(random_game(&mut r, n));
        }
    }
    for a in games.iter().filter(|a| a.len() <= 3) {
        if !is_race_free(a, &b).unwrap() {
            continue;
        }
        let d = duplication(a, &b).unwrap();
        assert_eq!(is_deterministic(&d.inner, &b).unwrap(), deterministic_for_opponent(a, &b).unwrap());
        checked += 1;
    }
    assert!(checked >= 4);
}

#[test]
fn duplication_is_coassociative_and_counital() {
    let b = budget();
    for (a, strict) in [(single_pos(), true), (single_neg(), true), (pos_then_neg(), true), (neg_then_pos(), false)] {
        let law = coassociativity(&a, &b);
        assert_eq!(law.iso, strict, "{:?}", a.names());
        // events over one move are equivalent, so 2-cells both ways make the
        // two composites equivalent
        assert!(law.two_cells, "{:?}", a.names());
        assert!(counit_laws(&a, &b), "{:?}", a.names());
    }
}
