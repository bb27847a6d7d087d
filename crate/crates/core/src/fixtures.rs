//! The worked examples used throughout the tests, the acceptance suite and
//! the fixture corpus on disk.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::One;

use crate::budget::Budget;
use crate::games::{copycat, Strategy};
use crate::io;
use crate::probability::{duplication, ratio, Valuation};
use crate::realisations::Realisation;
use crate::structures::{family_of, Family, Kind, StructMap, Structure};
use crate::Result;

/// A fixture value together with its on-disk kind.
#[derive(Debug, Clone)]
pub enum Fixture {
    Structure(Structure),
    Map(StructMap),
    Strategy(Strategy),
    Family(Family),
    /// A valuation over the inner structure of the named strategy fixture.
    Valuation(&'static str, Structure, Valuation),
}

impl Fixture {
    /// The canonical file contents.
    pub fn to_json(&self) -> String {
        match self {
            Fixture::Structure(s) => io::write_structure(s),
            Fixture::Map(f) => io::write_map(f),
            Fixture::Strategy(s) => io::write_strategy(s),
            Fixture::Family(f) => io::write_family(f),
            Fixture::Valuation(_, s, v) => io::write_valuation(s, v),
        }
    }

    /// Parses `text` as a file of the same kind and writes it back.
    pub fn reserialise(&self, text: &str, budget: &Budget) -> Result<String> {
        let here = std::path::Path::new(".");
        Ok(match self {
            Fixture::Structure(_) => io::write_structure(&io::parse_structure(text)?),
            Fixture::Map(_) => io::write_map(&io::parse_map(text, here)?),
            Fixture::Strategy(_) => io::write_strategy(&io::parse_strategy(text, here, budget)?),
            Fixture::Family(_) => io::write_family(&io::parse_family(text)?),
            Fixture::Valuation(_, s, _) => io::write_valuation(s, &io::parse_valuation(text, s, budget)?),
        })
    }
}

fn build(b: crate::structures::StructureBuilder) -> Structure {
    b.build().expect("fixture structures are well formed")
}

fn by_letter(source: &Structure, target: &Structure) -> StructMap {
    let pairs: Vec<(String, Option<String>)> = source
        .names()
        .iter()
        .map(|n| {
            let letter: String = n.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
            (n.clone(), Some(letter))
        })
        .collect();
    let refs: Vec<(&str, Option<&str>)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_deref())).collect();
    StructMap::from_names(source.clone(), target.clone(), &refs).expect("lettering map")
}

// ---------------------------------------------------------------- introduction

/// Two Opponent moves and one Player move, all independent.
pub fn intro_game() -> Structure {
    build(Structure::builder(Kind::Prime).neg("1").neg("2").pos("w"))
}

/// Each watcher answers its own Opponent move; the two answers are parallel
/// causes of one move.
pub fn intro_strat() -> Structure {
    build(
        Structure::builder(Kind::Edc)
            .neg("1")
            .neg("2")
            .pos("w1")
            .pos("w2")
            .class("w", &["w1", "w2"])
            .cause("1", "w1")
            .cause("2", "w2"),
    )
}

pub fn intro_strategy() -> Strategy {
    let f = StructMap::from_names(
        intro_strat(),
        intro_game(),
        &[("1", Some("1")), ("2", Some("2")), ("w1", Some("w")), ("w2", Some("w"))],
    )
    .expect("intro map");
    Strategy::new(f, &Budget::default()).expect("intro strategy")
}

/// The prime rendering: the two watchers conflict.
pub fn intro_prime() -> Structure {
    build(
        Structure::builder(Kind::Prime)
            .neg("1")
            .neg("2")
            .pos("w1")
            .pos("w2")
            .cause("1", "w1")
            .cause("2", "w2")
            .conflict(&["w1", "w2"]),
    )
}

/// The general rendering: either Opponent move enables the Player move.
pub fn intro_general() -> Structure {
    build(
        Structure::builder(Kind::General)
            .neg("1")
            .neg("2")
            .pos("w")
            .enable(&[], "1")
            .enable(&[], "2")
            .enable(&["1"], "w")
            .enable(&["2"], "w"),
    )
}

/// The valuation giving the watchers `p1`, `p2` alone and `q` jointly.
pub fn intro_valuation(p1: BigRational, p2: BigRational, q: BigRational) -> Valuation {
    let s = intro_strat();
    let (w1, w2) = (s.id("w1").unwrap(), s.id("w2").unwrap());
    let b = Budget::default();
    let values: HashMap<_, _> = s
        .all_configs(&b)
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
    Valuation::new(&s, values, &b).unwrap()
}

pub fn intro_val_good() -> Valuation {
    intro_valuation(ratio(1, 2), ratio(1, 2), ratio(1, 4))
}

pub fn intro_val_sure() -> Valuation {
    intro_valuation(ratio(1, 1), ratio(1, 1), ratio(1, 1))
}

pub fn intro_val_bad() -> Valuation {
    intro_valuation(ratio(7, 10), ratio(7, 10), ratio(3, 10))
}

// ---------------------------------------------------------------- hiding

/// `b,c ⊢ e` and `d ⊢ e`, with `a` and `b` in conflict.
pub fn hide_cex() -> Structure {
    build(
        Structure::builder(Kind::General)
            .events(&["a", "b", "c", "d", "e"])
            .enable(&[], "a")
            .enable(&[], "b")
            .enable(&[], "c")
            .enable(&[], "d")
            .enable(&["b", "c"], "e")
            .enable(&["d"], "e")
            .conflict(&["a", "b"]),
    )
}

/// The configurations of [`hide_cex`] with `b` removed.
pub fn hide_cex_hidden() -> Family {
    let g = hide_cex();
    let f = family_of(&g, &Budget::default()).unwrap();
    let b = g.id("b").unwrap();
    let keep: Vec<usize> = (0..g.len()).filter(|&e| e != b).collect();
    let names: Vec<String> = keep.iter().map(|&e| g.name(e).to_string()).collect();
    let mut configs: Vec<_> = f
        .configs()
        .iter()
        .map(|x| x.without(b).iter().map(|e| keep.iter().position(|&k| k == e).unwrap()).collect())
        .collect();
    configs.sort_by(crate::EventSet::canonical_cmp);
    configs.dedup();
    Family::new(names.clone(), names, None, configs).unwrap()
}

// ---------------------------------------------------------------- realisations

/// `c` is enabled by `a` or by `b`; `d` needs all of `a`, `b`, `c`.
pub fn ex1() -> Structure {
    build(
        Structure::builder(Kind::General)
            .events(&["a", "b", "c", "d"])
            .enable(&[], "a")
            .enable(&[], "b")
            .enable(&["a"], "c")
            .enable(&["b"], "c")
            .enable(&["a", "b", "c"], "d"),
    )
}

/// `c` is enabled by `a` or by `b`; `d` needs `b` and `c`.
pub fn ex2() -> Structure {
    build(
        Structure::builder(Kind::General)
            .events(&["a", "b", "c", "d"])
            .enable(&[], "a")
            .enable(&[], "b")
            .enable(&["a"], "c")
            .enable(&["b"], "c")
            .enable(&["b", "c"], "d"),
    )
}

/// `c` is enabled by `a` or by `b`; `d` and `e` need `c`; `f` needs both.
pub fn ex3() -> Structure {
    build(
        Structure::builder(Kind::General)
            .events(&["a", "b", "c", "d", "e", "f"])
            .enable(&[], "a")
            .enable(&[], "b")
            .enable(&["a"], "c")
            .enable(&["b"], "c")
            .enable(&["c"], "d")
            .enable(&["c"], "e")
            .enable(&["d", "e"], "f"),
    )
}

fn realisation(f: &Family, elems: &[(&str, &str)], order: &[(&str, &str)]) -> Realisation {
    let names: Vec<String> = elems.iter().map(|(n, _)| n.to_string()).collect();
    let pos = |n: &str| names.iter().position(|m| m == n).unwrap();
    let label = elems.iter().map(|(_, l)| f.index_of(l).unwrap()).collect();
    let order: Vec<(usize, usize)> = order.iter().map(|(a, b)| (pos(a), pos(b))).collect();
    Realisation::new(names, &order, label).unwrap()
}

/// `d` enabled by `b` and by `c`, itself enabled by `a`.
pub fn ex2_extremal(f: &Family) -> Realisation {
    realisation(
        f,
        &[("a", "a"), ("b", "b"), ("c1", "c"), ("d", "d")],
        &[("a", "c1"), ("c1", "d"), ("b", "d")],
    )
}

/// `f` above `d` and `e`, which sit over the two ways of enabling `c`.
pub fn ex3_extremal(f: &Family) -> Realisation {
    realisation(
        f,
        &[("a", "a"), ("b", "b"), ("c1", "c"), ("c2", "c"), ("d1", "d"), ("e1", "e"), ("f", "f")],
        &[("a", "c1"), ("b", "c2"), ("c1", "d1"), ("c2", "e1"), ("d1", "f"), ("e1", "f")],
    )
}

/// The seven-event order of the third example as an ese: `f` depends on
/// both parallel causes of `c`.
pub fn ex3_left() -> Structure {
    build(
        Structure::builder(Kind::Ese)
            .events(&["a", "b", "c1", "c2", "d1", "e1", "f"])
            .class("c", &["c1", "c2"])
            .cause("a", "c1")
            .cause("b", "c2")
            .cause("c1", "d1")
            .cause("c2", "e1")
            .cause("d1", "f")
            .cause("e1", "f"),
    )
}

/// The ese that `er` produces from [`ex1`].
pub fn er_expected() -> Structure {
    build(
        Structure::builder(Kind::Ese)
            .events(&["a", "b", "c1", "c2", "d1", "d2"])
            .class("c", &["c1", "c2"])
            .class("d", &["d1", "d2"])
            .cause("a", "c1")
            .cause("b", "c2")
            .cause("c1", "d1")
            .cause("b", "d1")
            .cause("c2", "d2")
            .cause("a", "d2"),
    )
}

// ---------------------------------------------------------------- games

/// A Player move awaiting an Opponent move.
pub fn neg_then_pos() -> Structure {
    build(Structure::builder(Kind::Prime).neg("n").pos("p").cause("n", "p"))
}

pub fn single_pos() -> Structure {
    build(Structure::builder(Kind::Prime).pos("a"))
}

pub fn single_neg() -> Structure {
    build(Structure::builder(Kind::Prime).neg("a"))
}

/// Opponent and Player race for consistency.
pub fn race_game() -> Structure {
    build(Structure::builder(Kind::Prime).neg("n").pos("p").conflict(&["n", "p"]))
}

/// Two Opponent moves in conflict.
pub fn opponent_choice() -> Structure {
    build(Structure::builder(Kind::Prime).neg("l").neg("r").conflict(&["l", "r"]))
}

/// Two Player moves in conflict.
pub fn player_choice() -> Structure {
    build(Structure::builder(Kind::Prime).pos("l").pos("r").conflict(&["l", "r"]))
}

/// An Opponent move after a Player move.
pub fn pos_then_neg() -> Structure {
    build(Structure::builder(Kind::Prime).pos("p").neg("n").cause("p", "n"))
}

/// Every small game kept in the corpus.
pub fn games() -> Vec<(&'static str, Structure)> {
    vec![
        ("intro_game", intro_game()),
        ("neg_then_pos", neg_then_pos()),
        ("pos_then_neg", pos_then_neg()),
        ("single_pos", single_pos()),
        ("single_neg", single_neg()),
        ("race_game", race_game()),
        ("opponent_choice", opponent_choice()),
        ("player_choice", player_choice()),
    ]
}

// ---------------------------------------------------------------- strategies

fn strategy(inner: Structure, game: Structure, pairs: &[(&str, &str)]) -> Strategy {
    let pairs: Vec<(&str, Option<&str>)> = pairs.iter().map(|(a, b)| (*a, Some(*b))).collect();
    let f = StructMap::from_names(inner, game, &pairs).expect("strategy map");
    Strategy::new(f, &Budget::default()).expect("strategy")
}

/// Player answers the Opponent move.
pub fn answer_strategy() -> Strategy {
    strategy(neg_then_pos().with_kind(Kind::Edc).unwrap(), neg_then_pos(), &[("n", "n"), ("p", "p")])
}

/// Strategies satisfying every axiom.
pub fn good_strategies() -> Vec<(&'static str, Strategy)> {
    let b = Budget::default();
    vec![
        ("intro_strategy", intro_strategy()),
        ("cc_neg_then_pos", copycat(&neg_then_pos(), &b).unwrap()),
        ("cc_intro_game", copycat(&intro_game(), &b).unwrap()),
        ("cc_player_choice", copycat(&player_choice(), &b).unwrap()),
        ("answer_strategy", answer_strategy()),
        ("dup_pos", duplication(&single_pos(), &b).unwrap()),
    ]
}

/// A Player move waits on another one although the game keeps them apart.
pub fn mutant_innocence() -> Strategy {
    let game = build(Structure::builder(Kind::Prime).pos("q").pos("r"));
    let inner = build(Structure::builder(Kind::Edc).pos("q").pos("r").cause("q", "r"));
    strategy(inner, game, &[("q", "q"), ("r", "r")])
}

/// The Opponent move is never accepted.
pub fn mutant_receptivity() -> Strategy {
    let inner = Structure::empty(Kind::Edc).with_polarity(Some(vec![])).unwrap();
    let f = StructMap::new(inner, single_neg(), vec![]).unwrap();
    Strategy::new(f, &Budget::default()).unwrap()
}

/// Two Player causes of one move; the Opponent move following the first
/// conflicts with the second.
pub fn mutant_positive_consistency() -> Strategy {
    let game = pos_then_neg();
    let inner = build(
        Structure::builder(Kind::Edc)
            .pos("p1")
            .pos("p2")
            .neg("n1")
            .neg("n2")
            .class("p", &["p1", "p2"])
            .class("n", &["n1", "n2"])
            .cause("p1", "n1")
            .cause("p2", "n2")
            .conflict(&["p2", "n1"]),
    );
    strategy(inner, game, &[("p1", "p"), ("p2", "p"), ("n1", "n"), ("n2", "n")])
}

/// Two equivalent copies of an Opponent move with the same history.
pub fn mutant_non_redundancy() -> Strategy {
    let inner = build(Structure::builder(Kind::Edc).neg("a1").neg("a2").class("a", &["a1", "a2"]));
    strategy(inner, single_neg(), &[("a1", "a"), ("a2", "a")])
}

/// Two conflicting Player events over one move that are not equivalent.
pub fn mutant_saturation() -> Strategy {
    let inner = build(Structure::builder(Kind::Edc).pos("a1").pos("a2").conflict(&["a1", "a2"]));
    strategy(inner, single_pos(), &[("a1", "a"), ("a2", "a")])
}

/// Each mutant with the one axiom it breaks.
pub fn mutants() -> Vec<(&'static str, &'static str, Strategy)> {
    vec![
        ("mutant_innocence", "innocence", mutant_innocence()),
        ("mutant_receptivity", "receptivity", mutant_receptivity()),
        ("mutant_positive_consistency", "positive-consistency", mutant_positive_consistency()),
        ("mutant_non_redundancy", "non-redundancy", mutant_non_redundancy()),
        ("mutant_saturation", "equivalence-saturation", mutant_saturation()),
    ]
}

// ---------------------------------------------------------------- pullbacks

/// The common target: five unrelated events.
pub fn appb_c() -> Structure {
    build(Structure::builder(Kind::Edc).events(&["a", "b", "c", "d", "e"]))
}

pub fn appb_a() -> Structure {
    build(
        Structure::builder(Kind::Edc)
            .events(&["a1", "a2", "b1", "b2", "c1", "c2", "d", "e"])
            .class("a", &["a1", "a2"])
            .class("b", &["b1", "b2"])
            .class("c", &["c1", "c2"])
            .cause("c1", "b1")
            .cause("c1", "a1")
            .cause("c2", "b2")
            .cause("c2", "a2")
            .cause("d", "c1")
            .cause("e", "c2"),
    )
}

pub fn appb_b() -> Structure {
    build(Structure::builder(Kind::Edc).events(&["a", "b", "c", "d", "e"]).cause("b", "a"))
}

pub fn appb_f() -> StructMap {
    by_letter(&appb_a(), &appb_c())
}

pub fn appb_g() -> StructMap {
    by_letter(&appb_b(), &appb_c())
}

fn appb_chains(b: crate::structures::StructureBuilder) -> crate::structures::StructureBuilder {
    b.class("b", &["b1", "b2"])
        .class("c", &["c1", "c2"])
        .cause("c1", "b1")
        .cause("c2", "b2")
        .cause("d", "c1")
        .cause("e", "c2")
}

/// The pullback in edc's.
pub fn appb_p() -> Structure {
    build(
        appb_chains(Structure::builder(Kind::Edc).events(&["a1", "a2", "b1", "b2", "c1", "c2", "d", "e"]))
            .class("a", &["a1", "a2"])
            .cause("b1", "a1")
            .cause("b2", "a2"),
    )
}

/// `a1` above `c1` and `b2`.
pub fn appb_d() -> Structure {
    build(
        appb_chains(Structure::builder(Kind::Ese).events(&["a1", "b1", "b2", "c1", "c2", "d", "e"]))
            .cause("c1", "a1")
            .cause("b2", "a1"),
    )
}

/// `a1` above both `b1` and `b2`.
pub fn appb_e() -> Structure {
    build(
        appb_chains(Structure::builder(Kind::Ese).events(&["a1", "b1", "b2", "c1", "c2", "d", "e"]))
            .cause("b1", "a1")
            .cause("b2", "a1"),
    )
}

/// `a1` above `b1` only.
pub fn appb_ese_f() -> Structure {
    build(
        appb_chains(Structure::builder(Kind::Ese).events(&["a1", "b1", "b2", "c1", "c2", "d", "e"])).cause("b1", "a1"),
    )
}

/// The cone legs of `D`, `E` or `F` into `A` (by name) and `B` (by letter).
pub fn appb_cone(d: &Structure) -> (StructMap, StructMap) {
    let pairs: Vec<(String, Option<String>)> = d.names().iter().map(|n| (n.clone(), Some(n.clone()))).collect();
    let refs: Vec<(&str, Option<&str>)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_deref())).collect();
    let to_a = StructMap::from_names(d.clone(), appb_a(), &refs).expect("leg into A");
    (to_a, by_letter(d, &appb_b()))
}

/// The ten-event bipullback.
pub fn appb_bipullback() -> Structure {
    build(
        appb_chains(
            Structure::builder(Kind::Ese).events(&["a1", "a2'", "a1'", "a2", "b1", "b2", "c1", "c2", "d", "e"]),
        )
        .class("a", &["a1", "a2'", "a1'", "a2"])
        .cause("b1", "a1")
        .cause("b1", "a2'")
        .cause("c2", "a2'")
        .cause("b2", "a1'")
        .cause("c1", "a1'")
        .cause("b2", "a2"),
    )
}

// ---------------------------------------------------------------- corpus

/// Every named fixture, in the order written to disk.
pub fn corpus() -> Result<Vec<(&'static str, Fixture)>> {
    let b = Budget::default();
    let st = |s: Structure| Fixture::Structure(s);
    let mut v = vec![
        ("intro_game", st(intro_game())),
        ("intro_strat", st(intro_strat())),
        ("intro_strategy", Fixture::Strategy(intro_strategy())),
        ("intro_prime", st(intro_prime())),
        ("intro_general", st(intro_general())),
        ("intro_val_good", Fixture::Valuation("intro_strat", intro_strat(), intro_val_good())),
        ("intro_val_sure", Fixture::Valuation("intro_strat", intro_strat(), intro_val_sure())),
        ("intro_val_bad", Fixture::Valuation("intro_strat", intro_strat(), intro_val_bad())),
        ("hide_cex", st(hide_cex())),
        ("hide_cex_hidden", Fixture::Family(hide_cex_hidden())),
        ("ex1", st(ex1())),
        ("ex2", st(ex2())),
        ("ex3", st(ex3())),
        ("ex3_left", st(ex3_left())),
        ("er_expected", st(er_expected())),
        ("copycat_game", st(neg_then_pos())),
        ("copycat_strategy", Fixture::Strategy(copycat(&neg_then_pos(), &b)?)),
        ("dup_pos", Fixture::Strategy(duplication(&single_pos(), &b)?)),
        ("dup_neg", Fixture::Strategy(duplication(&single_neg(), &b)?)),
        ("appb_a", st(appb_a())),
        ("appb_b", st(appb_b())),
        ("appb_c", st(appb_c())),
        ("appb_d", st(appb_d())),
        ("appb_e", st(appb_e())),
        ("appb_ese_f", st(appb_ese_f())),
        ("appb_p", st(appb_p())),
        ("appb_bipullback", st(appb_bipullback())),
        ("appb_f", Fixture::Map(appb_f())),
        ("appb_g", Fixture::Map(appb_g())),
    ];
    for (name, g) in games() {
        if name != "intro_game" && name != "neg_then_pos" {
            v.push((name, st(g)));
        }
    }
    v.push(("answer_strategy", Fixture::Strategy(answer_strategy())));
    let one = |name: &'static str, s: Strategy| -> Result<Fixture> {
        let v = Valuation::constant_one(&s.inner, &b)?;
        Ok(Fixture::Valuation(name, s.inner, v))
    };
    v.push(("answer_val_one", one("answer_strategy", answer_strategy())?));
    v.push(("copycat_val_one", one("copycat_strategy", copycat(&neg_then_pos(), &b)?)?));
    for (name, _, m) in mutants() {
        v.push((name, Fixture::Strategy(m)));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate() {
        let b = Budget::default();
        for s in [intro_strat(), intro_prime(), appb_a(), appb_b(), appb_c(), appb_p(), er_expected()] {
            assert!(s.validate(&b).unwrap().is_valid(), "{s:?}");
        }
        for s in [appb_d(), appb_e(), appb_ese_f(), appb_bipullback()] {
            assert!(s.validate(&b).unwrap().is_valid());
        }
        assert!(appb_f().validate(&b).unwrap().is_valid());
        assert!(appb_g().validate(&b).unwrap().is_valid());
        for d in [appb_d(), appb_e(), appb_ese_f()] {
            let (l, r) = appb_cone(&d);
            assert!(l.validate(&b).unwrap().is_valid(), "{d:?}");
            assert!(r.validate(&b).unwrap().is_valid());
        }
        assert_eq!(corpus().unwrap().len(), 43);
    }
}
