use std::collections::HashSet;

use super::game::{Sides, Strategy};
use crate::budget::{Budget, Meter};
use crate::error::Result;
use crate::eventset::EventSet;
use crate::structures::{StructMap, Structure};

/// An isomorphism `p → q` respecting order, consistency, equivalence and
/// polarity, if there is one.
pub fn find_iso(p: &Structure, q: &Structure, budget: &Budget) -> Result<Option<StructMap>> {
    search(p, q, |_, _| true, budget)
}

/// An isomorphism of the inner structures commuting with the maps to the
/// games; games are compared component by component and by event name.
pub fn find_strategy_iso(s: &Strategy, t: &Strategy, budget: &Budget) -> Result<Option<StructMap>> {
    let (gs, gt) = (Sides::of(&s.game)?, Sides::of(&t.game)?);
    if gs.left != gt.left || gs.right != gt.right {
        return Ok(None);
    }
    let key = |sides: &Sides, e: usize| {
        let (side, i) = sides.place[e];
        let comp = if side == 0 { &sides.left } else { &sides.right };
        (side, comp.name(i).to_string())
    };
    let ks: Vec<_> = (0..s.inner.len()).map(|e| key(&gs, s.apply(e))).collect();
    let kt: Vec<_> = (0..t.inner.len()).map(|e| key(&gt, t.apply(e))).collect();
    search(&s.inner, &t.inner, |a, b| ks[a] == kt[b], budget)
}

fn search(
    p: &Structure,
    q: &Structure,
    compatible: impl Fn(usize, usize) -> bool,
    budget: &Budget,
) -> Result<Option<StructMap>> {
    if p.len() != q.len() || p.kind().is_prime_like() != q.kind().is_prime_like() {
        return Ok(None);
    }
    let n = p.len();
    // consistency is determined by the configurations
    let pc = p.all_configs(budget)?;
    let qc: HashSet<EventSet> = q.all_configs(budget)?.into_iter().collect();
    if pc.len() != qc.len() {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&e| (p.down(e).len(), e));
    let fits = |a: usize, b: usize| {
        p.polarity(a) == q.polarity(b)
            && p.down(a).len() == q.down(b).len()
            && p.strict_up(a).len() == q.strict_up(b).len()
            && p.class_set(a).len() == q.class_set(b).len()
            && compatible(a, b)
    };
    let mut meter = Meter::new(budget, "isomorphism search");
    let mut image = vec![usize::MAX; n];
    let mut used = EventSet::EMPTY;
    let found = go(0, &order, p, q, &fits, &pc, &qc, &mut image, &mut used, &mut meter)?;
    if !found {
        return Ok(None);
    }
    Ok(Some(StructMap::new(p.clone(), q.clone(), image.into_iter().map(Some).collect())?))
}

#[allow(clippy::too_many_arguments)]
fn go(
    k: usize,
    order: &[usize],
    p: &Structure,
    q: &Structure,
    fits: &impl Fn(usize, usize) -> bool,
    pc: &[EventSet],
    qc: &HashSet<EventSet>,
    image: &mut Vec<usize>,
    used: &mut EventSet,
    meter: &mut Meter,
) -> Result<bool> {
    if k == order.len() {
        return Ok(pc.iter().all(|x| qc.contains(&x.map(|e| image[e]))));
    }
    let a = order[k];
    for b in q.all().difference(*used) {
        meter.tick()?;
        if !fits(a, b) {
            continue;
        }
        let coherent = order[..k].iter().all(|&c| {
            let d = image[c];
            p.leq(c, a) == q.leq(d, b) && p.leq(a, c) == q.leq(b, d) && p.equiv(a, c) == q.equiv(b, d)
        });
        if !coherent {
            continue;
        }
        image[a] = b;
        used.insert(b);
        if go(k + 1, order, p, q, fits, pc, qc, image, used, meter)? {
            return Ok(true);
        }
        used.remove(b);
    }
    image[a] = usize::MAX;
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Kind;

    #[test]
    fn order_matters() {
        let b = Budget::default();
        let par = Structure::builder(Kind::Prime).neg("m").pos("p").build().unwrap();
        let seq = Structure::builder(Kind::Prime).neg("m").pos("p").cause("m", "p").build().unwrap();
        assert!(find_iso(&par, &par, &b).unwrap().is_some());
        assert!(find_iso(&par, &seq, &b).unwrap().is_none());
        let renamed = seq.renamed(|_, n| format!("x{n}")).unwrap();
        let iso = find_iso(&seq, &renamed, &b).unwrap().unwrap();
        assert_eq!(iso.named_pairs()[0], ("m".to_string(), Some("xm".to_string())));
    }
}
