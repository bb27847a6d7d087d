//! Causal realisations of a family: labelled finite posets whose down-sets
//! map into the family. Extremal realisations with a top element are the
//! events of `er`.

mod er;
mod pr;

pub use er::{check_factorisation, er, er_family, factor_through_er, ges_of, ges_of_map, ErResult};
pub use pr::{coreflect_edc, forget_equiv, pr, PrResult};

use std::collections::HashSet;

use crate::budget::{Budget, Meter};
use crate::error::{usage, Error, Result};
use crate::eventset::EventSet;
use crate::structures::Family;

/// Canonical form: for each position, the label and the set of positions
/// strictly below it.
pub type CanonKey = Vec<(usize, u128)>;

/// A labelled finite poset. `label[e]` indexes the family's carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realisation {
    names: Vec<String>,
    down: Vec<EventSet>,
    label: Vec<usize>,
}

/// A non-isomorphic total map out of a realisation: `block[e]` is the image
/// of element `e` in `target`.
#[derive(Debug, Clone)]
pub struct Collapse {
    pub block: Vec<usize>,
    pub target: Realisation,
}

impl Realisation {
    /// `order` lists pairs `(below, above)`; its reflexive-transitive closure
    /// must be a partial order.
    pub fn new(names: Vec<String>, order: &[(usize, usize)], label: Vec<usize>) -> Result<Realisation> {
        let n = names.len();
        if label.len() != n {
            return usage("every element needs a label");
        }
        if n > crate::eventset::MAX_EVENTS {
            return Err(Error::Resource("realisation too large".into()));
        }
        let mut down: Vec<EventSet> = (0..n).map(EventSet::singleton).collect();
        for &(a, b) in order {
            if a >= n || b >= n {
                return usage("order mentions an unknown element");
            }
            down[b].insert(a);
        }
        loop {
            let mut changed = false;
            for e in 0..n {
                let acc = down[e].iter().fold(down[e], |acc, p| acc.union(down[p]));
                if acc != down[e] {
                    down[e] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && down[a].contains(b) && down[b].contains(a) {
                    return usage(format!("order is cyclic at {} and {}", names[a], names[b]));
                }
            }
        }
        Ok(Realisation { names, down, label })
    }

    pub(crate) fn from_down(names: Vec<String>, down: Vec<EventSet>, label: Vec<usize>) -> Realisation {
        Realisation { names, down, label }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn labels(&self) -> &[usize] {
        &self.label
    }

    pub fn down(&self, e: usize) -> EventSet {
        self.down[e]
    }

    pub fn all(&self) -> EventSet {
        EventSet::full(self.len())
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.down[b].contains(a)
    }

    /// Immediate order relations.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.len() {
            let below = self.down[b].without(b);
            for a in below {
                if !below.without(a).iter().any(|c| self.down[c].contains(a)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The element above every other element, if any.
    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&e| self.down[e] == self.all())
    }

    pub fn image(&self, x: EventSet) -> EventSet {
        x.iter().map(|e| self.label[e]).collect()
    }

    pub fn down_sets(&self) -> Vec<EventSet> {
        let mut out = vec![EventSet::EMPTY];
        let mut seen: HashSet<EventSet> = HashSet::new();
        seen.insert(EventSet::EMPTY);
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for e in self.all().difference(x) {
                if self.down[e].without(e).is_subset(x) {
                    let y = x.with(e);
                    if seen.insert(y) {
                        out.push(y);
                    }
                }
            }
            i += 1;
        }
        out
    }

    pub fn is_realisation(&self, f: &Family) -> bool {
        self.label.iter().all(|&l| l < f.len())
            && self.down_sets().iter().all(|x| f.contains(self.image(*x)))
    }

    /// Restriction to a down-closed subset.
    pub fn restrict(&self, keep: EventSet) -> Realisation {
        let idx: Vec<usize> = keep.iter().collect();
        let pos = |e: usize| idx.iter().position(|&k| k == e).unwrap();
        Realisation {
            names: idx.iter().map(|&e| self.names[e].clone()).collect(),
            down: idx
                .iter()
                .map(|&e| self.down[e].intersection(keep).map(pos))
                .collect(),
            label: idx.iter().map(|&e| self.label[e]).collect(),
        }
    }

    /// Lexicographically least encoding over all linearisations, with the
    /// matching element order.
    pub fn canonical(&self, budget: &Budget) -> Result<(CanonKey, Vec<usize>)> {
        let mut meter = Meter::new(budget, "realisation canonicalisation");
        let mut st = Canon {
            r: self,
            best: None,
            best_order: Vec::new(),
            key: Vec::new(),
            order: Vec::new(),
            pos: vec![usize::MAX; self.len()],
        };
        st.search(EventSet::EMPTY, &mut meter)?;
        Ok((st.best.unwrap_or_default(), st.best_order))
    }

    pub fn canonical_key(&self, budget: &Budget) -> Result<CanonKey> {
        Ok(self.canonical(budget)?.0)
    }

    pub fn is_isomorphic(&self, other: &Realisation, budget: &Budget) -> Result<bool> {
        Ok(self.len() == other.len() && self.canonical_key(budget)? == other.canonical_key(budget)?)
    }

    /// A total map onto a realisation of `f` that is not an isomorphism,
    /// if one exists.
    pub fn collapse(&self, f: &Family, budget: &Budget) -> Result<Option<Collapse>> {
        let mut meter = Meter::new(budget, "extremality search");
        let n = self.len();
        // weaker orders on the same carrier
        for (a, b) in self.covers() {
            meter.tick()?;
            let weaker = self.without_cover(a, b);
            if weaker.is_realisation(f) {
                return Ok(Some(Collapse {
                    block: (0..n).collect(),
                    target: weaker,
                }));
            }
        }
        // proper quotients identifying equally labelled elements
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for e in 0..n {
            match groups.iter_mut().find(|g| self.label[g[0]] == self.label[e]) {
                Some(g) => g.push(e),
                None => groups.push(vec![e]),
            }
        }
        groups.retain(|g| g.len() > 1);
        if groups.is_empty() {
            return Ok(None);
        }
        let mut found = None;
        for_each_partition(&groups, n, &mut |block, nb| {
            if found.is_some() || nb == n {
                return Ok(());
            }
            meter.tick()?;
            found = self.quotient_realisation(f, block, nb, &mut meter)?;
            Ok(())
        })?;
        Ok(found)
    }

    /// Same carrier, order minus the single cover `(a, b)`.
    fn without_cover(&self, a: usize, b: usize) -> Realisation {
        let mut down = self.down.clone();
        down[b].remove(a);
        Realisation::from_down(self.names.clone(), down, self.label.clone())
    }

    /// Tries the maximal orders on the quotient compatible with the blocks.
    fn quotient_realisation(
        &self,
        f: &Family,
        block: &[usize],
        nb: usize,
        meter: &mut Meter,
    ) -> Result<Option<Collapse>> {
        let n = self.len();
        let mut members = vec![EventSet::EMPTY; nb];
        for e in 0..n {
            members[block[e]].insert(e);
        }
        // r[c] = blocks allowed below block c
        let mut r = vec![EventSet::EMPTY; nb];
        for c in 0..nb {
            for b in 0..nb {
                if b == c {
                    continue;
                }
                let ok = members[c]
                    .iter()
                    .all(|e| !self.down[e].intersection(members[b]).is_empty());
                if ok {
                    r[c].insert(b);
                }
            }
        }
        // blocks related both ways must be linearly ordered among themselves
        let mut comp: Vec<usize> = (0..nb).collect();
        for c in 0..nb {
            for b in r[c] {
                if r[b].contains(c) {
                    let (x, y) = (comp[b], comp[c]);
                    for k in comp.iter_mut() {
                        if *k == y {
                            *k = x;
                        }
                    }
                }
            }
        }
        let mut sccs: Vec<Vec<usize>> = Vec::new();
        for c in 0..nb {
            match sccs.iter_mut().find(|s| comp[s[0]] == comp[c]) {
                Some(s) => s.push(c),
                None => sccs.push(vec![c]),
            }
        }
        sccs.retain(|s| s.len() > 1);
        let names: Vec<String> = (0..nb)
            .map(|b| {
                members[b]
                    .iter()
                    .map(|e| self.names[e].as_str())
                    .collect::<Vec<_>>()
                    .join("+")
            })
            .collect();
        let labels: Vec<usize> = (0..nb).map(|b| self.label[members[b].first().unwrap()]).collect();
        let mut result = None;
        for_each_linearisation(&sccs, &mut |lin: &[Vec<usize>]| {
            if result.is_some() {
                return Ok(());
            }
            meter.tick()?;
            let mut pairs = Vec::new();
            for c in 0..nb {
                for b in r[c] {
                    if !r[b].contains(c) {
                        pairs.push((b, c));
                    }
                }
            }
            for chain in lin {
                for w in chain.windows(2) {
                    pairs.push((w[0], w[1]));
                }
            }
            let target = Realisation::new(names.clone(), &pairs, labels.clone())
                .map_err(|e| Error::Internal(format!("quotient order: {e}")))?;
            // the induced order must stay inside r
            let inside = (0..nb).all(|c| target.down[c].without(c).is_subset(r[c]));
            if inside && target.is_realisation(f) {
                result = Some(Collapse {
                    block: block.to_vec(),
                    target,
                });
            }
            Ok(())
        })?;
        Ok(result)
    }

    /// Every total map out of an extremal realisation is an isomorphism.
    pub fn is_extremal(&self, f: &Family, budget: &Budget) -> Result<bool> {
        if !self.is_realisation(f) {
            return usage("not a realisation of the family");
        }
        Ok(self.collapse(f, budget)?.is_none())
    }

    /// Follows non-isomorphic total maps until an extremal realisation is
    /// reached; returns the composite map and the extremal.
    pub fn collapse_to_extremal(&self, f: &Family, budget: &Budget) -> Result<Collapse> {
        let mut block: Vec<usize> = (0..self.len()).collect();
        let mut cur = self.clone();
        while let Some(c) = cur.collapse(f, budget)? {
            block = block.iter().map(|&b| c.block[b]).collect();
            cur = c.target;
        }
        Ok(Collapse { block, target: cur })
    }
}

struct Canon<'a> {
    r: &'a Realisation,
    best: Option<CanonKey>,
    best_order: Vec<usize>,
    key: CanonKey,
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl Canon<'_> {
    fn search(&mut self, placed: EventSet, meter: &mut Meter) -> Result<()> {
        let n = self.r.len();
        let d = self.order.len();
        if d == n {
            if self.best.as_ref().map_or(true, |b| self.key < *b) {
                self.best = Some(self.key.clone());
                self.best_order = self.order.clone();
            }
            return Ok(());
        }
        let mut cands: Vec<(usize, (usize, u128))> = Vec::new();
        for e in 0..n {
            if placed.contains(e) || !self.r.down[e].without(e).is_subset(placed) {
                continue;
            }
            let mask = self.r.down[e]
                .without(e)
                .iter()
                .fold(0u128, |m, p| m | 1u128 << self.pos[p]);
            cands.push((e, (self.r.label[e], mask)));
        }
        let min = cands.iter().map(|c| c.1).min().expect("a minimal element");
        for (e, k) in cands {
            if k != min {
                continue;
            }
            if let Some(best) = &self.best {
                if (&self.key[..], k) > (&best[..d], best[d]) {
                    return Ok(());
                }
            }
            meter.tick()?;
            self.pos[e] = d;
            self.order.push(e);
            self.key.push(k);
            self.search(placed.with(e), meter)?;
            self.key.pop();
            self.order.pop();
            self.pos[e] = usize::MAX;
        }
        Ok(())
    }
}

/// Calls `visit(block, nb)` for every partition of `0..n` refining the
/// given groups (elements outside every group stay singletons).
fn for_each_partition(
    groups: &[Vec<usize>],
    n: usize,
    visit: &mut dyn FnMut(&[usize], usize) -> Result<()>,
) -> Result<()> {
    let mut grouped = vec![false; n];
    for g in groups {
        for &e in g {
            grouped[e] = true;
        }
    }
    // restricted growth strings per group
    let mut rgs: Vec<Vec<usize>> = groups.iter().map(|g| vec![0; g.len()]).collect();
    loop {
        let mut block = vec![usize::MAX; n];
        let mut nb = 0;
        for e in 0..n {
            if !grouped[e] {
                block[e] = nb;
                nb += 1;
            }
        }
        for (g, s) in groups.iter().zip(&rgs) {
            let k = s.iter().max().unwrap() + 1;
            for (i, &e) in g.iter().enumerate() {
                block[e] = nb + s[i];
            }
            nb += k;
        }
        visit(&block, nb)?;
        // advance the last group's string, carrying into earlier groups
        let mut gi = rgs.len();
        loop {
            if gi == 0 {
                return Ok(());
            }
            gi -= 1;
            if next_rgs(&mut rgs[gi]) {
                break;
            }
            rgs[gi].iter_mut().for_each(|x| *x = 0);
        }
    }
}

/// Next restricted growth string in lexicographic order.
fn next_rgs(s: &mut [usize]) -> bool {
    for i in (1..s.len()).rev() {
        let m = s[..i].iter().max().copied().unwrap_or(0);
        if s[i] <= m {
            s[i] += 1;
            for x in s[i + 1..].iter_mut() {
                *x = 0;
            }
            return true;
        }
    }
    false
}

/// Every choice of a linear order for each listed group.
fn for_each_linearisation(
    groups: &[Vec<usize>],
    visit: &mut dyn FnMut(&[Vec<usize>]) -> Result<()>,
) -> Result<()> {
    fn go(
        groups: &[Vec<usize>],
        i: usize,
        acc: &mut Vec<Vec<usize>>,
        visit: &mut dyn FnMut(&[Vec<usize>]) -> Result<()>,
    ) -> Result<()> {
        if i == groups.len() {
            return visit(acc);
        }
        let mut perm = groups[i].clone();
        perm.sort();
        loop {
            acc.push(perm.clone());
            go(groups, i + 1, acc, visit)?;
            acc.pop();
            if !next_permutation(&mut perm) {
                return Ok(());
            }
        }
    }
    go(groups, 0, &mut Vec::new(), visit)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// One representative per isomorphism class of extremal realisations with
/// at most `max_size` elements, ordered by size then canonical form.
pub fn enumerate_extremals(f: &Family, max_size: usize, budget: &Budget) -> Result<Vec<Realisation>> {
    let res = er::er_core(f, Some(max_size), budget)?;
    let mut out: Vec<(usize, CanonKey, Realisation)> = Vec::new();
    for x in res.configs.iter().filter(|x| x.len() <= max_size) {
        let r = res.realisation_of(*x);
        let (key, _) = r.canonical(budget)?;
        out.push((x.len(), key, r));
    }
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(out.into_iter().map(|t| t.2).collect())
}
