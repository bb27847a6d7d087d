//! Finite sets of event indices packed into a 128-bit word.

use std::cmp::Ordering;
use std::fmt;

/// Largest number of events a single structure may carry.
pub const MAX_EVENTS: usize = 128;

/// A set of event indices `0..128`.
///
/// The derived `Ord` compares the raw bit pattern and is only meant for use
/// as a map key. Use [`EventSet::canonical_cmp`] for the (size, lexicographic)
/// order that every enumeration in the crate is emitted in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EventSet(u128);

impl EventSet {
    pub const EMPTY: EventSet = EventSet(0);

    pub fn singleton(e: usize) -> Self {
        debug_assert!(e < MAX_EVENTS);
        EventSet(1u128 << e)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 128 {
            EventSet(u128::MAX)
        } else {
            EventSet((1u128 << n) - 1)
        }
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn from_bits(bits: u128) -> Self {
        EventSet(bits)
    }

    pub fn contains(self, e: usize) -> bool {
        e < MAX_EVENTS && self.0 >> e & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1u128 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1u128 << e);
    }

    pub fn with(self, e: usize) -> Self {
        EventSet(self.0 | 1u128 << e)
    }

    pub fn without(self, e: usize) -> Self {
        EventSet(self.0 & !(1u128 << e))
    }

    pub fn union(self, other: Self) -> Self {
        EventSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        EventSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        EventSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Size first, then lexicographic on the ascending index sequence.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }

    /// Image of the set under a total index map.
    pub fn map(self, f: impl Fn(usize) -> usize) -> Self {
        self.iter().map(f).collect()
    }

    /// All subsets, smallest bit patterns first. Only sensible for small sets.
    pub fn subsets(self) -> impl Iterator<Item = EventSet> {
        let full = self.0;
        let mut sub: u128 = 0;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let cur = sub;
            if sub == full {
                done = true;
            } else {
                sub = (sub.wrapping_sub(full)) & full;
            }
            Some(EventSet(cur))
        })
    }
}

impl FromIterator<usize> for EventSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = EventSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl IntoIterator for EventSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter(u128);

impl Iterator for Iter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let e = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(e)
        }
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Sort sets into (size, lexicographic) order and drop duplicates.
pub fn sort_canonical(sets: &mut Vec<EventSet>) {
    sets.sort_by(|a, b| a.canonical_cmp(b));
    sets.dedup();
}

/// Keep only the inclusion-maximal members.
pub fn maximal(sets: &[EventSet]) -> Vec<EventSet> {
    let mut out: Vec<EventSet> = sets
        .iter()
        .copied()
        .filter(|s| !sets.iter().any(|t| s != t && s.is_subset(*t)))
        .collect();
    sort_canonical(&mut out);
    out
}

/// Keep only the inclusion-minimal members.
pub fn minimal(sets: &[EventSet]) -> Vec<EventSet> {
    let mut out: Vec<EventSet> = sets
        .iter()
        .copied()
        .filter(|s| !sets.iter().any(|t| s != t && t.is_subset(*s)))
        .collect();
    sort_canonical(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_all() {
        let s: EventSet = [1, 3, 4].into_iter().collect();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.is_subset(s)));
        assert_eq!(EventSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn canonical_order_is_size_then_lex() {
        let a: EventSet = [0, 5].into_iter().collect();
        let b: EventSet = [1, 2].into_iter().collect();
        let c: EventSet = [3].into_iter().collect();
        let mut v = vec![b, a, c];
        sort_canonical(&mut v);
        assert_eq!(v, vec![c, a, b]);
    }

    #[test]
    fn high_bits_work() {
        let s = EventSet::singleton(127).with(64);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![64, 127]);
        assert_eq!(EventSet::full(128).len(), 128);
    }
}
