use crate::budget::Budget;
use crate::error::{usage, Result};
use crate::eventset::EventSet;
use crate::structures::{validate_map, StructMap, Structure};

/// `P↓V`: the events of `V` with the restricted order, consistency and
/// equivalence.
pub fn hide_events(s: &Structure, visible: EventSet) -> Result<Structure> {
    if !s.kind().is_prime_like() {
        return usage("hiding takes an ese or edc");
    }
    if !visible.is_subset(s.all()) {
        return usage("visible set mentions unknown events");
    }
    for e in visible {
        if !s.class_set(e).is_subset(visible) {
            return usage(format!("visible set is not closed under equivalence at `{}`", s.name(e)));
        }
    }
    s.sub_structure(visible, s.kind())
}

/// `f = f1 ∘ f0` where `f0 : P → P↓V` hides the undefined events and `f1`
/// is the total defined part.
pub fn factorise_partial(f: &StructMap) -> Result<(StructMap, StructMap)> {
    let v = f.domain();
    let hidden = hide_events(&f.source, v)?;
    let proj = (0..f.source.len())
        .map(|e| if v.contains(e) { hidden.index_of(f.source.name(e)) } else { None })
        .collect();
    let proj = StructMap::new(f.source.clone(), hidden.clone(), proj)?;
    let defined = (0..hidden.len())
        .map(|e| f.mapping[f.source.id(hidden.name(e)).expect("kept event")])
        .collect();
    let defined = StructMap::new(hidden, f.target.clone(), defined)?;
    Ok((proj, defined))
}

/// For another factorisation `f = g1 ∘ g0` with `g1` total, the unique
/// `h : P↓V → P1` with `h ∘ f0 = g0` and `g1 ∘ h = f1`.
pub fn mediate(f: &StructMap, g0: &StructMap, g1: &StructMap, budget: &Budget) -> Result<StructMap> {
    if g0.source != f.source || g1.target != f.target || g0.target != g1.source {
        return usage("the factorisation does not match the map");
    }
    if !g1.is_total() {
        return usage("the second factor must be total");
    }
    if g0.then(g1)?.mapping != f.mapping {
        return usage("the two factors do not compose to the map");
    }
    let (proj, _) = factorise_partial(f)?;
    let hidden = proj.target.clone();
    let mapping = (0..hidden.len())
        .map(|e| g0.mapping[f.source.id(hidden.name(e)).expect("kept event")])
        .collect();
    let h = StructMap::new(hidden, g0.target.clone(), mapping)?;
    let r = validate_map(&h, budget)?;
    if let Some(v) = r.violations.first() {
        return usage(format!("the mediating map is not a map ({}): {}", v.axiom, v.detail));
    }
    Ok(h)
}
