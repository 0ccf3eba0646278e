//! Finite symmetry groups acting on an AR window, and averaging an aisle over
//! such a group.
//!
//! An action is modeled on isomorphism classes only: a permutation of the
//! window indecomposables commuting with τ, Σ and the AR arrows. That is
//! enough to move aisles around, since an aisle is determined by the
//! indecomposables it contains.

use std::collections::{BTreeMap, BTreeSet};

use crate::aisle::{aisle_closure, classify, AislePresentation, Flags, TStructure};
use crate::averaging::{average_aisles, AverageReport};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::id::IndecId;
use crate::window::ARWindow;

/// Permutation of the window indecomposables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Perm {
    map: BTreeMap<IndecId, IndecId>,
}

impl Perm {
    pub fn identity(win: &ARWindow) -> Perm {
        Perm { map: win.indecs().iter().map(|x| (x.clone(), x.clone())).collect() }
    }

    /// Lifts a vertex permutation of the quiver to the window: the module
    /// with dimension vector d goes to the module with d permuted along the
    /// vertex map, in every degree.
    pub fn from_vertex_map(win: &ARWindow, vertex_map: &[(usize, usize)]) -> Result<Perm> {
        let n = match win.indecs().first() {
            Some(IndecId::FiniteType { dimvec, .. }) => dimvec.len(),
            _ => return Err(Error::NotFiniteType("vertex maps act on module windows".into())),
        };
        let mut table = vec![usize::MAX; n];
        for &(src, dst) in vertex_map {
            if src >= n || dst >= n {
                return Err(Error::InvalidInput(format!(
                    "vertex map entry {src}->{dst} outside 0..{n}"
                )));
            }
            if table[src] != usize::MAX {
                return Err(Error::InvalidInput(format!("vertex {src} mapped twice")));
            }
            table[src] = dst;
        }
        if table.contains(&usize::MAX) || {
            let mut seen = table.clone();
            seen.sort_unstable();
            seen.windows(2).any(|w| w[0] == w[1])
        } {
            return Err(Error::InvalidInput(
                "vertex map must be a total permutation of the vertices".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for id in win.indecs() {
            let IndecId::FiniteType { degree, dimvec } = id else {
                return Err(Error::NotFiniteType(format!("{id}")));
            };
            let mut nd = vec![0u32; n];
            for (v, &d) in dimvec.iter().enumerate() {
                nd[table[v]] = d;
            }
            let image = IndecId::FiniteType { degree: *degree, dimvec: nd };
            if !win.contains(&image) {
                return Err(Error::NotASymmetry(format!("{id} maps outside the window")));
            }
            map.insert(id.clone(), image);
        }
        Ok(Perm { map })
    }

    pub fn apply(&self, id: &IndecId) -> Result<IndecId> {
        self.map
            .get(id)
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("{id} is not in the permutation domain")))
    }

    pub fn apply_set(&self, set: &BTreeSet<IndecId>) -> Result<BTreeSet<IndecId>> {
        set.iter().map(|x| self.apply(x)).collect()
    }

    /// self after other: x goes to self(other(x)).
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        let mut map = BTreeMap::new();
        for (x, y) in &other.map {
            map.insert(x.clone(), self.apply(y)?);
        }
        Ok(Perm { map })
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(x, y)| x == y)
    }

    fn image_key(&self, win: &ARWindow) -> Vec<IndecId> {
        win.indecs().iter().map(|x| self.map[x].clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct GroupAction {
    pub generators: Vec<Perm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionReport {
    pub order: usize,
}

pub const DEFAULT_ORDER_CAP: usize = 64;

/// Checks that one permutation is a window symmetry: a bijection of the
/// indecomposables commuting with Σ and τ and preserving the arrow relation.
fn validate_perm(win: &ARWindow, g: &Perm) -> Result<()> {
    if g.map.len() != win.indecs().len() {
        return Err(Error::NotASymmetry("permutation is not total on the window".into()));
    }
    let image: BTreeSet<&IndecId> = g.map.values().collect();
    if image.len() != g.map.len() {
        return Err(Error::NotASymmetry("permutation is not injective".into()));
    }
    for x in win.indecs() {
        let gx = g.apply(x)?;
        let sx = x.shifted(1);
        if win.contains(&sx) {
            let left = g.apply(&sx)?;
            let right = gx.shifted(1);
            if left != right {
                return Err(Error::NotASymmetry(format!(
                    "shift broken at {x}: g(Σx)={left} but Σg(x)={right}"
                )));
            }
        }
        if let Ok(tx) = win.tau(x) {
            if let Ok(tgx) = win.tau(&gx) {
                let left = g.apply(&tx)?;
                if left != tgx {
                    return Err(Error::NotASymmetry(format!(
                        "translate broken at {x}: g(τx)={left} but τg(x)={tgx}"
                    )));
                }
            }
        }
    }
    for &(i, j) in win.arrows() {
        let gi = g.apply(&win.id(i).clone())?;
        let gj = g.apply(&win.id(j).clone())?;
        let has = win.arrows().iter().any(|&(a, b)| win.id(a) == &gi && win.id(b) == &gj);
        if !has {
            return Err(Error::NotASymmetry(format!(
                "arrow {} -> {} has no image arrow {gi} -> {gj}",
                win.id(i),
                win.id(j)
            )));
        }
    }
    Ok(())
}

/// All elements of the generated group, identity first.
pub fn group_elements(win: &ARWindow, g: &GroupAction, cap: usize) -> Result<Vec<Perm>> {
    let mut elements = vec![Perm::identity(win)];
    let mut seen: BTreeSet<Vec<IndecId>> = BTreeSet::new();
    seen.insert(elements[0].image_key(win));
    let mut frontier = elements.clone();
    while let Some(e) = frontier.pop() {
        for gen in &g.generators {
            let next = gen.compose(&e)?;
            if seen.insert(next.image_key(win)) {
                if elements.len() >= cap {
                    return Err(Error::OrderCapExceeded(cap));
                }
                elements.push(next.clone());
                frontier.push(next);
            }
        }
    }
    Ok(elements)
}

pub fn validate_action(win: &ARWindow, g: &GroupAction, cap: usize) -> Result<ActionReport> {
    for gen in &g.generators {
        validate_perm(win, gen)?;
    }
    let order = group_elements(win, g, cap)?.len();
    Ok(ActionReport { order })
}

/// Aisle averaged over the group: the extension closure of the orbit of the
/// aisle, validated by running the refined algorithm over the orbit
/// t-structures. The result is G-invariant by construction; for finite type
/// windows the report comes back validated.
pub fn average_aisle_over_group(
    eng: &Engine,
    ts: &TStructure,
    g: &GroupAction,
) -> Result<(TStructure, AverageReport)> {
    let win = &eng.window;
    validate_action(win, g, DEFAULT_ORDER_CAP)?;
    let elements = group_elements(win, g, DEFAULT_ORDER_CAP)?;
    let orbit: Vec<TStructure> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(TStructure {
                name: format!("{}.g{}", ts.name, i),
                aisle: AislePresentation {
                    generators: e.apply_set(&ts.aisle.generators)?,
                    closure: e.apply_set(&ts.aisle.closure)?,
                },
                coaisle: e.apply_set(&ts.coaisle)?,
                validity: ts.validity.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let (avg, report) = average_aisles(eng, &orbit)?;
    for e in &elements {
        // Invariance of the averaged aisle is forced by averaging over the
        // whole orbit; a violation here means the closure computation broke.
        assert_eq!(e.apply_set(&avg.aisle.closure)?, avg.aisle.closure);
    }
    Ok((avg, report))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationReport {
    pub all_stable: bool,
    pub all_bounded: bool,
    pub averaged: Flags,
}

/// Stability and boundedness pass from the inputs to the average; that is
/// asserted. Whether non-degeneracy passes is unknown, so the averaged flag
/// is only reported.
pub fn check_preservation(
    eng: &Engine,
    ts_list: &[TStructure],
    averaged: &TStructure,
) -> PreservationReport {
    let flags: Vec<Flags> = ts_list.iter().map(|t| classify(eng, t)).collect();
    let all_stable = flags.iter().all(|f| f.stable);
    let all_bounded = flags.iter().all(|f| f.bounded);
    let avg = classify(eng, averaged);
    if all_stable {
        assert!(avg.stable, "stability must survive averaging");
    }
    if all_bounded {
        assert!(avg.bounded, "boundedness must survive averaging");
    }
    PreservationReport { all_stable, all_bounded, averaged: avg }
}

/// Smallest G-invariant aisle containing `start`, as computed by closing the
/// orbit of the generators. Used by the brute-force minimality tests.
pub fn invariant_aisle_closure(
    eng: &Engine,
    start: &BTreeSet<IndecId>,
    elements: &[Perm],
) -> Result<BTreeSet<IndecId>> {
    let mut orbit = BTreeSet::new();
    for e in elements {
        orbit.extend(e.apply_set(start)?);
    }
    aisle_closure(eng, &orbit)
}
