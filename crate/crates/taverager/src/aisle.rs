//! T-structures presented by aisle generators inside a degree window.
//!
//! An aisle is stored as its generator set together with the computed
//! closure: Σ-closed upwards within the window, closed under extensions and
//! direct summands. The co-aisle is the right orthogonal. Truncation is the
//! iterated aisle approximation; the final cone has no maps from the aisle.

use std::collections::BTreeSet;

use crate::engine::{cx, Cx, CxMap, Engine};
use crate::error::{Error, Result};
use crate::id::{IndecId, Obj};
use crate::matrix::q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AislePresentation {
    pub generators: BTreeSet<IndecId>,
    pub closure: BTreeSet<IndecId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Validated,
    Unvalidated,
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TStructure {
    pub name: String,
    pub aisle: AislePresentation,
    pub coaisle: BTreeSet<IndecId>,
    pub validity: Validity,
}

#[derive(Debug, Clone)]
pub struct Triangle {
    pub x: Obj,
    pub t: Obj,
    pub y: Obj,
    /// Map x -> t, when produced by the engine.
    pub x_to_t: Option<CxMap>,
    /// Map t -> y, when produced by the engine.
    pub t_to_y: Option<CxMap>,
}

/// All indecomposable middle terms of triangles a -> E -> b, observed over
/// the basis of Hom(b, Σa) together with zero/one coefficient patterns and
/// one generic combination.
pub fn extension_middles(eng: &Engine, a: &IndecId, b: &IndecId) -> Result<Vec<Obj>> {
    let ac = eng.cx_of(a)?;
    let bc = eng.cx_of(b)?;
    let sa = cx::shift(&ac, 1);
    let basis = eng.hom_basis(&bc, &sa);
    let h = basis.len();
    if h == 0 {
        return Ok(vec![]);
    }
    let mut coeff_sets: Vec<Vec<i64>> = Vec::new();
    if h <= 3 {
        for bits in 1..(1u32 << h) {
            coeff_sets.push((0..h).map(|i| i64::from(bits >> i & 1 == 1)).collect());
        }
    } else {
        for i in 0..h {
            coeff_sets.push((0..h).map(|j| i64::from(i == j)).collect());
        }
    }
    coeff_sets.push((0..h).map(|i| 1i64 << i).collect());
    let mut out: Vec<Obj> = Vec::new();
    for cs in coeff_sets {
        let mut g = cx::zero_map(&bc, &sa);
        for (i, b) in basis.iter().enumerate() {
            if cs[i] != 0 {
                g = cx::add(&g, &cx::scale(b, &q(cs[i])));
            }
        }
        if g.is_zero_on_the_nose() {
            continue;
        }
        let (mid, _) = cx::cocone(&g);
        let obj = eng.decompose(&mid)?;
        if !out.contains(&obj) {
            out.push(obj);
        }
    }
    Ok(out)
}

/// Least fixpoint of extension middles and direct summands.
pub fn extension_closure(eng: &Engine, start: &BTreeSet<IndecId>) -> Result<BTreeSet<IndecId>> {
    close(eng, start, false)
}

/// Aisle closure: additionally Σ-closed upwards within the window.
pub fn aisle_closure(eng: &Engine, start: &BTreeSet<IndecId>) -> Result<BTreeSet<IndecId>> {
    close(eng, start, true)
}

fn close(eng: &Engine, start: &BTreeSet<IndecId>, sigma_up: bool) -> Result<BTreeSet<IndecId>> {
    for s in start {
        if !eng.window.contains(s) {
            return Err(Error::InvalidInput(format!("{s} is not in the window")));
        }
    }
    let mut set = start.clone();
    loop {
        let mut fresh: BTreeSet<IndecId> = BTreeSet::new();
        if sigma_up {
            for s in &set {
                let up = s.shifted(1);
                if eng.window.contains(&up) && !set.contains(&up) {
                    fresh.insert(up);
                }
            }
        }
        let items: Vec<IndecId> = set.iter().cloned().collect();
        for a in &items {
            for b in &items {
                if eng.hom_dim(b, &a.shifted(1))? == 0 {
                    continue;
                }
                for mid in extension_middles(eng, a, b)? {
                    for s in mid.summands() {
                        if !set.contains(s) && !fresh.contains(s) {
                            fresh.insert(s.clone());
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Ok(set);
        }
        set.extend(fresh);
    }
}

pub fn right_orthogonal(eng: &Engine, set: &BTreeSet<IndecId>) -> Result<BTreeSet<IndecId>> {
    let mut out = BTreeSet::new();
    'outer: for y in eng.window.indecs() {
        for s in set {
            if eng.hom_dim(s, y)? > 0 {
                continue 'outer;
            }
        }
        out.insert(y.clone());
    }
    Ok(out)
}

pub fn left_orthogonal(eng: &Engine, set: &BTreeSet<IndecId>) -> Result<BTreeSet<IndecId>> {
    let mut out = BTreeSet::new();
    'outer: for x in eng.window.indecs() {
        for s in set {
            if eng.hom_dim(x, s)? > 0 {
                continue 'outer;
            }
        }
        out.insert(x.clone());
    }
    Ok(out)
}

impl TStructure {
    /// Builds the t-structure generated by `gens`. With `sigma_stable`, the
    /// generators are first closed under both shift directions within the
    /// window.
    pub fn from_generators(
        eng: &Engine,
        name: &str,
        gens: &[IndecId],
        sigma_stable: bool,
    ) -> Result<TStructure> {
        let mut start: BTreeSet<IndecId> = gens.iter().cloned().collect();
        if sigma_stable {
            let mut grown = true;
            while grown {
                grown = false;
                for s in start.clone() {
                    for d in [-1, 1] {
                        let t = s.shifted(d);
                        if eng.window.contains(&t) && start.insert(t) {
                            grown = true;
                        }
                    }
                }
            }
        }
        let closure = aisle_closure(eng, &start)?;
        let coaisle = right_orthogonal(eng, &closure)?;
        Ok(TStructure {
            name: name.to_string(),
            aisle: AislePresentation { generators: start, closure },
            coaisle,
            validity: Validity::Unvalidated,
        })
    }

    pub fn in_aisle(&self, id: &IndecId) -> bool {
        self.aisle.closure.contains(id)
    }

    pub fn in_coaisle(&self, id: &IndecId) -> bool {
        self.coaisle.contains(id)
    }

    pub fn obj_in_aisle(&self, o: &Obj) -> bool {
        o.summands().iter().all(|s| self.in_aisle(s))
    }

    pub fn obj_in_coaisle(&self, o: &Obj) -> bool {
        o.summands().iter().all(|s| self.in_coaisle(s))
    }

    /// Truncation triangle for every indecomposable of interior degree; on
    /// success the t-structure is marked Validated.
    pub fn validate(&mut self, eng: &Engine) -> Result<()> {
        let degs = eng.window.interior_degrees();
        for id in eng.window.indecs() {
            if !degs.contains(&id.degree()) {
                continue;
            }
            match truncate(eng, &Obj::one(id.clone()), self) {
                Ok(_) => {}
                Err(Error::NonAisle(w)) => {
                    self.validity = Validity::Invalid(w.clone());
                    return Err(Error::NonAisle(w));
                }
                Err(e) => return Err(e),
            }
        }
        self.validity = Validity::Validated;
        Ok(())
    }
}

/// Truncation of `t`: iterated aisle approximation. The returned triangle is
/// x -> t -> y with x in the aisle closure and y in the co-aisle.
pub fn truncate(eng: &Engine, t: &Obj, ts: &TStructure) -> Result<Triangle> {
    let t_cx = eng.cx_of_obj(t)?;
    let (tri, _) = truncate_cx(eng, &t_cx, t, ts)?;
    Ok(tri)
}

/// Same as `truncate`, also returning the final complex of y together with
/// the chain map t -> y (useful to continue computing with the map).
pub fn truncate_cx(
    eng: &Engine,
    t_cx: &Cx,
    t_label: &Obj,
    ts: &TStructure,
) -> Result<(Triangle, (Cx, CxMap))> {
    let budget = 4 * eng.window.indecs().len();
    let (mut y, mut alpha, _) = cx::minimize(t_cx);
    let aisle_cxs: Vec<(IndecId, Cx)> = ts
        .aisle
        .closure
        .iter()
        .map(|w| Ok((w.clone(), eng.cx_of(w)?)))
        .collect::<Result<_>>()?;
    for _step in 0..=budget {
        let mut blocks: Vec<(Cx, CxMap)> = Vec::new();
        for (_, wc) in &aisle_cxs {
            for b in eng.hom_basis(wc, &y) {
                blocks.push((wc.clone(), b));
            }
        }
        prune_redundant_blocks(eng, &y, &mut blocks);
        if blocks.is_empty() {
            // y is in the co-aisle; finish up.
            let y_obj = eng.decompose(&y)?;
            if !ts.obj_in_coaisle(&y_obj) {
                return Err(Error::NonAisle(format!(
                    "cone {y_obj} is not in the co-aisle of {}",
                    ts.name
                )));
            }
            let (x_cx, back) = cx::cocone(&alpha);
            let x_obj = eng.decompose(&x_cx)?;
            if !ts.obj_in_aisle(&x_obj) {
                return Err(Error::NonAisle(format!(
                    "cocone {x_obj} of {t_label} is not in the aisle of {}",
                    ts.name
                )));
            }
            let tri = Triangle {
                x: x_obj,
                t: t_label.clone(),
                y: y_obj,
                x_to_t: Some(back),
                t_to_y: Some(alpha.clone()),
            };
            return Ok((tri, (y, alpha)));
        }
        let parts: Vec<Cx> = blocks.iter().map(|(c, _)| c.clone()).collect();
        let (a_sum, _, projs) = cx::sum(&parts);
        let mut f = cx::zero_map(&a_sum, &y);
        for ((_, b), p) in blocks.iter().zip(projs.iter()) {
            f = cx::add(&f, &cx::compose(b, p));
        }
        let (cn, incl, _) = cx::cone(&f);
        alpha = cx::compose(&incl, &alpha);
        let (ymin, fwd, _) = cx::minimize(&cn);
        alpha = cx::compose(&fwd, &alpha);
        y = ymin;
    }
    Err(Error::NonAisle(format!(
        "aisle approximation of {t_label} did not converge within {budget} steps for {}",
        ts.name
    )))
}

/// Keeps only a minimal approximating subfamily: a block is dropped when its
/// map factors, up to homotopy, through the map assembled from the others.
/// Without this, identity components keep resurrecting shifted copies and
/// the approximation never stabilizes.
fn prune_redundant_blocks(eng: &Engine, y: &Cx, blocks: &mut Vec<(Cx, CxMap)>) {
    let mut i = 0;
    while i < blocks.len() {
        let (wc, b) = blocks[i].clone();
        let rest: Vec<(Cx, CxMap)> = blocks
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, x)| x.clone())
            .collect();
        if rest.is_empty() {
            i += 1;
            continue;
        }
        let parts: Vec<Cx> = rest.iter().map(|(c, _)| c.clone()).collect();
        let (a_sum, _, projs) = cx::sum(&parts);
        let mut fp = cx::zero_map(&a_sum, y);
        for ((_, bb), p) in rest.iter().zip(projs.iter()) {
            fp = cx::add(&fp, &cx::compose(bb, p));
        }
        let lifts = eng.hom_basis(&wc, &a_sum);
        let candidates: Vec<CxMap> = lifts.iter().map(|h| cx::compose(&fp, h)).collect();
        let space = cx::hom_space(eng, &wc, y);
        if space.coords(&b, &candidates).is_some() {
            blocks.remove(i);
        } else {
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub stable: bool,
    pub bounded: bool,
    pub nondegenerate_on_window: bool,
}

/// Window-relative flags: stability under Σ, boundedness, non-degeneracy.
pub fn classify(eng: &Engine, ts: &TStructure) -> Flags {
    let win = &eng.window;
    let cl = &ts.aisle.closure;
    let stable = cl.iter().all(|x| {
        [-1, 1].into_iter().all(|d| {
            let t = x.shifted(d);
            !win.contains(&t) || cl.contains(&t)
        })
    });
    let span = (win.d_hi - win.d_lo) + 1;
    let in_some_translate = |set: &BTreeSet<IndecId>, t: &IndecId| -> bool {
        (-span..=span).any(|i| {
            let s = t.shifted(-i);
            win.contains(&s) && set.contains(&s)
        })
    };
    let bounded = win.indecs().iter().all(|t| in_some_translate(cl, t));
    let in_all_translates = |set: &BTreeSet<IndecId>, t: &IndecId| -> bool {
        (-span..=span).all(|i| {
            let s = t.shifted(-i);
            !win.contains(&s) || set.contains(&s)
        })
    };
    let degenerate = win
        .indecs()
        .iter()
        .any(|t| in_all_translates(cl, t) || in_all_translates(&ts.coaisle, t));
    Flags { stable, bounded, nondegenerate_on_window: !degenerate }
}

/// Structural checks on a truncation triangle x -> t -> y with its map:
/// every component x_i -> t is non-zero; for each summand x_1 the induced
/// map from the complement into cone(x_1 -> t) is non-zero; and a summand
/// with dim Hom(x_1, t) = 1 occurs with multiplicity one.
pub fn truncation_summand_checks(eng: &Engine, tri: &Triangle) -> Result<()> {
    let Some(f) = &tri.x_to_t else { return Ok(()) };
    if tri.x.is_zero() {
        return Ok(());
    }
    let t_cx = eng.cx_of_obj(&tri.t)?;
    let mut copies: Vec<(IndecId, CxMap)> = Vec::new();
    let mut seen: Vec<&IndecId> = Vec::new();
    for v in tri.x.summands() {
        if seen.contains(&v) {
            continue;
        }
        seen.push(v);
        let m = tri.x.summands().iter().filter(|s| *s == v).count();
        if m == 1 && eng.hom_dim_cx(&eng.cx_of(v)?, &t_cx) == 0 {
            return Err(Error::InvalidInput(format!(
                "summand {v} has no maps to the truncated object at all"
            )));
        }
        if eng.hom_dim_cx(&eng.cx_of(v)?, &t_cx) == 1 && m != 1 {
            return Err(Error::InvalidInput(format!(
                "summand {v} has a one-dimensional map space but multiplicity {m}"
            )));
        }
        let (_, incls) = eng.split_pairs(&f.src, v, m)?;
        for incl in incls {
            copies.push((v.clone(), incl));
        }
    }
    let components: Vec<CxMap> = copies.iter().map(|(_, i)| cx::compose(f, i)).collect();
    for ((v, _), comp) in copies.iter().zip(&components) {
        if eng.is_null(comp) {
            return Err(Error::InvalidInput(format!(
                "component map {v} -> t of the truncation is zero"
            )));
        }
    }
    if copies.len() >= 2 {
        for (i, comp_i) in components.iter().enumerate() {
            let (_, h, _) = cx::cone(comp_i);
            let complement_maps_in = components
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .any(|(_, fj)| !eng.is_null(&cx::compose(&h, fj)));
            if !complement_maps_in {
                let v = &copies[i].0;
                return Err(Error::InvalidInput(format!(
                    "complement of {v} maps by zero into the partial cone"
                )));
            }
        }
    }
    Ok(())
}
