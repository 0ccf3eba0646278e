//! Iterated truncation against a cyclic list of t-structures.
//!
//! The naive run truncates the previous cone again and again. The refined
//! run additionally strips, at every step, the summands of the cone that the
//! composite map from the original object misses; only the part genuinely
//! reached is kept and the rest is recorded as waste.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::aisle::{
    aisle_closure, extension_closure, right_orthogonal, truncate_cx, TStructure, Triangle,
    Validity,
};
use crate::engine::{cx, Cx, CxMap, Engine};
use crate::error::{Error, Result};
use crate::id::{IndecId, Obj};
use crate::matrix::QMat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    /// First index from which the cone stays constant for a full period.
    Terminated(usize),
    /// A later cone is a shift of an earlier one, phase aligned.
    CertifiedNonTerminating { at: usize, period: usize, shift: i32 },
    BudgetExhausted(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStep {
    pub n: usize,
    pub phase: usize,
    pub x: Obj,
    pub y: Obj,
    pub waste: Obj,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub input: Obj,
    pub order: Vec<String>,
    pub steps: Vec<RunStep>,
    pub status: RunStatus,
}

impl RunTrace {
    pub fn terminated(&self) -> bool {
        matches!(self.status, RunStatus::Terminated(_))
    }

    /// y after `i` steps, one-based; y_0 is the input itself.
    pub fn y_at(&self, i: usize) -> Option<&Obj> {
        if i == 0 {
            Some(&self.input)
        } else {
            self.steps.get(i - 1).map(|s| &s.y)
        }
    }
}

pub fn default_budget(eng: &Engine, d: usize) -> usize {
    8 * d * eng.window.indecs().len()
}

fn all_sigma_stable(eng: &Engine, order: &[TStructure]) -> bool {
    order.iter().all(|ts| crate::aisle::classify(eng, ts).stable)
}

/// Termination and certification logic shared by the two runs. Returns the
/// status if the y-sequence (one Obj per completed step) is decided.
fn run_status(
    ys: &[Obj],
    d: usize,
    sigma_stable: bool,
) -> Option<RunStatus> {
    let n = ys.len();
    // Constant over a full period: y_{n0} = ... = y_{n0 + d}.
    if n >= d + 1 {
        let tail = &ys[n - d - 1..];
        if tail.iter().all(|y| y == &tail[0]) {
            // Walk back to the first index of the constant run.
            let mut n0 = n - d - 1;
            while n0 > 0 && ys[n0 - 1] == ys[n - 1] {
                n0 -= 1;
            }
            return Some(RunStatus::Terminated(n0));
        }
    }
    // Phase-aligned repetition up to a shift.
    let last = n - 1;
    for earlier in (0..last).rev() {
        if (last - earlier) % d != 0 || ys[earlier].is_zero() {
            continue;
        }
        if let Some(m) = ys[last].shift_matching(&ys[earlier]) {
            if m == 0 || sigma_stable {
                return Some(RunStatus::CertifiedNonTerminating {
                    at: earlier,
                    period: last - earlier,
                    shift: m,
                });
            }
        }
    }
    None
}

/// The naive run: y_n is the truncation cone of y_{n-1} with respect to the
/// n-th t-structure, cyclically; x_n the cocone of the composite from t.
pub fn naive_run(
    eng: &Engine,
    t: &Obj,
    order: &[TStructure],
    budget: usize,
) -> Result<RunTrace> {
    assert!(!order.is_empty());
    let d = order.len();
    let sigma_stable = all_sigma_stable(eng, order);
    let t_cx = eng.cx_of_obj(t)?;
    let (mut y, mut alpha, _) = cx::minimize(&t_cx);
    let mut ys: Vec<Obj> = Vec::new();
    let mut steps = Vec::new();
    for n in 0..budget {
        let phase = n % d;
        let (_, (y_new, beta)) =
            truncate_cx(eng, &y, &eng.decompose(&y)?, &order[phase])?;
        alpha = cx::compose(&beta, &alpha);
        y = y_new;
        let y_obj = eng.decompose(&y)?;
        let (x_cx, _) = cx::cocone(&alpha);
        let x_obj = eng.decompose(&x_cx)?;
        ys.push(y_obj.clone());
        steps.push(RunStep { n, phase, x: x_obj, y: y_obj, waste: Obj::zero() });
        if let Some(status) = run_status(&ys, d, sigma_stable) {
            return Ok(RunTrace {
                input: t.clone(),
                order: order.iter().map(|o| o.name.clone()).collect(),
                steps,
                status,
            });
        }
    }
    Ok(RunTrace {
        input: t.clone(),
        order: order.iter().map(|o| o.name.clone()).collect(),
        steps,
        status: RunStatus::BudgetExhausted(format!("no verdict after {budget} steps")),
    })
}

/// The refined run. At every step the truncation cone is decomposed; the
/// summand copies whose component of the composite map from t vanishes are
/// moved to the waste, and the run continues with the reached part only.
pub fn refined_run(
    eng: &Engine,
    t: &Obj,
    order: &[TStructure],
    budget: usize,
) -> Result<RunTrace> {
    assert!(!order.is_empty());
    let d = order.len();
    let sigma_stable = all_sigma_stable(eng, order);
    let t_cx = cx::minimize(&eng.cx_of_obj(t)?).0;
    let (mut y, mut alpha, _) = cx::minimize(&t_cx);
    let mut ys: Vec<Obj> = Vec::new();
    let mut steps = Vec::new();
    for n in 0..budget {
        let phase = n % d;
        let (_, (y_trunc, beta)) =
            truncate_cx(eng, &y, &eng.decompose(&y)?, &order[phase])?;
        let alpha_tilde = cx::compose(&beta, &alpha);
        let trunc_obj = eng.decompose(&y_trunc)?;
        let (y_next, alpha_next, waste) =
            strip_waste(eng, &t_cx, &y_trunc, &alpha_tilde, &trunc_obj)?;
        y = y_next;
        alpha = alpha_next;
        let y_obj = eng.decompose(&y)?;
        let (x_cx, _) = cx::cocone(&alpha);
        let x_obj = eng.decompose(&x_cx)?;
        ys.push(y_obj.clone());
        steps.push(RunStep { n, phase, x: x_obj, y: y_obj, waste });
        if let Some(status) = run_status(&ys, d, sigma_stable) {
            return Ok(RunTrace {
                input: t.clone(),
                order: order.iter().map(|o| o.name.clone()).collect(),
                steps,
                status,
            });
        }
    }
    Ok(RunTrace {
        input: t.clone(),
        order: order.iter().map(|o| o.name.clone()).collect(),
        steps,
        status: RunStatus::BudgetExhausted(format!("no verdict after {budget} steps")),
    })
}

/// Splits y_trunc into the part reached by alpha_tilde and the waste, and
/// rebuilds the reached part as a canonical direct sum with an explicit map
/// from t. Per isotypic block the kept multiplicity is the rank of the
/// component matrix of alpha_tilde in a hom basis.
fn strip_waste(
    eng: &Engine,
    t_cx: &Cx,
    y_trunc: &Cx,
    alpha_tilde: &CxMap,
    trunc_obj: &Obj,
) -> Result<(Cx, CxMap, Obj)> {
    // Distinct summands with multiplicities.
    let mut kinds: Vec<(IndecId, usize)> = Vec::new();
    for s in trunc_obj.summands() {
        match kinds.last_mut() {
            Some((k, m)) if k == s => *m += 1,
            _ => kinds.push((s.clone(), 1)),
        }
    }
    let mut kept_parts: Vec<Cx> = Vec::new();
    let mut kept_rows: Vec<(IndecId, Vec<QMat>)> = Vec::new();
    let mut waste = Obj::zero();
    for (v, m) in &kinds {
        let vc = eng.cx_of(v)?;
        let basis = eng.hom_basis(t_cx, &vc);
        let h = basis.len();
        let (ps, _) = eng.split_pairs(y_trunc, v, *m)?;
        let mut comp = QMat::zero(*m, h);
        for (i, p) in ps.iter().enumerate() {
            let gi = cx::compose(p, alpha_tilde);
            let co = eng
                .class_coords(&gi, &basis)
                .expect("component not expressible in hom basis");
            for b in 0..h {
                *comp.at_mut(i, b) = co.at(b, 0).clone();
            }
        }
        let mut red = comp.clone();
        red.rref();
        let rank = {
            let mut r = 0;
            for i in 0..red.rows {
                if (0..red.cols).any(|c| !red.at(i, c).is_zero()) {
                    r += 1;
                }
            }
            r
        };
        for _ in rank..*m {
            waste.push(v.clone());
        }
        let mut rows = Vec::new();
        for i in 0..rank {
            rows.push(red.submatrix(i, 0, 1, h));
        }
        if rank > 0 {
            kept_rows.push((v.clone(), rows));
            for _ in 0..rank {
                kept_parts.push(vc.clone());
            }
        }
    }
    let (y_next, incls, _) = cx::sum(&kept_parts);
    let mut alpha_next = cx::zero_map(t_cx, &y_next);
    let mut block = 0;
    for (v, rows) in &kept_rows {
        let vc = eng.cx_of(v)?;
        let basis = eng.hom_basis(t_cx, &vc);
        for row in rows {
            let mut g = cx::zero_map(t_cx, &vc);
            for (b, bm) in basis.iter().enumerate() {
                if !row.at(0, b).is_zero() {
                    g = cx::add(&g, &cx::scale(bm, row.at(0, b)));
                }
            }
            alpha_next = cx::add(&alpha_next, &cx::compose(&incls[block], &g));
            block += 1;
        }
    }
    Ok((y_next, alpha_next, waste))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AverageReport {
    pub validated: bool,
    /// Indecomposable whose refined run failed to terminate, with its status.
    pub witness: Option<(IndecId, RunStatus)>,
}

/// Averaged pair: the aisle generated by the union of the aisles, with the
/// intersection of the co-aisles. Validation runs the refined algorithm on
/// every interior window indecomposable.
pub fn average_aisles(
    eng: &Engine,
    order: &[TStructure],
) -> Result<(TStructure, AverageReport)> {
    assert!(!order.is_empty());
    if order.len() == 1 {
        return Ok((order[0].clone(), AverageReport { validated: true, witness: None }));
    }
    let mut union: BTreeSet<IndecId> = BTreeSet::new();
    for ts in order {
        union.extend(ts.aisle.closure.iter().cloned());
    }
    let closure = aisle_closure(eng, &union)?;
    let mut coaisle: BTreeSet<IndecId> = order[0].coaisle.clone();
    for ts in &order[1..] {
        coaisle = coaisle.intersection(&ts.coaisle).cloned().collect();
    }
    let budget = default_budget(eng, order.len());
    let mut witness = None;
    for id in eng.window.indecs() {
        if !eng.window.interior_degrees().contains(&id.degree()) {
            continue;
        }
        let trace = refined_run(eng, &Obj::one(id.clone()), order, budget)?;
        if !trace.terminated() {
            witness = Some((id.clone(), trace.status));
            break;
        }
    }
    let validated = witness.is_none();
    let ts = TStructure {
        name: "average".into(),
        aisle: crate::aisle::AislePresentation { generators: union, closure },
        coaisle,
        validity: if validated { Validity::Validated } else { Validity::Unvalidated },
    };
    Ok((ts, AverageReport { validated, witness }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectReport {
    pub validated: bool,
    pub witness: Option<IndecId>,
    /// True when the extension closure of the union of co-aisles equals the
    /// right orthogonal of the intersected aisle.
    pub coaisle_agrees: bool,
}

/// Intersection pair: the intersection of the aisles with the extension
/// closure of the union of co-aisles; validated by exhaustive truncation.
pub fn intersect_aisles(
    eng: &Engine,
    order: &[TStructure],
) -> Result<(TStructure, IntersectReport)> {
    assert!(!order.is_empty());
    if order.len() == 1 {
        return Ok((
            order[0].clone(),
            IntersectReport { validated: true, witness: None, coaisle_agrees: true },
        ));
    }
    let mut closure: BTreeSet<IndecId> = order[0].aisle.closure.clone();
    for ts in &order[1..] {
        closure = closure.intersection(&ts.aisle.closure).cloned().collect();
    }
    let mut co_union: BTreeSet<IndecId> = BTreeSet::new();
    for ts in order {
        co_union.extend(ts.coaisle.iter().cloned());
    }
    // Close under extensions and downward shifts within the window.
    let mut co_closed = extension_closure(eng, &co_union)?;
    loop {
        let mut grown = false;
        for s in co_closed.clone() {
            let dn = s.shifted(-1);
            if eng.window.contains(&dn) && co_closed.insert(dn) {
                grown = true;
            }
        }
        if !grown {
            break;
        }
        co_closed = extension_closure(eng, &co_closed)?;
    }
    let ortho = right_orthogonal(eng, &closure)?;
    let coaisle_agrees = co_closed == ortho;
    let mut ts = TStructure {
        name: "intersection".into(),
        aisle: crate::aisle::AislePresentation { generators: closure.clone(), closure },
        coaisle: ortho,
        validity: Validity::Unvalidated,
    };
    let witness = match ts.validate(eng) {
        Ok(()) => None,
        Err(Error::NonAisle(w)) => {
            // Witness from the message is awkward; re-scan for the object.
            let mut found = None;
            for id in eng.window.indecs() {
                if !eng.window.interior_degrees().contains(&id.degree()) {
                    continue;
                }
                if crate::aisle::truncate(eng, &Obj::one(id.clone()), &ts).is_err() {
                    found = Some(id.clone());
                    break;
                }
            }
            let _ = w;
            found.or_else(|| eng.window.indecs().first().cloned())
        }
        Err(e) => return Err(e),
    };
    let validated = witness.is_none();
    Ok((ts, IntersectReport { validated, witness, coaisle_agrees }))
}

/// Lemma check: with k = 1 modulo the period, the cone after k + n steps is
/// a direct summand of the cone after n further steps started from the
/// intermediate cone (with the phase rotated accordingly).
pub fn check_shift_lemma(
    eng: &Engine,
    t: &Obj,
    order: &[TStructure],
    k: usize,
    n: usize,
) -> Result<bool> {
    let d = order.len();
    assert_eq!(k % d, 1 % d, "k must be 1 modulo the period");
    let budget = default_budget(eng, d).max(k + n + d + 1);
    let trace = refined_run(eng, t, order, budget)?;
    let need = k + n;
    let y_full = match trace.y_at(need) {
        Some(y) => y.clone(),
        None => {
            // The run decided before reaching k + n steps; the cone is
            // eventually constant, so extend by the final value.
            match trace.status {
                RunStatus::Terminated(_) => trace.steps.last().unwrap().y.clone(),
                _ => {
                    return Err(Error::BudgetExhausted(format!(
                        "run on {t} undecided before step {need}"
                    )))
                }
            }
        }
    };
    let t_k = match trace.y_at(k) {
        Some(y) => y.clone(),
        None => trace.steps.last().unwrap().y.clone(),
    };
    if n == 0 {
        return Ok(t_k.contains(&y_full) || y_full == t_k);
    }
    let mut rotated: Vec<TStructure> = Vec::with_capacity(d);
    for j in 0..d {
        rotated.push(order[(k + j) % d].clone());
    }
    let trace2 = refined_run(eng, &t_k, &rotated, budget)?;
    let y_part = match trace2.y_at(n) {
        Some(y) => y.clone(),
        None => match trace2.status {
            RunStatus::Terminated(_) => trace2.steps.last().unwrap().y.clone(),
            _ => {
                return Err(Error::BudgetExhausted(format!(
                    "run on {t_k} undecided before step {n}"
                )))
            }
        },
    };
    Ok(y_part.contains(&y_full))
}

/// Truncation triangle produced by a terminated refined run.
pub fn refined_triangle(trace: &RunTrace) -> Option<Triangle> {
    match trace.status {
        RunStatus::Terminated(n0) => {
            let s = &trace.steps[n0];
            Some(Triangle {
                x: s.x.clone(),
                t: trace.input.clone(),
                y: s.y.clone(),
                x_to_t: None,
                t_to_y: None,
            })
        }
        _ => None,
    }
}
