//! Object engine: complexes of projectives over a finite type quiver.

pub mod cx;
pub mod rep;

pub use cx::{Cx, CxMap};

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::id::{IndecId, Obj};
use crate::matrix::QMat;
use crate::quiver::Quiver;
use crate::window::ARWindow;

/// Precomputed engine for one finite type window: a canonical complex per
/// indecomposable and the full table of hom dimensions between them.
pub struct Engine {
    pub window: ARWindow,
    pub quiver: Quiver,
    /// pmask[b][a]: Hom(P(a), P(b)) is non-zero.
    pmask: Vec<Vec<bool>>,
    reps: BTreeMap<Vec<u32>, rep::Rep>,
    cxs: BTreeMap<IndecId, Cx>,
    /// hom_table[i][j] = dim Hom(window[i], window[j]).
    hom_table: Vec<Vec<usize>>,
}

impl Engine {
    pub fn new(window: ARWindow) -> Result<Engine> {
        if !window.is_finite_type() {
            return Err(Error::NotFiniteType(format!(
                "object engine needs a finite type window, got {}",
                window.quiver.family
            )));
        }
        let quiver = window.quiver.clone();
        let pmask: Vec<Vec<bool>> = (0..quiver.n)
            .map(|b| {
                let dv = quiver.proj_dimvec(b);
                (0..quiver.n).map(|a| dv[a] == 1).collect()
            })
            .collect();
        let mut reps = BTreeMap::new();
        for root in quiver.positive_roots()? {
            let m = rep::rep_of(&quiver, &root);
            reps.insert(root, m);
        }
        let mut eng = Engine {
            window,
            quiver,
            pmask,
            reps,
            cxs: BTreeMap::new(),
            hom_table: Vec::new(),
        };
        let ids: Vec<IndecId> = eng.window.indecs().to_vec();
        for id in &ids {
            let c = eng.build_cx(id)?;
            eng.cxs.insert(id.clone(), c);
        }
        let n = ids.len();
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let dd = ids[j].degree() - ids[i].degree();
                if !(0..=1).contains(&dd) {
                    continue;
                }
                table[i][j] = eng.hom_dim_cx(&eng.cxs[&ids[i]], &eng.cxs[&ids[j]]);
            }
        }
        eng.hom_table = table;
        Ok(eng)
    }

    pub fn pmask_ok(&self, src_vert: usize, tgt_vert: usize) -> bool {
        self.pmask[tgt_vert][src_vert]
    }

    pub fn rep(&self, dimvec: &[u32]) -> Result<&rep::Rep> {
        self.reps
            .get(dimvec)
            .ok_or_else(|| Error::InvalidInput(format!("{dimvec:?} is not a positive root")))
    }

    /// Canonical complex for an indecomposable: the projective presentation
    /// of its module placed so that the module sits in the stated degree.
    pub fn cx_of(&self, id: &IndecId) -> Result<Cx> {
        if let Some(c) = self.cxs.get(id) {
            return Ok(c.clone());
        }
        self.build_cx(id)
    }

    fn build_cx(&self, id: &IndecId) -> Result<Cx> {
        let IndecId::FiniteType { degree, dimvec } = id else {
            return Err(Error::NotFiniteType(format!("{id}")));
        };
        let m = self.rep(dimvec)?;
        let pres = rep::presentation(&self.quiver, m);
        let c = if pres.p1.is_empty() {
            Cx { lo: 0, terms: vec![pres.p0], diffs: vec![] }
        } else {
            Cx { lo: -1, terms: vec![pres.p1, pres.p0], diffs: vec![pres.d] }
        };
        Ok(cx::shift(&c, *degree))
    }

    pub fn cx_of_obj(&self, obj: &Obj) -> Result<Cx> {
        let mut parts = Vec::new();
        for s in obj.summands() {
            parts.push(self.cx_of(s)?);
        }
        Ok(cx::sum(&parts).0)
    }

    pub fn hom_dim(&self, a: &IndecId, b: &IndecId) -> Result<usize> {
        if let (Some(i), Some(j)) = (self.window.index_of(a), self.window.index_of(b)) {
            return Ok(self.hom_table[i][j]);
        }
        if b.degree() - a.degree() < 0 || b.degree() - a.degree() > 1 {
            return Ok(0);
        }
        Ok(self.hom_dim_cx(&self.cx_of(a)?, &self.cx_of(b)?))
    }

    pub fn hom_dim_cx(&self, x: &Cx, y: &Cx) -> usize {
        cx::hom_space(self, x, y).dim()
    }

    /// Basis of chain maps x -> y spanning Hom modulo homotopy.
    pub fn hom_basis(&self, x: &Cx, y: &Cx) -> Vec<CxMap> {
        cx::hom_space(self, x, y).representatives()
    }

    pub fn is_null(&self, f: &CxMap) -> bool {
        cx::hom_space(self, &f.src, &f.tgt).is_boundary(f)
    }

    /// Coordinates of f in a basis of Hom(src, tgt) modulo homotopy.
    pub fn class_coords(&self, f: &CxMap, basis: &[CxMap]) -> Option<QMat> {
        cx::hom_space(self, &f.src, &f.tgt).coords(f, basis)
    }

    /// Scalar lambda with f homotopic to lambda times the identity, for an
    /// endomorphism of a complex with one dimensional endomorphism ring.
    pub fn endo_scalar(&self, f: &CxMap) -> crate::matrix::Q {
        assert_eq!(f.src, f.tgt);
        let idm = cx::identity_map(&f.src);
        let co = self
            .class_coords(f, std::slice::from_ref(&idm))
            .expect("endomorphism ring is larger than the scalars");
        co.at(0, 0).clone()
    }

    /// Multiplicity of each window indecomposable in x, by hom counting
    /// against the triangular hom table.
    pub fn decompose(&self, x: &Cx) -> Result<Obj> {
        let x = &cx::minimize(x).0;
        let ids = self.window.indecs();
        let n = ids.len();
        // Degrees with possible hom into or out of x.
        let (dlo, dhi) = cx::degree_span(x);
        let mut homs = vec![0usize; n];
        let relevant: Vec<usize> = (0..n)
            .filter(|&i| {
                let d = ids[i].degree();
                // A summand of x has its module degree between -dhi and -dlo.
                d >= -dhi - 1 && d <= -dlo + 1
            })
            .collect();
        for &i in &relevant {
            homs[i] = self.hom_dim_cx(&self.cxs[&ids[i]], x);
        }
        let mut mult = vec![0i64; n];
        let order = self.window.topo_order();
        for pos in (0..order.len()).rev() {
            let i = order[pos];
            if !relevant.contains(&i) {
                continue;
            }
            let mut rest = homs[i] as i64;
            for &j in &order[pos + 1..] {
                rest -= self.hom_table[i][j] as i64 * mult[j];
            }
            if rest < 0 {
                return Err(Error::WindowTooSmall(format!(
                    "hom counting went negative at {}",
                    ids[i]
                )));
            }
            mult[i] = rest;
        }
        // Full verification of the hom counts.
        for &i in &relevant {
            let total: i64 = (0..n).map(|j| self.hom_table[i][j] as i64 * mult[j]).sum();
            if total != homs[i] as i64 {
                return Err(Error::WindowTooSmall(format!(
                    "hom counting inconsistent at {}",
                    ids[i]
                )));
            }
        }
        // Class check in the Grothendieck group.
        let mut cls = vec![0i64; self.quiver.n];
        for (k, term) in x.terms.iter().enumerate() {
            let sign = if (x.lo + k as i32).rem_euclid(2) == 0 { 1 } else { -1 };
            for &v in term {
                for (w, &d) in self.quiver.proj_dimvec(v).iter().enumerate() {
                    cls[w] += sign * d as i64;
                }
            }
        }
        let mut cls2 = vec![0i64; self.quiver.n];
        for (i, &m) in mult.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let IndecId::FiniteType { degree, dimvec } = &ids[i] else { unreachable!() };
            let sign = if degree.rem_euclid(2) == 0 { 1 } else { -1 };
            for (w, &d) in dimvec.iter().enumerate() {
                cls2[w] += sign * m * d as i64;
            }
        }
        if cls != cls2 {
            return Err(Error::WindowTooSmall(
                "class of the object is not accounted for by window indecomposables".into(),
            ));
        }
        let mut obj = Obj::zero();
        for (i, &m) in mult.iter().enumerate() {
            for _ in 0..m {
                obj.push(ids[i].clone());
            }
        }
        Ok(obj)
    }

    /// Projections y -> V and inclusions V -> y for the m copies of the
    /// indecomposable V inside y, normalized so that p_i q_j = delta_ij
    /// modulo homotopy.
    pub fn split_pairs(
        &self,
        y: &Cx,
        v: &IndecId,
        m: usize,
    ) -> Result<(Vec<CxMap>, Vec<CxMap>)> {
        let vc = self.cx_of(v)?;
        let ps = self.hom_basis(y, &vc);
        let qs = self.hom_basis(&vc, y);
        // Pairing matrix of identity coefficients of p q.
        let idm = cx::identity_map(&vc);
        let mut pair = QMat::zero(ps.len(), qs.len());
        for (i, p) in ps.iter().enumerate() {
            for (j, qq) in qs.iter().enumerate() {
                let comp = cx::compose(p, qq);
                let co = self
                    .class_coords(&comp, std::slice::from_ref(&idm))
                    .expect("endomorphism space of an indecomposable not spanned by identity");
                *pair.at_mut(i, j) = co.at(0, 0).clone();
            }
        }
        if pair.rank() < m {
            return Err(Error::InvalidInput(format!(
                "pairing rank {} below multiplicity {m} of {v}",
                pair.rank()
            )));
        }
        // Row and column operations to reach an identity block of size m.
        // Work with explicit transformation matrices: find U (m x |ps|) and
        // W (|qs| x m) with U pair W = I.
        let (u, w) = diagonalize_pairing(&pair, m);
        let mut projs = Vec::new();
        let mut incls = Vec::new();
        for r in 0..m {
            let mut p = cx::zero_map(y, &vc);
            for (i, b) in ps.iter().enumerate() {
                if !u.at(r, i).is_zero() {
                    p = cx::add(&p, &cx::scale(b, u.at(r, i)));
                }
            }
            projs.push(p);
            let mut qq = cx::zero_map(&vc, y);
            for (j, b) in qs.iter().enumerate() {
                if !w.at(j, r).is_zero() {
                    qq = cx::add(&qq, &cx::scale(b, w.at(j, r)));
                }
            }
            incls.push(qq);
        }
        Ok((projs, incls))
    }
}


/// U (m x rows), W (cols x m) with U * pair * W = identity of size m.
fn diagonalize_pairing(pair: &QMat, m: usize) -> (QMat, QMat) {
    // Greedy pivoting: repeatedly pick a non-zero entry of the reduced
    // pairing, normalize, and clear its row and column.
    let mut u = QMat::identity(pair.rows);
    let mut w = QMat::identity(pair.cols);
    let mut cur = pair.clone();
    let mut chosen_rows = Vec::new();
    let mut chosen_cols = Vec::new();
    for _ in 0..m {
        let mut found = None;
        'scan: for r in 0..cur.rows {
            if chosen_rows.contains(&r) {
                continue;
            }
            for c in 0..cur.cols {
                if chosen_cols.contains(&c) {
                    continue;
                }
                if !cur.at(r, c).is_zero() {
                    found = Some((r, c));
                    break 'scan;
                }
            }
        }
        let (r, c) = found.expect("pairing rank dropped below multiplicity");
        // Normalize the pivot to 1 by scaling row r of u.
        let inv = cur.at(r, c).clone().recip();
        for k in 0..u.cols {
            let vv = u.at(r, k) * &inv;
            *u.at_mut(r, k) = vv;
        }
        for k in 0..cur.cols {
            let vv = cur.at(r, k) * &inv;
            *cur.at_mut(r, k) = vv;
        }
        // Clear column c from other rows and row r from other columns.
        for rr in 0..cur.rows {
            if rr != r && !cur.at(rr, c).is_zero() {
                let f = cur.at(rr, c).clone();
                for k in 0..cur.cols {
                    let vv = cur.at(rr, k) - &(cur.at(r, k) * &f);
                    *cur.at_mut(rr, k) = vv;
                }
                for k in 0..u.cols {
                    let vv = u.at(rr, k) - &(u.at(r, k) * &f);
                    *u.at_mut(rr, k) = vv;
                }
            }
        }
        for cc in 0..cur.cols {
            if cc != c && !cur.at(r, cc).is_zero() {
                let f = cur.at(r, cc).clone();
                for k in 0..cur.rows {
                    let vv = cur.at(k, cc) - &(cur.at(k, c) * &f);
                    *cur.at_mut(k, cc) = vv;
                }
                for k in 0..w.rows {
                    let vv = w.at(k, cc) - &(w.at(k, c) * &f);
                    *w.at_mut(k, cc) = vv;
                }
            }
        }
        chosen_rows.push(r);
        chosen_cols.push(c);
    }
    let mut usel = QMat::zero(m, pair.rows);
    let mut wsel = QMat::zero(pair.cols, m);
    for (k, (&r, &c)) in chosen_rows.iter().zip(chosen_cols.iter()).enumerate() {
        for j in 0..pair.rows {
            *usel.at_mut(k, j) = u.at(r, j).clone();
        }
        for j in 0..pair.cols {
            *wsel.at_mut(j, k) = w.at(j, c).clone();
        }
    }
    (usel, wsel)
}
