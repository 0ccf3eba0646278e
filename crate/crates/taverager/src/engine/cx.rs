//! Bounded complexes of indecomposable projectives, with all maps taken up
//! to homotopy.
//!
//! Over a tree quiver every Hom space between indecomposable projectives is
//! at most one dimensional, so a map between finite sums of projectives is a
//! scalar matrix subject to a support mask, and composition is plain matrix
//! multiplication. This makes cones, homotopies and hom spaces uniform
//! linear algebra over the rationals.

use num_traits::Zero;

use crate::matrix::{QMat, Q};

use super::Engine;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cx {
    pub lo: i32,
    /// terms[k]: projective vertices sitting in cohomological degree lo + k.
    pub terms: Vec<Vec<usize>>,
    /// diffs[k]: terms[k] -> terms[k+1].
    pub diffs: Vec<QMat>,
}

impl Cx {
    pub fn zero() -> Cx {
        Cx::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_empty())
    }

    pub fn term(&self, deg: i32) -> &[usize] {
        let k = deg - self.lo;
        if k < 0 || k as usize >= self.terms.len() {
            &[]
        } else {
            &self.terms[k as usize]
        }
    }

    pub fn diff(&self, deg: i32) -> QMat {
        let k = deg - self.lo;
        if k < 0 || k as usize >= self.diffs.len() {
            QMat::zero(self.term(deg + 1).len(), self.term(deg).len())
        } else {
            self.diffs[k as usize].clone()
        }
    }

    pub fn total_copies(&self) -> usize {
        self.terms.iter().map(|t| t.len()).sum()
    }
}

/// Trims empty boundary terms; the zero complex becomes the canonical one.
pub fn normalize(x: &Cx) -> Cx {
    let mut lo = x.lo;
    let mut terms = x.terms.clone();
    let mut diffs = x.diffs.clone();
    while terms.first().is_some_and(|t| t.is_empty()) {
        terms.remove(0);
        if !diffs.is_empty() {
            diffs.remove(0);
        }
        lo += 1;
    }
    while terms.last().is_some_and(|t| t.is_empty()) {
        terms.pop();
        diffs.pop();
    }
    if terms.is_empty() {
        return Cx::zero();
    }
    Cx { lo, terms, diffs }
}

/// Inclusive cohomological degree span of the non-empty terms; (0, -1) for 0.
pub fn degree_span(x: &Cx) -> (i32, i32) {
    let n = normalize(x);
    if n.terms.is_empty() {
        (0, -1)
    } else {
        (n.lo, n.lo + n.terms.len() as i32 - 1)
    }
}

/// Sigma^n: degrees drop by n, differentials pick up (-1)^n.
pub fn shift(x: &Cx, n: i32) -> Cx {
    let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
    Cx {
        lo: x.lo - n,
        terms: x.terms.clone(),
        diffs: x
            .diffs
            .iter()
            .map(|d| if sign == 1 { d.clone() } else { d.neg() })
            .collect(),
    }
}

/// A chain map, stored with its endpoints. Only non-zero parts are kept.
#[derive(Debug, Clone)]
pub struct CxMap {
    pub src: Cx,
    pub tgt: Cx,
    /// parts[deg]: tgt.term(deg) x src.term(deg).
    pub parts: std::collections::BTreeMap<i32, QMat>,
}

impl CxMap {
    pub fn part(&self, deg: i32) -> QMat {
        match self.parts.get(&deg) {
            Some(m) => m.clone(),
            None => QMat::zero(self.tgt.term(deg).len(), self.src.term(deg).len()),
        }
    }

    pub fn is_zero_on_the_nose(&self) -> bool {
        self.parts.values().all(|m| m.is_zero())
    }
}

pub fn zero_map(src: &Cx, tgt: &Cx) -> CxMap {
    CxMap { src: src.clone(), tgt: tgt.clone(), parts: Default::default() }
}

pub fn identity_map(x: &Cx) -> CxMap {
    let mut parts = std::collections::BTreeMap::new();
    let (lo, hi) = degree_span(x);
    for deg in lo..=hi {
        let n = x.term(deg).len();
        if n > 0 {
            parts.insert(deg, QMat::identity(n));
        }
    }
    CxMap { src: x.clone(), tgt: x.clone(), parts }
}

pub fn add(f: &CxMap, g: &CxMap) -> CxMap {
    assert_eq!(f.src, g.src);
    assert_eq!(f.tgt, g.tgt);
    let mut parts = std::collections::BTreeMap::new();
    let degs: std::collections::BTreeSet<i32> =
        f.parts.keys().chain(g.parts.keys()).cloned().collect();
    for deg in degs {
        let m = f.part(deg).add(&g.part(deg));
        if !m.is_zero() {
            parts.insert(deg, m);
        }
    }
    CxMap { src: f.src.clone(), tgt: f.tgt.clone(), parts }
}

pub fn scale(f: &CxMap, s: &Q) -> CxMap {
    let mut parts = std::collections::BTreeMap::new();
    for (&deg, m) in &f.parts {
        let m = m.scale(s);
        if !m.is_zero() {
            parts.insert(deg, m);
        }
    }
    CxMap { src: f.src.clone(), tgt: f.tgt.clone(), parts }
}

/// g after f.
pub fn compose(g: &CxMap, f: &CxMap) -> CxMap {
    assert_eq!(g.src, f.tgt, "composition endpoint mismatch");
    let mut parts = std::collections::BTreeMap::new();
    for (&deg, fm) in &f.parts {
        let gm = g.part(deg);
        let m = gm.mul(fm);
        if !m.is_zero() {
            parts.insert(deg, m);
        }
    }
    CxMap { src: f.src.clone(), tgt: g.tgt.clone(), parts }
}

pub fn shift_map(f: &CxMap, n: i32) -> CxMap {
    let parts = f.parts.iter().map(|(&d, m)| (d - n, m.clone())).collect();
    CxMap { src: shift(&f.src, n), tgt: shift(&f.tgt, n), parts }
}

/// Verifies d^2 = 0 and the support mask; meant for debug assertions.
pub fn check_cx(eng: &Engine, x: &Cx) {
    for k in 0..x.diffs.len() {
        let d = &x.diffs[k];
        assert_eq!(d.rows, x.terms[k + 1].len());
        assert_eq!(d.cols, x.terms[k].len());
        for r in 0..d.rows {
            for c in 0..d.cols {
                if !d.at(r, c).is_zero() {
                    assert!(eng.pmask_ok(x.terms[k][c], x.terms[k + 1][r]));
                }
            }
        }
        if k + 1 < x.diffs.len() {
            assert!(x.diffs[k + 1].mul(d).is_zero(), "d^2 != 0");
        }
    }
}

pub fn check_map(f: &CxMap) {
    let (lo, hi) = degree_span(&f.src);
    for deg in lo..=hi {
        let lhs = f.tgt.diff(deg).mul(&f.part(deg));
        let rhs = f.part(deg + 1).mul(&f.src.diff(deg));
        assert_eq!(lhs, rhs, "not a chain map at degree {deg}");
    }
}

/// Direct sum with inclusions and projections of the parts.
pub fn sum(parts: &[Cx]) -> (Cx, Vec<CxMap>, Vec<CxMap>) {
    if parts.is_empty() {
        return (Cx::zero(), vec![], vec![]);
    }
    let spans: Vec<(i32, i32)> = parts.iter().map(degree_span).collect();
    let lo = spans.iter().map(|s| s.0).min().unwrap();
    let hi = spans.iter().map(|s| s.1).max().unwrap();
    if hi < lo {
        return (Cx::zero(), parts.iter().map(|p| zero_map(p, &Cx::zero())).collect(),
                parts.iter().map(|p| zero_map(&Cx::zero(), p)).collect());
    }
    let mut terms = Vec::new();
    let mut diffs = Vec::new();
    for deg in lo..=hi {
        let mut t = Vec::new();
        for p in parts {
            t.extend_from_slice(p.term(deg));
        }
        terms.push(t);
        if deg < hi {
            let mut d: Option<QMat> = None;
            for p in parts {
                let pd = p.diff(deg);
                d = Some(match d {
                    None => pd,
                    Some(acc) => acc.block_diag(&pd),
                });
            }
            diffs.push(d.unwrap());
        }
    }
    let total = Cx { lo, terms, diffs };
    let mut incls = Vec::new();
    let mut projs = Vec::new();
    for (pi, p) in parts.iter().enumerate() {
        let mut iparts = std::collections::BTreeMap::new();
        let mut pparts = std::collections::BTreeMap::new();
        for deg in lo..=hi {
            let mine = p.term(deg).len();
            if mine == 0 {
                continue;
            }
            let before: usize = parts[..pi].iter().map(|x| x.term(deg).len()).sum();
            let all = total.term(deg).len();
            let inc = QMat::from_fn(all, mine, |r, c| {
                if r == before + c { crate::matrix::q(1) } else { Q::zero() }
            });
            iparts.insert(deg, inc.clone());
            pparts.insert(deg, inc.transpose());
        }
        incls.push(CxMap { src: p.clone(), tgt: total.clone(), parts: iparts });
        projs.push(CxMap { src: total.clone(), tgt: p.clone(), parts: pparts });
    }
    (total, incls, projs)
}

/// Cone of a chain map, with the triangle maps tgt -> cone -> shift(src, 1).
pub fn cone(f: &CxMap) -> (Cx, CxMap, CxMap) {
    let x = &f.src;
    let y = &f.tgt;
    let (xlo, xhi) = degree_span(x);
    let (ylo, yhi) = degree_span(y);
    let lo = (xlo - 1).min(ylo);
    let hi = (xhi - 1).max(yhi);
    let mut terms = Vec::new();
    let mut diffs = Vec::new();
    for deg in lo..=hi {
        let mut t: Vec<usize> = x.term(deg + 1).to_vec();
        t.extend_from_slice(y.term(deg));
        terms.push(t);
    }
    for deg in lo..hi {
        let dx = x.diff(deg + 1).neg();
        let dy = y.diff(deg);
        let fm = f.part(deg + 1);
        let top = dx.hstack(&QMat::zero(dx.rows, dy.cols));
        let bot = fm.hstack(&dy);
        diffs.push(top.vstack(&bot));
    }
    let c = Cx { lo, terms, diffs };
    // y -> cone: bottom inclusion.
    let mut iparts = std::collections::BTreeMap::new();
    let mut pparts = std::collections::BTreeMap::new();
    for deg in lo..=hi {
        let nx = x.term(deg + 1).len();
        let ny = y.term(deg).len();
        let all = nx + ny;
        if ny > 0 {
            iparts.insert(
                deg,
                QMat::from_fn(all, ny, |r, cc| {
                    if r == nx + cc { crate::matrix::q(1) } else { Q::zero() }
                }),
            );
        }
        if nx > 0 {
            pparts.insert(
                deg,
                QMat::from_fn(nx, all, |r, cc| {
                    if cc == r { crate::matrix::q(1) } else { Q::zero() }
                }),
            );
        }
    }
    let incl = CxMap { src: y.clone(), tgt: c.clone(), parts: iparts };
    let proj = CxMap { src: c.clone(), tgt: shift(x, 1), parts: pparts };
    (c, incl, proj)
}

/// Cocone: shift of the cone down by one, with the map cocone -> src.
pub fn cocone(f: &CxMap) -> (Cx, CxMap) {
    let (c, _, proj) = cone(f);
    let down = shift_map(&proj, -1);
    let _ = c;
    (down.src.clone(), down)
}

/// The hom space between two complexes: cycle space of chain maps and the
/// subspace of boundaries, in shared flat coordinates.
pub struct HomSpace {
    src: Cx,
    tgt: Cx,
    /// Flat coordinates: one per mask-allowed entry (deg, row, col).
    vars: Vec<(i32, usize, usize)>,
    /// Columns: basis of the space of chain maps.
    z: QMat,
    /// Columns: spanning set of the null-homotopic chain maps.
    b: QMat,
}

pub fn hom_space(eng: &Engine, x: &Cx, y: &Cx) -> HomSpace {
    let (xlo, xhi) = degree_span(x);
    let (ylo, yhi) = degree_span(y);
    let lo = xlo.min(ylo) - 1;
    let hi = xhi.max(yhi) + 1;
    let mut vars: Vec<(i32, usize, usize)> = Vec::new();
    for deg in lo..=hi {
        for (r, &tv) in y.term(deg).iter().enumerate() {
            for (c, &sv) in x.term(deg).iter().enumerate() {
                if eng.pmask_ok(sv, tv) {
                    vars.push((deg, r, c));
                }
            }
        }
    }
    let vix = |deg: i32, r: usize, c: usize| -> Option<usize> {
        vars.iter().position(|&(d, rr, cc)| d == deg && rr == r && cc == c)
    };
    // Chain condition rows: d_y f - f d_x = 0 per degree and matrix entry.
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for deg in lo..hi {
        let dx = x.diff(deg);
        let dy = y.diff(deg);
        let nrows = y.term(deg + 1).len();
        let ncols = x.term(deg).len();
        for r in 0..nrows {
            for c in 0..ncols {
                let mut row = vec![Q::zero(); vars.len()];
                let mut nontrivial = false;
                // (d_y f)(r, c) = sum_k dy(r, k) f_deg(k, c)
                for k in 0..y.term(deg).len() {
                    if !dy.at(r, k).is_zero() {
                        if let Some(i) = vix(deg, k, c) {
                            row[i] += dy.at(r, k).clone();
                            nontrivial = true;
                        }
                    }
                }
                // (f d_x)(r, c) = sum_k f_{deg+1}(r, k) dx(k, c)
                for k in 0..x.term(deg + 1).len() {
                    if !dx.at(k, c).is_zero() {
                        if let Some(i) = vix(deg + 1, r, k) {
                            row[i] -= dx.at(k, c).clone();
                            nontrivial = true;
                        }
                    }
                }
                if nontrivial {
                    rows.push(row);
                }
            }
        }
    }
    let sys = QMat::from_fn(rows.len(), vars.len(), |r, c| rows[r][c].clone());
    let z = sys.nullspace();
    // Homotopy variables: h_deg: x.term(deg) -> y.term(deg - 1), allowed
    // entries only; boundary = d_y h + h d_x.
    let mut hvars: Vec<(i32, usize, usize)> = Vec::new();
    for deg in lo..=hi {
        for (r, &tv) in y.term(deg - 1).iter().enumerate() {
            for (c, &sv) in x.term(deg).iter().enumerate() {
                if eng.pmask_ok(sv, tv) {
                    hvars.push((deg, r, c));
                }
            }
        }
    }
    let mut b = QMat::zero(vars.len(), hvars.len());
    for (hcol, &(deg, hr, hc)) in hvars.iter().enumerate() {
        // d_y h part: contributes at degree deg: (d_y)_{deg-1} composed with
        // the single entry (hr, hc).
        let dy = y.diff(deg - 1);
        for r in 0..y.term(deg).len() {
            if !dy.at(r, hr).is_zero() {
                if let Some(i) = vix(deg, r, hc) {
                    *b.at_mut(i, hcol) += dy.at(r, hr).clone();
                }
            }
        }
        // h d_x part: contributes at degree deg - 1: entry (hr, c) for each
        // c with dx(hc', c) ... the single h entry eats x-degree deg.
        let dx = x.diff(deg - 1);
        for c in 0..x.term(deg - 1).len() {
            if !dx.at(hc, c).is_zero() {
                if let Some(i) = vix(deg - 1, hr, c) {
                    *b.at_mut(i, hcol) += dx.at(hc, c).clone();
                }
            }
        }
    }
    HomSpace { src: x.clone(), tgt: y.clone(), vars, z, b }
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.z.cols - self.b.rank()
    }

    fn flat(&self, f: &CxMap) -> QMat {
        let mut v = QMat::zero(self.vars.len(), 1);
        for (i, &(deg, r, c)) in self.vars.iter().enumerate() {
            *v.at_mut(i, 0) = f.part(deg).at(r, c).clone();
        }
        // Anything outside the mask must be zero on a legal map.
        for (&deg, m) in &f.parts {
            for r in 0..m.rows {
                for c in 0..m.cols {
                    if !m.at(r, c).is_zero() {
                        assert!(
                            self.vars.contains(&(deg, r, c)),
                            "map has an entry outside the hom support mask"
                        );
                    }
                }
            }
        }
        v
    }

    fn unflat(&self, v: &QMat) -> CxMap {
        let mut parts: std::collections::BTreeMap<i32, QMat> = Default::default();
        for (i, &(deg, r, c)) in self.vars.iter().enumerate() {
            if v.at(i, 0).is_zero() {
                continue;
            }
            let e = parts.entry(deg).or_insert_with(|| {
                QMat::zero(self.tgt.term(deg).len(), self.src.term(deg).len())
            });
            *e.at_mut(r, c) = v.at(i, 0).clone();
        }
        CxMap { src: self.src.clone(), tgt: self.tgt.clone(), parts }
    }

    /// Chain maps spanning hom modulo homotopy, one per class.
    pub fn representatives(&self) -> Vec<CxMap> {
        let mut picked: Vec<usize> = Vec::new();
        let mut span = self.b.clone();
        let mut rank = span.rank();
        for c in 0..self.z.cols {
            let cand = span.hstack(&self.z.col(c));
            let r = cand.rank();
            if r > rank {
                picked.push(c);
                span = cand;
                rank = r;
            }
        }
        picked.iter().map(|&c| self.unflat(&self.z.col(c))).collect()
    }

    pub fn is_boundary(&self, f: &CxMap) -> bool {
        let v = self.flat(f);
        self.b.solve(&v).is_some()
    }

    /// Coordinates of f in the given representative basis, if expressible.
    pub fn coords(&self, f: &CxMap, basis: &[CxMap]) -> Option<QMat> {
        let v = self.flat(f);
        let mut cols = QMat::zero(self.vars.len(), 0);
        for bmap in basis {
            cols = cols.hstack(&self.flat(bmap));
        }
        let aug = cols.hstack(&self.b);
        let sol = aug.solve(&v)?;
        Some(sol.submatrix(0, 0, basis.len(), 1))
    }
}

/// Gaussian cancellation of invertible differential entries, with the two
/// homotopy equivalences (old -> new, new -> old).
pub fn minimize(x: &Cx) -> (Cx, CxMap, CxMap) {
    let mut cur = normalize(x);
    let mut fwd = identity_map(&cur);
    fwd.src = x.clone();
    let mut bwd = identity_map(&cur);
    bwd.tgt = x.clone();
    loop {
        let mut pivot: Option<(usize, usize, usize)> = None;
        'find: for k in 0..cur.diffs.len() {
            let d = &cur.diffs[k];
            for r in 0..d.rows {
                for c in 0..d.cols {
                    if !d.at(r, c).is_zero() && cur.terms[k][c] == cur.terms[k + 1][r] {
                        pivot = Some((k, r, c));
                        break 'find;
                    }
                }
            }
        }
        let Some((k, pr, pc)) = pivot else {
            return normalize_with_maps(cur, fwd, bwd);
        };
        let lam = cur.diffs[k].at(pr, pc).clone();
        let deg_k = cur.lo + k as i32;
        let nk = cur.terms[k].len();
        let nk1 = cur.terms[k + 1].len();
        let keep_c: Vec<usize> = (0..nk).filter(|&i| i != pc).collect();
        let keep_r: Vec<usize> = (0..nk1).filter(|&i| i != pr).collect();
        let d = &cur.diffs[k];
        let a = QMat::from_fn(keep_r.len(), keep_c.len(), |r, c| {
            d.at(keep_r[r], keep_c[c]).clone()
        });
        let bcol = QMat::from_fn(keep_r.len(), 1, |r, _| d.at(keep_r[r], pc).clone());
        let crow = QMat::from_fn(1, keep_c.len(), |_, c| d.at(pr, keep_c[c]).clone());
        let linv = lam.clone().recip();
        let new_dk = a.sub(&bcol.mul(&crow).scale(&linv));

        let mut terms = cur.terms.clone();
        terms[k] = keep_c.iter().map(|&i| cur.terms[k][i]).collect();
        terms[k + 1] = keep_r.iter().map(|&i| cur.terms[k + 1][i]).collect();
        let mut diffs = cur.diffs.clone();
        diffs[k] = new_dk;
        if k > 0 {
            let prev = &cur.diffs[k - 1];
            diffs[k - 1] = QMat::from_fn(keep_c.len(), prev.cols, |r, c| {
                prev.at(keep_c[r], c).clone()
            });
        }
        if k + 1 < cur.diffs.len() {
            let next = &cur.diffs[k + 1];
            diffs[k + 1] = QMat::from_fn(next.rows, keep_r.len(), |r, c| {
                next.at(r, keep_r[c]).clone()
            });
        }
        let newc = Cx { lo: cur.lo, terms, diffs };

        // Step maps between cur and newc.
        let mut fparts = std::collections::BTreeMap::new();
        let mut gparts = std::collections::BTreeMap::new();
        let (lo, hi) = degree_span(&cur);
        for deg in lo..=hi {
            let old_n = cur.term(deg).len();
            let new_n = newc.term(deg).len();
            if deg == deg_k {
                // f: delete column pc; g: identity plus correction row pc.
                let f = QMat::from_fn(new_n, old_n, |r, c| {
                    if keep_c[r] == c { crate::matrix::q(1) } else { Q::zero() }
                });
                let mut g = QMat::zero(old_n, new_n);
                for (r, &oi) in keep_c.iter().enumerate() {
                    *g.at_mut(oi, r) = crate::matrix::q(1);
                }
                for c in 0..new_n {
                    *g.at_mut(pc, c) = -(crow.at(0, c) * &linv);
                }
                if old_n * new_n > 0 {
                    fparts.insert(deg, f);
                    gparts.insert(deg, g);
                }
            } else if deg == deg_k + 1 {
                // f: identity plus correction column pr; g: insert zero row.
                let mut f = QMat::zero(new_n, old_n);
                for (r, &oi) in keep_r.iter().enumerate() {
                    *f.at_mut(r, oi) = crate::matrix::q(1);
                }
                for r in 0..new_n {
                    *f.at_mut(r, pr) = -(bcol.at(r, 0) * &linv);
                }
                let g = QMat::from_fn(old_n, new_n, |r, c| {
                    if keep_r[c] == r { crate::matrix::q(1) } else { Q::zero() }
                });
                if old_n * new_n > 0 {
                    fparts.insert(deg, f);
                    gparts.insert(deg, g);
                }
            } else if old_n > 0 {
                fparts.insert(deg, QMat::identity(old_n));
                gparts.insert(deg, QMat::identity(old_n));
            }
        }
        let fstep = CxMap { src: cur.clone(), tgt: newc.clone(), parts: fparts };
        let gstep = CxMap { src: newc.clone(), tgt: cur.clone(), parts: gparts };
        fwd = compose_loose(&fstep, &fwd);
        bwd = compose_loose(&bwd, &gstep);
        cur = newc;
    }
}

/// Composition that only checks shapes degree by degree; used internally
/// where endpoints are equal complexes modulo trimmed empty terms.
fn compose_loose(g: &CxMap, f: &CxMap) -> CxMap {
    let mut parts = std::collections::BTreeMap::new();
    for (&deg, fm) in &f.parts {
        let gm = g.part(deg);
        if gm.rows == 0 || fm.cols == 0 || gm.cols != fm.rows {
            continue;
        }
        let m = gm.mul(fm);
        if !m.is_zero() {
            parts.insert(deg, m);
        }
    }
    CxMap { src: f.src.clone(), tgt: g.tgt.clone(), parts }
}

fn normalize_with_maps(cur: Cx, mut fwd: CxMap, mut bwd: CxMap) -> (Cx, CxMap, CxMap) {
    let n = normalize(&cur);
    fwd.tgt = n.clone();
    bwd.src = n.clone();
    (n, fwd, bwd)
}
