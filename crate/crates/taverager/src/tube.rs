//! Coordinate calculus in a standard stable tube of rank rho.
//!
//! Objects are uniserial: a socle residue and a length determine the whole
//! composition series (top to socle reads s_{socle+len-1},...,s_{socle}).
//! Hom and Ext existence reduce to window arithmetic on these coordinates;
//! no matrices are involved. The `serial` submodule holds an independent
//! oracle built from explicit nilpotent representations of a cyclic quiver.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TubeObj {
    pub rho: usize,
    /// Socle residue, 1-based in 1..=rho.
    pub socle: usize,
    pub length: usize,
    pub degree: i32,
}

impl TubeObj {
    pub fn new(rho: usize, socle: i64, length: usize, degree: i32) -> TubeObj {
        assert!(rho >= 1 && length >= 1);
        TubeObj { rho, socle: norm(rho, socle), length, degree }
    }

    /// Top residue: socle + length - 1 reduced into 1..=rho.
    pub fn top(&self) -> usize {
        norm(self.rho, self.socle as i64 + self.length as i64 - 1)
    }

    /// AR translate: decrements the socle residue.
    pub fn tau(&self) -> TubeObj {
        TubeObj::new(self.rho, self.socle as i64 - 1, self.length, self.degree)
    }

    pub fn tau_inv(&self) -> TubeObj {
        TubeObj::new(self.rho, self.socle as i64 + 1, self.length, self.degree)
    }

    pub fn tau_pow(&self, n: i64) -> TubeObj {
        TubeObj::new(self.rho, self.socle as i64 - n, self.length, self.degree)
    }

    /// Same ray: equal socle residue.
    pub fn same_ray(&self, other: &TubeObj) -> bool {
        self.socle == other.socle
    }

    /// Same coray: equal top residue.
    pub fn same_coray(&self, other: &TubeObj) -> bool {
        self.top() == other.top()
    }

    /// Membership in the wing below `anchor` (which must be shorter than
    /// the rank): length at most that of the anchor and socle within the
    /// triangle spanned by the anchor's ray and coray.
    pub fn in_wing(&self, anchor: &TubeObj) -> bool {
        assert!(anchor.length < anchor.rho, "wing anchor must be shorter than the rank");
        if self.length > anchor.length {
            return false;
        }
        let off = (self.socle as i64 - anchor.socle as i64).rem_euclid(self.rho as i64) as usize;
        off <= anchor.length - self.length
    }
}

impl std::fmt::Display for TubeObj {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "T[s={};l={}]", self.socle, self.length)?;
        if self.degree != 0 {
            write!(f, "@d{}", self.degree)?;
        }
        Ok(())
    }
}

fn norm(rho: usize, i: i64) -> usize {
    ((i - 1).rem_euclid(rho as i64) + 1) as usize
}

fn same_tube(a: &TubeObj, b: &TubeObj) -> Result<()> {
    if a.rho != b.rho || a.degree != b.degree {
        return Err(Error::DifferentTube(format!(
            "{a} (rank {}) and {b} (rank {}) are not comparable",
            a.rho, b.rho
        )));
    }
    Ok(())
}

/// Hom dimension: number of k >= 0 such that a quotient of `a` of length
/// len(a) - k embeds into `b` as the submodule on the socle of `b`.
pub fn tube_hom_dim(a: &TubeObj, b: &TubeObj) -> Result<usize> {
    same_tube(a, b)?;
    let rho = a.rho as i64;
    let base = (b.socle as i64 - a.socle as i64).rem_euclid(rho);
    let mut dim = 0;
    let mut k = base;
    while k <= a.length as i64 - 1 {
        if a.length as i64 - k <= b.length as i64 {
            dim += 1;
        }
        k += rho;
    }
    Ok(dim)
}

pub fn tube_hom_nonzero(a: &TubeObj, b: &TubeObj) -> Result<bool> {
    Ok(tube_hom_dim(a, b)? > 0)
}

/// Ext existence via the AR formula: Ext^1(a, b) = DHom(b, tau a).
pub fn tube_ext_nonzero(a: &TubeObj, b: &TubeObj) -> Result<bool> {
    same_tube(a, b)?;
    tube_hom_nonzero(b, &a.tau())
}

/// Middle terms of the non-split extension of `t` by `tp`:
/// 0 -> tp -> e1 (+) e2 -> t -> 0 with len(t) < rho. `e1` is the shortest
/// object on the coray of t and the ray of tp longer than tp; `e2` is the
/// longest object on the ray of t and the coray of tp shorter than tp.
pub fn ext_middle_terms(t: &TubeObj, tp: &TubeObj) -> Result<(Option<TubeObj>, Option<TubeObj>)> {
    same_tube(t, tp)?;
    if t.length >= t.rho {
        return Err(Error::InvalidSetup(format!("{t} is not shorter than the rank")));
    }
    if !tube_ext_nonzero(t, tp)? {
        return Err(Error::NoExtension(format!("no non-split extension of {t} by {tp}")));
    }
    // The extension is classified by the unique overlap parameter k of the
    // non-zero space Hom(tp, tau t): the glued long summand on the coray of
    // t and the ray of tp has length len(t) + k + 1, the short summand on
    // the ray of t and the coray of tp has length len(tp) - k - 1.
    let rho = t.rho as i64;
    let ta = t.tau();
    let base = (ta.socle as i64 - tp.socle as i64).rem_euclid(rho);
    let mut overlap = None;
    let mut k = base;
    while k <= tp.length as i64 - 1 {
        if tp.length as i64 - k <= ta.length as i64 {
            assert!(overlap.is_none(), "overlap parameter is unique for short t");
            overlap = Some(k);
        }
        k += rho;
    }
    let k = overlap.expect("non-zero Ext admits an overlap parameter");
    let l1 = t.length as i64 + k + 1;
    let e1 = TubeObj::new(t.rho, tp.socle as i64, l1 as usize, t.degree);
    debug_assert_eq!(e1.top(), t.top());
    let l2 = tp.length as i64 - k - 1;
    let e2 = if l2 > 0 {
        let e2 = TubeObj::new(t.rho, t.socle as i64, l2 as usize, t.degree);
        debug_assert_eq!(e2.top(), tp.top());
        Some(e2)
    } else {
        None
    };
    assert_eq!(
        e1.length + l2.max(0) as usize,
        t.length + tp.length,
        "extension middle terms must conserve length"
    );
    Ok((Some(e1), e2))
}

/// Pairwise Hom vanishing among prospective truncation summands; objects in
/// cohomological degree -1 are flagged so that the mixed condition becomes
/// Ext vanishing.
pub fn validate_nohom(shifted: &[TubeObj], plain: &[TubeObj]) -> Result<()> {
    let all: Vec<(bool, &TubeObj)> = shifted
        .iter()
        .map(|t| (true, t))
        .chain(plain.iter().map(|t| (false, t)))
        .collect();
    for (i, &(sa, a)) in all.iter().enumerate() {
        for (j, &(sb, b)) in all.iter().enumerate() {
            if i == j {
                continue;
            }
            let nonzero = match (sa, sb) {
                (true, true) | (false, false) => tube_hom_nonzero(a, b)?,
                // Hom(S^-1 a, b) = Ext^1(a, b); the other direction vanishes.
                (true, false) => tube_ext_nonzero(a, b)?,
                (false, true) => false,
            };
            if nonzero {
                return Err(Error::InvalidSetup(format!(
                    "approximation summands are not Hom-orthogonal: {a} and {b}"
                )));
            }
        }
    }
    Ok(())
}

/// Coray distance: the s >= 0 with tau^{-s} t on the coray of r.
fn coray_distance(t: &TubeObj, r: &TubeObj) -> usize {
    (r.top() as i64 - t.top() as i64).rem_euclid(t.rho as i64) as usize
}

/// Ray distance: the s >= 0 with tau^{-s} t on the ray of r.
fn ray_distance(t: &TubeObj, r: &TubeObj) -> usize {
    (r.socle as i64 - t.socle as i64).rem_euclid(t.rho as i64) as usize
}

/// Summands of the cone of S^-1 r' -> t, built one coray at a time:
/// v_1 = middle of the extension of r'_1 by t, and each further step
/// replaces the previous short summand v''_j by the middle terms of the
/// extension of r'_{j+1} by it. Returns v'_1, ..., v'_m and, when non-zero,
/// v''_m; lengths strictly decrease and only v'_1 may reach the rank.
pub fn v_chain(t: &TubeObj, rprime: &[TubeObj]) -> Result<Vec<TubeObj>> {
    if rprime.is_empty() {
        return Ok(vec![t.clone()]);
    }
    for r in rprime {
        same_tube(t, r)?;
        if r.length >= t.rho {
            return Err(Error::InvalidSetup(format!("{r} is not shorter than the rank")));
        }
        if !tube_ext_nonzero(r, t)? {
            return Err(Error::InvalidSetup(format!("{r} is not in the Ext-hammock of {t}")));
        }
    }
    validate_nohom(rprime, &[])?;
    let dists: Vec<usize> = rprime.iter().map(|r| coray_distance(t, r)).collect();
    if !dists.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidSetup(
            "summands must be listed by strictly descending coray distance".into(),
        ));
    }
    let mut primary: Vec<TubeObj> = Vec::new();
    let (e1, mut small) = ext_middle_terms(&rprime[0], t)?;
    primary.push(e1.expect("first middle term of a non-split extension is non-zero"));
    for r in &rprime[1..] {
        let prev = small.ok_or_else(|| {
            Error::InvalidSetup(format!("no remaining summand receives a map from {r}"))
        })?;
        let (e1, e2) = ext_middle_terms(r, &prev)?;
        primary.push(e1.expect("first middle term of a non-split extension is non-zero"));
        small = e2;
    }
    let mut out = primary;
    if let Some(s) = small {
        out.push(s);
    }
    for w in out.windows(2) {
        assert!(w[0].length > w[1].length, "chain lengths must strictly decrease");
    }
    for s in &out[1..] {
        assert!(s.length < t.rho, "only the first summand may reach the rank");
    }
    Ok(out)
}

/// Length of the longest cone summand v'_1 for a single r_1, by the two
/// closed formulas: without maps r_1 -> t the ray offset i enters with a
/// plus sign; with a map, the coray offset k enters with a minus sign and
/// the rounding of len(t)/rho depends on len(t) mod rho.
pub fn v1_length(t: &TubeObj, r1: &TubeObj) -> Result<usize> {
    same_tube(t, r1)?;
    if r1.length >= t.rho {
        return Err(Error::InvalidSetup(format!("{r1} is not shorter than the rank")));
    }
    if !tube_ext_nonzero(r1, t)? {
        return Err(Error::InvalidSetup(format!("{r1} is not in the Ext-hammock of {t}")));
    }
    let rho = t.rho;
    if !tube_hom_nonzero(r1, t)? {
        let i = ray_distance(t, r1);
        if i == 0 || i > rho - r1.length {
            return Err(Error::InvalidSetup(format!(
                "{t} is not on a translated ray of {r1} within the hammock"
            )));
        }
        Ok(rho * (t.length / rho) + r1.length + i)
    } else {
        let k = (t.socle as i64 - r1.socle as i64).rem_euclid(rho as i64) as usize;
        if k >= r1.length {
            return Err(Error::InvalidSetup(format!(
                "no translated ray of {r1} within length range reaches {t}"
            )));
        }
        let l = t.length % rho;
        if l < r1.length {
            Ok(rho * (t.length / rho) + r1.length - k)
        } else if l > rho - r1.length {
            Ok(rho * t.length.div_ceil(rho) + r1.length - k)
        } else {
            Err(Error::InvalidSetup(format!(
                "residual length {l} of {t} is outside both formula ranges"
            )))
        }
    }
}

/// Result of the cokernel chain: the surviving long summand (possibly zero
/// when the last cokernel vanishes) and the shifted kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WChain {
    pub wp: Option<TubeObj>,
    pub kernels: Vec<Option<TubeObj>>,
}

/// Summands of the cone of r -> v1: iterated cokernels w'_j of r_j -> w'_{j-1}
/// starting from w'_0 = v1, collecting the kernels. A zero composite leaves
/// the running cokernel untouched and contributes the whole r_j as kernel.
pub fn w_chain(v1: &TubeObj, r: &[TubeObj]) -> Result<WChain> {
    for s in r {
        same_tube(v1, s)?;
        if s.length >= v1.rho {
            return Err(Error::InvalidSetup(format!("{s} is not shorter than the rank")));
        }
    }
    validate_nohom(&[], r)?;
    let dists: Vec<usize> = r.iter().map(|s| ray_distance(v1, s)).collect();
    if !dists.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidSetup(
            "summands must be listed by strictly descending ray distance".into(),
        ));
    }
    let mut cur = Some(v1.clone());
    let mut kernels = Vec::new();
    for s in r {
        let Some(w) = cur.clone() else {
            kernels.push(Some(s.clone()));
            continue;
        };
        // Unique map s -> w when it exists: image length len(s) - k.
        let rho = w.rho as i64;
        let k = (w.socle as i64 - s.socle as i64).rem_euclid(rho);
        let image = s.length as i64 - k;
        if k < s.length as i64 && image <= w.length as i64 {
            let coker_len = w.length as i64 - image;
            cur = if coker_len > 0 {
                Some(TubeObj::new(w.rho, w.socle as i64 + image, coker_len as usize, w.degree))
            } else {
                None
            };
            kernels.push(if k > 0 {
                Some(TubeObj::new(s.rho, s.socle as i64, k as usize, s.degree))
            } else {
                None
            });
        } else {
            kernels.push(Some(s.clone()));
        }
    }
    if let Some(w) = &cur {
        assert!(w.length <= v1.length);
    }
    for ker in kernels.iter().flatten() {
        assert!(ker.length < v1.rho, "kernels stay shorter than the rank");
    }
    Ok(WChain { wp: cur, kernels })
}

/// Bound check: every tube summand produced by the two chains has length at
/// most rho * ceil(len(t) / rho).
pub fn length_bound_check(t: &TubeObj, rprime: &[TubeObj], r: &[TubeObj]) -> Result<bool> {
    let bound = t.rho * t.length.div_ceil(t.rho);
    let v = v_chain(t, rprime)?;
    let mut lengths: Vec<usize> = v[1..].iter().map(|s| s.length).collect();
    let w = w_chain(&v[0], r)?;
    if let Some(wp) = &w.wp {
        lengths.push(wp.length);
    }
    for ker in w.kernels.iter().flatten() {
        lengths.push(ker.length);
    }
    Ok(lengths.into_iter().all(|l| l <= bound))
}

/// One truncation of `t` against an aisle whose tube trace is the wing below
/// `anchor`, keeping track of how much of an incoming composite image (the
/// bottom `image` composition factors of `t`) survives into each cone
/// summand. Summands where the composite dies are dropped; this is the
/// in-tube projection of the refined algorithm.
pub fn wing_truncate(
    t: &TubeObj,
    image: usize,
    anchor: &TubeObj,
) -> Result<Vec<(TubeObj, usize)>> {
    assert!(image >= 1 && image <= t.length);
    if t.in_wing(anchor) {
        return Ok(vec![]);
    }
    let mut wing: Vec<TubeObj> = Vec::new();
    for l in (1..=anchor.length).rev() {
        for off in 0..=(anchor.length - l) {
            wing.push(TubeObj::new(t.rho, anchor.socle as i64 + off as i64, l, t.degree));
        }
    }
    // Plain part: the wing object with the longest image in t.
    let mut best: Option<(i64, TubeObj)> = None;
    for w in &wing {
        if !tube_hom_nonzero(w, t)? {
            continue;
        }
        let k = (t.socle as i64 - w.socle as i64).rem_euclid(t.rho as i64);
        let img = w.length as i64 - k;
        if best.as_ref().is_none_or(|(bi, _)| img > *bi) {
            best = Some((img, w.clone()));
        }
    }
    let r: Vec<TubeObj> = best.iter().map(|(_, w)| w.clone()).collect();
    // Shifted part: greedy Hom-orthogonal subfamily of the Ext-hammock.
    let mut rprime: Vec<TubeObj> = Vec::new();
    for w in &wing {
        if !tube_ext_nonzero(w, t)? {
            continue;
        }
        let cand: Vec<TubeObj> =
            rprime.iter().cloned().chain(std::iter::once(w.clone())).collect();
        if validate_nohom(&cand, &r).is_ok() {
            rprime.push(w.clone());
        }
    }
    rprime.sort_by_key(|w| std::cmp::Reverse(coray_distance(t, w)));
    let mut out: Vec<(TubeObj, usize)> = Vec::new();
    // Walk the v-chain: t embeds into each primary summand (image length
    // preserved), while passing to the next short summand is a quotient map
    // losing socle factors.
    let mut cur_obj = t.clone();
    let mut cur_img = image;
    let mut v1: Option<(TubeObj, usize)> = None;
    if rprime.is_empty() {
        v1 = Some((cur_obj.clone(), cur_img));
    } else {
        for (j, rp) in rprime.iter().enumerate() {
            let (e1, e2) = ext_middle_terms(rp, &cur_obj)?;
            let e1 = e1.expect("non-split extension has a long middle term");
            if j == 0 {
                v1 = Some((e1, cur_img));
            } else if cur_img > 0 {
                out.push((e1, cur_img));
            }
            match e2 {
                Some(e2) => {
                    let loss = cur_obj.length - e2.length;
                    cur_img = cur_img.saturating_sub(loss);
                    cur_obj = e2;
                }
                None => {
                    cur_img = 0;
                    if j + 1 < rprime.len() {
                        break;
                    }
                    continue;
                }
            }
        }
        if cur_img > 0 {
            out.push((cur_obj.clone(), cur_img));
        }
    }
    // The w-chain quotients the long summand by the plain approximations.
    let (v1_obj, mut v1_img) = v1.expect("v-chain produces a long summand");
    let wc = w_chain(&v1_obj, &r)?;
    if let Some(wp) = wc.wp {
        v1_img = v1_img.saturating_sub(v1_obj.length - wp.length);
        if v1_img > 0 {
            out.push((wp, v1_img));
        }
    }
    out.sort();
    Ok(out)
}

/// Iterates `wing_truncate` cyclically over several wing anchors, returning
/// the number of steps until the in-tube summand multiset stabilizes, or
/// None within the step cap.
pub fn wing_iterate(
    t: &TubeObj,
    anchors: &[TubeObj],
    max_steps: usize,
) -> Result<Option<usize>> {
    assert!(!anchors.is_empty());
    let mut cur: Vec<(TubeObj, usize)> = vec![(t.clone(), t.length)];
    let mut history: Vec<Vec<TubeObj>> = vec![cur.iter().map(|(o, _)| o.clone()).collect()];
    for step in 0..max_steps {
        let anchor = &anchors[step % anchors.len()];
        let mut next: Vec<(TubeObj, usize)> = Vec::new();
        for (s, img) in &cur {
            next.extend(wing_truncate(s, *img, anchor)?);
        }
        next.sort();
        let objs: Vec<TubeObj> = next.iter().map(|(o, _)| o.clone()).collect();
        history.push(objs.clone());
        let n = history.len();
        if n > anchors.len() && history[n - 1 - anchors.len()..].iter().all(|h| *h == objs) {
            return Ok(Some(step));
        }
        cur = next;
    }
    Ok(None)
}

pub mod serial;
