//! Bounded-degree model of the AR quiver of the derived category.
//!
//! Finite type: the translation quiver is knitted from the projective slice,
//! in both directions, tracking a signed class vector per position. The sign
//! flips exactly when the degree increases, so each position resolves to a
//! unique (degree, positive root) pair. Extended Dynkin type: vertices are
//! coordinates (non-regular slice positions up to a cap, tube coordinates up
//! to a length cap); no matrices are attached.
//!
//! Operations that would need data outside the requested degree window raise
//! `BoundaryUndefined` instead of answering from partial data.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::id::{IndecId, Obj, Side};
use crate::quiver::{Quiver, QuiverPreset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Non-regular slice cap for extended Dynkin windows.
    pub k_cap: u32,
    /// Tube length cap for extended Dynkin windows.
    pub len_cap: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { k_cap: 64, len_cap: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Finite,
    Extended(Caps),
}

#[derive(Debug, Clone)]
pub struct ARWindow {
    pub preset: QuiverPreset,
    pub quiver: Quiver,
    pub d_lo: i32,
    pub d_hi: i32,
    kind: Kind,
    vertices: Vec<IndecId>,
    pos: BTreeMap<IndecId, usize>,
    /// Finite type only: translation-quiver coordinate (column, row).
    zq: Vec<Option<(i64, usize)>>,
    arrows: Vec<(usize, usize)>,
    tau_tab: Vec<Option<usize>>,
    tau_inv_tab: Vec<Option<usize>>,
    /// Reachability closure of the arrow relation (row = from).
    reach: Vec<Vec<bool>>,
    /// A linear extension of the arrow relation, as vertex indices.
    topo: Vec<usize>,
}

impl ARWindow {
    pub fn build(preset: QuiverPreset, d_lo: i32, d_hi: i32, caps: Caps) -> Result<ARWindow> {
        if d_hi - d_lo < 1 {
            return Err(Error::WindowTooSmall(format!(
                "need at least two degrees, got [{d_lo}, {d_hi}]"
            )));
        }
        let quiver = preset.quiver()?;
        if quiver.family.is_finite() {
            Self::build_finite(preset, quiver, d_lo, d_hi)
        } else {
            if caps.k_cap == 0 || caps.len_cap == 0 {
                return Err(Error::InvalidInput("caps must be positive".into()));
            }
            Self::build_extended(preset, quiver, d_lo, d_hi, caps)
        }
    }

    fn build_finite(
        preset: QuiverPreset,
        quiver: Quiver,
        d_lo: i32,
        d_hi: i32,
    ) -> Result<ARWindow> {
        let n = quiver.n;
        let roots = quiver.positive_roots()?;
        let proj: Vec<Vec<u32>> = (0..n).map(|v| quiver.proj_dimvec(v)).collect();
        let inj: Vec<Vec<u32>> = (0..n).map(|v| quiver.inj_dimvec(v)).collect();
        let targets_first = quiver.topo_targets_first();
        let sources_first: Vec<usize> = targets_first.iter().rev().cloned().collect();

        // Signed class vector and degree per (column, row).
        let mut grid: BTreeMap<(i64, usize), (Vec<i64>, i32)> = BTreeMap::new();
        for q in 0..n {
            let v: Vec<i64> = proj[q].iter().map(|&x| x as i64).collect();
            grid.insert((0, q), (v, 0));
        }

        let abs = |v: &[i64]| -> (Vec<u32>, bool) {
            if v.iter().all(|&x| x >= 0) {
                (v.iter().map(|&x| x as u32).collect(), true)
            } else {
                assert!(v.iter().all(|&x| x <= 0), "signed class is mixed: {v:?}");
                (v.iter().map(|&x| (-x) as u32).collect(), false)
            }
        };

        // March right until every row of the fresh column has degree > d_hi.
        let mut col: i64 = 0;
        loop {
            let mut all_past = true;
            for &q in &targets_first {
                let (v_prev, d_prev) = grid.get(&(col, q)).unwrap().clone();
                let mut m: Vec<i64> = vec![0; n];
                for &(s, t) in &quiver.arrows {
                    if s == q {
                        // within-column middle at (col+1, t)
                        let (vt, _) = grid.get(&(col + 1, t)).expect("targets knit first");
                        for i in 0..n {
                            m[i] += vt[i];
                        }
                    }
                    if t == q {
                        let (vs, _) = grid.get(&(col, s)).unwrap();
                        for i in 0..n {
                            m[i] += vs[i];
                        }
                    }
                }
                let v_new: Vec<i64> = (0..n).map(|i| m[i] - v_prev[i]).collect();
                let (dv_prev, _) = abs(&v_prev);
                let d_new = d_prev + if inj.contains(&dv_prev) { 1 } else { 0 };
                let (dv_new, _) = abs(&v_new);
                assert!(roots.binary_search(&dv_new).is_ok(), "knit value is not a root");
                if d_new <= d_hi {
                    all_past = false;
                }
                grid.insert((col + 1, q), (v_new, d_new));
            }
            col += 1;
            if all_past {
                break;
            }
            assert!(col < 10_000, "runaway knit");
        }
        // March left until every row of the fresh column has degree < d_lo.
        let mut lcol: i64 = 0;
        loop {
            let mut all_past = true;
            for &q in &sources_first {
                let (v_cur, d_cur) = grid.get(&(lcol, q)).unwrap().clone();
                let mut m: Vec<i64> = vec![0; n];
                for &(s, t) in &quiver.arrows {
                    if s == q {
                        let (vt, _) = grid.get(&(lcol, t)).unwrap();
                        for i in 0..n {
                            m[i] += vt[i];
                        }
                    }
                    if t == q {
                        let (vs, _) = grid.get(&(lcol - 1, s)).expect("sources knit first");
                        for i in 0..n {
                            m[i] += vs[i];
                        }
                    }
                }
                let v_new: Vec<i64> = (0..n).map(|i| m[i] - v_cur[i]).collect();
                let (dv_cur, _) = abs(&v_cur);
                let d_new = d_cur - if proj.contains(&dv_cur) { 1 } else { 0 };
                let (dv_new, _) = abs(&v_new);
                assert!(roots.binary_search(&dv_new).is_ok(), "knit value is not a root");
                if d_new >= d_lo {
                    all_past = false;
                }
                grid.insert((lcol - 1, q), (v_new, d_new));
            }
            lcol -= 1;
            if all_past {
                break;
            }
            assert!(lcol > -10_000, "runaway knit");
        }

        // Collect window vertices.
        let mut entries: Vec<((i64, usize), IndecId)> = Vec::new();
        for (&(c, q), (v, d)) in &grid {
            if *d < d_lo || *d > d_hi {
                continue;
            }
            let (dv, _) = abs(v);
            entries.push(((c, q), IndecId::finite(*d, dv)));
        }
        let mut vertices: Vec<IndecId> = entries.iter().map(|(_, id)| id.clone()).collect();
        vertices.sort();
        vertices.dedup();
        assert_eq!(vertices.len(), entries.len(), "duplicate window vertex");
        let expected = roots.len() * (d_hi - d_lo + 1) as usize;
        assert_eq!(vertices.len(), expected, "window vertex count mismatch");

        let pos: BTreeMap<IndecId, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut zq = vec![None; vertices.len()];
        let mut zq_pos: BTreeMap<(i64, usize), usize> = BTreeMap::new();
        for ((c, q), id) in &entries {
            let ix = pos[id];
            zq[ix] = Some((*c, *q));
            zq_pos.insert((*c, *q), ix);
        }

        // Arrows of the translation quiver restricted to the window.
        let mut arrows = Vec::new();
        for (&(c, qrow), ix) in &zq_pos {
            for &(s, t) in &quiver.arrows {
                if t == qrow {
                    // (c, t(β)) -> (c, s(β)) with q = t here: outgoing to s.
                    if let Some(&j) = zq_pos.get(&(c, s)) {
                        arrows.push((*ix, j));
                    }
                }
                if s == qrow {
                    // (c, s(α)) -> (c + 1, t(α))
                    if let Some(&j) = zq_pos.get(&(c + 1, t)) {
                        arrows.push((*ix, j));
                    }
                }
            }
        }
        arrows.sort_unstable();
        arrows.dedup();

        let mut tau_tab = vec![None; vertices.len()];
        let mut tau_inv_tab = vec![None; vertices.len()];
        for (&(c, qrow), &ix) in &zq_pos {
            tau_tab[ix] = zq_pos.get(&(c - 1, qrow)).copied();
            tau_inv_tab[ix] = zq_pos.get(&(c + 1, qrow)).copied();
        }

        let reach = closure(vertices.len(), &arrows);
        // Columns increase along every arrow path except within a column,
        // where the targets-first row order decreases; sort accordingly.
        let row_rank: BTreeMap<usize, usize> =
            targets_first.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut topo: Vec<usize> = (0..vertices.len()).collect();
        topo.sort_by_key(|&ix| {
            let (c, q) = zq[ix].unwrap();
            (c, row_rank[&q])
        });
        for &(a, b) in &arrows {
            let pa = topo.iter().position(|&x| x == a).unwrap();
            let pb = topo.iter().position(|&x| x == b).unwrap();
            assert!(pa < pb, "topological order violates an arrow");
        }

        Ok(ARWindow {
            preset,
            quiver,
            d_lo,
            d_hi,
            kind: Kind::Finite,
            vertices,
            pos,
            zq,
            arrows,
            tau_tab,
            tau_inv_tab,
            reach,
            topo,
        })
    }

    fn build_extended(
        preset: QuiverPreset,
        quiver: Quiver,
        d_lo: i32,
        d_hi: i32,
        caps: Caps,
    ) -> Result<ARWindow> {
        let n = quiver.n;
        let ranks = quiver.family.tube_ranks().unwrap();
        let mut vertices: Vec<IndecId> = Vec::new();
        for degree in d_lo..=d_hi {
            for side in [Side::Postprojective, Side::Preinjective] {
                for vertex in 0..n {
                    for k in 0..=caps.k_cap {
                        vertices.push(IndecId::NonRegular { side, vertex, k, degree });
                    }
                }
            }
            for (ti, &rho) in ranks.iter().enumerate() {
                for socle in 1..=rho {
                    for length in 1..=caps.len_cap {
                        vertices.push(IndecId::Tube {
                            tube: ti.to_string(),
                            socle,
                            length,
                            degree,
                        });
                    }
                }
            }
        }
        vertices.sort();
        let pos: BTreeMap<IndecId, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();

        // Arrows only within the non-regular parts; this is what the partial
        // order is defined on.
        let mut arrows: Vec<(usize, usize)> = Vec::new();
        let mut push = |a: &IndecId, b: &IndecId| {
            if let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) {
                arrows.push((i, j));
            }
        };
        for degree in d_lo..=d_hi {
            for k in 0..=caps.k_cap {
                for &(s, t) in &quiver.arrows {
                    // Slice copies follow the opposite quiver.
                    push(
                        &IndecId::NonRegular { side: Side::Postprojective, vertex: t, k, degree },
                        &IndecId::NonRegular { side: Side::Postprojective, vertex: s, k, degree },
                    );
                    push(
                        &IndecId::NonRegular { side: Side::Postprojective, vertex: s, k, degree },
                        &IndecId::NonRegular {
                            side: Side::Postprojective,
                            vertex: t,
                            k: k + 1,
                            degree,
                        },
                    );
                    push(
                        &IndecId::NonRegular { side: Side::Preinjective, vertex: t, k, degree },
                        &IndecId::NonRegular { side: Side::Preinjective, vertex: s, k, degree },
                    );
                    push(
                        &IndecId::NonRegular {
                            side: Side::Preinjective,
                            vertex: s,
                            k: k + 1,
                            degree,
                        },
                        &IndecId::NonRegular { side: Side::Preinjective, vertex: t, k, degree },
                    );
                }
            }
        }
        arrows.sort_unstable();
        arrows.dedup();

        let reach = closure(vertices.len(), &arrows);
        let m = vertices.len();
        Ok(ARWindow {
            preset,
            quiver,
            d_lo,
            d_hi,
            kind: Kind::Extended(caps),
            vertices,
            pos,
            zq: vec![None; m],
            arrows,
            tau_tab: vec![None; m],
            tau_inv_tab: vec![None; m],
            reach,
            topo: (0..m).collect(),
        })
    }

    pub fn is_finite_type(&self) -> bool {
        self.kind == Kind::Finite
    }

    pub fn indecs(&self) -> &[IndecId] {
        &self.vertices
    }

    pub fn index_of(&self, id: &IndecId) -> Option<usize> {
        self.pos.get(id).copied()
    }

    pub fn id(&self, ix: usize) -> &IndecId {
        &self.vertices[ix]
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    /// Linear extension of the arrow relation (finite type).
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// Translation-quiver coordinate of a finite type window vertex.
    pub fn zq_coord(&self, id: &IndecId) -> Option<(i64, usize)> {
        let ix = self.index_of(id)?;
        self.zq[ix]
    }

    pub fn id_at_zq(&self, coord: (i64, usize)) -> Option<&IndecId> {
        self.vertices
            .iter()
            .enumerate()
            .find(|(ix, _)| self.zq[*ix] == Some(coord))
            .map(|(_, id)| id)
    }

    pub fn contains(&self, id: &IndecId) -> bool {
        self.pos.contains_key(id)
    }

    pub fn tau(&self, x: &IndecId) -> Result<IndecId> {
        let ix = self
            .index_of(x)
            .ok_or_else(|| Error::BoundaryUndefined(format!("{x} is not in the window")))?;
        match &self.kind {
            Kind::Finite => self.tau_tab[ix]
                .map(|j| self.vertices[j].clone())
                .ok_or_else(|| Error::BoundaryUndefined(format!("tau({x}) leaves the window"))),
            Kind::Extended(_) => {
                let out = match x.clone() {
                    IndecId::NonRegular { side: Side::Postprojective, vertex, k, degree } => {
                        if k > 0 {
                            IndecId::NonRegular {
                                side: Side::Postprojective,
                                vertex,
                                k: k - 1,
                                degree,
                            }
                        } else {
                            IndecId::NonRegular {
                                side: Side::Preinjective,
                                vertex,
                                k: 0,
                                degree: degree - 1,
                            }
                        }
                    }
                    IndecId::NonRegular { side: Side::Preinjective, vertex, k, degree } => {
                        IndecId::NonRegular { side: Side::Preinjective, vertex, k: k + 1, degree }
                    }
                    IndecId::Tube { tube, socle, length, degree } => {
                        let rho = self.tube_rank(&tube)?;
                        let socle = if socle == 1 { rho } else { socle - 1 };
                        IndecId::Tube { tube, socle, length, degree }
                    }
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "{other} does not belong to an extended Dynkin window"
                        )))
                    }
                };
                if self.contains(&out) {
                    Ok(out)
                } else {
                    Err(Error::BoundaryUndefined(format!("tau({x}) leaves the window")))
                }
            }
        }
    }

    pub fn tau_inv(&self, x: &IndecId) -> Result<IndecId> {
        match &self.kind {
            Kind::Finite => {
                let ix = self
                    .index_of(x)
                    .ok_or_else(|| Error::BoundaryUndefined(format!("{x} is not in the window")))?;
                self.tau_inv_tab[ix]
                    .map(|j| self.vertices[j].clone())
                    .ok_or_else(|| {
                        Error::BoundaryUndefined(format!("tau^-(x) leaves the window for {x}"))
                    })
            }
            Kind::Extended(_) => {
                let out = match x.clone() {
                    IndecId::NonRegular { side: Side::Preinjective, vertex, k, degree } => {
                        if k > 0 {
                            IndecId::NonRegular {
                                side: Side::Preinjective,
                                vertex,
                                k: k - 1,
                                degree,
                            }
                        } else {
                            IndecId::NonRegular {
                                side: Side::Postprojective,
                                vertex,
                                k: 0,
                                degree: degree + 1,
                            }
                        }
                    }
                    IndecId::NonRegular { side: Side::Postprojective, vertex, k, degree } => {
                        IndecId::NonRegular { side: Side::Postprojective, vertex, k: k + 1, degree }
                    }
                    IndecId::Tube { tube, socle, length, degree } => {
                        let rho = self.tube_rank(&tube)?;
                        let socle = if socle == rho { 1 } else { socle + 1 };
                        IndecId::Tube { tube, socle, length, degree }
                    }
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "{other} does not belong to an extended Dynkin window"
                        )))
                    }
                };
                if self.contains(&out) {
                    Ok(out)
                } else {
                    Err(Error::BoundaryUndefined(format!("tau^-({x}) leaves the window")))
                }
            }
        }
    }

    pub fn sigma(&self, x: &IndecId) -> Result<IndecId> {
        let out = x.shifted(1);
        if self.contains(&out) {
            Ok(out)
        } else {
            Err(Error::BoundaryUndefined(format!("sigma({x}) leaves the window")))
        }
    }

    pub fn sigma_inv(&self, x: &IndecId) -> Result<IndecId> {
        let out = x.shifted(-1);
        if self.contains(&out) {
            Ok(out)
        } else {
            Err(Error::BoundaryUndefined(format!("sigma^-1({x}) leaves the window")))
        }
    }

    fn tube_rank(&self, tube: &str) -> Result<u32> {
        let ranks = self
            .quiver
            .family
            .tube_ranks()
            .ok_or_else(|| Error::InvalidInput("no tubes in finite type".into()))?;
        let ti: usize = tube
            .parse()
            .map_err(|_| Error::InvalidInput(format!("unknown tube label {tube}")))?;
        ranks
            .get(ti)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown tube label {tube}")))
    }

    /// Reflexive reachability along arrow chains. Only defined on the
    /// non-regular part in extended Dynkin windows.
    pub fn leq(&self, a: &IndecId, b: &IndecId) -> Result<bool> {
        if self.kind != Kind::Finite {
            let regular = |x: &IndecId| matches!(x, IndecId::Tube { .. });
            if regular(a) || regular(b) {
                return Err(Error::NotComparableDomain(format!("{a} <= {b}")));
            }
        }
        let ia = self
            .index_of(a)
            .ok_or_else(|| Error::InvalidInput(format!("{a} is not in the window")))?;
        let ib = self
            .index_of(b)
            .ok_or_else(|| Error::InvalidInput(format!("{b} is not in the window")))?;
        Ok(ia == ib || self.reach[ia][ib])
    }

    /// Degrees whose tau/sigma neighbours are certain to stay inside the
    /// window, suitable for exhaustive validation runs.
    pub fn interior_degrees(&self) -> std::ops::RangeInclusive<i32> {
        (self.d_lo + 1)..=(self.d_hi - 1)
    }

    /// In-neighbours of a vertex; together with tau this describes a mesh.
    pub fn mesh_middles(&self, id: &IndecId) -> Option<Vec<IndecId>> {
        let ix = self.index_of(id)?;
        self.tau_tab[ix]?;
        Some(
            self.arrows
                .iter()
                .filter(|&&(_, t)| t == ix)
                .map(|&(s, _)| self.vertices[s].clone())
                .collect(),
        )
    }

    pub fn obj_in_window(&self, obj: &Obj) -> bool {
        obj.summands().iter().all(|s| self.contains(s))
    }
}

fn closure(n: usize, arrows: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in arrows {
        succ[a].push(b);
    }
    for start in 0..n {
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &succ[u] {
                if !reach[start][v] {
                    reach[start][v] = true;
                    stack.push(v);
                }
            }
        }
    }
    reach
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Family;

    fn a2_window() -> ARWindow {
        ARWindow::build(QuiverPreset::new(Family::A(2)), -1, 2, Caps::default()).unwrap()
    }

    #[test]
    fn a2_counts_and_tau() {
        let w = a2_window();
        assert_eq!(w.indecs().len(), 12);
        for d in -1..=2 {
            let n = w.indecs().iter().filter(|v| v.degree() == d).count();
            assert_eq!(n, 3);
        }
        // tau(S(2)) = S(1) within degree 0.
        let s2 = IndecId::finite(0, vec![0, 1]);
        let s1 = IndecId::finite(0, vec![1, 0]);
        assert_eq!(w.tau(&s2).unwrap(), s1);
        // tau of the projective-injective drops a degree: tau P(2) = Σ^-1 I(2).
        let p2 = IndecId::finite(0, vec![1, 1]);
        assert_eq!(w.tau(&p2).unwrap(), IndecId::finite(-1, vec![0, 1]));
    }

    #[test]
    fn a1_window_one_per_degree() {
        let w =
            ARWindow::build(QuiverPreset::new(Family::A(1)), 0, 1, Caps::default()).unwrap();
        assert_eq!(w.indecs().len(), 2);
    }

    #[test]
    fn d4_counts() {
        let w = ARWindow::build(QuiverPreset::new(Family::D(4)), 0, 1, Caps::default()).unwrap();
        for d in 0..=1 {
            assert_eq!(w.indecs().iter().filter(|v| v.degree() == d).count(), 12);
        }
    }

    #[test]
    fn tau_commutes_with_sigma_a3() {
        let w = ARWindow::build(QuiverPreset::new(Family::A(3)), -2, 3, Caps::default()).unwrap();
        for id in w.indecs() {
            let both = (w.sigma(id).and_then(|s| w.tau(&s)), w.tau(id).and_then(|t| w.sigma(&t)));
            if let (Ok(a), Ok(b)) = both {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn leq_a2() {
        let w = a2_window();
        let s1 = IndecId::finite(0, vec![1, 0]);
        let s2 = IndecId::finite(0, vec![0, 1]);
        assert!(w.leq(&s1, &s2).unwrap());
        assert!(!w.leq(&s2, &s1).unwrap());
        assert!(w.leq(&s1, &s1).unwrap());
        // Antisymmetry, exhaustively.
        for a in w.indecs() {
            for b in w.indecs() {
                if a != b {
                    assert!(!(w.leq(a, b).unwrap() && w.leq(b, a).unwrap()));
                }
            }
        }
    }

    #[test]
    fn window_too_small() {
        assert!(matches!(
            ARWindow::build(QuiverPreset::new(Family::A(2)), 0, 0, Caps::default()),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn extended_window_basics() {
        let w = ARWindow::build(
            QuiverPreset::new(Family::ATilde(2, 2)),
            0,
            2,
            Caps { k_cap: 6, len_cap: 4 },
        )
        .unwrap();
        let p = IndecId::NonRegular { side: Side::Postprojective, vertex: 0, k: 1, degree: 1 };
        assert!(w.contains(&p));
        assert_eq!(
            w.tau(&p).unwrap(),
            IndecId::NonRegular { side: Side::Postprojective, vertex: 0, k: 0, degree: 1 }
        );
        // A strictly increasing chain exists along the slices.
        let a = IndecId::NonRegular { side: Side::Postprojective, vertex: 0, k: 0, degree: 1 };
        let b = IndecId::NonRegular { side: Side::Postprojective, vertex: 0, k: 2, degree: 1 };
        assert!(w.leq(&a, &b).unwrap());
        // Tube coordinates are excluded from the partial order.
        let t = IndecId::Tube { tube: "0".into(), socle: 1, length: 1, degree: 1 };
        assert!(matches!(w.leq(&a, &t), Err(Error::NotComparableDomain(_))));
        // Tube tau decrements the socle cyclically.
        assert_eq!(
            w.tau(&t).unwrap(),
            IndecId::Tube { tube: "0".into(), socle: 2, length: 1, degree: 1 }
        );
    }
}
