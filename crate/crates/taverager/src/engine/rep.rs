//! Quiver representations over the rationals.
//!
//! `rep_of` produces one representation per positive root by reflecting the
//! root to a simple one through an admissible sequence of sinks and then
//! unwinding with reflection functors. In finite type this canonical model
//! is a brick, which the unit tests assert.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::matrix::{q, vec_of, QMat, Q};
use crate::quiver::Quiver;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rep {
    pub dims: Vec<usize>,
    /// Arrow (s, t) to a dims[t] x dims[s] matrix acting on columns.
    pub maps: BTreeMap<(usize, usize), QMat>,
}

impl Rep {
    pub fn zero_shapes(arrows: &[(usize, usize)], dims: Vec<usize>) -> Rep {
        let maps = arrows
            .iter()
            .map(|&(s, t)| ((s, t), QMat::zero(dims[t], dims[s])))
            .collect();
        Rep { dims, maps }
    }

    pub fn simple(quiver: &Quiver, v: usize) -> Rep {
        let mut dims = vec![0; quiver.n];
        dims[v] = 1;
        Rep::zero_shapes(&quiver.arrows, dims)
    }

    pub fn dimvec(&self) -> Vec<u32> {
        self.dims.iter().map(|&d| d as u32).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

/// Indecomposable representation with the given dimension vector, which must
/// be a positive root of a finite type quiver.
pub fn rep_of(quiver: &Quiver, dimvec: &[u32]) -> Rep {
    let n = quiver.n;
    assert_eq!(dimvec.len(), n);
    let order = quiver.topo_targets_first();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            quiver
                .arrows
                .iter()
                .filter_map(|&(s, t)| {
                    if s == v {
                        Some(t)
                    } else if t == v {
                        Some(s)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();

    // Walk the root down to a simple one; record each reflection together
    // with the orientation in which the reflected vertex is a source.
    let mut cur: Vec<i64> = dimvec.iter().map(|&x| x as i64).collect();
    let mut arrows = quiver.arrows.clone();
    let mut ops: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    let mut found: Option<usize> = None;
    'outer: for _pass in 0..4 * n + 8 {
        for &v in &order {
            if cur.iter().enumerate().all(|(i, &x)| x == i64::from(i == v)) {
                found = Some(v);
                break 'outer;
            }
            let refl: i64 = neighbors[v].iter().map(|&j| cur[j]).sum::<i64>() - cur[v];
            assert!(refl >= 0, "reflection of a non-simple root went negative");
            cur[v] = refl;
            for a in arrows.iter_mut() {
                if a.0 == v || a.1 == v {
                    *a = (a.1, a.0);
                }
            }
            ops.push((v, arrows.clone()));
        }
    }
    let v0 = found.expect("root did not reduce to a simple one");

    let mut rep = {
        let dims: Vec<usize> = (0..n).map(|i| usize::from(i == v0)).collect();
        Rep::zero_shapes(&arrows, dims)
    };
    // Unwind: each step turns a source back into a sink via the cokernel of
    // the diagonal map out of the reflected vertex.
    for (v, or) in ops.iter().rev() {
        let v = *v;
        let outs: Vec<usize> = or.iter().filter(|&&(s, _)| s == v).map(|&(_, t)| t).collect();
        let mut phi = QMat::zero(0, rep.dims[v]);
        for &j in &outs {
            phi = phi.vstack(&rep.maps[&(v, j)]);
        }
        let pi = phi.transpose().nullspace().transpose();
        assert_eq!(
            phi.rank(),
            rep.dims[v],
            "reflection functor applied to a representation with a simple summand"
        );
        let new_dim_v = pi.rows;
        let mut new_maps: BTreeMap<(usize, usize), QMat> = BTreeMap::new();
        let mut new_dims = rep.dims.clone();
        new_dims[v] = new_dim_v;
        let mut off = 0;
        for &j in &outs {
            let w = rep.dims[j];
            new_maps.insert((j, v), pi.submatrix(0, off, new_dim_v, w));
            off += w;
        }
        for (&(s, t), m) in &rep.maps {
            if s != v && t != v {
                new_maps.insert((s, t), m.clone());
            }
        }
        rep = Rep { dims: new_dims, maps: new_maps };
    }
    assert_eq!(rep.dimvec(), dimvec, "reflection unwinding produced a wrong dimension vector");
    for &(s, t) in &quiver.arrows {
        assert!(rep.maps.contains_key(&(s, t)));
    }
    rep
}

/// Basis of the intertwiner space Hom(M, N), as columns. Each column is the
/// concatenation of the per-vertex matrices f_v (row-major, vertex order).
pub fn hom_rep(quiver: &Quiver, m: &Rep, n: &Rep) -> QMat {
    let var_dims: Vec<usize> = (0..quiver.n).map(|v| n.dims[v] * m.dims[v]).collect();
    let offs: Vec<usize> = var_dims
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let total: usize = var_dims.iter().sum();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for &(s, t) in &quiver.arrows {
        let ma = &m.maps[&(s, t)];
        let na = &n.maps[&(s, t)];
        // N_a f_s - f_t M_a = 0, entry (r, c): r < n.dims[t], c < m.dims[s].
        for r in 0..n.dims[t] {
            for c in 0..m.dims[s] {
                let mut row = vec![Q::zero(); total];
                for k in 0..n.dims[s] {
                    // f_s entry (k, c)
                    row[offs[s] + k * m.dims[s] + c] += na.at(r, k).clone();
                }
                for k in 0..m.dims[t] {
                    // f_t entry (r, k)
                    row[offs[t] + r * m.dims[t] + k] -= ma.at(k, c).clone();
                }
                rows.push(row);
            }
        }
    }
    let sys = QMat::from_fn(rows.len(), total, |r, c| rows[r][c].clone());
    sys.nullspace()
}

pub fn hom_rep_dim(quiver: &Quiver, m: &Rep, n: &Rep) -> usize {
    hom_rep(quiver, m, n).cols
}

/// Projective presentation 0 -> P1 -> P0 -> M -> 0 in scalar form: copies of
/// indecomposable projectives listed by vertex, and the differential as a
/// scalar matrix (each Hom space between indecomposable projectives of a tree
/// quiver is at most one dimensional, spanned by the unique path map).
pub struct Presentation {
    pub p0: Vec<usize>,
    pub p1: Vec<usize>,
    /// |p0| x |p1| scalar matrix.
    pub d: QMat,
}

pub fn presentation(quiver: &Quiver, m: &Rep) -> Presentation {
    // P0 = sum over v of P(v) tensor M_v, P1 = sum over arrows a of
    // P(t(a)) tensor M_{s(a)}.
    let mut p0 = Vec::new();
    let mut p0_off = vec![0usize; quiver.n];
    for v in 0..quiver.n {
        p0_off[v] = p0.len();
        for _ in 0..m.dims[v] {
            p0.push(v);
        }
    }
    let mut p1 = Vec::new();
    let mut cols: Vec<((usize, usize), usize)> = Vec::new();
    for &(s, t) in &quiver.arrows {
        for b in 0..m.dims[s] {
            p1.push(t);
            cols.push(((s, t), b));
        }
    }
    let mut d = QMat::zero(p0.len(), p1.len());
    for (ci, &((s, t), b)) in cols.iter().enumerate() {
        // Component into P(s) tensor M_s: the path map times the identity.
        *d.at_mut(p0_off[s] + b, ci) = q(1);
        // Component into P(t) tensor M_t: minus the arrow action.
        let ma = &m.maps[&(s, t)];
        for g in 0..m.dims[t] {
            *d.at_mut(p0_off[t] + g, ci) = -ma.at(g, b).clone();
        }
    }
    // Euler characteristic check per vertex.
    for w in 0..quiver.n {
        let c0: i64 = p0.iter().map(|&v| i64::from(quiver.proj_dimvec(v)[w] == 1)).sum();
        let c1: i64 = p1.iter().map(|&v| i64::from(quiver.proj_dimvec(v)[w] == 1)).sum();
        assert_eq!(c0 - c1, m.dims[w] as i64, "presentation has a wrong class");
    }
    Presentation { p0, p1, d }
}

/// dim Ext^1(M, N) computed from the presentation of M as the cokernel of
/// Hom(P0, N) -> Hom(P1, N).
pub fn ext1_rep_dim(quiver: &Quiver, m: &Rep, n: &Rep) -> usize {
    let pres = presentation(quiver, m);
    // Hom(P(v), N) is N_v; the map induced by the scalar matrix d sends the
    // P0 coordinates to P1 coordinates through path actions of N.
    // Column space coordinates: concatenate N_{p1[j]} blocks.
    let dim_hom = |ps: &[usize]| -> usize { ps.iter().map(|&v| n.dims[v]).sum() };
    let rows_total = dim_hom(&pres.p1);
    let cols_total = dim_hom(&pres.p0);
    let mut big = QMat::zero(rows_total, cols_total);
    let mut roff = 0;
    for (j, &vj) in pres.p1.iter().enumerate() {
        let mut coff = 0;
        for (i, &vi) in pres.p0.iter().enumerate() {
            let s = pres.d.at(i, j);
            if !s.is_zero() {
                // Hom(P(vi), N) = N_{vi} -> Hom(P(vj), N) = N_{vj} through
                // the path map N_{vi} -> N_{vj} scaled by s.
                let pm = path_action(quiver, n, vi, vj);
                for r in 0..n.dims[vj] {
                    for c in 0..n.dims[vi] {
                        *big.at_mut(roff + r, coff + c) += pm.at(r, c) * s;
                    }
                }
            }
            coff += n.dims[vi];
        }
        roff += n.dims[vj];
    }
    rows_total - big.rank()
}

/// Action of the unique path from `from` to `to` on a representation of a
/// tree quiver: the composite N_{from} -> N_{to}, or zero if there is no path.
pub fn path_action(quiver: &Quiver, n: &Rep, from: usize, to: usize) -> QMat {
    if from == to {
        return QMat::identity(n.dims[from]);
    }
    if quiver.proj_dimvec(from)[to] != 1 {
        return QMat::zero(n.dims[to], n.dims[from]);
    }
    // Walk one arrow towards `to` and recurse.
    for &(s, t) in &quiver.arrows {
        if s == from && quiver.proj_dimvec(t)[to] == 1 {
            let rest = path_action(quiver, n, t, to);
            return rest.mul(&n.maps[&(s, t)]);
        }
    }
    unreachable!("reachable vertex without a first arrow");
}

/// Flattened intertwiner column back into per-vertex matrices.
pub fn unflatten_hom(m: &Rep, n: &Rep, col: &QMat) -> Vec<QMat> {
    let mut out = Vec::new();
    let mut off = 0;
    for v in 0..m.dims.len() {
        let rows = n.dims[v];
        let cols = m.dims[v];
        out.push(QMat::from_fn(rows, cols, |r, c| col.at(off + r * cols + c, 0).clone()));
        off += rows * cols;
    }
    out
}

/// Row-major flatten of per-vertex matrices into one column.
pub fn flatten_hom(mats: &[QMat]) -> QMat {
    let mut out = QMat::zero(0, 1);
    for m in mats {
        out = out.vstack(&vec_of(m));
    }
    out
}
