//! Independent oracle for the tube calculus: explicit nilpotent
//! representations of the cyclic quiver with arrows v -> v-1 (mod rho).
//!
//! A uniserial object with socle s and length l becomes the representation
//! with one basis vector per composition factor; the arrow action moves each
//! basis vector one step towards the socle. Hom is computed as intertwiner
//! nullspaces, Ext^1 as the cokernel of the standard difference map, and
//! extension middles by gluing an explicit cocycle. Nothing here consults
//! the coordinate window rules.

use num_traits::Zero;

use super::TubeObj;
use crate::matrix::{q, QMat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerialRep {
    pub rho: usize,
    /// Dimension per vertex, index v-1 for vertex v in 1..=rho.
    pub dims: Vec<usize>,
    /// maps[v-1] is the matrix of the arrow v -> prev(v).
    pub maps: Vec<QMat>,
}

fn prev(rho: usize, v: usize) -> usize {
    if v == 1 {
        rho
    } else {
        v - 1
    }
}

fn vertex_of(rho: usize, socle: usize, h: usize) -> usize {
    (socle - 1 + h) % rho + 1
}

impl SerialRep {
    pub fn zero(rho: usize) -> SerialRep {
        SerialRep { rho, dims: vec![0; rho], maps: vec![QMat::zero(0, 0); rho] }
    }

    pub fn uniserial(t: &TubeObj) -> SerialRep {
        let rho = t.rho;
        // Basis: heights 0 (socle) .. length-1 (top); at vertex v the
        // heights h with socle + h = v (mod rho), in increasing order.
        let mut per_vertex: Vec<Vec<usize>> = vec![Vec::new(); rho];
        for h in 0..t.length {
            per_vertex[vertex_of(rho, t.socle, h) - 1].push(h);
        }
        let dims: Vec<usize> = per_vertex.iter().map(|b| b.len()).collect();
        let mut maps = Vec::with_capacity(rho);
        for v in 1..=rho {
            let w = prev(rho, v);
            let src = &per_vertex[v - 1];
            let tgt = &per_vertex[w - 1];
            let mut m = QMat::zero(tgt.len(), src.len());
            for (j, &h) in src.iter().enumerate() {
                if h >= 1 {
                    let i = tgt.iter().position(|&g| g == h - 1).expect("height below top");
                    *m.at_mut(i, j) = q(1);
                }
            }
            maps.push(m);
        }
        SerialRep { rho, dims, maps }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    fn map_from(&self, v: usize) -> &QMat {
        &self.maps[v - 1]
    }
}

/// Flattened layout of one linear map per vertex, row-major per vertex.
fn var_count(a: &SerialRep, b: &SerialRep) -> usize {
    (0..a.rho).map(|i| a.dims[i] * b.dims[i]).sum()
}

fn var_offset(a: &SerialRep, b: &SerialRep, v: usize) -> usize {
    (0..v - 1).map(|i| a.dims[i] * b.dims[i]).sum()
}

/// Intertwiner constraints: for each arrow v -> w, B_a f_v = f_w A_a.
fn intertwiner_matrix(a: &SerialRep, b: &SerialRep) -> QMat {
    assert_eq!(a.rho, b.rho);
    let rho = a.rho;
    let vars = var_count(a, b);
    let mut rows: Vec<Vec<crate::matrix::Q>> = Vec::new();
    for v in 1..=rho {
        let w = prev(rho, v);
        let am = a.map_from(v);
        let bm = b.map_from(v);
        for i in 0..b.dims[w - 1] {
            for j in 0..a.dims[v - 1] {
                let mut row = vec![crate::matrix::Q::zero(); vars];
                // (B_a f_v)_{ij} = sum_k (B_a)_{ik} (f_v)_{kj}
                let off_v = var_offset(a, b, v);
                for k in 0..b.dims[v - 1] {
                    row[off_v + k * a.dims[v - 1] + j] += bm.at(i, k).clone();
                }
                // (f_w A_a)_{ij} = sum_k (f_w)_{ik} (A_a)_{kj}
                let off_w = var_offset(a, b, w);
                for k in 0..a.dims[w - 1] {
                    row[off_w + i * a.dims[w - 1] + k] -= am.at(k, j).clone();
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return QMat::zero(0, vars);
    }
    QMat::from_fn(rows.len(), vars, |r, c| rows[r][c].clone())
}

pub fn hom_dim(a: &TubeObj, b: &TubeObj) -> usize {
    let ra = SerialRep::uniserial(a);
    let rb = SerialRep::uniserial(b);
    let m = intertwiner_matrix(&ra, &rb);
    m.cols - m.rank()
}

/// Difference map delta: (f_v) -> (B_a f_v - f_w A_a) over all arrows; its
/// cokernel is Ext^1 for representations of a quiver without relations.
fn delta_matrix(a: &SerialRep, b: &SerialRep) -> (QMat, usize) {
    let rho = a.rho;
    let vars = var_count(a, b);
    // Target coordinates: per arrow v -> w an entry space Hom(A_v, B_w).
    let mut tgt_off = vec![0usize; rho + 1];
    for v in 1..=rho {
        let w = prev(rho, v);
        tgt_off[v] = tgt_off[v - 1] + b.dims[w - 1] * a.dims[v - 1];
    }
    let total = tgt_off[rho];
    let mut m = QMat::zero(total, vars);
    for v in 1..=rho {
        let w = prev(rho, v);
        let am = a.map_from(v);
        let bm = b.map_from(v);
        let base = tgt_off[v - 1];
        for i in 0..b.dims[w - 1] {
            for j in 0..a.dims[v - 1] {
                let r = base + i * a.dims[v - 1] + j;
                let off_v = var_offset(a, b, v);
                for k in 0..b.dims[v - 1] {
                    *m.at_mut(r, off_v + k * a.dims[v - 1] + j) += bm.at(i, k).clone();
                }
                let off_w = var_offset(a, b, w);
                for k in 0..a.dims[w - 1] {
                    *m.at_mut(r, off_w + i * a.dims[w - 1] + k) -= am.at(k, j).clone();
                }
            }
        }
    }
    (m, total)
}

pub fn ext_dim(a: &TubeObj, b: &TubeObj) -> usize {
    let ra = SerialRep::uniserial(a);
    let rb = SerialRep::uniserial(b);
    let (m, total) = delta_matrix(&ra, &rb);
    total - m.rank()
}

/// Euler form of the dimension vectors: sum of products at vertices minus
/// sum over arrows; must equal hom_dim - ext_dim.
pub fn euler_form(a: &TubeObj, b: &TubeObj) -> i64 {
    let ra = SerialRep::uniserial(a);
    let rb = SerialRep::uniserial(b);
    let rho = ra.rho;
    let mut e: i64 = 0;
    for v in 1..=rho {
        e += (ra.dims[v - 1] * rb.dims[v - 1]) as i64;
        let w = prev(rho, v);
        e -= (ra.dims[v - 1] * rb.dims[w - 1]) as i64;
    }
    e
}

/// Middle term of a non-split extension of `t` by `tp`: glue along a
/// cocycle outside the image of the difference map and decompose the glued
/// representation into uniserials (socle, length, multiplicity).
pub fn extension_middle(t: &TubeObj, tp: &TubeObj) -> Option<Vec<(usize, usize, usize)>> {
    let ra = SerialRep::uniserial(t);
    let rb = SerialRep::uniserial(tp);
    let (m, total) = delta_matrix(&ra, &rb);
    if total == m.rank() {
        return None;
    }
    // Find a unit vector outside the column span of delta.
    let mut eta = None;
    for i in 0..total {
        let mut v = QMat::zero(total, 1);
        *v.at_mut(i, 0) = q(1);
        if QMat::in_span(&m, &v).is_none() {
            eta = Some(i);
            break;
        }
    }
    let eta = eta.expect("cokernel is non-zero, some unit vector lies outside");
    // Rebuild the per-arrow block containing coordinate eta.
    let rho = ra.rho;
    let mut dims = Vec::with_capacity(rho);
    for v in 1..=rho {
        dims.push(rb.dims[v - 1] + ra.dims[v - 1]);
    }
    let mut tgt_off = vec![0usize; rho + 1];
    for v in 1..=rho {
        let w = prev(rho, v);
        tgt_off[v] = tgt_off[v - 1] + rb.dims[w - 1] * ra.dims[v - 1];
    }
    let mut maps = Vec::with_capacity(rho);
    for v in 1..=rho {
        let w = prev(rho, v);
        let (bt, at_) = (rb.dims[w - 1], ra.dims[v - 1]);
        let mut blk = QMat::zero(rb.dims[w - 1] + ra.dims[w - 1], rb.dims[v - 1] + ra.dims[v - 1]);
        for i in 0..rb.dims[w - 1] {
            for j in 0..rb.dims[v - 1] {
                *blk.at_mut(i, j) = rb.map_from(v).at(i, j).clone();
            }
        }
        for i in 0..ra.dims[w - 1] {
            for j in 0..ra.dims[v - 1] {
                *blk.at_mut(rb.dims[w - 1] + i, rb.dims[v - 1] + j) =
                    ra.map_from(v).at(i, j).clone();
            }
        }
        // Cocycle block: unit entry if eta indexes this arrow.
        if eta >= tgt_off[v - 1] && eta < tgt_off[v] {
            let local = eta - tgt_off[v - 1];
            let (i, j) = (local / at_, local % at_);
            debug_assert!(i < bt);
            *blk.at_mut(i, rb.dims[v - 1] + j) = q(1);
        }
        maps.push(blk);
    }
    let glued = SerialRep { rho, dims, maps };
    Some(decompose(&glued))
}

/// Krull-Schmidt decomposition into uniserials by rank counting: the number
/// of summands with socle s and length >= l is the drop in rank of the
/// (l-1)-step versus l-step composite starting at the matching top vertex.
pub fn decompose(rep: &SerialRep) -> Vec<(usize, usize, usize)> {
    let rho = rep.rho;
    let max_len = rep.total_dim();
    if max_len == 0 {
        return vec![];
    }
    // psi[v-1][j] = rank of the j-step composite starting at vertex v.
    let mut psi = vec![vec![0usize; max_len + 2]; rho];
    for v in 1..=rho {
        let mut acc = QMat::identity(rep.dims[v - 1]);
        psi[v - 1][0] = rep.dims[v - 1];
        let mut cur = v;
        for j in 1..=max_len + 1 {
            acc = rep.map_from(cur).mul(&acc);
            psi[v - 1][j] = acc.rank();
            cur = prev(rho, cur);
        }
    }
    let count_geq = |socle: usize, l: usize| -> usize {
        let v = vertex_of(rho, socle, l - 1);
        psi[v - 1][l - 1] - psi[v - 1][l]
    };
    let mut out = Vec::new();
    for socle in 1..=rho {
        for l in 1..=max_len {
            let m = count_geq(socle, l) - count_geq(socle, l + 1);
            if m > 0 {
                out.push((socle, l, m));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rho: usize, socle: i64, len: usize) -> TubeObj {
        TubeObj::new(rho, socle, len, 0)
    }

    #[test]
    fn uniserial_roundtrip() {
        for rho in [1usize, 2, 3, 5] {
            for socle in 1..=rho {
                for len in 1..=(2 * rho + 1) {
                    let obj = t(rho, socle as i64, len);
                    let rep = SerialRep::uniserial(&obj);
                    assert_eq!(rep.total_dim(), len);
                    assert_eq!(decompose(&rep), vec![(socle, len, 1)], "{obj}");
                }
            }
        }
    }

    #[test]
    fn hom_matches_window_rule_small() {
        for rho in [2usize, 3, 5] {
            for sa in 1..=rho {
                for la in 1..=rho + 2 {
                    for sb in 1..=rho {
                        for lb in 1..=rho + 2 {
                            let a = t(rho, sa as i64, la);
                            let b = t(rho, sb as i64, lb);
                            assert_eq!(
                                hom_dim(&a, &b),
                                super::super::tube_hom_dim(&a, &b).unwrap(),
                                "hom({a},{b}) rho={rho}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn euler_form_identity() {
        for rho in [2usize, 3] {
            for sa in 1..=rho {
                for la in 1..=rho + 1 {
                    for sb in 1..=rho {
                        for lb in 1..=rho + 1 {
                            let a = t(rho, sa as i64, la);
                            let b = t(rho, sb as i64, lb);
                            assert_eq!(
                                euler_form(&a, &b),
                                hom_dim(&a, &b) as i64 - ext_dim(&a, &b) as i64
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn middle_matches_coordinate_rule() {
        let a = t(5, 2, 1);
        let b = t(5, 1, 1);
        let mids = extension_middle(&a, &b).unwrap();
        assert_eq!(mids, vec![(1, 2, 1)]);
        let a = t(5, 1, 1);
        let b = t(5, 2, 4);
        let mids = extension_middle(&a, &b).unwrap();
        assert_eq!(mids, vec![(2, 5, 1)]);
    }
}
