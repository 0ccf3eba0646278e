//! Quiver presets of simply-laced Dynkin and extended Dynkin type.
//!
//! Vertices are 0-based internally; all textual forms are 1-based. The
//! default orientation points every arrow towards the lower-numbered vertex,
//! so vertex 1 carries a simple projective. A(n) additionally accepts a
//! custom orientation given as an explicit arrow list over the same edges.

use crate::error::{Error, Result};
use crate::matrix::{q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    A(usize),
    D(usize),
    E(usize),
    ATilde(usize, usize),
    DTilde(usize),
    ETilde(usize),
}

impl Family {
    pub fn is_finite(&self) -> bool {
        matches!(self, Family::A(_) | Family::D(_) | Family::E(_))
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            Family::A(n) => n,
            Family::D(n) => n,
            Family::E(n) => n,
            Family::ATilde(p, q) => p + q,
            Family::DTilde(n) => n + 1,
            Family::ETilde(n) => n + 1,
        }
    }

    /// Undirected edges, canonically ordered.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match *self {
            Family::A(n) => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Family::D(n) => {
                let mut e = vec![(0, 2), (1, 2)];
                e.extend((2..n - 1).map(|i| (i, i + 1)));
                e
            }
            Family::E(n) => {
                // Chain 0..n-2 with the branch vertex n-1 attached at 2.
                let mut e: Vec<(usize, usize)> = (0..n - 2).map(|i| (i, i + 1)).collect();
                e.push((2, n - 1));
                e
            }
            Family::ATilde(p, q) => {
                // Two directed paths of lengths p and q from vertex 0 to
                // vertex p: 0,1,..,p and 0,p+q-1,..,p+1,p.
                let mut e: Vec<(usize, usize)> = (0..p).map(|i| (i, i + 1)).collect();
                let mut prev = 0;
                for j in (p + 1..p + q).rev() {
                    e.push((prev, j));
                    prev = j;
                }
                e.push((prev, p));
                e
            }
            Family::DTilde(n) => {
                let mut e = vec![(0, 2), (1, 2)];
                e.extend((2..n - 2).map(|i| (i, i + 1)));
                e.push((n - 2, n - 1));
                e.push((n - 2, n));
                e
            }
            Family::ETilde(n) => {
                let mut e = Family::E(n).edges();
                // Attach the extending vertex at the end of the longest arm.
                match n {
                    6 => e.push((n - 1, n)),
                    7 => e.push((n - 2, n)),
                    8 => e.push((n - 2, n)),
                    _ => unreachable!(),
                }
                e
            }
        }
    }

    pub fn tube_ranks(&self) -> Option<Vec<u32>> {
        match *self {
            Family::ATilde(p, q) => Some(vec![p as u32, q as u32]),
            Family::DTilde(n) => Some(vec![2, 2, (n - 2) as u32]),
            Family::ETilde(6) => Some(vec![2, 3, 3]),
            Family::ETilde(7) => Some(vec![2, 3, 4]),
            Family::ETilde(8) => Some(vec![2, 3, 5]),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        let bad = || Error::UnsupportedPreset(s.to_string());
        let fam = if let Some(rest) = s.strip_prefix("Atilde(") {
            let inner = rest.strip_suffix(')').ok_or_else(bad)?;
            let (p, q) = inner.split_once(',').ok_or_else(bad)?;
            let p: usize = p.trim().parse().map_err(|_| bad())?;
            let q: usize = q.trim().parse().map_err(|_| bad())?;
            if p < 1 || q < 1 || p + q < 3 {
                return Err(bad());
            }
            Family::ATilde(p, q)
        } else if let Some(rest) = s.strip_prefix("Dtilde(") {
            let n: usize = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            if n < 4 {
                return Err(bad());
            }
            Family::DTilde(n)
        } else if let Some(rest) = s.strip_prefix("Etilde(") {
            let n: usize = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            if !(6..=8).contains(&n) {
                return Err(bad());
            }
            Family::ETilde(n)
        } else {
            let (letter, num) = s.split_at(1);
            let n: usize = num.parse().map_err(|_| bad())?;
            match letter {
                "A" if n >= 1 => Family::A(n),
                "D" if n >= 4 => Family::D(n),
                "E" if (6..=8).contains(&n) => Family::E(n),
                _ => return Err(bad()),
            }
        };
        Ok(fam)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Family::A(n) => write!(f, "A{n}"),
            Family::D(n) => write!(f, "D{n}"),
            Family::E(n) => write!(f, "E{n}"),
            Family::ATilde(p, q) => write!(f, "Atilde({p},{q})"),
            Family::DTilde(n) => write!(f, "Dtilde({n})"),
            Family::ETilde(n) => write!(f, "Etilde({n})"),
        }
    }
}

/// A concrete quiver: a chosen orientation of a preset's edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    pub family: Family,
    pub n: usize,
    /// Directed arrows (source, target), 0-based.
    pub arrows: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverPreset {
    pub family: Family,
    /// Explicit arrow list (0-based) overriding the default orientation.
    pub orientation: Option<Vec<(usize, usize)>>,
}

impl QuiverPreset {
    pub fn new(family: Family) -> Self {
        QuiverPreset { family, orientation: None }
    }

    pub fn with_orientation(family: Family, arrows: Vec<(usize, usize)>) -> Self {
        QuiverPreset { family, orientation: Some(arrows) }
    }

    pub fn quiver(&self) -> Result<Quiver> {
        let n = self.family.vertex_count();
        let edges = self.family.edges();
        let arrows = match &self.orientation {
            // Default: arrows towards the lower endpoint, except the cyclic
            // Atilde families which keep their canonical two-path layout.
            None => match self.family {
                Family::ATilde(_, _) => edges.clone(),
                _ => edges.iter().map(|&(a, b)| (b.max(a), b.min(a))).collect(),
            },
            Some(or) => {
                let mut want: Vec<(usize, usize)> =
                    edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                want.sort_unstable();
                let mut got: Vec<(usize, usize)> =
                    or.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                got.sort_unstable();
                if want != got {
                    return Err(Error::UnsupportedPreset(format!(
                        "orientation does not match the edges of {}",
                        self.family
                    )));
                }
                or.clone()
            }
        };
        Ok(Quiver { family: self.family, n, arrows })
    }
}

impl Quiver {
    /// Tits form q(d) = sum d_i^2 - sum_{arrows} d_s d_t.
    fn tits(&self, d: &[i64]) -> i64 {
        let mut v: i64 = d.iter().map(|x| x * x).sum();
        for &(s, t) in &self.arrows {
            v -= d[s] * d[t];
        }
        v
    }

    /// All positive roots, lexicographically sorted. Finite type only.
    pub fn positive_roots(&self) -> Result<Vec<Vec<u32>>> {
        if !self.family.is_finite() {
            return Err(Error::NotFiniteType(self.family.to_string()));
        }
        let cap: i64 = match self.family {
            Family::A(_) => 1,
            Family::D(_) => 2,
            Family::E(6) => 3,
            Family::E(7) => 4,
            Family::E(8) => 6,
            _ => unreachable!(),
        };
        let mut roots = Vec::new();
        let mut d = vec![0i64; self.n];
        loop {
            if d.iter().any(|&x| x > 0) && self.tits(&d) == 1 {
                roots.push(d.iter().map(|&x| x as u32).collect());
            }
            // Odometer over 0..=cap per coordinate.
            let mut i = 0;
            loop {
                if i == self.n {
                    roots.sort();
                    return Ok(roots);
                }
                if d[i] < cap {
                    d[i] += 1;
                    break;
                }
                d[i] = 0;
                i += 1;
            }
        }
    }

    /// Dimension vector of the indecomposable projective at v: 1 at every
    /// vertex reachable from v along arrows.
    pub fn proj_dimvec(&self, v: usize) -> Vec<u32> {
        self.reach(v, true)
    }

    /// Dimension vector of the indecomposable injective at v: 1 at every
    /// vertex from which v is reachable.
    pub fn inj_dimvec(&self, v: usize) -> Vec<u32> {
        self.reach(v, false)
    }

    fn reach(&self, v: usize, forward: bool) -> Vec<u32> {
        let mut seen = vec![0u32; self.n];
        let mut stack = vec![v];
        seen[v] = 1;
        while let Some(u) = stack.pop() {
            for &(s, t) in &self.arrows {
                let (from, to) = if forward { (s, t) } else { (t, s) };
                if from == u && seen[to] == 0 {
                    seen[to] = 1;
                    stack.push(to);
                }
            }
        }
        seen
    }

    /// Euler form <d, e> = sum d_i e_i - sum_{arrows s->t} d_s e_t.
    pub fn euler_form(&self, d: &[u32], e: &[u32]) -> Q {
        let mut v = q(0);
        for i in 0..self.n {
            v += q(d[i] as i64 * e[i] as i64);
        }
        for &(s, t) in &self.arrows {
            v -= q(d[s] as i64 * e[t] as i64);
        }
        v
    }

    /// Vertices ordered so that every arrow target precedes its source.
    /// Finite (acyclic) type only.
    pub fn topo_targets_first(&self) -> Vec<usize> {
        let mut order = Vec::new();
        let mut placed = vec![false; self.n];
        while order.len() < self.n {
            let before = order.len();
            for v in 0..self.n {
                if placed[v] {
                    continue;
                }
                let ok = self
                    .arrows
                    .iter()
                    .all(|&(s, t)| s != v || placed[t]);
                if ok {
                    placed[v] = true;
                    order.push(v);
                }
            }
            assert!(order.len() > before, "quiver has an oriented cycle");
        }
        order
    }
}
