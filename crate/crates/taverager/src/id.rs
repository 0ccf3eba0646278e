//! Canonical names for indecomposable objects and formal direct sums.
//!
//! Textual forms:
//!   finite type      M[dv=1,1]@d0
//!   tube coordinate  T[λ0;s=1;l=3]@d0      (socle is 1-based mod the rank)
//!   non-regular      P[v=2;k=3]@d0 / I[v=2;k=3]@d0
//! Degrees may be negative: `@d-1`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Postprojective,
    Preinjective,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndecId {
    /// Indecomposable of the derived category of a Dynkin quiver: a shift of
    /// the module with the given dimension vector (a positive root).
    FiniteType { degree: i32, dimvec: Vec<u32> },
    /// Object of a stable tube: socle index (1-based) and length.
    Tube { tube: String, socle: u32, length: u32, degree: i32 },
    /// Object of a non-regular component of a tame hereditary category,
    /// `k` applications of the inverse translate away from the end slice.
    NonRegular { side: Side, vertex: usize, k: u32, degree: i32 },
}

impl IndecId {
    pub fn degree(&self) -> i32 {
        match self {
            IndecId::FiniteType { degree, .. }
            | IndecId::Tube { degree, .. }
            | IndecId::NonRegular { degree, .. } => *degree,
        }
    }

    pub fn shifted(&self, by: i32) -> IndecId {
        let mut c = self.clone();
        match &mut c {
            IndecId::FiniteType { degree, .. }
            | IndecId::Tube { degree, .. }
            | IndecId::NonRegular { degree, .. } => *degree += by,
        }
        c
    }

    pub fn finite(degree: i32, dimvec: Vec<u32>) -> IndecId {
        IndecId::FiniteType { degree, dimvec }
    }

    pub fn parse(s: &str) -> Result<IndecId> {
        let bad = || Error::InvalidInput(format!("cannot parse object name `{s}`"));
        let (body, deg) = match s.rsplit_once("@d") {
            Some((b, d)) => (b, d.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        if let Some(inner) = body.strip_prefix("M[").and_then(|b| b.strip_suffix(']')) {
            let dv = inner.strip_prefix("dv=").ok_or_else(bad)?;
            let dimvec = dv
                .split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(IndecId::FiniteType { degree: deg, dimvec });
        }
        if let Some(inner) = body.strip_prefix("T[").and_then(|b| b.strip_suffix(']')) {
            let mut tube = None;
            let mut socle = None;
            let mut length = None;
            for part in inner.split(';') {
                let part = part.trim();
                if let Some(v) = part.strip_prefix("s=") {
                    socle = Some(v.parse::<u32>().map_err(|_| bad())?);
                } else if let Some(v) = part.strip_prefix("l=") {
                    length = Some(v.parse::<u32>().map_err(|_| bad())?);
                } else if let Some(v) = part.strip_prefix("λ") {
                    tube = Some(v.to_string());
                } else if let Some(v) = part.strip_prefix("lambda") {
                    tube = Some(v.to_string());
                } else {
                    return Err(bad());
                }
            }
            return Ok(IndecId::Tube {
                tube: tube.unwrap_or_default(),
                socle: socle.ok_or_else(bad)?,
                length: length.ok_or_else(bad)?,
                degree: deg,
            });
        }
        for (prefix, side) in [("P[", Side::Postprojective), ("I[", Side::Preinjective)] {
            if let Some(inner) = body.strip_prefix(prefix).and_then(|b| b.strip_suffix(']')) {
                let mut vertex = None;
                let mut k = None;
                for part in inner.split(';') {
                    let part = part.trim();
                    if let Some(v) = part.strip_prefix("v=") {
                        let v1 = v.parse::<usize>().map_err(|_| bad())?;
                        if v1 == 0 {
                            return Err(bad());
                        }
                        vertex = Some(v1 - 1);
                    } else if let Some(v) = part.strip_prefix("k=") {
                        k = Some(v.parse::<u32>().map_err(|_| bad())?);
                    } else {
                        return Err(bad());
                    }
                }
                return Ok(IndecId::NonRegular {
                    side,
                    vertex: vertex.ok_or_else(bad)?,
                    k: k.ok_or_else(bad)?,
                    degree: deg,
                });
            }
        }
        Err(bad())
    }
}

impl std::fmt::Display for IndecId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IndecId::FiniteType { degree, dimvec } => {
                let dv: Vec<String> = dimvec.iter().map(|x| x.to_string()).collect();
                write!(f, "M[dv={}]@d{}", dv.join(","), degree)
            }
            IndecId::Tube { tube, socle, length, degree } => {
                write!(f, "T[λ{};s={};l={}]@d{}", tube, socle, length, degree)
            }
            IndecId::NonRegular { side, vertex, k, degree } => {
                let c = match side {
                    Side::Postprojective => 'P',
                    Side::Preinjective => 'I',
                };
                write!(f, "{}[v={};k={}]@d{}", c, vertex + 1, k, degree)
            }
        }
    }
}

/// Formal finite direct sum of indecomposables; the empty sum is zero.
/// Kept sorted, so equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Obj {
    summands: Vec<IndecId>,
}

impl Obj {
    pub fn zero() -> Obj {
        Obj::default()
    }

    pub fn one(id: IndecId) -> Obj {
        Obj { summands: vec![id] }
    }

    pub fn from_vec(mut v: Vec<IndecId>) -> Obj {
        v.sort();
        Obj { summands: v }
    }

    pub fn push(&mut self, id: IndecId) {
        let pos = self.summands.partition_point(|x| x <= &id);
        self.summands.insert(pos, id);
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn summands(&self) -> &[IndecId] {
        &self.summands
    }

    pub fn plus(&self, other: &Obj) -> Obj {
        let mut v = self.summands.clone();
        v.extend(other.summands.iter().cloned());
        Obj::from_vec(v)
    }

    pub fn shifted(&self, by: i32) -> Obj {
        Obj::from_vec(self.summands.iter().map(|s| s.shifted(by)).collect())
    }

    /// True if `other` is a sub-multiset of `self`.
    pub fn contains(&self, other: &Obj) -> bool {
        let mut rest = self.summands.clone();
        for s in &other.summands {
            match rest.iter().position(|x| x == s) {
                Some(i) => {
                    rest.remove(i);
                }
                None => return false,
            }
        }
        true
    }

    /// Uniform shift m with self == other.shifted(m), if one exists.
    pub fn shift_matching(&self, other: &Obj) -> Option<i32> {
        if self.len() != other.len() {
            return None;
        }
        if self.is_zero() {
            return Some(0);
        }
        let m = self.summands[0].degree() - other.summands[0].degree();
        if *self == other.shifted(m) {
            Some(m)
        } else {
            None
        }
    }
}

impl std::fmt::Display for Obj {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.summands.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl FromIterator<IndecId> for Obj {
    fn from_iter<T: IntoIterator<Item = IndecId>>(iter: T) -> Self {
        Obj::from_vec(iter.into_iter().collect())
    }
}
