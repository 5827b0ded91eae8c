use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::{group_closure, GroupElement, GroupTable, MatError};
use crate::gfield::{FieldCtx, FieldElem};

/// Square matrix over GF(q), row-major.
#[derive(Clone)]
pub struct Mat<'a> {
    ctx: &'a FieldCtx,
    m: usize,
    entries: Vec<FieldElem>,
}

impl<'a> Mat<'a> {
    pub fn new(ctx: &'a FieldCtx, m: usize, entries: Vec<FieldElem>) -> Result<Self, MatError> {
        if entries.len() != m * m {
            return Err(MatError::DimensionMismatch(format!(
                "{} entries for a {m}x{m} matrix",
                entries.len()
            )));
        }
        Ok(Mat { ctx, m, entries })
    }

    pub fn identity(ctx: &'a FieldCtx, m: usize) -> Self {
        Self::scalar(ctx, m, FieldElem::ONE)
    }

    pub fn scalar(ctx: &'a FieldCtx, m: usize, c: FieldElem) -> Self {
        let mut entries = vec![FieldElem::ZERO; m * m];
        for i in 0..m {
            entries[i * m + i] = c;
        }
        Mat { ctx, m, entries }
    }

    pub fn from_fn(ctx: &'a FieldCtx, m: usize, f: impl Fn(usize, usize) -> FieldElem) -> Self {
        let entries = (0..m * m).map(|i| f(i / m, i % m)).collect();
        Mat { ctx, m, entries }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    pub fn mul(&self, other: &Mat<'a>) -> Mat<'a> {
        let (m, f) = (self.m, self.ctx);
        let mut entries = vec![FieldElem::ZERO; m * m];
        for i in 0..m {
            for k in 0..m {
                let a = self.entries[i * m + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let e = &mut entries[i * m + j];
                    *e = f.add(*e, f.mul(a, other.entries[k * m + j]));
                }
            }
        }
        Mat { ctx: f, m, entries }
    }

    pub fn scale(&self, c: FieldElem) -> Mat<'a> {
        let entries = self.entries.iter().map(|&e| self.ctx.mul(c, e)).collect();
        Mat { ctx: self.ctx, m: self.m, entries }
    }

    pub fn transpose(&self) -> Mat<'a> {
        Mat::from_fn(self.ctx, self.m, |i, j| self.get(j, i))
    }

    pub fn det(&self) -> FieldElem {
        let (m, f) = (self.m, self.ctx);
        let mut a = self.entries.clone();
        let mut det = FieldElem::ONE;
        for col in 0..m {
            let Some(piv) = (col..m).find(|&r| !a[r * m + col].is_zero()) else {
                return FieldElem::ZERO;
            };
            if piv != col {
                for j in 0..m {
                    a.swap(piv * m + j, col * m + j);
                }
                det = f.neg(det);
            }
            let pv = a[col * m + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("pivot is nonzero");
            for r in col + 1..m {
                let factor = f.mul(a[r * m + col], pinv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..m {
                    a[r * m + j] = f.sub(a[r * m + j], f.mul(factor, a[col * m + j]));
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn try_inverse(&self) -> Option<Mat<'a>> {
        let (m, f) = (self.m, self.ctx);
        let mut a = self.entries.clone();
        let mut b = Mat::identity(f, m).entries;
        for col in 0..m {
            let piv = (col..m).find(|&r| !a[r * m + col].is_zero())?;
            for j in 0..m {
                a.swap(piv * m + j, col * m + j);
                b.swap(piv * m + j, col * m + j);
            }
            let pinv = f.inv(a[col * m + col]).ok()?;
            for j in 0..m {
                a[col * m + j] = f.mul(a[col * m + j], pinv);
                b[col * m + j] = f.mul(b[col * m + j], pinv);
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let factor = a[r * m + col];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m {
                    a[r * m + j] = f.sub(a[r * m + j], f.mul(factor, a[col * m + j]));
                    b[r * m + j] = f.sub(b[r * m + j], f.mul(factor, b[col * m + j]));
                }
            }
        }
        Some(Mat { ctx: f, m, entries: b })
    }

    pub fn apply(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let f = self.ctx;
        (0..self.m)
            .map(|i| {
                (0..self.m).fold(FieldElem::ZERO, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j])))
            })
            .collect()
    }

    /// Block-diagonal matrix with `self` in the top-left and `other` below.
    pub fn block_diag(&self, other: &Mat<'a>) -> Mat<'a> {
        let (a, b) = (self.m, other.m);
        Mat::from_fn(self.ctx, a + b, |i, j| match (i < a, j < a) {
            (true, true) => self.get(i, j),
            (false, false) => other.get(i - a, j - a),
            _ => FieldElem::ZERO,
        })
    }
}

impl PartialEq for Mat<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.entries == other.entries
    }
}

impl Eq for Mat<'_> {}

impl Hash for Mat<'_> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.m.hash(state);
        self.entries.hash(state);
    }
}

impl PartialOrd for Mat<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mat<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.m, &self.entries).cmp(&(other.m, &other.entries))
    }
}

impl fmt::Debug for Mat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u32>> =
            (0..self.m).map(|i| (0..self.m).map(|j| self.get(i, j).0).collect()).collect();
        write!(f, "Mat{rows:?}")
    }
}

impl GroupElement for Mat<'_> {
    fn compose(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn inverse(&self) -> Self {
        self.try_inverse().expect("group elements are invertible")
    }
}

/// Element of PSL_m(q): the class of a matrix modulo the scalar center,
/// stored by its lexicographically least scalar multiple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjMat<'a> {
    rep: Mat<'a>,
}

impl<'a> ProjMat<'a> {
    pub fn new(mat: Mat<'a>) -> Self {
        let m = mat.m as u64;
        let rep = mat
            .ctx
            .roots_of_unity(m)
            .into_iter()
            .map(|c| mat.scale(c))
            .min()
            .expect("1 is always a root of unity");
        ProjMat { rep }
    }

    pub fn rep(&self) -> &Mat<'a> {
        &self.rep
    }
}

impl fmt::Debug for ProjMat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±{:?}", self.rep)
    }
}

impl GroupElement for ProjMat<'_> {
    fn compose(&self, other: &Self) -> Self {
        ProjMat::new(self.rep.mul(&other.rep))
    }

    fn inverse(&self) -> Self {
        ProjMat::new(self.rep.inverse())
    }
}

/// Elementary transvections `E + b e_ij` for basis elements `b` of GF(q)
/// over GF(p); they generate SL_m(q).
pub fn sl_generators(ctx: &FieldCtx, m: usize) -> Vec<Mat<'_>> {
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            for b in ctx.basis() {
                let mut t = Mat::identity(ctx, m);
                t.entries[i * m + j] = b;
                out.push(t);
            }
        }
    }
    out
}

pub fn special_linear(ctx: &FieldCtx, m: usize, cap: usize) -> Result<GroupTable<Mat<'_>>, MatError> {
    group_closure(Mat::identity(ctx, m), &sl_generators(ctx, m), cap)
}

pub fn projective_special_linear(
    ctx: &FieldCtx,
    m: usize,
    cap: usize,
) -> Result<GroupTable<ProjMat<'_>>, MatError> {
    let gens: Vec<ProjMat> = sl_generators(ctx, m).into_iter().map(ProjMat::new).collect();
    group_closure(ProjMat::new(Mat::identity(ctx, m)), &gens, cap)
}

/// Permutation of `0..n`; composition applies `self` first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u8).collect())
    }

    pub fn from_cycle(n: usize, cycle: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for (i, &a) in cycle.iter().enumerate() {
            p.0[a] = cycle[(i + 1) % cycle.len()] as u8;
        }
        p
    }

    pub fn is_even(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for s in 0..n {
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 0
    }
}

impl GroupElement for Perm {
    fn compose(&self, other: &Self) -> Self {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    fn inverse(&self) -> Self {
        let mut out = vec![0u8; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j as usize] = i as u8;
        }
        Perm(out)
    }
}

/// A_m generated by the 3-cycles (0 1 i).
pub fn alternating_group(m: usize, cap: usize) -> Result<GroupTable<Perm>, MatError> {
    let gens: Vec<Perm> = (2..m).map(|i| Perm::from_cycle(m, &[0, 1, i])).collect();
    group_closure(Perm::identity(m), &gens, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_canonicalization_is_scalar_invariant() {
        let f = FieldCtx::new(7, 1).unwrap();
        let a = Mat::new(&f, 2, vec![FieldElem(2), FieldElem(3), FieldElem(1), FieldElem(5)]).unwrap();
        let pa = ProjMat::new(a.clone());
        assert_eq!(ProjMat::new(pa.rep().clone()), pa);
        assert_eq!(ProjMat::new(a.scale(FieldElem(6))), pa);
        let f4 = FieldCtx::new(2, 2).unwrap();
        let b = Mat::from_fn(&f4, 3, |i, j| if i == j { FieldElem::ONE } else { FieldElem((i + j) as u32 % 4) });
        let pb = ProjMat::new(b.clone());
        for c in f4.roots_of_unity(3) {
            assert_eq!(ProjMat::new(b.scale(c)), pb);
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let f = FieldCtx::new(5, 1).unwrap();
        let a = Mat::new(&f, 2, vec![FieldElem(2), FieldElem(1), FieldElem(3), FieldElem(4)]).unwrap();
        assert_eq!(a.det(), FieldElem(0)); // 8 - 3 = 5 = 0
        assert!(a.try_inverse().is_none());
        let b = Mat::new(&f, 2, vec![FieldElem(2), FieldElem(1), FieldElem(1), FieldElem(1)]).unwrap();
        assert_eq!(b.det(), FieldElem::ONE);
        assert_eq!(b.mul(&b.inverse()), Mat::identity(&f, 2));
    }

    #[test]
    fn alternating_generators_are_even() {
        for m in 3..10 {
            for i in 2..m {
                assert!(Perm::from_cycle(m, &[0, 1, i]).is_even());
            }
        }
        assert!(!Perm::from_cycle(4, &[0, 1]).is_even());
    }
}
