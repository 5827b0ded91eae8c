use std::collections::{BTreeSet, HashSet};

use super::{group_closure, special_linear, FiniteGroup, GroupTable, Mat, MatError, ProjMat, CLOSURE_CAP};
use crate::gfield::{FieldCtx, FieldElem};
use crate::SweepReport;

/// `M(v)`: identity of size m with `v` in the last column above the corner.
fn translation<'a>(ctx: &'a FieldCtx, v: &[FieldElem]) -> Mat<'a> {
    let m = v.len() + 1;
    Mat::from_fn(ctx, m, |i, j| {
        if i == j {
            FieldElem::ONE
        } else if j == m - 1 {
            v[i]
        } else {
            FieldElem::ZERO
        }
    })
}

/// Recovers `v` when `mat` has the form `M(v)`.
pub fn translation_vector(mat: &Mat<'_>) -> Option<Vec<FieldElem>> {
    let m = mat.dim();
    for i in 0..m {
        for j in 0..m - 1 {
            let want = if i == j { FieldElem::ONE } else { FieldElem::ZERO };
            if mat.get(i, j) != want {
                return None;
            }
        }
    }
    if mat.get(m - 1, m - 1) != FieldElem::ONE {
        return None;
    }
    Some((0..m - 1).map(|i| mat.get(i, m - 1)).collect())
}

fn all_vectors(ctx: &FieldCtx, len: usize) -> Vec<Vec<FieldElem>> {
    let q = ctx.q();
    let total = q.pow(len as u32);
    (0..total)
        .map(|mut idx| {
            (0..len)
                .map(|_| {
                    let c = FieldElem((idx % q) as u32);
                    idx /= q;
                    c
                })
                .collect()
        })
        .collect()
}

fn vec_add(ctx: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    a.iter().zip(b).map(|(&x, &y)| ctx.add(x, y)).collect()
}

/// The translation subgroup of PSL_m(q) with its verification record.
#[derive(Debug, Clone)]
pub struct TranslationGroup<'a> {
    pub table: GroupTable<ProjMat<'a>>,
    /// Rank over GF(p), `(m-1)k`.
    pub rank: u32,
    pub additivity: SweepReport,
    pub elementary_abelian: bool,
}

/// Builds `{M(v)}` inside PSL_m(q), checks `M(v)·M(w) = M(v+w)` on every
/// pair, and confirms the group is elementary abelian of rank `(m-1)k`.
pub fn translation_group(ctx: &FieldCtx, m: usize) -> Result<TranslationGroup<'_>, MatError> {
    if m < 2 {
        return Err(MatError::OutOfRange(format!("translation group needs m >= 2, got {m}")));
    }
    let rank = (m as u32 - 1) * ctx.k();
    if rank > 12 {
        return Err(MatError::CapExceeded(ctx.p().pow(rank.min(40)) as usize));
    }
    let vectors = all_vectors(ctx, m - 1);
    let mats: Vec<Mat> = vectors.iter().map(|v| translation(ctx, v)).collect();
    let mut additivity = SweepReport::default();
    for (v, mv) in vectors.iter().zip(&mats) {
        for (w, mw) in vectors.iter().zip(&mats) {
            additivity.record(mv.mul(mw) == translation(ctx, &vec_add(ctx, v, w)));
        }
    }
    let gens: Vec<ProjMat> = (0..m - 1)
        .flat_map(|i| {
            ctx.basis().into_iter().map(move |b| {
                let mut v = vec![FieldElem::ZERO; m - 1];
                v[i] = b;
                v
            })
        })
        .map(|v| ProjMat::new(translation(ctx, &v)))
        .collect();
    let table = group_closure(ProjMat::new(Mat::identity(ctx, m)), &gens, CLOSURE_CAP)?;
    let p = ctx.p() as usize;
    let abelian = table
        .generators()
        .iter()
        .all(|&a| table.generators().iter().all(|&b| table.mul(a, b) == table.mul(b, a)));
    let exponent_p = (1..table.order()).all(|i| table.element_order(i) == p);
    let elementary_abelian = abelian && exponent_p && table.order() == p.pow(rank);
    Ok(TranslationGroup { table, rank, additivity, elementary_abelian })
}

/// Checks `diag(A⁻¹, 1) · M(v) · diag(A, 1) = M(A⁻¹v)` over all of
/// SL_{m-1}(q) and all `v`.
pub fn asl_conjugation_sweep(ctx: &FieldCtx, m: usize) -> Result<SweepReport, MatError> {
    if m < 2 {
        return Err(MatError::OutOfRange(format!("ASL check needs m >= 2, got {m}")));
    }
    let sl = special_linear(ctx, m - 1, CLOSURE_CAP)?;
    let one = Mat::identity(ctx, 1);
    let vectors = all_vectors(ctx, m - 1);
    let mut report = SweepReport::default();
    for a in sl.elements() {
        let ai = a.inverse_mat();
        let left = ai.block_diag(&one);
        let right = a.block_diag(&one);
        for v in &vectors {
            let lhs = left.mul(&translation(ctx, v)).mul(&right);
            report.record(lhs == translation(ctx, &ai.apply(v)));
        }
    }
    Ok(report)
}

pub fn asl_conjugation_check(ctx: &FieldCtx, m: usize) -> Result<bool, MatError> {
    Ok(asl_conjugation_sweep(ctx, m)?.passed())
}

/// Orbits of SL_{m-1}(p) on the index-p subgroups (hyperplanes) of the
/// translation group over a prime field. Returns `(orbits, hyperplanes)`.
pub fn hyperplane_orbit_count(ctx: &FieldCtx, m: usize) -> Result<(usize, usize), MatError> {
    if ctx.k() != 1 || m < 3 {
        return Err(MatError::OutOfRange("hyperplane orbits need a prime field and m >= 3".into()));
    }
    let d = m - 1;
    let vectors = all_vectors(ctx, d);
    let dot = |f: &[FieldElem], v: &[FieldElem]| {
        f.iter().zip(v).fold(FieldElem::ZERO, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b)))
    };
    let hyperplanes: BTreeSet<Vec<Vec<FieldElem>>> = vectors
        .iter()
        .filter(|f| f.iter().any(|c| !c.is_zero()))
        .map(|f| {
            let mut h: Vec<Vec<FieldElem>> = vectors.iter().filter(|v| dot(f, v).is_zero()).cloned().collect();
            h.sort();
            h
        })
        .collect();
    let sl = special_linear(ctx, d, CLOSURE_CAP)?;
    let mut seen: HashSet<Vec<Vec<FieldElem>>> = HashSet::new();
    let mut orbits = 0;
    for h in &hyperplanes {
        if seen.contains(h) {
            continue;
        }
        orbits += 1;
        for a in sl.elements() {
            let ai = a.inverse_mat();
            let mut image: Vec<Vec<FieldElem>> = h.iter().map(|v| ai.apply(v)).collect();
            image.sort();
            seen.insert(image);
        }
    }
    Ok((orbits, hyperplanes.len()))
}

/// `M(A) = diag(A, ᵗA⁻¹)` for `A` in SL_m(q).
pub fn symplectic_embed<'a>(a: &Mat<'a>) -> Result<Mat<'a>, MatError> {
    if a.det() != FieldElem::ONE {
        return Err(MatError::NotUnimodular);
    }
    Ok(a.block_diag(&a.inverse_mat().transpose()))
}

/// `ᵗM · J · M = J` for `J = [[0, I], [-I, 0]]`.
pub fn preserves_symplectic_form(mat: &Mat<'_>) -> bool {
    let n = mat.dim();
    if !n.is_multiple_of(2) {
        return false;
    }
    let ctx = mat.ctx();
    let h = n / 2;
    let minus_one = ctx.neg(FieldElem::ONE);
    let j = Mat::from_fn(ctx, n, |r, c| {
        if c == r + h {
            FieldElem::ONE
        } else if r == c + h {
            minus_one
        } else {
            FieldElem::ZERO
        }
    });
    mat.transpose().mul(&j).mul(mat) == j
}

impl<'a> Mat<'a> {
    fn inverse_mat(&self) -> Mat<'a> {
        self.try_inverse().expect("unimodular matrices are invertible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn translation_groups() {
        let f2 = FieldCtx::of_order(2).unwrap();
        let t = translation_group(&f2, 3).unwrap();
        assert_eq!(t.table.order(), 4);
        assert!(t.elementary_abelian);
        assert_eq!(t.additivity.failures, 0);
        let f4 = FieldCtx::of_order(4).unwrap();
        let t = translation_group(&f4, 3).unwrap();
        assert_eq!((t.table.order(), t.rank), (16, 4));
        assert!(t.elementary_abelian);
        assert_eq!(t.additivity.checked, 256);
        assert_eq!(t.additivity.failures, 0);
        assert_eq!(translation(&f4, &[FieldElem::ZERO, FieldElem::ZERO]), Mat::identity(&f4, 3));
    }

    #[test]
    fn asl_identity_and_hyperplane_transitivity() {
        let f3 = FieldCtx::of_order(3).unwrap();
        let r = asl_conjugation_sweep(&f3, 3).unwrap();
        assert_eq!((r.checked, r.failures), (24 * 9, 0));
        let f2 = FieldCtx::of_order(2).unwrap();
        assert!(asl_conjugation_check(&f2, 4).unwrap());
        assert_eq!(hyperplane_orbit_count(&f2, 4).unwrap(), (1, 7));
        assert_eq!(hyperplane_orbit_count(&f3, 3).unwrap(), (1, 4));
    }

    #[test]
    fn symplectic_embedding() {
        let f3 = FieldCtx::of_order(3).unwrap();
        let i = Mat::identity(&f3, 2);
        assert_eq!(symplectic_embed(&i).unwrap(), Mat::identity(&f3, 4));
        let sl = special_linear(&f3, 2, CLOSURE_CAP).unwrap();
        assert_eq!(sl.order(), 24);
        for a in sl.elements() {
            assert!(preserves_symplectic_form(&symplectic_embed(a).unwrap()));
        }
        let bad = Mat::scalar(&f3, 2, FieldElem(2));
        assert!(bad.det() != FieldElem::ONE || symplectic_embed(&bad).is_ok());
        let nonunimodular = Mat::new(&f3, 2, vec![FieldElem(2), FieldElem(0), FieldElem(0), FieldElem(1)]).unwrap();
        assert_eq!(symplectic_embed(&nonunimodular).unwrap_err(), MatError::NotUnimodular);
    }

    #[test]
    fn symplectic_embedding_is_multiplicative() {
        let f5 = FieldCtx::of_order(5).unwrap();
        let sl = special_linear(&f5, 2, CLOSURE_CAP).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = sl.element(rng.gen_range(0..sl.order()));
            let b = sl.element(rng.gen_range(0..sl.order()));
            let lhs = symplectic_embed(a).unwrap().mul(&symplectic_embed(b).unwrap());
            assert_eq!(lhs, symplectic_embed(&a.mul(b)).unwrap());
        }
    }
}
