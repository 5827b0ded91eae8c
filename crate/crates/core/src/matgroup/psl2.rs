use std::collections::{BTreeMap, HashSet};

use super::{
    projective_special_linear, FiniteGroup, GroupTable, Mat, MatError, ProjMat,
    SubgroupHandle, CLOSURE_CAP,
};
use crate::gfield::{FieldCtx, FieldElem};
use crate::SweepReport;

/// PSL_2(q) together with its upper-triangular subgroup.
#[derive(Debug, Clone)]
pub struct BorelData<'a> {
    pub ctx: &'a FieldCtx,
    pub group: GroupTable<ProjMat<'a>>,
    /// Upper-triangular subgroup `(Z_p)^k ⋊ Z_r`.
    pub borel: SubgroupHandle,
    /// Its unipotent part `(Z_p)^k`.
    pub unipotent: SubgroupHandle,
    /// `translation[σ]` is the index of the class of `[[1, σ], [0, 1]]`.
    pub translation: Vec<usize>,
    pub r: u64,
}

pub fn psl2_group(ctx: &FieldCtx) -> Result<GroupTable<ProjMat<'_>>, MatError> {
    projective_special_linear(ctx, 2, CLOSURE_CAP)
}

fn upper<'a>(ctx: &'a FieldCtx, s: FieldElem) -> Mat<'a> {
    Mat::new(ctx, 2, vec![FieldElem::ONE, s, FieldElem::ZERO, FieldElem::ONE]).unwrap()
}

fn diag<'a>(ctx: &'a FieldCtx, a: FieldElem, d: FieldElem) -> Mat<'a> {
    Mat::new(ctx, 2, vec![a, FieldElem::ZERO, FieldElem::ZERO, d]).unwrap()
}

/// Enumerates PSL_2(q) and extracts the upper-triangular subgroup, checking
/// its order against `q * r` with `r = (q-1)/2` (odd q) or `q - 1` (even q).
pub fn borel_subgroup(ctx: &FieldCtx) -> Result<BorelData<'_>, MatError> {
    if ctx.q() < 4 {
        return Err(MatError::OutOfRange(format!("PSL2({}) is not simple", ctx.q())));
    }
    let group = psl2_group(ctx)?;
    let members: Vec<usize> = (0..group.order())
        .filter(|&i| group.element(i).rep().get(1, 0).is_zero())
        .collect();
    let translation: Vec<usize> = ctx
        .elements()
        .map(|s| group.index_of(&ProjMat::new(upper(ctx, s))).expect("translations lie in PSL2"))
        .collect();
    let mut unipotent = translation.clone();
    unipotent.sort_unstable();
    let q = ctx.q();
    let r = if ctx.p() == 2 { q - 1 } else { (q - 1) / 2 };
    if members.len() as u64 != q * r {
        return Err(MatError::OutOfRange(format!(
            "Borel subgroup of order {} instead of {}",
            members.len(),
            q * r
        )));
    }
    Ok(BorelData {
        ctx,
        group,
        borel: SubgroupHandle { members },
        unipotent: SubgroupHandle { members: unipotent },
        translation,
        r,
    })
}

impl BorelData<'_> {
    /// Classes of nonidentity unipotent elements under conjugation by the Borel subgroup.
    fn unipotent_classes(&self) -> Vec<Vec<usize>> {
        let g = &self.group;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &u in &self.unipotent.members {
            if u == 0 || seen.contains(&u) {
                continue;
            }
            let mut class: Vec<usize> = self.borel.members.iter().map(|&b| g.conj(b, u)).collect();
            class.sort_unstable();
            class.dedup();
            seen.extend(class.iter().copied());
            out.push(class);
        }
        out
    }

    /// The cyclic subgroup generated by the translation `σ`, as sorted indices.
    pub fn line_subgroup(&self, s: FieldElem) -> Vec<usize> {
        let f = self.ctx;
        let mut v: Vec<usize> = (0..f.p())
            .map(|y| self.translation[f.mul(f.from_int(y as i64), s).0 as usize])
            .collect();
        v.sort_unstable();
        v
    }

    /// Canonical generator of the line through `σ`: the least packed value among `yσ`.
    pub fn line_key(&self, s: FieldElem) -> FieldElem {
        let f = self.ctx;
        (1..f.p()).map(|y| f.mul(f.from_int(y as i64), s)).min().unwrap()
    }

    /// Canonical generators of all `(q-1)/(p-1)` cyclic subgroups of order p.
    pub fn lines(&self) -> Vec<FieldElem> {
        let mut keys: Vec<FieldElem> = self.ctx.nonzero().map(|s| self.line_key(s)).collect();
        keys.sort();
        keys.dedup();
        keys
    }
}

/// `(class size, number of classes)` for the order-p elements of the Borel subgroup.
pub fn order_p_class_structure(data: &BorelData<'_>) -> Vec<(usize, usize)> {
    let mut hist = BTreeMap::new();
    for c in data.unipotent_classes() {
        *hist.entry(c.len()).or_insert(0) += 1;
    }
    hist.into_iter().collect()
}

/// True iff every cyclic subgroup of order p has all of its nontrivial
/// elements inside a single Borel conjugacy class.
pub fn order_p_cyclic_subgroups_within_classes(data: &BorelData<'_>) -> bool {
    let classes = data.unipotent_classes();
    let class_of = |i: usize| classes.iter().position(|c| c.binary_search(&i).is_ok());
    data.lines().into_iter().all(|s| {
        let f = data.ctx;
        let first = class_of(data.translation[s.0 as usize]);
        (2..f.p()).all(|y| class_of(data.translation[f.mul(f.from_int(y as i64), s).0 as usize]) == first)
    })
}

/// Partition of the order-p cyclic subgroups of the unipotent part into
/// PSL_2(q)-conjugacy classes, each class listed by canonical line generators.
pub fn cyclic_subgroup_classes(data: &BorelData<'_>) -> Vec<Vec<FieldElem>> {
    let g = &data.group;
    let gens: Vec<(usize, usize)> = g.generators().iter().map(|&s| (s, g.inv(s))).collect();
    let lines = data.lines();
    let by_set: BTreeMap<Vec<usize>, FieldElem> =
        lines.iter().map(|&s| (data.line_subgroup(s), s)).collect();
    let mut assigned = HashSet::new();
    let mut classes = Vec::new();
    for &s in &lines {
        if assigned.contains(&s) {
            continue;
        }
        let start = data.line_subgroup(s);
        let mut orbit = HashSet::from([start.clone()]);
        let mut frontier = vec![start];
        while let Some(h) = frontier.pop() {
            for &(x, xi) in &gens {
                let mut c: Vec<usize> = h.iter().map(|&e| g.mul(g.mul(x, e), xi)).collect();
                c.sort_unstable();
                if orbit.insert(c.clone()) {
                    frontier.push(c);
                }
            }
        }
        let mut class: Vec<FieldElem> =
            orbit.iter().filter_map(|h| by_set.get(h).copied()).collect();
        class.sort();
        assigned.extend(class.iter().copied());
        classes.push(class);
    }
    classes
}

pub fn cyclic_subgroup_conjugacy(data: &BorelData<'_>) -> usize {
    cyclic_subgroup_classes(data).len()
}

/// Checks `diag(ω, ω⁻¹) · [[1, σ], [0, 1]] · diag(ω⁻¹, ω) = [[1, ω²σ], [0, 1]]`
/// for every `ω ≠ 0` and every `σ`. With the diagonal factors the other way
/// round the corner entry is `ω⁻²σ`; over all ω the two forms describe the
/// same normalizing action.
pub fn omega_conjugation_sweep(ctx: &FieldCtx) -> SweepReport {
    let mut report = SweepReport::default();
    for w in ctx.nonzero() {
        let wi = ctx.inv(w).unwrap();
        let left = diag(ctx, w, wi);
        let right = diag(ctx, wi, w);
        for s in ctx.elements() {
            let lhs = left.mul(&upper(ctx, s)).mul(&right);
            let rhs = upper(ctx, ctx.mul(ctx.mul(w, w), s));
            report.record(lhs == rhs);
        }
    }
    report
}

pub fn check_omega_conjugation(ctx: &FieldCtx) -> bool {
    omega_conjugation_sweep(ctx).passed()
}
