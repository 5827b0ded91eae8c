//! Closed-form lower bounds on the dimension of a homology sphere admitting
//! an action, and the per-family filters built from them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::GroupId;
use crate::gfield::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimError {
    #[error("prime {0} is below 5")]
    PrimeTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("Z_{q} has no effective action on Z_{p}")]
    NoEffectiveAction { p: u64, q: u64 },
}

/// Minimal dimension for `(Z_p)^k`.
pub fn min_dim_elem_abelian(p: u64, k: u32) -> u64 {
    if p == 2 {
        k as u64
    } else {
        2 * k as u64 - 1
    }
}

/// Minimal dimension for PSL_2(p); also a lower bound for SL_2(p).
pub fn min_dim_psl2(p: u64) -> Result<u64, DimError> {
    if !is_prime(p) {
        return Err(DimError::NotPrime(p));
    }
    if p < 5 {
        return Err(DimError::PrimeTooSmall(p));
    }
    Ok(if p % 4 == 1 { (p - 1) / 2 } else { p - 2 })
}

/// Known range for SL_2(p): the PSL_2(p) bound up to the smallest linear action.
pub fn sl2_dim_interval(p: u64) -> Result<(u64, u64), DimError> {
    let lo = min_dim_psl2(p)?;
    Ok((lo, if p % 4 == 3 { p - 2 } else { p }))
}

fn check_metacyclic(p: u64, q: u64) -> Result<(), DimError> {
    if !is_prime(p) {
        return Err(DimError::NotPrime(p));
    }
    if p < 5 {
        return Err(DimError::PrimeTooSmall(p));
    }
    if q < 2 || !(p - 1).is_multiple_of(q) {
        return Err(DimError::NoEffectiveAction { p, q });
    }
    Ok(())
}

/// Minimal dimension for `Z_p ⋊ Z_q` with effective action.
pub fn min_dim_metacyclic(p: u64, q: u64) -> Result<u64, DimError> {
    check_metacyclic(p, q)?;
    Ok(if q % 2 == 1 { 2 * q - 1 } else { q })
}

/// One configuration in the fixed-point analysis of `Z_p ⋊ Z_q`: `y` has
/// order `q_ord`, `Fix(Z_p)` has dimension `d`, and `y^((m+1)/2) = sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma2Instance {
    pub p: u64,
    pub q_ord: u64,
    pub n: u64,
    pub d: i64,
    pub sign: i8,
}

impl Lemma2Instance {
    pub fn m(&self) -> i64 {
        self.n as i64 - self.d - 1
    }

    pub fn consistent(&self) -> bool {
        let (n, d, q) = (self.n as i64, self.d, self.q_ord as i64);
        if d == -1 {
            return n % 2 == 1 && self.sign == 1 && ((n + 1) / 2) % q == 0;
        }
        if d < 0 || d > n - 2 || (n - d) % 2 != 0 {
            return false;
        }
        let half = (self.m() + 1) / 2;
        match self.sign {
            1 => half % q == 0,
            -1 => q % 2 == 0 && half % q == q / 2,
            _ => false,
        }
    }
}

/// First consistent configuration, scanning n upward.
pub fn lemma2_witness(p: u64, q_ord: u64) -> Result<Lemma2Instance, DimError> {
    check_metacyclic(p, q_ord)?;
    for n in 1.. {
        for d in -1..=(n as i64 - 2) {
            for sign in [1, -1] {
                let inst = Lemma2Instance { p, q_ord, n, d, sign };
                if inst.consistent() {
                    return Ok(inst);
                }
            }
        }
    }
    unreachable!()
}

pub fn min_dim_from_lemma2(p: u64, q_ord: u64) -> Result<u64, DimError> {
    Ok(lemma2_witness(p, q_ord)?.n)
}

/// SL_2(q) on a homology 5-sphere forces `q <= 5`.
pub fn sl2_dim5_admissible(q: u128) -> bool {
    q <= 5
}

/// Filter identifiers, shared with certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FilterId {
    Thm4Rank,
    Thm3,
    Lemma1,
    Prop1,
    Prop2,
    Sec31,
    Sec32,
    Sec33,
    BorelRefutation,
    CircleAction,
    SubgroupChain,
    CatalogWitness,
}

impl fmt::Display for FilterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `lhs <= rhs`, the necessary condition an exclusion found violated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: i128,
    pub rel: String,
    pub rhs: i128,
}

impl Inequality {
    pub fn le(lhs: i128, rhs: i128) -> Self {
        Inequality { lhs, rel: "<=".into(), rhs }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub filter: FilterId,
    pub params: BTreeMap<String, i128>,
    pub inequality: Inequality,
    /// Subgroup through which the bound applies, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<GroupId>,
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: violates {}", self.filter, self.inequality)?;
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if !params.is_empty() {
            write!(f, " [{}]", params.join(", "))?;
        }
        if let Some(v) = &self.via {
            write!(f, " via {v}")?;
        }
        Ok(())
    }
}

/// Outcome of a closed-form family filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterOutcome {
    Pass,
    Fail(Exclusion),
    /// Closed forms pass; the named subgroup must be decided instead.
    ViaSubgroup(GroupId),
}

impl FilterOutcome {
    pub fn passes(&self) -> bool {
        matches!(self, FilterOutcome::Pass)
    }
}

fn exclusion(filter: FilterId, params: &[(&str, i128)], lhs: i128, rhs: i128) -> Option<Exclusion> {
    (lhs > rhs).then(|| Exclusion {
        filter,
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        inequality: Inequality::le(lhs, rhs),
        via: None,
    })
}

fn geometric(p: u64, e: u32) -> i128 {
    // (p^e - 1)/(p - 1), saturating
    let mut acc: i128 = 0;
    for _ in 0..e {
        acc = acc.saturating_mul(p as i128).saturating_add(1);
    }
    acc
}

fn pow2(e: u32) -> i128 {
    if e >= 126 {
        i128::MAX
    } else {
        1i128 << e
    }
}

/// Rank bound for `(Z_p)^rank`.
pub fn check_rank(p: u64, rank: u32, n: u32) -> Option<Exclusion> {
    exclusion(
        FilterId::Thm4Rank,
        &[("p", p as i128), ("rank", rank as i128), ("n", n as i128)],
        min_dim_elem_abelian(p, rank) as i128,
        n as i128,
    )
}

/// PSL_2(p^k) forms coming from a Borel subgroup whose cyclic p-subgroups
/// are conjugate (odd k, or p = 2) or sit inside PSL_2(p^2) (even k).
pub fn check_sec31(p: u64, k: u32, n: u32) -> Option<Exclusion> {
    let params = [("p", p as i128), ("k", k as i128), ("n", n as i128)];
    let n = n as i128;
    if p == 2 {
        exclusion(FilterId::Sec31, &params, pow2(k), n + 2)
    } else if k % 2 == 1 {
        exclusion(FilterId::Sec31, &params, geometric(p, k), (n + 1) / 2)
    } else {
        exclusion(FilterId::Sec31, &params, p as i128, n)
    }
}

fn asl_form(filter: FilterId, m: u32, p: u64, k: u32, n: u32) -> Option<Exclusion> {
    let params = [("m", m as i128), ("p", p as i128), ("k", k as i128), ("n", n as i128)];
    let n = n as i128;
    if p == 2 {
        exclusion(filter, &params, pow2(m - 1), n + 2)
    } else {
        exclusion(filter, &params, geometric(p, m - 1), (n + 1) / 2)
    }
}

/// PSL_m(p^k): SL_{m-1}(p) permutes the cyclic subgroups of a rational
/// translation group transitively.
pub fn check_sec32(m: u32, p: u64, k: u32, n: u32) -> Option<Exclusion> {
    asl_form(FilterId::Sec32, m, p, k, n)
}

/// PSp_{2m}(p^k) through ASL_{m-1}(p) < SL_m(p^k).
pub fn check_sec33(m: u32, p: u64, k: u32, n: u32) -> Option<Exclusion> {
    asl_form(FilterId::Sec33, m, p, k, n)
}

/// PSL_2(p) minimal-dimension bound through a PSL_2(p) or SL_2(p) subgroup.
pub fn check_thm3(p: u64, n: u32) -> Option<Exclusion> {
    let bound = min_dim_psl2(p).ok()?;
    exclusion(FilterId::Thm3, &[("p", p as i128), ("n", n as i128)], bound as i128, n as i128)
}

pub fn check_prop2(p: u64, q: u64, n: u32) -> Option<Exclusion> {
    let bound = min_dim_metacyclic(p, q).ok()?;
    exclusion(FilterId::Prop2, &[("p", p as i128), ("q", q as i128), ("n", n as i128)], bound as i128, n as i128)
}

/// SL_2(q) on a 5-dimensional sphere; silent in other dimensions.
pub fn check_prop1(q: u128, n: u32) -> Option<Exclusion> {
    if n != 5 || sl2_dim5_admissible(q) {
        return None;
    }
    exclusion(FilterId::Prop1, &[("q", q as i128), ("n", 5)], q as i128, 5)
}

/// All index-p subgroups of `(Z_p)^k` conjugate.
pub fn check_lemma1(p: u64, k: u32, n: u32) -> Option<Exclusion> {
    let params = [("p", p as i128), ("k", k as i128), ("n", n as i128)];
    let n = n as i128;
    if p == 2 {
        exclusion(FilterId::Lemma1, &params, pow2(k), n + 2)
    } else {
        exclusion(FilterId::Lemma1, &params, geometric(p, k), (n + 1) / 2)
    }
}

/// Subgroups this module knows without a witness file.
pub fn builtin_subgroups(g: &GroupId) -> Vec<GroupId> {
    match g {
        GroupId::Psp { two_m: 4, q } if q.value() == 5 => vec![GroupId::psl(2, 25)],
        GroupId::Psp { two_m: 4, q } if q.value() == 4 => vec![GroupId::psl(2, 16)],
        GroupId::Psp { two_m: 6, q } if q.value() == 2 => vec![GroupId::psl(4, 2)],
        GroupId::Alt(m) if *m >= 9 => vec![GroupId::psl(4, 2)],
        _ => Vec::new(),
    }
}

fn first(checks: impl IntoIterator<Item = Option<Exclusion>>) -> Option<Exclusion> {
    checks.into_iter().flatten().next()
}

fn resolve(closed: Option<Exclusion>, subgroups: Vec<GroupId>, n: u32) -> FilterOutcome {
    if let Some(e) = closed {
        return FilterOutcome::Fail(e);
    }
    let mut pending = None;
    for h in subgroups {
        match closed_form_outcome(&h, n) {
            FilterOutcome::Fail(mut e) => {
                e.params.insert("subgroup_filter".into(), e.filter as i128);
                e.filter = FilterId::SubgroupChain;
                e.via = Some(h);
                return FilterOutcome::Fail(e);
            }
            _ => pending = pending.or(Some(h)),
        }
    }
    pending.map_or(FilterOutcome::Pass, FilterOutcome::ViaSubgroup)
}

pub fn psl2_family_filter(p: u64, k: u32, n: u32) -> FilterOutcome {
    let closed = first([check_rank(p, k, n), check_sec31(p, k, n), check_thm3(p, n)]);
    resolve(closed, Vec::new(), n)
}

pub fn pslm_family_filter(m: u32, p: u64, k: u32, n: u32) -> FilterOutcome {
    let q = (p as u128).pow(k);
    let closed = first([
        check_rank(p, (m - 1) * k, n),
        check_sec32(m, p, k, n),
        check_sec31(p, k, n).map(|e| with_via(e, GroupId::psl(2, q))),
        check_thm3(p, n),
        check_prop1(q, n),
    ]);
    resolve(closed, Vec::new(), n)
}

/// `m` is half the matrix size: PSp_{2m}(p^k).
pub fn psp_family_filter(m: u32, p: u64, k: u32, n: u32) -> FilterOutcome {
    let q = (p as u128).pow(k);
    let closed = first([
        check_rank(p, (m - 1) * k, n),
        check_sec33(m, p, k, n),
        check_sec31(p, k, n).map(|e| with_via(e, GroupId::psl(2, q))),
        check_thm3(p, n),
        check_prop1(q, n),
    ]);
    resolve(closed, builtin_subgroups(&GroupId::psp(2 * m, q)), n)
}

/// Largest-bound metacyclic subgroup `Z_p ⋊ Z_{(p-1)/2}` of A_m.
pub fn alternating_metacyclic(m: u32, n: u32) -> Option<Exclusion> {
    (5..=m as u64).filter(|&p| is_prime(p)).find_map(|p| check_prop2(p, (p - 1) / 2, n))
}

pub fn alternating_rank(m: u32) -> u32 {
    m / 2 - 1
}

pub fn alternating_filter(m: u32, n: u32) -> FilterOutcome {
    let closed = first([check_rank(2, alternating_rank(m), n), alternating_metacyclic(m, n)]);
    let subs = if m >= 8 { vec![GroupId::psl(4, 2)] } else { Vec::new() };
    resolve(closed, subs, n)
}

fn with_via(mut e: Exclusion, h: GroupId) -> Exclusion {
    e.via = Some(h);
    e
}

/// Closed-form outcome for any group whose family has closed forms.
pub fn closed_form_outcome(g: &GroupId, n: u32) -> FilterOutcome {
    match *g {
        GroupId::Alt(8) => resolve(None, vec![GroupId::psl(4, 2)], n),
        GroupId::Alt(m) => alternating_filter(m, n),
        GroupId::Psl { m: 2, q } => psl2_family_filter(q.p, q.k, n),
        GroupId::Psl { m, q } => pslm_family_filter(m, q.p, q.k, n),
        GroupId::Psp { two_m, q } => psp_family_filter(two_m / 2, q.p, q.k, n),
        _ => FilterOutcome::Pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::Perm;

    #[test]
    fn quoted_values() {
        assert_eq!(min_dim_elem_abelian(2, 4), 4);
        assert_eq!(min_dim_elem_abelian(3, 2), 3);
        assert_eq!(min_dim_elem_abelian(5, 1), 1);
        assert_eq!(min_dim_psl2(5), Ok(2));
        assert_eq!(min_dim_psl2(7), Ok(5));
        assert_eq!(min_dim_psl2(13), Ok(6));
        assert_eq!(min_dim_psl2(3), Err(DimError::PrimeTooSmall(3)));
        assert_eq!(min_dim_metacyclic(7, 3), Ok(5));
        assert_eq!(min_dim_metacyclic(5, 2), Ok(2));
        assert_eq!(min_dim_metacyclic(11, 5), Ok(9));
        assert_eq!(min_dim_metacyclic(7, 4), Err(DimError::NoEffectiveAction { p: 7, q: 4 }));
        assert!(sl2_dim5_admissible(5) && sl2_dim5_admissible(4) && !sl2_dim5_admissible(7));
        assert_eq!(sl2_dim_interval(7), Ok((5, 5)));
        assert_eq!(sl2_dim_interval(13), Ok((6, 13)));
    }

    #[test]
    fn lemma2_search() {
        assert_eq!(min_dim_from_lemma2(5, 2), Ok(2));
        assert_eq!(min_dim_from_lemma2(7, 3), Ok(5));
        assert_eq!(min_dim_from_lemma2(13, 6), Ok(6));
        let w = lemma2_witness(7, 3).unwrap();
        assert_eq!((w.d, w.sign), (-1, 1));
        assert_eq!(lemma2_witness(13, 6).unwrap().sign, -1);
        assert_eq!(min_dim_from_lemma2(7, 4), Err(DimError::NoEffectiveAction { p: 7, q: 4 }));
    }

    #[test]
    fn psl2_filter_examples() {
        assert!(psl2_family_filter(5, 2, 5).passes());
        assert!(psl2_family_filter(2, 2, 5).passes());
        let FilterOutcome::Fail(e) = psl2_family_filter(3, 3, 5) else { panic!() };
        assert_eq!((e.filter, e.inequality.lhs, e.inequality.rhs), (FilterId::Sec31, 13, 3));
    }

    #[test]
    fn pslm_and_psp_examples() {
        assert!(pslm_family_filter(3, 2, 2, 5).passes());
        let FilterOutcome::Fail(e) = pslm_family_filter(4, 2, 1, 5) else { panic!() };
        assert_eq!((e.filter, e.inequality.lhs, e.inequality.rhs), (FilterId::Sec32, 8, 7));
        let FilterOutcome::Fail(e) = pslm_family_filter(3, 3, 1, 5) else { panic!() };
        assert_eq!((e.inequality.lhs, e.inequality.rhs), (4, 3));
        assert!(psp_family_filter(2, 3, 1, 5).passes());
        assert_eq!(psp_family_filter(2, 5, 1, 5), FilterOutcome::ViaSubgroup(GroupId::psl(2, 25)));
        let FilterOutcome::Fail(e) = psp_family_filter(3, 2, 1, 5) else { panic!() };
        assert_eq!((e.filter, e.via), (FilterId::SubgroupChain, Some(GroupId::psl(4, 2))));
    }

    #[test]
    fn alternating_examples() {
        assert!(alternating_filter(7, 5).passes());
        let FilterOutcome::Fail(e) = alternating_filter(7, 4) else { panic!() };
        assert_eq!((e.filter, e.inequality.lhs), (FilterId::Prop2, 5));
        let FilterOutcome::Fail(e) = alternating_filter(8, 5) else { panic!() };
        assert_eq!(e.via, Some(GroupId::psl(4, 2)));
    }

    #[test]
    fn metacyclic_witnesses_are_even() {
        for p in (5..=23u32).filter(|&p| is_prime(p as u64)) {
            let g = (2..p).find(|&g| (1..p - 1).all(|e| (g as u64).pow(e) % p as u64 != 1)).unwrap();
            let mult = g * g % p;
            let translate = Perm((0..p).map(|x| ((x + 1) % p) as u8).collect());
            let scale = Perm((0..p).map(|x| (x * mult % p) as u8).collect());
            assert!(translate.is_even() && scale.is_even(), "p={p}");
        }
    }
}
