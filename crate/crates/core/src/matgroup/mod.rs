//! Brute-force finite groups: breadth-first closure, conjugacy classes, and
//! the matrix groups over GF(q) that the obstruction filters inspect.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use thiserror::Error;

use crate::gfield::FieldError;

mod affine;
mod matrix;
mod psl2;
mod structure;

pub use affine::{
    asl_conjugation_check, asl_conjugation_sweep, hyperplane_orbit_count, preserves_symplectic_form,
    symplectic_embed, translation_group, translation_vector, TranslationGroup,
};
pub use matrix::{
    alternating_group, projective_special_linear, sl_generators, special_linear, Mat, Perm, ProjMat,
};
pub use psl2::{
    borel_subgroup, check_omega_conjugation, cyclic_subgroup_classes, cyclic_subgroup_conjugacy,
    omega_conjugation_sweep, order_p_class_structure, order_p_cyclic_subgroups_within_classes,
    psl2_group, BorelData,
};
pub use structure::{
    abelianization_order, derived_subgroup, embeds_in_o3xo2, find_quaternion_subgroup,
    is_cyclic_or_dihedral, normal_subgroups, small, CayleyTable,
};

/// Default closure cap.
pub const CLOSURE_CAP: usize = 1_000_000;
/// Cap for subgroup searches.
pub const SEARCH_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("group closure exceeded cap of {0} elements")]
    CapExceeded(usize),
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A group element that knows how to multiply and invert itself.
pub trait GroupElement: Clone + Eq + Hash + Ord {
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
}

/// Index-level view of a finite group. The identity sits at index 0.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    fn inv(&self, a: usize) -> usize;
    fn generators(&self) -> &[usize];

    fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    fn element_order(&self, a: usize) -> usize {
        let (mut x, mut n) = (a, 1);
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }
}

/// A subset of a parent group's indices closed under multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupHandle {
    /// Sorted parent indices.
    pub members: Vec<usize>,
}

impl SubgroupHandle {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// A fully enumerated group whose elements are stored explicitly.
#[derive(Debug, Clone)]
pub struct GroupTable<E> {
    elements: Vec<E>,
    index: HashMap<E, u32>,
    generators: Vec<usize>,
    inverses: Vec<u32>,
}

/// Breadth-first closure of `gens` starting from `identity`.
///
/// Elements are numbered in discovery order from the sorted, deduplicated
/// generator list, so the numbering is deterministic.
pub fn group_closure<E: GroupElement>(
    identity: E,
    gens: &[E],
    cap: usize,
) -> Result<GroupTable<E>, MatError> {
    let mut gens: Vec<E> = gens.iter().filter(|g| **g != identity).cloned().collect();
    gens.sort();
    gens.dedup();
    let mut elements = vec![identity.clone()];
    let mut index = HashMap::new();
    index.insert(identity, 0u32);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let y = elements[i].compose(g);
            if !index.contains_key(&y) {
                if elements.len() >= cap {
                    return Err(MatError::CapExceeded(cap));
                }
                index.insert(y.clone(), elements.len() as u32);
                queue.push_back(elements.len());
                elements.push(y);
            }
        }
    }
    let generators = gens.iter().map(|g| index[g] as usize).collect();
    let inverses = elements.iter().map(|e| index[&e.inverse()]).collect();
    Ok(GroupTable { elements, index, generators, inverses })
}

impl<E: GroupElement> GroupTable<E> {
    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn index_of(&self, e: &E) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }
}

impl<E: GroupElement> FiniteGroup for GroupTable<E> {
    fn order(&self) -> usize {
        self.elements.len()
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        let p = self.elements[a].compose(&self.elements[b]);
        self.index[&p] as usize
    }

    fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    fn generators(&self) -> &[usize] {
        &self.generators
    }
}

/// Conjugacy classes as orbits of conjugation by the generators.
/// Classes are sorted and listed by their smallest index.
pub fn conjugacy_classes<G: FiniteGroup + ?Sized>(g: &G) -> Vec<Vec<usize>> {
    let n = g.order();
    let gens: Vec<(usize, usize)> = g.generators().iter().map(|&s| (s, g.inv(s))).collect();
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for start in 0..n {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        class_of[start] = id;
        let mut members = vec![start];
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &(s, si) in &gens {
                let y = g.mul(g.mul(s, x), si);
                if class_of[y] == usize::MAX {
                    class_of[y] = id;
                    members.push(y);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        classes.push(members);
    }
    classes
}

/// Subgroup generated by the given elements of `g`.
pub fn subgroup_closure<G: FiniteGroup + ?Sized>(g: &G, gens: &[usize]) -> SubgroupHandle {
    let mut seen = HashMap::new();
    seen.insert(0usize, ());
    let mut members = vec![0usize];
    let mut i = 0;
    while i < members.len() {
        let x = members[i];
        for &s in gens {
            let y = g.mul(x, s);
            if seen.insert(y, ()).is_none() {
                members.push(y);
            }
        }
        i += 1;
    }
    members.sort_unstable();
    SubgroupHandle { members }
}

/// Number of conjugacy classes of involutions and the count of involutions.
pub fn involution_classes<G: FiniteGroup + ?Sized>(g: &G) -> (usize, usize) {
    let classes = conjugacy_classes(g);
    let inv: Vec<&Vec<usize>> = classes
        .iter()
        .filter(|c| c[0] != 0 && g.element_order(c[0]) == 2)
        .collect();
    (inv.len(), inv.iter().map(|c| c.len()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfield::FieldCtx;

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = group_closure(Perm::identity(4), &[], 10).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(conjugacy_classes(&g), vec![vec![0]]);
    }

    #[test]
    fn cap_is_enforced() {
        let f = FieldCtx::new(5, 1).unwrap();
        assert_eq!(special_linear(&f, 2, 100).unwrap_err(), MatError::CapExceeded(100));
    }

    #[test]
    fn sl_and_psl_orders_match_formulas() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32] {
            let f = FieldCtx::of_order(q).unwrap();
            let sl = special_linear(&f, 2, CLOSURE_CAP).unwrap();
            assert_eq!(sl.order() as u64, q * (q * q - 1), "SL2({q})");
            let psl = projective_special_linear(&f, 2, CLOSURE_CAP).unwrap();
            let g = crate::gfield::gcd(2, q - 1);
            assert_eq!(psl.order() as u64, q * (q * q - 1) / g, "PSL2({q})");
        }
    }

    #[test]
    fn class_equation_holds() {
        for q in [4u64, 5, 7, 8, 9] {
            let f = FieldCtx::of_order(q).unwrap();
            let g = projective_special_linear(&f, 2, CLOSURE_CAP).unwrap();
            let classes = conjugacy_classes(&g);
            assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), g.order());
            assert!(classes.iter().all(|c| g.order().is_multiple_of(c.len())));
        }
    }

    #[test]
    fn psl2_7_has_one_class_of_21_involutions() {
        let f = FieldCtx::new(7, 1).unwrap();
        let g = projective_special_linear(&f, 2, CLOSURE_CAP).unwrap();
        assert_eq!(g.order(), 168);
        assert_eq!(involution_classes(&g), (1, 21));
    }

    #[test]
    fn odd_psl2_has_single_involution_class() {
        for q in [5u64, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31] {
            let f = FieldCtx::of_order(q).unwrap();
            let g = projective_special_linear(&f, 2, CLOSURE_CAP).unwrap();
            assert_eq!(involution_classes(&g).0, 1, "PSL2({q})");
        }
    }

    #[test]
    fn alternating_orders() {
        let mut fact = 1u64;
        for m in 1..=8u64 {
            fact *= m;
            if m < 3 {
                continue;
            }
            let g = alternating_group(m as usize, CLOSURE_CAP).unwrap();
            assert_eq!(g.order() as u64, fact / 2, "A{m}");
        }
    }
}
