use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{conjugacy_classes, subgroup_closure, FiniteGroup, MatError, SubgroupHandle, SEARCH_CAP};

/// Largest group for which a full multiplication table is built.
const TABLE_CAP: usize = 4096;

/// A group given by its full multiplication table. Index 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    n: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    gens: Vec<usize>,
}

impl CayleyTable {
    pub fn from_group<G: FiniteGroup + ?Sized>(g: &G) -> Result<Self, MatError> {
        let n = g.order();
        if n > TABLE_CAP {
            return Err(MatError::CapExceeded(TABLE_CAP));
        }
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(g.mul(a, b) as u32);
            }
        }
        let inv = (0..n).map(|a| g.inv(a) as u32).collect();
        Ok(CayleyTable { n, table, inv, gens: g.generators().to_vec() })
    }

    fn from_fn(n: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(mul(a, b) as u32);
            }
        }
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| table[a * n + b] == 0).expect("table is a group") as u32)
            .collect();
        let mut t = CayleyTable { n, table, inv, gens: Vec::new() };
        t.gens = generating_set(&t, &(0..n).collect::<Vec<_>>());
        t
    }

    /// The subgroup on `members` (which must contain 0), reindexed in the given order.
    pub fn subgroup(&self, members: &[usize]) -> CayleyTable {
        CayleyTable::from_subgroup(self, members)
    }

    /// Table of a subgroup of any finite group; `members` must start with 0.
    pub fn from_subgroup<G: FiniteGroup + ?Sized>(g: &G, members: &[usize]) -> CayleyTable {
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        debug_assert_eq!(members.first(), Some(&0));
        CayleyTable::from_fn(members.len(), |a, b| pos[&g.mul(members[a], members[b])])
    }

    /// The quotient by a normal subgroup, cosets numbered by least representative.
    pub fn quotient(&self, normal: &[usize]) -> CayleyTable {
        self.quotient_with_map(normal).0
    }

    /// The quotient together with the coset index of every element.
    pub fn quotient_with_map(&self, normal: &[usize]) -> (CayleyTable, Vec<usize>) {
        let mut coset_of = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for x in 0..self.n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            for &k in normal {
                coset_of[self.mul(x, k)] = reps.len();
            }
            reps.push(x);
        }
        let q = CayleyTable::from_fn(reps.len(), |a, b| coset_of[self.mul(reps[a], reps[b])]);
        (q, coset_of)
    }
}

impl FiniteGroup for CayleyTable {
    fn order(&self) -> usize {
        self.n
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    fn generators(&self) -> &[usize] {
        &self.gens
    }
}

/// Greedy generating set for the subgroup on `members`.
fn generating_set<G: FiniteGroup + ?Sized>(g: &G, members: &[usize]) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = SubgroupHandle { members: vec![0] };
    for &x in members {
        if !span.contains(x) {
            gens.push(x);
            span = subgroup_closure(g, &gens);
        }
    }
    gens
}

fn product(g: &impl FiniteGroup, a: &[usize], b: &[usize]) -> SubgroupHandle {
    let set: BTreeSet<usize> = a.iter().flat_map(|&x| b.iter().map(move |&y| g.mul(x, y))).collect();
    SubgroupHandle { members: set.into_iter().collect() }
}

/// All normal subgroups, sorted by order and then by members.
pub fn normal_subgroups(g: &impl FiniteGroup) -> Vec<SubgroupHandle> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::from([vec![0]]);
    for class in conjugacy_classes(g) {
        found.insert(subgroup_closure(g, &class).members);
    }
    loop {
        let list: Vec<Vec<usize>> = found.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                if found.insert(product(g, a, b).members) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Vec<SubgroupHandle> = found.into_iter().map(|members| SubgroupHandle { members }).collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
    out
}

pub fn derived_subgroup(g: &impl FiniteGroup) -> SubgroupHandle {
    let n = g.order();
    let comms: BTreeSet<usize> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))))
        .collect();
    let comms: Vec<usize> = comms.into_iter().collect();
    let gens = generating_set(g, &comms);
    subgroup_closure(g, &gens)
}

pub fn abelianization_order(g: &impl FiniteGroup) -> usize {
    g.order() / derived_subgroup(g).order()
}

pub fn is_cyclic_or_dihedral(g: &impl FiniteGroup) -> bool {
    let n = g.order();
    let orders: Vec<usize> = (0..n).map(|x| g.element_order(x)).collect();
    if orders.contains(&n) {
        return true;
    }
    if !n.is_multiple_of(2) {
        return false;
    }
    (0..n).filter(|&x| orders[x] == n / 2).any(|x| {
        let cyc = subgroup_closure(g, &[x]);
        (0..n).any(|t| orders[t] == 2 && !cyc.contains(t) && g.conj(t, x) == g.inv(x))
    })
}

fn order_histogram(g: &impl FiniteGroup) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for x in 0..g.order() {
        *h.entry(g.element_order(x)).or_insert(0) += 1;
    }
    h
}

/// Cyclic, dihedral, A4, S4 or A5: the isomorphism types of finite rotation groups.
fn is_rotation_type(g: &impl FiniteGroup) -> bool {
    if is_cyclic_or_dihedral(g) {
        return true;
    }
    let want: &[(usize, usize)] = match g.order() {
        12 => &[(1, 1), (2, 3), (3, 8)],
        24 => &[(1, 1), (2, 9), (3, 8), (4, 6)],
        60 => &[(1, 1), (2, 15), (3, 20), (5, 24)],
        _ => return false,
    };
    let ab = match g.order() {
        12 => 3,
        24 => 2,
        _ => 1,
    };
    order_histogram(g).into_iter().collect::<Vec<_>>() == want && abelianization_order(g) == ab
}

/// Rotation types and their products with Z_2.
fn is_orthogonal3_type(g: &CayleyTable) -> bool {
    if is_rotation_type(g) {
        return true;
    }
    let n = g.order();
    if !n.is_multiple_of(2) {
        return false;
    }
    let central: Vec<usize> = (1..n)
        .filter(|&z| g.element_order(z) == 2 && (0..n).all(|x| g.mul(x, z) == g.mul(z, x)))
        .collect();
    if central.is_empty() {
        return false;
    }
    normal_subgroups(g)
        .into_iter()
        .filter(|k| 2 * k.order() == n)
        .any(|k| central.iter().any(|&z| !k.contains(z)) && is_rotation_type(&g.subgroup(&k.members)))
}

/// Whether `g` is isomorphic to a subgroup of O(3) × O(2).
pub fn embeds_in_o3xo2(g: &impl FiniteGroup) -> Result<bool, MatError> {
    if g.order() > 1000 {
        return Err(MatError::CapExceeded(1000));
    }
    let t = CayleyTable::from_group(g)?;
    let normals = normal_subgroups(&t);
    for k2 in &normals {
        if !is_cyclic_or_dihedral(&t.quotient(&k2.members)) {
            continue;
        }
        for k3 in &normals {
            let meet = k3.members.iter().filter(|&&x| k2.contains(x)).count();
            if meet == 1 && is_orthogonal3_type(&t.quotient(&k3.members)) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// A quaternion subgroup of order 8, if one exists.
pub fn find_quaternion_subgroup(g: &impl FiniteGroup) -> Result<Option<SubgroupHandle>, MatError> {
    let n = g.order();
    if n > SEARCH_CAP {
        return Err(MatError::CapExceeded(SEARCH_CAP));
    }
    if !n.is_multiple_of(8) {
        return Ok(None);
    }
    let fours: Vec<usize> = (0..n).filter(|&x| g.element_order(x) == 4).collect();
    for &x in &fours {
        let x2 = g.mul(x, x);
        for &y in &fours {
            if g.mul(y, y) == x2 && g.conj(y, x) == g.inv(x) {
                let h = subgroup_closure(g, &[x, y]);
                if h.order() == 8 {
                    return Ok(Some(h));
                }
            }
        }
    }
    Ok(None)
}

/// Small reference groups.
pub mod small {
    use super::CayleyTable;
    use crate::gfield::{FieldCtx, FieldElem};
    use crate::matgroup::{group_closure, Mat};

    pub fn cyclic(n: usize) -> CayleyTable {
        CayleyTable::from_fn(n, |a, b| (a + b) % n)
    }

    /// Dihedral group of order `2n`; `r^i s^e` is stored at `2i + e`.
    pub fn dihedral(n: usize) -> CayleyTable {
        CayleyTable::from_fn(2 * n, |a, b| {
            let (i, e) = (a / 2, a % 2);
            let (j, f) = (b / 2, b % 2);
            let j = if e == 1 { (n - j) % n } else { j };
            2 * ((i + j) % n) + (e ^ f)
        })
    }

    pub fn klein_four() -> CayleyTable {
        CayleyTable::from_fn(4, |a, b| a ^ b)
    }

    /// Q8 inside SL_2(3).
    pub fn quaternion() -> CayleyTable {
        let f = FieldCtx::new(3, 1).unwrap();
        let e = |v: [u32; 4]| Mat::new(&f, 2, v.iter().map(|&c| FieldElem(c)).collect()).unwrap();
        let g = group_closure(Mat::identity(&f, 2), &[e([0, 2, 1, 0]), e([1, 1, 1, 2])], 64).unwrap();
        CayleyTable::from_group(&g).unwrap()
    }

    /// Affine maps `x -> ax + b` of Z_5; `(a, b)` is stored at `5(a-1) + b`.
    pub fn frobenius_20() -> CayleyTable {
        CayleyTable::from_fn(20, |x, y| {
            let (a1, b1) = (x / 5 + 1, x % 5);
            let (a2, b2) = (y / 5 + 1, y % 5);
            5 * ((a1 * a2) % 5 - 1) + (a1 * b2 + b1) % 5
        })
    }
}

#[cfg(test)]
mod tests {
    use super::small::*;
    use super::*;
    use crate::gfield::FieldCtx;
    use crate::matgroup::{alternating_group, projective_special_linear, CLOSURE_CAP};

    fn direct_product(a: &CayleyTable, b: &CayleyTable) -> CayleyTable {
        let m = b.order();
        CayleyTable::from_fn(a.order() * m, |x, y| a.mul(x / m, y / m) * m + b.mul(x % m, y % m))
    }

    #[test]
    fn small_groups_are_groups() {
        for g in [cyclic(6), dihedral(5), klein_four(), quaternion(), frobenius_20()] {
            let n = g.order();
            for a in 0..n {
                assert_eq!(g.mul(a, 0), a);
                assert_eq!(g.mul(a, g.inv(a)), 0);
                for b in 0..n {
                    for c in 0..n {
                        assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                    }
                }
            }
            assert_eq!(subgroup_closure(&g, g.generators()).order(), n);
        }
        assert_eq!(quaternion().order(), 8);
    }

    #[test]
    fn cyclic_or_dihedral_recognition() {
        assert!(is_cyclic_or_dihedral(&cyclic(7)));
        assert!(is_cyclic_or_dihedral(&dihedral(6)));
        assert!(is_cyclic_or_dihedral(&klein_four()));
        assert!(is_cyclic_or_dihedral(&cyclic(1)));
        assert!(!is_cyclic_or_dihedral(&quaternion()));
        assert!(!is_cyclic_or_dihedral(&frobenius_20()));
        assert!(!is_cyclic_or_dihedral(&direct_product(&cyclic(2), &klein_four())));
    }

    #[test]
    fn normal_subgroup_counts() {
        let a5 = CayleyTable::from_group(&alternating_group(5, CLOSURE_CAP).unwrap()).unwrap();
        assert_eq!(normal_subgroups(&a5).len(), 2);
        let a4 = CayleyTable::from_group(&alternating_group(4, CLOSURE_CAP).unwrap()).unwrap();
        assert_eq!(normal_subgroups(&a4).iter().map(|h| h.order()).collect::<Vec<_>>(), vec![1, 4, 12]);
        assert_eq!(normal_subgroups(&quaternion()).len(), 6);
        assert_eq!(normal_subgroups(&dihedral(4)).len(), 6);
        assert_eq!(abelianization_order(&a4), 3);
        assert_eq!(abelianization_order(&a5), 1);
        assert_eq!(abelianization_order(&frobenius_20()), 4);
        assert_eq!(derived_subgroup(&dihedral(5)).order(), 5);
    }

    #[test]
    fn quotients() {
        let d = dihedral(6);
        let rot: Vec<usize> = (0..6).map(|i| 2 * i).collect();
        let q = d.quotient(&rot);
        assert_eq!(q.order(), 2);
        let center = vec![0, 6];
        assert!(is_cyclic_or_dihedral(&d.quotient(&center)));
        assert_eq!(d.quotient(&center).order(), 6);
    }

    #[test]
    fn o3xo2_embedding() {
        let a5 = CayleyTable::from_group(&alternating_group(5, CLOSURE_CAP).unwrap()).unwrap();
        assert!(embeds_in_o3xo2(&a5).unwrap());
        assert!(embeds_in_o3xo2(&direct_product(&a5, &cyclic(2))).unwrap());
        assert!(embeds_in_o3xo2(&direct_product(&a5, &cyclic(7))).unwrap());
        assert!(embeds_in_o3xo2(&direct_product(&dihedral(3), &dihedral(5))).unwrap());
        // Q8 has a unique involution, so every nontrivial normal subgroup meets
        // every other one and Q8 is neither cyclic, dihedral nor a rotation group.
        assert!(!embeds_in_o3xo2(&quaternion()).unwrap());
        assert!(!embeds_in_o3xo2(&frobenius_20()).unwrap());
        let f7 = FieldCtx::new(7, 1).unwrap();
        let psl27 = projective_special_linear(&f7, 2, CLOSURE_CAP).unwrap();
        assert!(!embeds_in_o3xo2(&psl27).unwrap());
    }

    #[test]
    fn quaternion_search() {
        assert!(find_quaternion_subgroup(&quaternion()).unwrap().is_some());
        assert!(find_quaternion_subgroup(&dihedral(4)).unwrap().is_none());
        let a5 = alternating_group(5, CLOSURE_CAP).unwrap();
        assert!(find_quaternion_subgroup(&a5).unwrap().is_none());
        let f3 = FieldCtx::new(3, 1).unwrap();
        let sl = crate::matgroup::special_linear(&f3, 2, CLOSURE_CAP).unwrap();
        assert_eq!(find_quaternion_subgroup(&sl).unwrap().unwrap().order(), 8);
    }
}
