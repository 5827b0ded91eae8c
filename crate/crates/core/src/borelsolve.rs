//! Fixed-point dimension assignments on the subgroup lattice of `(Z_p)^k`.
//!
//! A fixed-point assignment gives every subgroup `B` a dimension
//! `r(B) ∈ {-1, 0, ..., n}` with `-1` for an empty fixed set. The solver
//! enumerates assignments satisfying, at every subgroup of rank at least 2,
//!
//! ```text
//! n - r(B) = Σ_{K < B of index p} (r(K) - r(B))
//! ```
//!
//! together with monotonicity, faithfulness, parity and class constancy.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfield::is_prime;

pub const MAX_RANK: usize = 4;
pub const MAX_DIM: i32 = 32;
/// Solutions beyond this count make [`borel_solve_capped`] give up.
pub const SOLUTION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BorelError {
    #[error("rank {0} is above the supported maximum of 4")]
    RankTooLarge(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension {0} outside 0..=32")]
    DimensionOutOfRange(i32),
    #[error("characters have a common nontrivial kernel")]
    NotFaithful,
    #[error("invalid class partition: {0}")]
    InvalidPartition(String),
    #[error("more than {0} solutions")]
    TooManySolutions(usize),
}

/// A subgroup of `(Z_p)^k`, stored as a reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub rank: usize,
    pub basis: Vec<Vec<u32>>,
    members: Vec<u64>,
    /// Packed characters vanishing on the subgroup.
    annihilator: Vec<u64>,
}

impl Subspace {
    pub fn contains(&self, v: u32) -> bool {
        self.members[v as usize / 64] >> (v % 64) & 1 == 1
    }

    fn annihilated_by(&self, c: u32) -> bool {
        self.annihilator[c as usize / 64] >> (c % 64) & 1 == 1
    }

    fn is_subset_of(&self, other: &Subspace) -> bool {
        self.members.iter().zip(&other.members).all(|(a, b)| a & !b == 0)
    }
}

/// Every subgroup of `(Z_p)^k`, ordered by rank and then by echelon basis.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub p: u32,
    pub k: usize,
    pub subgroups: Vec<Subspace>,
    /// `covers[b]` lists the index-p subgroups of `b`.
    pub covers: Vec<Vec<usize>>,
    line_of: HashMap<u32, usize>,
}

/// Vectors are packed base p with coordinate i at p^i, matching field elements.
pub fn encode(p: u32, v: &[u32]) -> u32 {
    v.iter().rev().fold(0, |acc, &c| acc * p + c)
}

pub fn decode(p: u32, k: usize, mut x: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let c = x % p;
            x /= p;
            c
        })
        .collect()
}

fn echelon_bases(p: u32, k: usize, r: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    fn choose(k: usize, r: usize, start: usize, cur: &mut Vec<usize>, all: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            all.push(cur.clone());
            return;
        }
        for c in start..k {
            cur.push(c);
            choose(k, r, c + 1, cur, all);
            cur.pop();
        }
    }
    choose(k, r, 0, &mut Vec::new(), &mut pivots);
    for piv in pivots {
        // Free slots: row i, column c > piv[i] with c not a pivot.
        let free: Vec<(usize, usize)> = (0..r)
            .flat_map(|i| (piv[i] + 1..k).filter(|c| !piv.contains(c)).map(move |c| (i, c)))
            .collect();
        let total = (p as u64).pow(free.len() as u32);
        for mut idx in 0..total {
            let mut rows = vec![vec![0u32; k]; r];
            for (i, &c) in piv.iter().enumerate() {
                rows[i][c] = 1;
            }
            for &(i, c) in &free {
                rows[i][c] = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            out.push(rows);
        }
    }
    out.sort();
    out
}

fn span(p: u32, k: usize, basis: &[Vec<u32>]) -> Vec<u64> {
    let size = (p as usize).pow(k as u32);
    let mut bits = vec![0u64; size.div_ceil(64)];
    let combos = (p as u64).pow(basis.len() as u32);
    for mut idx in 0..combos {
        let mut v = vec![0u32; k];
        for row in basis {
            let c = (idx % p as u64) as u32;
            idx /= p as u64;
            for (x, &b) in v.iter_mut().zip(row) {
                *x = (*x + c * b) % p;
            }
        }
        let e = encode(p, &v);
        bits[e as usize / 64] |= 1 << (e % 64);
    }
    bits
}

fn annihilator(p: u32, k: usize, basis: &[Vec<u32>]) -> Vec<u64> {
    let size = p.pow(k as u32);
    let mut bits = vec![0u64; (size as usize).div_ceil(64)];
    for c in 0..size {
        let cv = decode(p, k, c);
        if basis.iter().all(|b| dot(p, &cv, b) == 0) {
            bits[c as usize / 64] |= 1 << (c % 64);
        }
    }
    bits
}

pub fn build_lattice(p: u32, k: usize) -> Result<Lattice, BorelError> {
    if !is_prime(p as u64) {
        return Err(BorelError::NotPrime(p as u64));
    }
    if k == 0 || k > MAX_RANK {
        return Err(BorelError::RankTooLarge(k));
    }
    let mut subgroups = Vec::new();
    for r in 0..=k {
        for basis in echelon_bases(p, k, r) {
            let members = span(p, k, &basis);
            let annihilator = annihilator(p, k, &basis);
            subgroups.push(Subspace { rank: r, basis, members, annihilator });
        }
    }
    let covers = subgroups
        .iter()
        .map(|b| {
            subgroups
                .iter()
                .enumerate()
                .filter(|(_, s)| s.rank + 1 == b.rank && s.is_subset_of(b))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut line_of = HashMap::new();
    for (i, s) in subgroups.iter().enumerate().filter(|(_, s)| s.rank == 1) {
        for v in 1..p.pow(k as u32) {
            if s.contains(v) {
                line_of.insert(v, i);
            }
        }
    }
    Ok(Lattice { p, k, subgroups, covers, line_of })
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn of_rank(&self, r: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.subgroups[i].rank == r).collect()
    }

    /// Index of the cyclic subgroup generated by a nonzero packed vector.
    pub fn line_of(&self, v: u32) -> Option<usize> {
        self.line_of.get(&v).copied()
    }

    pub fn full(&self) -> usize {
        self.len() - 1
    }
}

/// Blocks of same-rank subgroups forced to share a fixed-point dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl ClassPartition {
    /// Every subgroup in a block of its own.
    pub fn trivial(lattice: &Lattice) -> Self {
        ClassPartition { blocks: (0..lattice.len()).map(|i| vec![i]).collect() }
    }

    /// One block per rank.
    pub fn rank_blocks(lattice: &Lattice) -> Self {
        ClassPartition { blocks: (0..=lattice.k).map(|r| lattice.of_rank(r)).collect() }
    }

    /// All subgroups of rank `r` tied together, everything else free.
    pub fn single_block(lattice: &Lattice, r: usize) -> Self {
        let mut blocks = vec![lattice.of_rank(r)];
        blocks.extend((0..lattice.len()).filter(|&i| lattice.subgroups[i].rank != r).map(|i| vec![i]));
        Self::normalized(blocks)
    }

    /// The given blocks, completed with singletons for unmentioned subgroups.
    pub fn from_blocks(lattice: &Lattice, blocks: Vec<Vec<usize>>) -> Result<Self, BorelError> {
        let mut seen = vec![false; lattice.len()];
        for b in &blocks {
            let Some(&first) = b.first() else {
                return Err(BorelError::InvalidPartition("empty block".into()));
            };
            for &i in b {
                if i >= lattice.len() {
                    return Err(BorelError::InvalidPartition(format!("subgroup {i} out of range")));
                }
                if seen[i] {
                    return Err(BorelError::InvalidPartition(format!("subgroup {i} appears twice")));
                }
                if lattice.subgroups[i].rank != lattice.subgroups[first].rank {
                    return Err(BorelError::InvalidPartition("block mixes ranks".into()));
                }
                seen[i] = true;
            }
        }
        let mut all = blocks;
        all.extend((0..lattice.len()).filter(|&i| !seen[i]).map(|i| vec![i]));
        Ok(Self::normalized(all))
    }

    /// Blocks of cyclic subgroups, each given by packed generator vectors.
    pub fn from_line_classes(lattice: &Lattice, classes: &[Vec<u32>]) -> Result<Self, BorelError> {
        let blocks = classes
            .iter()
            .map(|c| {
                let mut b: Vec<usize> = c
                    .iter()
                    .map(|&v| lattice.line_of(v).ok_or_else(|| BorelError::InvalidPartition(format!("{v} is not a nonzero vector"))))
                    .collect::<Result<_, _>>()?;
                b.sort_unstable();
                b.dedup();
                Ok(b)
            })
            .collect::<Result<Vec<_>, BorelError>>()?;
        Self::from_blocks(lattice, blocks)
    }

    fn normalized(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        ClassPartition { blocks }
    }

    fn block_of(&self, len: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; len];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &i in b {
                out[i] = bi;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Nonempty fixed sets have even codimension. For p = 2 this binds only
    /// cyclic subgroups: a Klein four-group of diagonal sign changes on R^3
    /// preserves orientation yet fixes just the origin.
    pub orientation_preserving: bool,
    /// `r(B) = n` only for the trivial subgroup.
    pub strict_faithful: bool,
    /// For odd p and even n, no p-subgroup acts without fixed points.
    pub euler_rule: bool,
    /// Require `r(K) - r(B) ∈ {0} ∪ [2, ∞)` along every cover, for every p.
    pub strict_gap: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { orientation_preserving: true, strict_faithful: true, euler_rule: true, strict_gap: false }
    }
}

/// Fixed-point dimensions indexed like [`Lattice::subgroups`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FixAssignment {
    pub n: i32,
    pub r: Vec<i32>,
}

impl FixAssignment {
    /// Values taken by each block, in block order.
    pub fn block_values(&self, classes: &ClassPartition) -> Vec<i32> {
        classes.blocks.iter().map(|b| self.r[b[0]]).collect()
    }
}

/// Reasons an assignment fails [`validate_assignment`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("assignment has {0} entries")]
    Length(usize),
    #[error("r(trivial) = {0}")]
    TrivialNotFull(i32),
    #[error("subgroup {0} value out of range")]
    Range(usize),
    #[error("subgroup {0} breaks faithfulness")]
    Faithful(usize),
    #[error("subgroup {0} breaks parity")]
    Parity(usize),
    #[error("subgroup {0} has empty fixed set on an even sphere")]
    Euler(usize),
    #[error("block {0} is not constant")]
    Block(usize),
    #[error("subgroups {0} < {1} break monotonicity")]
    Monotone(usize, usize),
    #[error("subgroups {0} < {1} break the gap rule")]
    Gap(usize, usize),
    #[error("Borel identity fails at subgroup {0}")]
    Borel(usize),
}

/// Checks an assignment from scratch, recomputing index-p subgroups by inclusion.
pub fn validate_assignment(
    lattice: &Lattice,
    classes: &ClassPartition,
    opts: SolverOptions,
    a: &FixAssignment,
) -> Result<(), Violation> {
    let n = a.n;
    let len = lattice.len();
    if a.r.len() != len {
        return Err(Violation::Length(a.r.len()));
    }
    if a.r[0] != n {
        return Err(Violation::TrivialNotFull(a.r[0]));
    }
    for (i, &r) in a.r.iter().enumerate() {
        if r < -1 || r > n {
            return Err(Violation::Range(i));
        }
        if i > 0 && opts.strict_faithful && r == n {
            return Err(Violation::Faithful(i));
        }
        let parity_applies = lattice.p % 2 == 1 || lattice.subgroups[i].rank == 1;
        if opts.orientation_preserving && parity_applies && r >= 0 && (n - r) % 2 != 0 {
            return Err(Violation::Parity(i));
        }
        if opts.euler_rule && lattice.p % 2 == 1 && n % 2 == 0 && r < 0 {
            return Err(Violation::Euler(i));
        }
    }
    for (bi, b) in classes.blocks.iter().enumerate() {
        if b.iter().any(|&i| a.r[i] != a.r[b[0]]) {
            return Err(Violation::Block(bi));
        }
    }
    for (bi, big) in lattice.subgroups.iter().enumerate() {
        if big.rank == 0 {
            continue;
        }
        let subs: Vec<usize> = (0..len)
            .filter(|&ki| {
                let s = &lattice.subgroups[ki];
                s.rank + 1 == big.rank && s.basis.iter().all(|v| big.contains(encode(lattice.p, v)))
            })
            .collect();
        for &ki in &subs {
            if a.r[ki] < a.r[bi] {
                return Err(Violation::Monotone(ki, bi));
            }
            if opts.strict_gap && a.r[ki] == a.r[bi] + 1 {
                return Err(Violation::Gap(ki, bi));
            }
        }
        if big.rank >= 2 {
            let sum: i32 = subs.iter().map(|&ki| a.r[ki] - a.r[bi]).sum();
            if sum != n - a.r[bi] {
                return Err(Violation::Borel(bi));
            }
        }
    }
    Ok(())
}

// Domains are bitmasks where bit i stands for the value i - 1.

fn bit(v: i32) -> u64 {
    1 << (v + 1)
}

fn values(d: u64) -> impl Iterator<Item = i32> {
    (0..64).filter(move |i| d >> i & 1 == 1).map(|i| i - 1)
}

fn lo(d: u64) -> i32 {
    d.trailing_zeros() as i32 - 1
}

fn hi(d: u64) -> i32 {
    63 - d.leading_zeros() as i32 - 1
}

#[derive(Debug, Clone)]
struct LinEq {
    terms: Vec<(usize, i64)>,
    rhs: i64,
}

#[derive(Debug, Clone)]
struct Model {
    rank: Vec<usize>,
    eqs: Vec<LinEq>,
    /// `(a, b)`: `r(a) >= r(b)`.
    geq: Vec<(usize, usize)>,
    gap: bool,
    moduli: Vec<i64>,
    init: Vec<u64>,
}

fn build_model(
    lattice: &Lattice,
    n: i32,
    classes: &ClassPartition,
    opts: SolverOptions,
) -> Result<(Model, Vec<usize>), BorelError> {
    if !(0..=MAX_DIM).contains(&n) {
        return Err(BorelError::DimensionOutOfRange(n));
    }
    let len = lattice.len();
    let block_of = classes.block_of(len);
    if block_of.contains(&usize::MAX) {
        return Err(BorelError::InvalidPartition("partition does not cover the lattice".into()));
    }
    let nb = classes.blocks.len();
    let rank: Vec<usize> = classes.blocks.iter().map(|b| lattice.subgroups[b[0]].rank).collect();
    let mut init = vec![0u64; nb];
    for (v, d) in init.iter_mut().enumerate() {
        let trivial = rank[v] == 0;
        let parity_applies = lattice.p % 2 == 1 || rank[v] == 1;
        for r in -1..=n {
            let ok = if trivial {
                r == n
            } else {
                (!opts.strict_faithful || r < n)
                    && (!opts.orientation_preserving || !parity_applies || r < 0 || (n - r) % 2 == 0)
                    && (!opts.euler_rule || lattice.p.is_multiple_of(2) || n % 2 == 1 || r >= 0)
            };
            if ok {
                *d |= bit(r);
            }
        }
    }
    let mut eqs = Vec::new();
    let mut geq = Vec::new();
    for (b, covers) in lattice.covers.iter().enumerate() {
        for &k in covers {
            if block_of[k] != block_of[b] {
                geq.push((block_of[k], block_of[b]));
            }
        }
        if lattice.subgroups[b].rank >= 2 {
            let mut coef: HashMap<usize, i64> = HashMap::new();
            for &k in covers {
                *coef.entry(block_of[k]).or_default() += 1;
            }
            *coef.entry(block_of[b]).or_default() -= covers.len() as i64 - 1;
            let mut terms: Vec<(usize, i64)> = coef.into_iter().filter(|&(_, c)| c != 0).collect();
            terms.sort_unstable();
            eqs.push(LinEq { terms, rhs: n as i64 });
        }
    }
    geq.sort_unstable();
    geq.dedup();
    let mut moduli = vec![4];
    if lattice.p == 2 {
        moduli.push(8);
    } else {
        moduli.push(lattice.p as i64);
    }
    Ok((Model { rank, eqs, geq, gap: opts.strict_gap, moduli, init }, block_of))
}

impl Model {
    /// Propagates to a fixpoint; returns false on a wipeout.
    fn propagate(&self, dom: &mut [u64]) -> bool {
        loop {
            let mut changed = false;
            for &(a, b) in &self.geq {
                if dom[a] == 0 || dom[b] == 0 {
                    return false;
                }
                let keep_a = dom[a] & !(bit(lo(dom[b])) - 1);
                let keep_b = dom[b] & (bit(hi(dom[a])) | (bit(hi(dom[a])) - 1));
                if keep_a != dom[a] || keep_b != dom[b] {
                    dom[a] = keep_a;
                    dom[b] = keep_b;
                    changed = true;
                }
                if self.gap {
                    let (na, nb) = gap_filter(dom[a], dom[b]);
                    if na != dom[a] || nb != dom[b] {
                        dom[a] = na;
                        dom[b] = nb;
                        changed = true;
                    }
                }
                if dom[a] == 0 || dom[b] == 0 {
                    return false;
                }
            }
            for eq in &self.eqs {
                match self.filter_eq(eq, dom) {
                    None => return false,
                    Some(c) => changed |= c,
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn filter_eq(&self, eq: &LinEq, dom: &mut [u64]) -> Option<bool> {
        let mut changed = false;
        let ext = |d: u64, c: i64| {
            let (a, b) = (c * lo(d) as i64, c * hi(d) as i64);
            (a.min(b), a.max(b))
        };
        let mut smin = 0;
        let mut smax = 0;
        for &(v, c) in &eq.terms {
            if dom[v] == 0 {
                return None;
            }
            let (a, b) = ext(dom[v], c);
            smin += a;
            smax += b;
        }
        if eq.rhs < smin || eq.rhs > smax {
            return None;
        }
        for &(v, c) in &eq.terms {
            let (a, b) = ext(dom[v], c);
            let (lo_t, hi_t) = (eq.rhs - (smax - b), eq.rhs - (smin - a));
            let mut nd = 0;
            for x in values(dom[v]) {
                let t = c * x as i64;
                if t >= lo_t && t <= hi_t {
                    nd |= bit(x);
                }
            }
            if nd == 0 {
                return None;
            }
            if nd != dom[v] {
                dom[v] = nd;
                changed = true;
                let (a2, b2) = ext(nd, c);
                smin += a2 - a;
                smax += b2 - b;
            }
        }
        let open: Vec<usize> = (0..eq.terms.len()).filter(|&i| dom[eq.terms[i].0].count_ones() > 1).collect();
        if open.len() == 2 {
            let rest: i64 = eq
                .terms
                .iter()
                .enumerate()
                .filter(|(i, _)| !open.contains(i))
                .map(|(_, &(v, c))| c * lo(dom[v]) as i64)
                .sum();
            let (v1, c1) = eq.terms[open[0]];
            let (v2, c2) = eq.terms[open[1]];
            let (mut s1, mut s2) = (0, 0);
            for x in values(dom[v1]) {
                for y in values(dom[v2]) {
                    if c1 * x as i64 + c2 * y as i64 + rest == eq.rhs {
                        s1 |= bit(x);
                        s2 |= bit(y);
                    }
                }
            }
            if s1 == 0 {
                return None;
            }
            if s1 != dom[v1] || s2 != dom[v2] {
                dom[v1] = s1;
                dom[v2] = s2;
                changed = true;
            }
        }
        for &m in &self.moduli {
            {
                let c = residue_filter(eq, dom, m)?;
                changed |= c
            }
        }
        Some(changed)
    }

    fn select(&self, dom: &[u64]) -> Option<usize> {
        (0..dom.len())
            .filter(|&v| dom[v].count_ones() > 1)
            .min_by_key(|&v| (dom[v].count_ones(), std::cmp::Reverse(self.rank[v]), v))
    }

    fn search(&self, dom: Vec<u64>, out: &mut Vec<Vec<u64>>, limit: usize) -> bool {
        match self.select(&dom) {
            None => {
                out.push(dom);
                out.len() >= limit
            }
            Some(v) => {
                for x in values(dom[v]) {
                    let mut d = dom.clone();
                    d[v] = bit(x);
                    if self.propagate(&mut d) && self.search(d, out, limit) {
                        return true;
                    }
                }
                false
            }
        }
    }
}

fn gap_filter(a: u64, b: u64) -> (u64, u64) {
    let (mut na, mut nb) = (0, 0);
    for x in values(a) {
        for y in values(b) {
            if x == y || x >= y + 2 {
                na |= bit(x);
                nb |= bit(y);
            }
        }
    }
    (na, nb)
}

/// Residues of `Σ c·x` modulo `m`: keeps only values that can reach `rhs`.
fn residue_filter(eq: &LinEq, dom: &mut [u64], m: i64) -> Option<bool> {
    let mask_all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let rot = |s: u64, r: i64| -> u64 {
        let r = r.rem_euclid(m) as u32;
        if r == 0 {
            s
        } else {
            ((s << r) | (s >> (m as u32 - r))) & mask_all
        }
    };
    let sumset = |a: u64, b: u64| -> u64 {
        let mut out = 0;
        for r in 0..m {
            if b >> r & 1 == 1 {
                out |= rot(a, r);
            }
        }
        out
    };
    let res: Vec<u64> = eq
        .terms
        .iter()
        .map(|&(v, c)| values(dom[v]).fold(0, |acc, x| acc | 1 << (c * x as i64).rem_euclid(m)))
        .collect();
    let t = res.len();
    let mut prefix = vec![1u64; t + 1];
    for i in 0..t {
        prefix[i + 1] = sumset(prefix[i], res[i]);
    }
    if prefix[t] >> eq.rhs.rem_euclid(m) & 1 == 0 {
        return None;
    }
    let mut suffix = vec![1u64; t + 1];
    for i in (0..t).rev() {
        suffix[i] = sumset(suffix[i + 1], res[i]);
    }
    let mut changed = false;
    for (i, &(v, c)) in eq.terms.iter().enumerate() {
        let others = sumset(prefix[i], suffix[i + 1]);
        let mut nd = 0;
        for x in values(dom[v]) {
            if others >> (eq.rhs - c * x as i64).rem_euclid(m) & 1 == 1 {
                nd |= bit(x);
            }
        }
        if nd == 0 {
            return None;
        }
        if nd != dom[v] {
            dom[v] = nd;
            changed = true;
        }
    }
    Some(changed)
}

fn solve(
    lattice: &Lattice,
    n: i32,
    classes: &ClassPartition,
    opts: SolverOptions,
    limit: usize,
) -> Result<Vec<FixAssignment>, BorelError> {
    let (model, block_of) = build_model(lattice, n, classes, opts)?;
    let mut dom = model.init.clone();
    let mut raw = Vec::new();
    if model.propagate(&mut dom) {
        model.search(dom, &mut raw, limit);
    }
    let mut out: Vec<FixAssignment> = raw
        .into_iter()
        .map(|d| FixAssignment { n, r: block_of.iter().map(|&b| lo(d[b])).collect() })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// All assignments, in lexicographic order of the value vector.
pub fn borel_solve(
    lattice: &Lattice,
    n: i32,
    classes: &ClassPartition,
    opts: SolverOptions,
) -> Result<Vec<FixAssignment>, BorelError> {
    solve(lattice, n, classes, opts, usize::MAX)
}

/// Like [`borel_solve`] but refuses to return more than `cap` solutions.
pub fn borel_solve_capped(
    lattice: &Lattice,
    n: i32,
    classes: &ClassPartition,
    opts: SolverOptions,
    cap: usize,
) -> Result<Vec<FixAssignment>, BorelError> {
    let out = solve(lattice, n, classes, opts, cap.saturating_add(1))?;
    if out.len() > cap {
        return Err(BorelError::TooManySolutions(cap));
    }
    Ok(out)
}

/// First solution found, if any.
pub fn borel_feasible(
    lattice: &Lattice,
    n: i32,
    classes: &ClassPartition,
    opts: SolverOptions,
) -> Result<Option<FixAssignment>, BorelError> {
    Ok(solve(lattice, n, classes, opts, 1)?.into_iter().next())
}

/// Smallest `n` in `1..=32` with a feasible assignment.
pub fn min_feasible_dim(
    lattice: &Lattice,
    classes: &ClassPartition,
    opts: SolverOptions,
) -> Result<Option<i32>, BorelError> {
    for n in 1..=MAX_DIM {
        if borel_feasible(lattice, n, classes, opts)?.is_some() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Smallest `n` allowed when all index-p subgroups share a fixed-point dimension.
pub fn lemma1_bound(p: u64, k: u32) -> u64 {
    if p == 2 {
        (1u64 << k).saturating_sub(2)
    } else {
        2 * (p.pow(k) - 1) / (p - 1) - 1
    }
}

fn dot(p: u32, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<u32>() % p
}

/// Rotation model: `characters[j]` is the j-th character as a vector in `F_p^k`.
/// On `S^{2c-1}` each subgroup fixes `2·#{characters vanishing on it} - 1`
/// dimensions; returns whether every Borel identity holds.
pub fn linear_model_check(p: u32, k: usize, characters: &[Vec<u32>]) -> Result<bool, BorelError> {
    let lattice = build_lattice(p, k)?;
    linear_model_check_in(&lattice, characters)
}

fn rank_mod_p(p: u32, rows: &[Vec<u32>]) -> usize {
    let mut rows: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(rank, pivot);
        let inv = (1..p).find(|x| x * rows[rank][col] % p == 1).unwrap();
        let pivot_row: Vec<u32> = rows[rank].iter().map(|x| x * inv % p).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let f = row[col];
                row.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x = (*x + p - f * y % p) % p);
            }
        }
        rank += 1;
    }
    rank
}

pub fn linear_model_check_in(lattice: &Lattice, characters: &[Vec<u32>]) -> Result<bool, BorelError> {
    let (p, k) = (lattice.p, lattice.k);
    // The common kernel is trivial exactly when the characters span F_p^k.
    if rank_mod_p(p, characters) < k {
        return Err(BorelError::NotFaithful);
    }
    let packed: Vec<u32> = characters.iter().map(|c| encode(p, &c.iter().map(|x| x % p).collect::<Vec<_>>())).collect();
    let n = 2 * characters.len() as i32 - 1;
    let r: Vec<i32> = lattice
        .subgroups
        .iter()
        .map(|s| {
            let vanish = packed.iter().filter(|&&c| s.annihilated_by(c)).count();
            2 * vanish as i32 - 1
        })
        .collect();
    Ok(lattice.subgroups.iter().enumerate().filter(|(_, s)| s.rank >= 2).all(|(b, _)| {
        let sum: i32 = lattice.covers[b].iter().map(|&kk| r[kk] - r[b]).sum();
        sum == n - r[b]
    }))
}
