//! Exact arithmetic in GF(p^k) over a polynomial basis.
//!
//! Elements are stored as their coefficient vector packed into a single
//! base-`p` integer (`c_0 + c_1 p + ... + c_{k-1} p^{k-1}`), so equality and
//! hashing are coefficient-wise and cheap. Small fields additionally cache
//! full addition and multiplication tables.

use std::fmt;

use thiserror::Error;

/// Largest field order the context accepts.
pub const MAX_ORDER: u64 = 1 << 31;
/// Largest extension degree the context accepts.
pub const MAX_DEGREE: u32 = 8;
/// Fields up to this order get precomputed operation tables.
const TABLE_LIMIT: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree {0} outside 1..={MAX_DEGREE}")]
    DegreeOutOfRange(u32),
    #[error("field order {p}^{k} exceeds 2^31")]
    OverflowBound { p: u64, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero has no multiplicative order")]
    ZeroElement,
}

/// An element of GF(p^k), packed base-p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

/// Arithmetic context for GF(p^k). Immutable after creation.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u64,
    k: u32,
    /// Monic modulus, low degree first, length k + 1.
    modulus: Vec<u64>,
    q: u64,
    generator: FieldElem,
    order_factors: Vec<u64>,
    tables: Option<Tables>,
}

/// Deterministic primality by trial division (inputs stay below 2^32).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q` into `(p, k)` when it is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let (mut r, mut k) = (q, 0);
    while r > 1 {
        r /= p;
        k += 1;
    }
    Some((p, k))
}

// Polynomial helpers over Z_p, coefficient vectors low degree first.

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem_monic(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        poly_trim(&mut r);
    }
    r
}

/// Enumerates monic polynomials of degree `d` in lexicographic order of
/// `(c_{d-1}, ..., c_0)`.
fn monic_polys(p: u64, d: u32) -> impl Iterator<Item = Vec<u64>> {
    let count = p.pow(d);
    (0..count).map(move |mut idx| {
        let mut c = vec![0u64; d as usize + 1];
        c[d as usize] = 1;
        for x in &mut c[..d as usize] {
            *x = idx % p;
            idx /= p;
        }
        c
    })
}

/// Irreducibility of a monic polynomial by trial division against every
/// monic polynomial of degree at most half its degree.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() as u32 - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        for g in monic_polys(p, d) {
            if poly_rem_monic(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldCtx {
    /// Builds GF(p^k) with the lexicographically smallest monic irreducible
    /// modulus of degree k.
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(k));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(FieldError::OverflowBound { p, k })?;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            monic_polys(p, k)
                .find(|f| is_irreducible(f, p))
                .expect("irreducible polynomials exist in every degree")
        };
        let mut ctx = FieldCtx {
            p,
            k,
            modulus,
            q,
            generator: FieldElem::ONE,
            order_factors: prime_factors(q - 1),
            tables: None,
        };
        if q <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        ctx.generator = ctx.find_generator();
        Ok(ctx)
    }

    /// Context for GF(q) given the field order.
    pub fn of_order(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NonPrime(q))?;
        Self::new(p, k)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus coefficients, low degree first (monic, length k + 1).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// A fixed multiplicative generator (smallest packed value of order q - 1).
    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q as u32).map(FieldElem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q as u32).map(FieldElem)
    }

    /// Packs a coefficient vector (low degree first); missing entries are 0.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElem {
        let mut v = 0u64;
        for i in (0..self.k as usize).rev() {
            let c = coeffs.get(i).copied().unwrap_or(0) % self.p;
            v = v * self.p + c;
        }
        FieldElem(v as u32)
    }

    pub fn coeffs(&self, a: FieldElem) -> Vec<u64> {
        let mut v = a.0 as u64;
        (0..self.k)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u32)
    }

    /// The element `x` (the class of the indeterminate); equals 0 in the prime field case.
    pub fn x(&self) -> FieldElem {
        if self.k == 1 {
            FieldElem::ZERO
        } else {
            FieldElem(self.p as u32)
        }
    }

    /// The basis `1, x, ..., x^{k-1}` of GF(q) over GF(p).
    pub fn basis(&self) -> Vec<FieldElem> {
        (0..self.k).map(|i| FieldElem(self.p.pow(i) as u32)).collect()
    }

    pub fn is_prime_subfield(&self, a: FieldElem) -> bool {
        (a.0 as u64) < self.p
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if let Some(t) = &self.tables {
            return FieldElem(t.add[a.0 as usize * self.q as usize + b.0 as usize]);
        }
        self.add_slow(a, b)
    }

    fn add_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.k == 1 {
            return FieldElem(((a.0 as u64 + b.0 as u64) % self.p) as u32);
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.k {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElem(out as u32)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.k == 1 {
            return FieldElem(((self.p - a.0 as u64) % self.p) as u32);
        }
        let c: Vec<u64> = self.coeffs(a).iter().map(|&c| (self.p - c) % self.p).collect();
        self.from_coeffs(&c)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if let Some(t) = &self.tables {
            return FieldElem(t.mul[a.0 as usize * self.q as usize + b.0 as usize]);
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p;
        if self.k == 1 {
            return FieldElem(((a.0 as u64 * b.0 as u64) % p) as u32);
        }
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; 2 * self.k as usize];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        self.from_coeffs(&poly_rem_monic(&prod, &self.modulus, p))
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Signed exponent; negative powers go through the inverse.
    pub fn pow_signed(&self, a: FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            return Ok(FieldElem(t.inv[a.0 as usize]));
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// True iff `a = b^2` for some `b`; zero counts as a square.
    pub fn is_square(&self, a: FieldElem) -> bool {
        if a.is_zero() || self.p == 2 {
            return true;
        }
        self.pow(a, (self.q - 1) / 2) == FieldElem::ONE
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: FieldElem) -> Result<u64, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let mut ord = self.q - 1;
        for &f in &self.order_factors {
            while ord.is_multiple_of(f) && self.pow(a, ord / f) == FieldElem::ONE {
                ord /= f;
            }
        }
        Ok(ord)
    }

    /// All `c` with `c^m = 1`.
    pub fn roots_of_unity(&self, m: u64) -> Vec<FieldElem> {
        let d = gcd(m, self.q - 1);
        let step = (self.q - 1) / d;
        let z = self.pow(self.generator, step);
        let mut out: Vec<FieldElem> = (0..d).map(|i| self.pow(z, i)).collect();
        out.sort();
        out
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = self.add_slow(FieldElem(a as u32), FieldElem(b as u32)).0;
                mul[a * q + b] = self.mul_slow(FieldElem(a as u32), FieldElem(b as u32)).0;
            }
        }
        let mut inv = vec![0u32; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u32;
                    break;
                }
            }
        }
        Tables { add, mul, inv }
    }

    fn find_generator(&self) -> FieldElem {
        if self.q == 2 {
            return FieldElem::ONE;
        }
        self.nonzero()
            .find(|&g| self.element_order(g) == Ok(self.q - 1))
            .expect("the multiplicative group of a finite field is cyclic")
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
