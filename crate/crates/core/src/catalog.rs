//! Finite simple group identifiers, exceptional isomorphisms, per-family
//! enumeration and the external witness file.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dimbounds;
use crate::gfield::{gcd, is_prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("{0} is not simple")]
    NotSimple(String),
    #[error("line {line}: cannot parse `{text}`")]
    ParseError { line: usize, text: String },
    #[error("line {line}: invalid witness: {reason}")]
    InvalidWitness { line: usize, reason: String },
    #[error("cannot read config: {0}")]
    Io(String),
}

/// `p^k` with `p` prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub p: u64,
    pub k: u32,
}

impl PrimePower {
    pub fn new(p: u64, k: u32) -> Option<Self> {
        (is_prime(p) && k >= 1 && (p as u128).checked_pow(k).is_some()).then_some(PrimePower { p, k })
    }

    pub fn from_value(q: u128) -> Option<Self> {
        if q < 2 {
            return None;
        }
        let p = (2..).take_while(|d: &u128| d * d <= q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
        let mut k = 0;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
            k += 1;
        }
        (r == 1 && p <= u64::MAX as u128).then_some(PrimePower { p: p as u64, k })
    }

    pub fn value(&self) -> u128 {
        (self.p as u128).pow(self.k)
    }
}

impl PartialOrd for PrimePower {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimePower {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.value().cmp(&other.value())
    }
}

macro_rules! named_enum {
    ($name:ident { $($var:ident => $s:expr),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name { $($var),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$var),*];

            pub fn name(self) -> &'static str {
                match self { $($name::$var => $s),* }
            }

            pub fn from_name(s: &str) -> Option<Self> {
                Self::ALL.iter().copied().find(|v| v.name() == s)
            }
        }
    };
}

named_enum!(Sporadic {
    M11 => "M11", M12 => "M12", M22 => "M22", M23 => "M23", M24 => "M24",
    J1 => "J1", J2 => "J2", J3 => "J3", J4 => "J4",
    Co1 => "Co1", Co2 => "Co2", Co3 => "Co3",
    Fi22 => "Fi22", Fi23 => "Fi23", Fi24 => "Fi24'",
    HS => "HS", McL => "McL", He => "He", Ru => "Ru", Suz => "Suz",
    ON => "O'N", HN => "HN", Ly => "Ly", Th => "Th", B => "B", M => "M",
});

named_enum!(LieSeries {
    B2Twisted => "2B2", G2Twisted => "2G2", F4Twisted => "2F4", D4Triality => "3D4",
    E6Twisted => "2E6", G2 => "G2", F4 => "F4", E6 => "E6", E7 => "E7", E8 => "E8",
});

/// A finite simple group. The derived order lists families as alternating,
/// linear, symplectic, unitary, sporadic, then the remaining Lie types.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupId {
    Alt(u32),
    Psl { m: u32, q: PrimePower },
    Psp { two_m: u32, q: PrimePower },
    Psu { m: u32, q: PrimePower },
    Sporadic(Sporadic),
    OtherLie { series: LieSeries, q: PrimePower },
}

/// Enumeration families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Alt,
    Psl2,
    #[serde(rename = "pslm")]
    PslM,
    Psp,
    Psu,
    Sporadic,
    OtherLie,
}

impl Family {
    pub const ALL: [Family; 7] =
        [Family::Alt, Family::Psl2, Family::PslM, Family::Psp, Family::Psu, Family::Sporadic, Family::OtherLie];
}

impl FromStr for Family {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "alt" => Family::Alt,
            "psl2" => Family::Psl2,
            "pslm" | "psl" => Family::PslM,
            "psp" => Family::Psp,
            "psu" => Family::Psu,
            "sporadic" => Family::Sporadic,
            "other-lie" | "otherlie" | "lie" => Family::OtherLie,
            _ => return Err(CatalogError::UnknownGroup(format!("family {s}"))),
        })
    }
}

impl GroupId {
    pub fn psl(m: u32, q: u128) -> Self {
        GroupId::Psl { m, q: PrimePower::from_value(q).expect("prime power") }
    }

    pub fn psp(two_m: u32, q: u128) -> Self {
        GroupId::Psp { two_m, q: PrimePower::from_value(q).expect("prime power") }
    }

    pub fn psu(m: u32, q: u128) -> Self {
        GroupId::Psu { m, q: PrimePower::from_value(q).expect("prime power") }
    }

    pub fn family(&self) -> Family {
        match self {
            GroupId::Alt(_) => Family::Alt,
            GroupId::Psl { m: 2, .. } => Family::Psl2,
            GroupId::Psl { .. } => Family::PslM,
            GroupId::Psp { .. } => Family::Psp,
            GroupId::Psu { .. } => Family::Psu,
            GroupId::Sporadic(_) => Family::Sporadic,
            GroupId::OtherLie { .. } => Family::OtherLie,
        }
    }

    /// Families whose members are decided only through the witness file.
    pub fn config_only(&self) -> bool {
        matches!(self.family(), Family::Psu | Family::Sporadic | Family::OtherLie)
    }

    pub fn check_simple(&self) -> Result<(), CatalogError> {
        let ok = match *self {
            GroupId::Alt(m) => m >= 5,
            GroupId::Psl { m, q } => m >= 3 || (m == 2 && q.value() >= 4),
            GroupId::Psp { two_m, q } => two_m >= 4 && two_m % 2 == 0 && !(two_m == 4 && q.value() == 2),
            GroupId::Psu { m, q } => m >= 3 && !(m == 3 && q.value() == 2),
            GroupId::Sporadic(_) => true,
            GroupId::OtherLie { series, q } => match series {
                LieSeries::B2Twisted | LieSeries::F4Twisted => q.p == 2 && q.k % 2 == 1 && q.k >= 3,
                LieSeries::G2Twisted => q.p == 3 && q.k % 2 == 1 && q.k >= 3,
                LieSeries::G2 => q.value() >= 3,
                _ => true,
            },
        };
        if ok {
            Ok(())
        } else {
            Err(CatalogError::NotSimple(self.to_string()))
        }
    }

    /// Group order where a closed formula is implemented and fits in 128 bits.
    pub fn order(&self) -> Option<u128> {
        let prod = |range: std::ops::RangeInclusive<u32>, f: &dyn Fn(u32) -> Option<u128>| {
            range.map(f).try_fold(1u128, |acc, x| acc.checked_mul(x?))
        };
        match *self {
            GroupId::Alt(m) => prod(3..=m, &|i| Some(i as u128)),
            GroupId::Psl { m, q } => {
                let qv = q.value();
                let head = qv.checked_pow(m * (m - 1) / 2)?;
                let body = prod(2..=m, &|i| Some(qv.checked_pow(i)? - 1))?;
                Some(head.checked_mul(body)? / gcd(m as u64, (qv - 1) as u64) as u128)
            }
            GroupId::Psp { two_m, q } => {
                let (m, qv) = (two_m / 2, q.value());
                let head = qv.checked_pow(m * m)?;
                let body = prod(1..=m, &|i| Some(qv.checked_pow(2 * i)? - 1))?;
                Some(head.checked_mul(body)? / gcd(2, (qv - 1) as u64) as u128)
            }
            GroupId::Psu { m, q } => {
                let qv = q.value();
                let head = qv.checked_pow(m * (m - 1) / 2)?;
                let body = prod(2..=m, &|i| {
                    let x = qv.checked_pow(i)?;
                    Some(if i % 2 == 0 { x - 1 } else { x + 1 })
                })?;
                Some(head.checked_mul(body)? / gcd(m as u64, (qv + 1) as u64) as u128)
            }
            _ => None,
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Alt(m) => write!(f, "Alt({m})"),
            GroupId::Psl { m, q } => write!(f, "PSL({m},{})", q.value()),
            GroupId::Psp { two_m, q } => write!(f, "PSp({two_m},{})", q.value()),
            GroupId::Psu { m, q } => write!(f, "PSU({m},{})", q.value()),
            GroupId::Sporadic(s) => f.write_str(s.name()),
            GroupId::OtherLie { series, q } => write!(f, "{}({})", series.name(), q.value()),
        }
    }
}

fn split_call(s: &str) -> Option<(&str, Vec<&str>)> {
    let open = s.find('(')?;
    let body = s[open + 1..].strip_suffix(')')?;
    Some((&s[..open], body.split(',').collect()))
}

impl FromStr for GroupId {
    type Err = CatalogError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let unknown = || CatalogError::UnknownGroup(raw.trim().to_string());
        if let Some(sp) = Sporadic::from_name(&s) {
            return Ok(GroupId::Sporadic(sp));
        }
        let num = |t: &str| t.parse::<u128>().map_err(|_| unknown());
        let pp = |t: &str| PrimePower::from_value(num(t)?).ok_or_else(unknown);
        // Compact forms such as A5, PSL2(25), L3(4), U4(2), S4(4).
        if let Some(rest) = s.strip_prefix('A').filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit())) {
            let id = GroupId::Alt(num(rest)? as u32);
            id.check_simple()?;
            return Ok(id);
        }
        let (head, args) = split_call(&s).ok_or_else(unknown)?;
        let (name, dim) = match head.find(|c: char| c.is_ascii_digit()) {
            Some(i) if LieSeries::from_name(head).is_none() => (&head[..i], Some(num(&head[i..])? as u32)),
            _ => (head, None),
        };
        let id = match (name, dim, args.as_slice()) {
            ("Alt", None, [m]) => GroupId::Alt(num(m)? as u32),
            ("PSL" | "L", None, [m, q]) => GroupId::Psl { m: num(m)? as u32, q: pp(q)? },
            ("PSL" | "L", Some(m), [q]) => GroupId::Psl { m, q: pp(q)? },
            ("PSp" | "S", None, [m, q]) => GroupId::Psp { two_m: num(m)? as u32, q: pp(q)? },
            ("PSp" | "S", Some(m), [q]) => GroupId::Psp { two_m: m, q: pp(q)? },
            ("PSU" | "U", None, [m, q]) => GroupId::Psu { m: num(m)? as u32, q: pp(q)? },
            ("PSU" | "U", Some(m), [q]) => GroupId::Psu { m, q: pp(q)? },
            ("Sz", None, [q]) => GroupId::OtherLie { series: LieSeries::B2Twisted, q: pp(q)? },
            (series, None, [q]) => {
                GroupId::OtherLie { series: LieSeries::from_name(series).ok_or_else(unknown)?, q: pp(q)? }
            }
            _ => return Err(unknown()),
        };
        id.check_simple()?;
        Ok(id)
    }
}

impl Serialize for GroupId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exceptional isomorphisms: `(canonical, other names)`.
fn identification_table() -> Vec<(GroupId, Vec<GroupId>)> {
    vec![
        (GroupId::Alt(5), vec![GroupId::psl(2, 4), GroupId::psl(2, 5)]),
        (GroupId::Alt(6), vec![GroupId::psl(2, 9)]),
        (GroupId::psl(2, 7), vec![GroupId::psl(3, 2)]),
        (GroupId::psl(4, 2), vec![GroupId::Alt(8)]),
        (GroupId::psu(4, 2), vec![GroupId::psp(4, 3)]),
    ]
}

pub fn normalize_id(g: &GroupId) -> Result<GroupId, CatalogError> {
    g.check_simple()?;
    Ok(identification_table()
        .into_iter()
        .find(|(c, others)| c == g || others.contains(g))
        .map(|(c, _)| c)
        .unwrap_or_else(|| g.clone()))
}

/// Every known name of the isomorphism class of `g`, canonical name first.
pub fn isomorphism_class(g: &GroupId) -> Result<Vec<GroupId>, CatalogError> {
    let c = normalize_id(g)?;
    let mut out = vec![c.clone()];
    if let Some((_, mut others)) = identification_table().into_iter().find(|(x, _)| *x == c) {
        others.sort();
        out.extend(others);
    }
    Ok(out)
}

fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&p| is_prime(p)).collect()
}

/// Primes examined for Lie families at dimension n: every p whose PSL_2(p)
/// bound could still fit, plus the next prime.
fn lie_primes(n: u32) -> Vec<u64> {
    let cap = 2 * n as u64 + 1;
    let mut ps = primes_up_to(cap);
    ps.push((cap + 1..).find(|&p| is_prime(p)).unwrap());
    ps
}

/// Extension degrees allowed by a rank `mult * k` witness, plus one.
fn lie_degrees(p: u64, mult: u32, n: u32) -> impl Iterator<Item = u32> {
    let last = (1..).find(|&k| dimbounds::min_dim_elem_abelian(p, mult * k) > n as u64).unwrap();
    1..=last
}

/// Group members of a family worth examining at dimension n. Everything the
/// closed forms could not yet rule out is included, plus one parameter step
/// past each envelope so the exclusion happens in the classifier.
pub fn family_iter(family: Family, n: u32, config: Option<&WitnessConfig>) -> Vec<GroupId> {
    let n64 = n as u64;
    let mut out = Vec::new();
    match family {
        Family::Alt => {
            let last = (5..).find(|&m| m / 2 - 1 > n).unwrap();
            out.extend((5..=last).map(GroupId::Alt));
        }
        Family::Psl2 => {
            for p in lie_primes(n) {
                for k in lie_degrees(p, 1, n) {
                    let q = PrimePower { p, k };
                    if q.value() >= 4 {
                        out.push(GroupId::Psl { m: 2, q });
                    }
                }
            }
        }
        Family::PslM | Family::Psp => {
            // PSL_m and PSp_2m both contain ASL_{m-1}(p) and a rank (m-1)k translation group.
            let last_m = (3u32..).find(|&m| 1u64 << (m - 2) > n64 + 2).unwrap();
            let first_m = if family == Family::PslM { 3 } else { 2 };
            for m in first_m..=last_m {
                for p in lie_primes(n) {
                    for k in lie_degrees(p, (m - 1).max(1), n) {
                        let q = PrimePower { p, k };
                        let id = if family == Family::PslM {
                            GroupId::Psl { m, q }
                        } else {
                            GroupId::Psp { two_m: 2 * m, q }
                        };
                        if id.check_simple().is_ok() {
                            out.push(id);
                        }
                    }
                }
            }
        }
        Family::Sporadic => out.extend(Sporadic::ALL.iter().map(|&s| GroupId::Sporadic(s))),
        Family::Psu | Family::OtherLie => {
            if let Some(cfg) = config {
                out.extend(cfg.groups().into_iter().filter(|g| g.family() == family));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Witness {
    /// Contains `(Z_p)^k`.
    ElemAbelian { p: u64, k: u32 },
    /// Contains `(Z_p)^k` whose cyclic subgroups are all conjugate.
    ElemAbelianConj { p: u64, k: u32 },
    /// Contains `Z_p ⋊ Z_q` with an effective action.
    Metacyclic { p: u64, q: u64 },
    /// Contains `SL_2(q)`.
    ContainsSl2 { q: u128 },
    /// Contains a simple subgroup.
    Contains { group: GroupId },
    /// Order metadata, decimal.
    Order { value: String },
}

impl Witness {
    /// Whether the witness can exclude anything.
    pub fn is_substantive(&self) -> bool {
        !matches!(self, Witness::Order { .. })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::ElemAbelian { p, k } => write!(f, "elemab({p},{k})"),
            Witness::ElemAbelianConj { p, k } => write!(f, "elemab-conj({p},{k})"),
            Witness::Metacyclic { p, q } => write!(f, "metacyclic({p},{q})"),
            Witness::ContainsSl2 { q } => write!(f, "contains SL2({q})"),
            Witness::Contains { group } => write!(f, "contains {group}"),
            Witness::Order { value } => write!(f, "order {value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub group: GroupId,
    pub witness: Witness,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessConfig {
    pub entries: Vec<WitnessEntry>,
    /// Hex SHA-256 of the source text.
    pub digest: String,
}

const DEFAULT_CONFIG: &str = include_str!("../data/witnesses.cfg");

/// The shipped witness file.
pub fn default_config() -> WitnessConfig {
    parse_witness_config(DEFAULT_CONFIG).expect("shipped witness file parses")
}

pub fn load_witness_config(path: &Path) -> Result<WitnessConfig, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io(format!("{}: {e}", path.display())))?;
    parse_witness_config(&text)
}

fn parse_witness(line: usize, text: &str) -> Result<Witness, CatalogError> {
    let invalid = |reason: String| CatalogError::InvalidWitness { line, reason };
    let parse_err = || CatalogError::ParseError { line, text: text.to_string() };
    let text = text.trim();
    if let Some(target) = text.strip_prefix("contains ") {
        let target = target.trim();
        let compact: String = target.chars().filter(|c| !c.is_whitespace()).collect();
        let sl2 = compact
            .strip_prefix("SL2(")
            .or_else(|| compact.strip_prefix("SL(2,"))
            .and_then(|r| r.strip_suffix(')'));
        if let Some(q) = sl2 {
            let q: u128 = q.parse().map_err(|_| parse_err())?;
            if PrimePower::from_value(q).is_none() {
                return Err(invalid(format!("{q} is not a prime power")));
            }
            return Ok(Witness::ContainsSl2 { q });
        }
        let group = target.parse::<GroupId>()?;
        return Ok(Witness::Contains { group });
    }
    if let Some(v) = text.strip_prefix("order ") {
        let v = v.trim();
        if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) || v.starts_with('0') {
            return Err(invalid(format!("order `{v}` is not a positive integer")));
        }
        return Ok(Witness::Order { value: v.to_string() });
    }
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (head, args) = split_call(&compact).ok_or_else(parse_err)?;
    let nums: Vec<u64> = args.iter().map(|a| a.parse::<u64>()).collect::<Result<_, _>>().map_err(|_| parse_err())?;
    let [a, b] = nums[..] else { return Err(parse_err()) };
    match head {
        "elemab" | "elemab-conj" => {
            if !is_prime(a) || b == 0 {
                return Err(invalid(format!("elemab needs a prime and a positive rank, got ({a},{b})")));
            }
            let k = b as u32;
            Ok(if head == "elemab" { Witness::ElemAbelian { p: a, k } } else { Witness::ElemAbelianConj { p: a, k } })
        }
        "metacyclic" => {
            if !is_prime(a) || a < 5 || b < 2 || (a - 1) % b != 0 {
                return Err(invalid(format!("metacyclic({a},{b}) needs a prime p >= 5 and q >= 2 dividing p - 1")));
            }
            Ok(Witness::Metacyclic { p: a, q: b })
        }
        _ => Err(parse_err()),
    }
}

/// Parses `GROUP ":" WITNESS ["@" provenance]` lines; `#` starts a comment.
pub fn parse_witness_config(text: &str) -> Result<WitnessConfig, CatalogError> {
    let mut entries: Vec<WitnessEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (main, provenance) = match body.split_once('@') {
            Some((m, p)) => (m.trim(), p.trim().to_string()),
            None => (body, String::new()),
        };
        let (group, witness) =
            main.split_once(':').ok_or_else(|| CatalogError::ParseError { line, text: raw.to_string() })?;
        let group: GroupId = group.trim().parse()?;
        let witness = parse_witness(line, witness)?;
        if !entries.iter().any(|e| e.group == group && e.witness == witness) {
            entries.push(WitnessEntry { group, witness, provenance });
        }
    }
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    Ok(WitnessConfig { entries, digest })
}

impl WitnessConfig {
    pub fn groups(&self) -> Vec<GroupId> {
        let set: BTreeSet<GroupId> = self.entries.iter().map(|e| e.group.clone()).collect();
        set.into_iter().collect()
    }

    pub fn witnesses_for<'a>(&'a self, g: &'a GroupId) -> impl Iterator<Item = &'a WitnessEntry> + 'a {
        self.entries.iter().filter(move |e| &e.group == g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["Alt(5)", "PSL(2,7)", "PSp(4,3)", "PSU(3,3)", "M11", "O'N", "Fi24'", "G2(3)", "2B2(8)"] {
            let g: GroupId = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert_eq!("PSL2(25)".parse::<GroupId>().unwrap(), GroupId::psl(2, 25));
        assert_eq!("A8".parse::<GroupId>().unwrap(), GroupId::Alt(8));
        assert_eq!("Sz(8)".parse::<GroupId>().unwrap().to_string(), "2B2(8)");
        assert_eq!("U4(2)".parse::<GroupId>().unwrap(), GroupId::psu(4, 2));
        assert!(matches!("Foo".parse::<GroupId>(), Err(CatalogError::UnknownGroup(_))));
        assert!(matches!("PSL(2,6)".parse::<GroupId>(), Err(CatalogError::UnknownGroup(_))));
        assert!(matches!("PSp(4,2)".parse::<GroupId>(), Err(CatalogError::NotSimple(_))));
        assert!(matches!("PSL(2,3)".parse::<GroupId>(), Err(CatalogError::NotSimple(_))));
        assert!(matches!("Alt(4)".parse::<GroupId>(), Err(CatalogError::NotSimple(_))));
    }

    #[test]
    fn normalization_table() {
        assert_eq!(normalize_id(&GroupId::psl(3, 2)).unwrap(), GroupId::psl(2, 7));
        assert_eq!(normalize_id(&GroupId::Alt(8)).unwrap(), GroupId::psl(4, 2));
        assert_eq!(normalize_id(&GroupId::Alt(7)).unwrap(), GroupId::Alt(7));
        assert_eq!(normalize_id(&GroupId::psl(2, 4)).unwrap(), GroupId::Alt(5));
        assert_eq!(normalize_id(&GroupId::psl(2, 5)).unwrap(), GroupId::Alt(5));
        assert_eq!(normalize_id(&GroupId::psl(2, 9)).unwrap(), GroupId::Alt(6));
        assert_eq!(normalize_id(&GroupId::psp(4, 3)).unwrap(), GroupId::psu(4, 2));
        assert_eq!(isomorphism_class(&GroupId::Alt(5)).unwrap().len(), 3);
        for (c, others) in identification_table() {
            for g in others.iter().chain([&c]) {
                assert_eq!(normalize_id(&normalize_id(g).unwrap()).unwrap(), c);
                assert_eq!(g.order(), c.order(), "{g}");
            }
        }
    }

    #[test]
    fn orders() {
        assert_eq!(GroupId::psu(4, 2).order(), Some(25920));
        assert_eq!(GroupId::psu(3, 3).order(), Some(6048));
        assert_eq!(GroupId::psl(3, 4).order(), Some(20160));
        assert_eq!(GroupId::psp(4, 3).order(), Some(25920));
        assert_eq!(GroupId::psp(6, 2).order(), Some(1451520));
        assert_eq!(GroupId::Alt(8).order(), Some(20160));
        assert_eq!(GroupId::Sporadic(Sporadic::M11).order(), None);
    }

    #[test]
    fn family_iteration() {
        let psl2: Vec<u128> = family_iter(Family::Psl2, 5, None)
            .into_iter()
            .map(|g| match g {
                GroupId::Psl { q, .. } => q.value(),
                _ => unreachable!(),
            })
            .collect();
        for q in [4, 5, 7, 9, 25] {
            assert!(psl2.contains(&q));
        }
        let alt = family_iter(Family::Alt, 3, None);
        assert!(alt.contains(&GroupId::Alt(9)));
        assert_eq!(family_iter(Family::Sporadic, 7, None).len(), 26);
        assert!(family_iter(Family::Psu, 5, None).is_empty());
        for f in Family::ALL {
            let mut prev = 0;
            for n in 1..=32 {
                let len = family_iter(f, n, Some(&default_config())).len();
                assert!(len >= prev, "{f:?} n={n}");
                prev = len;
            }
        }
    }

    #[test]
    fn config_parsing() {
        let cfg = parse_witness_config(
            "# comment\nPSU(4,2): order 25920 @ table\nPSp(4,5): contains PSL2(25)\nPSp(4,5): contains PSL2(25) @ dup\n\nJ2: metacyclic(7,6)\nSz(8): elemab-conj(2,3)\n",
        )
        .unwrap();
        assert_eq!(cfg.entries.len(), 4);
        assert_eq!(cfg.entries[0].witness, Witness::Order { value: "25920".into() });
        assert_eq!(cfg.entries[0].provenance, "table");
        assert_eq!(cfg.entries[1].witness, Witness::Contains { group: GroupId::psl(2, 25) });
        assert_eq!(cfg.digest.len(), 64);
        assert_eq!(
            parse_witness_config("ok\n").unwrap_err(),
            CatalogError::ParseError { line: 1, text: "ok".into() }
        );
        assert!(matches!(parse_witness_config("\nM11 order 5"), Err(CatalogError::ParseError { line: 2, .. })));
        assert!(matches!(parse_witness_config("Foo: order 5"), Err(CatalogError::UnknownGroup(_))));
        assert!(matches!(
            parse_witness_config("J1: metacyclic(7,4)"),
            Err(CatalogError::InvalidWitness { line: 1, .. })
        ));
        assert!(matches!(parse_witness_config("J1: contains Bar"), Err(CatalogError::UnknownGroup(_))));
    }

    #[test]
    fn shipped_config_covers_every_sporadic() {
        let cfg = default_config();
        for &s in Sporadic::ALL {
            let g = GroupId::Sporadic(s);
            assert!(cfg.witnesses_for(&g).any(|e| e.witness.is_substantive()), "{g}");
            assert!(cfg.witnesses_for(&g).all(|e| !e.provenance.is_empty()), "{g}");
        }
    }
}
