//! The classification pipeline: enumerate, filter in a fixed order, attach
//! a replayable certificate to every exclusion.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, LazyLock, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::borelsolve::{
    borel_solve_capped, build_lattice, BorelError, ClassPartition, Lattice, SolverOptions, SOLUTION_CAP,
};
use crate::catalog::{family_iter, isomorphism_class, normalize_id, CatalogError, Family, GroupId, Witness, WitnessConfig};
use crate::dimbounds::{
    alternating_metacyclic, alternating_rank, builtin_subgroups, check_lemma1, check_prop1, check_prop2, check_rank,
    check_sec31, check_sec32, check_sec33, check_thm3, Exclusion, FilterId, Inequality,
};
use crate::gfield::{FieldCtx, FieldError};
use crate::matgroup::{
    borel_subgroup, conjugacy_classes, cyclic_subgroup_classes, involution_classes, is_cyclic_or_dihedral,
    normal_subgroups, projective_special_linear, translation_group, CayleyTable, FiniteGroup, MatError, CLOSURE_CAP,
};

/// Environment variable overriding the closure cap for brute-force stages.
pub const CLOSURE_CAP_ENV: &str = "HOMSPHERE_CLOSURE_CAP";
/// Largest PSL_m(q) whose translation-group conjugacy is checked by enumeration.
pub const LEMMA1_ORDER_CAP: u128 = 100_000;
/// Largest PSL_2(p^2) handled by the fixed-point solver stage.
pub const BOREL_FIELD_CAP: u128 = 32;
pub const MIN_DIM: u32 = 3;
pub const MAX_DIM: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("dimension {0} outside 3..=32")]
    DimensionOutOfRange(u32),
    #[error("unknown filter `{0}`")]
    UnknownFilter(String),
    #[error("{0} does not appear in the report")]
    GroupNotInReport(GroupId),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Borel(#[from] BorelError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl ClassifyError {
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, ClassifyError::Mat(MatError::CapExceeded(_)) | ClassifyError::Borel(BorelError::TooManySolutions(_)))
    }
}

pub fn closure_cap() -> usize {
    std::env::var(CLOSURE_CAP_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(CLOSURE_CAP)
}

/// Circle-action test for one cyclic subgroup H with a 1-dimensional fixed set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleWitness {
    pub solution: usize,
    /// Packed generator of H.
    pub line: u32,
    pub fix_dim: i32,
    pub translation_fix_dim: i32,
    /// `|N_B(H)|`.
    pub normalizer_order: usize,
    pub quotient_order: usize,
    pub quotient_cyclic_or_dihedral: bool,
    /// Every nontrivial normal subgroup of `N_B(H)/H` contains the translations.
    pub normal_subgroups_contain_translations: bool,
}

impl CircleWitness {
    pub fn obstructs(&self) -> bool {
        self.fix_dim > self.translation_fix_dim
            && !self.quotient_cyclic_or_dihedral
            && self.normal_subgroups_contain_translations
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BorelTranscript {
    pub p: u32,
    pub k: u32,
    /// Conjugacy classes of cyclic subgroups, as packed generators.
    pub classes: Vec<Vec<u32>>,
    /// Block values of every solution, blocks in partition order.
    pub solutions: Vec<Vec<i32>>,
    /// One obstruction per solution.
    pub obstructions: Vec<CircleWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub group: GroupId,
    /// The name under which the filter applies; may be an isomorphic alias.
    pub member: GroupId,
    pub n: u32,
    pub filter: FilterId,
    pub parameters: BTreeMap<String, i128>,
    pub inequality: Option<Inequality>,
    /// Subgroup or witness through which the bound applies.
    pub via: Option<String>,
    pub transcript: Option<BorelTranscript>,
    /// `member ⊃ H_1 ⊃ ...` for subgroup-chain exclusions.
    pub chain: Vec<GroupId>,
    pub terminal: Option<Box<Certificate>>,
}

impl Certificate {
    fn from_exclusion(group: &GroupId, member: &GroupId, n: u32, e: Exclusion, via: Option<String>) -> Self {
        Certificate {
            group: group.clone(),
            member: member.clone(),
            n,
            filter: e.filter,
            parameters: e.params,
            inequality: Some(e.inequality),
            via: via.or(e.via.map(|g| g.to_string())),
            transcript: None,
            chain: Vec::new(),
            terminal: None,
        }
    }

    /// The non-chain certificate this one rests on.
    pub fn root(&self) -> &Certificate {
        self.terminal.as_deref().map_or(self, Certificate::root)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateEntry {
    pub group: GroupId,
    pub aliases: Vec<GroupId>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcludedEntry {
    pub group: GroupId,
    pub aliases: Vec<GroupId>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UndecidedEntry {
    pub group: GroupId,
    pub aliases: Vec<GroupId>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateReport {
    pub n: u32,
    pub families: Vec<Family>,
    pub candidates: Vec<CandidateEntry>,
    pub excluded: Vec<ExcludedEntry>,
    pub undecided: Vec<UndecidedEntry>,
    pub config_digest: Option<String>,
}

impl CandidateReport {
    pub fn candidate_ids(&self) -> BTreeSet<GroupId> {
        self.candidates.iter().map(|c| c.group.clone()).collect()
    }

    pub fn excluded_ids(&self) -> BTreeSet<GroupId> {
        self.excluded.iter().map(|c| c.group.clone()).collect()
    }

    pub fn certificate(&self, g: &GroupId) -> Option<&Certificate> {
        let c = normalize_id(g).ok()?;
        self.excluded.iter().find(|e| e.group == c).map(|e| &e.certificate)
    }
}

#[derive(Debug, Clone)]
enum Verdict {
    Excluded(Box<Certificate>),
    Survives,
}

/// Conjugate-cyclic-subgroup data for the translation group of PSL_m(q).
#[derive(Debug, Clone, Copy)]
struct TranslationFacts {
    group_order: usize,
    rank: u32,
    line_classes: usize,
    involution_classes: usize,
}

/// Circle-action data for the cyclic p-subgroups of PSL_2(p^2).
struct BorelFacts {
    lattice: Lattice,
    classes: Vec<Vec<u32>>,
    partition: ClassPartition,
    /// Keyed by lattice index of the line.
    circle: HashMap<usize, (u32, usize, usize, bool, bool)>,
}

static TRANSLATION_CACHE: LazyLock<Mutex<HashMap<GroupId, TranslationFacts>>> = LazyLock::new(Default::default);
static BOREL_CACHE: LazyLock<Mutex<HashMap<u64, Arc<BorelFacts>>>> = LazyLock::new(Default::default);

fn translation_facts(m: u32, q: crate::catalog::PrimePower) -> Result<TranslationFacts, ClassifyError> {
    let key = GroupId::Psl { m, q };
    if let Some(f) = TRANSLATION_CACHE.lock().unwrap().get(&key) {
        return Ok(*f);
    }
    let ctx = FieldCtx::new(q.p, q.k)?;
    let g = projective_special_linear(&ctx, m as usize, closure_cap())?;
    let t = translation_group(&ctx, m as usize)?;
    let classes = conjugacy_classes(&g);
    let mut class_of = vec![0usize; g.order()];
    for (ci, c) in classes.iter().enumerate() {
        for &x in c {
            class_of[x] = ci;
        }
    }
    let in_g: Vec<usize> = t.table.elements().iter().map(|e| g.index_of(e).expect("translations lie in PSL_m")).collect();
    // Lines ⟨x⟩ and ⟨y⟩ are conjugate iff their generators meet the same classes.
    let mut signatures = BTreeSet::new();
    for &x in in_g.iter().filter(|&&x| x != 0) {
        let mut sig = BTreeSet::new();
        let mut y = x;
        while y != 0 {
            sig.insert(class_of[y]);
            y = g.mul(y, x);
        }
        signatures.insert(sig);
    }
    let facts = TranslationFacts {
        group_order: g.order(),
        rank: t.rank,
        line_classes: signatures.len(),
        involution_classes: involution_classes(&g).0,
    };
    TRANSLATION_CACHE.lock().unwrap().insert(key, facts);
    Ok(facts)
}

fn borel_facts(p: u64) -> Result<Arc<BorelFacts>, ClassifyError> {
    let mut cache = BOREL_CACHE.lock().unwrap();
    if let Some(f) = cache.get(&p) {
        return Ok(f.clone());
    }
    let ctx = FieldCtx::new(p, 2)?;
    let data = borel_subgroup(&ctx)?;
    let classes: Vec<Vec<u32>> =
        cyclic_subgroup_classes(&data).into_iter().map(|c| c.into_iter().map(|e| e.0).collect()).collect();
    let lattice = build_lattice(p as u32, 2)?;
    let partition = ClassPartition::from_line_classes(&lattice, &classes)?;
    let g = &data.group;
    let mut circle = HashMap::new();
    for s in data.lines() {
        let h = data.line_subgroup(s);
        let normalizer: Vec<usize> = data
            .borel
            .members
            .iter()
            .copied()
            .filter(|&b| h.iter().all(|&x| h.binary_search(&g.conj(b, x)).is_ok()))
            .collect();
        let table = CayleyTable::from_subgroup(g, &normalizer);
        let pos = |x: usize| normalizer.binary_search(&x).expect("member of the normalizer");
        let h_local: Vec<usize> = h.iter().map(|&x| pos(x)).collect();
        let (quotient, coset) = table.quotient_with_map(&h_local);
        let translations: BTreeSet<usize> = data.unipotent.members.iter().map(|&x| coset[pos(x)]).collect();
        let contain = normal_subgroups(&quotient)
            .iter()
            .filter(|ns| ns.order() > 1)
            .all(|ns| translations.iter().all(|&a| ns.contains(a)));
        let li = lattice.line_of(s.0).expect("nonzero line");
        circle.insert(li, (s.0, normalizer.len(), quotient.order(), is_cyclic_or_dihedral(&quotient), contain));
    }
    let facts = Arc::new(BorelFacts { lattice, classes, partition, circle });
    cache.insert(p, facts.clone());
    Ok(facts)
}

/// `(p, rank)` of an elementary abelian subgroup visible from the family parameters.
pub fn family_rank(g: &GroupId) -> Option<(u64, u32)> {
    match *g {
        GroupId::Alt(m) => Some((2, alternating_rank(m))).filter(|&(_, r)| r >= 1),
        GroupId::Psl { m, q } => Some((q.p, (m - 1) * q.k)),
        GroupId::Psp { two_m, q } => Some((q.p, (two_m / 2 - 1) * q.k)),
        _ => None,
    }
}

fn sl2_via(q: crate::catalog::PrimePower) -> Option<String> {
    Some(format!("SL2({})", q.value()))
}

/// Pipeline state for one dimension and witness file.
pub struct Classifier<'c> {
    n: u32,
    config: Option<&'c WitnessConfig>,
    memo: Mutex<HashMap<GroupId, Verdict>>,
}

const STAGES: usize = 9;
const CHAIN_STAGE: usize = 6;

impl<'c> Classifier<'c> {
    pub fn new(n: u32, config: Option<&'c WitnessConfig>) -> Result<Self, ClassifyError> {
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(ClassifyError::DimensionOutOfRange(n));
        }
        Ok(Classifier { n, config, memo: Mutex::new(HashMap::new()) })
    }

    /// Certificate for `g` if some stage excludes it.
    pub fn certificate_for(&self, g: &GroupId) -> Result<Option<Certificate>, ClassifyError> {
        let c = normalize_id(g)?;
        Ok(match self.evaluate(&c, &mut Vec::new())? {
            Verdict::Excluded(cert) => Some(*cert),
            Verdict::Survives => None,
        })
    }

    fn evaluate(&self, canonical: &GroupId, stack: &mut Vec<GroupId>) -> Result<Verdict, ClassifyError> {
        if let Some(v) = self.memo.lock().unwrap().get(canonical) {
            return Ok(v.clone());
        }
        if stack.contains(canonical) {
            return Ok(Verdict::Survives);
        }
        stack.push(canonical.clone());
        let members = isomorphism_class(canonical)?;
        let mut verdict = Verdict::Survives;
        // Alternating groups of degree 9 and up try the chain through Alt(8) first.
        let chain_first = matches!(canonical, GroupId::Alt(m) if *m >= 9);
        let order = (0..STAGES).filter(|&s| !chain_first || s != CHAIN_STAGE);
        let order: Vec<usize> = chain_first.then_some(CHAIN_STAGE).into_iter().chain(order).collect();
        'stages: for stage in order {
            for member in &members {
                if let Some(cert) = self.stage(stage, canonical, member, stack)? {
                    verdict = Verdict::Excluded(Box::new(cert));
                    break 'stages;
                }
            }
        }
        stack.pop();
        self.memo.lock().unwrap().insert(canonical.clone(), verdict.clone());
        Ok(verdict)
    }

    fn stage(
        &self,
        stage: usize,
        group: &GroupId,
        member: &GroupId,
        stack: &mut Vec<GroupId>,
    ) -> Result<Option<Certificate>, ClassifyError> {
        let n = self.n;
        let cert = |e: Option<Exclusion>, via: Option<String>| {
            e.map(|e| Certificate::from_exclusion(group, member, n, e, via))
        };
        Ok(match (stage, member.clone()) {
            (0, _) => cert(family_rank(member).and_then(|(p, r)| check_rank(p, r, n)), None),
            (1, GroupId::Psl { m: 2, q }) => cert(check_sec31(q.p, q.k, n), None),
            (1, GroupId::Psl { m, q }) => {
                cert(check_sec32(m, q.p, q.k, n), None).or_else(|| cert(check_sec31(q.p, q.k, n), sl2_via(q)))
            }
            (1, GroupId::Psp { two_m, q }) => cert(check_sec33(two_m / 2, q.p, q.k, n), None)
                .or_else(|| cert(check_sec31(q.p, q.k, n), sl2_via(q))),
            (2, GroupId::Alt(m)) => cert(alternating_metacyclic(m, n), None),
            (2, GroupId::Psl { q, .. } | GroupId::Psp { q, .. }) => {
                cert(check_thm3(q.p, n), Some(format!("PSL2({})", q.p)))
            }
            (3, GroupId::Psl { m, q }) if m >= 3 => cert(check_prop1(q.value(), n), sl2_via(q)),
            (3, GroupId::Psp { q, .. }) => cert(check_prop1(q.value(), n), sl2_via(q)),
            (4, GroupId::Psl { m, q }) if m >= 3 && member.order().is_some_and(|o| o <= LEMMA1_ORDER_CAP) => {
                self.lemma1_stage(group, member, m, q)?
            }
            (5, GroupId::Psl { m: 2, q }) if q.k == 2 && q.p != 2 && q.value() <= BOREL_FIELD_CAP => {
                self.borel_stage(group, member, q.p)?
            }
            (CHAIN_STAGE, _) => self.chain_stage(group, member, stack)?,
            (7, _) => self.catalog_stage(group, member),
            (8, GroupId::Psp { two_m, q }) => {
                let h = two_m / 2;
                cert(check_rank(q.p, q.k * h * (h + 1) / 2, n), Some("Siegel unipotent radical".into()))
            }
            _ => None,
        })
    }

    fn lemma1_stage(
        &self,
        group: &GroupId,
        member: &GroupId,
        m: u32,
        q: crate::catalog::PrimePower,
    ) -> Result<Option<Certificate>, ClassifyError> {
        let facts = translation_facts(m, q)?;
        if facts.line_classes != 1 {
            return Ok(None);
        }
        Ok(check_lemma1(q.p, facts.rank, self.n).map(|mut e| {
            e.params.insert("m".into(), m as i128);
            e.params.insert("group_order".into(), facts.group_order as i128);
            e.params.insert("line_classes".into(), facts.line_classes as i128);
            e.params.insert("involution_classes".into(), facts.involution_classes as i128);
            Certificate::from_exclusion(group, member, self.n, e, Some("translation group".into()))
        }))
    }

    fn borel_stage(&self, group: &GroupId, member: &GroupId, p: u64) -> Result<Option<Certificate>, ClassifyError> {
        let facts = borel_facts(p)?;
        let lattice = &facts.lattice;
        let solutions =
            borel_solve_capped(lattice, self.n as i32, &facts.partition, SolverOptions::default(), SOLUTION_CAP)?;
        let full = lattice.full();
        let mut obstructions = Vec::new();
        for (si, sol) in solutions.iter().enumerate() {
            let witness = lattice.of_rank(1).into_iter().find_map(|li| {
                let &(line, normalizer_order, quotient_order, cod, contain) = facts.circle.get(&li)?;
                let w = CircleWitness {
                    solution: si,
                    line,
                    fix_dim: sol.r[li],
                    translation_fix_dim: sol.r[full],
                    normalizer_order,
                    quotient_order,
                    quotient_cyclic_or_dihedral: cod,
                    normal_subgroups_contain_translations: contain,
                };
                (w.fix_dim == 1 && w.obstructs()).then_some(w)
            });
            match witness {
                Some(w) => obstructions.push(w),
                None => return Ok(None),
            }
        }
        let mut parameters = BTreeMap::new();
        parameters.insert("p".into(), p as i128);
        parameters.insert("k".into(), 2);
        parameters.insert("n".into(), self.n as i128);
        parameters.insert("solutions".into(), solutions.len() as i128);
        Ok(Some(Certificate {
            group: group.clone(),
            member: member.clone(),
            n: self.n,
            filter: FilterId::BorelRefutation,
            parameters,
            inequality: None,
            via: Some(format!("({p}^2) Borel subgroup")),
            transcript: Some(BorelTranscript {
                p: p as u32,
                k: 2,
                classes: facts.classes.clone(),
                solutions: solutions.iter().map(|s| s.block_values(&facts.partition)).collect(),
                obstructions,
            }),
            chain: Vec::new(),
            terminal: None,
        }))
    }

    fn subgroups_of(&self, member: &GroupId) -> Vec<GroupId> {
        let mut out = builtin_subgroups(member);
        if let Some(cfg) = self.config {
            out.extend(cfg.witnesses_for(member).filter_map(|e| match &e.witness {
                Witness::Contains { group } => Some(group.clone()),
                _ => None,
            }));
        }
        out
    }

    fn chain_stage(
        &self,
        group: &GroupId,
        member: &GroupId,
        stack: &mut Vec<GroupId>,
    ) -> Result<Option<Certificate>, ClassifyError> {
        for h in self.subgroups_of(member) {
            let hc = normalize_id(&h)?;
            if let Verdict::Excluded(sub) = self.evaluate(&hc, stack)? {
                let (chain, terminal) = if sub.filter == FilterId::SubgroupChain {
                    let mut chain = vec![member.clone()];
                    chain.extend(sub.chain.iter().cloned());
                    (chain, sub.terminal.clone())
                } else {
                    (vec![member.clone(), sub.member.clone()], Some(sub.clone()))
                };
                let mut parameters = BTreeMap::new();
                parameters.insert("n".into(), self.n as i128);
                parameters.insert("length".into(), chain.len() as i128);
                return Ok(Some(Certificate {
                    group: group.clone(),
                    member: member.clone(),
                    n: self.n,
                    filter: FilterId::SubgroupChain,
                    parameters,
                    inequality: None,
                    via: Some(hc.to_string()),
                    transcript: None,
                    chain,
                    terminal,
                }));
            }
        }
        Ok(None)
    }

    fn catalog_stage(&self, group: &GroupId, member: &GroupId) -> Option<Certificate> {
        let cfg = self.config?;
        let n = self.n;
        cfg.witnesses_for(member).find_map(|entry| {
            let e = match entry.witness {
                Witness::ElemAbelian { p, k } => check_rank(p, k, n),
                Witness::ElemAbelianConj { p, k } => check_lemma1(p, k, n),
                Witness::Metacyclic { p, q } => check_prop2(p, q, n),
                Witness::ContainsSl2 { q } => crate::catalog::PrimePower::from_value(q)
                    .and_then(|pp| check_thm3(pp.p, n))
                    .or_else(|| check_prop1(q, n)),
                _ => None,
            }?;
            let mut cert = Certificate::from_exclusion(group, member, n, e, None);
            cert.parameters.insert("inner_filter".into(), cert.filter as i128);
            cert.filter = FilterId::CatalogWitness;
            let provenance = if entry.provenance.is_empty() { String::new() } else { format!(" @ {}", entry.provenance) };
            cert.via = Some(format!("{}{}", entry.witness, provenance));
            Some(cert)
        })
    }
}

fn has_substantive_witness(config: Option<&WitnessConfig>, members: &[GroupId]) -> bool {
    config.is_some_and(|cfg| members.iter().any(|m| cfg.witnesses_for(m).any(|e| e.witness.is_substantive())))
}

/// Runs every family.
pub fn classify(n: u32, config: Option<&WitnessConfig>) -> Result<CandidateReport, ClassifyError> {
    classify_families(n, config, &Family::ALL)
}

pub fn classify_families(
    n: u32,
    config: Option<&WitnessConfig>,
    families: &[Family],
) -> Result<CandidateReport, ClassifyError> {
    let clf = Classifier::new(n, config)?;
    let mut canonical = BTreeSet::new();
    for &f in families {
        for g in family_iter(f, n, config) {
            canonical.insert(normalize_id(&g)?);
        }
    }
    let canonical: Vec<GroupId> = canonical.into_iter().collect();
    let verdicts: Vec<(GroupId, Vec<GroupId>, Verdict)> = canonical
        .par_iter()
        .map(|g| {
            let class = isomorphism_class(g)?;
            let v = clf.evaluate(g, &mut Vec::new())?;
            Ok((g.clone(), class[1..].to_vec(), v))
        })
        .collect::<Result<_, ClassifyError>>()?;
    let mut report = CandidateReport {
        n,
        families: families.to_vec(),
        candidates: Vec::new(),
        excluded: Vec::new(),
        undecided: Vec::new(),
        config_digest: config.map(|c| c.digest.clone()),
    };
    for (group, aliases, verdict) in verdicts {
        let mut members = vec![group.clone()];
        members.extend(aliases.iter().cloned());
        match verdict {
            Verdict::Excluded(certificate) => {
                report.excluded.push(ExcludedEntry { group, aliases, certificate: *certificate })
            }
            Verdict::Survives if members.iter().any(|m| !m.config_only()) => {
                report.candidates.push(CandidateEntry { group, aliases, note: None })
            }
            Verdict::Survives if has_substantive_witness(config, &members) => report.candidates.push(CandidateEntry {
                group,
                aliases,
                note: Some("open: listed witnesses do not exclude it".into()),
            }),
            Verdict::Survives => {
                let reason = match config {
                    None => "no witness config loaded".to_string(),
                    Some(cfg) if members.iter().any(|m| cfg.witnesses_for(m).next().is_some()) => {
                        "witness config has order data only".to_string()
                    }
                    Some(_) => "no witness data".to_string(),
                };
                report.undecided.push(UndecidedEntry { group, aliases, reason })
            }
        }
    }
    Ok(report)
}

/// Re-derives the certificate and compares it field by field.
pub fn verify_certificate(c: &Certificate, config: Option<&WitnessConfig>) -> Result<bool, ClassifyError> {
    let clf = Classifier::new(c.n, config)?;
    Ok(clf.certificate_for(&c.group)?.as_ref() == Some(c))
}

const FILTER_NAMES: [&str; 12] = [
    "Thm4Rank",
    "Thm3",
    "Lemma1",
    "Prop1",
    "Prop2",
    "Sec31",
    "Sec32",
    "Sec33",
    "BorelRefutation",
    "CircleAction",
    "SubgroupChain",
    "CatalogWitness",
];

fn check_filters(v: &serde_json::Value) -> Result<(), ClassifyError> {
    if let Some(obj) = v.as_object() {
        if let Some(f) = obj.get("filter") {
            let name = f.as_str().ok_or_else(|| ClassifyError::Malformed("filter is not a string".into()))?;
            if !FILTER_NAMES.contains(&name) {
                return Err(ClassifyError::UnknownFilter(name.to_string()));
            }
        }
        if let Some(t) = obj.get("terminal") {
            check_filters(t)?;
        }
    }
    Ok(())
}

/// Parses a certificate, rejecting unknown fields and filters.
pub fn parse_certificate(json: &str) -> Result<Certificate, ClassifyError> {
    let value: serde_json::Value = serde_json::from_str(json).map_err(|e| ClassifyError::Malformed(e.to_string()))?;
    check_filters(&value)?;
    serde_json::from_value(value).map_err(|e| ClassifyError::Malformed(e.to_string()))
}

pub fn verify_certificate_json(json: &str, config: Option<&WitnessConfig>) -> Result<bool, ClassifyError> {
    verify_certificate(&parse_certificate(json)?, config)
}

fn filter_label(f: FilterId) -> &'static str {
    match f {
        FilterId::Thm4Rank => "elementary abelian rank bound",
        FilterId::Thm3 => "PSL2(p) minimal dimension",
        FilterId::Lemma1 => "conjugate cyclic subgroups",
        FilterId::Prop1 => "SL2(q) on a homology 5-sphere",
        FilterId::Prop2 => "metacyclic minimal dimension",
        FilterId::Sec31 => "Borel subgroup inequality for PSL2(q)",
        FilterId::Sec32 => "translation group inequality via ASL",
        FilterId::Sec33 => "symplectic translation group inequality via ASL",
        FilterId::BorelRefutation => "Borel formula refutation",
        FilterId::CircleAction => "finite group acting on a circle",
        FilterId::SubgroupChain => "excluded subgroup",
        FilterId::CatalogWitness => "witness file entry",
    }
}

fn render_certificate(c: &Certificate, out: &mut String, indent: &str) {
    if c.filter == FilterId::SubgroupChain {
        let names: Vec<String> = c.chain.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{indent}chain {}", names.join(" > "));
        if let Some(t) = &c.terminal {
            render_certificate(t, out, indent);
        }
        return;
    }
    let _ = write!(out, "{indent}{}: {} [{}]", c.member, filter_label(c.filter), c.filter);
    if let Some(ineq) = &c.inequality {
        let _ = write!(out, ", needs {} but {} > {}", ineq, ineq.lhs, ineq.rhs);
    }
    if let Some(v) = &c.via {
        let _ = write!(out, ", via {v}");
    }
    let params: Vec<String> = c.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
    if !params.is_empty() {
        let _ = write!(out, " ({})", params.join(", "));
    }
    out.push('\n');
    if let Some(t) = &c.transcript {
        let _ = writeln!(out, "{indent}  {} solution(s), block values {:?}", t.solutions.len(), t.solutions);
        for w in &t.obstructions {
            let _ = writeln!(
                out,
                "{indent}  solution {}: line {} fixes a circle, N(H)/H of order {} is not cyclic or dihedral [CircleAction]",
                w.solution, w.line, w.quotient_order
            );
        }
    }
}

/// Human-readable trace of how the report treats `group`.
pub fn explain(report: &CandidateReport, group: &GroupId) -> Result<String, ClassifyError> {
    let g = normalize_id(group)?;
    if let Some(c) = report.candidates.iter().find(|c| c.group == g) {
        return Ok(match &c.note {
            Some(note) => format!("{g}: candidate ({note})\n"),
            None => format!("{g}: candidate\n"),
        });
    }
    if let Some(u) = report.undecided.iter().find(|u| u.group == g) {
        return Ok(format!("{g}: undecided ({})\n", u.reason));
    }
    let e = report.excluded.iter().find(|e| e.group == g).ok_or(ClassifyError::GroupNotInReport(g.clone()))?;
    let mut out = format!("{g}: excluded at n = {}\n", report.n);
    render_certificate(&e.certificate, &mut out, "  ");
    Ok(out)
}

fn names(entries: impl Iterator<Item = (GroupId, Vec<GroupId>)>) -> Vec<String> {
    entries
        .map(|(g, a)| {
            if a.is_empty() {
                g.to_string()
            } else {
                let a: Vec<String> = a.iter().map(ToString::to_string).collect();
                format!("{g} (= {})", a.join(", "))
            }
        })
        .collect()
}

pub fn render_markdown(report: &CandidateReport) -> String {
    let mut out = format!("# Simple groups on homology {}-spheres\n\n## Candidates\n\n", report.n);
    let cands = names(report.candidates.iter().map(|c| (c.group.clone(), c.aliases.clone())));
    for (c, name) in report.candidates.iter().zip(cands) {
        match &c.note {
            Some(note) => {
                let _ = writeln!(out, "- {name}: {note}");
            }
            None => {
                let _ = writeln!(out, "- {name}");
            }
        }
    }
    out.push_str("\n## Excluded\n\n| group | filter | detail |\n|---|---|---|\n");
    for e in &report.excluded {
        let c = &e.certificate;
        let detail = match (c.filter, &c.inequality) {
            (FilterId::SubgroupChain, _) => {
                let chain: Vec<String> = c.chain.iter().map(ToString::to_string).collect();
                format!("{} then {}", chain.join(" > "), c.root().filter)
            }
            (_, Some(i)) => format!("needs {i}"),
            (_, None) => c.transcript.as_ref().map_or(String::new(), |t| format!("{} solution(s) obstructed", t.solutions.len())),
        };
        let _ = writeln!(out, "| {} | {} | {} |", e.group, c.filter, detail);
    }
    out.push_str("\n## Undecided\n\n");
    if report.undecided.is_empty() {
        out.push_str("none\n");
    }
    for u in &report.undecided {
        let _ = writeln!(out, "- {}: {}", u.group, u.reason);
    }
    if let Some(d) = &report.config_digest {
        let _ = write!(out, "\nwitness config sha256 `{d}`\n");
    }
    out
}
