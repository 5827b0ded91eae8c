use std::collections::BTreeSet;

use proptest::prelude::*;

use homsphere::borelsolve::{
    borel_solve, build_lattice, validate_assignment, ClassPartition, SolverOptions,
};
use homsphere::catalog::{default_config, family_iter, normalize_id, Family, GroupId, Sporadic};
use homsphere::classify::{classify, parse_certificate, verify_certificate};
use homsphere::dimbounds::{
    check_prop2, check_rank, check_sec31, check_sec32, check_thm3, closed_form_outcome, min_dim_elem_abelian,
    min_dim_from_lemma2, min_dim_metacyclic, FilterOutcome,
};
use homsphere::gfield::{is_prime, FieldCtx, FieldElem};
use homsphere::matgroup::{alternating_group, projective_special_linear, FiniteGroup};

const PRIME_POWERS: [u64; 20] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 49, 64];
const CAP: usize = 1 << 22;

fn field_and_elems() -> impl Strategy<Value = (u64, u32, u32, u32)> {
    prop::sample::select(&PRIME_POWERS[..]).prop_flat_map(|q| (Just(q), 0..q as u32, 0..q as u32, 0..q as u32))
}

fn group_id() -> impl Strategy<Value = GroupId> {
    let q = prop::sample::select(&PRIME_POWERS[..]);
    prop_oneof![
        (5u32..40).prop_map(GroupId::Alt),
        q.clone().prop_map(|q| GroupId::psl(2, q as u128)),
        (3u32..7, q.clone()).prop_map(|(m, q)| GroupId::psl(m, q as u128)),
        (2u32..5, q.clone()).prop_map(|(h, q)| GroupId::psp(2 * h, q as u128)),
        prop::sample::select(Sporadic::ALL).prop_map(GroupId::Sporadic),
    ]
    .prop_filter("simple", |g| g.check_simple().is_ok())
}

fn is_fail(o: &FilterOutcome) -> bool {
    matches!(o, FilterOutcome::Fail(_))
}

proptest! {
    #[test]
    fn field_axioms((q, a, b, c) in field_and_elems()) {
        let f = FieldCtx::of_order(q).unwrap();
        let (a, b, c) = (FieldElem(a), FieldElem(b), FieldElem(c));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), FieldElem(0));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.from_int(1));
        }
        let p = f.p();
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
        prop_assert_eq!(f.pow(a, q), a);
    }

    #[test]
    fn group_id_display_round_trips(g in group_id()) {
        let back: GroupId = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn normalize_is_idempotent_and_order_preserving(g in group_id()) {
        let c = normalize_id(&g).unwrap();
        prop_assert_eq!(normalize_id(&c).unwrap(), c.clone());
        if let (Some(a), Some(b)) = (g.order(), c.order()) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn closed_form_exclusions_persist_downward(g in group_id(), n in 3u32..31) {
        if is_fail(&closed_form_outcome(&g, n + 1)) {
            prop_assert!(is_fail(&closed_form_outcome(&g, n)), "{} fails at {} but not {}", g, n + 1, n);
        }
    }

    #[test]
    fn individual_filters_persist_downward(
        p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
        k in 1u32..5,
        m in 3u32..6,
        n in 3u32..31,
    ) {
        let pairs = [
            (check_rank(p, k, n + 1), check_rank(p, k, n)),
            (check_sec31(p, k, n + 1), check_sec31(p, k, n)),
            (check_sec32(m, p, k, n + 1), check_sec32(m, p, k, n)),
            (check_thm3(p, n + 1), check_thm3(p, n)),
        ];
        for (hi, lo) in pairs {
            prop_assert!(hi.is_none() || lo.is_some());
        }
    }

    #[test]
    fn metacyclic_search_matches_closed_form(p in prop::sample::select((5u64..600).filter(|&p| is_prime(p)).collect::<Vec<_>>())) {
        for q in (2..p).filter(|q| (p - 1) % q == 0) {
            let closed = min_dim_metacyclic(p, q).unwrap();
            prop_assert_eq!(min_dim_from_lemma2(p, q).unwrap(), closed);
            prop_assert_eq!(check_prop2(p, q, closed as u32).is_none(), true);
            if closed > 3 {
                prop_assert!(check_prop2(p, q, closed as u32 - 1).is_some());
            }
        }
    }

    #[test]
    fn rank_bound_monotone_in_rank(p in prop::sample::select(vec![2u64, 3, 5, 7]), k in 1u32..8) {
        prop_assert!(min_dim_elem_abelian(p, k) < min_dim_elem_abelian(p, k + 1));
    }

    #[test]
    fn family_iteration_grows_with_n(
        family in prop::sample::select(Family::ALL.to_vec()),
        n in 3u32..20,
    ) {
        let cfg = default_config();
        let small: BTreeSet<GroupId> = family_iter(family, n, Some(&cfg)).into_iter().collect();
        let large: BTreeSet<GroupId> = family_iter(family, n + 1, Some(&cfg)).into_iter().collect();
        prop_assert!(small.is_subset(&large));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_output_validates_and_tied_solutions_are_free_solutions(
        (p, k) in prop::sample::select(vec![(2u32, 2usize), (2, 3), (3, 2), (5, 2), (3, 3)]),
        n in 1i32..9,
    ) {
        let lattice = build_lattice(p, k).unwrap();
        let opts = SolverOptions::default();
        let free = ClassPartition::trivial(&lattice);
        let tied = ClassPartition::rank_blocks(&lattice);
        let free_sols: BTreeSet<_> = borel_solve(&lattice, n, &free, opts).unwrap().into_iter().collect();
        for s in &free_sols {
            prop_assert!(validate_assignment(&lattice, &free, opts, s).is_ok());
        }
        for s in borel_solve(&lattice, n, &tied, opts).unwrap() {
            prop_assert!(validate_assignment(&lattice, &tied, opts, &s).is_ok());
            prop_assert!(free_sols.contains(&s));
        }
    }
}

#[test]
fn psl_orders_match_enumeration() {
    for q in PRIME_POWERS.iter().copied().filter(|&q| q <= 32) {
        let ctx = FieldCtx::of_order(q).unwrap();
        let g = projective_special_linear(&ctx, 2, CAP).unwrap();
        assert_eq!(Some(g.order() as u128), GroupId::psl(2, q as u128).order(), "PSL(2,{q})");
    }
    for q in [2u64, 3, 4] {
        let ctx = FieldCtx::of_order(q).unwrap();
        let g = projective_special_linear(&ctx, 3, CAP).unwrap();
        assert_eq!(Some(g.order() as u128), GroupId::psl(3, q as u128).order(), "PSL(3,{q})");
    }
}

#[test]
fn alternating_orders_match_enumeration() {
    for m in 5..=8u32 {
        let g = alternating_group(m as usize, CAP).unwrap();
        assert_eq!(Some(g.order() as u128), GroupId::Alt(m).order(), "Alt({m})");
    }
}

#[test]
fn candidate_sets_grow_with_n() {
    let cfg = default_config();
    let mut prev: Option<BTreeSet<GroupId>> = None;
    for n in 3..=10 {
        let report = classify(n, Some(&cfg)).unwrap();
        let cands = report.candidate_ids();
        if let Some(p) = &prev {
            assert!(p.is_subset(&cands), "n={n} lost {:?}", p.difference(&cands).collect::<Vec<_>>());
        }
        prev = Some(cands);
    }
}

#[test]
fn every_certificate_replays_after_serialization() {
    let cfg = default_config();
    for n in [4, 5, 7] {
        let report = classify(n, Some(&cfg)).unwrap();
        for e in &report.excluded {
            let json = serde_json::to_string(&e.certificate).unwrap();
            let parsed = parse_certificate(&json).unwrap();
            assert_eq!(parsed, e.certificate);
            assert_eq!(verify_certificate(&parsed, Some(&cfg)), Ok(true), "{} at n={n}", e.group);
        }
    }
}
