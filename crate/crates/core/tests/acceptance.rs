//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints its own line whether it passes or not.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use homsphere::borelsolve::{
    borel_solve, build_lattice, decode, linear_model_check_in, min_feasible_dim, ClassPartition, SolverOptions,
};
use homsphere::catalog::{default_config, GroupId};
use homsphere::classify::{classify, parse_certificate, verify_certificate, Certificate, CandidateReport};
use homsphere::dimbounds::{min_dim_from_lemma2, min_dim_metacyclic, min_dim_psl2, FilterId};
use homsphere::gfield::{is_prime, FieldCtx};
use homsphere::matgroup::{
    asl_conjugation_sweep, borel_subgroup, cyclic_subgroup_classes, cyclic_subgroup_conjugacy, embeds_in_o3xo2,
    find_quaternion_subgroup, involution_classes, is_cyclic_or_dihedral, omega_conjugation_sweep,
    order_p_class_structure, preserves_symplectic_form, projective_special_linear, small, special_linear,
    symplectic_embed, translation_group, FiniteGroup,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(s: &str) -> GroupId {
    s.parse().unwrap()
}

const CAP: usize = 1 << 22;

fn excluded_cert<'a>(report: &'a CandidateReport, name: &str) -> Result<&'a Certificate, String> {
    report.certificate(&g(name)).ok_or_else(|| format!("{name} is not excluded"))
}

fn replays(cert: &Certificate) -> Result<(), String> {
    let cfg = default_config();
    let json = serde_json::to_string(cert).map_err(|e| e.to_string())?;
    let parsed = parse_certificate(&json).map_err(|e| e.to_string())?;
    ensure(verify_certificate(&parsed, Some(&cfg)) == Ok(true), || format!("{} does not replay", cert.group))
}

fn criterion_1() -> Check {
    let cfg = default_config();
    let report = classify(5, Some(&cfg)).map_err(|e| e.to_string())?;
    let got = report.candidate_ids();
    let want: BTreeSet<GroupId> =
        ["Alt(5)", "Alt(6)", "Alt(7)", "PSL(2,7)", "PSU(4,2)", "PSU(3,3)"].into_iter().map(g).collect();
    ensure(got == want, || format!("candidates {got:?}"))?;
    let psu33 = report.candidates.iter().find(|c| c.group == g("PSU(3,3)")).unwrap();
    ensure(psu33.note.as_deref().is_some_and(|n| n.starts_with("open")), || "PSU(3,3) not flagged open".into())?;
    Ok(format!("{} candidates, PSU(3,3) open", got.len()))
}

fn criterion_2() -> Check {
    let cfg = default_config();
    let report = classify(5, Some(&cfg)).map_err(|e| e.to_string())?;

    let c = excluded_cert(&report, "PSL(2,25)")?;
    ensure(c.filter == FilterId::BorelRefutation, || format!("PSL(2,25) by {}", c.filter))?;
    let t = c.transcript.as_ref().ok_or("PSL(2,25) has no transcript")?;
    ensure(!t.solutions.is_empty() && t.obstructions.len() == t.solutions.len(), || "circle obstructions missing".into())?;
    for w in &t.obstructions {
        ensure(w.fix_dim == 1 && w.quotient_order == 20 && w.obstructs(), || format!("weak circle witness {w:?}"))?;
    }
    replays(c)?;

    let c = excluded_cert(&report, "PSL(3,4)")?;
    ensure(c.filter == FilterId::Lemma1, || format!("PSL(3,4) by {}", c.filter))?;
    ensure(c.parameters.get("involution_classes") == Some(&1), || "involution class count".into())?;
    ensure(c.parameters.get("group_order") == Some(&20160), || "group order".into())?;
    replays(c)?;

    let start = Instant::now();
    let ctx = FieldCtx::new(2, 2).unwrap();
    let psl34 = projective_special_linear(&ctx, 3, CAP).map_err(|e| e.to_string())?;
    let (classes, _) = involution_classes(&psl34);
    let brute = start.elapsed();
    ensure(psl34.order() == 20160 && classes == 1, || format!("|PSL(3,4)| = {}, {classes} classes", psl34.order()))?;
    ensure(brute < Duration::from_secs(60), || format!("PSL(3,4) brute force took {brute:?}"))?;

    let c = excluded_cert(&report, "Alt(8)")?;
    ensure(c.member == g("PSL(4,2)") || c.group == g("PSL(4,2)"), || "Alt(8) not identified with PSL(4,2)".into())?;
    replays(c)?;
    let alts: Vec<&Certificate> =
        report.excluded.iter().filter(|e| matches!(e.group, GroupId::Alt(m) if m >= 9)).map(|e| &e.certificate).collect();
    ensure(!alts.is_empty(), || "no large alternating groups in the report".into())?;
    for c in &alts {
        ensure(c.filter == FilterId::SubgroupChain && c.chain.get(1) == Some(&g("PSL(4,2)")), || {
            format!("{} excluded by {} via {:?}", c.group, c.filter, c.chain)
        })?;
        replays(c)?;
    }

    for name in ["PSp(4,5)", "PSp(4,4)", "PSp(6,2)"] {
        let c = excluded_cert(&report, name)?;
        ensure(c.filter == FilterId::SubgroupChain && c.terminal.is_some(), || format!("{name} by {}", c.filter))?;
        replays(c)?;
    }
    Ok(format!("named certificates replay, {} alternating chains, PSL(3,4) brute force {brute:.2?}", alts.len()))
}

fn criterion_3() -> Check {
    let mut cases = 0;
    for p in [2u32, 3, 5, 7] {
        for k in 1..=3usize {
            let lattice = build_lattice(p, k).map_err(|e| e.to_string())?;
            let got = min_feasible_dim(&lattice, &ClassPartition::trivial(&lattice), SolverOptions::default())
                .map_err(|e| e.to_string())?;
            let want = if p == 2 { k as i32 } else { 2 * k as i32 - 1 };
            ensure(got == Some(want), || format!("(Z_{p})^{k}: solver {got:?}, closed form {want}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (p, k) pairs agree"))
}

fn criterion_4() -> Check {
    let mut cases = 0;
    for p in (5..=97u64).filter(|&p| is_prime(p)) {
        for q in (2..p).filter(|q| (p - 1) % q == 0) {
            let derived = min_dim_from_lemma2(p, q).map_err(|e| e.to_string())?;
            let closed = min_dim_metacyclic(p, q).map_err(|e| e.to_string())?;
            ensure(derived == closed, || format!("Z_{p} x| Z_{q}: search {derived}, closed form {closed}"))?;
            if q == (p - 1) / 2 {
                let psl = min_dim_psl2(p).map_err(|e| e.to_string())?;
                ensure(derived == psl, || format!("PSL2({p}): search {derived}, closed form {psl}"))?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} (p, q) pairs agree"))
}

/// Multisets of `size` vectors from `0..count`, as nondecreasing index tuples.
fn multisets(count: u32, size: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; size];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..size).rev().find(|&i| cur[i] + 1 < count) else { break };
        let v = cur[i] + 1;
        cur[i..].iter_mut().for_each(|x| *x = v);
    }
    out
}

fn criterion_5() -> Check {
    let mut checked = 0usize;
    for p in [2u32, 3, 5] {
        for k in 1..=3usize {
            let lattice = build_lattice(p, k).map_err(|e| e.to_string())?;
            let vectors: Vec<Vec<u32>> = (0..p.pow(k as u32)).map(|v| decode(p, k, v)).collect();
            for cols in k..=4 {
                let results: Vec<Option<bool>> = multisets(vectors.len() as u32, cols)
                    .into_par_iter()
                    .map(|idx| {
                        let chars: Vec<Vec<u32>> = idx.iter().map(|&i| vectors[i as usize].clone()).collect();
                        linear_model_check_in(&lattice, &chars).ok()
                    })
                    .collect();
                if let Some(i) = results.iter().position(|r| *r == Some(false)) {
                    return Err(format!("p={p} k={k}: model {i} with {cols} columns violates the identity"));
                }
                checked += results.iter().filter(|r| r.is_some()).count();
            }
        }
    }
    Ok(format!("{checked} faithful character matrices, zero failures"))
}

fn criterion_6() -> Check {
    let ctx = FieldCtx::new(5, 2).unwrap();
    let data = borel_subgroup(&ctx).map_err(|e| e.to_string())?;
    let classes: Vec<Vec<u32>> =
        cyclic_subgroup_classes(&data).into_iter().map(|c| c.into_iter().map(|e| e.0).collect()).collect();
    ensure(classes.len() == 2 && classes.iter().all(|c| c.len() == 3), || format!("class sizes {classes:?}"))?;
    let lattice = build_lattice(5, 2).map_err(|e| e.to_string())?;
    let partition = ClassPartition::from_line_classes(&lattice, &classes).map_err(|e| e.to_string())?;
    let sols = borel_solve(&lattice, 5, &partition, SolverOptions::default()).map_err(|e| e.to_string())?;
    ensure(sols.len() == 2, || format!("{} solutions", sols.len()))?;
    let line_values: Vec<Vec<i32>> = sols
        .iter()
        .map(|s| classes.iter().map(|c| s.r[lattice.line_of(c[0]).unwrap()]).collect())
        .collect();
    for (s, v) in sols.iter().zip(&line_values) {
        for c in &classes {
            let vals: BTreeSet<i32> = c.iter().map(|&x| s.r[lattice.line_of(x).unwrap()]).collect();
            ensure(vals.len() == 1, || "a class is split".into())?;
        }
        ensure(v.iter().copied().collect::<BTreeSet<_>>() == BTreeSet::from([-1, 1]), || format!("line values {v:?}"))?;
    }
    let swapped: Vec<i32> = line_values[1].iter().rev().copied().collect();
    ensure(line_values[0] == swapped, || format!("solutions {line_values:?} are not block swaps"))?;
    Ok(format!("line blocks {line_values:?}"))
}

fn prime_powers_upto(n: u64) -> Vec<u64> {
    (2..=n)
        .filter(|&q| {
            let p = (2..=q).find(|d| q % d == 0).unwrap();
            let mut r = q;
            while r % p == 0 {
                r /= p;
            }
            r == 1
        })
        .collect()
}

fn criterion_7() -> Check {
    let mut checked = 0;
    for q in prime_powers_upto(27) {
        let ctx = FieldCtx::of_order(q).unwrap();
        let r = omega_conjugation_sweep(&ctx);
        ensure(r.passed(), || format!("omega conjugation fails for q={q}: {r:?}"))?;
        checked += r.checked;
    }
    for (m, q) in [(3usize, 2u64), (3, 3), (3, 4), (4, 2)] {
        let ctx = FieldCtx::of_order(q).unwrap();
        let t = translation_group(&ctx, m).map_err(|e| e.to_string())?;
        ensure(t.additivity.passed() && t.elementary_abelian, || format!("M(v) additivity fails for m={m} q={q}"))?;
        let a = asl_conjugation_sweep(&ctx, m).map_err(|e| e.to_string())?;
        ensure(a.passed(), || format!("ASL conjugation fails for m={m} q={q}"))?;
        checked += t.additivity.checked + a.checked;
    }
    for q in [3u64, 5] {
        let ctx = FieldCtx::of_order(q).unwrap();
        let sl = special_linear(&ctx, 2, CAP).map_err(|e| e.to_string())?;
        for a in sl.elements() {
            let e = symplectic_embed(a).map_err(|e| e.to_string())?;
            ensure(preserves_symplectic_form(&e), || format!("symplectic form not preserved over q={q}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} identities, zero counterexamples"))
}

fn criterion_8() -> Check {
    let ctx = FieldCtx::new(7, 1).unwrap();
    let psl27 = projective_special_linear(&ctx, 2, CAP).map_err(|e| e.to_string())?;
    let inv = involution_classes(&psl27);
    ensure(psl27.order() == 168 && inv == (1, 21), || format!("|PSL(2,7)| = {}, involutions {inv:?}", psl27.order()))?;

    for q in [5u64, 7, 9, 13] {
        let ctx = FieldCtx::of_order(q).unwrap();
        let data = borel_subgroup(&ctx).map_err(|e| e.to_string())?;
        let s = order_p_class_structure(&data);
        ensure(s == vec![((q as usize - 1) / 2, 2)], || format!("q={q}: order-p classes {s:?}"))?;
    }
    for (q, want) in [(25u64, 2usize), (27, 1)] {
        let ctx = FieldCtx::of_order(q).unwrap();
        let data = borel_subgroup(&ctx).map_err(|e| e.to_string())?;
        let got = cyclic_subgroup_conjugacy(&data);
        ensure(got == want, || format!("q={q}: {got} classes of cyclic subgroups"))?;
    }
    for q in [5u64, 9] {
        let ctx = FieldCtx::of_order(q).unwrap();
        let sl = special_linear(&ctx, 2, CAP).map_err(|e| e.to_string())?;
        let h = find_quaternion_subgroup(&sl).map_err(|e| e.to_string())?;
        ensure(h.is_some_and(|h| h.order() == 8), || format!("no Q8 in SL2({q})"))?;
    }
    ensure(embeds_in_o3xo2(&small::quaternion()) == Ok(false), || "Q8 embeds in O(3) x O(2)".into())?;
    ensure(!is_cyclic_or_dihedral(&small::frobenius_20()), || "F20 reported cyclic or dihedral".into())?;
    Ok("all structure facts match".into())
}

fn criterion_9() -> Check {
    let cfg = default_config();
    let mut sizes = Vec::new();
    for (n, cited) in [(3u32, vec!["Alt(5)"]), (4, vec!["Alt(5)", "Alt(6)"])] {
        let report = classify(n, Some(&cfg)).map_err(|e| e.to_string())?;
        let got = report.candidate_ids();
        for c in &cited {
            ensure(got.contains(&g(c)), || format!("n={n}: {c} missing from {got:?}"))?;
        }
        let a7 = excluded_cert(&report, "Alt(7)")?;
        ensure(
            a7.filter == FilterId::Prop2 && a7.inequality.as_ref().is_some_and(|i| i.lhs == 5),
            || format!("n={n}: Alt(7) by {} {:?}", a7.filter, a7.inequality),
        )?;
        replays(a7)?;
        sizes.push(format!("n={n}: {} candidates", got.len()));
    }
    Ok(sizes.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 n=5 candidate set", criterion_1, Some(Duration::from_secs(120))),
        ("2 named exclusions at n=5", criterion_2, None),
        ("3 rank bound via solver", criterion_3, Some(Duration::from_secs(30))),
        ("4 metacyclic search vs closed forms", criterion_4, Some(Duration::from_secs(1))),
        ("5 linear model oracle", criterion_5, None),
        ("6 PSL(2,25) solver uniqueness", criterion_6, None),
        ("7 matrix identity sweeps", criterion_7, Some(Duration::from_secs(60))),
        ("8 structure facts", criterion_8, None),
        ("9 soundness at n=3,4", criterion_9, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed >= l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {name}: PASS ({msg}) [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({msg}) [{elapsed:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
