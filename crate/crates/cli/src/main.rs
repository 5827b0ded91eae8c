use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use homsphere::borelsolve::{build_lattice, borel_solve_capped, BorelError, ClassPartition, SolverOptions, SOLUTION_CAP};
use homsphere::catalog::{default_config, isomorphism_class, load_witness_config, Family, GroupId, WitnessConfig};
use homsphere::classify::{
    classify_families, closure_cap, explain, family_rank, parse_certificate, render_markdown, verify_certificate,
    ClassifyError,
};
use homsphere::dimbounds::{
    closed_form_outcome, min_dim_elem_abelian, min_dim_metacyclic, min_dim_psl2,
    sl2_dim5_admissible, sl2_dim_interval, FilterOutcome,
};
use homsphere::gfield::{is_prime, FieldCtx};
use homsphere::matgroup::{
    asl_conjugation_sweep, borel_subgroup, cyclic_subgroup_classes, embeds_in_o3xo2, find_quaternion_subgroup,
    involution_classes, omega_conjugation_sweep, order_p_class_structure, preserves_symplectic_form,
    projective_special_linear, special_linear, symplectic_embed, translation_group, CayleyTable, FiniteGroup,
    MatError,
};

const SCHEMA_VERSION: u32 = 1;

const EXIT_USAGE: u8 = 1;
const EXIT_CAP: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "homsphere", version, about = "Dimension obstructions for simple groups acting on homology spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the simple groups that may act on a homology n-sphere.
    Classify {
        #[arg(short = 'n')]
        n: u32,
        /// Comma-separated families: alt, psl2, pslm, psp, psu, sporadic, other-lie.
        #[arg(long, value_delimiter = ',')]
        families: Option<Vec<String>>,
        /// Witness file; defaults to the shipped one.
        #[arg(long, conflicts_with = "no_config")]
        config: Option<PathBuf>,
        /// Run without any witness file.
        #[arg(long)]
        no_config: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Print the exclusion trace of one group instead of the report.
        #[arg(long)]
        explain: Option<String>,
        /// Write every certificate to this directory.
        #[arg(long)]
        emit_certificates: Option<PathBuf>,
        /// Add wall-clock timing to the envelope.
        #[arg(long)]
        timing: bool,
    },
    /// Closed-form bounds for one group.
    Bounds {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Enumerate fixed-point dimension assignments for (Z_p)^k.
    Borel {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: usize,
        #[arg(short = 'n')]
        n: i32,
        /// trivial, rank-blocks, auto:psl2(q), or explicit:v,v,.../v,... (packed generators).
        #[arg(long, default_value = "trivial")]
        classes: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run a brute-force verification.
    Facts {
        #[arg(long)]
        check: FactCheck,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Replay a certificate.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long, conflicts_with = "no_config")]
        config: Option<PathBuf>,
        #[arg(long)]
        no_config: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FactCheck {
    OmegaConjugation,
    TranslationAdditivity,
    AslConjugation,
    SymplecticForm,
    InvolutionClasses,
    BorelClassStructure,
    Q8Search,
    #[value(name = "q8-o3xo2")]
    Q8O3xo2,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    params: Value,
    payload: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Value>,
}

fn emit<T: Serialize>(command: &str, params: Value, payload: T, timing: Option<Value>) -> Result<()> {
    let env = Envelope { schema_version: SCHEMA_VERSION, command, params, payload, timing };
    out(&format!("{}\n", serde_json::to_string_pretty(&env)?))
}

/// Writes to stdout; a closed pipe ends output quietly.
fn out(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(Exit(code, _)) = err.downcast_ref::<Exit>() {
        return *code;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ClassifyError>() {
            if e.is_cap_exceeded() {
                return EXIT_CAP;
            }
        }
        if let Some(MatError::CapExceeded(_)) = cause.downcast_ref::<MatError>() {
            return EXIT_CAP;
        }
        if let Some(BorelError::TooManySolutions(_)) = cause.downcast_ref::<BorelError>() {
            return EXIT_CAP;
        }
    }
    EXIT_USAGE
}

fn load_config(path: Option<&Path>, none: bool) -> Result<Option<WitnessConfig>> {
    Ok(match (path, none) {
        (_, true) => None,
        (Some(p), _) => Some(load_witness_config(p)?),
        (None, _) => Some(default_config()),
    })
}

fn file_stem(g: &GroupId) -> String {
    g.to_string().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

#[allow(clippy::too_many_arguments)]
fn run_classify(
    n: u32,
    families: Option<Vec<String>>,
    config: Option<PathBuf>,
    no_config: bool,
    format: Format,
    explain_group: Option<String>,
    emit_dir: Option<PathBuf>,
    timing: bool,
) -> Result<()> {
    let cfg = load_config(config.as_deref(), no_config)?;
    let mut fams: Vec<Family> = match &families {
        Some(list) => list.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
        None => Family::ALL.to_vec(),
    };
    fams.sort();
    fams.dedup();
    let start = Instant::now();
    let report = classify_families(n, cfg.as_ref(), &fams)?;
    let elapsed = start.elapsed();
    if let Some(dir) = emit_dir {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for e in &report.excluded {
            let path = dir.join(format!("{}.json", file_stem(&e.group)));
            std::fs::write(&path, serde_json::to_string_pretty(&e.certificate)?)?;
        }
    }
    if let Some(g) = explain_group {
        return out(&explain(&report, &g.parse()?)?);
    }
    match format {
        Format::Md => out(&render_markdown(&report))?,
        Format::Json => {
            let params = json!({
                "n": n,
                "families": fams,
                "config": config.map(|p| p.display().to_string()),
                "no_config": no_config,
            });
            let timing = timing.then(|| json!({ "elapsed_ms": elapsed.as_secs_f64() * 1e3 }));
            emit("classify", params, &report, timing)?;
        }
    }
    Ok(())
}

fn run_bounds(spec: &str, format: Format) -> Result<()> {
    let g: GroupId = spec.parse()?;
    let class = isomorphism_class(&g)?;
    let mut fields = BTreeMap::<String, Value>::new();
    fields.insert("group".into(), json!(class[0]));
    fields.insert("aliases".into(), json!(class[1..]));
    fields.insert("order".into(), json!(class.iter().find_map(|m| m.order()).map(|o| o.to_string())));
    let mut per_member = Vec::new();
    for m in &class {
        let mut b = BTreeMap::<String, Value>::new();
        b.insert("name".into(), json!(m));
        if let Some((p, r)) = family_rank(m) {
            b.insert("elementary_abelian".into(), json!({"p": p, "rank": r, "min_dim": min_dim_elem_abelian(p, r)}));
        }
        match *m {
            GroupId::Psl { q, .. } | GroupId::Psp { q, .. } => {
                if let Ok(v) = min_dim_psl2(q.p) {
                    let (lo, hi) = sl2_dim_interval(q.p)?;
                    b.insert("psl2_p_min_dim".into(), json!(v));
                    b.insert("sl2_p_interval".into(), json!([lo, hi]));
                }
                if !matches!(m, GroupId::Psl { m: 2, .. }) {
                    b.insert("sl2_q_on_5_sphere".into(), json!(sl2_dim5_admissible(q.value())));
                }
            }
            GroupId::Alt(deg) => {
                let witnesses: Vec<Value> = (5..=deg as u64)
                    .filter(|&p| is_prime(p))
                    .map(|p| json!({"p": p, "q": (p - 1) / 2, "min_dim": min_dim_metacyclic(p, (p - 1) / 2).ok()}))
                    .collect();
                b.insert("metacyclic".into(), json!(witnesses));
            }
            _ => {}
        }
        let first_pass = (1..=32u32).find(|&n| !matches!(closed_form_outcome(m, n), FilterOutcome::Fail(_)));
        b.insert("closed_form_min_dim".into(), json!(first_pass));
        per_member.push(Value::Object(b.into_iter().collect()));
    }
    fields.insert("members".into(), Value::Array(per_member));
    match format {
        Format::Json => emit("bounds", json!({ "group": spec }), fields, None),
        Format::Md => {
            let body = serde_json::to_string_pretty(&fields)?;
            out(&format!("# Bounds for {}\n\n```json\n{body}\n```\n", class[0]))
        }
    }
}

fn parse_partition(spec: &str, p: u32, k: usize, lattice: &homsphere::borelsolve::Lattice) -> Result<ClassPartition> {
    if spec == "trivial" {
        return Ok(ClassPartition::trivial(lattice));
    }
    if spec == "rank-blocks" {
        return Ok(ClassPartition::rank_blocks(lattice));
    }
    if let Some(q) = spec.strip_prefix("auto:psl2(").and_then(|r| r.strip_suffix(')')) {
        let q: u64 = q.parse().context("auto:psl2(q) needs an integer q")?;
        if (p as u64).checked_pow(k as u32) != Some(q) {
            bail!("auto:psl2({q}) needs q = p^k = {p}^{k}");
        }
        let ctx = FieldCtx::of_order(q)?;
        let data = borel_subgroup(&ctx)?;
        let classes: Vec<Vec<u32>> =
            cyclic_subgroup_classes(&data).into_iter().map(|c| c.into_iter().map(|e| e.0).collect()).collect();
        return Ok(ClassPartition::from_line_classes(lattice, &classes)?);
    }
    if let Some(body) = spec.strip_prefix("explicit:") {
        let classes: Vec<Vec<u32>> = body
            .split('/')
            .map(|b| b.split(',').map(|v| v.trim().parse::<u32>()).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()
            .context("explicit classes are packed vectors: 1,2/3,4")?;
        return Ok(ClassPartition::from_line_classes(lattice, &classes)?);
    }
    Err(anyhow!("unknown --classes value `{spec}`"))
}

fn run_borel(p: u32, k: usize, n: i32, classes: &str, format: Format) -> Result<()> {
    let lattice = build_lattice(p, k)?;
    let partition = parse_partition(classes, p, k, &lattice)?;
    let sols = borel_solve_capped(&lattice, n, &partition, SolverOptions::default(), SOLUTION_CAP)?;
    let block_values: Vec<Vec<i32>> = sols.iter().map(|s| s.block_values(&partition)).collect();
    let subgroups: Vec<Value> = lattice
        .subgroups
        .iter()
        .map(|s| json!({ "rank": s.rank, "basis": s.basis }))
        .collect();
    match format {
        Format::Json => emit(
            "borel",
            json!({ "p": p, "k": k, "n": n, "classes": classes }),
            json!({
                "subgroups": subgroups,
                "blocks": partition.blocks,
                "count": sols.len(),
                "solutions": sols,
                "block_values": block_values,
            }),
            None,
        ),
        Format::Md => {
            let mut text = format!("# Borel assignments for (Z_{p})^{k} on a {n}-sphere\n\n{} solution(s)\n\n", sols.len());
            for (i, (s, b)) in sols.iter().zip(&block_values).enumerate() {
                text += &format!("- solution {i}: blocks {b:?}, r = {:?}\n", s.r);
            }
            out(&text)
        }
    }
}

struct FactOutcome {
    passed: bool,
    summary: String,
    detail: Value,
}

fn sweep_outcome(name: &str, r: homsphere::SweepReport) -> FactOutcome {
    FactOutcome {
        passed: r.passed(),
        summary: format!("{name}: {} checks, {} failures", r.checked, r.failures),
        detail: json!(r),
    }
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn run_fact(check: FactCheck, q: Option<u64>, m: Option<usize>) -> Result<FactOutcome> {
    let cap = closure_cap();
    let field = |default: u64| FieldCtx::of_order(q.unwrap_or(default));
    Ok(match check {
        FactCheck::OmegaConjugation => sweep_outcome("omega-conjugation", omega_conjugation_sweep(&field(7)?)),
        FactCheck::TranslationAdditivity => {
            let ctx = field(4)?;
            let t = translation_group(&ctx, m.unwrap_or(3))?;
            let mut out = sweep_outcome("translation-additivity", t.additivity);
            out.passed &= t.elementary_abelian;
            out.summary += &format!(", elementary abelian of rank {}: {}", t.rank, t.elementary_abelian);
            out
        }
        FactCheck::AslConjugation => sweep_outcome("asl-conjugation", asl_conjugation_sweep(&field(3)?, m.unwrap_or(3))?),
        FactCheck::SymplecticForm => {
            let ctx = field(3)?;
            let sl = special_linear(&ctx, m.unwrap_or(2), cap)?;
            let mut r = homsphere::SweepReport::default();
            for a in sl.elements() {
                r.record(preserves_symplectic_form(&symplectic_embed(a)?));
            }
            sweep_outcome("symplectic-form", r)
        }
        FactCheck::InvolutionClasses => {
            let ctx = field(7)?;
            let g = projective_special_linear(&ctx, m.unwrap_or(2), cap)?;
            let (classes, count) = involution_classes(&g);
            FactOutcome {
                passed: true,
                summary: format!("{}, {}", plural(classes, "class", "classes"), plural(count, "involution", "involutions")),
                detail: json!({ "group_order": g.order(), "classes": classes, "involutions": count }),
            }
        }
        FactCheck::BorelClassStructure => {
            let ctx = field(7)?;
            let data = borel_subgroup(&ctx)?;
            let structure = order_p_class_structure(&data);
            let lines = cyclic_subgroup_classes(&data).len();
            let desc: Vec<String> = structure.iter().map(|(size, count)| format!("{count} of size {size}")).collect();
            FactOutcome {
                passed: true,
                summary: format!(
                    "Borel subgroup of order {}: order-p classes {}; {} of cyclic subgroups",
                    data.borel.order(),
                    desc.join(", "),
                    plural(lines, "conjugacy class", "conjugacy classes")
                ),
                detail: json!({
                    "borel_order": data.borel.order(),
                    "order_p_classes": structure,
                    "cyclic_subgroup_classes": lines,
                }),
            }
        }
        FactCheck::Q8Search => {
            let ctx = field(5)?;
            let sl = special_linear(&ctx, 2, cap)?;
            let found = find_quaternion_subgroup(&sl)?;
            FactOutcome {
                passed: true,
                summary: format!("Q8 in SL2({}): {}", ctx.q(), if found.is_some() { "found" } else { "none" }),
                detail: json!({ "group_order": sl.order(), "found": found.map(|h| h.members) }),
            }
        }
        FactCheck::Q8O3xo2 => {
            let ctx = field(5)?;
            let sl = special_linear(&ctx, 2, cap)?;
            let h = find_quaternion_subgroup(&sl)?.ok_or_else(|| anyhow!("no Q8 in SL2({})", ctx.q()))?;
            let table = CayleyTable::from_subgroup(&sl, &h.members);
            let embeds = embeds_in_o3xo2(&table)?;
            FactOutcome {
                passed: !embeds,
                summary: format!("Q8 from SL2({}) embeds in O(3) x O(2): {embeds}", ctx.q()),
                detail: json!({ "embeds": embeds }),
            }
        }
    })
}

fn run_verify(path: &Path, config: Option<PathBuf>, no_config: bool) -> Result<()> {
    let cfg = load_config(config.as_deref(), no_config)?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cert = parse_certificate(&text).map_err(|e| Exit(EXIT_VERIFY, format!("rejected certificate: {e}")))?;
    if verify_certificate(&cert, cfg.as_ref())? {
        out(&format!("verified: {} excluded at n = {} by {}\n", cert.group, cert.n, cert.filter))
    } else {
        Err(Exit(EXIT_VERIFY, format!("certificate for {} does not replay", cert.group)).into())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Classify { n, families, config, no_config, format, explain, emit_certificates, timing } => {
            run_classify(n, families, config, no_config, format, explain, emit_certificates, timing)
        }
        Command::Bounds { group, format } => run_bounds(&group, format),
        Command::Borel { p, k, n, classes, format } => run_borel(p, k, n, &classes, format),
        Command::Facts { check, q, m, json } => {
            let fact = run_fact(check, q, m)?;
            if json {
                let name = check.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
                emit("facts", json!({ "check": name, "q": q, "m": m }), json!({
                    "passed": fact.passed,
                    "summary": fact.summary,
                    "detail": fact.detail,
                }), None)?;
            } else {
                out(&format!("{}\n", fact.summary))?;
            }
            if fact.passed {
                Ok(())
            } else {
                Err(Exit(EXIT_VERIFY, "check failed".into()).into())
            }
        }
        Command::Verify { certificate, config, no_config } => run_verify(&certificate, config, no_config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
