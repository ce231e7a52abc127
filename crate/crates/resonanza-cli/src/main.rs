//! Command-line front end: construct integrable sets, verify their claims,
//! quantize them with a commutator audit, and export joint spectral
//! lattices.
//!
//! Exit codes: 0 on success / all checks passing, 1 on verification
//! failure, 2 on usage or precondition errors.

use clap::{Args, Parser, Subcommand};
use resonanza::eqfreq::{build_partition_set, GroupPartition, PartitionVariant};
use resonanza::fock::{build_basis, Truncation};
use resonanza::freq::FrequencyVector;
use resonanza::n3::{build_exceptional_set, build_simple_set, rep_matrices};
use resonanza::op::OperatorPolynomial;
use resonanza::sets::{build_general_set, find_general_vectors, IntegrableSet};
use resonanza::spectrum::joint_spectrum;
use resonanza::verify::{
    check_closure, check_identities, check_independence, check_intertwining, check_involution,
    check_representation, involution_kernel, Check, Status, VerificationReport,
};
use resonanza::weyl::{commutator_audit, quantize_exceptional, quantize_set};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "resonanza", version, about = "exact workbench for resonant oscillator integrable sets")]
struct Cli {
    /// Seed for randomized checks; RESONANZA_SEED overrides the default 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel checks (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// JSON config file supplying defaults for flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an integrable set and write its canonical JSON.
    Construct(ConstructArgs),
    /// Run verification suites against a set file.
    Verify(VerifyArgs),
    /// Weyl-quantize a set file; embeds a commutator audit.
    Quantize(QuantizeArgs),
    /// Export the joint spectral lattice of a quantized set as CSV.
    Spectrum(SpectrumArgs),
    /// Run the named-identity registry.
    Identities(IdentitiesArgs),
}

#[derive(Args, Default)]
struct ConstructArgs {
    /// Frequency vector, e.g. 1,1,2
    #[arg(long)]
    freq: Option<String>,
    /// Family: exceptional | simple | general | partition
    #[arg(long)]
    family: Option<String>,
    /// Simple-set parameters d1,d2
    #[arg(long)]
    d: Option<String>,
    /// Central count k (general family)
    #[arg(long)]
    k: Option<usize>,
    /// r vectors, semicolon-separated: "1,2;1,0"
    #[arg(long)]
    r: Option<String>,
    /// m vectors, semicolon-separated
    #[arg(long)]
    m: Option<String>,
    /// Group sizes for the partition family, e.g. 2,1
    #[arg(long)]
    groups: Option<String>,
    /// Per-group central momentum counts, e.g. 1,0
    #[arg(long)]
    z: Option<String>,
    /// k' for the partition family
    #[arg(long)]
    kprime: Option<usize>,
    /// Partition variant: plain | mixed
    #[arg(long)]
    variant: Option<String>,
    /// Entry bound for the automatic vector search
    #[arg(long)]
    bound: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct VerifyArgs {
    /// Set file (optional for the kernel/identities/rep suites).
    set: Option<PathBuf>,
    /// Comma-separated suites: involution,independence,identities,closure,rep,kernel
    #[arg(long, default_value = "involution,independence")]
    suite: String,
    /// Trials for rank tests
    #[arg(long)]
    trials: Option<usize>,
    /// Degree cap for the kernel suite
    #[arg(long)]
    degree: Option<u32>,
    /// Frequency vector for set-free suites
    #[arg(long)]
    freq: Option<String>,
    /// Representation level q (default: sweep 1..=6)
    #[arg(long)]
    q: Option<u32>,
    /// Representation parameter p (default: sweep 1..=2)
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct QuantizeArgs {
    set: PathBuf,
    /// "exceptional" applies the lower-order counterterm to F3.
    #[arg(long)]
    correct: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct SpectrumArgs {
    ops: PathBuf,
    /// Weighted cutoff Λ (states with l·ν ≤ Λ).
    #[arg(long)]
    cutoff: Option<i64>,
    /// Per-mode occupation cap (used for mixed-sign frequencies).
    #[arg(long)]
    per_mode: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct IdentitiesArgs {
    /// Comma-separated id prefixes to run (default: everything).
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Optional JSON defaults; explicit flags always win.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    freq: Option<String>,
    family: Option<String>,
    d: Option<String>,
    k: Option<usize>,
    r: Option<String>,
    m: Option<String>,
    groups: Option<String>,
    z: Option<String>,
    kprime: Option<usize>,
    variant: Option<String>,
    bound: Option<i64>,
    suite: Option<String>,
    trials: Option<usize>,
    degree: Option<u32>,
    q: Option<u32>,
    p: Option<u32>,
    correct: Option<String>,
    cutoff: Option<i64>,
    per_mode: Option<u32>,
    only: Option<String>,
    out: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct OperatorElement {
    name: String,
    op: OperatorPolynomial,
}

#[derive(Serialize, Deserialize)]
struct AuditEntry {
    pair: String,
    zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<OperatorPolynomial>,
}

#[derive(Serialize, Deserialize)]
struct OperatorFile {
    name: String,
    l: Vec<i64>,
    k: usize,
    elements: Vec<OperatorElement>,
    audit: Vec<AuditEntry>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let config: JobConfig = match &cli.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => JobConfig::default(),
    };
    let seed = cli
        .seed
        .or(config.seed)
        .or_else(|| {
            std::env::var("RESONANZA_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    if let Some(threads) = cli.threads.or(config.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }

    match cli.cmd {
        Cmd::Construct(args) => cmd_construct(args, &config),
        Cmd::Verify(args) => cmd_verify(args, &config, seed),
        Cmd::Quantize(args) => cmd_quantize(args, &config),
        Cmd::Spectrum(args) => cmd_spectrum(args, &config, seed),
        Cmd::Identities(args) => cmd_identities(args, &config, seed),
    }
}

fn parse_ints(s: &str) -> anyhow::Result<Vec<i64>> {
    s.split(',')
        .map(|x| Ok(x.trim().parse::<i64>()?))
        .collect()
}

fn parse_usizes(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(|x| Ok(x.trim().parse::<usize>()?))
        .collect()
}

fn parse_vectors(s: &str) -> anyhow::Result<Vec<Vec<i64>>> {
    s.split(';').map(parse_ints).collect()
}

fn parse_freq(s: &str) -> anyhow::Result<FrequencyVector> {
    Ok(FrequencyVector::new(parse_ints(s)?)?)
}

fn write_or_print(out: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn out_path(flag: Option<PathBuf>, config: &JobConfig) -> Option<PathBuf> {
    flag.or_else(|| config.out.as_ref().map(PathBuf::from))
}

fn cmd_construct(args: ConstructArgs, config: &JobConfig) -> anyhow::Result<bool> {
    let family = args
        .family
        .clone()
        .or_else(|| config.family.clone())
        .ok_or_else(|| anyhow::anyhow!("--family is required"))?;
    let freq_str = args.freq.clone().or_else(|| config.freq.clone());
    let set: IntegrableSet = match family.as_str() {
        "exceptional" => {
            if let Some(f) = &freq_str {
                let l = parse_freq(f)?;
                if l.as_slice() != [1, 1, 2] {
                    anyhow::bail!("the exceptional family exists for frequencies 1,1,2");
                }
            }
            build_exceptional_set()
        }
        "simple" => {
            let l = parse_freq(freq_str.as_deref().unwrap_or("1,1,2"))?;
            let d = args
                .d
                .clone()
                .or_else(|| config.d.clone())
                .ok_or_else(|| anyhow::anyhow!("--d d1,d2 is required for simple sets"))?;
            let d = parse_ints(&d)?;
            if d.len() != 2 {
                anyhow::bail!("--d takes exactly two integers");
            }
            build_simple_set(&l, d[0], d[1])?
        }
        "general" => {
            let l = parse_freq(
                freq_str
                    .as_deref()
                    .ok_or_else(|| anyhow::anyhow!("--freq is required"))?,
            )?;
            let k = args
                .k
                .or(config.k)
                .ok_or_else(|| anyhow::anyhow!("--k is required for general sets"))?;
            let r_str = args.r.clone().or_else(|| config.r.clone());
            let m_str = args.m.clone().or_else(|| config.m.clone());
            let (rs, ms) = match (r_str, m_str) {
                (Some(r), Some(m)) => (parse_vectors(&r)?, parse_vectors(&m)?),
                (Some(r), None) if k == l.n() => (parse_vectors(&r)?, Vec::new()),
                _ => find_general_vectors(&l, k, args.bound.or(config.bound).unwrap_or(4))?,
            };
            build_general_set(&l, &rs, &ms, k)?
        }
        "partition" => {
            let l = parse_freq(
                freq_str
                    .as_deref()
                    .ok_or_else(|| anyhow::anyhow!("--freq is required"))?,
            )?;
            let groups = args
                .groups
                .clone()
                .or_else(|| config.groups.clone())
                .ok_or_else(|| anyhow::anyhow!("--groups is required for partition sets"))?;
            let part = GroupPartition::new(&l, &parse_usizes(&groups)?)?;
            let u = part.groups();
            let z = match args.z.clone().or_else(|| config.z.clone()) {
                Some(z) => parse_usizes(&z)?,
                None => (0..u)
                    .map(|h| if part.size(h) > 1 { 1 } else { 0 })
                    .collect(),
            };
            let kprime = args.kprime.or(config.kprime).unwrap_or(1);
            let variant = match args
                .variant
                .clone()
                .or_else(|| config.variant.clone())
                .as_deref()
                .unwrap_or("plain")
            {
                "plain" => PartitionVariant::Plain,
                "mixed" => PartitionVariant::Mixed,
                other => anyhow::bail!("unknown partition variant {other}"),
            };
            let rs = match args.r.clone().or_else(|| config.r.clone()) {
                Some(r) => parse_vectors(&r)?,
                None => complete_group_vectors(part.magnitudes(), u, kprime, variant)?,
            };
            let ms = match args.m.clone().or_else(|| config.m.clone()) {
                Some(m) => parse_vectors(&m)?,
                None => search_group_m_vectors(
                    &rs,
                    u,
                    kprime,
                    variant,
                    args.bound.or(config.bound).unwrap_or(4),
                )?,
            };
            build_partition_set(&l, &part, &rs, &ms, &z, kprime, variant)?
        }
        other => anyhow::bail!("unknown family {other}"),
    };
    let json = serde_json::to_string_pretty(&set)? + "\n";
    write_or_print(out_path(args.out, config).as_deref(), &json)?;
    Ok(true)
}

/// Completes `r` vectors for a partition set: the magnitude vector plus
/// unit vectors keeping linear independence.
fn complete_group_vectors(
    s: &[i64],
    u: usize,
    kprime: usize,
    variant: PartitionVariant,
) -> anyhow::Result<Vec<Vec<i64>>> {
    let want = match variant {
        PartitionVariant::Plain => u,
        PartitionVariant::Mixed => u - kprime,
    };
    let mut rs = vec![s.to_vec()];
    for j in 0..u {
        if rs.len() == want {
            break;
        }
        let mut e = vec![0i64; u];
        e[j] = 1;
        rs.push(e);
        let rows: Vec<Vec<resonanza::Rat>> = rs
            .iter()
            .map(|v| v.iter().map(|&x| resonanza::coeff::rat(x, 1)).collect())
            .collect();
        if resonanza::linalg::rank_rational(&rows) != rs.len() {
            rs.pop();
        }
    }
    if rs.len() != want {
        anyhow::bail!("could not complete {want} independent r vectors");
    }
    Ok(rs)
}

/// Enumerates independent group-space `m` vectors orthogonal to the central
/// `r` vectors (and with first nonzero entry positive).
fn search_group_m_vectors(
    rs: &[Vec<i64>],
    u: usize,
    kprime: usize,
    variant: PartitionVariant,
    bound: i64,
) -> anyhow::Result<Vec<Vec<i64>>> {
    let want = match variant {
        PartitionVariant::Plain => u - kprime,
        PartitionVariant::Mixed => kprime,
    };
    if want == 0 {
        return Ok(Vec::new());
    }
    let mut ms: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![-bound; u];
    'outer: loop {
        let ok_sign = cur.iter().find(|&&x| x != 0).map(|&x| x > 0).unwrap_or(false);
        let ortho = rs
            .iter()
            .take(kprime)
            .all(|r| r.iter().zip(&cur).map(|(a, b)| a * b).sum::<i64>() == 0);
        let disjoint = match variant {
            PartitionVariant::Plain => true,
            PartitionVariant::Mixed => ms
                .iter()
                .all(|m| m.iter().zip(&cur).all(|(a, b)| a * b == 0)),
        };
        if ok_sign && ortho && disjoint {
            ms.push(cur.clone());
            let rows: Vec<Vec<resonanza::Rat>> = ms
                .iter()
                .map(|v| v.iter().map(|&x| resonanza::coeff::rat(x, 1)).collect())
                .collect();
            if resonanza::linalg::rank_rational(&rows) != ms.len() {
                ms.pop();
            } else if ms.len() == want {
                return Ok(ms);
            }
        }
        for j in (0..u).rev() {
            if cur[j] < bound {
                cur[j] += 1;
                continue 'outer;
            }
            cur[j] = -bound;
        }
        break;
    }
    anyhow::bail!("found only {} of {want} m vectors with entries bounded by {bound}", ms.len())
}

fn cmd_verify(args: VerifyArgs, config: &JobConfig, seed: u64) -> anyhow::Result<bool> {
    let suites: Vec<String> = args
        .suite
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let suites = if args.suite == "involution,independence" {
        config
            .suite
            .clone()
            .map(|s| s.split(',').map(|x| x.trim().to_string()).collect())
            .unwrap_or(suites)
    } else {
        suites
    };
    let set: Option<IntegrableSet> = match &args.set {
        Some(path) => Some(serde_json::from_str(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let trials = args.trials.or(config.trials).unwrap_or(5);
    let degree = args.degree.or(config.degree).unwrap_or(2);

    let mut checks: Vec<Check> = Vec::new();
    let mut subject = set
        .as_ref()
        .map(|s| s.name.clone())
        .unwrap_or_else(|| "suite".to_string());
    for suite in &suites {
        match suite.as_str() {
            "involution" => {
                let set = set
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("involution suite needs a set file"))?;
                checks.extend(check_involution(set).checks);
            }
            "independence" => {
                let set = set
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("independence suite needs a set file"))?;
                checks.extend(check_independence(set, trials, seed).checks);
            }
            "identities" => {
                checks.extend(check_identities(None, seed).checks);
                subject = "identities".to_string();
            }
            "closure" => {
                let set = set
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("closure suite needs a set file"))?;
                let basis: Vec<(String, resonanza::Polynomial)> = set
                    .elements
                    .iter()
                    .map(|e| (e.name.clone(), e.poly.clone()))
                    .collect();
                checks.extend(check_closure(&basis, None, 8192)?.checks);
            }
            "rep" => {
                let qs: Vec<u32> = args.q.or(config.q).map(|q| vec![q]).unwrap_or((1..=6).collect());
                let ps: Vec<u32> = args.p.or(config.p).map(|p| vec![p]).unwrap_or(vec![1, 2]);
                for &q in &qs {
                    for &p in &ps {
                        checks.extend(check_representation(&rep_matrices(p, q)).checks);
                        if q <= 4 {
                            checks.extend(check_intertwining(p, q).checks);
                        }
                    }
                }
            }
            "kernel" => {
                let (l, constraints) = match (&set, &args.freq, &config.freq) {
                    (Some(s), _, _) => (
                        s.l.clone(),
                        s.central().iter().map(|e| e.poly.clone()).collect::<Vec<_>>(),
                    ),
                    (None, Some(f), _) | (None, None, Some(f)) => {
                        let l = parse_freq(f)?;
                        let f1 = l.f1();
                        (l, vec![f1])
                    }
                    _ => anyhow::bail!("kernel suite needs a set file or --freq"),
                };
                let kernel = involution_kernel(&constraints, &l, degree, 4096)?;
                checks.push(Check {
                    id: format!("kernel:dim@d={degree}"),
                    status: Status::Pass,
                    residual: None,
                    rank: Some(kernel.len()),
                });
                for (i, p) in kernel.iter().enumerate() {
                    let mut ok = true;
                    for f in &constraints {
                        if !f.poisson_bracket(p).is_zero() {
                            ok = false;
                        }
                    }
                    checks.push(Check::boolean(
                        format!("kernel:member{}:{}", i + 1, p),
                        ok,
                        None,
                    ));
                }
            }
            other => anyhow::bail!("unknown suite {other}"),
        }
    }
    let report = VerificationReport::new(subject, seed, checks);
    let json = report.to_json() + "\n";
    write_or_print(out_path(args.out, config).as_deref(), &json)?;
    Ok(report.passed())
}

fn cmd_quantize(args: QuantizeArgs, config: &JobConfig) -> anyhow::Result<bool> {
    let set: IntegrableSet = serde_json::from_str(&std::fs::read_to_string(&args.set)?)?;
    let correct = args.correct.clone().or_else(|| config.correct.clone());
    let ops = match correct.as_deref() {
        None => quantize_set(&set),
        Some("exceptional") => {
            if set.metadata.family != "exceptional" {
                anyhow::bail!("--correct exceptional applies to the exceptional family");
            }
            quantize_exceptional()
        }
        Some(other) => anyhow::bail!("unknown correction {other}"),
    };
    let audit: Vec<AuditEntry> = commutator_audit(&ops, set.k)
        .into_iter()
        .map(|(pair, residual)| AuditEntry {
            pair,
            zero: residual.is_zero(),
            residual: if residual.is_zero() {
                None
            } else {
                Some(residual)
            },
        })
        .collect();
    let file = OperatorFile {
        name: set.name.clone(),
        l: set.l.as_slice().to_vec(),
        k: set.k,
        elements: ops
            .into_iter()
            .map(|(name, op)| OperatorElement { name, op })
            .collect(),
        audit,
    };
    let json = serde_json::to_string_pretty(&file)? + "\n";
    write_or_print(out_path(args.out, config).as_deref(), &json)?;
    Ok(true)
}

fn cmd_spectrum(args: SpectrumArgs, config: &JobConfig, seed: u64) -> anyhow::Result<bool> {
    let file: OperatorFile = serde_json::from_str(&std::fs::read_to_string(&args.ops)?)?;
    let n = file.l.len();
    let trunc = match (args.per_mode.or(config.per_mode), args.cutoff.or(config.cutoff)) {
        (Some(cap), _) => Truncation::PerMode(cap),
        (None, Some(cutoff)) => {
            if file.l.iter().any(|&w| w <= 0) {
                anyhow::bail!("weighted cutoff needs positive frequencies; use --per-mode");
            }
            Truncation::Weighted {
                weights: file.l.clone(),
                cap: cutoff,
            }
        }
        (None, None) => anyhow::bail!("--cutoff or --per-mode is required"),
    };
    let basis = build_basis(n, trunc)?;
    let central: Vec<(String, OperatorPolynomial)> = file
        .elements
        .iter()
        .take(file.k)
        .map(|e| (e.name.clone(), e.op.clone()))
        .collect();
    let lattice = joint_spectrum(&central, &basis, seed)?;
    write_or_print(out_path(args.out, config).as_deref(), &lattice.to_csv())?;
    Ok(true)
}

fn cmd_identities(args: IdentitiesArgs, config: &JobConfig, seed: u64) -> anyhow::Result<bool> {
    let only = args.only.clone().or_else(|| config.only.clone());
    let filters: Option<Vec<&str>> = only.as_ref().map(|s| s.split(',').map(str::trim).collect());
    let report = check_identities(filters.as_deref(), seed);
    let json = report.to_json() + "\n";
    write_or_print(out_path(args.out, config).as_deref(), &json)?;
    Ok(report.passed())
}
