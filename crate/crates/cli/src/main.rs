use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use scissors_core::bloch::{find_group, golden_structure, group_registry, BlochField};
use scissors_core::characters::Character;
use scissors_core::quad_field::{ProjPoint, Valuation};
use scissors_core::quad_ring::{parse_quad, RingDesc};
use scissors_core::rewrite::{check_certificate, describe, Certificate, Reducer, Specializer, DEFAULT_BUDGET};
use scissors_core::suites::{local_global_trial, registry, run_suite};
use scissors_core::zmodkit::Structure;

/// Environment variable holding the number of worker threads.
const WORKERS_VAR: &str = "SCISSORS_WORKERS";

#[derive(Parser)]
#[command(name = "scissors", version, about = "Exact computations with refined scissors congruence groups")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one of the groups attached to F_q and compare it with the frozen values.
    ComputeBloch {
        #[arg(long)]
        q: u64,
        /// P, B, RP, RPtilde, RP1, RB, RPplus or EplusRPtilde.
        #[arg(long)]
        group: String,
        /// Report only the odd part.
        #[arg(long)]
        odd: bool,
    },
    /// Produce a certificate that [x]_chi vanishes.
    Reduce {
        #[arg(long)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Comma-separated canonical primes, e.g. "3,2+1*w".
        #[arg(long)]
        chi: String,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        chi_unit: i8,
        /// Write the certificate to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Replay a certificate file.
    CheckCert { path: PathBuf },
    /// Image of [x] in P(k(v)) for the prime P.
    Specialize {
        #[arg(long)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        prime: String,
    },
    /// Run the randomized property suites.
    VerifyLemmas {
        /// Ring parameter; all rings when omitted.
        #[arg(long)]
        m: Option<i64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to the named suites.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Compare injectivity and surjectivity of random equivariant maps
    /// directly and through characters.
    LocalGlobal {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<scissors_core::Error> for Failure {
    fn from(e: scissors_core::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

/// A finished command: the report, a text rendering and the verdict.
struct Outcome {
    report: Value,
    text: String,
    passed: bool,
}

fn workers() -> usize {
    std::env::var(WORKERS_VAR)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Run `jobs` on the worker pool and return the results in job order.
fn fan_out<J: Sync, T: Send>(jobs: &[J], f: impl Fn(&J) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers().min(jobs.len()).max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                let r = f(job);
                slots.lock().expect("no panics while held")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("no panics while held").into_iter().map(|r| r.expect("every job ran")).collect()
}

fn structure_json(s: &Structure) -> Value {
    json!({
        "factors": s.factors().iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "order": s.order().map(|o| o.to_string()),
        "text": s.to_string(),
    })
}

fn ring(m: i64) -> Result<RingDesc, Failure> {
    RingDesc::new(m).map_err(usage)
}

fn compute_bloch(q: u64, group: &str, odd: bool) -> Result<Outcome, Failure> {
    let Some(builder) = find_group(group) else {
        let names: Vec<&str> = group_registry().iter().map(|g| g.name()).collect();
        return Err(Failure::Usage(format!("unknown group {group}; expected one of {}", names.join(", "))));
    };
    let field = BlochField::new(q).map_err(usage)?;
    let built = builder.build(&field)?;
    let full = built.module.structure();
    let structure = if odd { full.odd_part() } else { full };
    let golden = golden_structure(q, builder.name()).map(|g| if odd { g.odd_part() } else { g });
    let matches = golden.as_ref().map(|g| g == &structure);
    let dictionary = built.generator_dictionary();
    let mut text = format!("{}(F_{q}){} = {structure}\n", builder.name(), if odd { " odd part" } else { "" });
    for (label, expr) in &dictionary {
        text.push_str(&format!("  {label} = {expr}\n"));
    }
    match (&golden, matches) {
        (Some(g), Some(true)) => text.push_str(&format!("golden: matches {g}")),
        (Some(g), _) => text.push_str(&format!("golden: MISMATCH, expected {g}")),
        (None, _) => text.push_str("golden: none recorded"),
    }
    Ok(Outcome {
        report: json!({
            "command": "compute-bloch",
            "q": q,
            "group": builder.name(),
            "odd": odd,
            "structure": structure_json(&structure),
            "generators": dictionary.iter().map(|(l, e)| json!({"label": l, "value": e})).collect::<Vec<_>>(),
            "golden": golden.as_ref().map(structure_json),
            "golden_matches": matches,
        }),
        text,
        passed: matches != Some(false),
    })
}

fn reduce(m: i64, x: &str, chi: &str, unit: i8, emit: Option<&PathBuf>, budget: usize) -> Result<Outcome, Failure> {
    let r = ring(m)?;
    let point = ProjPoint::parse(r, x).map_err(usage)?;
    let chi = Character::parse(r, chi, unit).map_err(usage)?;
    let reducer = Reducer::new(&chi, budget).map_err(usage)?;
    let reduction = reducer.run(&point)?;
    let cert = reduction.certificate;
    let check = check_certificate(&cert);
    if let Some(path) = emit {
        std::fs::write(path, cert.to_json()).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    }
    let descent: Vec<String> = reduction.descent.iter().map(|d| d.to_string()).collect();
    let text = format!("[{point}]_chi = 0 for chi = {chi}: {} moves, check {check}", cert.len());
    Ok(Outcome {
        report: json!({
            "command": "reduce",
            "m": m,
            "x": point.to_string(),
            "chi": chi.to_string(),
            "moves": cert.len(),
            "descent": descent,
            "check": check,
            "certificate": if emit.is_none() { serde_json::from_str(&cert.to_json()).unwrap_or(Value::Null) } else { Value::Null },
        }),
        text,
        passed: check.valid,
    })
}

fn check_cert(path: &PathBuf) -> Result<Outcome, Failure> {
    let data = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let cert = Certificate::from_json(&data).map_err(usage)?;
    let check = check_certificate(&cert);
    Ok(Outcome {
        text: format!("{} ({} moves): {check}", path.display(), cert.len()),
        report: json!({ "command": "check-cert", "moves": cert.len(), "check": check }),
        passed: check.valid,
    })
}

fn specialize(m: i64, x: &str, prime: &str) -> Result<Outcome, Failure> {
    let r = ring(m)?;
    let point = ProjPoint::parse(r, x).map_err(usage)?;
    let p = parse_quad(r, prime).map_err(usage)?;
    let v = Valuation::new(&p).map_err(usage)?;
    let s = Specializer::new(&v)?;
    let image = s.specialize(&point)?;
    let value = describe(&s, &image);
    Ok(Outcome {
        text: format!("S_v([{point}]) = {value} in P(F_{}) at v = {v}", s.bloch().q()),
        report: json!({
            "command": "specialize",
            "m": m,
            "x": point.to_string(),
            "prime": v.prime().to_string(),
            "residue_size": s.bloch().q(),
            "image": image.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "value": value,
        }),
        passed: true,
    })
}

fn verify_lemmas(m: Option<i64>, samples: usize, seed: u64, only: &[String]) -> Result<Outcome, Failure> {
    let rings = match m {
        Some(m) => vec![ring(m)?],
        None => RingDesc::all().collect(),
    };
    let names: Vec<&'static str> = registry().iter().map(|s| s.name()).collect();
    if let Some(bad) = only.iter().find(|n| !names.contains(&n.as_str())) {
        return Err(Failure::Usage(format!("unknown suite {bad}; expected one of {}", names.join(", "))));
    }
    let jobs: Vec<(RingDesc, &str)> = rings
        .iter()
        .flat_map(|&r| names.iter().filter(|n| only.is_empty() || only.iter().any(|o| o == *n)).map(move |&n| (r, n)))
        .collect();
    let results = fan_out(&jobs, |&(r, name)| run_suite(name, r, samples, seed).expect("registered suite"));
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut passed = true;
    for ((r, name), res) in jobs.iter().zip(results) {
        let out = res?;
        let status = if out.skipped {
            "skip"
        } else if out.passed() {
            "pass"
        } else {
            "FAIL"
        };
        text.push_str(&format!("m={:<2} {name:<16} {status} {}/{}\n", r.m(), out.checks - out.failures, out.checks));
        for note in &out.notes {
            text.push_str(&format!("      {note}\n"));
        }
        passed &= out.passed();
        reports.push(serde_json::to_value(&out).map_err(usage)?);
    }
    text.push_str(if passed { "all suites passed" } else { "some suites failed" });
    Ok(Outcome {
        report: json!({ "command": "verify-lemmas", "m": m, "samples": samples, "seed": seed, "suites": reports, "passed": passed }),
        text,
        passed,
    })
}

fn local_global(k: usize, trials: usize, seed: u64) -> Result<Outcome, Failure> {
    if !(1..=4).contains(&k) {
        return Err(Failure::Usage(format!("k must be between 1 and 4, got {k}")));
    }
    let jobs: Vec<u64> = (0..trials as u64).collect();
    let results = fan_out(&jobs, |&i| local_global_trial(k, seed, i));
    let mut disagree = Vec::new();
    let mut bijective = 0;
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        if !r.agree() {
            disagree.push(i);
        }
        bijective += usize::from(r.direct.bijective());
    }
    let passed = disagree.is_empty();
    Ok(Outcome {
        text: format!(
            "{} of {trials} maps agree ({bijective} bijective after inverting 2){}",
            trials - disagree.len(),
            if passed { String::new() } else { format!("; disagreeing trials: {disagree:?}") }
        ),
        report: json!({
            "command": "local-global",
            "k": k,
            "trials": trials,
            "seed": seed,
            "agree": trials - disagree.len(),
            "bijective": bijective,
            "disagreeing": disagree,
            "passed": passed,
        }),
        passed,
    })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::ComputeBloch { q, group, odd } => compute_bloch(*q, group, *odd),
        Command::Reduce { m, x, chi, chi_unit, emit, budget } => reduce(*m, x, chi, *chi_unit, emit.as_ref(), *budget),
        Command::CheckCert { path } => check_cert(path),
        Command::Specialize { m, x, prime } => specialize(*m, x, prime),
        Command::VerifyLemmas { m, samples, seed, suites } => verify_lemmas(*m, *samples, *seed, suites),
        Command::LocalGlobal { k, trials, seed } => local_global(*k, *trials, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    let elapsed = start.elapsed().as_secs_f64();
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("serializable"));
            } else {
                println!("{}", out.text);
            }
            eprintln!("elapsed {elapsed:.2} s");
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
