use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fermat_zeta::arith::{gcd, is_prime, mult_order, prime_power};
use fermat_zeta::bounds::{bs_sweep, SweepRow, SWEEP_HEADER};
use fermat_zeta::cache::Cache;
use fermat_zeta::equidist::{equidis_bound_check, fourier_avg_check, subgroup_of, theta_p, InequalityReport};
use fermat_zeta::orbit::{g_d, in_g_d, is_circ, orbit_stats, orbits, OrbitStats};
use fermat_zeta::stick::{conjugate_pairs_hold, stickelberger_valuation, w_single, w_weights};
use fermat_zeta::verify::{verify_all, Check, VerifyReport};
use fermat_zeta::zeta::{assemble, functional_equation_sign, invariants_from};
use fermat_zeta::{CycElement, Error, JacobiEngine, Lambda, Limits, OrbitRecord, Tuple};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_VERIFY: u8 = 4;

/// `beta` in the averaged Fourier bound reported by `equidist`.
const FOURIER_BETA: f64 = 0.5;

/// Extra tuples re-checked against a lifted conductor in `verify`.
const LIFT_SAMPLES: usize = 16;

#[derive(Parser)]
#[command(name = "fermat-zeta", version, about = "Zeta functions and Artin-Tate invariants of Fermat surfaces")]
struct Cli {
    #[arg(long, global = true, default_value = "./jcache")]
    cache_dir: PathBuf,
    #[arg(long, global = true, default_value_t = 20)]
    max_orbit_order: u64,
    #[arg(long, global = true, default_value_t = 1 << 22)]
    max_field: u64,
    #[arg(long, global = true, value_enum)]
    emit: Option<Emit>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Factored zeta numerator over a Lambda.
    Zeta {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value = "full")]
        lambda: String,
    },
    /// Rank, |Br| Reg and the Brauer-Siegel ratio.
    Invariants {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
    },
    /// One row per d in the range (CSV by default).
    Sweep {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d_from: u64,
        #[arg(long)]
        d_to: u64,
        #[arg(long, default_value_t = 1)]
        step: u64,
    },
    /// q-orbits of a Lambda and the orbit-count bounds.
    Orbits {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value = "full")]
        lambda: String,
    },
    /// Stickelberger valuations and p-adic weights.
    Stickelberger {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, value_parser = parse_tuple)]
        tuple: Option<Tuple>,
    },
    /// Equidistribution of <p> in (Z/d)^x.
    Equidist {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        subgroup_of: u64,
        #[arg(long, default_value_t = 0.125)]
        epsilon: f64,
    },
    /// Every oracle for (q, d); exits 4 on any failure.
    Verify {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
    },
}

fn parse_tuple(s: &str) -> Result<Tuple, String> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|v: Vec<u64>| format!("expected 4 entries, got {}", v.len()))
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_cap_violation() => EXIT_CAP,
            CliError::Core(
                Error::NotPrime(_) | Error::NotCoprime { .. } | Error::NotInSet(_) | Error::NotStable(_),
            )
            | CliError::Core(Error::InvalidParameter(_))
            | CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_VERIFY,
            _ => 1,
        }
    }
}

type Res<T> = std::result::Result<T, CliError>;

#[derive(Serialize)]
struct FactorOut<'a> {
    orbit: &'a OrbitRecord,
    value: &'a CycElement,
}

#[derive(Serialize)]
struct ZetaOut<'a> {
    q: u64,
    d: u64,
    lambda: &'a str,
    degree: usize,
    poly: Vec<String>,
    rho: u64,
    pstar: String,
    functional_equation_sign: Option<i8>,
    factors: Vec<FactorOut<'a>>,
}

#[derive(Serialize)]
struct OrbitsOut {
    q: u64,
    d: u64,
    lambda: String,
    orbits: Vec<OrbitRecord>,
    /// Present when `|Lambda| >= 2`.
    stats: Option<OrbitStats>,
}

#[derive(Serialize)]
struct TupleValuation {
    tuple: Tuple,
    valuation: String,
    w_single: String,
    theta_sum: String,
    w_within_theta: bool,
}

#[derive(Serialize)]
struct OrbitWeight {
    rep: Tuple,
    multiplicity: u64,
    valuation: String,
    w: String,
}

#[derive(Serialize)]
struct StickOut {
    p: u64,
    d: u64,
    order: u64,
    conjugate_pairs: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    tuple: Option<TupleValuation>,
    weights: Vec<OrbitWeight>,
    w_total: String,
}

#[derive(Serialize)]
struct EquidistOut {
    d: u64,
    p: u64,
    subgroup: Vec<u64>,
    epsilon: f64,
    theta: String,
    c7: f64,
    bound: f64,
    holds: bool,
    fourier: InequalityReport,
}

#[derive(Serialize)]
struct SweepOut<'a> {
    q: u64,
    rows: &'a [SweepRow],
    skipped: Vec<fermat_zeta::bounds::Skipped>,
}

fn emit_json<T: Serialize>(x: &T) -> Res<()> {
    println!("{}", serde_json::to_string(x)?);
    Ok(())
}

fn check_q_d(q: u64, d: u64) -> Res<()> {
    if prime_power(q).is_none() {
        return Err(CliError::Usage(format!("q = {q} is not a prime power")));
    }
    if d < 2 {
        return Err(CliError::Usage("d must be >= 2".into()));
    }
    if gcd(q, d) != 1 {
        return Err(CliError::Usage(format!("gcd({q}, {d}) != 1")));
    }
    Ok(())
}

fn cache_root(flag: PathBuf) -> PathBuf {
    match std::env::var_os("FERMAT_ZETA_CACHE") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => flag,
    }
}

fn zeta_cmd(engine: &JacobiEngine, q: u64, d: u64, lambda: &str, emit: Emit) -> Res<()> {
    check_q_d(q, d)?;
    let lambda = Lambda::parse(lambda)?;
    let z = assemble(engine, q, d, &lambda)?;
    if emit == Emit::Csv {
        println!("k,coefficient");
        for (k, c) in z.poly.iter().enumerate() {
            println!("{k},{c}");
        }
        return Ok(());
    }
    emit_json(&ZetaOut {
        q,
        d,
        lambda: &z.lambda,
        degree: z.degree(),
        poly: z.poly.iter().map(BigInt::to_string).collect(),
        rho: z.rho,
        pstar: z.pstar.to_string(),
        functional_equation_sign: functional_equation_sign(&z.poly, q),
        factors: z.factors.iter().map(|f| FactorOut { orbit: &f.orbit, value: &f.value }).collect(),
    })
}

fn invariants_cmd(engine: &JacobiEngine, q: u64, d: u64, emit: Emit) -> Res<()> {
    check_q_d(q, d)?;
    let z = assemble(engine, q, d, &Lambda::Full)?;
    let inv = invariants_from(&z)?;
    if emit == Emit::Csv {
        println!("q,d,p_g,b2,rank,br_reg,bs_ratio");
        let ratio = inv.bs_ratio.map(|r| format!("{r:.12}")).unwrap_or_default();
        println!("{},{},{},{},{},{},{}", inv.q, inv.d, inv.p_g, inv.b2, inv.rank, inv.br_reg, ratio);
        return Ok(());
    }
    emit_json(&inv)
}

fn sweep_cmd(engine: &JacobiEngine, q: u64, from: u64, to: u64, step: u64, emit: Emit) -> Res<()> {
    if step == 0 || from < 2 || from > to {
        return Err(CliError::Usage("need 2 <= d-from <= d-to and step >= 1".into()));
    }
    if prime_power(q).is_none() {
        return Err(CliError::Usage(format!("q = {q} is not a prime power")));
    }
    let ds: Vec<u64> = (from..=to).step_by(step as usize).collect();
    let (rows, skipped) = bs_sweep(engine, q, &ds)?;
    for s in &skipped {
        log::warn!("skipped d = {}: {}", s.d, s.reason);
    }
    match emit {
        Emit::Csv => {
            println!("{SWEEP_HEADER}");
            for row in &rows {
                println!("{}", row.csv());
            }
        }
        Emit::Json => emit_json(&SweepOut { q, rows: &rows, skipped })?,
    }
    let outside: Vec<String> = rows.iter().filter(|r| !r.in_window).map(|r| r.d.to_string()).collect();
    if !outside.is_empty() {
        return Err(CliError::Failed(format!("outside the window for d = {}", outside.join(", "))));
    }
    Ok(())
}

fn orbits_cmd(q: u64, d: u64, lambda: &str, emit: Emit) -> Res<()> {
    check_q_d(q, d)?;
    let lambda = Lambda::parse(lambda)?;
    let list = orbits(q, d, &lambda)?;
    if emit == Emit::Csv {
        println!("rep,d_a,len,class");
        for o in &list {
            let rep: Vec<String> = o.rep.iter().map(u64::to_string).collect();
            println!("{},{},{},{}", rep.join(" "), o.d_a, o.len, serde_json::to_string(&o.class)?.trim_matches('"'));
        }
        return Ok(());
    }
    let size: u64 = list.iter().map(|o| o.len).sum();
    let stats = if size >= 2 { Some(orbit_stats(q, &list)?) } else { None };
    emit_json(&OrbitsOut { q, d, lambda: lambda.describe(), orbits: list, stats })
}

fn stick_cmd(p: u64, d: u64, tuple: Option<Tuple>) -> Res<()> {
    if !is_prime(p) {
        return Err(CliError::Usage(format!("p = {p} is not prime")));
    }
    check_q_d(p, d)?;
    let tuple = match tuple {
        Some(a) => {
            if !in_g_d(d, &a) || !is_circ(&a) {
                return Err(CliError::Usage(format!("{a:?} is not in G_d with all entries nonzero")));
            }
            let w = w_single(&a, d, p)?;
            let theta = a
                .iter()
                .map(|&x| theta_p(x, d, p))
                .sum::<fermat_zeta::Result<num_rational::BigRational>>()?;
            Some(TupleValuation {
                tuple: a,
                valuation: stickelberger_valuation(&a, d, p)?.to_string(),
                w_single: w.to_string(),
                w_within_theta: w <= theta,
                theta_sum: theta.to_string(),
            })
        }
        None => None,
    };
    let (weights, total) = w_weights(d, p, &Lambda::Full)?;
    let weights = weights
        .into_iter()
        .map(|(rep, multiplicity, w)| {
            Ok(OrbitWeight { rep, multiplicity, valuation: stickelberger_valuation(&rep, d, p)?.to_string(), w: w.to_string() })
        })
        .collect::<Res<Vec<_>>>()?;
    emit_json(&StickOut {
        p,
        d,
        order: mult_order(p, d)?,
        conjugate_pairs: conjugate_pairs_hold(d, p)?,
        tuple,
        weights,
        w_total: total.to_string(),
    })
}

fn equidist_cmd(d: u64, p: u64, epsilon: f64) -> Res<()> {
    if gcd(p, d) != 1 {
        return Err(CliError::Usage(format!("gcd({p}, {d}) != 1")));
    }
    let h = subgroup_of(p, d)?;
    let r = equidis_bound_check(d, &h, epsilon)?;
    let fourier = fourier_avg_check(d, &h, 1, FOURIER_BETA)?;
    emit_json(&EquidistOut {
        d,
        p,
        subgroup: h,
        epsilon,
        theta: r.theta.to_string(),
        c7: r.c7,
        bound: r.bound,
        holds: r.holds,
        fourier,
    })
}

/// `Ja` only depends on the character: lifting `(d, a)` to `(k d, k a)` must
/// give the same value. Checked on a seeded sample of tuples.
fn lift_check(engine: &JacobiEngine, q: u64, d: u64, seed: u64) -> Res<Option<Check>> {
    let limits = engine.limits();
    let fits = |k: u64| {
        gcd(q, k * d) == 1
            && mult_order(q, k * d).is_ok_and(|o| {
                o <= limits.max_orbit_order && (q as u128).pow(o as u32) <= limits.max_field as u128
            })
    };
    let Some(k) = [2u64, 3, 5].into_iter().find(|&k| fits(k)) else {
        return Ok(None);
    };
    let mut tuples: Vec<Tuple> = g_d(d).filter(is_circ).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tuples.shuffle(&mut rng);
    tuples.truncate(LIFT_SAMPLES);
    let mut failures = Vec::new();
    for a in &tuples {
        let lifted = a.map(|x| x * k);
        let (base, _) = engine.value(q, d, a)?;
        match engine.value(q, k * d, &lifted) {
            Ok((v, _)) if v == base => {}
            Ok(_) => failures.push(format!("{a:?}")),
            Err(e) if e.is_cap_violation() => return Ok(None),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Some(Check {
        name: "conductor_lift".into(),
        cases: tuples.len() as u64,
        passed: failures.is_empty(),
        detail: failures.join("; "),
    }))
}

fn verify_cmd(engine: &JacobiEngine, q: u64, d: u64, seed: u64) -> Res<()> {
    check_q_d(q, d)?;
    let mut report: VerifyReport = verify_all(engine, q, d)?;
    if let Some(c) = lift_check(engine, q, d, seed)? {
        report.checks.push(c);
    }
    emit_json(&report)?;
    if !report.passed() {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(CliError::Failed(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}

fn run(cli: Cli) -> Res<()> {
    let limits = Limits { max_orbit_order: cli.max_orbit_order, max_field: cli.max_field, ..Limits::default() };
    let engine = JacobiEngine::new(limits, Some(Cache::new(cache_root(cli.cache_dir))));
    let json_only = |emit: Option<Emit>, name: &str| match emit {
        Some(Emit::Csv) => Err(CliError::Usage(format!("{name} has no CSV form"))),
        _ => Ok(()),
    };
    let result = match cli.command {
        Command::Zeta { q, d, lambda } => zeta_cmd(&engine, q, d, &lambda, cli.emit.unwrap_or(Emit::Json)),
        Command::Invariants { q, d } => invariants_cmd(&engine, q, d, cli.emit.unwrap_or(Emit::Json)),
        Command::Sweep { q, d_from, d_to, step } => {
            sweep_cmd(&engine, q, d_from, d_to, step, cli.emit.unwrap_or(Emit::Csv))
        }
        Command::Orbits { q, d, lambda } => orbits_cmd(q, d, &lambda, cli.emit.unwrap_or(Emit::Json)),
        Command::Stickelberger { p, d, tuple } => {
            json_only(cli.emit, "stickelberger")?;
            stick_cmd(p, d, tuple)
        }
        Command::Equidist { d, subgroup_of, epsilon } => {
            json_only(cli.emit, "equidist")?;
            equidist_cmd(d, subgroup_of, epsilon)
        }
        Command::Verify { q, d } => {
            json_only(cli.emit, "verify")?;
            verify_cmd(&engine, q, d, cli.seed)
        }
    };
    let (hits, misses) = engine.cache_stats();
    log::info!("cache: {hits} hits, {misses} misses");
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
