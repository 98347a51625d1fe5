//! `intersective`: classify intersective polynomials, build auxiliary
//! polynomials, run the gradient sieve and its exponential sums, and compute
//! exact difference-free extremal counts.
//!
//! Every subcommand prints one JSON document to stdout (diagnostics go to
//! stderr). Exit codes: 0 success, 2 usage, 3 search cap exceeded,
//! 4 invariant violation from `verify`.

use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use intersective::acceptance;
use intersective::aux::{self, AuxPoly, RootChoice};
use intersective::config::RunConfig;
use intersective::deligne::{self, CriterionVerdict, DeligneVerdict, Evidence, NotDeligneReason};
use intersective::expsum::{self, Alpha};
use intersective::extremal::{self, IncrementOutcome, InputRestriction};
use intersective::padic::{self, CertStatus, CertifyMode, PAdicRoot};
use intersective::poly::MultiPoly;
use intersective::primes::PrimeTable;
use intersective::sieve::{self, SieveProfile};

#[derive(Parser)]
#[command(name = "intersective", version, about, max_term_width = 100)]
struct Cli {
    /// TOML configuration file; flags and INTERSECTIVE_* env vars override it.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Seed for randomized corpora (verify).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format for table-shaped results (dtable): json or csv.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<intersective::config::OutputFormat>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify intersectivity / P-intersectivity for all primes up to a bound.
    Classify(ClassifyArgs),
    /// Auxiliary polynomial package (r_d, lambda, h_d), or `aux scan`.
    Aux(AuxArgs),
    /// Smoothness / Deligne classification.
    Deligne(DeligneArgs),
    /// Prime counting functions.
    Primes(PrimesArgs),
    /// Gradient-sieve profiles and the inclusion-exclusion sandwich.
    Sieve(SieveArgs),
    /// Exponential sums and additive energy.
    Expsum(ExpsumArgs),
    /// Difference-free extremal counts and the density increment.
    Extremal(ExtremalArgs),
    /// Run the full invariant suite; nonzero exit on any violation.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, value_parser = parse_mode, default_value = "p-intersective")]
    mode: CertifyMode,
    /// Certify every prime p ≤ pmax.
    #[arg(long, default_value_t = 50)]
    pmax: u64,
    /// Root-tree depth bound.
    #[arg(long)]
    depth: Option<u32>,
    poly: String,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct AuxArgs {
    #[command(subcommand)]
    sub: Option<AuxSub>,
    /// Scaling modulus d.
    #[arg(long)]
    d: Option<u64>,
    #[arg(long, value_parser = parse_mode, default_value = "p-intersective")]
    mode: CertifyMode,
    poly: Option<String>,
}

#[derive(Subcommand)]
enum AuxSub {
    /// Deligne status of h_d mod p over a (d, p) grid.
    Scan {
        #[arg(long)]
        dmax: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long, value_parser = parse_mode, default_value = "p-intersective")]
        mode: CertifyMode,
        poly: String,
    },
}

#[derive(Args)]
struct DeligneArgs {
    #[command(subcommand)]
    sub: DeligneSub,
}

#[derive(Subcommand)]
enum DeligneSub {
    /// Deligne verdict mod one prime.
    Check {
        #[arg(long)]
        p: u64,
        /// Extension-degree cap for the smoothness scan.
        #[arg(long)]
        ext: Option<u32>,
        poly: String,
    },
    /// The P-Deligne criteria report.
    Criteria {
        #[arg(long, default_value_t = 30)]
        pmax: u64,
        poly: String,
    },
}

#[derive(Args)]
struct PrimesArgs {
    #[command(subcommand)]
    sub: PrimesSub,
}

#[derive(Subcommand)]
enum PrimesSub {
    /// psi(x, a, q) = sum of log p over primes p ≤ x, p ≡ a (mod q).
    Psi {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        a: i64,
        #[arg(long)]
        q: u64,
        /// Univariate weight g: sums g(p)·log p instead.
        #[arg(long)]
        weight: Option<String>,
    },
}

#[derive(Args)]
struct SieveArgs {
    #[command(subcommand)]
    sub: SieveSub,
}

#[derive(Subcommand)]
enum SieveSub {
    /// Per-prime records gamma, j, |J| and the product w_d for p ≤ Y.
    Profile {
        #[arg(long)]
        d: u64,
        #[arg(long, alias = "Y")]
        y: u64,
        #[arg(long, value_parser = parse_mode, default_value = "p-intersective")]
        mode: CertifyMode,
        poly: String,
    },
    /// Truncated inclusion-exclusion sums bracketing the exact nu_d sum.
    Sandwich {
        #[arg(long)]
        d: u64,
        #[arg(long, alias = "Y")]
        y: u64,
        /// Box bound per coordinate.
        #[arg(long = "box", value_name = "BOUND")]
        box_bound: i64,
        /// Truncation levels, comma separated (default: all).
        #[arg(long)]
        t: Option<String>,
        #[arg(long, value_parser = parse_mode, default_value = "p-intersective")]
        mode: CertifyMode,
        poly: String,
    },
}

#[derive(Args)]
struct ExpsumArgs {
    #[command(subcommand)]
    sub: ExpsumSub,
}

#[derive(Subcommand)]
enum ExpsumSub {
    /// Complete sum over F_p^l with the Deligne bound for reference.
    Complete {
        #[arg(long)]
        p: u64,
        poly: String,
    },
    /// Local sum G(a, q) with the w_{d,q} weights.
    Local {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, alias = "Y")]
        y: u64,
        #[arg(long, value_parser = parse_mode, default_value = "p-intersective")]
        mode: CertifyMode,
        poly: String,
    },
    /// Weighted generating sum S(alpha) over [M]^l.
    Salpha {
        /// "a/q", "a/q+beta", or a plain real.
        #[arg(long)]
        alpha: String,
        #[arg(long, alias = "M")]
        m: i64,
        #[arg(long)]
        d: u64,
        #[arg(long, alias = "Y")]
        y: u64,
        #[arg(long, value_parser = parse_mode, default_value = "p-intersective")]
        mode: CertifyMode,
        poly: String,
    },
    /// Additive energy E_{2m} of a set of rationals mod 1.
    Energy {
        #[arg(long)]
        m: u32,
        /// Torus-norm slack, exact rational (default 0).
        #[arg(long)]
        eps: Option<String>,
        /// File with a JSON array of rationals, or one per line.
        #[arg(long)]
        set: std::path::PathBuf,
        /// Also check the (Qn)^m · log^K Q bound with this denominator bound.
        #[arg(long)]
        qbound: Option<u64>,
    },
}

#[derive(Args)]
struct ExtremalArgs {
    #[command(subcommand)]
    sub: ExtremalSub,
}

#[derive(Subcommand)]
enum ExtremalSub {
    /// (N, D(X,N), D/N) rows where X = h_d(inputs) ∩ [1, N−1].
    Dtable {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        nmax: u64,
        /// Number of evenly spaced N values.
        #[arg(long, default_value_t = 6)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        d: u64,
        /// Drop the prime-input restriction.
        #[arg(long)]
        unrestricted: bool,
        #[arg(long, value_parser = parse_mode, default_value = "p-intersective")]
        mode: CertifyMode,
    },
    /// Exact D(X, N) for an explicit difference set.
    Solve {
        /// File with a JSON array of integers, or one per line.
        #[arg(long = "x-file", value_name = "PATH")]
        x_file: std::path::PathBuf,
        #[arg(long, alias = "N")]
        n: u64,
    },
    /// Density-increment step for a set A on step-q progressions.
    Increment {
        /// File with the elements of A.
        #[arg(long = "set-file", value_name = "PATH")]
        set_file: std::path::PathBuf,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        gamma: f64,
        /// Ambient interval length L (default: max element of A).
        #[arg(long)]
        ambient: Option<u64>,
        /// Mass threshold theta in (0, 1]; measured from the arcs if absent.
        #[arg(long)]
        theta: Option<f64>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Run a single criterion (1..=12) instead of all.
    #[arg(long)]
    only: Option<u32>,
}

fn parse_format(s: &str) -> Result<intersective::config::OutputFormat, String> {
    match s {
        "json" => Ok(intersective::config::OutputFormat::Json),
        "csv" => Ok(intersective::config::OutputFormat::Csv),
        other => Err(format!("unknown format {other:?} (use json | csv)")),
    }
}

fn parse_mode(s: &str) -> Result<CertifyMode, String> {
    match s {
        "intersective" => Ok(CertifyMode::Intersective),
        "p-intersective" => Ok(CertifyMode::PIntersective),
        other => Err(format!(
            "unknown mode {other:?} (use intersective | p-intersective)"
        )),
    }
}

// ---------------------------------------------------------------------------

enum Failure {
    Core(intersective::Error),
    Io(String),
    VerifyFailed(usize),
}

impl From<intersective::Error> for Failure {
    fn from(e: intersective::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(intersective::Error::SearchCapExceeded(_))
            | Failure::Core(intersective::Error::GammaCapExceeded { .. }) => 3,
            Failure::VerifyFailed(_) => 4,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(m) => m.clone(),
            Failure::VerifyFailed(n) => format!("{n} acceptance criteria failed"),
        }
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("error: {}", f.message());
            return ExitCode::from(f.exit_code());
        }
    };
    match run(&cli, &config) {
        Ok(Output::Json(value)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("serializable output")
            );
            ExitCode::SUCCESS
        }
        Ok(Output::Text(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    // env overrides for caps, then flag overrides
    macro_rules! env_override {
        ($field:ident, $name:literal, $ty:ty) => {
            if let Ok(v) = std::env::var(concat!("INTERSECTIVE_", $name)) {
                config.$field = v.parse::<$ty>().map_err(|_| {
                    Failure::Io(format!(concat!("bad INTERSECTIVE_", $name, " value {}"), v))
                })?;
            }
        };
    }
    env_override!(root_tree_cap, "ROOT_TREE_CAP", u64);
    env_override!(box_volume_cap, "BOX_VOLUME_CAP", u64);
    env_override!(exhaustive_n_cap, "EXHAUSTIVE_N_CAP", u32);
    env_override!(branch_and_bound_n_cap, "BRANCH_AND_BOUND_N_CAP", u32);
    env_override!(prime_limit, "PRIME_LIMIT", u64);
    env_override!(ext_degree_cap, "EXT_DEGREE_CAP", u32);
    env_override!(cert_depth_max, "CERT_DEPTH_MAX", u32);
    env_override!(gamma_cap, "GAMMA_CAP", u32);
    env_override!(seed, "SEED", u64);
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(format) = cli.format {
        config.output = format;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli, config: &RunConfig) -> Result<Output, Failure> {
    match &cli.command {
        Command::Classify(args) => classify(args, config).map(Output::Json),
        Command::Aux(args) => aux_cmd(args, config).map(Output::Json),
        Command::Deligne(args) => deligne_cmd(args, config).map(Output::Json),
        Command::Primes(args) => primes_cmd(args, config).map(Output::Json),
        Command::Sieve(args) => sieve_cmd(args, config).map(Output::Json),
        Command::Expsum(args) => expsum_cmd(args, config).map(Output::Json),
        Command::Extremal(args) => extremal_cmd(args, config),
        Command::Verify(args) => verify_cmd(args, config).map(Output::Json),
    }
}

/// Common envelope: provenance fields shared by every output.
fn envelope(command: &str, config: &RunConfig, body: Value) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": config.hash(),
        "result": body,
    })
}

fn mode_name(mode: CertifyMode) -> &'static str {
    match mode {
        CertifyMode::Intersective => "intersective",
        CertifyMode::PIntersective => "p-intersective",
    }
}

fn root_json(root: &PAdicRoot) -> Value {
    json!({
        "p": root.p,
        "precision": root.v,
        "value": root.value.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "multiplicity": root.multiplicity,
        "unit_coords": root.unit_coords,
        "hensel_gamma": root.gamma,
        "exact_integer_root": root.exact.as_ref().map(|e| {
            e.iter().map(|v| v.to_string()).collect::<Vec<_>>()
        }),
    })
}

fn choice_json(choice: &RootChoice) -> Value {
    let roots: Vec<Value> = choice
        .primes()
        .map(|p| root_json(choice.root(p).expect("listed prime")))
        .collect();
    json!({
        "mode": mode_name(choice.mode()),
        "roots": roots,
        "primality": "deterministic Miller-Rabin, bases {2,3,5,7,11,13,17,19,23,29,31,37}",
    })
}

fn aux_json(aux: &AuxPoly) -> Value {
    json!({
        "d": aux.d,
        "r_d": aux.r_d.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "lambda": aux.lambda.to_string(),
        "h_d": aux.h_d.to_json_value(),
        "h_d_text": aux.h_d.to_string(),
    })
}

fn profile_json(profile: &SieveProfile) -> Value {
    json!({
        "d": profile.d,
        "y": profile.y,
        "records": profile.records.iter().map(|r| json!({
            "p": r.p,
            "gamma": r.gamma,
            "j": r.j.to_string(),
            "j_set_size": r.j_set_size.to_string(),
            "eps": r.eps,
        })).collect::<Vec<_>>(),
        "w_d": profile.w_d.to_string(),
        "w_d_float": profile.w_d_float,
    })
}

/// Build the canonical root choice certifying exactly the primes dividing
/// the moduli this command touches.
fn choice_for(
    h: &MultiPoly,
    mode: CertifyMode,
    moduli: &[u64],
    config: &RunConfig,
) -> Result<RootChoice, Failure> {
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    for &m in moduli {
        for (p, _) in aux::factorize(m) {
            primes.insert(p);
        }
    }
    let primes: Vec<u64> = primes.into_iter().collect();
    let choice = RootChoice::certify_primes(
        h,
        mode,
        &primes,
        config.cert_depth_max,
        config.root_tree_cap,
    )?;
    for &p in &primes {
        if choice.root(p).is_err() {
            return Err(Failure::Core(intersective::Error::Invalid(format!(
                "polynomial could not be certified at p = {p} in mode {}",
                mode_name(mode)
            ))));
        }
    }
    Ok(choice)
}

fn classify(args: &ClassifyArgs, config: &RunConfig) -> Result<Value, Failure> {
    let h = MultiPoly::parse(&args.poly)?;
    let depth = args.depth.unwrap_or(config.cert_depth_max);
    let certs = padic::certify(&h, args.mode, args.pmax, depth, config.root_tree_cap)?;
    let list: Vec<Value> = certs
        .iter()
        .map(|c| match &c.status {
            CertStatus::Certified { root, lift_reason } => json!({
                "p": c.p,
                "status": "certified",
                "lift_reason": lift_reason.to_string(),
                "root": root_json(root),
            }),
            CertStatus::NotIntersective { depth } => json!({
                "p": c.p,
                "status": "not-intersective",
                "empty_at_depth": depth,
            }),
            CertStatus::Unknown { depth, reason } => json!({
                "p": c.p,
                "status": "unknown",
                "depth": depth,
                "reason": reason,
            }),
        })
        .collect();
    Ok(envelope(
        "classify",
        config,
        json!({
            "polynomial": h.to_json_value(),
            "mode": mode_name(args.mode),
            "pmax": args.pmax,
            "depth": depth,
            "certificates": list,
        }),
    ))
}

fn aux_cmd(args: &AuxArgs, config: &RunConfig) -> Result<Value, Failure> {
    match &args.sub {
        Some(AuxSub::Scan {
            dmax,
            pmax,
            mode,
            poly,
        }) => {
            let h = MultiPoly::parse(poly)?;
            let moduli: Vec<u64> = (1..=*dmax).collect();
            let choice = choice_for(&h, *mode, &moduli, config)?;
            let report = aux::scan_strongly_deligne(
                &choice,
                *dmax,
                *pmax,
                config.ext_degree_cap,
                config.box_volume_cap,
            )?;
            let entries: Vec<Value> = report
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "d": e.d,
                        "p": e.p,
                        "deligne": e.verdict.is_deligne(),
                        "verdict": deligne_verdict_json(&e.verdict),
                    })
                })
                .collect();
            Ok(envelope(
                "aux scan",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "root_choice": choice_json(&choice),
                    "entries": entries,
                    "exceptional_primes": report.exceptional_primes,
                }),
            ))
        }
        None => {
            let (d, poly) = match (args.d, &args.poly) {
                (Some(d), Some(p)) => (d, p),
                _ => {
                    return Err(Failure::Io(
                        "usage: aux --d <n> <poly>  (or: aux scan --dmax --pmax <poly>)".into(),
                    ))
                }
            };
            require_positive("--d", d)?;
            let h = MultiPoly::parse(poly)?;
            let choice = choice_for(&h, args.mode, &[d], config)?;
            let auxp = aux::build_aux(&choice, d)?;
            Ok(envelope(
                "aux",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "root_choice": choice_json(&choice),
                    "aux": aux_json(&auxp),
                }),
            ))
        }
    }
}

fn deligne_verdict_json(v: &DeligneVerdict) -> Value {
    match v {
        DeligneVerdict::Deligne { k, smooth_up_to } => json!({
            "deligne": true,
            "degree": k,
            "top_part_smooth_up_to": smooth_up_to,
        }),
        DeligneVerdict::NotDeligne(reason) => {
            let r = match reason {
                NotDeligneReason::ZeroReduction => json!("zero reduction"),
                NotDeligneReason::ConstantReduction => json!("constant reduction"),
                NotDeligneReason::CharDividesDegree { k } => {
                    json!(format!("characteristic divides degree {k}"))
                }
                NotDeligneReason::TopPartNotSmooth(w) => json!({
                    "top_part_not_smooth": {
                        "p": w.p,
                        "extension_degree": w.ext_degree,
                        "witness": w.point,
                    }
                }),
            };
            json!({"deligne": false, "reason": r})
        }
    }
}

fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::Certified(s) => json!({"certified": s}),
        Evidence::Empirical(s) => json!({"empirical": s}),
    }
}

fn criterion_json(v: &CriterionVerdict) -> Value {
    match v {
        CriterionVerdict::Satisfied(e) => json!({"satisfied": evidence_json(e)}),
        CriterionVerdict::NotSatisfied(r) => json!({"not_satisfied": r}),
        CriterionVerdict::NotEvaluated(r) => json!({"not_evaluated": r}),
    }
}

fn deligne_cmd(args: &DeligneArgs, config: &RunConfig) -> Result<Value, Failure> {
    match &args.sub {
        DeligneSub::Check { p, ext, poly } => {
            let h = MultiPoly::parse(poly)?;
            let ext = ext.unwrap_or(config.ext_degree_cap);
            let verdict = deligne::is_deligne_mod(&h, *p, ext, config.box_volume_cap)?;
            Ok(envelope(
                "deligne check",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "p": p,
                    "extension_cap": ext,
                    "verdict": deligne_verdict_json(&verdict),
                }),
            ))
        }
        DeligneSub::Criteria { pmax, poly } => {
            let h = MultiPoly::parse(poly)?;
            let report = deligne::p_deligne_criteria(
                &h,
                *pmax,
                config.cert_depth_max,
                config.ext_degree_cap,
                config.box_volume_cap,
            )?;
            Ok(envelope(
                "deligne criteria",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "pmax": pmax,
                    "p_intersective": {
                        "certified": report.p_intersective_certified,
                        "failures": report.p_intersective_failures,
                        "unknown": report.p_intersective_unknown,
                    },
                    "deligne_over_q": criterion_json(&report.deligne_over_q),
                    "criteria": {
                        "i": criterion_json(&report.criterion_i),
                        "ii": criterion_json(&report.criterion_ii),
                        "iii": criterion_json(&report.criterion_iii),
                        "iv": criterion_json(&report.criterion_iv),
                    },
                    "any_satisfied": report.any_satisfied(),
                }),
            ))
        }
    }
}

fn require_positive(name: &str, value: u64) -> Result<(), Failure> {
    if value == 0 {
        return Err(Failure::Io(format!("{name} must be positive")));
    }
    Ok(())
}

fn primes_cmd(args: &PrimesArgs, config: &RunConfig) -> Result<Value, Failure> {
    match &args.sub {
        PrimesSub::Psi { x, a, q, weight } => {
            require_positive("--q", *q)?;
            let limit = x.floor().max(0.0) as u64;
            let table = PrimeTable::up_to_capped(limit.max(2), config.prime_limit)?;
            let (value, count, weight_json) = match weight {
                None => {
                    let (v, c) = intersective::primes::psi(&table, *x, *a, *q);
                    (v, c, Value::Null)
                }
                Some(w) => {
                    let g = MultiPoly::parse(w)?;
                    let (v, c) = intersective::primes::psi_weighted(&table, *x, *a, *q, &g)?;
                    (v, c, g.to_json_value())
                }
            };
            Ok(envelope(
                "primes psi",
                config,
                json!({
                    "x": x,
                    "a": a,
                    "q": q,
                    "weight": weight_json,
                    "value": value,
                    "count": count,
                }),
            ))
        }
    }
}

fn sieve_cmd(args: &SieveArgs, config: &RunConfig) -> Result<Value, Failure> {
    match &args.sub {
        SieveSub::Profile { d, y, mode, poly } => {
            require_positive("--d", *d)?;
            let h = MultiPoly::parse(poly)?;
            let choice = choice_for(&h, *mode, &[*d], config)?;
            let auxp = aux::build_aux(&choice, *d)?;
            let profile = sieve::build_profile(&auxp, *y, config.gamma_cap, config.box_volume_cap)?;
            Ok(envelope(
                "sieve profile",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "root_choice": choice_json(&choice),
                    "aux": aux_json(&auxp),
                    "profile": profile_json(&profile),
                }),
            ))
        }
        SieveSub::Sandwich {
            d,
            y,
            box_bound,
            t,
            mode,
            poly,
        } => {
            let h = MultiPoly::parse(poly)?;
            let choice = choice_for(&h, *mode, &[*d], config)?;
            let auxp = aux::build_aux(&choice, *d)?;
            let profile = sieve::build_profile(&auxp, *y, config.gamma_cap, config.box_volume_cap)?;
            let levels: Vec<u32> = match t {
                None => (0..=profile.records.len() as u32).collect(),
                Some(list) => list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<u32>()
                            .map_err(|_| Failure::Io(format!("bad truncation level {s:?}")))
                    })
                    .collect::<Result<_, _>>()?,
            };
            let dims = vec![*box_bound; h.nvars()];
            let report =
                sieve::sieve_sum_sandwich(&auxp, &profile, &dims, &levels, config.box_volume_cap)?;
            Ok(envelope(
                "sieve sandwich",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "root_choice": choice_json(&choice),
                    "profile": profile_json(&profile),
                    "box": report.box_dims,
                    "lambda_points": report.lambda_points,
                    "true_sum": report.true_sum,
                    "truncated": report.truncated.iter().map(|(t, v)| json!({
                        "t": t,
                        "value": v,
                    })).collect::<Vec<_>>(),
                    "exact_certificate": report.exact_certificate,
                    "negative_weight_points": report.negative_weight_points,
                    "violations": report.violations,
                }),
            ))
        }
    }
}

fn parse_alpha(s: &str) -> Result<Alpha, Failure> {
    let s = s.trim();
    if let Some((frac, beta)) = s.split_once('+') {
        let (a, q) = parse_fraction(frac)?;
        let beta: f64 = beta
            .trim()
            .parse()
            .map_err(|_| Failure::Io(format!("bad beta {beta:?}")))?;
        return Ok(Alpha::with_offset(a, q, beta)?);
    }
    if s.contains('/') {
        let (a, q) = parse_fraction(s)?;
        return Ok(Alpha::rational(a, q)?);
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Failure::Io(format!("bad alpha {s:?}")))?;
    Ok(Alpha::Real(x))
}

fn parse_fraction(s: &str) -> Result<(u64, u64), Failure> {
    let (a, q) = s
        .trim()
        .split_once('/')
        .ok_or_else(|| Failure::Io(format!("expected a/q, got {s:?}")))?;
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|_| Failure::Io(format!("bad numerator {a:?}")))?;
    let q: u64 = q
        .trim()
        .parse()
        .map_err(|_| Failure::Io(format!("bad denominator {q:?}")))?;
    Ok((a, q))
}

fn parse_rational(s: &str) -> Result<BigRational, Failure> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Failure::Io(format!("bad rational {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Failure::Io(format!("bad rational {s:?}")))?;
    if den.is_zero() {
        return Err(Failure::Io("rational with zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

fn load_items(path: &std::path::Path) -> Result<Vec<String>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let values: Vec<Value> = serde_json::from_str(trimmed)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        return values
            .into_iter()
            .map(|v| match v {
                Value::String(s) => Ok(s),
                Value::Number(n) => Ok(n.to_string()),
                other => Err(Failure::Io(format!("unexpected entry {other}"))),
            })
            .collect();
    }
    Ok(trimmed
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

fn expsum_cmd(args: &ExpsumArgs, config: &RunConfig) -> Result<Value, Failure> {
    match &args.sub {
        ExpsumSub::Complete { p, poly } => {
            let h = MultiPoly::parse(poly)?;
            let s = expsum::complete_sum(&h, *p, config.box_volume_cap)?;
            let k = h.reduce_mod(*p).degree().unwrap_or(0);
            Ok(envelope(
                "expsum complete",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "p": p,
                    "re": s.re,
                    "im": s.im,
                    "magnitude": s.abs(),
                    "phase": s.arg(),
                    "deligne_bound": expsum::deligne_bound(k, h.nvars(), *p),
                }),
            ))
        }
        ExpsumSub::Local {
            a,
            q,
            d,
            y,
            mode,
            poly,
        } => {
            let h = MultiPoly::parse(poly)?;
            let choice = choice_for(&h, *mode, &[*d], config)?;
            let auxp = aux::build_aux(&choice, *d)?;
            let profile = sieve::build_profile(&auxp, *y, config.gamma_cap, config.box_volume_cap)?;
            let g = expsum::local_sum_g(&auxp, &profile, *a, *q, config.box_volume_cap)?;
            Ok(envelope(
                "expsum local",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "root_choice": choice_json(&choice),
                    "a": a,
                    "q": q,
                    "d": d,
                    "y": y,
                    "re": g.re,
                    "im": g.im,
                    "magnitude": g.abs(),
                }),
            ))
        }
        ExpsumSub::Salpha {
            alpha,
            m,
            d,
            y,
            mode,
            poly,
        } => {
            let h = MultiPoly::parse(poly)?;
            let choice = choice_for(&h, *mode, &[*d], config)?;
            let auxp = aux::build_aux(&choice, *d)?;
            let profile = sieve::build_profile(&auxp, *y, config.gamma_cap, config.box_volume_cap)?;
            let alpha_parsed = parse_alpha(alpha)?;
            let s = expsum::s_alpha(&auxp, &profile, *m, &alpha_parsed, config.box_volume_cap)?;
            Ok(envelope(
                "expsum salpha",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "root_choice": choice_json(&choice),
                    "alpha": alpha,
                    "alpha_value": alpha_parsed.value(),
                    "m": m,
                    "d": d,
                    "y": y,
                    "re": s.re,
                    "im": s.im,
                    "magnitude": s.abs(),
                }),
            ))
        }
        ExpsumSub::Energy {
            m,
            eps,
            set,
            qbound,
        } => {
            let items = load_items(set)?;
            let b: Vec<BigRational> = items
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<_, _>>()?;
            let eps = match eps {
                None => BigRational::zero(),
                Some(s) => parse_rational(s)?,
            };
            let energy = expsum::additive_energy(&b, *m, &eps, config.box_volume_cap)?;
            let bound = match qbound {
                None => Value::Null,
                Some(qb) => {
                    let r = expsum::bme_bound_check(&b, *m, *qb, 4, config.box_volume_cap)?;
                    json!({
                        "q_bound": r.q_bound,
                        "n_max": r.n_max.to_string(),
                        "ratio": r.ratio,
                        "log_exponent": r.log_exponent,
                        "holds": r.holds,
                    })
                }
            };
            Ok(envelope(
                "expsum energy",
                config,
                json!({
                    "set_size": b.len(),
                    "m": m,
                    "eps": eps.to_string(),
                    "energy": energy.to_string(),
                    "bound_check": bound,
                }),
            ))
        }
    }
}

fn extremal_cmd(args: &ExtremalArgs, config: &RunConfig) -> Result<Output, Failure> {
    match &args.sub {
        ExtremalSub::Dtable {
            poly,
            nmax,
            steps,
            d,
            unrestricted,
            mode,
        } => {
            require_positive("--d", *d)?;
            let h = MultiPoly::parse(poly)?;
            let choice = choice_for(&h, *mode, &[*d], config)?;
            let auxp = aux::build_aux(&choice, *d)?;
            let restrict = if *unrestricted {
                InputRestriction::AllIntegers
            } else {
                InputRestriction::Primes
            };
            let n_values: Vec<u64> = (1..=*steps)
                .map(|i| (nmax * i) / steps)
                .filter(|&n| n >= 2)
                .collect();
            let rows = extremal::d_table(
                &auxp,
                &n_values,
                restrict,
                config.exhaustive_n_cap,
                config.branch_and_bound_n_cap,
                config.box_volume_cap,
            )?;
            if config.output == intersective::config::OutputFormat::Csv {
                let mut csv = String::from("N,x_size,D,ratio,method,optimal\n");
                for r in &rows {
                    csv.push_str(&format!(
                        "{},{},{},{},{:?},{}\n",
                        r.n_ambient, r.x_size, r.d_value, r.ratio, r.method, r.optimal
                    ));
                }
                return Ok(Output::Text(csv));
            }
            Ok(Output::Json(envelope(
                "extremal dtable",
                config,
                json!({
                    "polynomial": h.to_json_value(),
                    "root_choice": choice_json(&choice),
                    "d": d,
                    "inputs": if *unrestricted { "all integers" } else { "primes" },
                    "rows": rows.iter().map(|r| json!({
                        "N": r.n_ambient,
                        "x_size": r.x_size,
                        "D": r.d_value,
                        "ratio": r.ratio,
                        "method": format!("{:?}", r.method),
                        "optimal": r.optimal,
                    })).collect::<Vec<_>>(),
                }),
            )))
        }
        ExtremalSub::Solve { x_file, n } => {
            let items = load_items(x_file)?;
            let values: Vec<u64> = items
                .iter()
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|_| Failure::Io(format!("bad difference value {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            let x = extremal::DifferenceSet {
                n_ambient: *n,
                values: values
                    .into_iter()
                    .filter(|&v| v >= 1 && v < *n)
                    .collect::<BTreeSet<u64>>()
                    .into_iter()
                    .collect(),
                provenance: format!("file {}", x_file.display()),
            };
            let solved = extremal::max_free_subset(
                &x,
                config.exhaustive_n_cap,
                config.branch_and_bound_n_cap,
            )?;
            if !extremal::is_difference_free(&solved.witness, &x.values) {
                return Err(Failure::Core(intersective::Error::Invalid(
                    "witness re-verification failed".into(),
                )));
            }
            Ok(Output::Json(envelope(
                "extremal solve",
                config,
                json!({
                    "N": n,
                    "x": x.values,
                    "D": solved.size,
                    "witness": solved.witness,
                    "method": format!("{:?}", solved.method),
                    "optimal": solved.optimal,
                }),
            )))
        }
        ExtremalSub::Increment {
            set_file,
            q,
            gamma,
            ambient,
            theta,
        } => {
            let items = load_items(set_file)?;
            let a_set: Vec<u64> = items
                .iter()
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|_| Failure::Io(format!("bad set element {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            let l = ambient.unwrap_or_else(|| a_set.iter().copied().max().unwrap_or(1));
            let report = extremal::increment_step(&a_set, l, *q, *gamma, *theta)?;
            let outcome = match &report.outcome {
                IncrementOutcome::HypothesisNotMet { mass, required } => json!({
                    "hypothesis_met": false,
                    "mass": mass,
                    "required": required,
                }),
                IncrementOutcome::Found {
                    progression,
                    target_density,
                    conclusion_holds,
                } => json!({
                    "hypothesis_met": true,
                    "progression": {
                        "x": progression.x,
                        "q": progression.q,
                        "length": progression.len,
                        "intersection": progression.intersection,
                        "density": progression.density,
                    },
                    "target_density": target_density,
                    "conclusion_holds": conclusion_holds,
                }),
            };
            Ok(Output::Json(envelope(
                "extremal increment",
                config,
                json!({
                    "set_size": a_set.len(),
                    "L": l,
                    "q": q,
                    "gamma": gamma,
                    "delta": report.delta,
                    "theta": report.theta,
                    "mass": report.mass,
                    "base_length": report.base_length,
                    "outcome": outcome,
                }),
            )))
        }
    }
}

fn verify_cmd(args: &VerifyArgs, config: &RunConfig) -> Result<Value, Failure> {
    let reports = match args.only {
        Some(id) => vec![acceptance::run_criterion(id, config)],
        None => acceptance::run_all(config),
    };
    let mut failures = 0usize;
    for r in &reports {
        eprintln!("{}", r.line());
        if !r.passed {
            failures += 1;
        }
    }
    let body = json!({
        "criteria": reports.iter().map(|r| json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed,
            "details": r.details,
        })).collect::<Vec<_>>(),
        "failures": failures,
    });
    let out = envelope("verify", config, body);
    if failures > 0 {
        // still print the report before the nonzero exit
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializable output")
        );
        return Err(Failure::VerifyFailed(failures));
    }
    Ok(out)
}
