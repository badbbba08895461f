//! `qfp`: generate codes, scan errors, estimate leakage, run attacks and
//! protocols, and validate concentration bounds. Reports are JSON or CSV.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use qfp_core::bounds::{validate_all, SuiteBudget};
use qfp_core::classical::{classical_report, HashFamily, HashScheme};
use qfp_core::codes::{parameter_recipe, sample_code, sample_distinct_column_code, CodeFile};
use qfp_core::fingerprint::{error_scan, mixed_fingerprint, ScanMode, EXHAUSTIVE_SCAN_LIMIT};
use qfp_core::leakage::{extraction_attack_from, leakage_report, MixedScheme, DEFAULT_ITERS, DEFAULT_RESTARTS};
use qfp_core::protocols::{one_way_equality, smp_equality};
use qfp_core::{BitString, CodeParams, QuasiLinearCode, SeedStream};

use report::{Envelope, Format};

const DEFAULT_SEED: u64 = 0;
const DEFAULT_BASES: usize = 100;
const DEFAULT_PAIRS: u64 = 100_000;
const DEFAULT_TRIES: usize = 100_000;
/// `eps_minus` above this fails an error scan.
const EPS_MINUS_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "qfp", version, about = "Hiding quantum fingerprint experiments")]
struct Cli {
    /// JSON file of defaults; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; falls back to the config file, then QFP_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Embed the wall-clock duration in the report instead of stderr.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Code parameters from the asymptotic formulas.
    Recipe(RecipeArgs),
    /// Sample a random quasi-linear code.
    GenCode(GenCodeArgs),
    /// Fingerprint of one input.
    Fingerprint(FingerprintArgs),
    /// Worst-case false-accept and false-reject probabilities.
    ErrorScan(ErrorScanArgs),
    /// Functional maximum and random-basis extraction summary.
    Leakage(LeakageArgs),
    /// Random-basis extraction attack on the mixed fingerprints.
    Extract(ExtractArgs),
    /// Exact leakage of a classical hash fingerprint.
    Classical(ClassicalArgs),
    /// Simultaneous-message equality test via the swap test.
    Smp(PairArgs),
    /// One-way equality test with the projective verifier.
    OneWay(PairArgs),
    /// Monte Carlo validation of the concentration bounds.
    ValidateBounds(ValidateArgs),
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct RecipeArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    /// Force k = 0.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pure: bool,
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct GenCodeArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    /// Resample until the linear columns are pairwise distinct.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    distinct: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_tries: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct FingerprintArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<PathBuf>,
    /// Input as hex, most significant nibble first.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    /// Rank parameter; defaults to the code's k.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct ErrorScanArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<PathBuf>,
    /// Scan every pair; the default for small codes.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    exhaustive: bool,
    /// Number of sampled pairs when not exhaustive.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pairs: Option<u64>,
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct LeakageArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    iters: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    bases: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct ExtractArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    bases: Option<usize>,
    /// Index of the first basis, for splitting a run across invocations.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    first: Option<u64>,
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct ClassicalArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[arg(long, value_parser = parse_family)]
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<HashFamily>,
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct PairArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<PathBuf>,
    /// Alice's input as hex.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<String>,
    /// Bob's input as hex.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<String>,
    /// Swap-test repetitions (smp only).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
}

#[derive(Args, Debug, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
struct ValidateArgs {
    /// Multiplier on the default sample budgets.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn parse_family(s: &str) -> Result<HashFamily, String> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| format!("unknown family {s:?}; expected gf2-affine, identity or constant"))
}

/// Why a run stopped short of a clean exit.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<qfp_core::Error> for Failure {
    fn from(e: qfp_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Run<T> = Result<T, Failure>;

fn required<T>(v: Option<T>, flag: &str) -> Run<T> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

/// Overlays the explicit flags on the config file and deserializes the
/// result; the merged object is what the report records.
fn resolve<T: Serialize + DeserializeOwned>(flags: &T, file: &Value) -> Run<(T, Value)> {
    let top = serde_json::to_value(flags).map_err(|e| Failure::Runtime(e.to_string()))?;
    let merged = report::merge(file.clone(), top);
    let args: T = serde_json::from_value(merged).map_err(|e| Failure::Usage(format!("bad config: {e}")))?;
    let canonical = serde_json::to_value(&args).map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok((args, canonical))
}

fn load_code(path: &PathBuf) -> Run<QuasiLinearCode> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    // reports from gen-code wrap the code file in an envelope
    if let Some(inner) = v.get_mut("result").map(Value::take) {
        v = inner;
    }
    let file: CodeFile = serde_json::from_value(v).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(QuasiLinearCode::from_file(&file)?)
}

fn parse_input(hex: &str, n: usize) -> Run<BitString> {
    Ok(BitString::from_hex(hex, n)?)
}

fn to_value(x: &impl Serialize) -> Run<Value> {
    serde_json::to_value(x).map_err(|e| Failure::Runtime(e.to_string()))
}

/// Result payload, resolved config and whether every check passed.
struct Outcome {
    config: Value,
    result: Value,
    passed: bool,
}

fn run_command(cmd: &Command, file: &Value, seed: u64) -> Run<Outcome> {
    let stream = SeedStream::new(seed);
    let ok = |config: Value, result: Value| Ok(Outcome { config, result, passed: true });
    match cmd {
        Command::Recipe(flags) => {
            let (a, config) = resolve(flags, file)?;
            let r = parameter_recipe(required(a.n, "n")?, required(a.c, "c")?, a.pure)?;
            ok(config, to_value(&r)?)
        }
        Command::GenCode(flags) => {
            let (a, config) = resolve(flags, file)?;
            let p = CodeParams::new(
                required(a.n, "n")?,
                required(a.k, "k")?,
                required(a.r, "r")?,
                required(a.d, "d")?,
            )?;
            let mut rng = stream.rng();
            let code = if a.distinct {
                sample_distinct_column_code(p, &mut rng, a.max_tries.unwrap_or(DEFAULT_TRIES))?
            } else {
                sample_code(p, &mut rng)?
            };
            ok(config, to_value(&code.with_seed(seed).to_file())?)
        }
        Command::Fingerprint(flags) => {
            let (a, config) = resolve(flags, file)?;
            let code = load_code(&required(a.code, "code")?)?;
            let x = parse_input(&required(a.input, "input")?, code.params().n)?;
            let fp = mixed_fingerprint(&code, &x, a.k.unwrap_or(code.params().k))?;
            ok(config, to_value(&fp.to_file())?)
        }
        Command::ErrorScan(flags) => {
            let (a, config) = resolve(flags, file)?;
            let code = load_code(&required(a.code, "code")?)?;
            let exhaustive = a.exhaustive || (a.pairs.is_none() && code.params().n <= EXHAUSTIVE_SCAN_LIMIT);
            let mode = if exhaustive {
                ScanMode::Exhaustive
            } else {
                ScanMode::Sampled {
                    pairs: a.pairs.unwrap_or(DEFAULT_PAIRS),
                    seed,
                }
            };
            let rep = error_scan(&code, mode)?;
            Ok(Outcome {
                config,
                passed: rep.eps_minus <= EPS_MINUS_TOL,
                result: to_value(&rep)?,
            })
        }
        Command::Leakage(flags) => {
            let (a, config) = resolve(flags, file)?;
            let code = load_code(&required(a.code, "code")?)?;
            let rep = leakage_report(
                &code,
                a.restarts.unwrap_or(DEFAULT_RESTARTS),
                a.iters.unwrap_or(DEFAULT_ITERS),
                a.bases.unwrap_or(DEFAULT_BASES),
                seed,
            )?;
            ok(config, to_value(&rep)?)
        }
        Command::Extract(flags) => {
            let (a, config) = resolve(flags, file)?;
            let code = load_code(&required(a.code, "code")?)?;
            let res = extraction_attack_from(
                &MixedScheme::new(&code)?,
                a.first.unwrap_or(0),
                a.bases.unwrap_or(DEFAULT_BASES),
                stream,
            )?;
            ok(config, to_value(&res)?)
        }
        Command::Classical(flags) => {
            let (a, config) = resolve(flags, file)?;
            let scheme = HashScheme::new(
                required(a.n, "n")?,
                required(a.m, "m")?,
                a.family.unwrap_or(HashFamily::Gf2Affine),
                seed,
            )?;
            let rep = classical_report(&scheme)?;
            Ok(Outcome {
                config,
                passed: rep.bound_holds,
                result: to_value(&rep)?,
            })
        }
        Command::Smp(flags) | Command::OneWay(flags) => {
            let (a, config) = resolve(flags, file)?;
            let code = load_code(&required(a.code, "code")?)?;
            let n = code.params().n;
            let x = parse_input(&required(a.x, "x")?, n)?;
            let y = parse_input(&required(a.y, "y")?, n)?;
            let mut rng = stream.rng();
            let t = if matches!(cmd, Command::Smp(_)) {
                smp_equality(&code, &x, &y, a.shots.unwrap_or(1), &mut rng)?
            } else {
                one_way_equality(&code, code.params().k, &x, &y, &mut rng)?
            };
            ok(config, to_value(&t)?)
        }
        Command::ValidateBounds(flags) => {
            let (a, config) = resolve(flags, file)?;
            let budget = SuiteBudget::default().scaled(a.scale.unwrap_or(1.0));
            let results = validate_all(seed, &budget)?;
            Ok(Outcome {
                config,
                passed: results.iter().all(|r| r.passed),
                result: to_value(&results)?,
            })
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Recipe(_) => "recipe",
        Command::GenCode(_) => "gen-code",
        Command::Fingerprint(_) => "fingerprint",
        Command::ErrorScan(_) => "error-scan",
        Command::Leakage(_) => "leakage",
        Command::Extract(_) => "extract",
        Command::Classical(_) => "classical",
        Command::Smp(_) => "smp",
        Command::OneWay(_) => "one-way",
        Command::ValidateBounds(_) => "validate-bounds",
    }
}

fn resolve_seed(flag: Option<u64>, file: &Value) -> Run<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = file.get("seed") {
        return v
            .as_u64()
            .ok_or_else(|| Failure::Usage(format!("config seed must be an unsigned integer, got {v}")));
    }
    match std::env::var("QFP_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("QFP_SEED must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn execute(cli: Cli) -> Run<bool> {
    let start = Instant::now();
    let mut file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<Value>(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    if !file.is_object() {
        return Err(Failure::Usage("config file must hold a JSON object".into()));
    }
    let seed = resolve_seed(cli.seed, &file)?;
    let format = match (cli.format, file.get("format")) {
        (Some(f), _) => f,
        (None, Some(v)) => serde_json::from_value(v.clone()).map_err(|e| Failure::Usage(format!("bad config format: {e}")))?,
        (None, None) => Format::Json,
    };
    if let Some(m) = file.as_object_mut() {
        for key in ["seed", "format", "threads", "out", "timing"] {
            m.remove(key);
        }
    }
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let outcome = run_command(&cli.command, &file, seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut config = outcome.config;
    if let Value::Object(m) = &mut config {
        m.insert("seed".into(), Value::from(seed));
        m.insert("format".into(), to_value(&format)?);
    }
    let envelope = Envelope {
        tool: report::TOOL,
        version: report::VERSION,
        command: command_name(&cli.command).to_string(),
        config,
        seed,
        duration_seconds: cli.timing.then_some(elapsed),
        result: outcome.result,
    };
    let bytes = report::render(&envelope, format)?;
    match &cli.out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    if !cli.timing {
        eprintln!("duration: {elapsed:.3} s");
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed");
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
