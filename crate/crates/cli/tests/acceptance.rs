//! Acceptance gate: one PASS/FAIL line per criterion, every tolerance
//! pinned below. Exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use qfp_core::classical::{classical_report, HashFamily, HashScheme};
use qfp_core::codes::{sample_code, sample_distinct_column_code};
use qfp_core::fingerprint::{error_scan, overlap, ScanMode};
use qfp_core::leakage::{
    completeness_defect, expectation_bound_mc, extraction_attack, iacc_bound_check, lipschitz_check,
    random_rank_one_povm, MixedScheme,
};
use qfp_core::bounds::{validate_all, SuiteBudget, LIPSCHITZ_EPS_MAX};
use qfp_core::linalg::{haar_unit_vector, pure_trace_distance};
use qfp_core::protocols::{smp_equality, swap_test_accept};
use qfp_core::{BitString, CodeParams, QuasiLinearCode, SeedStream, UnitVector};

const SEED: u64 = 20_240_601;

const EPS_MINUS_TOL: f64 = 1e-9;
const OVERLAP_TOL: f64 = 1e-12;
const COLLISION_DELTA: f64 = 0.04;
const DEFECT_TOL: f64 = 1e-8;
const ADVERSARIAL_DEFECT_MIN: f64 = 0.1;
const SIGMAS: f64 = 3.0;
const IACC_TOL: f64 = 1e-7;
const SWAP_EXACT_TOL: f64 = 0.0;
const SWAP_ORACLE_TOL: f64 = 1e-12;

const LIMIT_1: f64 = 60.0;
const LIMIT_3: f64 = 600.0;
const LIMIT_5: f64 = 600.0;
const LIMIT_8: f64 = 60.0;

type Verdict = (bool, String);
type Criterion = (&'static str, Box<dyn Fn(Instant) -> Verdict>);

fn bits(v: u64, n: usize) -> BitString {
    BitString::from_u64(v, n).unwrap()
}

fn code(p: CodeParams, stream: SeedStream) -> QuasiLinearCode {
    sample_code(p, &mut stream.rng()).unwrap()
}

fn distinct(p: CodeParams, stream: SeedStream) -> QuasiLinearCode {
    sample_distinct_column_code(p, &mut stream.rng(), 100_000).unwrap()
}

fn params(n: usize, k: usize, r: usize, d: usize) -> CodeParams {
    CodeParams::new(n, k, r, d).unwrap()
}

fn one_sided_error(s: SeedStream, start: Instant) -> Verdict {
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let k = if i % 2 == 0 { 0 } else { 2 };
        let c = code(params(8, k, 6, 10), s.split(i));
        worst = worst.max(error_scan(&c, ScanMode::Exhaustive).unwrap().eps_minus);
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= EPS_MINUS_TOL && secs < LIMIT_1,
        format!("50 codes, max eps_minus = {worst:e} <= {EPS_MINUS_TOL:e}, {secs:.1} s < {LIMIT_1} s"),
    )
}

/// Dense `+-1/sqrt(2^d)` vector of a codeword.
fn dense(c: &QuasiLinearCode, x: u64) -> Vec<f64> {
    let len = c.params().codeword_len();
    let w = c.encode_index(x);
    let a = (len as f64).sqrt().recip();
    (0..len).map(|i| if w.get(i) { -a } else { a }).collect()
}

fn overlap_identity(s: SeedStream) -> Verdict {
    let mut worst: f64 = 0.0;
    for (i, k) in [0usize, 2].into_iter().enumerate() {
        let c = code(params(8 - k, k, 6 - k, 10), s.split(i as u64));
        let vecs: Vec<Vec<f64>> = (0..256).map(|x| dense(&c, x)).collect();
        for x in 0..256u64 {
            for y in 0..256u64 {
                let ip: f64 = vecs[x as usize].iter().zip(&vecs[y as usize]).map(|(a, b)| a * b).sum();
                let o = overlap(&c, &bits(x, 8), &bits(y, 8)).unwrap();
                worst = worst.max((o - ip.abs()).abs());
            }
        }
    }
    (
        worst <= OVERLAP_TOL,
        format!("all 2 x 65536 pairs at n+k = 8, d = 10, max deviation {worst:e} <= {OVERLAP_TOL:e}"),
    )
}

fn collision_statistics(s: SeedStream, start: Instant) -> Verdict {
    let p = params(8, 0, 6, 12);
    let codes = 100u64;
    let exceed = (0..codes)
        .filter(|&i| error_scan(&code(p, s.split(i)), ScanMode::Exhaustive).unwrap().eps_plus >= COLLISION_DELTA)
        .count();
    let bound = (2.0 * (8.0 + 6.0 - 2f64.powi(11) * COLLISION_DELTA).exp()).min(1.0);
    let sigma = (bound * (1.0 - bound) / codes as f64).sqrt();
    let frac = exceed as f64 / codes as f64;
    let secs = start.elapsed().as_secs_f64();
    (
        frac <= bound + SIGMAS * sigma && secs < LIMIT_3,
        format!(
            "fraction with eps_plus >= {COLLISION_DELTA} is {frac} <= {bound:e} + 3 sigma, {secs:.1} s < {LIMIT_3} s"
        ),
    )
}

fn completeness(s: SeedStream) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    for (i, p) in [params(8, 0, 1, 5), params(6, 1, 1, 4), params(8, 2, 2, 4), params(7, 0, 1, 4)]
        .into_iter()
        .enumerate()
    {
        for j in 0..5u64 {
            let c = distinct(p, s.split(i as u64).split(j));
            worst = worst.max(completeness_defect(&c, p.k).unwrap());
            tested += 1;
        }
    }
    // columns 0 and 1 coincide and every nonlinear row agrees on them
    let p = params(4, 0, 1, 3);
    let cols: Vec<BitString> = [0u64, 0, 1, 2, 3, 4, 5, 6].iter().map(|&c| bits(c, 3)).collect();
    let adversarial = QuasiLinearCode::from_parts(p, &cols, vec![bits(0b1010_0000, 8), bits(0b0101_0011, 8)]).unwrap();
    let bad = completeness_defect(&adversarial, 0).unwrap();
    (
        worst <= DEFECT_TOL && bad > ADVERSARIAL_DEFECT_MIN,
        format!(
            "{tested} distinct-column codes, max defect {worst:e} <= {DEFECT_TOL:e}; equal-column defect {bad} > {ADVERSARIAL_DEFECT_MIN}"
        ),
    )
}

fn expectation_bound(s: SeedStream, start: Instant) -> Verdict {
    let p = params(8, 0, 4, 10);
    let v = haar_unit_vector(p.codeword_len(), &mut s.fork("v").rng()).unwrap();
    let mc = expectation_bound_mc(p, &v, 0x5a, 10_000, s.fork("codes")).unwrap();
    let secs = start.elapsed().as_secs_f64();
    (
        mc.mean + SIGMAS * mc.stderr < mc.bound && secs < LIMIT_5,
        format!(
            "mean {:e} + 3 x {:e} < 23/2^8 = {:e}, {secs:.1} s < {LIMIT_5} s",
            mc.mean, mc.stderr, mc.bound
        ),
    )
}

fn rank_hiding(s: SeedStream) -> Verdict {
    let run = |k: usize| {
        let c = code(params(6, k, 5, 8), s.fork(&format!("code-{k}")));
        extraction_attack(&MixedScheme::new(&c).unwrap(), 200, s.fork(&format!("bases-{k}"))).unwrap()
    };
    let (pure, mixed) = (run(0), run(3));
    let se = (pure.stderr_bits.powi(2) + mixed.stderr_bits.powi(2)).sqrt();
    (
        mixed.mean_bits + SIGMAS * se < pure.mean_bits && mixed.mean_bits > 0.0,
        format!(
            "k=3: {:.6} bits, k=0: {:.6} bits, gap > 3 x {se:e}, both > 0",
            mixed.mean_bits, pure.mean_bits
        ),
    )
}

fn iacc_convexity(s: SeedStream) -> Verdict {
    let codes = [
        (distinct(params(8, 2, 2, 5), s.fork("a")), 2usize),
        (distinct(params(7, 0, 1, 4), s.fork("b")), 0),
    ];
    let mut worst = f64::NEG_INFINITY;
    for t in 0..100u64 {
        let (c, k) = &codes[(t % 2) as usize];
        let dim = c.params().codeword_len();
        let povm = random_rank_one_povm(dim, dim + 8, &mut s.fork("povm").split(t).rng()).unwrap();
        let chk = iacc_bound_check(c, *k, &povm).unwrap();
        worst = worst.max(chk.mutual_information - chk.max_functional);
    }
    (
        worst <= IACC_TOL,
        format!("100 POVMs, max (I - max_j F(v_j)) = {worst:e} <= {IACC_TOL:e}"),
    )
}

fn classical_no_go(start: Instant) -> Verdict {
    let rep = classical_report(&HashScheme::new(6, 3, HashFamily::Gf2Affine, 0).unwrap()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    (
        rep.bound_holds && secs < LIMIT_8,
        format!(
            "I = {:.10} bits vs (1 - {}) log2(1/{}) = {} bits, {secs:.1} s < {LIMIT_8} s",
            rep.mi_bits, rep.eps_minus, rep.eps_plus, rep.lower_bound_bits
        ),
    )
}

fn swap_test(s: SeedStream) -> Verdict {
    let c = code(params(8, 0, 6, 10), s.fork("code"));
    let mut rng = s.fork("shots").rng();
    let mut ok = true;
    let mut worst_exact: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    let shots = 10_000u64;
    for (x, y) in [(0u64, 1u64), (3, 200), (77, 78), (255, 128)] {
        let t = smp_equality(&c, &bits(x, 8), &bits(y, 8), shots, &mut rng).unwrap();
        let o = overlap(&c, &bits(x, 8), &bits(y, 8)).unwrap();
        worst_exact = worst_exact.max((t.accept_probability - (1.0 + o * o) / 2.0).abs());
        let ip: f64 = dense(&c, x).iter().zip(dense(&c, y)).map(|(a, b)| a * b).sum();
        worst_oracle = worst_oracle.max((t.accept_probability - swap_test_accept(ip)).abs());
        let p = t.accept_probability;
        let z = (t.accepts as f64 - shots as f64 * p).abs() / (shots as f64 * p * (1.0 - p)).sqrt();
        worst_z = worst_z.max(z);
    }
    for x in [0u64, 5, 99, 255] {
        let t = smp_equality(&c, &bits(x, 8), &bits(x, 8), 1000, &mut rng).unwrap();
        ok &= t.accepts == 1000;
    }
    ok &= worst_exact <= SWAP_EXACT_TOL && worst_oracle <= SWAP_ORACLE_TOL && worst_z <= SIGMAS;
    (
        ok,
        format!(
            "exact gap {worst_exact:e}, oracle gap {worst_oracle:e} <= {SWAP_ORACLE_TOL:e}, max |z| {worst_z:.3} <= 3 over {shots} shots, x = y always accepted"
        ),
    )
}

fn toolkit(s: SeedStream) -> Verdict {
    let suites = validate_all(s.seed(), &SuiteBudget::default()).unwrap();
    let failed: Vec<&str> = suites.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let c = distinct(params(7, 0, 1, 4), s.fork("lipschitz-code"));
    let mut rng = s.fork("lipschitz").rng();
    let mut held = 0;
    let mut pairs = 0;
    while pairs < 1000 {
        let v = haar_unit_vector(16, &mut rng).unwrap();
        let z = haar_unit_vector(16, &mut rng).unwrap();
        let t = rand_scale(pairs);
        let w = UnitVector::normalized(v.amplitudes().iter().zip(z.amplitudes()).map(|(a, b)| a + b * t).collect()).unwrap();
        if pure_trace_distance(&v, &w) > LIPSCHITZ_EPS_MAX {
            continue;
        }
        pairs += 1;
        held += usize::from(lipschitz_check(&c, 0, &v, &w).unwrap().holds);
    }
    (
        failed.is_empty() && held == pairs,
        format!(
            "{} suites, failed {:?}; Lipschitz held on {held}/{pairs} pairs with eps <= 2/e",
            suites.len(),
            failed
        ),
    )
}

/// Perturbation sizes sweeping four decades.
fn rand_scale(i: usize) -> f64 {
    10f64.powf(-3.0 + 3.0 * (i % 100) as f64 / 100.0)
}

fn reproducibility() -> Verdict {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("qfp-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let code = dir.join("code.json");
    let code = code.to_str().unwrap();
    let run = |args: &[&str], threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_qfp"))
            .args(args)
            .args(["--seed", "11", "--threads", threads])
            .env_remove("QFP_SEED")
            .output()
            .unwrap();
        (out.status.code(), out.stdout)
    };
    let gen = ["gen-code", "--n", "6", "--k", "2", "--r", "4", "--d", "7", "--out", code];
    run(&gen, "1");
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen-code", "--n", "6", "--k", "2", "--r", "4", "--d", "7"],
        vec!["error-scan", "--code", code, "--pairs", "5000"],
        vec!["leakage", "--code", code, "--restarts", "8", "--iters", "40", "--bases", "8"],
        vec!["extract", "--code", code, "--bases", "16"],
        vec!["classical", "--n", "5", "--m", "2", "--format", "csv"],
        vec!["one-way", "--code", code, "--x", "15", "--y", "16"],
        vec!["validate-bounds", "--scale", "0.01"],
    ];
    let mut mismatched = Vec::new();
    for args in &commands {
        let base = run(args, "1");
        for t in ["1", "2", "4"] {
            if run(args, t) != base {
                mismatched.push(format!("{} @ {t} threads", args[0]));
            }
        }
    }
    (
        mismatched.is_empty(),
        format!("{} commands x threads {{1, 1, 2, 4}} byte-identical; mismatches {:?}", commands.len(), mismatched),
    )
}

fn main() -> ExitCode {
    let root = SeedStream::new(SEED);
    let criteria: Vec<Criterion> = vec![
        ("one-sided error", Box::new(move |t| one_sided_error(root.fork("1"), t))),
        ("overlap identity", Box::new(move |_| overlap_identity(root.fork("2")))),
        ("collision-bound statistics", Box::new(move |t| collision_statistics(root.fork("3"), t))),
        ("completeness", Box::new(move |_| completeness(root.fork("4")))),
        ("expectation bound", Box::new(move |t| expectation_bound(root.fork("5"), t))),
        ("hiding improves with rank", Box::new(move |_| rank_hiding(root.fork("6")))),
        ("accessible-information convexity", Box::new(move |_| iacc_convexity(root.fork("7")))),
        ("classical no-go", Box::new(classical_no_go)),
        ("swap test", Box::new(move |_| swap_test(root.fork("9")))),
        ("toolkit validation", Box::new(move |_| toolkit(root.fork("10")))),
        ("reproducibility", Box::new(|_| reproducibility())),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = check(start);
        failures += usize::from(!passed);
        println!(
            "criterion {:>2} {name:<34} {} ({detail}) [{:.1} s]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
