//! Concentration and anti-concentration bounds, with Monte Carlo harnesses
//! that try to falsify them.
//!
//! A harness compares an empirical statistic against the analytic value
//! with a slack of three standard errors. Work is cut into fixed-size
//! chunks, chunk `c` drawing from `stream.split(c)`, so results do not
//! depend on the number of threads.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::linalg::{haar_basis, haar_unit_vector, pure_trace_distance, DensityOperator, UnitVector, C64};
use crate::parallel;
use crate::rng::{SeedStream, StreamRng};

/// Standard errors of slack granted to every statistical comparison.
pub const SIGMAS: f64 = 3.0;
/// Bounds below this cannot be resolved by a practical sample.
pub const POWER_FLOOR: f64 = 1e-7;
const CHUNK: usize = 4096;

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    /// `min(value, 1)`.
    pub clamped: f64,
}

impl BoundValue {
    fn new(value: f64) -> Self {
        Self {
            value,
            clamped: value.min(1.0),
        }
    }
}

/// `P[|sum X_i - sum mu_i| >= t] <= 2 exp(-2 t^2 / sum (b_i - a_i)^2)`.
pub fn hoeffding_bound(t: f64, ranges: &[(f64, f64)]) -> Result<BoundValue> {
    positive("t", t)?;
    let s: f64 = ranges.iter().map(|(a, b)| (b - a).powi(2)).sum();
    if ranges.is_empty() || ranges.iter().any(|(a, b)| !(b > a)) {
        return Err(Error::InvalidArgument("ranges must be non-degenerate".into()));
    }
    Ok(BoundValue::new(2.0 * (-2.0 * t * t / s).exp()))
}

/// `P[|sum X_i| >= t] <= 4 exp(-t^2 / (4 sum |c_i|^2))` for centered complex
/// summands with `|X_i| <= c_i`.
pub fn complex_hoeffding_bound(t: f64, moduli: &[f64]) -> Result<f64> {
    positive("t", t)?;
    let s: f64 = moduli.iter().map(|c| c * c).sum();
    positive("sum of squared moduli", s)?;
    Ok(4.0 * (-t * t / (4.0 * s)).exp())
}

/// `E exp(hY) <= exp(c + ln(2 beta / c)^2 h^2 / (2 alpha^2))`.
pub fn mgf_bound(h: f64, c: f64, alpha: f64, beta: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    if !(h > 0.0 && h <= alpha / 2.0) {
        return Err(Error::InvalidArgument(format!("h must lie in (0, alpha/2], got {h}")));
    }
    if !(c > 0.0 && c <= 2.0) {
        return Err(Error::InvalidArgument(format!("c must lie in (0, 2], got {c}")));
    }
    if !(beta >= 1.0) {
        return Err(Error::InvalidArgument(format!("beta must be at least 1, got {beta}")));
    }
    let l = (2.0 * beta / c).ln();
    Ok((c + l * l * h * h / (2.0 * alpha * alpha)).exp())
}

/// `P[S_n / n >= mu + t] <= exp(-n t^2 alpha^2 / (244 ln(beta / (t alpha))^2))`.
pub fn relaxed_chernoff_bound(n: u64, t: f64, alpha: f64, beta: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    if !(t > 0.0 && t <= 1.0 / (7.0 * alpha)) {
        return Err(Error::InvalidArgument(format!(
            "t must lie in (0, 1/(7 alpha)], got {t}"
        )));
    }
    if !(beta >= 1.0) {
        return Err(Error::InvalidArgument(format!("beta must be at least 1, got {beta}")));
    }
    let l = (beta / (t * alpha)).ln();
    Ok((-(n as f64) * t * t * alpha * alpha / (244.0 * l * l)).exp())
}

/// `(4 / eps)^{2(D-1)}`.
pub fn eps_net_size_bound(dim: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 2], got {eps}")));
    }
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok((4.0 / eps).powi(2 * (dim as i32 - 1)))
}

/// The exceedance margin `1 / (88 D^2 ln D)`.
pub fn anticoncentration_margin(dim: usize) -> f64 {
    let d = dim as f64;
    1.0 / (88.0 * d * d * d.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Probability must not exceed the bound.
    Tail,
    /// Sample mean must not exceed the bound.
    Expectation,
    /// Probability must equal the stated value.
    Exact,
    /// Statistic must not exceed the critical value.
    GoodnessOfFit,
    /// Probability must be strictly positive.
    Positivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Passed,
    Failed,
    InsufficientPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheckResult {
    pub name: String,
    pub kind: CheckKind,
    pub bound_value: f64,
    pub empirical: f64,
    /// Standard error used for the slack.
    pub stderr: f64,
    pub samples: u64,
    pub status: CheckStatus,
    pub passed: bool,
    pub detail: BTreeMap<String, f64>,
}

impl TailCheckResult {
    fn finish(
        name: &str,
        kind: CheckKind,
        bound_value: f64,
        empirical: f64,
        stderr: f64,
        samples: u64,
        detail: BTreeMap<String, f64>,
    ) -> Self {
        let slack = SIGMAS * stderr;
        let status = match kind {
            CheckKind::Tail if bound_value < POWER_FLOOR => CheckStatus::InsufficientPower,
            CheckKind::Tail | CheckKind::Expectation if empirical <= bound_value + slack => CheckStatus::Passed,
            CheckKind::Exact if (empirical - bound_value).abs() <= slack => CheckStatus::Passed,
            CheckKind::GoodnessOfFit if empirical <= bound_value => CheckStatus::Passed,
            CheckKind::Positivity if empirical > 0.0 => CheckStatus::Passed,
            _ => CheckStatus::Failed,
        };
        Self {
            name: name.to_string(),
            kind,
            bound_value,
            empirical,
            stderr,
            samples,
            status,
            passed: status == CheckStatus::Passed,
            detail,
        }
    }
}

/// Binomial standard error at probability `p`, clamped into `[0, 1]`.
fn binomial_stderr(p: f64, samples: u64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / samples as f64).sqrt()
}

/// Runs `f(rng, count)` over fixed chunks and returns the per-chunk results
/// in chunk order.
fn chunked<T, F>(total: u64, stream: SeedStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, u64) -> T + Sync + Send,
{
    let chunks = (total as usize).div_ceil(CHUNK);
    parallel::map_range(chunks, |c| {
        let start = (c * CHUNK) as u64;
        let count = (total - start).min(CHUNK as u64);
        f(&mut stream.split(c as u64).rng(), count)
    })
}

fn count_hits<F>(samples: u64, stream: SeedStream, hit: F) -> u64
where
    F: Fn(&mut StreamRng) -> bool + Sync + Send,
{
    chunked(samples, stream, |rng, count| (0..count).filter(|_| hit(rng)).count() as u64)
        .into_iter()
        .sum()
}

/// Sample mean and its standard error.
fn mean_stderr<F>(samples: u64, stream: SeedStream, draw: F) -> (f64, f64)
where
    F: Fn(&mut StreamRng) -> f64 + Sync + Send,
{
    let parts = chunked(samples, stream, |rng, count| {
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..count {
            let x = draw(rng);
            s += x;
            s2 += x * x;
        }
        (s, s2)
    });
    let (s, s2) = parts.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

fn detail(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Sums of `n` fair `+-1` coins against the Hoeffding bound at `t`.
pub fn hoeffding_suite(n: u32, t: f64, samples: u64, stream: SeedStream) -> Result<TailCheckResult> {
    let bound = hoeffding_bound(t, &vec![(-1.0, 1.0); n as usize])?;
    let hits = count_hits(samples, stream, |rng| {
        let mut ones = 0i64;
        let mut left = n;
        while left > 0 {
            let take = left.min(64);
            let word: u64 = rng.random();
            let word = if take == 64 { word } else { word & ((1 << take) - 1) };
            ones += word.count_ones() as i64;
            left -= take;
        }
        let sum = 2 * ones - n as i64;
        sum.unsigned_abs() as f64 >= t
    });
    let p = hits as f64 / samples as f64;
    Ok(TailCheckResult::finish(
        "hoeffding",
        CheckKind::Tail,
        bound.value,
        p,
        binomial_stderr(bound.clamped, samples),
        samples,
        detail(&[("n", n as f64), ("t", t), ("bound_clamped", bound.clamped)]),
    ))
}

/// Sums of `n` unit summands with uniform random phase against the complex
/// Hoeffding bound.
pub fn complex_hoeffding_suite(n: u32, t: f64, samples: u64, stream: SeedStream) -> Result<TailCheckResult> {
    let bound = complex_hoeffding_bound(t, &vec![1.0; n as usize])?;
    let hits = count_hits(samples, stream, |rng| {
        let s: C64 = (0..n)
            .map(|_| C64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI))
            .sum();
        s.norm() >= t
    });
    let p = hits as f64 / samples as f64;
    Ok(TailCheckResult::finish(
        "complex-hoeffding",
        CheckKind::Tail,
        bound,
        p,
        binomial_stderr(bound, samples),
        samples,
        detail(&[("n", n as f64), ("t", t)]),
    ))
}

/// Real `+-1` summands checked against both the complex bound and the
/// sharper real one.
pub fn complex_hoeffding_real_suite(n: u32, t: f64, samples: u64, stream: SeedStream) -> Result<TailCheckResult> {
    let complex = complex_hoeffding_bound(t, &vec![1.0; n as usize])?;
    let real = hoeffding_bound(t, &vec![(-1.0, 1.0); n as usize])?;
    let hits = count_hits(samples, stream, |rng| {
        let s: i64 = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).sum();
        s.unsigned_abs() as f64 >= t
    });
    let p = hits as f64 / samples as f64;
    let mut res = TailCheckResult::finish(
        "complex-hoeffding-real-summands",
        CheckKind::Tail,
        complex,
        p,
        binomial_stderr(real.clamped, samples),
        samples,
        detail(&[("n", n as f64), ("t", t), ("real_bound", real.value)]),
    );
    // the real bound is the tighter one and must hold as well
    if !(real.value <= complex && p <= real.value + SIGMAS * res.stderr) {
        res.status = CheckStatus::Failed;
        res.passed = false;
    }
    Ok(res)
}

/// `E exp(hY)` for `Y = Exp(alpha) - 1/alpha`, which is centered, bounded
/// below by `a = -1/alpha` and has tail `exp(-alpha (y - a))`.
pub fn mgf_suite(h: f64, c: f64, alpha: f64, beta: f64, samples: u64, stream: SeedStream) -> Result<TailCheckResult> {
    let bound = mgf_bound(h, c, alpha, beta)?;
    let exp = Exp::new(alpha).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let (mean, se) = mean_stderr(samples, stream, |rng| (h * (exp.sample(rng) - 1.0 / alpha)).exp());
    let exact = (-h / alpha).exp() * alpha / (alpha - h);
    Ok(TailCheckResult::finish(
        "mgf",
        CheckKind::Expectation,
        bound,
        mean,
        se,
        samples,
        detail(&[("h", h), ("c", c), ("alpha", alpha), ("beta", beta), ("exact_mgf", exact)]),
    ))
}

/// Means of `n` i.i.d. `Exp(alpha) - 1/alpha` against the relaxed Chernoff
/// bound at `t`.
pub fn relaxed_chernoff_suite(
    n: u64,
    t: f64,
    alpha: f64,
    beta: f64,
    trials: u64,
    stream: SeedStream,
) -> Result<TailCheckResult> {
    let bound = relaxed_chernoff_bound(n, t, alpha, beta)?;
    let exp = Exp::new(alpha).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let hits = count_hits(trials, stream, |rng| {
        let s: f64 = (0..n).map(|_| exp.sample(rng)).sum();
        s / n as f64 - 1.0 / alpha >= t
    });
    let p = hits as f64 / trials as f64;
    Ok(TailCheckResult::finish(
        "relaxed-chernoff",
        CheckKind::Tail,
        bound,
        p,
        binomial_stderr(bound, trials),
        trials,
        detail(&[("n", n as f64), ("t", t), ("alpha", alpha), ("beta", beta)]),
    ))
}

/// `P[|<u|e_0>|^2 >= x] = (1 - x)^{D-1}` for Haar `u`.
pub fn haar_tail_suite(dim: usize, x: f64, samples: u64, stream: SeedStream) -> Result<TailCheckResult> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let exact = (1.0 - x).powi(dim as i32 - 1);
    let hits = count_hits(samples, stream, |rng| {
        let u = haar_unit_vector(dim, rng).expect("dim checked");
        u.amplitudes()[0].norm_sqr() >= x
    });
    let p = hits as f64 / samples as f64;
    Ok(TailCheckResult::finish(
        &format!("haar-tail-x{x}"),
        CheckKind::Exact,
        exact,
        p,
        binomial_stderr(exact, samples),
        samples,
        detail(&[("dim", dim as f64), ("x", x)]),
    ))
}

/// The same tail for a fixed column of a Haar basis.
pub fn haar_basis_tail_suite(dim: usize, x: f64, samples: u64, stream: SeedStream) -> Result<TailCheckResult> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let exact = (1.0 - x).powi(dim as i32 - 1);
    let hits = count_hits(samples, stream, |rng| {
        let b = haar_basis(dim, rng).expect("dim checked");
        b.vectors()[dim - 1].amplitudes()[0].norm_sqr() >= x
    });
    let p = hits as f64 / samples as f64;
    Ok(TailCheckResult::finish(
        &format!("haar-basis-tail-x{x}"),
        CheckKind::Exact,
        exact,
        p,
        binomial_stderr(exact, samples),
        samples,
        detail(&[("dim", dim as f64), ("x", x)]),
    ))
}

/// Chi-square test that `(|u_1|^2, |u_2|^2, |u_3|^2)` is uniform on the
/// simplex. The map `u1 = 1 - (1 - x1)^2`, `u2 = x2 / (1 - x1)` sends the
/// uniform simplex to the uniform square, which is binned `bins x bins`.
pub fn simplex_uniformity_suite(bins: usize, alpha: f64, samples: u64, stream: SeedStream) -> Result<TailCheckResult> {
    if bins < 2 {
        return Err(Error::InvalidArgument("need at least 2 bins per axis".into()));
    }
    let cells = bins * bins;
    let parts = chunked(samples, stream, |rng, count| {
        let mut h = vec![0u64; cells];
        for _ in 0..count {
            let u = haar_unit_vector(3, rng).expect("dim 3");
            let x1 = u.amplitudes()[0].norm_sqr();
            let x2 = u.amplitudes()[1].norm_sqr();
            let a = 1.0 - (1.0 - x1).powi(2);
            let b = if x1 < 1.0 { x2 / (1.0 - x1) } else { 0.0 };
            let i = ((a * bins as f64) as usize).min(bins - 1);
            let j = ((b * bins as f64) as usize).min(bins - 1);
            h[i * bins + j] += 1;
        }
        h
    });
    let mut hist = vec![0u64; cells];
    for p in parts {
        for (h, c) in hist.iter_mut().zip(p) {
            *h += c;
        }
    }
    let expected = samples as f64 / cells as f64;
    let stat: f64 = hist.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let df = (cells - 1) as f64;
    let chi = ChiSquared::new(df).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let critical = chi.inverse_cdf(1.0 - alpha);
    Ok(TailCheckResult::finish(
        "simplex-uniformity",
        CheckKind::GoodnessOfFit,
        critical,
        stat,
        0.0,
        samples,
        detail(&[("df", df), ("alpha", alpha), ("p_value", 1.0 - chi.cdf(stat))]),
    ))
}

/// `S = sum_{i < |A|} |v_i|^2` for Haar `v`: the mean must be `|A|/D`
/// within three standard errors and `S >= |A|/D + 1/(88 D^2 ln D)` must be
/// observed.
pub fn projection_anticoncentration_check(
    dim: usize,
    subset: usize,
    samples: u64,
    stream: SeedStream,
) -> Result<TailCheckResult> {
    if !(subset >= 1 && subset < dim) {
        return Err(Error::InvalidArgument(format!(
            "subset size must lie in [1, D), got {subset} with D = {dim}"
        )));
    }
    let target = subset as f64 / dim as f64;
    let eta = anticoncentration_margin(dim);
    let parts = chunked(samples, stream, |rng, count| {
        let (mut s, mut s2, mut hits) = (0.0, 0.0, 0u64);
        for _ in 0..count {
            let v = haar_unit_vector(dim, rng).expect("dim >= 2");
            let w: f64 = v.amplitudes()[..subset].iter().map(C64::norm_sqr).sum();
            s += w;
            s2 += w * w;
            if w >= target + eta {
                hits += 1;
            }
        }
        (s, s2, hits)
    });
    let (s, s2, hits) = parts
        .into_iter()
        .fold((0.0, 0.0, 0u64), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let n = samples as f64;
    let mean = s / n;
    let se = (((s2 - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0) / n).sqrt();
    let freq = hits as f64 / n;
    let mut res = TailCheckResult::finish(
        &format!("anticoncentration-d{dim}-a{subset}"),
        CheckKind::Positivity,
        0.0,
        freq,
        binomial_stderr(freq, samples),
        samples,
        detail(&[("mean", mean), ("expected_mean", target), ("mean_stderr", se), ("eta1", eta)]),
    );
    if (mean - target).abs() > SIGMAS * se {
        res.status = CheckStatus::Failed;
        res.passed = false;
    }
    Ok(res)
}

/// For each `xi`, the frequency of `<v|s1|v> >= (1 + xi) <v|s2|v>` where
/// `v` is the outcome of measuring `rho` in a Haar basis.
pub fn distinguishing_probability_estimate(
    s1: &DensityOperator,
    s2: &DensityOperator,
    rho: &DensityOperator,
    xi_grid: &[f64],
    samples: u64,
    stream: SeedStream,
) -> Result<Vec<(f64, f64)>> {
    let dim = rho.dim();
    for s in [s1, s2] {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.dim(),
            });
        }
    }
    let parts = chunked(samples, stream, |rng, count| {
        let mut hits = vec![0u64; xi_grid.len()];
        for _ in 0..count {
            let basis = haar_basis(dim, rng).expect("valid dimension");
            let weights: Vec<f64> = basis.vectors().iter().map(|v| rho.expectation(v).max(0.0)).collect();
            let total: f64 = weights.iter().sum();
            let mut pick = rng.random::<f64>() * total;
            let mut j = dim - 1;
            for (i, w) in weights.iter().enumerate() {
                if pick < *w {
                    j = i;
                    break;
                }
                pick -= w;
            }
            let v = &basis.vectors()[j];
            let (a, b) = (s1.expectation(v), s2.expectation(v));
            for (h, xi) in hits.iter_mut().zip(xi_grid) {
                if a >= (1.0 + xi) * b {
                    *h += 1;
                }
            }
        }
        hits
    });
    let mut hits = vec![0u64; xi_grid.len()];
    for p in parts {
        for (h, c) in hits.iter_mut().zip(p) {
            *h += c;
        }
    }
    Ok(xi_grid
        .iter()
        .zip(hits)
        .map(|(&xi, h)| (xi, h as f64 / samples as f64))
        .collect())
}

fn bloch_state(theta: f64, phi: f64) -> UnitVector {
    UnitVector::new(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ])
    .expect("unit norm by construction")
}

/// Fibonacci lattice of qubit pure states.
pub fn fibonacci_qubit_grid(points: usize) -> Vec<UnitVector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..points)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / points as f64;
            bloch_state(z.clamp(-1.0, 1.0).acos(), golden * i as f64)
        })
        .collect()
}

/// Greedy packing: keeps each candidate at trace distance at least `eps`
/// from every kept state. Over a dense enough candidate set the result is
/// a maximal packing, hence an `eps`-net.
pub fn greedy_eps_net(candidates: &[UnitVector], eps: f64) -> Vec<UnitVector> {
    let mut net: Vec<UnitVector> = Vec::new();
    for c in candidates {
        if net.iter().all(|m| pure_trace_distance(m, c) >= eps) {
            net.push(c.clone());
        }
    }
    net
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsNetCheck {
    pub dim: usize,
    pub eps: f64,
    pub size: usize,
    pub size_bound: f64,
    pub min_pairwise: f64,
    pub max_probe_distance: f64,
    pub probes: u64,
    pub passed: bool,
}

/// Builds a greedy qubit net from a Fibonacci grid topped up with random
/// states, then checks size, packing and covering on fresh Haar probes.
pub fn qubit_eps_net_check(eps: f64, grid: usize, probes: u64, stream: SeedStream) -> Result<EpsNetCheck> {
    let size_bound = eps_net_size_bound(2, eps)?;
    let mut candidates = fibonacci_qubit_grid(grid);
    let mut rng = stream.fork("fill").rng();
    for _ in 0..grid {
        candidates.push(haar_unit_vector(2, &mut rng)?);
    }
    let net = greedy_eps_net(&candidates, eps);
    let mut min_pairwise = f64::INFINITY;
    for (i, a) in net.iter().enumerate() {
        for b in &net[i + 1..] {
            min_pairwise = min_pairwise.min(pure_trace_distance(a, b));
        }
    }
    let worst = chunked(probes, stream.fork("probe"), |rng, count| {
        (0..count)
            .map(|_| {
                let p = haar_unit_vector(2, rng).expect("dim 2");
                net.iter().map(|m| pure_trace_distance(m, &p)).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max);
    Ok(EpsNetCheck {
        dim: 2,
        eps,
        size: net.len(),
        size_bound,
        min_pairwise,
        max_probe_distance: worst,
        probes,
        passed: (net.len() as f64) <= size_bound && min_pairwise >= eps && worst <= eps,
    })
}

/// Sample budgets of the shipped validation suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteBudget {
    pub hoeffding: u64,
    pub complex_hoeffding: u64,
    pub mgf: u64,
    pub chernoff_trials: u64,
    pub haar: u64,
    pub simplex: u64,
    pub anticoncentration: u64,
}

impl Default for SuiteBudget {
    fn default() -> Self {
        Self {
            hoeffding: 1_000_000,
            complex_hoeffding: 100_000,
            mgf: 1_000_000,
            chernoff_trials: 10_000,
            haar: 100_000,
            simplex: 100_000,
            anticoncentration: 100_000,
        }
    }
}

impl SuiteBudget {
    /// Every budget multiplied by `factor`, at least 100 samples each.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |x: u64| ((x as f64 * factor) as u64).max(100);
        Self {
            hoeffding: s(self.hoeffding),
            complex_hoeffding: s(self.complex_hoeffding),
            mgf: s(self.mgf),
            chernoff_trials: s(self.chernoff_trials),
            haar: s(self.haar),
            simplex: s(self.simplex),
            anticoncentration: s(self.anticoncentration),
        }
    }
}

/// Hoeffding (n=100, t=20), complex Hoeffding (n=64, t=24) with complex
/// and real summands, MGF (alpha=beta=4, h=c=1), relaxed Chernoff
/// (alpha=beta=2, n=10^4, t=0.05), Haar tails at D=8 and D=4, simplex
/// uniformity at D=3 and anticoncentration at D=8.
pub fn validate_all(seed: u64, budget: &SuiteBudget) -> Result<Vec<TailCheckResult>> {
    let root = SeedStream::new(seed);
    let mut out = vec![
        hoeffding_suite(100, 20.0, budget.hoeffding, root.fork("hoeffding"))?,
        complex_hoeffding_suite(64, 24.0, budget.complex_hoeffding, root.fork("complex-hoeffding"))?,
        complex_hoeffding_real_suite(64, 24.0, budget.complex_hoeffding, root.fork("complex-hoeffding-real"))?,
        mgf_suite(1.0, 1.0, 4.0, 4.0, budget.mgf, root.fork("mgf"))?,
        relaxed_chernoff_suite(10_000, 0.05, 2.0, 2.0, budget.chernoff_trials, root.fork("relaxed-chernoff"))?,
    ];
    for x in [0.1, 0.3, 0.5] {
        out.push(haar_tail_suite(8, x, budget.haar, root.fork(&format!("haar-tail-{x}")))?);
        out.push(haar_basis_tail_suite(4, x, budget.haar, root.fork(&format!("haar-basis-tail-{x}")))?);
    }
    out.push(simplex_uniformity_suite(10, 0.001, budget.simplex, root.fork("simplex"))?);
    out.push(projection_anticoncentration_check(8, 4, budget.anticoncentration, root.fork("anticoncentration"))?);
    Ok(out)
}

/// `2/e`, the largest trace distance the Lipschitz estimate admits.
pub const LIPSCHITZ_EPS_MAX: f64 = 2.0 / E;
