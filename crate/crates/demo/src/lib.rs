//! Browser entry points. Each returns a JSON string for the page to plot.

use qfp_core::codes::sample_code;
use qfp_core::fingerprint::signed_overlap;
use qfp_core::leakage::{extraction_attack, MixedScheme};
use qfp_core::linalg::haar_unit_vector;
use qfp_core::{CodeParams, SeedStream};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Keeps one call well under a second in the browser.
const MAX_DIM_EXPONENT: usize = 8;
const MAX_MESSAGE_BITS: usize = 10;
const MAX_ATTACK_BITS: usize = 12;
const MAX_SAMPLES: u32 = 200_000;
const MAX_BASES: u32 = 400;

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Empirical `P[|v_0|^2 >= x]` for Haar `v` in dimension `dim` next to the
/// exact tail `(1 - x)^{dim - 1}`.
pub fn haar_tail_json(dim: usize, samples: u32, seed: u32) -> Result<String, String> {
    if !(2..=64).contains(&dim) || samples == 0 || samples > MAX_SAMPLES {
        return Err(format!("need 2 <= dim <= 64 and 1 <= samples <= {MAX_SAMPLES}"));
    }
    let xs: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
    let mut hits = vec![0u32; xs.len()];
    let mut rng = SeedStream::new(u64::from(seed)).rng();
    for _ in 0..samples {
        let w = haar_unit_vector(dim, &mut rng).map_err(|e| e.to_string())?.amplitudes()[0].norm_sqr();
        for (h, x) in hits.iter_mut().zip(&xs) {
            if w >= *x {
                *h += 1;
            }
        }
    }
    let empirical: Vec<f64> = hits.iter().map(|&h| f64::from(h) / f64::from(samples)).collect();
    let exact: Vec<f64> = xs.iter().map(|x| (1.0 - x).powi(dim as i32 - 1)).collect();
    Ok(json!({ "x": xs, "empirical": empirical, "exact": exact }).to_string())
}

/// Mean random-basis extraction information, in bits, for every valid rank
/// parameter `k` at fixed `(n, r, d)`.
pub fn extraction_vs_rank_json(n: usize, r: usize, d: usize, bases: u32, seed: u32) -> Result<String, String> {
    if d > MAX_DIM_EXPONENT || n > MAX_MESSAGE_BITS || bases == 0 || bases > MAX_BASES {
        return Err(format!(
            "need d <= {MAX_DIM_EXPONENT}, n <= {MAX_MESSAGE_BITS} and 1 <= bases <= {MAX_BASES}"
        ));
    }
    let root = SeedStream::new(u64::from(seed));
    let mut rows = Vec::new();
    for k in 0..=r {
        let Ok(p) = CodeParams::new(n, k, r, d) else {
            continue;
        };
        if n + k > MAX_ATTACK_BITS {
            continue;
        }
        let code = sample_code(p, &mut root.split(k as u64).rng()).map_err(|e| e.to_string())?;
        let scheme = MixedScheme::new(&code).map_err(|e| e.to_string())?;
        let res = extraction_attack(&scheme, bases as usize, root.fork("bases")).map_err(|e| e.to_string())?;
        rows.push(json!({ "k": k, "mean_bits": res.mean_bits, "stderr_bits": res.stderr_bits }));
    }
    if rows.is_empty() {
        return Err("no rank parameter k gives valid code parameters".into());
    }
    Ok(json!({ "n": n, "r": r, "d": d, "bases": bases, "rows": rows }).to_string())
}

/// Histogram of signed overlaps `<u_x|u_y>` over all pairs `x < y` of one
/// random code.
pub fn overlap_histogram_json(n: usize, k: usize, r: usize, d: usize, bins: u32, seed: u32) -> Result<String, String> {
    let p = CodeParams::new(n, k, r, d).map_err(|e| e.to_string())?;
    if n + k > MAX_MESSAGE_BITS || d > 12 || !(2..=200).contains(&bins) {
        return Err(format!("need n + k <= {MAX_MESSAGE_BITS}, d <= 12 and 2 <= bins <= 200"));
    }
    let code = sample_code(p, &mut SeedStream::new(u64::from(seed)).rng()).map_err(|e| e.to_string())?;
    let words = code.codewords().map_err(|e| e.to_string())?;
    let bins = bins as usize;
    let mut counts = vec![0u64; bins];
    let mut worst: f64 = 0.0;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            let o = signed_overlap(a, b);
            worst = worst.max(o.abs());
            let slot = (((o + 1.0) / 2.0) * bins as f64) as usize;
            counts[slot.min(bins - 1)] += 1;
        }
    }
    let edges: Vec<f64> = (0..=bins).map(|j| -1.0 + 2.0 * j as f64 / bins as f64).collect();
    Ok(json!({ "edges": edges, "counts": counts, "max_abs_overlap": worst }).to_string())
}

#[wasm_bindgen]
pub fn haar_tail(dim: usize, samples: u32, seed: u32) -> Result<String, JsValue> {
    haar_tail_json(dim, samples, seed).map_err(err)
}

#[wasm_bindgen]
pub fn extraction_vs_rank(n: usize, r: usize, d: usize, bases: u32, seed: u32) -> Result<String, JsValue> {
    extraction_vs_rank_json(n, r, d, bases, seed).map_err(err)
}

#[wasm_bindgen]
pub fn overlap_histogram(n: usize, k: usize, r: usize, d: usize, bins: u32, seed: u32) -> Result<String, JsValue> {
    overlap_histogram_json(n, k, r, d, bins, seed).map_err(err)
}
