//! Random quasi-linear codes.
//!
//! An `(n+k, r, 2^d)` code XORs an arbitrary code on the first `r` message
//! bits with a random linear code on the remaining `n+k-r` bits:
//! `C(x)_i = (d_{x1})_i xor <c_i, x2>`.
//!
//! Messages are handled as integers with string position `p` at bit `p`, so
//! `x1 = x & (2^r - 1)` and `x2 = x >> r`.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::parallel;

/// Largest `n + k` for exact pair scans.
pub const PAIR_SCAN_LIMIT: usize = 16;
/// Largest `d` this crate will materialize.
pub const MAX_DIM_EXPONENT: usize = 24;
/// Largest message length held in a machine word.
pub const MAX_MESSAGE_BITS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    /// Length of the fingerprinted strings.
    pub n: usize,
    /// Rank exponent; zero for the pure scheme.
    pub k: usize,
    /// Length of the nonlinear prefix.
    pub r: usize,
    /// Base-2 logarithm of the codeword length.
    pub d: usize,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, r: usize, d: usize) -> Result<Self> {
        let p = Self { n, k, r, d };
        p.validate()?;
        Ok(p)
    }

    /// Small parameter set used by the examples and the demo.
    pub fn desk() -> Self {
        Self { n: 8, k: 2, r: 6, d: 10 }
    }

    pub fn validate(&self) -> Result<()> {
        let CodeParams { n, k, r, d } = *self;
        if n == 0 {
            return Err(Error::InfeasibleParams("n >= 1 violated (n = 0)".into()));
        }
        if r >= n + k {
            return Err(Error::InfeasibleParams(format!(
                "r < n + k violated (r = {r}, n + k = {})",
                n + k
            )));
        }
        if d < 64 && (n + k) as u128 >= 1u128 << d {
            return Err(Error::InfeasibleParams(format!(
                "n + k < 2^d violated (n + k = {}, 2^d = {})",
                n + k,
                1u128 << d
            )));
        }
        if d < k {
            return Err(Error::InfeasibleParams(format!(
                "d >= k violated (d = {d}, k = {k})"
            )));
        }
        if r < k {
            return Err(Error::InfeasibleParams(format!(
                "r >= k violated (r = {r}, k = {k})"
            )));
        }
        Ok(())
    }

    pub fn message_len(&self) -> usize {
        self.n + self.k
    }

    pub fn linear_len(&self) -> usize {
        self.n + self.k - self.r
    }

    pub fn codeword_len(&self) -> usize {
        1usize << self.d
    }

    /// Rejects parameter sets too large to hold in memory.
    pub fn check_materializable(&self) -> Result<()> {
        self.validate()?;
        if self.d > MAX_DIM_EXPONENT {
            return Err(Error::ScaleGuard(format!(
                "d = {} exceeds the materialization limit {MAX_DIM_EXPONENT}",
                self.d
            )));
        }
        if self.message_len() > MAX_MESSAGE_BITS {
            return Err(Error::ScaleGuard(format!(
                "n + k = {} exceeds the message limit {MAX_MESSAGE_BITS}",
                self.message_len()
            )));
        }
        if self.r + self.d > 31 {
            return Err(Error::ScaleGuard(format!(
                "nonlinear part would hold 2^{} bits",
                self.r + self.d
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiLinearCode {
    params: CodeParams,
    seed: Option<u64>,
    /// `c_i` packed into the low `n+k-r` bits.
    columns: Vec<u64>,
    /// `d_j`, each `2^d` bits.
    nonlinear: Vec<BitString>,
    /// Transposed linear part: row `p` has bit `i` equal to bit `p` of `c_i`.
    linear_rows: Vec<BitString>,
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn transpose_columns(columns: &[u64], m: usize, len: usize) -> Vec<BitString> {
    (0..m)
        .map(|p| {
            let mut row = BitString::zeros(len);
            for (i, c) in columns.iter().enumerate() {
                if (c >> p) & 1 == 1 {
                    row.set(i, true);
                }
            }
            row
        })
        .collect()
}

/// Draws a code with every bit i.i.d. uniform: first the `2^d` linear
/// columns, then the `2^r` nonlinear rows.
pub fn sample_code<R: Rng + ?Sized>(params: CodeParams, rng: &mut R) -> Result<QuasiLinearCode> {
    params.check_materializable()?;
    let m = params.linear_len();
    let len = params.codeword_len();
    let columns: Vec<u64> = (0..len).map(|_| rng.random::<u64>() & low_mask(m)).collect();
    let nonlinear = (0..1usize << params.r)
        .map(|_| BitString::random(len, rng))
        .collect();
    Ok(QuasiLinearCode::assemble(params, columns, nonlinear, None))
}

/// Rejection-samples until the linear columns are pairwise distinct.
pub fn sample_distinct_column_code<R: Rng + ?Sized>(
    params: CodeParams,
    rng: &mut R,
    max_tries: usize,
) -> Result<QuasiLinearCode> {
    for _ in 0..max_tries {
        let code = sample_code(params, rng)?;
        if code.distinct_columns() {
            return Ok(code);
        }
    }
    Err(Error::HypothesisViolated(format!(
        "no code with distinct columns in {max_tries} draws"
    )))
}

impl QuasiLinearCode {
    fn assemble(
        params: CodeParams,
        columns: Vec<u64>,
        nonlinear: Vec<BitString>,
        seed: Option<u64>,
    ) -> Self {
        let linear_rows = transpose_columns(&columns, params.linear_len(), params.codeword_len());
        Self {
            params,
            seed,
            columns,
            nonlinear,
            linear_rows,
        }
    }

    /// Builds a code from explicit linear columns (`n+k-r` bits each) and
    /// nonlinear rows (`2^d` bits each).
    pub fn from_parts(
        params: CodeParams,
        linear: &[BitString],
        nonlinear: Vec<BitString>,
    ) -> Result<Self> {
        params.check_materializable()?;
        let m = params.linear_len();
        let len = params.codeword_len();
        if linear.len() != len {
            return Err(Error::InvalidArgument(format!(
                "expected {len} linear columns, got {}",
                linear.len()
            )));
        }
        if nonlinear.len() != 1 << params.r {
            return Err(Error::InvalidArgument(format!(
                "expected {} nonlinear rows, got {}",
                1usize << params.r,
                nonlinear.len()
            )));
        }
        let mut columns = Vec::with_capacity(len);
        for c in linear {
            if c.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: c.len(),
                });
            }
            columns.push(c.to_u64().unwrap_or(0));
        }
        for row in &nonlinear {
            if row.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    got: row.len(),
                });
            }
        }
        Ok(Self::assemble(params, columns, nonlinear, None))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `c_i` as an integer (0-based `i`).
    pub fn column(&self, i: usize) -> u64 {
        self.columns[i]
    }

    pub fn columns(&self) -> &[u64] {
        &self.columns
    }

    pub fn linear_part(&self) -> Vec<BitString> {
        let m = self.params.linear_len();
        self.columns
            .iter()
            .map(|&c| BitString::from_u64(c, m).expect("column fits"))
            .collect()
    }

    pub fn nonlinear_part(&self) -> &[BitString] {
        &self.nonlinear
    }

    /// `(<c_i, s>)_i` for a linear-part message `s`.
    pub fn linear_word(&self, s: u64) -> BitString {
        let mut out = BitString::zeros(self.params.codeword_len());
        let mut rest = s;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            out.xor_assign(&self.linear_rows[p]);
            rest &= rest - 1;
        }
        out
    }

    /// All `2^(n+k-r)` linear codewords, indexed by the linear message.
    pub fn linear_table(&self) -> Vec<BitString> {
        let m = self.params.linear_len();
        let size = 1usize << m;
        let mut table = vec![BitString::zeros(self.params.codeword_len()); size];
        // entry s = entry (s without its lowest bit) xor one row
        for s in 1..size {
            let low = s.trailing_zeros() as usize;
            let mut word = table[s & (s - 1)].clone();
            word.xor_assign(&self.linear_rows[low]);
            table[s] = word;
        }
        table
    }

    pub fn encode_index(&self, x: u64) -> BitString {
        let r = self.params.r;
        let x1 = (x & low_mask(r)) as usize;
        let mut out = self.nonlinear[x1].clone();
        out.xor_assign(&self.linear_word(x >> r));
        out
    }

    pub fn encode(&self, x: &BitString) -> Result<BitString> {
        let expected = self.params.message_len();
        if x.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: x.len(),
            });
        }
        Ok(self.encode_index(x.to_u64().expect("message fits in a word")))
    }

    /// Every codeword, indexed by message.
    pub fn codewords(&self) -> Result<Vec<BitString>> {
        let total = self.params.message_len();
        if total > 20 {
            return Err(Error::ScaleGuard(format!(
                "enumerating 2^{total} codewords"
            )));
        }
        let table = self.linear_table();
        let r = self.params.r;
        Ok((0..1u64 << total)
            .map(|x| {
                let mut w = self.nonlinear[(x & low_mask(r)) as usize].clone();
                w.xor_assign(&table[(x >> r) as usize]);
                w
            })
            .collect())
    }

    /// `max_{a1 != a2} |d_H(C(a1), C(a2)) - 2^(d-1)|`, exactly.
    ///
    /// Uses `C(a1) xor C(a2) = d_p xor d_q xor L(s1 xor s2)`, so the scan
    /// runs over unordered nonlinear pairs and linear differences instead of
    /// all message pairs.
    pub fn gamma(&self) -> Result<u64> {
        let total = self.params.message_len();
        if total > PAIR_SCAN_LIMIT {
            return Err(Error::ScaleGuard(format!(
                "gamma needs n + k <= {PAIR_SCAN_LIMIT}, got {total}"
            )));
        }
        let table = self.linear_table();
        let half = (self.params.codeword_len() / 2) as i64;
        let rows = 1usize << self.params.r;
        let per_row = parallel::map_range(rows, |p| {
            let mut worst = 0u64;
            for q in p..rows {
                let base = self.nonlinear[p].xor(&self.nonlinear[q]);
                for (s, lin) in table.iter().enumerate() {
                    if p == q && s == 0 {
                        continue;
                    }
                    let w = base.hamming(lin) as i64;
                    worst = worst.max((w - half).unsigned_abs());
                }
            }
            worst
        });
        Ok(per_row.into_iter().max().unwrap_or(0))
    }

    /// Whether `c_1, ..., c_{2^d}` are pairwise distinct.
    pub fn distinct_columns(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.columns.len());
        self.columns.iter().all(|c| seen.insert(*c))
    }

    pub fn to_file(&self) -> CodeFile {
        let m = self.params.linear_len();
        CodeFile {
            n: self.params.n,
            k: self.params.k,
            r: self.params.r,
            d: self.params.d,
            linear: self
                .columns
                .iter()
                .map(|&c| BitString::from_u64(c, m).expect("column fits").to_hex())
                .collect(),
            nonlinear: self.nonlinear.iter().map(BitString::to_hex).collect(),
            seed: self.seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("code serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &CodeFile) -> Result<Self> {
        let params = CodeParams::new(file.n, file.k, file.r, file.d)?;
        params.check_materializable()?;
        let m = params.linear_len();
        let len = params.codeword_len();
        let linear = file
            .linear
            .iter()
            .map(|h| BitString::from_hex(h, m))
            .collect::<Result<Vec<_>>>()?;
        let nonlinear = file
            .nonlinear
            .iter()
            .map(|h| BitString::from_hex(h, len))
            .collect::<Result<Vec<_>>>()?;
        let code = Self::from_parts(params, &linear, nonlinear)?;
        Ok(match file.seed {
            Some(s) => code.with_seed(s),
            None => code,
        })
    }
}

/// On-disk code format. Bit strings are hex, most significant nibble first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub d: usize,
    pub linear: Vec<String>,
    pub nonlinear: Vec<String>,
    pub seed: Option<u64>,
}

/// Parameters `k = ceil(4c lg n)`, `d = ceil((18c+1) lg n)`,
/// `r = ceil((60c+3) lg n)` for error and leakage `1/n^c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recipe {
    pub n: usize,
    pub c: f64,
    pub k: usize,
    pub d: usize,
    pub r: usize,
    /// `k` forced to zero; `d` and `r` keep the mixed-scheme formulas.
    pub pure_interpretation: bool,
    /// Whether `(n, k, r, d)` satisfies the code-parameter invariants.
    pub feasible: bool,
    pub violation: Option<String>,
    /// Parameters small enough to simulate, for experiments at desk scale.
    pub desk: CodeParams,
}

impl Recipe {
    pub fn params(&self) -> Result<CodeParams> {
        CodeParams::new(self.n, self.k, self.r, self.d)
    }
}

pub fn parameter_recipe(n: usize, c: f64, pure: bool) -> Result<Recipe> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("recipe needs n >= 2, got {n}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("recipe needs c > 0, got {c}")));
    }
    let lg = (n as f64).log2();
    let ceil = |x: f64| {
        // absorb rounding noise such as 4 * log2(16) = 16.000000000000004
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            r as usize
        } else {
            x.ceil() as usize
        }
    };
    let k = if pure { 0 } else { ceil(4.0 * c * lg) };
    let d = ceil((18.0 * c + 1.0) * lg);
    let r = ceil((60.0 * c + 3.0) * lg);
    let violation = CodeParams { n, k, r, d }.validate().err().map(|e| e.to_string());
    Ok(Recipe {
        n,
        c,
        k,
        d,
        r,
        pure_interpretation: pure,
        feasible: violation.is_none(),
        violation,
        desk: CodeParams::desk(),
    })
}
