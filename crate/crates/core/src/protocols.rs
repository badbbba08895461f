//! Equality protocols built from fingerprints.
//!
//! In the simultaneous-message model Alice and Bob each send a pure
//! fingerprint and the referee runs the swap test; in the one-way model
//! Alice sends the mixed fingerprint of `x` and Bob measures it with the
//! equality projector of `y`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codes::QuasiLinearCode;
use crate::error::{Error, Result};
use crate::fingerprint::{
    accept_probability, equality_projector, mixed_fingerprint, signed_overlap, FingerprintFile,
};
use crate::leakage::{extraction_attack, ExtractionResult, MixedScheme};
use crate::rng::SeedStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolModel {
    Smp,
    OneWay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    NotEqual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub model: ProtocolModel,
    pub x: String,
    pub y: String,
    /// Fingerprints sent, each on `d` qubits.
    pub messages: Vec<FingerprintFile>,
    pub qubits_per_message: usize,
    pub accept_probability: f64,
    pub shots: u64,
    pub accepts: u64,
    pub verdict: Verdict,
}

/// Total qubits sent.
pub fn protocol_cost(t: &ProtocolTranscript) -> usize {
    t.messages.len() * t.qubits_per_message
}

/// Swap-test acceptance `(1 + |<u|w>|^2) / 2`.
pub fn swap_test_accept(overlap: f64) -> f64 {
    (1.0 + overlap * overlap) / 2.0
}

fn check_pair(code: &QuasiLinearCode, x: &BitString, y: &BitString) -> Result<()> {
    let n = code.params().n;
    for s in [x, y] {
        if s.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: s.len(),
            });
        }
    }
    Ok(())
}

/// Swap test repeated `shots` times; the referee answers equal only if
/// every run accepts.
pub fn smp_equality<R: Rng + ?Sized>(
    code: &QuasiLinearCode,
    x: &BitString,
    y: &BitString,
    shots: u64,
    rng: &mut R,
) -> Result<ProtocolTranscript> {
    check_pair(code, x, y)?;
    if code.params().k != 0 {
        return Err(Error::InvalidArgument(format!(
            "the swap-test protocol uses pure fingerprints (k = 0), got k = {}",
            code.params().k
        )));
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let fx = mixed_fingerprint(code, x, 0)?;
    let fy = mixed_fingerprint(code, y, 0)?;
    let o = signed_overlap(fx.components()[0].signs(), fy.components()[0].signs());
    let p = swap_test_accept(o);
    let accepts = Binomial::new(shots, p)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng);
    Ok(ProtocolTranscript {
        model: ProtocolModel::Smp,
        x: x.to_hex(),
        y: y.to_hex(),
        messages: vec![fx.to_file(), fy.to_file()],
        qubits_per_message: code.params().d,
        accept_probability: p,
        shots,
        accepts,
        verdict: if accepts == shots {
            Verdict::Equal
        } else {
            Verdict::NotEqual
        },
    })
}

/// One message from Alice, one measurement by Bob.
pub fn one_way_equality<R: Rng + ?Sized>(
    code: &QuasiLinearCode,
    k: usize,
    x: &BitString,
    y: &BitString,
    rng: &mut R,
) -> Result<ProtocolTranscript> {
    check_pair(code, x, y)?;
    let fx = mixed_fingerprint(code, x, k)?;
    let proj = equality_projector(code, y, k)?;
    let p = accept_probability(&fx, &proj)?.clamp(0.0, 1.0);
    let accepted = rng.random_bool(p);
    Ok(ProtocolTranscript {
        model: ProtocolModel::OneWay,
        x: x.to_hex(),
        y: y.to_hex(),
        messages: vec![fx.to_file()],
        qubits_per_message: code.params().d,
        accept_probability: p,
        shots: 1,
        accepts: u64::from(accepted),
        verdict: if accepted {
            Verdict::Equal
        } else {
            Verdict::NotEqual
        },
    })
}

/// An eavesdropper who intercepts Alice's one-way message and measures it
/// in random bases.
pub fn eavesdrop(code: &QuasiLinearCode, bases: usize, stream: SeedStream) -> Result<ExtractionResult> {
    extraction_attack(&MixedScheme::new(code)?, bases, stream)
}
