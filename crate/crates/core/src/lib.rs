//! Hiding quantum fingerprints built from random quasi-linear codes.
//!
//! The crate constructs the pure and mixed fingerprint ensembles exactly,
//! evaluates their one-sided error and their information leakage by exact
//! linear algebra at desk scale, runs the random-basis extraction attack
//! against arbitrary ensembles, and ships Monte Carlo harnesses for the
//! concentration bounds the constructions rely on.
//!
//! All randomness flows through [`rng::SeedStream`], a deterministic
//! splittable seed tree, so every result is a pure function of its inputs
//! and a master seed regardless of how many worker threads run.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bits;
pub mod bounds;
pub mod classical;
pub mod codes;
pub mod error;
pub mod fingerprint;
pub mod leakage;
pub mod linalg;
pub mod protocols;
pub mod rng;

mod parallel;

pub use bits::BitString;
pub use codes::{CodeParams, QuasiLinearCode};
pub use error::{Error, Result};
pub use linalg::{DensityOperator, OrthonormalBasis, UnitVector, C64};
pub use rng::SeedStream;
