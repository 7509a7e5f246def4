//! Scalar abstraction for the numeric core.
//!
//! Everything downstream (matrices, states, protocols, sampling) is generic
//! over the real scalar type. `f64` is the default used by the CLI and the
//! acceptance suite; `f32` is available where precision can be traded away.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar underlying all complex matrices and states.
///
/// The associated tolerances form tiers, from tight to loose:
///
/// * [`TOL_EXACT`](Scalar::TOL_EXACT) — algebraic identities of freshly
///   constructed objects (decomposition residuals, unitarity of factors);
/// * [`TOL_GATE`](Scalar::TOL_GATE) — Hermiticity / positivity /
///   normalization gates on states and operators;
/// * [`TOL_SYNTH`](Scalar::TOL_SYNTH) — quantities that compound two
///   decompositions;
/// * [`TOL_INPUT`](Scalar::TOL_INPUT) — validation of user-supplied input;
/// * [`TOL_DIST`](Scalar::TOL_DIST) — normalization of sampled probability
///   distributions.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    const TOL_EXACT: Self;
    const TOL_GATE: Self;
    const TOL_SYNTH: Self;
    const TOL_INPUT: Self;
    const TOL_DIST: Self;
    /// Probabilities below this are treated as zero; the corresponding
    /// post-measurement state is undefined.
    const PROB_FLOOR: Self;

    /// Conversion shorthand for `f64` literals in generic code.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    /// Lossy view as `f64`, for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const TOL_EXACT: f64 = 1e-12;
    const TOL_GATE: f64 = 1e-10;
    const TOL_SYNTH: f64 = 1e-9;
    const TOL_INPUT: f64 = 1e-6;
    const TOL_DIST: f64 = 1e-9;
    const PROB_FLOOR: f64 = 1e-14;
}

impl Scalar for f32 {
    const TOL_EXACT: f32 = 1e-5;
    const TOL_GATE: f32 = 1e-4;
    const TOL_SYNTH: f32 = 1e-3;
    const TOL_INPUT: f32 = 1e-3;
    const TOL_DIST: f32 = 1e-5;
    const PROB_FLOOR: f32 = 1e-7;
}
