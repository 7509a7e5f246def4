//! Numerically exact, testable simulation of deterministic remote
//! preparation (RSP) of single-photon polarization states.
//!
//! The crate covers the full chain:
//!
//! * [`linalg`] — fixed-size complex linear algebra (2×2 / 4×4), SVD,
//!   Hermitian eigendecompositions, PSD square root;
//! * [`state`] — qubit / two-qubit states, target constructors, fidelity,
//!   purity and Stokes coordinates;
//! * [`povm`] — two-outcome POVMs, synthesis of interferometer-module
//!   parameters, and forward simulation of the module;
//! * [`protocol`] — the deterministic pure- and mixed-state RSP protocols
//!   with the 2-bit classical message and Pauli corrections;
//! * [`noise`] — Werner source, interferometer channel, seeded sampling,
//!   CHSH tests, calibration;
//! * [`tomo`] — three-basis tomography with maximum-likelihood
//!   reconstruction;
//! * [`suite`] — the 18-state evaluation suite.
//!
//! All numeric code is generic over the real scalar via [`scalar::Scalar`];
//! the `*64` aliases below fix `f64`, the precision used by the CLI and the
//! acceptance tests.

pub mod error;
pub mod linalg;
pub mod noise;
pub mod povm;
pub mod protocol;
pub mod scalar;
pub mod state;
pub mod suite;
pub mod tomo;

pub use error::{Error, Result};
pub use scalar::Scalar;

// Double-precision aliases for the main public types.
pub type C64 = num_complex::Complex<f64>;
pub type Mat2x64 = linalg::Mat2<f64>;
pub type Mat4x64 = linalg::Mat4<f64>;
pub type Vec2x64 = linalg::Vec2<f64>;
pub type Vec4x64 = linalg::Vec4<f64>;
pub type PureQubit64 = state::PureQubit<f64>;
pub type DensityMatrix64 = state::DensityMatrix<f64>;
pub type TwoQubitState64 = state::TwoQubitState<f64>;
pub type TargetPureSpec64 = state::TargetPureSpec<f64>;
pub type TargetMixedSpec64 = state::TargetMixedSpec<f64>;
pub type PovmPair64 = povm::PovmPair<f64>;
pub type ModuleSettings64 = povm::ModuleSettings<f64>;
pub type NoiseConfig64 = noise::NoiseConfig<f64>;

// Single-precision aliases for the exact-math core.
pub type C32 = num_complex::Complex<f32>;
pub type Mat2x32 = linalg::Mat2<f32>;
pub type Mat4x32 = linalg::Mat4<f32>;
pub type PureQubit32 = state::PureQubit<f32>;
pub type DensityMatrix32 = state::DensityMatrix<f32>;
