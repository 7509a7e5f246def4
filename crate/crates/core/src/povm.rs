//! Two-outcome POVMs and their realization as a single-interferometer
//! module: completeness validation, measurement application, synthesis of
//! module parameters from a pair of measurement operators, and forward
//! simulation of the module.
//!
//! The module is parameterized by an entrance unitary `v`, exit unitaries
//! `u1`, `u2`, and rotator angles (ζ, ξ, θ, σ). Its two exits act as
//!
//! ```text
//! K1 = u1 · diag(cos ζ, sin ξ e^{iσ}) · v
//! K2 = u2 · diag(sin ζ e^{iθ}, cos ξ) · v
//! ```
//!
//! `K1†K1 + K2†K2 = I` holds for every setting. The second exit physically
//! carries a polarization flip; [`Frame`] selects whether operators are
//! reported with the flip undone (`Logical`, the default contract) or
//! included (`Physical`), related by `K2_physical = X · K2_logical`.

use crate::error::{Error, Result};
use crate::linalg::{cr, min_eig_hermitian, svd2, Mat2, C};
use crate::scalar::Scalar;
use crate::state::{DensityMatrix, Pauli, PureQubit};

// ── POVM pairs ───────────────────────────────────────────────────────────────

/// Deviations of a candidate operator pair from a valid two-outcome POVM.
#[derive(Clone, Copy, Debug)]
pub struct CompletenessReport<T> {
    /// `‖M1†M1 + M2†M2 − I‖∞`.
    pub deviation: T,
    /// Smallest eigenvalues of the effects `E1 = M1†M1` and `E2 = M2†M2`.
    pub min_eigenvalues: [T; 2],
}

/// Completeness and positivity diagnostics for a candidate pair.
pub fn completeness_report<T: Scalar>(m1: &Mat2<T>, m2: &Mat2<T>) -> CompletenessReport<T> {
    let e1 = m1.adjoint() * *m1;
    let e2 = m2.adjoint() * *m2;
    let deviation = (e1 + e2 - Mat2::identity()).max_abs();
    CompletenessReport {
        deviation,
        min_eigenvalues: [min_eig_hermitian(&e1), min_eig_hermitian(&e2)],
    }
}

/// Check `M1†M1 + M2†M2 = I` within `tol` and positivity of both effects.
pub fn validate_povm<T: Scalar>(m1: &Mat2<T>, m2: &Mat2<T>, tol: T) -> Result<()> {
    if !(m1.is_finite() && m2.is_finite()) {
        return Err(Error::NonFinite);
    }
    let report = completeness_report(m1, m2);
    if report.deviation > tol {
        return Err(Error::CompletenessViolation { deviation: report.deviation.as_f64() });
    }
    for (i, min) in report.min_eigenvalues.iter().enumerate() {
        if *min < -tol {
            return Err(Error::ElementNotPositive {
                index: i as u8 + 1,
                min_eigenvalue: min.as_f64(),
            });
        }
    }
    Ok(())
}

/// A two-outcome measurement `{M1, M2}` satisfying the completeness relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PovmPair<T: Scalar> {
    m1: Mat2<T>,
    m2: Mat2<T>,
}

impl<T: Scalar> PovmPair<T> {
    /// Validate at the internal gate tolerance.
    pub fn new(m1: Mat2<T>, m2: Mat2<T>) -> Result<Self> {
        Self::with_tolerance(m1, m2, T::TOL_GATE)
    }

    /// Validate at a caller-chosen tolerance (user-supplied operators are
    /// typically gated at [`Scalar::TOL_INPUT`]).
    pub fn with_tolerance(m1: Mat2<T>, m2: Mat2<T>, tol: T) -> Result<Self> {
        validate_povm(&m1, &m2, tol)?;
        Ok(Self { m1, m2 })
    }

    pub fn m1(&self) -> &Mat2<T> {
        &self.m1
    }

    pub fn m2(&self) -> &Mat2<T> {
        &self.m2
    }

    pub fn operator(&self, index: u8) -> Result<&Mat2<T>> {
        match index {
            1 => Ok(&self.m1),
            2 => Ok(&self.m2),
            other => Err(Error::InvalidOutcomeIndex(other)),
        }
    }

    /// POVM elements `E_m = M_m†M_m`.
    pub fn effects(&self) -> [Mat2<T>; 2] {
        [self.m1.adjoint() * self.m1, self.m2.adjoint() * self.m2]
    }
}

// ── measurement update ───────────────────────────────────────────────────────

/// One outcome of a two-outcome measurement.
///
/// `post_state` is `None` when the outcome probability falls below the
/// probability floor: the update rule divides by the probability and the
/// conditional state is undefined there.
#[derive(Clone, Copy, Debug)]
pub struct MeasurementOutcome<T: Scalar> {
    pub index: u8,
    pub probability: T,
    pub post_state: Option<DensityMatrix<T>>,
}

/// Measurement update `ρ_m = M_m ρ M_m† / tr(M_m†M_m ρ)` with
/// `p_m = tr(M_m†M_m ρ)`.
pub fn apply_measurement<T: Scalar>(
    rho: &DensityMatrix<T>,
    pair: &PovmPair<T>,
    index: u8,
) -> Result<MeasurementOutcome<T>> {
    let m = pair.operator(index)?;
    let p = (m.adjoint() * *m * *rho.mat()).trace().re.max(T::zero());
    let post_state = if p > T::PROB_FLOOR {
        Some(DensityMatrix::new((*m * *rho.mat() * m.adjoint()).scale_re(p.recip()))?)
    } else {
        None
    };
    Ok(MeasurementOutcome { index, probability: p, post_state })
}

// ── module settings ──────────────────────────────────────────────────────────

/// Physical parameters of the interferometric module: entrance unitary,
/// exit unitaries, and the rotator angles (ζ, ξ, θ, σ).
#[derive(Clone, Copy, Debug)]
pub struct ModuleSettings<T: Scalar> {
    v: Mat2<T>,
    u1: Mat2<T>,
    u2: Mat2<T>,
    zeta: T,
    xi: T,
    theta: T,
    sigma: T,
}

impl<T: Scalar> ModuleSettings<T> {
    pub fn new(
        v: Mat2<T>,
        u1: Mat2<T>,
        u2: Mat2<T>,
        zeta: T,
        xi: T,
        theta: T,
        sigma: T,
    ) -> Result<Self> {
        for (name, m) in [("v", &v), ("u1", &u1), ("u2", &u2)] {
            let dev = m.unitary_deviation();
            if dev > T::TOL_GATE {
                let _ = name;
                return Err(Error::NotUnitary { deviation: dev.as_f64() });
            }
        }
        let half_pi = T::FRAC_PI_2();
        for (name, angle) in [("zeta", zeta), ("xi", xi)] {
            if !angle.is_finite() || angle < -T::TOL_GATE || angle > half_pi + T::TOL_GATE {
                return Err(Error::InvalidAngle(format!(
                    "{} = {} outside [0, pi/2]",
                    name, angle
                )));
            }
        }
        if !(theta.is_finite() && sigma.is_finite()) {
            return Err(Error::InvalidAngle("theta/sigma must be finite".into()));
        }
        Ok(Self {
            v,
            u1,
            u2,
            zeta: zeta.max(T::zero()).min(half_pi),
            xi: xi.max(T::zero()).min(half_pi),
            theta,
            sigma,
        })
    }

    pub fn v(&self) -> &Mat2<T> {
        &self.v
    }

    pub fn u1(&self) -> &Mat2<T> {
        &self.u1
    }

    pub fn u2(&self) -> &Mat2<T> {
        &self.u2
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn xi(&self) -> T {
        self.xi
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// `diag(cos ζ, sin ξ e^{iσ})` — the exit-1 rotator matrix.
    pub fn d1(&self) -> Mat2<T> {
        Mat2::diag(cr(self.zeta.cos()), C::from_polar(self.xi.sin(), self.sigma))
    }

    /// `diag(sin ζ e^{iθ}, cos ξ)` — the exit-2 rotator matrix.
    pub fn d2(&self) -> Mat2<T> {
        Mat2::diag(C::from_polar(self.zeta.sin(), self.theta), cr(self.xi.cos()))
    }
}

/// Operator frame at the second exit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Frame {
    /// Polarization flip at exit 2 already undone; operators read
    /// `K2 = u2·D2·v`. This is the frame the protocol layer consumes.
    #[default]
    Logical,
    /// Raw optical path: `K2 = X·u2·D2·v`.
    Physical,
}

/// The pair of effective operators realized by a module setting.
pub fn effective_operators<T: Scalar>(settings: &ModuleSettings<T>, frame: Frame) -> PovmPair<T> {
    let k1 = settings.u1 * settings.d1() * settings.v;
    let mut k2 = settings.u2 * settings.d2() * settings.v;
    if frame == Frame::Physical {
        k2 = Pauli::X.matrix() * k2;
    }
    PovmPair::with_tolerance(k1, k2, T::TOL_GATE)
        .expect("unitary settings always produce a complete pair")
}

// ── synthesis ────────────────────────────────────────────────────────────────

fn clamp01<T: Scalar>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

/// Diagonal-weight tiebreak: prefer the singular-value ordering whose right
/// factor is closest to diagonal, so already-diagonal operators synthesize
/// to identity unitaries.
fn orient_for_diagonal_v<T: Scalar>(
    u: Mat2<T>,
    d: [T; 2],
    v: Mat2<T>,
) -> (Mat2<T>, [T; 2], Mat2<T>) {
    let mass = v.e[0][0].norm_sqr() + v.e[1][1].norm_sqr();
    let mass_swapped = v.e[0][1].norm_sqr() + v.e[1][0].norm_sqr();
    if mass_swapped > mass + T::epsilon() {
        (swap_columns(&u), [d[1], d[0]], swap_rows(&v))
    } else {
        (u, d, v)
    }
}

fn swap_columns<T: Scalar>(m: &Mat2<T>) -> Mat2<T> {
    Mat2::new([[m.e[0][1], m.e[0][0]], [m.e[1][1], m.e[1][0]]])
}

fn swap_rows<T: Scalar>(m: &Mat2<T>) -> Mat2<T> {
    Mat2::new([m.e[1], m.e[0]])
}

/// Synthesize module parameters implementing a given POVM pair.
///
/// Decomposes `M1 = u1·D1·v1` and `M2 = u2'·D2·v2`, verifies that
/// `W = v2·v1†` is a diagonal unitary (completeness forces this; a failure
/// marks the pair as inconsistent), and returns settings with `v = v1`,
/// `u2 = u2'·W` and angles read off the diagonals. The diagonal phases are
/// absorbed into the unitaries, so the returned θ and σ are canonically 0
/// and `D1 = diag(cos ζ, sin ξ)`, `D2 = diag(sin ζ, cos ξ)`.
pub fn synthesize_module<T: Scalar>(pair: &PovmPair<T>) -> Result<ModuleSettings<T>> {
    validate_povm(pair.m1(), pair.m2(), T::TOL_GATE)?;

    let s1 = svd2(pair.m1());
    let (u1, d1, v1) = orient_for_diagonal_v(s1.u, s1.d, s1.v);

    let zeta = clamp01(d1[0]).acos();
    let xi = clamp01(d1[1]).asin();
    let required = [zeta.sin(), xi.cos()];

    // Outcome 2 never fires: any unitary serves at the second exit.
    if required[0].max(required[1]) < T::of(1e-6) {
        return ModuleSettings::new(v1, u1, Mat2::identity(), zeta, xi, T::zero(), T::zero());
    }

    let s2 = svd2(pair.m2());
    // align the ordering of D2 with (sin ζ, cos ξ)
    let keep = (s2.d[0] - required[0]).abs().max((s2.d[1] - required[1]).abs());
    let swap = (s2.d[1] - required[0]).abs().max((s2.d[0] - required[1]).abs());
    let (u2p, _d2, v2) = if swap < keep {
        (swap_columns(&s2.u), [s2.d[1], s2.d[0]], swap_rows(&s2.v))
    } else {
        (s2.u, s2.d, s2.v)
    };

    let w = v2 * v1.adjoint();
    let off = w.e[0][1].norm_sqr().sqrt().max(w.e[1][0].norm_sqr().sqrt());
    let diag_dev = (w.e[0][0].norm_sqr().sqrt() - T::one())
        .abs()
        .max((w.e[1][1].norm_sqr().sqrt() - T::one()).abs());
    if off > T::TOL_SYNTH || diag_dev > T::TOL_SYNTH {
        return Err(Error::InconsistentPair { off_diagonal: off.max(diag_dev).as_f64() });
    }

    let u2 = u2p * w;
    ModuleSettings::new(v1, u1, u2, zeta, xi, T::zero(), T::zero())
}

// ── forward simulation ───────────────────────────────────────────────────────

/// One weighted exit branch of the module.
#[derive(Clone, Copy, Debug)]
pub struct ModuleBranch<T: Scalar> {
    pub probability: T,
    /// Normalized exit state; `None` below the probability floor.
    pub state: Option<PureQubit<T>>,
}

/// Propagate a pure input through the module, returning both weighted exit
/// branches. Branch `m` equals the action of the effective operator `K_m`
/// in the requested frame; total probability is 1.
pub fn simulate_module<T: Scalar>(
    settings: &ModuleSettings<T>,
    input: &PureQubit<T>,
    frame: Frame,
) -> [ModuleBranch<T>; 2] {
    let pair = effective_operators(settings, frame);
    let branch = |op: &Mat2<T>| {
        let amp = op.mul_vec(&input.ket());
        let p = amp.norm_sqr();
        let state = if p > T::PROB_FLOOR {
            amp.normalized().map(|ket| {
                PureQubit::from_ket(ket).expect("normalized ket is a valid state")
            })
        } else {
            None
        };
        ModuleBranch { probability: p, state }
    };
    [branch(pair.m1()), branch(pair.m2())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ci;

    fn r(x: f64) -> C<f64> {
        cr(x)
    }

    fn projective_pair() -> PovmPair<f64> {
        PovmPair::new(Mat2::diag(r(1.0), r(0.0)), Mat2::diag(r(0.0), r(1.0))).unwrap()
    }

    #[test]
    fn validate_accepts_projective_and_balanced() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(validate_povm(
            &Mat2::diag(r(1.0), r(0.0)),
            &Mat2::diag(r(0.0), r(1.0)),
            1e-12
        )
        .is_ok());
        assert!(validate_povm(
            &Mat2::identity().scale_re(s),
            &Mat2::identity().scale_re(s),
            1e-12
        )
        .is_ok());
    }

    #[test]
    fn validate_rejects_overcomplete() {
        let err = validate_povm(&Mat2::<f64>::identity(), &Mat2::identity(), 1e-10).unwrap_err();
        match err {
            Error::CompletenessViolation { deviation } => {
                assert!((deviation - 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn measurement_on_h_with_projective_pair() {
        let rho = PureQubit::<f64>::h().density();
        let out = apply_measurement(&rho, &projective_pair(), 1).unwrap();
        assert!((out.probability - 1.0).abs() < 1e-14);
        let post = out.post_state.unwrap();
        assert!((*post.mat() - *rho.mat()).max_abs() < 1e-14);
    }

    #[test]
    fn measurement_zero_probability_branch_flagged() {
        let rho = PureQubit::<f64>::h().density();
        let out = apply_measurement(&rho, &projective_pair(), 2).unwrap();
        assert!(out.probability < 1e-14);
        assert!(out.post_state.is_none());
    }

    #[test]
    fn measurement_on_maximally_mixed_balanced_pair() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let pair = PovmPair::new(
            Mat2::identity().scale_re(s),
            Mat2::identity().scale_re(s),
        )
        .unwrap();
        let rho = DensityMatrix::<f64>::maximally_mixed();
        for m in [1, 2] {
            let out = apply_measurement(&rho, &pair, m).unwrap();
            assert!((out.probability - 0.5).abs() < 1e-14);
            let post = out.post_state.unwrap();
            assert!((*post.mat() - *rho.mat()).max_abs() < 1e-14);
        }
    }

    #[test]
    fn measurement_probability_from_diagonal_povm() {
        // diag(0.6, 0.8e^{iπ/3}) acting on |D⟩: p = tr(diag(0.36,0.64)·|D⟩⟨D|) = 0.5
        let phase = C::from_polar(0.8, std::f64::consts::FRAC_PI_3);
        let m1 = Mat2::diag(r(0.6), phase);
        let m2 = Mat2::diag(phase, r(0.6));
        let pair = PovmPair::new(m1, m2).unwrap();
        let out = apply_measurement(&PureQubit::d().density(), &pair, 1).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-14);
        // post state ∝ (0.6|H⟩ + 0.8e^{iπ/3}|V⟩)
        let want = PureQubit::new(r(0.6), phase).unwrap().density();
        let got = out.post_state.unwrap();
        assert!((*got.mat() - *want.mat()).max_abs() < 1e-13);
    }

    #[test]
    fn synthesis_of_projective_pair() {
        let settings = synthesize_module(&projective_pair()).unwrap();
        assert!(settings.zeta().abs() < 1e-12);
        assert!(settings.xi().abs() < 1e-12);
        assert!((*settings.v() - Mat2::identity()).max_abs() < 1e-12);
        assert!((*settings.u1() - Mat2::identity()).max_abs() < 1e-12);
        assert!((*settings.u2() - Mat2::identity()).max_abs() < 1e-12);
    }

    #[test]
    fn synthesis_reads_angles_off_diagonals() {
        let pair =
            PovmPair::new(Mat2::diag(r(0.6), r(0.8)), Mat2::diag(r(0.8), r(0.6))).unwrap();
        let settings = synthesize_module(&pair).unwrap();
        assert!((settings.zeta() - 0.6f64.acos()).abs() < 1e-12);
        assert!((settings.xi() - 0.8f64.asin()).abs() < 1e-12);
        assert!(settings.theta().abs() < 1e-15 && settings.sigma().abs() < 1e-15);
        assert!((*settings.v() - Mat2::identity()).max_abs() < 1e-12);
        assert!((*settings.u1() - Mat2::identity()).max_abs() < 1e-12);
        assert!((*settings.u2() - Mat2::identity()).max_abs() < 1e-12);
    }

    #[test]
    fn synthesis_round_trip_reconstructs_operators() {
        let m1 = Mat2::new([[r(0.48), r(-0.36)], [ci(0.1, 0.43), r(0.52)]]);
        // build a valid partner: M2†M2 = I − M1†M1 via its PSD square root
        let e2 = Mat2::identity() - m1.adjoint() * m1;
        let m2 = crate::linalg::sqrt_psd2(&e2).unwrap();
        let pair = PovmPair::new(m1, m2).unwrap();
        let settings = synthesize_module(&pair).unwrap();
        let rebuilt = effective_operators(&settings, Frame::Logical);
        assert!((*rebuilt.m1() - m1).max_abs() < 1e-10);
        assert!((*rebuilt.m2() - m2).max_abs() < 1e-10);
    }

    #[test]
    fn synthesis_of_silent_second_outcome() {
        // {U, 0} is complete; exit 2 never fires
        let u = Mat2::new([
            [r(0.6), r(0.8)],
            [r(-0.8), r(0.6)],
        ]);
        let pair = PovmPair::new(u, Mat2::zero()).unwrap();
        let settings = synthesize_module(&pair).unwrap();
        let rebuilt = effective_operators(&settings, Frame::Logical);
        assert!((*rebuilt.m1() - u).max_abs() < 1e-10);
        assert!(rebuilt.m2().max_abs() < 1e-6);
    }

    #[test]
    fn effective_operators_balanced_split() {
        let q = std::f64::consts::FRAC_PI_4;
        let settings = ModuleSettings::new(
            Mat2::identity(),
            Mat2::identity(),
            Mat2::identity(),
            q,
            q,
            0.0,
            0.0,
        )
        .unwrap();
        let pair = effective_operators(&settings, Frame::Logical);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((*pair.m1() - Mat2::identity().scale_re(s)).max_abs() < 1e-14);
        assert!((*pair.m2() - Mat2::identity().scale_re(s)).max_abs() < 1e-14);
    }

    #[test]
    fn physical_frame_carries_the_flip() {
        let settings = synthesize_module(&projective_pair()).unwrap();
        let logical = effective_operators(&settings, Frame::Logical);
        let physical = effective_operators(&settings, Frame::Physical);
        let flipped = Pauli::X.matrix::<f64>() * *logical.m2();
        assert!((*physical.m2() - flipped).max_abs() < 1e-14);
        assert!((*physical.m1() - *logical.m1()).max_abs() < 1e-14);
    }

    #[test]
    fn simulate_ballistic_h_input() {
        let settings = ModuleSettings::new(
            Mat2::<f64>::identity(),
            Mat2::identity(),
            Mat2::identity(),
            0.0,
            0.3,
            0.0,
            0.0,
        )
        .unwrap();
        let branches = simulate_module(&settings, &PureQubit::h(), Frame::Logical);
        assert!((branches[0].probability - 1.0).abs() < 1e-14);
        assert!(branches[1].probability < 1e-14);
        let out = branches[0].state.unwrap();
        assert!((out.amp_h().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simulate_matches_effective_operators() {
        let settings = ModuleSettings::new(
            Mat2::identity(),
            Mat2::identity(),
            Mat2::identity(),
            0.9,
            0.4,
            0.7,
            -0.2,
        )
        .unwrap();
        let input = PureQubit::new(ci(0.6f64, 0.0), C::from_polar(0.8, 0.9)).unwrap();
        let pair = effective_operators(&settings, Frame::Logical);
        let branches = simulate_module(&settings, &input, Frame::Logical);
        for (m, b) in [1u8, 2].iter().zip(branches.iter()) {
            let out = apply_measurement(&input.density(), &pair, *m).unwrap();
            assert!((out.probability - b.probability).abs() < 1e-12);
            if let (Some(post), Some(state)) = (out.post_state, &b.state) {
                assert!((*post.mat() - *state.density().mat()).max_abs() < 1e-12);
            }
        }
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
