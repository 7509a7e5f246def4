//! Stochastic experiment layer: the noisy entangled-pair source, the
//! interferometer channel, seeded shot sampling, CHSH correlation tests,
//! and calibration of the noise knobs against reported figures of merit.
//!
//! All randomness is drawn from seeded ChaCha8 generators. Independent
//! tasks derive their own seed with [`derive_seed`], so fan-out order never
//! affects results.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::{cr, kron, Mat2, Mat4};
use crate::scalar::Scalar;
use crate::state::{bell_psi_plus, pauli, DensityMatrix, Pauli, TwoQubitState};
use crate::suite;

/// Default seed for every sampling entry point.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

// ── configuration ────────────────────────────────────────────────────────────

/// Noise and sampling knobs of the simulated experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig<T: Scalar> {
    /// Source visibility of the Werner-form entangled pair, in [0, 1].
    pub werner_v: T,
    /// Interferometer visibility as measured by the diagonal-probe
    /// calibration, in [0, 1].
    pub interferometer_visibility: T,
    /// Standard deviation of the per-shot relative phase between the two
    /// interferometer arms, radians.
    pub phase_jitter_std: T,
    /// Shots per sampled quantity (per setting, per basis, ...).
    pub shots: u64,
    pub seed: u64,
}

impl<T: Scalar> NoiseConfig<T> {
    pub fn new(
        werner_v: T,
        interferometer_visibility: T,
        phase_jitter_std: T,
        shots: u64,
        seed: u64,
    ) -> Result<Self> {
        let unit = |name: &str, x: T| -> Result<()> {
            if !x.is_finite() || x < T::zero() || x > T::one() {
                return Err(Error::InvalidNoiseConfig(format!(
                    "{name} = {x} outside [0, 1]"
                )));
            }
            Ok(())
        };
        unit("werner_v", werner_v)?;
        unit("interferometer_visibility", interferometer_visibility)?;
        if !phase_jitter_std.is_finite() || phase_jitter_std < T::zero() {
            return Err(Error::InvalidNoiseConfig(format!(
                "phase_jitter_std = {phase_jitter_std} must be non-negative"
            )));
        }
        if shots == 0 {
            return Err(Error::InvalidNoiseConfig("shots must be at least 1".into()));
        }
        Ok(Self { werner_v, interferometer_visibility, phase_jitter_std, shots, seed })
    }

    /// Noiseless configuration with the default seed and 10⁴ shots.
    pub fn ideal() -> Self {
        Self {
            werner_v: T::one(),
            interferometer_visibility: T::one(),
            phase_jitter_std: T::zero(),
            shots: 10_000,
            seed: DEFAULT_SEED,
        }
    }
}

impl<T: Scalar> Default for NoiseConfig<T> {
    fn default() -> Self {
        Self::ideal()
    }
}

// ── seeded generators ────────────────────────────────────────────────────────

/// Seed for an independent subtask; SplitMix64 over (base, task index).
pub fn derive_seed(base: u64, task: u64) -> u64 {
    let mut z = base ^ task.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for a given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ── entangled-pair source ────────────────────────────────────────────────────

/// Werner state `v·|ψ⁺⟩⟨ψ⁺| + (1−v)·I/4`.
pub fn werner_state<T: Scalar>(v: T) -> Result<TwoQubitState<T>> {
    if !v.is_finite() || v < T::zero() || v > T::one() {
        return Err(Error::InvalidNoiseConfig(format!("werner_v = {v} outside [0, 1]")));
    }
    let bell = bell_psi_plus::<T>();
    let quarter = (T::one() - v) * T::of(0.25);
    let mat = bell.mat().scale_re(v) + Mat4::identity().scale_re(quarter);
    TwoQubitState::new(mat)
}

/// Entangled-pair source at the configured Werner visibility.
pub fn noisy_source<T: Scalar>(cfg: &NoiseConfig<T>) -> TwoQubitState<T> {
    werner_state(cfg.werner_v).expect("config ranges are validated")
}

// ── interferometer channel ───────────────────────────────────────────────────

/// Phase and visibility imperfections of the module interferometer, acting
/// on Alice's qubit in the H/V (arm) basis.
///
/// A diagonal probe sent through an ideal equatorial module reproduces the
/// polarizer-calibration identity: projection visibility equals
/// `interferometer_visibility`.
#[derive(Clone, Copy, Debug)]
pub struct InterferometerChannel<T: Scalar> {
    pub visibility: T,
    pub phase_jitter_std: T,
}

impl<T: Scalar> InterferometerChannel<T> {
    pub fn from_config(cfg: &NoiseConfig<T>) -> Self {
        Self {
            visibility: cfg.interferometer_visibility,
            phase_jitter_std: cfg.phase_jitter_std,
        }
    }

    /// Arm coherence retained by the shot-averaged channel:
    /// `visibility · exp(−σ²/2)` (Gaussian phase average).
    pub fn coherence_factor(&self) -> T {
        let s = self.phase_jitter_std;
        self.visibility * (-(s * s) * T::of(0.5)).exp()
    }

    /// Shot-averaged channel.
    pub fn apply_mean(&self, rho: &TwoQubitState<T>) -> TwoQubitState<T> {
        dephase_alice(rho, self.coherence_factor(), T::zero())
    }

    /// Shot-averaged channel on a lone probe qubit entering the module.
    pub fn apply_mean_qubit(&self, rho: &DensityMatrix<T>) -> DensityMatrix<T> {
        let k = self.coherence_factor();
        let mut m = *rho.mat();
        m.e[0][1] = m.e[0][1] * cr(k);
        m.e[1][0] = m.e[1][0] * cr(k);
        DensityMatrix::new(m).expect("dephasing preserves state validity")
    }

    /// Single-shot channel at a fixed arm phase `delta`.
    pub fn apply_with_phase(&self, rho: &TwoQubitState<T>, delta: T) -> TwoQubitState<T> {
        dephase_alice(rho, self.visibility, delta)
    }

    pub fn sample_phase(&self, rng: &mut ChaCha8Rng) -> T {
        let std = self.phase_jitter_std.as_f64();
        if std == 0.0 {
            return T::zero();
        }
        let normal = Normal::new(0.0, std).expect("validated std");
        T::of(normal.sample(rng))
    }
}

/// Scale Alice-side H/V coherence by `k` and rotate it by `e^{iδ}`.
fn dephase_alice<T: Scalar>(rho: &TwoQubitState<T>, k: T, delta: T) -> TwoQubitState<T> {
    let mut m = *rho.mat();
    let rot = Complex::from_polar(k, delta);
    for i in 0..4 {
        for j in 0..4 {
            let (ai, aj) = (i >> 1, j >> 1);
            if ai == aj {
                continue;
            }
            let factor = if ai > aj { rot } else { rot.conj() };
            m.e[i][j] *= factor;
        }
    }
    TwoQubitState::new(m).expect("dephasing preserves state validity")
}

// ── shot sampling ────────────────────────────────────────────────────────────

/// Counts per outcome of a finite distribution; sums to the shot budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub counts: Vec<u64>,
}

impl ShotRecord {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn frequencies<T: Scalar>(&self) -> Vec<T> {
        let n = T::of(self.total() as f64);
        self.counts.iter().map(|c| T::of(*c as f64) / n).collect()
    }
}

/// Multinomial draw of `n` shots from a finite distribution, reproducible
/// from the seed.
pub fn sample_shots<T: Scalar>(probabilities: &[T], n: u64, seed: u64) -> Result<ShotRecord> {
    sample_shots_with_rng(probabilities, n, &mut seeded_rng(seed))
}

/// As [`sample_shots`], drawing from a caller-owned generator.
pub fn sample_shots_with_rng<T: Scalar>(
    probabilities: &[T],
    n: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ShotRecord> {
    if probabilities.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    let mut total = T::zero();
    for p in probabilities {
        if !p.is_finite() || *p < -T::TOL_DIST {
            return Err(Error::InvalidDistribution(format!("probability {p}")));
        }
        total += p.max(T::zero());
    }
    if (total - T::one()).abs() > T::TOL_DIST {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }

    // sequential conditional binomials
    let mut counts = vec![0u64; probabilities.len()];
    let mut remaining_n = n;
    let mut remaining_p = 1.0f64;
    for (i, p) in probabilities.iter().enumerate() {
        if i + 1 == probabilities.len() {
            counts[i] = remaining_n;
            break;
        }
        if remaining_n == 0 {
            break;
        }
        let cond = (p.max(T::zero()).as_f64() / remaining_p).clamp(0.0, 1.0);
        let draw = rand_distr::Binomial::new(remaining_n, cond)
            .expect("clamped probability")
            .sample(rng);
        counts[i] = draw;
        remaining_n -= draw;
        remaining_p = (remaining_p - p.as_f64()).max(f64::MIN_POSITIVE);
    }
    Ok(ShotRecord { counts })
}

// ── CHSH ─────────────────────────────────────────────────────────────────────

/// Polarization analyzer angles (radians) for the four CHSH settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshSettings<T> {
    pub alice: [T; 2],
    pub bob: [T; 2],
}

impl<T: Scalar> Default for ChshSettings<T> {
    /// Optimal angles for `|ψ⁺⟩`: a = (0°, 45°), b = (67.5°, 22.5°).
    fn default() -> Self {
        let pi = T::PI();
        Self {
            alice: [T::zero(), pi / T::of(4.0)],
            bob: [pi * T::of(3.0 / 8.0), pi / T::of(8.0)],
        }
    }
}

/// ±1-valued polarization observable at analyzer angle θ:
/// `cos 2θ·σz + sin 2θ·σx`.
pub fn analyzer_operator<T: Scalar>(theta: T) -> Mat2<T> {
    let two = T::of(2.0);
    pauli(Pauli::Z).scale_re((two * theta).cos()) + pauli(Pauli::X).scale_re((two * theta).sin())
}

/// Correlation `E(a, b) = tr[ρ · A(a) ⊗ B(b)]`.
pub fn correlation<T: Scalar>(rho: &TwoQubitState<T>, a: T, b: T) -> T {
    let ab = kron(&analyzer_operator(a), &analyzer_operator(b));
    (ab * *rho.mat()).trace().re
}

/// Analytic CHSH combination
/// `S = E(a1,b1) − E(a1,b2) + E(a2,b1) + E(a2,b2)`.
pub fn chsh_analytic<T: Scalar>(rho: &TwoQubitState<T>, settings: &ChshSettings<T>) -> T {
    let e11 = correlation(rho, settings.alice[0], settings.bob[0]);
    let e12 = correlation(rho, settings.alice[0], settings.bob[1]);
    let e21 = correlation(rho, settings.alice[1], settings.bob[0]);
    let e22 = correlation(rho, settings.alice[1], settings.bob[1]);
    e11 - e12 + e21 + e22
}

/// Sampled CHSH estimate with propagated standard error.
#[derive(Clone, Copy, Debug)]
pub struct ChshSample<T> {
    pub s: T,
    pub stderr: T,
    pub correlators: [T; 4],
    pub shots_per_setting: u64,
}

/// Finite-shot CHSH test: for each of the four settings, sample the joint
/// ±1 outcome distribution and form the plug-in correlator.
pub fn chsh_sampled<T: Scalar>(
    rho: &TwoQubitState<T>,
    settings: &ChshSettings<T>,
    shots_per_setting: u64,
    seed: u64,
) -> Result<ChshSample<T>> {
    let pairs = [
        (settings.alice[0], settings.bob[0]),
        (settings.alice[0], settings.bob[1]),
        (settings.alice[1], settings.bob[0]),
        (settings.alice[1], settings.bob[1]),
    ];
    let half = T::of(0.5);
    let mut correlators = [T::zero(); 4];
    let mut variance = T::zero();
    for (k, (a, b)) in pairs.iter().enumerate() {
        let pa = [
            (Mat2::identity() + analyzer_operator(*a)).scale_re(half),
            (Mat2::identity() - analyzer_operator(*a)).scale_re(half),
        ];
        let pb = [
            (Mat2::identity() + analyzer_operator(*b)).scale_re(half),
            (Mat2::identity() - analyzer_operator(*b)).scale_re(half),
        ];
        let mut probs = [T::zero(); 4];
        for i in 0..2 {
            for j in 0..2 {
                let joint = kron(&pa[i], &pb[j]);
                probs[2 * i + j] = (joint * *rho.mat()).trace().re.max(T::zero());
            }
        }
        let record = sample_shots_with_rng(
            &probs,
            shots_per_setting,
            &mut seeded_rng(derive_seed(seed, k as u64)),
        )?;
        let f = record.frequencies::<T>();
        let e = f[0] + f[3] - f[1] - f[2];
        correlators[k] = e;
        let n = T::of(shots_per_setting as f64);
        variance += (T::one() - e * e).max(T::zero()) / n;
    }
    let s = correlators[0] - correlators[1] + correlators[2] + correlators[3];
    Ok(ChshSample { s, stderr: variance.sqrt(), correlators, shots_per_setting })
}

// ── calibration ──────────────────────────────────────────────────────────────

/// Reported figure of merit to reproduce.
#[derive(Clone, Copy, Debug)]
pub enum CalibrationTarget<T> {
    /// Calibrate the source visibility so the analytic CHSH value matches.
    ChshS(T),
    /// Calibrate the interferometer visibility so the analytic mean
    /// fidelity over the default 18-state suite matches.
    MeanFidelity(T),
    /// Calibrate the interferometer visibility so the analytic minimum
    /// per-state fidelity over the default suite matches.
    MinFidelity(T),
}

/// Invert the chosen figure of merit into a noise configuration.
///
/// The CHSH target inverts the linear relation `S = 2√2·v` of the Werner
/// source. Fidelity targets hold the source ideal and bisect the
/// interferometer visibility against the analytic suite evaluation.
pub fn calibrate_to_paper<T: Scalar>(target: CalibrationTarget<T>) -> Result<NoiseConfig<T>> {
    let mut cfg = NoiseConfig::<T>::ideal();
    match target {
        CalibrationTarget::ChshS(s) => {
            let tsirelson = T::of(2.0) * T::SQRT_2();
            if !s.is_finite() || s < T::zero() || s > tsirelson + T::TOL_GATE {
                return Err(Error::UnreachableTarget(format!(
                    "S = {s} outside [0, 2*sqrt(2)]"
                )));
            }
            cfg.werner_v = (s / tsirelson).min(T::one());
            Ok(cfg)
        }
        CalibrationTarget::MeanFidelity(f) => {
            cfg.interferometer_visibility = bisect_visibility(f, |c| {
                suite::analytic_suite_stats(&suite::default_manifest(), c).map(|s| s.mean)
            })?;
            Ok(cfg)
        }
        CalibrationTarget::MinFidelity(f) => {
            cfg.interferometer_visibility = bisect_visibility(f, |c| {
                suite::analytic_suite_stats(&suite::default_manifest(), c).map(|s| s.min)
            })?;
            Ok(cfg)
        }
    }
}

fn bisect_visibility<T: Scalar>(
    target: T,
    eval: impl Fn(&NoiseConfig<T>) -> Result<T>,
) -> Result<T> {
    let at = |v: T| -> Result<T> {
        let mut c = NoiseConfig::<T>::ideal();
        c.interferometer_visibility = v;
        eval(&c)
    };
    let lo_val = at(T::zero())?;
    let hi_val = at(T::one())?;
    if target > hi_val + T::TOL_INPUT || target < lo_val - T::TOL_INPUT {
        return Err(Error::UnreachableTarget(format!(
            "fidelity {target} outside achievable range [{lo_val}, {hi_val}]"
        )));
    }
    let (mut lo, mut hi) = (T::zero(), T::one());
    // the figure of merit is monotone increasing in visibility
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        let val = at(mid)?;
        if (val - target).abs() < T::of(1e-12) {
            return Ok(mid);
        }
        if val < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::of(0.5))
}
