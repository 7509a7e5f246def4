//! The 18-state evaluation suite: a fixed, reproducible manifest of pure
//! and mixed targets, analytic propagation through the noisy pipeline, and
//! the sampled pipeline ending in maximum-likelihood tomography.
//!
//! Default manifest: four pure states per longitude at φ ∈ {0°, 120°, 240°}
//! with polar amplitudes α = cos(kπ/16), k = 1..4, plus six mixed states
//! (weights p² ∈ {0.75, 0.9}) along the same three longitudes at polar
//! angle π/8. A manifest file may override it.

use rayon::prelude::*;

use crate::error::Result;
use crate::noise::{derive_seed, noisy_source, InterferometerChannel, NoiseConfig};
use crate::protocol::{run_mixed_rsp_with_source, run_pure_rsp_with_source, BranchResult};
use crate::scalar::Scalar;
use crate::state::{
    purity, stokes, target_mixed, target_pure, DensityMatrix, TargetMixedSpec, TargetPureSpec,
    TwoQubitState,
};
use crate::tomo::{measure_bases, mle_reconstruct, report_fidelity, ReconstructionResult, TomoCounts};

/// A pure or mixed preparation target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetSpec<T: Scalar> {
    Pure(TargetPureSpec<T>),
    Mixed(TargetMixedSpec<T>),
}

impl<T: Scalar> TargetSpec<T> {
    /// Density matrix of the target.
    pub fn density(&self) -> DensityMatrix<T> {
        match self {
            TargetSpec::Pure(spec) => target_pure(spec).density(),
            TargetSpec::Mixed(spec) => target_mixed(spec),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TargetSpec::Pure(_) => "pure",
            TargetSpec::Mixed(_) => "mixed",
        }
    }
}

/// One manifest row.
#[derive(Clone, Debug)]
pub struct ManifestEntry<T: Scalar> {
    pub label: String,
    pub spec: TargetSpec<T>,
}

/// The fixed 18-state default manifest (12 pure + 6 mixed).
pub fn default_manifest<T: Scalar>() -> Vec<ManifestEntry<T>> {
    let mut entries = Vec::with_capacity(18);
    let longitudes = [0.0f64, 2.0 / 3.0, 4.0 / 3.0]; // units of π
    for (li, lon) in longitudes.iter().enumerate() {
        let phi = T::of(*lon) * T::PI();
        let deg = (lon * 180.0).round() as u32;
        for k in 1..=4u32 {
            let theta = T::of(k as f64 / 16.0) * T::PI();
            let spec = TargetPureSpec::from_polar(theta, phi)
                .expect("cos/sin pair is normalized");
            entries.push(ManifestEntry {
                label: format!("pure_phi{deg:03}_k{k}"),
                spec: TargetSpec::Pure(spec),
            });
        }
        let _ = li;
    }
    for (lon, deg) in longitudes.iter().map(|l| (T::of(*l) * T::PI(), (l * 180.0).round() as u32)) {
        for p2 in [0.75f64, 0.9] {
            let theta = T::of(1.0 / 8.0) * T::PI();
            let (alpha, beta) = (theta.cos(), theta.sin());
            let p = T::of(p2).sqrt();
            let q = (T::one() - T::of(p2)).sqrt();
            let spec = TargetMixedSpec::new(alpha, beta, lon, p, q)
                .expect("constructed weights are normalized");
            entries.push(ManifestEntry {
                label: format!("mixed_phi{deg:03}_p{:02}", (p2 * 100.0) as u32),
                spec: TargetSpec::Mixed(spec),
            });
        }
    }
    entries
}

/// Shared two-qubit state after the source and the mean interferometer
/// channel.
pub fn prepared_shared<T: Scalar>(cfg: &NoiseConfig<T>) -> TwoQubitState<T> {
    let source = noisy_source(cfg);
    InterferometerChannel::from_config(cfg).apply_mean(&source)
}

/// Run the protocol matching the target kind on a shared state.
pub fn run_branches<T: Scalar>(
    spec: &TargetSpec<T>,
    shared: &TwoQubitState<T>,
) -> Result<[BranchResult<T>; 4]> {
    match spec {
        TargetSpec::Pure(s) => run_pure_rsp_with_source(shared, s),
        TargetSpec::Mixed(s) => run_mixed_rsp_with_source(shared, s),
    }
}

/// Analytic (no-sampling) figures for a whole manifest.
#[derive(Clone, Debug)]
pub struct SuiteStats<T> {
    /// Mean branch fidelity over all states and branches.
    pub mean: T,
    /// Minimum branch fidelity.
    pub min: T,
    /// Per state: the four branch fidelities.
    pub per_state: Vec<[T; 4]>,
}

/// Propagate every manifest state through the noisy pipeline and report
/// exact branch fidelities against the targets.
pub fn analytic_suite_stats<T: Scalar>(
    manifest: &[ManifestEntry<T>],
    cfg: &NoiseConfig<T>,
) -> Result<SuiteStats<T>> {
    let shared = prepared_shared(cfg);
    let mut per_state = Vec::with_capacity(manifest.len());
    let mut sum = T::zero();
    let mut min = T::one();
    for entry in manifest {
        let target = entry.spec.density();
        let branches = run_branches(&entry.spec, &shared)?;
        let mut fids = [T::zero(); 4];
        for (k, b) in branches.iter().enumerate() {
            let f = match &b.bob_post {
                Some(post) => crate::state::fidelity(post, &target),
                None => T::zero(),
            };
            fids[k] = f;
            sum += f;
            min = min.min(f);
        }
        per_state.push(fids);
    }
    let count = T::of((manifest.len() * 4) as f64);
    Ok(SuiteStats { mean: sum / count, min, per_state })
}

// ── sampled pipeline ─────────────────────────────────────────────────────────

/// Tomography outcome for one protocol branch.
#[derive(Clone, Copy, Debug)]
pub struct TomoOutcome<T: Scalar> {
    pub counts: TomoCounts,
    pub reconstruction: ReconstructionResult<T>,
    pub fidelity: T,
}

/// One branch of one suite state, analytic and sampled.
#[derive(Clone, Copy, Debug)]
pub struct BranchRun<T: Scalar> {
    pub result: BranchResult<T>,
    pub fidelity_analytic: T,
    pub tomo: Option<TomoOutcome<T>>,
}

/// A fully evaluated suite state.
#[derive(Clone, Debug)]
pub struct StateRun<T: Scalar> {
    pub label: String,
    pub spec: TargetSpec<T>,
    pub branches: [BranchRun<T>; 4],
}

impl<T: Scalar> StateRun<T> {
    /// Equal-weight average of the four reconstructed states; estimates the
    /// same target as each branch.
    pub fn mean_reconstruction(&self) -> Option<DensityMatrix<T>> {
        let quarter = T::of(0.25);
        let mut acc = crate::linalg::Mat2::zero();
        for b in &self.branches {
            acc = acc + b.tomo?.reconstruction.rho_hat.mat().scale_re(quarter);
        }
        DensityMatrix::new(acc).ok()
    }

    /// Per-state Poincaré row: Stokes coordinates and purity of the mean
    /// reconstruction, plus its fidelity against the target.
    pub fn poincare_row(&self) -> Option<([T; 3], T, T)> {
        let mean = self.mean_reconstruction()?;
        let target = self.spec.density();
        Some((stokes(&mean), purity(&mean), report_fidelity(&mean, &target)))
    }
}

/// Evaluate one manifest state with tomography on every branch.
pub fn run_state<T: Scalar>(
    entry: &ManifestEntry<T>,
    shared: &TwoQubitState<T>,
    cfg: &NoiseConfig<T>,
    state_index: u64,
) -> Result<StateRun<T>> {
    let target = entry.spec.density();
    let branches = run_branches(&entry.spec, shared)?;
    let mut runs = Vec::with_capacity(4);
    for (bi, b) in branches.iter().enumerate() {
        let fidelity_analytic = match &b.bob_post {
            Some(post) => crate::state::fidelity(post, &target),
            None => T::zero(),
        };
        let tomo = match &b.bob_post {
            Some(post) => {
                let seed = derive_seed(cfg.seed, state_index * 8 + bi as u64);
                let counts = measure_bases(post, cfg.shots, seed);
                let reconstruction = mle_reconstruct::<T>(&counts)?;
                let fidelity = report_fidelity(&reconstruction.rho_hat, &target);
                Some(TomoOutcome { counts, reconstruction, fidelity })
            }
            None => None,
        };
        runs.push(BranchRun { result: *b, fidelity_analytic, tomo });
    }
    Ok(StateRun {
        label: entry.label.clone(),
        spec: entry.spec,
        branches: [runs[0], runs[1], runs[2], runs[3]],
    })
}

/// Evaluate a whole manifest concurrently. States are independent tasks
/// with derived seeds, so the result is a deterministic ordered merge.
pub fn run_suite<T: Scalar>(
    manifest: &[ManifestEntry<T>],
    cfg: &NoiseConfig<T>,
) -> Result<Vec<StateRun<T>>> {
    let shared = prepared_shared(cfg);
    manifest
        .par_iter()
        .enumerate()
        .map(|(i, entry)| run_state(entry, &shared, cfg, i as u64))
        .collect()
}
