//! Report document: a self-describing JSON tree with complex matrices as
//! paired real/imag arrays. Reports with the same config and seed are
//! byte-identical except for the isolated `wall_clock_ms` key.

use serde::{Deserialize, Serialize};

use rsp_core::linalg::Mat2;
use rsp_core::state::stokes;
use rsp_core::suite::StateRun;
use rsp_core::tomo::TomoCounts;

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub results: Results,
    /// Isolated so that seed-identical runs diff clean.
    pub wall_clock_ms: u64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub shots: u64,
    pub werner_v: f64,
    pub visibility: f64,
    pub phase_jitter_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analyzer_angles_deg: Option<AnglesEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub strict: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TargetEcho {
    pub kind: String,
    pub alpha: f64,
    pub beta: f64,
    pub phi_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnglesEcho {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<BranchReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_fidelity_analytic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_fidelity_tomo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tomography: Option<TomoReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<StateReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub povm: Option<PovmReport>,
}

/// 2×2 complex matrix as paired real/imag row-major arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDto {
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

impl MatrixDto {
    pub fn from_mat(m: &Mat2<f64>) -> Self {
        let mut re = [[0.0; 2]; 2];
        let mut im = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                re[i][j] = m.e[i][j].re;
                im[i][j] = m.e[i][j].im;
            }
        }
        Self { re, im }
    }

}

#[derive(Debug, Serialize, Deserialize)]
pub struct BranchReport {
    /// Message bits as "0D".."1A".
    pub message: String,
    pub correction: String,
    pub probability: f64,
    pub fidelity_analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_tomo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountsDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_reconstructed: Option<MatrixDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stokes_reconstructed: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u32>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CountsDto {
    pub hv: [u64; 2],
    pub da: [u64; 2],
    pub rl: [u64; 2],
}

impl CountsDto {
    pub fn from_counts(c: &TomoCounts) -> Self {
        Self {
            hv: [c.hv.0, c.hv.1],
            da: [c.da.0, c.da.1],
            rl: [c.rl.0, c.rl.1],
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChshReport {
    pub s_analytic: f64,
    pub correlators_analytic: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_sampled: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlators_sampled: Option<[f64; 4]>,
    pub shots_per_setting: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TomoReport {
    pub counts: CountsDto,
    pub rho_reconstructed: MatrixDto,
    pub log_likelihood: f64,
    pub iterations: u32,
    pub converged: bool,
    pub fidelity_vs_target: f64,
    pub stokes_reconstructed: [f64; 3],
    pub purity_reconstructed: f64,
    pub stokes_linear_inversion: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateReport {
    pub label: String,
    pub kind: String,
    pub target: TargetEcho,
    pub branches: Vec<BranchReport>,
    pub mean_fidelity_tomo: f64,
    pub stokes_target: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stokes_prepared: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purity_prepared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_prepared: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PovmReport {
    pub completeness_deviation: f64,
    pub effect_min_eigenvalues: [f64; 2],
    pub valid_at_tolerance: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<SettingsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roundtrip_max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthesis_error: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SettingsReport {
    pub zeta_deg: f64,
    pub xi_deg: f64,
    pub theta_deg: f64,
    pub sigma_deg: f64,
    pub v: MatrixDto,
    pub u1: MatrixDto,
    pub u2: MatrixDto,
}

pub fn branch_reports(state: &StateRun<f64>) -> Vec<BranchReport> {
    state
        .branches
        .iter()
        .map(|b| {
            let tomo = b.tomo.as_ref();
            BranchReport {
                message: b.result.message.label(),
                correction: b.result.correction.op.label().to_string(),
                probability: b.result.probability,
                fidelity_analytic: b.fidelity_analytic,
                fidelity_tomo: tomo.map(|t| t.fidelity),
                counts: tomo.map(|t| CountsDto::from_counts(&t.counts)),
                rho_reconstructed: tomo
                    .map(|t| MatrixDto::from_mat(t.reconstruction.rho_hat.mat())),
                stokes_reconstructed: tomo.map(|t| stokes(&t.reconstruction.rho_hat)),
                converged: tomo.map(|t| t.reconstruction.converged),
                iterations: tomo.map(|t| t.reconstruction.iterations),
            }
        })
        .collect()
}

