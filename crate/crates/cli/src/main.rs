//! `rsp-sim` — command-line surface of the remote state preparation
//! simulator: run the pure/mixed protocols end to end, reproduce the
//! experiment-level figures (18-state suite, CHSH), validate and
//! synthesize POVM pairs, and reconstruct states from simulated counts.
//!
//! Angles are accepted in degrees on every flag and stored in radians
//! internally. Exit codes: 0 success, 2 configuration or validation
//! failure (no report written), 3 numerical failure under `--strict`.

mod files;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use rsp_core::noise::{
    calibrate_to_paper, chsh_analytic, chsh_sampled, correlation, noisy_source,
    CalibrationTarget, ChshSettings, NoiseConfig,
};
use rsp_core::povm::{completeness_report, effective_operators, synthesize_module, Frame, PovmPair};
use rsp_core::state::{stokes, TargetMixedSpec, TargetPureSpec};
use rsp_core::suite::{default_manifest, prepared_shared, run_state, run_suite, ManifestEntry, TargetSpec};
use rsp_core::tomo::{measure_bases, mle_reconstruct, report_fidelity, stokes_estimates};

use report::{
    branch_reports, AnglesEcho, ChshReport, ConfigEcho, CountsDto, MatrixDto, PovmReport, Report,
    Results, SettingsReport, StateReport, TargetEcho, TomoReport,
};

#[derive(Parser)]
#[command(name = "rsp-sim", version, about = "Deterministic remote state preparation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// RNG seed; identical seeds give byte-identical reports
    #[arg(long, default_value_t = 0xC0FFEE)]
    seed: u64,
    /// Shots per sampled quantity (tomography basis, CHSH setting)
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// Werner visibility of the entangled-pair source, in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    werner_v: f64,
    /// Interferometer visibility, in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    visibility: f64,
    /// Std of the per-shot interferometer phase, degrees
    #[arg(long, default_value_t = 0.0)]
    phase_jitter_deg: f64,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with code 3 when a reconstruction fails to converge
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Clone)]
struct PureTargetOpts {
    /// Amplitude of |H⟩, in [0, 1]
    #[arg(long)]
    alpha: f64,
    /// Amplitude of |V⟩ (before the phase), in [0, 1]
    #[arg(long)]
    beta: f64,
    /// Relative phase of the |V⟩ amplitude, degrees
    #[arg(long, default_value_t = 0.0)]
    phi_deg: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Remotely prepare a pure polarization state on all four branches
    RspPure {
        #[command(flatten)]
        target: PureTargetOpts,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Remotely prepare a mixed polarization state on all four branches
    RspMixed {
        #[command(flatten)]
        target: PureTargetOpts,
        /// Weight amplitude of the principal component, p² + q² = 1
        #[arg(long)]
        p: f64,
        /// Weight amplitude of the orthogonal component
        #[arg(long)]
        q: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the 18-state evaluation suite with per-branch tomography
    PaperSuite {
        /// Target manifest file (kind,alpha,beta,phi_deg,p,q per line)
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Calibrate the source so the analytic CHSH value matches
        #[arg(long, conflicts_with_all = ["calibrate_mean_fidelity", "calibrate_min_fidelity"])]
        calibrate_s: Option<f64>,
        /// Calibrate visibility so the analytic suite mean fidelity matches
        #[arg(long, conflicts_with = "calibrate_min_fidelity")]
        calibrate_mean_fidelity: Option<f64>,
        /// Calibrate visibility so the analytic minimum state fidelity matches
        #[arg(long)]
        calibrate_min_fidelity: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Validate a two-outcome POVM pair file and synthesize module settings
    PovmCheck {
        /// 16 numbers: (re, im) pairs of M1 then M2, row-major
        file: PathBuf,
        /// Completeness tolerance for the user-supplied pair
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// CHSH test of the (noisy) source, analytic and sampled
    Chsh {
        /// Calibrate the source visibility to this CHSH value first
        #[arg(long)]
        target_s: Option<f64>,
        /// Analyzer angles "a1,a2,b1,b2" in degrees
        #[arg(long)]
        angles_deg: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Simulate three-basis tomography of a target state and reconstruct it
    Tomo {
        #[command(flatten)]
        target: PureTargetOpts,
        /// Mixed-state weight amplitude p (requires --q)
        #[arg(long, requires = "q")]
        p: Option<f64>,
        /// Mixed-state weight amplitude q (requires --p)
        #[arg(long, requires = "p")]
        q: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    fn io(err: impl std::fmt::Display) -> Self {
        Self { code: 1, message: err.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn noise_config(common: &CommonOpts) -> Result<NoiseConfig<f64>, Failure> {
    NoiseConfig::new(
        common.werner_v,
        common.visibility,
        common.phase_jitter_deg.to_radians(),
        common.shots,
        common.seed,
    )
    .map_err(|e| Failure::config(e.to_string()))
}

fn config_echo(common: &CommonOpts, cfg: &NoiseConfig<f64>) -> ConfigEcho {
    ConfigEcho {
        seed: cfg.seed,
        shots: cfg.shots,
        werner_v: cfg.werner_v,
        visibility: cfg.interferometer_visibility,
        phase_jitter_deg: common.phase_jitter_deg,
        strict: common.strict,
        ..ConfigEcho::default()
    }
}

fn pure_target_echo(spec: &TargetPureSpec<f64>) -> TargetEcho {
    TargetEcho {
        kind: "pure".into(),
        alpha: spec.alpha(),
        beta: spec.beta(),
        phi_deg: spec.phi().to_degrees(),
        p: None,
        q: None,
    }
}

fn mixed_target_echo(spec: &TargetMixedSpec<f64>) -> TargetEcho {
    TargetEcho {
        kind: "mixed".into(),
        alpha: spec.alpha(),
        beta: spec.beta(),
        phi_deg: spec.phi().to_degrees(),
        p: Some(spec.p()),
        q: Some(spec.q()),
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(report).map_err(Failure::io)?;
    match out {
        Some(path) => std::fs::write(path, json + "\n").map_err(Failure::io),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn finish(
    command: &str,
    config: ConfigEcho,
    results: Results,
    started: Instant,
    common: &CommonOpts,
    strict_violation: bool,
) -> Result<(), Failure> {
    let report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config,
        results,
        wall_clock_ms: started.elapsed().as_millis() as u64,
    };
    emit(&report, common.out.as_deref())?;
    if strict_violation {
        return Err(Failure::numerical(
            "reconstruction did not converge (strict mode)".to_string(),
        ));
    }
    Ok(())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::RspPure { target, common } => {
            let spec = TargetPureSpec::new(target.alpha, target.beta, target.phi_deg.to_radians())
                .map_err(|e| Failure::config(e.to_string()))?;
            run_protocol_command(
                "rsp-pure",
                ManifestEntry { label: "target".into(), spec: TargetSpec::Pure(spec) },
                pure_target_echo(&spec),
                common,
            )
        }
        Command::RspMixed { target, p, q, common } => {
            let spec = TargetMixedSpec::new(
                target.alpha,
                target.beta,
                target.phi_deg.to_radians(),
                p,
                q,
            )
            .map_err(|e| Failure::config(e.to_string()))?;
            run_protocol_command(
                "rsp-mixed",
                ManifestEntry { label: "target".into(), spec: TargetSpec::Mixed(spec) },
                mixed_target_echo(&spec),
                common,
            )
        }
        Command::PaperSuite {
            manifest,
            calibrate_s,
            calibrate_mean_fidelity,
            calibrate_min_fidelity,
            common,
        } => run_paper_suite(
            manifest,
            calibrate_s,
            calibrate_mean_fidelity,
            calibrate_min_fidelity,
            common,
        ),
        Command::PovmCheck { file, tol, common } => run_povm_check(&file, tol, common),
        Command::Chsh { target_s, angles_deg, common } => run_chsh(target_s, angles_deg, common),
        Command::Tomo { target, p, q, common } => run_tomo(target, p, q, common),
    }
}

fn run_protocol_command(
    name: &str,
    entry: ManifestEntry<f64>,
    target_echo: TargetEcho,
    common: CommonOpts,
) -> Result<(), Failure> {
    let started = Instant::now();
    let cfg = noise_config(&common)?;
    let shared = prepared_shared(&cfg);
    let state = run_state(&entry, &shared, &cfg, 0)
        .map_err(|e| Failure::numerical(e.to_string()))?;

    let branches = branch_reports(&state);
    let mean_analytic = state.branches.iter().map(|b| b.fidelity_analytic).sum::<f64>() / 4.0;
    let tomo_fids: Vec<f64> = state
        .branches
        .iter()
        .filter_map(|b| b.tomo.map(|t| t.fidelity))
        .collect();
    let mean_tomo = (!tomo_fids.is_empty())
        .then(|| tomo_fids.iter().sum::<f64>() / tomo_fids.len() as f64);
    let strict_violation = common.strict
        && state
            .branches
            .iter()
            .any(|b| b.tomo.is_some_and(|t| !t.reconstruction.converged));

    let mut config = config_echo(&common, &cfg);
    config.target = Some(target_echo);
    let results = Results {
        branches: Some(branches),
        mean_fidelity_analytic: Some(mean_analytic),
        mean_fidelity_tomo: mean_tomo,
        ..Results::default()
    };
    finish(name, config, results, started, &common, strict_violation)
}

fn run_paper_suite(
    manifest_path: Option<PathBuf>,
    calibrate_s: Option<f64>,
    calibrate_mean: Option<f64>,
    calibrate_min: Option<f64>,
    common: CommonOpts,
) -> Result<(), Failure> {
    let started = Instant::now();
    let mut cfg = noise_config(&common)?;

    let mut calibration = None;
    if let Some(s) = calibrate_s {
        let c = calibrate_to_paper(CalibrationTarget::ChshS(s))
            .map_err(|e| Failure::config(e.to_string()))?;
        cfg.werner_v = c.werner_v;
        calibration = Some(format!("chsh_s={s} -> werner_v={:.6}", c.werner_v));
    }
    if let Some(f) = calibrate_mean {
        let c = calibrate_to_paper(CalibrationTarget::MeanFidelity(f))
            .map_err(|e| Failure::config(e.to_string()))?;
        cfg.interferometer_visibility = c.interferometer_visibility;
        calibration = Some(format!(
            "mean_fidelity={f} -> visibility={:.6}",
            c.interferometer_visibility
        ));
    }
    if let Some(f) = calibrate_min {
        let c = calibrate_to_paper(CalibrationTarget::MinFidelity(f))
            .map_err(|e| Failure::config(e.to_string()))?;
        cfg.interferometer_visibility = c.interferometer_visibility;
        calibration = Some(format!(
            "min_fidelity={f} -> visibility={:.6}",
            c.interferometer_visibility
        ));
    }

    let manifest = match &manifest_path {
        Some(path) => files::read_manifest(path).map_err(|e| Failure::config(e.to_string()))?,
        None => default_manifest(),
    };

    let runs = run_suite(&manifest, &cfg).map_err(|e| Failure::numerical(e.to_string()))?;

    let mut state_reports = Vec::with_capacity(runs.len());
    let mut all_fids = Vec::new();
    let mut any_nonconverged = false;
    for state in &runs {
        let branches = branch_reports(state);
        let fids: Vec<f64> = state
            .branches
            .iter()
            .filter_map(|b| b.tomo.map(|t| t.fidelity))
            .collect();
        all_fids.extend_from_slice(&fids);
        any_nonconverged |= state
            .branches
            .iter()
            .any(|b| b.tomo.is_some_and(|t| !t.reconstruction.converged));
        let mean = fids.iter().sum::<f64>() / fids.len().max(1) as f64;
        let target = state.spec.density();
        let (stokes_prepared, purity_prepared, fidelity_prepared) =
            match state.poincare_row() {
                Some((s, p, f)) => (Some(s), Some(p), Some(f)),
                None => (None, None, None),
            };
        let target_echo = match &state.spec {
            TargetSpec::Pure(s) => pure_target_echo(s),
            TargetSpec::Mixed(s) => mixed_target_echo(s),
        };
        state_reports.push(StateReport {
            label: state.label.clone(),
            kind: state.spec.kind().into(),
            target: target_echo,
            branches,
            mean_fidelity_tomo: mean,
            stokes_target: stokes(&target),
            stokes_prepared,
            purity_prepared,
            fidelity_prepared,
        });
    }
    let mean_tomo = all_fids.iter().sum::<f64>() / all_fids.len().max(1) as f64;
    let analytic: Vec<f64> = runs
        .iter()
        .flat_map(|s| s.branches.iter().map(|b| b.fidelity_analytic))
        .collect();
    let mean_analytic = analytic.iter().sum::<f64>() / analytic.len().max(1) as f64;

    if let Some(out) = &common.out {
        let stem = out.with_extension("");
        let grid = files::fidelity_grid_csv(&runs);
        let poincare = files::poincare_csv(&runs);
        std::fs::write(stem.with_extension("grid.csv"), grid).map_err(Failure::io)?;
        std::fs::write(stem.with_extension("poincare.csv"), poincare).map_err(Failure::io)?;
    }

    let mut config = config_echo(&common, &cfg);
    config.manifest = manifest_path.map(|p| p.display().to_string());
    config.calibration = calibration;
    let results = Results {
        states: Some(state_reports),
        mean_fidelity_analytic: Some(mean_analytic),
        mean_fidelity_tomo: Some(mean_tomo),
        ..Results::default()
    };
    finish(
        "paper-suite",
        config,
        results,
        started,
        &common,
        common.strict && any_nonconverged,
    )
}

fn run_povm_check(file: &Path, tol: f64, common: CommonOpts) -> Result<(), Failure> {
    let started = Instant::now();
    let cfg = noise_config(&common)?;
    let (m1, m2) = files::read_povm_pair(file).map_err(|e| Failure::config(e.to_string()))?;

    let report = completeness_report(&m1, &m2);
    let valid = report.deviation <= tol
        && report.min_eigenvalues.iter().all(|min| *min >= -tol);

    let mut settings_report = None;
    let mut roundtrip = None;
    let mut synthesis_error = None;
    match PovmPair::with_tolerance(m1, m2, tol).and_then(|pair| synthesize_module(&pair)) {
        Ok(settings) => {
            let rebuilt = effective_operators(&settings, Frame::Logical);
            let dev = (*rebuilt.m1() - m1)
                .max_abs()
                .max((*rebuilt.m2() - m2).max_abs());
            roundtrip = Some(dev);
            settings_report = Some(SettingsReport {
                zeta_deg: settings.zeta().to_degrees(),
                xi_deg: settings.xi().to_degrees(),
                theta_deg: settings.theta().to_degrees(),
                sigma_deg: settings.sigma().to_degrees(),
                v: MatrixDto::from_mat(settings.v()),
                u1: MatrixDto::from_mat(settings.u1()),
                u2: MatrixDto::from_mat(settings.u2()),
            });
        }
        Err(e) => synthesis_error = Some(e.to_string()),
    }

    let mut config = config_echo(&common, &cfg);
    config.tolerance = Some(tol);
    let results = Results {
        povm: Some(PovmReport {
            completeness_deviation: report.deviation,
            effect_min_eigenvalues: report.min_eigenvalues,
            valid_at_tolerance: valid,
            settings: settings_report,
            roundtrip_max_deviation: roundtrip,
            synthesis_error,
        }),
        ..Results::default()
    };
    finish("povm-check", config, results, started, &common, false)?;
    if !valid {
        return Err(Failure::config(format!(
            "POVM pair violates completeness at tolerance {tol} (deviation {:.3e})",
            report.deviation
        )));
    }
    Ok(())
}

fn parse_angles(text: &str) -> Result<ChshSettings<f64>, Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::config(format!("bad --angles-deg: {e}")))?;
    if parts.len() != 4 {
        return Err(Failure::config("--angles-deg needs four values a1,a2,b1,b2"));
    }
    Ok(ChshSettings {
        alice: [parts[0].to_radians(), parts[1].to_radians()],
        bob: [parts[2].to_radians(), parts[3].to_radians()],
    })
}

fn run_chsh(
    target_s: Option<f64>,
    angles_deg: Option<String>,
    common: CommonOpts,
) -> Result<(), Failure> {
    let started = Instant::now();
    let mut cfg = noise_config(&common)?;
    let mut calibration = None;
    if let Some(s) = target_s {
        let c = calibrate_to_paper(CalibrationTarget::ChshS(s))
            .map_err(|e| Failure::config(e.to_string()))?;
        cfg.werner_v = c.werner_v;
        calibration = Some(format!("chsh_s={s} -> werner_v={:.6}", c.werner_v));
    }
    let settings = match &angles_deg {
        Some(text) => parse_angles(text)?,
        None => ChshSettings::default(),
    };

    let rho = noisy_source(&cfg);
    let pairs = [
        (settings.alice[0], settings.bob[0]),
        (settings.alice[0], settings.bob[1]),
        (settings.alice[1], settings.bob[0]),
        (settings.alice[1], settings.bob[1]),
    ];
    let mut correlators = [0.0f64; 4];
    for (k, (a, b)) in pairs.iter().enumerate() {
        correlators[k] = correlation(&rho, *a, *b);
    }
    let s_analytic = chsh_analytic(&rho, &settings);
    let sampled = chsh_sampled(&rho, &settings, cfg.shots, cfg.seed)
        .map_err(|e| Failure::numerical(e.to_string()))?;

    let mut config = config_echo(&common, &cfg);
    config.calibration = calibration;
    config.analyzer_angles_deg = Some(AnglesEcho {
        alice: [settings.alice[0].to_degrees(), settings.alice[1].to_degrees()],
        bob: [settings.bob[0].to_degrees(), settings.bob[1].to_degrees()],
    });
    let results = Results {
        chsh: Some(ChshReport {
            s_analytic,
            correlators_analytic: correlators,
            s_sampled: Some(sampled.s),
            stderr: Some(sampled.stderr),
            correlators_sampled: Some(sampled.correlators),
            shots_per_setting: cfg.shots,
        }),
        ..Results::default()
    };
    finish("chsh", config, results, started, &common, false)
}

fn run_tomo(
    target: PureTargetOpts,
    p: Option<f64>,
    q: Option<f64>,
    common: CommonOpts,
) -> Result<(), Failure> {
    let started = Instant::now();
    let cfg = noise_config(&common)?;

    let (density, target_echo) = match (p, q) {
        (Some(p), Some(q)) => {
            let spec =
                TargetMixedSpec::new(target.alpha, target.beta, target.phi_deg.to_radians(), p, q)
                    .map_err(|e| Failure::config(e.to_string()))?;
            (rsp_core::state::target_mixed(&spec), mixed_target_echo(&spec))
        }
        _ => {
            let spec =
                TargetPureSpec::new(target.alpha, target.beta, target.phi_deg.to_radians())
                    .map_err(|e| Failure::config(e.to_string()))?;
            (rsp_core::state::target_pure(&spec).density(), pure_target_echo(&spec))
        }
    };

    let counts = measure_bases(&density, cfg.shots, cfg.seed);
    let linear = stokes_estimates::<f64>(&counts).map_err(|e| Failure::numerical(e.to_string()))?;
    let rec = mle_reconstruct::<f64>(&counts).map_err(|e| Failure::numerical(e.to_string()))?;
    let fidelity = report_fidelity(&rec.rho_hat, &density);

    let mut config = config_echo(&common, &cfg);
    config.target = Some(target_echo);
    let results = Results {
        tomography: Some(TomoReport {
            counts: CountsDto::from_counts(&counts),
            rho_reconstructed: MatrixDto::from_mat(rec.rho_hat.mat()),
            log_likelihood: rec.log_likelihood,
            iterations: rec.iterations,
            converged: rec.converged,
            fidelity_vs_target: fidelity,
            stokes_reconstructed: stokes(&rec.rho_hat),
            purity_reconstructed: rsp_core::state::purity(&rec.rho_hat),
            stokes_linear_inversion: linear,
        }),
        ..Results::default()
    };
    finish(
        "tomo",
        config,
        results,
        started,
        &common,
        common.strict && !rec.converged,
    )
}
