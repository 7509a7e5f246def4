//! File formats: target manifests, POVM pair files, and the CSV outputs
//! of the suite command.
//!
//! Manifest: one record per state, comma-separated
//! `kind,alpha,beta,phi_deg,p,q` (kind `pure` leaves p and q empty or 0).
//! Lines starting with `#` and a leading `kind,...` header are skipped.
//!
//! POVM pair file: 16 whitespace/comma-separated numbers, the (re, im)
//! pairs of M1 then M2 in row-major order.

use std::path::Path;

use anyhow::{bail, Context, Result};

use rsp_core::linalg::Mat2;
use rsp_core::state::{TargetMixedSpec, TargetPureSpec};
use rsp_core::suite::{ManifestEntry, StateRun, TargetSpec};
use rsp_core::C64;

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry<f64>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading manifest {}", path.display()))?;
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields[0].eq_ignore_ascii_case("kind") {
            continue;
        }
        let parse = |s: &str, name: &str| -> Result<f64> {
            s.parse::<f64>()
                .with_context(|| format!("line {}: bad {name} value {s:?}", lineno + 1))
        };
        if fields.len() < 4 {
            bail!("line {}: expected kind,alpha,beta,phi_deg[,p,q]", lineno + 1);
        }
        let alpha = parse(fields[1], "alpha")?;
        let beta = parse(fields[2], "beta")?;
        let phi = parse(fields[3], "phi_deg")?.to_radians();
        let spec = match fields[0].to_ascii_lowercase().as_str() {
            "pure" => TargetSpec::Pure(
                TargetPureSpec::new(alpha, beta, phi)
                    .with_context(|| format!("line {}", lineno + 1))?,
            ),
            "mixed" => {
                if fields.len() < 6 {
                    bail!("line {}: mixed record needs p and q", lineno + 1);
                }
                let p = parse(fields[4], "p")?;
                let q = parse(fields[5], "q")?;
                TargetSpec::Mixed(
                    TargetMixedSpec::new(alpha, beta, phi, p, q)
                        .with_context(|| format!("line {}", lineno + 1))?,
                )
            }
            other => bail!("line {}: unknown kind {other:?}", lineno + 1),
        };
        entries.push(ManifestEntry { label: format!("state{:02}", entries.len() + 1), spec });
    }
    if entries.is_empty() {
        bail!("manifest {} contains no states", path.display());
    }
    Ok(entries)
}

pub fn read_povm_pair(path: &Path) -> Result<(Mat2<f64>, Mat2<f64>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading POVM pair {}", path.display()))?;
    let numbers: Vec<f64> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad number {t:?}")))
        .collect::<Result<_>>()?;
    if numbers.len() != 16 {
        bail!(
            "expected 16 numbers (re,im pairs of M1 then M2, row-major), found {}",
            numbers.len()
        );
    }
    let mat = |offset: usize| {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                let k = offset + 4 * i + 2 * j;
                m.e[i][j] = C64::new(numbers[k], numbers[k + 1]);
            }
        }
        m
    };
    Ok((mat(0), mat(8)))
}

/// Flat fidelity grid: one row per state, one column per branch.
pub fn fidelity_grid_csv(runs: &[StateRun<f64>]) -> String {
    let mut out = String::from("label,f_0D,f_0A,f_1D,f_1A,mean\n");
    for state in runs {
        let fids: Vec<f64> = state
            .branches
            .iter()
            .map(|b| b.tomo.map(|t| t.fidelity).unwrap_or(f64::NAN))
            .collect();
        let mean = fids.iter().sum::<f64>() / fids.len() as f64;
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            state.label, fids[0], fids[1], fids[2], fids[3], mean
        ));
    }
    out
}

/// Poincaré coordinates of the prepared (mean reconstructed) states.
pub fn poincare_csv(runs: &[StateRun<f64>]) -> String {
    let mut out = String::from("label,s1,s2,s3,purity,fidelity\n");
    for state in runs {
        if let Some((s, purity, fidelity)) = state.poincare_row() {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                state.label, s[0], s[1], s[2], purity, fidelity
            ));
        }
    }
    out
}
