//! Single-qubit state tomography: three-basis measurement simulation,
//! linear (Stokes) inversion, and maximum-likelihood reconstruction of the
//! closest physical density matrix.
//!
//! The measurement set is the three mutually unbiased polarization bases
//! H/V, D/A and R/L, with the "plus" projectors `|H⟩⟨H|`, `|D⟩⟨D|` and
//! `|R⟩⟨R|`. The likelihood model is binomial per basis.

use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::linalg::{cr, eig2_of_hermitian_part, Mat2, C};
use crate::noise::seeded_rng;
use crate::scalar::Scalar;
use crate::state::{fidelity, pauli, DensityMatrix, Pauli, PureQubit};

/// Eigenvalue floor applied when seeding the optimizer from the linear
/// inversion; keeps the initial likelihood finite without moving the
/// optimum.
const INIT_EIGENVALUE_FLOOR: f64 = 1e-6;

/// Measurement bases, in fixed sampling order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TomoBasis {
    Hv,
    Da,
    Rl,
}

impl TomoBasis {
    pub const ALL: [TomoBasis; 3] = [TomoBasis::Hv, TomoBasis::Da, TomoBasis::Rl];

    /// Projector onto the +1 outcome of the basis.
    pub fn projector_plus<T: Scalar>(self) -> Mat2<T> {
        let ket = match self {
            TomoBasis::Hv => PureQubit::<T>::h(),
            TomoBasis::Da => PureQubit::<T>::d(),
            TomoBasis::Rl => PureQubit::<T>::r(),
        }
        .ket();
        ket.outer(&ket)
    }

    /// Pauli operator whose expectation the basis estimates.
    pub fn axis<T: Scalar>(self) -> Mat2<T> {
        match self {
            TomoBasis::Hv => pauli(Pauli::Z),
            TomoBasis::Da => pauli(Pauli::X),
            TomoBasis::Rl => pauli(Pauli::Y),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TomoBasis::Hv => "HV",
            TomoBasis::Da => "DA",
            TomoBasis::Rl => "RL",
        }
    }
}

/// Photon counts per basis, (plus, minus).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TomoCounts {
    pub hv: (u64, u64),
    pub da: (u64, u64),
    pub rl: (u64, u64),
}

impl TomoCounts {
    pub fn basis(&self, basis: TomoBasis) -> (u64, u64) {
        match basis {
            TomoBasis::Hv => self.hv,
            TomoBasis::Da => self.da,
            TomoBasis::Rl => self.rl,
        }
    }

    fn basis_mut(&mut self, basis: TomoBasis) -> &mut (u64, u64) {
        match basis {
            TomoBasis::Hv => &mut self.hv,
            TomoBasis::Da => &mut self.da,
            TomoBasis::Rl => &mut self.rl,
        }
    }

    pub fn zero() -> Self {
        Self { hv: (0, 0), da: (0, 0), rl: (0, 0) }
    }
}

/// Simulate per-basis Bernoulli counting with `shots_per_basis` photons in
/// each of the three bases.
pub fn measure_bases<T: Scalar>(
    rho: &DensityMatrix<T>,
    shots_per_basis: u64,
    seed: u64,
) -> TomoCounts {
    let mut rng = seeded_rng(seed);
    let mut counts = TomoCounts::zero();
    for basis in TomoBasis::ALL {
        let p_plus = (basis.projector_plus::<T>() * *rho.mat())
            .trace()
            .re
            .max(T::zero())
            .min(T::one())
            .as_f64();
        let plus = rand_distr::Binomial::new(shots_per_basis, p_plus)
            .expect("probability clamped to [0, 1]")
            .sample(&mut rng);
        *counts.basis_mut(basis) = (plus, shots_per_basis - plus);
    }
    counts
}

/// Stokes estimates `(n⁺ − n⁻)/(n⁺ + n⁻)` per axis.
pub fn stokes_estimates<T: Scalar>(counts: &TomoCounts) -> Result<[T; 3]> {
    let mut s = [T::zero(); 3];
    for (k, basis) in TomoBasis::ALL.iter().enumerate() {
        let (p, m) = counts.basis(*basis);
        let total = p + m;
        if total == 0 {
            return Err(Error::EmptyBasis { basis: basis.label() });
        }
        s[k] = (T::of(p as f64) - T::of(m as f64)) / T::of(total as f64);
    }
    Ok(s)
}

/// Linear inversion `ρ = ½(I + ŝ₁σz + ŝ₂σx + ŝ₃σy)`.
///
/// The result may be unphysical (a negative eigenvalue) when `‖ŝ‖ > 1`;
/// it is returned as a raw matrix rather than a state.
pub fn linear_inversion<T: Scalar>(counts: &TomoCounts) -> Result<Mat2<T>> {
    let s = stokes_estimates::<T>(counts)?;
    let half = T::of(0.5);
    let m = Mat2::identity()
        + pauli(Pauli::Z).scale_re(s[0])
        + pauli(Pauli::X).scale_re(s[1])
        + pauli(Pauli::Y).scale_re(s[2]);
    Ok(m.scale_re(half))
}

/// Output of the maximum-likelihood reconstruction.
#[derive(Clone, Copy, Debug)]
pub struct ReconstructionResult<T: Scalar> {
    pub rho_hat: DensityMatrix<T>,
    pub log_likelihood: T,
    pub iterations: u32,
    pub converged: bool,
}

/// Binomial log-likelihood of counts under a state.
pub fn log_likelihood<T: Scalar>(counts: &TomoCounts, rho: &DensityMatrix<T>) -> T {
    let mut ll = T::zero();
    for basis in TomoBasis::ALL {
        let (np, nm) = counts.basis(basis);
        let p = (basis.projector_plus::<T>() * *rho.mat())
            .trace()
            .re
            .max(T::zero())
            .min(T::one());
        ll += term(np, p) + term(nm, T::one() - p);
    }
    ll
}

fn term<T: Scalar>(n: u64, p: T) -> T {
    if n == 0 {
        T::zero()
    } else if p <= T::zero() {
        T::neg_infinity()
    } else {
        T::of(n as f64) * p.ln()
    }
}

// ── Cholesky-style parametrization ───────────────────────────────────────────

// ρ(t) = T†T / tr(T†T) with T = [[t0, 0], [t2 + i·t3, t1]].

fn t_matrix<T: Scalar>(t: &[T; 4]) -> Mat2<T> {
    Mat2::new([
        [cr(t[0]), cr(T::zero())],
        [C::new(t[2], t[3]), cr(t[1])],
    ])
}

fn rho_of<T: Scalar>(t: &[T; 4]) -> Mat2<T> {
    let tm = t_matrix(t);
    let a = tm.adjoint() * tm;
    let tr = a.trace().re;
    a.scale_re(tr.recip())
}

fn loglik_params<T: Scalar>(counts: &TomoCounts, t: &[T; 4]) -> T {
    let rho = rho_of(t);
    let mut ll = T::zero();
    for basis in TomoBasis::ALL {
        let (np, nm) = counts.basis(basis);
        let p = (basis.projector_plus::<T>() * rho).trace().re.max(T::zero()).min(T::one());
        ll += term(np, p) + term(nm, T::one() - p);
    }
    ll
}

/// Analytic gradient of the log-likelihood in the four T-parameters.
fn loglik_gradient<T: Scalar>(counts: &TomoCounts, t: &[T; 4]) -> [T; 4] {
    let tm = t_matrix(t);
    let a = tm.adjoint() * tm;
    let tau = a.trace().re;
    let rho = a.scale_re(tau.recip());

    // basis matrices of dT
    let z = T::zero();
    let o = T::one();
    let dts = [
        Mat2::new([[cr(o), cr(z)], [cr(z), cr(z)]]),
        Mat2::new([[cr(z), cr(z)], [cr(z), cr(o)]]),
        Mat2::new([[cr(z), cr(z)], [cr(o), cr(z)]]),
        Mat2::new([[cr(z), cr(z)], [C::new(z, o), cr(z)]]),
    ];

    let mut grad = [T::zero(); 4];
    for (k, dt) in dts.iter().enumerate() {
        let da = dt.adjoint() * tm + tm.adjoint() * *dt;
        let dtau = da.trace().re;
        for basis in TomoBasis::ALL {
            let (np, nm) = counts.basis(basis);
            let proj = basis.projector_plus::<T>();
            let p = (proj * rho).trace().re.max(T::of(1e-300)).min(T::one() - T::of(1e-300));
            let dp = ((proj * da).trace().re - (proj * rho).trace().re * dtau) / tau;
            let mut coeff = T::zero();
            if np > 0 {
                coeff += T::of(np as f64) / p;
            }
            if nm > 0 {
                coeff -= T::of(nm as f64) / (T::one() - p);
            }
            grad[k] += coeff * dp;
        }
    }
    grad
}

fn params_from_state<T: Scalar>(rho: &Mat2<T>) -> [T; 4] {
    // factor ρ = T†T with T lower triangular; requires ρ positive definite
    let r11 = rho.e[1][1].re.max(T::of(INIT_EIGENVALUE_FLOOR));
    let d = r11.sqrt();
    let c = rho.e[1][0] * cr(d.recip());
    let head = (rho.e[0][0].re - c.norm_sqr()).max(T::of(INIT_EIGENVALUE_FLOOR));
    [head.sqrt(), d, c.re, c.im]
}

/// Maximum-likelihood reconstruction over the 4-parameter Cholesky
/// parametrization, seeded from the clipped linear inversion.
///
/// Gradient ascent with a backtracking line search; accepted steps never
/// decrease the log-likelihood. Converged when the improvement falls below
/// 1e-10 (or the gradient step stalls); capped at 10⁴ iterations, in which
/// case the best iterate is still returned with `converged = false`.
pub fn mle_reconstruct<T: Scalar>(counts: &TomoCounts) -> Result<ReconstructionResult<T>> {
    let lin = linear_inversion::<T>(counts)?;

    // clip eigenvalues to the floor and renormalize
    let eig = eig2_of_hermitian_part(&lin);
    let l0 = eig.values[0].max(T::of(INIT_EIGENVALUE_FLOOR));
    let l1 = eig.values[1].max(T::of(INIT_EIGENVALUE_FLOOR));
    let norm = l0 + l1;
    let q = eig.vectors;
    let seeded = q * Mat2::diag(cr(l0 / norm), cr(l1 / norm)) * q.adjoint();

    let mut t = params_from_state(&seeded);
    normalize_params(&mut t);
    let mut ll = loglik_params(counts, &t);
    let total: u64 = TomoBasis::ALL.iter().map(|b| {
        let (p, m) = counts.basis(*b);
        p + m
    })
    .sum();
    let mut step = T::of(1.0 / (total.max(1) as f64));

    let max_iterations = 10_000u32;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let grad = loglik_gradient(counts, &t);

        let mut improved = false;
        let mut s = step;
        for _ in 0..60 {
            let mut cand = t;
            for k in 0..4 {
                cand[k] += s * grad[k];
            }
            normalize_params(&mut cand);
            let cand_ll = loglik_params(counts, &cand);
            if cand_ll.is_finite() && cand_ll > ll {
                let delta = cand_ll - ll;
                t = cand;
                ll = cand_ll;
                step = (s * T::of(2.0)).min(T::of(1e3));
                improved = true;
                if delta < T::of(1e-10) {
                    converged = true;
                }
                break;
            }
            s *= T::of(0.5);
        }
        if !improved {
            // no ascent direction left at line-search resolution
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }

    let rho_hat = DensityMatrix::new(rho_of(&t))?;
    Ok(ReconstructionResult { rho_hat, log_likelihood: ll, iterations, converged })
}

fn normalize_params<T: Scalar>(t: &mut [T; 4]) {
    // scale invariance of ρ(T): keep tr(T†T) = 1 to avoid drift
    let tm = t_matrix(t);
    let tau = (tm.adjoint() * tm).trace().re;
    if tau > T::zero() {
        let s = tau.sqrt().recip();
        for x in t.iter_mut() {
            *x *= s;
        }
    }
}

/// Fidelity of a reconstruction against the intended target.
pub fn report_fidelity<T: Scalar>(rho_hat: &DensityMatrix<T>, target: &DensityMatrix<T>) -> T {
    fidelity(rho_hat, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eig_hermitian;
    use crate::state::stokes;

    #[test]
    fn measuring_h_in_hv_is_deterministic() {
        let counts = measure_bases(&PureQubit::<f64>::h().density(), 1000, 1);
        assert_eq!(counts.hv, (1000, 0));
    }

    #[test]
    fn measuring_r_in_rl_is_deterministic() {
        let counts = measure_bases(&PureQubit::<f64>::r().density(), 1000, 1);
        assert_eq!(counts.rl, (1000, 0));
    }

    #[test]
    fn maximally_mixed_counts_within_binomial_bound() {
        let counts = measure_bases(&DensityMatrix::<f64>::maximally_mixed(), 10_000, 42);
        let sigma3 = 3.0 * (10_000.0f64 * 0.25).sqrt();
        for basis in TomoBasis::ALL {
            let (p, _) = counts.basis(basis);
            assert!((p as f64 - 5000.0).abs() < sigma3);
        }
    }

    #[test]
    fn linear_inversion_of_exact_counts() {
        let counts = TomoCounts { hv: (10, 0), da: (5, 5), rl: (5, 5) };
        let rho = linear_inversion::<f64>(&counts).unwrap();
        assert!((rho - *PureQubit::<f64>::h().density().mat()).max_abs() < 1e-15);
    }

    #[test]
    fn linear_inversion_rejects_empty_basis() {
        let counts = TomoCounts { hv: (10, 0), da: (0, 0), rl: (5, 5) };
        assert!(matches!(
            linear_inversion::<f64>(&counts),
            Err(Error::EmptyBasis { .. })
        ));
    }

    #[test]
    fn linear_inversion_can_be_unphysical() {
        // ŝ = (0.9, 0.9, 0) has norm > 1
        let counts = TomoCounts { hv: (95, 5), da: (95, 5), rl: (50, 50) };
        let rho = linear_inversion::<f64>(&counts).unwrap();
        assert!(min_eig_hermitian(&rho.hermitian_part()) < 0.0);
    }

    #[test]
    fn mle_projects_unphysical_counts_into_the_ball() {
        let counts = TomoCounts { hv: (95, 5), da: (95, 5), rl: (50, 50) };
        let rec = mle_reconstruct::<f64>(&counts).unwrap();
        let s = stokes(&rec.rho_hat);
        let norm = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
        assert!(norm <= 1.0 + 1e-10);
        assert!(rec.converged);
    }

    #[test]
    fn mle_reaches_maximally_mixed_on_ties() {
        let counts = TomoCounts { hv: (500, 500), da: (500, 500), rl: (500, 500) };
        let rec = mle_reconstruct::<f64>(&counts).unwrap();
        let dist = (*rec.rho_hat.mat() - *DensityMatrix::maximally_mixed().mat()).max_abs();
        assert!(dist < 1e-9, "distance {dist}");
    }

    #[test]
    fn mle_recovers_state_from_exact_ratio_counts() {
        // infinite-shot limit encoded as large exact-ratio counts
        let n = 1_000_000u64;
        let rho = PureQubit::<f64>::new(cr(0.6), C::from_polar(0.8, 1.05)).unwrap().density();
        let mut counts = TomoCounts::zero();
        for basis in TomoBasis::ALL {
            let p = (basis.projector_plus::<f64>() * *rho.mat()).trace().re;
            let plus = (p * n as f64).round() as u64;
            *match basis {
                TomoBasis::Hv => &mut counts.hv,
                TomoBasis::Da => &mut counts.da,
                TomoBasis::Rl => &mut counts.rl,
            } = (plus, n - plus);
        }
        let rec = mle_reconstruct::<f64>(&counts).unwrap();
        let f = report_fidelity(&rec.rho_hat, &rho);
        assert!(f > 1.0 - 1e-4, "fidelity {f}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let counts = TomoCounts { hv: (700, 300), da: (550, 450), rl: (400, 600) };
        let t = [0.8f64, 0.55, 0.12, -0.2];
        let grad = loglik_gradient(&counts, &t);
        let h = 1e-6;
        for k in 0..4 {
            let mut tp = t;
            let mut tm = t;
            tp[k] += h;
            tm[k] -= h;
            let fd = (loglik_params(&counts, &tp) - loglik_params(&counts, &tm)) / (2.0 * h);
            let denom = fd.abs().max(1.0);
            assert!(
                ((grad[k] - fd) / denom).abs() < 1e-5,
                "param {k}: analytic {} vs fd {fd}",
                grad[k]
            );
        }
    }

    #[test]
    fn mle_log_likelihood_not_below_start() {
        let rho = PureQubit::<f64>::d().density();
        let counts = measure_bases(&rho, 2000, 11);
        let rec = mle_reconstruct::<f64>(&counts).unwrap();
        // the optimizer starts from the clipped linear inversion
        let lin = linear_inversion::<f64>(&counts).unwrap();
        let eig = eig2_of_hermitian_part(&lin);
        let l0 = eig.values[0].max(1e-6);
        let l1 = eig.values[1].max(1e-6);
        let q = eig.vectors;
        let seeded =
            q * Mat2::diag(cr(l0 / (l0 + l1)), cr(l1 / (l0 + l1))) * q.adjoint();
        let start = log_likelihood(&counts, &DensityMatrix::new(seeded).unwrap());
        assert!(rec.log_likelihood >= start - 1e-9);
    }
}
