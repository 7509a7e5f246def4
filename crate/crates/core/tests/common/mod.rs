//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use rsp_core::linalg::{sqrt_psd2, Mat2, Mat4, Vec2, Vec4};
use rsp_core::noise::seeded_rng;
use rsp_core::povm::PovmPair;
use rsp_core::state::{DensityMatrix, PureQubit, TargetMixedSpec, TargetPureSpec, TwoQubitState};

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded_rng(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re, im)
}

pub fn random_mat2(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    let mut m = Mat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            m.e[i][j] = random_complex(rng);
        }
    }
    m
}

pub fn random_hermitian2(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    random_mat2(rng).hermitian_part()
}

pub fn random_psd2(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    let m = random_mat2(rng);
    m.adjoint() * m
}

pub fn random_density2(rng: &mut ChaCha8Rng) -> DensityMatrix<f64> {
    let a = random_psd2(rng);
    let tr = a.trace().re;
    DensityMatrix::new(a.scale_re(tr.recip())).expect("normalized PSD matrix")
}

pub fn random_pure_qubit(rng: &mut ChaCha8Rng) -> PureQubit<f64> {
    loop {
        let ket = Vec2::new(random_complex(rng), random_complex(rng));
        if ket.norm_sqr() > 1e-3 {
            return PureQubit::from_ket(ket.normalized().unwrap()).unwrap();
        }
    }
}

/// Haar-like random 2×2 unitary from the explicit SU(2) parametrization.
pub fn random_unitary2(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let psi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let gamma: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    unitary2(gamma, theta, phi, psi)
}

/// `e^{iγ}·[[cosθ e^{iφ}, sinθ e^{iψ}], [−sinθ e^{−iψ}, cosθ e^{−iφ}]]`.
pub fn unitary2(gamma: f64, theta: f64, phi: f64, psi: f64) -> Mat2<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    let m = Mat2::new([
        [C64::from_polar(c, phi), C64::from_polar(s, psi)],
        [-C64::from_polar(s, -psi), C64::from_polar(c, -phi)],
    ]);
    m.scale(C64::from_polar(1.0, gamma))
}

pub fn random_pure_spec(rng: &mut ChaCha8Rng) -> TargetPureSpec<f64> {
    let theta: f64 = rng.random_range(0.0..=std::f64::consts::FRAC_PI_2);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    TargetPureSpec::from_polar(theta, phi).unwrap()
}

pub fn random_mixed_spec(rng: &mut ChaCha8Rng) -> TargetMixedSpec<f64> {
    let pure = random_pure_spec(rng);
    let w: f64 = rng.random_range(0.0..=std::f64::consts::FRAC_PI_2);
    TargetMixedSpec::new(pure.alpha(), pure.beta(), pure.phi(), w.cos(), w.sin()).unwrap()
}

/// Random valid two-outcome POVM: `M1 = U1·diag(cos ζ, sin ξ)·V1` and
/// `M2 = U2·diag(sin ζ, cos ξ)·W·V1` with `W` a random diagonal unitary, so
/// completeness holds exactly by construction.
pub fn random_povm_pair(rng: &mut ChaCha8Rng) -> PovmPair<f64> {
    let zeta: f64 = rng.random_range(0.0..=std::f64::consts::FRAC_PI_2);
    let xi: f64 = rng.random_range(0.0..=std::f64::consts::FRAC_PI_2);
    let v1 = random_unitary2(rng);
    let u1 = random_unitary2(rng);
    let u2 = random_unitary2(rng);
    let w = Mat2::diag(
        C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)),
        C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)),
    );
    let d1 = Mat2::diag(C64::new(zeta.cos(), 0.0), C64::new(xi.sin(), 0.0));
    let d2 = Mat2::diag(C64::new(zeta.sin(), 0.0), C64::new(xi.cos(), 0.0));
    let m1 = u1 * d1 * v1;
    let m2 = u2 * d2 * w * v1;
    PovmPair::new(m1, m2).expect("constructed pair is complete")
}

/// Random 4-dim normalized ket.
pub fn random_two_qubit_ket(rng: &mut ChaCha8Rng) -> Vec4<f64> {
    loop {
        let mut ket = Vec4::zero();
        for i in 0..4 {
            ket.e[i] = random_complex(rng);
        }
        if let Some(k) = ket.normalized_checked() {
            return k;
        }
    }
}

/// Random two-qubit density matrix (mixture of three random kets).
pub fn random_two_qubit_state(rng: &mut ChaCha8Rng) -> TwoQubitState<f64> {
    let mut mat = Mat4::zero();
    let mut weights = [0.0f64; 3];
    let mut total = 0.0;
    for w in &mut weights {
        *w = rng.random_range(0.05..1.0);
        total += *w;
    }
    for w in weights {
        let ket = random_two_qubit_ket(rng);
        mat = mat + ket.outer(&ket).scale_re(w / total);
    }
    TwoQubitState::new(mat).expect("convex mixture of pure states")
}

/// Uhlmann fidelity by the square-root definition
/// `|tr √(√σ · ρ · √σ)|²` — the independent route used to cross-check the
/// closed form.
pub fn uhlmann_sqrt_form(rho: &DensityMatrix<f64>, sigma: &DensityMatrix<f64>) -> f64 {
    let root_sigma = sqrt_psd2(sigma.mat()).unwrap();
    let inner = root_sigma * *rho.mat() * root_sigma;
    let root_inner = sqrt_psd2(&inner.hermitian_part()).unwrap();
    let tr = root_inner.trace();
    tr.norm_sqr()
}

trait NormalizedChecked {
    fn normalized_checked(&self) -> Option<Vec4<f64>>;
}

impl NormalizedChecked for Vec4<f64> {
    fn normalized_checked(&self) -> Option<Vec4<f64>> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-6 {
            return None;
        }
        Some(self.scaled(C64::new(n.recip(), 0.0)))
    }
}
