//! Qubit and two-qubit state types, target-state constructors, and state
//! metrics (fidelity, purity, Stokes coordinates).
//!
//! Polarization conventions: `|H⟩`, `|V⟩` are the computational basis,
//! `|D⟩ = (|H⟩+|V⟩)/√2`, `|A⟩ = (|H⟩−|V⟩)/√2`, and the circular basis is
//! fixed by `|R⟩ = (|H⟩+i|V⟩)/√2`, so `|R⟩` is the +1 eigenvector of σy and
//! `tr(ρ σy)` is the R/L Stokes axis. Global phase is never compared;
//! agreement between states is always a fidelity statement.

use crate::error::{Error, Result};
use crate::linalg::{ci, cr, herm_eig4_values, min_eig_hermitian, Mat2, Mat4, Vec2, Vec4, C};
use crate::scalar::Scalar;

// ── Pauli operators ──────────────────────────────────────────────────────────

/// The four single-qubit Pauli operators (identity included).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix<T: Scalar>(self) -> Mat2<T> {
        let o = T::one();
        let z = T::zero();
        match self {
            Pauli::I => Mat2::identity(),
            Pauli::X => Mat2::new([[cr(z), cr(o)], [cr(o), cr(z)]]),
            Pauli::Y => Mat2::new([[cr(z), ci(z, -o)], [ci(z, o), cr(z)]]),
            Pauli::Z => Mat2::diag(cr(o), cr(-o)),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

/// Standard Pauli matrix.
pub fn pauli<T: Scalar>(which: Pauli) -> Mat2<T> {
    which.matrix()
}

// ── pure qubit ───────────────────────────────────────────────────────────────

/// Normalized single-qubit pure state `amp_h|H⟩ + amp_v|V⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureQubit<T: Scalar> {
    ket: Vec2<T>,
}

impl<T: Scalar> PureQubit<T> {
    pub fn new(amp_h: C<T>, amp_v: C<T>) -> Result<Self> {
        Self::from_ket(Vec2::new(amp_h, amp_v))
    }

    pub fn from_ket(ket: Vec2<T>) -> Result<Self> {
        if !ket.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = ket.norm_sqr();
        if (n - T::one()).abs() > T::TOL_GATE {
            return Err(Error::NotNormalized { norm_sqr: n.as_f64() });
        }
        Ok(Self { ket })
    }

    pub fn amp_h(&self) -> C<T> {
        self.ket.e[0]
    }

    pub fn amp_v(&self) -> C<T> {
        self.ket.e[1]
    }

    pub fn ket(&self) -> Vec2<T> {
        self.ket
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::new(self.ket.outer(&self.ket))
            .expect("outer product of a normalized ket is a state")
    }

    pub fn h() -> Self {
        Self { ket: Vec2::basis(0) }
    }

    pub fn v() -> Self {
        Self { ket: Vec2::basis(1) }
    }

    pub fn d() -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self { ket: Vec2::new(cr(s), cr(s)) }
    }

    pub fn a() -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self { ket: Vec2::new(cr(s), cr(-s)) }
    }

    pub fn r() -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self { ket: Vec2::new(cr(s), ci(T::zero(), s)) }
    }

    pub fn l() -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self { ket: Vec2::new(cr(s), ci(T::zero(), -s)) }
    }
}

// ── density matrices ─────────────────────────────────────────────────────────

/// Single-qubit density matrix: Hermitian, unit trace, positive semidefinite,
/// each gated at the validity tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    mat: Mat2<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(mat: Mat2<T>) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = mat.hermitian_deviation();
        if dev > T::TOL_GATE {
            return Err(Error::NotHermitian { deviation: dev.as_f64() });
        }
        let tr = mat.trace();
        if (tr.re - T::one()).abs() > T::TOL_GATE || tr.im.abs() > T::TOL_GATE {
            return Err(Error::TraceNotOne { trace: tr.re.as_f64() });
        }
        let min = min_eig_hermitian(&mat.hermitian_part());
        if min < -T::TOL_GATE {
            return Err(Error::NotPsd { min_eigenvalue: min.as_f64() });
        }
        Ok(Self { mat })
    }

    pub fn mat(&self) -> &Mat2<T> {
        &self.mat
    }

    /// Maximally mixed state I/2.
    pub fn maximally_mixed() -> Self {
        let h = T::of(0.5);
        Self { mat: Mat2::diag(cr(h), cr(h)) }
    }

    /// Conjugation `u ρ u†` by a unitary.
    pub fn conjugated_by(&self, u: &Mat2<T>) -> Result<Self> {
        Self::new(*u * self.mat * u.adjoint())
    }
}

/// Two-qubit state held in density form, in the (HH, HV, VH, VV) basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState<T: Scalar> {
    mat: Mat4<T>,
}

impl<T: Scalar> TwoQubitState<T> {
    pub fn new(mat: Mat4<T>) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = mat.hermitian_deviation();
        if dev > T::TOL_GATE {
            return Err(Error::NotHermitian { deviation: dev.as_f64() });
        }
        let tr = mat.trace();
        if (tr.re - T::one()).abs() > T::TOL_GATE || tr.im.abs() > T::TOL_GATE {
            return Err(Error::TraceNotOne { trace: tr.re.as_f64() });
        }
        let vals = herm_eig4_values(&mat)?;
        if vals[3] < -T::TOL_GATE {
            return Err(Error::NotPsd { min_eigenvalue: vals[3].as_f64() });
        }
        Ok(Self { mat })
    }

    pub fn from_ket(ket: &Vec4<T>) -> Result<Self> {
        let n = ket.norm_sqr();
        if (n - T::one()).abs() > T::TOL_GATE {
            return Err(Error::NotNormalized { norm_sqr: n.as_f64() });
        }
        Self::new(ket.outer(ket))
    }

    pub fn mat(&self) -> &Mat4<T> {
        &self.mat
    }
}

// ── target specs ─────────────────────────────────────────────────────────────

/// Parameters (α, β, φ) of a pure target `α|H⟩ + β e^{iφ}|V⟩`, with α, β
/// real in [0, 1], α² + β² = 1, and φ stored in [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetPureSpec<T: Scalar> {
    alpha: T,
    beta: T,
    phi: T,
}

impl<T: Scalar> TargetPureSpec<T> {
    pub fn new(alpha: T, beta: T, phi: T) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        if alpha < T::zero() || alpha > T::one() || beta < T::zero() || beta > T::one() {
            return Err(Error::InvalidSpec(format!(
                "alpha and beta must lie in [0, 1], got ({}, {})",
                alpha, beta
            )));
        }
        let n = alpha * alpha + beta * beta;
        if (n - T::one()).abs() > T::TOL_GATE {
            return Err(Error::InvalidSpec(format!(
                "alpha^2 + beta^2 = {} but must be 1",
                n
            )));
        }
        let tau = T::of(2.0) * T::PI();
        let mut phi = phi % tau;
        if phi < T::zero() {
            phi += tau;
        }
        Ok(Self { alpha, beta, phi })
    }

    /// α, β from a polar angle: `alpha = cos θ`, `beta = sin θ`, θ ∈ [0, π/2].
    pub fn from_polar(theta: T, phi: T) -> Result<Self> {
        Self::new(theta.cos(), theta.sin(), phi)
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    /// Amplitudes (α, β e^{iφ}) as a ket.
    pub fn ket(&self) -> Vec2<T> {
        Vec2::new(cr(self.alpha), C::from_polar(self.beta, self.phi))
    }
}

/// Parameters (α, β, φ, p, q) of a mixed target
/// `p²|φ⟩⟨φ| + q²|φ⊥⟩⟨φ⊥|`, with p² + q² = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetMixedSpec<T: Scalar> {
    pure: TargetPureSpec<T>,
    p: T,
    q: T,
}

impl<T: Scalar> TargetMixedSpec<T> {
    pub fn new(alpha: T, beta: T, phi: T, p: T, q: T) -> Result<Self> {
        let pure = TargetPureSpec::new(alpha, beta, phi)?;
        if !(p.is_finite() && q.is_finite()) {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        if p < T::zero() || p > T::one() || q < T::zero() || q > T::one() {
            return Err(Error::InvalidSpec(format!(
                "p and q must lie in [0, 1], got ({}, {})",
                p, q
            )));
        }
        let n = p * p + q * q;
        if (n - T::one()).abs() > T::TOL_GATE {
            return Err(Error::InvalidSpec(format!("p^2 + q^2 = {} but must be 1", n)));
        }
        Ok(Self { pure, p, q })
    }

    pub fn alpha(&self) -> T {
        self.pure.alpha
    }

    pub fn beta(&self) -> T {
        self.pure.beta
    }

    pub fn phi(&self) -> T {
        self.pure.phi
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn pure_part(&self) -> TargetPureSpec<T> {
        self.pure
    }

    /// `|φ⟩ = α|H⟩ + β e^{iφ}|V⟩`.
    pub fn principal_ket(&self) -> Vec2<T> {
        self.pure.ket()
    }

    /// `|φ⊥⟩ = β e^{−iφ}|H⟩ − α|V⟩`, orthogonal to the principal ket.
    pub fn orthogonal_ket(&self) -> Vec2<T> {
        Vec2::new(
            C::from_polar(self.pure.beta, -self.pure.phi),
            cr(-self.pure.alpha),
        )
    }
}

// ── constructors ─────────────────────────────────────────────────────────────

/// Projector onto the maximally entangled state `(|HV⟩ + |VH⟩)/√2`.
pub fn bell_psi_plus<T: Scalar>() -> TwoQubitState<T> {
    let s = T::FRAC_1_SQRT_2();
    let mut ket = Vec4::zero();
    ket.e[1] = cr(s);
    ket.e[2] = cr(s);
    TwoQubitState::from_ket(&ket).expect("Bell ket is normalized")
}

/// Pure target state for a spec.
pub fn target_pure<T: Scalar>(spec: &TargetPureSpec<T>) -> PureQubit<T> {
    PureQubit::from_ket(spec.ket()).expect("spec invariants guarantee normalization")
}

/// Mixed target state `p²|φ⟩⟨φ| + q²|φ⊥⟩⟨φ⊥|` for a spec.
pub fn target_mixed<T: Scalar>(spec: &TargetMixedSpec<T>) -> DensityMatrix<T> {
    let phi = spec.principal_ket();
    let perp = spec.orthogonal_ket();
    let p2 = spec.p * spec.p;
    let q2 = spec.q * spec.q;
    let mat = phi.outer(&phi).scale_re(p2) + perp.outer(&perp).scale_re(q2);
    DensityMatrix::new(mat).expect("convex mixture of orthogonal projectors is a state")
}

// ── metrics ──────────────────────────────────────────────────────────────────

/// Uhlmann fidelity between two single-qubit states.
///
/// Uses the 2×2 closed form `tr(ρσ) + 2√(det ρ · det σ)`, clamped to [0, 1].
pub fn fidelity<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> T {
    let prod = (*rho.mat() * *sigma.mat()).trace().re;
    let dr = rho.mat().det().re.max(T::zero());
    let ds = sigma.mat().det().re.max(T::zero());
    let f = prod + T::of(2.0) * (dr * ds).sqrt();
    f.max(T::zero()).min(T::one())
}

/// `tr(ρ²)`.
pub fn purity<T: Scalar>(rho: &DensityMatrix<T>) -> T {
    (*rho.mat() * *rho.mat()).trace().re
}

/// Stokes coordinates `(s1, s2, s3) = (tr ρσz, tr ρσx, tr ρσy)`:
/// H/V, D/A and R/L axes of the Poincaré sphere.
pub fn stokes<T: Scalar>(rho: &DensityMatrix<T>) -> [T; 3] {
    let m = rho.mat();
    let s1 = m.e[0][0].re - m.e[1][1].re;
    let s2 = (m.e[0][1] + m.e[1][0]).re;
    // tr(ρσy) = i(ρ01 − ρ10) = 2·Im(ρ10)
    let s3 = T::of(2.0) * m.e[1][0].im;
    [s1, s2, s3]
}
