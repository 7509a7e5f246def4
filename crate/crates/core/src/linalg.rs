//! Fixed-size complex linear algebra: 2×2 / 4×4 matrices, kets, and the
//! small decompositions everything else is built on.
//!
//! Conventions, binding everywhere in this crate:
//!
//! * the two-qubit basis order is (HH, HV, VH, VV) with the first tensor
//!   factor belonging to Alice;
//! * [`svd2`] factors `m = u · diag(d) · v` with `d` non-increasing and the
//!   leading nonzero entry of each column of `u` real non-negative, the
//!   compensating phase carried by the corresponding row of `v`;
//! * [`herm_eig2`] orders eigenvalues non-increasing and applies the same
//!   leading-entry phase convention to eigenvector columns.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Complex number over the crate scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Scalar>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn ci<T: Scalar>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

// ── kets ─────────────────────────────────────────────────────────────────────

/// Two-component complex column vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2<T> {
    pub e: [C<T>; 2],
}

impl<T: Scalar> Vec2<T> {
    pub fn new(a: C<T>, b: C<T>) -> Self {
        Self { e: [a, b] }
    }

    /// Standard basis vector, `i` in {0, 1}.
    pub fn basis(i: usize) -> Self {
        let mut e = [cr(T::zero()); 2];
        e[i] = cr(T::one());
        Self { e }
    }

    pub fn norm_sqr(&self) -> T {
        self.e[0].norm_sqr() + self.e[1].norm_sqr()
    }

    /// Inner product `⟨self|other⟩` (self conjugated).
    pub fn dot(&self, other: &Self) -> C<T> {
        self.e[0].conj() * other.e[0] + self.e[1].conj() * other.e[1]
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        Self::new(self.e[0] * s, self.e[1] * s)
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm_sqr().sqrt();
        if n <= T::zero() {
            return None;
        }
        Some(self.scaled(cr(n.recip())))
    }

    /// Outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> Mat2<T> {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[i] * other.e[j].conj();
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Four-component complex column vector in the (HH, HV, VH, VV) basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec4<T> {
    pub e: [C<T>; 4],
}

impl<T: Scalar> Vec4<T> {
    pub fn new(e: [C<T>; 4]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self { e: [cr(T::zero()); 4] }
    }

    pub fn basis(i: usize) -> Self {
        let mut e = [cr(T::zero()); 4];
        e[i] = cr(T::one());
        Self { e }
    }

    pub fn norm_sqr(&self) -> T {
        self.e.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        let mut e = self.e;
        for x in &mut e {
            *x *= s;
        }
        Self { e }
    }

    /// Outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> Mat4<T> {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = self.e[i] * other.e[j].conj();
            }
        }
        m
    }
}

/// Tensor product of two kets, first factor Alice.
pub fn kron_vec<T: Scalar>(a: &Vec2<T>, b: &Vec2<T>) -> Vec4<T> {
    let mut out = Vec4::zero();
    for i in 0..2 {
        for k in 0..2 {
            out.e[2 * i + k] = a.e[i] * b.e[k];
        }
    }
    out
}

// ── 2×2 matrices ─────────────────────────────────────────────────────────────

/// Dense 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T> {
    pub e: [[C<T>; 2]; 2],
}

impl<T: Scalar> Mat2<T> {
    pub fn new(e: [[C<T>; 2]; 2]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self { e: [[cr(T::zero()); 2]; 2] }
    }

    pub fn identity() -> Self {
        Self::diag(cr(T::one()), cr(T::one()))
    }

    pub fn diag(a: C<T>, b: C<T>) -> Self {
        let z = cr(T::zero());
        Self { e: [[a, z], [z, b]] }
    }

    pub fn column(&self, j: usize) -> Vec2<T> {
        Vec2::new(self.e[0][j], self.e[1][j])
    }

    pub fn from_columns(c0: &Vec2<T>, c1: &Vec2<T>) -> Self {
        Self { e: [[c0.e[0], c1.e[0]], [c0.e[1], c1.e[1]]] }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C<T> {
        self.e[0][0] + self.e[1][1]
    }

    pub fn det(&self) -> C<T> {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = *self;
        for row in &mut m.e {
            for x in row {
                *x *= s;
            }
        }
        m
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    pub fn mul_vec(&self, v: &Vec2<T>) -> Vec2<T> {
        Vec2::new(
            self.e[0][0] * v.e[0] + self.e[0][1] * v.e[1],
            self.e[1][0] * v.e[0] + self.e[1][1] * v.e[1],
        )
    }

    /// Entrywise max modulus.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for row in &self.e {
            for x in row {
                m = m.max(x.norm_sqr().sqrt());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .all(|r| r.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }

    /// `‖m − m†‖∞`.
    pub fn hermitian_deviation(&self) -> T {
        (*self - self.adjoint()).max_abs()
    }

    /// `‖m†m − I‖∞`.
    pub fn unitary_deviation(&self) -> T {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitary_deviation() <= tol
    }

    /// Hermitian within `tol` and no eigenvalue below `−tol`.
    pub fn is_psd(&self, tol: T) -> bool {
        self.is_hermitian(tol) && min_eig_hermitian(&self.hermitian_part()) >= -tol
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(T::of(0.5))
    }
}

impl<T: Scalar> std::ops::Add for Mat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] += rhs.e[i][j];
            }
        }
        m
    }
}

impl<T: Scalar> std::ops::Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] -= rhs.e[i][j];
            }
        }
        m
    }
}

impl<T: Scalar> std::ops::Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let z = cr(T::zero());
        let mut m = Mat2 { e: [[z; 2]; 2] };
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = z;
                for k in 0..2 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                m.e[i][j] = acc;
            }
        }
        m
    }
}

// ── 4×4 matrices ─────────────────────────────────────────────────────────────

/// Dense 4×4 complex matrix in the (HH, HV, VH, VV) basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4<T> {
    pub e: [[C<T>; 4]; 4],
}

impl<T: Scalar> Mat4<T> {
    pub fn new(e: [[C<T>; 4]; 4]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self { e: [[cr(T::zero()); 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = cr(T::one());
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = self.e[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C<T> {
        (0..4).map(|i| self.e[i][i]).fold(cr(T::zero()), |a, b| a + b)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = *self;
        for row in &mut m.e {
            for x in row {
                *x *= s;
            }
        }
        m
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    pub fn mul_vec(&self, v: &Vec4<T>) -> Vec4<T> {
        let mut out = Vec4::zero();
        for i in 0..4 {
            let mut acc = cr(T::zero());
            for k in 0..4 {
                acc += self.e[i][k] * v.e[k];
            }
            out.e[i] = acc;
        }
        out
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for row in &self.e {
            for x in row {
                m = m.max(x.norm_sqr().sqrt());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .all(|r| r.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }

    pub fn hermitian_deviation(&self) -> T {
        (*self - self.adjoint()).max_abs()
    }

    pub fn unitary_deviation(&self) -> T {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitary_deviation() <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(T::of(0.5))
    }

    pub fn is_psd(&self, tol: T) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let vals = eig4_values_hermitian_part(self);
        vals[3] >= -tol
    }
}

impl<T: Scalar> std::ops::Add for Mat4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] += rhs.e[i][j];
            }
        }
        m
    }
}

impl<T: Scalar> std::ops::Sub for Mat4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] -= rhs.e[i][j];
            }
        }
        m
    }
}

impl<T: Scalar> std::ops::Mul for Mat4<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let z = cr(T::zero());
        let mut m = Mat4 { e: [[z; 4]; 4] };
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = z;
                for k in 0..4 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                m.e[i][j] = acc;
            }
        }
        m
    }
}

// ── tensor structure ─────────────────────────────────────────────────────────

/// Which tensor factor of a two-qubit operator to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    Alice,
    Bob,
}

/// Kronecker product, first factor Alice: `(a ⊗ b)[2i+k][2j+l] = a[i][j]·b[k][l]`.
pub fn kron<T: Scalar>(a: &Mat2<T>, b: &Mat2<T>) -> Mat4<T> {
    let mut m = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.e[2 * i + k][2 * j + l] = a.e[i][j] * b.e[k][l];
                }
            }
        }
    }
    m
}

/// Trace out the complementary subsystem of a Hermitian two-qubit operator.
///
/// Rejects input whose Hermitian deviation exceeds the gate tolerance.
pub fn partial_trace<T: Scalar>(rho: &Mat4<T>, keep: Subsystem) -> Result<Mat2<T>> {
    let dev = rho.hermitian_deviation();
    if dev > T::TOL_GATE {
        return Err(Error::NotHermitian { deviation: dev.as_f64() });
    }
    let mut out = Mat2::zero();
    match keep {
        Subsystem::Alice => {
            for i in 0..2 {
                for j in 0..2 {
                    out.e[i][j] = rho.e[2 * i][2 * j] + rho.e[2 * i + 1][2 * j + 1];
                }
            }
        }
        Subsystem::Bob => {
            for k in 0..2 {
                for l in 0..2 {
                    out.e[k][l] = rho.e[k][l] + rho.e[2 + k][2 + l];
                }
            }
        }
    }
    Ok(out)
}

// ── Hermitian eigendecomposition (2×2) ───────────────────────────────────────

/// Eigendecomposition `h = Q Λ Q†` of a 2×2 Hermitian matrix.
#[derive(Clone, Copy, Debug)]
pub struct Eig2<T> {
    /// Eigenvalues, non-increasing.
    pub values: [T; 2],
    /// Unitary matrix whose columns are the eigenvectors, in the same order.
    pub vectors: Mat2<T>,
}

/// Smallest eigenvalue of the Hermitian part, closed form.
pub(crate) fn min_eig_hermitian<T: Scalar>(h: &Mat2<T>) -> T {
    let a = h.e[0][0].re;
    let d = h.e[1][1].re;
    let half = T::of(0.5);
    let m = (a + d) * half;
    let g = (a - d) * half;
    m - (g * g + h.e[0][1].norm_sqr()).sqrt()
}

fn fix_phase_col<T: Scalar>(col: &mut Vec2<T>) -> C<T> {
    // Rotate so the leading nonzero entry is real non-negative; returns the
    // phase that was removed.
    let lead = if col.e[0].norm_sqr() > T::zero() { col.e[0] } else { col.e[1] };
    let n = lead.norm_sqr().sqrt();
    if n <= T::zero() {
        return cr(T::one());
    }
    let phase = lead.unscale(n);
    *col = col.scaled(phase.conj());
    phase
}

/// Eigendecomposition assuming (after symmetrizing) Hermitian input.
pub(crate) fn eig2_of_hermitian_part<T: Scalar>(h: &Mat2<T>) -> Eig2<T> {
    let hp = h.hermitian_part();
    let a = hp.e[0][0].re;
    let d = hp.e[1][1].re;
    let b = hp.e[0][1];

    let scale = a.abs().max(d.abs()).max(T::one());
    let tiny = T::epsilon() * scale;
    if b.norm_sqr() <= tiny * tiny {
        // effectively diagonal; order the basis vectors by eigenvalue
        return if a >= d {
            Eig2 { values: [a, d], vectors: Mat2::identity() }
        } else {
            let e0: Vec2<T> = Vec2::basis(1);
            let e1: Vec2<T> = Vec2::basis(0);
            Eig2 { values: [d, a], vectors: Mat2::from_columns(&e0, &e1) }
        };
    }

    let half = T::of(0.5);
    let m = (a + d) * half;
    let g = (a - d) * half;
    let r = (g * g + b.norm_sqr()).sqrt();
    let l1 = m + r;
    let l2 = m - r;

    // Eigenvector components (λ1 − a) and (λ2 − d) via the rationalized
    // form: direct subtraction cancels catastrophically for |b| ≪ |g|,
    // and the shared value keeps the two columns exactly orthogonal.
    let delta = if g >= T::zero() { b.norm_sqr() / (r + g) } else { r - g };
    let mut v1 = Vec2::new(b, cr(delta));
    let mut v2 = Vec2::new(cr(-delta), b.conj());
    v1 = v1.normalized().unwrap_or_else(|| Vec2::basis(0));
    v2 = v2.normalized().unwrap_or_else(|| Vec2::basis(1));
    fix_phase_col(&mut v1);
    fix_phase_col(&mut v2);

    Eig2 { values: [l1, l2], vectors: Mat2::from_columns(&v1, &v2) }
}

/// Eigendecomposition of a 2×2 Hermitian matrix.
///
/// Eigenvalues come out non-increasing; each eigenvector column has its
/// leading nonzero entry real non-negative. Rejects non-Hermitian input.
pub fn herm_eig2<T: Scalar>(h: &Mat2<T>) -> Result<Eig2<T>> {
    let dev = h.hermitian_deviation();
    if dev > T::TOL_GATE {
        return Err(Error::NotHermitian { deviation: dev.as_f64() });
    }
    Ok(eig2_of_hermitian_part(h))
}

// ── singular value decomposition (2×2) ───────────────────────────────────────

/// Factorization `m = u · diag(d) · v` with `u`, `v` unitary.
#[derive(Clone, Copy, Debug)]
pub struct Svd2<T> {
    pub u: Mat2<T>,
    /// Singular values, non-increasing, non-negative.
    pub d: [T; 2],
    pub v: Mat2<T>,
}

fn orthogonal_complement<T: Scalar>(v: &Vec2<T>) -> Vec2<T> {
    Vec2::new(-v.e[1].conj(), v.e[0].conj())
}

/// Singular value decomposition of an arbitrary 2×2 complex matrix.
///
/// Returns `m = u · diag(d) · v` (the right factor is `v`, not `v†`).
/// Singular values are non-increasing; the leading nonzero entry of each
/// column of `u` is real non-negative with the phase compensated in the
/// matching row of `v`. Columns belonging to zero singular values are
/// completed orthonormally and carry no compensation.
pub fn svd2<T: Scalar>(m: &Mat2<T>) -> Svd2<T> {
    let gram = m.adjoint() * *m;
    let eig = eig2_of_hermitian_part(&gram);
    let d = [
        eig.values[0].max(T::zero()).sqrt(),
        eig.values[1].max(T::zero()).sqrt(),
    ];

    if d[0] <= T::zero() {
        // zero matrix
        return Svd2 { u: Mat2::identity(), d: [T::zero(); 2], v: Mat2::identity() };
    }

    let q0 = eig.vectors.column(0);
    let q1 = eig.vectors.column(1);
    let mut v = eig.vectors.adjoint();

    let cutoff = d[0] * T::epsilon() * T::of(64.0);

    let mut u0 = m
        .mul_vec(&q0)
        .scaled(cr(d[0].recip()))
        .normalized()
        .unwrap_or_else(|| Vec2::basis(0));
    let phase0 = fix_phase_col(&mut u0);
    for j in 0..2 {
        v.e[0][j] *= phase0;
    }

    let mut completed = true;
    let mut u1 = orthogonal_complement(&u0);
    if d[1] > cutoff {
        let mut c = m.mul_vec(&q1).scaled(cr(d[1].recip()));
        // one re-orthogonalization pass keeps u unitary when d[1] is small
        let overlap = u0.dot(&c);
        c = Vec2::new(c.e[0] - u0.e[0] * overlap, c.e[1] - u0.e[1] * overlap);
        if let Some(n) = c.normalized() {
            u1 = n;
            completed = false;
        }
    }
    let phase1 = fix_phase_col(&mut u1);
    if !completed {
        for j in 0..2 {
            v.e[1][j] *= phase1;
        }
    }
    // completed columns carry no compensation: their singular value is zero

    Svd2 { u: Mat2::from_columns(&u0, &u1), d, v }
}

// ── PSD square root (2×2) ────────────────────────────────────────────────────

/// Positive square root of a 2×2 positive semidefinite matrix.
///
/// Closed form `(a + √det·I)/√(tr + 2√det)`, falling back to the
/// eigendecomposition when the denominator is below the exact tolerance.
/// Rejects input that is not PSD within the gate tolerance.
pub fn sqrt_psd2<T: Scalar>(a: &Mat2<T>) -> Result<Mat2<T>> {
    let dev = a.hermitian_deviation();
    if dev > T::TOL_GATE {
        return Err(Error::NotHermitian { deviation: dev.as_f64() });
    }
    let h = a.hermitian_part();
    let eig = eig2_of_hermitian_part(&h);
    if eig.values[1] < -T::TOL_GATE {
        return Err(Error::NotPsd { min_eigenvalue: eig.values[1].as_f64() });
    }

    let l1 = eig.values[0].max(T::zero());
    let l2 = eig.values[1].max(T::zero());
    let s = (l1 * l2).sqrt();
    let denom = (l1 + l2 + T::of(2.0) * s).sqrt();
    if denom < T::TOL_EXACT {
        let q = eig.vectors;
        let root = Mat2::diag(cr(l1.sqrt()), cr(l2.sqrt()));
        return Ok(q * root * q.adjoint());
    }
    Ok((h + Mat2::diag(cr(s), cr(s))).scale_re(denom.recip()))
}

// ── Hermitian eigenvalues (4×4) ──────────────────────────────────────────────

fn eig4_values_hermitian_part<T: Scalar>(h: &Mat4<T>) -> [T; 4] {
    let mut a = h.hermitian_part();
    let scale = a.max_abs().max(T::one());
    let tol = T::epsilon() * scale * T::of(4.0);

    // cyclic complex Jacobi sweeps; each rotation zeroes one off-diagonal pair
    for _ in 0..60 {
        let mut off = T::zero();
        for p in 0..4 {
            for q in (p + 1)..4 {
                off = off.max(a.e[p][q].norm_sqr().sqrt());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                if a.e[p][q].norm_sqr().sqrt() <= tol {
                    continue;
                }
                let sub = Mat2::new([[a.e[p][p], a.e[p][q]], [a.e[q][p], a.e[q][q]]]);
                let rot = eig2_of_hermitian_part(&sub).vectors;
                // a ← g† a g with g embedding rot at (p, q)
                for k in 0..4 {
                    let xp = a.e[k][p];
                    let xq = a.e[k][q];
                    a.e[k][p] = xp * rot.e[0][0] + xq * rot.e[1][0];
                    a.e[k][q] = xp * rot.e[0][1] + xq * rot.e[1][1];
                }
                for k in 0..4 {
                    let xp = a.e[p][k];
                    let xq = a.e[q][k];
                    a.e[p][k] = rot.e[0][0].conj() * xp + rot.e[1][0].conj() * xq;
                    a.e[q][k] = rot.e[0][1].conj() * xp + rot.e[1][1].conj() * xq;
                }
            }
        }
    }

    let mut vals = [a.e[0][0].re, a.e[1][1].re, a.e[2][2].re, a.e[3][3].re];
    vals.sort_by(|x, y| y.partial_cmp(x).expect("non-finite eigenvalue"));
    vals
}

/// Eigenvalues of a 4×4 Hermitian matrix, non-increasing.
///
/// Rejects non-Hermitian input.
pub fn herm_eig4_values<T: Scalar>(h: &Mat4<T>) -> Result<[T; 4]> {
    let dev = h.hermitian_deviation();
    if dev > T::TOL_GATE {
        return Err(Error::NotHermitian { deviation: dev.as_f64() });
    }
    Ok(eig4_values_hermitian_part(h))
}

// ── tests ────────────────────────────────────────────────────────────────────
