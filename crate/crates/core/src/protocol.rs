//! End-to-end deterministic remote state preparation.
//!
//! Pure targets: Alice holds half of `(|HV⟩+|VH⟩)/√2`, runs her photon
//! through the two-outcome module realizing `M1 = diag(α, βe^{iφ})`,
//! `M2 = diag(βe^{iφ}, α)` (the second exit physically carries the
//! polarization flip, so the branch operators are `{M1, X·M2}`), then
//! projects onto `{|D⟩, |A⟩}`. The 2-bit outcome selects Bob's Pauli
//! correction and every branch recovers the target exactly.
//!
//! Mixed targets add a (p, q) rotation that routes amplitude into two
//! distinguishable time bins, a second rotation sending the bin carriers to
//! `|φ⟩` and `|φ⊥⟩`, and a trace over the bins before Alice's projection.
//! The same correction table applies branchwise.
//!
//! Correction table (povm_bit, proj_bit) → Pauli:
//!
//! | message  | correction |
//! |----------|------------|
//! | (1, D)   | I          |
//! | (1, A)   | Z          |
//! | (0, D)   | X          |
//! | (0, A)   | Y          |
//!
//! The Y branch restores the target only up to a global phase (−i), which
//! is invisible in density form.

use crate::error::{Error, Result};
use crate::linalg::{cr, kron, partial_trace, Mat2, Mat4, Subsystem, Vec2, C};
use crate::povm::PovmPair;
use crate::scalar::Scalar;
use crate::state::{
    bell_psi_plus, DensityMatrix, Pauli, PureQubit, TargetMixedSpec, TargetPureSpec,
    TwoQubitState,
};

// ── classical message and correction ─────────────────────────────────────────

/// The two classical bits Alice sends to Bob.
///
/// `povm_bit` identifies the module exit (1 = the branch whose D-projection
/// already is the target), `proj_bit` the projection outcome
/// (0 = `|D⟩`, 1 = `|A⟩`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassicalMessage {
    pub povm_bit: u8,
    pub proj_bit: u8,
}

impl ClassicalMessage {
    /// All four messages, in (povm_bit, proj_bit) lexicographic order.
    pub const ALL: [ClassicalMessage; 4] = [
        ClassicalMessage { povm_bit: 0, proj_bit: 0 },
        ClassicalMessage { povm_bit: 0, proj_bit: 1 },
        ClassicalMessage { povm_bit: 1, proj_bit: 0 },
        ClassicalMessage { povm_bit: 1, proj_bit: 1 },
    ];

    pub fn new(povm_bit: u8, proj_bit: u8) -> Result<Self> {
        if povm_bit > 1 || proj_bit > 1 {
            return Err(Error::InvalidSpec(format!(
                "message bits must be 0 or 1, got ({povm_bit}, {proj_bit})"
            )));
        }
        Ok(Self { povm_bit, proj_bit })
    }

    pub fn projected_onto_a(&self) -> bool {
        self.proj_bit == 1
    }

    /// Short label such as `"1D"`.
    pub fn label(&self) -> String {
        format!("{}{}", self.povm_bit, if self.proj_bit == 0 { "D" } else { "A" })
    }
}

/// Bob's local correction, one of the four Paulis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CorrectionOp {
    pub op: Pauli,
}

impl CorrectionOp {
    pub fn matrix<T: Scalar>(&self) -> Mat2<T> {
        self.op.matrix()
    }
}

/// Correction lookup; total on all four messages.
pub fn correction_for(message: ClassicalMessage) -> CorrectionOp {
    let op = match (message.povm_bit, message.proj_bit) {
        (1, 0) => Pauli::I,
        (1, 1) => Pauli::Z,
        (0, 0) => Pauli::X,
        _ => Pauli::Y,
    };
    CorrectionOp { op }
}

// ── branch records ───────────────────────────────────────────────────────────

/// Alice-side branch before Bob's correction.
#[derive(Clone, Copy, Debug)]
pub struct AliceBranch<T: Scalar> {
    pub message: ClassicalMessage,
    pub probability: T,
    /// Bob's conditional state; `None` when the branch probability is below
    /// the probability floor.
    pub bob_pre: Option<DensityMatrix<T>>,
}

/// Complete record of one protocol branch after correction.
#[derive(Clone, Copy, Debug)]
pub struct BranchResult<T: Scalar> {
    pub message: ClassicalMessage,
    pub probability: T,
    pub bob_pre: Option<DensityMatrix<T>>,
    pub correction: CorrectionOp,
    pub bob_post: Option<DensityMatrix<T>>,
}

// ── pure-state protocol ──────────────────────────────────────────────────────

/// POVM pair for a pure target: `M1 = diag(α, βe^{iφ})`, `M2 = diag(βe^{iφ}, α)`.
pub fn povm_for_pure<T: Scalar>(spec: &TargetPureSpec<T>) -> PovmPair<T> {
    let a = cr(spec.alpha());
    let b = C::from_polar(spec.beta(), spec.phi());
    PovmPair::with_tolerance(Mat2::diag(a, b), Mat2::diag(b, a), T::TOL_EXACT)
        .expect("spec invariants give columnwise completeness")
}

fn projector_on_alice<T: Scalar>(ket: &Vec2<T>) -> Mat4<T> {
    kron(&ket.outer(ket), &Mat2::identity())
}

fn branch_from_joint<T: Scalar>(
    joint: &Mat4<T>,
    message: ClassicalMessage,
) -> Result<AliceBranch<T>> {
    let proj = if message.projected_onto_a() {
        PureQubit::<T>::a().ket()
    } else {
        PureQubit::<T>::d().ket()
    };
    let p_op = projector_on_alice(&proj);
    let sigma = p_op * *joint * p_op;
    let probability = sigma.trace().re.max(T::zero());
    let bob_pre = if probability > T::PROB_FLOOR {
        let reduced = partial_trace(&sigma, Subsystem::Bob)?.scale_re(probability.recip());
        Some(DensityMatrix::new(reduced)?)
    } else {
        None
    };
    Ok(AliceBranch { message, probability, bob_pre })
}

/// Alice's stage of the pure protocol on an arbitrary shared two-qubit
/// state: module outcome (branch operators `{M1, X·M2}` on her photon)
/// followed by the `{|D⟩, |A⟩}` projection. Returns all four branches,
/// pre-correction, in [`ClassicalMessage::ALL`] order.
pub fn alice_stage_pure<T: Scalar>(
    shared: &TwoQubitState<T>,
    spec: &TargetPureSpec<T>,
) -> Result<[AliceBranch<T>; 4]> {
    let pair = povm_for_pure(spec);
    let flip = Pauli::X.matrix();
    let exit_ops = [*pair.m1(), flip * *pair.m2()];

    let mut branches = Vec::with_capacity(4);
    for message in ClassicalMessage::ALL {
        let op = &exit_ops[message.povm_bit as usize];
        let k = kron(op, &Mat2::identity());
        let joint = k * *shared.mat() * k.adjoint();
        branches.push(branch_from_joint(&joint, message)?);
    }
    Ok([branches[0], branches[1], branches[2], branches[3]])
}

fn correct_branch<T: Scalar>(branch: &AliceBranch<T>) -> Result<BranchResult<T>> {
    let correction = correction_for(branch.message);
    let bob_post = match &branch.bob_pre {
        Some(pre) => Some(pre.conjugated_by(&correction.matrix())?),
        None => None,
    };
    Ok(BranchResult {
        message: branch.message,
        probability: branch.probability,
        bob_pre: branch.bob_pre,
        correction,
        bob_post,
    })
}

/// Pure-state protocol on a caller-supplied shared state.
pub fn run_pure_rsp_with_source<T: Scalar>(
    shared: &TwoQubitState<T>,
    spec: &TargetPureSpec<T>,
) -> Result<[BranchResult<T>; 4]> {
    let staged = alice_stage_pure(shared, spec)?;
    let mut out = Vec::with_capacity(4);
    for branch in &staged {
        out.push(correct_branch(branch)?);
    }
    Ok([out[0], out[1], out[2], out[3]])
}

/// Pure-state protocol on the ideal Bell source. Every branch has
/// probability 1/4 and recovers the target exactly.
pub fn run_pure_rsp<T: Scalar>(spec: &TargetPureSpec<T>) -> Result<[BranchResult<T>; 4]> {
    run_pure_rsp_with_source(&bell_psi_plus(), spec)
}

// ── variable polarization rotators ───────────────────────────────────────────

/// Unitary actions of the three rotators used by the mixed protocol.
///
/// `vpr1` sends `|H⟩ → p|H⟩ + q|V⟩` (first arm), `vpr2` sends
/// `|V⟩ → p|H⟩ + q|V⟩` (second arm), and `vpr3` acts in both arms as
/// `|H⟩ → α|H⟩ + βe^{iφ}|V⟩`, `|V⟩ → βe^{−iφ}|H⟩ − α|V⟩`.
#[derive(Clone, Copy, Debug)]
pub struct VprSettings<T: Scalar> {
    pub vpr1: Mat2<T>,
    pub vpr2: Mat2<T>,
    pub vpr3: Mat2<T>,
}

impl<T: Scalar> VprSettings<T> {
    pub fn new(vpr1: Mat2<T>, vpr2: Mat2<T>, vpr3: Mat2<T>) -> Result<Self> {
        for m in [&vpr1, &vpr2, &vpr3] {
            let dev = m.unitary_deviation();
            if dev > T::TOL_GATE {
                return Err(Error::NotUnitary { deviation: dev.as_f64() });
            }
        }
        Ok(Self { vpr1, vpr2, vpr3 })
    }
}

/// Rotator settings for a mixed target.
pub fn vpr_settings_mixed<T: Scalar>(spec: &TargetMixedSpec<T>) -> VprSettings<T> {
    let p = cr(spec.p());
    let q = cr(spec.q());
    // specified columns: vpr1 acts on |H⟩, vpr2 on |V⟩; the free columns are
    // the orthonormal completions
    let vpr1 = Mat2::new([[p, -q], [q, p]]);
    let vpr2 = Mat2::new([[q, p], [-p, q]]);
    let phi = spec.principal_ket();
    let perp = spec.orthogonal_ket();
    let vpr3 = Mat2::from_columns(&phi, &perp);
    VprSettings::new(vpr1, vpr2, vpr3).expect("constructed columns are orthonormal")
}

// ── time-bin decoherence ─────────────────────────────────────────────────────

/// Joint state of (Alice ⊗ Bob) polarization and a two-level arrival-time
/// ancilla, stored as bin blocks: `blocks[t][t']` is the polarization
/// operator between bins `t` and `t'`.
#[derive(Clone, Copy, Debug)]
pub struct TimeBinState<T: Scalar> {
    blocks: [[Mat4<T>; 2]; 2],
}

impl<T: Scalar> TimeBinState<T> {
    /// Build from bin blocks; the block matrix must be Hermitian as a whole.
    pub fn from_blocks(blocks: [[Mat4<T>; 2]; 2]) -> Result<Self> {
        let dev = (blocks[0][0].hermitian_deviation())
            .max(blocks[1][1].hermitian_deviation())
            .max((blocks[0][1] - blocks[1][0].adjoint()).max_abs());
        if dev > T::TOL_GATE {
            return Err(Error::NotHermitian { deviation: dev.as_f64() });
        }
        Ok(Self { blocks })
    }

    /// Pure joint ket `|ψ₀⟩|bin0⟩ + |ψ₁⟩|bin1⟩` (kets may be unnormalized).
    pub fn from_pure_bins(bin0: &crate::linalg::Vec4<T>, bin1: &crate::linalg::Vec4<T>) -> Self {
        Self {
            blocks: [
                [bin0.outer(bin0), bin0.outer(bin1)],
                [bin1.outer(bin0), bin1.outer(bin1)],
            ],
        }
    }

    /// Polarization state `ρ` with the ancilla in `c0|bin0⟩ + c1|bin1⟩`.
    pub fn from_product(rho: &Mat4<T>, amplitudes: [C<T>; 2]) -> Self {
        let mut blocks = [[Mat4::zero(); 2]; 2];
        for t in 0..2 {
            for s in 0..2 {
                blocks[t][s] = rho.scale(amplitudes[t] * amplitudes[s].conj());
            }
        }
        Self { blocks }
    }

    /// Trace over the ancilla. Coherence between bins (the off-diagonal
    /// blocks) drops out exactly.
    pub fn trace_out_bins(&self) -> Mat4<T> {
        self.blocks[0][0] + self.blocks[1][1]
    }
}

/// Trace over the arrival-time ancilla of a normalized joint state.
pub fn decohere_timebins<T: Scalar>(joint: &TimeBinState<T>) -> Result<TwoQubitState<T>> {
    TwoQubitState::new(joint.trace_out_bins())
}

// ── mixed-state protocol ─────────────────────────────────────────────────────

/// Per-bin branch operators on Alice's photon for one module exit.
///
/// Bin 0 carries weight `⟨H|vpr1|H⟩` and polarization `vpr3|H⟩`; bin 1
/// carries `⟨V|vpr1|H⟩` and `vpr3|V⟩`. At exit 1 the interferometer
/// projects the carrier componentwise onto `diag(⟨H|χ⟩, ⟨V|χ⟩)`; exit 2 is
/// the swapped diagonal with the physical flip applied.
fn mixed_bin_operators<T: Scalar>(vpr: &VprSettings<T>) -> [[Mat2<T>; 2]; 2] {
    let weights = [vpr.vpr1.e[0][0], vpr.vpr1.e[1][0]];
    let carriers = [vpr.vpr3.column(0), vpr.vpr3.column(1)];
    let flip = Pauli::X.matrix();

    let mut ops = [[Mat2::zero(); 2]; 2];
    for (bin, (w, chi)) in weights.iter().zip(carriers.iter()).enumerate() {
        let exit1 = Mat2::diag(chi.e[0], chi.e[1]).scale(*w);
        let exit2 = flip * Mat2::diag(chi.e[1], chi.e[0]).scale(*w);
        ops[0][bin] = exit1;
        ops[1][bin] = exit2;
    }
    ops
}

/// Mixed-state protocol on a caller-supplied shared state: bin-tagged
/// (p, q) mixing, carrier rotation, module exit, trace over bins, Alice's
/// projection, and Bob's correction.
pub fn run_mixed_rsp_with_source<T: Scalar>(
    shared: &TwoQubitState<T>,
    spec: &TargetMixedSpec<T>,
) -> Result<[BranchResult<T>; 4]> {
    let vpr = vpr_settings_mixed(spec);
    let ops = mixed_bin_operators(&vpr);

    let mut out = Vec::with_capacity(4);
    for message in ClassicalMessage::ALL {
        let exit_ops = &ops[message.povm_bit as usize];
        let applied: Vec<Mat4<T>> = exit_ops
            .iter()
            .map(|op| {
                let k = kron(op, &Mat2::identity());
                k * *shared.mat() * k.adjoint()
            })
            .collect();
        // bins are fully distinguishable: keep only the diagonal blocks
        let mut blocks = [[Mat4::zero(); 2]; 2];
        blocks[0][0] = applied[0];
        blocks[1][1] = applied[1];
        let k0 = kron(&exit_ops[0], &Mat2::identity());
        let k1 = kron(&exit_ops[1], &Mat2::identity());
        blocks[0][1] = k0 * *shared.mat() * k1.adjoint();
        blocks[1][0] = k1 * *shared.mat() * k0.adjoint();
        let binned = TimeBinState { blocks };
        let exit_state = binned.trace_out_bins();

        let staged = branch_from_joint(&exit_state, message)?;
        out.push(correct_branch(&staged)?);
    }
    Ok([out[0], out[1], out[2], out[3]])
}

/// Mixed-state protocol on the ideal Bell source.
pub fn run_mixed_rsp<T: Scalar>(spec: &TargetMixedSpec<T>) -> Result<[BranchResult<T>; 4]> {
    run_mixed_rsp_with_source(&bell_psi_plus(), spec)
}
