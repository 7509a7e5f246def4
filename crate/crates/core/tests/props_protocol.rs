//! Property suite for the pure and mixed preparation protocols.
//! Exact math only; the ideal Bell source, no sampling.

mod common;

use rsp_core::protocol::{
    correction_for, run_mixed_rsp, run_pure_rsp, run_pure_rsp_with_source, ClassicalMessage,
};
use rsp_core::state::{
    bell_psi_plus, fidelity, purity, target_mixed, target_pure, Pauli,
};

use common::{random_mixed_spec, random_pure_spec, random_two_qubit_state, rng};

#[test]
fn pure_protocol_hits_target_on_every_branch() {
    let mut rng = rng(0x2217);
    for _ in 0..300 {
        let spec = random_pure_spec(&mut rng);
        let target = target_pure(&spec).density();
        let mut total = 0.0;
        for b in run_pure_rsp(&spec).unwrap() {
            assert!((b.probability - 0.25).abs() <= 1e-10);
            total += b.probability;
            let f = fidelity(&b.bob_post.unwrap(), &target);
            assert!(f >= 1.0 - 1e-10, "branch {}: fidelity {f}", b.message.label());
        }
        assert!((total - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn mixed_protocol_hits_target_with_expected_purity() {
    let mut rng = rng(0x2218);
    for _ in 0..200 {
        let spec = random_mixed_spec(&mut rng);
        let target = target_mixed(&spec);
        let want_purity = spec.p().powi(4) + spec.q().powi(4);
        let mut total = 0.0;
        for b in run_mixed_rsp(&spec).unwrap() {
            total += b.probability;
            let post = b.bob_post.unwrap();
            let f = fidelity(&post, &target);
            assert!(f >= 1.0 - 1e-10, "branch {}: fidelity {f}", b.message.label());
            assert!((purity(&post) - want_purity).abs() <= 1e-10);
        }
        assert!((total - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn message_is_exactly_two_bits_and_correction_is_total() {
    // four distinct messages, each with a defined correction
    let mut seen = std::collections::HashSet::new();
    for msg in ClassicalMessage::ALL {
        assert!(msg.povm_bit <= 1 && msg.proj_bit <= 1);
        seen.insert((msg.povm_bit, msg.proj_bit));
        let _ = correction_for(msg);
    }
    assert_eq!(seen.len(), 4);
    assert!(ClassicalMessage::new(2, 0).is_err());

    // the four corrections cover all four Paulis
    let ops: std::collections::HashSet<_> =
        ClassicalMessage::ALL.iter().map(|m| correction_for(*m).op).collect();
    assert_eq!(ops.len(), 4);
    assert!(ops.contains(&Pauli::I));
}

#[test]
fn swapped_corrections_miss_generic_targets() {
    let mut rng = rng(0x2219);
    let spec = random_pure_spec(&mut rng);
    let target = target_pure(&spec).density();
    let branches = run_pure_rsp(&spec).unwrap();
    // applying branch j's correction to branch k's pre-state (j ≠ k) must
    // not reproduce the target for a generic spec
    let mut wrong_hits = 0;
    for j in 0..4 {
        for k in 0..4 {
            if j == k {
                continue;
            }
            let c = correction_for(branches[j].message).matrix::<f64>();
            let pre = branches[k].bob_pre.unwrap();
            let post = pre.conjugated_by(&c).unwrap();
            if fidelity(&post, &target) > 1.0 - 1e-6 {
                wrong_hits += 1;
            }
        }
    }
    assert_eq!(wrong_hits, 0, "a wrong correction reproduced the target");
}

#[test]
fn protocol_accepts_arbitrary_noisy_sources() {
    let mut rng = rng(0x221A);
    for _ in 0..100 {
        let spec = random_pure_spec(&mut rng);
        let shared = random_two_qubit_state(&mut rng);
        let branches = run_pure_rsp_with_source(&shared, &spec).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() <= 1e-10);
        for b in branches {
            if let Some(post) = b.bob_post {
                // any conditional output is still a physical state
                assert!(purity(&post) <= 1.0 + 1e-10);
            }
        }
    }
}

#[test]
fn determinism_claim_is_specific_to_the_bell_source() {
    // on the ideal source all four branch states coincide with the target;
    // a generic noisy source breaks at least one branch
    let mut rng = rng(0x221B);
    let spec = random_pure_spec(&mut rng);
    let target = target_pure(&spec).density();

    let ideal = run_pure_rsp_with_source(&bell_psi_plus(), &spec).unwrap();
    assert!(ideal
        .iter()
        .all(|b| fidelity(&b.bob_post.unwrap(), &target) >= 1.0 - 1e-10));

    let noisy = rsp_core::noise::werner_state(0.6).unwrap();
    let degraded = run_pure_rsp_with_source(&noisy, &spec).unwrap();
    assert!(degraded
        .iter()
        .any(|b| fidelity(&b.bob_post.unwrap(), &target) < 0.95));
}
