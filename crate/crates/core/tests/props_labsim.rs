//! Property suite for the stochastic layer: CHSH bounds, Werner linearity,
//! sampling consistency and reproducibility.

mod common;

use rand::Rng;

use rsp_core::noise::{
    chsh_analytic, chsh_sampled, sample_shots, werner_state, ChshSettings, DEFAULT_SEED,
};

use common::{random_two_qubit_state, rng};

#[test]
fn werner_chsh_is_linear_on_a_grid() {
    let settings = ChshSettings::default();
    let s1 = chsh_analytic(&werner_state(1.0).unwrap(), &settings);
    for k in 0..=20 {
        let v = k as f64 / 20.0;
        let s = chsh_analytic(&werner_state(v).unwrap(), &settings);
        assert!((s - v * s1).abs() <= 1e-12, "v = {v}");
    }
}

#[test]
fn tsirelson_bound_holds_on_random_states_and_settings() {
    let tsirelson = 2.0 * std::f64::consts::SQRT_2;
    let mut rng = rng(0x7517);
    for _ in 0..200 {
        let rho = random_two_qubit_state(&mut rng);
        let settings = ChshSettings {
            alice: [
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random_range(0.0..std::f64::consts::PI),
            ],
            bob: [
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random_range(0.0..std::f64::consts::PI),
            ],
        };
        let s = chsh_analytic(&rho, &settings);
        assert!(s.abs() <= tsirelson + 1e-10, "S = {s}");
    }
}

#[test]
fn sampled_frequencies_converge_to_probabilities() {
    let p = [0.15f64, 0.35, 0.1, 0.4];
    let n = 100_000u64;
    let record = sample_shots(&p, n, DEFAULT_SEED).unwrap();
    for (freq, want) in record.frequencies::<f64>().iter().zip(p.iter()) {
        let sigma3 = 3.0 * (want * (1.0 - want) / n as f64).sqrt();
        assert!((freq - want).abs() <= sigma3, "freq {freq} vs {want}");
    }
}

#[test]
fn sampled_chsh_is_reproducible_and_near_analytic() {
    let rho = werner_state(0.9f64).unwrap();
    let settings = ChshSettings::default();
    let a = chsh_sampled(&rho, &settings, 200_000, DEFAULT_SEED).unwrap();
    let b = chsh_sampled(&rho, &settings, 200_000, DEFAULT_SEED).unwrap();
    assert_eq!(a.correlators, b.correlators);
    let analytic = chsh_analytic(&rho, &settings);
    assert!(
        (a.s - analytic).abs() <= 4.0 * a.stderr,
        "sampled {} vs analytic {analytic} (stderr {})",
        a.s,
        a.stderr
    );
}
