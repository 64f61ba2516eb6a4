use approx::assert_relative_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rei_gates::haar::{average_fidelity_monte_carlo, random_state};
use rei_gates::lindblad::{self, GateSchedule, LindbladTerm, Segment};
use rei_gates::operator::Operator;

fn dephasing_channel(gamma: f64, t: f64) -> Operator {
    let s = GateSchedule::new(vec![Segment::ideal(t, Operator::zeros(2)).unwrap()]).unwrap();
    lindblad::channel(&s, &[LindbladTerm::new(gamma, Operator::pauli_z()).unwrap()]).unwrap()
}

#[test]
fn random_states_are_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [2, 4, 9] {
        let psi = random_state(&mut rng, d);
        assert_relative_eq!(psi.norm(), 1.0, epsilon = 1e-14);
    }
}

#[test]
fn identity_channel_has_unit_fidelity() {
    let e = Operator::identity(16);
    let est = average_fidelity_monte_carlo(&e, &Operator::identity(4), &[0, 1, 2, 3], 200, 1).unwrap();
    assert_relative_eq!(est.mean, 1.0, epsilon = 1e-13);
    assert!(est.std_error < 1e-13);
}

#[test]
fn deterministic_for_fixed_seed() {
    let e = dephasing_channel(0.2, 1.0);
    let a = average_fidelity_monte_carlo(&e, &Operator::identity(2), &[0, 1], 500, 42).unwrap();
    let b = average_fidelity_monte_carlo(&e, &Operator::identity(2), &[0, 1], 500, 42).unwrap();
    assert_eq!(a, b);
    let c = average_fidelity_monte_carlo(&e, &Operator::identity(2), &[0, 1], 500, 43).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn dephasing_average_fidelity() {
    let (gamma, t) = (0.3f64, 1.0);
    let lambda = (-2.0 * gamma * t).exp();
    let f_ent = (1.0 + lambda) / 2.0;
    let expect = (2.0 * f_ent + 1.0) / 3.0;
    let est = average_fidelity_monte_carlo(&dephasing_channel(gamma, t), &Operator::identity(2), &[0, 1], 20_000, 7)
        .unwrap();
    assert!((est.mean - expect).abs() < 5.0 * est.std_error, "{} vs {expect}", est.mean);
}

#[test]
fn rejects_bad_arguments() {
    let e = Operator::identity(4);
    assert!(average_fidelity_monte_carlo(&e, &Operator::identity(3), &[0, 1], 10, 0).is_err());
    assert!(average_fidelity_monte_carlo(&e, &Operator::identity(2), &[0, 1], 1, 0).is_err());
}
