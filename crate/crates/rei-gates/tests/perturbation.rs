use approx::assert_relative_eq;
use proptest::prelude::*;
use rei_gates::lindblad::{GateSchedule, LindbladTerm, Segment};
use rei_gates::operator::{KetState, Operator, C64};
use rei_gates::perturbation::{self, average_gate_fidelity, QuadratureConfig};
use rei_gates::quadrature::GaussLegendre;
use rei_gates::sweep::{log_log_slope, order_scaling};

fn plus() -> KetState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    KetState::from_slice(&[C64::new(s, 0.0), C64::new(s, 0.0)])
}

fn idle(t: f64) -> GateSchedule {
    GateSchedule::new(vec![Segment::ideal(t, Operator::zeros(2)).unwrap()]).unwrap()
}

#[test]
fn gauss_legendre_exact_for_polynomials() {
    for n in [1, 2, 5, 16, 40] {
        let gl = GaussLegendre::new(n);
        assert_relative_eq!(gl.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
        let k = 2 * n as i32 - 1;
        let exact = (2f64.powi(k + 1) - 1.0) / (k + 1) as f64;
        assert_relative_eq!(gl.integrate(1.0, 2.0, |x| x.powi(k)), exact, max_relative = 1e-12);
    }
    let gl = GaussLegendre::new(20);
    assert_relative_eq!(gl.integrate(0.0, std::f64::consts::PI, f64::sin), 2.0, epsilon = 1e-14);
}

#[test]
fn decoherence_term_for_amplitude_damping() {
    let quad = QuadratureConfig::default();
    let (gamma, t) = (0.3, 2.0);
    let terms = [LindbladTerm::new(gamma, Operator::ket_bra(2, 0, 1)).unwrap()];
    let e1 = perturbation::eps_l_first_order(&idle(t), &KetState::basis(2, 1), &terms, &quad).unwrap();
    assert_relative_eq!(e1, gamma * t, epsilon = 1e-13);
    let ep = perturbation::eps_l_first_order(&idle(t), &plus(), &terms, &quad).unwrap();
    assert_relative_eq!(ep, gamma * t / 4.0, epsilon = 1e-13);
}

#[test]
fn non_hermitian_loss_term() {
    let quad = QuadratureConfig::default();
    let (g, t) = (0.8, 1.5);
    let he = Operator::ket_bra(2, 1, 1).scale(C64::new(0.0, -g / 2.0));
    let s = GateSchedule::new(vec![Segment::new(t, Operator::zeros(2), he, 1.0).unwrap()]).unwrap();
    let e = perturbation::eps_h_first_order_nonhermitian(&s, &plus(), &quad).unwrap();
    assert_relative_eq!(e, g * t / 2.0, epsilon = 1e-13);
}

#[test]
fn static_coherent_error_second_order() {
    let quad = QuadratureConfig::default();
    let (delta, t) = (0.01, 3.0);
    let s = GateSchedule::new(vec![Segment::new(t, Operator::zeros(2), Operator::pauli_x(), delta).unwrap()]).unwrap();
    let psi = KetState::basis(2, 0);
    let hh = perturbation::eps_hh_second_order(&s, &psi, &quad).unwrap();
    assert_relative_eq!(hh, (delta * t).powi(2), max_relative = 1e-12);
    assert!(perturbation::eps_h_first_order_nonhermitian(&s, &psi, &quad).unwrap().abs() < 1e-15);
    let b = perturbation::error_breakdown(&s, &psi, &[], &quad).unwrap();
    let x = delta * t;
    assert_relative_eq!(b.fidelity() - x.cos().powi(2), -x.powi(4) / 3.0, epsilon = 1e-10);
}

#[test]
fn coherent_error_commuting_with_state_is_free() {
    let quad = QuadratureConfig::default();
    let s = GateSchedule::new(vec![Segment::new(2.0, Operator::pauli_z(), Operator::pauli_z(), 0.1).unwrap()]).unwrap();
    let hh = perturbation::eps_hh_second_order(&s, &KetState::basis(2, 1), &quad).unwrap();
    assert!(hh.abs() < 1e-15);
}

#[test]
fn expectation_along_rabi_trajectory() {
    let s = GateSchedule::new(vec![Segment::ideal(2.0, Operator::pauli_x().scale_re(0.5)).unwrap()]).unwrap();
    let psi = KetState::basis(2, 0);
    for t in [0.0, 0.7, 2.0] {
        let z = perturbation::expectation_trajectory(&s, &psi, &Operator::pauli_z(), t).unwrap();
        assert_relative_eq!(z.re, t.cos(), epsilon = 1e-13);
    }
    assert!(perturbation::expectation_trajectory(&s, &psi, &Operator::pauli_z(), 2.5).is_err());
}

#[test]
fn entanglement_fidelity_of_dephased_idle() {
    let quad = QuadratureConfig::default();
    let (gamma, t) = (0.01, 1.0);
    let z1 = Operator::embed(&Operator::pauli_z(), &[2, 2], 0).unwrap();
    let terms = [LindbladTerm::new(gamma, z1).unwrap()];
    let s = GateSchedule::new(vec![Segment::ideal(t, Operator::zeros(4)).unwrap()]).unwrap();
    let b = perturbation::entanglement_breakdown(&s, &terms, &quad, &[0, 1, 2, 3]).unwrap();
    assert_relative_eq!(b.eps_l1, gamma * t, epsilon = 1e-14);
}

#[test]
fn average_fidelity_conversion() {
    assert_relative_eq!(average_gate_fidelity(1.0, 4).unwrap(), 1.0);
    assert_relative_eq!(average_gate_fidelity(0.9, 4).unwrap(), 0.92);
    assert!(average_gate_fidelity(1.2, 4).is_err());
    assert!(average_gate_fidelity(0.9, 1).is_err());
    assert!(QuadratureConfig::new(4, 1e-8).is_err());
    assert!(QuadratureConfig::new(16, 0.0).is_err());
}

#[test]
fn slope_of_power_law() {
    let x = [1.0, 2.0, 4.0, 8.0];
    let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(2)).collect();
    assert_relative_eq!(log_log_slope(&x, &y), 2.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn expansion_orders_on_random_models(seed in 100u64..10_000, four in any::<bool>()) {
        let d = if four { 4 } else { 2 };
        let (lin, slope, eh, ratio) = order_scaling(seed, d).unwrap();
        prop_assert!(lin < 1e-10);
        prop_assert!(slope > 1.9);
        prop_assert!(eh < 1e-12);
        prop_assert!((ratio - 4.0).abs() < 1e-8);
    }
}
