use approx::assert_relative_eq;
use proptest::prelude::*;
use rei_gates::lindblad::{self, pure_density, GateSchedule, LindbladTerm, Segment, Subspace};
use rei_gates::operator::{KetState, Operator, C64, ONE, ZERO};
use rei_gates::Error;

fn max_diff(a: &Operator, b: &Operator) -> f64 {
    (a - b).as_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn single(duration: f64, h: Operator) -> GateSchedule {
    GateSchedule::new(vec![Segment::ideal(duration, h).unwrap()]).unwrap()
}

#[test]
fn amplitude_damping_matches_exponential() {
    let gamma = 0.7;
    let t = 1.3;
    let lower = Operator::ket_bra(2, 0, 1);
    let terms = [LindbladTerm::new(gamma, lower).unwrap()];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rho0 = pure_density(&[C64::new(s, 0.0), C64::new(s, 0.0)]);
    let rho = lindblad::evolve(&rho0, &single(t, Operator::zeros(2)), &terms).unwrap();
    assert_relative_eq!(rho.get(1, 1).re, 0.5 * (-gamma * t).exp(), epsilon = 1e-13);
    assert_relative_eq!(rho.get(0, 1).re, 0.5 * (-gamma * t / 2.0).exp(), epsilon = 1e-13);
    assert_relative_eq!(rho.trace().re, 1.0, epsilon = 1e-13);
}

#[test]
fn pauli_dephasing_decays_coherence_at_twice_the_rate() {
    let gamma = 0.4;
    let t = 0.9;
    let terms = [LindbladTerm::new(gamma, Operator::pauli_z()).unwrap()];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rho0 = pure_density(&[C64::new(s, 0.0), C64::new(s, 0.0)]);
    let rho = lindblad::evolve(&rho0, &single(t, Operator::zeros(2)), &terms).unwrap();
    assert_relative_eq!(rho.get(0, 1).re, 0.5 * (-2.0 * gamma * t).exp(), epsilon = 1e-13);
    assert_relative_eq!(rho.get(0, 0).re, 0.5, epsilon = 1e-13);
}

#[test]
fn rabi_oscillation() {
    let omega = 2.0;
    let h = Operator::pauli_x().scale_re(omega / 2.0);
    for t in [0.1, 0.8, 2.5] {
        let rho = lindblad::evolve(&KetState::basis(2, 0).to_density(), &single(t, h.clone()), &[]).unwrap();
        assert_relative_eq!(rho.get(1, 1).re, (omega * t / 2.0).sin().powi(2), epsilon = 1e-12);
    }
}

#[test]
fn non_hermitian_hamiltonian_loses_norm() {
    let g = 0.6;
    let t = 1.5;
    let h = Operator::ket_bra(2, 1, 1).scale(C64::new(0.0, -g / 2.0));
    let rho = lindblad::evolve(&KetState::basis(2, 1).to_density(), &single(t, h), &[]).unwrap();
    assert_relative_eq!(rho.trace().re, (-g * t).exp(), epsilon = 1e-13);
}

#[test]
fn column_stacking_convention() {
    let rho = Operator::ket_bra(2, 0, 1);
    let v = lindblad::vec(&rho);
    assert_eq!(v[2], ONE);
    assert_eq!(v.iter().filter(|z| **z != ZERO).count(), 1);
    assert_eq!(lindblad::unvec(&v, 2).unwrap(), rho);
    assert!(lindblad::unvec(&v, 3).is_err());
}

#[test]
fn channel_agrees_with_evolve() {
    let h1 = Operator::pauli_x().scale_re(0.8);
    let h2 = Operator::pauli_z().scale_re(-0.3);
    let s = GateSchedule::new(vec![Segment::ideal(0.7, h1).unwrap(), Segment::ideal(1.1, h2).unwrap()]).unwrap();
    let terms = [LindbladTerm::new(0.2, Operator::ket_bra(2, 0, 1)).unwrap()];
    let rho0 = pure_density(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
    let e = lindblad::channel(&s, &terms).unwrap();
    let a = lindblad::apply_channel(&e, &rho0).unwrap();
    let b = lindblad::evolve(&rho0, &s, &terms).unwrap();
    assert!(max_diff(&a, &b) < 1e-14);
}

#[test]
fn schedule_validation() {
    assert!(Segment::ideal(0.0, Operator::identity(2)).is_err());
    assert!(Segment::ideal(f64::NAN, Operator::identity(2)).is_err());
    assert!(matches!(
        Segment::new(1.0, Operator::identity(2), Operator::identity(3), 1.0),
        Err(Error::Dimension(_))
    ));
    assert!(GateSchedule::new(vec![]).is_err());
    let mixed = vec![Segment::ideal(1.0, Operator::identity(2)).unwrap(), Segment::ideal(1.0, Operator::identity(3)).unwrap()];
    assert!(GateSchedule::new(mixed).is_err());
    assert!(LindbladTerm::new(-1.0, Operator::identity(2)).is_err());
}

#[test]
fn ideal_propagator_composes_and_checks_range() {
    let s = GateSchedule::new(vec![
        Segment::ideal(0.5, Operator::pauli_x()).unwrap(),
        Segment::ideal(0.8, Operator::pauli_y()).unwrap(),
    ])
    .unwrap();
    let full = s.ideal_propagator(1.3, 0.0).unwrap();
    let split = &s.ideal_propagator(1.3, 0.9).unwrap() * &s.ideal_propagator(0.9, 0.0).unwrap();
    assert!(max_diff(&full, &split) < 1e-14);
    assert!(matches!(s.ideal_propagator(2.0, 0.0), Err(Error::TimeOutOfRange { .. })));
    assert!(s.ideal_propagator(0.2, 0.4).is_err());
    assert_eq!(s.starts(), &[0.0, 0.5]);
}

#[test]
fn subspace_closure() {
    let hop = &Operator::ket_bra(4, 1, 0) + &Operator::ket_bra(4, 0, 1);
    let sub = Subspace::reachable(&[hop], &[0], 4);
    assert_eq!(sub.indices(), &[0, 1]);
    let op = Operator::ket_bra(4, 1, 0);
    assert_eq!(sub.embed(&sub.restrict(&op)), op);
}

#[test]
fn dimension_mismatch_in_evolve() {
    let s = single(1.0, Operator::zeros(2));
    assert!(lindblad::evolve(&Operator::identity(3), &s, &[]).is_err());
    let t = [LindbladTerm::new(1.0, Operator::identity(3)).unwrap()];
    assert!(lindblad::evolve(&Operator::identity(2), &s, &t).is_err());
}

fn random_op(d: usize, vals: &[f64], sparsity: &[bool]) -> Operator {
    let mut m = Operator::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let k = i * d + j;
            if sparsity[k] {
                m.set(i, j, C64::new(vals[2 * k], vals[2 * k + 1]));
            }
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_preserving_and_positive(
        vals in prop::collection::vec(-1.0f64..1.0, 72),
        rates in prop::collection::vec(0.0f64..2.0, 2),
        t in 0.05f64..3.0,
    ) {
        let d = 3;
        let dense = vec![true; 9];
        let h0 = random_op(d, &vals[0..18], &dense);
        let h = (&h0 + &h0.dagger()).scale_re(0.5);
        let l1 = random_op(d, &vals[18..36], &dense);
        let l2 = random_op(d, &vals[36..54], &dense);
        let terms = [LindbladTerm::new(rates[0], l1).unwrap(), LindbladTerm::new(rates[1], l2).unwrap()];
        let psi = KetState::from_slice(&[C64::new(vals[54], vals[55]), C64::new(vals[56], 0.1), C64::new(0.3, vals[57])]).normalized();
        let rho = lindblad::evolve(&psi.to_density(), &single(t, h), &terms).unwrap();
        prop_assert!((rho.trace() - ONE).norm() < 1e-10);
        prop_assert!(rho.is_hermitian(1e-10));
        prop_assert!(rho.min_eigenvalue_hermitian() > -1e-10);
    }

    #[test]
    fn reduced_evolution_is_exact(
        vals in prop::collection::vec(-1.0f64..1.0, 108),
        mask in prop::collection::vec(prop::bool::weighted(0.25), 36),
        t in 0.1f64..2.0,
    ) {
        let d = 6;
        let h0 = random_op(d, &vals[0..72], &mask);
        let h = (&h0 + &h0.dagger()).scale_re(0.5);
        let mut lmask = vec![false; 36];
        lmask[1] = true;
        lmask[14] = true;
        let l = random_op(d, &vals[36..108], &lmask);
        let terms = [LindbladTerm::new(0.5, l).unwrap()];
        let rho0 = KetState::basis(d, 0).to_density();
        let s = single(t, h);
        let full = lindblad::evolve(&rho0, &s, &terms).unwrap();
        let red = lindblad::evolve_reduced(&rho0, &s, &terms).unwrap();
        prop_assert!(max_diff(&full, &red) < 1e-12);
    }
}
