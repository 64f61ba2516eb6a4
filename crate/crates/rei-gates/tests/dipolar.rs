use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rei_gates::dipolar::{self, DipolarParams, ExactOptions, COMPUTATIONAL};
use rei_gates::perturbation::QuadratureConfig;

const MU0: f64 = 1.25663706212e-6;
const MU_B: f64 = 9.2740100783e-24;
const HBAR: f64 = 1.054571817e-34;

#[test]
fn couplings_from_constants() {
    let p = DipolarParams::default();
    let c = dipolar::couplings_from_params(&p).unwrap();
    let j_par = MU0 * (MU_B * 2.51f64).powi(2) / (8.0 * PI * 1e-24 * HBAR);
    assert_relative_eq!(c.j_par, j_par, max_relative = 1e-8);
    assert_relative_eq!(c.j_par / c.j_x, 2.0 * 2.51f64.powi(2) / 1.7f64.powi(2), max_relative = 1e-12);
    assert_eq!(c.j_x, c.j_y);
    assert_relative_eq!(c.t_int, PI / (4.0 * c.j_par), max_relative = 1e-15);
    assert_relative_eq!(c.t_g, 2.0 * PI / p.omega + c.t_int, max_relative = 1e-15);
}

#[test]
fn coupling_scales_as_inverse_cube() {
    let a = dipolar::couplings_from_params(&DipolarParams::at_separation(5e-9)).unwrap();
    let b = dipolar::couplings_from_params(&DipolarParams::at_separation(10e-9)).unwrap();
    assert_relative_eq!(a.j_par / b.j_par, 8.0, max_relative = 1e-12);
}

#[test]
fn reference_fidelities_and_gate_times() {
    for (r, f, tg) in [(5e-9, 0.95, 1.0e-6), (10e-9, 0.90, 3.68e-6)] {
        let rep = dipolar::md_closed_form_fidelity(&DipolarParams::at_separation(r)).unwrap();
        assert!((rep.fidelity - f).abs() < 0.01, "r = {r}: {}", rep.fidelity);
        assert!((rep.gate_time - tg).abs() < 0.05 * tg, "r = {r}: {}", rep.gate_time);
    }
}

#[test]
fn transverse_coefficient_value() {
    let a = (32.0 * (2.0 - 2f64.sqrt()) - PI * PI) / 64.0;
    assert_relative_eq!(dipolar::transverse_coefficient(), a);
    assert!((a - 0.1387).abs() < 5e-5);
}

#[test]
fn closed_form_decoherence_matches_schedule_integral() {
    let quad = QuadratureConfig::default();
    let p = DipolarParams { g_perp: 0.0, ..Default::default() };
    let c = dipolar::couplings_from_params(&p).unwrap();
    let b = dipolar::md_perturbative_breakdown(&p, &quad).unwrap();
    assert_relative_eq!(b.eps_l1, dipolar::md_eps_l_closed(&p, &c), max_relative = 1e-6);
    assert!(b.eps_hh2.abs() < 1e-15);
}

#[test]
fn noiseless_longitudinal_gate_is_perfect() {
    let mut p = DipolarParams::default().noiseless();
    p.g_perp = 0.0;
    let rep = dipolar::md_closed_form_fidelity(&p).unwrap();
    assert_relative_eq!(rep.fidelity, 1.0, epsilon = 1e-15);
    let ex = dipolar::md_exact_fidelity(&p, &ExactOptions::schedule_only()).unwrap();
    assert_relative_eq!(ex.fidelity, 1.0, epsilon = 1e-10);
    assert_relative_eq!(dipolar::md_cz_frame_check(&DipolarParams::default()).unwrap(), 1.0, epsilon = 1e-9);
}

#[test]
fn exact_oracle_close_to_closed_form_at_short_range() {
    let p = DipolarParams::at_separation(5e-9);
    let cf = dipolar::md_closed_form_fidelity(&p).unwrap().fidelity;
    let ex = dipolar::md_exact_fidelity(&p, &ExactOptions::schedule_only()).unwrap().fidelity;
    assert!((cf - ex).abs() < 0.01, "{cf} vs {ex}");
}

#[test]
fn channel_trace_and_leakage() {
    let p = DipolarParams::at_separation(5e-9);
    let (e, u) = dipolar::md_exact_channel(&p, &ExactOptions::schedule_only()).unwrap();
    let leak = dipolar::leakage(&e, &COMPUTATIONAL, 16).unwrap();
    assert!((0.0..0.1).contains(&leak));
    let f = dipolar::exact_entanglement_fidelity(&e, &u, &COMPUTATIONAL).unwrap();
    assert!(f > 0.8 && f < 1.0);
    let (id, _) = dipolar::md_exact_channel(&p.noiseless(), &ExactOptions::schedule_only()).unwrap();
    assert!(dipolar::leakage(&id, &COMPUTATIONAL, 16).unwrap().abs() < 1e-10);
}

#[test]
fn validity_check_and_off_resonance() {
    let p = DipolarParams::default();
    let v = dipolar::md_validity_check(&p).unwrap();
    assert_eq!(v.valid, v.norm_times_t_act <= dipolar::VALIDITY_THRESHOLD);
    let rep = dipolar::md_closed_form_fidelity(&p).unwrap();
    assert_eq!(rep.warnings.is_empty(), v.valid);
    assert!(dipolar::off_resonant_error(&p) < 1e-60);
    let near = DipolarParams { delta_s: p.omega, ..p };
    assert_relative_eq!(dipolar::off_resonant_error(&near), (-PI / 2.0).exp());
}

#[test]
fn rejects_invalid_parameters() {
    assert!(dipolar::couplings_from_params(&DipolarParams::at_separation(0.0)).is_err());
    let p = DipolarParams { gamma2: -1.0, ..Default::default() };
    assert!(dipolar::md_closed_form_fidelity(&p).is_err());
    let p = DipolarParams { g_par: 0.0, ..Default::default() };
    assert!(dipolar::build_md_schedule(&p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decoherence_linear_in_rates(k in 0.1f64..10.0, r in 3e-9f64..30e-9) {
        let p = DipolarParams::at_separation(r);
        let q = DipolarParams {
            gamma1_up: k * p.gamma1_up,
            gamma1_down: k * p.gamma1_down,
            gamma2: k * p.gamma2,
            gamma3: k * p.gamma3,
            gamma4: k * p.gamma4,
            gamma5: k * p.gamma5,
            ..p.clone()
        };
        let c = dipolar::couplings_from_params(&p).unwrap();
        let a = dipolar::md_eps_l_closed(&p, &c);
        prop_assert!((dipolar::md_eps_l_closed(&q, &c) - k * a).abs() <= 1e-12 * k * a);
    }

    #[test]
    fn transverse_error_independent_of_separation(r in 1e-9f64..100e-9) {
        let c = dipolar::couplings_from_params(&DipolarParams::at_separation(r)).unwrap();
        let expect = dipolar::transverse_coefficient() * (1.7f64.powi(2) / 2.51f64.powi(2)).powi(2);
        prop_assert!((dipolar::md_eps_hh_closed(&c) - expect).abs() < 1e-12);
    }
}
