//! Magnetic dipole-dipole phase gate between two ions.
//!
//! Each ion has four levels ordered `(↑, ↓, ↑′, ↓′)`: the passive qubit
//! `{↑, ↓}` and the active (optically excited) qubit `{↑′, ↓′}`. The
//! two-ion index is `4·i₁ + i₂`. A π pulse maps the passive qubit onto the
//! active one, the two active spins interact for `T_int = π/(4 J_∥)`, and a
//! second π pulse maps back.

use std::f64::consts::PI;

use crate::consts::{HBAR, MU0, MU_B};
use crate::error::{Error, Result};
use crate::lindblad::{self, GateSchedule, LindbladTerm, Segment};
use crate::operator::{hermitian_spectral_norm, state_fidelity, KetState, Operator, C64, I, ONE, ZERO};
use crate::perturbation::{self, ErrorBreakdown, QuadratureConfig};
use crate::report::FidelityReport;

pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const UP_X: usize = 2;
pub const DOWN_X: usize = 3;

/// Computational basis `↑↑, ↑↓, ↓↑, ↓↓` in the 16-dimensional space.
pub const COMPUTATIONAL: [usize; 4] = [0, 1, 4, 5];

/// Second-order transverse coefficient `(32(2 - √2) - π²)/64`.
pub fn transverse_coefficient() -> f64 {
    (32.0 * (2.0 - 2f64.sqrt()) - PI * PI) / 64.0
}

/// Single-qubit gate infidelity quoted for the passive qubit.
pub const SINGLE_QUBIT_INFIDELITY: f64 = 1.5e-6;

/// Threshold on `‖H_int‖ T_act` above which the schedule is flagged.
pub const VALIDITY_THRESHOLD: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct DipolarParams {
    /// Ion separation (m).
    pub r: f64,
    pub g_par: f64,
    pub g_perp: f64,
    /// Rabi frequency of the activation pulses (rad/s).
    pub omega: f64,
    /// Optical decay of `↑′` and `↓′` (rad/s).
    pub gamma1_up: f64,
    pub gamma1_down: f64,
    /// Passive spin relaxation `↓ → ↑` (rad/s).
    pub gamma2: f64,
    /// Active spin relaxation `↓′ → ↑′` (rad/s).
    pub gamma3: f64,
    /// Passive spin dephasing (rad/s).
    pub gamma4: f64,
    /// Active spin dephasing (rad/s).
    pub gamma5: f64,
    /// Hyperfine splitting used for the off-resonance guard (rad/s).
    pub delta_s: f64,
}

impl Default for DipolarParams {
    fn default() -> Self {
        let tp = 2.0 * PI;
        let omega = 1e7;
        Self {
            r: 10e-9,
            g_par: 2.51,
            g_perp: 1.7,
            omega,
            gamma1_up: tp * 596.0,
            gamma1_down: tp * 596.0,
            gamma2: tp * 2.95,
            gamma3: tp * 2.95,
            gamma4: tp * 3.6,
            gamma5: tp * 4.5e3,
            delta_s: 10.0 * omega,
        }
    }
}

impl DipolarParams {
    pub fn at_separation(r: f64) -> Self {
        Self { r, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(Error::InvalidParameter(format!("separation r = {}", self.r)));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidParameter(format!("Rabi frequency {}", self.omega)));
        }
        let rates = [
            self.gamma1_up,
            self.gamma1_down,
            self.gamma2,
            self.gamma3,
            self.gamma4,
            self.gamma5,
        ];
        if rates.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidParameter("rates must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// Same parameters with every decoherence rate set to zero.
    pub fn noiseless(&self) -> Self {
        Self {
            gamma1_up: 0.0,
            gamma1_down: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma4: 0.0,
            gamma5: 0.0,
            ..self.clone()
        }
    }
}

/// Couplings in rad/s and the gate timing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DipolarCouplings {
    pub j_par: f64,
    pub j_x: f64,
    pub j_y: f64,
    pub t_act: f64,
    pub t_int: f64,
    pub t_g: f64,
}

pub fn couplings_from_params(p: &DipolarParams) -> Result<DipolarCouplings> {
    p.validate()?;
    let r3 = p.r.powi(3);
    let j_par = MU0 * (MU_B * p.g_par).powi(2) / (8.0 * PI * r3 * HBAR);
    let j_perp = MU0 * (MU_B * p.g_perp).powi(2) / (16.0 * PI * r3 * HBAR);
    let t_act = PI / p.omega;
    let t_int = if j_par > 0.0 { PI / (4.0 * j_par) } else { f64::INFINITY };
    Ok(DipolarCouplings { j_par, j_x: j_perp, j_y: j_perp, t_act, t_int, t_g: 2.0 * t_act + t_int })
}

fn level(i: usize, j: usize) -> Operator {
    Operator::ket_bra(4, i, j)
}

fn two(a: &Operator, b: &Operator) -> Operator {
    a.kron(b)
}

fn on_each(op: &Operator) -> [Operator; 2] {
    let id = Operator::identity(4);
    [two(op, &id), two(&id, op)]
}

/// Pauli operators on the active qubit, zero on the passive levels.
fn active_paulis() -> (Operator, Operator, Operator) {
    let z = &level(UP_X, UP_X) - &level(DOWN_X, DOWN_X);
    let x = &level(UP_X, DOWN_X) + &level(DOWN_X, UP_X);
    let y = &level(UP_X, DOWN_X).scale(-I) + &level(DOWN_X, UP_X).scale(I);
    (x, y, z)
}

/// `H_I = -J_∥ Z⊗Z` on the active qubits.
pub fn interaction_ideal(c: &DipolarCouplings) -> Operator {
    let (_, _, z) = active_paulis();
    two(&z, &z).scale_re(-c.j_par)
}

/// `H_e = J_x X⊗X + J_y Y⊗Y` on the active qubits.
pub fn interaction_transverse(c: &DipolarCouplings) -> Operator {
    let (x, y, _) = active_paulis();
    &two(&x, &x).scale_re(c.j_x) + &two(&y, &y).scale_re(c.j_y)
}

/// Rotating-frame activation Hamiltonian driving `↑↔↑′` and `↓↔↓′` at Ω.
pub fn activation_hamiltonian(p: &DipolarParams) -> Operator {
    let h1 = &(&level(UP_X, UP) + &level(UP, UP_X)) + &(&level(DOWN_X, DOWN) + &level(DOWN, DOWN_X));
    let h1 = h1.scale_re(0.5 * p.omega);
    let [a, b] = on_each(&h1);
    &a + &b
}

/// Activation, interaction (with transverse part as the δ = 1 perturbation),
/// deactivation.
pub fn build_md_schedule(p: &DipolarParams) -> Result<(GateSchedule, Vec<LindbladTerm>)> {
    let c = couplings_from_params(p)?;
    if !c.t_int.is_finite() {
        return Err(Error::InvalidParameter("zero longitudinal coupling".into()));
    }
    let hp = activation_hamiltonian(p);
    let schedule = GateSchedule::new(vec![
        Segment::ideal(c.t_act, hp.clone())?,
        Segment::new(c.t_int, interaction_ideal(&c), interaction_transverse(&c), 1.0)?,
        Segment::ideal(c.t_act, hp)?,
    ])?;
    Ok((schedule, md_lindblad_terms(p)?))
}

/// Six collapse channels per ion.
pub fn md_lindblad_terms(p: &DipolarParams) -> Result<Vec<LindbladTerm>> {
    let singles = [
        (p.gamma1_up, level(UP, UP_X)),
        (p.gamma1_down, level(DOWN, DOWN_X)),
        (p.gamma2, level(UP, DOWN)),
        (p.gamma3, level(UP_X, DOWN_X)),
        (p.gamma4, (&level(DOWN, DOWN) - &level(UP, UP)).scale_re(0.5)),
        (p.gamma5, (&level(DOWN_X, DOWN_X) - &level(UP_X, UP_X)).scale_re(0.5)),
    ];
    let mut terms = Vec::with_capacity(12);
    for (g, op) in singles.iter() {
        for o in on_each(op) {
            terms.push(LindbladTerm::new(*g, o)?);
        }
    }
    Ok(terms)
}

/// `(|↑⟩ + |↓⟩)/√2` on both ions.
pub fn md_initial_state() -> KetState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = [ZERO; 4];
    v[UP] = C64::new(s, 0.0);
    v[DOWN] = C64::new(s, 0.0);
    let one = KetState::from_slice(&v);
    one.kron(&one)
}

/// Closed-form first-order decoherence term.
pub fn md_eps_l_closed(p: &DipolarParams, c: &DipolarCouplings) -> f64 {
    let g1 = p.gamma1_up + p.gamma1_down;
    c.t_act * (7.0 / 8.0 * g1 + 13.0 / 16.0 * (p.gamma2 + p.gamma3) + 0.5 * (p.gamma4 + p.gamma5))
        + c.t_int * (g1 + 0.75 * p.gamma3 + 0.5 * p.gamma5)
}

/// Closed-form transverse term `a (J_x + J_y)² / J_∥²`.
pub fn md_eps_hh_closed(c: &DipolarCouplings) -> f64 {
    transverse_coefficient() * (c.j_x + c.j_y).powi(2) / c.j_par.powi(2)
}

pub fn md_closed_form_fidelity(p: &DipolarParams) -> Result<FidelityReport> {
    let c = couplings_from_params(p)?;
    let b = ErrorBreakdown::new(md_eps_l_closed(p, &c), 0.0, md_eps_hh_closed(&c), 0.0);
    let mut rep = FidelityReport::new(b.fidelity(), c.t_g, b);
    let v = md_validity_check(p)?;
    if v.turning_point_warning {
        rep.warn(format!(
            "|H_int| T_act = {:.3} exceeds {VALIDITY_THRESHOLD}; closed form unreliable",
            v.norm_times_t_act
        ));
    }
    Ok(rep)
}

/// Perturbative terms evaluated numerically on the schedule.
pub fn md_perturbative_breakdown(p: &DipolarParams, quad: &QuadratureConfig) -> Result<ErrorBreakdown> {
    let (s, terms) = build_md_schedule(p)?;
    perturbation::error_breakdown(&s, &md_initial_state(), &terms, quad)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validity {
    pub valid: bool,
    pub turning_point_warning: bool,
    pub norm_times_t_act: f64,
}

/// Flags schedules where the interaction acts appreciably during the pulses.
pub fn md_validity_check(p: &DipolarParams) -> Result<Validity> {
    let c = couplings_from_params(p)?;
    let h = &interaction_ideal(&c) + &interaction_transverse(&c);
    let x = hermitian_spectral_norm(&h) * c.t_act;
    let warn = x > VALIDITY_THRESHOLD;
    Ok(Validity { valid: !warn, turning_point_warning: warn, norm_times_t_act: x })
}

/// Probability of exciting the wrong hyperfine transition.
pub fn off_resonant_error(p: &DipolarParams) -> f64 {
    (-(PI / 2.0) * (p.delta_s / p.omega).powi(2)).exp()
}

/// Options for the exact master-equation oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactOptions {
    /// Keep `H_I + H_e` switched on during the activation pulses.
    pub interaction_during_activation: bool,
    /// Rescale `T_int` to maximize the noiseless fidelity before adding noise.
    pub calibrate_interaction_time: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { interaction_during_activation: true, calibrate_interaction_time: true }
    }
}

impl ExactOptions {
    /// Ideal-schedule channel: interaction off during the pulses.
    pub fn schedule_only() -> Self {
        Self { interaction_during_activation: false, calibrate_interaction_time: false }
    }
}

#[derive(Clone, Debug)]
pub struct ExactResult {
    pub fidelity: f64,
    /// Factor applied to `T_int`.
    pub t_int_scale: f64,
    pub gate_time: f64,
}

fn exact_schedule(p: &DipolarParams, opts: &ExactOptions, scale: f64) -> Result<GateSchedule> {
    let c = couplings_from_params(p)?;
    let hint = &interaction_ideal(&c) + &interaction_transverse(&c);
    let hp = activation_hamiltonian(p);
    let hact = if opts.interaction_during_activation { &hp + &hint } else { hp };
    GateSchedule::new(vec![
        Segment::ideal(c.t_act, hact.clone())?,
        Segment::ideal(c.t_int * scale, hint)?,
        Segment::ideal(c.t_act, hact)?,
    ])
}

fn ideal_output(p: &DipolarParams) -> Result<KetState> {
    let (s, _) = build_md_schedule(p)?;
    s.ideal_propagator(s.gate_time(), 0.0)?.apply(&md_initial_state())
}

fn noiseless_fidelity(p: &DipolarParams, opts: &ExactOptions, scale: f64, target: &KetState) -> Result<f64> {
    let s = exact_schedule(p, opts, scale)?;
    let psi = s.ideal_propagator(s.gate_time(), 0.0)?.apply(&md_initial_state())?;
    Ok(target.inner(&psi).norm_sqr())
}

/// Calibrated `T_int` scale factor in (0, 1.5].
pub fn calibrate_interaction_time(p: &DipolarParams, opts: &ExactOptions) -> Result<f64> {
    let target = ideal_output(p)?;
    let f = |s: f64| noiseless_fidelity(p, opts, s, &target).map(|v| -v);
    crate::optim::golden_section_min(1e-6, 1.5, 1e-7, f)
}

/// State fidelity from the full 16-level master equation.
pub fn md_exact_fidelity(p: &DipolarParams, opts: &ExactOptions) -> Result<ExactResult> {
    let scale = if opts.calibrate_interaction_time { calibrate_interaction_time(p, opts)? } else { 1.0 };
    let s = exact_schedule(p, opts, scale)?;
    let terms = md_lindblad_terms(p)?;
    let rho0 = md_initial_state().to_density();
    let rho = lindblad::evolve(&rho0, &s, &terms)?;
    let fidelity = state_fidelity(&ideal_output(p)?, &rho)?;
    Ok(ExactResult { fidelity, t_int_scale: scale, gate_time: s.gate_time() })
}

/// Column-stacked superoperator of the gate and the ideal unitary.
pub fn md_exact_channel(p: &DipolarParams, opts: &ExactOptions) -> Result<(Operator, Operator)> {
    let scale = if opts.calibrate_interaction_time { calibrate_interaction_time(p, opts)? } else { 1.0 };
    let s = exact_schedule(p, opts, scale)?;
    let e = lindblad::channel(&s, &md_lindblad_terms(p)?)?;
    let (ideal, _) = build_md_schedule(p)?;
    Ok((e, ideal.ideal_propagator(ideal.gate_time(), 0.0)?))
}

/// Entanglement fidelity of a channel against a unitary on a four-state
/// register: `(1/16) Σ_ij ⟨U c_i| E(|c_i⟩⟨c_j|) |U c_j⟩`.
pub fn exact_entanglement_fidelity(channel: &Operator, target: &Operator, comp: &[usize]) -> Result<f64> {
    let d = target.dim();
    let n = comp.len();
    let mut f = ZERO;
    for &i in comp {
        let ui = target.apply(&KetState::basis(d, i))?;
        for &j in comp {
            let uj = target.apply(&KetState::basis(d, j))?;
            let out = lindblad::apply_channel(channel, &Operator::ket_bra(d, i, j))?;
            let v = out.apply(&uj)?;
            f += ui.inner(&v);
        }
    }
    Ok(f.re / (n * n) as f64)
}

/// Population that leaves the computational register when the register is
/// maximally mixed.
pub fn leakage(channel: &Operator, comp: &[usize], d: usize) -> Result<f64> {
    let mut rho = Operator::zeros(d);
    for &c in comp {
        rho.set(c, c, C64::new(1.0 / comp.len() as f64, 0.0));
    }
    let out = lindblad::apply_channel(channel, &rho)?;
    Ok(1.0 - comp.iter().map(|&c| out.get(c, c).re).sum::<f64>())
}

/// Average gate fidelity from the perturbative entanglement fidelity.
pub fn md_average_fidelity(p: &DipolarParams, quad: &QuadratureConfig) -> Result<f64> {
    let (s, terms) = build_md_schedule(p)?;
    let f_ent = perturbation::entanglement_fidelity(&s, &terms, quad, &COMPUTATIONAL)?;
    perturbation::average_gate_fidelity(f_ent.clamp(0.0, 1.0), 4)
}

/// `|tr(CZ† (√Z⊗√Z) U)|/4` for the noiseless, purely longitudinal gate.
pub fn md_cz_frame_check(p: &DipolarParams) -> Result<f64> {
    let mut q = p.noiseless();
    q.g_perp = 0.0;
    let (s, _) = build_md_schedule(&q)?;
    let u = s.ideal_propagator(s.gate_time(), 0.0)?;
    let sqrt_z = [ONE, I, I, -ONE];
    let cz = [ONE, ONE, ONE, -ONE];
    let mut tr = ZERO;
    for (k, &c) in COMPUTATIONAL.iter().enumerate() {
        tr += cz[k].conj() * sqrt_z[k] * u.get(c, c);
    }
    Ok(tr.norm() / 4.0)
}
