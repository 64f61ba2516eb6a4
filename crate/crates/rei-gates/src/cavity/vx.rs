//! Virtual-photon-exchange gate.
//!
//! Two ions couple to a far-detuned cavity mode; eliminating the mode gives
//! an exchange interaction `(g²/Δ) B†B` with `B = σ₁ + σ₂`, whose phase
//! after `T_g = πΔ/g²` is a controlled phase. Ion levels follow the
//! `(↑, ↓, ↑′, ↓′)` ordering of the dipolar gate; `↓ ↔ ↓′` is detuned by
//! `δ_eg` and stays dark in the dispersive regime.

use std::f64::consts::PI;

use crate::dipolar::{DOWN, DOWN_X, UP, UP_X};
use crate::error::{Error, Result};
use crate::lindblad::{self, GateSchedule, LindbladTerm, Segment};
use crate::operator::{state_fidelity, KetState, Operator, C64, ZERO};
use crate::perturbation::{self, ErrorBreakdown, QuadratureConfig};
use crate::report::FidelityReport;

#[derive(Clone, Debug, PartialEq)]
pub struct VirtualExchangeParams {
    /// Cavity coupling and decay (rad/s).
    pub g: f64,
    pub kappa: f64,
    /// Cavity-ion detuning Δ (rad/s).
    pub delta: f64,
    /// Splitting that keeps `↓ ↔ ↓′` off resonance (rad/s).
    pub delta_eg: f64,
    pub gamma1: f64,
    pub gamma_star: f64,
    pub gamma5: f64,
    /// Cavity Fock truncation for the exact model.
    pub fock_levels: usize,
}

impl VirtualExchangeParams {
    /// Parameter set with `κ/g = 10`, `γ₁ = γ* = 10⁻⁴ g`, `γ₅ = 10⁻⁵ g`,
    /// `δ_eg = 100 g` at the given `Δ/g`.
    pub fn reference(g: f64, delta_over_g: f64) -> Self {
        Self {
            g,
            kappa: 10.0 * g,
            delta: delta_over_g * g,
            delta_eg: 100.0 * g,
            gamma1: 1e-4 * g,
            gamma_star: 1e-4 * g,
            gamma5: 1e-5 * g,
            fock_levels: 2,
        }
    }

    pub fn cooperativity(&self) -> f64 {
        super::cooperativity(self.g, self.kappa, self.gamma1)
    }

    pub fn gate_time(&self) -> f64 {
        PI * self.delta / (self.g * self.g)
    }

    /// Detuning with `2Δ = κ√C`.
    pub fn optimal_delta(&self) -> f64 {
        0.5 * self.kappa * self.cooperativity().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.kappa >= 0.0 && self.delta > 0.0) {
            return Err(Error::InvalidParameter("need g > 0, kappa >= 0, delta > 0".into()));
        }
        if [self.gamma1, self.gamma_star, self.gamma5].iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidParameter("rates must be non-negative".into()));
        }
        if self.fock_levels < 2 {
            return Err(Error::InvalidParameter("need at least two Fock levels".into()));
        }
        Ok(())
    }

    /// Warnings for `δ_eg ≥ 10Δ` and `Δ ≥ 10g`.
    pub fn hierarchy_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.delta_eg < 10.0 * self.delta {
            w.push(format!("delta_eg/delta = {:.2} < 10", self.delta_eg / self.delta));
        }
        if self.delta < 10.0 * self.g {
            w.push(format!("delta/g = {:.2} < 10", self.delta / self.g));
        }
        w
    }
}

/// Closed-form first-order terms:
/// `ε_L = πκ/(2Δ) + T_g γ₅ + (21/32) T_g γ*`, `ε_H = 2πΔ/(Cκ)`.
pub fn vx_perturbative_fidelity(p: &VirtualExchangeParams) -> Result<FidelityReport> {
    p.validate()?;
    let t_g = p.gate_time();
    let eps_l = PI * p.kappa / (2.0 * p.delta) + t_g * p.gamma5 + 21.0 / 32.0 * t_g * p.gamma_star;
    let eps_h = if p.gamma1 > 0.0 {
        2.0 * PI * p.delta / (p.cooperativity() * p.kappa)
    } else {
        0.0
    };
    let b = ErrorBreakdown::new(eps_l, eps_h, 0.0, 0.0);
    let mut rep = FidelityReport::new(b.fidelity(), t_g, b);
    rep.cooperativity = Some(p.cooperativity());
    rep.alpha = Some(p.g / p.kappa);
    for w in p.hierarchy_warnings() {
        rep.warn(w);
    }
    Ok(rep)
}

fn lvl(i: usize, j: usize) -> Operator {
    Operator::ket_bra(4, i, j)
}

fn ion_ket(a: usize, b: usize) -> KetState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = [ZERO; 4];
    v[a] = C64::new(s, 0.0);
    v[b] = C64::new(s, 0.0);
    KetState::from_slice(&v)
}

/// Ion 1 in `(|↑′⟩ + |↓⟩)/√2`, ion 2 in `(|↑⟩ + |↓⟩)/√2`.
pub fn vx_initial_ions() -> KetState {
    ion_ket(UP_X, DOWN).kron(&ion_ket(UP, DOWN))
}

/// Ideal output `½(|↑′↑⟩ - |↑′↓⟩ + |↓↑⟩ + |↓↓⟩)`.
pub fn vx_target_ions() -> KetState {
    let mut v = vec![ZERO; 16];
    let h = C64::new(0.5, 0.0);
    v[4 * UP_X + UP] = h;
    v[4 * UP_X + DOWN] = -h;
    v[4 * DOWN + UP] = h;
    v[4 * DOWN + DOWN] = h;
    KetState::from_slice(&v)
}

fn dephasing_ops() -> (Operator, Operator) {
    let pe = &lvl(UP_X, UP_X) + &lvl(DOWN_X, DOWN_X);
    let z = &(&lvl(UP, UP) + &lvl(UP_X, UP_X)) - &(&lvl(DOWN, DOWN) + &lvl(DOWN_X, DOWN_X));
    (pe, z)
}

/// Adiabatically eliminated ion-only model: `H_g = (g²/Δ)B†B`, the cavity
/// loss as the collapse `√κ (g/Δ) B`, optical decay as the non-Hermitian
/// `H̃_e = -(i/2)γ₁ Σ P_e`, plus optical and spin dephasing.
pub fn vx_effective_model(p: &VirtualExchangeParams) -> Result<(GateSchedule, Vec<LindbladTerm>)> {
    p.validate()?;
    let id = Operator::identity(4);
    let s = lvl(UP, UP_X);
    let b = &s.kron(&id) + &id.kron(&s);
    let h_g = (&b.dagger() * &b).scale_re(p.g * p.g / p.delta);
    let (pe, z) = dephasing_ops();
    let pe_tot = &pe.kron(&id) + &id.kron(&pe);
    let h_e = pe_tot.scale(C64::new(0.0, -0.5 * p.gamma1));
    let schedule = GateSchedule::new(vec![Segment::new(p.gate_time(), h_g, h_e, 1.0)?])?;
    let mut terms = vec![LindbladTerm::new(p.kappa, b.scale_re(p.g / p.delta))?];
    for site in 0..2 {
        let place = |op: &Operator| if site == 0 { op.kron(&id) } else { id.kron(op) };
        terms.push(LindbladTerm::new(2.0 * p.gamma_star, place(&pe))?);
        terms.push(LindbladTerm::new(0.5 * p.gamma5, place(&z))?);
    }
    Ok((schedule, terms))
}

/// First-order terms evaluated numerically on the eliminated model.
pub fn vx_perturbative_numeric(p: &VirtualExchangeParams, quad: &QuadratureConfig) -> Result<FidelityReport> {
    let (s, terms) = vx_effective_model(p)?;
    let psi0 = vx_initial_ions();
    let eps_l = perturbation::eps_l_first_order(&s, &psi0, &terms, quad)?;
    let eps_h = perturbation::eps_h_first_order_nonhermitian(&s, &psi0, quad)?;
    let b = ErrorBreakdown::new(eps_l, eps_h, 0.0, 0.0);
    let mut rep = FidelityReport::new(b.fidelity(), p.gate_time(), b);
    rep.cooperativity = Some(p.cooperativity());
    Ok(rep)
}

/// Exact master equation of ion ⊗ ion ⊗ cavity over `T_g`; the cavity is
/// traced out and the ions compared with the ideal output.
pub fn vx_exact_fidelity(p: &VirtualExchangeParams) -> Result<FidelityReport> {
    p.validate()?;
    let nf = p.fock_levels;
    let id4 = Operator::identity(4);
    let mut a = Operator::zeros(nf);
    for n in 1..nf {
        a.set(n - 1, n, C64::new((n as f64).sqrt(), 0.0));
    }
    let dims = [4, 4, nf];
    let big_a = Operator::kron_all(&[&id4, &id4, &a]);
    let mut h = (&big_a.dagger() * &big_a).scale_re(-p.delta);
    let (pe, z) = dephasing_ops();
    let mut terms = vec![LindbladTerm::new(p.kappa, big_a.clone())?];
    for site in 0..2 {
        let place = |op: &Operator| Operator::embed(op, &dims, site);
        h = &h + &place(&lvl(DOWN_X, DOWN_X))?.scale_re(p.delta_eg);
        for s in [lvl(UP, UP_X), lvl(DOWN, DOWN_X)] {
            let sp = place(&s)?;
            h = &h + &(&big_a.dagger() * &sp).scale_re(p.g);
            h = &h + &(&sp.dagger() * &big_a).scale_re(p.g);
            terms.push(LindbladTerm::new(p.gamma1, sp)?);
        }
        terms.push(LindbladTerm::new(2.0 * p.gamma_star, place(&pe)?)?);
        terms.push(LindbladTerm::new(0.5 * p.gamma5, place(&z)?)?);
    }
    let vac = KetState::basis(nf, 0);
    let psi0 = vx_initial_ions().kron(&vac);
    let s = GateSchedule::new(vec![Segment::ideal(p.gate_time(), h)?])?;
    let rho = lindblad::evolve_reduced(&psi0.to_density(), &s, &terms)?;
    let ions = rho.partial_trace(&dims, &[0, 1])?;
    let f = state_fidelity(&vx_target_ions(), &ions)?;
    let cav = rho.partial_trace(&dims, &[2])?;
    let top = cav.get(nf - 1, nf - 1).re;
    let mut rep = FidelityReport::new(f, p.gate_time(), ErrorBreakdown::new(1.0 - f, 0.0, 0.0, 0.0));
    rep.cooperativity = Some(p.cooperativity());
    rep.alpha = Some(p.g / p.kappa);
    rep.term("top_fock_occupancy", top);
    if top > 1e-3 {
        rep.warn(format!("cavity Fock level {} holds {top:.2e}", nf - 1));
    }
    if p.g == 0.0 {
        rep.warn("no coupling: no gate executed");
    }
    for w in p.hierarchy_warnings() {
        rep.warn(w);
    }
    Ok(rep)
}
