//! Photon-interference gate: two-photon heralded entanglement converted to
//! a controlled-Z by a measurement in a basis unbiased to photon number.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::operator::C64;
use crate::perturbation::ErrorBreakdown;
use crate::report::FidelityReport;

#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceParams {
    /// Total optical decay rate γ₁ = γ₁r + γ₁nr (rad/s).
    pub gamma1: f64,
    /// Radiative part of γ₁ (rad/s).
    pub gamma1r: f64,
    /// Optical pure dephasing γ* (rad/s).
    pub gamma_star: f64,
    /// Optical detuning between the two ions (rad/s).
    pub delta_omega: f64,
    /// Cavity coupling and decay (rad/s); `None` means no cavity.
    pub cavity: Option<(f64, f64)>,
}

impl InterferenceParams {
    /// Bulk ions, γ* from the optical coherence time: `γ* = 1/T₂o - γ₁/2`.
    pub fn bulk_from_t2o(gamma1: f64, t2o: f64) -> Self {
        Self {
            gamma1,
            gamma1r: gamma1,
            gamma_star: (1.0 / t2o - gamma1 / 2.0).max(0.0),
            delta_omega: 0.0,
            cavity: None,
        }
    }

    pub fn with_cavity(mut self, g: f64, kappa: f64) -> Self {
        self.cavity = Some((g, kappa));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let v = [self.gamma1, self.gamma1r, self.gamma_star];
        if v.iter().any(|x| !(*x >= 0.0)) || self.gamma1r > self.gamma1 * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(
                "need 0 <= gamma1r <= gamma1 and non-negative rates".into(),
            ));
        }
        if let Some((g, k)) = self.cavity {
            if !(g >= 0.0 && k > 0.0) {
                return Err(Error::InvalidParameter(format!("cavity g = {g}, kappa = {k}")));
            }
        }
        Ok(())
    }
}

/// Two-photon interference visibility formula.
fn visibility_fidelity(gamma1: f64, gamma_star: f64, delta_omega: f64) -> f64 {
    if gamma1 == 0.0 {
        return 0.5;
    }
    0.5 * (1.0 + gamma1 * gamma1 / ((gamma1 + 2.0 * gamma_star).powi(2) + delta_omega.powi(2)))
}

/// `R = 4g²(κ+γ₁+2γ*)/((κ+γ₁+2γ*)² + 4Δω²)`.
pub fn purcell_rate(p: &InterferenceParams, g: f64, kappa: f64) -> f64 {
    let s = kappa + p.gamma1 + 2.0 * p.gamma_star;
    4.0 * g * g * s / (s * s + 4.0 * p.delta_omega.powi(2))
}

/// `F_p = Rκ/(γ₁r(κ + R))`.
pub fn purcell_factor(p: &InterferenceParams, g: f64, kappa: f64) -> f64 {
    let r = purcell_rate(p, g, kappa);
    r * kappa / (p.gamma1r * (kappa + r))
}

/// Enhanced decay `γ₁′ = γ₁r F_p + γ₁`, computed without dividing by γ₁r.
pub fn enhanced_decay(p: &InterferenceParams) -> f64 {
    match p.cavity {
        None => p.gamma1,
        Some((g, kappa)) => {
            let r = purcell_rate(p, g, kappa);
            p.gamma1 + r * kappa / (kappa + r)
        }
    }
}

pub fn pi_fidelity(p: &InterferenceParams) -> Result<FidelityReport> {
    p.validate()?;
    let g1 = enhanced_decay(p);
    let f = visibility_fidelity(g1, p.gamma_star, p.delta_omega);
    // Two emission windows of 7 photon lifetimes each.
    let t_g = if g1 > 0.0 { 14.0 / g1 } else { f64::INFINITY };
    let mut rep = FidelityReport::new(f, t_g, ErrorBreakdown::new(1.0 - f, 0.0, 0.0, 0.0));
    rep.success_probability = Some(0.5);
    rep.term("enhanced_decay", g1);
    if let Some((g, kappa)) = p.cavity {
        rep.cooperativity = Some(super::cooperativity(g, kappa, p.gamma1));
        rep.alpha = Some(g / kappa);
        if p.gamma1r > 0.0 {
            rep.term("purcell_factor", purcell_factor(p, g, kappa));
        }
    }
    Ok(rep)
}

/// Effective two-qubit operator after the unbiased-basis measurement with
/// phase settings φ₁..φ₄.
#[derive(Clone, Debug, PartialEq)]
pub struct MubResult {
    pub diagonal: [C64; 4],
    pub is_cz: bool,
}

pub fn pi_mub_cz_check(phases: [f64; 4]) -> MubResult {
    let diagonal = phases.map(|p| C64::from_polar(1.0, -p));
    let reference = diagonal[0];
    let cz = [1.0, 1.0, 1.0, -1.0];
    let is_cz = diagonal
        .iter()
        .zip(cz)
        .all(|(d, c)| (d / reference - C64::new(c, 0.0)).norm() < 1e-9);
    MubResult { diagonal, is_cz }
}

/// Phase settings that give CZ.
pub const MUB_CZ_PHASES: [f64; 4] = [0.0, 0.0, 0.0, PI];
