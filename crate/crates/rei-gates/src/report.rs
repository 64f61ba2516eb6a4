use serde::Serialize;

use crate::perturbation::ErrorBreakdown;

/// Result of one fidelity evaluation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FidelityReport {
    pub fidelity: f64,
    /// Gate time in seconds.
    pub gate_time: f64,
    pub breakdown: ErrorBreakdown,
    pub entanglement_fidelity: Option<f64>,
    pub average_fidelity: Option<f64>,
    pub cooperativity: Option<f64>,
    pub alpha: Option<f64>,
    pub success_probability: Option<f64>,
    /// Scheme-specific named error contributions.
    pub terms: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl FidelityReport {
    /// A fidelity outside `[0, 1]` (a first-order estimate past its range of
    /// validity) is clamped and a warning recorded.
    pub fn new(fidelity: f64, gate_time: f64, breakdown: ErrorBreakdown) -> Self {
        let mut rep = Self { fidelity, gate_time, breakdown, ..Default::default() };
        rep.clamp_fidelity();
        rep
    }

    pub fn clamp_fidelity(&mut self) {
        let f = self.fidelity;
        if f.is_finite() && !(0.0..=1.0).contains(&f) {
            self.fidelity = f.clamp(0.0, 1.0);
            self.warn(format!("raw fidelity {f:.4e} clamped to [0, 1]"));
        }
    }

    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }

    pub fn term(&mut self, name: &str, value: f64) {
        self.terms.push((name.to_string(), value));
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}
