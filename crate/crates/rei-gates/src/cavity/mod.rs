//! Cavity-mediated gates: photon scattering, photon interference and
//! virtual photon exchange.

pub mod pi;
pub mod ps;
pub mod vx;

/// `C = 4g²/(κγ₁)`.
pub fn cooperativity(g: f64, kappa: f64, gamma1: f64) -> f64 {
    4.0 * g * g / (kappa * gamma1)
}

/// `(g, κ)` realizing cooperativity `c` at fixed ratio `alpha = g/κ`.
pub fn cavity_for(c: f64, alpha: f64, gamma1: f64) -> (f64, f64) {
    let kappa = c * gamma1 / (4.0 * alpha * alpha);
    (alpha * kappa, kappa)
}
