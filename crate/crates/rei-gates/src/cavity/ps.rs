//! Photon-scattering gate.
//!
//! A single photon reflects off a cavity holding both ions; the reflection
//! phase depends on whether the ions couple to the cavity, giving a
//! controlled phase. The analytic fidelity covers the high-cooperativity
//! limit, and the numeric model follows the photon from a decaying virtual
//! source cavity cascaded into the ion cavity (Lorentzian wavepacket).
//!
//! Numeric space: `source(2) ⊗ cavity(2) ⊗ ion(3) ⊗ ion(3)`, ion levels
//! ordered `(↑, ↓, ↑′)`; `↑′` is the excited state coupled to the cavity.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lindblad::{self, GateSchedule, LindbladTerm, Segment};
use crate::operator::{KetState, Operator, C64, ONE, ZERO};
use crate::perturbation::ErrorBreakdown;
use crate::report::FidelityReport;

pub const DIMS: [usize; 4] = [2, 2, 3, 3];
pub const ION_UP: usize = 0;
pub const ION_DOWN: usize = 1;
pub const ION_EXCITED: usize = 2;
/// `↑↑, ↑↓, ↓↑, ↓↓` inside the 9-dimensional two-ion space.
pub const ION_COMPUTATIONAL: [usize; 4] = [0, 1, 3, 4];
/// Photon truncation in units of the photon lifetime.
pub const TRUNCATION_LIFETIMES: f64 = 7.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringParams {
    /// Cavity-ion coupling (rad/s).
    pub g: f64,
    /// Cavity field decay (rad/s).
    pub kappa: f64,
    /// Optical decay `↑′ → ↑` (rad/s).
    pub gamma1_up: f64,
    /// Optical decay `↑′ → ↓` (rad/s).
    pub gamma1_down: f64,
    /// Photon-cavity detuning (rad/s).
    pub delta_p: f64,
    /// Cavity-ion detunings (rad/s).
    pub delta_yb1: f64,
    pub delta_yb2: f64,
    /// Effective spin decoherence Γ used by the analytic formula (rad/s).
    pub gamma_spin: f64,
    /// Optical pure dephasing γ* (rad/s).
    pub gamma_star: f64,
    /// Ground spin relaxation `↓ → ↑` and dephasing (rad/s).
    pub gamma2: f64,
    pub gamma4: f64,
    /// Scattered photon lifetime (s); bandwidth `σ_p = 1/T₁p`.
    pub t1p: f64,
    /// Optical lifetime and coherence time (s), used by `C_eff`.
    pub t1o: f64,
    pub t2o: f64,
    pub w: f64,
    /// Replace `C` by `C_eff` in the analytic formula when `α < 0.01`.
    pub use_c_eff: bool,
}

impl Default for ScatteringParams {
    fn default() -> Self {
        let tp = 2.0 * PI;
        let gamma1 = tp * 596.0;
        let t2o = 39e-6;
        Self {
            g: tp * 23e6,
            kappa: tp * 30.7e9,
            gamma1_up: gamma1,
            gamma1_down: 0.0,
            delta_p: 0.0,
            delta_yb1: 0.0,
            delta_yb2: 0.0,
            gamma_spin: 1.0 / 31e-3,
            gamma_star: (1.0 / t2o - gamma1 / 2.0).max(0.0),
            gamma2: tp * 2.95,
            gamma4: tp * 3.6,
            t1p: 80e-6,
            t1o: 267e-6,
            t2o,
            w: 0.7,
            use_c_eff: false,
        }
    }
}

impl ScatteringParams {
    pub fn gamma1(&self) -> f64 {
        self.gamma1_up + self.gamma1_down
    }

    pub fn cooperativity(&self) -> f64 {
        super::cooperativity(self.g, self.kappa, self.gamma1())
    }

    pub fn alpha(&self) -> f64 {
        self.g / self.kappa
    }

    pub fn sigma_p(&self) -> f64 {
        1.0 / self.t1p
    }

    pub fn gate_time(&self) -> f64 {
        TRUNCATION_LIFETIMES * self.t1p
    }

    /// `C / (1 + w(T₁o/T₂o - 1))`.
    pub fn c_eff(&self) -> f64 {
        self.cooperativity() / (1.0 + self.w * (self.t1o / self.t2o - 1.0))
    }

    /// Sets γ* from an optical coherence time: `γ* = 1/T₂o - γ₁/2`.
    pub fn with_t2o(mut self, t2o: f64) -> Self {
        self.t2o = t2o;
        self.gamma_star = (1.0 / t2o - self.gamma1() / 2.0).max(0.0);
        self
    }

    /// Same ion and noise parameters at cooperativity `c` and ratio `g/κ = alpha`.
    pub fn at_cooperativity(&self, c: f64, alpha: f64) -> Self {
        let (g, kappa) = super::cavity_for(c, alpha, self.gamma1());
        Self { g, kappa, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.kappa > 0.0) {
            return Err(Error::InvalidParameter(format!("g = {}, kappa = {}", self.g, self.kappa)));
        }
        let rates = [
            self.gamma1_up,
            self.gamma1_down,
            self.gamma_spin,
            self.gamma_star,
            self.gamma2,
            self.gamma4,
        ];
        if rates.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidParameter("rates must be non-negative".into()));
        }
        if !(self.t1p > 0.0) {
            return Err(Error::InvalidParameter(format!("T1p = {}", self.t1p)));
        }
        Ok(())
    }
}

/// Coefficient of `(δ_p² + σ_p²)` in the infidelity.
fn bandwidth_coefficient(p: &ScatteringParams, c: f64) -> f64 {
    let a = p.alpha();
    (11.0 - 80.0 * a * a + 192.0 * a.powi(4)) / (4.0 * p.gamma1().powi(2) * c * c)
}

fn analytic_cooperativity(p: &ScatteringParams, rep: &mut FidelityReport) -> f64 {
    if p.use_c_eff {
        if p.alpha() < 0.01 {
            return p.c_eff();
        }
        rep.warn(format!("alpha = {:.3e} not << 1; C_eff not applied", p.alpha()));
    }
    p.cooperativity()
}

/// High-cooperativity analytic fidelity.
pub fn ps_analytic_fidelity(p: &ScatteringParams) -> Result<FidelityReport> {
    p.validate()?;
    let mut rep = FidelityReport::default();
    let c = analytic_cooperativity(p, &mut rep);
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("cooperativity {c}")));
    }
    if c < 10.0 {
        rep.warn(format!("C = {c:.2} is not >> 1"));
    }
    let g1 = p.gamma1();
    let t_c = 5.0 / (2.0 * c);
    let t_bw = (p.delta_p.powi(2) + p.sigma_p().powi(2)) * bandwidth_coefficient(p, c);
    let t_det = (p.delta_yb1 - p.delta_yb2).powi(2) / (2.0 * g1 * g1 * c);
    let t_spin = p.gamma_spin * p.gate_time();
    let eps = t_c + t_bw + t_det + t_spin;
    rep.fidelity = 1.0 - eps;
    rep.gate_time = p.gate_time();
    rep.breakdown = ErrorBreakdown::new(eps, 0.0, 0.0, 0.0);
    rep.cooperativity = Some(c);
    rep.alpha = Some(p.alpha());
    rep.term("cooperativity", t_c);
    rep.term("bandwidth", t_bw);
    rep.term("ion_detuning", t_det);
    rep.term("spin_decoherence", t_spin);
    rep.clamp_fidelity();
    Ok(rep)
}

/// Bandwidth balancing the spectral term against `Γ T_g,PS`:
/// `A(δ_p² + σ²) = 7Γ/σ`, a cubic with a single positive root.
/// With `Γ = 0` the balance sends σ to zero and `sigma_floor` is returned.
pub fn ps_optimize_bandwidth(p: &ScatteringParams, sigma_floor: f64) -> Result<(f64, FidelityReport)> {
    p.validate()?;
    let mut probe = FidelityReport::default();
    let c = analytic_cooperativity(p, &mut probe);
    let a = bandwidth_coefficient(p, c);
    let b = TRUNCATION_LIFETIMES * p.gamma_spin;
    let sigma = if p.gamma_spin == 0.0 {
        sigma_floor
    } else {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::InvalidParameter("no positive root for the bandwidth cubic".into()));
        }
        positive_cubic_root(a, a * p.delta_p * p.delta_p, b)
    };
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("bandwidth {sigma}")));
    }
    let q = ScatteringParams { t1p: 1.0 / sigma, ..p.clone() };
    let mut rep = ps_analytic_fidelity(&q)?;
    rep.warnings.extend(probe.warnings);
    Ok((sigma, rep))
}

/// Positive root of `a x³ + c x - b = 0` for `a, b > 0`, `c >= 0`.
fn positive_cubic_root(a: f64, c: f64, b: f64) -> f64 {
    let mut x = (b / a).cbrt();
    for _ in 0..100 {
        let f = a * x * x * x + c * x - b;
        let df = 3.0 * a * x * x + c;
        let dx = f / df;
        x -= dx;
        if dx.abs() <= 1e-15 * x.abs() {
            break;
        }
    }
    x
}

/// Operators of the cascaded source-cavity-ions model.
#[derive(Clone, Debug)]
pub struct Cascade {
    pub hamiltonian: Operator,
    pub terms: Vec<LindbladTerm>,
    pub initial: KetState,
    pub horizon: f64,
}

impl Cascade {
    /// Liouville-space dimension of the full model.
    pub fn liouville_dim(&self) -> usize {
        self.hamiltonian.dim().pow(2)
    }
}

fn ion_op(i: usize, j: usize) -> Operator {
    Operator::ket_bra(3, i, j)
}

fn place(op: &Operator, site: usize) -> Operator {
    Operator::embed(op, &DIMS, site).expect("site dims match")
}

/// Builds the cascade. The source cavity decays at `Γ_s = 1/T₁p` into the
/// waveguide that feeds the ion cavity; the series product gives the joint
/// output `L = √Γ_s a_s + √κ a_c` and the coupling
/// `V = (√(κΓ_s)/2i)(a_c† a_s - a_s† a_c)`.
pub fn ps_build_cascade(p: &ScatteringParams) -> Result<Cascade> {
    p.validate()?;
    let a = Operator::ket_bra(2, 0, 1);
    let a_s = place(&a, 0);
    let a_c = place(&a, 1);
    let gs = 1.0 / p.t1p;
    let mut h = a_c.dagger().matmul(&a_c)?.scale_re(p.delta_p);
    let mut sig = Vec::new();
    for (site, det) in [(2, p.delta_yb1), (3, p.delta_yb2)] {
        let s = place(&ion_op(ION_UP, ION_EXCITED), site);
        h = &h + &(&a_c.dagger() * &s).scale_re(p.g);
        h = &h + &(&s.dagger() * &a_c).scale_re(p.g);
        h = &h + &place(&ion_op(ION_EXCITED, ION_EXCITED), site).scale_re(det);
        sig.push(site);
    }
    let v = &(&a_c.dagger() * &a_s) - &(&a_s.dagger() * &a_c);
    h = &h + &v.scale(C64::new(0.0, -0.5 * (p.kappa * gs).sqrt()));
    let out = &a_s.scale_re(gs.sqrt()) + &a_c.scale_re(p.kappa.sqrt());
    let mut terms = vec![LindbladTerm::new(1.0, out)?];
    for site in sig {
        terms.push(LindbladTerm::new(p.gamma1_up, place(&ion_op(ION_UP, ION_EXCITED), site))?);
        terms.push(LindbladTerm::new(p.gamma1_down, place(&ion_op(ION_DOWN, ION_EXCITED), site))?);
        // Rate 2γ* on the projector decays the optical coherence at γ*.
        terms.push(LindbladTerm::new(
            2.0 * p.gamma_star,
            place(&ion_op(ION_EXCITED, ION_EXCITED), site),
        )?);
        terms.push(LindbladTerm::new(p.gamma2, place(&ion_op(ION_UP, ION_DOWN), site))?);
        terms.push(LindbladTerm::new(p.gamma4, place(&ion_op(ION_DOWN, ION_DOWN), site))?);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ion = KetState::from_slice(&[C64::new(s, 0.0), C64::new(s, 0.0), ZERO]);
    let initial = KetState::from_slice(&[ZERO, ONE])
        .kron(&KetState::from_slice(&[ONE, ZERO]))
        .kron(&ion)
        .kron(&ion);
    Ok(Cascade { hamiltonian: h, terms, initial, horizon: p.gate_time() })
}

/// How the photonic modes are removed from the final state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conditioning {
    /// Partial trace over source and cavity.
    Traced,
    /// Project source and cavity on vacuum and renormalize (photon fully
    /// scattered).
    Completed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericOptions {
    pub conditioning: Conditioning,
    /// Evolve the full 1296-dimensional Liouville space instead of the
    /// reachable subspace (same result, slower).
    pub full_space: bool,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self { conditioning: Conditioning::Traced, full_space: false }
    }
}

/// Final two-ion state (9 × 9, unnormalized) and the population left in the
/// photonic modes.
pub fn ps_final_ion_state(p: &ScatteringParams, opts: &NumericOptions) -> Result<(Operator, f64)> {
    let cas = ps_build_cascade(p)?;
    let s = GateSchedule::new(vec![Segment::ideal(cas.horizon, cas.hamiltonian.clone())?])?;
    let rho0 = cas.initial.to_density();
    let rho = if opts.full_space {
        lindblad::evolve(&rho0, &s, &cas.terms)?
    } else {
        lindblad::evolve_reduced(&rho0, &s, &cas.terms)?
    };
    let traced = rho.partial_trace(&DIMS, &[2, 3])?;
    let mut vac = Operator::zeros(9);
    for i in 0..9 {
        for j in 0..9 {
            vac.set(i, j, rho.get(i, j));
        }
    }
    let loss = 1.0 - vac.trace().re / traced.trace().re;
    let ion = match opts.conditioning {
        Conditioning::Traced => traced,
        Conditioning::Completed => vac.scale_re(1.0 / vac.trace().re),
    };
    Ok((ion, loss))
}

/// Target `½(|↑↑⟩ + e^{ib}|↑↓⟩ + e^{ia}|↓↑⟩ - e^{i(a+b)}|↓↓⟩)` on the
/// computational block.
fn frame_target(a: f64, b: f64) -> [C64; 4] {
    let ea = C64::from_polar(1.0, a);
    let eb = C64::from_polar(1.0, b);
    [C64::new(0.5, 0.0), eb * 0.5, ea * 0.5, -ea * eb * 0.5]
}

fn block_fidelity(rho: &Operator, t: &[C64; 4]) -> f64 {
    let mut f = ZERO;
    for (x, &i) in ION_COMPUTATIONAL.iter().enumerate() {
        for (y, &j) in ION_COMPUTATIONAL.iter().enumerate() {
            f += t[x].conj() * rho.get(i, j) * t[y];
        }
    }
    f.re
}

/// Local phases `(a, b)` maximizing the overlap with the CZ output. Each
/// coordinate update is exact because the fidelity is sinusoidal in one
/// phase at fixed other.
pub fn frame_phases(rho: &Operator) -> (f64, f64) {
    let r = |x: usize, y: usize| rho.get(ION_COMPUTATIONAL[x], ION_COMPUTATIONAL[y]);
    let (mut a, mut b) = (0.0, 0.0);
    for _ in 0..200 {
        let eb = C64::from_polar(1.0, b);
        // Indices {0,1} fixed, {2,3} carry e^{ia}(1, -e^{ib}).
        let u = [ONE, eb];
        let w = [ONE, -eb];
        let mut cross = ZERO;
        for x in 0..2 {
            for y in 0..2 {
                cross += u[x].conj() * r(x, 2 + y) * w[y];
            }
        }
        let a_new = if cross.norm() > 0.0 { -cross.arg() } else { a };
        let ea = C64::from_polar(1.0, a_new);
        // Indices {0,2} fixed, {1,3} carry e^{ib}(1, -e^{ia}).
        let u = [ONE, ea];
        let w = [ONE, -ea];
        let idx_u = [0, 2];
        let idx_w = [1, 3];
        let mut cross = ZERO;
        for x in 0..2 {
            for y in 0..2 {
                cross += u[x].conj() * r(idx_u[x], idx_w[y]) * w[y];
            }
        }
        let b_new = if cross.norm() > 0.0 { -cross.arg() } else { b };
        let done = (a_new - a).abs() < 1e-13 && (b_new - b).abs() < 1e-13;
        a = a_new;
        b = b_new;
        if done {
            break;
        }
    }
    (a, b)
}

/// Noiseless counterpart of `p`: only the waveguide and cavity channels act.
pub fn noiseless(p: &ScatteringParams) -> ScatteringParams {
    ScatteringParams {
        gamma1_up: p.gamma1_up,
        gamma1_down: p.gamma1_down,
        gamma_star: 0.0,
        gamma2: 0.0,
        gamma4: 0.0,
        ..p.clone()
    }
}

/// Fidelity of the final two-ion state with CZ applied to `|++⟩`, after
/// local phase corrections taken from the noiseless run.
pub fn ps_numeric_fidelity(p: &ScatteringParams, opts: &NumericOptions) -> Result<FidelityReport> {
    let (rho, loss) = ps_final_ion_state(p, opts)?;
    let (rho_ref, _) = ps_final_ion_state(&noiseless(p), opts)?;
    let (a, b) = frame_phases(&rho_ref);
    let f = block_fidelity(&rho, &frame_target(a, b)).clamp(0.0, 1.0);
    let mut rep = FidelityReport::new(f, p.gate_time(), ErrorBreakdown::new(1.0 - f, 0.0, 0.0, 0.0));
    rep.cooperativity = Some(p.cooperativity());
    rep.alpha = Some(p.alpha());
    rep.success_probability = Some(1.0 - loss);
    rep.term("truncation_loss", loss);
    if loss > 0.01 {
        rep.warn(format!("photon truncation loss {loss:.3e} exceeds 1%"));
    }
    Ok(rep)
}

/// Numeric fidelity maximized over the photon lifetime on a log scale in
/// `[t_min, t_max]` by golden-section search.
pub fn ps_numeric_optimized(
    p: &ScatteringParams,
    opts: &NumericOptions,
    t_min: f64,
    t_max: f64,
) -> Result<FidelityReport> {
    let eval = |lt: f64| -> Result<f64> {
        let q = ScatteringParams { t1p: lt.exp(), ..p.clone() };
        Ok(1.0 - ps_numeric_fidelity(&q, opts)?.fidelity)
    };
    let lt = crate::optim::golden_section_min(t_min.ln(), t_max.ln(), 1e-3, eval)?;
    let best = ScatteringParams { t1p: lt.exp(), ..p.clone() };
    let mut rep = ps_numeric_fidelity(&best, opts)?;
    rep.term("t1p", best.t1p);
    Ok(rep)
}
