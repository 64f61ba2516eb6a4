use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::cavity::{pi, ps, vx};
use crate::dipolar::{self, DipolarParams, ExactOptions};
use crate::error::{Error, Result};
use crate::lindblad::{self, GateSchedule, LindbladTerm, Segment};
use crate::operator::{hermitian_spectral_norm, state_fidelity, KetState, Operator, C64};
use crate::perturbation::{self, QuadratureConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Perturbation,
    Md,
    Vx,
    Ps,
    Pi,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Perturbation, Suite::Md, Suite::Vx, Suite::Ps, Suite::Pi];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Perturbation => "perturbation",
            Suite::Md => "md",
            Suite::Vx => "vx",
            Suite::Ps => "ps",
            Suite::Pi => "pi",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub expected: String,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: (value - target).abs() <= tol,
            value,
            expected: format!("{target:e} +/- {tol:e}"),
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: value <= bound, value, expected: format!("<= {bound:e}") }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), passed: value >= bound, value, expected: format!(">= {bound:e}") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One `PASS`/`FAIL` line per check.
    pub fn to_text(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}/{} value={:.6e} expected {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    self.suite,
                    c.name,
                    c.value,
                    c.expected
                )
            })
            .collect()
    }
}

pub fn run_validation(suite: Suite) -> Result<ValidationReport> {
    let checks = match suite {
        Suite::Perturbation => perturbation_suite(20)?,
        Suite::Md => md_suite()?,
        Suite::Vx => vx_suite()?,
        Suite::Ps => ps_suite()?,
        Suite::Pi => pi_suite()?,
    };
    Ok(ValidationReport { suite, checks })
}

/// Random two-segment model in dimension `d`: ideal Hamiltonians of
/// spectral norm 1, a perturbation of norm 1 and two collapse operators of
/// unit Frobenius norm.
#[derive(Clone, Debug)]
pub struct RandomModel {
    pub schedule: GateSchedule,
    pub terms: Vec<LindbladTerm>,
    pub psi0: KetState,
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> Operator {
    let mut m = Operator::zeros(d);
    for i in 0..d {
        for j in 0..d {
            m.set(i, j, C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        }
    }
    m
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> Operator {
    let m = random_matrix(rng, d);
    let h = (&m + &m.dagger()).scale_re(0.5);
    let n = hermitian_spectral_norm(&h);
    h.scale_re(1.0 / n)
}

impl RandomModel {
    /// `hermitian_error` selects a Hermitian or general perturbation.
    pub fn generate(seed: u64, d: usize, hermitian_error: bool) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut segments = Vec::new();
        for _ in 0..2 {
            let h = random_hermitian(&mut rng, d);
            let v = if hermitian_error {
                random_hermitian(&mut rng, d)
            } else {
                let m = random_matrix(&mut rng, d);
                m.scale_re(1.0 / m.frobenius_norm())
            };
            segments.push(Segment::new(1.0, h, v, 0.05)?);
        }
        let mut terms = Vec::new();
        for _ in 0..2 {
            let l = random_matrix(&mut rng, d);
            let rate = 0.01 * (0.5 + rng.random::<f64>());
            terms.push(LindbladTerm::new(rate, l.scale_re(1.0 / l.frobenius_norm()))?);
        }
        let psi0 = crate::haar::random_state(&mut rng, d);
        Ok(Self { schedule: GateSchedule::new(segments)?, terms, psi0 })
    }

    /// Schedule with the perturbation removed.
    pub fn ideal_schedule(&self) -> Result<GateSchedule> {
        let segs = self
            .schedule
            .segments()
            .iter()
            .map(|s| Segment::ideal(s.duration, s.h_ideal.clone()))
            .collect::<Result<Vec<_>>>()?;
        GateSchedule::new(segs)
    }

    /// `1 - ⟨ψ_ideal|ρ|ψ_ideal⟩` from the exact master equation with the
    /// decoherence rates scaled by `lambda` and no coherent error.
    pub fn exact_decoherence_error(&self, lambda: f64) -> Result<f64> {
        let s = self.ideal_schedule()?;
        let terms = self.terms.iter().map(|t| t.scaled(lambda)).collect::<Result<Vec<_>>>()?;
        let rho = lindblad::evolve(&self.psi0.to_density(), &s, &terms)?;
        let u = s.ideal_propagator(s.gate_time(), 0.0)?;
        Ok(1.0 - state_fidelity(&u.apply(&self.psi0)?, &rho)?)
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Order-scaling properties of one random model:
/// `(linearity error of ε_L, residual slope, |ε_H| for Hermitian V, ε_HH(2δ)/ε_HH(δ))`.
pub fn order_scaling(seed: u64, d: usize) -> Result<(f64, f64, f64, f64)> {
    let quad = QuadratureConfig::default();
    let m = RandomModel::generate(seed, d, true)?;
    let e1 = perturbation::eps_l_first_order(&m.schedule, &m.psi0, &m.terms, &quad)?;
    let scaled = m.terms.iter().map(|t| t.scaled(3.0)).collect::<Result<Vec<_>>>()?;
    let e3 = perturbation::eps_l_first_order(&m.schedule, &m.psi0, &scaled, &quad)?;
    let linearity = (e3 - 3.0 * e1).abs() / e1.abs().max(f64::MIN_POSITIVE);

    let lambdas = [0.25, 0.5, 1.0, 2.0];
    let mut resid = Vec::new();
    for &l in &lambdas {
        resid.push((m.exact_decoherence_error(l)? - l * e1).abs());
    }
    let slope = log_log_slope(&lambdas, &resid);

    let eh = perturbation::eps_h_first_order_nonhermitian(&m.schedule, &m.psi0, &quad)?.abs();
    let hh1 = perturbation::eps_hh_second_order(&m.schedule, &m.psi0, &quad)?;
    let hh2 = perturbation::eps_hh_second_order(&m.schedule.with_delta_scaled(2.0), &m.psi0, &quad)?;
    Ok((linearity, slope, eh, hh2 / hh1))
}

fn perturbation_suite(instances: u64) -> Result<Vec<Check>> {
    let mut worst = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    for seed in 0..instances {
        let d = if seed % 2 == 0 { 2 } else { 4 };
        let (lin, slope, eh, ratio) = order_scaling(seed, d)?;
        worst.0 = worst.0.max(lin);
        worst.1 = worst.1.min(slope);
        worst.2 = worst.2.max(eh);
        worst.3 = worst.3.max((ratio - 4.0).abs());
    }
    Ok(vec![
        Check::at_most("eps_l linear in rates (relative deviation)", worst.0, 1e-10),
        Check::at_least("residual log-log slope", worst.1, 1.9),
        Check::at_most("eps_h vanishes for Hermitian perturbation", worst.2, 1e-12),
        Check::at_most("eps_hh ratio under delta -> 2 delta minus 4", worst.3, 1e-8),
    ])
}

fn md_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (r, f, tg) in [(5e-9, 0.95, 1.0e-6), (10e-9, 0.90, 3.68e-6)] {
        let rep = dipolar::md_closed_form_fidelity(&DipolarParams::at_separation(r))?;
        let nm = r * 1e9;
        checks.push(Check::within(format!("closed-form fidelity r={nm}nm"), rep.fidelity, f, 0.01));
        checks.push(Check::within(format!("gate time r={nm}nm"), rep.gate_time, tg, 0.05 * tg));
    }
    let c = dipolar::couplings_from_params(&DipolarParams::default())?;
    checks.push(Check::within("J_par/J_perp", c.j_par / c.j_x, 4.35, 0.05));
    checks.push(Check::within("transverse coefficient a", dipolar::transverse_coefficient(), 0.1387, 5e-5));
    checks.push(Check::within("transverse error r=10nm", dipolar::md_eps_hh_closed(&c), 0.029, 0.001));
    let mut worst = 0.0f64;
    for i in 0..8 {
        let p = DipolarParams::at_separation((5.0 + i as f64) * 1e-9);
        let cf = dipolar::md_closed_form_fidelity(&p)?.fidelity;
        let ex = dipolar::md_exact_fidelity(&p, &ExactOptions::schedule_only())?.fidelity;
        worst = worst.max((cf - ex).abs());
    }
    checks.push(Check::at_most("closed form vs exact schedule, r=5..12nm", worst, 0.01));
    checks.push(Check::within("CZ frame check", dipolar::md_cz_frame_check(&DipolarParams::default())?, 1.0, 1e-9));
    Ok(checks)
}

fn vx_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let quad = QuadratureConfig::default();
    let p = vx::VirtualExchangeParams::reference(1.0, 200.0);
    let cf = vx::vx_perturbative_fidelity(&p)?;
    let nm = vx::vx_perturbative_numeric(&p, &quad)?;
    checks.push(Check::within("eliminated model vs closed form", nm.fidelity, cf.fidelity, 1e-8));
    let mut q = p.clone();
    q.delta = q.optimal_delta();
    let eh = vx::vx_perturbative_fidelity(&q)?.breakdown.eps_h1;
    let target = PI / q.cooperativity().sqrt();
    checks.push(Check::within("eps_h = pi/sqrt(C) at optimal detuning", eh, target, 1e-12 * target));
    let mut worst = 0.0f64;
    for dg in [50.0, 100.0, 200.0, 400.0, 800.0] {
        let p = vx::VirtualExchangeParams::reference(1.0, dg);
        let ex = vx::vx_exact_fidelity(&p)?.fidelity;
        if ex > 0.8 {
            worst = worst.max((vx::vx_perturbative_fidelity(&p)?.fidelity - ex).abs());
        }
    }
    checks.push(Check::at_most("perturbative vs exact where F_exact > 0.8", worst, 0.01));
    Ok(checks)
}

/// Numeric PS infidelity at cooperativity `c` with the photon lifetime
/// tied to `C`: `T₁p = 3·10⁵/(γ₁ C)`, all ground and optical dephasing off.
pub fn ps_gamma_free_infidelity(c: f64) -> Result<f64> {
    let base = ps::ScatteringParams { gamma2: 0.0, gamma4: 0.0, gamma_star: 0.0, ..Default::default() };
    let mut p = base.at_cooperativity(c, base.alpha());
    p.t1p = 3e5 / (p.gamma1() * c);
    let opts = ps::NumericOptions { conditioning: ps::Conditioning::Completed, full_space: false };
    Ok(1.0 - ps::ps_numeric_fidelity(&p, &opts)?.fidelity)
}

/// Numeric PS infidelity at `c`, optimized over the photon lifetime, with
/// ground dephasing `gamma4` as the only spin noise.
pub fn ps_gamma_dominated_infidelity(c: f64, gamma4: f64) -> Result<f64> {
    let base = ps::ScatteringParams { gamma2: 0.0, gamma4, gamma_star: 0.0, ..Default::default() };
    let p = base.at_cooperativity(c, base.alpha());
    let opts = ps::NumericOptions { conditioning: ps::Conditioning::Completed, full_space: false };
    Ok(1.0 - ps::ps_numeric_optimized(&p, &opts, 1e-7, 1e-1)?.fidelity)
}

fn ps_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let star = ps::ps_numeric_fidelity(&ps::ScatteringParams::default(), &ps::NumericOptions::default())?;
    checks.push(Check::within("star-parameter numeric fidelity", star.fidelity, 0.8, 0.03));
    let cs = [100.0, 300.0, 1000.0, 3000.0, 10000.0];
    let eps = cs.iter().map(|&c| ps_gamma_free_infidelity(c)).collect::<Result<Vec<_>>>()?;
    checks.push(Check::within("infidelity exponent, Gamma = 0", log_log_slope(&cs, &eps), -1.0, 0.1));
    let cs = [100.0, 1000.0, 10000.0];
    let eps = cs.iter().map(|&c| ps_gamma_dominated_infidelity(c, 2000.0)).collect::<Result<Vec<_>>>()?;
    checks.push(Check::within("infidelity exponent, Gamma dominated", log_log_slope(&cs, &eps), -2.0 / 3.0, 0.05));
    let base = ps::ScatteringParams::default();
    let p = base.at_cooperativity(100.0, 1e-3);
    let (_, rep) = ps::ps_optimize_bandwidth(&p, 1e-6 * p.gamma1())?;
    checks.push(Check::within("analytic gate error at C=100 (%)", 100.0 * rep.infidelity(), 4.6, 1.0));
    Ok(checks)
}

fn pi_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let tp = 2.0 * PI;
    let g1 = tp * 596.0;
    let bulk = pi::InterferenceParams { gamma_star: tp * 1.4e3, ..pi::InterferenceParams::bulk_from_t2o(g1, 91e-6) };
    checks.push(Check::within("bulk fidelity, gamma* = 2pi 1.4 kHz", pi::pi_fidelity(&bulk)?.fidelity, 0.51, 0.005));
    let t2o = pi::InterferenceParams::bulk_from_t2o(g1, 91e-6);
    checks.push(Check::within("bulk fidelity, T2o = 91 us", pi::pi_fidelity(&t2o)?.fidelity, 0.51, 0.005));
    let weak = pi::pi_fidelity(&t2o.clone().with_cavity(1e-9, tp * 30.7e9))?.fidelity;
    checks.push(Check::at_most("continuity at g -> 0", (weak - pi::pi_fidelity(&t2o)?.fidelity).abs(), 1e-12));
    let cav = pi::InterferenceParams::bulk_from_t2o(g1, 39e-6);
    let (g, kappa) = (tp * 23e6, tp * 30.7e9);
    let fp = pi::purcell_factor(&cav, g, kappa);
    let c = crate::cavity::cooperativity(g, kappa, g1);
    checks.push(Check::within("Purcell factor vs C", fp / c, 1.0, 0.01));
    let mub = pi::pi_mub_cz_check(pi::MUB_CZ_PHASES);
    checks.push(Check { name: "MUB phases (0,0,0,pi) give CZ".into(), passed: mub.is_cz, value: 1.0, expected: "CZ".into() });
    Ok(checks)
}
