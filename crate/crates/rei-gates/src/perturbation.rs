//! Perturbative infidelity from the ideal evolution alone.
//!
//! For `H(t) = H_g(t) + δ H̃_e(t)` and dissipators `γ_k D(L_k)`, with
//! `⟨O(t)⟩ = ⟨ψ(t)|O|ψ(t)⟩` and `|ψ(t)⟩ = U_g(t,0)|ψ(0)⟩`:
//!
//! ```text
//! ε_L⁽¹⁾  = Σ_k γ_k ∫ (⟨L_k†L_k⟩ - |⟨L_k⟩|²) dt
//! ε_H⁽¹⁾  = -2δ ∫ Im⟨H̃_e⟩ dt
//! ε_HH⁽²⁾ = 2δ² ∫∫_{t'<t} Re(⟨H_e(t)H_e(t')⟩ - ⟨H_e(t)⟩⟨H_e(t')⟩)
//! ε_LH⁽²⁾ = Σ_k γ_k δ ∫∫_{t''<t'} Im(⟨H_e(t')L_k†L_k(t'')⟩ - 2⟨H_e(t')L_k(t'')⟩⟨L_k†(t'')⟩
//!                                   + ⟨L_k†L_k(t')H_e(t'')⟩ - 2⟨L_k(t')H_e(t'')⟩⟨L_k†(t')⟩)
//! ```
//!
//! with `H_e = (H̃_e + H̃_e†)/2` and two-time correlators
//! `⟨A(t)B(t')⟩ = ⟨ψ(t)|A U_g(t,t') B|ψ(t')⟩`. Each segment's `delta` is
//! folded into its error Hamiltonian, so schedules with different weights
//! per segment are handled directly.
//!
//! States are carried as `d × m` blocks `Ψ` with `tr(Ψ†Ψ) = 1`: `m = 1` is a
//! ket, `m = 4` is the purification used for the entanglement fidelity, where
//! `⟨𝕀 ⊗ O⟩ = tr(Ψ†OΨ)`. Only `d × d` propagators are ever built.

use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::lindblad::{GateSchedule, LindbladTerm};
use crate::operator::{KetState, Operator, C64, ZERO};
use crate::quadrature::GaussLegendre;

/// Per-segment Gauss-Legendre settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub points_per_segment: usize,
    /// Absolute tolerance on the difference between the `n`- and `n/2`-point
    /// estimates.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { points_per_segment: 32, tolerance: 1e-8 }
    }
}

impl QuadratureConfig {
    pub fn new(points_per_segment: usize, tolerance: f64) -> Result<Self> {
        if points_per_segment < 8 {
            return Err(Error::InvalidParameter(format!(
                "points_per_segment {points_per_segment} < 8"
            )));
        }
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {tolerance}")));
        }
        Ok(Self { points_per_segment, tolerance })
    }
}

/// Infidelity terms; `total` is their sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct ErrorBreakdown {
    pub eps_l1: f64,
    pub eps_h1: f64,
    pub eps_hh2: f64,
    pub eps_lh2: f64,
    pub total: f64,
}

impl ErrorBreakdown {
    pub fn new(eps_l1: f64, eps_h1: f64, eps_hh2: f64, eps_lh2: f64) -> Self {
        Self { eps_l1, eps_h1, eps_hh2, eps_lh2, total: eps_l1 + eps_h1 + eps_hh2 + eps_lh2 }
    }

    pub fn fidelity(&self) -> f64 {
        1.0 - self.total
    }
}

/// `⟨ψ(t)|O|ψ(t)⟩` under the ideal schedule.
pub fn expectation_trajectory(
    schedule: &GateSchedule,
    psi0: &KetState,
    obs: &Operator,
    t: f64,
) -> Result<C64> {
    let ideal = Ideal::new(schedule, ket_block(psi0, schedule.dim())?)?;
    if !(t >= 0.0 && t <= schedule.gate_time() * (1.0 + 1e-12)) {
        return Err(Error::TimeOutOfRange { t, t_g: schedule.gate_time() });
    }
    let (k, tau) = schedule.locate(t);
    let node = ideal.node(k, tau)?;
    Ok(expect(&node.psi, obs.as_array()))
}

pub fn eps_l_first_order(
    schedule: &GateSchedule,
    psi0: &KetState,
    terms: &[LindbladTerm],
    quad: &QuadratureConfig,
) -> Result<f64> {
    let ideal = Ideal::new(schedule, ket_block(psi0, schedule.dim())?)?;
    ideal.eps_l(terms, quad)
}

pub fn eps_h_first_order_nonhermitian(
    schedule: &GateSchedule,
    psi0: &KetState,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let ideal = Ideal::new(schedule, ket_block(psi0, schedule.dim())?)?;
    ideal.eps_h(quad)
}

pub fn eps_hh_second_order(
    schedule: &GateSchedule,
    psi0: &KetState,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let ideal = Ideal::new(schedule, ket_block(psi0, schedule.dim())?)?;
    ideal.eps_hh(quad)
}

pub fn eps_lh_second_order(
    schedule: &GateSchedule,
    psi0: &KetState,
    terms: &[LindbladTerm],
    quad: &QuadratureConfig,
) -> Result<f64> {
    let ideal = Ideal::new(schedule, ket_block(psi0, schedule.dim())?)?;
    ideal.eps_lh(terms, quad)
}

/// All four terms for a pure input state.
pub fn error_breakdown(
    schedule: &GateSchedule,
    psi0: &KetState,
    terms: &[LindbladTerm],
    quad: &QuadratureConfig,
) -> Result<ErrorBreakdown> {
    let ideal = Ideal::new(schedule, ket_block(psi0, schedule.dim())?)?;
    ideal.breakdown(terms, quad)
}

/// Error terms of the entanglement fidelity. `computational` lists the four
/// system basis indices spanned by the two qubits; the ancilla register is
/// the identity factor of the purification.
pub fn entanglement_breakdown(
    schedule: &GateSchedule,
    terms: &[LindbladTerm],
    quad: &QuadratureConfig,
    computational: &[usize],
) -> Result<ErrorBreakdown> {
    let ideal = Ideal::new(schedule, choi_block(schedule.dim(), computational)?)?;
    ideal.breakdown(terms, quad)
}

/// `1 - ε_ent` from [`entanglement_breakdown`].
pub fn entanglement_fidelity(
    schedule: &GateSchedule,
    terms: &[LindbladTerm],
    quad: &QuadratureConfig,
    computational: &[usize],
) -> Result<f64> {
    Ok(entanglement_breakdown(schedule, terms, quad, computational)?.fidelity())
}

/// `F_avg = (D F_ent + 1) / (D + 1)`.
pub fn average_gate_fidelity(f_ent: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&f_ent) {
        return Err(Error::InvalidParameter(format!("entanglement fidelity {f_ent}")));
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension {d} < 2")));
    }
    let d = d as f64;
    Ok((d * f_ent + 1.0) / (d + 1.0))
}

/// Rate, `L`, `L†` and `L†L` of one dissipator.
type RatedOps = (f64, Array2<C64>, Array2<C64>, Array2<C64>);

/// `|ψ⟩` as a `d × 1` block.
fn ket_block(psi0: &KetState, d: usize) -> Result<Array2<C64>> {
    if psi0.dim() != d {
        return Err(Error::Dimension(format!("ket {} vs schedule {d}", psi0.dim())));
    }
    let v = psi0.normalized();
    Ok(Array2::from_shape_fn((d, 1), |(i, _)| v.as_array()[i]))
}

/// Purification `Σ_i |i⟩_anc |c_i⟩_sys / 2` as the `d × 4` block.
pub(crate) fn choi_block(d: usize, computational: &[usize]) -> Result<Array2<C64>> {
    if computational.len() != 4 {
        return Err(Error::Dimension(format!(
            "entanglement fidelity needs a 4-dimensional register, got {}",
            computational.len()
        )));
    }
    if computational.iter().any(|&i| i >= d) {
        return Err(Error::Dimension(format!("index out of range for dim {d}")));
    }
    let mut b = Array2::zeros((d, 4));
    for (col, &row) in computational.iter().enumerate() {
        b[[row, col]] = C64::new(0.5, 0.0);
    }
    Ok(b)
}

/// `tr(Ψ† O Ψ)`.
fn expect(psi: &Array2<C64>, op: &Array2<C64>) -> C64 {
    inner(psi, &op.dot(psi))
}

/// `tr(X† Y)`.
fn inner(x: &Array2<C64>, y: &Array2<C64>) -> C64 {
    let mut s = ZERO;
    Zip::from(x).and(y).for_each(|a, b| s += a.conj() * b);
    s
}

fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

struct Node {
    seg: usize,
    tau: f64,
    /// U_g(t, 0)
    u: Array2<C64>,
    /// U_g(t, 0) Ψ₀
    psi: Array2<C64>,
}

impl Node {
    /// `U_g(t,0)† O Ψ(t)`: the state `O|ψ(t)⟩` pulled back to t = 0, so that
    /// `⟨A(t)B(t')⟩ = tr(pull(A†)(t)† pull(B)(t'))`.
    fn pull(&self, op: &Array2<C64>) -> Array2<C64> {
        dagger(&self.u).dot(&op.dot(&self.psi))
    }
}

/// Per-segment operators used by the integrands.
struct SegmentOps {
    /// δ H̃_e
    tilde: Array2<C64>,
    /// δ (H̃_e + H̃_e†) / 2
    herm: Array2<C64>,
}

struct Ideal<'a> {
    schedule: &'a GateSchedule,
    psi0: Array2<C64>,
    starts_u: Vec<Array2<C64>>,
    ops: Vec<SegmentOps>,
}

impl<'a> Ideal<'a> {
    fn new(schedule: &'a GateSchedule, psi0: Array2<C64>) -> Result<Self> {
        let mut starts_u = Vec::with_capacity(schedule.segments().len());
        let mut u = Array2::<C64>::eye(schedule.dim());
        let mut ops = Vec::new();
        for seg in schedule.segments() {
            let scale = 1e-10 * (1.0 + seg.h_ideal.frobenius_norm());
            if !seg.h_ideal.is_hermitian(scale) {
                return Err(Error::InvalidParameter("ideal Hamiltonian must be Hermitian".into()));
            }
            starts_u.push(u.clone());
            let step = seg.h_ideal.scale(C64::new(0.0, -seg.duration)).expm()?;
            u = step.as_array().dot(&u);
            let tilde = seg.perturbation().into_array();
            let herm = (&tilde + &dagger(&tilde)).mapv(|z| z * 0.5);
            ops.push(SegmentOps { tilde, herm });
        }
        Ok(Self { schedule, psi0, starts_u, ops })
    }

    fn node(&self, seg: usize, tau: f64) -> Result<Node> {
        let h = &self.schedule.segments()[seg].h_ideal;
        let step = h.scale(C64::new(0.0, -tau)).expm()?;
        let u = step.as_array().dot(&self.starts_u[seg]);
        let psi = u.dot(&self.psi0);
        Ok(Node { seg, tau, u, psi })
    }

    /// ∫₀^{T_g} f(t) dt, segment by segment.
    fn single<F>(&self, n: usize, f: F) -> Result<f64>
    where
        F: Fn(&Node) -> f64 + Sync + Send,
    {
        let gl = GaussLegendre::new(n);
        let mut pts = Vec::new();
        for (k, seg) in self.schedule.segments().iter().enumerate() {
            for (tau, w) in gl.on_interval(0.0, seg.duration) {
                pts.push((k, tau, w));
            }
        }
        let vals = par_map(&pts, |&(k, tau, w)| self.node(k, tau).map(|nd| w * f(&nd)));
        vals.into_iter().sum()
    }

    /// ∫₀^{T_g} dt ∫₀^t dt' f(t, t'). Blocks below the diagonal use tensor
    /// rules; the diagonal triangle of each segment uses t' = a + (t - a)u.
    fn double<F>(&self, n: usize, f: F) -> Result<f64>
    where
        F: Fn(&Node, &Node) -> f64 + Sync + Send,
    {
        let gl = GaussLegendre::new(n);
        let unit = gl.on_interval(0.0, 1.0);
        let mut pts = Vec::new();
        for (k, seg) in self.schedule.segments().iter().enumerate() {
            for (tau, w) in gl.on_interval(0.0, seg.duration) {
                pts.push((k, tau, w));
            }
        }
        let primary: Vec<(Node, f64)> = par_map(&pts, |&(k, tau, w)| {
            self.node(k, tau).map(|nd| (nd, w))
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let idx: Vec<usize> = (0..primary.len()).collect();
        let vals = par_map(&idx, |&i| -> Result<f64> {
            let (n1, w1) = &primary[i];
            let mut s = 0.0;
            for (n2, w2) in primary.iter().filter(|(n2, _)| n2.seg < n1.seg) {
                s += w1 * w2 * f(n1, n2);
            }
            for &(u, wu) in &unit {
                let n2 = self.node(n1.seg, n1.tau * u)?;
                s += w1 * n1.tau * wu * f(n1, &n2);
            }
            Ok(s)
        });
        vals.into_iter().sum()
    }

    /// Runs `eval` at `n` and `n/2` points and checks the difference.
    fn converged(&self, quad: &QuadratureConfig, eval: impl Fn(usize) -> Result<f64>) -> Result<f64> {
        let n = quad.points_per_segment.max(8);
        let value = eval(n)?;
        let coarse = eval((n / 2).max(4))?;
        let estimate = (value - coarse).abs();
        if !value.is_finite() || estimate > quad.tolerance {
            return Err(Error::Quadrature { value, estimate, target: quad.tolerance });
        }
        Ok(value)
    }

    fn eps_l(&self, terms: &[LindbladTerm], quad: &QuadratureConfig) -> Result<f64> {
        let ops: Vec<(f64, Array2<C64>)> = terms
            .iter()
            .filter(|t| t.rate() > 0.0)
            .map(|t| (t.rate(), t.collapse().as_array().clone()))
            .collect();
        if ops.is_empty() {
            return Ok(0.0);
        }
        let v = self.converged(quad, |n| {
            self.single(n, |nd| {
                ops.iter()
                    .map(|(g, l)| {
                        let lpsi = l.dot(&nd.psi);
                        let ldl = inner(&lpsi, &lpsi).re;
                        let mean = inner(&nd.psi, &lpsi);
                        g * (ldl - mean.norm_sqr())
                    })
                    .sum()
            })
        })?;
        Ok(v)
    }

    fn eps_h(&self, quad: &QuadratureConfig) -> Result<f64> {
        if self.ops.iter().all(|o| o.tilde.iter().all(|z| *z == ZERO)) {
            return Ok(0.0);
        }
        self.converged(quad, |n| {
            self.single(n, |nd| -2.0 * expect(&nd.psi, &self.ops[nd.seg].tilde).im)
        })
    }

    fn eps_hh(&self, quad: &QuadratureConfig) -> Result<f64> {
        if self.ops.iter().all(|o| o.herm.iter().all(|z| *z == ZERO)) {
            return Ok(0.0);
        }
        let v = self.converged(quad, |n| {
            self.double(n, |n1, n2| {
                let h1 = &self.ops[n1.seg].herm;
                let h2 = &self.ops[n2.seg].herm;
                let corr = inner(&n1.pull(h1), &n2.pull(h2));
                let disc = expect(&n1.psi, h1) * expect(&n2.psi, h2);
                2.0 * (corr - disc).re
            })
        })?;
        Ok(v)
    }

    fn eps_lh(&self, terms: &[LindbladTerm], quad: &QuadratureConfig) -> Result<f64> {
        let ops: Vec<RatedOps> = terms
            .iter()
            .filter(|t| t.rate() > 0.0)
            .map(|t| {
                let l = t.collapse().as_array().clone();
                let ld = dagger(&l);
                let ldl = ld.dot(&l);
                (t.rate(), l, ld, ldl)
            })
            .collect();
        if ops.is_empty() || self.ops.iter().all(|o| o.herm.iter().all(|z| *z == ZERO)) {
            return Ok(0.0);
        }
        self.converged(quad, |n| {
            self.double(n, |n1, n2| {
                let h1 = &self.ops[n1.seg].herm;
                let h2 = &self.ops[n2.seg].herm;
                let x_h1 = n1.pull(h1);
                let y_h2 = n2.pull(h2);
                let mut s = 0.0;
                for (g, l, ld, ldl) in &ops {
                    // ⟨H_e(t')X(t'')⟩ with X at the earlier time.
                    let a = inner(&x_h1, &n2.pull(ldl))
                        - 2.0 * inner(&x_h1, &n2.pull(l)) * expect(&n2.psi, ld);
                    // ⟨X(t')H_e(t'')⟩ with H_e at the earlier time.
                    let b = inner(&n1.pull(ldl), &y_h2)
                        - 2.0 * inner(&n1.pull(ld), &y_h2) * expect(&n1.psi, ld);
                    s += g * (a + b).im;
                }
                s
            })
        })
    }

    fn breakdown(&self, terms: &[LindbladTerm], quad: &QuadratureConfig) -> Result<ErrorBreakdown> {
        Ok(ErrorBreakdown::new(
            self.eps_l(terms, quad)?,
            self.eps_h(quad)?,
            self.eps_hh(quad)?,
            self.eps_lh(terms, quad)?,
        ))
    }
}
