//! GKSL master equation on piecewise-constant gate schedules.
//!
//! Density matrices are vectorized by stacking columns, so that
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. With that convention the generator of
//!
//! ```text
//! dρ/dt = -i(Hρ - ρH†) + Σ_k γ_k (L_k ρ L_k† - ½{L_k†L_k, ρ})
//! ```
//!
//! is
//!
//! ```text
//! 𝓛 = -i(I⊗H - H̄⊗I) + Σ_k γ_k (L̄_k⊗L_k - ½ I⊗L_k†L_k - ½ (L_k†L_k)ᵀ⊗I)
//! ```
//!
//! where the bar is complex conjugation. `H` may be non-Hermitian; the
//! `Hρ - ρH†` form is kept as is.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::operator::{Operator, C64, I, ZERO};

/// Collapse operator with its rate (rad/s).
#[derive(Clone, Debug)]
pub struct LindbladTerm {
    rate: f64,
    collapse: Operator,
}

impl LindbladTerm {
    pub fn new(rate: f64, collapse: Operator) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!("negative or non-finite rate {rate}")));
        }
        Ok(Self { rate, collapse })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn collapse(&self) -> &Operator {
        &self.collapse
    }

    /// Same operator with the rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.rate * factor, self.collapse.clone())
    }
}

/// One piece of a schedule: `H = H_ideal + delta * H_error` held for `duration`.
#[derive(Clone, Debug)]
pub struct Segment {
    pub duration: f64,
    pub h_ideal: Operator,
    pub h_error: Operator,
    pub delta: f64,
}

impl Segment {
    pub fn new(duration: f64, h_ideal: Operator, h_error: Operator, delta: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::InvalidParameter(format!("segment duration {duration}")));
        }
        if h_ideal.dim() != h_error.dim() {
            return Err(Error::Dimension(format!(
                "ideal {} vs error {}",
                h_ideal.dim(),
                h_error.dim()
            )));
        }
        if !h_ideal.is_finite() || !h_error.is_finite() || !delta.is_finite() {
            return Err(Error::NonFinite("segment"));
        }
        Ok(Self { duration, h_ideal, h_error, delta })
    }

    /// Segment with no error Hamiltonian.
    pub fn ideal(duration: f64, h: Operator) -> Result<Self> {
        let d = h.dim();
        Self::new(duration, h, Operator::zeros(d), 0.0)
    }

    pub fn dim(&self) -> usize {
        self.h_ideal.dim()
    }

    /// Full Hamiltonian including the perturbation.
    pub fn hamiltonian(&self) -> Operator {
        &self.h_ideal + &self.h_error.scale_re(self.delta)
    }

    /// `delta * H_error`.
    pub fn perturbation(&self) -> Operator {
        self.h_error.scale_re(self.delta)
    }
}

/// Ordered list of segments acting on one Hilbert space.
#[derive(Clone, Debug)]
pub struct GateSchedule {
    segments: Vec<Segment>,
    starts: Vec<f64>,
    gate_time: f64,
}

impl GateSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty schedule".into()))?;
        let d = first.dim();
        if let Some(s) = segments.iter().find(|s| s.dim() != d) {
            return Err(Error::Dimension(format!("segment dim {} vs {d}", s.dim())));
        }
        let mut starts = Vec::with_capacity(segments.len());
        let mut t = 0.0;
        for s in &segments {
            starts.push(t);
            t += s.duration;
        }
        Ok(Self { segments, starts, gate_time: t })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Start time of each segment.
    pub fn starts(&self) -> &[f64] {
        &self.starts
    }

    pub fn dim(&self) -> usize {
        self.segments[0].dim()
    }

    pub fn gate_time(&self) -> f64 {
        self.gate_time
    }

    /// Same schedule with every `delta` multiplied by `factor`.
    pub fn with_delta_scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            s.delta *= factor;
        }
        out
    }

    /// Index of the segment containing `t` and the time elapsed inside it.
    pub(crate) fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.segments.len();
        for k in 0..n {
            let end = self.starts[k] + self.segments[k].duration;
            if t <= end || k == n - 1 {
                return (k, (t - self.starts[k]).clamp(0.0, self.segments[k].duration));
            }
        }
        unreachable!()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let tol = 1e-12 * self.gate_time;
        if !(t >= -tol && t <= self.gate_time + tol) {
            return Err(Error::TimeOutOfRange { t, t_g: self.gate_time });
        }
        Ok(())
    }

    /// Ideal propagator `U_g(t, t')` built from `H_ideal` only.
    pub fn ideal_propagator(&self, t: f64, t_prime: f64) -> Result<Operator> {
        self.check_time(t)?;
        self.check_time(t_prime)?;
        if t_prime > t {
            return Err(Error::InvalidParameter(format!("t' = {t_prime} > t = {t}")));
        }
        let d = self.dim();
        let (k0, _) = self.locate(t_prime);
        let (k1, _) = self.locate(t);
        let mut u = Operator::identity(d);
        for k in k0..=k1 {
            let seg = &self.segments[k];
            let a = self.starts[k].max(t_prime);
            let b = (self.starts[k] + seg.duration).min(t);
            let tau = b - a;
            if tau <= 0.0 {
                continue;
            }
            let step = seg.h_ideal.scale(C64::new(0.0, -tau)).expm()?;
            u = &step * &u;
        }
        Ok(u)
    }
}

/// Column-stacking vectorization.
pub fn vec(rho: &Operator) -> Array1<C64> {
    let m = rho.as_array();
    m.t().iter().cloned().collect()
}

/// Inverse of [`vec`].
pub fn unvec(v: &Array1<C64>, d: usize) -> Result<Operator> {
    if v.len() != d * d {
        return Err(Error::Dimension(format!("vector length {} is not {d}²", v.len())));
    }
    let m = Array2::from_shape_fn((d, d), |(i, j)| v[j * d + i]);
    Operator::new(m)
}

/// Liouvillian of Hamiltonian `h` with dissipators `terms`.
pub fn liouvillian(h: &Operator, terms: &[LindbladTerm]) -> Result<Operator> {
    let d = h.dim();
    if let Some(t) = terms.iter().find(|t| t.collapse.dim() != d) {
        return Err(Error::Dimension(format!("collapse dim {} vs {d}", t.collapse.dim())));
    }
    let id = Operator::identity(d);
    let mut l = (&id.kron(h) - &h.conj().kron(&id)).scale(-I);
    for term in terms {
        if term.rate == 0.0 {
            continue;
        }
        let c = &term.collapse;
        let cdc = &c.dagger() * c;
        let diss = &(&c.conj().kron(c) - &id.kron(&cdc).scale_re(0.5))
            - &cdc.transpose().kron(&id).scale_re(0.5);
        l = &l + &diss.scale_re(term.rate);
    }
    Ok(l)
}

/// Liouvillian for one schedule segment (ideal plus perturbation).
pub fn build_liouvillian(segment: &Segment, terms: &[LindbladTerm]) -> Result<Operator> {
    liouvillian(&segment.hamiltonian(), terms)
}

/// Superoperator of the whole schedule, `Π_k exp(𝓛_k τ_k)`.
pub fn channel(schedule: &GateSchedule, terms: &[LindbladTerm]) -> Result<Operator> {
    let d = schedule.dim();
    let mut e = Operator::identity(d * d);
    for seg in schedule.segments() {
        let step = build_liouvillian(seg, terms)?.scale_re(seg.duration).expm()?;
        e = &step * &e;
    }
    Ok(e)
}

/// Applies a superoperator to a density matrix.
pub fn apply_channel(channel: &Operator, rho: &Operator) -> Result<Operator> {
    let d = rho.dim();
    if channel.dim() != d * d {
        return Err(Error::Dimension(format!("channel {} vs rho {d}", channel.dim())));
    }
    unvec(&channel.as_array().dot(&vec(rho)), d)
}

/// Exact evolution of `rho0` through the schedule on the full Liouville space.
pub fn evolve(rho0: &Operator, schedule: &GateSchedule, terms: &[LindbladTerm]) -> Result<Operator> {
    check_dims(rho0, schedule, terms)?;
    let d = rho0.dim();
    let mut v = vec(rho0);
    for seg in schedule.segments() {
        let step = build_liouvillian(seg, terms)?.scale_re(seg.duration).expm()?;
        v = step.as_array().dot(&v);
    }
    unvec(&v, d)
}

/// Same result as [`evolve`], computed on the smallest coordinate subspace
/// that contains the support of `rho0` and is closed under every Hamiltonian,
/// collapse operator and `L†L`. Exact, not an approximation.
pub fn evolve_reduced(
    rho0: &Operator,
    schedule: &GateSchedule,
    terms: &[LindbladTerm],
) -> Result<Operator> {
    check_dims(rho0, schedule, terms)?;
    let mut ops: Vec<Operator> = schedule.segments().iter().map(|s| s.hamiltonian()).collect();
    for t in terms.iter().filter(|t| t.rate > 0.0) {
        ops.push(t.collapse.clone());
        ops.push(&t.collapse.dagger() * &t.collapse);
    }
    let d = rho0.dim();
    let start: Vec<usize> = (0..d)
        .filter(|&i| (0..d).any(|j| rho0.get(i, j) != ZERO || rho0.get(j, i) != ZERO))
        .collect();
    let sub = Subspace::reachable(&ops, &start, d);
    let mut v = vec(&sub.restrict(rho0));
    let rterms: Vec<LindbladTerm> = terms
        .iter()
        .filter(|t| t.rate > 0.0)
        .map(|t| LindbladTerm { rate: t.rate, collapse: sub.restrict(&t.collapse) })
        .collect();
    for seg in schedule.segments() {
        let h = sub.restrict(&seg.hamiltonian());
        let step = liouvillian(&h, &rterms)?.scale_re(seg.duration).expm()?;
        v = step.as_array().dot(&v);
    }
    Ok(sub.embed(&unvec(&v, sub.len())?))
}

fn check_dims(rho0: &Operator, schedule: &GateSchedule, terms: &[LindbladTerm]) -> Result<()> {
    if rho0.dim() != schedule.dim() {
        return Err(Error::Dimension(format!(
            "rho {} vs schedule {}",
            rho0.dim(),
            schedule.dim()
        )));
    }
    if let Some(t) = terms.iter().find(|t| t.collapse.dim() != rho0.dim()) {
        return Err(Error::Dimension(format!("collapse {} vs rho {}", t.collapse.dim(), rho0.dim())));
    }
    Ok(())
}

/// Set of basis indices closed under a family of operators.
#[derive(Clone, Debug)]
pub struct Subspace {
    indices: Vec<usize>,
    full: usize,
}

impl Subspace {
    /// Breadth-first closure of `start` under the column structure of `ops`.
    pub fn reachable(ops: &[Operator], start: &[usize], full: usize) -> Self {
        let mut seen = vec![false; full];
        let mut frontier: Vec<usize> = Vec::new();
        for &i in start {
            if !seen[i] {
                seen[i] = true;
                frontier.push(i);
            }
        }
        while let Some(j) = frontier.pop() {
            for op in ops {
                for i in 0..full {
                    if !seen[i] && op.get(i, j) != ZERO {
                        seen[i] = true;
                        frontier.push(i);
                    }
                }
            }
        }
        let indices = (0..full).filter(|&i| seen[i]).collect();
        Self { indices, full }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn restrict(&self, op: &Operator) -> Operator {
        let n = self.len();
        let m = Array2::from_shape_fn((n, n), |(a, b)| op.get(self.indices[a], self.indices[b]));
        Operator::new(m).expect("square")
    }

    pub fn embed(&self, op: &Operator) -> Operator {
        let mut out = Operator::zeros(self.full);
        for (a, &i) in self.indices.iter().enumerate() {
            for (b, &j) in self.indices.iter().enumerate() {
                out.set(i, j, op.get(a, b));
            }
        }
        out
    }
}

/// `|ψ⟩⟨ψ|` helper kept here because every caller of `evolve` needs it.
pub fn pure_density(amplitudes: &[C64]) -> Operator {
    let d = amplitudes.len();
    let m = Array2::from_shape_fn((d, d), |(i, j)| amplitudes[i] * amplitudes[j].conj());
    Operator::new(m).expect("square")
}
