//! Haar-random pure states and Monte Carlo channel fidelity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::lindblad::apply_channel;
use crate::operator::{KetState, Operator, C64};

/// Haar-distributed pure state in dimension `d` (normalized complex Gaussian).
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> KetState {
    let amps: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    KetState::from_slice(&amps).normalized()
}

/// Sample mean and standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Average of `⟨Uψ|E(ψψ†)|Uψ⟩` over Haar inputs `ψ` drawn from the
/// register spanned by `computational` inside the system space. `channel`
/// is a column-stacked superoperator and `target` the ideal unitary on the
/// full space. Each sample has its own ChaCha stream derived from `seed`, so
/// the result does not depend on thread count.
pub fn average_fidelity_monte_carlo(
    channel: &Operator,
    target: &Operator,
    computational: &[usize],
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let d = target.dim();
    if channel.dim() != d * d {
        return Err(Error::Dimension(format!("channel {} vs target {d}", channel.dim())));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let idx: Vec<u64> = (0..samples as u64).collect();
    let vals = par_map(&idx, |&i| -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let z = random_state(&mut rng, computational.len());
        let mut amps = vec![C64::new(0.0, 0.0); d];
        for (k, &c) in computational.iter().enumerate() {
            amps[c] = z.as_array()[k];
        }
        let psi = KetState::from_slice(&amps);
        let out = apply_channel(channel, &psi.to_density())?;
        let ideal = target.apply(&psi)?;
        crate::operator::state_fidelity(&ideal, &out)
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MonteCarloEstimate { mean, std_error: (var / n).sqrt(), samples })
}
