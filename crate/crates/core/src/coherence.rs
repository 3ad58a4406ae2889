//! Worst-case coherence of dictionaries and the channel-driven bounds on
//! `μ(R_yy)`.

use rayon::prelude::*;

use crate::channel::{random_cir, worst_case_cir, Cir};
use crate::correlations::CorrelationSet;
use crate::dictionaries::DictionaryKind;
use crate::rng::{self, Purpose};
use crate::{CMatrix, Error, Result};

/// `μ(Φ)` and the column pair attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceReport {
    pub kind: Option<DictionaryKind>,
    pub mu: f64,
    pub argmax_pair: (usize, usize),
}

/// `max_{i<j} |⟨φ_i, φ_j⟩| / (‖φ_i‖ ‖φ_j‖)` from the Gram matrix `Φᴴ Φ`.
///
/// The first pair in lexicographic order wins ties. A single-column matrix has
/// no pairs and reports `μ = 0` at `(0, 0)`.
pub fn worst_case_coherence(phi: &CMatrix) -> Result<CoherenceReport> {
    let gram = phi.ad_mul(phi);
    let n = gram.ncols();
    let norms: Vec<f64> = (0..n).map(|i| gram[(i, i)].re.max(0.0).sqrt()).collect();
    if let Some(i) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroColumn(i));
    }
    let mut mu = 0.0;
    let mut pair = (0, if n > 1 { 1 } else { 0 });
    for i in 0..n {
        for j in i + 1..n {
            let x = gram[(i, j)].norm() / (norms[i] * norms[j]);
            if x > mu {
                mu = x;
                pair = (i, j);
            }
        }
    }
    Ok(CoherenceReport { kind: None, mu: mu.min(1.0), argmax_pair: pair })
}

/// `μ(R_yy)` for one channel.
pub fn r_yy_coherence(cir: &Cir, snr: f64, n_f: usize) -> Result<f64> {
    let delta = (n_f + cir.memory()) / 2;
    let corr = CorrelationSet::from_cir(cir, n_f, snr, delta)?;
    Ok(worst_case_coherence(corr.r_yy())?.mu)
}

/// `μ(R_yy)` evaluated at the worst-case channel of memory `v`.
pub fn coherence_bound_theoretical(v: usize, snr: f64, n_f: usize) -> Result<f64> {
    if n_f <= v {
        return Err(Error::InvalidArgument(format!("need N_f > v (N_f = {n_f}, v = {v})")));
    }
    r_yy_coherence(&worst_case_cir(v)?, snr, n_f)
}

/// Largest `μ(R_yy)` over the given channels.
pub fn max_coherence_over<'a, I>(cirs: I, snr: f64, n_f: usize) -> Result<f64>
where
    I: IntoIterator<Item = &'a Cir>,
{
    cirs.into_iter().try_fold(0.0f64, |acc, c| Ok(acc.max(r_yy_coherence(c, snr, n_f)?)))
}

/// Largest `μ(R_yy)` over `trials` random unit-energy channels of memory `v`.
///
/// Trial `t` draws its channel from stream `(v, t)` under `seed`, so results do
/// not depend on thread scheduling.
pub fn coherence_bound_empirical(v: usize, snr: f64, n_f: usize, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(seed, Purpose::CoherenceBound, ((v as u64) << 32) | t as u64);
            r_yy_coherence(&random_cir(v, &mut rng), snr, n_f)
        })
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}
