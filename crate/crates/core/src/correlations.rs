//! Second-order statistics for one design instance and the MSE functionals.
//!
//! With white unit-energy symbols and white noise of variance `1/SNR`,
//! `R_yy = H Hᴴ + I/SNR` and `r_Δ` is column `Δ` of `H`. The MSE splits as
//! `ξ(w) = ξ_m + ξ_e(w)` with `ξ_m = ε_x − r_Δᴴ R_yy⁻¹ r_Δ` and
//! `ξ_e(w) = (w − w_opt)ᴴ R_yy (w − w_opt)`.

use crate::channel::{convolution_matrix, ChannelMatrix, Cir};
use crate::decompositions::{adjoint_back_substitute, cholesky_llh, forward_substitute};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Decision delay `⌊(N_f + v) / 2⌋`.
pub fn default_delay(n_f: usize, v: usize) -> usize {
    (n_f + v) / 2
}

/// `R_yy = H Hᴴ + I/SNR`, filled from the channel autocorrelation.
///
/// Row 0 is `[r_0, r_1, …, r_v, 0, …]` with `r_0 = Σ|h_i|² + 1/SNR` and
/// `r_j = Σ_{i=j}^{v} h_i h_{i−j}^*`; column 0 holds the conjugates.
pub fn build_r_yy(h: &ChannelMatrix, snr: f64) -> Result<CMatrix> {
    if !(snr > 0.0) {
        return Err(Error::InvalidArgument(format!("SNR must be positive, got {snr}")));
    }
    let taps = h.taps();
    let v = h.memory();
    let n = h.n_f();
    let lag: Vec<C64> = (0..=v)
        .map(|j| (j..=v).map(|i| taps[i] * taps[i - j].conj()).sum())
        .collect();
    let r0 = lag[0].re + 1.0 / snr;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(r0, 0.0)
        } else if j > i && j - i <= v {
            lag[j - i]
        } else if i > j && i - j <= v {
            lag[i - j].conj()
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// `r_Δ = H 1_Δ`, column `Δ` of the convolution matrix.
pub fn build_r_delta(h: &ChannelMatrix, delta: usize) -> Result<CVector> {
    let max = h.entries().ncols() - 1;
    if delta > max {
        return Err(Error::DelayOutOfRange { delta, max });
    }
    Ok(h.entries().column(delta).into_owned())
}

/// Everything needed to evaluate and optimize the MSE of one equalizer.
#[derive(Clone, Debug)]
pub struct CorrelationSet {
    r_yy: CMatrix,
    r_delta: CVector,
    xi_m: f64,
    eps_x: f64,
    snr: f64,
    delta: usize,
    memory: usize,
    chol: CMatrix,
    w_opt: CVector,
}

impl CorrelationSet {
    /// Builds the statistics for `H` at a linear `snr`. `eps_x` is the symbol energy.
    pub fn new(h: &ChannelMatrix, snr: f64, delta: usize, eps_x: f64) -> Result<Self> {
        if !(eps_x > 0.0) {
            return Err(Error::InvalidArgument(format!("symbol energy must be positive, got {eps_x}")));
        }
        let r_yy = build_r_yy(h, snr)?;
        let r_delta = build_r_delta(h, delta)?;
        let chol = cholesky_llh(&r_yy)?.factor().clone();
        let w_opt = adjoint_back_substitute(&chol, &forward_substitute(&chol, &r_delta));
        let explained = r_delta.dotc(&w_opt).re;
        let xi_m = (eps_x - explained).clamp(0.0, eps_x);
        Ok(Self { r_yy, r_delta, xi_m, eps_x, snr, delta, memory: h.memory(), chol, w_opt })
    }

    /// Shortcut: convolution matrix of `cir` with unit symbol energy.
    pub fn from_cir(cir: &Cir, n_f: usize, snr: f64, delta: usize) -> Result<Self> {
        Self::new(&convolution_matrix(cir, n_f)?, snr, delta, 1.0)
    }

    pub fn r_yy(&self) -> &CMatrix {
        &self.r_yy
    }

    pub fn r_delta(&self) -> &CVector {
        &self.r_delta
    }

    pub fn xi_m(&self) -> f64 {
        self.xi_m
    }

    pub fn eps_x(&self) -> f64 {
        self.eps_x
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn n_f(&self) -> usize {
        self.r_yy.nrows()
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Lower Cholesky factor of `R_yy`.
    pub fn cholesky_factor(&self) -> &CMatrix {
        &self.chol
    }

    /// The Wiener filter `R_yy⁻¹ r_Δ`.
    pub fn wiener(&self) -> &CVector {
        &self.w_opt
    }

    /// `R_yy⁻¹ rhs` via the stored Cholesky factor.
    pub fn solve(&self, rhs: &CVector) -> Result<CVector> {
        self.check_len(rhs.len())?;
        Ok(adjoint_back_substitute(&self.chol, &forward_substitute(&self.chol, rhs)))
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n_f() {
            return Err(Error::DimensionMismatch { expected: self.n_f(), got });
        }
        Ok(())
    }
}

/// `ξ_m`, the MSE of the Wiener filter.
pub fn minimum_mse(corr: &CorrelationSet) -> f64 {
    corr.xi_m()
}

/// `ξ_e(w) = (w − w_opt)ᴴ R_yy (w − w_opt)`.
pub fn excess_mse(w: &CVector, corr: &CorrelationSet) -> Result<f64> {
    corr.check_len(w.len())?;
    let d = w - corr.wiener();
    // ‖Lᴴ d‖² is the same quadratic form without cancellation
    let ld = corr.cholesky_factor().adjoint() * d;
    Ok(ld.norm_squared())
}

/// Direct expansion `ε_x − wᴴ r_Δ − r_Δᴴ w + wᴴ R_yy w`.
pub fn mse(w: &CVector, corr: &CorrelationSet) -> Result<f64> {
    corr.check_len(w.len())?;
    let cross = w.dotc(corr.r_delta());
    let quad = w.dotc(&(corr.r_yy() * w));
    Ok(corr.eps_x() - 2.0 * cross.re + quad.re)
}
