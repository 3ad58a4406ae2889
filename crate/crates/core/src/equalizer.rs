//! End-to-end sparse equalizer design.
//!
//! A design maps an allowed performance loss `η_max` (dB) to the excess-MSE
//! budget `δ_eq = ξ_m (10^(η_max/10) − 1)`, assembles the requested dictionary
//! and runs OMP. The loss of any filter is reported as
//! `η = 10 log₁₀(ξ(w) / ξ_m)`, which equals `10 log₁₀(1 + ξ_e/ξ_m)` so that a
//! budget-met design always satisfies `η ≤ η_max`.

use std::fmt;
use std::str::FromStr;

use crate::channel::{convolution_matrix, Cir};
use crate::correlations::{default_delay, excess_mse, CorrelationSet};
use crate::decompositions::{
    adjoint_back_substitute, cholesky_llh, eigen_circulant, eigen_exact, forward_substitute, ldl_unit, Factorization,
};
use crate::dictionaries::{build_triple, DictionaryKind, DictionaryTriple};
use crate::sparse_solver::{omp, OmpConfig, SparseFilter, StopReason};
use crate::{CVector, Error, Result};

/// How eigen-based dictionaries obtain `U D Uᴴ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EigenMethod {
    /// Hermitian eigensolver on `R_yy`.
    #[default]
    Exact,
    /// FFT of the band-wrapped circulant surrogate.
    Circulant,
}

impl EigenMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Circulant => "circulant",
        }
    }
}

impl fmt::Display for EigenMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EigenMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Self::Exact),
            "circulant" | "fft" => Ok(Self::Circulant),
            other => Err(Error::InvalidArgument(format!("unknown eigen method '{other}'"))),
        }
    }
}

/// Parameters of one sparse design.
#[derive(Clone, Debug)]
pub struct DesignSpec {
    pub n_f: usize,
    /// Decision delay; `None` picks `⌊(N_f + v)/2⌋`.
    pub delta: Option<usize>,
    pub snr_db: f64,
    pub eta_max_db: f64,
    pub kind: DictionaryKind,
    pub eigen: EigenMethod,
    pub max_support: Option<usize>,
    pub eps_x: f64,
}

impl DesignSpec {
    pub fn new(n_f: usize, snr_db: f64, eta_max_db: f64, kind: DictionaryKind) -> Self {
        Self { n_f, delta: None, snr_db, eta_max_db, kind, eigen: EigenMethod::Exact, max_support: None, eps_x: 1.0 }
    }

    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Result of a sparse design, with its diagnostics.
#[derive(Clone, Debug)]
pub struct DesignReport {
    pub kind: DictionaryKind,
    pub filter: SparseFilter,
    pub stop: StopReason,
    pub xi_m: f64,
    pub delta_eq: f64,
    /// Achieved excess MSE of the returned filter.
    pub xi_e: f64,
    /// Achieved performance loss in dB.
    pub eta_db: f64,
    pub active_percent: f64,
    pub valid_triple: bool,
}

/// Wiener filter `R_yy⁻¹ r_Δ`.
pub fn mmse_filter(corr: &CorrelationSet) -> CVector {
    corr.wiener().clone()
}

/// `δ_eq = ξ_m (10^(η_max/10) − 1)`.
pub fn delta_eq_from_eta_max(eta_max_db: f64, xi_m: f64) -> Result<f64> {
    if !(eta_max_db >= 0.0) {
        return Err(Error::InvalidArgument(format!("eta_max must be >= 0 dB, got {eta_max_db}")));
    }
    if !(xi_m >= 0.0) {
        return Err(Error::InvalidArgument(format!("xi_m must be >= 0, got {xi_m}")));
    }
    Ok(xi_m * (db_to_linear(eta_max_db) - 1.0))
}

/// `η = 10 log₁₀(1 + ξ_e(w)/ξ_m)`.
pub fn performance_loss_db(w: &CVector, corr: &CorrelationSet) -> Result<f64> {
    let xe = excess_mse(w, corr)?;
    Ok(10.0 * (1.0 + xe / corr.xi_m()).log10())
}

/// Factorization feeding `kind`, with the circulant floor set to the noise
/// variance `1/SNR`.
pub fn factorize(kind: DictionaryKind, eigen: EigenMethod, corr: &CorrelationSet) -> Result<Factorization> {
    match kind {
        DictionaryKind::CholLh | DictionaryKind::CholRyy => cholesky_llh(corr.r_yy()),
        DictionaryKind::LdlPh => ldl_unit(corr.r_yy()),
        _ => match eigen {
            EigenMethod::Exact => eigen_exact(corr.r_yy()),
            EigenMethod::Circulant => {
                eigen_circulant(&corr.r_yy().column(0).into_owned(), corr.memory(), 1.0 / corr.snr())
            }
        },
    }
}

/// Dictionary triple for `kind` over the statistics in `corr`.
pub fn triple_for(kind: DictionaryKind, eigen: EigenMethod, corr: &CorrelationSet) -> Result<DictionaryTriple> {
    build_triple(kind, &factorize(kind, eigen, corr)?, corr.r_delta())
}

/// Runs OMP on a prepared triple and measures the result against `corr`.
pub fn design_from_triple(
    triple: &DictionaryTriple,
    corr: &CorrelationSet,
    delta_eq: f64,
    max_support: Option<usize>,
) -> Result<DesignReport> {
    let mut cfg = OmpConfig::new(delta_eq);
    cfg.max_support = max_support;
    let out = omp(triple, &cfg)?;
    let w = out.filter.densify();
    let xi_e = excess_mse(&w, corr)?;
    Ok(DesignReport {
        kind: triple.kind(),
        active_percent: out.filter.active_percent(),
        filter: out.filter,
        stop: out.stop,
        xi_m: corr.xi_m(),
        delta_eq,
        xi_e,
        eta_db: 10.0 * (1.0 + xi_e / corr.xi_m()).log10(),
        valid_triple: triple.valid(),
    })
}

/// Full pipeline: `H`, statistics, factorization, triple, budget, OMP.
pub fn design_sparse(spec: &DesignSpec, cir: &Cir) -> Result<DesignReport> {
    let delta = spec.delta.unwrap_or_else(|| default_delay(spec.n_f, cir.memory()));
    let h = convolution_matrix(cir, spec.n_f)?;
    let corr = CorrelationSet::new(&h, spec.snr_linear(), delta, spec.eps_x)?;
    let delta_eq = delta_eq_from_eta_max(spec.eta_max_db, corr.xi_m())?;
    let triple = triple_for(spec.kind, spec.eigen, &corr)?;
    design_from_triple(&triple, &corr, delta_eq, spec.max_support)
}

/// Indices of the `k` largest-magnitude entries, ties to the lowest index.
fn strongest(w: &CVector, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > w.len() {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={}", w.len())));
    }
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| w[b].norm().total_cmp(&w[a].norm()).then(a.cmp(&b)));
    idx.truncate(k);
    Ok(idx)
}

/// Keeps the `k` largest taps of `w_opt` unchanged and zeroes the rest.
pub fn significant_taps(w_opt: &CVector, k: usize) -> Result<SparseFilter> {
    let idx = strongest(w_opt, k)?;
    SparseFilter::new(w_opt.len(), idx.into_iter().map(|i| (i, w_opt[i])).collect())
}

/// Same support as [`significant_taps`], coefficients re-solved to minimize
/// `ξ_e` on it (`R_SS w_S = r_S`).
pub fn significant_taps_refit(corr: &CorrelationSet, k: usize) -> Result<SparseFilter> {
    let idx = strongest(corr.wiener(), k)?;
    let r_ss = corr.r_yy().select_rows(&idx).select_columns(&idx);
    let r_s = corr.r_delta().select_rows(&idx);
    let l = cholesky_llh(&r_ss)?;
    let w_s = adjoint_back_substitute(l.factor(), &forward_substitute(l.factor(), &r_s));
    SparseFilter::new(corr.n_f(), idx.into_iter().zip(w_s.iter().copied()).collect())
}

/// `⌈sparsity · N_f⌉`, at least one tap.
pub fn taps_for_sparsity(sparsity: f64, n_f: usize) -> usize {
    ((sparsity * n_f as f64 - 1e-9).ceil() as usize).clamp(1, n_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_random_cir;
    use crate::correlations::mse;
    use crate::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_wiener_filter() {
        let h = Cir::from_real(&[1.0]).unwrap();
        let corr = CorrelationSet::from_cir(&h, 3, 1.0, 1).unwrap();
        let w = mmse_filter(&corr);
        assert!((w[1] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(w[0].norm() < 1e-15 && w[2].norm() < 1e-15);

        let corr = CorrelationSet::from_cir(&h, 3, 1e12, 1).unwrap();
        assert!((mmse_filter(&corr)[1] - c(1.0, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn wiener_attains_minimum_mse() {
        for seed in 0..10 {
            let corr = CorrelationSet::from_cir(&generate_random_cir(5, seed), 35, 10.0, 20).unwrap();
            let w = mmse_filter(&corr);
            assert!(excess_mse(&w, &corr).unwrap() <= 1e-10);
            assert!((mse(&w, &corr).unwrap() - corr.xi_m()).abs() < 1e-10);
            assert!(performance_loss_db(&w, &corr).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn budget_from_loss() {
        assert_eq!(delta_eq_from_eta_max(0.0, 0.3).unwrap(), 0.0);
        assert!((delta_eq_from_eta_max(10.0 * 2f64.log10(), 0.3).unwrap() - 0.3).abs() < 1e-15);
        let d = delta_eq_from_eta_max(0.25, 0.1).unwrap();
        assert!((d - 0.1 * (10f64.powf(0.025) - 1.0)).abs() < 1e-15);
        assert!((d - 0.005_925_3).abs() < 1e-7);
        assert!(delta_eq_from_eta_max(-0.1, 0.1).is_err());
    }

    #[test]
    fn loss_of_doubled_mse_is_three_db() {
        let corr = CorrelationSet::from_cir(&generate_random_cir(3, 4), 16, 10.0, 9).unwrap();
        // scale a perturbation direction until ξ_e = ξ_m
        let dir = CVector::from_fn(16, |i, _| c(1.0 / (1.0 + i as f64), 0.3));
        let unit = excess_mse(&(corr.wiener() + &dir), &corr).unwrap();
        let w = corr.wiener() + &dir * c((corr.xi_m() / unit).sqrt(), 0.0);
        let eta = performance_loss_db(&w, &corr).unwrap();
        assert!((eta - 3.010_299_956_639_812).abs() < 1e-9);
    }

    #[test]
    fn huge_budget_gives_at_most_one_tap() {
        let h = generate_random_cir(5, 6);
        for kind in DictionaryKind::VALID {
            let r = design_sparse(&DesignSpec::new(35, 10.0, 30.0, kind), &h).unwrap();
            assert!(r.filter.len() <= 1, "{kind}");
        }
    }

    #[test]
    fn zero_loss_needs_dense_filter() {
        let h = generate_random_cir(5, 7);
        let r = design_sparse(&DesignSpec::new(35, 10.0, 0.0, DictionaryKind::EigDu), &h).unwrap();
        assert_eq!(r.filter.len(), 35);
        assert_eq!(r.active_percent, 100.0);
    }

    #[test]
    fn budget_met_designs_respect_eta_max() {
        for seed in 0..15 {
            let h = generate_random_cir(5, seed);
            for eta in [0.05, 0.25, 1.0, 2.0] {
                for kind in DictionaryKind::VALID {
                    let r = design_sparse(&DesignSpec::new(35, 10.0, eta, kind), &h).unwrap();
                    assert_eq!(r.stop, StopReason::BudgetMet);
                    assert!(r.eta_db <= eta + 1e-6, "{kind}: {} > {eta}", r.eta_db);
                    assert!(r.xi_e <= r.delta_eq + 1e-9);
                }
            }
        }
    }

    #[test]
    fn active_taps_non_increasing_in_eta() {
        for seed in 0..10 {
            let h = generate_random_cir(5, 100 + seed);
            for kind in [DictionaryKind::EigDu, DictionaryKind::CholLh, DictionaryKind::CholRyy] {
                let mut last = usize::MAX;
                for eta in [0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0] {
                    let n = design_sparse(&DesignSpec::new(35, 20.0, eta, kind), &h).unwrap().filter.len();
                    assert!(n <= last, "{kind} eta={eta}");
                    last = n;
                }
            }
        }
    }

    #[test]
    fn circulant_design_runs() {
        let h = generate_random_cir(5, 3);
        let mut spec = DesignSpec::new(35, 10.0, 0.25, DictionaryKind::EigDu);
        spec.eigen = EigenMethod::Circulant;
        let r = design_sparse(&spec, &h).unwrap();
        assert!(!r.filter.is_empty());
        assert!(r.xi_e.is_finite());
    }

    #[test]
    fn significant_taps_selection() {
        let w = CVector::from_vec(vec![c(3.0, 0.0), c(0.1, 0.0), c(0.0, -2.0)]);
        let f = significant_taps(&w, 2).unwrap();
        assert_eq!(f.support(), &[0, 2]);
        assert_eq!(f.coefficients(), &[c(3.0, 0.0), c(0.0, -2.0)]);
        assert_eq!(significant_taps(&w, 3).unwrap().densify(), w);
        assert!(significant_taps(&w, 0).is_err());
        assert!(significant_taps(&w, 4).is_err());
        // ties go to the lowest index
        let t = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        assert_eq!(significant_taps(&t, 2).unwrap().support(), &[0, 1]);
    }

    #[test]
    fn refit_never_worse_than_plain_significant_taps() {
        for seed in 0..10 {
            let corr = CorrelationSet::from_cir(&generate_random_cir(5, seed), 35, 31.6, 20).unwrap();
            let plain = significant_taps(corr.wiener(), 9).unwrap();
            let refit = significant_taps_refit(&corr, 9).unwrap();
            assert_eq!(plain.support(), refit.support());
            assert!(excess_mse(&refit.densify(), &corr).unwrap() <= excess_mse(&plain.densify(), &corr).unwrap() + 1e-12);
        }
    }

    #[test]
    fn sparsity_tap_count() {
        assert_eq!(taps_for_sparsity(0.25, 35), 9);
        assert_eq!(taps_for_sparsity(0.25, 8), 2);
        assert_eq!(taps_for_sparsity(0.0, 8), 1);
        assert_eq!(taps_for_sparsity(1.0, 8), 8);
    }

    #[test]
    fn method_names_parse() {
        assert_eq!("exact".parse::<EigenMethod>().unwrap(), EigenMethod::Exact);
        assert_eq!("Circulant".parse::<EigenMethod>().unwrap(), EigenMethod::Circulant);
        assert!("lu".parse::<EigenMethod>().is_err());
    }

    #[test]
    fn omp_beats_significant_taps_on_average() {
        let (mut omp_sum, mut sig_sum) = (0.0, 0.0);
        for seed in 0..200 {
            let corr = CorrelationSet::from_cir(&generate_random_cir(5, 700 + seed), 35, 10.0, 20).unwrap();
            let k = taps_for_sparsity(0.25, 35);
            let triple = triple_for(DictionaryKind::EigDu, EigenMethod::Exact, &corr).unwrap();
            omp_sum += design_from_triple(&triple, &corr, 0.0, Some(k)).unwrap().xi_e;
            sig_sum += excess_mse(&significant_taps(corr.wiener(), k).unwrap().densify(), &corr).unwrap();
        }
        assert!(omp_sum <= sig_sum, "{omp_sum} vs {sig_sum}");
    }
}
