//! Orthogonal matching pursuit with a projected-residual stopping rule, and an
//! exhaustive minimal-support search used to validate it on small problems.

use std::fmt;

use itertools::Itertools;
use log::warn;

use crate::decompositions::back_substitute;
use crate::dictionaries::DictionaryTriple;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative slack on feasibility tests: `PRE ≤ δ_eq + FEASIBILITY_RTOL · ‖A b‖²`.
/// Without it `δ_eq = 0` could never be met in floating point.
pub const FEASIBILITY_RTOL: f64 = 1e-12;

/// Largest `N_f` accepted by [`minimal_support_oracle`].
pub const ORACLE_MAX_NF: usize = 16;

/// A length-`N_f` filter stored by its nonzero taps.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseFilter {
    n_f: usize,
    support: Vec<usize>,
    coefficients: Vec<C64>,
}

impl SparseFilter {
    /// Pairs are sorted by index; exact zeros are kept so `support` always
    /// lists the taps the solver activated.
    pub fn new(n_f: usize, mut taps: Vec<(usize, C64)>) -> Result<Self> {
        taps.sort_by_key(|&(i, _)| i);
        if taps.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("duplicate support index".into()));
        }
        if let Some(&(i, _)) = taps.iter().find(|(i, _)| *i >= n_f) {
            return Err(Error::InvalidArgument(format!("support index {i} outside 0..{n_f}")));
        }
        let (support, coefficients) = taps.into_iter().unzip();
        Ok(Self { n_f, support, coefficients })
    }

    pub fn zero(n_f: usize) -> Self {
        Self { n_f, support: Vec::new(), coefficients: Vec::new() }
    }

    pub fn n_f(&self) -> usize {
        self.n_f
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    /// Number of active taps `N_s`.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `100 · N_s / N_f`
    pub fn active_percent(&self) -> f64 {
        100.0 * self.len() as f64 / self.n_f as f64
    }

    pub fn densify(&self) -> CVector {
        let mut w = CVector::zeros(self.n_f);
        for (&i, &c) in self.support.iter().zip(&self.coefficients) {
            w[i] = c;
        }
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopReason {
    BudgetMet,
    SupportCap,
    Stagnation,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BudgetMet => "BUDGET_MET",
            Self::SupportCap => "SUPPORT_CAP",
            Self::Stagnation => "STAGNATION",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct OmpConfig {
    /// PRE budget `δ_eq` in MSE units.
    pub delta_eq: f64,
    /// Cap on `|S|`; `None` means `N_f`.
    pub max_support: Option<usize>,
    /// Minimum per-iteration decrease before declaring stagnation.
    pub min_pre_decrease: f64,
}

impl OmpConfig {
    pub fn new(delta_eq: f64) -> Self {
        Self { delta_eq, max_support: None, min_pre_decrease: 1e-12 }
    }

    pub fn with_max_support(mut self, cap: usize) -> Self {
        self.max_support = Some(cap);
        self
    }
}

#[derive(Clone, Debug)]
pub struct OmpOutcome {
    pub filter: SparseFilter,
    pub stop: StopReason,
    /// Final `‖A(Φw − b)‖²`.
    pub pre: f64,
    /// PRE after 0, 1, 2, … selected atoms.
    pub pre_history: Vec<f64>,
    /// `‖Φw − b‖²` after 0, 1, 2, … selected atoms.
    pub residual_history: Vec<f64>,
    /// Atoms in the order they were picked.
    pub selection_order: Vec<usize>,
    /// Set when the solver ran on a triple flagged invalid.
    pub invalid_triple: bool,
}

/// `argmin ‖M x − y‖₂`. Householder QR, falling back to the minimum-norm SVD
/// solution when `M` is numerically rank deficient.
pub fn least_squares(m: &CMatrix, y: &CVector) -> CVector {
    let k = m.ncols();
    if k == 0 {
        return CVector::zeros(0);
    }
    if m.nrows() >= k {
        let qr = m.clone().qr();
        let r = qr.r();
        let scale = (0..k).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
        if (0..k).all(|i| r[(i, i)].norm() > 1e-13 * scale) {
            return back_substitute(&r, &(qr.q().adjoint() * y));
        }
    }
    warn!("restricted least squares is rank deficient; using the minimum-norm solution");
    m.clone().svd(true, true).solve(y, 1e-13).unwrap_or_else(|_| CVector::zeros(k))
}

fn column_norms(phi: &CMatrix) -> Result<Vec<f64>> {
    phi.column_iter()
        .enumerate()
        .map(|(i, c)| {
            let n = c.norm();
            if n > 0.0 {
                Ok(n)
            } else {
                Err(Error::ZeroColumn(i))
            }
        })
        .collect()
}

fn select_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    m.select_columns(cols)
}

fn validate_cap(cap: Option<usize>, n_f: usize) -> Result<usize> {
    match cap {
        Some(0) => Err(Error::InvalidArgument("max_support must be >= 1".into())),
        Some(c) if c > n_f => Err(Error::InvalidArgument(format!("max_support {c} exceeds N_f = {n_f}"))),
        Some(c) => Ok(c),
        None => Ok(n_f),
    }
}

/// Greedy sparse approximation of `b` over the columns of `Φ`.
///
/// Each iteration picks the atom maximizing `|⟨φ_i, r⟩| / ‖φ_i‖` against the
/// plain residual `r = b − Φ_S w_S` (lowest index wins ties), refits `w_S` by
/// least squares on `Φ_S`, and stops once `‖A(Φ_S w_S − b)‖² ≤ δ_eq`, the
/// support reaches the cap, or neither the PRE nor the residual shrank by
/// `min_pre_decrease`.
pub fn omp(triple: &DictionaryTriple, config: &OmpConfig) -> Result<OmpOutcome> {
    if !(config.delta_eq >= 0.0) {
        return Err(Error::InvalidArgument(format!("delta_eq must be >= 0, got {}", config.delta_eq)));
    }
    let n = triple.n_f();
    let cap = validate_cap(config.max_support, n)?;
    let invalid_triple = !triple.valid();
    if invalid_triple {
        warn!("running OMP on invalid dictionary {}", triple.kind());
    }

    let phi = triple.phi();
    let a = triple.a();
    let b = triple.b();
    let norms = column_norms(phi)?;
    let budget = config.delta_eq + FEASIBILITY_RTOL * (a * b).norm_squared();

    let mut support: Vec<usize> = Vec::new();
    let mut coef = CVector::zeros(0);
    let mut residual = b.clone();
    let mut pre = (a * &residual).norm_squared();
    let mut pre_history = vec![pre];
    let mut residual_history = vec![residual.norm_squared()];

    let stop = loop {
        if pre <= budget {
            break StopReason::BudgetMet;
        }
        if support.len() >= cap {
            break StopReason::SupportCap;
        }
        let corr = phi.ad_mul(&residual);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if support.contains(&i) {
                continue;
            }
            let score = corr[i].norm() / norms[i];
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let Some((pick, _)) = best else {
            break StopReason::SupportCap;
        };
        support.push(pick);

        let phi_s = select_columns(phi, &support);
        coef = least_squares(&phi_s, b);
        residual = b - &phi_s * &coef;
        let new_pre = (a * &residual).norm_squared();
        let new_res = residual.norm_squared();
        let prev_res = *residual_history.last().unwrap();
        pre_history.push(new_pre);
        residual_history.push(new_res);

        let stalled = pre - new_pre < config.min_pre_decrease && prev_res - new_res < config.min_pre_decrease;
        pre = new_pre;
        if pre <= budget {
            break StopReason::BudgetMet;
        }
        if stalled {
            break StopReason::Stagnation;
        }
    };

    let filter = SparseFilter::new(n, support.iter().copied().zip(coef.iter().copied()).collect())?;
    Ok(OmpOutcome {
        filter,
        stop,
        pre,
        pre_history,
        residual_history,
        selection_order: support,
        invalid_triple,
    })
}

/// Smallest support (then lexicographically first) whose PRE-optimal
/// coefficients meet `δ_eq`, searching sizes `0 ..= max_k`.
///
/// Returns `Ok(None)` if nothing up to `max_k` is feasible.
pub fn minimal_support_oracle(
    triple: &DictionaryTriple,
    delta_eq: f64,
    max_k: usize,
) -> Result<Option<SparseFilter>> {
    let n = triple.n_f();
    if n > ORACLE_MAX_NF {
        return Err(Error::SearchTooLarge { n_f: n, limit: ORACLE_MAX_NF });
    }
    let a_phi = triple.a() * triple.phi();
    let ab = triple.a() * triple.b();
    let budget = delta_eq + FEASIBILITY_RTOL * ab.norm_squared();

    if ab.norm_squared() <= budget {
        return Ok(Some(SparseFilter::zero(n)));
    }
    for k in 1..=max_k.min(n) {
        for cols in (0..n).combinations(k) {
            let m = select_columns(&a_phi, &cols);
            let x = least_squares(&m, &ab);
            let pre = (&m * &x - &ab).norm_squared();
            if pre <= budget {
                return SparseFilter::new(n, cols.into_iter().zip(x.iter().copied()).collect()).map(Some);
            }
        }
    }
    Ok(None)
}
