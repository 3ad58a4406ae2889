//! Sparsifying dictionaries `(A, Φ, b)`.
//!
//! Each triple rewrites the excess-MSE constraint as `‖A(Φw − b)‖² ≤ δ_eq`:
//!
//! | kind       | A            | Φ          | b                |
//! |------------|--------------|------------|------------------|
//! | `CHOL_LH`  | I            | Lᴴ         | L⁻¹ r_Δ          |
//! | `CHOL_RYY` | L⁻¹          | R_yy       | r_Δ              |
//! | `LDL_PH`   | I            | Λ^½ Pᴴ     | Λ^-½ P⁻¹ r_Δ     |
//! | `EIG_DU`   | I            | D^½ Uᴴ     | D^-½ Uᴴ r_Δ      |
//! | `EIG_RYY`  | D^-½ Uᴴ      | R_yy       | r_Δ              |
//! | `EIG_UH`   | D^½          | Uᴴ         | D⁻¹ Uᴴ r_Δ       |
//!
//! `EIG_UH` satisfies the same identity but its data vector is not
//! compressible, so it is flagged invalid and kept out of default sweeps.

use std::fmt;
use std::str::FromStr;

use crate::decompositions::{
    forward_substitute, scale_rows, unitary_dft, Factorization, FactorizationKind,
};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DictionaryKind {
    CholLh,
    CholRyy,
    LdlPh,
    EigDu,
    EigRyy,
    EigUh,
}

impl DictionaryKind {
    pub const ALL: [DictionaryKind; 6] =
        [Self::CholLh, Self::CholRyy, Self::LdlPh, Self::EigDu, Self::EigRyy, Self::EigUh];

    /// Every kind except the invalid `EIG_UH`.
    pub const VALID: [DictionaryKind; 5] = [Self::CholLh, Self::CholRyy, Self::LdlPh, Self::EigDu, Self::EigRyy];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CholLh => "CHOL_LH",
            Self::CholRyy => "CHOL_RYY",
            Self::LdlPh => "LDL_PH",
            Self::EigDu => "EIG_DU",
            Self::EigRyy => "EIG_RYY",
            Self::EigUh => "EIG_UH",
        }
    }

    pub fn is_valid(self) -> bool {
        self != Self::EigUh
    }

    /// Which factorization family the triple is assembled from.
    pub fn needs_eigen(self) -> bool {
        matches!(self, Self::EigDu | Self::EigRyy | Self::EigUh)
    }

    fn accepts(self, f: FactorizationKind) -> bool {
        match self {
            Self::CholLh | Self::CholRyy => f == FactorizationKind::CholeskyLlh,
            Self::LdlPh => f == FactorizationKind::LdlUnit,
            Self::EigDu | Self::EigRyy | Self::EigUh => f.is_eigen(),
        }
    }
}

impl fmt::Display for DictionaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DictionaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown dictionary kind '{t}'")))
    }
}

/// One `(A, Φ, b)` assignment.
#[derive(Clone, Debug)]
pub struct DictionaryTriple {
    kind: DictionaryKind,
    a: CMatrix,
    phi: CMatrix,
    b: CVector,
    valid: bool,
    source: FactorizationKind,
    // √D for the FFT product D^½ Uᴴ w of a circulant EIG_DU
    sqrt_spectrum: Option<Vec<f64>>,
}

impl DictionaryTriple {
    pub fn kind(&self) -> DictionaryKind {
        self.kind
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn phi(&self) -> &CMatrix {
        &self.phi
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    pub fn valid(&self) -> bool {
        self.valid
    }

    pub fn source(&self) -> FactorizationKind {
        self.source
    }

    pub fn n_f(&self) -> usize {
        self.phi.ncols()
    }

    /// `Φ w`. For an `EIG_DU` triple over the circulant surrogate this runs in
    /// `O(N_f log N_f)` through the FFT.
    pub fn apply_phi(&self, w: &CVector) -> Result<CVector> {
        self.check_len(w.len())?;
        Ok(match &self.sqrt_spectrum {
            Some(s) => {
                let mut z = unitary_dft(w);
                for (zi, si) in z.iter_mut().zip(s) {
                    *zi *= *si;
                }
                z
            }
            None => &self.phi * w,
        })
    }

    /// Projected residual error `‖A(Φw − b)‖²`.
    pub fn projected_residual_error(&self, w: &CVector) -> Result<f64> {
        self.check_len(w.len())?;
        let r = &self.phi * w - &self.b;
        Ok((&self.a * r).norm_squared())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n_f() {
            return Err(Error::DimensionMismatch { expected: self.n_f(), got });
        }
        Ok(())
    }
}

/// Free-function form of [`DictionaryTriple::projected_residual_error`].
pub fn projected_residual_error(triple: &DictionaryTriple, w: &CVector) -> Result<f64> {
    triple.projected_residual_error(w)
}

/// Solves `L X = I` column by column.
fn lower_inverse(l: &CMatrix) -> CMatrix {
    let n = l.nrows();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = CVector::zeros(n);
        e[j] = C64::new(1.0, 0.0);
        out.set_column(j, &forward_substitute(l, &e));
    }
    out
}

/// Assembles the triple of `kind` from a compatible factorization.
pub fn build_triple(kind: DictionaryKind, f: &Factorization, r_delta: &CVector) -> Result<DictionaryTriple> {
    if !kind.accepts(f.kind()) {
        return Err(Error::IncompatibleFactorization { kind: kind.to_string(), found: f.kind().to_string() });
    }
    let n = f.dim();
    if r_delta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: r_delta.len() });
    }
    let identity = CMatrix::identity(n, n);
    let m = f.factor();
    let d = f.diag();
    let sqrt_d = || d.iter().map(|x| x.sqrt());
    let inv_sqrt_d = || d.iter().map(|x| 1.0 / x.sqrt());
    let scale_vec = |v: CVector, s: &mut dyn Iterator<Item = f64>| {
        CVector::from_iterator(n, v.iter().zip(s).map(|(z, k)| z * k))
    };

    let (a, phi, b) = match kind {
        DictionaryKind::CholLh => (identity, m.adjoint(), forward_substitute(m, r_delta)),
        DictionaryKind::CholRyy => (lower_inverse(m), f.source().clone(), r_delta.clone()),
        DictionaryKind::LdlPh => {
            let phi = scale_rows(&m.adjoint(), sqrt_d());
            let b = scale_vec(forward_substitute(m, r_delta), &mut inv_sqrt_d());
            (identity, phi, b)
        }
        DictionaryKind::EigDu => {
            let phi = scale_rows(&m.adjoint(), sqrt_d());
            let b = scale_vec(f.apply_factor_adjoint(r_delta), &mut inv_sqrt_d());
            (identity, phi, b)
        }
        DictionaryKind::EigRyy => (scale_rows(&m.adjoint(), inv_sqrt_d()), f.source().clone(), r_delta.clone()),
        DictionaryKind::EigUh => {
            let a = CMatrix::from_diagonal(&CVector::from_iterator(n, sqrt_d().map(|x| C64::new(x, 0.0))));
            let b = scale_vec(f.apply_factor_adjoint(r_delta), &mut d.iter().map(|x| 1.0 / x));
            (a, m.adjoint(), b)
        }
    };
    let sqrt_spectrum = (kind == DictionaryKind::EigDu && f.kind() == FactorizationKind::EigenCirculant)
        .then(|| sqrt_d().collect());
    Ok(DictionaryTriple { kind, a, phi, b, valid: kind.is_valid(), source: f.kind(), sqrt_spectrum })
}

/// Convenience: the factorization a kind needs, computed from `R_yy`.
pub fn factorize_for(kind: DictionaryKind, r_yy: &CMatrix) -> Result<Factorization> {
    use crate::decompositions::{cholesky_llh, eigen_exact, ldl_unit};
    match kind {
        DictionaryKind::CholLh | DictionaryKind::CholRyy => cholesky_llh(r_yy),
        DictionaryKind::LdlPh => ldl_unit(r_yy),
        _ => eigen_exact(r_yy),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_random_cir;
    use crate::correlations::{excess_mse, CorrelationSet};
    use crate::decompositions::{cholesky_llh, eigen_circulant, eigen_exact, ldl_unit};
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn triples(corr: &CorrelationSet) -> Vec<DictionaryTriple> {
        DictionaryKind::ALL
            .iter()
            .map(|&k| build_triple(k, &factorize_for(k, corr.r_yy()).unwrap(), corr.r_delta()).unwrap())
            .collect()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in DictionaryKind::ALL {
            assert_eq!(k.as_str().parse::<DictionaryKind>().unwrap(), k);
            assert_eq!(k.as_str().to_lowercase().parse::<DictionaryKind>().unwrap(), k);
        }
        assert!("CHOL".parse::<DictionaryKind>().is_err());
        assert_eq!(DictionaryKind::ALL.iter().filter(|k| !k.is_valid()).count(), 1);
    }

    #[test]
    fn scaled_identity_chol_lh() {
        let cst = 2.25;
        let r = CMatrix::identity(4, 4) * c(cst, 0.0);
        let rd = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.5), c(0.0, 0.0)]);
        let t = build_triple(DictionaryKind::CholLh, &cholesky_llh(&r).unwrap(), &rd).unwrap();
        assert_eq!(t.a(), &CMatrix::identity(4, 4));
        assert!((t.phi() - CMatrix::identity(4, 4) * c(1.5, 0.0)).norm() < 1e-15);
        assert!((t.b() - &rd / c(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn incompatible_factorization_rejected() {
        let r = CMatrix::identity(3, 3);
        let rd = CVector::zeros(3);
        let chol = cholesky_llh(&r).unwrap();
        let eig = eigen_exact(&r).unwrap();
        assert!(build_triple(DictionaryKind::EigDu, &chol, &rd).is_err());
        assert!(build_triple(DictionaryKind::CholLh, &eig, &rd).is_err());
        assert!(build_triple(DictionaryKind::LdlPh, &chol, &rd).is_err());
        assert!(build_triple(DictionaryKind::CholLh, &chol, &CVector::zeros(2)).is_err());
    }

    #[test]
    fn all_six_triples_encode_excess_mse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for seed in 0..5 {
            let corr = CorrelationSet::from_cir(&generate_random_cir(5, seed), 35, 10.0, 20).unwrap();
            let ts = triples(&corr);
            for _ in 0..20 {
                let w = CVector::from_fn(35, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
                let xe = excess_mse(&w, &corr).unwrap();
                for t in &ts {
                    let pre = t.projected_residual_error(&w).unwrap();
                    assert!((pre - xe).abs() <= 1e-8 * xe, "{}: {pre} vs {xe}", t.kind());
                }
            }
            for t in &ts {
                assert!(t.projected_residual_error(corr.wiener()).unwrap() < 1e-10);
                let z = t.projected_residual_error(&CVector::zeros(35)).unwrap();
                assert!((z - (1.0 - corr.xi_m())).abs() < 1e-10);
                assert_eq!(t.valid(), t.kind() != DictionaryKind::EigUh);
            }
        }
    }

    #[test]
    fn dictionaries_have_full_rank() {
        let corr = CorrelationSet::from_cir(&generate_random_cir(5, 8), 35, 10.0, 20).unwrap();
        for t in triples(&corr) {
            let sv = t.phi().clone().singular_values();
            assert!(sv.min() > 1e-8 * sv.max(), "{}", t.kind());
        }
    }

    #[test]
    fn ldl_and_cholesky_dictionaries_coincide() {
        let corr = CorrelationSet::from_cir(&generate_random_cir(4, 2), 20, 30.0, 12).unwrap();
        let lh = build_triple(DictionaryKind::CholLh, &cholesky_llh(corr.r_yy()).unwrap(), corr.r_delta()).unwrap();
        let ph = build_triple(DictionaryKind::LdlPh, &ldl_unit(corr.r_yy()).unwrap(), corr.r_delta()).unwrap();
        assert!((lh.phi() - ph.phi()).norm() < 1e-10 * lh.phi().norm());
        assert!((lh.b() - ph.b()).norm() < 1e-10 * lh.b().norm());
    }

    #[test]
    fn circulant_eig_du_applies_via_fft() {
        let corr = CorrelationSet::from_cir(&generate_random_cir(5, 4), 35, 10.0, 20).unwrap();
        let f = eigen_circulant(&corr.r_yy().column(0).into_owned(), 5, 0.1).unwrap();
        let t = build_triple(DictionaryKind::EigDu, &f, corr.r_delta()).unwrap();
        assert_eq!(t.source(), FactorizationKind::EigenCirculant);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let w = CVector::from_fn(35, |_, _| c(rng.random::<f64>(), rng.random::<f64>()));
            let fast = t.apply_phi(&w).unwrap();
            let dense = t.phi() * &w;
            assert!((fast - dense).norm() < 1e-8);
        }
        // Φᴴ Φ is the surrogate, so the circulant PRE only approximates ξ_e
        let gram = t.phi().adjoint() * t.phi();
        assert!((gram - f.reconstruct()).norm() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let corr = CorrelationSet::from_cir(&generate_random_cir(2, 4), 8, 10.0, 4).unwrap();
        let t = &triples(&corr)[0];
        assert!(t.projected_residual_error(&CVector::zeros(7)).is_err());
        assert!(t.apply_phi(&CVector::zeros(9)).is_err());
    }
}
