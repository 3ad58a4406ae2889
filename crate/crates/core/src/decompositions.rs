//! Factorizations of the Hermitian Toeplitz autocorrelation `R_yy`.
//!
//! Four forms are provided, each consumed by a different family of
//! dictionaries:
//!
//! * `R = L Lᴴ` with `L` lower triangular and a positive real diagonal,
//! * `R = P Λ Pᴴ` with `P` unit lower triangular and `Λ` positive diagonal,
//! * `R = U D Uᴴ`, the exact Hermitian eigendecomposition (descending order),
//! * `C = U D Uᴴ` for a circulant surrogate `C` of `R`, where `U` is the
//!   unitary inverse-DFT matrix and `D` is the DFT of the surrogate's first
//!   column. Only `O(N_f log N_f)` work is needed for the spectrum.

use std::fmt;

use log::warn;
use nalgebra::{DVector, SymmetricEigen};
use rustfft::FftPlanner;

use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorizationKind {
    CholeskyLlh,
    LdlUnit,
    EigenExact,
    EigenCirculant,
}

impl FactorizationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CholeskyLlh => "CHOLESKY_LLH",
            Self::LdlUnit => "LDL_UNIT",
            Self::EigenExact => "EIGEN_EXACT",
            Self::EigenCirculant => "EIGEN_CIRCULANT",
        }
    }

    pub fn is_eigen(self) -> bool {
        matches!(self, Self::EigenExact | Self::EigenCirculant)
    }
}

impl fmt::Display for FactorizationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A factorization of `R_yy` together with the matrix it was computed from.
///
/// `factor` is `L`, `P` or `U` depending on the kind; `diag` is the diagonal of
/// `Λ` or `D` (all ones for the plain Cholesky form).
#[derive(Clone, Debug)]
pub struct Factorization {
    kind: FactorizationKind,
    factor: CMatrix,
    diag: DVector<f64>,
    source: CMatrix,
    clamped: usize,
}

impl Factorization {
    pub fn kind(&self) -> FactorizationKind {
        self.kind
    }

    pub fn factor(&self) -> &CMatrix {
        &self.factor
    }

    pub fn diag(&self) -> &DVector<f64> {
        &self.diag
    }

    /// The `R_yy` this factorization was built for.
    pub fn source(&self) -> &CMatrix {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    /// Number of surrogate eigenvalues raised to the floor (circulant only).
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    /// `factor · diag · factorᴴ`.
    pub fn reconstruct(&self) -> CMatrix {
        let scaled = scale_columns(&self.factor, self.diag.iter().copied());
        &scaled * self.factor.adjoint()
    }

    /// `Uᴴ x`; uses the FFT for the circulant form.
    pub fn apply_factor_adjoint(&self, x: &CVector) -> CVector {
        match self.kind {
            FactorizationKind::EigenCirculant => unitary_dft(x),
            _ => self.factor.adjoint() * x,
        }
    }
}

/// `M · diag(d)`.
pub(crate) fn scale_columns(m: &CMatrix, d: impl Iterator<Item = f64>) -> CMatrix {
    let mut out = m.clone();
    for (mut col, s) in out.column_iter_mut().zip(d) {
        col *= C64::new(s, 0.0);
    }
    out
}

/// `diag(d) · M`.
pub(crate) fn scale_rows(m: &CMatrix, d: impl Iterator<Item = f64>) -> CMatrix {
    let mut out = m.clone();
    for (mut row, s) in out.row_iter_mut().zip(d) {
        row *= C64::new(s, 0.0);
    }
    out
}

fn check_square(r: &CMatrix) -> Result<usize> {
    if r.nrows() != r.ncols() {
        return Err(Error::DimensionMismatch { expected: r.nrows(), got: r.ncols() });
    }
    if r.nrows() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    Ok(r.nrows())
}

/// `R = L Lᴴ`.
pub fn cholesky_llh(r: &CMatrix) -> Result<Factorization> {
    let n = check_square(r)?;
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = r[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = r[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(Factorization {
        kind: FactorizationKind::CholeskyLlh,
        factor: l,
        diag: DVector::from_element(n, 1.0),
        source: r.clone(),
        clamped: 0,
    })
}

/// `R = P Λ Pᴴ` with unit-diagonal `P`, computed directly rather than by
/// rescaling a Cholesky factor.
pub fn ldl_unit(r: &CMatrix) -> Result<Factorization> {
    let n = check_square(r)?;
    let mut p = CMatrix::identity(n, n);
    let mut d = DVector::zeros(n);
    for j in 0..n {
        let mut dj = r[(j, j)].re;
        for k in 0..j {
            dj -= p[(j, k)].norm_sqr() * d[k];
        }
        if !(dj > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: dj });
        }
        d[j] = dj;
        for i in j + 1..n {
            let mut s = r[(i, j)];
            for k in 0..j {
                s -= p[(i, k)] * p[(j, k)].conj() * d[k];
            }
            p[(i, j)] = s / dj;
        }
    }
    Ok(Factorization { kind: FactorizationKind::LdlUnit, factor: p, diag: d, source: r.clone(), clamped: 0 })
}

/// Exact Hermitian eigendecomposition, eigenvalues descending.
///
/// Ties keep the solver's index order. Each eigenvector is rotated so that its
/// first entry of largest magnitude is real and positive, which pins the
/// otherwise arbitrary phase.
pub fn eigen_exact(r: &CMatrix) -> Result<Factorization> {
    let n = check_square(r)?;
    let eig = SymmetricEigen::try_new(r.clone(), f64::EPSILON, 100_000).ok_or(Error::EigenNoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut u = CMatrix::zeros(n, n);
    let mut d = DVector::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        d[dst] = eig.eigenvalues[src];
        let col = eig.eigenvectors.column(src);
        let mut anchor = C64::new(0.0, 0.0);
        for z in col.iter() {
            if z.norm() > anchor.norm() * (1.0 + 1e-9) {
                anchor = *z;
            }
        }
        let phase = if anchor.norm() > 0.0 { anchor.conj() / anchor.norm() } else { C64::new(1.0, 0.0) };
        u.set_column(dst, &(col * phase));
    }
    Ok(Factorization { kind: FactorizationKind::EigenExact, factor: u, diag: d, source: r.clone(), clamped: 0 })
}

/// Hermitian Toeplitz matrix whose first column is `col`.
pub fn hermitian_toeplitz(col: &CVector) -> CMatrix {
    let n = col.len();
    CMatrix::from_fn(n, n, |i, j| if i >= j { col[i - j] } else { col[j - i].conj() })
}

/// Band-wrapped circulant surrogate of a banded Hermitian Toeplitz matrix.
///
/// `first_column[k]` for `k <= v` is `R[k][0]`. The surrogate's first column is
/// `c_k = first_column[k]`, `c_{N-k} = conj(first_column[k])` for `1 <= k <= v`,
/// zero elsewhere, so it agrees with `R` on the band. Eigenvalues below
/// `floor` are raised to it with a warning.
pub fn eigen_circulant(first_column: &CVector, v: usize, floor: f64) -> Result<Factorization> {
    let n = first_column.len();
    if n <= 2 * v {
        return Err(Error::CirculantTooShort { n_f: n, memory: v });
    }
    let c = circulant_band_column(first_column, v);
    let mut spectrum: Vec<C64> = c.iter().copied().collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);

    let scale = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let max_imag = spectrum.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > 1e-8 * scale {
        warn!("circulant spectrum has imaginary part {max_imag:e}; input is not Hermitian");
    }
    let mut clamped = 0;
    let d = DVector::from_iterator(
        n,
        spectrum.iter().map(|z| {
            if z.re < floor {
                clamped += 1;
                floor
            } else {
                z.re
            }
        }),
    );
    if clamped > 0 {
        warn!("circulant surrogate: {clamped} eigenvalue(s) raised to floor {floor:e}");
    }

    let mut source = CVector::zeros(n);
    for k in 0..=v {
        source[k] = first_column[k];
    }
    Ok(Factorization {
        kind: FactorizationKind::EigenCirculant,
        factor: unitary_idft_matrix(n),
        diag: d,
        source: hermitian_toeplitz(&source),
        clamped,
    })
}

/// First column of the band-wrapped circulant surrogate.
pub fn circulant_band_column(first_column: &CVector, v: usize) -> CVector {
    let n = first_column.len();
    let mut c = CVector::zeros(n);
    c[0] = first_column[0];
    for k in 1..=v.min(n.saturating_sub(1)) {
        c[k] = first_column[k];
        c[n - k] = first_column[k].conj();
    }
    c
}

/// Dense circulant matrix with first column `c`.
pub fn circulant(c: &CVector) -> CMatrix {
    let n = c.len();
    CMatrix::from_fn(n, n, |i, j| c[(i + n - j) % n])
}

/// `U` with `U[j][k] = exp(+2πi jk/N) / √N`.
pub fn unitary_idft_matrix(n: usize) -> CMatrix {
    let s = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |j, k| {
        let theta = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
        C64::from_polar(s, theta)
    })
}

/// `Uᴴ x = DFT(x) / √N`.
pub fn unitary_dft(x: &CVector) -> CVector {
    let n = x.len();
    let mut buf: Vec<C64> = x.iter().copied().collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let s = 1.0 / (n as f64).sqrt();
    CVector::from_iterator(n, buf.into_iter().map(|z| z * s))
}

/// `U x = IDFT(x) · √N` (unnormalized inverse FFT scaled to be unitary).
pub fn unitary_idft(x: &CVector) -> CVector {
    let n = x.len();
    let mut buf: Vec<C64> = x.iter().copied().collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let s = 1.0 / (n as f64).sqrt();
    CVector::from_iterator(n, buf.into_iter().map(|z| z * s))
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn forward_substitute(l: &CMatrix, b: &CVector) -> CVector {
    let n = l.nrows();
    let mut x = b.clone();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `Lᴴ x = b` for lower-triangular `L`.
pub fn adjoint_back_substitute(l: &CMatrix, b: &CVector) -> CVector {
    let n = l.nrows();
    let mut x = b.clone();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)].conj();
    }
    x
}

/// Solves `R x = b` for upper-triangular `R`.
pub fn back_substitute(r: &CMatrix, b: &CVector) -> CVector {
    let n = r.nrows();
    let mut x = b.clone();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= r[(i, k)] * x[k];
        }
        x[i] = s / r[(i, i)];
    }
    x
}

/// Relative Frobenius distance `‖a − b‖ / ‖b‖`.
pub fn relative_error(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm()
}
