//! Channel impulse responses and the convolution matrix.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{rng, CMatrix, Error, Result, C64};

/// Complex channel impulse response `h_0 … h_v` of memory `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cir {
    taps: Vec<C64>,
}

impl Cir {
    pub fn new(taps: Vec<C64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidArgument("impulse response needs at least one tap".into()));
        }
        Ok(Self { taps })
    }

    /// Builds a response from real taps.
    pub fn from_real(taps: &[f64]) -> Result<Self> {
        Self::new(taps.iter().map(|&t| C64::new(t, 0.0)).collect())
    }

    /// Channel memory `v`; there are `v + 1` taps.
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    pub fn taps(&self) -> &[C64] {
        &self.taps
    }

    /// `Σ |h_i|²`
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }

    /// Copy scaled to unit energy.
    pub fn normalized(&self) -> Result<Self> {
        let e = self.energy();
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero-energy channel".into()));
        }
        let s = 1.0 / e.sqrt();
        Ok(Self { taps: self.taps.iter().map(|t| t * s).collect() })
    }

    /// Objective maximized by the worst-case channel: `Σ_{i=1}^{v} |h_i h_{i-1}^*|`.
    pub fn adjacent_product_sum(&self) -> f64 {
        self.taps.windows(2).map(|w| (w[1] * w[0].conj()).norm()).sum()
    }
}

/// Unit-energy channel with i.i.d. circularly-symmetric complex Gaussian taps.
pub fn generate_random_cir(v: usize, seed: u64) -> Cir {
    random_cir(v, &mut rng::seeded(seed))
}

/// Same as [`generate_random_cir`] but drawing from a caller-supplied stream.
pub fn random_cir<R: Rng + ?Sized>(v: usize, rng: &mut R) -> Cir {
    // per-tap variance 1/(v+1) split evenly over I and Q
    let scale = (0.5 / (v + 1) as f64).sqrt();
    loop {
        let taps: Vec<C64> = (0..=v)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re * scale, im * scale)
            })
            .collect();
        if let Ok(cir) = (Cir { taps }).normalized() {
            return cir;
        }
    }
}

/// Largest eigenvalue `2 cos(π / (v + 2))` of the `(v+1) × (v+1)` matrix with
/// ones on the first super- and sub-diagonal.
pub fn worst_case_eigenvalue(v: usize) -> f64 {
    2.0 * (PI / (v as f64 + 2.0)).cos()
}

/// The unit-energy channel maximizing `Σ |h_i h_{i-1}^*|`:
/// `h_j = sqrt(2/(v+2)) sin(jπ/(v+2))`, `j = 1 … v+1`.
pub fn worst_case_cir(v: usize) -> Result<Cir> {
    if v == 0 {
        return Err(Error::InvalidArgument("worst-case channel needs memory v >= 1".into()));
    }
    let m = v as f64 + 2.0;
    let amp = (2.0 / m).sqrt();
    let taps = (1..=v + 1)
        .map(|j| C64::new(amp * (j as f64 * PI / m).sin(), 0.0))
        .collect();
    Ok(Cir { taps })
}

/// `N_f × (N_f + v)` Toeplitz convolution matrix; row `i` holds `h_0 … h_v`
/// starting at column `i`.
#[derive(Clone, Debug)]
pub struct ChannelMatrix {
    entries: CMatrix,
    memory: usize,
}

impl ChannelMatrix {
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn n_f(&self) -> usize {
        self.entries.nrows()
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// The channel taps, read back from row 0.
    pub fn taps(&self) -> Vec<C64> {
        (0..=self.memory).map(|j| self.entries[(0, j)]).collect()
    }
}

pub fn convolution_matrix(cir: &Cir, n_f: usize) -> Result<ChannelMatrix> {
    if n_f == 0 {
        return Err(Error::InvalidArgument("filter length N_f must be >= 1".into()));
    }
    let v = cir.memory();
    let h = cir.taps();
    let entries = CMatrix::from_fn(n_f, n_f + v, |i, j| {
        if j >= i && j - i <= v {
            h[j - i]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(ChannelMatrix { entries, memory: v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CVector;
    use nalgebra::{DMatrix, SymmetricEigen};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn random_cir_has_unit_energy() {
        let h = generate_random_cir(5, 11);
        assert_eq!(h.taps().len(), 6);
        assert_eq!(h.memory(), 5);
        assert!((h.energy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn memoryless_random_cir_is_unit_magnitude() {
        for seed in 0..10 {
            let h = generate_random_cir(0, seed);
            assert_eq!(h.taps().len(), 1);
            assert!((h.taps()[0].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_cir_is_seeded() {
        assert_eq!(generate_random_cir(3, 42), generate_random_cir(3, 42));
        assert_ne!(generate_random_cir(3, 42), generate_random_cir(3, 43));
    }

    #[test]
    fn worst_case_v1_closed_form() {
        let h = worst_case_cir(1).unwrap();
        for t in h.taps() {
            assert!((t.re - 0.5f64.sqrt()).abs() < 1e-12);
            assert_eq!(t.im, 0.0);
        }
    }

    #[test]
    fn worst_case_rejects_memoryless() {
        assert!(worst_case_cir(0).is_err());
    }

    fn tridiagonal_ones(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 })
    }

    #[test]
    fn worst_case_matches_numeric_eigensolver() {
        for v in 1..=12 {
            let eig = SymmetricEigen::new(tridiagonal_ones(v + 1));
            let (imax, lmax) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::MIN), |acc, (i, &l)| if l > acc.1 { (i, l) } else { acc });
            assert!((lmax - worst_case_eigenvalue(v)).abs() < 1e-10);
            let vec = eig.eigenvectors.column(imax);
            let sign = vec[0].signum();
            let h = worst_case_cir(v).unwrap();
            for (a, b) in h.taps().iter().zip(vec.iter()) {
                assert!((a.re - sign * b).abs() < 1e-8, "v={v}");
            }
            assert!((h.energy() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn worst_case_eigenvalue_v5() {
        let eig = SymmetricEigen::new(tridiagonal_ones(6));
        let lmax = eig.eigenvalues.max();
        assert!((lmax - 1.801_937_735_804_838).abs() < 1e-12);
        assert!((worst_case_eigenvalue(5) - lmax).abs() < 1e-12);
    }

    /// Projected gradient ascent of `Σ a_i a_{i-1}` on the unit sphere. Phases
    /// never help, so nonnegative real amplitudes suffice.
    fn numeric_max_adjacent_sum(v: usize, starts: u64) -> f64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut best = 0.0f64;
        for _ in 0..starts {
            let mut a: Vec<f64> = (0..=v).map(|_| rng.random::<f64>() + 0.01).collect();
            for _ in 0..5000 {
                let n = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                a.iter_mut().for_each(|x| *x /= n);
                let g: Vec<f64> = (0..=v)
                    .map(|i| {
                        let l = if i > 0 { a[i - 1] } else { 0.0 };
                        let r = if i < v { a[i + 1] } else { 0.0 };
                        l + r
                    })
                    .collect();
                for (x, gi) in a.iter_mut().zip(&g) {
                    *x = (*x + 0.1 * gi).max(0.0);
                }
            }
            let n = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let val: f64 = a.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n * n);
            best = best.max(val);
        }
        best
    }

    #[test]
    fn worst_case_maximizes_adjacent_products() {
        for v in 1..=3 {
            let closed = worst_case_cir(v).unwrap().adjacent_product_sum();
            let numeric = numeric_max_adjacent_sum(v, 8);
            assert!((closed - numeric).abs() < 1e-6, "v={v}: {closed} vs {numeric}");
            // and random unit-energy channels never beat it
            for seed in 0..200 {
                assert!(generate_random_cir(v, seed).adjacent_product_sum() <= closed + 1e-12);
            }
        }
    }

    #[test]
    fn memoryless_convolution_is_identity() {
        let h = Cir::from_real(&[1.0]).unwrap();
        let m = convolution_matrix(&h, 3).unwrap();
        assert_eq!(m.entries(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn two_tap_convolution_layout() {
        let (h0, h1) = (c(1.0, 2.0), c(-0.5, 0.25));
        let m = convolution_matrix(&Cir::new(vec![h0, h1]).unwrap(), 2).unwrap();
        let z = c(0.0, 0.0);
        let expected = CMatrix::from_row_slice(2, 3, &[h0, h1, z, z, h0, h1]);
        assert_eq!(m.entries(), &expected);
        assert_eq!(m.taps(), vec![h0, h1]);
    }

    #[test]
    fn default_dimensions() {
        let m = convolution_matrix(&generate_random_cir(5, 1), 35).unwrap();
        assert_eq!(m.entries().shape(), (35, 40));
        assert!(convolution_matrix(&generate_random_cir(5, 1), 0).is_err());
    }

    proptest! {
        #[test]
        fn convolution_matches_direct_sum(
            v in 0usize..6,
            n_f in 1usize..12,
            seed in any::<u64>(),
        ) {
            let h = generate_random_cir(v, seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            // x holds x_k, x_{k-1}, …, x_{k-N_f-v+1}
            let x: Vec<C64> = (0..n_f + v)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let y = convolution_matrix(&h, n_f).unwrap().entries() * CVector::from_vec(x.clone());
            for i in 0..n_f {
                // y_{k-i} = Σ_l h_l x_{k-i-l}
                let direct: C64 = (0..=v).map(|l| h.taps()[l] * x[i + l]).sum();
                prop_assert!((y[i] - direct).norm() < 1e-12);
            }
            // Toeplitz structure
            let m = convolution_matrix(&h, n_f).unwrap();
            let e = m.entries();
            for i in 1..n_f {
                for j in 1..n_f + v {
                    prop_assert_eq!(e[(i, j)], e[(i - 1, j - 1)]);
                }
            }
        }
    }
}
