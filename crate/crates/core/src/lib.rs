//! Sparse FIR linear equalizer design.
//!
//! The excess mean-square-error constraint of a length-`N_f` linear equalizer
//! is rewritten as a sparse approximation problem `‖A(Φw − b)‖² ≤ δ_eq` over
//! one of several square dictionaries derived from a factorization of the
//! received-signal autocorrelation `R_yy`. Orthogonal matching pursuit with a
//! projected-residual stopping rule then picks the active taps.
//!
//! Module map:
//!
//! * [`channel`]: impulse responses and the Toeplitz convolution matrix
//! * [`correlations`]: `R_yy`, `r_Δ` and the MSE functionals
//! * [`decompositions`]: Cholesky, unit-LDL, Hermitian eigen and circulant eigen
//! * [`dictionaries`]: the `(A, Φ, b)` triples
//! * [`sparse_solver`]: OMP and an exhaustive minimal-support oracle
//! * [`equalizer`]: the end-to-end design pipeline and the significant-taps baseline
//! * [`coherence`]: worst-case coherence and its channel bounds
//! * [`simulation`]: QAM link Monte Carlo and SER counting
//! * [`experiments`]: CSV-producing experiment drivers used by the `sparseq` binary
//!
//! ```
//! use sparseq::{design_sparse, generate_random_cir, DesignSpec, DictionaryKind};
//!
//! let h = generate_random_cir(5, 42);
//! let spec = DesignSpec::new(35, 10.0, 0.25, DictionaryKind::EigDu);
//! let report = design_sparse(&spec, &h)?;
//! assert!(report.eta_db <= 0.25 + 1e-6);
//! println!("{} active taps, {:.3} dB loss", report.filter.len(), report.eta_db);
//! # Ok::<(), sparseq::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod coherence;
pub mod correlations;
pub mod decompositions;
pub mod dictionaries;
pub mod equalizer;
mod error;
pub mod experiments;
pub mod rng;
pub mod simulation;
pub mod sparse_solver;

pub use error::{Error, Result};

/// Complex sample type used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

pub use channel::{convolution_matrix, generate_random_cir, worst_case_cir, ChannelMatrix, Cir};
pub use coherence::{worst_case_coherence, CoherenceReport};
pub use correlations::CorrelationSet;
pub use decompositions::{Factorization, FactorizationKind};
pub use dictionaries::{build_triple, DictionaryKind, DictionaryTriple};
pub use equalizer::{design_sparse, DesignReport, DesignSpec, EigenMethod};
pub use sparse_solver::{omp, OmpConfig, OmpOutcome, SparseFilter, StopReason};
