//! Exact analysis of p-adic refinement masks.
//!
//! The crate works with refinement masks `h` supported on the grid
//! `{k / p^(N+1)}` inside the shift group `I_p` (reduced fractions mod 1 with
//! p-power denominators). It provides
//!
//! * exact arithmetic on `I_p`, p-adic rationals and Gaussian rationals
//!   ([`padic`], [`gaussian`]),
//! * the mask model with symbol evaluation and sum rules ([`mask`]),
//! * the subdivision operator and exact cascade iterates as step functions
//!   on balls of `Q_p` ([`subdivision`]),
//! * transition operators, admissible index sets and invariant subspaces
//!   ([`transition`]),
//! * q-norm joint spectral radius brackets ([`spectral`]),
//! * the L_q convergence certifier ([`convergence`]),
//! * moduli of continuity and best approximation ([`smoothness`]),
//! * wavelet mask completion ([`wavelet`]).

pub mod convergence;
pub mod error;
pub mod exponent;
pub mod gaussian;
pub mod linalg;
pub mod mask;
pub mod padic;
pub mod smoothness;
pub mod spectral;
pub mod subdivision;
pub mod transition;
pub mod wavelet;

pub use convergence::{certify, check_necessary, Certificate, CertifyOptions, Verdict};
pub use error::{Error, Result};
pub use exponent::Exponent;
pub use gaussian::GaussianRational;
pub use mask::{Mask, ValidationReport};
pub use padic::{IpElement, PadicRational};
pub use smoothness::SmoothnessReport;
pub use spectral::{JsrBracket, MatrixFamily, MatrixNorm};
pub use subdivision::{BallCell, BallStepFunction, Sequence};
pub use transition::{IndexSet, Subspace, TransitionMatrix};
pub use wavelet::WaveletMasks;
