//! Finite-dimensional laboratory for time-frequency structured operator
//! identification on the cyclic group Z_L.
//!
//! The crate models Hilbert-Schmidt operators on C^L through their kernel,
//! impulse response, spreading function and Kohn-Nirenberg symbol, builds
//! lattice-indexed operator families by shifting the spreading function,
//! measures Riesz bounds of operator and response families, and assembles
//! identification matrices for coefficient recovery from a single probing
//! signal. A lattice module supplies the two-dimensional Beurling density
//! calculus behind the √2 necessary condition, and a scenario layer
//! reproduces the worked examples and randomized falsification sweeps.

pub mod error;
pub mod hsop;
pub mod identify;
pub mod lattice;
pub mod scenario;
pub mod tf;

pub use error::{Error, Result};
pub use hsop::{make_h0, shift_spreading, H0Kind, HsOperator, Lambda4, Representation};
pub use identify::{
    identification_matrix, identify_report, rank_one_response, recover_coefficients,
    response_family, riesz_bounds, spreading_riesz_bounds, GaborSystem,
    IdentificationProblem, IdentificationReport, Recovery,
};
pub use lattice::{Lattice2, Lattice4};
pub use tf::{make_window, mod_norms, seq_norm_l1s, stft, zak, Signal, TfIndex, WindowKind};
