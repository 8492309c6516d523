//! Pure-state decompositions: mixing, equalizing and the unbiased-pair constructors.

mod constructors;
mod decomposition;
mod equalize;
mod mixing;

pub(crate) use constructors::unbiased_to_two;
pub use constructors::{
    bloch_vector, deflate, max_mixed_pair, max_weight, pure_sigma_pair, qubit_pair, rank2_sigma_pair,
    rank2_sigma_pair_traced, state_from_bloch, DeflationStep,
};
pub use decomposition::{
    verify_pair, CertificateReport, Check, Decomposition, DecompositionPair, CERTIFICATE_TOL, RECONSTRUCTION_TOL,
    WEIGHT_SUM_TOL,
};
pub use equalize::{
    equalize, equalize_from, equalize_traced, unbiased_against, EqualizeOptions, EqualizeTrace, DEFAULT_EQUALIZE_TOL,
};
pub(crate) use mixing::mix_vectors;
pub use mixing::{continuous_swap, eigen_decomposition, leading_rows, mix, swap_unitary, UNITARITY_TOL};
