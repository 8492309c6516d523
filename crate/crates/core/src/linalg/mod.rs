//! Small dense complex linear algebra and the validated state types.

pub mod eig;
pub mod matrix;
pub mod state;

pub use eig::{hermitian_eig, Spectrum, DEFAULT_RANK_TOL};
pub use matrix::{inner, norm, overlap_sqr, CMatrix};
pub use state::{support_inverse, validate_density, DensityMatrix, PureState};
