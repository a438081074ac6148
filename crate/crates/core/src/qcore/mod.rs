//! Small-dimension complex linear algebra and quantum-state primitives.

mod linalg;
mod matrix;
mod spin;
mod state;

pub use linalg::{expm, hermitian_eigenvalues};
pub use matrix::{kron, ComplexMatrix, C64};
pub use spin::{rotation_unitary, spin_operators, Spin, SpinOps};
pub use state::{dephase, diag_probabilities, partial_trace, project_branch, DensityMatrix};
pub use state::{HERMITIAN_TOL, PSD_FLOOR, TRACE_TOL};
