//! Finite-element rendering of the strip forms `q±` and their lowest eigenvalues.

mod banded;
mod dump;
mod eigen;
mod form;
mod study;

pub use banded::{BandedLdlt, BandedSym};
pub use dump::{read_coo, write_coo, CooMatrix};
pub use eigen::{count_below, lowest_eigenvalues_2d, lowest_eigenvalues_2d_with, Eigen2D, LanczosOptions};
pub use form::{assemble_form, ColumnNode, NodeRole, StripGrid, StripProblem, SymmetricOperator2D};
pub use study::{convergence_study, ConvergenceStudy, StudyLevel};
