//! Bethe-ansatz toolkit for one-dimensional particles with contact interactions:
//! boundary conditions, two-body Y-operators, Yang-Baxter checks, Bethe states,
//! bound states and factorized scattering matrices.

pub mod bethe;
pub mod bound_states;
pub mod boundary;
pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod scattering;
pub mod tensor;
pub mod yang_ops;
pub mod ybe_check;

pub use bethe::{assemble, BetheState};
pub use boundary::{BoundaryCondition, Coupling, MatrixBC, NonseparatedBC, SeparatedBC};
pub use error::{Error, Result};
pub use tensor::{ComplexMatrix, ComplexVector, SpinSpace, Statistics};
pub use yang_ops::{Interaction, YOperator};
