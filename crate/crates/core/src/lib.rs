//! hp discontinuous Galerkin discretizations of the Poisson problem on uniform
//! Cartesian meshes, with a two-level Schwarz preconditioner built on the
//! splitting of the DG space into a boundary-node space and a conforming space.

pub mod assembly;
pub mod error;
pub mod diagnostics;
pub mod experiment;
pub mod gll;
pub mod mesh;
pub mod operator;
pub mod precond;
pub mod space;
pub mod spectral;
pub mod sparse;

pub use assembly::{assemble, AssembledSystem, DgConfig, Method};
pub use error::{Error, Result};
pub use experiment::{run, ExperimentSpec, ResultRow, Task};
pub use mesh::Mesh;
pub use precond::{Mode, Preconditioner};
pub use space::DofMap;
