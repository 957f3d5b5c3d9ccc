//! Finite-dimensional operator algebras, states and Kraus operations, with
//! tools for deciding, creating and destroying entanglement between
//! commuting subsystems.
//!
//! All objects are dense complex matrices. A bipartite space `C^dA (x) C^dB`
//! uses the composite index `i*dB + j`.

pub mod algebra;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod formats;
pub mod lab;
pub mod numerics;
pub mod operations;
pub mod random;
pub mod states;

pub use algebra::{commutant, generate_algebra, OperatorAlgebra, Structure};
pub use entanglement::{decide_entanglement, SeparabilityVerdict};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, Dims, Factor};
pub use operations::{compose, KrausOperation, UpdateOutcome};
pub use states::{ProductCertificate, StateFunctional};
