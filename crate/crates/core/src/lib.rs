//! Open-quantum-system dynamics in the Bargmann (holomorphic) representation.
//!
//! Bosonic states are truncated polynomials in phase-space variables,
//! fermionic two-level modes live in a Grassmann algebra, and operators are
//! words over `z`, `d/dz`, `theta`, `d/dtheta`. On top of that sit a
//! Lindblad solver in the truncated Fock basis and the noise-driven quantum
//! absorption refrigerator with its closed-form cooling current.

// negated float comparisons are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evalcost;
pub mod grassmann;
pub mod holo;
pub mod lindblad;
pub mod operators;
pub mod transform;

pub use error::{Error, Result};
pub use grassmann::{FermiWord, GrassmannElement, MixedState};
pub use holo::{BargmannPoint, HoloState, MultiIndex, Parity, Truncated};
pub use lindblad::{
    DensityMatrix, LindbladGenerator, Liouvillian, NoiseSpec, RefrigeratorModel, RefrigeratorParams,
    SteadyStateReport, ThermalBath,
};
pub use num_complex::Complex64;
pub use operators::{CMatrix, Generator, MatrixRep, OperatorExpr, RefrigeratorHamiltonianParams};
