//! Intrusive and non-intrusive polynomial chaos solvers for reaction–diffusion
//! equations with one uniformly distributed random parameter on a periodic domain.

pub mod analysis;
pub mod chaos;
pub mod det;
pub mod error;
pub mod exec;
pub mod grid;
pub mod ipce;
pub mod models;
pub mod nipce;
pub mod samplers;
pub mod solvers;

pub use error::{Error, Result};
