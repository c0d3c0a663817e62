//! Forward and inverse solvers for multi-term time-fractional diffusion.
//!
//! The forward problem `Σ p_j ∂_t^{α_j} u = Δu + p u` with boundary data
//! `u = λ(t) g` is solved by a modal Picard iteration and by an L1 time-stepping
//! scheme. Laplace transforms of boundary fluxes feed Dirichlet-to-Neumann data,
//! and variable-projection fitting recovers the number of terms, the orders and
//! the coefficient fields from samples of the spectral symbol.

pub mod caputo;
pub mod config;
pub mod error;
pub mod expr;
pub mod forward;
pub mod inverse;
pub mod io;
pub mod laplace_dtn;
pub mod linalg;
pub mod melf;
pub mod model;
pub mod pipeline;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
