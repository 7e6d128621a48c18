//! Half-ball nonlocal gradient, divergence, diffusion and curl operators on
//! periodic domains, applied through their Fourier symbols, with closed-form
//! Stokes, Helmholtz, div-curl and Navier solvers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod kernels;
pub mod onedim;
pub mod operators;
pub mod quadrature;
pub mod results;
pub mod solvers;
pub mod symbols;

pub use error::{Error, Result};
pub use fields::{random_field, Lattice, SpectralField};
pub use kernels::{KernelFamily, KernelSpec};
pub use onedim::{EvenKernel, RhoKernel};
pub use quadrature::{Orientation, QuadratureRule, QuadratureSettings, RadialRule};
pub use results::{fit_slope, ResultTable, Value};
pub use solvers::{NavierModeDecomposition, StokesSolution, Trajectory};
pub use symbols::{StarSymbol, Symbol, SymbolTable};
