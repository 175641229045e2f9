//! Inverse spectral design for nearest-neighbour tight-binding chains.
//!
//! The crate is organised in layers:
//!
//! - [`spectral`]: the forward problem. Chains without on-site potentials,
//!   their (necessarily symmetric) spectra, and characteristic-polynomial
//!   coefficients computed by independent routes.
//! - [`inverse`]: the inverse problem. Newton iteration on the polynomial
//!   system relating squared couplings to a target spectrum, exploration of
//!   the isospectral surface, eigenvector-based reconstruction and the
//!   unitary-orbit picture of isospectral chains.
//! - [`models`]: exactly solvable coupling families.
//! - [`waveguide`]: turning couplings into right-angle bent waveguides whose
//!   trapped corner modes emulate the chain.
//! - [`helmholtz`]: a sparse finite-difference Dirichlet eigensolver used to
//!   verify the designs.
//!
//! ```
//! use isochain::spectral::{eig_jacobi, ChainCouplings};
//!
//! let chain = ChainCouplings::new(vec![1.0, 1.0])?;
//! let eig = eig_jacobi(&chain);
//! assert!((eig.spectrum.values()[2] - 2f64.sqrt()).abs() < 1e-12);
//! # Ok::<(), isochain::Error>(())
//! ```

pub mod csvio;
pub mod fit;
pub mod helmholtz;
pub mod inverse;
pub mod models;
pub mod rng;
pub mod spectral;
pub mod waveguide;

mod error;

pub use error::{Error, Result};
