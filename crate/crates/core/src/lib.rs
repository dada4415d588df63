//! Maslov-type indices of linear periodic Hamiltonian systems and a Galerkin
//! linking solver for periodic orbits of Hamiltonian systems with anisotropic
//! growth.
//!
//! The crate is organized bottom-up:
//!
//! - [`symplectic`]: `J`, `Sp(2n)`, matrix paths, fundamental solutions.
//! - [`index`]: index pairs by Galerkin eigenvalue counting and monodromy,
//!   iteration inequalities.
//! - [`loopspace`]: truncated Fourier loops, the operator `A`, scaling `B_ρ`.
//! - [`hamiltonians`]: model interface, built-in families, hypothesis checks.
//! - [`solver`]: action functional, linking geometry, saddle search,
//!   subharmonics and certificates.
//! - [`run`]: configuration files and reproducible batch runs.

pub mod error;
pub mod hamiltonians;
pub mod index;
pub mod loopspace;
pub mod run;
pub mod solver;
pub mod symplectic;

pub use error::{Error, Result};

/// The chapters of the book under `book/`, compiled so that their code
/// blocks run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    pub mod conventions {}
    #[doc = include_str!("../../../book/src/index_pairs.md")]
    pub mod index_pairs {}
    #[doc = include_str!("../../../book/src/iteration.md")]
    pub mod iteration {}
    #[doc = include_str!("../../../book/src/models.md")]
    pub mod models {}
    #[doc = include_str!("../../../book/src/linking.md")]
    pub mod linking {}
    #[doc = include_str!("../../../book/src/saddle_search.md")]
    pub mod saddle_search {}
    #[doc = include_str!("../../../book/src/subharmonics.md")]
    pub mod subharmonics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    pub mod acceptance {}
}
