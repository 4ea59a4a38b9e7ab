//! Metaplectic kernels, Berezin and Weyl symbols, Jacobi-group data and the
//! Moyal star product, each closed form paired with a quadrature or series
//! oracle.
//!
//! Conventions: `zw = Σ z_k w_k` (bilinear), `λ > 0`, and the Fock measure is
//! `dμ_λ = (λ/2π)^n dm`.

pub mod error;
pub mod gaussint;
pub mod heisenberg;
pub mod jacobi;
pub mod json;
pub mod matcore;
pub mod metaplectic;
pub mod moyal;
pub mod poly;
pub mod quadrature;
pub mod rng;
pub mod suites;
pub mod sympgroup;
pub mod weyl;

pub use error::{Error, Result};
pub use matcore::{CMat, C64};
