//! Exact algebra for free groups and their automorphisms.
//!
//! The crate is `no_std` and only needs `alloc`. It covers reduced words
//! and endomorphisms of free groups, truncated Magnus expansions, the free
//! Lie algebra in Lyndon coordinates, higher Johnson homomorphisms, the
//! level-`p` congruence generators of `SL_n(Z)` and `Sp_2g(Z)`, and
//! central stabilization of finitely presented FI-modules.
//!
//! Every computation is exact: integer coefficients are arbitrary
//! precision and nothing here touches floating point.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod congruence;
mod error;
pub mod fimod;
pub mod freelie;
pub mod johnson;
pub mod magnus;
pub mod matrix;
pub mod snf;
pub mod sparse;
pub mod words;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
