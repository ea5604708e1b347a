//! Exact-arithmetic library for x-linked optimal embeddings of real
//! quadratic orders into Eichler orders of indefinite rational quaternion
//! algebras: which algebra admits linking, how many linked embedding pairs
//! exist at each level/orientation/sign, and total intersection numbers of
//! the associated closed geodesics.

pub mod arith;
pub mod error;
pub mod intersection;
pub mod linking;
pub mod oracles;
pub mod orders;
pub mod quadclass;
pub mod quatalg;
pub mod rat;

pub use error::{Error, Result};
