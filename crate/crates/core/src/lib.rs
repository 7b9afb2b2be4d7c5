//! Exact construction of entire functions that take prescribed kinds of
//! values on finite point sets.
//!
//! All arithmetic is exact over `Q(i)[π]`. Magnitude claims involving π are
//! decided with rational interval enclosures.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bundle;
pub mod error;
pub mod gauss;
pub mod geometry;
pub mod interval;
pub mod pi_expr;
pub mod poly;
pub mod rational;
pub mod steering;
pub mod target;
pub mod verify;

pub use error::{Error, Result};
pub use gauss::GaussRat;
pub use pi_expr::PiExpr;
pub use poly::{ExpVec, MPoly};
pub use rational::Rat;
