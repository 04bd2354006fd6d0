//! Exact computations in the degree-two tautological ring of moduli spaces of
//! stable pointed curves in low genus.

pub mod error;
pub mod families;
pub mod euler;
pub mod graph;
pub mod linalg;
pub mod pullback;
pub mod quotient;
pub mod rational;
pub mod taut;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Q;
