//! Lie group integrators on homogeneous manifolds.

pub mod actions;
pub mod algebra;
pub mod error;
pub mod integrators;
pub mod kernels;
pub mod lie;
pub mod study;
pub mod systems;

pub use error::{Error, Result};
