//! Quantum minimal learning machine.
//!
//! Fidelity Gram matrices of noisy input states are mapped linearly onto the
//! Gram matrices of their ideal counterparts; new noisy states are decoded to
//! the most similar stored ideal state. The crate also carries the classical
//! minimal learning machine, a small dense-matrix simulator with depolarizing
//! noise, and the sweep harness used to evaluate the mitigation quality.

pub mod bits;
pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod fmt;
pub mod io;
pub mod linalg;
pub mod mlm;
pub mod qmlm;
pub mod quantum;
pub mod select;
pub mod selftest;

pub use bits::BitString;
pub use error::{Error, Result};
