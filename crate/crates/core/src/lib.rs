//! Lifting holonomy groups through the double cover `Spin(n) -> SO(n)` and
//! counting the spinors they fix.
//!
//! The pipeline is: build a candidate holonomy group ([`lie`] for the
//! identity component, [`catalog`] for the standard discrete extensions),
//! enumerate the sign choices that lift its discrete generators to
//! `Spin(n)` ([`lift`]), keep the choices that are group homomorphisms, and
//! measure the joint fixed space of each valid lift on the spin
//! representation ([`criterion`]).

pub mod catalog;
pub mod cli;
pub mod clifford;
pub mod criterion;
pub mod error;
pub mod lie;
pub mod lift;
pub mod linalg;
pub mod props;
pub mod spin_rep;

pub use error::{Result, SpinError};

/// Largest ambient dimension the engine accepts.
pub const MAX_DIM: usize = 20;

/// Dimension cap applied by the command line front end unless raised.
pub const DEFAULT_MAX_N: usize = 16;
