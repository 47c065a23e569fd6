//! Numerical lab for the weak-coupling limit of the Pauli-Fierz model.
//!
//! Bottom-up: [`quad`] and [`formfactor`] feed the spectral-integral
//! energies in [`energy`]; [`wienerhopf`] discretizes the truncated kernel
//! operator; [`hermite`] covers the generalized Hermite polynomials;
//! [`fockdesk`] checks the limit theorems on truncated Fock spaces; [`scan`]
//! and [`cli`] drive batch runs. The runnable programs under `examples/`
//! show one capability each.

pub mod cli;
pub mod energy;
pub mod error;
pub mod fockdesk;
pub mod formfactor;
pub mod hermite;
pub mod quad;
pub mod scan;
pub mod wienerhopf;

pub use error::{Error, Result};
