//! Ermakov-Milne-Pinney (EMP) equation machinery.
//!
//! The EMP equation rho'' + (E - V) rho = 1/rho^3 is covariant under
//! Darboux/SUSY transformations of its coefficient function. This crate
//! builds general EMP solutions from Schrödinger solution pairs, applies
//! first- and second-order transforms directly at the EMP level, verifies
//! the Ermakov-Lewis invariant, and finds bound-state spectra through the
//! Milne quantum-number function N(E) = (1/pi) Int rho^{-2} dx.

pub mod cli;
pub mod darboux;
pub mod diagnostics;
pub mod emp;
pub mod error;
pub mod grid;
pub mod interp;
pub mod numeric;
pub mod ode;
pub mod potentials;
pub mod quantization;
pub mod report;
pub mod schrodinger;
pub mod squarewell;

pub use error::{Error, Result};
