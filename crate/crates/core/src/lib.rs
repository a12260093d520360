//! Modular symbols, p-adic Mazur–Tate elements and their Iwasawa invariants.

// index loops mirror the matrix and polynomial formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod arith;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod mazurtate;
pub mod modsym;
pub mod padic;

pub use error::{Error, Result};
