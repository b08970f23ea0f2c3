//! Simulation, decoding and certification of a magic state prepared in the
//! [[15,1,3]] quantum Reed-Muller code and switched into the Steane code.

pub mod circuit;
pub mod codes;
pub mod decode;
pub mod error;
pub mod layout;
pub mod pauli;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
