//! Finite-alphabet LDPC decoding with non-surjective framing functions.

pub mod channel;
pub mod code;
pub mod de;
pub mod error;
pub mod framing;
pub mod kernel;
pub mod pmf;
pub mod schedule;
pub mod search;
pub mod sim;

pub use error::{Error, Result};
