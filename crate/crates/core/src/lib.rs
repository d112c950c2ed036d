pub mod benedicks;
pub mod config;
pub mod error;
pub mod heisenberg;
pub mod induced;
pub mod lattice;
pub mod operator;
pub mod rational;
pub mod schrodinger;
pub mod verify;

pub use error::{Error, Result};
