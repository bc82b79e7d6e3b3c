pub mod error;
pub mod fp;
pub mod hecke;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod padic;
pub mod tori;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{QuadLattice, Sublattice};
