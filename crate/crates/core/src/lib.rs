pub mod analysis;
pub mod classical;
pub mod error;
pub mod io;
pub mod majorana;
pub mod mbqc;
pub mod platonic;
pub mod quadrature;
pub mod roots;
pub mod search;
pub mod solver;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use state::{BlochPoint, ComplexScalar, SpinRotation, StateClassification, SymmetricState};
