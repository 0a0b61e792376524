pub mod analysis;
pub mod cli;
pub mod constructions;
pub mod covers;
pub mod error;
pub mod hyperbolic;
pub mod io;
pub mod spaces;

pub use error::{Error, Result};
