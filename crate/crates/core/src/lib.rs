pub mod asymptotics;
pub mod compare;
pub mod disk;
pub mod elastic;
pub mod error;
pub mod fem;
pub mod specfun;
pub mod spectrum;
pub mod symbol;

pub use error::{Error, Result};
