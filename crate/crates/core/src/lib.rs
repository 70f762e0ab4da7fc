pub mod algorithm;
pub mod cli;
pub mod convex;
pub mod equilibrium;
pub mod error;
pub mod mappings;
pub mod space;

mod vecops;

pub use error::{Error, Result};
