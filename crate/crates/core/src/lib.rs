//! Construction, search, distance estimation and code-capacity simulation
//! for bivariate-bicycle (BB) and coprime-BB quantum LDPC codes.

pub mod codes;
pub mod decoder;
pub mod distance;
pub mod error;
pub mod fixtures;
pub mod gf2;
pub mod matrix_io;
pub mod polyring;
pub mod search;
pub mod seeding;
pub mod sim;

pub use error::{Error, Result};
