#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod error;
pub mod gim;
pub mod harness;
pub mod io;
pub mod lambda;
pub mod matrix;
pub mod reflections;
pub mod words;

pub use error::{Error, Result};
