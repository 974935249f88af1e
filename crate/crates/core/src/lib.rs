//! Lie algebra closure, Wei-Norman coordinates and pulse synthesis for a
//! coupled nucleus/electron spin pair.

pub mod algebra;
pub mod checks;
pub mod closure;
pub mod control;
pub mod error;
pub mod matrix;
pub mod spin;
pub mod synth;
pub mod wei_norman;

pub use error::{Error, Result};
