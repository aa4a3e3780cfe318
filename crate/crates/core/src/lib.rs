//! Zeta functions of varieties over finite fields, motivic measures with
//! exponentials, zeta-based entropies and divergences, and the classical,
//! quantum and motivic information geometry built on top of them.
//!
//! Everything is sized for exhaustive enumeration on a laptop: fields of
//! order up to a few thousand, truncation degrees around ten and parameter
//! spaces of small dimension.

pub mod algebra;
pub mod cat;
pub mod cone;
pub mod entropy;
pub mod error;
pub mod ffield;
pub mod infogeo;
pub mod motive;
pub mod numeric;
pub mod poly;
pub mod series;
pub mod variety;

pub use error::{Error, Result};
