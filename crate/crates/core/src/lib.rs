//! Zero-sum blocks and arithmetic progressions in `{-r, s}`-sequences:
//! threshold formulas, extremal constructions, scanners and an exhaustive
//! oracle for small parameters.

pub mod arith;
pub mod constructions;
pub mod error;
pub mod formulas;
pub mod good_shift;
pub mod io;
pub mod oracle;
pub mod params;
pub mod scanners;
pub mod sequence;

pub use error::{Error, Result};
pub use params::{Alphabet, Params};
pub use sequence::{SignSeq, Weight};
