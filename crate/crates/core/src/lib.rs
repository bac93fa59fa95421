//! Limit-point / limit-circle classification of singular Sturm–Liouville endpoints
//! with iterated-logarithm potentials.

pub mod criteria;
pub mod dd;
pub mod error;
pub mod formulas;
pub mod hardy;
pub mod iterlog;
pub mod multidim;
pub mod potdsl;
pub mod quad;
pub mod refsol;
pub mod special;
pub mod symalg;
pub mod weyl;

pub use error::{Error, Result};
