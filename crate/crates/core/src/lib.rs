//! Counting, membership testing and constant-delay enumeration of first-order
//! queries over databases of low degree, via quantifier elimination to a colored
//! graph and a quantifier-free formula.

pub mod bench;
pub mod canon;
pub mod corpus;
pub mod counting;
pub mod enumeration;
pub mod error;
pub mod generate;
pub mod local_eval;
pub mod model;
pub mod oracle;
pub mod qe;
pub mod query;
pub mod steps;
pub mod storing;
pub mod testing;

pub use error::{Error, Result};
