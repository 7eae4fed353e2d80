//! Full-correlation Bell inequalities: construction by lifting, exact
//! validity and tightness checks against the correlation polytope, and GHZ
//! violations.

pub mod catalog;
pub mod equivalence;
pub mod error;
pub mod lift;
pub mod limits;
pub mod linalg;
pub mod model;
pub mod polytope;
pub mod quantum;
pub mod reproduce;

pub use error::{Error, Result};
pub use limits::Limits;
pub use model::{FullCorrelationInequality, GeneralInequality, Rational, Scenario, Vertex};
