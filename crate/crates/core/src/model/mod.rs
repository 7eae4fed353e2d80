//! Scenarios, inequality representations, deterministic strategies and the
//! JSON interchange format.

mod inequality;
pub mod json;
pub mod rational;
mod scenario;
mod vertex;

pub use inequality::{
    FullCorrelationInequality, GeneralInequality, PartialTuple, SettingTuple,
};
pub use rational::Rational;
pub use scenario::{Scenario, MAX_SETTINGS_PER_PARTY};
pub use vertex::Vertex;
pub(crate) use vertex::low_mask;
