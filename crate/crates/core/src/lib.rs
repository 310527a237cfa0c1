//! Granular computing toolkit: granular operator spaces, rough inclusion
//! functions, granular inclusion matrices and their applications.

pub mod error;
pub mod fixtures;
pub mod grif;
pub mod inverse;
pub mod mereo;
pub mod norms;
pub mod rif;
pub mod par;
pub mod pilot;
pub mod rational;
pub mod report;
pub mod spaces;
pub mod subset;
pub mod tables;

/// Tag carried by every JSON document the toolkit emits.
pub const SCHEMA: &str = "granulum/1";

pub use error::{Error, Result};
pub use rational::{Rational, UnitRational};
pub use report::{Check, Report, Status};
pub use spaces::{GranularSpace, SetHgos, AbstractGgs};
pub use subset::{Subset, Universe};
