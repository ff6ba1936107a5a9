//! Entanglement and mutual-information harvesting by two Unruh-DeWitt
//! detectors near a perfectly reflecting plane.
//!
//! Units: the switching width is fixed to one, so gaps, separations and
//! distances are the dimensionless combinations `Omega sigma`, `L / sigma`
//! and `dz / sigma`. Every state entry and every measure is reported per
//! `lambda^2`.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod measures;
pub mod model;
pub mod optimize;
pub mod oracle;
pub(crate) mod parallel;
pub mod specfun;

pub use error::{AsymptoticError, ModelError, OptimizeError, OracleError, SpecfunError};
pub use measures::{concurrence, mutual_information, rescale_report, CorrelationReport};
pub use model::{Alignment, DetectorPair, Geometry, TwoDetectorState};
pub use specfun::ComplexValue;
