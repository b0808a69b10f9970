//! Exact symbolic calculus of tangent-bundle-valued differential forms on
//! coordinate patches: Frolicher-Nijenhuis brackets, calibration checks,
//! V-data with the induced L-infinity multibrackets, and formal
//! Maurer-Cartan deformation solving. All arithmetic is over the rationals;
//! every identity is tested as literal equality.

pub mod calibration;
pub mod deformation;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod linalg;
pub mod poly;
pub mod vdata;

pub use error::Error;
pub use forms::{ConstMetric, MultiIndex, PatchMap, ScalarForm, VectorForm};
pub use poly::{JetPoly, PatchSplit, Point, Rational};
pub use vdata::{NormalValuedForm, VData};

pub type Result<T> = std::result::Result<T, Error>;
