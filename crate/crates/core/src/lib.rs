pub mod certify;
pub mod chart;
pub mod classify;
pub mod curvature;
pub mod expr;
pub mod grw;
pub mod jet;
pub mod linalg;
pub mod physics;
pub mod residual;
pub mod scalar;
pub mod specfile;

/// Third-order jets over `f64`, the type every check evaluates with.
pub type Jet3 = jet::Jet<f64>;
pub type CurvaturePoint = curvature::CurvaturePoint<f64>;
pub type Connection = curvature::Connection<f64>;
pub type VectorGradient = curvature::VectorGradient<f64>;

pub use certify::{run_certify, CertificationReport, RunConfig};
pub use chart::{compile_chart, MetricChart, VectorField};
pub use residual::Residual;
pub use specfile::{CompiledSpec, SpecFile};
