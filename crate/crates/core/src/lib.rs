//! Numerical laboratory for weighted and modified Γ₂ inequalities and the
//! monotonicity of Tsallis entropy under heat flow on round spheres,
//! restricted to zonal functions.
//!
//! Layers, bottom up: [`zonal`] (quadrature, spectral basis, calculus of
//! zonal fields), [`spectral`] (transforms and the exact heat propagator),
//! [`entropy`] (functionals), then the checkers in [`inequality`],
//! [`flow`] and [`probe`].

pub mod corpus;
pub mod entropy;
pub mod error;
pub mod flow;
pub mod inequality;
pub mod probe;
pub mod spectral;
pub mod tolerances;
pub mod zonal;

pub use corpus::CorpusSpec;
pub use entropy::EntropyParams;
pub use error::{Error, Result};
pub use flow::{
    DecayCheck, FlowEntropy, FlowRecord, FlowTrajectory, OdeCheckResult, SobolevFlowReport,
};
pub use inequality::{
    CounterexampleReport, InequalityCase, JiLimitTable, MarginReport, RangePolicy, TheoremId,
};
pub use probe::{ProbeFunctional, ProbeOptions, ProbeResult, RatioProblem, SharpnessTable};
pub use spectral::SpectralCoeffs;
pub use tolerances::Tolerances;
pub use zonal::identities::IdentityCheck;
pub use zonal::{SphereDim, ZonalField, ZonalSpace};
