//! Cardinal B-splines of integral, real, complex and hypercomplex order, exponential
//! B-splines, the associated fractional operators, and frequency-domain verifiers
//! for their defining differential equations.

pub mod cli;
pub mod clifford;
pub mod error;
pub mod fourier;
pub mod fracops;
pub mod numeric;
pub mod quad;
pub mod specialfn;
pub mod splines;

pub use clifford::{
    hc_exp, hc_power, CliffordElement, ComplexParavector, HypercomplexExponent, Paravector,
    SpanElement, SubalgebraValue,
};
pub use error::{Error, Result};
pub use fourier::{FrequencyGrid, InverseQuadrature};
pub use fracops::{
    frac_derivative, frac_integral, shifted_frac_derivative, DerivativeForm, ResidualReport,
    SampledSignal,
};
pub use splines::{ExponentialWeights, SplineFamily, SplineOrder};
