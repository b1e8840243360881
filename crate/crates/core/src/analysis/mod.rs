//! Distances between laws, rate studies and Monte Carlo functionals.

mod diagnostic;
mod functional;
mod rate;
mod reference;
mod wasserstein;

pub use diagnostic::{path_distance_diagnostic, PathDiagnostic, PATH_DIAGNOSTIC_WARNING};
pub use functional::{functional_expectation, summarize, FunctionalEstimate};
pub use rate::{fit_rate, marginal_rate_study, RateFit, RateRow, RateStudy, RateTable};
pub use reference::{ChainReference, FixedSample, GaussianReference, ReferenceSampler};
pub use wasserstein::{empirical_wasserstein_p, wasserstein_with_std_error};
