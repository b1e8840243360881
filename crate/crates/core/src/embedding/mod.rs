//! Embedding of the chain into Brownian motion by exit times.
//!
//! For `m = 2·dx` the scale factor is `√h` everywhere and the embedding
//! stopping times have iid increments distributed as `h·H`, where `H` is
//! the exit time of a standard Brownian motion from `(−1, 1)`.

mod exit_time;
mod run;

pub use exit_time::{
    exit_time_cdf_unit, exit_time_pdf_unit, exit_time_survival_unit, sample_exit_time_unit, ExitTimeSampler,
    DEFAULT_CROSSOVER, DEFAULT_TERM_TOL,
};
pub use run::{lower_bound_check, simulate_embedding_times, temporal_error_stats, EmbeddingRun, TemporalErrorStats};

/// `E[H] = 1`.
pub const MEAN_UNIT_EXIT_TIME: f64 = 1.0;
/// `E[H²] = 5/3`.
pub const SECOND_MOMENT_UNIT_EXIT_TIME: f64 = 5.0 / 3.0;
/// `Var(H) = 2/3`.
pub const VAR_UNIT_EXIT_TIME: f64 = 2.0 / 3.0;
