//! Generative sampling of the coupled species/sub-block process, its exact
//! conditional law given totals, path materialization and posterior draws.
//!
//! Every draw is a pure function of a 64-bit key: species ℓ reads stream
//! (key, ℓ) and its group-j sub-blocks read stream (key, ℓ, j+1), so results do
//! not depend on how draws are scheduled across threads.

mod conditional;
mod coupled;
mod paths;
mod posterior;
mod rng;
mod summary;

pub use conditional::{sample_conditional_given_totals, ConditionalSampler, CONDITIONAL_MAX_COUNT, CONDITIONAL_MAX_GROUPS};
pub use coupled::{sample_coupled, CoupledDraw, CoupledSampler, Species, SubBlock, COUPLED_MAX_SUBBLOCKS};
pub use paths::{materialize_paths, Paths, StepFunction};
pub use posterior::{
    sample_group_given_h, sample_h_given_counts, sample_h_given_x, sample_posterior_observed, sample_unobserved_base_mass,
    GroupPosterior, SpeciesPosterior,
};
pub use rng::{draw_stream, stream, stream_seed};
pub use summary::{DrawSummary, Histogram, SummaryAccumulator, SummaryCaps, SummarySampler};
