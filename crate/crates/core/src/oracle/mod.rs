//! Brute-force oracles: enumeration of nested configurations, normalization
//! and duality sweeps, independent quadrature, and Monte Carlo comparison.

mod checks;
mod enumerate;
mod mc;
mod quad;
mod report;
mod stats;
mod sweeps;

pub use checks::{duality_sweep, total_mass_check};
pub use enumerate::{aggregate_by, coarse_key, enumerate_nested_configs, fine_key, WeightedConfig, MAX_ENUMERATION_TOTAL};
pub use mc::{mc_compare, mc_criteria, McConfig, McReference};
pub use quad::{gg_moment_quadrature, ln_gamma_moment, moment_oracle, positive_stable_density, quadrature_oracle};
pub use report::{
    counts_label, Bound, Cell, Criterion, DualityRow, DualitySection, LawSum, McSection, McStatistic, NormalizationSection, QuadDiagnostic,
    Table, VerificationReport, SCHEMA_VERSION,
};
pub use stats::{chi_square_gof, chi_square_homogeneity, kolmogorov_sf, ks_one_sample, ks_two_sample, ChiSquareResult, KsResult, MIN_EXPECTED};
pub use sweeps::{
    marginal_sweep, nested_partitions, pitman_recovery_sweep, sample_table, stable_master_sweep, MarginalSummary, RecoverySummary,
    StableMasterSummary,
};
