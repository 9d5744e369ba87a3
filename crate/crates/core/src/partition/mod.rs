//! Set-partition combinatorics, Pitman–Yor EPPFs, generalized Stirling
//! numbers and block-count laws.

mod combinatorics;
mod eppf;
mod stirling;

pub use combinatorics::{
    bell_number, compositions, enumerate_set_partitions, integer_partitions, SetPartitions, MAX_SET_PARTITION_N,
};
pub use eppf::{crp_eppf, ln_phi_weight_pd, pd_eppf, pd_theta_eppf};
pub use stirling::{
    block_count_pmf, frag_block_count_pmf, gen_stirling, gen_stirling_alternating, gen_stirling_linear,
    ln_block_count_pmf, ln_frag_block_count_pmf, StirlingTable,
};
