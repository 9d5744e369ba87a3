//! The four conditional partition laws of the J-group coupled system, the
//! count laws, and the marginal (time-integrated) EPPFs.

mod conditional;
mod config;
mod counts;
mod marginal;

pub use conditional::{duality_residual, p_coag, p_coarse, p_fine, p_frag, LawEvaluator};
pub use config::NestedConfig;
pub use counts::{
    allocation_pmf, arrival_density, fragment_count_pmf, h_conditional_density, hier_joint_moment,
    joint_count_pmf, ln_allocation_pmf, ln_arrival_density, ln_fragment_count_pmf, ln_h_conditional_density,
    ln_joint_count_pmf, ln_x_given_count_pmf, x_given_count_pmf,
};
pub use marginal::{marginal_eppf, MarginalSide};
