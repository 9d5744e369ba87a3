//! The stable/Pitman–Yor specialization: Φ-weights, Gibbs duality, the
//! ζ-indexed master equation, recovery of Pitman's duality, and the
//! conditioned stable bridge sampler.

mod bridge;
mod master;
mod phi;

pub use bridge::{stable_bridge_block_count_pmf, stable_bridge_sample, BridgeDraw};
pub use master::{
    frag_invariance_check, latent_time_mixture, ln_stable_k_poisson, ln_stable_k_poisson_table, ln_stable_n_poisson,
    ln_stable_n_poisson_table, ln_time_weight, master_factors,
    master_duality_residual, recover_pitman_by_quadrature, stable_reduction_check, MasterFactors, PitmanRecovery, StableReduction,
};
pub use phi::{gibbs_duality_residual, mixing_identity_residual, phi_weight_pd, PdPhi, PhiWeight, TimePhi};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Fine index α, coarse index β, Pitman–Yor tilt θ and latent time ζ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableDualityParams {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "unit")]
    pub zeta: f64,
}

fn unit() -> f64 {
    1.0
}

impl StableDualityParams {
    pub fn new(alpha: f64, beta: f64, theta: f64, zeta: f64) -> Result<Self> {
        let p = StableDualityParams { alpha, beta, theta, zeta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_indices(self.alpha, self.beta)?;
        if self.theta <= -self.beta {
            return domain(format!("theta must exceed -beta, got theta={}, beta={}", self.theta, self.beta));
        }
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return domain(format!("zeta must be positive, got {}", self.zeta));
        }
        Ok(())
    }
}

pub(crate) fn check_indices(alpha: f64, beta: f64) -> Result<()> {
    if !(0.0 < beta && beta < alpha && alpha < 1.0) {
        return domain(format!("need 0 < beta < alpha < 1, got alpha={alpha}, beta={beta}"));
    }
    Ok(())
}
