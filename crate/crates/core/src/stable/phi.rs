use crate::error::{domain, Result};
use crate::laws::NestedConfig;
use crate::partition::{ln_phi_weight_pd, pd_eppf, pd_theta_eppf, StirlingTable};
use crate::special::LogSum;
use crate::stable::check_indices;
use crate::stable::master::ln_time_weight;

/// A Gibbs weight Φ^{[β]}_{n,r}, supplied in log scale.
pub trait PhiWeight {
    fn ln_phi(&self, n: usize, r: usize) -> Result<f64>;
}

/// Any `Fn(n, r) -> ln Φ_{n,r}` is a weight.
impl<F: Fn(usize, usize) -> f64> PhiWeight for F {
    fn ln_phi(&self, n: usize, r: usize) -> Result<f64> {
        let v = self(n, r);
        if v.is_nan() || v == f64::INFINITY {
            return domain(format!("weight at (n={n}, r={r}) is not a finite log value"));
        }
        Ok(v)
    }
}

/// PD(β, θ) weights relative to PD(β, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdPhi {
    pub beta: f64,
    pub theta: f64,
}

impl PhiWeight for PdPhi {
    fn ln_phi(&self, n: usize, r: usize) -> Result<f64> {
        ln_phi_weight_pd(self.beta, self.theta, n, r)
    }
}

/// The fixed-ζ weight (ζ^r/Γ(r)) / Σ_k ℙ^{(n)}_β(k) ζ^k/Γ(k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePhi {
    pub beta: f64,
    pub zeta: f64,
}

impl PhiWeight for TimePhi {
    fn ln_phi(&self, n: usize, r: usize) -> Result<f64> {
        if r == 0 || r > n {
            return domain(format!("need 1 ≤ r ≤ n, got r={r}, n={n}"));
        }
        let rf = r as f64;
        Ok(rf * self.zeta.ln() - crate::special::ln_gamma(rf) - ln_time_weight(self.beta, n, self.zeta)?)
    }
}

/// Φ_{n,r} for PD(β, θ), linear scale.
pub fn phi_weight_pd(beta: f64, theta: f64, n: usize, r: usize) -> Result<f64> {
    ln_phi_weight_pd(beta, theta, n, r).map(f64::exp)
}

pub(crate) fn single_group(cfg: &NestedConfig) -> Result<()> {
    if cfg.groups() != 1 {
        return domain("stable duality is stated for a single group");
    }
    Ok(())
}

/// ln Σ_{j ≤ K} ℙ^{(K)}_{β/α}(j) Φ_{n,j}.
fn ln_mixed_weight(table: &StirlingTable, n: usize, k: usize, phi: &dyn PhiWeight) -> Result<f64> {
    let mut acc = LogSum::new();
    for j in 1..=k {
        acc.add(table.ln_block_count(k, j) + phi.ln_phi(n, j)?);
    }
    Ok(acc.value())
}

/// |ln LHS − ln RHS| of the Gibbs-weighted coagulation/fragmentation duality.
pub fn gibbs_duality_residual(alpha: f64, beta: f64, cfg: &NestedConfig, phi: &dyn PhiWeight) -> Result<f64> {
    check_indices(alpha, beta)?;
    single_group(cfg)?;
    let n = cfg.n(0);
    let k = cfg.k_total();
    let r = cfg.species();
    let table = StirlingTable::new(beta / alpha, k)?;
    let mixed = ln_mixed_weight(&table, n, k, phi)?;
    let x: Vec<usize> = (0..r).map(|l| cfg.x_tilde(l)).collect();
    let c: Vec<usize> = cfg.fine_blocks(0).collect();
    let ln_phi_r = phi.ln_phi(n, r)?;
    let coag = pd_eppf(beta / alpha, &x)? + ln_phi_r - mixed;
    let fine = pd_eppf(alpha, &c)? + mixed;
    let mut frag = 0.0;
    for l in 0..r {
        frag += pd_theta_eppf(alpha, -beta, &cfg.blocks()[0][l])?;
    }
    let coarse = pd_eppf(beta, &cfg.coarse_sizes())? + ln_phi_r;
    Ok((coag + fine - frag - coarse).abs())
}

/// |ln Σ_j ℙ^{(K)}_{β/α}(j)Φ^{[β]}_{n,j} − ln Φ^{[α]}_{n,K}| for PD(·, θ) weights.
pub fn mixing_identity_residual(alpha: f64, beta: f64, theta: f64, n: usize, k: usize) -> Result<f64> {
    check_indices(alpha, beta)?;
    if k == 0 || k > n {
        return domain(format!("need 1 ≤ K ≤ n, got K={k}, n={n}"));
    }
    let table = StirlingTable::new(beta / alpha, k)?;
    let lhs = ln_mixed_weight(&table, n, k, &PdPhi { beta, theta })?;
    Ok((lhs - ln_phi_weight_pd(alpha, theta, n, k)?).abs())
}
