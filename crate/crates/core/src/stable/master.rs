use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hier::HierModel;
use crate::laws::{LawEvaluator, NestedConfig};
use crate::partition::{enumerate_set_partitions, pd_eppf, pd_theta_eppf, StirlingTable};
use crate::quadrature::{integrate_half_line, QuadConfig};
use crate::special::{ln_factorial, ln_gamma, LogSum};
use crate::stable::phi::single_group;
use crate::stable::{check_indices, StableDualityParams};

/// Largest n for which the PD(β, θ) block-count law is built by enumeration.
pub const MIXTURE_MAX_N: usize = 8;

/// ln Σ_{k ≤ n} ℙ^{(n)}_β(k) ζ^k/Γ(k).
pub fn ln_time_weight(beta: f64, n: usize, zeta: f64) -> Result<f64> {
    if n == 0 {
        return domain("time weight needs n ≥ 1");
    }
    let table = StirlingTable::new(beta, n)?;
    Ok(time_weight(&table, n, zeta))
}

fn time_weight(table: &StirlingTable, n: usize, zeta: f64) -> f64 {
    let lz = zeta.ln();
    (1..=n).map(|k| table.ln_block_count(n, k) + k as f64 * lz - ln_gamma(k as f64)).collect::<LogSum>().value()
}

/// The four ζ-indexed factors of the stable master equation and the arrival
/// mixing density, all in log scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterFactors {
    pub coag: f64,
    pub fine: f64,
    pub frag: f64,
    pub coarse: f64,
    /// ln f_{G_{K_n}}(ζ).
    pub mixing: f64,
}

impl MasterFactors {
    pub fn ln_lhs(&self) -> f64 {
        self.coag + self.fine + self.mixing
    }

    pub fn ln_rhs(&self) -> f64 {
        self.frag + self.coarse + self.mixing
    }
}

pub fn master_factors(alpha: f64, beta: f64, cfg: &NestedConfig, zeta: f64) -> Result<MasterFactors> {
    check_indices(alpha, beta)?;
    single_group(cfg)?;
    if !(zeta > 0.0 && zeta.is_finite()) {
        return domain(format!("zeta must be positive, got {zeta}"));
    }
    let n = cfg.n(0);
    let k = cfg.k_total();
    let r = cfg.species();
    let ba = beta / alpha;
    let d_k = ln_time_weight(ba, k, zeta)?;
    let d_n = ln_time_weight(beta, n, zeta)?;
    let time_r = r as f64 * zeta.ln() - ln_gamma(r as f64);
    let x: Vec<usize> = (0..r).map(|l| cfg.x_tilde(l)).collect();
    let c: Vec<usize> = cfg.fine_blocks(0).collect();
    let mut frag = 0.0;
    for l in 0..r {
        frag += pd_theta_eppf(alpha, -beta, &cfg.blocks()[0][l])?;
    }
    Ok(MasterFactors {
        coag: pd_eppf(ba, &x)? + time_r - d_k,
        fine: pd_eppf(alpha, &c)? + d_k - d_n,
        frag,
        coarse: pd_eppf(beta, &cfg.coarse_sizes())? + time_r - d_n,
        mixing: -zeta - zeta.ln() + d_n,
    })
}

/// |ln LHS − ln RHS| of the master equation at latent time ζ.
pub fn master_duality_residual(alpha: f64, beta: f64, cfg: &NestedConfig, zeta: f64) -> Result<f64> {
    let f = master_factors(alpha, beta, cfg, zeta)?;
    Ok((f.ln_lhs() - f.ln_rhs()).abs())
}

/// Relative gaps between the four conditional laws of the stable-in-stable
/// hierarchy at γ = ζ^{1/β} and the four ζ-factors of the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableReduction {
    pub coag: f64,
    pub fine: f64,
    pub frag: f64,
    pub coarse: f64,
}

impl StableReduction {
    pub fn max(&self) -> f64 {
        self.coag.max(self.fine).max(self.frag).max(self.coarse)
    }
}

pub fn stable_reduction_check(alpha: f64, beta: f64, cfg: &NestedConfig, zeta: f64) -> Result<StableReduction> {
    let f = master_factors(alpha, beta, cfg, zeta)?;
    let hier = HierModel::stable_in_stable(alpha, beta, zeta.powf(1.0 / beta))?;
    let eval = LawEvaluator::new(&hier, &cfg.totals())?;
    let rel = |law: f64, factor: f64| (law - factor).exp_m1().abs();
    Ok(StableReduction {
        coag: rel(eval.log_p_coag(cfg)?, f.coag),
        fine: rel(eval.log_p_fine(cfg)?, f.fine),
        frag: rel(eval.log_p_frag(cfg)?, f.frag),
        coarse: rel(eval.log_p_coarse(cfg)?, f.coarse),
    })
}

/// ln ℙ(K^{(β,θ)}_n = k) for k = 1..=n, summed over all set partitions of [n].
pub fn latent_time_mixture(beta: f64, theta: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > MIXTURE_MAX_N {
        return domain(format!("block-count mixture needs 1 ≤ n ≤ {MIXTURE_MAX_N}, got {n}"));
    }
    let mut acc = vec![LogSum::new(); n];
    for p in enumerate_set_partitions(n)? {
        let sizes: Vec<usize> = p.iter().map(Vec::len).collect();
        acc[sizes.len() - 1].add(pd_theta_eppf(beta, theta, &sizes)?);
    }
    Ok(acc.iter().map(LogSum::value).collect())
}

/// Both time-integrated sides of the master equation and their closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitmanRecovery {
    /// ∫ coag·fine·g dζ.
    pub coag_path: f64,
    /// ∫ frag·coarse·g dζ.
    pub frag_path: f64,
    pub coag_error: f64,
    pub frag_error: f64,
    /// p_{β/α,θ/α}(x⃗) · p_{α,θ}(c⃗).
    pub closed_coag: f64,
    /// Π p_{α,−β}(c⃗_ℓ) · p_{β,θ}(n⃗).
    pub closed_frag: f64,
}

/// Integrates both sides of the master equation against the latent time law
/// of PD(β, θ), the Gamma(θ/β + K_n^{(β,θ)}) mixture; θ ≥ 0.
pub fn recover_pitman_by_quadrature(params: &StableDualityParams, cfg: &NestedConfig, quad: &QuadConfig) -> Result<PitmanRecovery> {
    params.validate()?;
    let StableDualityParams { alpha, beta, theta, .. } = *params;
    if theta < 0.0 {
        return domain(format!("recovery by quadrature needs theta ≥ 0, got {theta}"));
    }
    single_group(cfg)?;
    let n = cfg.n(0);
    let mix = latent_time_mixture(beta, theta, n)?;
    let tb = theta / beta;
    let ln_g = |z: f64| -> f64 {
        let lz = z.ln();
        mix.iter()
            .enumerate()
            .map(|(i, &lp)| {
                let a = tb + (i + 1) as f64;
                lp + (a - 1.0) * lz - z - ln_gamma(a)
            })
            .collect::<LogSum>()
            .value()
    };
    let failure = std::cell::RefCell::new(None);
    let fail = &failure;
    let ln_g = &ln_g;
    let side = |lhs: bool| {
        move |z: f64| match master_factors(alpha, beta, cfg, z) {
            Ok(f) => {
                let v = if lhs { f.coag + f.fine } else { f.frag + f.coarse };
                (v + ln_g(z)).exp()
            }
            Err(e) => {
                fail.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let coag = integrate_half_line(side(true), quad);
    let frag = integrate_half_line(side(false), quad);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let (coag, frag) = (coag?, frag?);
    let x: Vec<usize> = (0..cfg.species()).map(|l| cfg.x_tilde(l)).collect();
    let c: Vec<usize> = cfg.fine_blocks(0).collect();
    let closed_coag = pd_theta_eppf(beta / alpha, theta / alpha, &x)? + pd_theta_eppf(alpha, theta, &c)?;
    let mut closed_frag = pd_theta_eppf(beta, theta, &cfg.coarse_sizes())?;
    for l in 0..cfg.species() {
        closed_frag += pd_theta_eppf(alpha, -beta, &cfg.blocks()[0][l])?;
    }
    Ok(PitmanRecovery {
        coag_path: coag.value,
        frag_path: frag.value,
        coag_error: coag.error,
        frag_error: frag.error,
        closed_coag: closed_coag.exp(),
        closed_frag: closed_frag.exp(),
    })
}

/// |ln p_frag(stable-in-stable, one species refined as c⃗) − ln p_{α,−β}(c⃗)|.
pub fn frag_invariance_check(alpha: f64, beta: f64, blocks: &[usize]) -> Result<f64> {
    let hier = HierModel::stable_in_stable(alpha, beta, 1.0)?;
    let cfg = NestedConfig::single_group(vec![blocks.to_vec()])?;
    let frag = LawEvaluator::new(&hier, &cfg.totals())?.log_p_frag(&cfg)?;
    Ok((frag - pd_theta_eppf(alpha, -beta, blocks)?).abs())
}

/// ln P(count = n) for the β-stable composition at latent time ζ.
pub fn ln_stable_n_poisson(beta: f64, n: usize, zeta: f64) -> Result<f64> {
    if !(0.0 < beta && beta < 1.0) {
        return domain(format!("beta must lie in (0,1), got {beta}"));
    }
    if n == 0 {
        return Ok(-zeta);
    }
    Ok(ln_gamma(n as f64) - ln_factorial(n as u64) + beta.ln() - zeta + ln_time_weight(beta, n, zeta)?)
}

/// ln P(fine block count = K) at latent time ζ, prefactor (β/α)Γ(K)/K!.
pub fn ln_stable_k_poisson(alpha: f64, beta: f64, k: usize, zeta: f64) -> Result<f64> {
    check_indices(alpha, beta)?;
    if k == 0 {
        return Ok(-zeta);
    }
    let ba = beta / alpha;
    Ok(ba.ln() + ln_gamma(k as f64) - ln_factorial(k as u64) - zeta + ln_time_weight(ba, k, zeta)?)
}

fn ln_stable_count_table(index: f64, n_max: usize, zeta: f64) -> Result<Vec<f64>> {
    let table = StirlingTable::new(index, n_max)?;
    let mut out = vec![-zeta];
    for n in 1..=n_max {
        out.push(index.ln() + ln_gamma(n as f64) - ln_factorial(n as u64) - zeta + time_weight(&table, n, zeta));
    }
    Ok(out)
}

/// [`ln_stable_n_poisson`] for n = 0..=n_max from one Stirling table.
pub fn ln_stable_n_poisson_table(beta: f64, n_max: usize, zeta: f64) -> Result<Vec<f64>> {
    if !(0.0 < beta && beta < 1.0) {
        return domain(format!("beta must lie in (0,1), got {beta}"));
    }
    ln_stable_count_table(beta, n_max, zeta)
}

/// [`ln_stable_k_poisson`] for K = 0..=k_max from one Stirling table.
pub fn ln_stable_k_poisson_table(alpha: f64, beta: f64, k_max: usize, zeta: f64) -> Result<Vec<f64>> {
    check_indices(alpha, beta)?;
    ln_stable_count_table(beta / alpha, k_max, zeta)
}
