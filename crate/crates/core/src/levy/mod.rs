//! Subordinator families: Laplace exponents, exponential cumulants, Bell sums,
//! mixed truncated Poisson count laws and total-mass samplers.

mod bell;
mod mtp;
mod sample;

pub use bell::{composed_cumulant, xi_partial, BellTable};
pub use mtp::{ln_sibuya_pmf, mtp_pmf, MtpSampler};
pub use sample::{sample_total_mass, sample_total_mass_capped, GG_ATTEMPT_CAP};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::special::{ln_factorial, ln_gamma};

/// A driftless subordinator from one of the built-in parametric families.
///
/// All families are evaluated through the generalized gamma parametrization
/// τ(s) = θ s^{-α-1} e^{-ζs} / Γ(1-α): `Stable(α)` is (α, α, 0) and
/// `Gamma(θ, ζ)` is (0, θ, ζ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevyModel {
    Stable { alpha: f64 },
    Gamma { theta: f64, zeta: f64 },
    GenGamma { alpha: f64, theta: f64, zeta: f64 },
}

/// Generalized gamma parameters (α, θ, ζ) of a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgParams {
    pub alpha: f64,
    pub theta: f64,
    pub zeta: f64,
}

impl LevyModel {
    pub fn stable(alpha: f64) -> Self {
        LevyModel::Stable { alpha }
    }

    pub fn gamma(theta: f64, zeta: f64) -> Self {
        LevyModel::Gamma { theta, zeta }
    }

    pub fn gen_gamma(alpha: f64, theta: f64, zeta: f64) -> Self {
        LevyModel::GenGamma { alpha, theta, zeta }
    }

    /// Checks the family invariants.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LevyModel::Stable { alpha } => alpha > 0.0 && alpha < 1.0,
            LevyModel::Gamma { theta, zeta } => theta > 0.0 && zeta > 0.0 && theta.is_finite() && zeta.is_finite(),
            LevyModel::GenGamma { alpha, theta, zeta } => {
                (0.0..1.0).contains(&alpha)
                    && theta > 0.0
                    && theta.is_finite()
                    && zeta >= 0.0
                    && zeta.is_finite()
                    && !(alpha == 0.0 && zeta == 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            domain(format!("invalid model parameters {self:?}"))
        }
    }

    pub fn gg(&self) -> GgParams {
        match *self {
            LevyModel::Stable { alpha } => GgParams { alpha, theta: alpha, zeta: 0.0 },
            LevyModel::Gamma { theta, zeta } => GgParams { alpha: 0.0, theta, zeta },
            LevyModel::GenGamma { alpha, theta, zeta } => GgParams { alpha, theta, zeta },
        }
    }

    /// Stability index α (0 for the gamma family).
    pub fn alpha(&self) -> f64 {
        self.gg().alpha
    }

    /// Whether the tilt is zero, i.e. the model is a pure stable subordinator.
    pub fn is_untilted(&self) -> bool {
        self.gg().zeta == 0.0
    }

    /// The model with Lévy density `scale · e^{-extra_tilt·s} τ(s)`.
    pub fn tilted(&self, scale: f64, extra_tilt: f64) -> LevyModel {
        let p = self.gg();
        LevyModel::GenGamma { alpha: p.alpha, theta: scale * p.theta, zeta: p.zeta + extra_tilt }
    }

    /// ln τ(s).
    pub fn ln_levy_density(&self, s: f64) -> f64 {
        let p = self.gg();
        p.theta.ln() - (p.alpha + 1.0) * s.ln() - p.zeta * s - ln_gamma(1.0 - p.alpha)
    }
}

fn check_point(model: &LevyModel, gamma: f64) -> Result<()> {
    model.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return domain(format!("evaluation point must be positive and finite, got {gamma}"));
    }
    Ok(())
}

/// Laplace exponent ψ(γ) = ∫(1 - e^{-γs}) τ(s) ds.
pub fn psi(model: &LevyModel, gamma: f64) -> Result<f64> {
    check_point(model, gamma)?;
    Ok(psi_unchecked(model.gg(), gamma))
}

pub(crate) fn psi_unchecked(p: GgParams, gamma: f64) -> f64 {
    if p.alpha == 0.0 {
        p.theta * (gamma / p.zeta).ln_1p()
    } else if p.zeta == 0.0 {
        p.theta / p.alpha * gamma.powf(p.alpha)
    } else {
        // (θ/α) ζ^α [(1+γ/ζ)^α - 1], stable as α → 0
        p.theta / p.alpha * p.zeta.powf(p.alpha) * (p.alpha * (gamma / p.zeta).ln_1p()).exp_m1()
    }
}

/// ln ψ^{(c)}(γ) where ψ^{(c)}(γ) = ∫ s^c e^{-γs} τ(s) ds.
pub fn psi_cumulant(model: &LevyModel, c: u64, gamma: f64) -> Result<f64> {
    check_point(model, gamma)?;
    if c == 0 {
        return domain("cumulant order must be at least 1");
    }
    Ok(ln_cumulant_unchecked(model.gg(), c, gamma))
}

pub(crate) fn ln_cumulant_unchecked(p: GgParams, c: u64, gamma: f64) -> f64 {
    let c = c as f64;
    p.theta.ln() + ln_gamma(c - p.alpha) - ln_gamma(1.0 - p.alpha) + (p.alpha - c) * (p.zeta + gamma).ln()
}

/// ψ(γ) and ln ψ^{(c)}(γ) for c = 1..=n_max at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantTable {
    pub model: LevyModel,
    pub gamma: f64,
    pub log_psi: f64,
    /// `log_psi_c[c-1]` is ln ψ^{(c)}(γ).
    pub log_psi_c: Vec<f64>,
}

impl CumulantTable {
    pub fn new(model: &LevyModel, gamma: f64, n_max: usize) -> Result<Self> {
        check_point(model, gamma)?;
        let p = model.gg();
        // ψ^{(c+1)} = ψ^{(c)} (c-α)/(ζ+γ)
        let ln_rate = (p.zeta + gamma).ln();
        let mut log_psi_c = Vec::with_capacity(n_max);
        if n_max > 0 {
            log_psi_c.push(ln_cumulant_unchecked(p, 1, gamma));
        }
        for c in 1..n_max {
            let prev = log_psi_c[c - 1];
            log_psi_c.push(prev + (c as f64 - p.alpha).ln() - ln_rate);
        }
        Ok(CumulantTable { model: *model, gamma, log_psi: psi_unchecked(p, gamma).ln(), log_psi_c })
    }

    pub fn psi(&self) -> f64 {
        self.log_psi.exp()
    }

    /// ln ψ^{(c)}(γ), c ≥ 1.
    pub fn log_cumulant(&self, c: usize) -> f64 {
        self.log_psi_c[c - 1]
    }

    pub fn n_max(&self) -> usize {
        self.log_psi_c.len()
    }

    /// ln of the MtP probability γ^c ψ^{(c)}/(c! ψ).
    pub fn log_mtp(&self, c: usize) -> f64 {
        c as f64 * self.gamma.ln() + self.log_cumulant(c) - ln_factorial(c as u64) - self.log_psi
    }
}
