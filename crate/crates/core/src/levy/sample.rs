use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{domain, Error, Result};
use crate::levy::LevyModel;

/// Attempt cap for the generalized gamma rejection sampler.
pub const GG_ATTEMPT_CAP: u64 = 1_000_000;

/// Draws σ(λ), the total mass of the subordinator at time λ.
pub fn sample_total_mass<R: Rng + ?Sized>(model: &LevyModel, lambda: f64, rng: &mut R) -> Result<f64> {
    sample_total_mass_capped(model, lambda, GG_ATTEMPT_CAP, rng)
}

/// As [`sample_total_mass`] with an explicit per-piece rejection attempt cap.
///
/// Gamma models are drawn exactly. Untilted models use the Kanter
/// representation of the positive stable law. Tilted models with α > 0 write
/// σ(λ) as a sum of k independent copies of σ(λ/k), with k = ⌈λθζ^α/α⌉, and
/// draw each copy by rejecting the untilted draw with probability 1 - e^{-ζs};
/// each copy is accepted with probability e^{-(λ/k)θζ^α/α} ≥ e^{-1}.
pub fn sample_total_mass_capped<R: Rng + ?Sized>(model: &LevyModel, lambda: f64, cap: u64, rng: &mut R) -> Result<f64> {
    model.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("time must be positive, got {lambda}"));
    }
    let p = model.gg();
    if p.alpha == 0.0 {
        let g = Gamma::new(lambda * p.theta, 1.0 / p.zeta).map_err(|e| Error::Domain(e.to_string()))?;
        return Ok(g.sample(rng));
    }
    if p.zeta == 0.0 {
        return Ok(untilted_scale(p.alpha, p.theta, lambda) * positive_stable(p.alpha, rng));
    }
    let log_cost = lambda * p.theta * p.zeta.powf(p.alpha) / p.alpha;
    if !(log_cost < 1e9) {
        return Err(Error::Envelope(format!("tilted stable draw at log cost {log_cost} exceeds the piece budget")));
    }
    let pieces = log_cost.ceil().max(1.0) as u64;
    let scale = untilted_scale(p.alpha, p.theta, lambda / pieces as f64);
    let mut total = 0.0;
    for _ in 0..pieces {
        total += tilted_piece(p.alpha, p.zeta, scale, cap, rng)?;
    }
    Ok(total)
}

/// (λθ/α)^{1/α}: σ(λ) = scale · S for the untilted exponent (λθ/α)γ^α.
fn untilted_scale(alpha: f64, theta: f64, lambda: f64) -> f64 {
    (lambda * theta / alpha).powf(1.0 / alpha)
}

fn tilted_piece<R: Rng + ?Sized>(alpha: f64, zeta: f64, scale: f64, cap: u64, rng: &mut R) -> Result<f64> {
    for _ in 0..cap {
        let s = scale * positive_stable(alpha, rng);
        let e: f64 = Exp1.sample(rng);
        if e > zeta * s {
            return Ok(s);
        }
    }
    Err(Error::RetryCap { attempts: cap })
}

/// Positive α-stable variate with E e^{-sS} = e^{-s^α} (Kanter's representation).
pub(crate) fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = loop {
        let u = PI * rng.random::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    let ln_a = alpha / (1.0 - alpha) * (alpha * u).sin().ln() + ((1.0 - alpha) * u).sin().ln()
        - (u.sin()).ln() / (1.0 - alpha);
    ((1.0 - alpha) / alpha * (ln_a - e.ln())).exp()
}
