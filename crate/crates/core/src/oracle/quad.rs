use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::hier::{HierModel, HierTables};
use crate::levy::{BellTable, LevyModel};
use crate::oracle::report::QuadDiagnostic;
use crate::quadrature::{integrate, integrate_half_line, QuadConfig, QuadResult};
use crate::special::ln_gamma;

fn capture(failure: &RefCell<Option<Error>>, r: Result<QuadResult>) -> f64 {
    match r {
        Ok(r) => r.value,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    }
}

fn finish(failure: RefCell<Option<Error>>, r: Result<QuadResult>) -> Result<QuadResult> {
    let r = r?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// ln A(u) of Kanter's representation S = (A(u)/E)^{(1-α)/α}.
fn ln_kanter(alpha: f64, u: f64) -> f64 {
    alpha / (1.0 - alpha) * (alpha * u).sin().ln() + ((1.0 - alpha) * u).sin().ln() - u.sin().ln() / (1.0 - alpha)
}

/// Integrand over u of the positive-stable density at x, divided by π.
fn stable_kernel(alpha: f64, u: f64, ln_x: f64) -> f64 {
    if u <= 0.0 || u >= PI {
        return 0.0;
    }
    let k = alpha / (1.0 - alpha);
    let la = ln_kanter(alpha, u);
    let z = (la - k * ln_x).exp();
    (la + k.ln() - (k + 1.0) * ln_x - z).exp() / PI
}

/// Density at x of the positive α-stable law with E e^{-sS} = e^{-s^α}, from
/// the one-dimensional integral over Kanter's angle.
pub fn positive_stable_density(alpha: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return domain(format!("alpha must lie in (0,1), got {alpha}"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let lx = x.ln();
    Ok(integrate(|u| stable_kernel(alpha, u, lx), 0.0, PI, cfg)?.value)
}

/// ln E[σ(λ)^n e^{-γσ(λ)}] for the gamma family, from the Gamma(λθ, ζ) law.
pub fn ln_gamma_moment(theta: f64, zeta: f64, lambda: f64, n: usize, gamma: f64) -> f64 {
    let s = lambda * theta;
    ln_gamma(s + n as f64) - ln_gamma(s) + s * zeta.ln() - (s + n as f64) * (zeta + gamma).ln()
}

/// E[σ(λ)^n e^{-γσ(λ)}] for a stable or GG model by two-dimensional
/// quadrature over Kanter's angle and the (rescaled) value of σ(λ).
pub fn gg_moment_quadrature(model: &LevyModel, lambda: f64, n: usize, gamma: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    model.validate()?;
    let p = model.gg();
    if p.alpha == 0.0 {
        return domain("gamma family has no stable representation");
    }
    // σ(λ) = c S under e^{-ζs} tilting with normalizer e^{λθζ^α/α}
    let c = (lambda * p.theta / p.alpha).powf(1.0 / p.alpha);
    let ln_norm = lambda * p.theta * p.zeta.powf(p.alpha) / p.alpha + n as f64 * c.ln();
    let rate = (gamma + p.zeta) * c;
    let inner_cfg = QuadConfig { abs_tol: cfg.abs_tol * 1e-2, rel_tol: cfg.rel_tol * 1e-1, ..*cfg };
    let failure = RefCell::new(None);
    let r = integrate(
        |u| {
            if u <= 0.0 || u >= PI {
                return 0.0;
            }
            let inner = integrate_half_line(
                |x| {
                    let lx = x.ln();
                    stable_kernel(p.alpha, u, lx) * (ln_norm + n as f64 * lx - rate * x).exp()
                },
                &inner_cfg,
            );
            capture(&failure, inner)
        },
        0.0,
        PI,
        cfg,
    );
    finish(failure, r)
}

/// Density at b of σ₀(1).
fn base_density(model: &LevyModel, b: f64, cfg: &QuadConfig) -> Result<f64> {
    let p = model.gg();
    if p.alpha == 0.0 {
        return Ok(((p.theta - 1.0) * b.ln() - p.zeta * b + p.theta * p.zeta.ln() - ln_gamma(p.theta)).exp());
    }
    let c = (p.theta / p.alpha).powf(1.0 / p.alpha);
    let tilt = (p.theta * p.zeta.powf(p.alpha) / p.alpha - p.zeta * b).exp();
    Ok(tilt / c * positive_stable_density(p.alpha, b / c, cfg)?)
}

/// E[T^n e^{-γT}] for T ~ Gamma(s, ζ) by quadrature of the gamma density.
///
/// For n = 0 the t^{s-1} singularity on (0, t₁] is removed analytically,
/// leaving t^{s-1}(e^{-(ζ+γ)t} - 1); that piece is integrated in
/// v = ln(t₁/t) so the t^s cusp at 0 becomes exponential decay.
fn gamma_group_moment(s: f64, zeta: f64, n: usize, gamma: f64, cfg: &QuadConfig) -> Result<f64> {
    let rate = zeta + gamma;
    let t1 = 1.0 / rate;
    let nf = n as f64;
    let ln_norm = s * zeta.ln() - ln_gamma(s);
    let head = integrate_half_line(
        |v| {
            let t = t1 * (-v).exp();
            if n == 0 {
                (ln_norm + s * t.ln()).exp() * (-rate * t).exp_m1()
            } else {
                (ln_norm + (s + nf) * t.ln() - rate * t).exp()
            }
        },
        cfg,
    )?
    .value;
    let tail = integrate_half_line(|y| {
        let t = t1 + y;
        (ln_norm + (s + nf - 1.0) * t.ln() - rate * t).exp()
    }, cfg)?
    .value;
    // ζ^s/Γ(s) ∫_0^{t₁} t^{s-1} dt = (ζt₁)^s/Γ(s+1)
    let singular = if n == 0 { (s * (zeta * t1).ln() - ln_gamma(s + 1.0)).exp() } else { 0.0 };
    Ok(singular + head + tail)
}

/// Bell-expansion value of E[σ(λ)^n e^{-γσ(λ)}] against an independent
/// route: closed form for the gamma family, two-dimensional quadrature
/// otherwise.
pub fn moment_oracle(model: &LevyModel, lambda: f64, n: usize, gamma: f64, cfg: &QuadConfig) -> Result<QuadDiagnostic> {
    let bell = BellTable::new(model, n.max(1), gamma)?.log_moment(n, lambda).exp();
    let (value, error_estimate) = match model.gg() {
        p if p.alpha == 0.0 => (ln_gamma_moment(p.theta, p.zeta, lambda, n, gamma).exp(), 0.0),
        _ => {
            let r = gg_moment_quadrature(model, lambda, n, gamma, cfg)?;
            (r.value, r.error)
        }
    };
    Ok(QuadDiagnostic {
        label: format!("moment {model:?} lambda={lambda} n={n} gamma={gamma}"),
        value,
        reference: bell,
        rel_error: (value / bell - 1.0).abs(),
        error_estimate,
    })
}

/// The single-group joint moment by nested quadrature over b = σ₀(1) and
/// t = σ₁(b), against the Bell-expansion value.
///
/// Needs a gamma group model; the base may be gamma (closed-form density)
/// or stable/GG (density by quadrature over Kanter's angle).
pub fn quadrature_oracle(hier: &HierModel, n: usize, cfg: &QuadConfig) -> Result<QuadDiagnostic> {
    hier.validate()?;
    if hier.groups() != 1 {
        return domain("quadrature oracle covers one group");
    }
    let LevyModel::Gamma { theta, zeta } = hier.taus[0] else {
        return domain("quadrature oracle needs a gamma group model");
    };
    let gamma = hier.gammas[0];
    let reference = HierTables::new(hier, &[n])?.log_joint_moment(&[n])?.exp();
    let inner_cfg = QuadConfig { abs_tol: cfg.abs_tol * 1e-2, rel_tol: cfg.rel_tol * 1e-1, ..*cfg };
    let failure = RefCell::new(None);
    let r = integrate_half_line(
        |b| {
            let f = base_density(&hier.tau0, b, &inner_cfg).and_then(|d| {
                if d == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(d * gamma_group_moment(b * theta, zeta, n, gamma, &inner_cfg)?)
                }
            });
            match f {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        cfg,
    );
    let r = finish(failure, r)?;
    Ok(QuadDiagnostic {
        label: format!("joint moment n={n}"),
        value: r.value,
        reference,
        rel_error: (r.value / reference - 1.0).abs(),
        error_estimate: r.error,
    })
}
