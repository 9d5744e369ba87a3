use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::levy::{CumulantTable, LevyModel};
use crate::special::{ln_factorial, ln_gamma};

/// Tail mass left out of a tabulated count law before renormalizing.
pub const MTP_TAIL: f64 = 1e-12;
/// Longest count table a light-tailed MtP law may require.
pub const MTP_MAX_TABLE: usize = 1 << 24;
/// Sequential inversion length for Sibuya before switching to bisection.
const SIBUYA_SEQUENTIAL: u64 = 1024;

/// P(C = c) = γ^c ψ^{(c)}(γ)/(c! ψ(γ)), the mixed truncated Poisson law.
pub fn mtp_pmf(model: &LevyModel, gamma: f64, c: u64) -> Result<f64> {
    if c == 0 {
        return domain("MtP counts start at 1");
    }
    let t = CumulantTable::new(model, gamma, 1)?;
    let p = model.gg();
    let log_c = c as f64 * gamma.ln() + crate::levy::ln_cumulant_unchecked(p, c, gamma) - ln_factorial(c) - t.log_psi;
    Ok(log_c.exp())
}

/// Inverse-CDF sampler for an MtP count law.
///
/// Untilted models give the Sibuya law, whose survival function is closed
/// form and is inverted directly. Tilted models decay geometrically and are
/// tabulated by the ratio recurrence up to the `MTP_TAIL` cap.
#[derive(Debug, Clone, PartialEq)]
pub enum MtpSampler {
    Sibuya { alpha: f64 },
    Table { pmf: Vec<f64>, survival: Vec<f64> },
}

impl MtpSampler {
    pub fn new(model: &LevyModel, gamma: f64) -> Result<Self> {
        let t = CumulantTable::new(model, gamma, 1)?;
        let p = model.gg();
        if p.zeta == 0.0 {
            return Ok(MtpSampler::Sibuya { alpha: p.alpha });
        }
        // P(c+1)/P(c) = γ(c-α)/((c+1)(ζ+γ))
        let rate = gamma / (p.zeta + gamma);
        let mut pmf = vec![t.log_mtp(1).exp()];
        let mut cum = pmf[0];
        while cum < 1.0 - MTP_TAIL {
            if pmf.len() >= MTP_MAX_TABLE {
                return Err(Error::Envelope(format!(
                    "MtP table for {model:?} at γ={gamma} needs more than {MTP_MAX_TABLE} entries"
                )));
            }
            let c = pmf.len() as f64;
            let next = pmf[pmf.len() - 1] * rate * (c - p.alpha) / (c + 1.0);
            if next == 0.0 {
                break;
            }
            pmf.push(next);
            cum += next;
        }
        for v in pmf.iter_mut() {
            *v /= cum;
        }
        // survival[c] = P(C > c), summed from the tail for accuracy
        let mut survival = vec![0.0; pmf.len() + 1];
        for c in (0..pmf.len()).rev() {
            survival[c] = survival[c + 1] + pmf[c];
        }
        survival[0] = 1.0;
        Ok(MtpSampler::Table { pmf, survival })
    }

    /// P(C = c) under the sampled law (renormalized table for tilted models).
    pub fn pmf(&self, c: u64) -> f64 {
        if c == 0 {
            return 0.0;
        }
        match self {
            MtpSampler::Sibuya { alpha } => sibuya_ln_pmf(*alpha, c).exp(),
            MtpSampler::Table { pmf, .. } => pmf.get(c as usize - 1).copied().unwrap_or(0.0),
        }
    }

    /// P(C > c).
    pub fn survival(&self, c: u64) -> f64 {
        match self {
            MtpSampler::Sibuya { alpha } => sibuya_ln_survival(*alpha, c).exp(),
            MtpSampler::Table { survival, .. } => survival.get(c as usize).copied().unwrap_or(0.0),
        }
    }

    /// P(C = c | C ≥ c).
    pub fn hazard(&self, c: u64) -> f64 {
        match self {
            MtpSampler::Sibuya { alpha } => alpha / c as f64,
            MtpSampler::Table { pmf, survival } => {
                let i = c as usize;
                if i > pmf.len() {
                    1.0
                } else {
                    (pmf[i - 1] / survival[i - 1]).min(1.0)
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        let v = 1.0 - rng.random::<f64>();
        match self {
            MtpSampler::Sibuya { alpha } => sibuya_invert(*alpha, v),
            MtpSampler::Table { survival, .. } => {
                // smallest c with survival[c] < v; survival is nonincreasing
                let (mut lo, mut hi) = (0usize, survival.len() - 1);
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if survival[mid] < v {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(hi as u64)
            }
        }
    }
}

/// ln of the Sibuya(α) pmf αΓ(c-α)/(Γ(1-α)c!), c ≥ 1.
pub fn ln_sibuya_pmf(alpha: f64, c: u64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return domain(format!("Sibuya index must lie in (0,1), got {alpha}"));
    }
    if c == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(sibuya_ln_pmf(alpha, c))
}

fn sibuya_ln_pmf(alpha: f64, c: u64) -> f64 {
    alpha.ln() + ln_gamma(c as f64 - alpha) - ln_gamma(1.0 - alpha) - ln_factorial(c)
}

fn sibuya_ln_survival(alpha: f64, c: u64) -> f64 {
    if c == 0 {
        return 0.0;
    }
    let c = c as f64;
    ln_gamma(c + 1.0 - alpha) - ln_gamma(1.0 - alpha) - ln_gamma(c + 1.0)
}

/// Smallest c ≥ 1 with P(C > c) < v.
fn sibuya_invert(alpha: f64, v: f64) -> Result<u64> {
    let mut s = 1.0;
    for c in 1..=SIBUYA_SEQUENTIAL {
        s *= 1.0 - alpha / c as f64;
        if s < v {
            return Ok(c);
        }
    }
    let lv = v.ln();
    let mut lo = SIBUYA_SEQUENTIAL;
    let mut hi = 2 * SIBUYA_SEQUENTIAL;
    while sibuya_ln_survival(alpha, hi) >= lv {
        lo = hi;
        hi = hi.checked_mul(2).filter(|h| *h < (1u64 << 62)).ok_or_else(|| {
            Error::Overflow(format!("Sibuya({alpha}) draw exceeds 2^62"))
        })?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if sibuya_ln_survival(alpha, mid) < lv {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sibuya_half_values() {
        let m = LevyModel::stable(0.5);
        for &g in &[0.3, 1.0, 7.0] {
            let p: Vec<f64> = (1..=3).map(|c| mtp_pmf(&m, g, c).unwrap()).collect();
            assert!((p[0] - 0.5).abs() < 1e-14);
            assert!((p[1] - 0.125).abs() < 1e-14);
            assert!((p[2] - 0.0625).abs() < 1e-14);
        }
    }

    #[test]
    fn sibuya_product_form() {
        let a = 0.37;
        let mut prod = a;
        for c in 1..40u64 {
            if c > 1 {
                prod *= (c as f64 - 1.0 - a) / c as f64;
            }
            let v = mtp_pmf(&LevyModel::stable(a), 2.0, c).unwrap();
            assert!((v / prod - 1.0).abs() < 1e-12, "c={c}");
        }
    }

    #[test]
    fn logarithmic_law_for_gamma() {
        let m = LevyModel::gamma(1.0, 1.0);
        for c in 1..30u64 {
            let expected = 0.5f64.powi(c as i32) / (c as f64 * 2f64.ln());
            assert!((mtp_pmf(&m, 1.0, c).unwrap() / expected - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn table_normalizes_and_matches_pmf() {
        let m = LevyModel::gen_gamma(0.3, 1.0, 0.2);
        let s = MtpSampler::new(&m, 1.0).unwrap();
        let MtpSampler::Table { pmf, survival } = &s else { panic!("expected a table") };
        let total: f64 = pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        assert_eq!(survival[0], 1.0);
        for c in 1..50u64 {
            let direct = mtp_pmf(&m, 1.0, c).unwrap();
            assert!((s.pmf(c) / direct - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sibuya_survival_and_hazard_agree() {
        let s = MtpSampler::Sibuya { alpha: 0.6 };
        let mut surv = 1.0;
        for c in 1..200u64 {
            assert!((s.hazard(c) - s.pmf(c) / s.survival(c - 1)).abs() < 1e-12);
            surv -= s.pmf(c);
            assert!((s.survival(c) - surv).abs() < 1e-12);
        }
    }

    #[test]
    fn inversion_is_consistent_across_the_switch() {
        let alpha = 0.5;
        // v just below / above the survival at the sequential limit
        let sl = sibuya_ln_survival(alpha, SIBUYA_SEQUENTIAL).exp();
        assert_eq!(sibuya_invert(alpha, sl * 1.000001).unwrap(), SIBUYA_SEQUENTIAL);
        let c = sibuya_invert(alpha, sl * 0.5).unwrap();
        assert!(sibuya_ln_survival(alpha, c) < (sl * 0.5).ln());
        assert!(sibuya_ln_survival(alpha, c - 1) >= (sl * 0.5).ln());
    }

    #[test]
    fn sampled_frequencies_track_pmf() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for sampler in [
            MtpSampler::Sibuya { alpha: 0.6 },
            MtpSampler::new(&LevyModel::gamma(1.0, 1.0), 1.0).unwrap(),
        ] {
            let n = 200_000;
            let mut counts = [0u64; 4];
            for _ in 0..n {
                let c = sampler.sample(&mut rng).unwrap();
                if c <= 4 {
                    counts[c as usize - 1] += 1;
                }
            }
            for c in 1..=4u64 {
                let p = sampler.pmf(c);
                let se = (p * (1.0 - p) / n as f64).sqrt();
                let f = counts[c as usize - 1] as f64 / n as f64;
                assert!((f - p).abs() < 5.0 * se, "c={c}: {f} vs {p}");
            }
        }
    }
}
