use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hier::{HierModel, HierTables};
use crate::laws::NestedConfig;
use crate::quadrature::{integrate_orthant, QuadConfig, QuadResult};
use crate::special::ln_gamma;

/// Which marginal law to integrate over the arrival times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalSide {
    /// Species partition of all observations.
    Coarse,
    /// Per-group partitions into fine blocks.
    Fine,
    /// The nested configuration itself.
    Joint,
}

/// Numerator of the conditional law, free of the joint moment it is divided by.
fn ln_numerator(t: &HierTables, cfg: &NestedConfig, side: MarginalSide) -> Result<f64> {
    let fine = |t: &HierTables| -> f64 {
        (0..cfg.groups()).map(|j| cfg.fine_blocks(j).map(|c| t.log_group_cumulant(j, c)).sum::<f64>()).sum()
    };
    Ok(match side {
        MarginalSide::Coarse => {
            let mut v = -t.base_exponent;
            for l in 0..cfg.species() {
                v += t.log_composed(&cfg.species_counts(l))?;
            }
            v
        }
        MarginalSide::Fine => t.log_base_moment(cfg.k_total()) + fine(t),
        MarginalSide::Joint => {
            -t.base_exponent + (0..cfg.species()).map(|l| t.log_base_cumulant(cfg.x_tilde(l))).sum::<f64>() + fine(t)
        }
    })
}

/// The chosen law integrated against the arrival-time density T⃗ of n⃗.
///
/// The sampling times in `hier` are ignored; every group count must be positive.
pub fn marginal_eppf(cfg: &NestedConfig, hier: &HierModel, side: MarginalSide, quad: &QuadConfig) -> Result<QuadResult> {
    let counts = cfg.totals();
    if counts.len() != hier.groups() {
        return domain(format!("configuration has {} groups, model has {}", counts.len(), hier.groups()));
    }
    if counts.iter().any(|&n| n == 0) {
        return domain("marginal laws need every group count to be positive");
    }
    let ln_norm: f64 = counts.iter().map(|&n| ln_gamma(n as f64)).sum();
    let failure = std::cell::RefCell::new(None);
    let f = |g: &[f64]| -> f64 {
        let eval = hier
            .with_gammas(g.to_vec())
            .and_then(|h| HierTables::new(&h, &counts))
            .and_then(|t| ln_numerator(&t, cfg, side));
        match eval {
            Ok(v) => {
                let pre: f64 = counts.iter().zip(g).map(|(&n, &x)| (n as f64 - 1.0) * x.ln()).sum();
                (pre + v - ln_norm).exp()
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let r = integrate_orthant(f, counts.len(), quad);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyModel;
    use crate::partition::pd_eppf;

    #[test]
    fn stable_composition_marginals_are_pd() {
        let (a, b) = (0.6, 0.3);
        let h = HierModel::stable_in_stable(a, b, 1.0).unwrap();
        let cfg = NestedConfig::single_group(vec![vec![2, 1], vec![1]]).unwrap();
        let q = QuadConfig::default();
        let coarse = marginal_eppf(&cfg, &h, MarginalSide::Coarse, &q).unwrap().value;
        let fine = marginal_eppf(&cfg, &h, MarginalSide::Fine, &q).unwrap().value;
        let joint = marginal_eppf(&cfg, &h, MarginalSide::Joint, &q).unwrap().value;
        let ex_coarse = pd_eppf(b, &[3, 1]).unwrap().exp();
        let ex_fine = pd_eppf(a, &[2, 1, 1]).unwrap().exp();
        let ex_joint = ex_fine * pd_eppf(b / a, &[2, 1]).unwrap().exp();
        assert!((coarse / ex_coarse - 1.0).abs() < 1e-8, "{coarse} {ex_coarse}");
        assert!((fine / ex_fine - 1.0).abs() < 1e-8, "{fine} {ex_fine}");
        assert!((joint / ex_joint - 1.0).abs() < 1e-8, "{joint} {ex_joint}");
    }

    #[test]
    fn zero_count_group_rejected() {
        let h = HierModel::new(LevyModel::stable(0.5), vec![LevyModel::stable(0.5), LevyModel::stable(0.5)], vec![1.0, 1.0]).unwrap();
        let cfg = NestedConfig::new(vec![vec![vec![1]], vec![vec![]]]).unwrap();
        assert!(marginal_eppf(&cfg, &h, MarginalSide::Coarse, &QuadConfig::default()).is_err());
    }
}
