use crate::error::{domain, Result};
use crate::hier::{HierModel, HierTables};
use crate::laws::NestedConfig;

/// Cached tables for evaluating the four conditional laws at fixed γ⃗ and n⃗.
///
/// All returned values are natural-log probabilities.
#[derive(Debug, Clone)]
pub struct LawEvaluator {
    tables: HierTables,
    counts: Vec<usize>,
}

impl LawEvaluator {
    pub fn new(hier: &HierModel, counts: &[usize]) -> Result<Self> {
        Ok(LawEvaluator { tables: HierTables::new(hier, counts)?, counts: counts.to_vec() })
    }

    pub fn tables(&self) -> &HierTables {
        &self.tables
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    fn check(&self, cfg: &NestedConfig) -> Result<()> {
        if cfg.groups() != self.counts.len() {
            return domain(format!("configuration has {} groups, model has {}", cfg.groups(), self.counts.len()));
        }
        if cfg.totals() != self.counts {
            return domain(format!("configuration totals {:?} differ from evaluator counts {:?}", cfg.totals(), self.counts));
        }
        Ok(())
    }

    fn check_all_observed(&self) -> Result<()> {
        if self.counts.iter().any(|&n| n == 0) {
            return domain("arrival-time conditioning needs every group count to be positive");
        }
        Ok(())
    }

    /// Fine EPPF of the group-level blocks given n⃗ at arrival times γ⃗.
    pub fn log_p_fine(&self, cfg: &NestedConfig) -> Result<f64> {
        self.check(cfg)?;
        self.check_all_observed()?;
        let t = &self.tables;
        let mut v = t.log_base_moment(cfg.k_total());
        for j in 0..cfg.groups() {
            v += cfg.fine_blocks(j).map(|c| t.log_group_cumulant(j, c)).sum::<f64>();
        }
        Ok(v - t.log_joint_moment(&self.counts)?)
    }

    /// Coagulation EPPF: grouping the K̃ fine blocks into species.
    pub fn log_p_coag(&self, cfg: &NestedConfig) -> Result<f64> {
        self.check(cfg)?;
        let t = &self.tables;
        let mut v = -t.base_exponent;
        for l in 0..cfg.species() {
            v += t.log_base_cumulant(cfg.x_tilde(l));
        }
        Ok(v - t.log_base_moment(cfg.k_total()))
    }

    /// Fragmentation EPPF: refining each species' n⃗_ℓ into fine blocks.
    pub fn log_p_frag(&self, cfg: &NestedConfig) -> Result<f64> {
        self.check(cfg)?;
        let t = &self.tables;
        let mut v = 0.0;
        for l in 0..cfg.species() {
            v += t.log_base_cumulant(cfg.x_tilde(l));
            for j in 0..cfg.groups() {
                v += cfg.blocks()[j][l].iter().map(|&c| t.log_group_cumulant(j, c)).sum::<f64>();
            }
            v -= t.log_composed(&cfg.species_counts(l))?;
        }
        Ok(v)
    }

    /// Coarse EPPF of the species partition given n⃗ at arrival times γ⃗.
    pub fn log_p_coarse(&self, cfg: &NestedConfig) -> Result<f64> {
        self.check(cfg)?;
        self.check_all_observed()?;
        let t = &self.tables;
        let mut v = -t.base_exponent;
        for l in 0..cfg.species() {
            v += t.log_composed(&cfg.species_counts(l))?;
        }
        Ok(v - t.log_joint_moment(&self.counts)?)
    }

    /// |ln(p_coag·p_fine) − ln(p_frag·p_coarse)|.
    pub fn duality_residual(&self, cfg: &NestedConfig) -> Result<f64> {
        let lhs = self.log_p_coag(cfg)? + self.log_p_fine(cfg)?;
        let rhs = self.log_p_frag(cfg)? + self.log_p_coarse(cfg)?;
        Ok((lhs - rhs).abs())
    }
}

/// ln p_fine at the sampling times carried by `hier`.
pub fn p_fine(cfg: &NestedConfig, hier: &HierModel) -> Result<f64> {
    LawEvaluator::new(hier, &cfg.totals())?.log_p_fine(cfg)
}

/// ln p_coag at the sampling times carried by `hier`.
pub fn p_coag(cfg: &NestedConfig, hier: &HierModel) -> Result<f64> {
    LawEvaluator::new(hier, &cfg.totals())?.log_p_coag(cfg)
}

/// ln p_frag at the sampling times carried by `hier`.
pub fn p_frag(cfg: &NestedConfig, hier: &HierModel) -> Result<f64> {
    LawEvaluator::new(hier, &cfg.totals())?.log_p_frag(cfg)
}

/// ln p_coarse at the sampling times carried by `hier`.
pub fn p_coarse(cfg: &NestedConfig, hier: &HierModel) -> Result<f64> {
    LawEvaluator::new(hier, &cfg.totals())?.log_p_coarse(cfg)
}

/// Absolute log-scale gap between the two factorizations of the joint law.
pub fn duality_residual(cfg: &NestedConfig, hier: &HierModel) -> Result<f64> {
    LawEvaluator::new(hier, &cfg.totals())?.duality_residual(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyModel;

    fn gg_hier() -> HierModel {
        HierModel::new(
            LevyModel::gen_gamma(0.3, 1.5, 0.7),
            vec![LevyModel::gen_gamma(0.4, 2.0, 1.1), LevyModel::gamma(0.9, 0.5)],
            vec![0.8, 1.7],
        )
        .unwrap()
    }

    #[test]
    fn duality_on_mixed_example() {
        let h = gg_hier();
        let cfg = NestedConfig::new(vec![vec![vec![2, 1], vec![1], vec![]], vec![vec![1], vec![], vec![3, 1]]]).unwrap();
        assert!(duality_residual(&cfg, &h).unwrap() < 1e-11);
    }

    #[test]
    fn single_observation_is_certain() {
        let h = HierModel::new(LevyModel::gen_gamma(0.3, 1.5, 0.7), vec![LevyModel::stable(0.5)], vec![0.4]).unwrap();
        let cfg = NestedConfig::single_group(vec![vec![1]]).unwrap();
        for v in [p_fine(&cfg, &h), p_coag(&cfg, &h), p_frag(&cfg, &h), p_coarse(&cfg, &h)] {
            assert!(v.unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn two_observations_gamma_gamma_by_hand() {
        // Φ(γ) = θ₀ ln(1 + ψ(γ)/ζ₀), ψ(γ) = θ₁ ln(1 + γ/ζ₁); derivatives by hand.
        let (t0, z0, t1, z1, g) = (2.0, 0.8, 1.3, 0.6, 0.9);
        let h = HierModel::new(LevyModel::gamma(t0, z0), vec![LevyModel::gamma(t1, z1)], vec![g]).unwrap();
        let psi = t1 * (1.0 + g / z1).ln();
        let d1 = t1 / (z1 + g);
        let d2 = -t1 / (z1 + g).powi(2);
        let phi1 = t0 / (z0 + psi) * d1;
        let phi2 = t0 / (z0 + psi).powi(2) * d1 * d1 - t0 / (z0 + psi) * d2;
        let split = phi1 * phi1 / (phi1 * phi1 + phi2);
        let e = LawEvaluator::new(&h, &[2]).unwrap();
        let two = NestedConfig::single_group(vec![vec![1], vec![1]]).unwrap();
        let one = NestedConfig::single_group(vec![vec![2]]).unwrap();
        assert!((e.log_p_coarse(&two).unwrap().exp() - split).abs() < 1e-14);
        assert!((e.log_p_coarse(&one).unwrap().exp() - (1.0 - split)).abs() < 1e-14);
        // one species: fine blocks (2) vs (1,1); ψ^{(2)} = -ψ'' and Ψ₀^{(2)} = θ₀/(ζ₀+ψ)²
        let b1 = t0 / (z0 + psi);
        let b2 = t0 / (z0 + psi).powi(2);
        let frag_split = b2 * d1 * d1 / (b2 * d1 * d1 + b1 * (-d2));
        let refined = NestedConfig::single_group(vec![vec![1, 1]]).unwrap();
        assert!((e.log_p_frag(&refined).unwrap().exp() - frag_split).abs() < 1e-14);
        assert!((e.log_p_frag(&one).unwrap().exp() - (1.0 - frag_split)).abs() < 1e-14);
    }

    #[test]
    fn species_order_is_irrelevant() {
        let h = gg_hier();
        let cfg = NestedConfig::new(vec![vec![vec![2, 1], vec![1], vec![]], vec![vec![1], vec![], vec![3, 1]]]).unwrap();
        let p = cfg.permute_species(&[2, 0, 1]).unwrap();
        let (a, b) = (LawEvaluator::new(&h, &cfg.totals()).unwrap(), LawEvaluator::new(&h, &p.totals()).unwrap());
        assert!((a.log_p_frag(&cfg).unwrap() - b.log_p_frag(&p).unwrap()).abs() < 1e-13);
        assert!((a.log_p_coarse(&cfg).unwrap() - b.log_p_coarse(&p).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn arrival_conditioning_needs_positive_counts() {
        let h = gg_hier();
        let cfg = NestedConfig::new(vec![vec![vec![1]], vec![vec![]]]).unwrap();
        assert!(p_fine(&cfg, &h).is_err());
        assert!(p_coarse(&cfg, &h).is_err());
        assert!(p_coag(&cfg, &h).is_ok());
        assert!(p_frag(&cfg, &h).is_ok());
    }
}
