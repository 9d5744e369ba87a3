//! The J-group hierarchy σⱼ∘σ₀ and cached cumulant/Bell tables for it.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::levy::{psi, BellTable, LevyModel};
use crate::special::LogSum;

/// Base model τ₀, group models τⱼ and group sampling times γⱼ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierModel {
    pub tau0: LevyModel,
    pub taus: Vec<LevyModel>,
    pub gammas: Vec<f64>,
}

impl HierModel {
    pub fn new(tau0: LevyModel, taus: Vec<LevyModel>, gammas: Vec<f64>) -> Result<Self> {
        let h = HierModel { tau0, taus, gammas };
        h.validate()?;
        Ok(h)
    }

    /// τ₀ = Stable(β/α), τ₁ = Stable(α) at time γ: the composition is β-stable.
    pub fn stable_in_stable(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(0.0 < beta && beta < alpha && alpha < 1.0) {
            return domain(format!("need 0 < beta < alpha < 1, got alpha={alpha}, beta={beta}"));
        }
        HierModel::new(LevyModel::stable(beta / alpha), vec![LevyModel::stable(alpha)], vec![gamma])
    }

    pub fn validate(&self) -> Result<()> {
        self.tau0.validate()?;
        if self.taus.is_empty() {
            return domain("hierarchy needs at least one group");
        }
        if self.taus.len() != self.gammas.len() {
            return domain(format!("{} group models but {} sampling times", self.taus.len(), self.gammas.len()));
        }
        for (m, &g) in self.taus.iter().zip(&self.gammas) {
            m.validate()?;
            if !(g > 0.0 && g.is_finite()) {
                return domain(format!("sampling times must be positive, got {g}"));
            }
        }
        Ok(())
    }

    pub fn groups(&self) -> usize {
        self.taus.len()
    }

    pub fn with_gammas(&self, gammas: Vec<f64>) -> Result<Self> {
        HierModel::new(self.tau0, self.taus.clone(), gammas)
    }

    /// ψⱼ(γⱼ) for every group.
    pub fn psis(&self) -> Result<Vec<f64>> {
        self.taus.iter().zip(&self.gammas).map(|(m, &g)| psi(m, g)).collect()
    }

    /// Ψ₀(Σⱼ ψⱼ(γⱼ)), the Poisson mean of the species count.
    pub fn base_exponent(&self) -> Result<f64> {
        psi(&self.tau0, self.psis()?.iter().sum())
    }

    /// qⱼ = ψⱼ/Σψ, the group allocation probabilities.
    pub fn allocation_probs(&self) -> Result<Vec<f64>> {
        let p = self.psis()?;
        let s: f64 = p.iter().sum();
        Ok(p.into_iter().map(|v| v / s).collect())
    }
}

/// Cumulant and Bell tables of a hierarchy, sized for given per-group counts.
#[derive(Debug, Clone)]
pub struct HierTables {
    pub hier: HierModel,
    pub psis: Vec<f64>,
    pub psi_sum: f64,
    /// Ψ₀(Σψ).
    pub base_exponent: f64,
    /// Bell table of τⱼ at γⱼ.
    pub groups: Vec<BellTable>,
    /// Bell table of τ₀ at Σψ, covering orders up to Σⱼ max count.
    pub base: BellTable,
}

impl HierTables {
    pub fn new(hier: &HierModel, max_counts: &[usize]) -> Result<Self> {
        hier.validate()?;
        if max_counts.len() != hier.groups() {
            return domain(format!("{} counts for {} groups", max_counts.len(), hier.groups()));
        }
        let psis = hier.psis()?;
        let psi_sum: f64 = psis.iter().sum();
        let groups = hier
            .taus
            .iter()
            .zip(&hier.gammas)
            .zip(max_counts)
            .map(|((m, &g), &n)| BellTable::new(m, n.max(1), g))
            .collect::<Result<Vec<_>>>()?;
        let total: usize = max_counts.iter().sum();
        let base = BellTable::new(&hier.tau0, total.max(1), psi_sum)?;
        let base_exponent = base.cumulants.psi();
        Ok(HierTables { hier: hier.clone(), psis, psi_sum, base_exponent, groups, base })
    }

    pub fn groups(&self) -> usize {
        self.groups.len()
    }

    /// ln ψⱼ^{(c)}(γⱼ).
    pub fn log_group_cumulant(&self, j: usize, c: usize) -> f64 {
        self.groups[j].cumulants.log_cumulant(c)
    }

    /// ln Ψ₀^{(c)}(Σψ).
    pub fn log_base_cumulant(&self, c: usize) -> f64 {
        self.base.cumulants.log_cumulant(c)
    }

    /// ln E[σ₀(1)^k e^{-σ₀(1)Σψ}].
    pub fn log_base_moment(&self, k: usize) -> f64 {
        if k == 0 {
            -self.base_exponent
        } else {
            self.base.log_moment(k, 1.0)
        }
    }

    fn check_counts(&self, counts: &[usize]) -> Result<()> {
        if counts.len() != self.groups() {
            return domain(format!("{} counts for {} groups", counts.len(), self.groups()));
        }
        for (j, &n) in counts.iter().enumerate() {
            if n > self.groups[j].n {
                return domain(format!("count {n} in group {j} exceeds table size {}", self.groups[j].n));
            }
        }
        if counts.iter().sum::<usize>() > self.base.n.max(1) && counts.iter().sum::<usize>() > 0 {
            return domain("counts exceed the base table");
        }
        Ok(())
    }

    /// Σ over r⃗ (rⱼ ∈ 1..=nⱼ, or 0 when nⱼ = 0) of exp(Σⱼ ln Ξ^{[nⱼ]}_{rⱼ} + f(Σ rⱼ)).
    fn sum_over_r(&self, counts: &[usize], f: impl Fn(usize) -> f64) -> f64 {
        let lo: Vec<usize> = counts.iter().map(|&n| usize::from(n > 0)).collect();
        let mut r = lo.clone();
        let mut acc = LogSum::new();
        loop {
            let mut term = f(r.iter().sum());
            for (j, (&rj, &nj)) in r.iter().zip(counts).enumerate() {
                term += self.groups[j].log_xi_partial(nj, rj);
            }
            acc.add(term);
            let mut j = 0;
            loop {
                if j == r.len() {
                    return acc.value();
                }
                if r[j] < counts[j] {
                    r[j] += 1;
                    break;
                }
                r[j] = lo[j];
                j += 1;
            }
        }
    }

    /// ln (Ψ₀∘Σψⱼ)^{(n⃗)}(γ⃗).
    pub fn log_composed(&self, counts: &[usize]) -> Result<f64> {
        self.check_counts(counts)?;
        if counts.iter().all(|&n| n == 0) {
            return domain("composed cumulant needs at least one positive count");
        }
        Ok(self.sum_over_r(counts, |r| self.log_base_cumulant(r)))
    }

    /// ln E[Πⱼ σⱼ(σ₀(1))^{nⱼ} e^{-Σ σⱼ γⱼ}].
    pub fn log_joint_moment(&self, counts: &[usize]) -> Result<f64> {
        self.check_counts(counts)?;
        Ok(self.sum_over_r(counts, |r| self.log_base_moment(r)))
    }
}
