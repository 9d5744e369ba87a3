use rand::Rng;

use crate::error::{Error, Result};
use crate::hier::HierModel;
use crate::laws::{LawEvaluator, NestedConfig};
use crate::oracle::enumerate_nested_configs;

pub const CONDITIONAL_MAX_COUNT: usize = 8;
pub const CONDITIONAL_MAX_GROUPS: usize = 2;

/// Exact sampler of the nested configuration given per-group totals, by
/// weighted choice over the full enumeration.
#[derive(Debug, Clone)]
pub struct ConditionalSampler {
    configs: Vec<NestedConfig>,
    /// Cumulative probabilities, last entry 1.
    cumulative: Vec<f64>,
}

impl ConditionalSampler {
    pub fn new(hier: &HierModel, counts: &[usize]) -> Result<Self> {
        if counts.len() > CONDITIONAL_MAX_GROUPS || counts.iter().any(|&n| n == 0 || n > CONDITIONAL_MAX_COUNT) {
            return Err(Error::Envelope(format!(
                "conditional sampling needs at most {CONDITIONAL_MAX_GROUPS} groups with 1 ≤ n_j ≤ {CONDITIONAL_MAX_COUNT}, got {counts:?}"
            )));
        }
        let eval = LawEvaluator::new(hier, counts)?;
        let weighted = enumerate_nested_configs(counts)?;
        let mut ln_w = Vec::with_capacity(weighted.len());
        for w in &weighted {
            ln_w.push(w.ln_multiplicity() + eval.log_p_coarse(&w.config)? + eval.log_p_frag(&w.config)?);
        }
        let top = ln_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut cumulative = Vec::with_capacity(ln_w.len());
        let mut acc = 0.0;
        for v in &ln_w {
            acc += (v - top).exp();
            cumulative.push(acc);
        }
        for c in cumulative.iter_mut() {
            *c /= acc;
        }
        Ok(ConditionalSampler { configs: weighted.into_iter().map(|w| w.config).collect(), cumulative })
    }

    pub fn configs(&self) -> &[NestedConfig] {
        &self.configs
    }

    /// Probability of the orbit `i` of [`Self::configs`].
    pub fn probability(&self, i: usize) -> f64 {
        self.cumulative[i] - if i == 0 { 0.0 } else { self.cumulative[i - 1] }
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u).min(self.configs.len() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &NestedConfig {
        &self.configs[self.sample_index(rng)]
    }
}

/// One draw of the nested configuration given totals n⃗.
pub fn sample_conditional_given_totals<R: Rng + ?Sized>(hier: &HierModel, counts: &[usize], rng: &mut R) -> Result<NestedConfig> {
    Ok(ConditionalSampler::new(hier, counts)?.sample(rng).clone())
}
