use std::collections::BTreeMap;

use crate::error::Result;
use crate::hier::HierModel;
use crate::laws::LawEvaluator;
use crate::oracle::enumerate::{coarse_key, enumerate_nested_configs, fine_key, ln_big};
use crate::oracle::report::{DualityRow, DualitySection, LawSum, NormalizationSection};
use crate::special::LogSum;

fn law_sum(law: &str, sum: f64) -> LawSum {
    LawSum { law: law.to_string(), sum, abs_error: (sum - 1.0).abs() }
}

/// Both joint factorizations and each of the four conditional laws, summed
/// with exact multiplicities over the enumeration of n⃗.
pub fn total_mass_check(hier: &HierModel, counts: &[usize]) -> Result<NormalizationSection> {
    let configs = enumerate_nested_configs(counts)?;
    let eval = LawEvaluator::new(hier, counts)?;
    let mut frag_side = LogSum::new();
    let mut fine_side = LogSum::new();
    // orbit key -> (labeled orbit count, law value, Σ mult × conditional)
    let mut coarse: BTreeMap<Vec<Vec<usize>>, (f64, f64, LogSum)> = BTreeMap::new();
    let mut fine: BTreeMap<Vec<Vec<usize>>, (f64, f64, LogSum)> = BTreeMap::new();
    for w in &configs {
        let m = w.ln_multiplicity();
        let c = &w.config;
        let (p_coarse, p_frag) = (eval.log_p_coarse(c)?, eval.log_p_frag(c)?);
        let (p_fine, p_coag) = (eval.log_p_fine(c)?, eval.log_p_coag(c)?);
        frag_side.add(m + p_coarse + p_frag);
        fine_side.add(m + p_fine + p_coag);
        let (ck, cm) = coarse_key(c);
        coarse.entry(ck).or_insert_with(|| (ln_big(&cm), p_coarse, LogSum::new())).2.add(m + p_frag);
        let (fk, fm) = fine_key(c);
        fine.entry(fk).or_insert_with(|| (ln_big(&fm), p_fine, LogSum::new())).2.add(m + p_coag);
    }
    let marginal = |orbits: &BTreeMap<_, (f64, f64, LogSum)>| orbits.values().map(|o| o.0 + o.1).collect::<LogSum>().value().exp();
    let worst = |orbits: &BTreeMap<_, (f64, f64, LogSum)>| {
        orbits.values().map(|o| (o.2.value() - o.0).exp()).fold(1.0, |w: f64, s| if (s - 1.0).abs() > (w - 1.0).abs() { s } else { w })
    };
    Ok(NormalizationSection {
        counts: counts.to_vec(),
        config_count: configs.len(),
        sums: vec![
            law_sum("coarse_frag_joint", frag_side.value().exp()),
            law_sum("fine_coag_joint", fine_side.value().exp()),
            law_sum("coarse", marginal(&coarse)),
            law_sum("fine", marginal(&fine)),
            law_sum("frag_given_coarse", worst(&coarse)),
            law_sum("coag_given_fine", worst(&fine)),
        ],
    })
}

/// The duality residual on every enumerated configuration of n⃗.
pub fn duality_sweep(hier: &HierModel, counts: &[usize]) -> Result<DualitySection> {
    let configs = enumerate_nested_configs(counts)?;
    let eval = LawEvaluator::new(hier, counts)?;
    let mut rows = Vec::with_capacity(configs.len());
    for (i, w) in configs.iter().enumerate() {
        let c = &w.config;
        let log_lhs = eval.log_p_coag(c)? + eval.log_p_fine(c)?;
        let log_rhs = eval.log_p_frag(c)? + eval.log_p_coarse(c)?;
        rows.push(DualityRow { config_id: i, r: c.species(), k_tilde: c.k_total(), log_lhs, log_rhs, residual: (log_lhs - log_rhs).abs() });
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(DualitySection { counts: counts.to_vec(), config_count: rows.len(), max_residual, rows })
}
