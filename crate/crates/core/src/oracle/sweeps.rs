use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hier::HierModel;
use crate::laws::{marginal_eppf, MarginalSide, NestedConfig};
use crate::oracle::enumerate::{coarse_key, enumerate_nested_configs, fine_key, ln_big, WeightedConfig};
use crate::oracle::report::{counts_label, Cell, Table};
use crate::partition::compositions;
use crate::quadrature::QuadConfig;
use crate::sampler::{SummaryCaps, SummarySampler};
use crate::special::LogSum;
use crate::stable::{
    frag_invariance_check, gibbs_duality_residual, master_duality_residual, mixing_identity_residual, recover_pitman_by_quadrature,
    stable_reduction_check, PdPhi, StableDualityParams,
};

fn blocks_label(cfg: &NestedConfig) -> String {
    let group = |g: &Vec<Vec<usize>>| {
        g.iter().map(|c| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(" | ")
    };
    cfg.species_view().iter().map(group).collect::<Vec<_>>().join(" / ")
}

/// All single-group nested configurations with 1 ≤ n ≤ max_n, in order of n.
pub fn nested_partitions(max_n: usize) -> Result<Vec<WeightedConfig>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.extend(enumerate_nested_configs(&[n])?);
    }
    Ok(out)
}

/// Worst cases of the stable-in-stable checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableMasterSummary {
    pub config_count: usize,
    /// Largest relative gap between a conditional law and its ζ-factor.
    pub max_reduction: f64,
    pub max_master_residual: f64,
    /// Gibbs duality under PD(β, θ) weights.
    pub max_gibbs_residual: f64,
    pub max_frag_invariance: f64,
    pub max_mixing_residual: f64,
}

/// Reduction, master-equation and Gibbs checks on every nested partition of
/// n ≤ max_n at ζ = `params.zeta`; frag invariance over all compositions of
/// n ≤ max_n; the mixing identity for n ≤ max_mixing_n, K ≤ n.
pub fn stable_master_sweep(params: &StableDualityParams, max_n: usize, max_mixing_n: usize) -> Result<(StableMasterSummary, Vec<Table>)> {
    params.validate()?;
    let StableDualityParams { alpha, beta, theta, zeta } = *params;
    let phi = PdPhi { beta, theta };
    let mut configs = Table::new(
        "stable_master",
        &["config_id", "n", "r", "K_tilde", "blocks", "coag_rel", "fine_rel", "frag_rel", "coarse_rel", "master_residual", "gibbs_residual"],
    );
    let mut summary = StableMasterSummary {
        config_count: 0,
        max_reduction: 0.0,
        max_master_residual: 0.0,
        max_gibbs_residual: 0.0,
        max_frag_invariance: 0.0,
        max_mixing_residual: 0.0,
    };
    for (id, w) in nested_partitions(max_n)?.iter().enumerate() {
        let c = &w.config;
        let red = stable_reduction_check(alpha, beta, c, zeta)?;
        let master = master_duality_residual(alpha, beta, c, zeta)?;
        let gibbs = gibbs_duality_residual(alpha, beta, c, &phi)?;
        summary.config_count += 1;
        summary.max_reduction = summary.max_reduction.max(red.max());
        summary.max_master_residual = summary.max_master_residual.max(master);
        summary.max_gibbs_residual = summary.max_gibbs_residual.max(gibbs);
        configs.push(vec![
            id.into(),
            c.n(0).into(),
            c.species().into(),
            c.k_total().into(),
            blocks_label(c).into(),
            red.coag.into(),
            red.fine.into(),
            red.frag.into(),
            red.coarse.into(),
            master.into(),
            gibbs.into(),
        ]);
    }
    let mut frag = Table::new("frag_invariance", &["n", "blocks", "residual"]);
    for m in 1..=max_n {
        for comp in compositions(m) {
            let r = frag_invariance_check(alpha, beta, &comp)?;
            summary.max_frag_invariance = summary.max_frag_invariance.max(r);
            let label = comp.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
            frag.push(vec![m.into(), label.into(), r.into()]);
        }
    }
    let mut mixing = Table::new("mixing_identity", &["n", "K", "residual"]);
    for n in 1..=max_mixing_n {
        for k in 1..=n {
            let r = mixing_identity_residual(alpha, beta, theta, n, k)?;
            summary.max_mixing_residual = summary.max_mixing_residual.max(r);
            mixing.push(vec![n.into(), k.into(), r.into()]);
        }
    }
    Ok((summary, vec![configs, frag, mixing]))
}

/// Worst cases of the time-integrated master equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoverySummary {
    pub config_count: usize,
    /// Largest relative gap between a quadrature path and its closed form.
    pub max_recovery_error: f64,
    /// Largest relative gap between the two quadrature paths.
    pub max_path_gap: f64,
}

/// Pitman recovery on every nested partition of n ≤ max_n for each θ.
pub fn pitman_recovery_sweep(
    alpha: f64,
    beta: f64,
    thetas: &[f64],
    max_n: usize,
    quad: &QuadConfig,
) -> Result<(RecoverySummary, Table)> {
    let configs = nested_partitions(max_n)?;
    let mut t = Table::new(
        "recover_pitman",
        &["theta", "config_id", "n", "blocks", "coag_path", "frag_path", "closed_coag", "closed_frag", "coag_rel", "frag_rel", "path_gap"],
    );
    let mut s = RecoverySummary { config_count: 0, max_recovery_error: 0.0, max_path_gap: 0.0 };
    for &theta in thetas {
        let params = StableDualityParams::new(alpha, beta, theta, 1.0)?;
        for (id, w) in configs.iter().enumerate() {
            let r = recover_pitman_by_quadrature(&params, &w.config, quad)?;
            let coag_rel = (r.coag_path / r.closed_coag - 1.0).abs();
            let frag_rel = (r.frag_path / r.closed_frag - 1.0).abs();
            let gap = (r.coag_path / r.frag_path - 1.0).abs();
            s.config_count += 1;
            s.max_recovery_error = s.max_recovery_error.max(coag_rel).max(frag_rel);
            s.max_path_gap = s.max_path_gap.max(gap);
            t.push(vec![
                theta.into(),
                id.into(),
                w.config.n(0).into(),
                blocks_label(&w.config).into(),
                r.coag_path.into(),
                r.frag_path.into(),
                r.closed_coag.into(),
                r.closed_frag.into(),
                coag_rel.into(),
                frag_rel.into(),
                gap.into(),
            ]);
        }
    }
    Ok((s, t))
}

/// Σ over orbits of multiplicity × marginal law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalSummary {
    pub orbit_count: usize,
    pub total: f64,
    pub abs_error: f64,
}

/// The marginal law on `side` for every orbit of n⃗.
pub fn marginal_sweep(hier: &HierModel, counts: &[usize], side: MarginalSide, quad: &QuadConfig) -> Result<(MarginalSummary, Table)> {
    let configs = enumerate_nested_configs(counts)?;
    // one representative per orbit of the chosen side
    let mut orbits: Vec<(String, f64, NestedConfig)> = Vec::new();
    match side {
        MarginalSide::Joint => {
            for w in &configs {
                orbits.push((blocks_label(&w.config), w.ln_multiplicity(), w.config.clone()));
            }
        }
        MarginalSide::Coarse | MarginalSide::Fine => {
            let mut seen = std::collections::BTreeMap::new();
            for w in &configs {
                let (label, mult) = if side == MarginalSide::Coarse {
                    let (k, m) = coarse_key(&w.config);
                    (format!("{k:?}"), m)
                } else {
                    let (k, m) = fine_key(&w.config);
                    (format!("{k:?}"), m)
                };
                seen.entry(label.clone()).or_insert_with(|| (label, ln_big(&mult), w.config.clone()));
            }
            orbits.extend(seen.into_values());
        }
    }
    let mut t = Table::new("marginal", &["orbit_id", "counts", "orbit", "ln_multiplicity", "log_value", "value", "error"]);
    let mut total = LogSum::new();
    for (id, (label, ln_mult, cfg)) in orbits.iter().enumerate() {
        let r = marginal_eppf(cfg, hier, side, quad)?;
        if r.value <= 0.0 {
            return domain(format!("marginal law of orbit {label} is not positive"));
        }
        total.add(ln_mult + r.value.ln());
        t.push(vec![
            id.into(),
            counts_label(counts).into(),
            label.clone().into(),
            (*ln_mult).into(),
            r.value.ln().into(),
            r.value.into(),
            r.error.into(),
        ]);
    }
    let sum = total.value().exp();
    Ok((MarginalSummary { orbit_count: orbits.len(), total: sum, abs_error: (sum - 1.0).abs() }, t))
}

/// Per-draw count statistics of `draws` coupled draws.
pub fn sample_table(hier: &HierModel, seed: u64, draws: u64, jobs: usize, caps: SummaryCaps) -> Result<Table> {
    let sampler = SummarySampler::new(hier, caps)?;
    let groups = sampler.groups();
    let mut cols: Vec<String> = vec!["draw".into(), "phi".into(), "K_tilde".into()];
    for j in 0..groups {
        cols.push(format!("K_{j}"));
        cols.push(format!("N_{j}"));
    }
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("samples", &col_refs);
    for (d, s) in sampler.summaries_parallel(seed, draws, jobs)?.into_iter().enumerate() {
        let mut row: Vec<Cell> = vec![d.into(), s.phi.into(), s.k_tilde.into()];
        for j in 0..groups {
            row.push(s.blocks[j].into());
            row.push(match s.totals[j] {
                Some(n) => n.into(),
                None => Cell::Text("overflow".into()),
            });
        }
        t.push(row);
    }
    Ok(t)
}
