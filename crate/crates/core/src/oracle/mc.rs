use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hier::{HierModel, HierTables};
use crate::levy::{ln_sibuya_pmf, mtp_pmf, LevyModel};
use crate::oracle::report::{Criterion, McSection, McStatistic};
use crate::oracle::stats::chi_square_gof;
use crate::sampler::{Histogram, SummaryCaps, SummarySampler};
use crate::special::ln_factorial;
use crate::stable::{ln_stable_k_poisson_table, ln_stable_n_poisson_table};

/// Source of the expected count laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum McReference {
    /// Library count laws of the hierarchy.
    Exact,
    /// Poisson/Sibuya closed forms of the stable-in-stable hierarchy.
    StableClosedForm { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub draws: u64,
    pub seed: u64,
    #[serde(default = "one")]
    pub jobs: usize,
    #[serde(default)]
    pub caps: SummaryCaps,
    #[serde(default = "exact")]
    pub reference: McReference,
}

fn one() -> usize {
    1
}

fn exact() -> McReference {
    McReference::Exact
}

/// P(value = v) for v below the histogram length; the rest is the tail.
struct Expected {
    name: String,
    probs: Vec<f64>,
}

fn poisson(mean: f64, bins: usize) -> Vec<f64> {
    (0..bins).map(|k| (k as f64 * mean.ln() - mean - ln_factorial(k as u64)).exp()).collect()
}

fn zero_based(bins: usize, f: impl Fn(u64) -> Result<f64>) -> Result<Vec<f64>> {
    let mut out = vec![0.0];
    for c in 1..bins as u64 {
        out.push(f(c)?);
    }
    Ok(out)
}

/// Compound Poisson pmf with rate `rate` and summand pmf `f` (f[0] = 0), by
/// Panjer's recursion.
fn compound_poisson(rate: f64, f: &[f64]) -> Vec<f64> {
    let mut g = vec![(-rate).exp()];
    for k in 1..f.len() {
        let mut s = 0.0;
        for x in 1..=k {
            s += x as f64 * f[x] * g[k - x];
        }
        g.push(rate * s / k as f64);
    }
    g
}

fn single_group(hier: &HierModel, j: usize) -> Result<HierModel> {
    HierModel::new(hier.tau0.clone(), vec![hier.taus[j].clone()], vec![hier.gammas[j]])
}

fn count_law(hier: &HierModel, bins: usize) -> Result<Vec<f64>> {
    let t = HierTables::new(hier, &[bins.saturating_sub(1)])?;
    let g = hier.gammas[0];
    (0..bins).map(|n| Ok((n as f64 * g.ln() - ln_factorial(n as u64) + t.log_joint_moment(&[n])?).exp())).collect()
}

fn exact_laws(hier: &HierModel, caps: &SummaryCaps) -> Result<Vec<Expected>> {
    let psis = hier.psis()?;
    let psi_sum: f64 = psis.iter().sum();
    let rate = hier.base_exponent()?;
    let x = zero_based(caps.x_bins, |c| mtp_pmf(&hier.tau0, psi_sum, c))?;
    let mut laws = vec![
        Expected { name: "phi".into(), probs: poisson(rate, caps.phi_bins) },
        Expected { name: "k_tilde".into(), probs: compound_poisson(rate, &x) },
        Expected { name: "x_tilde".into(), probs: x },
    ];
    for j in 0..hier.groups() {
        laws.push(Expected {
            name: format!("c[{j}]"),
            probs: zero_based(caps.c_bins, |c| mtp_pmf(&hier.taus[j], hier.gammas[j], c))?,
        });
        laws.push(Expected { name: format!("total[{j}]"), probs: count_law(&single_group(hier, j)?, caps.total_bins)? });
    }
    Ok(laws)
}

fn stable_laws(hier: &HierModel, alpha: f64, beta: f64, caps: &SummaryCaps) -> Result<Vec<Expected>> {
    let expected = HierModel::stable_in_stable(alpha, beta, hier.gammas.first().copied().unwrap_or(1.0))?;
    if hier.groups() != 1 || hier.tau0 != LevyModel::stable(beta / alpha) || hier.taus[0] != expected.taus[0] {
        return domain("stable closed-form reference needs the stable-in-stable hierarchy");
    }
    let zeta = hier.gammas[0].powf(beta);
    let exp = |v: Vec<f64>| v.into_iter().map(f64::exp).collect::<Vec<_>>();
    Ok(vec![
        Expected { name: "phi".into(), probs: poisson(zeta, caps.phi_bins) },
        Expected { name: "k_tilde".into(), probs: exp(ln_stable_k_poisson_table(alpha, beta, caps.x_bins - 1, zeta)?) },
        Expected { name: "x_tilde".into(), probs: zero_based(caps.x_bins, |c| ln_sibuya_pmf(beta / alpha, c).map(f64::exp))? },
        Expected { name: "c[0]".into(), probs: zero_based(caps.c_bins, |c| ln_sibuya_pmf(alpha, c).map(f64::exp))? },
        Expected { name: "total[0]".into(), probs: exp(ln_stable_n_poisson_table(beta, caps.total_bins - 1, zeta)?) },
    ])
}

/// Runs the summary sampler and tests each count statistic against its law.
pub fn mc_compare(hier: &HierModel, cfg: &McConfig) -> Result<McSection> {
    if cfg.draws == 0 {
        return domain("need at least one draw");
    }
    let sampler = SummarySampler::new(hier, cfg.caps)?;
    let laws = match cfg.reference {
        McReference::Exact => exact_laws(hier, &cfg.caps)?,
        McReference::StableClosedForm { alpha, beta } => stable_laws(hier, alpha, beta, &cfg.caps)?,
    };
    let acc = sampler.run_parallel(cfg.seed, cfg.draws, cfg.jobs)?;
    let hist = |name: &str| -> &Histogram {
        match name {
            "phi" => &acc.phi,
            "k_tilde" => &acc.k_tilde,
            "x_tilde" => &acc.x_tilde,
            _ => {
                let j: usize = name[name.find('[').unwrap() + 1..name.len() - 1].parse().unwrap();
                if name.starts_with('c') {
                    &acc.c[j]
                } else {
                    &acc.totals[j]
                }
            }
        }
    };
    let statistics = laws
        .iter()
        .map(|law| {
            let h = hist(&law.name);
            let r = chi_square_gof(h, &law.probs);
            McStatistic { statistic: law.name.clone(), samples: h.total(), chi2: r.chi2, dof: r.dof, p_value: r.p_value, tv: r.tv }
        })
        .collect();
    Ok(McSection { draws: cfg.draws, seed: cfg.seed, statistics })
}

/// p-value and TV criteria for each statistic of a section.
pub fn mc_criteria(section: &McSection, min_p: f64, max_tv: f64) -> Vec<Criterion> {
    let mut out = Vec::new();
    for s in &section.statistics {
        out.push(Criterion::above(format!("{} p-value", s.statistic), s.p_value, min_p));
        out.push(Criterion::below(format!("{} total variation", s.statistic), s.tv, max_tv));
    }
    out
}
