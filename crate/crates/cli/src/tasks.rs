use phibp::laws::MarginalSide;
use phibp::oracle::{
    counts_label, duality_sweep, marginal_sweep, mc_compare, mc_criteria, pitman_recovery_sweep, sample_table, stable_master_sweep,
    total_mass_check, Criterion, McConfig, McReference, VerificationReport,
};
use phibp::quadrature::QuadConfig;

use crate::config::{ConfigError, ExperimentConfig, Task};

/// Why a task did not produce a report.
#[derive(Debug)]
pub enum TaskError {
    Config(ConfigError),
    Run(phibp::error::Error),
}

impl From<ConfigError> for TaskError {
    fn from(e: ConfigError) -> Self {
        TaskError::Config(e)
    }
}

impl From<phibp::error::Error> for TaskError {
    fn from(e: phibp::error::Error) -> Self {
        TaskError::Run(e)
    }
}

/// Runs `task`; the report carries one criterion per checked tolerance.
pub fn run(task: Task, cfg: &ExperimentConfig, jobs: usize) -> Result<VerificationReport, TaskError> {
    cfg.validate(task)?;
    let tol = cfg.tolerances;
    let quad: QuadConfig = cfg.quadrature.into();
    let mut report = VerificationReport::new(cfg.sweep_id.clone().unwrap_or_else(|| task.name().to_string()));
    if let Some(c) = &cfg.counts {
        report.counts = c.clone();
    }
    match task {
        Task::VerifyDuality => {
            let hier = cfg.hierarchy()?;
            for counts in cfg.count_list()? {
                let d = duality_sweep(&hier, &counts)?;
                report.criteria.push(Criterion::below(format!("duality residual ({})", counts_label(&counts)), d.max_residual, tol.duality));
                report.add_duality(d);
            }
            report.model = Some(hier);
        }
        Task::Normalize => {
            let hier = cfg.hierarchy()?;
            for counts in cfg.count_list()? {
                let s = total_mass_check(&hier, &counts)?;
                report.config_count += s.config_count;
                report.criteria.push(Criterion::below(
                    format!("normalization ({})", counts_label(&counts)),
                    s.max_abs_error(),
                    tol.normalization,
                ));
                report.normalization.push(s);
            }
            report.model = Some(hier);
        }
        Task::Sample => {
            let hier = cfg.hierarchy()?;
            let draws = cfg.draws.expect("validated");
            let seeds = cfg.seed_list();
            for &seed in &seeds {
                let mut t = sample_table(&hier, seed, draws, jobs, cfg.caps.unwrap_or_default())?;
                if seeds.len() > 1 {
                    t.name = format!("samples_seed{seed}");
                }
                report.tables.push(t);
            }
            report.model = Some(hier);
        }
        Task::McCompare => {
            let hier = cfg.hierarchy()?;
            let reference = cfg.reference.unwrap_or(McReference::Exact);
            for seed in cfg.seed_list() {
                let mc = McConfig {
                    draws: cfg.draws.expect("validated"),
                    seed,
                    jobs,
                    caps: cfg.caps.unwrap_or_default(),
                    reference,
                };
                let section = mc_compare(&hier, &mc)?;
                let mut crit = mc_criteria(&section, tol.p_value, tol.tv);
                if let Some(names) = &cfg.criteria_statistics {
                    crit.retain(|c| names.iter().any(|n| c.name.starts_with(&format!("{n} "))));
                }
                for c in &mut crit {
                    c.name = format!("{} (seed {seed})", c.name);
                }
                report.criteria.extend(crit);
                report.mc.push(section);
            }
            report.model = Some(hier);
        }
        Task::StableMaster => {
            let params = cfg.stable.expect("validated");
            let (s, tables) = stable_master_sweep(&params, cfg.max_n.unwrap_or(6), cfg.max_mixing_n.unwrap_or(8))?;
            report.config_count = s.config_count;
            report.max_duality_residual = Some(s.max_master_residual);
            report.criteria.extend([
                Criterion::below("conditional laws vs master factors", s.max_reduction, tol.reduction),
                Criterion::below("master equation residual", s.max_master_residual, tol.duality),
                Criterion::below("Gibbs duality residual", s.max_gibbs_residual, tol.gibbs),
                Criterion::below("fragmentation invariance", s.max_frag_invariance, tol.frag),
                Criterion::below("mixing identity residual", s.max_mixing_residual, tol.mixing),
            ]);
            report.tables.extend(tables);
            report.model = Some(cfg.hierarchy()?);
        }
        Task::RecoverPitman => {
            let params = cfg.stable.expect("validated");
            let thetas = cfg.thetas.clone().unwrap_or_else(|| vec![params.theta]);
            let (s, t) = pitman_recovery_sweep(params.alpha, params.beta, &thetas, cfg.max_n.unwrap_or(6), &quad)?;
            report.config_count = s.config_count;
            report.criteria.extend([
                Criterion::below("recovery vs closed form", s.max_recovery_error, tol.recovery),
                Criterion::below("quadrature path agreement", s.max_path_gap, tol.path_agreement),
            ]);
            report.tables.push(t);
        }
        Task::Marginalize => {
            let hier = cfg.hierarchy()?;
            let side = cfg.side.unwrap_or(MarginalSide::Coarse);
            for counts in cfg.count_list()? {
                let (s, t) = marginal_sweep(&hier, &counts, side, &quad)?;
                report.config_count += s.orbit_count;
                report.criteria.push(Criterion::below(format!("marginal mass ({})", counts_label(&counts)), s.abs_error, tol.marginal));
                merge_table(&mut report, t);
            }
            report.model = Some(hier);
        }
    }
    Ok(report)
}

fn merge_table(report: &mut VerificationReport, t: phibp::oracle::Table) {
    match report.tables.iter_mut().find(|x| x.name == t.name) {
        Some(existing) => existing.rows.extend(t.rows),
        None => report.tables.push(t),
    }
}
