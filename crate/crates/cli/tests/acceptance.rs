//! The ten acceptance criteria at their stated tolerances, one line each.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use phibp::hier::HierModel;
use phibp::levy::LevyModel;
use phibp::oracle::{
    duality_sweep, mc_compare, moment_oracle, nested_partitions, pitman_recovery_sweep, total_mass_check, McConfig, McReference,
};
use phibp::partition::{compositions, gen_stirling_alternating, gen_stirling_linear, StirlingTable};
use phibp::quadrature::QuadConfig;
use phibp::sampler::SummaryCaps;
use phibp::stable::{frag_invariance_check, gibbs_duality_residual, mixing_identity_residual, stable_reduction_check, PdPhi};

type Outcome = Result<(bool, String), String>;

fn gg_model() -> HierModel {
    HierModel::new(
        LevyModel::gen_gamma(0.4, 1.0, 0.5),
        vec![LevyModel::gen_gamma(0.3, 1.0, 0.2), LevyModel::gen_gamma(0.6, 2.0, 0.1)],
        vec![1.0, 1.5],
    )
    .unwrap()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_duality() -> Outcome {
    let t = Instant::now();
    let d = duality_sweep(&gg_model(), &[3, 2]).map_err(err)?;
    let secs = t.elapsed().as_secs_f64();
    Ok((d.max_residual < 1e-10, format!("{} configs, max residual {:.3e} (< 1e-10), {secs:.2} s", d.config_count, d.max_residual)))
}

fn c2_normalization() -> Outcome {
    let h = gg_model();
    let (mut worst, mut vectors) = (0.0f64, 0);
    for n1 in 1..=5 {
        for n2 in 1..=(6 - n1) {
            let s = total_mass_check(&h, &[n1, n2]).map_err(err)?;
            for l in &s.sums {
                worst = worst.max(l.abs_error);
            }
            vectors += 1;
        }
    }
    Ok((worst < 1e-9, format!("{vectors} count vectors, max |sum - 1| {worst:.3e} (< 1e-9)")))
}

fn c3_stable_reduction() -> Outcome {
    let mut worst = 0.0f64;
    let configs = nested_partitions(6).map_err(err)?;
    for zeta in [0.5, 1.0, 2.0] {
        for w in &configs {
            worst = worst.max(stable_reduction_check(0.6, 0.3, &w.config, zeta).map_err(err)?.max());
        }
    }
    Ok((worst < 1e-12, format!("{} configs x 3 latent times, max relative gap {worst:.3e} (< 1e-12)", configs.len())))
}

fn c4_pitman_recovery() -> Outcome {
    let (s, _) = pitman_recovery_sweep(0.6, 0.3, &[0.0, 0.5], 6, &QuadConfig::default()).map_err(err)?;
    Ok((
        s.max_recovery_error < 1e-8 && s.max_path_gap < 1e-9,
        format!(
            "{} cases, max error vs closed form {:.3e} (< 1e-8), path gap {:.3e} (< 1e-9)",
            s.config_count, s.max_recovery_error, s.max_path_gap
        ),
    ))
}

fn c5_gibbs() -> Outcome {
    let configs = nested_partitions(6).map_err(err)?;
    let (mut gibbs, mut mixing) = (0.0f64, 0.0f64);
    for theta in [0.0, 0.5] {
        let phi = PdPhi { beta: 0.3, theta };
        for w in &configs {
            gibbs = gibbs.max(gibbs_duality_residual(0.6, 0.3, &w.config, &phi).map_err(err)?);
        }
        for n in 1..=8 {
            for k in 1..=n {
                mixing = mixing.max(mixing_identity_residual(0.6, 0.3, theta, n, k).map_err(err)?);
            }
        }
    }
    Ok((gibbs < 1e-12 && mixing < 1e-10, format!("Gibbs residual {gibbs:.3e} (< 1e-12), mixing identity {mixing:.3e} (< 1e-10)")))
}

fn c6_frag_invariance() -> Outcome {
    let (mut worst, mut count) = (0.0f64, 0);
    for m in 1..=6 {
        for c in compositions(m) {
            worst = worst.max(frag_invariance_check(0.6, 0.3, &c).map_err(err)?);
            count += 1;
        }
    }
    Ok((worst < 1e-12, format!("{count} compositions, max residual {worst:.3e} (< 1e-12)")))
}

fn c7_monte_carlo() -> Outcome {
    let h = HierModel::stable_in_stable(0.6, 0.3, 1.0).map_err(err)?;
    let cfg = McConfig {
        draws: 1_000_000,
        seed: 20240601,
        jobs: 1,
        caps: SummaryCaps::default(),
        reference: McReference::StableClosedForm { alpha: 0.6, beta: 0.3 },
    };
    let t = Instant::now();
    let s = mc_compare(&h, &cfg).map_err(err)?;
    let secs = t.elapsed().as_secs_f64();
    let mut ok = secs < 120.0;
    let mut parts = Vec::new();
    for name in ["phi", "c[0]", "x_tilde", "total[0]"] {
        let st = s.statistics.iter().find(|st| st.statistic == name).ok_or(format!("missing statistic {name}"))?;
        ok &= st.p_value > 1e-3 && st.tv < 5e-3;
        parts.push(format!("{name} p={:.3} tv={:.4}", st.p_value, st.tv));
    }
    Ok((ok, format!("{} ({secs:.1} s single-threaded)", parts.join(", "))))
}

fn c8_moments() -> Outcome {
    let (mut gamma_worst, mut gg_worst) = (0.0f64, 0.0f64);
    for (theta, zeta, lambda, gamma) in [(1.0, 1.0, 1.0, 1.0), (2.5, 0.7, 0.3, 1.9), (0.4, 3.0, 2.2, 0.05)] {
        for n in 0..=6 {
            let d = moment_oracle(&LevyModel::gamma(theta, zeta), lambda, n, gamma, &QuadConfig::default()).map_err(err)?;
            gamma_worst = gamma_worst.max(d.rel_error);
        }
    }
    let quad = QuadConfig { abs_tol: 1e-15, rel_tol: 1e-10, ..QuadConfig::default() };
    for (model, lambda, gamma) in
        [(LevyModel::gen_gamma(0.3, 1.0, 0.2), 1.0, 1.0), (LevyModel::gen_gamma(0.6, 2.0, 0.1), 0.7, 1.5), (LevyModel::stable(0.5), 1.3, 0.8)]
    {
        for n in 0..=6 {
            gg_worst = gg_worst.max(moment_oracle(&model, lambda, n, gamma, &quad).map_err(err)?.rel_error);
        }
    }
    Ok((
        gamma_worst < 1e-12 && gg_worst < 1e-7,
        format!("gamma closed form {gamma_worst:.3e} (< 1e-12), GG quadrature {gg_worst:.3e} (< 1e-7)"),
    ))
}

fn c9_stirling() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [0.25, 0.5, 0.75] {
        let table = StirlingTable::new(alpha, 12).map_err(err)?;
        for n in 1..=12 {
            for k in 1..=n {
                let alt = gen_stirling_alternating(alpha, n, k).map_err(err)?;
                worst = worst.max((table.ln(n, k).exp() / alt - 1.0).abs());
            }
        }
    }
    // α = 0: the alternating form is 0/0, its limit is the unsigned first kind
    let mut exact = vec![vec![1u64]];
    for n in 0..12u64 {
        let prev = &exact[n as usize];
        let row: Vec<u64> =
            (0..=n as usize + 1).map(|k| prev.get(k.wrapping_sub(1)).copied().unwrap_or(0) + n * prev.get(k).copied().unwrap_or(0)).collect();
        exact.push(row);
    }
    let lin = gen_stirling_linear(0.0, 12).map_err(err)?;
    let table0 = StirlingTable::new(0.0, 12).map_err(err)?;
    let mut exact_ok = true;
    for n in 1..=12 {
        for k in 1..=n {
            exact_ok &= lin[n][k] == exact[n][k] as f64;
            worst = worst.max((table0.ln(n, k).exp() / exact[n][k] as f64 - 1.0).abs());
        }
    }
    Ok((worst < 1e-9 && exact_ok, format!("max relative gap {worst:.3e} (< 1e-9), S_0 integer match: {exact_ok}")))
}

fn run_binary(task: &str, config: &Path, out: &Path, jobs: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_phibp"))
        .args([task, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--jobs", jobs])
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(err)?;
    // statistical criteria at this few draws may fail (exit 1); reports are still written
    if !matches!(status.code(), Some(0 | 1)) {
        return Err(format!("{task} exited with {status}"));
    }
    Ok(())
}

fn dir_bytes(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(err)?
        .map(|e| {
            let e = e.map_err(err)?;
            Ok((e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).map_err(err)?))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

fn c10_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(err)?;
    let model = r#""model": {
        "tau0": {"family": "gen_gamma", "alpha": 0.4, "theta": 1.0, "zeta": 0.5},
        "taus": [{"family": "gen_gamma", "alpha": 0.3, "theta": 1.0, "zeta": 0.2}, {"family": "gamma", "theta": 2.0, "zeta": 0.1}],
        "gammas": [1.0, 1.5]
    }"#;
    let configs = [
        ("sample", format!("{{ {model}, \"draws\": 1000, \"seeds\": [42] }}")),
        ("mc-compare", format!("{{ {model}, \"draws\": 20000, \"seeds\": [7, 8] }}")),
    ];
    let mut files = 0;
    for (task, text) in &configs {
        let cfg = tmp.path().join(format!("{task}.json"));
        std::fs::write(&cfg, text).map_err(err)?;
        let runs: Vec<_> = [("a", "1"), ("b", "1"), ("c", "3")]
            .iter()
            .map(|(tag, jobs)| {
                let out = tmp.path().join(format!("{task}-{tag}"));
                run_binary(task, &cfg, &out, jobs)?;
                dir_bytes(&out)
            })
            .collect::<Result<_, String>>()?;
        if runs[0] != runs[1] || runs[0] != runs[2] {
            return Ok((false, format!("{task} outputs differ between runs")));
        }
        files += runs[0].len();
    }
    Ok((true, format!("sample and mc-compare: {files} output files byte-identical across 3 runs (jobs 1, 1, 3)")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("unified duality identity", c1_duality),
        ("normalization", c2_normalization),
        ("stable reduction", c3_stable_reduction),
        ("Pitman recovery", c4_pitman_recovery),
        ("Gibbs duality and mixing identity", c5_gibbs),
        ("PD(alpha, -beta) fragmentation invariance", c6_frag_invariance),
        ("Monte Carlo vs exact", c7_monte_carlo),
        ("Bell/moment oracle", c8_moments),
        ("generalized Stirling", c9_stirling),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
