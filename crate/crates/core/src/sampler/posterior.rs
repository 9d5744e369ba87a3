use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hier::{HierModel, HierTables};
use crate::laws::NestedConfig;
use crate::levy::{sample_total_mass, BellTable, LevyModel};
use crate::special::{ln_factorial, LogSum};

fn gamma_draw<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    Ok(Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Domain(e.to_string()))?.sample(rng))
}

fn categorical_ln<R: Rng + ?Sized>(ln_w: &[f64], rng: &mut R) -> usize {
    let top = ln_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ln_w.iter().map(|v| (v - top).exp()).collect();
    let mut u = rng.random::<f64>() * w.iter().sum::<f64>();
    for (i, &x) in w.iter().enumerate() {
        u -= x;
        if u < 0.0 {
            return i;
        }
    }
    w.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

/// H given X̃ = x: density ∝ λ^x e^{-λΣψ} τ₀(λ), i.e. Gamma(x − α₀, ζ₀ + Σψ).
pub fn sample_h_given_x<R: Rng + ?Sized>(hier: &HierModel, x: u64, rng: &mut R) -> Result<f64> {
    if x == 0 {
        return domain("H is defined for species with X̃ ≥ 1");
    }
    let p = hier.tau0.gg();
    let psi_sum: f64 = hier.psis()?.iter().sum();
    gamma_draw(x as f64 - p.alpha, p.zeta + psi_sum, rng)
}

/// H given the species counts n⃗_ℓ only, as the exact gamma mixture over
/// R = Σⱼ rⱼ with weights Σ_{r⃗} Πⱼ Ξ^{[nⱼ]}_{rⱼ} · Ψ₀^{(R)}(Σψ).
pub fn sample_h_given_counts<R: Rng + ?Sized>(hier: &HierModel, counts: &[usize], rng: &mut R) -> Result<f64> {
    let t = HierTables::new(hier, counts)?;
    if counts.iter().all(|&n| n == 0) {
        return domain("species counts must not all be zero");
    }
    // conv[R] = ln Σ_{r⃗ : Σ r = R} Π_j Ξ^{[n_j]}_{r_j}
    let mut conv = vec![0.0];
    for (j, &n) in counts.iter().enumerate() {
        let lo = usize::from(n > 0);
        let mut next = vec![f64::NEG_INFINITY; conv.len() + n];
        for (a, &ca) in conv.iter().enumerate() {
            for r in lo..=n {
                let v = ca + t.groups[j].log_xi_partial(n, r);
                next[a + r] = LogSum::from_iter([next[a + r], v]).value();
            }
        }
        conv = next;
    }
    let ln_w: Vec<f64> = conv.iter().enumerate().map(|(r, &c)| if r == 0 { f64::NEG_INFINITY } else { c + t.log_base_cumulant(r) }).collect();
    let r = categorical_ln(&ln_w, rng);
    sample_h_given_x(hier, r as u64, rng)
}

/// Posterior pieces of one group's mass given the base jump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPosterior {
    /// Fine block sizes c_k.
    pub blocks: Vec<usize>,
    /// Jumps S_k carrying the observed blocks.
    pub jumps: Vec<f64>,
    /// Total mass of the unobserved part, time λ under λe^{-γs}τⱼ(s).
    pub remainder: f64,
}

impl GroupPosterior {
    /// σ̃_{j,ℓ} = Σ S_k + remainder.
    pub fn mass(&self) -> f64 {
        self.jumps.iter().sum::<f64>() + self.remainder
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesPosterior {
    pub h: f64,
    pub groups: Vec<GroupPosterior>,
}

fn group_pieces<R: Rng + ?Sized>(model: &LevyModel, gamma: f64, lambda: f64, blocks: Vec<usize>, rng: &mut R) -> Result<GroupPosterior> {
    let p = model.gg();
    let jumps = blocks.iter().map(|&c| gamma_draw(c as f64 - p.alpha, p.zeta + gamma, rng)).collect::<Result<Vec<_>>>()?;
    let remainder = sample_total_mass(&model.tilted(1.0, gamma), lambda, rng)?;
    Ok(GroupPosterior { blocks, jumps, remainder })
}

/// Group mass given H = λ and n group individuals: the fine blocks from the
/// Gibbs law ∝ λ^r Ξ^{[n]}_r, then jumps and remainder.
pub fn sample_group_given_h<R: Rng + ?Sized>(model: &LevyModel, gamma: f64, lambda: f64, n: usize, rng: &mut R) -> Result<GroupPosterior> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("base jump must be positive, got {lambda}"));
    }
    let mut blocks = Vec::new();
    if n > 0 {
        let table = BellTable::new(model, n, gamma)?;
        let ll = lambda.ln();
        let ln_w: Vec<f64> = (0..=n).map(|r| if r == 0 { f64::NEG_INFINITY } else { r as f64 * ll + table.log_xi_partial(n, r) }).collect();
        let r = categorical_ln(&ln_w, rng);
        // ordered composition ∝ Π ψ^{(c)}/c!; ln T[m][r] = ln Ξ^{[m]}_r − ln m! + ln r!
        let ln_t = |m: usize, r: usize| table.log_xi_partial(m, r) - ln_factorial(m as u64) + ln_factorial(r as u64);
        let (mut m, mut left) = (n, r);
        while left > 0 {
            let ln_w: Vec<f64> = (1..=m - left + 1)
                .map(|k| table.cumulants.log_cumulant(k) - ln_factorial(k as u64) + ln_t(m - k, left - 1))
                .collect();
            let k = categorical_ln(&ln_w, rng) + 1;
            blocks.push(k);
            m -= k;
            left -= 1;
        }
    }
    group_pieces(model, gamma, lambda, blocks, rng)
}

/// Posterior of each observed species given its full nested configuration:
/// H_ℓ ~ Gamma(x̃_ℓ − α₀, ζ₀ + Σψ), then per group S_k ~ Gamma(c − αⱼ, ζⱼ + γⱼ)
/// and the tilted remainder at time H_ℓ.
///
/// Averaging over the refinement with the fragmentation law gives the count-only
/// posterior of H_ℓ, a gamma mixture with weights P(X̃ = x | counts).
pub fn sample_posterior_observed<R: Rng + ?Sized>(hier: &HierModel, cfg: &NestedConfig, rng: &mut R) -> Result<Vec<SpeciesPosterior>> {
    if cfg.groups() != hier.groups() {
        return domain(format!("configuration has {} groups, model has {}", cfg.groups(), hier.groups()));
    }
    (0..cfg.species())
        .map(|l| {
            let h = sample_h_given_x(hier, cfg.x_tilde(l) as u64, rng)?;
            let groups = (0..cfg.groups())
                .map(|j| group_pieces(&hier.taus[j], hier.gammas[j], h, cfg.blocks()[j][l].clone(), rng))
                .collect::<Result<Vec<_>>>()?;
            Ok(SpeciesPosterior { h, groups })
        })
        .collect()
}

/// Total base mass of the unobserved species, time 1 under e^{-λΣψ}τ₀(λ).
pub fn sample_unobserved_base_mass<R: Rng + ?Sized>(hier: &HierModel, rng: &mut R) -> Result<f64> {
    let psi_sum: f64 = hier.psis()?.iter().sum();
    sample_total_mass(&hier.tau0.tilted(1.0, psi_sum), 1.0, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_half_line, QuadConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn h_given_x_mean() {
        // GG(0.4, 1, 0.5) base with Σψ = 2 via a gamma group: ψ = θ ln(1 + γ/ζ)
        let g = (2.0f64).exp_m1();
        let h = HierModel::new(LevyModel::gen_gamma(0.4, 1.0, 0.5), vec![LevyModel::gamma(1.0, 1.0)], vec![g]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = 200_000;
        let mean: f64 = (0..m).map(|_| sample_h_given_x(&h, 3, &mut rng).unwrap()).sum::<f64>() / m as f64;
        let sd = (2.6f64).sqrt() / 2.5 / (m as f64).sqrt();
        assert!((mean - 1.04).abs() < 4.0 * sd, "{mean}");
    }

    #[test]
    fn observed_jump_means() {
        let h = HierModel::new(LevyModel::gamma(1.0, 1.0), vec![LevyModel::gen_gamma(0.3, 1.0, 0.5)], vec![1.5]).unwrap();
        let cfg = NestedConfig::single_group(vec![vec![3]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = 100_000;
        let mut s = 0.0;
        for _ in 0..m {
            s += sample_posterior_observed(&h, &cfg, &mut rng).unwrap()[0].groups[0].jumps[0];
        }
        let mean = s / m as f64;
        let expect = 2.7 / 2.0;
        let sd = (2.7f64).sqrt() / 2.0 / (m as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * sd, "{mean}");
    }

    #[test]
    fn group_mass_mean_matches_bell_ratio() {
        let model = LevyModel::gen_gamma(0.5, 1.0, 1.0);
        let (gamma, lambda, n) = (0.8, 1.3, 3);
        let t = BellTable::new(&model, n + 1, gamma).unwrap();
        let expect = (t.log_moment(n + 1, lambda) - t.log_moment(n, lambda)).exp();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 100_000;
        let draws: Vec<f64> = (0..m).map(|_| sample_group_given_h(&model, gamma, lambda, n, &mut rng).unwrap().mass()).collect();
        let mean = draws.iter().sum::<f64>() / m as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
        assert!((mean - expect).abs() < 3.0 * (var / m as f64).sqrt(), "{mean} vs {expect}");
    }

    #[test]
    fn unobserved_group_is_remainder_only() {
        let h = HierModel::new(LevyModel::gamma(1.0, 1.0), vec![LevyModel::gamma(1.0, 1.0), LevyModel::gamma(2.0, 1.0)], vec![1.0, 1.0]).unwrap();
        let cfg = NestedConfig::new(vec![vec![vec![2]], vec![vec![]]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let post = sample_posterior_observed(&h, &cfg, &mut rng).unwrap();
        assert!(post[0].groups[1].jumps.is_empty());
        assert_eq!(post[0].groups[1].mass(), post[0].groups[1].remainder);
    }

    #[test]
    fn count_posterior_matches_density() {
        // E[H | n] from the mixture sampler against ∫ λ h(λ|n) dλ
        let h = HierModel::new(LevyModel::gen_gamma(0.4, 1.2, 1.0), vec![LevyModel::gen_gamma(0.5, 1.0, 2.0)], vec![0.7]).unwrap();
        let q = integrate_half_line(|l| l * crate::laws::h_conditional_density(&h, &[3], l).unwrap(), &QuadConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = 100_000;
        let d: Vec<f64> = (0..m).map(|_| sample_h_given_counts(&h, &[3], &mut rng).unwrap()).collect();
        let mean = d.iter().sum::<f64>() / m as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
        assert!((mean - q.value).abs() < 3.0 * (var / m as f64).sqrt(), "{mean} vs {}", q.value);
    }
}
