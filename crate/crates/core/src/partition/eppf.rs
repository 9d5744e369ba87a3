use crate::error::{domain, Result};
use crate::special::{ln_gamma, ln_rising};

fn check_blocks(blocks: &[usize]) -> Result<usize> {
    if blocks.is_empty() || blocks.contains(&0) {
        return domain(format!("block sizes must be positive and nonempty, got {blocks:?}"));
    }
    Ok(blocks.iter().sum())
}

/// ln p_β(n₁..n_r) = ln[β^{r-1} Γ(r)/Γ(n) Π (1-β)_{n_ℓ-1}], the PD(β, 0) EPPF.
pub fn pd_eppf(beta: f64, blocks: &[usize]) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return domain(format!("beta must lie in [0,1), got {beta}"));
    }
    let n = check_blocks(blocks)?;
    let r = blocks.len();
    if beta == 0.0 {
        return Ok(if r == 1 { 0.0 } else { f64::NEG_INFINITY });
    }
    let mut v = (r as f64 - 1.0) * beta.ln() + ln_gamma(r as f64) - ln_gamma(n as f64);
    for &b in blocks {
        v += ln_rising(1.0 - beta, b as u64 - 1);
    }
    Ok(v)
}

/// ln Φ_{n,r} = ln[Γ(n)Γ(θ/β+r)Γ(θ+1)/(Γ(r)Γ(θ/β+1)Γ(θ+n))], the PD(β,θ)/PD(β,0) ratio.
pub fn ln_phi_weight_pd(beta: f64, theta: f64, n: usize, r: usize) -> Result<f64> {
    if !(0.0 < beta && beta < 1.0) {
        return domain(format!("beta must lie in (0,1), got {beta}"));
    }
    if theta <= -beta {
        return domain(format!("theta must exceed -beta, got theta={theta}, beta={beta}"));
    }
    if r == 0 || r > n {
        return domain(format!("need 1 ≤ r ≤ n, got r={r}, n={n}"));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    let tb = theta / beta;
    Ok(ln_gamma(n as f64) + ln_gamma(tb + r as f64) + ln_gamma(theta + 1.0)
        - ln_gamma(r as f64)
        - ln_gamma(tb + 1.0)
        - ln_gamma(theta + n as f64))
}

/// ln p_{β,θ}(n₁..n_r), the two-parameter Pitman–Yor EPPF.
pub fn pd_theta_eppf(beta: f64, theta: f64, blocks: &[usize]) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return domain(format!("beta must lie in [0,1), got {beta}"));
    }
    if theta <= -beta {
        return domain(format!("theta must exceed -beta, got theta={theta}, beta={beta}"));
    }
    let n = check_blocks(blocks)?;
    if beta == 0.0 {
        return crp_eppf(0.0, theta, blocks);
    }
    Ok(ln_phi_weight_pd(beta, theta, n, blocks.len())? + pd_eppf(beta, blocks)?)
}

/// ln of the Chinese restaurant product Π_{i<r}(θ+iβ) Π(1-β)_{n_ℓ-1} / (θ+1)_{n-1}.
pub fn crp_eppf(beta: f64, theta: f64, blocks: &[usize]) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) || theta <= -beta {
        return domain(format!("invalid CRP parameters beta={beta}, theta={theta}"));
    }
    let n = check_blocks(blocks)?;
    let r = blocks.len();
    let mut v = 0.0;
    for i in 1..r {
        v += (theta + i as f64 * beta).ln();
    }
    for &b in blocks {
        v += ln_rising(1.0 - beta, b as u64 - 1);
    }
    v -= ln_rising(theta + 1.0, n as u64 - 1);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_set_partitions;
    use crate::special::LogSum;

    #[test]
    fn pd_examples() {
        assert!((pd_eppf(0.5, &[2]).unwrap().exp() - 0.5).abs() < 1e-15);
        assert!((pd_eppf(0.5, &[1, 1]).unwrap().exp() - 0.5).abs() < 1e-15);
        assert!((pd_eppf(0.3, &[2, 1]).unwrap().exp() - 0.105).abs() < 1e-15);
        assert_eq!(pd_eppf(0.0, &[4]).unwrap(), 0.0);
        assert!(pd_eppf(1.0, &[1]).is_err());
        assert!(pd_eppf(0.5, &[]).is_err());
    }

    #[test]
    fn pd_theta_examples() {
        assert!((pd_theta_eppf(0.5, 0.5, &[1, 1]).unwrap().exp() - 2.0 / 3.0).abs() < 1e-14);
        assert!((pd_theta_eppf(0.5, 0.5, &[2]).unwrap().exp() - 1.0 / 3.0).abs() < 1e-14);
        assert!((pd_theta_eppf(0.6, -0.3, &[1, 1]).unwrap().exp() - 3.0 / 7.0).abs() < 1e-14);
        assert_eq!(pd_theta_eppf(0.4, 0.0, &[3, 1]).unwrap(), pd_eppf(0.4, &[3, 1]).unwrap());
        assert!(pd_theta_eppf(0.5, -0.5, &[1]).is_err());
    }

    #[test]
    fn gamma_form_matches_crp_product() {
        for &beta in &[0.1, 0.3, 0.6, 0.9] {
            for &theta in &[-0.05, 0.0, 0.5, 2.5] {
                for blocks in [vec![1], vec![3, 1], vec![2, 2, 1], vec![5, 1, 1, 3]] {
                    let a = pd_theta_eppf(beta, theta, &blocks).unwrap();
                    let b = crp_eppf(beta, theta, &blocks).unwrap();
                    assert!((a - b).abs() < 1e-12, "β={beta} θ={theta} {blocks:?}");
                }
            }
        }
    }

    #[test]
    fn eppfs_normalize_over_set_partitions() {
        for &beta in &[0.0, 0.25, 0.5, 0.75] {
            for &theta in &[0.0, 0.5, 3.0] {
                for n in 1..=8 {
                    let acc: LogSum = enumerate_set_partitions(n)
                        .unwrap()
                        .map(|p| {
                            let sizes: Vec<usize> = p.iter().map(Vec::len).collect();
                            if theta == 0.0 {
                                pd_eppf(beta, &sizes).unwrap()
                            } else {
                                pd_theta_eppf(beta, theta, &sizes).unwrap()
                            }
                        })
                        .collect();
                    assert!(acc.value().abs() < 1e-10, "β={beta} θ={theta} n={n}: {}", acc.value());
                }
            }
        }
    }
}
