use crate::error::{domain, Result};
use crate::hier::{HierModel, HierTables};
use crate::special::{ln_factorial, LogSum};

fn ln_poisson_prefactor(hier: &HierModel, counts: &[usize]) -> f64 {
    counts.iter().zip(&hier.gammas).map(|(&n, &g)| n as f64 * g.ln() - ln_factorial(n as u64)).sum()
}

/// ln E[Πⱼ σⱼ(σ₀(1))^{nⱼ} e^{-Σ γⱼ σⱼ(σ₀(1))}].
pub fn hier_joint_moment(hier: &HierModel, counts: &[usize]) -> Result<f64> {
    HierTables::new(hier, counts)?.log_joint_moment(counts)
}

/// ln P(N⃗ = n⃗), the per-group counts observed by times γ⃗.
pub fn ln_joint_count_pmf(hier: &HierModel, counts: &[usize]) -> Result<f64> {
    Ok(ln_poisson_prefactor(hier, counts) + hier_joint_moment(hier, counts)?)
}

pub fn joint_count_pmf(hier: &HierModel, counts: &[usize]) -> Result<f64> {
    ln_joint_count_pmf(hier, counts).map(f64::exp)
}

/// ln P(K⃗ = k⃗), the per-group fine block counts.
pub fn ln_allocation_pmf(hier: &HierModel, blocks: &[usize]) -> Result<f64> {
    let t = HierTables::new(hier, blocks)?;
    let k: usize = blocks.iter().sum();
    let pre: f64 = blocks.iter().zip(&t.psis).map(|(&k, &p)| k as f64 * p.ln() - ln_factorial(k as u64)).sum();
    Ok(pre + t.log_base_moment(k))
}

pub fn allocation_pmf(hier: &HierModel, blocks: &[usize]) -> Result<f64> {
    ln_allocation_pmf(hier, blocks).map(f64::exp)
}

/// ln P(N⃗_ℓ = n⃗) for a single species, n⃗ ≠ 0.
pub fn ln_fragment_count_pmf(hier: &HierModel, counts: &[usize]) -> Result<f64> {
    let t = HierTables::new(hier, counts)?;
    Ok(ln_poisson_prefactor(hier, counts) + t.log_composed(counts)? - t.base_exponent.ln())
}

pub fn fragment_count_pmf(hier: &HierModel, counts: &[usize]) -> Result<f64> {
    ln_fragment_count_pmf(hier, counts).map(f64::exp)
}

/// ln of the density of a species' base jump H at λ given its counts n⃗.
pub fn ln_h_conditional_density(hier: &HierModel, counts: &[usize], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("jump size must be positive, got {lambda}"));
    }
    let t = HierTables::new(hier, counts)?;
    let mut v = hier.tau0.ln_levy_density(lambda);
    for (j, &n) in counts.iter().enumerate() {
        v += t.groups[j].log_moment(n, lambda);
    }
    Ok(v - t.log_composed(counts)?)
}

pub fn h_conditional_density(hier: &HierModel, counts: &[usize], lambda: f64) -> Result<f64> {
    ln_h_conditional_density(hier, counts, lambda).map(f64::exp)
}

/// ln P(X̃ = x | N = n) in a single-group model.
///
/// The numerator P(X̃ = x) P(C₁ + … + C_x = n) is built by iterated convolution
/// of the group MtP law; the denominator is the fragment count law.
pub fn ln_x_given_count_pmf(hier: &HierModel, n: usize, x: usize) -> Result<f64> {
    if hier.groups() != 1 {
        return domain("x_given_count_pmf is defined for a single group");
    }
    if n == 0 {
        return domain("species count must be positive");
    }
    if x == 0 || x > n {
        return Ok(f64::NEG_INFINITY);
    }
    let t = HierTables::new(hier, &[n])?;
    let g = t.groups[0].cumulants.clone();
    let mtp: Vec<f64> = (0..=n).map(|c| if c == 0 { f64::NEG_INFINITY } else { g.log_mtp(c) }).collect();
    // conv[m] = ln P(C₁ + … + C_k = m)
    let mut conv = mtp.clone();
    for _ in 1..x {
        let mut next = vec![f64::NEG_INFINITY; n + 1];
        for (m, slot) in next.iter_mut().enumerate() {
            let mut acc = LogSum::new();
            for c in 1..m {
                acc.add(conv[m - c] + mtp[c]);
            }
            *slot = acc.value();
        }
        conv = next;
    }
    let px = x as f64 * t.psis[0].ln() + t.log_base_cumulant(x) - ln_factorial(x as u64) - t.base_exponent.ln();
    Ok(px + conv[n] - ln_fragment_count_pmf(hier, &[n])?)
}

pub fn x_given_count_pmf(hier: &HierModel, n: usize, x: usize) -> Result<f64> {
    ln_x_given_count_pmf(hier, n, x).map(f64::exp)
}

/// ln density of the arrival times T⃗ (time of the nⱼ-th group-j arrival) at γ⃗.
pub fn ln_arrival_density(hier: &HierModel, counts: &[usize]) -> Result<f64> {
    if counts.iter().any(|&n| n == 0) {
        return domain("arrival times need every group count to be positive");
    }
    let pre: f64 = counts.iter().zip(&hier.gammas).map(|(&n, &g)| (n as f64 / g).ln()).sum();
    Ok(pre + ln_joint_count_pmf(hier, counts)?)
}

pub fn arrival_density(hier: &HierModel, counts: &[usize]) -> Result<f64> {
    ln_arrival_density(hier, counts).map(f64::exp)
}
