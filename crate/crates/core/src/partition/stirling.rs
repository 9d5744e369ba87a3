use crate::error::{domain, Result};
use crate::special::{ln_factorial, ln_gamma, DoubleDouble, LogSum};

/// ln S_α(n, k) for 0 ≤ k ≤ n ≤ n_max by the triangular recurrence
/// S_α(n+1, k) = S_α(n, k-1) + (n - kα) S_α(n, k), S_α(0, 0) = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StirlingTable {
    pub alpha: f64,
    pub n_max: usize,
    log: Vec<Vec<f64>>,
}

impl StirlingTable {
    pub fn new(alpha: f64, n_max: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return domain(format!("alpha must lie in [0,1), got {alpha}"));
        }
        let mut log = vec![vec![0.0]];
        for n in 0..n_max {
            let prev = &log[n];
            let mut row = vec![f64::NEG_INFINITY; n + 2];
            for (k, slot) in row.iter_mut().enumerate().skip(1) {
                let mut acc = LogSum::new();
                acc.add(prev.get(k - 1).copied().unwrap_or(f64::NEG_INFINITY));
                if k <= n {
                    acc.add((n as f64 - k as f64 * alpha).ln() + prev[k]);
                }
                *slot = acc.value();
            }
            log.push(row);
        }
        Ok(StirlingTable { alpha, n_max, log })
    }

    /// ln S_α(n, k); -inf outside 1 ≤ k ≤ n (except S(0,0) = 1).
    pub fn ln(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.log[n][k]
    }

    /// ln ℙ^{(n)}_α(k) = ln[α^{k-1} Γ(k)/Γ(n) S_α(n,k)].
    pub fn ln_block_count(&self, n: usize, k: usize) -> f64 {
        if k == 0 || k > n {
            return f64::NEG_INFINITY;
        }
        if self.alpha == 0.0 {
            return if k == 1 { 0.0 } else { f64::NEG_INFINITY };
        }
        (k as f64 - 1.0) * self.alpha.ln() + ln_gamma(k as f64) - ln_gamma(n as f64) + self.ln(n, k)
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return domain(format!("need 1 ≤ k ≤ n, got n={n}, k={k}"));
    }
    Ok(())
}

/// ln S_α(n, k).
pub fn gen_stirling(alpha: f64, n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    Ok(StirlingTable::new(alpha, n)?.ln(n, k))
}

/// Linear-scale S_α(n, k) for 0 ≤ k ≤ n ≤ n_max by the same recurrence.
///
/// Exact in floating point for α = 0 while the integers fit the mantissa.
pub fn gen_stirling_linear(alpha: f64, n_max: usize) -> Result<Vec<Vec<f64>>> {
    if !(0.0..1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [0,1), got {alpha}"));
    }
    let mut rows = vec![vec![1.0]];
    for n in 0..n_max {
        let prev = &rows[n];
        let mut row = vec![0.0; n + 2];
        for (k, slot) in row.iter_mut().enumerate().skip(1) {
            let mut v = prev.get(k - 1).copied().unwrap_or(0.0);
            if k <= n {
                v += (n as f64 - k as f64 * alpha) * prev[k];
            }
            *slot = v;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// S_β(n, r) = 1/(β^r r!) Σ_{j=1}^{r} (-1)^j C(r,j) (-jβ)_n.
///
/// The terms cancel heavily, so products and the sum are carried in
/// double-double arithmetic.
pub fn gen_stirling_alternating(beta: f64, n: usize, r: usize) -> Result<f64> {
    check_nk(n, r)?;
    if !(0.0 < beta && beta < 1.0) {
        return domain(format!("alternating form needs beta in (0,1), got {beta}"));
    }
    let mut sum = DoubleDouble::ZERO;
    let mut binom = 1.0f64;
    for j in 1..=r {
        // exact while C(r, j) < 2^53
        binom = binom * (r + 1 - j) as f64 / j as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let a = -(j as f64) * beta;
        let mut term = DoubleDouble::from_f64(sign * binom);
        for i in 0..n {
            term = term.mul_f64(a + i as f64);
        }
        sum = sum.add(term);
    }
    Ok(sum.to_f64() / (beta.powi(r as i32) * ln_factorial(r as u64).exp()))
}

/// ℙ^{(n)}_β(k), the number-of-blocks law of a PD(β, 0) partition of [n].
pub fn block_count_pmf(beta: f64, n: usize, k: usize) -> Result<f64> {
    Ok(ln_block_count_pmf(beta, n, k)?.exp())
}

pub fn ln_block_count_pmf(beta: f64, n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    Ok(StirlingTable::new(beta, n)?.ln_block_count(n, k))
}

/// ℙ^{(n)}_{α,-β}(k), the number-of-blocks law of a PD(α, -β) partition of [n].
pub fn frag_block_count_pmf(alpha: f64, beta: f64, n: usize, k: usize) -> Result<f64> {
    Ok(ln_frag_block_count_pmf(alpha, beta, n, k)?.exp())
}

pub fn ln_frag_block_count_pmf(alpha: f64, beta: f64, n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    if !(0.0 < beta && beta < alpha && alpha < 1.0) {
        return domain(format!("need 0 < beta < alpha < 1, got alpha={alpha}, beta={beta}"));
    }
    let ba = beta / alpha;
    let (nf, kf) = (n as f64, k as f64);
    Ok(ln_gamma(nf) + ln_gamma(kf - ba) + ln_gamma(1.0 - beta)
        - ln_gamma(kf)
        - ln_gamma(1.0 - ba)
        - ln_gamma(nf - beta)
        + StirlingTable::new(alpha, n)?.ln_block_count(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let a = 0.35;
        assert!((gen_stirling(a, 2, 1).unwrap().exp() - (1.0 - a)).abs() < 1e-15);
        assert!(gen_stirling(a, 2, 2).unwrap().abs() < 1e-15);
        assert!((gen_stirling(0.0, 3, 2).unwrap().exp() - 3.0).abs() < 1e-14);
        assert!((gen_stirling(0.5, 3, 2).unwrap().exp() - 1.5).abs() < 1e-14);
        assert!(gen_stirling(0.5, 2, 3).is_err());
    }

    #[test]
    fn block_count_examples() {
        assert!((block_count_pmf(0.5, 2, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((block_count_pmf(0.5, 2, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((block_count_pmf(0.3, 1, 1).unwrap() - 1.0).abs() < 1e-15);
        for &b in &[0.0, 0.1, 0.25, 0.5, 0.75, 0.95] {
            for n in 1..=12 {
                let s: f64 = (1..=n).map(|k| block_count_pmf(b, n, k).unwrap()).sum();
                assert!((s - 1.0).abs() < 1e-10, "β={b} n={n}");
            }
        }
    }

    #[test]
    fn frag_block_count_examples() {
        assert!((frag_block_count_pmf(0.6, 0.3, 2, 1).unwrap() - 4.0 / 7.0).abs() < 1e-14);
        assert!((frag_block_count_pmf(0.6, 0.3, 2, 2).unwrap() - 3.0 / 7.0).abs() < 1e-14);
        assert!((frag_block_count_pmf(0.6, 0.3, 1, 1).unwrap() - 1.0).abs() < 1e-14);
        assert!(frag_block_count_pmf(0.3, 0.6, 2, 1).is_err());
        for &(a, b) in &[(0.6, 0.3), (0.5, 0.25), (0.9, 0.45), (0.4, 0.1)] {
            for n in 1..=10 {
                let s: f64 = (1..=n).map(|k| frag_block_count_pmf(a, b, n, k).unwrap()).sum();
                assert!((s - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn log_and_linear_recurrences_agree() {
        let lin = gen_stirling_linear(0.3, 15).unwrap();
        let t = StirlingTable::new(0.3, 15).unwrap();
        for n in 1..=15 {
            for k in 1..=n {
                assert!((t.ln(n, k) - lin[n][k].ln()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn alternating_sum_matches_recurrence() {
        let mut worst = 0.0f64;
        for &b in &[0.25, 0.5, 0.75] {
            let lin = gen_stirling_linear(b, 12).unwrap();
            for n in 1..=12 {
                for r in 1..=n {
                    let alt = gen_stirling_alternating(b, n, r).unwrap();
                    worst = worst.max((alt / lin[n][r] - 1.0).abs());
                }
            }
        }
        assert!(worst < 1e-9, "worst relative error {worst:e}");
    }
}
