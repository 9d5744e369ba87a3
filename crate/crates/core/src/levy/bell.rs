use crate::error::{domain, Result};
use crate::hier::{HierModel, HierTables};
use crate::levy::{CumulantTable, LevyModel};
use crate::special::{ln_factorial, LogSum};

/// Partial Bell sums Ξ^{[m]}_r(τ, γ) for all 0 ≤ r ≤ m ≤ n.
///
/// Ξ^{[m]}_r = (m!/r!) Σ over ordered r-tuples (m_1..m_r), m_l ≥ 1, Σ m_l = m,
/// of Π ψ^{(m_l)}(γ)/m_l!. Row 0 holds Ξ^{[0]}_0 = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BellTable {
    pub cumulants: CumulantTable,
    pub n: usize,
    log_xi: Vec<Vec<f64>>,
}

impl BellTable {
    pub fn new(model: &LevyModel, n: usize, gamma: f64) -> Result<Self> {
        Ok(Self::from_cumulants(CumulantTable::new(model, gamma, n)?))
    }

    pub fn from_cumulants(cumulants: CumulantTable) -> Self {
        let n = cumulants.n_max();
        let a: Vec<f64> = (1..=n).map(|k| cumulants.log_cumulant(k) - ln_factorial(k as u64)).collect();
        // t[m][r]: log Σ over compositions of m into r parts of Π a_{part}
        let mut t = vec![vec![f64::NEG_INFINITY; n + 1]; n + 1];
        t[0][0] = 0.0;
        for m in 1..=n {
            for r in 1..=m {
                let mut acc = LogSum::new();
                for k in 1..=(m - r + 1) {
                    acc.add(a[k - 1] + t[m - k][r - 1]);
                }
                t[m][r] = acc.value();
            }
        }
        let log_xi = t
            .into_iter()
            .enumerate()
            .map(|(m, row)| {
                row.into_iter()
                    .take(m + 1)
                    .enumerate()
                    .map(|(r, v)| v + ln_factorial(m as u64) - ln_factorial(r as u64))
                    .collect()
            })
            .collect();
        BellTable { cumulants, n, log_xi }
    }

    /// ln Ξ^{[m]}_r(τ, γ); -inf when r = 0 < m or r > m.
    pub fn log_xi_partial(&self, m: usize, r: usize) -> f64 {
        if r > m {
            return f64::NEG_INFINITY;
        }
        self.log_xi[m][r]
    }

    /// ln Ξ^{[m]}(λτ, γ) = ln Σ_r λ^r Ξ^{[m]}_r(τ, γ).
    pub fn log_xi_total(&self, m: usize, lambda: f64) -> f64 {
        let ll = lambda.ln();
        (0..=m).map(|r| r as f64 * ll + self.log_xi[m][r]).collect::<LogSum>().value()
    }

    /// ln E[σ(λ)^m e^{-γσ(λ)}] = -λψ(γ) + ln Ξ^{[m]}(λτ, γ).
    pub fn log_moment(&self, m: usize, lambda: f64) -> f64 {
        -lambda * self.cumulants.psi() + self.log_xi_total(m, lambda)
    }

    pub fn gamma(&self) -> f64 {
        self.cumulants.gamma
    }
}

/// Bell table of `model` at `gamma` up to count `n`.
pub fn xi_partial(model: &LevyModel, n: usize, gamma: f64) -> Result<BellTable> {
    if n == 0 {
        return domain("Bell table order must be at least 1");
    }
    BellTable::new(model, n, gamma)
}

/// ln (Ψ₀∘Σψⱼ)^{(n⃗)}(γ⃗), the joint exponential cumulant of the composition.
pub fn composed_cumulant(hier: &HierModel, counts: &[usize]) -> Result<f64> {
    HierTables::new(hier, counts)?.log_composed(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;

    #[test]
    fn low_orders_expand_by_hand() {
        let m = LevyModel::gen_gamma(0.4, 1.0, 0.5);
        let t = xi_partial(&m, 4, 1.3).unwrap();
        let c = &t.cumulants;
        assert!((t.log_xi_partial(1, 1) - c.log_cumulant(1)).abs() < 1e-14);
        assert!((t.log_xi_partial(2, 1) - c.log_cumulant(2)).abs() < 1e-14);
        assert!((t.log_xi_partial(2, 2) - 2.0 * c.log_cumulant(1)).abs() < 1e-14);
        // Ξ^{[3]}_2 = 3 ψ1 ψ2
        let x32 = 3f64.ln() + c.log_cumulant(1) + c.log_cumulant(2);
        assert!((t.log_xi_partial(3, 2) - x32).abs() < 1e-14);
        assert_eq!(t.log_xi_partial(3, 0), f64::NEG_INFINITY);
        assert_eq!(t.log_xi_partial(0, 0), 0.0);
    }

    #[test]
    fn gamma_second_moment_closed_form() {
        let (theta, zeta, gamma, lambda) = (1.7, 0.6, 0.9, 2.3);
        let t = xi_partial(&LevyModel::gamma(theta, zeta), 2, gamma).unwrap();
        let a = lambda * theta;
        let expected = a * (zeta / (zeta + gamma)).ln() + (a * (1.0 + a)).ln() - 2.0 * (zeta + gamma).ln();
        assert!((t.log_moment(2, lambda) - expected).abs() < 1e-13);
    }

    #[test]
    fn row_sums_count_permutations() {
        // Gamma(1, ζ) at ζ+γ = 1 has ψ^{(k)} = (k-1)!, so Σ_r Ξ^{[m]}_r = m!.
        let t = xi_partial(&LevyModel::gamma(1.0, 0.25), 8, 0.75).unwrap();
        for m in 1..=8 {
            let total = t.log_xi_total(m, 1.0);
            assert!((total - ln_gamma(m as f64 + 1.0)).abs() < 1e-12, "m={m}");
        }
    }
}
