use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{domain, Error, Result};
use crate::levy::{sample_total_mass, LevyModel};
use crate::partition::StirlingTable;
use crate::special::{ln_gamma, LogSum};

/// One draw of the conditioned stable bridge: atoms from the observed blocks
/// plus the unobserved generalized gamma remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeDraw {
    /// Block sizes N_1..N_K of the sampled partition of [n].
    pub blocks: Vec<usize>,
    /// (tag Ũ_k, mass G_{N_k−α}) per block.
    pub atoms: Vec<(f64, f64)>,
    /// σ̃_α(λγ^α), the remainder mass.
    pub remainder: f64,
}

impl BridgeDraw {
    pub fn total_mass(&self) -> f64 {
        self.remainder + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    /// Atom contribution of the bridge at y ∈ [0, 1], normalized by the total mass.
    pub fn atom_cdf(&self, y: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= y).map(|a| a.1).sum::<f64>() / self.total_mass()
    }
}

/// ℙ(K^{[α]}_n(w) = r) for r = 1..=n, ∝ ℙ^{(n)}_α(r) w^r/Γ(r).
pub fn stable_bridge_block_count_pmf(alpha: f64, n: usize, scale: f64) -> Result<Vec<f64>> {
    check(alpha, scale)?;
    if n == 0 {
        return domain("block count law needs n ≥ 1");
    }
    let table = StirlingTable::new(alpha, n)?;
    let lw = scale.ln();
    let terms: Vec<f64> = (1..=n).map(|r| table.ln_block_count(n, r) + r as f64 * lw - ln_gamma(r as f64)).collect();
    let norm = terms.iter().copied().collect::<LogSum>().value();
    Ok(terms.into_iter().map(|t| (t - norm).exp()).collect())
}

fn check(alpha: f64, scale: f64) -> Result<()> {
    if !(0.0 < alpha && alpha < 1.0) {
        return domain(format!("alpha must lie in (0,1), got {alpha}"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return domain(format!("bridge scale must be positive, got {scale}"));
    }
    Ok(())
}

fn categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// PD(α, 0) partition of [n] conditioned on exactly r blocks, by sequential
/// seating with exact completion weights.
fn conditioned_partition<R: Rng + ?Sized>(alpha: f64, n: usize, r: usize, rng: &mut R) -> Vec<usize> {
    // f[m][k]: ln total weight of completing (m seated, k blocks) to (n, r)
    let mut f = vec![vec![f64::NEG_INFINITY; r + 2]; n + 1];
    f[n][r] = 0.0;
    for m in (1..n).rev() {
        for k in 1..=r.min(m) {
            let mut acc = LogSum::new();
            acc.add((k as f64 * alpha).ln() + f[m + 1][k + 1]);
            acc.add((m as f64 - k as f64 * alpha).ln() + f[m + 1][k]);
            f[m][k] = acc.value();
        }
    }
    let mut blocks = vec![1usize];
    for m in 1..n {
        let k = blocks.len();
        let p_new = ((k as f64 * alpha).ln() + f[m + 1][k + 1] - f[m][k]).exp();
        let u: f64 = rng.random();
        if u < p_new {
            blocks.push(1);
        } else {
            let total = m as f64 - k as f64 * alpha;
            let mut v = rng.random::<f64>() * total;
            let mut pick = k - 1;
            for (i, &b) in blocks.iter().enumerate() {
                v -= b as f64 - alpha;
                if v < 0.0 {
                    pick = i;
                    break;
                }
            }
            blocks[pick] += 1;
        }
    }
    blocks
}

/// Samples the stable bridge given n observations at scale w = λγ^α.
pub fn stable_bridge_sample<R: Rng + ?Sized>(alpha: f64, n: usize, scale: f64, rng: &mut R) -> Result<BridgeDraw> {
    check(alpha, scale)?;
    let tilted = LevyModel::gen_gamma(alpha, alpha, 1.0);
    let remainder = sample_total_mass(&tilted, scale, rng)?;
    if n == 0 {
        return Ok(BridgeDraw { blocks: Vec::new(), atoms: Vec::new(), remainder });
    }
    let pmf = stable_bridge_block_count_pmf(alpha, n, scale)?;
    let r = categorical(&pmf, rng) + 1;
    let blocks = conditioned_partition(alpha, n, r, rng);
    let atoms = blocks
        .iter()
        .map(|&b| {
            let g = Gamma::new(b as f64 - alpha, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
            Ok((rng.random::<f64>(), g.sample(rng)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BridgeDraw { blocks, atoms, remainder })
}
