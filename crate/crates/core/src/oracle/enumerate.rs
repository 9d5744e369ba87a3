use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{domain, Result};
use crate::laws::NestedConfig;
use crate::partition::integer_partitions;

/// Largest total Σⱼ nⱼ accepted by the enumerator.
pub const MAX_ENUMERATION_TOTAL: usize = 10;

/// One orbit of labeled nested configurations under relabeling.
///
/// The representative lists species in nondecreasing order of their
/// per-group refinements, each refinement as a nonincreasing partition.
/// `multiplicity` counts the labeled configurations of [n₁], …, [n_J] in the
/// orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedConfig {
    pub config: NestedConfig,
    pub multiplicity: BigUint,
}

impl WeightedConfig {
    pub fn ln_multiplicity(&self) -> f64 {
        ln_big(&self.multiplicity)
    }
}

pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Π_s m_s! for the multiplicities m_s of equal entries in a sorted slice.
fn repeat_factorials<T: PartialEq>(sorted: &[T]) -> BigUint {
    let mut acc = BigUint::one();
    let mut run = 0;
    for i in 0..sorted.len() {
        run = if i > 0 && sorted[i] == sorted[i - 1] { run + 1 } else { 1 };
        acc *= run as u64;
    }
    acc
}

/// Species shape: per group, a nonincreasing partition (possibly empty).
type Shape = Vec<Vec<usize>>;

fn shapes(counts: &[usize]) -> Vec<Shape> {
    let per_group: Vec<Vec<Vec<usize>>> =
        counts.iter().map(|&n| (0..=n).flat_map(|m| if m == 0 { vec![Vec::new()] } else { integer_partitions(m) }).collect()).collect();
    let mut out: Vec<Shape> = vec![Vec::new()];
    for options in &per_group {
        out = out.into_iter().flat_map(|s| options.iter().map(move |o| [s.clone(), vec![o.clone()]].concat())).collect();
    }
    out.retain(|s| s.iter().any(|p| !p.is_empty()));
    out.sort();
    out
}

fn shape_size(s: &Shape) -> Vec<usize> {
    s.iter().map(|p| p.iter().sum()).collect()
}

/// Every nested configuration of counts n⃗ up to relabeling, with exact multiplicities.
pub fn enumerate_nested_configs(counts: &[usize]) -> Result<Vec<WeightedConfig>> {
    if counts.is_empty() {
        return domain("need at least one group");
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return domain("need at least one observation");
    }
    if total > MAX_ENUMERATION_TOTAL {
        return domain(format!("enumeration total {total} exceeds the cap {MAX_ENUMERATION_TOTAL}"));
    }
    let shapes = shapes(counts);
    let sizes: Vec<Vec<usize>> = shapes.iter().map(shape_size).collect();
    let numerator: BigUint = counts.iter().map(|&n| factorial(n)).product();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut remaining = counts.to_vec();
    recurse(0, &shapes, &sizes, &mut remaining, &mut chosen, &numerator, &mut out)?;
    Ok(out)
}

fn recurse(
    start: usize,
    shapes: &[Shape],
    sizes: &[Vec<usize>],
    remaining: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    numerator: &BigUint,
    out: &mut Vec<WeightedConfig>,
) -> Result<()> {
    if remaining.iter().all(|&n| n == 0) {
        out.push(assemble(shapes, chosen, numerator)?);
        return Ok(());
    }
    for i in start..shapes.len() {
        if sizes[i].iter().zip(remaining.iter()).any(|(s, r)| s > r) {
            continue;
        }
        for (r, s) in remaining.iter_mut().zip(&sizes[i]) {
            *r -= s;
        }
        chosen.push(i);
        recurse(i, shapes, sizes, remaining, chosen, numerator, out)?;
        chosen.pop();
        for (r, s) in remaining.iter_mut().zip(&sizes[i]) {
            *r += s;
        }
    }
    Ok(())
}

fn assemble(shapes: &[Shape], chosen: &[usize], numerator: &BigUint) -> Result<WeightedConfig> {
    let j_count = shapes[chosen[0]].len();
    let mut den = repeat_factorials(chosen);
    for &i in chosen {
        for part in &shapes[i] {
            for &c in part {
                den *= factorial(c);
            }
            den *= repeat_factorials(part);
        }
    }
    let blocks = (0..j_count).map(|j| chosen.iter().map(|&i| shapes[i][j].clone()).collect()).collect();
    Ok(WeightedConfig { config: NestedConfig::new(blocks)?, multiplicity: numerator / den })
}

/// Orbit key and labeled count of the coarse partition n⃗_ℓ of a configuration.
pub fn coarse_key(cfg: &NestedConfig) -> (Vec<Vec<usize>>, BigUint) {
    let mut key: Vec<Vec<usize>> = (0..cfg.species()).map(|l| cfg.species_counts(l)).collect();
    key.sort();
    let mut den = repeat_factorials(&key);
    for v in &key {
        for &n in v {
            den *= factorial(n);
        }
    }
    let num: BigUint = cfg.totals().iter().map(|&n| factorial(n)).product();
    (key, num / den)
}

/// Orbit key and labeled count of the per-group fine partitions of a configuration.
pub fn fine_key(cfg: &NestedConfig) -> (Vec<Vec<usize>>, BigUint) {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let key: Vec<Vec<usize>> = (0..cfg.groups())
        .map(|j| {
            let mut b: Vec<usize> = cfg.fine_blocks(j).collect();
            b.sort_unstable_by(|a, b| b.cmp(a));
            num *= factorial(cfg.n(j));
            for &c in &b {
                den *= factorial(c);
            }
            den *= repeat_factorials(&b);
            b
        })
        .collect();
    (key, num / den)
}

/// Groups configurations by a key, summing labeled multiplicities.
pub fn aggregate_by<K: Ord>(configs: &[WeightedConfig], key: impl Fn(&NestedConfig) -> K) -> BTreeMap<K, BigUint> {
    let mut m = BTreeMap::new();
    for w in configs {
        *m.entry(key(&w.config)).or_insert_with(BigUint::default) += &w.multiplicity;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::bell_number;

    fn total(counts: &[usize]) -> BigUint {
        enumerate_nested_configs(counts).unwrap().into_iter().map(|w| w.multiplicity).sum()
    }

    /// Pairs (coarse partition, refinement) of [n]: T(n) = Σ_k C(n−1,k−1) B(k) T(n−k).
    fn pairs(n: usize) -> u128 {
        let mut t = vec![1u128; n + 1];
        for m in 1..=n {
            let mut binom = 1u128;
            let mut s = 0;
            for k in 1..=m {
                s += binom * bell_number(k) * t[m - k];
                binom = binom * (m - k) as u128 / k as u128;
            }
            t[m] = s;
        }
        t[n]
    }

    #[test]
    fn two_observations_one_group() {
        let e = enumerate_nested_configs(&[2]).unwrap();
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|w| w.multiplicity == BigUint::one()));
        assert_eq!(enumerate_nested_configs(&[1]).unwrap().len(), 1);
    }

    #[test]
    fn two_groups_single_each() {
        let e = enumerate_nested_configs(&[1, 1]).unwrap();
        assert_eq!(e.len(), 2);
        let rs: Vec<usize> = e.iter().map(|w| w.config.species()).collect();
        assert!(rs.contains(&1) && rs.contains(&2));
    }

    #[test]
    fn labeled_totals_count_refined_pairs() {
        assert_eq!(pairs(3), 12);
        for n in 1..=6 {
            assert_eq!(total(&[n]), BigUint::from(pairs(n)), "n={n}");
        }
    }

    #[test]
    fn coarse_orbit_counts_sum_to_bell() {
        // coarse partitions of the pooled labels
        let e = enumerate_nested_configs(&[5]).unwrap();
        let s: BigUint = aggregate_by(&e, |c| coarse_key(c).0).keys().len().into();
        assert_eq!(s, BigUint::from(7u32));
        let labeled: BigUint = aggregate_by(&e, |c| coarse_key(c)).keys().map(|k| k.1.clone()).sum();
        assert_eq!(labeled, BigUint::from(bell_number(5)));
    }

    #[test]
    fn cap_enforced() {
        assert!(enumerate_nested_configs(&[6, 5]).is_err());
        assert!(enumerate_nested_configs(&[0]).is_err());
    }
}
