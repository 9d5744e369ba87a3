use std::ops::Range;

use rand::{Rng, RngCore};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hier::HierModel;
use crate::sampler::coupled::SpeciesLaw;
use crate::sampler::rng::{draw_stream, stream};

/// Counts of values 0..len, with everything ≥ len in `tail`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub tail: u64,
}

impl Histogram {
    pub fn new(len: usize) -> Self {
        Histogram { counts: vec![0; len], tail: 0 }
    }

    pub fn add(&mut self, value: u64, times: u64) {
        if value < self.counts.len() as u64 {
            self.counts[value as usize] += times;
        } else {
            self.tail += times;
        }
    }

    pub fn add_tail(&mut self, times: u64) {
        self.tail += times;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.tail
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.tail += other.tail;
    }
}

/// Count statistics of one coupled draw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawSummary {
    pub phi: u64,
    pub k_tilde: u64,
    /// K_j per group.
    pub blocks: Vec<u64>,
    /// Group totals; `None` when a sub-block exceeded the histogram cap.
    pub totals: Vec<Option<u64>>,
}

/// Histogram sizes and the sub-block count above which block sizes are
/// drawn as a binomial chain instead of one by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummaryCaps {
    pub direct_limit: u64,
    pub phi_bins: usize,
    pub x_bins: usize,
    pub c_bins: usize,
    pub total_bins: usize,
}

impl Default for SummaryCaps {
    fn default() -> Self {
        SummaryCaps { direct_limit: 256, phi_bins: 64, x_bins: 4096, c_bins: 4096, total_bins: 256 }
    }
}

/// Per-run histograms of the coupled draw statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryAccumulator {
    pub draws: u64,
    /// Species count φ.
    pub phi: Histogram,
    /// X̃ per species.
    pub x_tilde: Histogram,
    /// K̃ per draw.
    pub k_tilde: Histogram,
    /// Sub-block sizes C pooled per group.
    pub c: Vec<Histogram>,
    /// Group totals per draw.
    pub totals: Vec<Histogram>,
    /// Group block counts K_j per draw.
    pub blocks: Vec<Histogram>,
}

impl SummaryAccumulator {
    pub fn new(groups: usize, caps: &SummaryCaps) -> Self {
        SummaryAccumulator {
            draws: 0,
            phi: Histogram::new(caps.phi_bins),
            x_tilde: Histogram::new(caps.x_bins),
            k_tilde: Histogram::new(caps.x_bins),
            c: vec![Histogram::new(caps.c_bins); groups],
            totals: vec![Histogram::new(caps.total_bins); groups],
            blocks: vec![Histogram::new(caps.x_bins); groups],
        }
    }

    pub fn merge(&mut self, other: &SummaryAccumulator) {
        self.draws += other.draws;
        self.phi.merge(&other.phi);
        self.x_tilde.merge(&other.x_tilde);
        self.k_tilde.merge(&other.k_tilde);
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            a.merge(b);
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            a.merge(b);
        }
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.merge(b);
        }
    }
}

/// Streams coupled draws into histograms without materializing sub-blocks.
///
/// Draw d reads the same streams as a full coupled draw from
/// `draw_stream(seed, d)`, so φ, X⃗ and every directly drawn block size agree
/// with the full sampler.
#[derive(Debug, Clone)]
pub struct SummarySampler {
    law: SpeciesLaw,
    caps: SummaryCaps,
}

impl SummarySampler {
    pub fn new(hier: &HierModel, caps: SummaryCaps) -> Result<Self> {
        if caps.phi_bins == 0 || caps.x_bins < 2 || caps.c_bins < 2 || caps.total_bins == 0 {
            return domain("histogram sizes must be positive");
        }
        Ok(SummarySampler { law: SpeciesLaw::new(hier)?, caps })
    }

    pub fn groups(&self) -> usize {
        self.law.q.len()
    }

    pub fn caps(&self) -> &SummaryCaps {
        &self.caps
    }

    fn draw(&self, rng: &mut dyn RngCore, mut acc: Option<&mut SummaryAccumulator>) -> Result<DrawSummary> {
        let phi = self.law.phi(rng)?;
        let key = rng.next_u64();
        let groups = self.groups();
        let mut totals: Vec<Option<u64>> = vec![Some(0); groups];
        let mut blocks = vec![0u64; groups];
        for l in 0..phi {
            let head = self.law.header(&mut stream(key, &[l]))?;
            if let Some(a) = acc.as_deref_mut() {
                a.x_tilde.add(head.x.iter().sum(), 1);
            }
            for (j, &xj) in head.x.iter().enumerate() {
                blocks[j] += xj;
                let mut rng = stream(key, &[l, j as u64 + 1]);
                let sum = self.group_blocks(j, xj, &mut rng, acc.as_deref_mut().map(|a| &mut a.c[j]))?;
                totals[j] = match (totals[j], sum) {
                    (Some(a), Some(b)) => a.checked_add(b),
                    _ => None,
                };
            }
        }
        let summary = DrawSummary { phi, k_tilde: blocks.iter().sum(), blocks, totals };
        if let Some(acc) = acc {
            acc.draws += 1;
            acc.phi.add(phi, 1);
            acc.k_tilde.add(summary.k_tilde, 1);
            for j in 0..groups {
                acc.blocks[j].add(summary.blocks[j], 1);
                match summary.totals[j] {
                    Some(t) => acc.totals[j].add(t, 1),
                    None => acc.totals[j].add_tail(1),
                }
            }
        }
        Ok(summary)
    }

    /// Adds x sub-block sizes of group j to `hist`; returns their sum when known.
    fn group_blocks(&self, j: usize, x: u64, rng: &mut impl Rng, mut hist: Option<&mut Histogram>) -> Result<Option<u64>> {
        let law = &self.law.groups[j];
        if x <= self.caps.direct_limit {
            let mut sum = 0u64;
            for _ in 0..x {
                let c = law.sample(rng)?;
                let _tag: f64 = rng.random();
                if let Some(h) = hist.as_deref_mut() {
                    h.add(c, 1);
                }
                sum = sum.saturating_add(c);
            }
            return Ok(Some(sum));
        }
        // m_c ~ Bin(remaining, P(C = c | C ≥ c)) for c below the histogram cap
        let mut rem = x;
        let mut sum = 0u64;
        for c in 1..self.caps.c_bins as u64 {
            if rem == 0 {
                break;
            }
            let m = Binomial::new(rem, law.hazard(c).clamp(0.0, 1.0)).map_err(|e| Error::Domain(e.to_string()))?.sample(rng);
            if let Some(h) = hist.as_deref_mut() {
                h.add(c, m);
            }
            sum = sum.saturating_add(c.saturating_mul(m));
            rem -= m;
        }
        if rem > 0 {
            if let Some(h) = hist {
                h.add_tail(rem);
            }
            return Ok(None);
        }
        Ok(Some(sum))
    }

    /// Per-draw summaries of draws `range` of a run seeded by `seed`.
    pub fn summaries(&self, seed: u64, range: Range<u64>) -> Result<Vec<DrawSummary>> {
        range.map(|d| self.draw(&mut draw_stream(seed, d), None)).collect()
    }

    /// Draws `range` of a run seeded by `seed`.
    pub fn run(&self, seed: u64, range: Range<u64>) -> Result<SummaryAccumulator> {
        let mut acc = SummaryAccumulator::new(self.groups(), &self.caps);
        for d in range {
            self.draw(&mut draw_stream(seed, d), Some(&mut acc))?;
        }
        Ok(acc)
    }

    /// Draws 0..draws split into `jobs` contiguous shards; the merged result
    /// does not depend on `jobs`.
    pub fn run_parallel(&self, seed: u64, draws: u64, jobs: usize) -> Result<SummaryAccumulator> {
        let mut acc = SummaryAccumulator::new(self.groups(), &self.caps);
        for r in sharded(draws, jobs, |r| self.run(seed, r)) {
            acc.merge(&r?);
        }
        Ok(acc)
    }

    /// [`SummarySampler::summaries`] of 0..draws over `jobs` shards, in draw order.
    pub fn summaries_parallel(&self, seed: u64, draws: u64, jobs: usize) -> Result<Vec<DrawSummary>> {
        let mut out = Vec::with_capacity(draws as usize);
        for r in sharded(draws, jobs, |r| self.summaries(seed, r)) {
            out.extend(r?);
        }
        Ok(out)
    }
}

fn sharded<T: Send>(draws: u64, jobs: usize, work: impl Fn(Range<u64>) -> T + Sync) -> Vec<T> {
    let jobs = jobs.max(1) as u64;
    let chunk = draws.div_ceil(jobs);
    let shards: Vec<Range<u64>> =
        (0..jobs).map(|i| (i * chunk).min(draws)..((i + 1) * chunk).min(draws)).filter(|r| !r.is_empty()).collect();
    let work = &work;
    std::thread::scope(|s| {
        let handles: Vec<_> = shards.into_iter().map(|r| s.spawn(move || work(r))).collect();
        handles.into_iter().map(|h| h.join().expect("sampler shard panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyModel;
    use crate::sampler::coupled::CoupledSampler;

    fn hier() -> HierModel {
        HierModel::new(LevyModel::gen_gamma(0.4, 1.0, 0.5), vec![LevyModel::gen_gamma(0.3, 1.0, 0.2), LevyModel::gamma(2.0, 0.1)], vec![1.0, 1.5])
            .unwrap()
    }

    #[test]
    fn agrees_with_full_draws_below_direct_limit() {
        let h = hier();
        let caps = SummaryCaps { direct_limit: u64::MAX, ..SummaryCaps::default() };
        let s = SummarySampler::new(&h, caps).unwrap();
        let full = CoupledSampler::new(&h).unwrap();
        let acc = s.run(5, 0..300).unwrap();
        let mut phi = Histogram::new(caps.phi_bins);
        let mut tot = Histogram::new(caps.total_bins);
        for d in 0..300 {
            let draw = full.sample(&mut draw_stream(5, d)).unwrap();
            phi.add(draw.phi, 1);
            tot.add(draw.totals(2)[1], 1);
        }
        assert_eq!(acc.phi, phi);
        assert_eq!(acc.totals[1], tot);
        let rows = s.summaries(5, 0..300).unwrap();
        assert_eq!(rows.iter().map(|r| r.phi).sum::<u64>(), (0..caps.phi_bins).map(|v| v as u64 * acc.phi.counts[v]).sum::<u64>());
    }

    #[test]
    fn sharding_is_invisible() {
        let h = hier();
        let s = SummarySampler::new(&h, SummaryCaps { direct_limit: 2, ..SummaryCaps::default() }).unwrap();
        let a = s.run_parallel(17, 1000, 1).unwrap();
        let b = s.run_parallel(17, 1000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.draws, 1000);
        assert_eq!(a.phi.total(), 1000);
    }
}
