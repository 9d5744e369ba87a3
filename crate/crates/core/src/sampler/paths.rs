use serde::{Deserialize, Serialize};

use crate::sampler::coupled::CoupledDraw;

/// Nondecreasing integer step function on [0, 1].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StepFunction {
    /// (location, increment), sorted by location; increments positive.
    pub jumps: Vec<(f64, u64)>,
}

impl StepFunction {
    pub fn from_jumps(mut jumps: Vec<(f64, u64)>) -> Self {
        jumps.retain(|j| j.1 > 0);
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        StepFunction { jumps }
    }

    /// Σ increments at locations ≤ y.
    pub fn eval(&self, y: f64) -> u64 {
        let k = self.jumps.partition_point(|j| j.0 <= y);
        self.jumps[..k].iter().map(|j| j.1).sum()
    }

    pub fn total(&self) -> u64 {
        self.jumps.iter().map(|j| j.1).sum()
    }
}

/// The four path components of a coupled draw, per group j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paths {
    /// I_j: individuals, jumping C at each sub-block tag.
    pub individuals: Vec<StepFunction>,
    /// 𝒜_j: fine blocks, jumping 1 at each sub-block tag.
    pub allocation: Vec<StepFunction>,
    /// Z_j: individuals by species, jumping n_{j,ℓ} at each species tag.
    pub species: Vec<StepFunction>,
    /// fragments[ℓ][j]: individuals of species ℓ in group j by sub-block tag.
    pub fragments: Vec<Vec<StepFunction>>,
}

pub fn materialize_paths(draw: &CoupledDraw, groups: usize) -> Paths {
    let fragments: Vec<Vec<StepFunction>> = draw
        .species
        .iter()
        .map(|s| s.subblocks.iter().map(|b| StepFunction::from_jumps(b.iter().map(|x| (x.tag, x.count)).collect())).collect())
        .collect();
    let mut individuals = Vec::with_capacity(groups);
    let mut allocation = Vec::with_capacity(groups);
    let mut species = Vec::with_capacity(groups);
    for j in 0..groups {
        let blocks = || draw.species.iter().flat_map(|s| s.subblocks[j].iter());
        individuals.push(StepFunction::from_jumps(blocks().map(|b| (b.tag, b.count)).collect()));
        allocation.push(StepFunction::from_jumps(blocks().map(|b| (b.tag, 1)).collect()));
        species.push(StepFunction::from_jumps(draw.species.iter().map(|s| (s.tag, s.count(j))).collect()));
        assert_eq!(individuals[j].total(), species[j].total(), "fine and coarse totals differ in group {j}");
    }
    Paths { individuals, allocation, species, fragments }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hier::HierModel;
    use crate::levy::LevyModel;
    use crate::sampler::coupled::sample_coupled;
    use crate::sampler::rng::draw_stream;

    #[test]
    fn empty_draw_is_zero() {
        let p = materialize_paths(&CoupledDraw { phi: 0, species: Vec::new() }, 2);
        assert!(p.individuals.iter().chain(&p.species).all(|f| f.total() == 0 && f.eval(1.0) == 0));
    }

    #[test]
    fn jumps_sit_on_tags_and_fragments_sum() {
        let h = HierModel::new(LevyModel::gamma(2.0, 0.5), vec![LevyModel::gamma(1.0, 0.5), LevyModel::gen_gamma(0.3, 1.0, 1.0)], vec![1.0, 2.0])
            .unwrap();
        for d in 0..50 {
            let draw = sample_coupled(&h, &mut draw_stream(2, d)).unwrap();
            let p = materialize_paths(&draw, 2);
            for j in 0..2 {
                let frag_total: u64 = p.fragments.iter().map(|f| f[j].total()).sum();
                assert_eq!(frag_total, p.individuals[j].total());
                for &(y, _) in &p.species[j].jumps {
                    assert!(draw.species.iter().any(|s| s.tag == y));
                }
                for &(y, _) in &p.individuals[j].jumps {
                    assert!(draw.species.iter().any(|s| s.subblocks[j].iter().any(|b| b.tag == y)));
                }
                let mid = p.individuals[j].eval(0.5);
                assert!(mid <= p.individuals[j].eval(1.0));
            }
        }
    }
}
