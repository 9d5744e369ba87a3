use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hier::HierModel;
use crate::laws::NestedConfig;
use crate::levy::MtpSampler;
use crate::sampler::rng::stream;

/// Cap on the total number of sub-blocks materialized in one draw.
pub const COUPLED_MAX_SUBBLOCKS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubBlock {
    /// Individuals in the fine block, C ≥ 1.
    pub count: u64,
    /// Uniform label Ũ.
    pub tag: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    /// Uniform label Ỹ.
    pub tag: f64,
    /// Base jump size H.
    pub h: f64,
    /// Fine-block counts X_j per group; Σⱼ X_j = X̃ ≥ 1.
    pub x: Vec<u64>,
    /// subblocks[j][k].
    pub subblocks: Vec<Vec<SubBlock>>,
}

impl Species {
    pub fn x_tilde(&self) -> u64 {
        self.x.iter().sum()
    }

    /// n_{j,ℓ}, the individuals of this species in group j.
    pub fn count(&self, j: usize) -> u64 {
        self.subblocks[j].iter().map(|b| b.count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledDraw {
    pub phi: u64,
    pub species: Vec<Species>,
}

impl CoupledDraw {
    pub fn groups(&self) -> usize {
        self.species.first().map_or(0, |s| s.x.len())
    }

    /// Per-group individual totals.
    pub fn totals(&self, groups: usize) -> Vec<u64> {
        (0..groups).map(|j| self.species.iter().map(|s| s.count(j)).sum()).collect()
    }

    /// Per-group fine block totals K_j.
    pub fn block_counts(&self, groups: usize) -> Vec<u64> {
        (0..groups).map(|j| self.species.iter().map(|s| s.x[j]).sum()).collect()
    }

    /// The nested configuration of the draw; None when no species was drawn.
    pub fn to_config(&self) -> Result<Option<NestedConfig>> {
        if self.species.is_empty() {
            return Ok(None);
        }
        let groups = self.groups();
        let blocks = (0..groups)
            .map(|j| self.species.iter().map(|s| s.subblocks[j].iter().map(|b| b.count as usize).collect()).collect())
            .collect();
        NestedConfig::new(blocks).map(Some)
    }

    /// Every tag in the draw is distinct.
    pub fn tags_distinct(&self) -> bool {
        let mut tags: Vec<f64> = self.species.iter().map(|s| s.tag).collect();
        tags.extend(self.species.iter().flat_map(|s| s.subblocks.iter().flatten().map(|b| b.tag)));
        tags.sort_by(f64::total_cmp);
        tags.windows(2).all(|w| w[0] != w[1])
    }
}

/// Species-level laws shared by the full and summary samplers.
#[derive(Debug, Clone)]
pub(crate) struct SpeciesLaw {
    pub base_exponent: f64,
    pub x_law: MtpSampler,
    pub h_offset: f64,
    pub h_rate: f64,
    pub q: Vec<f64>,
    pub groups: Vec<MtpSampler>,
}

/// (tag, H, X⃗) of one species.
pub(crate) struct SpeciesHeader {
    pub tag: f64,
    pub h: f64,
    pub x: Vec<u64>,
}

fn dist_err(e: impl std::fmt::Display) -> Error {
    Error::Domain(e.to_string())
}

impl SpeciesLaw {
    pub fn new(hier: &HierModel) -> Result<Self> {
        hier.validate()?;
        let psis = hier.psis()?;
        let psi_sum: f64 = psis.iter().sum();
        let base_exponent = hier.base_exponent()?;
        if !(base_exponent > 0.0 && base_exponent.is_finite()) {
            return domain(format!("species rate must be positive and finite, got {base_exponent}"));
        }
        let p0 = hier.tau0.gg();
        let groups = hier.taus.iter().zip(&hier.gammas).map(|(m, &g)| MtpSampler::new(m, g)).collect::<Result<_>>()?;
        Ok(SpeciesLaw {
            base_exponent,
            x_law: MtpSampler::new(&hier.tau0, psi_sum)?,
            h_offset: p0.alpha,
            h_rate: p0.zeta + psi_sum,
            q: psis.iter().map(|p| p / psi_sum).collect(),
            groups,
        })
    }

    pub fn phi<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        let p = Poisson::new(self.base_exponent).map_err(dist_err)?;
        Ok(p.sample(rng) as u64)
    }

    pub fn header<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SpeciesHeader> {
        let tag = rng.random::<f64>();
        let xt = self.x_law.sample(rng)?;
        let h = Gamma::new(xt as f64 - self.h_offset, 1.0 / self.h_rate).map_err(dist_err)?.sample(rng);
        let mut x = vec![0u64; self.q.len()];
        let mut rem = xt;
        let mut mass = 1.0;
        for (j, &qj) in self.q.iter().enumerate() {
            if j + 1 == self.q.len() {
                x[j] = rem;
                break;
            }
            let p = (qj / mass).clamp(0.0, 1.0);
            let b = Binomial::new(rem, p).map_err(dist_err)?.sample(rng);
            x[j] = b;
            rem -= b;
            mass -= qj;
        }
        Ok(SpeciesHeader { tag, h, x })
    }
}

/// Reusable sampler of coupled draws for a fixed hierarchy.
#[derive(Debug, Clone)]
pub struct CoupledSampler {
    pub(crate) law: SpeciesLaw,
}

impl CoupledSampler {
    pub fn new(hier: &HierModel) -> Result<Self> {
        Ok(CoupledSampler { law: SpeciesLaw::new(hier)? })
    }

    /// One draw; φ comes from `rng`, then a stream key for species and sub-blocks.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CoupledDraw> {
        let phi = self.law.phi(rng)?;
        sample_coupled_keyed(&self.law, phi, rng.next_u64())
    }
}

pub fn sample_coupled<R: Rng + ?Sized>(hier: &HierModel, rng: &mut R) -> Result<CoupledDraw> {
    CoupledSampler::new(hier)?.sample(rng)
}

/// Species and sub-blocks of a draw with φ species under stream key `key`.
pub(crate) fn sample_coupled_keyed(law: &SpeciesLaw, phi: u64, key: u64) -> Result<CoupledDraw> {
    let mut species = Vec::with_capacity(phi as usize);
    let mut budget = COUPLED_MAX_SUBBLOCKS;
    for l in 0..phi {
        let head = law.header(&mut stream(key, &[l]))?;
        let mut subblocks = Vec::with_capacity(head.x.len());
        for (j, &xj) in head.x.iter().enumerate() {
            if xj > budget {
                return Err(Error::Envelope(format!("draw needs more than {COUPLED_MAX_SUBBLOCKS} sub-blocks")));
            }
            budget -= xj;
            let mut rng = stream(key, &[l, j as u64 + 1]);
            let mut blocks = Vec::with_capacity(xj as usize);
            for _ in 0..xj {
                let count = law.groups[j].sample(&mut rng)?;
                blocks.push(SubBlock { count, tag: rng.random() });
            }
            subblocks.push(blocks);
        }
        species.push(Species { tag: head.tag, h: head.h, x: head.x, subblocks });
    }
    Ok(CoupledDraw { phi, species })
}
