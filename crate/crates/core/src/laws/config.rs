use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Joint state of coarse species, per-group counts and fine refinements.
///
/// `blocks[j][ℓ]` is the refinement (c_{j,1,ℓ}, …, c_{j,x_{j,ℓ},ℓ}) of the
/// n_{j,ℓ} group-j individuals of species ℓ; it is empty when n_{j,ℓ} = 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NestedConfig {
    blocks: Vec<Vec<Vec<usize>>>,
}

impl NestedConfig {
    pub fn new(blocks: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if blocks.is_empty() {
            return domain("configuration needs at least one group");
        }
        let r = blocks[0].len();
        if r == 0 {
            return domain("configuration needs at least one species");
        }
        if blocks.iter().any(|g| g.len() != r) {
            return domain("every group must list the same number of species");
        }
        for l in 0..r {
            if blocks.iter().all(|g| g[l].is_empty()) {
                return domain(format!("species {l} is observed in no group"));
            }
        }
        if blocks.iter().flatten().flatten().any(|&c| c == 0) {
            return domain("fine blocks must be nonempty");
        }
        Ok(NestedConfig { blocks })
    }

    /// Single-group configuration from per-species refinements.
    pub fn single_group(species: Vec<Vec<usize>>) -> Result<Self> {
        NestedConfig::new(vec![species])
    }

    pub fn blocks(&self) -> &[Vec<Vec<usize>>] {
        &self.blocks
    }

    pub fn groups(&self) -> usize {
        self.blocks.len()
    }

    /// r, the number of species.
    pub fn species(&self) -> usize {
        self.blocks[0].len()
    }

    /// n_{j,ℓ}.
    pub fn count(&self, j: usize, l: usize) -> usize {
        self.blocks[j][l].iter().sum()
    }

    /// x_{j,ℓ}.
    pub fn x(&self, j: usize, l: usize) -> usize {
        self.blocks[j][l].len()
    }

    /// x̃_ℓ = Σⱼ x_{j,ℓ}.
    pub fn x_tilde(&self, l: usize) -> usize {
        (0..self.groups()).map(|j| self.x(j, l)).sum()
    }

    /// K_j, the number of fine blocks in group j.
    pub fn k(&self, j: usize) -> usize {
        self.blocks[j].iter().map(Vec::len).sum()
    }

    /// K̃ = Σⱼ K_j.
    pub fn k_total(&self) -> usize {
        (0..self.groups()).map(|j| self.k(j)).sum()
    }

    /// n_j, the group total.
    pub fn n(&self, j: usize) -> usize {
        self.blocks[j].iter().flatten().sum()
    }

    pub fn totals(&self) -> Vec<usize> {
        (0..self.groups()).map(|j| self.n(j)).collect()
    }

    /// n⃗_ℓ = (n_{1,ℓ}, …, n_{J,ℓ}).
    pub fn species_counts(&self, l: usize) -> Vec<usize> {
        (0..self.groups()).map(|j| self.count(j, l)).collect()
    }

    /// Species sizes Σⱼ n_{j,ℓ}, the coarse partition of all observations.
    pub fn coarse_sizes(&self) -> Vec<usize> {
        (0..self.species()).map(|l| (0..self.groups()).map(|j| self.count(j, l)).sum()).collect()
    }

    /// Fine block sizes of group j across all species.
    pub fn fine_blocks(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.blocks[j].iter().flatten().copied()
    }

    /// Species-major view: `species_view()[ℓ][j]`.
    pub fn species_view(&self) -> Vec<Vec<Vec<usize>>> {
        (0..self.species()).map(|l| (0..self.groups()).map(|j| self.blocks[j][l].clone()).collect()).collect()
    }

    /// Configuration with species reordered by `perm` (new ℓ = perm[old]).
    pub fn permute_species(&self, perm: &[usize]) -> Result<Self> {
        let r = self.species();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true)) {
            return domain("species permutation is not a bijection");
        }
        let mut blocks = vec![vec![Vec::new(); r]; self.groups()];
        for (j, g) in self.blocks.iter().enumerate() {
            for (l, b) in g.iter().enumerate() {
                blocks[j][perm[l]] = b.clone();
            }
        }
        NestedConfig::new(blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_counts() {
        // group 0: species 0 → (2,1), species 1 → (1); group 1: species 0 → none, species 1 → (3)
        let c = NestedConfig::new(vec![vec![vec![2, 1], vec![1]], vec![vec![], vec![3]]]).unwrap();
        assert_eq!(c.species(), 2);
        assert_eq!(c.totals(), vec![4, 3]);
        assert_eq!(c.k(0), 3);
        assert_eq!(c.k(1), 1);
        assert_eq!(c.k_total(), 4);
        assert_eq!(c.x_tilde(0), 2);
        assert_eq!(c.x_tilde(1), 2);
        assert_eq!(c.species_counts(1), vec![1, 3]);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(NestedConfig::new(vec![vec![vec![]]]).is_err());
        assert!(NestedConfig::new(vec![vec![vec![1]], vec![]]).is_err());
        assert!(NestedConfig::new(vec![vec![vec![0, 1]]]).is_err());
        assert!(NestedConfig::new(vec![]).is_err());
    }
}
