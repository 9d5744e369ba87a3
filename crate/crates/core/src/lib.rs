//! Exact evaluation, sampling and verification of the coupled
//! coagulation–fragmentation duality for partitions generated by a hierarchy
//! of subordinators σⱼ∘σ₀.
//!
//! Probabilities are carried in natural-log scale throughout.

pub mod error;
pub mod hier;
pub mod laws;
pub mod levy;
pub mod oracle;
pub mod partition;
pub mod quadrature;
pub mod sampler;
pub mod special;
pub mod stable;

pub use error::{Error, Result};
pub use hier::{HierModel, HierTables};
pub use levy::LevyModel;
