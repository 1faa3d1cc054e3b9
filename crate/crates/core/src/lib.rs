pub mod adjudicator;
pub mod cochain;
pub mod error;
pub mod pipeline;
pub mod glattice;
pub mod group;
pub mod linalg;
pub mod qz;
pub mod smallgroup;

pub use error::{AdjudicatorError, CochainError, GroupError, LatticeError, LinalgError, PipelineError};
pub use group::{GroupElement, HeisenbergGroup, PrimeParam, Subgroup, SubgroupLabel};
pub use glattice::{GLattice, LatticeMap};
pub use smallgroup::FiniteGroup;
