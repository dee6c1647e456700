//! Synthetic workloads: random small instances, and packs whose work per
//! node is fixed by construction.

mod random;
mod shaped;

pub use random::{random_instance, RandomInstance, RandomLimits};
pub use shaped::{broom, padding_work, uniform_pack, BroomSpec, Workload};
