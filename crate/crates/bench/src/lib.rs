//! Inputs shared by the benchmarks.

use deloc_core::{build_ring, RingModel, RingModelSpec};

/// Uniform six-site ring at half filling: 400 determinants.
pub fn six_ring() -> RingModel {
    build_ring(&RingModelSpec::uniform(6, 0.0, -1.0, 0.25, Some(1.5), 3, 3)).expect("valid ring")
}
