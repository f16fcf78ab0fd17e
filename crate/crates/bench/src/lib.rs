//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use hfss_core::{maps, BallMesh, DirectorField};

pub fn mesh(n: usize) -> Arc<BallMesh> {
    Arc::new(BallMesh::new(n).expect("bench resolution is valid"))
}

/// The smooth, non-harmonic datum used by the flow benches.
pub fn twisted(n: usize) -> DirectorField {
    maps::twisted(mesh(n)).expect("twisted map is unit valued")
}

/// Half the explicit stability limit `h^2 / 6`.
pub fn half_stable_dt(mesh: &BallMesh) -> f64 {
    mesh.spacing().powi(2) / 12.0
}
