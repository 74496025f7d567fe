//! Shared fixtures for the benchmark targets.

use cfsim_core::rng::substream;
use cfsim_core::topology::{assign_square_clusters, generate_uniform_topology, Topology};

/// Reference medium-density layout: 308 APs in a 750 m square, Q ~ 20.
pub fn reference_topology() -> Topology {
    let mut rng = substream(42, &[1]);
    let topo = generate_uniform_topology(750.0, 308, 10.0, &mut rng).unwrap();
    assign_square_clusters(topo, 20).unwrap()
}

/// A deterministic per-AP SNR column with realistic dynamic range.
pub fn snr_column(num_aps: usize) -> Vec<f64> {
    (0..num_aps)
        .map(|m| {
            let x = m as f64;
            10f64.powf(((x * 37.0) % 41.0) / 10.0 - 1.0)
        })
        .collect()
}
