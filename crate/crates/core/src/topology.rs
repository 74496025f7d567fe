//! AP placement and square CPU-cluster division.

use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// A point in 3D space, meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Static AP layout plus its square CPU-cluster division.
///
/// Immutable once built; campaigns share it read-only across parallel
/// realizations.
#[derive(Clone, Debug)]
pub struct Topology {
    pub area_side: f64,
    pub ap_positions: Vec<Point3>,
    /// (rows, cols) of the square cluster grid; (0, 0) until clusters are
    /// assigned.
    pub cluster_grid: (usize, usize),
    /// Cluster index per AP, aligned with `ap_positions`.
    pub cluster_of: Vec<u16>,
    /// Average APs per cluster, M / (rows * cols).
    pub q_avg: f64,
    /// APs in each cluster, derived from `cluster_of`.
    cluster_members: Vec<Vec<u16>>,
}

impl Topology {
    pub fn num_aps(&self) -> usize {
        self.ap_positions.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.cluster_grid.0 * self.cluster_grid.1
    }

    pub fn cluster_members(&self, cluster: usize) -> &[u16] {
        &self.cluster_members[cluster]
    }

    pub fn cluster_size(&self, cluster: usize) -> usize {
        self.cluster_members[cluster].len()
    }

    /// Builds an unclustered topology from explicit positions; call
    /// [`assign_square_clusters`] afterwards.
    pub fn from_positions(area_side: f64, ap_positions: Vec<Point3>) -> Self {
        Topology {
            area_side,
            ap_positions,
            cluster_grid: (0, 0),
            cluster_of: Vec::new(),
            q_avg: 0.0,
            cluster_members: Vec::new(),
        }
    }
}

/// Draws `num_aps` positions i.i.d. uniform over the square area (a binomial
/// point process: the PPP conditioned on a fixed AP count).
pub fn generate_uniform_topology(
    area_side: f64,
    num_aps: usize,
    ap_height: f64,
    rng: &mut impl Rng,
) -> Result<Topology> {
    if area_side <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "area side must be positive, got {area_side}"
        )));
    }
    if num_aps == 0 {
        return Err(Error::InvalidArgument("need at least one AP".into()));
    }
    let positions = (0..num_aps)
        .map(|_| {
            let x = rng.random_range(0.0..=area_side);
            let y = rng.random_range(0.0..=area_side);
            Point3::new(x, y, ap_height)
        })
        .collect();
    Ok(Topology::from_positions(area_side, positions))
}

/// Partitions the area into an n-by-n grid of square cells with
/// n = round(sqrt(M / target_q)), and assigns each AP to the cell containing
/// it. A `target_q` larger than M degenerates to a single cluster; the
/// harness surfaces that as a report warning.
pub fn assign_square_clusters(mut topo: Topology, target_q: usize) -> Result<Topology> {
    let m = topo.num_aps();
    if m == 0 {
        return Err(Error::InvalidArgument("topology has no APs".into()));
    }
    if target_q == 0 {
        return Err(Error::InvalidArgument(
            "target cluster size must be at least 1".into(),
        ));
    }
    let n = ((m as f64 / target_q as f64).sqrt().round() as usize).max(1);
    let cell = topo.area_side / n as f64;
    let clamp = |v: f64| -> usize { ((v / cell) as usize).min(n - 1) };

    let mut cluster_of = Vec::with_capacity(m);
    let mut members = vec![Vec::new(); n * n];
    for (i, p) in topo.ap_positions.iter().enumerate() {
        let idx = clamp(p.x) * n + clamp(p.y);
        cluster_of.push(idx as u16);
        members[idx].push(i as u16);
    }

    topo.cluster_grid = (n, n);
    topo.cluster_of = cluster_of;
    topo.q_avg = m as f64 / (n * n) as f64;
    topo.cluster_members = members;
    Ok(topo)
}

/// Loads AP positions from a CSV file with header `x_m,y_m,z_m`. Clusters
/// are assigned by a subsequent [`assign_square_clusters`] call.
pub fn load_topology(path: &Path, area_side: f64) -> Result<Topology> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;

    let mut positions = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // one header line, 1-based
        let record = record.map_err(|e| Error::Parse {
            path: path.into(),
            line,
            msg: e.to_string(),
        })?;
        if record.len() != 3 {
            return Err(Error::Parse {
                path: path.into(),
                line,
                msg: format!("expected 3 fields x_m,y_m,z_m, got {}", record.len()),
            });
        }
        let mut vals = [0.0; 3];
        for (j, v) in vals.iter_mut().enumerate() {
            *v = record[j].parse::<f64>().map_err(|e| Error::Parse {
                path: path.into(),
                line,
                msg: format!("field {}: {e}", j + 1),
            })?;
        }
        let p = Point3::new(vals[0], vals[1], vals[2]);
        if p.x < 0.0 || p.x > area_side || p.y < 0.0 || p.y > area_side {
            return Err(Error::Validation(format!(
                "AP at line {line} lies outside the {area_side} m area: ({}, {})",
                p.x, p.y
            )));
        }
        positions.push(p);
    }
    if positions.is_empty() {
        return Err(Error::Validation(format!(
            "no APs in {}",
            path.display()
        )));
    }
    Ok(Topology::from_positions(area_side, positions))
}
