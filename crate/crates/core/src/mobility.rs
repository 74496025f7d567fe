//! UE mobility: random-waypoint generation and walk-trace ingestion.
//!
//! Positions are sampled only at communication-block boundaries; large-scale
//! quantities are per-block constants and intra-block variation is carried by
//! the channel-aging coefficient.

use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// Rayleigh(scale) draw by inverse transform.
fn rayleigh_sample(scale: f64, rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random();
    scale * (-2.0 * (1.0 - u).ln()).sqrt()
}

/// One UE's walk, sampled at block boundaries.
#[derive(Clone, Debug)]
pub struct UeTrace {
    /// Constant movement speed for generated walks; for loaded traces, the
    /// largest per-block displacement divided by the block duration.
    pub speed: f64,
    pub positions: Vec<(f64, f64)>,
    pub block_duration: f64,
}

impl UeTrace {
    pub fn num_blocks(&self) -> usize {
        self.positions.len()
    }
}

/// Random-waypoint walk: directions uniform on [0, 2pi), leg lengths
/// Rayleigh-distributed, constant speed, no pauses. Legs that would exit the
/// area get their direction resampled until the leg stays inside.
pub fn generate_rwp_trace(
    area_side: f64,
    speed: f64,
    num_blocks: usize,
    block_duration: f64,
    transition_scale: f64,
    rng: &mut impl Rng,
) -> Result<UeTrace> {
    if transition_scale <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "transition scale must be positive, got {transition_scale}"
        )));
    }
    if speed < 0.0 {
        return Err(Error::InvalidArgument("speed must be non-negative".into()));
    }
    if num_blocks == 0 {
        return Err(Error::InvalidArgument("need at least one block".into()));
    }
    if area_side <= 0.0 || block_duration <= 0.0 {
        return Err(Error::InvalidArgument(
            "area side and block duration must be positive".into(),
        ));
    }

    let start = (
        rng.random_range(0.0..=area_side),
        rng.random_range(0.0..=area_side),
    );
    if speed == 0.0 {
        return Ok(UeTrace {
            speed,
            positions: vec![start; num_blocks],
            block_duration,
        });
    }

    let mut positions = Vec::with_capacity(num_blocks);
    positions.push(start);
    let mut pos = start;
    // Current leg: unit direction and remaining length.
    let mut dir = (0.0, 0.0);
    let mut leg_left = 0.0;

    fn draw_leg(
        rng: &mut impl Rng,
        from: (f64, f64),
        area_side: f64,
        scale: f64,
    ) -> ((f64, f64), f64) {
        let mut len = rayleigh_sample(scale, rng).max(1e-12);
        let mut attempts = 0usize;
        loop {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let d = (theta.cos(), theta.sin());
            let end = (from.0 + len * d.0, from.1 + len * d.1);
            // The area is convex, so endpoint containment keeps the whole
            // leg inside.
            if end.0 >= 0.0 && end.0 <= area_side && end.1 >= 0.0 && end.1 <= area_side {
                return (d, len);
            }
            attempts += 1;
            if attempts.is_multiple_of(1024) {
                // Leg too long to fit from this position in any direction;
                // astronomically rare for sane scales.
                len = rayleigh_sample(scale, rng).max(1e-12);
            }
        }
    }

    for _ in 1..num_blocks {
        let mut remaining = speed * block_duration;
        while remaining > 0.0 {
            if leg_left <= 0.0 {
                let (d, len) = draw_leg(rng, pos, area_side, transition_scale);
                dir = d;
                leg_left = len;
            }
            let step = remaining.min(leg_left);
            pos = (
                (pos.0 + step * dir.0).clamp(0.0, area_side),
                (pos.1 + step * dir.1).clamp(0.0, area_side),
            );
            leg_left -= step;
            remaining -= step;
        }
        positions.push(pos);
    }

    Ok(UeTrace {
        speed,
        positions,
        block_duration,
    })
}

/// Loads walk traces from a CSV file with header `ue_id,t_s,x_m,y_m`, rows
/// sorted by (ue_id, t_s). Each trace is resampled by linear interpolation
/// onto block boundaries relative to its first timestamp.
pub fn load_traces(path: &Path, block_duration: f64, area_side: f64) -> Result<Vec<UeTrace>> {
    if block_duration <= 0.0 {
        return Err(Error::InvalidArgument(
            "block duration must be positive".into(),
        ));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;

    // Waypoints (t, x, y) grouped by UE id.
    type Waypoints = Vec<(f64, f64, f64)>;
    let mut groups: Vec<(u64, Waypoints)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            path: path.into(),
            line,
            msg: e.to_string(),
        })?;
        if record.len() != 4 {
            return Err(Error::Parse {
                path: path.into(),
                line,
                msg: format!("expected 4 fields ue_id,t_s,x_m,y_m, got {}", record.len()),
            });
        }
        let parse_f = |j: usize| -> Result<f64> {
            record[j].parse::<f64>().map_err(|e| Error::Parse {
                path: path.into(),
                line,
                msg: format!("field {}: {e}", j + 1),
            })
        };
        let ue_id = record[0].parse::<u64>().map_err(|e| Error::Parse {
            path: path.into(),
            line,
            msg: format!("ue_id: {e}"),
        })?;
        let (t, x, y) = (parse_f(1)?, parse_f(2)?, parse_f(3)?);
        if x < 0.0 || x > area_side || y < 0.0 || y > area_side {
            return Err(Error::Validation(format!(
                "waypoint at line {line} outside the {area_side} m area: ({x}, {y})"
            )));
        }
        match groups.last_mut() {
            Some((id, points)) if *id == ue_id => {
                let prev_t = points.last().unwrap().0;
                if t <= prev_t {
                    return Err(Error::Parse {
                        path: path.into(),
                        line,
                        msg: format!("timestamps not strictly increasing ({prev_t} -> {t})"),
                    });
                }
                points.push((t, x, y));
            }
            _ => groups.push((ue_id, vec![(t, x, y)])),
        }
    }
    if groups.is_empty() {
        return Err(Error::Validation(format!(
            "no waypoints in {}",
            path.display()
        )));
    }

    Ok(groups
        .into_iter()
        .map(|(_, points)| resample(&points, block_duration))
        .collect())
}

/// Linear interpolation of waypoints onto block boundaries. Waypoints already
/// aligned to boundaries are reproduced exactly.
fn resample(points: &[(f64, f64, f64)], block_duration: f64) -> UeTrace {
    let t0 = points[0].0;
    let span = points.last().unwrap().0 - t0;
    let num_blocks = ((span + 1e-9) / block_duration).floor() as usize + 1;

    let mut positions = Vec::with_capacity(num_blocks);
    let mut seg = 0usize;
    for j in 0..num_blocks {
        let t = t0 + j as f64 * block_duration;
        while seg + 1 < points.len() && points[seg + 1].0 < t {
            seg += 1;
        }
        let pos = if seg + 1 >= points.len() {
            (points[seg].1, points[seg].2)
        } else {
            let (ta, xa, ya) = points[seg];
            let (tb, xb, yb) = points[seg + 1];
            let w = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
            if w == 0.0 {
                (xa, ya)
            } else if w == 1.0 {
                (xb, yb)
            } else {
                (xa + w * (xb - xa), ya + w * (yb - ya))
            }
        };
        positions.push(pos);
    }

    let mut max_step = 0.0f64;
    for pair in positions.windows(2) {
        let dx = pair[1].0 - pair[0].0;
        let dy = pair[1].1 - pair[0].1;
        max_step = max_step.max((dx * dx + dy * dy).sqrt());
    }

    UeTrace {
        speed: max_step / block_duration,
        positions,
        block_duration,
    }
}
