//! Campaign configuration: a flat key-value JSON document with one key per
//! simulation parameter. Unknown keys are rejected; missing keys fall back to
//! the documented defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::PathLossParams;
use crate::error::{Error, Result};
use crate::handover::{HandoverParams, Scheme};
use crate::units::{dbm_to_watts, noise_power_w};

/// Spectral-efficiency evaluation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeModel {
    /// Full combining/precoding signal model with fading-sample expectations.
    Full,
    /// Simplified-SINR scoring; orders of magnitude faster, flagged in
    /// reports because it bypasses the full signal model.
    Fast,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    // Geometry and population
    pub area_side_m: f64,
    pub num_aps: usize,
    pub num_ues: usize,
    pub ap_height_m: f64,
    pub ue_height_m: f64,
    /// AP-CSV file; overrides `num_aps` placement when set.
    pub topology_path: Option<PathBuf>,
    /// Trace-CSV file; overrides random-waypoint generation when set.
    pub traces_path: Option<PathBuf>,

    // Mobility
    pub speed_mps: f64,
    pub rwp_transition_scale_m: f64,

    // Radio frame
    pub fc_hz: f64,
    pub t_sa_s: f64,
    pub tau_p: u32,
    pub tau_c: u32,

    // Link budget
    pub tx_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub shadow_sigma_db: f64,
    pub pl_breakpoint_near_m: f64,
    pub pl_breakpoint_far_m: f64,
    pub pl_exponent_mid: f64,
    pub pl_exponent_far: f64,

    // Handover delays (seconds) and scheme margins (dB)
    pub d_c_s: f64,
    pub d_ap_s: f64,
    pub gamma1_db: f64,
    pub gamma2_db: f64,
    pub delta1_db: f64,
    pub delta2_db: f64,
    pub theta_db: f64,
    /// Dimensionless handover penalty inside the near-optimal objective;
    /// configurable independently of the delay `d_c_s`.
    pub dc_penalty: f64,
    pub newton_eps: f64,
    pub f_update: f64,

    // AP selection
    pub num_best_aps: usize,
    pub target_cluster_size: usize,

    // Evaluation
    pub schemes: Vec<Scheme>,
    pub se_model: SeModel,
    pub n_fading_samples: usize,
    pub slot_decimation: u32,

    // Campaign
    pub n_realizations: usize,
    pub duration_s: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            area_side_m: 750.0,
            num_aps: 308,
            num_ues: 50,
            ap_height_m: 10.0,
            ue_height_m: 1.0,
            topology_path: None,
            traces_path: None,
            speed_mps: 3.6,
            rwp_transition_scale_m: 50.0,
            fc_hz: 2e9,
            t_sa_s: 1e-4,
            tau_p: 10,
            tau_c: 200,
            tx_power_dbm: 20.0,
            bandwidth_hz: 20e6,
            noise_figure_db: 9.0,
            shadow_sigma_db: 8.0,
            pl_breakpoint_near_m: 10.0,
            pl_breakpoint_far_m: 50.0,
            pl_exponent_mid: 2.0,
            pl_exponent_far: 3.5,
            d_c_s: 0.1,
            d_ap_s: 0.02,
            gamma1_db: 1.0,
            gamma2_db: 1.0,
            delta1_db: 4.0,
            delta2_db: 4.0,
            theta_db: 4.0,
            dc_penalty: 0.1,
            newton_eps: 1e-6,
            f_update: 1.0 / 200.0,
            num_best_aps: 7,
            target_cluster_size: 20,
            schemes: Scheme::ALL.to_vec(),
            se_model: SeModel::Fast,
            n_fading_samples: 50,
            slot_decimation: 10,
            n_realizations: 20,
            duration_s: 30.0,
            seed: 42,
        }
    }
}

impl SimConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn block_duration_s(&self) -> f64 {
        self.tau_c as f64 * self.t_sa_s
    }

    pub fn num_blocks(&self) -> usize {
        (self.duration_s / self.block_duration_s()).round() as usize
    }

    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn noise_w(&self) -> f64 {
        noise_power_w(self.bandwidth_hz, self.noise_figure_db)
    }

    pub fn pathloss_params(&self) -> PathLossParams {
        PathLossParams {
            fc_hz: self.fc_hz,
            ap_height_m: self.ap_height_m,
            ue_height_m: self.ue_height_m,
            breakpoint_near_m: self.pl_breakpoint_near_m,
            breakpoint_far_m: self.pl_breakpoint_far_m,
            exponent_mid: self.pl_exponent_mid,
            exponent_far: self.pl_exponent_far,
            shadow_sigma_db: self.shadow_sigma_db,
        }
    }

    pub fn handover_params(&self) -> HandoverParams {
        HandoverParams {
            gamma1_db: self.gamma1_db,
            gamma2_db: self.gamma2_db,
            delta1_db: self.delta1_db,
            delta2_db: self.delta2_db,
            theta_db: self.theta_db,
            dc_penalty: self.dc_penalty,
            newton_eps: self.newton_eps,
            f_update: self.f_update,
            tau_p: self.tau_p,
            tau_c: self.tau_c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.area_side_m <= 0.0 {
            return fail(format!("area_side_m must be positive, got {}", self.area_side_m));
        }
        if self.topology_path.is_none() && self.num_aps == 0 {
            return fail("num_aps must be at least 1".into());
        }
        if self.num_ues == 0 {
            return fail("num_ues must be at least 1".into());
        }
        if self.tau_p >= self.tau_c {
            return fail(format!(
                "tau_p ({}) must be smaller than tau_c ({})",
                self.tau_p, self.tau_c
            ));
        }
        if self.fc_hz <= 0.0 || self.t_sa_s <= 0.0 {
            return fail("fc_hz and t_sa_s must be positive".into());
        }
        if self.speed_mps < 0.0 {
            return fail("speed_mps must be non-negative".into());
        }
        if self.rwp_transition_scale_m <= 0.0 {
            return fail("rwp_transition_scale_m must be positive".into());
        }
        if self.bandwidth_hz <= 0.0 {
            return fail("bandwidth_hz must be positive".into());
        }
        if self.pl_breakpoint_near_m <= 0.0
            || self.pl_breakpoint_far_m <= self.pl_breakpoint_near_m
        {
            return fail("path-loss breakpoints must satisfy 0 < near < far".into());
        }
        for (name, v) in [
            ("gamma1_db", self.gamma1_db),
            ("gamma2_db", self.gamma2_db),
            ("delta1_db", self.delta1_db),
            ("delta2_db", self.delta2_db),
            ("theta_db", self.theta_db),
        ] {
            if v < 0.0 {
                return fail(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.dc_penalty) {
            return fail(format!("dc_penalty must lie in [0, 1), got {}", self.dc_penalty));
        }
        if self.d_c_s < 0.0 || self.d_ap_s < 0.0 {
            return fail("handover delays must be non-negative".into());
        }
        if self.newton_eps <= 0.0 {
            return fail("newton_eps must be positive".into());
        }
        if !(self.f_update > 0.0 && self.f_update <= 1.0) {
            return fail(format!("f_update must lie in (0, 1], got {}", self.f_update));
        }
        if self.num_best_aps == 0 {
            return fail("num_best_aps must be at least 1".into());
        }
        if self.topology_path.is_none() && self.num_best_aps > self.num_aps {
            return fail(format!(
                "num_best_aps ({}) exceeds num_aps ({})",
                self.num_best_aps, self.num_aps
            ));
        }
        if self.target_cluster_size == 0 {
            return fail("target_cluster_size must be at least 1".into());
        }
        if self.n_fading_samples == 0 {
            return fail("n_fading_samples must be at least 1".into());
        }
        if self.slot_decimation == 0 {
            return fail("slot_decimation must be at least 1".into());
        }
        if self.n_realizations == 0 {
            return fail("n_realizations must be at least 1".into());
        }
        if self.duration_s <= 0.0 {
            return fail("duration_s must be positive".into());
        }
        let blocks = self.duration_s / self.block_duration_s();
        if (blocks - blocks.round()).abs() > 1e-9 || blocks.round() < 1.0 {
            return fail(format!(
                "duration_s ({}) must be a positive integer multiple of the block duration ({} s)",
                self.duration_s,
                self.block_duration_s()
            ));
        }
        Ok(())
    }
}
