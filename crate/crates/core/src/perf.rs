//! SINR and spectral-efficiency evaluation, handover-rate accounting, and the
//! per-scheme operation counters that mirror the schemes' complexity model.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::FadingState;
use crate::error::{Error, Result};
use crate::serving::ServingSet;
use crate::topology::Topology;

/// Identifiers for the monotone per-scheme operation counters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    /// Scalar additions spent in total-SNR sums (M per sum evaluation).
    SnrSum,
    NewtonIter,
    FairnessEval,
    /// Per-UE handover decisions dispatched.
    Decision,
    DistanceClamp,
    /// Mobility-aware SE clamped to zero (UE in outage).
    OutageClamp,
}

/// Empirical complexity counters, merged associatively across blocks,
/// realizations, and schemes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    pub snr_sum_ops: u64,
    pub newton_iters: u64,
    pub fairness_evals: u64,
    pub decisions: u64,
    pub distance_clamps: u64,
    pub outage_clamps: u64,
}

impl OpCounters {
    pub fn count(&mut self, kind: OpKind, amount: u64) {
        match kind {
            OpKind::SnrSum => self.snr_sum_ops += amount,
            OpKind::NewtonIter => self.newton_iters += amount,
            OpKind::FairnessEval => self.fairness_evals += amount,
            OpKind::Decision => self.decisions += amount,
            OpKind::DistanceClamp => self.distance_clamps += amount,
            OpKind::OutageClamp => self.outage_clamps += amount,
        }
    }

    pub fn merge(&mut self, other: &OpCounters) {
        self.snr_sum_ops += other.snr_sum_ops;
        self.newton_iters += other.newton_iters;
        self.fairness_evals += other.fairness_evals;
        self.decisions += other.decisions;
        self.distance_clamps += other.distance_clamps;
        self.outage_clamps += other.outage_clamps;
    }

    /// SNR-sum operations per dispatched decision.
    pub fn snr_sums_per_decision(&self) -> f64 {
        if self.decisions == 0 {
            0.0
        } else {
            self.snr_sum_ops as f64 / self.decisions as f64
        }
    }
}

/// Uplink and downlink alternate by block parity; odd (1-based) blocks carry
/// the uplink.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkDirection {
    Uplink,
    Downlink,
}

impl LinkDirection {
    pub fn for_block(block_number: u64) -> Self {
        if block_number % 2 == 1 {
            LinkDirection::Uplink
        } else {
            LinkDirection::Downlink
        }
    }
}

/// Unit-norm combining and precoding vectors, supported only on each UE's
/// serving APs. Scaling a combiner never changes the SINR ratio, so both are
/// stored normalized and the noise term stays `n0` as written.
#[derive(Clone, Debug)]
pub struct CombinerSet {
    /// Combining vectors, M x K.
    pub phi: DMatrix<Complex<f64>>,
    /// Precoding vectors, M x K, unit-norm.
    pub w: DMatrix<Complex<f64>>,
}

/// Regularized MMSE combining restricted to each serving set: solve
/// (p sum_i h_i h_i^H + n0 I) phi_k = h_k, zero the rows outside UE k's
/// serving APs, and normalize. A UE whose estimate column is zero gets a zero
/// combiner and scores SINR 0.
pub fn combine_precode(
    estimates: &DMatrix<Complex<f64>>,
    serving: &[ServingSet],
    topo: &Topology,
    p_w: f64,
    n0_w: f64,
) -> CombinerSet {
    let (m, k) = estimates.shape();
    assert_eq!(serving.len(), k);

    let mut gram = estimates * estimates.adjoint() * Complex::new(p_w, 0.0);
    for i in 0..m {
        gram[(i, i)] += Complex::new(n0_w, 0.0);
    }
    let lu = gram.lu();

    let mut phi = DMatrix::zeros(m, k);
    for (kk, serving_set) in serving.iter().enumerate() {
        let rhs = estimates.column(kk).into_owned();
        let mut sol = lu
            .solve(&rhs)
            .expect("regularized MMSE system is nonsingular for n0 > 0");
        for mm in 0..m {
            if !serving_set.contains_ap(mm, topo) {
                sol[mm] = Complex::new(0.0, 0.0);
            }
        }
        let norm = sol.norm();
        if norm > 0.0 {
            sol /= Complex::new(norm, 0.0);
        }
        phi.set_column(kk, &sol);
    }
    CombinerSet {
        w: phi.clone(),
        phi,
    }
}

/// Full SINR at one slot: the expectations of the desired-signal and
/// interference terms are estimated by sample means over `n_fading_samples`
/// fresh draws of the aged channel. Interference is clamped at zero after the
/// desired-signal subtraction.
#[allow(clippy::too_many_arguments)]
pub fn sinr_full(
    fading: &FadingState,
    combiners: &CombinerSet,
    rho_t: f64,
    direction: LinkDirection,
    p_w: f64,
    n0_w: f64,
    n_fading_samples: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    if n_fading_samples == 0 {
        return Err(Error::InvalidArgument(
            "need at least one fading sample".into(),
        ));
    }
    let k = fading.h0.ncols();
    let vectors = match direction {
        LinkDirection::Uplink => &combiners.phi,
        LinkDirection::Downlink => &combiners.w,
    };

    let mut mean_desired = vec![Complex::new(0.0, 0.0); k];
    let mut mean_power = DMatrix::<f64>::zeros(k, k);
    for _ in 0..n_fading_samples {
        let h = fading.aged(rho_t, rng)?;
        // v[(kk, i)] = sum_m conj(x_m,kk) h_m,i with x the combining or
        // precoding vectors; rows outside the serving set are already zero.
        let v = match direction {
            // (kk, i) = sum_m conj(phi_m,kk) h_m,i
            LinkDirection::Uplink => vectors.adjoint() * &h,
            // (kk, i) = sum_m conj(h_m,kk) w_m,i
            LinkDirection::Downlink => h.adjoint() * vectors,
        };
        for kk in 0..k {
            mean_desired[kk] += v[(kk, kk)];
            for i in 0..k {
                mean_power[(kk, i)] += v[(kk, i)].norm_sqr();
            }
        }
    }

    let n = n_fading_samples as f64;
    let rho_sq = rho_t * rho_t;
    let mut out = Vec::with_capacity(k);
    for kk in 0..k {
        let desired = rho_sq * p_w * (mean_desired[kk] / n).norm_sqr();
        let total_power: f64 = (0..k).map(|i| p_w * mean_power[(kk, i)] / n).sum();
        let interference = (total_power - desired).max(0.0);
        out.push(desired / (interference + n0_w));
    }
    Ok(out)
}

/// Fast per-block SINR, the simplified interference form; config key
/// `se_model = fast`. Reports flag this mode since the full signal model is
/// bypassed.
pub fn sinr_fast(beta_col: &[f64], d_col: &[bool]) -> f64 {
    crate::handover::simplified_sinr(beta_col, d_col)
}

/// Average SE of one communication block from SINR samples covering the data
/// span: each sample stands for an equal share of the tau_c - tau_p data
/// slots, and pilot slots contribute zero.
pub fn baseline_se_block(sinr_at_slots: &[f64], tau_c: u32, tau_p: u32) -> Result<f64> {
    if sinr_at_slots.is_empty() {
        return Err(Error::InvalidArgument(
            "no SINR samples for the block".into(),
        ));
    }
    let data_slots = (tau_c - tau_p) as f64;
    let weight = data_slots / sinr_at_slots.len() as f64;
    let sum: f64 = sinr_at_slots.iter().map(|s| (1.0 + s).log2()).sum();
    Ok(weight * sum / tau_c as f64)
}

/// Handover rates over the mobility period: cluster changes per second, and
/// the AP rate scaled by the realization's average cluster size.
pub fn handover_rates(total_cluster_changes: u64, q_avg: f64, duration_s: f64) -> (f64, f64) {
    assert!(duration_s > 0.0, "duration must be positive");
    let h_cluster = total_cluster_changes as f64 / duration_s;
    (h_cluster, q_avg * h_cluster)
}

/// Mobility-aware SE: the baseline average discounted by handover delay
/// losses, clamped at zero (a UE whose loss fraction reaches 1 is in outage).
pub fn mobility_aware_se(
    se_baseline_avg: f64,
    h_cluster: f64,
    h_ap: f64,
    d_c_s: f64,
    d_ap_s: f64,
) -> f64 {
    se_baseline_avg * (1.0 - d_c_s * h_cluster - d_ap_s * h_ap).max(0.0)
}

/// Per-block scoring output for one scheme.
#[derive(Clone, Debug)]
pub struct BlockMetrics {
    pub se_baseline: Vec<f64>,
    pub n_clusters_changed: Vec<u32>,
    pub direction: LinkDirection,
}

/// Final per-UE metrics of one scheme over a realization.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RunMetrics {
    pub se_baseline_avg: f64,
    pub h_cluster: f64,
    pub h_ap: f64,
    pub se_mobility: f64,
}
