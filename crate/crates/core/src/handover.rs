//! Handover decision schemes behind one dispatch interface: always-handover,
//! the Newton-solved near-optimal scheme, the fairness-differentiated
//! threshold scheme, and the hysteresis / UE-performance-aware baselines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perf::{OpCounters, OpKind};
use crate::units::db_to_linear;

/// Scheme identifiers, config key `scheme`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Always,
    NearOpt,
    FairDiff,
    Hysteresis,
    Upa,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Always,
        Scheme::NearOpt,
        Scheme::FairDiff,
        Scheme::Hysteresis,
        Scheme::Upa,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Always => "always",
            Scheme::NearOpt => "nearopt",
            Scheme::FairDiff => "fairdiff",
            Scheme::Hysteresis => "hysteresis",
            Scheme::Upa => "upa",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "always" => Ok(Scheme::Always),
            "nearopt" => Ok(Scheme::NearOpt),
            "fairdiff" => Ok(Scheme::FairDiff),
            "hysteresis" => Ok(Scheme::Hysteresis),
            "upa" => Ok(Scheme::Upa),
            other => Err(Error::InvalidArgument(format!(
                "unknown scheme '{other}' (expected always|nearopt|fairdiff|hysteresis|upa)"
            ))),
        }
    }
}

/// Per-UE total serving SNRs entering a block decision: previous set at
/// previous SNRs, previous set at current SNRs, candidate set at current
/// SNRs.
#[derive(Clone, Debug, Default)]
pub struct SnrSnapshot {
    pub s_bef: Vec<f64>,
    pub s_cur: Vec<f64>,
    pub s_new: Vec<f64>,
}

impl SnrSnapshot {
    pub fn num_ues(&self) -> usize {
        self.s_cur.len()
    }
}

/// Inputs of the relaxed per-block throughput maximization for one UE.
#[derive(Clone, Copy, Debug)]
pub struct OptimizerInputs {
    /// Simplified SINR of the previous serving set at current SNRs.
    pub sinr_before: f64,
    /// Simplified SINR of the candidate set at current SNRs; clamped up to
    /// `sinr_before` (a candidate below the previous set always means "keep").
    pub sinr_after: f64,
    /// Dimensionless handover penalty in the objective.
    pub dc_penalty: f64,
    pub tau_p: u32,
    pub tau_c: u32,
}

impl OptimizerInputs {
    pub fn new(sinr_before: f64, sinr_after: f64, dc_penalty: f64, tau_p: u32, tau_c: u32) -> Self {
        OptimizerInputs {
            sinr_before,
            sinr_after: sinr_after.max(sinr_before),
            dc_penalty,
            tau_p,
            tau_c,
        }
    }

    fn prefactor(&self) -> f64 {
        (self.tau_c - self.tau_p) as f64 / self.tau_c as f64
    }

    /// Relaxed objective f(x) = kappa log2(A + x(B-A) + 1)(1 - d_C x).
    pub fn objective(&self, x: f64) -> f64 {
        let u = self.sinr_before + x * (self.sinr_after - self.sinr_before) + 1.0;
        self.prefactor() * u.log2() * (1.0 - self.dc_penalty * x)
    }

    fn derivatives(&self, x: f64) -> (f64, f64) {
        let m = self.sinr_after - self.sinr_before;
        let c = self.dc_penalty;
        let u = self.sinr_before + x * m + 1.0;
        let ln2 = std::f64::consts::LN_2;
        let d1 = self.prefactor() * (m / (u * ln2) * (1.0 - c * x) - c * u.log2());
        let d2 = -self.prefactor() * (m * m * (1.0 - c * x) / (u * u * ln2) + 2.0 * m * c / (u * ln2));
        (d1, d2)
    }
}

/// Outcome of one near-optimal decision. `relaxed_x` is the Newton root when
/// the iteration converged to one; `None` when monotonicity classification or
/// the endpoint fallback decided.
#[derive(Clone, Copy, Debug)]
pub struct UeDecision {
    pub handover: bool,
    pub relaxed_x: Option<f64>,
    pub newton_iters: u32,
}

const NEWTON_MAX_ITERS: u32 = 100;
const DEGENERATE_SLOPE: f64 = 1e-12;
const DEGENERATE_CURVATURE: f64 = 1e-12;

/// Near-optimal single-UE decision: Newton's method from x = 0.5 on the
/// stationarity condition of the relaxed objective, then integer conversion
/// (root < 0 keeps the set, root > 1 hands over, roots inside round to the
/// closest integer).
pub fn near_opt_decide(inp: &OptimizerInputs, epsilon: f64) -> UeDecision {
    let m = inp.sinr_after - inp.sinr_before;
    if m <= DEGENERATE_SLOPE {
        // B ~ A: the objective is monotone; classify by the slope sign.
        let flat = OptimizerInputs {
            sinr_after: inp.sinr_before,
            ..*inp
        };
        let (d1, _) = flat.derivatives(0.5);
        return UeDecision {
            handover: d1 > 0.0,
            relaxed_x: None,
            newton_iters: 0,
        };
    }

    let endpoint_fallback = |iters: u32| UeDecision {
        handover: inp.objective(1.0) > inp.objective(0.0),
        relaxed_x: None,
        newton_iters: iters,
    };

    let mut x = 0.5;
    let mut iters = 0;
    loop {
        let u = inp.sinr_before + x * m + 1.0;
        if !u.is_finite() || u <= 0.0 {
            // Iterate left the objective's domain.
            return endpoint_fallback(iters);
        }
        let (d1, d2) = inp.derivatives(x);
        if d1.abs() < epsilon {
            return convert_root(x, iters);
        }
        if d2.abs() < DEGENERATE_CURVATURE {
            let (at_half, _) = inp.derivatives(0.5);
            return UeDecision {
                handover: at_half > 0.0,
                relaxed_x: None,
                newton_iters: iters,
            };
        }
        let step = d1 / d2;
        x -= step;
        iters += 1;
        if step.abs() < epsilon {
            let (at_root, _) = inp.derivatives(x);
            if at_root.abs() < epsilon {
                return convert_root(x, iters);
            }
            return endpoint_fallback(iters);
        }
        if iters >= NEWTON_MAX_ITERS {
            return endpoint_fallback(iters);
        }
    }
}

fn convert_root(root: f64, iters: u32) -> UeDecision {
    let handover = if root < 0.0 {
        false
    } else if root > 1.0 {
        true
    } else {
        root.round() == 1.0
    };
    UeDecision {
        handover,
        relaxed_x: Some(root),
        newton_iters: iters,
    }
}

/// Jain's fairness index F = (sum s)^2 / (K sum s^2), in [1/K, 1]. The
/// all-zero vector is treated as perfectly (degenerately) fair.
pub fn jain_index(s: &[f64]) -> f64 {
    assert!(!s.is_empty(), "fairness of an empty population");
    let sum: f64 = s.iter().sum();
    let sum_sq: f64 = s.iter().map(|x| x * x).sum();
    if sum_sq == 0.0 {
        return 1.0;
    }
    sum * sum / (s.len() as f64 * sum_sq)
}

/// Handover-policy-differentiation threshold: the ceil((1-F) K)-th smallest
/// current total SNR, or -inf when every UE counts as well-served (F = 1).
pub fn fairdiff_threshold(s_cur: &[f64], fairness: f64) -> f64 {
    let k = s_cur.len();
    let j = ((1.0 - fairness) * k as f64).ceil() as i64;
    if j < 1 {
        return f64::NEG_INFINITY;
    }
    let mut sorted = s_cur.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted[(j as usize).min(k) - 1]
}

/// Mutable FairDiff state: the threshold and fairness index are refreshed
/// every `1/f_update` blocks.
#[derive(Clone, Debug)]
pub struct FairDiffState {
    pub alpha: f64,
    pub fairness: f64,
    pub gamma1_db: f64,
    pub gamma2_db: f64,
    /// Refresh period in blocks, round(1/f_update).
    pub update_period: u32,
    pub blocks_since_update: u32,
}

impl FairDiffState {
    pub fn new(gamma1_db: f64, gamma2_db: f64, f_update: f64) -> Self {
        let period = (1.0 / f_update).round().max(1.0) as u32;
        FairDiffState {
            alpha: f64::NEG_INFINITY,
            fairness: 1.0,
            gamma1_db,
            gamma2_db,
            update_period: period,
            // Force a refresh at the first decision block.
            blocks_since_update: period,
        }
    }

    fn refresh_if_due(&mut self, s_cur: &[f64], counters: &mut OpCounters) {
        if self.blocks_since_update >= self.update_period {
            self.fairness = jain_index(s_cur);
            self.alpha = fairdiff_threshold(s_cur, self.fairness);
            self.blocks_since_update = 0;
            counters.count(OpKind::FairnessEval, 1);
        }
        self.blocks_since_update += 1;
    }
}

/// FairDiff per-UE rule: poorly-served UEs (current SNR below alpha) hand
/// over on any gain above gamma1; well-served UEs additionally need a
/// gamma2 degradation from their previous SNR.
pub fn fairdiff_decide(
    s_bef: f64,
    s_cur: f64,
    s_new: f64,
    alpha: f64,
    gamma1_db: f64,
    gamma2_db: f64,
) -> bool {
    let improved = s_new > s_cur * db_to_linear(gamma1_db);
    if s_cur < alpha {
        improved
    } else {
        improved && s_cur < s_bef * db_to_linear(-gamma2_db)
    }
}

/// Hysteresis rule: the candidate must beat the previous SNR by delta1 and
/// the current SNR must have degraded below it by delta2.
pub fn hysteresis_decide(s_bef: f64, s_cur: f64, s_new: f64, delta1_db: f64, delta2_db: f64) -> bool {
    s_new > s_bef * db_to_linear(delta1_db) && s_cur < s_bef * db_to_linear(-delta2_db)
}

/// UE-performance-aware rule: hand over on a theta degradation alone.
pub fn upa_decide(s_bef: f64, s_cur: f64, theta_db: f64) -> bool {
    s_cur < s_bef * db_to_linear(-theta_db)
}

/// Scheme parameters from the campaign config.
#[derive(Clone, Copy, Debug)]
pub struct HandoverParams {
    pub gamma1_db: f64,
    pub gamma2_db: f64,
    pub delta1_db: f64,
    pub delta2_db: f64,
    pub theta_db: f64,
    pub dc_penalty: f64,
    pub newton_eps: f64,
    pub f_update: f64,
    pub tau_p: u32,
    pub tau_c: u32,
}

impl Default for HandoverParams {
    fn default() -> Self {
        HandoverParams {
            gamma1_db: 1.0,
            gamma2_db: 1.0,
            delta1_db: 4.0,
            delta2_db: 4.0,
            theta_db: 4.0,
            dc_penalty: 0.1,
            newton_eps: 1e-6,
            f_update: 1.0 / 200.0,
            tau_p: 10,
            tau_c: 200,
        }
    }
}

/// Per-block decision vector plus optimizer diagnostics.
#[derive(Clone, Debug)]
pub struct Decision {
    pub handover: Vec<bool>,
    pub relaxed_x: Vec<Option<f64>>,
    pub newton_iters: u64,
}

/// Dispatches one block of per-UE decisions for the selected scheme.
/// `totals` are the per-UE sums of beta over all APs (the interference
/// denominator of the simplified SINR); `num_aps` scales the SNR-sum
/// operation counters.
pub fn decide_block(
    scheme: Scheme,
    snap: &SnrSnapshot,
    totals: &[f64],
    num_aps: usize,
    params: &HandoverParams,
    fairdiff: &mut FairDiffState,
    counters: &mut OpCounters,
) -> Decision {
    let k = snap.num_ues();
    let m = num_aps as u64;
    counters.count(OpKind::Decision, k as u64);

    let mut decision = Decision {
        handover: vec![false; k],
        relaxed_x: vec![None; k],
        newton_iters: 0,
    };

    match scheme {
        Scheme::Always => {
            decision.handover.fill(true);
        }
        Scheme::NearOpt => {
            counters.count(OpKind::SnrSum, 3 * m * k as u64);
            for (i, &total) in totals.iter().enumerate().take(k) {
                let a = simplified_sinr_from_sums(snap.s_cur[i], total);
                let b = simplified_sinr_from_sums(snap.s_new[i], total);
                let inp =
                    OptimizerInputs::new(a, b, params.dc_penalty, params.tau_p, params.tau_c);
                let out = near_opt_decide(&inp, params.newton_eps);
                decision.handover[i] = out.handover;
                decision.relaxed_x[i] = out.relaxed_x;
                decision.newton_iters += out.newton_iters as u64;
            }
            counters.count(OpKind::NewtonIter, decision.newton_iters);
        }
        Scheme::FairDiff => {
            counters.count(OpKind::SnrSum, 3 * m * k as u64);
            fairdiff.refresh_if_due(&snap.s_cur, counters);
            for i in 0..k {
                decision.handover[i] = fairdiff_decide(
                    snap.s_bef[i],
                    snap.s_cur[i],
                    snap.s_new[i],
                    fairdiff.alpha,
                    fairdiff.gamma1_db,
                    fairdiff.gamma2_db,
                );
            }
        }
        Scheme::Hysteresis => {
            counters.count(OpKind::SnrSum, 3 * m * k as u64);
            for i in 0..k {
                decision.handover[i] = hysteresis_decide(
                    snap.s_bef[i],
                    snap.s_cur[i],
                    snap.s_new[i],
                    params.delta1_db,
                    params.delta2_db,
                );
            }
        }
        Scheme::Upa => {
            counters.count(OpKind::SnrSum, 2 * m * k as u64);
            for i in 0..k {
                decision.handover[i] = upa_decide(snap.s_bef[i], snap.s_cur[i], params.theta_db);
            }
        }
    }
    decision
}

/// Simplified per-block SINR of a serving column:
/// (sum of served SNRs) / (sum of all SNRs - sum of served SNRs + 1).
pub fn simplified_sinr(beta_col: &[f64], d_col: &[bool]) -> f64 {
    assert_eq!(beta_col.len(), d_col.len());
    let total: f64 = beta_col.iter().sum();
    let served: f64 = beta_col
        .iter()
        .zip(d_col)
        .filter(|(_, &d)| d)
        .map(|(b, _)| b)
        .sum();
    simplified_sinr_from_sums(served, total)
}

/// Same contract as [`simplified_sinr`], from precomputed sums.
pub fn simplified_sinr_from_sums(served: f64, total: f64) -> f64 {
    served / (total - served + 1.0)
}
