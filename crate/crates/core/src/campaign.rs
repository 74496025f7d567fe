//! Seeded Monte Carlo campaign execution.
//!
//! Per block: update positions, recompute SNRs, build candidate serving sets,
//! dispatch the configured handover schemes, commit decisions, and score SE
//! and cluster changes. Every scheme inside a realization sees identical
//! topology, walks, shadowing, and fading draws, so scheme comparisons are
//! paired. The whole campaign is a pure function of (config, seed).

use nalgebra::DMatrix;
use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channel::{
    estimate_variance, snr_matrix, AgingProfile, FadingState, LargeScale, PathLossParams,
};
use crate::config::{SeModel, SimConfig};
use crate::error::{Error, Result};
use crate::handover::{
    decide_block, simplified_sinr_from_sums, FairDiffState, Scheme, SnrSnapshot,
};
use crate::mobility::{generate_rwp_trace, load_traces, UeTrace};
use crate::perf::{
    baseline_se_block, combine_precode, handover_rates, mobility_aware_se, sinr_full,
    BlockMetrics, LinkDirection, OpCounters, OpKind, RunMetrics,
};
use crate::report::AggregateReport;
use crate::rng::{domain, substream};
use crate::serving::{
    apply_decision, candidate_set, count_cluster_changes, CooperationMatrix, ServingSet,
};
use crate::topology::{assign_square_clusters, generate_uniform_topology, load_topology, Topology};

/// Where each realization's AP layout comes from.
enum TopologySource {
    /// A file-loaded layout, shared (clustered once) by all realizations.
    File(Topology),
    /// Fresh uniform placement per realization.
    Uniform,
}

/// Metrics of one scheme over one realization.
#[derive(Clone, Debug)]
pub struct SchemeRealization {
    pub scheme: Scheme,
    pub per_ue: Vec<RunMetrics>,
    pub counters: OpCounters,
    /// Time-averaged serving-set size G.
    pub mean_serving_size: f64,
}

/// All schemes of one realization, evaluated on identical draws.
#[derive(Clone, Debug)]
pub struct RealizationResult {
    pub index: usize,
    pub schemes: Vec<SchemeRealization>,
    pub q_avg: f64,
    pub distance_clamps: u64,
}

/// Per-cluster sums of one UE's SNR column.
pub fn per_cluster_sums_col(beta_col: &[f64], topo: &Topology) -> Vec<f64> {
    let mut sums = vec![0.0; topo.num_clusters()];
    for (m, &b) in beta_col.iter().enumerate() {
        sums[topo.cluster_of[m] as usize] += b;
    }
    sums
}

struct SchemeState {
    scheme: Scheme,
    coop: CooperationMatrix,
    fairdiff: FairDiffState,
    counters: OpCounters,
    se_sum: Vec<f64>,
    cluster_changes: Vec<u64>,
    serving_size_sum: f64,
}

impl SchemeState {
    fn accumulate(&mut self, block: &BlockMetrics, topo: &Topology) {
        for (ue, se) in block.se_baseline.iter().enumerate() {
            self.se_sum[ue] += se;
        }
        for (ue, &n) in block.n_clusters_changed.iter().enumerate() {
            self.cluster_changes[ue] += n as u64;
        }
        self.serving_size_sum += self.coop.avg_serving_size(topo);
    }
}

/// Per-block large-scale snapshot shared by all schemes.
struct BlockChannel {
    large_scale: LargeScale,
    /// Per-UE column copies of beta, M entries each.
    beta_cols: Vec<Vec<f64>>,
    /// Per-UE per-cluster sums of beta.
    cluster_sums: Vec<Vec<f64>>,
    /// Per-UE total SNR over all APs.
    totals: Vec<f64>,
}

impl BlockChannel {
    fn compute(
        topo: &Topology,
        positions: &[(f64, f64)],
        ue_height: f64,
        p_w: f64,
        n0_w: f64,
        shadow_z: &DMatrix<f64>,
        pl: &PathLossParams,
    ) -> Self {
        let large_scale = snr_matrix(topo, positions, ue_height, p_w, n0_w, shadow_z, pl);
        let k = positions.len();
        let mut beta_cols = Vec::with_capacity(k);
        let mut cluster_sums = Vec::with_capacity(k);
        let mut totals = Vec::with_capacity(k);
        for kk in 0..k {
            let col: Vec<f64> = large_scale.beta.column(kk).iter().copied().collect();
            cluster_sums.push(per_cluster_sums_col(&col, topo));
            totals.push(col.iter().sum());
            beta_cols.push(col);
        }
        BlockChannel {
            large_scale,
            beta_cols,
            cluster_sums,
            totals,
        }
    }
}

/// Runs one realization: deterministic given (config, realization index).
pub fn run_realization(cfg: &SimConfig, index: usize) -> Result<RealizationResult> {
    let source = prepare_topology_source(cfg)?;
    let traces = prepare_shared_traces(cfg)?;
    run_realization_prepared(cfg, &source, traces.as_deref(), index)
}

fn prepare_topology_source(cfg: &SimConfig) -> Result<TopologySource> {
    match &cfg.topology_path {
        Some(path) => {
            let topo = load_topology(path, cfg.area_side_m)?;
            if cfg.num_best_aps > topo.num_aps() {
                return Err(Error::Config(format!(
                    "num_best_aps ({}) exceeds the {} APs in {}",
                    cfg.num_best_aps,
                    topo.num_aps(),
                    path.display()
                )));
            }
            Ok(TopologySource::File(assign_square_clusters(
                topo,
                cfg.target_cluster_size,
            )?))
        }
        None => Ok(TopologySource::Uniform),
    }
}

fn prepare_shared_traces(cfg: &SimConfig) -> Result<Option<Vec<UeTrace>>> {
    let Some(path) = &cfg.traces_path else {
        return Ok(None);
    };
    let traces = load_traces(path, cfg.block_duration_s(), cfg.area_side_m)?;
    if traces.len() < cfg.num_ues {
        return Err(Error::Config(format!(
            "trace file provides {} UEs, config needs {}",
            traces.len(),
            cfg.num_ues
        )));
    }
    let needed = cfg.num_blocks();
    for (i, t) in traces.iter().take(cfg.num_ues).enumerate() {
        if t.num_blocks() < needed {
            return Err(Error::Config(format!(
                "trace {i} covers {} blocks, campaign needs {needed}",
                t.num_blocks()
            )));
        }
    }
    Ok(Some(traces.into_iter().take(cfg.num_ues).collect()))
}

fn realization_topology(
    cfg: &SimConfig,
    source: &TopologySource,
    index: usize,
) -> Result<Topology> {
    match source {
        TopologySource::File(t) => Ok(t.clone()),
        TopologySource::Uniform => {
            let mut rng = substream(cfg.seed, &[domain::TOPOLOGY, index as u64]);
            let topo =
                generate_uniform_topology(cfg.area_side_m, cfg.num_aps, cfg.ap_height_m, &mut rng)?;
            assign_square_clusters(topo, cfg.target_cluster_size)
        }
    }
}

fn realization_traces(
    cfg: &SimConfig,
    shared: Option<&[UeTrace]>,
    index: usize,
) -> Result<Vec<UeTrace>> {
    if let Some(traces) = shared {
        return Ok(traces.to_vec());
    }
    let num_blocks = cfg.num_blocks();
    (0..cfg.num_ues)
        .map(|ue| {
            let mut rng = substream(cfg.seed, &[domain::TRACE, index as u64, ue as u64]);
            generate_rwp_trace(
                cfg.area_side_m,
                cfg.speed_mps,
                num_blocks,
                cfg.block_duration_s(),
                cfg.rwp_transition_scale_m,
                &mut rng,
            )
        })
        .collect()
}

fn run_realization_prepared(
    cfg: &SimConfig,
    source: &TopologySource,
    shared_traces: Option<&[UeTrace]>,
    index: usize,
) -> Result<RealizationResult> {
    let topo = realization_topology(cfg, source, index)?;
    let traces = realization_traces(cfg, shared_traces, index)?;
    let num_blocks = cfg.num_blocks();
    let k = cfg.num_ues;
    let (p_w, n0_w) = (cfg.tx_power_w(), cfg.noise_w());
    let pl = cfg.pathloss_params();
    let ho_params = cfg.handover_params();
    let aging = AgingProfile {
        v_mps: cfg.speed_mps,
        fc_hz: cfg.fc_hz,
        t_sa_s: cfg.t_sa_s,
        tau_p: cfg.tau_p,
    };

    let shadow_z = {
        let mut rng = substream(cfg.seed, &[domain::SHADOWING, index as u64]);
        DMatrix::from_fn(topo.num_aps(), k, |_, _| StandardNormal.sample(&mut rng))
    };

    let mut states: Vec<SchemeState> = cfg
        .schemes
        .iter()
        .map(|&scheme| SchemeState {
            scheme,
            coop: CooperationMatrix::new(vec![ServingSet::default(); k]),
            fairdiff: FairDiffState::new(cfg.gamma1_db, cfg.gamma2_db, cfg.f_update),
            counters: OpCounters::default(),
            se_sum: vec![0.0; k],
            cluster_changes: vec![0; k],
            serving_size_sum: 0.0,
        })
        .collect();
    let mut distance_clamps = 0u64;

    let mut prev_cluster_sums: Vec<Vec<f64>> = Vec::new();
    let mut positions = vec![(0.0, 0.0); k];
    for block in 0..num_blocks {
        for (ue, trace) in traces.iter().enumerate() {
            positions[ue] = trace.positions[block];
        }
        let chan = BlockChannel::compute(
            &topo,
            &positions,
            cfg.ue_height_m,
            p_w,
            n0_w,
            &shadow_z,
            &pl,
        );
        distance_clamps += chan.large_scale.distance_clamps;

        let candidates: Vec<ServingSet> = (0..k)
            .map(|ue| candidate_set(&chan.beta_cols[ue], &topo, cfg.num_best_aps))
            .collect();
        let s_new: Vec<f64> = (0..k)
            .map(|ue| candidates[ue].sum_over(&chan.cluster_sums[ue]))
            .collect();

        let direction = LinkDirection::for_block(block as u64 + 1);
        let full_ctx = match cfg.se_model {
            SeModel::Fast => None,
            SeModel::Full => Some(FullBlockContext::prepare(cfg, &chan, &aging, index, block)?),
        };

        for state in &mut states {
            let n_clusters_changed = if block == 0 {
                // Initial attach: every scheme adopts the candidate set;
                // not a handover.
                state.coop = CooperationMatrix::new(candidates.clone());
                vec![0; k]
            } else {
                let snap = SnrSnapshot {
                    s_bef: (0..k)
                        .map(|ue| state.coop.sets[ue].sum_over(&prev_cluster_sums[ue]))
                        .collect(),
                    s_cur: (0..k)
                        .map(|ue| state.coop.sets[ue].sum_over(&chan.cluster_sums[ue]))
                        .collect(),
                    s_new: s_new.clone(),
                };
                let decision = decide_block(
                    state.scheme,
                    &snap,
                    &chan.totals,
                    topo.num_aps(),
                    &ho_params,
                    &mut state.fairdiff,
                    &mut state.counters,
                );
                let changed = candidates
                    .iter()
                    .enumerate()
                    .map(|(ue, cand)| {
                        if decision.handover[ue] {
                            count_cluster_changes(&state.coop.sets[ue], cand) as u32
                        } else {
                            0
                        }
                    })
                    .collect();
                let previous =
                    std::mem::replace(&mut state.coop, CooperationMatrix::new(Vec::new()));
                state.coop = apply_decision(previous, &candidates, &decision.handover);
                changed
            };

            let se_baseline = match &full_ctx {
                None => fast_block_se(cfg, &state.coop, &chan)?,
                Some(ctx) => ctx.block_se(cfg, &topo, &state.coop, p_w, n0_w)?,
            };
            state.accumulate(
                &BlockMetrics {
                    se_baseline,
                    n_clusters_changed,
                    direction,
                },
                &topo,
            );
        }

        prev_cluster_sums = chan.cluster_sums;
    }

    let schemes = states
        .into_iter()
        .map(|mut state| {
            let mut per_ue = Vec::with_capacity(k);
            for ue in 0..k {
                let se_avg = state.se_sum[ue] / num_blocks as f64;
                let (h_cluster, h_ap) =
                    handover_rates(state.cluster_changes[ue], topo.q_avg, cfg.duration_s);
                if cfg.d_c_s * h_cluster + cfg.d_ap_s * h_ap > 1.0 {
                    state.counters.count(OpKind::OutageClamp, 1);
                }
                per_ue.push(RunMetrics {
                    se_baseline_avg: se_avg,
                    h_cluster,
                    h_ap,
                    se_mobility: mobility_aware_se(se_avg, h_cluster, h_ap, cfg.d_c_s, cfg.d_ap_s),
                });
            }
            SchemeRealization {
                scheme: state.scheme,
                per_ue,
                counters: state.counters,
                mean_serving_size: state.serving_size_sum / num_blocks as f64,
            }
        })
        .collect();

    Ok(RealizationResult {
        index,
        schemes,
        q_avg: topo.q_avg,
        distance_clamps,
    })
}

/// Fast-mode block SE: simplified SINR of each UE's committed serving set.
fn fast_block_se(
    cfg: &SimConfig,
    coop: &CooperationMatrix,
    chan: &BlockChannel,
) -> Result<Vec<f64>> {
    coop.sets
        .iter()
        .enumerate()
        .map(|(ue, set)| {
            let served = set.sum_over(&chan.cluster_sums[ue]);
            let sinr = simplified_sinr_from_sums(served, chan.totals[ue]);
            baseline_se_block(&[sinr], cfg.tau_c, cfg.tau_p)
        })
        .collect()
}

/// Full-model per-block state shared by all schemes: block-start fading,
/// estimates, and the sampled slots' aging coefficients. Slot-level fading
/// draws come from substreams keyed by (realization, block, slot), so every
/// scheme consumes identical randomness.
struct FullBlockContext {
    fading: FadingState,
    estimates: DMatrix<Complex<f64>>,
    /// (slot substream key, aging coefficient) per sampled slot.
    slots: Vec<(u64, f64)>,
    direction: LinkDirection,
    seed: u64,
    realization: u64,
    block: u64,
}

impl FullBlockContext {
    fn prepare(
        cfg: &SimConfig,
        chan: &BlockChannel,
        aging: &AgingProfile,
        realization: usize,
        block: usize,
    ) -> Result<Self> {
        let mut rng = substream(
            cfg.seed,
            &[domain::FADING_BLOCK, realization as u64, block as u64],
        );
        let fading = FadingState::draw(&chan.large_scale, &mut rng);
        let estimates = block_estimates(&fading, &chan.large_scale, cfg.tx_power_w(), cfg.noise_w())?;

        // Sampled slots across the data span, tau_p + 1 .. tau_c.
        let mut slots = Vec::new();
        let mut t = cfg.tau_p + 1;
        while t <= cfg.tau_c {
            slots.push((slots.len() as u64, aging.rho(t)));
            t += cfg.slot_decimation;
        }
        Ok(FullBlockContext {
            fading,
            estimates,
            slots,
            direction: LinkDirection::for_block(block as u64 + 1),
            seed: cfg.seed,
            realization: realization as u64,
            block: block as u64,
        })
    }

    fn block_se(
        &self,
        cfg: &SimConfig,
        topo: &Topology,
        coop: &CooperationMatrix,
        p_w: f64,
        n0_w: f64,
    ) -> Result<Vec<f64>> {
        let k = coop.num_ues();
        let combiners = combine_precode(&self.estimates, &coop.sets, topo, p_w, n0_w);
        let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(self.slots.len()); k];
        for &(slot, rho) in &self.slots {
            let mut rng = substream(
                self.seed,
                &[domain::FADING_SLOT, self.realization, self.block, slot],
            );
            let sinr = sinr_full(
                &self.fading,
                &combiners,
                rho,
                self.direction,
                p_w,
                n0_w,
                cfg.n_fading_samples,
                &mut rng,
            )?;
            for (ue, s) in sinr.into_iter().enumerate() {
                samples[ue].push(s);
            }
        }
        samples
            .iter()
            .map(|slots| baseline_se_block(slots, cfg.tau_c, cfg.tau_p))
            .collect()
    }
}

/// Per-block channel estimates: the block-start channel scaled by the MMSE
/// estimate quality sqrt(Z/R) (capped at 1). Pilots are assumed
/// contamination-free, so each UE's pilot set is just itself.
fn block_estimates(
    fading: &FadingState,
    large_scale: &LargeScale,
    p_w: f64,
    n0_w: f64,
) -> Result<DMatrix<Complex<f64>>> {
    let (m, k) = fading.h0.shape();
    let mut est = DMatrix::zeros(m, k);
    for kk in 0..k {
        for mm in 0..m {
            let beta = large_scale.beta[(mm, kk)];
            let z = estimate_variance(1.0, beta, p_w, n0_w, &[beta])?;
            let r = fading.r[(mm, kk)];
            let c = (z / r).sqrt().min(1.0);
            est[(mm, kk)] = fading.h0[(mm, kk)] * c;
        }
    }
    Ok(est)
}

/// Runs the whole campaign: realizations in parallel on independent
/// substreams, aggregation in realization order.
pub fn run_campaign(cfg: &SimConfig) -> Result<AggregateReport> {
    cfg.validate()?;
    let source = prepare_topology_source(cfg)?;
    let shared_traces = prepare_shared_traces(cfg)?;

    let mut warnings = Vec::new();
    if let TopologySource::File(t) = &source {
        if cfg.target_cluster_size > t.num_aps() {
            warnings.push(format!(
                "target_cluster_size {} exceeds the AP count {}; using a single cluster",
                cfg.target_cluster_size,
                t.num_aps()
            ));
        }
    } else if cfg.target_cluster_size > cfg.num_aps {
        warnings.push(format!(
            "target_cluster_size {} exceeds num_aps {}; using a single cluster",
            cfg.target_cluster_size, cfg.num_aps
        ));
    }
    if cfg.se_model == SeModel::Fast {
        warnings.push(
            "se_model = fast scores SE with the simplified SINR instead of the full signal model"
                .into(),
        );
    }

    let results: Result<Vec<RealizationResult>> = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|r| run_realization_prepared(cfg, &source, shared_traces.as_deref(), r))
        .collect();
    let results = results?;
    if results.is_empty() {
        return Err(Error::EmptyCampaign);
    }

    Ok(AggregateReport::build(cfg.clone(), &results, warnings))
}
