//! Campaign aggregation and file emission.
//!
//! CDFs pool per-UE samples across realizations (noted in `summary.json`).
//! Percentiles use the nearest-rank definition on the ascending sample.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::campaign::RealizationResult;
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::handover::{jain_index, Scheme};
use crate::perf::OpCounters;

/// Summary statistics and pooled CDFs for one scheme.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeReport {
    pub scheme: Scheme,
    pub median_se_mobility: f64,
    pub p95_se_mobility: f64,
    pub median_se_baseline: f64,
    pub p95_se_baseline: f64,
    pub mean_h_cluster: f64,
    pub mean_h_ap: f64,
    /// Jain index of per-UE mobility-aware SE, averaged over realizations.
    pub mean_fairness: f64,
    pub mean_serving_set_size: f64,
    pub counters: OpCounters,
    #[serde(skip)]
    pub cdf_se_mobility: Vec<(f64, f64)>,
    #[serde(skip)]
    pub cdf_se_baseline: Vec<(f64, f64)>,
}

/// One row of `per_ue.csv`.
#[derive(Clone, Debug)]
pub struct PerUeRow {
    pub realization: usize,
    pub ue: usize,
    pub scheme: Scheme,
    pub se_mobility: f64,
    pub se_baseline: f64,
    pub h_cluster: f64,
    pub h_ap: f64,
}

#[derive(Clone, Debug)]
pub struct AggregateReport {
    pub config: SimConfig,
    pub q_avg: f64,
    pub distance_clamps: u64,
    pub warnings: Vec<String>,
    pub schemes: Vec<SchemeReport>,
    pub per_ue: Vec<PerUeRow>,
}

/// Nearest-rank percentile of an ascending-sorted sample:
/// the ceil(p/100 * n)-th smallest value.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let n = sorted.len();
    let rank = ((p / 100.0 * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Empirical CDF points of a pooled sample: (value, fraction at or below).
pub fn empirical_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, (i + 1) as f64 / n))
        .collect()
}

impl AggregateReport {
    pub fn build(
        config: SimConfig,
        results: &[RealizationResult],
        warnings: Vec<String>,
    ) -> AggregateReport {
        let mut per_ue = Vec::new();
        for result in results {
            for scheme_run in &result.schemes {
                for (ue, metrics) in scheme_run.per_ue.iter().enumerate() {
                    per_ue.push(PerUeRow {
                        realization: result.index,
                        ue,
                        scheme: scheme_run.scheme,
                        se_mobility: metrics.se_mobility,
                        se_baseline: metrics.se_baseline_avg,
                        h_cluster: metrics.h_cluster,
                        h_ap: metrics.h_ap,
                    });
                }
            }
        }

        let schemes = config
            .schemes
            .iter()
            .enumerate()
            .map(|(si, &scheme)| {
                let mut se_mob = Vec::new();
                let mut se_base = Vec::new();
                let mut h_cluster_sum = 0.0;
                let mut h_ap_sum = 0.0;
                let mut fairness_sum = 0.0;
                let mut serving_sum = 0.0;
                let mut counters = OpCounters::default();
                for result in results {
                    let run = &result.schemes[si];
                    debug_assert_eq!(run.scheme, scheme);
                    let mob: Vec<f64> = run.per_ue.iter().map(|u| u.se_mobility).collect();
                    fairness_sum += jain_index(&mob);
                    se_mob.extend_from_slice(&mob);
                    se_base.extend(run.per_ue.iter().map(|u| u.se_baseline_avg));
                    h_cluster_sum += run.per_ue.iter().map(|u| u.h_cluster).sum::<f64>();
                    h_ap_sum += run.per_ue.iter().map(|u| u.h_ap).sum::<f64>();
                    serving_sum += run.mean_serving_size;
                    counters.merge(&run.counters);
                }
                let n_r = results.len() as f64;
                let n_samples = se_mob.len() as f64;
                let cdf_se_mobility = empirical_cdf(&se_mob);
                let cdf_se_baseline = empirical_cdf(&se_base);
                let sorted_mob: Vec<f64> = cdf_se_mobility.iter().map(|&(v, _)| v).collect();
                let sorted_base: Vec<f64> = cdf_se_baseline.iter().map(|&(v, _)| v).collect();
                SchemeReport {
                    scheme,
                    median_se_mobility: percentile_nearest_rank(&sorted_mob, 50.0),
                    p95_se_mobility: percentile_nearest_rank(&sorted_mob, 95.0),
                    median_se_baseline: percentile_nearest_rank(&sorted_base, 50.0),
                    p95_se_baseline: percentile_nearest_rank(&sorted_base, 95.0),
                    mean_h_cluster: h_cluster_sum / n_samples,
                    mean_h_ap: h_ap_sum / n_samples,
                    mean_fairness: fairness_sum / n_r,
                    mean_serving_set_size: serving_sum / n_r,
                    counters,
                    cdf_se_mobility,
                    cdf_se_baseline,
                }
            })
            .collect();

        AggregateReport {
            q_avg: results[0].q_avg,
            distance_clamps: results.iter().map(|r| r.distance_clamps).sum(),
            config,
            warnings,
            schemes,
            per_ue,
        }
    }

    pub fn scheme(&self, scheme: Scheme) -> Option<&SchemeReport> {
        self.schemes.iter().find(|s| s.scheme == scheme)
    }
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    seed: u64,
    q_avg: f64,
    cdf_pooling: &'static str,
    distance_clamps: u64,
    warnings: &'a [String],
    schemes: &'a [SchemeReport],
    config: &'a SimConfig,
}

/// Writes `summary.json`, `per_ue.csv`, and one `cdf_<scheme>.csv` per
/// scheme into `out_dir`. Re-running with the same seed and config produces
/// byte-identical files.
pub fn emit_outputs(report: &AggregateReport, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let summary_path = out_dir.join("summary.json");
    let doc = SummaryDoc {
        seed: report.config.seed,
        q_avg: report.q_avg,
        cdf_pooling: "per-UE samples pooled across realizations",
        distance_clamps: report.distance_clamps,
        warnings: &report.warnings,
        schemes: &report.schemes,
        config: &report.config,
    };
    let json = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Config(format!("summary serialization: {e}")))?;
    write_file(&summary_path, json.as_bytes())?;

    let mut per_ue = String::from("realization,ue,scheme,se_mobility,se_baseline,h_cluster,h_ap\n");
    for row in &report.per_ue {
        per_ue.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.realization,
            row.ue,
            row.scheme,
            row.se_mobility,
            row.se_baseline,
            row.h_cluster,
            row.h_ap
        ));
    }
    write_file(&out_dir.join("per_ue.csv"), per_ue.as_bytes())?;

    for scheme_report in &report.schemes {
        let mut body = String::from("se_bits_s_hz,cdf\n");
        for &(v, c) in &scheme_report.cdf_se_mobility {
            body.push_str(&format!("{v},{c}\n"));
        }
        let path = out_dir.join(format!("cdf_{}.csv", scheme_report.scheme));
        write_file(&path, body.as_bytes())?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}
