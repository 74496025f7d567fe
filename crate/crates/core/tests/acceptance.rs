//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`). Tolerances are pinned in
//! code; seeded trend criteria run the desk-scale reference campaign
//! (M = 308, K = 50, E = 7, Q = 20, v = 3.6 m/s, fast SE model,
//! 20 realizations x 30 s, seed 42).

use cfsim_core::bessel::bessel_j0;
use cfsim_core::channel::AgingProfile;
use cfsim_core::handover::{
    fairdiff_threshold, jain_index, near_opt_decide, OptimizerInputs, Scheme,
};
use cfsim_core::perf::mobility_aware_se;
use cfsim_core::report::percentile_nearest_rank;
use cfsim_core::{run_campaign, AggregateReport, SeModel, SimConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn report_line(id: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {id}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} failed: {detail}");
}

/// Desk-scale reference campaign shared by the trend criteria.
fn desk_scale_config() -> SimConfig {
    SimConfig {
        area_side_m: 750.0,
        num_aps: 308,
        num_ues: 50,
        num_best_aps: 7,
        target_cluster_size: 20,
        speed_mps: 3.6,
        se_model: SeModel::Fast,
        n_realizations: 20,
        duration_s: 30.0,
        seed: 42,
        ..SimConfig::default()
    }
}

fn pooled_se_mobility(report: &AggregateReport, scheme: Scheme) -> Vec<f64> {
    report
        .scheme(scheme)
        .unwrap()
        .cdf_se_mobility
        .iter()
        .map(|&(v, _)| v)
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

// ---------------------------------------------------------------------------
// Criterion 1: Bessel J0 against a quadrature oracle.
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Oracle: J0(x) = (1/pi) ∫_0^pi cos(x sin t) dt by 160-node Gauss-Legendre.
/// Independent of the series/asymptotic implementation path.
fn oracle_j0(x: f64, nodes: &[(f64, f64)]) -> f64 {
    let half = std::f64::consts::FRAC_PI_2;
    let mut sum = 0.0;
    for &(u, w) in nodes {
        let t = half * (u + 1.0);
        sum += w * (x * t.sin()).cos();
    }
    half * sum / std::f64::consts::PI
}

#[test]
fn acceptance_01_bessel_oracle() {
    let nodes = gauss_legendre(160);

    // Oracle self-check against the plain Maclaurin series where the f64
    // series is reliable.
    for i in 0..=80 {
        let x = i as f64 * 0.1;
        let (mut term, mut series, mut k) = (1.0f64, 1.0f64, 1.0f64);
        while term.abs() > 1e-20 {
            term *= -(x * x / 4.0) / (k * k);
            series += term;
            k += 1.0;
        }
        assert!(
            (oracle_j0(x, &nodes) - series).abs() < 1e-12,
            "oracle drift at {x}"
        );
    }

    let start = std::time::Instant::now();
    let mut max_err = 0.0f64;
    for i in 0..1000 {
        let x = 50.0 * i as f64 / 999.0;
        max_err = max_err.max((bessel_j0(x) - oracle_j0(x, &nodes)).abs());
    }
    let elapsed = start.elapsed();
    report_line(
        "01",
        max_err < 1e-8 && elapsed.as_secs_f64() < 1.0,
        &format!("max |J0 - oracle| = {max_err:.3e} over [0, 50] in {elapsed:?}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: static limit.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_02_static_limit() {
    let profile = AgingProfile {
        v_mps: 0.0,
        fc_hz: 2e9,
        t_sa_s: 1e-4,
        tau_p: 10,
    };
    let rho_exact = (0..20_000).all(|t| profile.rho(t) == 1.0);

    let cfg = SimConfig {
        speed_mps: 0.0,
        num_aps: 60,
        num_ues: 8,
        num_best_aps: 3,
        target_cluster_size: 15,
        n_realizations: 2,
        duration_s: 2.0,
        schemes: vec![Scheme::Always],
        ..SimConfig::default()
    };
    let report = run_campaign(&cfg).unwrap();
    let always = report.scheme(Scheme::Always).unwrap();
    let zero_rates = always.mean_h_cluster == 0.0 && always.mean_h_ap == 0.0;
    let se_match = report.per_ue.iter().all(|row| {
        (row.se_mobility - row.se_baseline).abs() <= 1e-12 * row.se_baseline.abs()
    });
    report_line(
        "02",
        rho_exact && zero_rates && se_match,
        &format!(
            "rho==1 for all slots: {rho_exact}; post-attach handover rate {} ; SE == SE' to 1e-12",
            always.mean_h_cluster
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: Newton against direct-evaluation oracle.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_03_newton_oracle_equivalence() {
    const KAPPA: f64 = 190.0 / 200.0;
    let objective = |a: f64, b: f64, c: f64, x: f64| -> f64 {
        KAPPA * (a + x * (b - a) + 1.0).log2() * (1.0 - c * x)
    };
    let derivative = |a: f64, b: f64, c: f64, x: f64| -> f64 {
        let u = a + x * (b - a) + 1.0;
        KAPPA * ((b - a) / (u * std::f64::consts::LN_2) * (1.0 - c * x) - c * u.log2())
    };

    let start = std::time::Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x41CC);
    let mut outside_mismatches = 0usize;
    let mut inside_cases = 0usize;
    let mut inside_mismatches = 0usize;
    let mut classified = 0usize;
    for _ in 0..1000 {
        let a: f64 = rng.random_range(0.0..100.0);
        let b: f64 = rng.random_range(a..=100.0);
        let c: f64 = rng.random_range(0.0..0.5);
        let out = near_opt_decide(&OptimizerInputs::new(a, b, c, 10, 200), 1e-6);

        let f0 = objective(a, b, c, 0.0);
        let f1 = objective(a, b, c, 1.0);
        match out.relaxed_x {
            Some(root) => {
                assert!(
                    derivative(a, b, c, root).abs() < 1e-6,
                    "stationarity violated at root {root} for (A={a}, B={b}, dC={c})"
                );
                if root <= 0.0 || root >= 1.0 {
                    if (f1 - f0).abs() > 1e-12 && out.handover != (f1 > f0) {
                        outside_mismatches += 1;
                    }
                } else {
                    inside_cases += 1;
                    if (f1 - f0).abs() > 1e-12 && out.handover != (f1 > f0) {
                        inside_mismatches += 1;
                    }
                }
            }
            None => classified += 1,
        }
    }
    let elapsed = start.elapsed();
    // The rounding-vs-endpoint mismatch rate for interior roots is recorded,
    // not asserted.
    println!(
        "acceptance 03: interior roots {inside_cases}, rounding mismatches {inside_mismatches}, \
         monotone-classified {classified}"
    );
    report_line(
        "03",
        outside_mismatches == 0 && elapsed.as_secs_f64() < 5.0,
        &format!(
            "1000 seeded instances, {outside_mismatches} argmax mismatches for roots outside (0,1), {elapsed:?}"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: fairness identities.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_04_fairness_identities() {
    let equal = vec![3.7; 17];
    let e1 = (jain_index(&equal) - 1.0).abs();
    let mut one_hot = vec![0.0; 8];
    one_hot[5] = 42.0;
    let e2 = (jain_index(&one_hot) - 1.0 / 8.0).abs();
    let e3 = (jain_index(&[1.0, 2.0, 3.0, 4.0]) - 0.833333).abs();
    report_line(
        "04",
        e1 < 1e-12 && e2 < 1e-12 && e3 < 1e-6,
        &format!("equal err {e1:.2e}, one-hot err {e2:.2e}, [1,2,3,4] err {e3:.2e}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: FairDiff threshold rule.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_05_threshold_rule() {
    let s_cur = [1.0, 2.0, 3.0, 4.0];
    let alpha = fairdiff_threshold(&s_cur, 0.8333);
    let alpha_is_min = alpha == 1.0;

    let alpha_perfect = fairdiff_threshold(&s_cur, 1.0);
    let liberal_count = s_cur.iter().filter(|&&s| s < alpha_perfect).count();
    report_line(
        "05",
        alpha_is_min && liberal_count == 0,
        &format!("alpha(F=0.8333) = {alpha}, liberal-branch count at F=1: {liberal_count}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: mobility-aware SE arithmetic and default delays.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_06_mobility_se_arithmetic() {
    let se = mobility_aware_se(2.0, 1.0, 20.0, 0.1, 0.02);
    let cfg = SimConfig::default();
    report_line(
        "06",
        se == 1.0 && cfg.d_c_s == 0.1 && cfg.d_ap_s == 0.02,
        &format!(
            "SE(2.0, 1/s, 20/s) = {se}; default delays = ({}, {}) s",
            cfg.d_c_s, cfg.d_ap_s
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: seeded trend reproduction at desk scale.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_07_seeded_trends() {
    let start = std::time::Instant::now();
    let report = run_campaign(&desk_scale_config()).unwrap();
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "desk-scale campaign exceeded the 10 min target: {elapsed:?}"
    );

    // (a) always-handover pays the highest cluster handover rate.
    let always_hc = report.scheme(Scheme::Always).unwrap().mean_h_cluster;
    let max_other = Scheme::ALL
        .iter()
        .filter(|&&s| s != Scheme::Always)
        .map(|&s| report.scheme(s).unwrap().mean_h_cluster)
        .fold(f64::NEG_INFINITY, f64::max);
    report_line(
        "07a",
        always_hc > max_other,
        &format!("always h_cluster {always_hc:.4}/s vs best other {max_other:.4}/s"),
    );

    // (b) the optimizing schemes recover mean mobility-aware SE.
    let mean_always = mean(&pooled_se_mobility(&report, Scheme::Always));
    let mean_nearopt = mean(&pooled_se_mobility(&report, Scheme::NearOpt));
    let mean_fairdiff = mean(&pooled_se_mobility(&report, Scheme::FairDiff));
    report_line(
        "07b",
        mean_nearopt >= mean_always && mean_fairdiff >= mean_always,
        &format!(
            "mean se_mobility: nearopt {mean_nearopt:.4}, fairdiff {mean_fairdiff:.4}, always {mean_always:.4}"
        ),
    );

    // (c) hysteresis starves the worst-served UEs: its 95th-percentile UE
    // (the SE exceeded by 95% of UEs, i.e. the lower tail of the SE sample)
    // sits strictly below nearOpt's and FairDiff's.
    let worst_tail = |scheme: Scheme| -> f64 {
        let sorted = pooled_se_mobility(&report, scheme);
        percentile_nearest_rank(&sorted, 5.0)
    };
    let (h, n, f) = (
        worst_tail(Scheme::Hysteresis),
        worst_tail(Scheme::NearOpt),
        worst_tail(Scheme::FairDiff),
    );
    report_line(
        "07c",
        h < n && h < f,
        &format!("worst-served SE: hysteresis {h:.4}, nearopt {n:.4}, fairdiff {f:.4}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: cluster-size trend.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_cluster_size_trend() {
    let report_q20 = run_campaign(&desk_scale_config()).unwrap();
    let report_q34 = run_campaign(&SimConfig {
        target_cluster_size: 34,
        ..desk_scale_config()
    })
    .unwrap();

    let mut all_strictly_lower = true;
    let mut detail = String::new();
    for scheme in Scheme::ALL {
        let at20 = report_q20.scheme(scheme).unwrap().mean_h_cluster;
        let at34 = report_q34.scheme(scheme).unwrap().mean_h_cluster;
        let ok = at34 < at20;
        all_strictly_lower &= ok;
        detail.push_str(&format!(
            "{scheme}: {at20:.5} -> {at34:.5} {}; ",
            if ok { "ok" } else { "NOT strictly lower" }
        ));
    }
    // Margin-based schemes trigger on a >= 4 dB SNR drop within one 20 ms
    // block. With distance-driven path loss and shadowing frozen per
    // realization, a walking-speed UE moves 7.2 cm per block, bounding the
    // one-block change of any per-AP SNR by 35*log10(1.072) ~ 1.06 dB, so
    // hysteresis and UPA perform zero handovers at either cluster size and a
    // strict decrease is unattainable for them.
    report_line("08", all_strictly_lower, &detail);
}

// ---------------------------------------------------------------------------
// Criterion 9: FairDiff update-frequency robustness.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_09_fairdiff_update_frequency() {
    let fairdiff_only = |f_update: f64| SimConfig {
        schemes: vec![Scheme::FairDiff],
        f_update,
        ..desk_scale_config()
    };
    let every_block = run_campaign(&fairdiff_only(1.0)).unwrap();
    let sparse = run_campaign(&fairdiff_only(1.0 / 200.0)).unwrap();
    let m1 = every_block.scheme(Scheme::FairDiff).unwrap().median_se_mobility;
    let m2 = sparse.scheme(Scheme::FairDiff).unwrap().median_se_mobility;
    let rel = (m1 - m2).abs() / m1.abs();
    report_line(
        "09",
        rel < 0.05,
        &format!("median se_mobility {m1:.4} (f=1) vs {m2:.4} (f=1/200), rel diff {rel:.2e}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: counter scaling with M.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_10_counter_scaling() {
    let cfg_for = |num_aps: usize| SimConfig {
        num_aps,
        num_ues: 10,
        num_best_aps: 3,
        target_cluster_size: 10,
        n_realizations: 2,
        duration_s: 2.0,
        schemes: vec![Scheme::Hysteresis, Scheme::Upa, Scheme::FairDiff],
        ..SimConfig::default()
    };
    let small = run_campaign(&cfg_for(100)).unwrap();
    let large = run_campaign(&cfg_for(200)).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for scheme in [Scheme::Hysteresis, Scheme::Upa, Scheme::FairDiff] {
        let per_small = small.scheme(scheme).unwrap().counters.snr_sums_per_decision();
        let per_large = large.scheme(scheme).unwrap().counters.snr_sums_per_decision();
        let ratio = per_large / per_small;
        ok &= (ratio - 2.0).abs() <= 0.1;
        detail.push_str(&format!("{scheme}: x{ratio:.3}; "));
    }
    report_line("10", ok, &detail);
}

// ---------------------------------------------------------------------------
// Criterion 11: campaign determinism, serial and parallel.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_11_determinism() {
    let cfg = SimConfig {
        num_aps: 60,
        num_ues: 6,
        num_best_aps: 3,
        target_cluster_size: 15,
        n_realizations: 3,
        duration_s: 2.0,
        ..SimConfig::default()
    };

    let emit = |report: &AggregateReport| -> Vec<(String, Vec<u8>)> {
        let dir = tempfile::tempdir().unwrap();
        cfsim_core::emit_outputs(report, dir.path()).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };

    let first = emit(&run_campaign(&cfg).unwrap());
    let second = emit(&run_campaign(&cfg).unwrap());

    // Same campaign forced through a single-threaded pool.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let serial = emit(&pool.install(|| run_campaign(&cfg).unwrap()));

    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    let rerun_identical = first == second;
    let serial_identical = first == serial;
    report_line(
        "11",
        rerun_identical && serial_identical && names.len() == 5 + 2,
        &format!(
            "files {names:?}: rerun identical {rerun_identical}, serial == parallel {serial_identical}"
        ),
    );
}
