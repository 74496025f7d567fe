//! Large-scale channel model, Rayleigh block fading with aging, and MMSE
//! estimate variances.
//!
//! Path loss follows the Hata-COST231 three-slope log-distance form with
//! breakpoints at 10 m and 50 m and a far-slope exponent of 3.5; every
//! constant is configurable. Shadowing draws are frozen per (AP, UE) within a
//! realization, so scheme comparisons see identical channels.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bessel::bessel_j0;
use crate::error::{Error, Result};
use crate::topology::{Point3, Topology};
use crate::units::SPEED_OF_LIGHT_M_S;

/// Constants of the three-slope path-loss model plus the shadowing deviation.
#[derive(Clone, Copy, Debug)]
pub struct PathLossParams {
    pub fc_hz: f64,
    pub ap_height_m: f64,
    pub ue_height_m: f64,
    /// Near breakpoint d0; loss is distance-independent below it.
    pub breakpoint_near_m: f64,
    /// Far breakpoint d1; the far slope applies beyond it.
    pub breakpoint_far_m: f64,
    pub exponent_mid: f64,
    pub exponent_far: f64,
    pub shadow_sigma_db: f64,
}

impl PathLossParams {
    /// COST231-Hata intercept in dB at 1 km, from carrier frequency and
    /// antenna heights.
    pub fn intercept_db(&self) -> f64 {
        let f_mhz = self.fc_hz / 1e6;
        let lf = f_mhz.log10();
        46.3 + 33.9 * lf - 13.82 * self.ap_height_m.log10() - (1.1 * lf - 0.7) * self.ue_height_m
            + (1.56 * lf - 0.8)
    }
}

impl Default for PathLossParams {
    fn default() -> Self {
        PathLossParams {
            fc_hz: 2e9,
            ap_height_m: 10.0,
            ue_height_m: 1.0,
            breakpoint_near_m: 10.0,
            breakpoint_far_m: 50.0,
            exponent_mid: 2.0,
            exponent_far: 3.5,
            shadow_sigma_db: 8.0,
        }
    }
}

/// Median path loss in dB at 3D distance `d_m` meters (no shadowing).
pub fn three_slope_db(d_m: f64, params: &PathLossParams) -> f64 {
    let a = params.intercept_db();
    let d_km = d_m / 1000.0;
    let d0_km = params.breakpoint_near_m / 1000.0;
    let d1_km = params.breakpoint_far_m / 1000.0;
    let far = 10.0 * params.exponent_far;
    let mid = 10.0 * params.exponent_mid;
    if d_m > params.breakpoint_far_m {
        a + far * d_km.log10()
    } else if d_m > params.breakpoint_near_m {
        a + (far - mid) * d1_km.log10() + mid * d_km.log10()
    } else {
        a + (far - mid) * d1_km.log10() + mid * d0_km.log10()
    }
}

/// Linear path-loss factor between an AP and a UE for a frozen shadowing
/// draw `shadow_z` (standard normal). Distances below 1 m are clamped;
/// [`snr_matrix`] reports how often that happened.
pub fn path_loss(ap: &Point3, ue: &Point3, shadow_z: f64, params: &PathLossParams) -> f64 {
    let d = ap.distance(ue).max(1.0);
    let db = three_slope_db(d, params) + params.shadow_sigma_db * shadow_z;
    10f64.powf(db / 10.0)
}

/// Per-block large-scale state: linear path losses and average SNRs for
/// every AP-UE pair.
#[derive(Clone, Debug)]
pub struct LargeScale {
    /// Linear path-loss factors, M x K.
    pub l: DMatrix<f64>,
    /// Average linear SNRs beta = p / (L * n0), M x K.
    pub beta: DMatrix<f64>,
    /// AP-UE pairs whose 3D distance was clamped to 1 m.
    pub distance_clamps: u64,
}

/// Computes the beta matrix for the given UE positions using frozen
/// shadowing draws (`shadow_z`, M x K standard normals).
pub fn snr_matrix(
    topo: &Topology,
    ue_positions: &[(f64, f64)],
    ue_height_m: f64,
    tx_power_w: f64,
    noise_w: f64,
    shadow_z: &DMatrix<f64>,
    params: &PathLossParams,
) -> LargeScale {
    let m = topo.num_aps();
    let k = ue_positions.len();
    assert_eq!(shadow_z.nrows(), m, "shadowing rows must match AP count");
    assert_eq!(shadow_z.ncols(), k, "shadowing cols must match UE count");

    let mut l = DMatrix::zeros(m, k);
    let mut beta = DMatrix::zeros(m, k);
    let mut clamps = 0u64;
    for (kk, &(x, y)) in ue_positions.iter().enumerate() {
        let ue = Point3::new(x, y, ue_height_m);
        for mm in 0..m {
            let ap = &topo.ap_positions[mm];
            if ap.distance(&ue) < 1.0 {
                clamps += 1;
            }
            let loss = path_loss(ap, &ue, shadow_z[(mm, kk)], params);
            l[(mm, kk)] = loss;
            beta[(mm, kk)] = tx_power_w / (loss * noise_w);
        }
    }
    LargeScale {
        l,
        beta,
        distance_clamps: clamps,
    }
}

/// Channel-aging profile: correlation between the block-start measurement
/// and the channel at a later slot.
#[derive(Clone, Copy, Debug)]
pub struct AgingProfile {
    pub v_mps: f64,
    pub fc_hz: f64,
    pub t_sa_s: f64,
    pub tau_p: u32,
}

impl AgingProfile {
    /// rho[t] = J0(2 pi (v fc / c) T_sa (t - tau_p - 1)) for the within-block
    /// slot index `t`. Equals 1 at the first data slot and for v = 0.
    pub fn rho(&self, t: u32) -> f64 {
        let lag = t as f64 - self.tau_p as f64 - 1.0;
        aging_coefficient(self.v_mps, self.fc_hz, self.t_sa_s, lag)
    }
}

/// Aging correlation at a slot lag (even in the lag).
pub fn aging_coefficient(v_mps: f64, fc_hz: f64, t_sa_s: f64, lag_slots: f64) -> f64 {
    let arg = std::f64::consts::TAU * (v_mps * fc_hz / SPEED_OF_LIGHT_M_S) * t_sa_s * lag_slots;
    bessel_j0(arg)
}

/// Evolves a block-start channel coefficient to a later slot:
/// h[t] = rho h0 + sqrt(1 - rho^2) g with g ~ CN(0, r_variance).
pub fn evolve_channel(
    h0: Complex<f64>,
    rho: f64,
    r_variance: f64,
    rng: &mut impl Rng,
) -> Result<Complex<f64>> {
    if rho.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "correlation must lie in [-1, 1], got {rho}"
        )));
    }
    if rho == 1.0 {
        return Ok(h0);
    }
    let g = complex_normal(r_variance, rng);
    Ok(h0 * rho + g * (1.0 - rho * rho).sqrt())
}

/// Draws CN(0, variance): independent real and imaginary parts with
/// variance/2 each.
pub fn complex_normal(variance: f64, rng: &mut impl Rng) -> Complex<f64> {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re * s, im * s)
}

/// Block-start fading state: h0 ~ CN(0, R) per AP-UE pair, R = 1/L.
#[derive(Clone, Debug)]
pub struct FadingState {
    pub h0: DMatrix<Complex<f64>>,
    pub r: DMatrix<f64>,
}

impl FadingState {
    pub fn draw(large_scale: &LargeScale, rng: &mut impl Rng) -> Self {
        let (m, k) = large_scale.l.shape();
        let r = large_scale.l.map(|l| 1.0 / l);
        let h0 = DMatrix::from_fn(m, k, |mm, kk| complex_normal(r[(mm, kk)], rng));
        FadingState { h0, r }
    }

    /// Draws the whole aged channel matrix at correlation `rho`.
    pub fn aged(&self, rho: f64, rng: &mut impl Rng) -> Result<DMatrix<Complex<f64>>> {
        let (m, k) = self.h0.shape();
        let mut h = DMatrix::zeros(m, k);
        for kk in 0..k {
            for mm in 0..m {
                h[(mm, kk)] = evolve_channel(self.h0[(mm, kk)], rho, self.r[(mm, kk)], rng)?;
            }
        }
        Ok(h)
    }
}

/// MMSE estimate variance, evaluated exactly as
/// Z = rho^2 beta^2 n0 / (p sum_{i in pilot set} beta_i n0 + p).
pub fn estimate_variance(
    rho_pilot: f64,
    beta: f64,
    p_w: f64,
    n0_w: f64,
    pilot_set_betas: &[f64],
) -> Result<f64> {
    if pilot_set_betas.is_empty() {
        return Err(Error::InvalidArgument("pilot set must not be empty".into()));
    }
    let denom: f64 = p_w * pilot_set_betas.iter().map(|b| b * n0_w).sum::<f64>() + p_w;
    Ok(rho_pilot * rho_pilot * beta * beta * n0_w / denom)
}
