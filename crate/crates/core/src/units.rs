//! Small unit-conversion helpers (dB, dBm, noise power).

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Boltzmann constant in J/K.
pub const BOLTZMANN_J_K: f64 = 1.380_649e-23;

/// Reference temperature for thermal noise, in kelvin.
pub const NOISE_REFERENCE_K: f64 = 290.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Thermal noise power in watts over `bandwidth_hz` with the given receiver
/// noise figure.
pub fn noise_power_w(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    BOLTZMANN_J_K * NOISE_REFERENCE_K * bandwidth_hz * db_to_linear(noise_figure_db)
}
