//! Zeroth-order Bessel function of the first kind.
//!
//! `bessel_j0` backs the channel-aging correlation coefficient. Accuracy
//! contract: absolute error below 1e-8 for |x| <= 50.

/// Switch point between the Maclaurin series and the Hankel asymptotic
/// expansion. The asymptotic series cannot reach 1e-8 below x ~ 10 (its
/// optimally-truncated error is on the order of e^(-2x)), while the f64
/// series keeps cancellation error under 1e-11 up to x = 12.
const SERIES_LIMIT: f64 = 12.0;

/// J0(x) for real x. Even in x; |result| <= 1.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    let y = if ax < SERIES_LIMIT {
        j0_series(ax)
    } else {
        j0_asymptotic(ax)
    };
    y.clamp(-1.0, 1.0)
}

/// Maclaurin series: sum_k (-1)^k (x^2/4)^k / (k!)^2.
fn j0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0f64;
    while term.abs() > 1e-18 {
        term *= -q / (k * k);
        sum += term;
        k += 1.0;
        if k > 200.0 {
            break;
        }
    }
    sum
}

/// Hankel expansion J0(x) ~ sqrt(2/(pi x)) [P(x) cos w - Q(x) sin w],
/// w = x - pi/4, with the exact rational coefficients
/// a_k = ((2k-1)!!)^2 / (k! 8^k) in alternating signs.
fn j0_asymptotic(x: f64) -> f64 {
    let z = 1.0 / (x * x);
    let p = 1.0
        + z * (-9.0 / 128.0
            + z * (11_025.0 / 98_304.0
                + z * (-108_056_025.0 / 188_743_680.0
                    + z * (4_108_830_350_625.0 / 676_457_349_120.0))));
    let q = (1.0 / x)
        * (-0.125
            + z * (75.0 / 1_024.0
                + z * (-893_025.0 / 3_932_160.0 + z * (18_261_468_225.0 / 10_569_646_080.0))));
    let w = x - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}
