use core::f64::consts::PI;

use super::BoundsError;

/// Positive root of `α² − (n+2)α − 4 = 0`, where the two branches of
/// [`big_a`] meet.
pub fn alpha_threshold(n: usize) -> f64 {
    let m = n as f64 + 2.0;
    (m + libm::sqrt(m * m + 16.0)) / 2.0
}

/// `L = {4 + (n+2)α − α²} n² / (4 (n+α)²)`, positive below
/// [`alpha_threshold`].
pub fn big_l(n: usize, alpha: f64) -> Result<f64, BoundsError> {
    let threshold = alpha_threshold(n);
    if alpha >= threshold {
        return Err(BoundsError::AlphaAboveThreshold { n, alpha, threshold });
    }
    Ok(l_unchecked(n, alpha))
}

fn l_unchecked(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    (4.0 + (nf + 2.0) * alpha - alpha * alpha) * nf * nf / (4.0 * (nf + alpha) * (nf + alpha))
}

/// `A(n, α)`: `4 + α²` at or above the threshold, `(8 + (n+2)α)/(1 + L)`
/// below it.
pub fn big_a(n: usize, alpha: f64) -> f64 {
    if alpha >= alpha_threshold(n) {
        4.0 + alpha * alpha
    } else {
        (8.0 + (n as f64 + 2.0) * alpha) / (1.0 + l_unchecked(n, alpha))
    }
}

/// `C(n, α) = min{4(n+α)/n², A(n,α)/(n+α)}`, the coefficient of the
/// Yang-type inequality.
pub fn coefficient_c(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let first = 4.0 * (nf + alpha) / (nf * nf);
    let second = big_a(n, alpha) / (nf + alpha);
    first.min(second)
}

/// `max{4 + α², (n+2)α + 8} / (n+α)`, the gap coefficient of Levitin and
/// Parnovski.
pub fn levitin_parnovski_coefficient(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    (4.0 + alpha * alpha).max((nf + 2.0) * alpha + 8.0) / (nf + alpha)
}

/// Surface measure `ω_{n−1} = 2π^{n/2} / Γ(n/2)` of the unit sphere in `Rⁿ`,
/// evaluated through `ln Γ` so that large `n` does not overflow.
pub fn unit_sphere_measure(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    libm::exp(libm::log(2.0) + half * libm::log(PI) - libm::lgamma(half))
}
