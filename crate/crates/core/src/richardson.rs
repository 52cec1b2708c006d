//! Two-level Richardson extrapolation for second-order discretizations.

/// Extrapolated limit of a quantity converging like `h²`, from a coarse value
/// at spacing `h_coarse` and a fine value at `h_coarse / ratio`.
///
/// With `ratio = 2` this is `(4 f_fine − f_coarse) / 3`.
pub fn extrapolate(coarse: f64, fine: f64, ratio: f64) -> f64 {
    let r2 = ratio * ratio;
    (r2 * fine - coarse) / (r2 - 1.0)
}

/// Error proxy attached to an extrapolated value: `|f_fine − f_coarse|`,
/// floored at `floor`.
pub fn error_budget(coarse: f64, fine: f64, floor: f64) -> f64 {
    libm::fabs(fine - coarse).max(floor)
}

/// Observed order `log(e_coarse / e_fine) / log(ratio)` from errors against a
/// known limit.
pub fn observed_order(coarse: f64, fine: f64, exact: f64, ratio: f64) -> f64 {
    libm::log(libm::fabs(coarse - exact) / libm::fabs(fine - exact)) / libm::log(ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_pure_quadratic_error() {
        let f = |h: f64| 3.0 + 0.7 * h * h;
        let x = extrapolate(f(0.1), f(0.05), 2.0);
        assert!((x - 3.0).abs() < 1e-14);
        let y = extrapolate(f(0.1), f(0.1 / 1.9), 1.9);
        assert!((y - 3.0).abs() < 1e-13);
        assert!((observed_order(f(0.1), f(0.05), 3.0, 2.0) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn budget_has_floor() {
        assert_eq!(error_budget(1.0, 1.0, 1e-9), 1e-9);
        assert_eq!(error_budget(1.0, 1.5, 1e-9), 0.5);
    }
}
