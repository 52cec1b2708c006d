use core::f64::consts::PI;

use super::coefficients::{coefficient_c, levitin_parnovski_coefficient, unit_sphere_measure};
use super::record::{BoundKind, BoundRecord};
use super::{BoundsError, DomainGeometry, Spectrum, SYNTHETIC_TOLERANCE};

/// Admissible constant `a(n)` in the index-growth bound; any value up to 4
/// gives a valid (conservative) bound.
pub const INDEX_GROWTH_CONSTANT: f64 = 4.0;

pub(super) fn require(values: &[f64], k: usize, needed: usize) -> Result<(), BoundsError> {
    if k == 0 {
        return Err(BoundsError::InvalidParameter("k must be at least 1"));
    }
    if values.len() < needed {
        return Err(BoundsError::NotEnoughValues {
            k,
            needed,
            available: values.len(),
        });
    }
    Ok(())
}

fn mean(values: &[f64], k: usize) -> f64 {
    values[..k].iter().sum::<f64>() / k as f64
}

pub(super) fn yang_root(values: &[f64], n: usize, alpha: f64, k: usize) -> Result<f64, BoundsError> {
    require(values, k, k)?;
    let c = coefficient_c(n, alpha);
    let s1: f64 = values[..k].iter().sum();
    let s2: f64 = values[..k].iter().map(|v| v * v).sum();
    // k x² + b x + c0 = 0 with b < 0
    let a = k as f64;
    let b = -(2.0 + c) * s1;
    let c0 = (1.0 + c) * s2;
    let disc = b * b - 4.0 * a * c0;
    if disc < 0.0 {
        return Err(BoundsError::NegativeDiscriminant { k, discriminant: disc });
    }
    let q = -0.5 * (b - libm::sqrt(disc));
    Ok((q / a).max(c0 / q))
}

/// Largest root of `k x² − (2+C) S₁ x + (1+C) S₂ = 0` with `S₁ = Σσᵢ`,
/// `S₂ = Σσᵢ²` over `i ≤ k`: the upper bound on `σ_{k+1}` obtained by solving
/// the Yang-type quadratic inequality.
pub fn yang_type_next_upper(spectrum: &Spectrum, k: usize) -> Result<f64, BoundsError> {
    yang_root(spectrum.values(), spectrum.dim(), spectrum.alpha(), k)
}

pub(super) fn average_bound(values: &[f64], n: usize, alpha: f64, k: usize) -> Result<f64, BoundsError> {
    require(values, k, k)?;
    Ok((1.0 + coefficient_c(n, alpha)) * mean(values, k))
}

/// `(1 + C) · (1/k) Σ_{i≤k} σᵢ`, an upper bound on `σ_{k+1}`.
pub fn average_upper(spectrum: &Spectrum, k: usize) -> Result<f64, BoundsError> {
    average_bound(spectrum.values(), spectrum.dim(), spectrum.alpha(), k)
}

pub(super) fn gap_bound(values: &[f64], n: usize, alpha: f64, k: usize) -> Result<f64, BoundsError> {
    require(values, k, k)?;
    Ok(coefficient_c(n, alpha) * mean(values, k))
}

/// `C · (1/k) Σ_{i≤k} σᵢ`, an upper bound on `σ_{k+1} − σ_k`.
pub fn gap_upper(spectrum: &Spectrum, k: usize) -> Result<f64, BoundsError> {
    gap_bound(spectrum.values(), spectrum.dim(), spectrum.alpha(), k)
}

pub(super) fn lp_gap_bound(values: &[f64], n: usize, alpha: f64, k: usize) -> Result<f64, BoundsError> {
    require(values, k, k)?;
    Ok(levitin_parnovski_coefficient(n, alpha) * mean(values, k))
}

/// Levitin–Parnovski gap bound `max{4+α², (n+2)α+8}/(n+α) · (1/k) Σσᵢ`.
pub fn levitin_parnovski_gap(spectrum: &Spectrum, k: usize) -> Result<f64, BoundsError> {
    lp_gap_bound(spectrum.values(), spectrum.dim(), spectrum.alpha(), k)
}

pub(super) fn hook_sides(values: &[f64], n: usize, alpha: f64, k: usize) -> Result<(f64, f64), BoundsError> {
    require(values, k, k + 1)?;
    let next = values[k];
    if next <= values[k - 1] {
        return Err(BoundsError::DegenerateGap { k });
    }
    let lhs = values[..k].iter().map(|s| s / (next - s)).sum();
    let nf = n as f64;
    let rhs = nf * nf * k as f64 / (4.0 * (n as f64 + alpha));
    Ok((lhs, rhs))
}

/// Hook's inequality `Σ_{i≤k} σᵢ/(σ_{k+1} − σᵢ) ≥ n²k / (4(n+α))`, returned as
/// `(lhs, rhs)`. Fails with [`BoundsError::DegenerateGap`] when
/// `σ_{k+1} = σ_k`.
pub fn hook_sum_ratio(spectrum: &Spectrum, k: usize) -> Result<(f64, f64), BoundsError> {
    hook_sides(spectrum.values(), spectrum.dim(), spectrum.alpha(), k)
}

/// Levine–Protter lower bound on `Σ_{i≤k} σᵢ`:
/// `4π²n/(n+2) · k^{1+2/n} / (V ω_{n−1})^{2/n}`.
pub fn levine_protter_lower(geometry: &DomainGeometry, k: usize) -> Result<f64, BoundsError> {
    if k == 0 {
        return Err(BoundsError::InvalidParameter("k must be at least 1"));
    }
    let n = geometry.dim();
    let nf = n as f64;
    let vw = geometry.volume() * unit_sphere_measure(n);
    Ok(4.0 * PI * PI * nf / (nf + 2.0) * libm::pow(k as f64, 1.0 + 2.0 / nf) / libm::pow(vw, 2.0 / nf))
}

pub(super) fn low_order_values(values: &[f64], n: usize, alpha: f64) -> Result<(f64, f64), BoundsError> {
    require(values, n, n + 1)?;
    let lhs = values[1..=n].iter().sum();
    let rhs = (n as f64 + 4.0 * (1.0 + alpha)) * values[0];
    Ok((lhs, rhs))
}

/// `(σ₂ + … + σ_{n+1}, (n + 4(1+α)) σ₁)`; the inequality asserts lhs ≤ rhs.
pub fn low_order_sides(spectrum: &Spectrum) -> Result<(f64, f64), BoundsError> {
    low_order_values(spectrum.values(), spectrum.dim(), spectrum.alpha())
}

/// Low-order sum bound as a record, verified with the synthetic tolerance.
pub fn low_order_check(spectrum: &Spectrum) -> Result<BoundRecord, BoundsError> {
    let (lhs, rhs) = low_order_sides(spectrum)?;
    let tol = SYNTHETIC_TOLERANCE * lhs.abs().max(rhs.abs());
    Ok(BoundRecord::upper("low_order_sum", BoundKind::LowOrder, spectrum.dim(), rhs, lhs, tol))
}

/// `(1 + a(n+α)/n²) · k^{2(n+α)/n²} · σ₁` with `a = 4`, an upper bound on
/// `σ_{k+1}`.
pub fn index_growth_upper(sigma1: f64, n: usize, alpha: f64, k: usize) -> Result<f64, BoundsError> {
    if !(sigma1 > 0.0) || k == 0 || n == 0 || !(alpha >= 0.0) {
        return Err(BoundsError::InvalidParameter("need sigma1 > 0, n ≥ 1, k ≥ 1, alpha ≥ 0"));
    }
    let nf = n as f64;
    let ratio = (nf + alpha) / (nf * nf);
    Ok((1.0 + INDEX_GROWTH_CONSTANT * ratio) * libm::pow(k as f64, 2.0 * ratio) * sigma1)
}

/// `(Σ aᵢˢ)(Σ aᵢ² bᵢ)` and `(Σ aᵢ^{s+1})(Σ aᵢ bᵢ)` for non-negative `a`
/// non-increasing and `b` non-decreasing; the first never exceeds the second.
pub fn chebyshev_sum_check(a: &[f64], b: &[f64], s: f64) -> Result<(f64, f64), BoundsError> {
    if a.is_empty() || a.len() != b.len() {
        return Err(BoundsError::InvalidParameter("sequences must be non-empty and of equal length"));
    }
    if !(s >= 1.0) {
        return Err(BoundsError::InvalidParameter("exponent s must be at least 1"));
    }
    if a.iter().chain(b).any(|v| !(*v >= 0.0)) {
        return Err(BoundsError::InvalidParameter("sequences must be non-negative"));
    }
    if a.windows(2).any(|w| w[1] > w[0]) {
        return Err(BoundsError::InvalidParameter("a must be non-increasing"));
    }
    if b.windows(2).any(|w| w[1] < w[0]) {
        return Err(BoundsError::InvalidParameter("b must be non-decreasing"));
    }
    let sum_as: f64 = a.iter().map(|x| libm::pow(*x, s)).sum();
    let sum_as1: f64 = a.iter().map(|x| libm::pow(*x, s + 1.0)).sum();
    let sum_a2b: f64 = a.iter().zip(b).map(|(x, y)| x * x * y).sum();
    let sum_ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((sum_as * sum_a2b, sum_as1 * sum_ab))
}

pub(super) fn quadratic_form_values(values: &[f64], n: usize, alpha: f64, k: usize) -> Result<(f64, f64), BoundsError> {
    require(values, k, k + 1)?;
    let next = values[k];
    let lhs = values[..k].iter().map(|s| (next - s) * (next - s)).sum();
    let cross: f64 = values[..k].iter().map(|s| (next - s) * s).sum();
    Ok((lhs, coefficient_c(n, alpha) * cross))
}

/// `(Σ(σ_{k+1}−σᵢ)², C Σ(σ_{k+1}−σᵢ)σᵢ)`; the Yang-type inequality asserts
/// lhs ≤ rhs.
pub fn quadratic_form_sides(spectrum: &Spectrum, k: usize) -> Result<(f64, f64), BoundsError> {
    quadratic_form_values(spectrum.values(), spectrum.dim(), spectrum.alpha(), k)
}

pub(super) fn cheng_yang_values(values: &[f64], n: usize, alpha: f64, k: usize) -> Result<(f64, f64), BoundsError> {
    require(values, k, k + 1)?;
    let next = values[k];
    let gaps = || values[..k].iter().map(move |s| ((next - s).max(0.0), *s));
    let lhs = gaps().map(|(g, _)| g).sum();
    let root_sum: f64 = gaps().map(|(g, _)| libm::sqrt(g)).sum();
    let weighted: f64 = gaps().map(|(g, s)| libm::sqrt(g) * s).sum();
    let nf = n as f64;
    let rhs = 2.0 * libm::sqrt(nf + alpha) / nf * libm::sqrt(root_sum * weighted);
    Ok((lhs, rhs))
}

/// Cheng–Yang form `Σ(σ_{k+1}−σᵢ) ≤ (2√(n+α)/n) {Σ(σ_{k+1}−σᵢ)^{1/2} ·
/// Σ(σ_{k+1}−σᵢ)^{1/2}σᵢ}^{1/2}` as `(lhs, rhs)`.
pub fn cheng_yang_sides(spectrum: &Spectrum, k: usize) -> Result<(f64, f64), BoundsError> {
    cheng_yang_values(spectrum.values(), spectrum.dim(), spectrum.alpha(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn spec(n: usize, alpha: f64, v: &[f64]) -> Spectrum {
        Spectrum::synthetic(n, alpha, v.to_vec()).unwrap()
    }

    /// Locates the last sign change of the Yang quadratic on a dense grid.
    fn yang_root_by_scan(values: &[f64], n: usize, alpha: f64, k: usize) -> f64 {
        let c = coefficient_c(n, alpha);
        let f = |x: f64| -> f64 {
            values[..k].iter().map(|s| (x - s) * (x - s)).sum::<f64>()
                - c * values[..k].iter().map(|s| (x - s) * s).sum::<f64>()
        };
        let lo = values[k - 1];
        let hi = 10.0 * values[k - 1];
        let steps = 200_000;
        let mut prev = f(lo);
        let mut root = f64::NAN;
        for i in 1..=steps {
            let x = lo + (hi - lo) * i as f64 / steps as f64;
            let cur = f(x);
            if prev <= 0.0 && cur > 0.0 {
                // refine by bisection inside the bracketing cell
                let (mut a, mut b) = (x - (hi - lo) / steps as f64, x);
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    if f(m) <= 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                root = 0.5 * (a + b);
            }
            prev = cur;
        }
        root
    }

    #[test]
    fn yang_root_examples() {
        for (n, alpha) in [(2, 0.0), (3, 1.0), (2, 10.0)] {
            let s = spec(n, alpha, &[1.7]);
            let c = coefficient_c(n, alpha);
            assert!((yang_type_next_upper(&s, 1).unwrap() - (1.0 + c) * 1.7).abs() < 1e-12);
        }
        let s = spec(2, 0.0, &[2.0, 2.0]);
        assert!((yang_type_next_upper(&s, 2).unwrap() - 6.0).abs() < 1e-12);
        let s = spec(2, 0.0, &[2.0, 5.0]);
        let expected = (28.0 + 88f64.sqrt()) / 4.0;
        assert!((yang_type_next_upper(&s, 2).unwrap() - expected).abs() < 1e-12);
        assert!((yang_root_by_scan(&[2.0, 5.0], 2, 0.0, 2) - expected).abs() < 1e-9);
        assert!((yang_root_by_scan(&[2.0, 2.0], 2, 0.0, 2) - 6.0).abs() < 1e-9);
    }

    #[test]
    fn yang_root_matches_scan_on_mixed_spectra() {
        let cases: [(&[f64], usize, f64); 3] = [
            (&[1.0, 1.5, 2.0, 4.0], 2, 0.5),
            (&[3.0, 3.1, 3.2], 3, 10.0),
            (&[0.5, 2.0, 2.5, 2.5, 3.0], 2, 2.0),
        ];
        for (v, n, alpha) in cases {
            let k = v.len();
            let r = yang_root(v, n, alpha, k).unwrap();
            let scan = yang_root_by_scan(v, n, alpha, k);
            assert!((r - scan).abs() < 1e-8 * r, "{r} vs {scan}");
        }
    }

    #[test]
    fn negative_discriminant_is_reported() {
        // widely spread eigenvalues make the quadratic positive everywhere
        let v = [1.0, 1000.0];
        match yang_root(&v, 2, 0.0, 2) {
            Err(BoundsError::NegativeDiscriminant { k: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn average_and_gap_examples() {
        assert_eq!(average_upper(&spec(2, 0.0, &[2.0]), 1).unwrap(), 6.0);
        assert_eq!(average_upper(&spec(2, 0.0, &[2.0, 2.0, 5.0]), 3).unwrap(), 9.0);
        assert_eq!(gap_upper(&spec(2, 0.0, &[2.0]), 1).unwrap(), 4.0);
        assert_eq!(gap_upper(&spec(2, 0.0, &[2.0, 5.0]), 2).unwrap(), 7.0);
        assert!((gap_upper(&spec(2, 10.0, &[1.0]), 1).unwrap() - 104.0 / 12.0).abs() < 1e-14);
        assert_eq!(levitin_parnovski_gap(&spec(2, 0.0, &[2.0]), 1).unwrap(), 8.0);
        assert!((levitin_parnovski_gap(&spec(2, 10.0, &[1.0]), 1).unwrap() - 104.0 / 12.0).abs() < 1e-14);
        assert!(average_upper(&spec(2, 0.0, &[2.0]), 2).is_err());
    }

    #[test]
    fn hook_examples() {
        assert_eq!(hook_sum_ratio(&spec(2, 0.0, &[2.0, 6.0]), 1).unwrap(), (0.5, 0.5));
        let (l, r) = hook_sum_ratio(&spec(2, 0.0, &[2.0, 2.0, 5.0]), 2).unwrap();
        assert!((l - 4.0 / 3.0).abs() < 1e-14 && r == 1.0);
        let (l, r) = hook_sum_ratio(&spec(3, 5.0, &[1.0, 1.1]), 1).unwrap();
        assert!((l - 10.0).abs() < 1e-12 && (r - 9.0 / 32.0).abs() < 1e-15);
        assert_eq!(
            hook_sum_ratio(&spec(2, 0.0, &[2.0, 2.0, 5.0]), 1),
            Err(BoundsError::DegenerateGap { k: 1 })
        );
    }

    #[test]
    fn levine_protter_square() {
        let g = DomainGeometry::from_edges(vec![PI, PI]).unwrap();
        assert!((levine_protter_lower(&g, 1).unwrap() - 1.0 / PI).abs() < 1e-14);
        assert!((levine_protter_lower(&g, 3).unwrap() - 9.0 / PI).abs() < 1e-13);
    }

    #[test]
    fn low_order_examples() {
        assert_eq!(low_order_sides(&spec(2, 0.0, &[2.0, 5.0, 5.0])).unwrap(), (10.0, 12.0));
        assert_eq!(low_order_sides(&spec(2, 0.0, &[1.0, 1.0, 1.0])).unwrap(), (2.0, 6.0));
        assert_eq!(low_order_sides(&spec(2, 1.0, &[1.0, 1.0, 1.0])).unwrap().1, 10.0);
        assert!(low_order_check(&spec(2, 0.0, &[1.0, 1.0])).is_err());
        assert!(low_order_check(&spec(2, 0.0, &[2.0, 5.0, 5.0])).unwrap().verdict.is_pass());
    }

    #[test]
    fn index_growth_examples() {
        for (n, alpha) in [(2, 0.0), (3, 0.5), (2, 10.0)] {
            let s = [1.3];
            let k1 = index_growth_upper(1.3, n, alpha, 1).unwrap();
            let nf = n as f64;
            assert!((k1 - (1.0 + 4.0 * (nf + alpha) / (nf * nf)) * 1.3).abs() < 1e-12);
            // never below the averaged bound at k = 1 since C ≤ 4(n+α)/n²
            assert!(k1 >= average_bound(&s, n, alpha, 1).unwrap() - 1e-12);
        }
        assert!((index_growth_upper(2.0, 2, 0.0, 4).unwrap() - 24.0).abs() < 1e-12);
        assert!((index_growth_upper(1.0, 2, 2.0, 2).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_examples() {
        let (l, r) = chebyshev_sum_check(&[3.0], &[7.0], 2.0).unwrap();
        assert_eq!(l, r);
        let (l, r) = chebyshev_sum_check(&[2.0, 1.0], &[1.0, 2.0], 2.0).unwrap();
        assert_eq!((l, r), (30.0, 36.0));
        let ones = vec![1.0; 5];
        let b: Vec<f64> = (0..5).map(|i| i as f64 * 0.3).collect();
        let (l, r) = chebyshev_sum_check(&ones, &b, 1.5).unwrap();
        assert!((l - r).abs() < 1e-14);
        assert!(chebyshev_sum_check(&[1.0, 2.0], &[1.0, 2.0], 2.0).is_err());
        assert!(chebyshev_sum_check(&[2.0, 1.0], &[2.0, 1.0], 2.0).is_err());
        assert!(chebyshev_sum_check(&[2.0, 1.0], &[1.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn quadratic_form_implies_cheng_yang_on_box_spectrum() {
        let v = [2.0, 2.0, 5.0, 5.0, 5.0, 5.0, 8.0, 8.0];
        for k in 1..v.len() {
            let (l, r) = quadratic_form_values(&v, 2, 0.0, k).unwrap();
            assert!(l <= r);
            let (l, r) = cheng_yang_values(&v, 2, 0.0, k).unwrap();
            assert!(l <= r * (1.0 + 1e-12));
        }
    }
}
