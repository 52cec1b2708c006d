use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::inequalities::{
    average_bound, cheng_yang_values, gap_bound, hook_sides, index_growth_upper, levine_protter_lower,
    lp_gap_bound, low_order_values, quadratic_form_values, require, yang_root,
};
use super::record::{BoundKind, BoundRecord, Side};
use super::{BoundsError, DomainGeometry, Spectrum};

/// Uncertainty attached to each eigenvalue before the inequalities are
/// checked.
///
/// Eigenvalue `i` is trusted to within `δᵢ = max(relative · σᵢ,
/// absolute[i])`. A record's tolerance is the change of its slack when each
/// eigenvalue it reads is moved by its own `δᵢ` (summed in absolute value),
/// plus `relative` times the magnitude of the compared quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBudget {
    pub relative: f64,
    pub absolute: Option<Vec<f64>>,
}

impl ErrorBudget {
    pub fn fixed(relative: f64) -> Self {
        Self {
            relative,
            absolute: None,
        }
    }

    pub fn per_value(relative: f64, absolute: Vec<f64>) -> Self {
        Self {
            relative,
            absolute: Some(absolute),
        }
    }

    fn delta(&self, values: &[f64], i: usize) -> f64 {
        let rel = self.relative * libm::fabs(values[i]);
        match &self.absolute {
            Some(a) if i < a.len() => rel.max(a[i]),
            _ => rel,
        }
    }
}

type Sides = Result<(f64, f64), BoundsError>;

struct Check<'a> {
    name: &'static str,
    kind: BoundKind,
    side: Side,
    k: usize,
    /// Eigenvalues read by the check (a prefix of the spectrum).
    reads: usize,
    /// Returns `(bound, measured)`.
    eval: &'a dyn Fn(&[f64]) -> Sides,
}

impl Check<'_> {
    fn slack(&self, bound: f64, measured: f64) -> f64 {
        match self.side {
            Side::Upper => bound - measured,
            Side::Lower => measured - bound,
            Side::Equality => -libm::fabs(measured - bound),
        }
    }

    fn run(&self, values: &[f64], budget: &ErrorBudget) -> BoundRecord {
        if let Err(e) = require(values, self.k, self.reads) {
            return BoundRecord::skip(self.name, self.kind, self.side, self.k, e.to_string());
        }
        let (bound, measured) = match (self.eval)(values) {
            Ok(v) => v,
            Err(e) => return BoundRecord::skip(self.name, self.kind, self.side, self.k, e.to_string()),
        };
        let base = self.slack(bound, measured);
        let mut tolerance = budget.relative * libm::fabs(bound).max(libm::fabs(measured));
        let mut scratch = values.to_vec();
        for i in 0..self.reads {
            let d = budget.delta(values, i);
            if d == 0.0 {
                continue;
            }
            let mut worst: f64 = 0.0;
            for sign in [-1.0, 1.0] {
                scratch[i] = values[i] + sign * d;
                let change = match (self.eval)(&scratch) {
                    Ok((b, m)) if b.is_finite() && m.is_finite() => libm::fabs(self.slack(b, m) - base),
                    _ => libm::fabs(base),
                };
                worst = worst.max(change);
            }
            scratch[i] = values[i];
            tolerance += worst;
        }
        match self.side {
            Side::Upper => BoundRecord::upper(self.name, self.kind, self.k, bound, measured, tolerance),
            Side::Lower => BoundRecord::lower(self.name, self.kind, self.k, bound, measured, tolerance),
            Side::Equality => BoundRecord::equality(self.name, self.kind, self.k, bound, measured, tolerance),
        }
    }
}

/// Evaluates every inequality for `k = 1..=k_max` (plus the low-order sum
/// once) and returns the records in a fixed order. Problems with individual
/// records (too few eigenvalues, degenerate gaps, a negative discriminant)
/// become `skip` entries; the batch never aborts.
///
/// The Levine–Protter records need `geometry`; without it they are skipped.
pub fn evaluate_all(
    spectrum: &Spectrum,
    geometry: Option<&DomainGeometry>,
    k_max: usize,
    budget: &ErrorBudget,
) -> Vec<BoundRecord> {
    let n = spectrum.dim();
    let alpha = spectrum.alpha();
    let values = spectrum.values();
    let mut records = Vec::new();

    for k in 1..=k_max {
        let quadratic = |v: &[f64]| quadratic_form_values(v, n, alpha, k).map(|(l, r)| (r, l));
        let cheng_yang = |v: &[f64]| cheng_yang_values(v, n, alpha, k).map(|(l, r)| (r, l));
        let yang = |v: &[f64]| Ok((yang_root(v, n, alpha, k)?, v[k]));
        let average = |v: &[f64]| Ok((average_bound(v, n, alpha, k)?, v[k]));
        let gap = |v: &[f64]| Ok((gap_bound(v, n, alpha, k)?, v[k] - v[k - 1]));
        let lp_gap = |v: &[f64]| Ok((lp_gap_bound(v, n, alpha, k)?, v[k] - v[k - 1]));
        let hook = |v: &[f64]| hook_sides(v, n, alpha, k).map(|(l, r)| (r, l));
        let growth = |v: &[f64]| Ok((index_growth_upper(v[0], n, alpha, k)?, v[k]));

        let checks = [
            Check { name: "yang_quadratic_form", kind: BoundKind::QuadraticForm, side: Side::Upper, k, reads: k + 1, eval: &quadratic },
            Check { name: "cheng_yang", kind: BoundKind::QuadraticForm, side: Side::Upper, k, reads: k + 1, eval: &cheng_yang },
            Check { name: "yang_next_upper", kind: BoundKind::UpperNext, side: Side::Upper, k, reads: k + 1, eval: &yang },
            Check { name: "average_upper", kind: BoundKind::UpperNext, side: Side::Upper, k, reads: k + 1, eval: &average },
            Check { name: "gap_upper", kind: BoundKind::Gap, side: Side::Upper, k, reads: k + 1, eval: &gap },
            Check { name: "levitin_parnovski_gap", kind: BoundKind::Gap, side: Side::Upper, k, reads: k + 1, eval: &lp_gap },
        ];
        for c in &checks {
            records.push(c.run(values, budget));
        }

        let hook_check = Check { name: "hook_sum_ratio", kind: BoundKind::SumRatio, side: Side::Lower, k, reads: k + 1, eval: &hook };
        if values.len() > k && values[k] - values[k - 1] <= budget.delta(values, k) + budget.delta(values, k - 1) {
            records.push(BoundRecord::skip(
                hook_check.name,
                hook_check.kind,
                Side::Lower,
                k,
                format!("degenerate gap: sigma_{} - sigma_{} within the error budget", k + 1, k),
            ));
        } else {
            records.push(hook_check.run(values, budget));
        }

        match geometry {
            Some(g) => {
                let lp = |v: &[f64]| Ok((levine_protter_lower(g, k)?, v[..k].iter().sum()));
                let c = Check { name: "levine_protter_sum", kind: BoundKind::LowerSum, side: Side::Lower, k, reads: k, eval: &lp };
                records.push(c.run(values, budget));
            }
            None => records.push(BoundRecord::skip(
                "levine_protter_sum",
                BoundKind::LowerSum,
                Side::Lower,
                k,
                "no domain geometry".into(),
            )),
        }

        let c = Check { name: "index_growth_upper", kind: BoundKind::IndexGrowth, side: Side::Upper, k, reads: k + 1, eval: &growth };
        records.push(c.run(values, budget).with_conservative_note());
    }

    let low = |v: &[f64]| low_order_values(v, n, alpha).map(|(l, r)| (r, l));
    let c = Check { name: "low_order_sum", kind: BoundKind::LowOrder, side: Side::Upper, k: n, reads: n + 1, eval: &low };
    records.push(c.run(values, budget));
    records
}

trait ConservativeNote {
    fn with_conservative_note(self) -> Self;
}

impl ConservativeNote for BoundRecord {
    fn with_conservative_note(self) -> Self {
        if self.note.is_none() {
            self.with_note("conservative: a(n) = 4")
        } else {
            self
        }
    }
}
