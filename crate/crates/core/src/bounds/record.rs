use alloc::string::String;

/// Which family an evaluated inequality belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundKind {
    UpperNext,
    LowerSum,
    Gap,
    SumRatio,
    LowOrder,
    IndexGrowth,
    QuadraticForm,
    /// Lower bound on a first eigenvalue (spherical caps).
    FirstLower,
    /// Predicted equality case (hemisphere).
    Equality,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::UpperNext => "upper_next",
            Self::LowerSum => "lower_sum",
            Self::Gap => "gap",
            Self::SumRatio => "sum_ratio",
            Self::LowOrder => "low_order",
            Self::IndexGrowth => "index_growth",
            Self::QuadraticForm => "quadratic_form",
            Self::FirstLower => "first_lower",
            Self::Equality => "equality",
        }
    }
}

/// Whether the measured quantity must stay below the bound, above it, or
/// match it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Side {
    Upper,
    Lower,
    Equality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Pass,
    Marginal,
    Fail,
    Skip,
}

impl Verdict {
    /// `pass` iff `slack ≥ 0`, `marginal` iff `−tolerance ≤ slack < 0`.
    pub fn classify(slack: f64, tolerance: f64) -> Self {
        if slack >= 0.0 {
            Self::Pass
        } else if slack >= -tolerance {
            Self::Marginal
        } else {
            Self::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Self::Pass
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Marginal => "marginal",
            Self::Fail => "fail",
            Self::Skip => "skip",
        }
    }
}

/// One evaluated inequality.
///
/// `slack` is signed so that non-negative means the inequality holds:
/// `bound − measured` for upper bounds, `measured − bound` for lower bounds,
/// and `tolerance − |measured − bound|` for equalities.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundRecord {
    pub name: String,
    pub kind: BoundKind,
    pub side: Side,
    pub k: usize,
    pub bound_value: f64,
    pub measured_value: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub note: Option<String>,
}

impl BoundRecord {
    pub fn upper(name: &str, kind: BoundKind, k: usize, bound: f64, measured: f64, tolerance: f64) -> Self {
        Self::build(name, kind, Side::Upper, k, bound, measured, bound - measured, tolerance)
    }

    pub fn lower(name: &str, kind: BoundKind, k: usize, bound: f64, measured: f64, tolerance: f64) -> Self {
        Self::build(name, kind, Side::Lower, k, bound, measured, measured - bound, tolerance)
    }

    pub fn equality(name: &str, kind: BoundKind, k: usize, predicted: f64, measured: f64, tolerance: f64) -> Self {
        let slack = tolerance - libm::fabs(measured - predicted);
        Self::build(name, kind, Side::Equality, k, predicted, measured, slack, tolerance)
    }

    pub fn skip(name: &str, kind: BoundKind, side: Side, k: usize, note: String) -> Self {
        Self {
            name: name.into(),
            kind,
            side,
            k,
            bound_value: 0.0,
            measured_value: 0.0,
            slack: 0.0,
            tolerance: 0.0,
            verdict: Verdict::Skip,
            note: Some(note),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        name: &str,
        kind: BoundKind,
        side: Side,
        k: usize,
        bound: f64,
        measured: f64,
        slack: f64,
        tolerance: f64,
    ) -> Self {
        let verdict = if slack.is_nan() {
            Verdict::Fail
        } else {
            Verdict::classify(slack, tolerance)
        };
        Self {
            name: name.into(),
            kind,
            side,
            k,
            bound_value: bound,
            measured_value: measured,
            slack,
            tolerance,
            verdict,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
