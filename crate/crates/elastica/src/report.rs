//! Verification reports and their renderings (JSON, CSV, aligned text,
//! SVG).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use elastica_core::cap1d::CapKind;
use elastica_core::{BoundRecord, Spectrum, Verdict};

use crate::error::{HarnessError, Result};

/// The parameter that distinguishes the reports of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub parameter: String,
    pub value: f64,
}

impl Case {
    pub fn alpha(value: f64) -> Self {
        Self {
            parameter: "alpha".into(),
            value,
        }
    }

    pub fn theta0(value: f64) -> Self {
        Self {
            parameter: "theta0".into(),
            value,
        }
    }

    /// File-name friendly label, e.g. `alpha_0.5`.
    pub fn label(&self) -> String {
        format!("{}_{}", self.parameter, self.value)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub pass: usize,
    pub marginal: usize,
    pub fail: usize,
    pub skip: usize,
}

impl Summary {
    pub fn tally(records: &[BoundRecord]) -> Self {
        let mut s = Self::default();
        for r in records {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Marginal => s.marginal += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Skip => s.skip += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.pass + self.marginal + self.fail + self.skip
    }

    /// `0` if everything passed or was skipped, `2` if anything is marginal
    /// (and nothing failed), `1` on any failure.
    pub fn exit_code(&self) -> i32 {
        if self.fail > 0 {
            1
        } else if self.marginal > 0 {
            2
        } else {
            0
        }
    }
}

/// Values at two resolutions and what was made of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Richardson {
    /// Spacing ratio between the coarse and fine level.
    pub ratio: f64,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    /// Per-value uncertainty `max(tol · |σ*|, |fine − coarse|)`.
    pub budget: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub policy: String,
    pub mesh: Option<String>,
    /// Largest relative residual per reported value.
    pub residuals: Vec<f64>,
    pub richardson: Option<Richardson>,
}

impl Provenance {
    pub fn new(seed: u64, policy: &str, mesh: Option<String>, residuals: Vec<f64>, richardson: Option<Richardson>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            policy: policy.into(),
            mesh,
            residuals,
            richardson,
        }
    }
}

/// First eigenvalue of one cap problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapValue {
    pub kind: CapKind,
    pub theta0: f64,
    pub mode_max: usize,
    /// Radial cells of each level solved.
    pub radial_cells: Vec<usize>,
    /// First eigenvalue at each level.
    pub levels: Vec<f64>,
    /// Extrapolated (or single-level) value used by the records.
    pub value: f64,
    pub budget: f64,
    pub minimizing_mode: usize,
    /// Per-mode smallest eigenvalues on the finest level.
    pub per_mode: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub case: Case,
    pub config: BTreeMap<String, serde_json::Value>,
    pub spectrum: Option<Spectrum>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cap: Vec<CapValue>,
    pub records: Vec<BoundRecord>,
    pub summary: Summary,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| HarnessError::io(path, e))
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let report: Self = serde_json::from_str(text).map_err(|e| HarnessError::Schema {
            path: path.into(),
            message: e.to_string(),
        })?;
        let tally = Summary::tally(&report.records);
        if tally != report.summary {
            return Err(HarnessError::Schema {
                path: path.into(),
                message: format!("field `summary` is {:?} but the records tally to {tally:?}", report.summary),
            });
        }
        Ok(report)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text, path)
    }
}

/// Worst exit code over a set of reports.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    let codes: Vec<i32> = reports.iter().map(|r| r.summary.exit_code()).collect();
    if codes.contains(&1) {
        1
    } else {
        codes.into_iter().max().unwrap_or(0)
    }
}

const COLUMNS: [&str; 6] = ["name", "k", "bound", "measured", "slack", "verdict"];

/// Rows of one or more reports. A single report keeps its record order; a
/// merge is keyed by `(case value, name, k)` and gains a leading column named
/// after the case parameter.
fn rows(reports: &[VerificationReport]) -> (Option<String>, Vec<(f64, &BoundRecord)>) {
    let mut rows: Vec<(f64, &BoundRecord)> =
        reports.iter().flat_map(|r| r.records.iter().map(move |rec| (r.case.value, rec))).collect();
    if reports.len() < 2 {
        return (None, rows);
    }
    let parameter = match reports.iter().map(|r| &r.case.parameter).collect::<Vec<_>>().as_slice() {
        [first, rest @ ..] if rest.iter().all(|p| p == first) => first.to_string(),
        _ => "case".into(),
    };
    rows.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| a.1.name.cmp(&b.1.name))
            .then_with(|| a.1.k.cmp(&b.1.k))
    });
    (Some(parameter), rows)
}

/// CSV with header `name,k,bound,measured,slack,verdict` (plus a leading
/// case column when merging). Numbers use the shortest representation that
/// reads back exactly.
pub fn csv(reports: &[VerificationReport]) -> String {
    let (key, rows) = rows(reports);
    let mut out = String::new();
    if let Some(k) = &key {
        out.push_str(k);
        out.push(',');
    }
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for (value, r) in rows {
        if key.is_some() {
            let _ = write!(out, "{value},");
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.name,
            r.k,
            r.bound_value,
            r.measured_value,
            r.slack,
            r.verdict.as_str()
        );
    }
    out
}

/// Human-readable table with right-aligned numeric columns.
pub fn table(reports: &[VerificationReport]) -> String {
    let (key, rows) = rows(reports);
    let mut header: Vec<String> = key.iter().cloned().collect();
    header.extend(["name", "k", "bound", "measured", "slack", "tolerance", "verdict", "note"].map(String::from));
    let mut cells: Vec<Vec<String>> = vec![header];
    for (value, r) in rows {
        let mut row: Vec<String> = key.iter().map(|_| format!("{value:.6}")).collect();
        let skip = r.verdict == Verdict::Skip;
        let num = |x: f64| if skip { "-".to_string() } else { format!("{x:.6e}") };
        row.extend([
            r.name.clone(),
            r.k.to_string(),
            num(r.bound_value),
            num(r.measured_value),
            num(r.slack),
            num(r.tolerance),
            r.verdict.as_str().to_string(),
            r.note.clone().unwrap_or_default(),
        ]);
        cells.push(row);
    }
    let ncols = cells[0].len();
    let widths: Vec<usize> = (0..ncols)
        .map(|c| cells.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let text_cols = if key.is_some() { [1, ncols - 2, ncols - 1] } else { [0, ncols - 2, ncols - 1] };
    let mut out = String::new();
    for row in &cells {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let w = widths[c];
            if text_cols.contains(&c) {
                let _ = write!(line, "{cell:<w$}");
            } else {
                let _ = write!(line, "{cell:>w$}");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// One SVG line chart per inequality name: bound and measured value against
/// `k`. Names whose records are all skipped get no chart.
pub fn svg_plots(report: &VerificationReport) -> Vec<(String, String)> {
    let mut by_name: BTreeMap<&str, Vec<&BoundRecord>> = BTreeMap::new();
    for r in report.records.iter().filter(|r| r.verdict != Verdict::Skip) {
        by_name.entry(r.name.as_str()).or_default().push(r);
    }
    by_name
        .into_iter()
        .map(|(name, recs)| {
            let title = format!("{name} ({} = {})", report.case.parameter, report.case.value);
            (format!("{}_{name}.svg", report.case.label()), line_chart(&title, &recs))
        })
        .collect()
}

fn line_chart(title: &str, recs: &[&BoundRecord]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const L: f64 = 80.0;
    const R: f64 = 20.0;
    const T: f64 = 40.0;
    const B: f64 = 50.0;

    let ks: Vec<f64> = recs.iter().map(|r| r.k as f64).collect();
    let ys = recs.iter().flat_map(|r| [r.bound_value, r.measured_value]).filter(|v| v.is_finite());
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if y1 - y0 <= 1e-12 * y1.abs().max(1.0) {
        let pad = 0.5 * y1.abs().max(1.0);
        (y0, y1) = (y0 - pad, y1 + pad);
    }
    let pad = 0.05 * (y1 - y0);
    (y0, y1) = (y0 - pad, y1 + pad);
    let (k0, k1) = ks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &k| (a.min(k), b.max(k)));
    let (k0, k1) = if k1 > k0 { (k0, k1) } else { (k0 - 1.0, k1 + 1.0) };

    let px = |k: f64| L + (k - k0) / (k1 - k0) * (W - L - R);
    let py = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{L} {T} V{} H{}" fill="none" stroke="black"/>"#,
        H - B,
        W - R
    );
    for i in 0..=4 {
        let y = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{y:.4e}</text>"#,
            L - 6.0,
            py(y) + 4.0
        );
    }
    let step = ((k1 - k0) / 10.0).ceil().max(1.0) as usize;
    for k in (k0.ceil() as usize..=k1.floor() as usize).step_by(step) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{k}</text>"#,
            px(k as f64),
            H - B + 18.0
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">k</text>"#, (L + W - R) / 2.0, H - 10.0);

    for (label, color, pick) in [
        ("bound", "#1f77b4", (|r: &BoundRecord| r.bound_value) as fn(&BoundRecord) -> f64),
        ("measured", "#d62728", |r: &BoundRecord| r.measured_value),
    ] {
        let pts: Vec<String> = recs
            .iter()
            .filter(|r| pick(r).is_finite())
            .map(|r| format!("{:.2},{:.2}", px(r.k as f64), py(pick(r))))
            .collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
        for p in &pts {
            let (x, y) = p.split_once(',').unwrap();
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
        }
        let ly = if label == "bound" { T + 8.0 } else { T + 24.0 };
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{label}</text>"#,
            W - R - 110.0,
            W - R - 90.0,
            W - R - 84.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use elastica_core::BoundKind;

    fn report(alpha: f64, records: Vec<BoundRecord>) -> VerificationReport {
        VerificationReport {
            case: Case::alpha(alpha),
            config: BTreeMap::new(),
            spectrum: None,
            cap: Vec::new(),
            summary: Summary::tally(&records),
            records,
            provenance: Provenance::new(0, "fixed", None, Vec::new(), None),
        }
    }

    fn rec(name: &str, k: usize, bound: f64, measured: f64) -> BoundRecord {
        BoundRecord::upper(name, BoundKind::UpperNext, k, bound, measured, 1e-9)
    }

    #[test]
    fn csv_row_count_matches_records() {
        let r = report(0.0, vec![rec("a", 1, 3.0, 2.0), rec("a", 2, 5.0, 6.0), rec("b", 1, 1.0, 0.5)]);
        let text = csv(std::slice::from_ref(&r));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "name,k,bound,measured,slack,verdict");
        assert_eq!(lines.len(), 1 + r.records.len());
        assert_eq!(lines[1], "a,1,3,2,1,pass");
        assert_eq!(lines[2], "a,2,5,6,-1,fail");
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = report(0.0, Vec::new());
        assert_eq!(csv(std::slice::from_ref(&r)), "name,k,bound,measured,slack,verdict\n");
        assert_eq!(table(&[r]).lines().count(), 1);
    }

    #[test]
    fn merge_is_keyed_by_case_name_and_index() {
        let a = report(1.0, vec![rec("z", 1, 3.0, 2.0), rec("a", 2, 3.0, 2.0), rec("a", 1, 3.0, 2.0)]);
        let b = report(0.5, vec![rec("a", 1, 3.0, 2.0)]);
        let text = csv(&[a, b]);
        let keys: Vec<String> = text.lines().skip(1).map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect();
        assert_eq!(text.lines().next().unwrap(), "alpha,name,k,bound,measured,slack,verdict");
        assert_eq!(keys, ["0.5,a,1", "1,a,1", "1,a,2", "1,z,1"]);
    }

    #[test]
    fn json_round_trip_and_schema_errors() {
        let r = report(0.5, vec![rec("a", 1, 3.0, 2.0)]);
        let path = Path::new("r.json");
        assert_eq!(VerificationReport::from_json(&r.to_json(), path).unwrap(), r);

        let mut v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        v.as_object_mut().unwrap().remove("records");
        let e = VerificationReport::from_json(&v.to_string(), path).unwrap_err();
        assert!(e.to_string().contains("records"), "{e}");

        let mut v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        v["summary"]["pass"] = 7.into();
        let e = VerificationReport::from_json(&v.to_string(), path).unwrap_err();
        assert!(e.to_string().contains("summary"), "{e}");

        let mut v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        v["extra"] = 1.into();
        assert!(VerificationReport::from_json(&v.to_string(), path).is_err());
    }

    #[test]
    fn exit_codes() {
        let pass = report(0.0, vec![rec("a", 1, 3.0, 2.0)]);
        let marginal = report(0.0, vec![rec("a", 1, 3.0, 3.0 + 1e-10)]);
        let fail = report(0.0, vec![rec("a", 1, 3.0, 4.0)]);
        assert_eq!(exit_code(std::slice::from_ref(&pass)), 0);
        assert_eq!(exit_code(&[pass.clone(), marginal.clone()]), 2);
        assert_eq!(exit_code(&[marginal, fail, pass]), 1);
        assert_eq!(exit_code(&[]), 0);
    }

    #[test]
    fn table_is_aligned() {
        let r = report(0.0, vec![rec("long_name", 1, 3.0, 2.0), rec("b", 12, 30.0, 2.0)]);
        let t = table(&[r]);
        let lines: Vec<&str> = t.lines().collect();
        let pos = |l: &str| l.find("pass").unwrap();
        assert_eq!(pos(lines[1]), pos(lines[2]));
    }

    #[test]
    fn svg_has_both_series() {
        let r = report(2.0, vec![rec("a", 1, 3.0, 2.0), rec("a", 2, 4.0, 2.5)]);
        let plots = svg_plots(&r);
        assert_eq!(plots.len(), 1);
        assert_eq!(plots[0].0, "alpha_2_a.svg");
        assert_eq!(plots[0].1.matches("<polyline").count(), 2);
        assert_eq!(plots[0].1.matches("<circle").count(), 4);
    }
}
