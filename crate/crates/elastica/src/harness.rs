//! Orchestration of solves, bound evaluation and report output.

use std::f64::consts::PI;
use std::path::PathBuf;

use rayon::prelude::*;

use elastica_core::assembly::{assemble, ElasticityProblem};
use elastica_core::bounds::{evaluate_all, ErrorBudget};
use elastica_core::cap1d::{self, CapError, CapKind, CapProblem, CapSolution};
use elastica_core::richardson::extrapolate;
use elastica_core::{
    smallest_eigenpairs, BoundKind, BoundRecord, DomainGeometry, EigenResult, Side, SolverOptions, SparseSymMatrix,
    Spectrum,
};

use crate::config::{Mode, OutputFormat, Policy, RunConfig};
use crate::error::{HarnessError, Result};
use crate::report::{self, CapValue, Case, Provenance, Richardson, Summary, VerificationReport};
use crate::{matrix_market, spectrum_io};

/// Dimension of the sphere the caps live on.
const CAP_DIM: f64 = 2.0;

pub fn solver_options(config: &RunConfig) -> SolverOptions {
    SolverOptions {
        tol: config.tol,
        max_iterations: config.max_iterations,
        seed: config.seed,
        ..SolverOptions::default()
    }
}

fn mesh_label(cells: &[usize]) -> String {
    cells.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

/// An assembled and solved box problem.
pub struct BoxSolve {
    pub cells: Vec<usize>,
    pub stiffness: SparseSymMatrix,
    pub mass: SparseSymMatrix,
    pub result: EigenResult,
}

/// Assembles the box of `config` at `cells` and solves for `config.m`
/// eigenpairs.
pub fn solve_box(config: &RunConfig, alpha: f64, cells: &[usize]) -> Result<BoxSolve> {
    let problem = ElasticityProblem {
        lumped_mass: config.lumped_mass,
        ..ElasticityProblem::new(config.solve_edges(), alpha, cells.to_vec())
    };
    let sys = assemble(&problem)?;
    let result = solve_pencil(config, &sys.stiffness, &sys.mass, &format!("alpha = {alpha}, mesh {}", mesh_label(cells)))?;
    Ok(BoxSolve {
        cells: cells.to_vec(),
        stiffness: sys.stiffness,
        mass: sys.mass,
        result,
    })
}

fn solve_pencil(config: &RunConfig, k: &SparseSymMatrix, m: &SparseSymMatrix, case: &str) -> Result<EigenResult> {
    smallest_eigenpairs(k, m, config.m, &solver_options(config)).map_err(|source| HarnessError::Eigen {
        case: case.into(),
        source,
    })
}

/// Mode `solve`: one spectrum per `domain.alpha`, written to
/// `spectrum_alpha_<α>.txt` (with `K`/`M` dumps if requested) when an output
/// directory is configured.
pub fn run_solve(config: &RunConfig) -> Result<Vec<(Case, Spectrum)>> {
    expect_mode(config, Mode::Solve)?;
    if let (Some(kp), Some(mp)) = (&config.matrix_k, &config.matrix_m) {
        let k = matrix_market::read(kp)?;
        let m = matrix_market::read(mp)?;
        let alpha = config.alphas[0];
        let result = solve_pencil(config, &k, &m, &format!("{} / {}", kp.display(), mp.display()))?;
        let label = format!("{} {}", kp.display(), mp.display());
        let spectrum = Spectrum::computed(config.dim(), alpha, result.values, Some(label), result.residuals, config.tol)?;
        let case = Case::alpha(alpha);
        if let Some(dir) = output_dir(config)? {
            spectrum_io::write(&dir.join(format!("spectrum_{}.txt", case.label())), &spectrum)?;
        }
        return Ok(vec![(case, spectrum)]);
    }

    let solves = config
        .alphas
        .par_iter()
        .map(|&alpha| solve_box(config, alpha, &config.cells).map(|s| (alpha, s)))
        .collect::<Result<Vec<_>>>()?;
    let dir = output_dir(config)?;
    let mut out = Vec::with_capacity(solves.len());
    for (alpha, s) in solves {
        let case = Case::alpha(alpha);
        let spectrum = Spectrum::computed(
            config.dim(),
            alpha,
            s.result.values,
            Some(mesh_label(&s.cells)),
            s.result.residuals,
            config.tol,
        )?;
        if let Some(dir) = &dir {
            spectrum_io::write(&dir.join(format!("spectrum_{}.txt", case.label())), &spectrum)?;
            if config.matrix_market {
                let note = format!("alpha = {alpha}, mesh {}", mesh_label(&s.cells));
                matrix_market::write(&dir.join(format!("K_{}.mtx", case.label())), &s.stiffness, Some(&note))?;
                matrix_market::write(&dir.join(format!("M_{}.mtx", case.label())), &s.mass, Some(&note))?;
            }
        }
        out.push((case, spectrum));
    }
    Ok(out)
}

/// Mode `bounds` (and `verify` on a spectrum file): evaluates every bound on
/// the loaded spectrum with the fixed relative slack `verify.tol`.
pub fn run_bounds(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    let path = config
        .spectrum
        .as_ref()
        .ok_or_else(|| HarnessError::Config("`input.spectrum` is required".into()))?;
    let spectrum = spectrum_io::read(path, config.tol)?;
    let geometry = match &config.edges {
        Some(e) if e.len() == spectrum.dim() => Some(DomainGeometry::from_edges(e.clone())?),
        _ => None,
    };
    let records = evaluate_all(&spectrum, geometry.as_ref(), config.k_max, &ErrorBudget::fixed(config.verify_tol));
    let residuals = match spectrum.source() {
        elastica_core::SpectrumSource::Computed { residuals, .. } => residuals.clone(),
        elastica_core::SpectrumSource::Synthetic => Vec::new(),
    };
    let provenance = Provenance::new(config.seed, Policy::Fixed.as_str(), Some(path.display().to_string()), residuals, None);
    Ok(vec![build_report(config, Case::alpha(spectrum.alpha()), Some(spectrum), Vec::new(), records, provenance)])
}

/// Mode `verify`: solves the box for each `domain.alpha` (at `N` and `2N`
/// under the Richardson policy) and evaluates every bound.
pub fn run_verify(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    expect_mode(config, Mode::Verify)?;
    if config.loads_spectrum() {
        return run_bounds(config);
    }
    config.alphas.par_iter().map(|&alpha| verify_alpha(config, alpha)).collect()
}

fn verify_alpha(config: &RunConfig, alpha: f64) -> Result<VerificationReport> {
    let dim = config.dim();
    let geometry = DomainGeometry::from_edges(config.solve_edges())?;
    let (spectrum, budget, provenance) = match config.policy {
        Policy::Fixed => {
            let s = solve_box(config, alpha, &config.cells)?;
            let mesh = mesh_label(&config.cells);
            let residuals = s.result.residuals.clone();
            let spectrum = Spectrum::computed(dim, alpha, s.result.values, Some(mesh.clone()), residuals.clone(), config.tol)?;
            let provenance = Provenance::new(config.seed, Policy::Fixed.as_str(), Some(mesh), residuals, None);
            (spectrum, ErrorBudget::fixed(config.verify_tol), provenance)
        }
        Policy::Richardson => {
            let fine_cells: Vec<usize> = config.cells.iter().map(|c| 2 * c).collect();
            let (coarse, fine) = rayon::join(
                || solve_box(config, alpha, &config.cells),
                || solve_box(config, alpha, &fine_cells),
            );
            let (coarse, fine) = (coarse?.result, fine?.result);
            let ext = richardson_pairs(&coarse.values, &fine.values, 2.0, config.verify_tol);
            let residuals: Vec<f64> = ext
                .order
                .iter()
                .map(|&i| coarse.residuals[i].max(fine.residuals[i]))
                .collect();
            let mesh = format!("{}+{}", mesh_label(&config.cells), mesh_label(&fine_cells));
            let spectrum = Spectrum::computed(dim, alpha, ext.values.clone(), Some(mesh.clone()), residuals.clone(), config.tol)?;
            let richardson = Richardson {
                ratio: 2.0,
                coarse: coarse.values,
                fine: fine.values,
                budget: ext.budget.clone(),
            };
            let provenance = Provenance::new(config.seed, Policy::Richardson.as_str(), Some(mesh), residuals, Some(richardson));
            (spectrum, ErrorBudget::per_value(config.verify_tol, ext.budget), provenance)
        }
    };
    let records = evaluate_all(&spectrum, Some(&geometry), config.k_max, &budget);
    Ok(build_report(config, Case::alpha(alpha), Some(spectrum), Vec::new(), records, provenance))
}

/// Extrapolated values sorted ascending, with their budgets and the
/// original index of each.
pub struct Extrapolated {
    pub values: Vec<f64>,
    pub budget: Vec<f64>,
    pub order: Vec<usize>,
}

/// Pairs the `i`-th coarse and fine values, extrapolates, and budgets each
/// by `max(tol · |σ*|, |fine − coarse|)`.
pub fn richardson_pairs(coarse: &[f64], fine: &[f64], ratio: f64, tol: f64) -> Extrapolated {
    let ext: Vec<f64> = coarse.iter().zip(fine).map(|(&c, &f)| extrapolate(c, f, ratio)).collect();
    let mut order: Vec<usize> = (0..ext.len()).collect();
    order.sort_by(|&a, &b| ext[a].total_cmp(&ext[b]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| ext[i]).collect();
    let budget = order
        .iter()
        .map(|&i| (tol * ext[i].abs()).max((fine[i] - coarse[i]).abs()))
        .collect();
    Extrapolated { values, budget, order }
}

/// Mode `cap`: for each `cap.theta0`, the first eigenvalue of all five cap
/// problems and the records comparing them.
pub fn run_cap(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    expect_mode(config, Mode::Cap)?;
    config.theta0.par_iter().map(|&t| cap_case(config, t)).collect()
}

fn cap_levels(config: &RunConfig) -> Vec<usize> {
    match config.policy {
        Policy::Fixed => vec![config.radial_cells],
        Policy::Richardson => vec![config.radial_cells, 2 * config.radial_cells],
    }
}

/// Solves one cap problem at one resolution, with the modes in parallel.
pub fn solve_cap(problem: &CapProblem, options: &SolverOptions) -> Result<CapSolution> {
    let case = || format!("{} at theta0 = {}, N = {}", problem.kind.as_str(), problem.theta0, problem.radial_cells);
    problem.validate().map_err(|source| HarnessError::Cap { case: case(), source })?;
    let modes = (0..=problem.mode_max)
        .into_par_iter()
        .map(|m| cap1d::solve_mode(problem, m, options))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|source| HarnessError::Cap { case: case(), source })?;
    let sol = CapSolution::from_modes(*problem, problem.attainable_tolerance(options.tol), modes);
    if problem.kind == CapKind::DirichletLaplacian && sol.minimizing_mode != 0 {
        return Err(HarnessError::Cap {
            case: case(),
            source: CapError::NonRadialMinimizer(sol.minimizing_mode),
        });
    }
    Ok(sol)
}

/// First eigenvalue of `kind` on the cap, extrapolated over the configured
/// levels.
pub fn cap_value(config: &RunConfig, theta0: f64, kind: CapKind) -> Result<CapValue> {
    let levels = cap_levels(config);
    let opts = solver_options(config);
    let sols = levels
        .par_iter()
        .map(|&n| solve_cap(&CapProblem::new(theta0, kind, config.mode_max, n), &opts))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = sols.iter().map(|s| s.value).collect();
    let (value, budget) = match values.as_slice() {
        [v] => (*v, config.verify_tol * v.abs()),
        [c, f] => {
            let ratio = (2.0 * levels[0] as f64 + 0.5) / (levels[0] as f64 + 0.5);
            let e = richardson_pairs(&[*c], &[*f], ratio, config.verify_tol);
            (e.values[0], e.budget[0])
        }
        _ => unreachable!("one or two levels"),
    };
    let finest = sols.last().expect("at least one level");
    Ok(CapValue {
        kind,
        theta0,
        mode_max: config.mode_max,
        radial_cells: levels,
        levels: values,
        value,
        budget,
        minimizing_mode: finest.minimizing_mode,
        per_mode: finest.per_mode.clone(),
        residual: sols.iter().map(|s| s.residual).fold(0.0, f64::max),
    })
}

fn cap_case(config: &RunConfig, theta0: f64) -> Result<VerificationReport> {
    let values = CapKind::ALL
        .par_iter()
        .map(|&k| cap_value(config, theta0, k))
        .collect::<Result<Vec<_>>>()?;
    let records = cap_records(theta0, &values, config.verify_tol);
    let mesh = format!(
        "radial_cells={} mode_max={}",
        cap_levels(config).iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        config.mode_max
    );
    let residuals = values.iter().map(|v| v.residual).collect();
    let provenance = Provenance::new(config.seed, config.policy.as_str(), Some(mesh), residuals, None);
    Ok(build_report(config, Case::theta0(theta0), None, values, records, provenance))
}

/// Records for one cap, in the order clamped, buckling, then the three
/// problems that need a convex boundary (Dirichlet, p, q).
///
/// At the hemisphere the last three are predicted equalities. For
/// `θ₀ > π/2` the boundary is concave: those three are skipped and the
/// clamped and buckling records are marked exploratory.
pub fn cap_records(theta0: f64, values: &[CapValue], tol: f64) -> Vec<BoundRecord> {
    let get = |kind: CapKind| values.iter().find(|v| v.kind == kind).expect("all five kinds are solved");
    let lam = get(CapKind::DirichletLaplacian);
    let gam = get(CapKind::Clamped);
    let buck = get(CapKind::Buckling);
    let p = get(CapKind::PProblem);
    let q = get(CapKind::QProblem);
    let n = CAP_DIM;
    let slack = |bound: f64, measured: f64, deltas: f64| tol * bound.abs().max(measured.abs()) + deltas;

    let hemisphere = (theta0 - PI / 2.0).abs() <= 1e-12;
    let concave = theta0 > PI / 2.0 && !hemisphere;
    let exploratory = |r: BoundRecord| if concave { r.with_note("exploratory: concave boundary") } else { r };

    let mut records = vec![
        exploratory(BoundRecord::lower(
            "clamped_over_dirichlet",
            BoundKind::FirstLower,
            1,
            n * lam.value,
            gam.value,
            slack(n * lam.value, gam.value, gam.budget + n * lam.budget),
        )),
        exploratory(BoundRecord::lower(
            "buckling_first",
            BoundKind::FirstLower,
            1,
            n,
            buck.value,
            slack(n, buck.value, buck.budget),
        )),
    ];

    let convex_checks = [
        ("dirichlet_first", n, lam.value, lam.budget),
        ("p_over_dirichlet", n * lam.value, p.value, p.budget + n * lam.budget),
        ("q_first", n, q.value, q.budget),
    ];
    for (name, bound, measured, deltas) in convex_checks {
        let tolerance = slack(bound, measured, deltas);
        records.push(if concave {
            BoundRecord::skip(
                name,
                BoundKind::FirstLower,
                Side::Lower,
                1,
                "hypothesis not satisfied: boundary mean curvature is negative".into(),
            )
        } else if hemisphere {
            BoundRecord::equality(name, BoundKind::Equality, 1, bound, measured, tolerance)
        } else {
            BoundRecord::lower(name, BoundKind::FirstLower, 1, bound, measured, tolerance)
        });
    }
    records
}

fn build_report(
    config: &RunConfig,
    case: Case,
    spectrum: Option<Spectrum>,
    cap: Vec<CapValue>,
    records: Vec<BoundRecord>,
    provenance: Provenance,
) -> VerificationReport {
    VerificationReport {
        case,
        config: config.echo(),
        spectrum,
        cap,
        summary: Summary::tally(&records),
        records,
        provenance,
    }
}

/// Rendered outputs of a set of reports.
pub struct Rendered {
    pub reports: Vec<VerificationReport>,
    pub csv: String,
    pub table: String,
    pub plots: Vec<(String, String)>,
}

impl Rendered {
    pub fn new(reports: Vec<VerificationReport>) -> Self {
        Self {
            csv: report::csv(&reports),
            table: report::table(&reports),
            plots: reports.iter().flat_map(report::svg_plots).collect(),
            reports,
        }
    }

    pub fn exit_code(&self) -> i32 {
        report::exit_code(&self.reports)
    }
}

/// Mode `report`: loads saved reports and renders them together.
pub fn run_report(config: &RunConfig) -> Result<Rendered> {
    expect_mode(config, Mode::Report)?;
    let reports = config
        .report_inputs
        .iter()
        .map(|p| VerificationReport::load(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Rendered::new(reports))
}

/// Writes the requested formats into the output directory and returns the
/// paths written. Saved reports are only re-emitted as JSON outside mode
/// `report`.
pub fn write_outputs(config: &RunConfig, rendered: &Rendered) -> Result<Vec<PathBuf>> {
    let Some(dir) = output_dir(config)? else {
        return Ok(Vec::new());
    };
    let mut written = Vec::new();
    let mut put = |path: PathBuf, text: &str| -> Result<()> {
        std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    if config.wants(OutputFormat::Json) && config.mode != Mode::Report {
        for r in &rendered.reports {
            put(dir.join(format!("report_{}.json", r.case.label())), &r.to_json())?;
        }
    }
    if config.wants(OutputFormat::Csv) {
        put(dir.join("report.csv"), &rendered.csv)?;
    }
    if config.wants(OutputFormat::Table) {
        put(dir.join("report.txt"), &rendered.table)?;
    }
    if config.wants(OutputFormat::Svg) {
        let plots = dir.join("plots");
        std::fs::create_dir_all(&plots).map_err(|e| HarnessError::io(&plots, e))?;
        for (name, svg) in &rendered.plots {
            put(plots.join(name), svg)?;
        }
    }
    Ok(written)
}

fn output_dir(config: &RunConfig) -> Result<Option<PathBuf>> {
    match &config.output {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
            Ok(Some(dir.clone()))
        }
        None => Ok(None),
    }
}

fn expect_mode(config: &RunConfig, mode: Mode) -> Result<()> {
    if config.mode == mode {
        Ok(())
    } else {
        Err(HarnessError::Config(format!(
            "configuration was loaded for mode {}, not {}",
            config.mode.as_str(),
            mode.as_str()
        )))
    }
}

/// Runs the configured mode end to end: computes, writes outputs, and
/// returns the rendered reports (empty for `solve`).
pub fn run(config: &RunConfig) -> Result<Rendered> {
    let reports = match config.mode {
        Mode::Solve => {
            run_solve(config)?;
            return Ok(Rendered::new(Vec::new()));
        }
        Mode::Bounds => run_bounds(config)?,
        Mode::Verify => run_verify(config)?,
        Mode::Cap => run_cap(config)?,
        Mode::Report => return run_report(config).and_then(|r| write_outputs(config, &r).map(|_| r)),
    };
    let rendered = Rendered::new(reports);
    write_outputs(config, &rendered)?;
    Ok(rendered)
}

/// Case summary line, e.g. `alpha = 0.5: 120 pass, 0 marginal, 0 fail, 31 skip`.
pub fn summary_line(r: &VerificationReport) -> String {
    let s = &r.summary;
    format!(
        "{} = {}: {} pass, {} marginal, {} fail, {} skip",
        r.case.parameter, r.case.value, s.pass, s.marginal, s.fail, s.skip
    )
}
