//! First eigenvalues on geodesic caps `{θ < θ₀}` of the unit 2-sphere.
//!
//! Each problem separates into azimuthal modes `u(θ) e^{imφ}`; mode `m` is
//! governed by `L_m u = u″ + cot θ u′ − m² u / sin²θ`. The radial interval is
//! discretized on a grid staggered half a cell away from the pole,
//! `θ_j = (j − ½) h` with `h = θ₀ / (N + ½)`, so that `θ_{N+1} = θ₀` is the
//! boundary node and no singular coefficient is ever evaluated at `θ = 0`.
//!
//! The second-order pencil `(S, W)` comes from the weighted form
//! `∫ (u′v′ + m² uv / sin²θ) sin θ dθ` against `∫ uv sin θ dθ`. The
//! fourth-order energies are assembled as `Gᵀ D G`, where `G` maps nodal values
//! to the discrete `L_m u` at the interior nodes and at the boundary node and
//! `D` holds the quadrature weights. This is the mixed form with `w = L_m u`
//! after eliminating `w`. Boundary data enter through one ghost node beyond
//! `θ₀`: it mirrors `u_N` for clamped conditions, and for `u = u″ = 0` it is
//! left free, together with the boundary term `−cot θ₀ sin θ₀ u′(θ₀)²`, and
//! condensed out.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::eigensolve::{banded_smallest, EigenError, SolverOptions};
use crate::sparse::BandedSymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CapKind {
    /// `−Δu = λu`, `u = 0` on the boundary.
    DirichletLaplacian,
    /// `Δ²u = Γu`, `u = ∂_ν u = 0`.
    Clamped,
    /// `Δ²u = −ΛΔu`, `u = ∂_ν u = 0`.
    Buckling,
    /// `Δ²u = pu`, `u = ∂²_ν u = 0`.
    PProblem,
    /// `Δ²u = −qΔu`, `u = ∂²_ν u = 0`.
    QProblem,
}

impl CapKind {
    pub const ALL: [CapKind; 5] = [
        Self::DirichletLaplacian,
        Self::Clamped,
        Self::Buckling,
        Self::PProblem,
        Self::QProblem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DirichletLaplacian => "dirichlet_laplacian",
            Self::Clamped => "clamped",
            Self::Buckling => "buckling",
            Self::PProblem => "p_problem",
            Self::QProblem => "q_problem",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn is_fourth_order(self) -> bool {
        self != Self::DirichletLaplacian
    }

    /// Whether the right-hand side is `−Δu` rather than `u`.
    fn dirichlet_energy_mass(self) -> bool {
        matches!(self, Self::Buckling | Self::QProblem)
    }
}

/// A cap, a problem on it, and its discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapProblem {
    pub theta0: f64,
    pub kind: CapKind,
    /// Modes `0..=mode_max` are solved.
    pub mode_max: usize,
    pub radial_cells: usize,
}

pub const MIN_RADIAL_CELLS: usize = 16;

impl CapProblem {
    pub fn new(theta0: f64, kind: CapKind, mode_max: usize, radial_cells: usize) -> Self {
        Self {
            theta0,
            kind,
            mode_max,
            radial_cells,
        }
    }

    pub fn hemisphere(kind: CapKind, mode_max: usize, radial_cells: usize) -> Self {
        Self::new(PI / 2.0, kind, mode_max, radial_cells)
    }

    pub fn with_kind(self, kind: CapKind) -> Self {
        Self { kind, ..self }
    }

    pub fn spacing(&self) -> f64 {
        self.theta0 / (self.radial_cells as f64 + 0.5)
    }

    /// Unknown nodes `θ_1, …, θ_N`.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (1..=self.radial_cells).map(|j| (j as f64 - 0.5) * h).collect()
    }

    /// Boundary mean curvature `cot θ₀` is non-negative.
    pub fn convex_boundary(&self) -> bool {
        self.theta0 <= PI / 2.0
    }

    pub fn validate(&self) -> Result<(), CapError> {
        if !(self.theta0 > 0.0 && self.theta0 < PI) {
            return Err(CapError::InvalidAngle(self.theta0));
        }
        if self.radial_cells < MIN_RADIAL_CELLS {
            return Err(CapError::TooFewCells(self.radial_cells));
        }
        // the ghost half-node must stay inside (0, π)
        if (self.radial_cells as f64 + 1.0) * self.spacing() >= PI {
            return Err(CapError::InvalidAngle(self.theta0));
        }
        Ok(())
    }

    /// Residual tolerance actually demanded of the mode solves.
    ///
    /// Rounding in `A x` limits the attainable relative residual of a
    /// fourth-order pencil to about `ε h⁻⁴`; the request is raised to a
    /// small multiple of that.
    pub fn attainable_tolerance(&self, requested: f64) -> f64 {
        if self.kind.is_fourth_order() {
            let h = self.spacing();
            requested.max(16.0 * f64::EPSILON / (h * h * h * h))
        } else {
            requested
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CapError {
    #[error("cap angle must lie in (0, π) with room for one ghost cell, got {0}")]
    InvalidAngle(f64),
    #[error("at least {MIN_RADIAL_CELLS} radial cells are required, got {0}")]
    TooFewCells(usize),
    #[error("operation expects a {expected} problem, got {got}", expected = .expected.as_str(), got = .got.as_str())]
    WrongKind { expected: CapKind, got: CapKind },
    #[error("boundary condensation is singular; refine the radial mesh")]
    SingularBoundary,
    #[error("first Dirichlet eigenfunction found in mode {0}, expected the radial mode")]
    NonRadialMinimizer(usize),
    #[error("mode {mode}: {source}")]
    Eigen {
        mode: usize,
        #[source]
        source: EigenError,
    },
}

/// Radial pencil of one azimuthal mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    pub m: usize,
    /// Weighted Dirichlet form, tridiagonal.
    pub stiffness: BandedSymMatrix,
    /// `h sin θ_j`, diagonal.
    pub weight: BandedSymMatrix,
    h: f64,
    theta0: f64,
    /// `sin(j h)` for `j = 0..=N+1` (half-nodes; index 0 is the pole).
    s_half: Vec<f64>,
    sin_node: Vec<f64>,
}

impl ModeOperator {
    pub fn new(problem: &CapProblem, m: usize) -> Self {
        let n = problem.radial_cells;
        let h = problem.spacing();
        let mf = (m * m) as f64;
        let s_half: Vec<f64> = (0..=n + 1).map(|j| libm::sin(j as f64 * h)).collect();
        let sin_node: Vec<f64> = (1..=n).map(|j| libm::sin((j as f64 - 0.5) * h)).collect();
        let mut stiffness = BandedSymMatrix::zeros(n, 1);
        let mut weight = BandedSymMatrix::zeros(n, 0);
        for i in 0..n {
            // node j = i + 1 sits between half-nodes i and i + 1
            let diag = (s_half[i] + s_half[i + 1]) / h + h * mf / sin_node[i];
            stiffness.set(i, i, diag);
            if i + 1 < n {
                stiffness.set(i + 1, i, -s_half[i + 1] / h);
            }
            weight.set(i, i, h * sin_node[i]);
        }
        Self {
            m,
            stiffness,
            weight,
            h,
            theta0: problem.theta0,
            s_half,
            sin_node,
        }
    }

    pub fn order(&self) -> usize {
        self.sin_node.len()
    }

    /// Coefficients `(u_{j−1}, u_j, u_{j+1})` of the discrete `L_m u` at
    /// interior node `i` (0-based).
    fn interior_row(&self, i: usize) -> [f64; 3] {
        let h2s = self.h * self.h * self.sin_node[i];
        let mf = (self.m * self.m) as f64;
        let (lo, hi) = (self.s_half[i], self.s_half[i + 1]);
        [lo / h2s, -(lo + hi) / h2s - mf / (self.sin_node[i] * self.sin_node[i]), hi / h2s]
    }

    /// `Gᵀ D G` for the boundary conditions of `kind`.
    pub fn fourth_order(&self, kind: CapKind) -> Result<BandedSymMatrix, CapError> {
        let n = self.order();
        let mut a = BandedSymMatrix::zeros(n, 2);
        for i in 0..n {
            let row = self.interior_row(i);
            let d = self.h * self.sin_node[i];
            let cols = [i as isize - 1, i as isize, i as isize + 1];
            for p in 0..3 {
                for q in 0..=p {
                    let (cp, cq) = (cols[p], cols[q]);
                    if cp < 0 || cq < 0 || cp >= n as isize || cq >= n as isize {
                        continue;
                    }
                    a.add(cp as usize, cq as usize, d * row[p] * row[q]);
                }
            }
        }
        // boundary node θ₀: L u = a u_N + c g, with g the ghost value
        let sin0 = libm::sin(self.theta0);
        let h2s = self.h * self.h * sin0;
        let coef_n = self.s_half[n] / h2s;
        let coef_g = self.s_half[n + 1] / h2s;
        let d = 0.5 * self.h * sin0;
        let last = n - 1;
        match kind {
            CapKind::Clamped | CapKind::Buckling => {
                let c = coef_n + coef_g;
                a.add(last, last, d * c * c);
            }
            CapKind::PProblem | CapKind::QProblem => {
                let kappa = libm::cos(self.theta0) / (4.0 * self.h * self.h);
                let e11 = d * coef_n * coef_n - kappa;
                let e12 = d * coef_n * coef_g + kappa;
                let e22 = d * coef_g * coef_g - kappa;
                if !(e22 > 0.0) {
                    return Err(CapError::SingularBoundary);
                }
                a.add(last, last, e11 - e12 * e12 / e22);
            }
            CapKind::DirichletLaplacian => {
                return Err(CapError::WrongKind {
                    expected: CapKind::Clamped,
                    got: kind,
                })
            }
        }
        Ok(a)
    }

    /// Left and right matrices of the mode pencil for `kind`.
    pub fn pencil(&self, kind: CapKind) -> Result<(BandedSymMatrix, BandedSymMatrix), CapError> {
        if kind == CapKind::DirichletLaplacian {
            return Ok((self.stiffness.clone(), self.weight.clone()));
        }
        let a = self.fourth_order(kind)?;
        let b = if kind.dirichlet_energy_mass() {
            self.stiffness.clone()
        } else {
            self.weight.clone()
        };
        Ok((a, b))
    }
}

/// Smallest eigenvalue of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub m: usize,
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Nodal values at `θ_1..θ_N`, scaled to unit maximum with a positive
    /// extremum.
    pub vector: Vec<f64>,
}

/// Minimum over modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CapSolution {
    pub problem: CapProblem,
    pub value: f64,
    pub minimizing_mode: usize,
    /// Smallest eigenvalue of each mode `0..=mode_max`.
    pub per_mode: Vec<f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub eigenvector: Vec<f64>,
}

impl CapSolution {
    /// Aggregates mode solutions given in any order. Ties go to the lowest
    /// mode, so the result does not depend on the order of `modes`.
    pub fn from_modes(problem: CapProblem, tolerance: f64, mut modes: Vec<ModeSolution>) -> Self {
        assert!(!modes.is_empty(), "at least one mode");
        modes.sort_by_key(|s| s.m);
        let best = modes
            .iter()
            .enumerate()
            .fold(0, |b, (i, s)| if s.value < modes[b].value { i } else { b });
        let per_mode = modes.iter().map(|s| s.value).collect();
        let winner = modes.swap_remove(best);
        Self {
            problem,
            value: winner.value,
            minimizing_mode: winner.m,
            per_mode,
            residual: winner.residual,
            tolerance,
            eigenvector: winner.vector,
        }
    }
}

/// Solves mode `m` of `problem`.
pub fn solve_mode(problem: &CapProblem, m: usize, options: &SolverOptions) -> Result<ModeSolution, CapError> {
    problem.validate()?;
    let op = ModeOperator::new(problem, m);
    let (a, b) = op.pencil(problem.kind)?;
    let opts = SolverOptions {
        tol: problem.attainable_tolerance(options.tol),
        ..options.clone()
    };
    let res = banded_smallest(&a, &b, 1, &opts).map_err(|source| CapError::Eigen { mode: m, source })?;
    let mut vector = res.vectors.into_iter().next().unwrap_or_default();
    let peak = vector.iter().copied().fold(0.0, |p: f64, v| if libm::fabs(v) > libm::fabs(p) { v } else { p });
    if peak != 0.0 {
        for v in &mut vector {
            *v /= peak;
        }
    }
    Ok(ModeSolution {
        m,
        value: res.values[0],
        residual: res.residuals[0],
        iterations: res.iterations,
        vector,
    })
}

/// Solves every mode `0..=mode_max` in order and takes the minimum.
pub fn solve(problem: &CapProblem, options: &SolverOptions) -> Result<CapSolution, CapError> {
    problem.validate()?;
    let modes = (0..=problem.mode_max)
        .map(|m| solve_mode(problem, m, options))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CapSolution::from_modes(*problem, problem.attainable_tolerance(options.tol), modes))
}

fn expect_kind(problem: &CapProblem, kind: CapKind) -> Result<(), CapError> {
    if problem.kind == kind {
        Ok(())
    } else {
        Err(CapError::WrongKind {
            expected: kind,
            got: problem.kind,
        })
    }
}

/// `λ₁`; fails if the minimum is not attained by the radial mode.
pub fn dirichlet_lambda1(problem: &CapProblem, options: &SolverOptions) -> Result<CapSolution, CapError> {
    expect_kind(problem, CapKind::DirichletLaplacian)?;
    let sol = solve(problem, options)?;
    if sol.minimizing_mode != 0 {
        return Err(CapError::NonRadialMinimizer(sol.minimizing_mode));
    }
    Ok(sol)
}

/// `Γ₁` of the clamped plate.
pub fn clamped_gamma1(problem: &CapProblem, options: &SolverOptions) -> Result<CapSolution, CapError> {
    expect_kind(problem, CapKind::Clamped)?;
    solve(problem, options)
}

/// `Λ₁` of the buckling problem.
pub fn buckling_lambda1(problem: &CapProblem, options: &SolverOptions) -> Result<CapSolution, CapError> {
    expect_kind(problem, CapKind::Buckling)?;
    solve(problem, options)
}

pub fn p1(problem: &CapProblem, options: &SolverOptions) -> Result<CapSolution, CapError> {
    expect_kind(problem, CapKind::PProblem)?;
    solve(problem, options)
}

pub fn q1(problem: &CapProblem, options: &SolverOptions) -> Result<CapSolution, CapError> {
    expect_kind(problem, CapKind::QProblem)?;
    solve(problem, options)
}
