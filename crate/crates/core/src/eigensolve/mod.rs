//! Smallest eigenpairs of symmetric positive-definite generalized problems
//! `K x = σ M x`.
//!
//! Both entry points factor `K − τM` once (sparse matrices are reordered by
//! reverse Cuthill–McKee and stored as a skyline profile; banded matrices are
//! factored in place) and then run a restarted block Krylov iteration on the
//! shift-inverted operator `(K − τM)⁻¹M`, with full M-reorthogonalization and
//! a Rayleigh–Ritz projection onto `K` at every restart. The block width is
//! `m + block_size`, so clusters of up to `block_size − 2` equal eigenvalues
//! beyond the `m`-th are still resolved.

mod dense;
mod krylov;
mod skyline;

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::sparse::{BandedSymMatrix, SparseSymMatrix};

pub use dense::{symmetric_eigen, SymmetricEigen};
pub use skyline::{reverse_cuthill_mckee, SkylineCholesky};

/// Tunables for [`smallest_eigenpairs`] and [`banded_smallest`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Relative residual `‖Kx − σMx‖₂ / (|σ| ‖Mx‖₂)` required of each pair.
    pub tol: f64,
    /// Restart budget.
    pub max_iterations: usize,
    pub seed: u64,
    /// Extra Ritz vectors carried beyond the `m` requested.
    pub block_size: usize,
    /// Krylov blocks generated between restarts (including the start block).
    pub krylov_blocks: usize,
    /// Spectral shift τ of the factored matrix `K − τM`; must lie below the
    /// smallest eigenvalue.
    pub shift: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iterations: 500,
            seed: 0,
            block_size: 8,
            krylov_blocks: 4,
            shift: 0.0,
        }
    }
}

/// Computed eigenpairs, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// Relative residuals, re-measured with explicit products after the
    /// iteration stopped.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: Vec<bool>,
    pub tolerance: f64,
}

impl EigenResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EigenError {
    #[error("matrix is not positive definite: pivot at row {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("mass matrix is not positive definite (row {row})")]
    IndefiniteMass { row: usize },
    #[error("dimension mismatch: stiffness has order {stiffness}, mass has order {mass}")]
    DimensionMismatch { stiffness: usize, mass: usize },
    #[error("{requested} eigenpairs requested from a problem of order {order}; at most order/4 are supported")]
    TooManyRequested { requested: usize, order: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("{} of {} eigenpairs did not converge within {} iterations (indices {:?})", .unconverged.len(), .partial.values.len(), .partial.iterations, .unconverged)]
    NotConverged {
        partial: Box<EigenResult>,
        unconverged: Vec<usize>,
    },
}

/// The `m` algebraically smallest eigenpairs of the sparse pencil `(K, M)`.
pub fn smallest_eigenpairs(
    stiffness: &SparseSymMatrix,
    mass: &SparseSymMatrix,
    m: usize,
    options: &SolverOptions,
) -> Result<EigenResult, EigenError> {
    check_request(stiffness.order(), mass.order(), m, options)?;
    for (i, d) in mass.diagonal().into_iter().enumerate() {
        if !(d > 0.0) {
            return Err(EigenError::IndefiniteMass { row: i });
        }
    }
    let factor = SkylineCholesky::factor_sparse(stiffness, mass, options.shift)?;
    let pencil = SparsePencil {
        stiffness,
        mass,
        factor,
    };
    krylov::block_krylov(&pencil, m, options)
}

/// The `m` smallest eigenpairs of the banded pencil `(A, B)`; `B` must be
/// positive definite.
pub fn banded_smallest(
    a: &BandedSymMatrix,
    b: &BandedSymMatrix,
    m: usize,
    options: &SolverOptions,
) -> Result<EigenResult, EigenError> {
    check_request(a.order(), b.order(), m, options)?;
    for i in 0..b.order() {
        if !(b.get(i, i) > 0.0) {
            return Err(EigenError::IndefiniteMass { row: i });
        }
    }
    let factor = SkylineCholesky::factor_banded(a, b, options.shift)?;
    let pencil = BandedPencil { a, b, factor };
    krylov::block_krylov(&pencil, m, options)
}

fn check_request(
    k_order: usize,
    m_order: usize,
    m: usize,
    options: &SolverOptions,
) -> Result<(), EigenError> {
    if k_order != m_order {
        return Err(EigenError::DimensionMismatch {
            stiffness: k_order,
            mass: m_order,
        });
    }
    if m == 0 || 4 * m > k_order {
        return Err(EigenError::TooManyRequested {
            requested: m,
            order: k_order,
        });
    }
    if !(options.tol > 0.0) || !options.tol.is_finite() {
        return Err(EigenError::InvalidTolerance(options.tol));
    }
    Ok(())
}

/// Operator access needed by the Krylov iteration.
pub(crate) trait Pencil {
    fn order(&self) -> usize;
    fn apply_stiffness(&self, x: &[f64], y: &mut [f64]);
    fn apply_mass(&self, x: &[f64], y: &mut [f64]);
    /// `out[c] = (K − τM)⁻¹ rhs[c]` for every column `c`.
    fn solve_many(&self, rhs: &[&[f64]], out: &mut [&mut [f64]]);
}

struct SparsePencil<'a> {
    stiffness: &'a SparseSymMatrix,
    mass: &'a SparseSymMatrix,
    factor: SkylineCholesky,
}

impl Pencil for SparsePencil<'_> {
    fn order(&self) -> usize {
        self.stiffness.order()
    }
    fn apply_stiffness(&self, x: &[f64], y: &mut [f64]) {
        self.stiffness.matvec(x, y)
    }
    fn apply_mass(&self, x: &[f64], y: &mut [f64]) {
        self.mass.matvec(x, y)
    }
    fn solve_many(&self, rhs: &[&[f64]], out: &mut [&mut [f64]]) {
        self.factor.solve_many(rhs, out)
    }
}

struct BandedPencil<'a> {
    a: &'a BandedSymMatrix,
    b: &'a BandedSymMatrix,
    factor: SkylineCholesky,
}

impl Pencil for BandedPencil<'_> {
    fn order(&self) -> usize {
        self.a.order()
    }
    fn apply_stiffness(&self, x: &[f64], y: &mut [f64]) {
        self.a.matvec(x, y)
    }
    fn apply_mass(&self, x: &[f64], y: &mut [f64]) {
        self.b.matvec(x, y)
    }
    fn solve_many(&self, rhs: &[&[f64]], out: &mut [&mut [f64]]) {
        self.factor.solve_many(rhs, out)
    }
}
