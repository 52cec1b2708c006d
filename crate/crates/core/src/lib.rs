//! Numerical core for checking universal eigenvalue inequalities.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every pure piece of the
//! toolkit:
//!
//! * [`bounds`] evaluates the Yang-type, Hook, Levitin–Parnovski,
//!   Levine–Protter and related inequalities for the Dirichlet eigenvalue
//!   problem `Δu + α grad(div u) = −σu` on a spectrum.
//! * [`assembly`] discretizes that problem on boxes with multilinear finite
//!   elements, producing a symmetric generalized pencil `(K, M)`.
//! * [`eigensolve`] computes the smallest eigenpairs of sparse or banded
//!   symmetric pencils.
//! * [`cap1d`] computes first eigenvalues of the Dirichlet Laplacian and four
//!   biharmonic problems on geodesic caps of the unit 2-sphere.
//!
//! File formats, configuration and the command line live in the `elastica`
//! crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod bounds;
pub mod cap1d;
pub mod eigensolve;
pub mod richardson;
pub mod sparse;

pub use assembly::{assemble, reference_spectrum_alpha0, AssembledSystem, ElasticityProblem};
pub use bounds::{BoundKind, BoundRecord, DomainGeometry, Side, Spectrum, SpectrumSource, Verdict};
pub use cap1d::{CapKind, CapProblem, CapSolution};
pub use eigensolve::{banded_smallest, smallest_eigenpairs, EigenError, EigenResult, SolverOptions};
pub use sparse::{BandedSymMatrix, SparseSymMatrix};
