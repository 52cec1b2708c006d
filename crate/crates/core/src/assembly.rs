//! Multilinear finite-element discretization of the quadratic form
//! `∫ ∇u : ∇u + α (div u)²` and of `∫ |u|²` on an axis-aligned box with
//! homogeneous Dirichlet conditions.
//!
//! Degrees of freedom live on interior grid nodes only. They are ordered
//! component-major: all `u₁` values first, then `u₂`, …; within a component
//! nodes are lexicographic with the first coordinate varying fastest.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::sparse::SparseSymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Element {
    /// Tensor-product first-order (bilinear / trilinear) elements.
    #[default]
    Multilinear,
}

/// Box `(0, edges[0]) × … × (0, edges[n−1])`, the constant `α`, and the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityProblem {
    pub edges: Vec<f64>,
    pub alpha: f64,
    pub cells: Vec<usize>,
    pub element: Element,
    /// Replace the consistent mass matrix by its row-sum lumping.
    pub lumped_mass: bool,
}

impl ElasticityProblem {
    pub fn new(edges: Vec<f64>, alpha: f64, cells: Vec<usize>) -> Self {
        Self {
            edges,
            alpha,
            cells,
            element: Element::Multilinear,
            lumped_mass: false,
        }
    }

    /// Same box with `cells` per direction.
    pub fn uniform(edges: Vec<f64>, alpha: f64, cells: usize) -> Self {
        let n = edges.len();
        Self::new(edges, alpha, vec![cells; n])
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        let n = self.dim();
        if !(2..=3).contains(&n) {
            return Err(AssemblyError::UnsupportedDimension(n));
        }
        if self.cells.len() != n {
            return Err(AssemblyError::CellsMismatch {
                dim: n,
                given: self.cells.len(),
            });
        }
        if let Some(d) = self.edges.iter().position(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(AssemblyError::InvalidEdge { direction: d });
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(AssemblyError::InvalidAlpha(self.alpha));
        }
        if let Some(d) = self.cells.iter().position(|&c| c < 2) {
            return Err(AssemblyError::TooCoarse {
                direction: d,
                cells: self.cells[d],
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssemblyError {
    #[error("only dimensions 2 and 3 are supported, got {0}")]
    UnsupportedDimension(usize),
    #[error("{given} cell counts given for a {dim}-dimensional box")]
    CellsMismatch { dim: usize, given: usize },
    #[error("edge length in direction {direction} must be positive and finite")]
    InvalidEdge { direction: usize },
    #[error("alpha must be finite and non-negative, got {0}")]
    InvalidAlpha(f64),
    #[error("mesh too coarse: {cells} cell(s) in direction {direction} leave no interior node")]
    TooCoarse { direction: usize, cells: usize },
}

/// Mapping between degrees of freedom and interior grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub dim: usize,
    /// Interior nodes per direction (`cells − 1`).
    pub interior: Vec<usize>,
    /// Grid spacing per direction.
    pub spacing: Vec<f64>,
}

impl DofMap {
    pub fn nodes(&self) -> usize {
        self.interior.iter().product()
    }

    pub fn len(&self) -> usize {
        self.dim * self.nodes()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lexicographic index of an interior node.
    pub fn node_index(&self, idx: &[usize]) -> usize {
        let mut k = 0;
        for d in (0..self.dim).rev() {
            k = k * self.interior[d] + idx[d];
        }
        k
    }

    pub fn dof(&self, component: usize, node: usize) -> usize {
        component * self.nodes() + node
    }

    /// Coordinates of an interior node.
    pub fn position(&self, node: usize) -> Vec<f64> {
        let mut rest = node;
        (0..self.dim)
            .map(|d| {
                let i = rest % self.interior[d];
                rest /= self.interior[d];
                (i + 1) as f64 * self.spacing[d]
            })
            .collect()
    }

    /// Nodal interpolant of a vector field `field(x, component)`.
    pub fn interpolate(&self, field: impl Fn(&[f64], usize) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for node in 0..self.nodes() {
            let x = self.position(node);
            for c in 0..self.dim {
                out[self.dof(c, node)] = field(&x, c);
            }
        }
        out
    }
}

/// Output of [`assemble`].
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// `K(α) = K_lap + α K_div`
    pub stiffness: SparseSymMatrix,
    pub mass: SparseSymMatrix,
    /// Vector-Laplacian part, block diagonal over components.
    pub laplacian: SparseSymMatrix,
    /// Gram matrix of the discrete divergence.
    pub divergence: SparseSymMatrix,
    pub dofs: DofMap,
}

struct Line {
    stiff: [[f64; 2]; 2],
    mass: [[f64; 2]; 2],
    // ∫ φ_a φ_b'
    grad: [[f64; 2]; 2],
}

impl Line {
    fn new(h: f64) -> Self {
        Self {
            stiff: [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]],
            mass: [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]],
            grad: [[-0.5, 0.5], [-0.5, 0.5]],
        }
    }
}

/// Element matrices on one cell, indexed by `component * 2ⁿ + local node`.
/// Local node bits give the offset in each direction.
struct ElementMatrices {
    size: usize,
    laplacian: Vec<f64>,
    divergence: Vec<f64>,
    mass: Vec<f64>,
}

fn element_matrices(spacing: &[f64]) -> ElementMatrices {
    let n = spacing.len();
    let corners = 1usize << n;
    let size = n * corners;
    let lines: Vec<Line> = spacing.iter().map(|&h| Line::new(h)).collect();
    let bit = |a: usize, d: usize| (a >> d) & 1;

    let mut scalar_lap = vec![0.0; corners * corners];
    let mut scalar_mass = vec![0.0; corners * corners];
    for a in 0..corners {
        for b in 0..corners {
            let mut mass = 1.0;
            for d in 0..n {
                mass *= lines[d].mass[bit(a, d)][bit(b, d)];
            }
            let mut lap = 0.0;
            for dd in 0..n {
                let mut t = 1.0;
                for d in 0..n {
                    t *= if d == dd {
                        lines[d].stiff[bit(a, d)][bit(b, d)]
                    } else {
                        lines[d].mass[bit(a, d)][bit(b, d)]
                    };
                }
                lap += t;
            }
            scalar_lap[a * corners + b] = lap;
            scalar_mass[a * corners + b] = mass;
        }
    }

    let mut laplacian = vec![0.0; size * size];
    let mut divergence = vec![0.0; size * size];
    let mut mass = vec![0.0; size * size];
    // upper triangle, then mirrored, so the element matrices are bitwise symmetric
    for i in 0..size {
        let (ci, a) = (i / corners, i % corners);
        for j in i..size {
            let (cj, b) = (j / corners, j % corners);
            if ci == cj {
                laplacian[i * size + j] = scalar_lap[a * corners + b];
                mass[i * size + j] = scalar_mass[a * corners + b];
            }
            // ∫ ∂_{ci} φ_a ∂_{cj} φ_b
            let mut t = 1.0;
            for d in 0..n {
                let (x, y) = (bit(a, d), bit(b, d));
                t *= if ci == cj {
                    if d == ci {
                        lines[d].stiff[x][y]
                    } else {
                        lines[d].mass[x][y]
                    }
                } else if d == ci {
                    lines[d].grad[y][x]
                } else if d == cj {
                    lines[d].grad[x][y]
                } else {
                    lines[d].mass[x][y]
                };
            }
            divergence[i * size + j] = t;
        }
        for j in 0..i {
            laplacian[i * size + j] = laplacian[j * size + i];
            divergence[i * size + j] = divergence[j * size + i];
            mass[i * size + j] = mass[j * size + i];
        }
    }
    ElementMatrices {
        size,
        laplacian,
        divergence,
        mass,
    }
}

/// Builds `K(α)`, `M` and their ingredients for `problem`.
pub fn assemble(problem: &ElasticityProblem) -> Result<AssembledSystem, AssemblyError> {
    problem.validate()?;
    let n = problem.dim();
    let spacing: Vec<f64> = problem
        .edges
        .iter()
        .zip(&problem.cells)
        .map(|(e, &c)| e / c as f64)
        .collect();
    let dofs = DofMap {
        dim: n,
        interior: problem.cells.iter().map(|c| c - 1).collect(),
        spacing: spacing.clone(),
    };
    let nodes = dofs.nodes();
    let order = dofs.len();

    // pattern: every component of every node within one cell in each direction
    let mut rows = Vec::with_capacity(order);
    for c in 0..n {
        for node in 0..nodes {
            let _ = c;
            let idx = multi_index(node, &dofs.interior);
            let mut cols = Vec::new();
            for_each_neighbor(&idx, &dofs.interior, |nb| {
                let k = dofs.node_index(nb);
                for c2 in 0..n {
                    cols.push(dofs.dof(c2, k));
                }
            });
            rows.push(cols);
        }
    }
    let mut laplacian = SparseSymMatrix::from_pattern(order, rows);
    let mut divergence = laplacian.clone();
    let mut mass = laplacian.clone();

    let el = element_matrices(&spacing);
    let corners = 1usize << n;
    let mut local_dofs = vec![None; el.size];
    let cell_count: usize = problem.cells.iter().product();
    for cell in 0..cell_count {
        let base = multi_index(cell, &problem.cells);
        for a in 0..corners {
            // grid index g in 0..=cells; interior nodes are 1..cells-1
            let mut interior = Some(Vec::with_capacity(n));
            for d in 0..n {
                let g = base[d] + ((a >> d) & 1);
                if g == 0 || g == problem.cells[d] {
                    interior = None;
                    break;
                }
                interior.as_mut().unwrap().push(g - 1);
            }
            let node = interior.map(|idx| dofs.node_index(&idx));
            for c in 0..n {
                local_dofs[c * corners + a] = node.map(|k| dofs.dof(c, k));
            }
        }
        for i in 0..el.size {
            let Some(gi) = local_dofs[i] else { continue };
            for j in 0..el.size {
                let Some(gj) = local_dofs[j] else { continue };
                let e = i * el.size + j;
                if el.laplacian[e] != 0.0 {
                    laplacian.add(gi, gj, el.laplacian[e]);
                }
                if el.divergence[e] != 0.0 {
                    divergence.add(gi, gj, el.divergence[e]);
                }
                if el.mass[e] != 0.0 {
                    mass.add(gi, gj, el.mass[e]);
                }
            }
        }
    }

    let stiffness = laplacian.add_scaled(problem.alpha, &divergence);
    let mass = if problem.lumped_mass { mass.lumped() } else { mass };
    Ok(AssembledSystem {
        stiffness,
        mass,
        laplacian,
        divergence,
        dofs,
    })
}

fn multi_index(mut k: usize, extents: &[usize]) -> Vec<usize> {
    extents
        .iter()
        .map(|&e| {
            let i = k % e;
            k /= e;
            i
        })
        .collect()
}

fn for_each_neighbor(idx: &[usize], extents: &[usize], mut f: impl FnMut(&[usize])) {
    let n = idx.len();
    let mut nb = vec![0; n];
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut inside = true;
        for d in 0..n {
            let off = (c % 3) as isize - 1;
            c /= 3;
            let v = idx[d] as isize + off;
            if v < 0 || v >= extents[d] as isize {
                inside = false;
                break;
            }
            nb[d] = v as usize;
        }
        if inside {
            f(&nb);
        }
    }
}

/// First `count` eigenvalues of the problem at `α = 0`, where it splits into
/// `n` copies of the scalar Dirichlet Laplacian: `Σⱼ (mⱼπ/edgeⱼ)²`, `mⱼ ≥ 1`,
/// each repeated `n` times.
pub fn reference_spectrum_alpha0(edges: &[f64], count: usize) -> Vec<f64> {
    let n = edges.len();
    assert!(n >= 1, "at least one edge");
    let base: Vec<f64> = edges.iter().map(|e| (PI / e) * (PI / e)).collect();
    let mut cutoff = 4.0 * base.iter().sum::<f64>();
    loop {
        let mut found = Vec::new();
        collect_levels(&base, 0, 0.0, cutoff, &mut found);
        if found.len() * n >= count {
            found.sort_by(f64::total_cmp);
            let mut out = Vec::with_capacity(found.len() * n);
            for v in found {
                for _ in 0..n {
                    out.push(v);
                }
            }
            out.truncate(count);
            return out;
        }
        cutoff *= 2.0;
    }
}

fn collect_levels(base: &[f64], d: usize, partial: f64, cutoff: f64, out: &mut Vec<f64>) {
    if d == base.len() {
        out.push(partial);
        return;
    }
    let rest_min: f64 = base[d + 1..].iter().sum();
    let mut m = 1u64;
    loop {
        let v = partial + (m * m) as f64 * base[d];
        if v + rest_min > cutoff {
            break;
        }
        collect_levels(base, d + 1, v, cutoff, out);
        m += 1;
    }
}
