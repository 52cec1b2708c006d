use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::dense::symmetric_eigen;
use super::{EigenError, EigenResult, Pencil, SolverOptions};

/// M-orthonormal basis together with `M v` for each vector.
struct Basis {
    vectors: Vec<Vec<f64>>,
    mass_images: Vec<Vec<f64>>,
}

impl Basis {
    fn new() -> Self {
        Self {
            vectors: Vec::new(),
            mass_images: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Orthogonalizes `z` against the basis (classical Gram–Schmidt, two
    /// passes) and appends it unless it is numerically dependent: a vector
    /// that still loses more than half its length in the second pass lies in
    /// the span to working precision.
    fn push<P: Pencil>(&mut self, pencil: &P, mut z: Vec<f64>, scratch: &mut [f64]) -> Result<bool, EigenError> {
        pencil.apply_mass(&z, scratch);
        let mut norm2 = dot(&z, scratch);
        if !(norm2 > 0.0) {
            return Err(EigenError::IndefiniteMass {
                row: largest_entry(&z),
            });
        }
        let mut previous = norm2;
        for _pass in 0..2 {
            previous = norm2;
            let coeffs: Vec<f64> = self.mass_images.iter().map(|mv| dot(&z, mv)).collect();
            for (c, v) in coeffs.iter().zip(&self.vectors) {
                axpy(-c, v, &mut z);
            }
            pencil.apply_mass(&z, scratch);
            norm2 = dot(&z, scratch);
            if norm2 < -1e-12 * previous {
                return Err(EigenError::IndefiniteMass {
                    row: largest_entry(&z),
                });
            }
        }
        let after = norm2;
        if !(after > 0.25 * previous) || after == 0.0 {
            return Ok(false);
        }
        let inv = 1.0 / libm::sqrt(after);
        z.iter_mut().for_each(|v| *v *= inv);
        let mv = scratch.iter().map(|v| v * inv).collect();
        self.vectors.push(z);
        self.mass_images.push(mv);
        Ok(true)
    }
}

pub(crate) fn block_krylov<P: Pencil>(
    pencil: &P,
    m: usize,
    options: &SolverOptions,
) -> Result<EigenResult, EigenError> {
    let n = pencil.order();
    let width = (m + options.block_size.max(1)).min(n);
    let max_dim = (width * options.krylov_blocks.max(2)).min(n);
    let mut scratch = vec![0.0; n];

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut start: Vec<Vec<f64>> = (0..width)
        .map(|_| (0..n).map(|_| uniform(&mut rng)).collect())
        .collect();

    let mut last = None;
    for iteration in 1..=options.max_iterations {
        let mut basis = Basis::new();
        let mut block = Vec::new();
        for x in start.drain(..) {
            if basis.push(pencil, x, &mut scratch)? {
                block.push(basis.len() - 1);
            }
        }
        while basis.len() < max_dim && !block.is_empty() {
            block.truncate(max_dim - basis.len());
            let rhs: Vec<&[f64]> = block.iter().map(|&i| basis.mass_images[i].as_slice()).collect();
            let mut solved = vec![vec![0.0; n]; block.len()];
            let mut out: Vec<&mut [f64]> = solved.iter_mut().map(|z| z.as_mut_slice()).collect();
            pencil.solve_many(&rhs, &mut out);
            let mut next = Vec::new();
            for z in solved {
                if basis.push(pencil, z, &mut scratch)? {
                    next.push(basis.len() - 1);
                }
            }
            block = next;
        }

        let q = basis.len();
        let stiff_images: Vec<Vec<f64>> = basis
            .vectors
            .iter()
            .map(|v| {
                let mut kv = vec![0.0; n];
                pencil.apply_stiffness(v, &mut kv);
                kv
            })
            .collect();
        let mut h = vec![0.0; q * q];
        for i in 0..q {
            for j in i..q {
                let a = dot(&basis.vectors[i], &stiff_images[j]);
                let b = dot(&basis.vectors[j], &stiff_images[i]);
                let s = 0.5 * (a + b);
                h[i * q + j] = s;
                h[j * q + i] = s;
            }
        }
        let eig = symmetric_eigen(q, &h);
        let keep = width.min(q);
        let ritz: Vec<Vec<f64>> = (0..keep).map(|k| combine(&basis.vectors, &eig.vectors, q, k)).collect();

        let mut values = Vec::with_capacity(m);
        let mut residuals = Vec::with_capacity(m);
        for k in 0..m.min(keep) {
            let kx = combine(&stiff_images, &eig.vectors, q, k);
            let mx = combine(&basis.mass_images, &eig.vectors, q, k);
            values.push(eig.values[k]);
            residuals.push(relative_residual(&kx, &mx, eig.values[k]));
        }
        let projected_ok = residuals.len() == m && residuals.iter().all(|&r| r <= options.tol);
        if projected_ok || iteration == options.max_iterations {
            let vectors: Vec<Vec<f64>> = ritz[..values.len()].to_vec();
            let residuals = explicit_residuals(pencil, &vectors, &values);
            let converged: Vec<bool> = residuals.iter().map(|&r| r <= options.tol).collect();
            let result = EigenResult {
                values,
                vectors,
                residuals,
                iterations: iteration,
                converged,
                tolerance: options.tol,
            };
            if result.values.len() == m && result.all_converged() {
                return Ok(result);
            }
            last = Some(result);
            if iteration == options.max_iterations {
                break;
            }
        }
        start = ritz;
    }

    let partial = last.expect("at least one iteration runs");
    let mut unconverged: Vec<usize> = partial
        .converged
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| i)
        .collect();
    unconverged.extend(partial.values.len()..m);
    Err(EigenError::NotConverged {
        partial: Box::new(partial),
        unconverged,
    })
}

fn explicit_residuals<P: Pencil>(pencil: &P, vectors: &[Vec<f64>], values: &[f64]) -> Vec<f64> {
    let n = pencil.order();
    let mut kx = vec![0.0; n];
    let mut mx = vec![0.0; n];
    vectors
        .iter()
        .zip(values)
        .map(|(x, &v)| {
            pencil.apply_stiffness(x, &mut kx);
            pencil.apply_mass(x, &mut mx);
            relative_residual(&kx, &mx, v)
        })
        .collect()
}

fn relative_residual(kx: &[f64], mx: &[f64], value: f64) -> f64 {
    let r: f64 = kx.iter().zip(mx).map(|(a, b)| (a - value * b) * (a - value * b)).sum();
    let d: f64 = mx.iter().map(|b| b * b).sum();
    libm::sqrt(r) / (libm::fabs(value) * libm::sqrt(d))
}

/// Column `k` of `basis · coeffs`, where `coeffs` is `q × q` row-major.
fn combine(basis: &[Vec<f64>], coeffs: &[f64], q: usize, k: usize) -> Vec<f64> {
    let n = basis[0].len();
    let mut out = vec![0.0; n];
    for (j, v) in basis.iter().enumerate() {
        let c = coeffs[j * q + k];
        if c != 0.0 {
            axpy(c, v, &mut out);
        }
    }
    out
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random mantissa bits mapped to [-1, 1)
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    2.0 * u - 1.0
}

fn largest_entry(z: &[f64]) -> usize {
    z.iter()
        .enumerate()
        .max_by(|a, b| libm::fabs(*a.1).total_cmp(&libm::fabs(*b.1)))
        .map_or(0, |(i, _)| i)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
