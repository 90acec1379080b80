//! Lanczos iteration with full reorthogonalization for the leading
//! eigenpairs of large sparse symmetric matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::tridiagonal_eigen;
use crate::error::{Error, Result};
use crate::graph::SparseMatrix;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Largest Krylov basis kept in memory.
    pub max_dim: usize,
    /// Seed of the random starting vector.
    pub seed: u64,
    /// Ritz convergence is tested every this many steps.
    pub check_every: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            max_dim: 1500,
            seed: 0,
            check_every: 10,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        orthogonalize(&mut v, basis);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// Largest `count` eigenvalues (descending) with their Ritz vectors.
pub(crate) fn leading_eigenpairs(
    m: &SparseMatrix,
    count: usize,
    residual_tol: f64,
    opts: &LanczosOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = m.n();
    let max_dim = opts.max_dim.min(n).max(count);
    let scale = match m.frobenius_norm() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];

    let mut q = random_unit(n, &mut rng, &basis)
        .ok_or_else(|| Error::numerical("could not draw a Lanczos start vector", None))?;
    loop {
        m.matvec_into(&q, &mut w);
        let alpha = dot(&w, &q);
        basis.push(q);
        alphas.push(alpha);
        orthogonalize(&mut w, &basis);
        let beta = norm(&w);
        let dim = basis.len();

        let exhausted = dim == n;
        let check = dim >= count && (dim.is_multiple_of(opts.check_every) || dim == max_dim || exhausted);
        if check {
            let (theta, s) = tridiagonal_eigen(&alphas, &betas)?;
            let top: Vec<usize> = (0..dim).rev().take(count).collect();
            let converged = exhausted
                || top
                    .iter()
                    .all(|&i| (beta * s[i][dim - 1]).abs() <= 0.1 * residual_tol * scale);
            if converged {
                let values = top.iter().map(|&i| theta[i]).collect();
                let vectors = top
                    .iter()
                    .map(|&i| {
                        let mut y = vec![0.0; n];
                        for (coef, qk) in s[i].iter().zip(&basis) {
                            for (yi, qi) in y.iter_mut().zip(qk) {
                                *yi += coef * qi;
                            }
                        }
                        y
                    })
                    .collect();
                return Ok((values, vectors));
            }
            if dim >= max_dim {
                return Err(Error::numerical(
                    format!(
                        "Lanczos did not converge to {count} eigenpairs within a basis of {max_dim}; \
                         raise the basis limit"
                    ),
                    None,
                ));
            }
        }

        if beta <= 1e-10 * scale {
            // invariant subspace: continue from a fresh orthogonal direction
            q = random_unit(n, &mut rng, &basis)
                .ok_or_else(|| Error::numerical("Lanczos restart failed", None))?;
            betas.push(0.0);
        } else {
            q = w.iter().map(|x| x / beta).collect();
            betas.push(beta);
        }
    }
}
