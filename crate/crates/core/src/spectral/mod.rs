//! Spectral machinery: eigen-decomposition with conjugate-pair bookkeeping,
//! eigengap analysis, and local eigenvector centrality.

mod centrality;
pub(crate) mod dense;
mod gaps;
mod lanczos;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MatrixMode, SparseMatrix, SquareMatrix};

pub use centrality::{
    build_v, centrality_from_spectrum, eigenvector_centrality, local_centrality, CentralityVector,
    KSelection, LocalCentrality, Method, Normalization, VMatrix, Warning,
};
pub use gaps::{eigengaps, select_k, EigengapAnalysis, SelectionMode};
pub use lanczos::LanczosOptions;

/// How a spectrum column enters the V matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Real,
    PairFirst,
    PairSecond,
    Zero,
}

/// Eigenvalue with fewer independent eigenvectors than its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deficiency {
    /// 1-based index of the first column of the repeated eigenvalue.
    pub first_index: usize,
    pub re: f64,
    pub im: f64,
    pub algebraic: usize,
    pub geometric: usize,
}

/// Eigenvalues ordered by descending real part, with eigenvectors, pairing
/// markers and residual diagnostics.
///
/// Ties in the real part are broken by descending |Im| and then descending
/// Im, which keeps each conjugate pair adjacent with the +Im member first.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub n: usize,
    pub mode: MatrixMode,
    pub eigenvalues: Vec<Complex64>,
    /// Column `j` pairs with `eigenvalues[j]`; unit 2-norm.
    pub eigenvectors: Vec<Vec<Complex64>>,
    pub kinds: Vec<ColumnKind>,
    /// `‖A v − λ v‖₂ / ‖A‖_F` per column, using the unsnapped eigenvalue.
    pub residuals: Vec<f64>,
    pub deficiencies: Vec<Deficiency>,
    /// False when only the leading eigenpairs were computed.
    pub complete: bool,
}

impl Spectrum {
    /// Number of computed eigenpairs.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.re).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }

    /// Multiply eigenvector `j` by -1. Every derived quantity in this crate
    /// is invariant under that flip.
    pub fn negate_column(&mut self, j: usize) {
        for x in &mut self.eigenvectors[j] {
            *x = -*x;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    /// |λ| ≤ tol_zero·‖A‖_F snaps λ to exactly zero.
    pub tol_zero: f64,
    /// |Im λ| ≤ tol_imag·(1 + |λ|) snaps λ to the real axis.
    pub tol_imag: f64,
    /// Upper bound on every column residual.
    pub residual_tol: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            tol_zero: 1e-10,
            tol_imag: 1e-10,
            residual_tol: 1e-8,
        }
    }
}

/// Tolerance for recognising conjugate partners and repeated eigenvalues.
const PAIR_TOL: f64 = 1e-8;
/// Relative singular threshold when counting independent eigenvectors.
const RANK_TOL: f64 = 1e-6;

/// Full eigen-decomposition of a general real matrix.
pub fn decompose(m: &SquareMatrix, opts: &DecomposeOptions) -> Result<Spectrum> {
    let n = m.n();
    if n == 0 {
        return Err(Error::input("cannot decompose an empty matrix"));
    }
    let symmetric = m.is_symmetric();
    let raw = dense::eigen(n, m.as_row_major(), symmetric)?;
    let scale = m.frobenius_norm();

    // Group solver output into units: single real eigenvalues and conjugate
    // pairs (stored at adjacent solver positions).
    struct Unit {
        re: f64,
        im: f64,
        first: usize,
        pair: bool,
    }
    let mut units = Vec::with_capacity(n);
    let mut j = 0;
    while j < n {
        if raw.im[j] != 0.0 {
            if j + 1 >= n || raw.im[j + 1] != -raw.im[j] || raw.re[j + 1] != raw.re[j] {
                return Err(Error::numerical(
                    format!("eigenvalue {j} has no conjugate partner"),
                    Some(j),
                ));
            }
            units.push(Unit {
                re: raw.re[j],
                im: raw.im[j].abs(),
                first: j,
                pair: true,
            });
            j += 2;
        } else {
            units.push(Unit {
                re: raw.re[j],
                im: 0.0,
                first: j,
                pair: false,
            });
            j += 1;
        }
    }

    // Raw (unsnapped) eigenpairs in final order.
    let mut pairs: Vec<(Complex64, Vec<Complex64>)> = Vec::with_capacity(n);
    for unit in &units {
        if unit.pair {
            let (re_col, im_col) = if raw.im[unit.first] > 0.0 {
                (&raw.vectors[unit.first], &raw.vectors[unit.first + 1])
            } else {
                (&raw.vectors[unit.first + 1], &raw.vectors[unit.first])
            };
            // re_col + i·im_col belongs to re + i|im|
            let x: Vec<Complex64> = re_col
                .iter()
                .zip(im_col)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect();
            let conj: Vec<Complex64> = x.iter().map(|z| z.conj()).collect();
            pairs.push((Complex64::new(unit.re, unit.im), x));
            pairs.push((Complex64::new(unit.re, -unit.im), conj));
        } else {
            let x = raw.vectors[unit.first]
                .iter()
                .map(|&a| Complex64::new(a, 0.0))
                .collect();
            pairs.push((Complex64::new(unit.re, 0.0), x));
        }
    }

    let mut residuals = Vec::with_capacity(n);
    for (col, (lambda, x)) in pairs.iter_mut().enumerate() {
        normalize_eigenvector(x).ok_or_else(|| {
            Error::numerical(format!("eigenvector {col} is zero"), Some(col))
        })?;
        residuals.push(dense_residual(m, *lambda, x, scale));
    }

    let spectrum = finish_spectrum(n, m.mode(), pairs, residuals, scale, !symmetric, opts)?;
    check_residuals(&spectrum, opts)?;
    Ok(spectrum)
}

/// Leading `count` eigenpairs of a large symmetric sparse matrix by Lanczos
/// iteration with full reorthogonalization.
pub fn decompose_leading(
    m: &SparseMatrix,
    count: usize,
    opts: &DecomposeOptions,
    lanczos: &LanczosOptions,
) -> Result<Spectrum> {
    let n = m.n();
    if n == 0 {
        return Err(Error::input("cannot decompose an empty matrix"));
    }
    if !m.is_symmetric() {
        return Err(Error::input(
            "the iterative eigensolver path requires a symmetric matrix",
        ));
    }
    let count = count.min(n);
    let scale = m.frobenius_norm();
    let (values, vectors) = lanczos::leading_eigenpairs(m, count, opts.residual_tol, lanczos)?;
    let mut pairs = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut y = vec![0.0; n];
    for (value, vector) in values.into_iter().zip(vectors) {
        m.matvec_into(&vector, &mut y);
        let r: f64 = y
            .iter()
            .zip(&vector)
            .map(|(a, b)| (a - value * b).powi(2))
            .sum::<f64>()
            .sqrt();
        residuals.push(if scale > 0.0 { r / scale } else { r });
        let mut x: Vec<Complex64> = vector.into_iter().map(|a| Complex64::new(a, 0.0)).collect();
        normalize_eigenvector(&mut x)
            .ok_or_else(|| Error::numerical("Ritz vector is zero", Some(pairs.len())))?;
        pairs.push((Complex64::new(value, 0.0), x));
    }
    let mut spectrum = finish_spectrum(n, m.mode(), pairs, residuals, scale, false, opts)?;
    spectrum.complete = count == n;
    check_residuals(&spectrum, opts)?;
    Ok(spectrum)
}

/// Snap, sort, mark kinds and look for eigenspace deficiency.
fn finish_spectrum(
    n: usize,
    mode: MatrixMode,
    mut pairs: Vec<(Complex64, Vec<Complex64>)>,
    residuals: Vec<f64>,
    scale: f64,
    check_deficiency: bool,
    opts: &DecomposeOptions,
) -> Result<Spectrum> {
    let mut zero = vec![false; pairs.len()];
    for (j, (lambda, _)) in pairs.iter_mut().enumerate() {
        if lambda.norm() <= opts.tol_zero * scale {
            *lambda = Complex64::new(0.0, 0.0);
            zero[j] = true;
        } else if lambda.im.abs() <= opts.tol_imag * (1.0 + lambda.norm()) {
            lambda.im = 0.0;
        }
    }

    // stable sort by (Re desc, |Im| desc, Im desc); conjugates share Re and
    // |Im| exactly and their input order already puts +Im first
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (pairs[a].0, pairs[b].0);
        lb.re
            .total_cmp(&la.re)
            .then(lb.im.abs().total_cmp(&la.im.abs()))
            .then(lb.im.total_cmp(&la.im))
    });

    let mut eigenvalues = Vec::with_capacity(order.len());
    let mut eigenvectors = Vec::with_capacity(order.len());
    let mut sorted_residuals = Vec::with_capacity(order.len());
    let mut is_zero = Vec::with_capacity(order.len());
    for &o in &order {
        eigenvalues.push(pairs[o].0);
        eigenvectors.push(std::mem::take(&mut pairs[o].1));
        sorted_residuals.push(residuals[o]);
        is_zero.push(zero[o]);
    }

    let mut kinds = Vec::with_capacity(eigenvalues.len());
    let mut j = 0;
    while j < eigenvalues.len() {
        let lambda = eigenvalues[j];
        if is_zero[j] {
            kinds.push(ColumnKind::Zero);
            j += 1;
        } else if lambda.im == 0.0 {
            kinds.push(ColumnKind::Real);
            j += 1;
        } else {
            let partner = eigenvalues.get(j + 1).copied();
            let tol = PAIR_TOL * (1.0 + lambda.norm());
            match partner {
                Some(p)
                    if lambda.im > 0.0
                        && (p.re - lambda.re).abs() <= tol
                        && (p.im + lambda.im).abs() <= tol =>
                {
                    kinds.push(ColumnKind::PairFirst);
                    kinds.push(ColumnKind::PairSecond);
                    j += 2;
                }
                _ => {
                    return Err(Error::numerical(
                        format!("eigenvalue {} has no adjacent conjugate partner", j + 1),
                        Some(j),
                    ))
                }
            }
        }
    }

    let deficiencies = if check_deficiency {
        find_deficiencies(&eigenvalues, &eigenvectors)
    } else {
        Vec::new()
    };

    Ok(Spectrum {
        n,
        mode,
        eigenvalues,
        eigenvectors,
        kinds,
        residuals: sorted_residuals,
        deficiencies,
        complete: true,
    })
}

fn check_residuals(s: &Spectrum, opts: &DecomposeOptions) -> Result<()> {
    for (j, &r) in s.residuals.iter().enumerate() {
        if r.is_nan() || r > opts.residual_tol {
            return Err(Error::numerical(
                format!(
                    "eigenpair {} residual {r:e} exceeds {:e}",
                    j + 1,
                    opts.residual_tol
                ),
                Some(j),
            ));
        }
    }
    Ok(())
}

/// Unit 2-norm; complex vectors are rotated so their largest-modulus entry
/// is real and positive, real vectors get a nonnegative entry sum.
fn normalize_eigenvector(x: &mut [Complex64]) -> Option<()> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    let is_real = x.iter().all(|z| z.im == 0.0);
    let mut pivot = 0;
    for (i, z) in x.iter().enumerate() {
        if z.norm() > x[pivot].norm() {
            pivot = i;
        }
    }
    let factor = if is_real {
        let sum: f64 = x.iter().map(|z| z.re).sum();
        let sign = if sum.abs() > 1e-12 * norm * (x.len() as f64).sqrt() {
            sum.signum()
        } else {
            x[pivot].re.signum()
        };
        Complex64::new(sign / norm, 0.0)
    } else {
        let phase = x[pivot].conj() / x[pivot].norm();
        phase / norm
    };
    for z in x.iter_mut() {
        *z *= factor;
    }
    if !is_real {
        // exact real pivot after rotation
        x[pivot].im = 0.0;
    }
    Some(())
}

fn dense_residual(m: &SquareMatrix, lambda: Complex64, x: &[Complex64], scale: f64) -> f64 {
    let n = m.n();
    let mut total = 0.0;
    for i in 0..n {
        let row = m.row(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, z) in row.iter().zip(x) {
            acc += *z * *a;
        }
        total += (acc - lambda * x[i]).norm_sqr();
    }
    let r = total.sqrt();
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Groups of numerically equal eigenvalues whose eigenvectors span fewer
/// dimensions than the group size.
fn find_deficiencies(values: &[Complex64], vectors: &[Vec<Complex64>]) -> Vec<Deficiency> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let lambda = values[start];
        let tol = PAIR_TOL * (1.0 + lambda.norm());
        let mut end = start + 1;
        while end < values.len() && (values[end] - lambda).norm() <= tol {
            end += 1;
        }
        if end - start > 1 {
            let rank = numerical_rank(&vectors[start..end]);
            if rank < end - start {
                out.push(Deficiency {
                    first_index: start + 1,
                    re: lambda.re,
                    im: lambda.im,
                    algebraic: end - start,
                    geometric: rank,
                });
            }
        }
        start = end;
    }
    out
}

/// Rank of a set of unit vectors by modified Gram-Schmidt.
fn numerical_rank(vectors: &[Vec<Complex64>]) -> usize {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let proj: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > RANK_TOL {
            basis.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    basis.len()
}
