//! Dense real eigensolvers.
//!
//! Symmetric input goes through Householder tridiagonalization followed by
//! the implicit QL algorithm, which yields an orthonormal eigenbasis even for
//! repeated eigenvalues. General input is first permuted into the block upper
//! triangular form given by its strongly connected components, reduced to
//! Hessenberg form with Householder reflections, and then to real Schur form
//! by the Francis double-shift QR iteration; eigenvectors come from
//! back-substitution. The permutation keeps structurally decoupled blocks
//! exactly decoupled, so trivial components (e.g. every node of a DAG)
//! produce exact zero eigenvalues.
//!
//! The routines follow the EISPACK procedures `tred2`, `tql2`, `orthes` and
//! `hqr2`.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const MAX_QL_ITER: usize = 60;
const MAX_QR_ITER: usize = 120;

/// Raw eigen-decomposition in solver order.
///
/// For a complex pair stored at `(j, j + 1)` with `im[j] > 0`, column `j`
/// holds the real part and column `j + 1` the imaginary part of the
/// eigenvector belonging to `re[j] + i·im[j]`.
#[derive(Debug, Clone)]
pub(crate) struct RealEigen {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Column vectors.
    pub vectors: Vec<Vec<f64>>,
}

/// Eigen-decomposition of a dense row-major matrix.
pub(crate) fn eigen(n: usize, entries: &[f64], symmetric: bool) -> Result<RealEigen> {
    debug_assert_eq!(entries.len(), n * n);
    if n == 0 {
        return Ok(RealEigen {
            re: vec![],
            im: vec![],
            vectors: vec![],
        });
    }
    if symmetric {
        symmetric_eigen(n, entries)
    } else {
        general_eigen(n, entries)
    }
}

fn rows_of(n: usize, entries: &[f64]) -> Vec<Vec<f64>> {
    entries.chunks(n).map(|r| r.to_vec()).collect()
}

fn columns_of(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = v.len();
    (0..n).map(|j| (0..n).map(|i| v[i][j]).collect()).collect()
}

fn symmetric_eigen(n: usize, entries: &[f64]) -> Result<RealEigen> {
    let mut v = rows_of(n, entries);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok(RealEigen {
        re: d,
        im: vec![0.0; n],
        vectors: columns_of(&v),
    })
}

/// Eigenpairs of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() - 1`). Eigenvalues ascend.
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut d = diag.to_vec();
    // tql2 expects the sub-diagonal in e[1..n]
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&off[..(n - 1)]);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((d, columns_of(&v)))
}

/// Householder reduction of the symmetric matrix held in `v` to tridiagonal
/// form; `v` is overwritten with the accumulated orthogonal transformation.
fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = v.len();
    d[..n].copy_from_slice(&v[n - 1][..n]);

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix (`d`, `e[1..]`),
/// accumulating rotations into `v`. Eigenvalues are left in ascending order.
fn tql2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= EPS * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITER {
                    return Err(Error::numerical(
                        format!("tridiagonal QL iteration did not converge for eigenvalue {l}"),
                        Some(l),
                    ));
                }

                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= EPS * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort, ascending
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in v.iter_mut() {
                row.swap(i, k);
            }
        }
    }
    Ok(())
}

/// Order of nodes placing strongly connected components of the nonzero
/// pattern in topological order, so the permuted matrix is block upper
/// triangular. Returns `order[new] = old`.
pub(crate) fn block_triangular_order(n: usize, entries: &[f64]) -> Vec<usize> {
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && entries[i * n + j] != 0.0)
                .collect()
        })
        .collect();
    let components = tarjan_scc(&adj);
    // Tarjan emits components in reverse topological order.
    let mut order = Vec::with_capacity(n);
    for mut comp in components.into_iter().rev() {
        comp.sort_unstable();
        order.extend(comp);
    }
    order
}

fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next = 0;
    // (node, next child position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(comp);
                }
            }
        }
    }
    components
}

fn general_eigen(n: usize, entries: &[f64]) -> Result<RealEigen> {
    let order = block_triangular_order(n, entries);
    let mut h: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| order.iter().map(|&j| entries[i * n + j]).collect())
        .collect();
    let mut v = vec![vec![0.0; n]; n];
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    orthes(&mut h, &mut v);
    hqr2(&mut h, &mut v, &mut d, &mut e)?;

    // undo the permutation: row `new` of v belongs to node order[new]
    let mut vectors = vec![vec![0.0; n]; n];
    for (new, &old) in order.iter().enumerate() {
        for (j, col) in vectors.iter_mut().enumerate() {
            col[old] = v[new][j];
        }
    }
    Ok(RealEigen {
        re: d,
        im: e,
        vectors,
    })
}

/// Householder reduction to upper Hessenberg form; `v` receives the
/// accumulated transformation.
fn orthes(h: &mut [Vec<f64>], v: &mut [Vec<f64>]) {
    let n = h.len();
    let low = 0;
    let high = n - 1;
    let mut ort = vec![0.0; n];

    for m in low + 1..high {
        let mut scale = 0.0;
        for row in h.iter().take(high + 1).skip(m) {
            scale += row[m - 1].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[i][j];
            }
            f /= hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut().take(high + 1) {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * row[j];
            }
            f /= hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m][m - 1] = scale * g;
    }

    for (i, row) in v.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = if i == j { 1.0 } else { 0.0 };
        }
    }

    for m in (low + 1..high).rev() {
        if h[m][m - 1] != 0.0 {
            for i in m + 1..=high {
                ort[i] = h[i][m - 1];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[i][j];
                }
                // double division avoids possible underflow
                g = (g / ort[m]) / h[m][m - 1];
                for i in m..=high {
                    v[i][j] += g * ort[i];
                }
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Francis double-shift QR from Hessenberg to real Schur form, followed by
/// eigenvector back-substitution and back-transformation.
#[allow(clippy::many_single_char_names)]
fn hqr2(h: &mut [Vec<f64>], v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let nn = h.len();
    let low: isize = 0;
    let mut n: isize = nn as isize - 1;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut t, mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[i][j].abs();
        }
    }

    let mut iter = 0;
    while n >= low {
        let nu = n as usize;
        // look for a single small sub-diagonal element
        let mut l = n;
        while l > low {
            let lu = l as usize;
            s = h[lu - 1][lu - 1].abs() + h[lu][lu].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[lu][lu - 1].abs() < EPS * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // one root
            h[nu][nu] += exshift;
            d[nu] = h[nu][nu];
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // two roots
            w = h[nu][nu - 1] * h[nu - 1][nu];
            p = (h[nu - 1][nu - 1] - h[nu][nu]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[nu][nu] += exshift;
            h[nu - 1][nu - 1] += exshift;
            x = h[nu][nu];

            if q >= 0.0 {
                // real pair
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
                x = h[nu][nu - 1];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in nu - 1..nn {
                    z = h[nu - 1][j];
                    h[nu - 1][j] = q * z + p * h[nu][j];
                    h[nu][j] = q * h[nu][j] - p * z;
                }
                for row in h.iter_mut().take(nu + 1) {
                    z = row[nu - 1];
                    row[nu - 1] = q * z + p * row[nu];
                    row[nu] = q * row[nu] - p * z;
                }
                for row in v.iter_mut() {
                    z = row[nu - 1];
                    row[nu - 1] = q * z + p * row[nu];
                    row[nu] = q * row[nu] - p * z;
                }
            } else {
                // complex pair
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // no convergence yet: form shift
            x = h[nu][nu];
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h[nu - 1][nu - 1];
                w = h[nu][nu - 1] * h[nu - 1][nu];
            }

            // Wilkinson's ad hoc shift
            if iter == 10 {
                exshift += x;
                for i in low as usize..=nu {
                    h[i][i] -= x;
                }
                s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            // second exceptional shift
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low as usize..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            if iter > MAX_QR_ITER {
                return Err(Error::numerical(
                    format!("Hessenberg QR iteration did not converge for eigenvalue {nu}"),
                    Some(nu),
                ));
            }

            // look for two consecutive small sub-diagonal elements
            let mut m = n - 2;
            while m >= l {
                let mu = m as usize;
                z = h[mu][mu];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[mu + 1][mu] + h[mu][mu + 1];
                q = h[mu + 1][mu + 1] - z - r - s;
                r = h[mu + 2][mu + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[mu][mu - 1].abs() * (q.abs() + r.abs())
                    < EPS * (p.abs() * (h[mu - 1][mu - 1].abs() + z.abs() + h[mu + 1][mu + 1].abs()))
                {
                    break;
                }
                m -= 1;
            }
            let mu = m as usize;

            for i in mu + 2..=nu {
                h[i][i - 2] = 0.0;
                if i > mu + 2 {
                    h[i][i - 3] = 0.0;
                }
            }

            // double QR step on rows l..=n and columns m..=n
            for k in mu..nu {
                let notlast = k != nu - 1;
                if k != mu {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }

                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != mu {
                        h[k][k - 1] = -s * x;
                    } else if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[k][j] + q * h[k + 1][j];
                        if notlast {
                            p += r * h[k + 2][j];
                            h[k + 2][j] -= p * z;
                        }
                        h[k][j] -= p * x;
                        h[k + 1][j] -= p * y;
                    }
                    for row in h.iter_mut().take(nu.min(k + 3) + 1) {
                        p = x * row[k] + y * row[k + 1];
                        if notlast {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k] -= p;
                        row[k + 1] -= p * q;
                    }
                    for row in v.iter_mut() {
                        p = x * row[k] + y * row[k + 1];
                        if notlast {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k] -= p;
                        row[k + 1] -= p * q;
                    }
                }
            }
        }
    }

    // back-substitute to find vectors of the upper triangular form
    if norm == 0.0 {
        return Ok(());
    }

    for n in (0..nn).rev() {
        p = d[n];
        q = e[n];

        if q == 0.0 {
            // real vector
            let mut l = n;
            h[n][n] = 1.0;
            for i in (0..n).rev() {
                w = h[i][i] - p;
                r = 0.0;
                for j in l..=n {
                    r += h[i][j] * h[j][n];
                }
                if e[i] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        h[i][n] = if w != 0.0 { -r / w } else { -r / (EPS * norm) };
                    } else {
                        // real 2x2 equations
                        x = h[i][i + 1];
                        y = h[i + 1][i];
                        q = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                        t = (x * s - z * r) / q;
                        h[i][n] = t;
                        h[i + 1][n] = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }

                    // overflow control
                    t = h[i][n].abs();
                    if (EPS * t) * t > 1.0 {
                        for row in h.iter_mut().take(n + 1).skip(i) {
                            row[n] /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            // complex vector, stored in columns n-1 (real) and n (imaginary)
            let mut l = n - 1;

            // last vector component imaginary so matrix is triangular
            if h[n][n - 1].abs() > h[n - 1][n].abs() {
                h[n - 1][n - 1] = q / h[n][n - 1];
                h[n - 1][n] = -(h[n][n] - p) / h[n][n - 1];
            } else {
                let (cr, ci) = cdiv(0.0, -h[n - 1][n], h[n - 1][n - 1] - p, q);
                h[n - 1][n - 1] = cr;
                h[n - 1][n] = ci;
            }
            h[n][n - 1] = 0.0;
            h[n][n] = 1.0;
            for i in (0..n.saturating_sub(1)).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += h[i][j] * h[j][n - 1];
                    sa += h[i][j] * h[j][n];
                }
                w = h[i][i] - p;

                if e[i] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h[i][n - 1] = cr;
                        h[i][n] = ci;
                    } else {
                        // complex 2x2 equations
                        x = h[i][i + 1];
                        y = h[i + 1][i];
                        let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                        let vi = (d[i] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = EPS
                                * norm
                                * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[i][n - 1] = cr;
                        h[i][n] = ci;
                        if x.abs() > z.abs() + q.abs() {
                            h[i + 1][n - 1] = (-ra - w * h[i][n - 1] + q * h[i][n]) / x;
                            h[i + 1][n] = (-sa - w * h[i][n] - q * h[i][n - 1]) / x;
                        } else {
                            let (cr, ci) = cdiv(-r - y * h[i][n - 1], -s - y * h[i][n], z, q);
                            h[i + 1][n - 1] = cr;
                            h[i + 1][n] = ci;
                        }
                    }

                    // overflow control
                    t = h[i][n - 1].abs().max(h[i][n].abs());
                    if (EPS * t) * t > 1.0 {
                        for row in h.iter_mut().take(n + 1).skip(i) {
                            row[n - 1] /= t;
                            row[n] /= t;
                        }
                    }
                }
            }
        }
    }

    // back transformation to eigenvectors of the original matrix
    for j in (0..nn).rev() {
        for i in 0..nn {
            z = 0.0;
            for k in 0..=j {
                z += v[i][k] * h[k][j];
            }
            v[i][j] = z;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(n: usize, a: &[f64], eig: &RealEigen, j: usize) -> f64 {
        // complex residual ‖A x − λ x‖ for the eigenvector at column j
        let (re, im) = (eig.re[j], eig.im[j]);
        let (xr, xi): (Vec<f64>, Vec<f64>) = if im == 0.0 {
            (eig.vectors[j].clone(), vec![0.0; n])
        } else if im > 0.0 {
            (eig.vectors[j].clone(), eig.vectors[j + 1].clone())
        } else {
            (
                eig.vectors[j - 1].clone(),
                eig.vectors[j].iter().map(|v| -v).collect(),
            )
        };
        let mut total = 0.0;
        for i in 0..n {
            let mut ar = 0.0;
            let mut ai = 0.0;
            for k in 0..n {
                ar += a[i * n + k] * xr[k];
                ai += a[i * n + k] * xi[k];
            }
            let lr = re * xr[i] - im * xi[i];
            let li = re * xi[i] + im * xr[i];
            total += (ar - lr).powi(2) + (ai - li).powi(2);
        }
        let norm: f64 = xr.iter().chain(&xi).map(|v| v * v).sum::<f64>().sqrt();
        total.sqrt() / norm
    }

    #[test]
    fn symmetric_two_by_two() {
        let a = [2.0, 1.0, 1.0, 2.0];
        let eig = eigen(2, &a, true).unwrap();
        assert!((eig.re[0] - 1.0).abs() < 1e-14);
        assert!((eig.re[1] - 3.0).abs() < 1e-14);
        for j in 0..2 {
            assert!(residual(2, &a, &eig, j) < 1e-14);
        }
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        // 90 degree rotation: eigenvalues ±i
        let a = [0.0, -1.0, 1.0, 0.0];
        let eig = eigen(2, &a, false).unwrap();
        let mut ims = eig.im.clone();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
        for j in 0..2 {
            assert!(residual(2, &a, &eig, j) < 1e-14, "column {j}");
        }
    }

    #[test]
    fn cycle_eigenpairs_have_small_residuals() {
        for n in 2..=12 {
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                a[i * n + (i + 1) % n] = 1.0;
            }
            let eig = eigen(n, &a, false).unwrap();
            for j in 0..n {
                let modulus = eig.re[j].hypot(eig.im[j]);
                assert!((modulus - 1.0).abs() < 1e-12, "n={n}");
                assert!(residual(n, &a, &eig, j) < 1e-12, "n={n} col {j}");
            }
        }
    }

    #[test]
    fn dag_gives_exact_zero_eigenvalues() {
        // path 0->1->2->3 plus a chord, listed in scrambled node order
        let n = 5;
        let mut a = vec![0.0; n * n];
        for (s, t) in [(3, 1), (1, 4), (4, 0), (0, 2), (3, 0)] {
            a[s * n + t] = 0.7;
        }
        let eig = eigen(n, &a, false).unwrap();
        assert!(eig.re.iter().all(|&v| v == 0.0));
        assert!(eig.im.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn block_order_is_upper_triangular() {
        let n = 6;
        let mut a = vec![0.0; n * n];
        // SCC {0, 4}, SCC {2, 5}, singletons 1 and 3; 3 -> 0 -> 2 -> 1
        for (s, t) in [(0, 4), (4, 0), (2, 5), (5, 2), (3, 0), (0, 2), (2, 1)] {
            a[s * n + t] = 1.0;
        }
        let order = block_triangular_order(n, &a);
        let mut pos = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        // every edge between distinct components goes forward
        for (s, t) in [(3, 0), (0, 2), (2, 1)] {
            assert!(pos[s] < pos[t]);
        }
        assert_eq!(pos[0].abs_diff(pos[4]), 1);
        assert_eq!(pos[2].abs_diff(pos[5]), 1);
    }

    #[test]
    fn tridiagonal_matches_closed_form() {
        // path Laplacian-like tridiagonal: 2 on diagonal, -1 off
        let n = 8;
        let (vals, vecs) = tridiagonal_eigen(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let theta = (k as f64 + 1.0) * std::f64::consts::PI / (n as f64 + 1.0);
            assert!((v - (2.0 - 2.0 * theta.cos())).abs() < 1e-13);
        }
        for (a, b) in vecs.iter().enumerate() {
            let dot: f64 = vecs[a].iter().zip(b).map(|(x, y)| x * y).sum();
            assert!((dot - 1.0).abs() < 1e-13);
        }
    }
}
