//! Symmetric eigensolvers.
//!
//! Dense problems use Householder tridiagonalisation followed by the
//! implicit QL iteration (the EISPACK `tred2`/`tql2` pair). Large graphs can
//! fall back to Lanczos with full reorthogonalisation for the top of the
//! spectrum only.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::RegularGraph;
use crate::math::{abs, dot, hypot, norm2, sqrt};
use crate::operator::Operator;
use crate::treekernel::SpectralPoint;
use crate::{Error, Result};

pub const DEFAULT_DENSE_CUTOFF: usize = 4000;

/// An eigenpair of `T = A/√p` on a regular graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda_t: f64,
    pub vector: Vec<f64>,
    pub spectral: SpectralPoint,
}

impl EigenPair {
    /// Wraps an arbitrary vector with its Rayleigh quotient. No residual
    /// check is made, so the result need not be an eigenpair.
    pub fn from_rayleigh(g: &RegularGraph, vector: Vec<f64>) -> Result<Self> {
        let t = g.normalized();
        t.check_dim(vector.len())?;
        let nrm = norm2(&vector);
        if nrm == 0.0 {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        let vector: Vec<f64> = vector.iter().map(|x| x / nrm).collect();
        let lambda_t = dot(&t.apply(&vector), &vector);
        let spectral = SpectralPoint::from_eigenvalue(g.p(), lambda_t)?;
        Ok(Self {
            lambda_t,
            vector,
            spectral,
        })
    }

    /// `‖T v − λ v‖₂`.
    pub fn residual(&self, g: &RegularGraph) -> f64 {
        let tv = g.normalized().apply(&self.vector);
        sqrt(
            tv.iter()
                .zip(&self.vector)
                .map(|(a, b)| (a - self.lambda_t * b) * (a - self.lambda_t * b))
                .sum(),
        )
    }
}

/// Which part of the spectrum to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenSelection {
    All,
    /// The `k` algebraically largest eigenvalues.
    Largest(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenConfig {
    pub dense_cutoff: usize,
    /// Permit Lanczos for `Largest(k)` above the dense cutoff.
    pub allow_iterative: bool,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            dense_cutoff: DEFAULT_DENSE_CUTOFF,
            allow_iterative: true,
        }
    }
}

/// Eigenpairs of `T = A/√p`, sorted by eigenvalue descending.
pub fn eigendecompose(
    g: &RegularGraph,
    selection: EigenSelection,
    config: &EigenConfig,
) -> Result<Vec<EigenPair>> {
    let n = g.n_vertices();
    let (values, vectors) = if n <= config.dense_cutoff {
        let t = g.normalized();
        let mut a = vec![0.0; n * n];
        for u in 0..n {
            for &w in g.adjacency().neighbors(u) {
                a[u * n + w] = t.scale();
            }
        }
        let (mut vals, mut vecs) = symmetric_eigen(a, n);
        vals.reverse();
        vecs.reverse();
        if let EigenSelection::Largest(k) = selection {
            vals.truncate(k);
            vecs.truncate(k);
        }
        (vals, vecs)
    } else {
        match selection {
            EigenSelection::All => {
                return Err(Error::TooLargeForDense {
                    n_vertices: n,
                    cutoff: config.dense_cutoff,
                })
            }
            EigenSelection::Largest(_) if !config.allow_iterative => {
                return Err(Error::TooLargeForDense {
                    n_vertices: n,
                    cutoff: config.dense_cutoff,
                })
            }
            EigenSelection::Largest(k) => lanczos_largest(&g.normalized(), k, 1e-10)?,
        }
    };

    let tol = 1e-8;
    let mut out = Vec::with_capacity(values.len());
    for (lambda_t, mut vector) in values.into_iter().zip(vectors) {
        // Unit norm, first entry above 1e-8 in magnitude positive.
        let nrm = norm2(&vector);
        let sign = match vector.iter().find(|x| abs(**x) > 1e-8) {
            Some(x) if *x < 0.0 => -1.0,
            _ => 1.0,
        };
        vector.iter_mut().for_each(|x| *x *= sign / nrm);
        let spectral = SpectralPoint::from_eigenvalue(g.p(), lambda_t)?;
        let pair = EigenPair {
            lambda_t,
            vector,
            spectral,
        };
        let res = pair.residual(g);
        if res >= tol {
            return Err(Error::EigenCheckFailed(format!(
                "residual {res:e} at eigenvalue {lambda_t}"
            )));
        }
        out.push(pair);
    }
    for w in out.windows(2) {
        let ip = abs(dot(&w[0].vector, &w[1].vector));
        if ip >= tol {
            return Err(Error::EigenCheckFailed(format!(
                "adjacent eigenvectors overlap by {ip:e}"
            )));
        }
    }
    Ok(out)
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal. Eigenvalues ascending; `vectors[i]` belongs to
/// `values[i]`.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    assert_eq!(off.len(), n - 1, "off-diagonal length");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[1..].copy_from_slice(off);
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        w[i * n + i] = 1.0;
    }
    tql2(n, &mut d, &mut e, &mut w);
    sort_pairs(n, d, w)
}

/// Full eigen-decomposition of a dense symmetric matrix stored row-major.
/// Eigenvalues ascending; `vectors[i]` belongs to `values[i]`.
pub fn symmetric_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut a, &mut d, &mut e);
    // tql2 rotates columns of V; work on the transpose so those are rows.
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            w[i * n + k] = a[k * n + i];
        }
    }
    drop(a);
    tql2(n, &mut d, &mut e, &mut w);
    sort_pairs(n, d, w)
}

fn sort_pairs(n: usize, d: Vec<f64>, w: Vec<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| w[i * n..(i + 1) * n].to_vec())
        .collect();
    (values, vectors)
}

// Householder reduction to tridiagonal form. On exit `v` (row-major) holds
// the orthogonal transform, `d` the diagonal and `e[1..]` the sub-diagonal.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += abs(d[k]);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = sqrt(h);
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
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
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
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e[1..]). `w` holds the transposed
// eigenvector matrix: row i is the vector paired with d[i].
fn tql2(n: usize, d: &mut [f64], e: &mut [f64], w: &mut [f64]) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(abs(d[l]) + abs(e[l]));
        let mut m = l;
        while m < n - 1 && abs(e[m]) > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
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
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = w.split_at_mut((i + 1) * n);
                    let row_i = &mut lo[i * n..];
                    let row_next = &mut hi[..n];
                    for (a, b) in row_i.iter_mut().zip(row_next.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Top `k` eigenpairs of a symmetric operator by Lanczos with full
/// reorthogonalisation. Distinct Ritz values only: a multiple eigenvalue is
/// reported once.
pub fn lanczos_largest<O: Operator>(
    op: &O,
    k: usize,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = op.dim();
    if k == 0 || n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut m = (2 * k + 20).min(n);
    loop {
        let (basis, alpha, beta) = lanczos_basis(op, m);
        let steps = basis.len();
        let (vals, vecs) = tridiagonal_eigen(&alpha, &beta[..steps - 1]);
        let tail = beta[steps - 1];
        let take = k.min(steps);
        let converged = (0..take).all(|i| {
            let j = steps - 1 - i;
            abs(tail * vecs[j][steps - 1]) <= tol * vals[j].abs().max(1.0)
        });
        if converged || steps < m || m == n {
            let mut values = Vec::with_capacity(take);
            let mut vectors = Vec::with_capacity(take);
            for i in 0..take {
                let j = steps - 1 - i;
                let mut x = vec![0.0; n];
                for (q, &c) in basis.iter().zip(&vecs[j]) {
                    x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += c * qi);
                }
                values.push(vals[j]);
                vectors.push(x);
            }
            if !converged && m == n && steps == m {
                return Err(Error::NoConvergence { iterations: m });
            }
            return Ok((values, vectors));
        }
        m = (2 * m).min(n);
    }
}

// Krylov basis of dimension at most m from a fixed pseudo-random start.
// Stops early on breakdown. beta[j] couples q_j and q_{j+1}.
fn lanczos_basis<O: Operator>(op: &O, m: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let n = op.dim();
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut q: Vec<f64> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let nrm = norm2(&q);
    q.iter_mut().for_each(|x| *x /= nrm);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let mut w = vec![0.0; n];
    for _ in 0..m {
        op.apply_into(&q, &mut w);
        let a = dot(&w, &q);
        alpha.push(a);
        basis.push(q.clone());
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let b = norm2(&w);
        beta.push(b);
        if b < 1e-12 {
            break;
        }
        q = w.iter().map(|x| x / b).collect();
    }
    (basis, alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn pseudo_random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                s = s
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let x = ((s >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        a
    }

    #[test]
    fn dense_matches_nalgebra() {
        for &n in &[1usize, 2, 5, 17, 40] {
            let a = pseudo_random_symmetric(n, n as u64);
            let (vals, vecs) = symmetric_eigen(a.clone(), n);
            let m = DMatrix::from_row_slice(n, n, &a);
            let mut reference: Vec<f64> = m
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            reference.sort_by(f64::total_cmp);
            for (x, y) in vals.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-12, "n={n}");
            }
            for (lambda, v) in vals.iter().zip(&vecs) {
                let mv = &m * nalgebra::DVector::from_column_slice(v);
                let res = (mv - nalgebra::DVector::from_column_slice(v) * *lambda).norm();
                assert!(res < 1e-12);
                assert!((norm2(v) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tridiagonal_path_spectrum() {
        // Path on L vertices: eigenvalues 2cos(πj/(L+1)).
        let l = 9;
        let (vals, _) = tridiagonal_eigen(&vec![0.0; l], &vec![1.0; l - 1]);
        for (j, v) in vals.iter().rev().enumerate() {
            let expect = 2.0 * (core::f64::consts::PI * (j + 1) as f64 / (l + 1) as f64).cos();
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn handles_diagonal_input() {
        let a = vec![3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        let (vals, _) = symmetric_eigen(a, 3);
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
    }
}
