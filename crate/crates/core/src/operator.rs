//! Linear operators on a finite index set.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A real linear map on `R^dim`. Implementations used with the wave
/// propagator are expected to be self-adjoint.
pub trait Operator {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y`. Both slices have length `dim()`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            })
        }
    }
}

impl<O: Operator + ?Sized> Operator for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_into(x, y)
    }
}

/// Symmetric 0/1 adjacency structure in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    /// Builds the structure from an undirected edge list. Every edge is
    /// stored in both directions; neighbour lists keep insertion order.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        n_vertices: n,
                    });
                }
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0usize; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        Ok(Self { offsets, targets })
    }

    pub fn n_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_vertices())
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
            .filter(|(u, v)| u < v)
    }

    /// The operator `A / √p`.
    pub fn normalized(&self, p: u64) -> Scaled<'_> {
        Scaled {
            adjacency: self,
            scale: 1.0 / crate::math::sqrt(p as f64),
        }
    }
}

impl Operator for Adjacency {
    fn dim(&self) -> usize {
        self.n_vertices()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (v, out) in y.iter_mut().enumerate() {
            *out = self.neighbors(v).iter().map(|&w| x[w]).sum();
        }
    }
}

/// A scalar multiple of an adjacency structure.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<'a> {
    adjacency: &'a Adjacency,
    scale: f64,
}

impl Scaled<'_> {
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl Operator for Scaled<'_> {
    fn dim(&self) -> usize {
        self.adjacency.n_vertices()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let s = self.scale;
        for (v, out) in y.iter_mut().enumerate() {
            *out = s * self
                .adjacency
                .neighbors(v)
                .iter()
                .map(|&w| x[w])
                .sum::<f64>();
        }
    }
}
