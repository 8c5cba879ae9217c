//! Finite balls in the (p+1)-regular tree.
//!
//! Vertices are numbered level by level from the root (vertex 0), and the
//! children of each vertex occupy a contiguous range of the next level.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::tridiagonal_eigen;
use crate::math::sqrt;
use crate::operator::Adjacency;
use crate::treekernel::sphere_size;

#[derive(Debug, Clone)]
pub struct TreeBall {
    p: u64,
    radius: usize,
    level_start: Vec<usize>,
    depth: Vec<usize>,
    adjacency: Adjacency,
}

impl TreeBall {
    /// The ball of the given radius around a root of the (p+1)-regular tree.
    ///
    /// # Panics
    ///
    /// If `p == 0`.
    pub fn new(p: u64, radius: usize) -> Self {
        assert!(p >= 1, "tree needs p >= 1");
        let mut level_start = Vec::with_capacity(radius + 2);
        let mut total = 0usize;
        for j in 0..=radius {
            level_start.push(total);
            total += sphere_size(p, j) as usize;
        }
        level_start.push(total);

        let mut depth = vec![0usize; total];
        let mut edges = Vec::with_capacity(total.saturating_sub(1));
        for k in 0..=radius {
            for v in level_start[k]..level_start[k + 1] {
                depth[v] = k;
            }
        }
        for k in 0..radius {
            let m = Self::branching(p, k);
            let (start, next) = (level_start[k], level_start[k + 1]);
            for i in 0..(level_start[k + 1] - start) {
                for c in 0..m {
                    edges.push((start + i, next + i * m + c));
                }
            }
        }
        let adjacency = Adjacency::from_edges(total, &edges).expect("tree edges in range");
        Self {
            p,
            radius,
            level_start,
            depth,
            adjacency,
        }
    }

    // Children per vertex at level k.
    fn branching(p: u64, k: usize) -> usize {
        if k == 0 {
            p as usize + 1
        } else {
            p as usize
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn n_vertices(&self) -> usize {
        self.depth.len()
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    /// Distance from the root.
    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Vertex range of the sphere of radius `j` about the root.
    pub fn sphere(&self, j: usize) -> core::ops::Range<usize> {
        self.level_start[j]..self.level_start[j + 1]
    }

    /// The indicator of the radius-`j` sphere about the root.
    pub fn sphere_indicator(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_vertices()];
        if j <= self.radius {
            for v in self.sphere(j) {
                out[v] = 1.0;
            }
        }
        out
    }

    /// A complete orthonormal eigenbasis of `T = A/√p` on the ball, streamed
    /// one pair at a time as `(λ_T, v)`.
    ///
    /// The ball is spherically symmetric, so `A` splits into the radial block
    /// plus, for every vertex `v` at level `k < R` and every sum-zero pattern
    /// on its children, a copy of the path Jacobi matrix on the levels below.
    pub fn eigenpairs(&self) -> TreeEigenpairs<'_> {
        let radial = {
            let off: Vec<f64> = (0..self.radius)
                .map(|k| sqrt(Self::branching(self.p, k) as f64))
                .collect();
            tridiagonal_eigen(&vec![0.0; self.radius + 1], &off)
        };
        let path = (0..=self.radius)
            .map(|len| {
                tridiagonal_eigen(
                    &vec![0.0; len],
                    &vec![sqrt(self.p as f64); len.saturating_sub(1)],
                )
            })
            .collect();
        TreeEigenpairs {
            ball: self,
            radial,
            path,
            cursor: Cursor::Radial(0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Cursor {
    Radial(usize),
    // level k, vertex offset within level, Helmert index r (1-based), path mode j
    Branch {
        k: usize,
        i: usize,
        r: usize,
        j: usize,
    },
    Done,
}

/// Iterator returned by [`TreeBall::eigenpairs`].
pub struct TreeEigenpairs<'a> {
    ball: &'a TreeBall,
    radial: (Vec<f64>, Vec<Vec<f64>>),
    path: Vec<(Vec<f64>, Vec<Vec<f64>>)>,
    cursor: Cursor,
}

impl TreeEigenpairs<'_> {
    fn first_branch(&self) -> Cursor {
        if self.ball.radius == 0 {
            Cursor::Done
        } else {
            Cursor::Branch {
                k: 0,
                i: 0,
                r: 1,
                j: 0,
            }
        }
    }

    fn advance(&self, k: usize, i: usize, r: usize, j: usize) -> Cursor {
        let ball = self.ball;
        let len = ball.radius - k;
        if j + 1 < len {
            return Cursor::Branch { k, i, r, j: j + 1 };
        }
        let m = TreeBall::branching(ball.p, k);
        if r + 1 < m {
            return Cursor::Branch {
                k,
                i,
                r: r + 1,
                j: 0,
            };
        }
        if i + 1 < ball.sphere(k).len() {
            return Cursor::Branch {
                k,
                i: i + 1,
                r: 1,
                j: 0,
            };
        }
        if k + 1 < ball.radius {
            return Cursor::Branch {
                k: k + 1,
                i: 0,
                r: 1,
                j: 0,
            };
        }
        Cursor::Done
    }
}

impl Iterator for TreeEigenpairs<'_> {
    type Item = (f64, Vec<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        let ball = self.ball;
        let scale = 1.0 / sqrt(ball.p as f64);
        let n = ball.n_vertices();
        match self.cursor {
            Cursor::Done => None,
            Cursor::Radial(j) => {
                let (vals, vecs) = &self.radial;
                let mut out = vec![0.0; n];
                for k in 0..=ball.radius {
                    let range = ball.sphere(k);
                    let w = vecs[j][k] / sqrt(range.len() as f64);
                    out[range].iter_mut().for_each(|x| *x = w);
                }
                let lambda = vals[j] * scale;
                self.cursor = if j < ball.radius {
                    Cursor::Radial(j + 1)
                } else {
                    self.first_branch()
                };
                Some((lambda, out))
            }
            Cursor::Branch { k, i, r, j } => {
                let p = ball.p as usize;
                let m = TreeBall::branching(ball.p, k);
                let len = ball.radius - k;
                let (vals, vecs) = &self.path[len];
                let u = &vecs[j];
                // Helmert row r: r entries 1/√(r(r+1)), then −r/√(r(r+1)).
                let norm = sqrt((r * (r + 1)) as f64);
                let mut out = vec![0.0; n];
                for c in 0..=r {
                    let alpha = if c < r {
                        1.0 / norm
                    } else {
                        -(r as f64) / norm
                    };
                    // Descendants of child c of vertex (k, i) at depth d below the child.
                    let child = i * m + c;
                    for (d, &ud) in u.iter().enumerate() {
                        let width = p.pow(d as u32);
                        let start = ball.level_start[k + 1 + d] + child * width;
                        let w = alpha * ud / sqrt(width as f64);
                        out[start..start + width].iter_mut().for_each(|x| *x = w);
                    }
                }
                self.cursor = self.advance(k, i, r, j);
                Some((vals[j] * scale, out))
            }
        }
    }
}
