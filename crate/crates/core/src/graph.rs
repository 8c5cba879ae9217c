//! Finite (p+1)-regular graphs as stand-ins for quotients of the tree.
//!
//! Sphere operators are defined by the Hecke recurrence
//! `S_0 = I, S_1 = A, S_2 = A² − (p+1)I, S_{j+1} = A S_j − p S_{j−1}`.
//! `(S_j)_{xy}` counts non-backtracking walks of length `j` from `x` to `y`,
//! so the operators are entrywise nonnegative on every regular graph; they
//! coincide with the distance-`j` sphere only for `j < girth / 2`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chebwave::apply_first_kind;
use crate::operator::{Adjacency, Operator, Scaled};
use crate::treekernel::{ChebyKernel, RadialKernel};
use crate::{Error, Result};

const REJECTION_BUDGET: usize = 100_000;

/// A simple undirected graph in which every vertex has degree `p + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    p: u64,
    adjacency: Adjacency,
    girth: Option<usize>,
}

impl RegularGraph {
    /// Validates an edge list on `n` vertices: no self-loops, no repeated
    /// edges, all degrees equal and at least 3.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("graph has no vertices".into()));
        }
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop { vertex: u });
            }
        }
        let adjacency = Adjacency::from_edges(n, edges)?;
        for v in 0..n {
            let mut seen: Vec<usize> = adjacency.neighbors(v).to_vec();
            seen.sort_unstable();
            if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge {
                    u: v.min(w[0]),
                    v: v.max(w[0]),
                });
            }
        }
        let expected = modal_degree(&adjacency);
        if let Some(v) = (0..n).find(|&v| adjacency.degree(v) != expected) {
            return Err(Error::IrregularDegree {
                vertex: v,
                degree: adjacency.degree(v),
                expected,
            });
        }
        if expected < 3 {
            return Err(Error::InvalidArgument(alloc::format!(
                "degree {expected}; need degree >= 3"
            )));
        }
        let girth = compute_girth(&adjacency);
        Ok(Self {
            p: expected as u64 - 1,
            adjacency,
            girth,
        })
    }

    /// The complete graph on `p + 2` vertices.
    pub fn complete(p: u64) -> Self {
        let n = p as usize + 2;
        let edges: Vec<_> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        Self::from_edges(n, &edges).expect("complete graph is regular")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, &edges).expect("Petersen graph is 3-regular")
    }

    /// A (p+1)-regular simple graph from the pairing model, rejecting
    /// pairings with loops or repeated edges. Deterministic in `seed`.
    pub fn random_regular(p: u64, n: usize, seed: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "p = {p}; need p >= 2"
            )));
        }
        let d = p as usize + 1;
        if (d * n) % 2 == 1 {
            return Err(Error::OddDegreeSum {
                degree: d,
                n_vertices: n,
            });
        }
        if n <= d {
            return Err(Error::InvalidArgument(alloc::format!(
                "need more than {d} vertices, got {n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<usize> = (0..n).flat_map(|v| core::iter::repeat_n(v, d)).collect();
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
        'attempt: for _ in 0..REJECTION_BUDGET {
            points.shuffle(&mut rng);
            nbrs.iter_mut().for_each(Vec::clear);
            for pair in points.chunks_exact(2) {
                let (u, v) = (pair[0], pair[1]);
                if u == v || nbrs[u].contains(&v) {
                    continue 'attempt;
                }
                nbrs[u].push(v);
                nbrs[v].push(u);
            }
            let edges: Vec<(usize, usize)> = points.chunks_exact(2).map(|c| (c[0], c[1])).collect();
            return Self::from_edges(n, &edges);
        }
        Err(Error::RejectionBudgetExhausted {
            attempts: REJECTION_BUDGET,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.p as usize + 1
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.n_vertices()
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    /// Shortest cycle length; `None` only for a forest, which cannot be regular.
    pub fn girth(&self) -> Option<usize> {
        self.girth
    }

    /// `T = A/√p`.
    pub fn normalized(&self) -> Scaled<'_> {
        self.adjacency.normalized(self.p)
    }

    /// `S_j f`.
    pub fn sphere_apply(&self, j: usize, f: &[f64]) -> Result<Vec<f64>> {
        sphere_apply(&self.adjacency, self.p, j, f)
    }

    /// `K f` for either kernel representation. The Chebyshev form is applied
    /// by Clenshaw in `T = A/√p`; the radial form as `Σ_j k_j S_j f`.
    pub fn kernel_apply<'k>(&self, kernel: impl Into<Kernel<'k>>, f: &[f64]) -> Result<Vec<f64>> {
        kernel_apply(&self.adjacency, self.p, kernel.into(), f)
    }
}

/// Either representation of a kernel.
#[derive(Debug, Clone, Copy)]
pub enum Kernel<'a> {
    Cheby(&'a ChebyKernel),
    Radial(&'a RadialKernel),
}

impl Kernel<'_> {
    pub fn p(&self) -> u64 {
        match self {
            Kernel::Cheby(k) => k.p(),
            Kernel::Radial(k) => k.p(),
        }
    }
}

impl<'a> From<&'a ChebyKernel> for Kernel<'a> {
    fn from(k: &'a ChebyKernel) -> Self {
        Kernel::Cheby(k)
    }
}

impl<'a> From<&'a RadialKernel> for Kernel<'a> {
    fn from(k: &'a RadialKernel) -> Self {
        Kernel::Radial(k)
    }
}

/// Streams `S_0 f, S_1 f, …, S_depth f` into `visit(j, S_j f)`.
pub fn for_each_sphere<F>(
    adj: &Adjacency,
    p: u64,
    depth: usize,
    f: &[f64],
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, &[f64]),
{
    adj.check_dim(f.len())?;
    let n = f.len();
    let mut prev = f.to_vec();
    visit(0, &prev);
    if depth == 0 {
        return Ok(());
    }
    let mut cur = adj.apply(f);
    visit(1, &cur);
    let mut next = vec![0.0; n];
    for j in 1..depth {
        // S_2 = A S_1 − (p+1) S_0; afterwards the backtrack weight is p.
        let back = if j == 1 { (p + 1) as f64 } else { p as f64 };
        adj.apply_into(&cur, &mut next);
        next.iter_mut().zip(&prev).for_each(|(x, y)| *x -= back * y);
        core::mem::swap(&mut prev, &mut cur);
        core::mem::swap(&mut cur, &mut next);
        visit(j + 1, &cur);
    }
    Ok(())
}

/// `S_j f` on any structure whose interior is (p+1)-regular.
pub fn sphere_apply(adj: &Adjacency, p: u64, j: usize, f: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for_each_sphere(adj, p, j, f, |i, s| {
        if i == j {
            out = s.to_vec();
        }
    })?;
    Ok(out)
}

/// `K f` on an adjacency structure with parameter `p`.
pub fn kernel_apply(adj: &Adjacency, p: u64, kernel: Kernel<'_>, f: &[f64]) -> Result<Vec<f64>> {
    if kernel.p() != p {
        return Err(Error::PrimeMismatch {
            kernel: kernel.p(),
            graph: p,
        });
    }
    adj.check_dim(f.len())?;
    match kernel {
        Kernel::Cheby(k) => apply_first_kind(&adj.normalized(p), k.coeffs(), f),
        Kernel::Radial(k) => {
            let coeffs = k.coeffs();
            let mut out = vec![0.0; f.len()];
            for_each_sphere(adj, p, k.support_radius(), f, |j, s| {
                let c = coeffs[j];
                if c != 0.0 {
                    out.iter_mut().zip(s).for_each(|(o, x)| *o += c * x);
                }
            })?;
            Ok(out)
        }
    }
}

// Most frequent degree, ties to the larger.
fn modal_degree(adj: &Adjacency) -> usize {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for v in 0..adj.n_vertices() {
        let d = adj.degree(v);
        match counts.iter_mut().find(|(deg, _)| *deg == d) {
            Some((_, c)) => *c += 1,
            None => counts.push((d, 1)),
        }
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .map_or(0, |(d, _)| d)
}

fn compute_girth(adj: &Adjacency) -> Option<usize> {
    let n = adj.n_vertices();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist[root] = 0;
        touched.push(root);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            // Any cycle closed from here has length at least 2·dist(u) + 1.
            if best != usize::MAX && 2 * dist[u] + 1 >= best {
                break;
            }
            for &w in adj.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
        queue.clear();
        for v in touched.drain(..) {
            dist[v] = usize::MAX;
            parent[v] = usize::MAX;
        }
    }
    (best != usize::MAX).then_some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeBall;
    use crate::treekernel::cheby_to_radial;

    // Shortest cycle through brute force: for each edge, BFS distance between
    // its endpoints with the edge removed.
    fn girth_oracle(g: &RegularGraph) -> usize {
        let adj = g.adjacency();
        let n = g.n_vertices();
        let mut best = usize::MAX;
        for (u, v) in adj.edges() {
            let mut dist = vec![usize::MAX; n];
            dist[u] = 0;
            let mut q = VecDeque::from([u]);
            while let Some(x) = q.pop_front() {
                for &y in adj.neighbors(x) {
                    if (x == u && y == v) || (x == v && y == u) {
                        continue;
                    }
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        q.push_back(y);
                    }
                }
            }
            if dist[v] != usize::MAX {
                best = best.min(dist[v] + 1);
            }
        }
        best
    }

    #[test]
    fn small_graphs() {
        let k4 = RegularGraph::complete(2);
        assert_eq!((k4.p(), k4.n_vertices(), k4.girth()), (2, 4, Some(3)));
        let pet = RegularGraph::petersen();
        assert_eq!((pet.p(), pet.n_vertices(), pet.girth()), (2, 10, Some(5)));
        assert_eq!(girth_oracle(&pet), 5);
    }

    #[test]
    fn loader_errors() {
        assert_eq!(
            RegularGraph::from_edges(3, &[(0, 0)]),
            Err(Error::SelfLoop { vertex: 0 })
        );
        let dup = [(0, 1), (0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)];
        assert!(matches!(
            RegularGraph::from_edges(4, &dup),
            Err(Error::DuplicateEdge { u: 0, v: 1 })
        ));
        let mut k4: Vec<_> = RegularGraph::complete(2).adjacency().edges().collect();
        k4.pop();
        assert!(matches!(
            RegularGraph::from_edges(4, &k4),
            Err(Error::IrregularDegree {
                vertex: 2,
                degree: 2,
                ..
            })
        ));
    }

    #[test]
    fn random_regular_contract() {
        let g = RegularGraph::random_regular(2, 10, 1).unwrap();
        assert_eq!(g.n_vertices(), 10);
        assert!((0..10).all(|v| g.adjacency().degree(v) == 3));
        assert_eq!(g, RegularGraph::random_regular(2, 10, 1).unwrap());
        assert_eq!(
            RegularGraph::random_regular(2, 9, 1),
            Err(Error::OddDegreeSum {
                degree: 3,
                n_vertices: 9
            })
        );
        let big = RegularGraph::random_regular(4, 500, 7).unwrap();
        assert!(big.girth().unwrap() >= 3);
        for seed in 0..5 {
            let g = RegularGraph::random_regular(2, 60, seed).unwrap();
            assert_eq!(g.girth().unwrap(), girth_oracle(&g));
        }
    }

    #[test]
    fn sphere_on_tree_is_indicator() {
        let ball = TreeBall::new(3, 6);
        let mut delta = vec![0.0; ball.n_vertices()];
        delta[0] = 1.0;
        for j in 0..=5 {
            let s = sphere_apply(ball.adjacency(), 3, j, &delta).unwrap();
            assert_eq!(s, ball.sphere_indicator(j), "j={j}");
        }
        let s4 = sphere_apply(ball.adjacency(), 3, 4, &delta).unwrap();
        assert_eq!(s4.iter().sum::<f64>(), 108.0);
    }

    #[test]
    fn petersen_sphere_beyond_half_girth() {
        let g = RegularGraph::petersen();
        let mut delta = vec![0.0; 10];
        delta[0] = 1.0;
        assert_eq!(g.sphere_apply(0, &delta).unwrap(), delta);
        let s2 = g.sphere_apply(2, &delta).unwrap();
        assert!(s2.iter().all(|&x| x == 0.0 || x == 1.0));
        // Diameter 2: the distance-3 sphere is empty, yet S_3 counts the
        // 3·2·2 = 12 non-backtracking walks of length 3.
        let s3 = g.sphere_apply(3, &delta).unwrap();
        assert_eq!(s3.iter().sum::<f64>(), 12.0);
        assert!(s3.iter().all(|&x| x >= 0.0));
        assert!(s3.iter().any(|&x| x > 1.0) || s3.iter().filter(|&&x| x > 0.0).count() > 0);
    }

    #[test]
    fn radial_and_cheby_paths_agree() {
        let g = RegularGraph::random_regular(2, 200, 3).unwrap();
        let k = ChebyKernel::from_terms(2, &[(0, 0.2), (2, -1.0), (6, 0.5), (12, 0.75)]).unwrap();
        let r = cheby_to_radial(&k, 12).unwrap();
        let f: Vec<f64> = (0..200)
            .map(|i| ((i * 37 % 101) as f64) / 50.0 - 1.0)
            .collect();
        let a = g.kernel_apply(&k, &f).unwrap();
        let b = g.kernel_apply(&r, &f).unwrap();
        let scale = crate::math::max_abs(&a);
        let d = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(d / scale < 1e-9);
    }

    #[test]
    fn identity_radial_kernel() {
        let g = RegularGraph::petersen();
        let f: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let id = RadialKernel::delta(2).unwrap();
        assert_eq!(g.kernel_apply(&id, &f).unwrap(), f);
    }

    #[test]
    fn prime_mismatch() {
        let g = RegularGraph::petersen();
        let k = RadialKernel::delta(3).unwrap();
        assert_eq!(
            g.kernel_apply(&k, &[0.0; 10]),
            Err(Error::PrimeMismatch {
                kernel: 3,
                graph: 2
            })
        );
    }
}
