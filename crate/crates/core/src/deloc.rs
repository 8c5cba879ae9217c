//! Mass-concentration obstruction for eigenvectors of regular graphs.
//!
//! For an eigenvector `Φ` and a vertex set `E` with `‖Φ1_E‖² > η`, the
//! correlation `⟨K_N(Φ1_E), Φ1_E⟩` is bounded below spectrally (every
//! eigenvalue of `K_N` is at least `−1` and `Φ`'s exceeds `1/η`) and above
//! pointwise (small radial coefficients times non-backtracking pair counts).
//! Squeezing the two bounds forces `E` to be large.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::EigenPair;
use crate::graph::{for_each_sphere, Kernel, RegularGraph};
use crate::math::{abs, dot};
use crate::synth::{synthesize, KernelCertificate, SynthesisConfig, SynthesisParams};
use crate::treekernel::{cheby_to_radial, l1linf_bound, RadialKernel, SpectralPoint};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Absolute slack on both sides of the squeeze.
pub const SQUEEZE_TOLERANCE: f64 = 1e-8;
/// Residual `‖TΦ − λΦ‖` below which `Φ` counts as an eigenvector.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// A vertex set `E` and the mass `‖Φ1_E‖²` it carries.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MassSet {
    /// Sorted, duplicate-free.
    pub vertices: Vec<usize>,
    pub mass: f64,
}

impl MassSet {
    pub fn new(mut vertices: Vec<usize>, phi: &[f64]) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        if let Some(&v) = vertices.iter().find(|&&v| v >= phi.len()) {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n_vertices: phi.len(),
            });
        }
        let mass = neumaier_sum(vertices.iter().map(|&v| phi[v] * phi[v]));
        Ok(Self { vertices, mass })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `Φ·1_E`.
    pub fn mask(&self, phi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; phi.len()];
        for &v in &self.vertices {
            out[v] = phi[v];
        }
        out
    }
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        if abs(sum) >= abs(x) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// The shortest prefix of vertices, ordered by `|Φ(x)|²` descending (ties by
/// index), whose mass exceeds `η`. Returns every vertex if none does.
pub fn greedy_mass_set(phi: &[f64], eta: f64) -> Result<MassSet> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "η = {eta} outside (0, 1)"
        )));
    }
    let mut order: Vec<usize> = (0..phi.len()).collect();
    order.sort_by(|&a, &b| {
        (phi[b] * phi[b])
            .total_cmp(&(phi[a] * phi[a]))
            .then(a.cmp(&b))
    });
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut take = order.len();
    for (i, &v) in order.iter().enumerate() {
        let x = phi[v] * phi[v];
        let t = sum + x;
        comp += if abs(sum) >= abs(x) {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
        if sum + comp > eta {
            take = i + 1;
            break;
        }
    }
    order.truncate(take);
    MassSet::new(order, phi)
}

/// `⟨K(Φ1_E), Φ1_E⟩`.
pub fn correlation<'k>(
    g: &RegularGraph,
    kernel: impl Into<Kernel<'k>>,
    phi: &[f64],
    set: &MassSet,
) -> Result<f64> {
    let f = set.mask(phi);
    let kf = g.kernel_apply(kernel, &f)?;
    Ok(dot(&kf, &f))
}

/// `mass²·h − mass·(1 − η)`, which exceeds `η²` when `mass > η` and
/// `h > 1/η`. `None` when those hypotheses fail.
pub fn spectral_lower_bound(h_target: f64, mass: f64, eta: f64) -> Option<f64> {
    (mass > eta && h_target > 1.0 / eta).then_some(mass * mass * h_target - mass * (1.0 - eta))
}

/// The pointwise upper bound on the correlation and its ingredients.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PointwiseBudget {
    /// `sup · pair_weight`.
    pub value: f64,
    /// `Σ_{x,y∈E} n_{≤R}(x,y)·|Φ(x)||Φ(y)|` with `R` the kernel support radius
    /// and `n_{≤R}` the number of non-backtracking walks of length at most `R`.
    pub pair_weight: f64,
    /// `max_j |k_j|`.
    pub sup: f64,
    pub radius: usize,
    /// `girth > 2R`: walks are geodesics and `n_{≤R}(x,y) ∈ {0, 1}`.
    pub girth_ok: bool,
    /// `max_{x∈E} Σ_{y∈E} n_{≤R}(x,y)`.
    pub row_max: f64,
    /// Pair-collision constant: 1 within girth, else `max(1, row_max/|E|)`.
    pub c_pair: f64,
}

/// Upper bound `max_j|k_j| · Σ_{x,y∈E} n_{≤R}(x,y)|Φ(x)||Φ(y)|` on
/// `|⟨K(Φ1_E), Φ1_E⟩|`.
pub fn pointwise_budget(
    g: &RegularGraph,
    k: &RadialKernel,
    phi: &[f64],
    set: &MassSet,
) -> Result<PointwiseBudget> {
    if k.p() != g.p() {
        return Err(Error::PrimeMismatch {
            kernel: k.p(),
            graph: g.p(),
        });
    }
    if phi.len() != g.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: g.n_vertices(),
            found: phi.len(),
        });
    }
    let radius = k.support_radius();
    let sup = l1linf_bound(k);
    let girth_ok = g.girth().is_none_or(|girth| girth > 2 * radius);
    let abs_f: Vec<f64> = set.mask(phi).iter().map(|x| abs(*x)).collect();

    let (pair_weight, row_max) = if girth_ok {
        (ball_pair_weight(g, radius, &abs_f, set), set.len() as f64)
    } else {
        let mut indicator = vec![0.0; g.n_vertices()];
        set.vertices.iter().for_each(|&v| indicator[v] = 1.0);
        let w_f = walk_sum(g, radius, &abs_f)?;
        let w_1 = walk_sum(g, radius, &indicator)?;
        let row_max = set.vertices.iter().map(|&v| w_1[v]).fold(0.0, f64::max);
        (dot(&abs_f, &w_f), row_max)
    };
    let c_pair = if girth_ok || set.is_empty() {
        1.0
    } else {
        (row_max / set.len() as f64).max(1.0)
    };
    Ok(PointwiseBudget {
        value: sup * pair_weight,
        pair_weight,
        sup,
        radius,
        girth_ok,
        row_max,
        c_pair,
    })
}

// Σ_{j≤R} S_j f.
fn walk_sum(g: &RegularGraph, radius: usize, f: &[f64]) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; f.len()];
    for_each_sphere(g.adjacency(), g.p(), radius, f, |_, s| {
        acc.iter_mut().zip(s).for_each(|(a, x)| *a += x);
    })?;
    Ok(acc)
}

// Within girth every vertex of the radius-R ball is reached by exactly one
// non-backtracking walk, so the pair weight is a sum over truncated BFS balls.
fn ball_pair_weight(g: &RegularGraph, radius: usize, abs_f: &[f64], set: &MassSet) -> f64 {
    let n = g.n_vertices();
    let mut dist = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    let mut total = 0.0;
    for &x in &set.vertices {
        dist[x] = 0;
        touched.push(x);
        queue.push_back(x);
        let mut inner = 0.0;
        while let Some(u) = queue.pop_front() {
            inner += abs_f[u];
            if dist[u] == radius {
                continue;
            }
            for &w in g.adjacency().neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    touched.push(w);
                    queue.push_back(w);
                }
            }
        }
        total += abs_f[x] * inner;
        for v in touched.drain(..) {
            dist[v] = usize::MAX;
        }
    }
    total
}

/// Everything computed for one eigenvector, with every constant exposed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ObstructionReport {
    pub schema: u32,
    pub eta: f64,
    /// `N`.
    pub depth: usize,
    pub lambda_t: f64,
    pub spectral: SpectralPoint,
    pub eigen_residual: f64,
    pub set_size: usize,
    pub mass: f64,
    /// Exact `⟨K_N(Φ1_E), Φ1_E⟩`.
    pub correlation: f64,
    /// `None` when the hypotheses (eigenvector, mass > η, certified target) fail.
    pub spectral_lower: Option<f64>,
    pub hypothesis_met: bool,
    pub pointwise_budget: f64,
    pub pair_weight: f64,
    pub sup_bound: f64,
    pub c_pair: f64,
    pub girth: Option<usize>,
    pub girth_ok: bool,
    /// `spectral_lower / (sup_bound · N · c_pair)`, a lower bound on `|E|`.
    pub cell_bound: Option<f64>,
    pub cells_ok: Option<bool>,
    /// `spectral_lower − tol ≤ correlation ≤ pointwise_budget + tol`.
    pub squeeze_holds: bool,
    /// Within girth: `pair_weight ≥ spectral_lower / sup_bound`.
    pub obstruction_holds: Option<bool>,
    pub certificate: KernelCertificate,
}

pub const REPORT_SCHEMA: u32 = 1;

impl ObstructionReport {
    /// Every check that applies passed.
    pub fn all_checks_pass(&self) -> bool {
        self.squeeze_holds && self.cells_ok != Some(false) && self.obstruction_holds != Some(false)
    }
}

/// Synthesizes `K_N` for the eigenvector's spectral point and evaluates
/// both sides of the correlation estimate.
pub fn obstruction_report(
    g: &RegularGraph,
    pair: &EigenPair,
    eta: f64,
    depth: usize,
    config: &SynthesisConfig,
) -> Result<ObstructionReport> {
    let phi = &pair.vector;
    if phi.len() != g.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: g.n_vertices(),
            found: phi.len(),
        });
    }
    let eigen_residual = pair.residual(g);
    let params = SynthesisParams {
        p: g.p(),
        depth,
        eta,
        target: pair.spectral,
    };
    let (kernel, certificate) = synthesize(&params, config)?;
    let set = greedy_mass_set(phi, eta)?;
    let corr = correlation(g, &kernel, phi, &set)?;
    let radial = cheby_to_radial(&kernel, depth)?;
    let budget = pointwise_budget(g, &radial, phi, &set)?;

    let spectral_lower = if eigen_residual < EIGEN_RESIDUAL_TOLERANCE {
        spectral_lower_bound(certificate.target_value, set.mass, eta)
    } else {
        None
    };
    let sup = certificate.sup_bound;
    let cell_bound = spectral_lower.map(|s| s / (sup * depth as f64 * budget.c_pair));
    let squeeze_holds = spectral_lower.is_none_or(|s| corr >= s - SQUEEZE_TOLERANCE)
        && corr <= budget.value + SQUEEZE_TOLERANCE;
    let obstruction_holds = match spectral_lower {
        Some(s) if budget.girth_ok => Some(budget.pair_weight * sup >= s - SQUEEZE_TOLERANCE),
        _ => None,
    };

    Ok(ObstructionReport {
        schema: REPORT_SCHEMA,
        eta,
        depth,
        lambda_t: pair.lambda_t,
        spectral: pair.spectral,
        eigen_residual,
        set_size: set.len(),
        mass: set.mass,
        correlation: corr,
        spectral_lower,
        hypothesis_met: spectral_lower.is_some(),
        pointwise_budget: budget.value,
        pair_weight: budget.pair_weight,
        sup_bound: sup,
        c_pair: budget.c_pair,
        girth: g.girth(),
        girth_ok: budget.girth_ok,
        cell_bound,
        cells_ok: cell_bound.map(|c| set.len() as f64 >= c),
        squeeze_holds,
        obstruction_holds,
        certificate,
    })
}
