//! Synthesis of the flattening kernel `K_N`.
//!
//! The kernel has spherical transform `h(θ) = F_{M'}(qθ) − 1`, i.e.
//! `K_N = Σ_{j=1}^{M'−1} 2(M'−j)/M' · P_{jq}[½T_p]`, where `F_M` is the Fejér
//! kernel. Nonnegativity of `F_M` puts the whole tempered spectrum above
//! `−1`; even `q` puts both untempered branches above `M' − 1`; and the
//! support radius `(M'−1)q` stays within `N`.
//!
//! Principal targets (`θ ∈ {0, π}` or untempered) use `M' = M` and
//! `q = 2⌊N/2M⌋`. Interior tempered targets use `M' = 2M` and a `q` that is
//! an even multiple of a Dirichlet denominator `q'` for `θ/2π`, so that
//! `qθ` lands near `0 mod 2π`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{abs, ceil, cos, floor, ln, pow, sqrt, wrap_angle};
use crate::treekernel::{
    cheby_to_radial, l1linf_bound, spherical_transform, ChebyKernel, SpectralPoint,
};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Slack allowed below `−1` on the spectral floor.
pub const FLOOR_TOLERANCE: f64 = 1e-12;

/// Tunables for synthesis and certificate checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisConfig {
    /// Points in the tempered θ-grid over `[0, π]`.
    pub grid: usize,
    /// The constant `c` in the window `c·N·η² < q < 2Nη`.
    pub window_c: f64,
    /// Denominators up to this bound are also searched exhaustively.
    pub exhaustive_limit: usize,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            grid: 10_000,
            window_c: 0.25,
            exhaustive_limit: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisParams {
    pub p: u64,
    /// `N`.
    pub depth: usize,
    pub eta: f64,
    pub target: SpectralPoint,
}

/// Checked guarantees of a synthesized kernel.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct KernelCertificate {
    /// Fejér parameter `M` (before doubling for tempered targets).
    pub m: usize,
    pub q: usize,
    /// Certified exponent: `sup_bound = sup_constant · p^{−δN}`.
    pub delta: f64,
    pub support_radius: usize,
    pub sup_bound: f64,
    /// Minimum of the transform over the tempered grid and both untempered branches.
    pub spectral_floor: f64,
    pub target_value: f64,
    /// Minimum of the transform over the tempered grid alone.
    pub tempered_min: f64,
    /// Order `M'` of the Fejér kernel actually used.
    pub fejer_order: usize,
    /// Trigonometric degree `(M'−1)q` of the transform.
    pub degree: usize,
    pub grid_points: usize,
    /// `sup_bound · p^{q/2}`.
    pub sup_constant: f64,
    /// Dirichlet denominator `q'` (tempered targets only).
    pub q_prime: Option<usize>,
    /// Admissible `q` range `(lower, upper]` (tempered targets only).
    pub window: Option<(f64, f64)>,
    /// The target sits on the closed endpoint `t = log √p`.
    pub trivial_endpoint: bool,
}

/// `F_M(θ) = 1 + Σ_{j=1}^{M−1} 2(M−j)/M · cos jθ`.
pub fn fejer_eval(m: usize, theta: f64) -> f64 {
    assert!(m >= 1, "Fejér order must be positive");
    let mf = m as f64;
    1.0 + (1..m)
        .map(|j| 2.0 * (mf - j as f64) / mf * cos(j as f64 * theta))
        .sum::<f64>()
}

fn base_order(eta: f64) -> usize {
    ceil(1.0 / eta) as usize + 1
}

/// `M = ⌈1/η⌉ + 1`, raised by one when `M − 1 = 1/η` so that the principal
/// target value `M − 1` exceeds `1/η` strictly.
pub fn principal_order(eta: f64) -> usize {
    let m = base_order(eta);
    if (m - 1) as f64 <= 1.0 / eta {
        m + 1
    } else {
        m
    }
}

fn q_for_order(depth: usize, m: usize) -> Result<usize> {
    let q = 2 * (depth / (2 * m));
    if q == 0 {
        return Err(Error::InsufficientDepth {
            depth,
            min_depth: 2 * m,
        });
    }
    Ok(q)
}

/// `M = ⌈1/η⌉ + 1` and `q = 2⌊N/2M⌋`.
pub fn choose_q_principal(depth: usize, eta: f64) -> Result<(usize, usize)> {
    check_eta(eta, true)?;
    let m = base_order(eta);
    Ok((m, q_for_order(depth, m)?))
}

/// Outcome of the Dirichlet step for an interior tempered target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperedChoice {
    pub q: usize,
    /// Best denominator `q' ≤ ⌊Nη⌋` for `θ/2π`.
    pub q_prime: usize,
    /// `F_{2M}(qθ)`.
    pub fejer_value: f64,
    /// Exclusive lower end `cNη²` of the window.
    pub lower: f64,
    /// Inclusive upper end: `2Nη` capped by the support constraint `(2M−1)q ≤ N`.
    pub upper: f64,
    /// `q` is an even multiple of `q'` (otherwise it came from the full scan).
    pub from_multiple: bool,
}

/// The admissible window for `q`: even integers in `(cNη², 2Nη)` with
/// `(2M−1)q ≤ N`. Returned as `(lower, upper, candidates)`.
pub fn tempered_window(depth: usize, eta: f64, m: usize, window_c: f64) -> (f64, f64, Vec<usize>) {
    let n = depth as f64;
    let lower = window_c * n * eta * eta;
    let open_upper = 2.0 * n * eta;
    let support_cap = depth / (2 * m - 1);
    let upper = open_upper.min(support_cap as f64);
    let candidates = (1..)
        .map(|k| 2 * k)
        .take_while(|&q| q <= support_cap)
        .filter(|&q| q as f64 > lower && (q as f64) < open_upper)
        .collect();
    (lower, upper, candidates)
}

/// Picks `q` for an interior tempered `θ` with Fejér order `2M`.
pub fn choose_q_tempered(
    depth: usize,
    eta: f64,
    theta: f64,
    m: usize,
    config: &SynthesisConfig,
) -> Result<TemperedChoice> {
    check_eta(eta, true)?;
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidArgument(alloc::format!(
            "θ = {theta} is not interior to (0, π)"
        )));
    }
    let required = 1.0 / eta + 1.0;
    let order = 2 * m;
    let (lower, upper, candidates) = tempered_window(depth, eta, m, config.window_c);
    let q_max = floor(depth as f64 * eta) as usize;
    let q_prime = if q_max == 0 {
        0
    } else {
        best_denominator(theta / (2.0 * PI), q_max, config.exhaustive_limit)
    };

    let score = |q: usize| fejer_eval(order, wrap_angle(q as f64 * theta));
    let best_of = |qs: &mut dyn Iterator<Item = usize>| {
        qs.map(|q| (q, score(q)))
            .fold(None, |best: Option<(usize, f64)>, (q, f)| match best {
                Some((_, bf)) if bf > f => best,
                _ => Some((q, f)),
            })
    };

    let multiple_step = if q_prime % 2 == 0 {
        q_prime
    } else {
        2 * q_prime
    };
    let from_multiples = if q_prime == 0 {
        None
    } else {
        best_of(
            &mut candidates
                .iter()
                .copied()
                .filter(|q| q % multiple_step == 0),
        )
    };
    if let Some((q, f)) = from_multiples {
        if f > required {
            return Ok(TemperedChoice {
                q,
                q_prime,
                fejer_value: f,
                lower,
                upper,
                from_multiple: true,
            });
        }
    }
    match best_of(&mut candidates.iter().copied()) {
        Some((q, f)) if f > required => Ok(TemperedChoice {
            q,
            q_prime,
            fejer_value: f,
            lower,
            upper,
            from_multiple: false,
        }),
        best => Err(Error::DirichletWindowEmpty {
            best_fejer: best.map_or(f64::NAN, |(_, f)| f),
            required,
            lower,
            upper,
        }),
    }
}

/// Denominators of the continued-fraction convergents of `alpha` not
/// exceeding `q_max`, in increasing order.
pub fn convergent_denominators(alpha: f64, q_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut k_prev, mut k_cur): (u128, u128) = (0, 1);
    let mut x = alpha - floor(alpha);
    out.push(1);
    for _ in 0..64 {
        if x < 1e-15 {
            break;
        }
        let inv = 1.0 / x;
        let a = floor(inv);
        if a > q_max as f64 {
            break;
        }
        let k_next = (a as u128) * k_cur + k_prev;
        if k_next > q_max as u128 {
            break;
        }
        out.push(k_next as usize);
        k_prev = k_cur;
        k_cur = k_next;
        x = inv - a;
    }
    out.dedup();
    out
}

// Distance from x to the nearest integer.
fn frac_dist(x: f64) -> f64 {
    abs(x - floor(x + 0.5))
}

/// `q' ∈ [1, q_max]` minimising `‖q'α‖`. The last convergent is the
/// minimiser in exact arithmetic; below `exhaustive_limit` every candidate
/// is checked as well and the smallest true minimiser wins.
pub fn best_denominator(alpha: f64, q_max: usize, exhaustive_limit: usize) -> usize {
    assert!(q_max >= 1);
    let from_cf = *convergent_denominators(alpha, q_max).last().unwrap();
    if q_max > exhaustive_limit {
        return from_cf;
    }
    let mut best = (from_cf, frac_dist(from_cf as f64 * alpha));
    for q in 1..=q_max {
        let d = frac_dist(q as f64 * alpha);
        if d < best.1 - 1e-15 || (abs(d - best.1) <= 1e-15 && q < best.0) {
            best = (q, d);
        }
    }
    best.0
}

fn check_eta(eta: f64, allow_one: bool) -> Result<()> {
    let ok = eta > 0.0 && (eta < 1.0 || (allow_one && eta == 1.0));
    if !ok {
        return Err(Error::InvalidArgument(alloc::format!(
            "η = {eta} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Minimum of the tempered transform on `grid` equally spaced points of `[0, π]`.
pub fn tempered_grid_min(k: &ChebyKernel, grid: usize) -> (f64, f64) {
    let grid = grid.max(2);
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..grid {
        let theta = PI * i as f64 / (grid - 1) as f64;
        let h: f64 = k.terms().map(|(n, a)| a * cos(n as f64 * theta)).sum();
        if h < best.0 {
            best = (h, theta);
        }
    }
    best
}

/// Builds `K_N` for the target and certifies it.
pub fn synthesize(
    params: &SynthesisParams,
    config: &SynthesisConfig,
) -> Result<(ChebyKernel, KernelCertificate)> {
    let SynthesisParams {
        p,
        depth,
        eta,
        target,
    } = *params;
    check_eta(eta, false)?;
    if target.p() != p {
        return Err(Error::PrimeMismatch {
            kernel: target.p(),
            graph: p,
        });
    }
    if depth == 0 {
        return Err(Error::InsufficientDepth {
            depth,
            min_depth: 2 * principal_order(eta),
        });
    }

    let (m, fejer_order, q, q_prime, window) = match target {
        SpectralPoint::Tempered { theta, .. } if !target.is_principal() => {
            let m = base_order(eta);
            let choice = choose_q_tempered(depth, eta, theta, m, config)?;
            (
                m,
                2 * m,
                choice.q,
                Some(choice.q_prime),
                Some((choice.lower, choice.upper)),
            )
        }
        _ => {
            let m = principal_order(eta);
            (m, m, q_for_order(depth, m)?, None, None)
        }
    };

    let mf = fejer_order as f64;
    let terms: Vec<(usize, f64)> = (1..fejer_order)
        .map(|j| (j * q, 2.0 * (mf - j as f64) / mf))
        .collect();
    let kernel = ChebyKernel::from_terms(p, &terms)?;
    let support_radius = kernel.degree().unwrap_or(0);

    let radial = cheby_to_radial(&kernel, depth)?;
    let sup_bound = l1linf_bound(&radial);
    let (tempered_min, _) = tempered_grid_min(&kernel, config.grid);
    let spectral_floor = untempered_endpoints(p)
        .iter()
        .map(|s| spherical_transform(&kernel, s))
        .fold(tempered_min, f64::min);
    let target_value = spherical_transform(&kernel, &target);

    let cert = KernelCertificate {
        m,
        q,
        delta: q as f64 / (2.0 * depth as f64),
        support_radius,
        sup_bound,
        spectral_floor,
        target_value,
        tempered_min,
        fejer_order,
        degree: support_radius,
        grid_points: config.grid.max(2),
        sup_constant: sup_bound * pow(p as f64, q as f64 / 2.0),
        q_prime,
        window,
        trivial_endpoint: target.at_trivial_endpoint(),
    };

    if cert.support_radius > depth {
        return Err(Error::CertificateViolation(alloc::format!(
            "support {} > N = {depth}",
            cert.support_radius
        )));
    }
    if !(cert.target_value > 1.0 / eta) {
        return Err(Error::CertificateViolation(alloc::format!(
            "target value {} not above 1/η = {}",
            cert.target_value,
            1.0 / eta
        )));
    }
    if cert.spectral_floor < -1.0 - FLOOR_TOLERANCE {
        return Err(Error::CertificateViolation(alloc::format!(
            "spectral floor {} below -1",
            cert.spectral_floor
        )));
    }
    Ok((kernel, cert))
}

// The two ends of each untempered branch.
fn untempered_endpoints(p: u64) -> [SpectralPoint; 2] {
    let t_max = ln(sqrt(p as f64));
    [
        SpectralPoint::UntemperedPos { p, t: t_max },
        SpectralPoint::UntemperedNeg { p, t: t_max },
    ]
}

/// The largest `N ≤ max_depth` for which synthesis succeeds.
pub fn largest_admissible_depth(
    p: u64,
    eta: f64,
    target: SpectralPoint,
    max_depth: usize,
    config: &SynthesisConfig,
) -> Option<(usize, ChebyKernel, KernelCertificate)> {
    (1..=max_depth).rev().find_map(|depth| {
        synthesize(
            &SynthesisParams {
                p,
                depth,
                eta,
                target,
            },
            config,
        )
        .ok()
        .map(|(k, c)| (depth, k, c))
    })
}

/// A certificate check that did not hold.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Support { radius: usize, depth: usize },
    Floor { at: SpectralPoint, value: f64 },
    Target { value: f64, required: f64 },
    SupBound { value: f64, bound: f64 },
    Radial(Error),
}

/// Result of [`verify_certificate`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Verification {
    pub violations: Vec<Violation>,
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Rechecks a kernel against its certificate from scratch.
pub fn verify_certificate(
    k: &ChebyKernel,
    cert: &KernelCertificate,
    depth: usize,
    eta: f64,
    target: &SpectralPoint,
    config: &SynthesisConfig,
) -> Verification {
    let p = k.p();
    let mut violations = Vec::new();
    let radius = k.degree().unwrap_or(0);
    if radius > depth || cert.support_radius > depth {
        violations.push(Violation::Support {
            radius: radius.max(cert.support_radius),
            depth,
        });
    }

    let floor = -1.0 - FLOOR_TOLERANCE;
    let (grid_min, at) = tempered_grid_min(k, config.grid);
    if grid_min < floor {
        violations.push(Violation::Floor {
            at: SpectralPoint::Tempered { p, theta: at },
            value: grid_min,
        });
    }
    // With nonnegative coefficients (after the branch sign) each untempered
    // branch is increasing in t, so the far endpoint plus the tempered grid
    // settle it; otherwise scan t.
    let t_max = ln(sqrt(p as f64));
    let pos_monotone = k.terms().all(|(_, a)| a >= 0.0);
    let neg_monotone = k
        .terms()
        .all(|(n, a)| if n % 2 == 0 { a >= 0.0 } else { a <= 0.0 });
    let t_grid = |monotone: bool| -> Vec<f64> {
        if monotone {
            vec![t_max]
        } else {
            let steps = config.grid.max(2);
            (1..steps)
                .map(|i| t_max * i as f64 / (steps - 1) as f64)
                .collect()
        }
    };
    for t in t_grid(pos_monotone) {
        let s = SpectralPoint::UntemperedPos { p, t };
        let v = spherical_transform(k, &s);
        if v < floor {
            violations.push(Violation::Floor { at: s, value: v });
            break;
        }
    }
    for t in t_grid(neg_monotone) {
        let s = SpectralPoint::UntemperedNeg { p, t };
        let v = spherical_transform(k, &s);
        if v < floor {
            violations.push(Violation::Floor { at: s, value: v });
            break;
        }
    }

    let value = spherical_transform(k, target);
    if !(value > 1.0 / eta) {
        violations.push(Violation::Target {
            value,
            required: 1.0 / eta,
        });
    }

    match cheby_to_radial(k, radius.max(depth)) {
        Ok(radial) => {
            let sup = l1linf_bound(&radial);
            if sup > cert.sup_bound * (1.0 + 1e-12) {
                violations.push(Violation::SupBound {
                    value: sup,
                    bound: cert.sup_bound,
                });
            }
        }
        Err(e) => violations.push(Violation::Radial(e)),
    }
    Verification { violations }
}
