//! Radial kernels on the (p+1)-regular tree and their spectral form.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, acos, acosh, cos, cosh, int_pow, ln, sqrt};
use crate::{Error, Result};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Number of vertices at distance `j` from a fixed vertex of the tree.
pub fn sphere_size(p: u64, j: usize) -> u64 {
    if j == 0 {
        1
    } else {
        (p + 1) * p.pow(j as u32 - 1)
    }
}

// Relative slack when classifying an eigenvalue against the spectral bounds.
const SPECTRAL_SLACK: f64 = 1e-9;

/// Spectral parameter of a `T_p` eigenvalue `λ = 2cos θ`.
///
/// Tempered eigenvalues have `θ ∈ [0, π]`. Untempered ones have `θ = it`
/// (positive branch, `λ = 2cosh t`) or `θ = π + it` (negative branch,
/// `λ = −2cosh t`) with `t ∈ (0, log √p]`; the closed endpoint is the
/// trivial eigenvalue `±(p+1)/√p`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "branch", rename_all = "snake_case")
)]
pub enum SpectralPoint {
    Tempered { p: u64, theta: f64 },
    UntemperedPos { p: u64, t: f64 },
    UntemperedNeg { p: u64, t: f64 },
}

impl SpectralPoint {
    pub fn tempered(p: u64, theta: f64) -> Result<Self> {
        check_p(p)?;
        if !(0.0..=core::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "tempered θ = {theta} outside [0, π]"
            )));
        }
        Ok(Self::Tempered { p, theta })
    }

    pub fn untempered_pos(p: u64, t: f64) -> Result<Self> {
        Ok(Self::UntemperedPos {
            p,
            t: check_t(p, t)?,
        })
    }

    pub fn untempered_neg(p: u64, t: f64) -> Result<Self> {
        Ok(Self::UntemperedNeg {
            p,
            t: check_t(p, t)?,
        })
    }

    /// Parametrises an eigenvalue of `T = A/√p`.
    pub fn from_eigenvalue(p: u64, lambda: f64) -> Result<Self> {
        check_p(p)?;
        let bound = (p + 1) as f64 / sqrt(p as f64);
        if abs(lambda) > bound * (1.0 + SPECTRAL_SLACK) {
            return Err(Error::InvalidArgument(format!(
                "eigenvalue {lambda} exceeds (p+1)/√p = {bound}"
            )));
        }
        let half = lambda / 2.0;
        let t_max = ln(sqrt(p as f64));
        Ok(if abs(half) <= 1.0 {
            Self::Tempered {
                p,
                theta: acos(half),
            }
        } else if half > 0.0 {
            Self::UntemperedPos {
                p,
                t: acosh(half).min(t_max),
            }
        } else {
            Self::UntemperedNeg {
                p,
                t: acosh(-half).min(t_max),
            }
        })
    }

    pub fn p(&self) -> u64 {
        match *self {
            Self::Tempered { p, .. }
            | Self::UntemperedPos { p, .. }
            | Self::UntemperedNeg { p, .. } => p,
        }
    }

    /// `λ = 2cos θ` in the appropriate branch.
    pub fn eigenvalue(&self) -> f64 {
        match *self {
            Self::Tempered { theta, .. } => 2.0 * cos(theta),
            Self::UntemperedPos { t, .. } => 2.0 * cosh(t),
            Self::UntemperedNeg { t, .. } => -2.0 * cosh(t),
        }
    }

    /// `θ ∈ {0, π}` or untempered: the targets served by the principal kernel.
    pub fn is_principal(&self) -> bool {
        match *self {
            Self::Tempered { theta, .. } => {
                theta <= PRINCIPAL_EPS || theta >= core::f64::consts::PI - PRINCIPAL_EPS
            }
            _ => true,
        }
    }

    /// Sits on the closed endpoint `t = log √p`.
    pub fn at_trivial_endpoint(&self) -> bool {
        match *self {
            Self::Tempered { .. } => false,
            Self::UntemperedPos { p, t } | Self::UntemperedNeg { p, t } => {
                abs(t - ln(sqrt(p as f64))) <= SPECTRAL_SLACK
            }
        }
    }
}

const PRINCIPAL_EPS: f64 = 1e-12;

fn check_p(p: u64) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("p = {p}; need p >= 2")));
    }
    Ok(())
}

fn check_t(p: u64, t: f64) -> Result<f64> {
    check_p(p)?;
    let t_max = ln(sqrt(p as f64));
    if !(t > 0.0 && t <= t_max * (1.0 + SPECTRAL_SLACK)) {
        return Err(Error::InvalidArgument(format!(
            "untempered t = {t} outside (0, log √p = {t_max}]"
        )));
    }
    Ok(t.min(t_max))
}

/// A kernel given by its value `k_j` on each sphere `S_j`, `j = 0..=depth`.
/// As an operator, `(K f)(x) = Σ_j k_j Σ_{y ∈ S_j(x)} f(y)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RadialKernel {
    p: u64,
    coeffs: Vec<f64>,
}

impl RadialKernel {
    pub fn new(p: u64, coeffs: Vec<f64>) -> Result<Self> {
        check_p(p)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "radial kernel needs depth >= 0".into(),
            ));
        }
        Ok(Self { p, coeffs })
    }

    /// The identity kernel `δ`.
    pub fn delta(p: u64) -> Result<Self> {
        Self::new(p, vec![1.0])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Largest `j` with `k_j ≠ 0` (0 for the zero kernel).
    pub fn support_radius(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// `Σ_j k_j·|S_j|`, the value of the spherical transform at `θ = 0`.
    pub fn mass(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, k)| k * sphere_size(self.p, j) as f64)
            .sum()
    }
}

/// A kernel `Σ_n a_n P_n[½T_p]`, stored densely by degree.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ChebyKernel {
    p: u64,
    coeffs: Vec<f64>,
}

impl ChebyKernel {
    pub fn new(p: u64, mut coeffs: Vec<f64>) -> Result<Self> {
        check_p(p)?;
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Ok(Self { p, coeffs })
    }

    /// Builds a kernel from `(degree, coefficient)` terms; repeated degrees add.
    pub fn from_terms(p: u64, terms: &[(usize, f64)]) -> Result<Self> {
        let len = terms.iter().map(|&(n, _)| n + 1).max().unwrap_or(0);
        let mut coeffs = vec![0.0; len];
        for &(n, a) in terms {
            coeffs[n] += a;
        }
        Self::new(p, coeffs)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `a_n` for `n = 0..=degree`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    /// Highest degree with a nonzero coefficient; `None` for the zero kernel.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, a)| a != 0.0)
    }
}

/// Radial values of `P_n[½T_p]δ₀` for even `n`:
/// zero on odd spheres and beyond `n`, `(1−p)/(2p^{n/2})` on even spheres
/// below `n`, and `1/(2p^{n/2})` on sphere `n`.
pub fn propagation_radial(p: u64, n: usize) -> Result<RadialKernel> {
    check_p(p)?;
    if n % 2 == 1 {
        return Err(Error::OddDegree(n));
    }
    if n == 0 {
        return RadialKernel::delta(p);
    }
    let denom = 2.0 * int_pow(p, (n / 2) as u32);
    let inner = (1.0 - p as f64) / denom;
    let mut coeffs = vec![0.0; n + 1];
    for j in (0..n).step_by(2) {
        coeffs[j] = inner;
    }
    coeffs[n] = 1.0 / denom;
    RadialKernel::new(p, coeffs)
}

/// The radial form of a Chebyshev kernel, padded to `depth`.
pub fn cheby_to_radial(k: &ChebyKernel, depth: usize) -> Result<RadialKernel> {
    let mut coeffs = vec![0.0; depth + 1];
    for (n, a) in k.terms() {
        if n > depth {
            return Err(Error::DegreeExceedsDepth { degree: n, depth });
        }
        let term = propagation_radial(k.p, n)?;
        for (c, t) in coeffs.iter_mut().zip(term.coeffs()) {
            *c += a * t;
        }
    }
    RadialKernel::new(k.p, coeffs)
}

/// The eigenvalue of the kernel on a `T_p`-eigenfunction with parameter `s`.
pub fn spherical_transform(k: &ChebyKernel, s: &SpectralPoint) -> f64 {
    match *s {
        SpectralPoint::Tempered { theta, .. } => {
            k.terms().map(|(n, a)| a * cos(n as f64 * theta)).sum()
        }
        SpectralPoint::UntemperedPos { t, .. } => {
            k.terms().map(|(n, a)| a * cosh(n as f64 * t)).sum()
        }
        SpectralPoint::UntemperedNeg { t, .. } => k
            .terms()
            .map(|(n, a)| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * a * cosh(n as f64 * t)
            })
            .sum(),
    }
}

/// `max_j |k_j|`, the exact L¹ → L^∞ norm of a radial kernel.
pub fn l1linf_bound(k: &RadialKernel) -> f64 {
    k.coeffs.iter().fold(0.0, |m, c| m.max(abs(*c)))
}
