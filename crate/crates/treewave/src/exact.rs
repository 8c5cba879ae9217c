//! Exact rational values of `P_n[T/2]δ_0` on the (p+1)-regular tree.
//!
//! `P_n` is the degree-`n` Chebyshev polynomial with `P_n(cos θ) = cos nθ`.
//! For even `n` only even powers of `T = A/√p` occur, so
//! `P_n[T/2] = Σ_k c_k A^k / (4p)^{k/2}` has rational coefficients and the
//! values reduce to integer walk counts.

use num_rational::Ratio;
use treewave_core::TreeBall;

pub type Rational = Ratio<i128>;

/// Largest explicit ball used by [`propagation_oracle`].
pub const BALL_LIMIT: usize = 2_000_000;
pub const MAX_DEGREE: usize = 16;
/// Keeps every intermediate inside `i128` at degree [`MAX_DEGREE`].
pub const MAX_P: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("degree {0} is odd")]
    Odd(usize),
    #[error("degree {0} exceeds {MAX_DEGREE}")]
    TooLarge(usize),
    #[error("p = {0} outside 2..={MAX_P}")]
    BadP(u64),
}

fn check(p: u64, n: usize) -> Result<(), ExactError> {
    if !(2..=MAX_P).contains(&p) {
        return Err(ExactError::BadP(p));
    }
    if n % 2 == 1 {
        return Err(ExactError::Odd(n));
    }
    if n > MAX_DEGREE {
        return Err(ExactError::TooLarge(n));
    }
    Ok(())
}

/// Integer monomial coefficients of `P_n`, lowest degree first.
pub fn chebyshev_coefficients(n: usize) -> Vec<i128> {
    let mut prev = vec![1i128];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0i128, 1];
    for _ in 1..n {
        let mut next = vec![0i128; cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += 2 * c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

// Σ_k c_k w_k / (4p)^{k/2} for walk counts w_k at one vertex.
fn combine(p: u64, coeffs: &[i128], walks: &[i128]) -> Rational {
    let four_p = 4 * p as i128;
    coeffs
        .iter()
        .zip(walks)
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(k, (c, w))| Rational::new(c * w, four_p.pow(k as u32 / 2)))
        .sum()
}

/// Values on spheres `0..=n`, counting walks in the radial quotient of the
/// tree: `(Af)(0) = (p+1)f(1)`, `(Af)(j) = f(j−1) + p·f(j+1)`.
pub fn propagation_radial_chain(p: u64, n: usize) -> Result<Vec<Rational>, ExactError> {
    check(p, n)?;
    let coeffs = chebyshev_coefficients(n);
    let p_i = p as i128;
    // walks[k][j]: number of length-k walks from the root to a fixed vertex on sphere j.
    let mut walks = vec![vec![0i128; n + 2]; n + 1];
    walks[0][0] = 1;
    for k in 1..=n {
        for j in 0..=n {
            let prev = &walks[k - 1];
            walks[k][j] = if j == 0 {
                (p_i + 1) * prev[1]
            } else {
                prev[j - 1] + p_i * prev[j + 1]
            };
        }
    }
    Ok((0..=n)
        .map(|j| combine(p, &coeffs, &walks.iter().map(|w| w[j]).collect::<Vec<_>>()))
        .collect())
}

/// Values on spheres `0..=n` from walk counts on the explicit ball of
/// radius `n`. Panics if the result is not radial.
pub fn propagation_on_ball(p: u64, n: usize) -> Result<Vec<Rational>, ExactError> {
    check(p, n)?;
    let ball = TreeBall::new(p, n);
    let adj = ball.adjacency();
    let coeffs = chebyshev_coefficients(n);
    let mut walk = vec![0i128; ball.n_vertices()];
    walk[0] = 1;
    let mut counts = vec![walk.clone()];
    for _ in 0..n {
        walk = (0..ball.n_vertices())
            .map(|v| adj.neighbors(v).iter().map(|&w| walk[w]).sum())
            .collect();
        counts.push(walk.clone());
    }
    let value_at = |v: usize| combine(p, &coeffs, &counts.iter().map(|c| c[v]).collect::<Vec<_>>());
    Ok((0..=n)
        .map(|j| {
            let sphere = ball.sphere(j);
            let first = value_at(sphere.start);
            assert!(
                sphere.clone().all(|v| value_at(v) == first),
                "not radial on sphere {j}"
            );
            first
        })
        .collect())
}

/// Explicit ball when it has at most [`BALL_LIMIT`] vertices, otherwise the
/// radial quotient.
pub fn propagation_oracle(p: u64, n: usize) -> Result<Vec<Rational>, ExactError> {
    check(p, n)?;
    let size = 1
        + (1..=n)
            .map(|j| treewave_core::treekernel::sphere_size(p, j) as usize)
            .sum::<usize>();
    if size <= BALL_LIMIT {
        propagation_on_ball(p, n)
    } else {
        propagation_radial_chain(p, n)
    }
}

/// `0` on odd spheres and beyond `n`, `(1−p)/(2p^{n/2})` on even spheres
/// below `n`, `1/(2p^{n/2})` on sphere `n`; `δ_0` when `n = 0`.
pub fn propagation_formula(p: u64, n: usize) -> Result<Vec<Rational>, ExactError> {
    check(p, n)?;
    if n == 0 {
        return Ok(vec![Rational::from_integer(1)]);
    }
    let denom = 2 * (p as i128).pow(n as u32 / 2);
    Ok((0..=n)
        .map(|j| match j {
            _ if j == n => Rational::new(1, denom),
            _ if j % 2 == 0 => Rational::new(1 - p as i128, denom),
            _ => Rational::from_integer(0),
        })
        .collect())
}

/// The `f64` nearest to `r`, when numerator and denominator are exact in `f64`.
pub fn nearest_f64(r: &Rational) -> Option<f64> {
    const EXACT: i128 = 1 << 53;
    (r.numer().abs() <= EXACT && *r.denom() <= EXACT).then(|| *r.numer() as f64 / *r.denom() as f64)
}
