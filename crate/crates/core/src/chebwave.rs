//! Chebyshev polynomials and the discrete wave propagator.
//!
//! With `P_n(cos θ) = cos nθ` and `Q_{n−1}(cos θ) = sin nθ / sin θ`, the
//! recursion
//!
//! ```text
//! Φ_{n+1} = ½TΦ_n − (1 − T²/4)Ψ_n
//! Ψ_{n+1} = ½TΨ_n + Φ_n
//! ```
//!
//! is solved by `Φ_n = P_n[½T]Φ₀ − (1 − T²/4)Q_{n−1}[½T]Ψ₀` and
//! `Ψ_n = P_n[½T]Ψ₀ + Q_{n−1}[½T]Φ₀`.

use alloc::vec;
use alloc::vec::Vec;

use crate::operator::Operator;
use crate::{Error, Result};

/// `P_n(x)` by the forward three-term recurrence. Valid for every real `x`;
/// for `|x| > 1` this is `cosh(n·acosh|x|)` up to sign.
pub fn cheb_eval_first(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `Q_{nm1}(x)`, the second-kind polynomial with `Q_{n−1}(cos θ) = sin nθ / sin θ`.
/// At `x = ±1` the recurrence returns the limit `(±1)^{n−1}·n` exactly.
pub fn cheb_eval_second(nm1: usize, x: f64) -> f64 {
    match nm1 {
        0 => 1.0,
        _ => {
            let (mut prev, mut cur) = (1.0, 2.0 * x);
            for _ in 1..nm1 {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `Σ_n coeffs[n]·P_n[½T] f` by Clenshaw's recurrence on vectors.
pub fn apply_first_kind<O: Operator>(op: &O, coeffs: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    op.check_dim(f.len())?;
    let n = f.len();
    if coeffs.is_empty() {
        return Ok(vec![0.0; n]);
    }
    let (b1, b2) = clenshaw_tail(op, coeffs, f);
    // a_0 f + ½T b_1 − b_2
    let tb1 = op.apply(&b1);
    Ok((0..n)
        .map(|i| coeffs[0] * f[i] + 0.5 * tb1[i] - b2[i])
        .collect())
}

/// `Σ_m coeffs[m]·Q_m[½T] f` by Clenshaw's recurrence on vectors.
pub fn apply_second_kind<O: Operator>(op: &O, coeffs: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    op.check_dim(f.len())?;
    let n = f.len();
    if coeffs.is_empty() {
        return Ok(vec![0.0; n]);
    }
    let (b1, b2) = clenshaw_tail(op, coeffs, f);
    let tb1 = op.apply(&b1);
    Ok((0..n).map(|i| coeffs[0] * f[i] + tb1[i] - b2[i]).collect())
}

// Runs b_k = a_k f + T b_{k+1} − b_{k+2} down to k = 1 and returns (b_1, b_2).
fn clenshaw_tail<O: Operator>(op: &O, coeffs: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let mut b1 = vec![0.0; n];
    let mut b2 = vec![0.0; n];
    let mut tb = vec![0.0; n];
    for &a in coeffs[1..].iter().rev() {
        op.apply_into(&b1, &mut tb);
        for i in 0..n {
            let next = a * f[i] + tb[i] - b2[i];
            b2[i] = b1[i];
            b1[i] = next;
        }
    }
    (b1, b2)
}

fn one_minus_quarter_t_squared<O: Operator>(op: &O, g: &[f64]) -> Vec<f64> {
    let tg = op.apply(g);
    let ttg = op.apply(&tg);
    g.iter().zip(&ttg).map(|(a, b)| a - 0.25 * b).collect()
}

/// State `(Φ_n, Ψ_n)` of the wave recursion after `step` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub step: usize,
}

impl WaveState {
    pub fn new(phi: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        if phi.len() != psi.len() {
            return Err(Error::DimensionMismatch {
                expected: phi.len(),
                found: psi.len(),
            });
        }
        Ok(Self { phi, psi, step: 0 })
    }

    /// `(δ_v, 0)` on an index set of size `n`.
    pub fn delta(n: usize, v: usize) -> Self {
        let mut phi = vec![0.0; n];
        phi[v] = 1.0;
        Self {
            phi,
            psi: vec![0.0; n],
            step: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }
}

/// One step of the wave recursion.
pub fn wave_step<O: Operator>(state: &WaveState, op: &O) -> Result<WaveState> {
    op.check_dim(state.phi.len())?;
    op.check_dim(state.psi.len())?;
    let t_phi = op.apply(&state.phi);
    let t_psi = op.apply(&state.psi);
    let damped = one_minus_quarter_t_squared(op, &state.psi);
    let phi = t_phi
        .iter()
        .zip(&damped)
        .map(|(a, b)| 0.5 * a - b)
        .collect();
    let psi = t_psi
        .iter()
        .zip(&state.phi)
        .map(|(a, b)| 0.5 * a + b)
        .collect();
    Ok(WaveState {
        phi,
        psi,
        step: state.step + 1,
    })
}

/// The state after `n ≥ 1` steps, from the Chebyshev closed form.
pub fn wave_closed_form<O: Operator>(initial: &WaveState, n: usize, op: &O) -> Result<WaveState> {
    if n == 0 {
        return Err(Error::InvalidArgument("closed form needs n >= 1".into()));
    }
    op.check_dim(initial.phi.len())?;
    op.check_dim(initial.psi.len())?;
    let mut p_n = vec![0.0; n + 1];
    p_n[n] = 1.0;
    let mut q_nm1 = vec![0.0; n];
    q_nm1[n - 1] = 1.0;

    let p_phi = apply_first_kind(op, &p_n, &initial.phi)?;
    let p_psi = apply_first_kind(op, &p_n, &initial.psi)?;
    let q_phi = apply_second_kind(op, &q_nm1, &initial.phi)?;
    let q_psi = apply_second_kind(op, &q_nm1, &initial.psi)?;
    let damped = one_minus_quarter_t_squared(op, &q_psi);

    let phi = p_phi.iter().zip(&damped).map(|(a, b)| a - b).collect();
    let psi = p_psi.iter().zip(&q_phi).map(|(a, b)| a + b).collect();
    Ok(WaveState {
        phi,
        psi,
        step: initial.step + n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::max_abs;
    use crate::tree::TreeBall;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    // Integer coefficients of P_n, lowest degree first, expanded symbolically.
    fn expand_first(n: usize) -> Vec<i64> {
        let mut prev = vec![1i64];
        let mut cur = vec![0i64, 1];
        if n == 0 {
            return prev;
        }
        for _ in 1..n {
            let mut next = vec![0i64; cur.len() + 1];
            for (k, c) in cur.iter().enumerate() {
                next[k + 1] += 2 * c;
            }
            for (k, c) in prev.iter().enumerate() {
                next[k] -= c;
            }
            prev = cur;
            cur = next;
        }
        cur
    }

    fn horner(coeffs: &[i64], x: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }

    fn dense_t(ball: &TreeBall) -> DMatrix<f64> {
        let n = ball.n_vertices();
        let s = 1.0 / (ball.p() as f64).sqrt();
        let mut m = DMatrix::zeros(n, n);
        for (u, v) in ball.adjacency().edges() {
            m[(u, v)] = s;
            m[(v, u)] = s;
        }
        m
    }

    // Dense P_n(X) and Q_m(X) by the matrix recurrence.
    fn dense_first(x: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
        let id = DMatrix::identity(x.nrows(), x.ncols());
        if n == 0 {
            return id;
        }
        let (mut prev, mut cur) = (id, x.clone());
        for _ in 1..n {
            let next = x * &cur * 2.0 - &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    fn dense_second(x: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
        let id = DMatrix::identity(x.nrows(), x.ncols());
        if m == 0 {
            return id;
        }
        let (mut prev, mut cur) = (id, x * 2.0);
        for _ in 1..m {
            let next = x * &cur * 2.0 - &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    fn diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn first_kind_examples() {
        assert_eq!(cheb_eval_first(0, 0.3), 1.0);
        assert!((cheb_eval_first(2, 0.7f64.cos()) - 1.4f64.cos()).abs() < 1e-15);
        assert!((1.4f64.cos() - 0.169967).abs() < 1e-6);
        let expanded = expand_first(7);
        assert_eq!(expanded, vec![0, -7, 0, 56, 0, -112, 0, 64]);
        assert!((cheb_eval_first(7, 0.41) - horner(&expanded, 0.41)).abs() < 1e-12);
    }

    #[test]
    fn first_kind_untempered_is_cosh() {
        let t: f64 = 0.3;
        let x = t.cosh();
        for n in 0..20 {
            let expect = (n as f64 * t).cosh();
            assert!((cheb_eval_first(n, x) - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn second_kind_examples() {
        assert_eq!(cheb_eval_second(0, 0.9), 1.0);
        let v = cheb_eval_second(1, 0.5f64.cos());
        assert!((v - 1.0f64.sin() / 0.5f64.sin()).abs() < 1e-14);
        assert!((v - 1.755165).abs() < 1e-6);
        // sin 4θ / sin θ → 4 as θ → 0
        assert_eq!(cheb_eval_second(3, 1.0), 4.0);
        let th = 1e-6f64;
        assert!(((4.0 * th).sin() / th.sin() - 4.0).abs() < 1e-10);
        assert_eq!(cheb_eval_second(3, -1.0), -4.0);
        assert_eq!(cheb_eval_second(4, -1.0), 5.0);
    }

    #[test]
    fn first_kind_matches_cosine_on_grid() {
        for n in 0..=64 {
            for k in 0..100 {
                let th = PI * k as f64 / 99.0;
                let err = (cheb_eval_first(n, th.cos()) - (n as f64 * th).cos()).abs();
                assert!(err < 1e-10, "n={n} θ={th} err={err}");
            }
        }
    }

    #[test]
    fn one_step_from_delta() {
        let ball = TreeBall::new(2, 3);
        let t = ball.adjacency().normalized(2);
        let s0 = WaveState::delta(ball.n_vertices(), 0);
        let s1 = wave_step(&s0, &t).unwrap();
        let half_t: Vec<f64> = t.apply(&s0.phi).iter().map(|x| 0.5 * x).collect();
        assert_eq!(s1.phi, half_t);
        assert_eq!(s1.psi, s0.phi);
        assert_eq!(s1.step, 1);
    }

    #[test]
    fn iterated_steps_match_dense_polynomial() {
        let ball = TreeBall::new(3, 5);
        let t = ball.adjacency().normalized(3);
        let mut s = WaveState::delta(ball.n_vertices(), 0);
        for _ in 0..4 {
            s = wave_step(&s, &t).unwrap();
        }
        let x = dense_t(&ball) * 0.5;
        let p4 = dense_first(&x, 4);
        let expect: Vec<f64> = p4.column(0).iter().copied().collect();
        assert!(diff(&s.phi, &expect) < 1e-12);
    }

    #[test]
    fn eigenvector_scales_by_cosine() {
        // Radial eigenvector of a tree ball: an eigenvector of T on the ball.
        let ball = TreeBall::new(2, 6);
        let (lambda, v) = ball.eigenpairs().next().unwrap();
        let th = (lambda / 2.0).clamp(-1.0, 1.0).acos();
        let t = ball.adjacency().normalized(2);
        let mut s = WaveState::new(v.clone(), vec![0.0; v.len()]).unwrap();
        for n in 1..=15 {
            s = wave_step(&s, &t).unwrap();
            let expect: Vec<f64> = v.iter().map(|x| (n as f64 * th).cos() * x).collect();
            assert!(diff(&s.phi, &expect) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn closed_form_n1_is_one_step() {
        let ball = TreeBall::new(3, 3);
        let t = ball.adjacency().normalized(3);
        let n = ball.n_vertices();
        let phi: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64) - 5.0).collect();
        let psi: Vec<f64> = (0..n).map(|i| ((i * 3 % 5) as f64) * 0.5).collect();
        let s0 = WaveState::new(phi, psi).unwrap();
        let a = wave_step(&s0, &t).unwrap();
        let b = wave_closed_form(&s0, 1, &t).unwrap();
        assert!(diff(&a.phi, &b.phi) < 1e-14);
        assert!(diff(&a.psi, &b.psi) < 1e-14);
    }

    #[test]
    fn closed_form_matches_iteration_p5() {
        let ball = TreeBall::new(5, 8);
        let t = ball.adjacency().normalized(5);
        let s0 = WaveState::delta(ball.n_vertices(), 0);
        let mut it = s0.clone();
        for _ in 0..6 {
            it = wave_step(&it, &t).unwrap();
        }
        let cf = wave_closed_form(&s0, 6, &t).unwrap();
        assert!(diff(&it.phi, &cf.phi) < 1e-10);
        assert!(diff(&it.psi, &cf.psi) < 1e-10);
    }

    #[test]
    fn closed_form_from_psi_delta_matches_dense() {
        let ball = TreeBall::new(2, 5);
        let t = ball.adjacency().normalized(2);
        let n = ball.n_vertices();
        let mut psi = vec![0.0; n];
        psi[0] = 1.0;
        let s0 = WaveState::new(vec![0.0; n], psi).unwrap();
        let cf = wave_closed_form(&s0, 3, &t).unwrap();
        let tm = dense_t(&ball);
        let x = &tm * 0.5;
        let id = DMatrix::<f64>::identity(n, n);
        let m = -(id - &tm * &tm * 0.25) * dense_second(&x, 2);
        let expect: Vec<f64> = m.column(0).iter().copied().collect();
        assert!(diff(&cf.phi, &expect) < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ball = TreeBall::new(2, 2);
        let t = ball.adjacency().normalized(2);
        let s = WaveState::delta(3, 0);
        assert!(matches!(
            wave_step(&s, &t),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(WaveState::new(vec![0.0; 2], vec![0.0; 3]).is_err());
        assert!(wave_closed_form(&WaveState::delta(ball.n_vertices(), 0), 0, &t).is_err());
    }

    #[test]
    fn scalar_energy_is_conserved() {
        for &th in &[0.3f64, 1.1, 2.5, 3.0] {
            let (c, s2) = (th.cos(), th.sin().powi(2));
            let (mut phi, mut psi) = (0.7f64, -0.4f64);
            let e0 = phi * phi + s2 * psi * psi;
            for _ in 0..200 {
                let next = (c * phi - s2 * psi, c * psi + phi);
                phi = next.0;
                psi = next.1;
                assert!((phi * phi + s2 * psi * psi - e0).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn iteration_equals_closed_form(
            p in prop::sample::select(vec![2u64, 3, 5]),
            radius in 1usize..=6,
            steps in 1usize..=12,
            seed in 0u64..1000,
        ) {
            let ball = TreeBall::new(p, radius);
            let t = ball.adjacency().normalized(p);
            let n = ball.n_vertices();
            let gen = |i: usize, k: u64| (((i as u64 * 2654435761 + seed * 97 + k) % 1000) as f64) / 500.0 - 1.0;
            let s0 = WaveState::new((0..n).map(|i| gen(i, 1)).collect(), (0..n).map(|i| gen(i, 7)).collect()).unwrap();
            let mut it = s0.clone();
            for _ in 0..steps {
                it = wave_step(&it, &t).unwrap();
            }
            let cf = wave_closed_form(&s0, steps, &t).unwrap();
            let scale = max_abs(&it.phi).max(max_abs(&it.psi)).max(1.0);
            prop_assert!(diff(&it.phi, &cf.phi) / scale < 1e-9);
            prop_assert!(diff(&it.psi, &cf.psi) / scale < 1e-9);
        }
    }
}
