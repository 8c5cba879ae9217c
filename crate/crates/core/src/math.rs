// Thin wrappers so call sites read like std float methods.

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}

#[inline]
pub(crate) fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub(crate) fn acosh(x: f64) -> f64 {
    libm::acosh(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Reduces `x` into `(-π, π]`.
pub(crate) fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let r = x - two_pi * floor(x / two_pi + 0.5);
    if r <= -core::f64::consts::PI {
        r + two_pi
    } else {
        r
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Exact integer power for small bases, as `f64`.
pub(crate) fn int_pow(base: u64, exp: u32) -> f64 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base as u128) {
            Some(v) => v,
            None => return pow(base as f64, exp as f64),
        };
    }
    acc as f64
}

#[cfg(test)]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[cfg(test)]
pub(crate) fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(abs(*x)))
}
