//! Scalar helpers that work without `std`.

use core::f64::consts::PI;

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Wraps an angle to the principal interval (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = libm::remainder(a, 2.0 * PI);
    // remainder() lands in [-pi, pi]; move the lower endpoint up.
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// `exp(-x)` with `x` clamped to `[-clip, clip]`.
#[inline]
pub fn exp_neg_clipped(x: f64, clip: f64) -> f64 {
    exp(-x.clamp(-clip, clip))
}
