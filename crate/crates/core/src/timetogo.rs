//! Small-heading-error time-to-go estimate and its first and second
//! derivatives along the engagement.
//!
//! ```text
//! t_go = (r / V) (1 + theta_M^2 / 2K),  K = 2N - 1
//! dt_go/dt = F + B a_M
//! ```
//!
//! `F` and `B` are smooth in the state, so the second derivative of `t_go`
//! is `F' + B' a_M + B a_M'`, which is what the lagged-autopilot laws
//! feedback-linearize.

use crate::engagement::{relative_velocities, EngagementState, InterceptorParams};
use crate::error::{Error, Result};

/// Guidance constant `K = 2N - 1`.
#[inline]
pub fn guidance_constant(nav_n: f64) -> f64 {
    2.0 * nav_n - 1.0
}

pub fn tgo_estimate(r: f64, speed: f64, theta_m: f64, nav_n: f64) -> Result<f64> {
    if speed.is_nan() || speed <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "speed",
            value: speed,
        });
    }
    let k = guidance_constant(nav_n);
    Ok(r / speed * (1.0 + theta_m * theta_m / (2.0 * k)))
}

/// Everything the guidance laws need about one interceptor's time-to-go.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TgoTerms {
    pub tgo: f64,
    pub f: f64,
    pub b: f64,
    /// `F + B a_M` evaluated with the achieved acceleration.
    pub tgo_dot: f64,
    pub f_dot: f64,
    pub b_dot: f64,
    pub k: f64,
}

impl TgoTerms {
    /// Evaluates `t_go`, `F`, `B` and their rates at the current achieved
    /// acceleration `state.a_m`.
    pub fn evaluate(state: &EngagementState, params: &InterceptorParams, nav_n: f64) -> Result<Self> {
        Self::evaluate_with_accel(state, params, state.a_m, nav_n)
    }

    /// Same as [`TgoTerms::evaluate`] but with an explicit achieved
    /// acceleration (the ideal autopilot has no lag state).
    pub fn evaluate_with_accel(
        state: &EngagementState,
        params: &InterceptorParams,
        a_m: f64,
        nav_n: f64,
    ) -> Result<Self> {
        let theta_m = state.heading_error();
        let tgo = tgo_estimate(state.r, params.speed, theta_m, nav_n)?;
        let (f, b) = fb_terms(state, params, tgo, nav_n);
        let tgo_dot = f + b * a_m;
        let (f_dot, b_dot) = fb_dot_terms(state, params, tgo, tgo_dot, a_m, nav_n);
        Ok(TgoTerms {
            tgo,
            f,
            b,
            tgo_dot,
            f_dot,
            b_dot,
            k: guidance_constant(nav_n),
        })
    }
}

/// `F` and `B` of `dt_go/dt = F + B a_M`.
pub fn fb_terms(state: &EngagementState, params: &InterceptorParams, tgo: f64, nav_n: f64) -> (f64, f64) {
    let k = guidance_constant(nav_n);
    let v = params.speed;
    let theta_m = state.heading_error();
    let (v_r, v_theta) = relative_velocities(state, params);
    let f = v_r * tgo / state.r - v_theta * theta_m / (v * k);
    let b = state.r * theta_m / (v * v * k);
    (f, b)
}

/// Time derivatives of `F` and `B` given the current `dt_go/dt` and
/// achieved acceleration.
pub fn fb_dot_terms(
    state: &EngagementState,
    params: &InterceptorParams,
    tgo: f64,
    tgo_dot: f64,
    a_m: f64,
    nav_n: f64,
) -> (f64, f64) {
    let k = guidance_constant(nav_n);
    let v = params.speed;
    let r = state.r;
    let theta_m = state.heading_error();
    let (v_r, v_theta) = relative_velocities(state, params);

    let f_dot = (-a_m * v_theta / (v * r) + (v_theta * v_theta - v_r * v_r) / (r * r)) * tgo + (v_r / r) * tgo_dot
        - ((v_r * theta_m + v_theta) / (v * v * k)) * a_m
        + (v_r * v_theta * theta_m + v_theta * v_theta) / (r * v * k);
    let b_dot = (theta_m * v_r * v + r * a_m - v * v_theta) / (v * v * v * k);
    (f_dot, b_dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engagement::{Autopilot, Role};
    use approx::assert_abs_diff_eq;

    fn params(speed: f64) -> InterceptorParams {
        InterceptorParams {
            speed,
            tau: 0.5,
            a_max: 300.0,
            role: Role::Leader,
            autopilot: Autopilot::FirstOrder,
        }
    }

    #[test]
    fn tgo_matches_reference_values() {
        let t = tgo_estimate(5000.0, 200.0, 60f64.to_radians(), 3.0).unwrap();
        assert!((t - 27.74).abs() < 0.01, "{t}");
        let t = tgo_estimate(10000.0, 400.0, (-30f64).to_radians(), 3.0).unwrap();
        assert!((t - 25.68).abs() < 0.01, "{t}");
    }

    #[test]
    fn tgo_on_collision_course_is_range_over_speed() {
        assert_eq!(tgo_estimate(1234.5, 250.0, 0.0, 3.0).unwrap(), 1234.5 / 250.0);
    }

    #[test]
    fn tgo_rejects_nonpositive_speed() {
        assert!(tgo_estimate(1.0, 0.0, 0.0, 3.0).is_err());
        assert!(tgo_estimate(1.0, -5.0, 0.0, 3.0).is_err());
    }

    #[test]
    fn set1_leader_initial_terms() {
        let s = EngagementState::new(5000.0, 45f64.to_radians(), 90f64.to_radians());
        let terms = TgoTerms::evaluate(&s, &params(200.0), 3.0).unwrap();
        assert_abs_diff_eq!(terms.tgo, 26.542, epsilon = 5e-4);
        assert_abs_diff_eq!(terms.f, -0.6397, epsilon = 5e-5);
        assert_abs_diff_eq!(terms.b, 0.019635, epsilon = 5e-7);
        assert_eq!(terms.k, 5.0);
    }

    #[test]
    fn collision_course_is_an_equilibrium() {
        let s = EngagementState::new(3000.0, 0.7, 0.7);
        let p = params(200.0);
        let terms = TgoTerms::evaluate(&s, &p, 3.0).unwrap();
        assert_eq!(terms.f, -1.0);
        assert_eq!(terms.b, 0.0);
        assert_eq!(terms.tgo_dot, -1.0);
        assert_abs_diff_eq!(terms.f_dot, 0.0, epsilon = 1e-15);
        assert_eq!(terms.b_dot, 0.0);
    }

    #[test]
    fn heading_error_parity() {
        let p = params(200.0);
        let plus = EngagementState::new(4000.0, 0.0, 0.4);
        let minus = EngagementState::new(4000.0, 0.0, -0.4);
        let tp = TgoTerms::evaluate(&plus, &p, 3.0).unwrap();
        let tm = TgoTerms::evaluate(&minus, &p, 3.0).unwrap();
        assert_eq!(tp.tgo, tm.tgo);
        assert_eq!(tp.b, -tm.b);
        assert_abs_diff_eq!(tp.f, tm.f, epsilon = 1e-15);
        let (_, vt_p) = relative_velocities(&plus, &p);
        let (_, vt_m) = relative_velocities(&minus, &p);
        assert_eq!(vt_p, -vt_m);
    }

    #[test]
    fn b_dot_is_linear_in_accel() {
        let p = params(200.0);
        let s = EngagementState::new(4000.0, 0.2, 1.0);
        let (_, b0) = fb_dot_terms(&s, &p, 22.0, -0.7, 0.0, 3.0);
        let (_, b1) = fb_dot_terms(&s, &p, 22.0, -0.7, 1.0, 3.0);
        assert_abs_diff_eq!(b1 - b0, 4000.0 / (200f64.powi(3) * 5.0), epsilon = 1e-15);
    }
}
