//! Planar engagement kinematics against a stationary target at the origin,
//! with an optional first-order autopilot lag.

use crate::error::{Error, Result};
use crate::math::{cos, sin, wrap_angle};

/// How the commanded lateral acceleration turns into achieved acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Autopilot {
    /// Achieved acceleration equals the command instantly.
    Ideal,
    /// `da/dt = (a_c - a) / tau`.
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Role {
    Leader,
    Follower,
}

/// Polar state of one interceptor. Angles are never wrapped while
/// integrating.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EngagementState {
    /// Range to target, m.
    pub r: f64,
    /// Line-of-sight angle, rad.
    pub theta: f64,
    /// Flight-path angle, rad.
    pub gamma: f64,
    /// Achieved lateral acceleration, m/s^2.
    pub a_m: f64,
}

impl EngagementState {
    pub fn new(r: f64, theta: f64, gamma: f64) -> Self {
        EngagementState {
            r,
            theta,
            gamma,
            a_m: 0.0,
        }
    }

    /// Heading error `gamma - theta`, wrapped to (-pi, pi].
    pub fn heading_error(&self) -> f64 {
        wrap_angle(self.gamma - self.theta)
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.theta.is_finite() && self.gamma.is_finite() && self.a_m.is_finite()
    }

    /// `self + h * d`.
    pub fn axpy(&self, h: f64, d: &StateRate) -> EngagementState {
        EngagementState {
            r: self.r + h * d.r_dot,
            theta: self.theta + h * d.theta_dot,
            gamma: self.gamma + h * d.gamma_dot,
            a_m: self.a_m + h * d.a_m_dot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterceptorParams {
    /// Constant speed, m/s.
    pub speed: f64,
    /// Autopilot time constant, s. Only read by the first-order model.
    pub tau: f64,
    /// Lateral acceleration bound, m/s^2.
    pub a_max: f64,
    pub role: Role,
    pub autopilot: Autopilot,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateRate {
    pub r_dot: f64,
    pub theta_dot: f64,
    pub gamma_dot: f64,
    pub a_m_dot: f64,
}

/// Time derivatives of the engagement state under `commanded_accel`.
///
/// With the ideal autopilot the heading turns at `commanded / V` and the
/// stored `a_m` is left alone (the simulator overwrites it with the
/// command). With the first-order model the heading turns at `a_m / V`.
pub fn kinematics_rhs(state: &EngagementState, params: &InterceptorParams, commanded_accel: f64) -> Result<StateRate> {
    if state.r.is_nan() || state.r <= 0.0 {
        return Err(Error::AtTarget { r: state.r });
    }
    let (v_r, v_theta) = relative_velocities(state, params);
    let (gamma_dot, a_m_dot) = match params.autopilot {
        Autopilot::Ideal => (commanded_accel / params.speed, 0.0),
        Autopilot::FirstOrder => (state.a_m / params.speed, (commanded_accel - state.a_m) / params.tau),
    };
    Ok(StateRate {
        r_dot: v_r,
        theta_dot: v_theta / state.r,
        gamma_dot,
        a_m_dot,
    })
}

/// Components of the relative velocity along and across the line of sight.
pub fn relative_velocities(state: &EngagementState, params: &InterceptorParams) -> (f64, f64) {
    let theta_m = state.gamma - state.theta;
    (-params.speed * cos(theta_m), -params.speed * sin(theta_m))
}

/// Position in the target-centred frame, m.
pub fn cartesian_position(state: &EngagementState) -> (f64, f64) {
    (state.r * cos(state.theta), state.r * sin(state.theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn params(autopilot: Autopilot) -> InterceptorParams {
        InterceptorParams {
            speed: 200.0,
            tau: 0.5,
            a_max: 300.0,
            role: Role::Leader,
            autopilot,
        }
    }

    #[test]
    fn collision_course_closes_straight_in() {
        let s = EngagementState::new(5000.0, 0.3, 0.3);
        let d = kinematics_rhs(&s, &params(Autopilot::Ideal), 0.0).unwrap();
        assert_eq!(d.r_dot, -200.0);
        assert_eq!(d.theta_dot, 0.0);
    }

    #[test]
    fn perpendicular_heading_orbits() {
        let s = EngagementState::new(5000.0, 0.0, FRAC_PI_2);
        let d = kinematics_rhs(&s, &params(Autopilot::Ideal), 0.0).unwrap();
        assert_abs_diff_eq!(d.r_dot, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.theta_dot, -200.0 / 5000.0, epsilon = 1e-15);
    }

    #[test]
    fn first_order_lag_rate() {
        let s = EngagementState::new(5000.0, 0.0, 0.0);
        let d = kinematics_rhs(&s, &params(Autopilot::FirstOrder), 300.0).unwrap();
        assert_eq!(d.a_m_dot, 600.0);
        assert_eq!(d.gamma_dot, 0.0);
    }

    #[test]
    fn ideal_turn_rate_follows_command() {
        let s = EngagementState::new(5000.0, 0.0, 0.0);
        let d = kinematics_rhs(&s, &params(Autopilot::Ideal), 100.0).unwrap();
        assert_eq!(d.gamma_dot, 0.5);
        assert_eq!(d.a_m_dot, 0.0);
    }

    #[test]
    fn rejects_state_at_target() {
        let s = EngagementState::new(0.0, 0.0, 0.0);
        assert_eq!(
            kinematics_rhs(&s, &params(Autopilot::Ideal), 0.0),
            Err(Error::AtTarget { r: 0.0 })
        );
    }

    #[test]
    fn relative_velocity_components() {
        let p = params(Autopilot::Ideal);
        let (vr, vt) = relative_velocities(&EngagementState::new(1.0, 0.0, FRAC_PI_4), &p);
        assert_abs_diff_eq!(vr, -141.42, epsilon = 5e-3);
        assert_abs_diff_eq!(vt, -141.42, epsilon = 5e-3);
        assert_eq!(
            relative_velocities(&EngagementState::new(1.0, 0.0, 0.0), &p),
            (-200.0, 0.0)
        );
        let (vr, vt) = relative_velocities(&EngagementState::new(1.0, 0.0, PI), &p);
        assert_eq!(vr, 200.0);
        assert_abs_diff_eq!(vt, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cartesian_positions() {
        assert_eq!(
            cartesian_position(&EngagementState::new(5000.0, 0.0, 0.0)),
            (5000.0, 0.0)
        );
        let (x, y) = cartesian_position(&EngagementState::new(5000.0, FRAC_PI_2, 0.0));
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-9);
        assert_eq!(y, 5000.0);
        assert_eq!(cartesian_position(&EngagementState::new(0.0, 1.0, 0.0)), (0.0, 0.0));
    }
}
