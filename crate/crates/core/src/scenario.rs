//! Experiment description and its validation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::engagement::{Autopilot, EngagementState, InterceptorParams, Role};
use crate::error::{Error, Result};
use crate::guidance::GuidanceConfig;
use crate::math::abs;
use crate::network::{build_interaction_matrix, InteractionMatrix, NetworkTopology};

/// Initial conditions of one interceptor. Angles are kept in degrees, the
/// unit scenario files use; [`InterceptorSpec::initial_state`] converts.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterceptorSpec {
    pub name: String,
    pub role: Role,
    pub r0: f64,
    pub theta0_deg: f64,
    pub gamma0_deg: f64,
    pub speed: f64,
    pub tau: Option<f64>,
    pub a_max: f64,
}

impl InterceptorSpec {
    pub fn initial_state(&self) -> EngagementState {
        EngagementState::new(self.r0, self.theta0_deg.to_radians(), self.gamma0_deg.to_radians())
    }

    pub fn params(&self, autopilot: Autopilot) -> InterceptorParams {
        InterceptorParams {
            speed: self.speed,
            tau: self.tau.unwrap_or(0.0),
            a_max: self.a_max,
            role: self.role,
            autopilot,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimSettings {
    /// Fixed RK4 step, s.
    pub dt: f64,
    /// Range at which an interceptor counts as having hit, m.
    pub hit_radius: f64,
    /// Hard stop, s.
    pub t_max: f64,
    /// Keep every n-th step in the log.
    pub log_every: usize,
}

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_HIT_RADIUS: f64 = 1.0;
pub const DEFAULT_LOG_EVERY: usize = 10;

impl SimSettings {
    /// Defaults with `t_max = 2 T_d`.
    pub fn for_impact_time(t_d: f64) -> Self {
        SimSettings {
            dt: DEFAULT_DT,
            hit_radius: DEFAULT_HIT_RADIUS,
            t_max: 2.0 * t_d,
            log_every: DEFAULT_LOG_EVERY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub autopilot: Autopilot,
    /// Exactly one leader; followers are numbered in list order.
    pub interceptors: Vec<InterceptorSpec>,
    pub topology: NetworkTopology,
    pub guidance: GuidanceConfig,
    pub sim: SimSettings,
}

/// One named pass/fail check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub lambda_min: Option<f64>,
    /// `eps_t` as raised for the configured step, s.
    pub time_floor: Option<f64>,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            let msg: Vec<&str> = self.failures().map(|c| c.detail.as_str()).collect();
            Err(Error::Validation(msg.join("; ")))
        }
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }
}

fn on_grid(t: f64, dt: f64) -> bool {
    let k = t / dt;
    abs(k - libm::round(k)) < 1e-6
}

impl Scenario {
    pub fn leader(&self) -> Option<&InterceptorSpec> {
        self.interceptors.iter().find(|i| i.role == Role::Leader)
    }

    pub fn followers(&self) -> impl Iterator<Item = &InterceptorSpec> {
        self.interceptors.iter().filter(|i| i.role == Role::Follower)
    }

    /// Leader first, then followers in list order.
    pub fn ordered(&self) -> Vec<&InterceptorSpec> {
        self.leader().into_iter().chain(self.followers()).collect()
    }

    pub fn interaction_matrix(&self) -> Result<InteractionMatrix> {
        build_interaction_matrix(&self.topology)
    }

    /// Runs every ordering, gain and parameter check, collecting all
    /// outcomes rather than stopping at the first failure.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport {
            lambda_min: None,
            time_floor: None,
            checks: Vec::new(),
        };
        let g = &self.guidance;
        let first_order = self.autopilot == Autopilot::FirstOrder;

        let leaders = self.interceptors.iter().filter(|i| i.role == Role::Leader).count();
        let followers = self.followers().count();
        rep.push(
            "roles",
            leaders == 1 && followers >= 1,
            format!("{leaders} leader(s) and {followers} follower(s); need exactly 1 and at least 1"),
        );
        let scenario_name_ok = !self.name.is_empty()
            && !self.name.starts_with('.')
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
        rep.push(
            "scenario name",
            scenario_name_ok,
            format!(
                "scenario name '{}' uses only letters, digits, '-', '_', '.' and does not start with '.'",
                self.name
            ),
        );
        let names_ok = self.interceptors.iter().enumerate().all(|(i, a)| {
            !a.name.is_empty()
                && !a.name.contains(|c: char| c == ',' || c == '#' || c.is_whitespace())
                && !self.interceptors[..i].iter().any(|b| b.name == a.name)
        });
        rep.push(
            "names",
            names_ok,
            "interceptor names are unique, non-empty and free of commas, '#' and whitespace".into(),
        );
        rep.push(
            "topology size",
            self.topology.n_followers() == followers,
            format!(
                "topology has {} followers, scenario lists {}",
                self.topology.n_followers(),
                followers
            ),
        );

        match self.interaction_matrix() {
            Ok(h) => {
                rep.lambda_min = Some(h.lambda_min);
                if self.sim.dt > 0.0 {
                    rep.time_floor = Some(g.stable_time_floor(self.autopilot, h.lambda_max, self.sim.dt));
                }
                let bound = 1.0 / h.lambda_min;
                rep.push(
                    "lambda_min",
                    h.lambda_min > 0.0,
                    format!("lambda_min = {:.6} > 0", h.lambda_min),
                );
                let ok = g.eta_f > bound;
                rep.push(
                    "eta_f",
                    ok,
                    if ok {
                        format!("eta_f = {} > 1/lambda_min = {:.3}", g.eta_f, bound)
                    } else {
                        format!("eta_f {} ≤ 1/lambda_min {:.3}", g.eta_f, bound)
                    },
                );
            }
            Err(e) => rep.push("lambda_min", false, format!("{e}")),
        }

        rep.push(
            "eta_leader",
            g.eta_leader > 1.0,
            format!("eta_leader = {} > 1", g.eta_leader),
        );

        if first_order {
            match g.t_one {
                Some(t1) => rep.push(
                    "ordering",
                    0.0 <= g.t_f_leader && g.t_f_leader < t1 && t1 < g.t_f && g.t_f < g.t_d,
                    format!(
                        "0 ≤ t_f_leader {} < t_one {} < t_f {} < t_d {}",
                        g.t_f_leader, t1, g.t_f, g.t_d
                    ),
                ),
                None => rep.push("t_one", false, "t_one is required for the first-order autopilot".into()),
            }
            match g.eta_leader2 {
                Some(v) => rep.push("eta_leader2", v >= 1.0, format!("eta_leader2 = {v} ≥ 1")),
                None => rep.push(
                    "eta_leader2",
                    false,
                    "eta_leader2 is required for the first-order autopilot".into(),
                ),
            }
            match g.eta_f2 {
                Some(v) => rep.push("eta_f2", v > 1.0, format!("eta_f2 = {v} > 1")),
                None => rep.push(
                    "eta_f2",
                    false,
                    "eta_f2 is required for the first-order autopilot".into(),
                ),
            }
        } else {
            rep.push(
                "ordering",
                0.0 <= g.t_f_leader && g.t_f_leader < g.t_f && g.t_f < g.t_d,
                format!("0 ≤ t_f_leader {} < t_f {} < t_d {}", g.t_f_leader, g.t_f, g.t_d),
            );
        }

        rep.push("nav_n", g.nav_n >= 2.0, format!("nav_n = {} ≥ 2", g.nav_n));
        rep.push(
            "guards",
            g.reg > 0.0 && g.eps_t > 0.0 && g.eps_b >= 0.0 && g.z_clip > 0.0,
            format!(
                "reg {} > 0, eps_t {} > 0, eps_b {} ≥ 0, z_clip {} > 0",
                g.reg, g.eps_t, g.eps_b, g.z_clip
            ),
        );

        for spec in &self.interceptors {
            let mut ok = spec.r0 > 0.0
                && spec.speed > 0.0
                && spec.a_max > 0.0
                && spec.theta0_deg.is_finite()
                && spec.gamma0_deg.is_finite();
            let mut detail = format!(
                "{}: r0 {} > 0, speed {} > 0, a_max {} > 0",
                spec.name, spec.r0, spec.speed, spec.a_max
            );
            if first_order {
                let tau = spec.tau.unwrap_or(f64::NAN);
                ok &= tau > 0.0;
                detail.push_str(&format!(", tau {tau} > 0"));
            }
            rep.push("interceptor", ok, detail);
        }

        let s = &self.sim;
        rep.push(
            "sim",
            s.dt > 0.0 && s.hit_radius > 0.0 && s.t_max > g.t_d && s.log_every >= 1,
            format!(
                "dt {} > 0, hit_radius {} > 0, t_max {} > t_d {}, log_every {} ≥ 1",
                s.dt, s.hit_radius, s.t_max, g.t_d, s.log_every
            ),
        );
        if s.dt > 0.0 {
            let mut boundaries = alloc::vec![g.t_f_leader, g.t_f];
            if first_order {
                boundaries.extend(g.t_one);
            }
            rep.push(
                "step grid",
                boundaries.iter().all(|b| on_grid(*b, s.dt)),
                format!("phase boundaries {boundaries:?} are multiples of dt {}", s.dt),
            );
        }
        rep
    }

    pub fn validated(self) -> Result<Self> {
        self.validate().into_result()?;
        Ok(self)
    }
}
