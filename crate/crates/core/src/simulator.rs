//! Fixed-step RK4 integration of the whole fleet.
//!
//! Commands are recomputed at every RK stage from that stage's snapshot of
//! all interceptors. An interceptor is finalized the first step its range
//! drops to `hit_radius` (or to 1.5 steps of flight, whichever is larger),
//! with impact time and miss distance taken from the straight line through
//! that state; it is then frozen and drops out of the consensus vectors of
//! whoever is still flying.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::engagement::{cartesian_position, kinematics_rhs, Autopilot, Role, StateRate};
use crate::error::{Error, Result};
use crate::guidance::{evaluate_fleet, FleetErrorState, FleetEvaluation, GuidanceConfig, Member};
use crate::math::{abs, cos, sin, sqrt, wrap_angle};
use crate::metrics::RunMetrics;
use crate::network::InteractionMatrix;
use crate::scenario::Scenario;

/// One interceptor at one logged instant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterceptorSample {
    pub x: f64,
    pub y: f64,
    pub r: f64,
    /// Wrapped to (-pi, pi].
    pub theta: f64,
    /// Wrapped to (-pi, pi].
    pub gamma: f64,
    pub theta_m: f64,
    /// Achieved lateral acceleration.
    pub a_m: f64,
    /// Commanded lateral acceleration after saturation.
    pub a_mc: f64,
    pub tgo: f64,
    pub tgo_dot: f64,
    /// `e_l` for the leader, `delta_i` for followers.
    pub error: f64,
    /// Command was clamped at some RK stage between this sample and the next.
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub t: f64,
    pub interceptors: Vec<InterceptorSample>,
    pub delta_norm: f64,
    /// `delta^T H delta`.
    pub lyap_v: f64,
    /// `z^T z` (first-order model only).
    pub lyap_vz: Option<f64>,
}

impl Sample {
    pub fn any_saturated(&self) -> bool {
        self.interceptors.iter().any(|s| s.saturated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Terminal {
    pub impact_time: Option<f64>,
    pub miss_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryLog {
    pub scenario: String,
    pub autopilot: Autopilot,
    /// Leader first.
    pub names: Vec<String>,
    pub roles: Vec<Role>,
    pub samples: Vec<Sample>,
    pub terminals: Vec<Terminal>,
}

/// `(||delta||, delta^T H delta, z^T z)`.
pub fn consensus_diagnostics(
    errors: &FleetErrorState,
    z: Option<&[f64]>,
    h: &InteractionMatrix,
) -> (f64, f64, Option<f64>) {
    let norm = sqrt(errors.delta.iter().map(|d| d * d).sum());
    let v = h.h.quadratic_form(&errors.delta);
    let vz = z.map(|z| z.iter().map(|x| x * x).sum());
    (norm, v, vz)
}

/// Members within this many steps of flight from the target are finished
/// on a straight line instead of being integrated further.
const TERMINAL_STEPS: f64 = 1.5;

/// Impact time and miss distance of the straight line through the current
/// state: time to the closest approach and the distance there.
fn terminal_at(t: f64, m: &Member) -> Terminal {
    let s = &m.state;
    let theta_m = s.gamma - s.theta;
    let along = s.r * cos(theta_m);
    Terminal {
        impact_time: Some(t + along.max(0.0) / m.params.speed),
        miss_distance: Some(abs(s.r * sin(theta_m))),
    }
}

struct Engine<'a> {
    scenario: &'a Scenario,
    /// The scenario's guidance with the time floor raised for `dt`.
    guidance: GuidanceConfig,
    h: InteractionMatrix,
    names: Vec<String>,
    members: Vec<Member>,
    boundaries: Vec<f64>,
}

impl Engine<'_> {
    /// Grid time, snapped onto phase boundaries so the laws switch exactly.
    fn time(&self, k: f64) -> f64 {
        let t = k * self.scenario.sim.dt;
        for b in &self.boundaries {
            if abs(t - b) <= 1e-9 * b.max(1.0) {
                return *b;
            }
        }
        t
    }

    /// Inside the hit radius, or close enough that the next step's RK
    /// stages could reach the target itself.
    fn arrived(&self, i: usize) -> bool {
        let m = &self.members[i];
        m.active
            && m.state.r
                <= self
                    .scenario
                    .sim
                    .hit_radius
                    .max(TERMINAL_STEPS * m.params.speed * self.scenario.sim.dt)
    }

    fn evaluate(&self, t: f64, members: &[Member]) -> Result<FleetEvaluation> {
        evaluate_fleet(t, self.scenario.autopilot, members, &self.h, &self.guidance)
    }

    fn rates(&self, t: f64, members: &[Member]) -> Result<(Vec<StateRate>, Vec<bool>)> {
        let eval = self.evaluate(t, members)?;
        let mut rates = vec![StateRate::default(); members.len()];
        let mut sat = vec![false; members.len()];
        for (i, m) in members.iter().enumerate() {
            if m.active {
                rates[i] = kinematics_rhs(&m.state, &m.params, eval.commands[i].accel)?;
                sat[i] = eval.commands[i].saturated;
            }
        }
        Ok((rates, sat))
    }

    fn shifted(&self, base: &[Member], h: f64, rates: &[StateRate]) -> Vec<Member> {
        base.iter()
            .zip(rates)
            .map(|(m, d)| Member {
                state: if m.active { m.state.axpy(h, d) } else { m.state },
                ..*m
            })
            .collect()
    }

    /// One RK4 step; returns the stage saturation flags OR-ed together.
    fn step(&mut self, k: f64) -> Result<Vec<bool>> {
        let dt = self.scenario.sim.dt;
        let t0 = self.time(k);
        let t_half = self.time(k + 0.5);
        let t1 = self.time(k + 1.0);
        let y0 = self.members.clone();
        let (k1, s1) = self.rates(t0, &y0)?;
        let (k2, s2) = self.rates(t_half, &self.shifted(&y0, dt / 2.0, &k1))?;
        let (k3, s3) = self.rates(t_half, &self.shifted(&y0, dt / 2.0, &k2))?;
        let (k4, s4) = self.rates(t1, &self.shifted(&y0, dt, &k3))?;
        for (i, m) in self.members.iter_mut().enumerate() {
            if !m.active {
                continue;
            }
            let d = StateRate {
                r_dot: (k1[i].r_dot + 2.0 * k2[i].r_dot + 2.0 * k3[i].r_dot + k4[i].r_dot) / 6.0,
                theta_dot: (k1[i].theta_dot + 2.0 * k2[i].theta_dot + 2.0 * k3[i].theta_dot + k4[i].theta_dot) / 6.0,
                gamma_dot: (k1[i].gamma_dot + 2.0 * k2[i].gamma_dot + 2.0 * k3[i].gamma_dot + k4[i].gamma_dot) / 6.0,
                a_m_dot: (k1[i].a_m_dot + 2.0 * k2[i].a_m_dot + 2.0 * k3[i].a_m_dot + k4[i].a_m_dot) / 6.0,
            };
            m.state = m.state.axpy(dt, &d);
            if !m.state.is_finite() {
                return Err(Error::NonFinite {
                    interceptor: self.names[i].clone(),
                    t: t1,
                });
            }
        }
        Ok((0..self.members.len())
            .map(|i| s1[i] || s2[i] || s3[i] || s4[i])
            .collect())
    }

    fn sample(&self, t: f64, eval: &FleetEvaluation, frozen: &[Option<InterceptorSample>]) -> Sample {
        let interceptors = self
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if let Some(s) = frozen[i] {
                    return s;
                }
                let (x, y) = cartesian_position(&m.state);
                let terms = &eval.terms[i];
                let cmd = eval.commands[i];
                let a_m = match self.scenario.autopilot {
                    Autopilot::Ideal => cmd.accel,
                    Autopilot::FirstOrder => m.state.a_m,
                };
                InterceptorSample {
                    x,
                    y,
                    r: m.state.r,
                    theta: wrap_angle(m.state.theta),
                    gamma: wrap_angle(m.state.gamma),
                    theta_m: m.state.heading_error(),
                    a_m,
                    a_mc: cmd.accel,
                    tgo: terms.tgo,
                    tgo_dot: terms.tgo_dot,
                    error: if i == 0 {
                        eval.errors.e_leader
                    } else {
                        eval.errors.delta[i - 1]
                    },
                    saturated: cmd.saturated,
                }
            })
            .collect();
        let (delta_norm, lyap_v, lyap_vz) = consensus_diagnostics(&eval.errors, eval.z.as_deref(), &self.h);
        Sample {
            t,
            interceptors,
            delta_norm,
            lyap_v,
            lyap_vz,
        }
    }
}

/// Runs a scenario to completion. Mission failure (an interceptor still
/// flying at `t_max`) is reported through the metrics, not as an error.
pub fn run(scenario: &Scenario) -> Result<(TrajectoryLog, RunMetrics)> {
    scenario.validate().into_result()?;
    let h = scenario.interaction_matrix()?;
    let ordered = scenario.ordered();
    let members: Vec<Member> = ordered
        .iter()
        .map(|spec| Member {
            state: spec.initial_state(),
            params: spec.params(scenario.autopilot),
            active: true,
        })
        .collect();
    let g = &scenario.guidance;
    let guidance = GuidanceConfig {
        eps_t: g.stable_time_floor(scenario.autopilot, h.lambda_max, scenario.sim.dt),
        ..g.clone()
    };
    let mut boundaries = vec![g.t_f_leader, g.t_f];
    boundaries.extend(g.t_one);

    let mut engine = Engine {
        scenario,
        guidance,
        h,
        names: ordered.iter().map(|s| s.name.clone()).collect(),
        members,
        boundaries,
    };
    let n = engine.members.len();
    let sim = &scenario.sim;
    let dt = sim.dt;
    let max_steps = libm::ceil(sim.t_max / dt) as u64;

    let mut frozen: Vec<Option<InterceptorSample>> = vec![None; n];
    let mut terminals = vec![Terminal::default(); n];
    let mut samples = Vec::new();
    let eval = engine.evaluate(0.0, &engine.members)?;
    samples.push(engine.sample(0.0, &eval, &frozen));
    for i in 0..n {
        if engine.arrived(i) {
            terminals[i] = terminal_at(0.0, &engine.members[i]);
            frozen[i] = Some(samples[0].interceptors[i]);
            engine.members[i].active = false;
        }
    }

    let mut pending = vec![false; n];
    let mut k: u64 = 0;
    while k < max_steps && engine.members.iter().any(|m| m.active) {
        let sat = engine.step(k as f64)?;
        for (p, s) in pending.iter_mut().zip(&sat) {
            *p |= *s;
        }
        k += 1;
        let t = engine.time(k as f64);

        let hits: Vec<usize> = (0..n).filter(|&i| engine.arrived(i)).collect();
        for &i in &hits {
            terminals[i] = terminal_at(t, &engine.members[i]);
        }

        if k.is_multiple_of(sim.log_every as u64) || !hits.is_empty() {
            let eval = engine.evaluate(t, &engine.members)?;
            if let Some(last) = samples.last_mut() {
                for (s, p) in last.interceptors.iter_mut().zip(&pending) {
                    s.saturated |= *p;
                }
            }
            pending.iter_mut().for_each(|p| *p = false);
            let sample = engine.sample(t, &eval, &frozen);
            for &i in &hits {
                frozen[i] = Some(sample.interceptors[i]);
            }
            samples.push(sample);
        }
        for &i in &hits {
            engine.members[i].active = false;
        }
    }

    let log = TrajectoryLog {
        scenario: scenario.name.clone(),
        autopilot: scenario.autopilot,
        names: engine.names,
        roles: ordered.iter().map(|s| s.role).collect(),
        samples,
        terminals,
    };
    let metrics = RunMetrics::from_log(&log);
    Ok((log, metrics))
}
