//! Leader and follower guidance laws for both autopilot models.
//!
//! Every law is feedback linearization on the time-to-go error followed by
//! a free-will arbitrary-time stabilizer of the form
//! `-eta / (t_s - t) * (1 - exp(-x))`, switched off once its settling
//! instant `t_s` has passed.
//!
//! Phase schedule:
//!
//! | window            | leader               | followers (ideal)   | followers (lag)                 |
//! |-------------------|----------------------|---------------------|---------------------------------|
//! | `t < t_fl`        | converge to `T_d - t`| see [`PreConsensus`]| see [`PreConsensus`]            |
//! | `t_fl <= t < t_1` | hold `dt_go/dt = -1` | consensus           | consensus + back-stepping on z  |
//! | `t_1 <= t < t_f`  | hold                 | consensus           | consensus                       |
//! | `t >= t_f`        | hold                 | hold                | hold                            |
//!
//! Errors are scaled by `reg` before entering the exponentials and the
//! auxiliary input is scaled back by `1 / reg`.

use alloc::vec;
use alloc::vec::Vec;

use crate::engagement::{Autopilot, EngagementState, InterceptorParams};
use crate::error::{Error, Result};
use crate::math::{abs, exp_neg_clipped, sin};
use crate::network::{InteractionMatrix, Matrix};
use crate::timetogo::TgoTerms;

/// What followers do before the leader has settled (`t < t_fl`), when
/// their consensus input is still off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PreConsensus {
    /// Apply the law with a zero auxiliary input: each follower holds
    /// `dt_go/dt = -1`, so its time-to-go error is frozen until consensus
    /// starts.
    #[default]
    Hold,
    /// Zero commanded acceleration: fly straight until `t_fl`.
    Ballistic,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GuidanceConfig {
    /// Desired impact time `T_d`, s.
    pub t_d: f64,
    /// Leader settling time `t_fl`, s.
    pub t_f_leader: f64,
    /// End of the follower back-stepping phase `t_1`, s. First-order model only.
    pub t_one: Option<f64>,
    /// Follower settling time `t_f`, s.
    pub t_f: f64,
    pub eta_leader: f64,
    /// First-order model only.
    pub eta_leader2: Option<f64>,
    pub eta_f: f64,
    /// First-order model only.
    pub eta_f2: Option<f64>,
    /// Navigation constant `N`.
    pub nav_n: f64,
    /// Error scaling applied before the exponentials.
    pub reg: f64,
    /// Floor on every `t_s - t` denominator, s. The simulator may raise it,
    /// see [`GuidanceConfig::stable_time_floor`].
    pub eps_t: f64,
    /// Below this `|B|` the proportional-navigation fallback is used.
    pub eps_b: f64,
    /// Clamp on exponential arguments.
    pub z_clip: f64,
    pub pre_consensus: PreConsensus,
}

pub const DEFAULT_NAV_N: f64 = 3.0;
pub const DEFAULT_EPS_T: f64 = 1e-3;
pub const DEFAULT_EPS_B: f64 = 1e-8;
pub const DEFAULT_Z_CLIP: f64 = 30.0;
pub const DEFAULT_REG_FIRST_ORDER: f64 = 0.01;

impl GuidanceConfig {
    pub fn ideal(t_d: f64, t_f_leader: f64, t_f: f64, eta_leader: f64, eta_f: f64) -> Self {
        GuidanceConfig {
            t_d,
            t_f_leader,
            t_one: None,
            t_f,
            eta_leader,
            eta_leader2: None,
            eta_f,
            eta_f2: None,
            nav_n: DEFAULT_NAV_N,
            reg: 1.0,
            eps_t: DEFAULT_EPS_T,
            eps_b: DEFAULT_EPS_B,
            z_clip: DEFAULT_Z_CLIP,
            pre_consensus: PreConsensus::Hold,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn first_order(
        t_d: f64,
        t_f_leader: f64,
        t_one: f64,
        t_f: f64,
        eta_leader: f64,
        eta_leader2: f64,
        eta_f: f64,
        eta_f2: f64,
    ) -> Self {
        GuidanceConfig {
            t_one: Some(t_one),
            eta_leader2: Some(eta_leader2),
            eta_f2: Some(eta_f2),
            reg: DEFAULT_REG_FIRST_ORDER,
            ..Self::ideal(t_d, t_f_leader, t_f, eta_leader, eta_f)
        }
    }

    /// Largest rate `eta` multiplying a `1 / (t_s - t)` factor in the
    /// linearized error dynamics. The consensus gain acts through `H`, so it
    /// is weighted by `lambda_max(H)`.
    pub fn stiffness(&self, autopilot: Autopilot, lambda_max: f64) -> f64 {
        let mut k = self.eta_leader.max(self.eta_f * lambda_max);
        if autopilot == Autopilot::FirstOrder {
            k = k.max(self.eta_leader2.unwrap_or(0.0)).max(self.eta_f2.unwrap_or(0.0));
        }
        k
    }

    /// The time floor actually used with a fixed step `dt`: `eps_t`, raised
    /// to `stiffness * dt / 2` so that `gain * dt` never leaves the real
    /// stability interval of RK4 as `t` approaches a settling instant.
    /// Without this the last few steps before `t_fl` or `t_f` amplify
    /// round-off by orders of magnitude.
    pub fn stable_time_floor(&self, autopilot: Autopilot, lambda_max: f64, dt: f64) -> f64 {
        self.eps_t.max(0.5 * dt * self.stiffness(autopilot, lambda_max))
    }

    /// Followers receive no command at all at time `t`.
    fn followers_idle(&self, t: f64) -> bool {
        self.pre_consensus == PreConsensus::Ballistic && t < self.t_f_leader
    }

    fn time_left(&self, t_s: f64, t: f64) -> f64 {
        (t_s - t).max(self.eps_t)
    }
}

/// A lateral-acceleration command after guarding and saturation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Command {
    pub accel: f64,
    /// The unclamped command exceeded `a_max`.
    pub saturated: bool,
    /// `|B|` was below `eps_b` and the PN fallback was used.
    pub guarded: bool,
}

pub fn saturate(a: f64, a_max: f64) -> f64 {
    a.clamp(-a_max, a_max)
}

/// `numerator / b`, or the proportional-navigation command `N V dtheta/dt`
/// when `|b| < eps_b`. The flag reports whether the fallback was taken.
pub fn guarded_divide_by_b(
    numerator: f64,
    b: f64,
    state: &EngagementState,
    params: &InterceptorParams,
    cfg: &GuidanceConfig,
) -> (f64, bool) {
    if abs(b) >= cfg.eps_b {
        (numerator / b, false)
    } else {
        let theta_dot = -params.speed * sin(state.gamma - state.theta) / state.r;
        (cfg.nav_n * params.speed * theta_dot, true)
    }
}

fn finish(
    numerator: f64,
    b: f64,
    state: &EngagementState,
    params: &InterceptorParams,
    cfg: &GuidanceConfig,
) -> Command {
    let (raw, guarded) = guarded_divide_by_b(numerator, b, state, params, cfg);
    let accel = saturate(raw, params.a_max);
    Command {
        accel,
        saturated: accel != raw,
        guarded,
    }
}

/// Auxiliary input of the ideal-autopilot leader law, `de_l/dt = u`.
pub fn leader_aux_ideal(t: f64, e_leader: f64, cfg: &GuidanceConfig) -> f64 {
    if t >= cfg.t_f_leader {
        return 0.0;
    }
    let x = cfg.reg * e_leader;
    -cfg.eta_leader / cfg.time_left(cfg.t_f_leader, t) * (1.0 - exp_neg_clipped(x, cfg.z_clip)) / cfg.reg
}

/// Auxiliary inputs of the ideal-autopilot consensus law, `d(delta)/dt = u`.
pub fn follower_aux_ideal(t: f64, delta: &[f64], h: &InteractionMatrix, cfg: &GuidanceConfig) -> Vec<f64> {
    let n = delta.len();
    if t < cfg.t_f_leader || t >= cfg.t_f {
        return vec![0.0; n];
    }
    let scaled: Vec<f64> = delta.iter().map(|d| d * cfg.reg).collect();
    let gain = cfg.eta_f / cfg.time_left(cfg.t_f, t);
    h.h.mul_vec(&scaled)
        .into_iter()
        .map(|hd| -gain * (1.0 - exp_neg_clipped(hd, cfg.z_clip)) / cfg.reg)
        .collect()
}

/// `psi_1(delta, t) = eta / (t_fl - t) * (1 - exp(-delta))` and its partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaderManifold {
    pub psi: f64,
    pub d_dt: f64,
    pub d_ddelta: f64,
}

pub fn leader_manifold(delta_s: f64, t: f64, cfg: &GuidanceConfig) -> LeaderManifold {
    let left = cfg.time_left(cfg.t_f_leader, t);
    let e = exp_neg_clipped(delta_s, cfg.z_clip);
    let eta = cfg.eta_leader;
    LeaderManifold {
        psi: eta / left * (1.0 - e),
        d_dt: eta / (left * left) * (1.0 - e),
        d_ddelta: eta / left * e,
    }
}

/// Auxiliary input of the lagged-autopilot leader law, `d^2 e_l/dt^2 = u`,
/// in scaled units. Returns `(u, z_l)`; once `psi_1` is off, `z_l = nu_l`.
pub fn leader_aux_lag(t: f64, delta_s: f64, nu_s: f64, cfg: &GuidanceConfig) -> (f64, f64) {
    if t >= cfg.t_f_leader {
        return (0.0, nu_s);
    }
    let m = leader_manifold(delta_s, t, cfg);
    let z = nu_s + m.psi;
    let eta2 = cfg.eta_leader2.unwrap_or(1.0);
    let left = cfg.time_left(cfg.t_f_leader, t);
    let u = -delta_s - m.d_dt - nu_s * m.d_ddelta - eta2 / left * (1.0 - exp_neg_clipped(z, cfg.z_clip));
    (u, z)
}

/// `phi(t, delta) = eta_f / (t_f - t) * (1 - exp(-H delta))` with its
/// Jacobian and time derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusManifold {
    pub phi: Vec<f64>,
    pub d_dt: Vec<f64>,
    pub d_ddelta: Matrix,
}

pub fn consensus_manifold(h: &InteractionMatrix, delta_s: &[f64], t: f64, cfg: &GuidanceConfig) -> ConsensusManifold {
    let n = delta_s.len();
    let left = cfg.time_left(cfg.t_f, t);
    let gain = cfg.eta_f / left;
    let e: Vec<f64> =
        h.h.mul_vec(delta_s)
            .into_iter()
            .map(|x| exp_neg_clipped(x, cfg.z_clip))
            .collect();
    let mut jac = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            jac[(i, j)] = gain * e[i] * h.h[(i, j)];
        }
    }
    ConsensusManifold {
        phi: e.iter().map(|ei| gain * (1.0 - ei)).collect(),
        d_dt: e.iter().map(|ei| gain / left * (1.0 - ei)).collect(),
        d_ddelta: jac,
    }
}

/// Auxiliary inputs of the lagged-autopilot consensus law in scaled units.
/// Returns `(u, z)`; once `phi` is off (`t >= t_f`), `z = nu`.
pub fn follower_aux_lag(
    t: f64,
    delta_s: &[f64],
    nu_s: &[f64],
    h: &InteractionMatrix,
    cfg: &GuidanceConfig,
) -> (Vec<f64>, Vec<f64>) {
    let n = delta_s.len();
    if t >= cfg.t_f {
        return (vec![0.0; n], nu_s.to_vec());
    }
    let m = consensus_manifold(h, delta_s, t, cfg);
    let z: Vec<f64> = nu_s.iter().zip(&m.phi).map(|(v, p)| v + p).collect();
    if t < cfg.t_f_leader {
        return (vec![0.0; n], z);
    }
    let jnu = m.d_ddelta.mul_vec(nu_s);
    let mut u: Vec<f64> = jnu.iter().zip(&m.d_dt).map(|(a, b)| -a - b).collect();
    let t_one = cfg.t_one.unwrap_or(cfg.t_f_leader);
    if t < t_one {
        let gain = cfg.eta_f2.unwrap_or(1.0) / cfg.time_left(t_one, t);
        for (ui, zi) in u.iter_mut().zip(&z) {
            *ui -= gain * (1.0 - exp_neg_clipped(*zi, cfg.z_clip));
        }
    }
    (u, z)
}

/// Maps an ideal-model auxiliary input to a lateral acceleration.
fn command_ideal(
    u: f64,
    terms: &TgoTerms,
    state: &EngagementState,
    params: &InterceptorParams,
    cfg: &GuidanceConfig,
) -> Command {
    finish(u - terms.f - 1.0, terms.b, state, params, cfg)
}

/// Maps a lagged-model auxiliary input (already unscaled) to an autopilot
/// command.
fn command_lag(
    u: f64,
    terms: &TgoTerms,
    state: &EngagementState,
    params: &InterceptorParams,
    cfg: &GuidanceConfig,
) -> Command {
    let tau = params.tau;
    let numerator = tau * (u - terms.f_dot - (terms.b_dot - terms.b / tau) * state.a_m);
    finish(numerator, terms.b, state, params, cfg)
}

pub fn leader_accel_ideal(
    t: f64,
    state: &EngagementState,
    params: &InterceptorParams,
    cfg: &GuidanceConfig,
) -> Result<f64> {
    let terms = TgoTerms::evaluate_with_accel(state, params, 0.0, cfg.nav_n)?;
    let e = terms.tgo - (cfg.t_d - t);
    Ok(command_ideal(leader_aux_ideal(t, e, cfg), &terms, state, params, cfg).accel)
}

pub fn leader_accel_lag(
    t: f64,
    state: &EngagementState,
    params: &InterceptorParams,
    cfg: &GuidanceConfig,
) -> Result<f64> {
    let terms = TgoTerms::evaluate(state, params, cfg.nav_n)?;
    let e = terms.tgo - (cfg.t_d - t);
    let nu = terms.tgo_dot + 1.0;
    let (u, _) = leader_aux_lag(t, cfg.reg * e, cfg.reg * nu, cfg);
    Ok(command_lag(u / cfg.reg, &terms, state, params, cfg).accel)
}

/// One interceptor as seen by the guidance laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Member {
    pub state: EngagementState,
    pub params: InterceptorParams,
    /// False once the interceptor has reached the target.
    pub active: bool,
}

/// Time-to-go errors of the fleet, unscaled.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FleetErrorState {
    /// `t_go,i - t_go,l` per follower, s.
    pub delta: Vec<f64>,
    /// `dt_go,i/dt + 1` per follower.
    pub nu: Vec<f64>,
    /// `t_go,l - (T_d - t)`, s.
    pub e_leader: f64,
    /// `dt_go,l/dt + 1`.
    pub nu_leader: f64,
}

/// Everything evaluated for a fleet snapshot at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetEvaluation {
    /// Leader first, then followers in order.
    pub terms: Vec<TgoTerms>,
    pub commands: Vec<Command>,
    pub errors: FleetErrorState,
    /// Scaled back-stepping variable `z` of the followers (first-order model).
    pub z: Option<Vec<f64>>,
    /// Scaled `z_l` of the leader (first-order model).
    pub z_leader: Option<f64>,
}

fn member_terms(m: &Member, nav_n: f64) -> Result<TgoTerms> {
    if m.active {
        TgoTerms::evaluate(&m.state, &m.params, nav_n)
    } else {
        Ok(TgoTerms {
            tgo: 0.0,
            f: -1.0,
            b: 0.0,
            tgo_dot: -1.0,
            f_dot: 0.0,
            b_dot: 0.0,
            k: crate::timetogo::guidance_constant(nav_n),
        })
    }
}

/// Evaluates every law for the snapshot `members` (leader first).
///
/// Followers that have already intercepted contribute zero error to the
/// consensus vectors and receive a zero command. A leader that has
/// intercepted is replaced by its reference `T_d - t`.
pub fn evaluate_fleet(
    t: f64,
    autopilot: Autopilot,
    members: &[Member],
    h: &InteractionMatrix,
    cfg: &GuidanceConfig,
) -> Result<FleetEvaluation> {
    let n = members.len().saturating_sub(1);
    if n != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: n,
        });
    }
    let leader = &members[0];
    let followers = &members[1..];
    let mut terms = members
        .iter()
        .map(|m| member_terms(m, cfg.nav_n))
        .collect::<Result<Vec<_>>>()?;
    let mut commands = vec![Command::default(); members.len()];

    let reference = cfg.t_d - t;
    let leader_tgo = if leader.active { terms[0].tgo } else { reference };
    let e_leader = leader_tgo - reference;
    let delta: Vec<f64> = followers
        .iter()
        .zip(&terms[1..])
        .map(|(m, tt)| if m.active { tt.tgo - leader_tgo } else { 0.0 })
        .collect();

    let mut z = None;
    let mut z_leader = None;
    match autopilot {
        Autopilot::Ideal => {
            if leader.active {
                let u = leader_aux_ideal(t, e_leader, cfg);
                commands[0] = command_ideal(u, &terms[0], &leader.state, &leader.params, cfg);
            }
            let u = follower_aux_ideal(t, &delta, h, cfg);
            for (i, m) in followers.iter().enumerate() {
                if !m.active || cfg.followers_idle(t) {
                    continue;
                }
                commands[i + 1] = command_ideal(u[i], &terms[i + 1], &m.state, &m.params, cfg);
            }
            // achieved acceleration is the command itself
            for (tt, (m, c)) in terms.iter_mut().zip(members.iter().zip(&commands)) {
                if m.active {
                    tt.tgo_dot = tt.f + tt.b * c.accel;
                }
            }
        }
        Autopilot::FirstOrder => {
            let reg = cfg.reg;
            let nu_leader_s = reg * (terms[0].tgo_dot + 1.0);
            let (u, zl) = leader_aux_lag(t, reg * e_leader, nu_leader_s, cfg);
            z_leader = Some(zl);
            if leader.active {
                commands[0] = command_lag(u / reg, &terms[0], &leader.state, &leader.params, cfg);
            }
            let delta_s: Vec<f64> = delta.iter().map(|d| reg * d).collect();
            let nu_s: Vec<f64> = followers
                .iter()
                .zip(&terms[1..])
                .map(|(m, tt)| if m.active { reg * (tt.tgo_dot + 1.0) } else { 0.0 })
                .collect();
            let (u, zf) = follower_aux_lag(t, &delta_s, &nu_s, h, cfg);
            z = Some(zf);
            for (i, m) in followers.iter().enumerate() {
                if !m.active || cfg.followers_idle(t) {
                    continue;
                }
                commands[i + 1] = command_lag(u[i] / reg, &terms[i + 1], &m.state, &m.params, cfg);
            }
        }
    }

    let nu = followers
        .iter()
        .zip(&terms[1..])
        .map(|(m, tt)| if m.active { tt.tgo_dot + 1.0 } else { 0.0 })
        .collect();
    let errors = FleetErrorState {
        delta,
        nu,
        e_leader,
        nu_leader: terms[0].tgo_dot + 1.0,
    };
    Ok(FleetEvaluation {
        terms,
        commands,
        errors,
        z,
        z_leader,
    })
}

fn follower_members(
    leader_state: &EngagementState,
    leader_params: &InterceptorParams,
    followers: &[(EngagementState, InterceptorParams)],
) -> Vec<Member> {
    core::iter::once((leader_state, leader_params))
        .chain(followers.iter().map(|(s, p)| (s, p)))
        .map(|(s, p)| Member {
            state: *s,
            params: *p,
            active: true,
        })
        .collect()
}

/// Commanded accelerations of every follower under the ideal autopilot.
pub fn follower_accels_ideal(
    t: f64,
    leader: (&EngagementState, &InterceptorParams),
    followers: &[(EngagementState, InterceptorParams)],
    h: &InteractionMatrix,
    cfg: &GuidanceConfig,
) -> Result<Vec<f64>> {
    let members = follower_members(leader.0, leader.1, followers);
    let eval = evaluate_fleet(t, Autopilot::Ideal, &members, h, cfg)?;
    Ok(eval.commands[1..].iter().map(|c| c.accel).collect())
}

/// Autopilot commands of every follower under the first-order model.
pub fn follower_accels_lag(
    t: f64,
    leader: (&EngagementState, &InterceptorParams),
    followers: &[(EngagementState, InterceptorParams)],
    h: &InteractionMatrix,
    cfg: &GuidanceConfig,
) -> Result<Vec<f64>> {
    let members = follower_members(leader.0, leader.1, followers);
    let eval = evaluate_fleet(t, Autopilot::FirstOrder, &members, h, cfg)?;
    Ok(eval.commands[1..].iter().map(|c| c.accel).collect())
}
