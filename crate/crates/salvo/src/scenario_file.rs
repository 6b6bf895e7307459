//! The TOML scenario format.
//!
//! ```toml
//! name = "set1"
//! autopilot = "ideal"            # or "first-order"
//!
//! [guidance]
//! t_d = 30.0
//! t_f_leader = 5.0
//! t_f = 25.0
//! eta_leader = 2.0
//! eta_f = 10.73
//!
//! [network]
//! edges = [[1, 2], [2, 3], [3, 4], [4, 1]]   # follower pairs, 1-based
//! leader_targets = [1]
//!
//! [[interceptor]]
//! name = "L"
//! role = "leader"
//! r0 = 5000.0
//! theta0 = 45.0                  # degrees
//! gamma0 = 90.0                  # degrees
//! speed = 200.0
//! a_max = 300.0
//! ```
//!
//! Followers are numbered 1.. in the order their `[[interceptor]]` tables
//! appear. See the README for every field and its default.

use std::path::Path;

use salvo_core::guidance::{
    PreConsensus, DEFAULT_EPS_B, DEFAULT_EPS_T, DEFAULT_NAV_N, DEFAULT_REG_FIRST_ORDER, DEFAULT_Z_CLIP,
};
use salvo_core::presets::preset_list;
use salvo_core::scenario::{InterceptorSpec, SimSettings, DEFAULT_DT, DEFAULT_HIT_RADIUS, DEFAULT_LOG_EVERY};
use salvo_core::{preset, Autopilot, GuidanceConfig, NetworkTopology, Role, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};
use crate::overrides::apply_override;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub autopilot: Autopilot,
    pub guidance: GuidanceSection,
    pub network: NetworkSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(rename = "interceptor")]
    pub interceptors: Vec<InterceptorSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidanceSection {
    pub t_d: f64,
    pub t_f_leader: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_one: Option<f64>,
    pub t_f: f64,
    pub eta_leader: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_leader2: Option<f64>,
    pub eta_f: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_f2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nav_n: Option<f64>,
    /// Defaults to 1 for the ideal autopilot and 0.01 for the first-order one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_clip: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_consensus: Option<PreConsensus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    /// Undirected, unweighted follower pairs, 1-based.
    #[serde(default)]
    pub edges: Vec<Vec<i64>>,
    /// Followers that receive the leader's time-to-go, 1-based.
    pub leader_targets: Vec<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hit_radius: Option<f64>,
    /// Defaults to `2 t_d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterceptorSection {
    pub name: String,
    pub role: Role,
    pub r0: f64,
    /// Line-of-sight angle, degrees.
    pub theta0: f64,
    /// Flight-path angle, degrees.
    pub gamma0: f64,
    pub speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub a_max: f64,
}

fn follower_index(value: i64, n: usize, what: &str) -> Result<usize, String> {
    if value >= 1 && (value as u64) <= n as u64 {
        Ok(value as usize - 1)
    } else {
        Err(format!("{what}: follower index {value} out of range 1..={n}"))
    }
}

impl ScenarioFile {
    /// Converts to the simulation model. Structural problems (bad indices,
    /// weighted edges, disconnected graph) are reported here; gain and
    /// ordering conditions are left to [`Scenario::validate`].
    pub fn into_scenario(self) -> Result<Scenario, String> {
        let n_followers = self.interceptors.iter().filter(|i| i.role == Role::Follower).count();
        let mut edges = Vec::with_capacity(self.network.edges.len());
        for (k, e) in self.network.edges.iter().enumerate() {
            if e.len() != 2 {
                return Err(format!(
                    "network.edges[{k}]: expected a pair [i, j] of follower indices, got {} elements \
                     (edges are unweighted)",
                    e.len()
                ));
            }
            let what = format!("network.edges[{k}]");
            edges.push((
                follower_index(e[0], n_followers, &what)?,
                follower_index(e[1], n_followers, &what)?,
            ));
        }
        let targets = self
            .network
            .leader_targets
            .iter()
            .enumerate()
            .map(|(k, t)| follower_index(*t, n_followers, &format!("network.leader_targets[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let topology = NetworkTopology::new(n_followers, edges, targets).map_err(|e| format!("network: {e}"))?;

        let g = self.guidance;
        let guidance = GuidanceConfig {
            t_d: g.t_d,
            t_f_leader: g.t_f_leader,
            t_one: g.t_one,
            t_f: g.t_f,
            eta_leader: g.eta_leader,
            eta_leader2: g.eta_leader2,
            eta_f: g.eta_f,
            eta_f2: g.eta_f2,
            nav_n: g.nav_n.unwrap_or(DEFAULT_NAV_N),
            reg: g.reg.unwrap_or(match self.autopilot {
                Autopilot::Ideal => 1.0,
                Autopilot::FirstOrder => DEFAULT_REG_FIRST_ORDER,
            }),
            eps_t: g.eps_t.unwrap_or(DEFAULT_EPS_T),
            eps_b: g.eps_b.unwrap_or(DEFAULT_EPS_B),
            z_clip: g.z_clip.unwrap_or(DEFAULT_Z_CLIP),
            pre_consensus: g.pre_consensus.unwrap_or_default(),
        };
        let sim = SimSettings {
            dt: self.sim.dt.unwrap_or(DEFAULT_DT),
            hit_radius: self.sim.hit_radius.unwrap_or(DEFAULT_HIT_RADIUS),
            t_max: self.sim.t_max.unwrap_or(2.0 * guidance.t_d),
            log_every: self.sim.log_every.unwrap_or(DEFAULT_LOG_EVERY),
        };
        let interceptors = self
            .interceptors
            .into_iter()
            .map(|i| InterceptorSpec {
                name: i.name,
                role: i.role,
                r0: i.r0,
                theta0_deg: i.theta0,
                gamma0_deg: i.gamma0,
                speed: i.speed,
                tau: i.tau,
                a_max: i.a_max,
            })
            .collect();
        Ok(Scenario {
            name: self.name,
            description: self.description,
            autopilot: self.autopilot,
            interceptors,
            topology,
            guidance,
            sim,
        })
    }

    /// Every field written out explicitly, so the document reproduces the
    /// scenario exactly whatever the defaults.
    pub fn from_scenario(s: &Scenario) -> Self {
        let g = &s.guidance;
        let one_based = |i: usize| i as i64 + 1;
        ScenarioFile {
            name: s.name.clone(),
            description: s.description.clone(),
            autopilot: s.autopilot,
            guidance: GuidanceSection {
                t_d: g.t_d,
                t_f_leader: g.t_f_leader,
                t_one: g.t_one,
                t_f: g.t_f,
                eta_leader: g.eta_leader,
                eta_leader2: g.eta_leader2,
                eta_f: g.eta_f,
                eta_f2: g.eta_f2,
                nav_n: Some(g.nav_n),
                reg: Some(g.reg),
                eps_t: Some(g.eps_t),
                eps_b: Some(g.eps_b),
                z_clip: Some(g.z_clip),
                pre_consensus: Some(g.pre_consensus),
            },
            network: NetworkSection {
                edges: s
                    .topology
                    .follower_edges()
                    .iter()
                    .map(|&(a, b)| vec![one_based(a), one_based(b)])
                    .collect(),
                leader_targets: s.topology.leader_targets().iter().map(|&i| one_based(i)).collect(),
            },
            sim: SimSection {
                dt: Some(s.sim.dt),
                hit_radius: Some(s.sim.hit_radius),
                t_max: Some(s.sim.t_max),
                log_every: Some(s.sim.log_every),
            },
            interceptors: s
                .interceptors
                .iter()
                .map(|i| InterceptorSection {
                    name: i.name.clone(),
                    role: i.role,
                    r0: i.r0,
                    theta0: i.theta0_deg,
                    gamma0: i.gamma0_deg,
                    speed: i.speed,
                    tau: i.tau,
                    a_max: i.a_max,
                })
                .collect(),
        }
    }
}

/// Parses a scenario document without validating gains or ordering.
pub fn parse(src: &str, origin: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(src).map_err(|e| AppError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    file.into_scenario().map_err(|message| AppError::Parse {
        origin: origin.to_string(),
        message,
    })
}

pub fn to_toml_string(s: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from_scenario(s)).expect("scenario documents always serialize")
}

/// Loads a scenario from a file path or a preset name and applies dotted
/// `key=value` overrides, without validating it.
pub fn load_unvalidated(reference: &str, overrides: &[String]) -> Result<Scenario> {
    let path = Path::new(reference);
    let (text, origin) = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        (text, reference.to_string())
    } else if let Some(s) = preset(reference) {
        (to_toml_string(&s), format!("preset {reference}"))
    } else {
        return Err(AppError::UnknownScenario(reference.to_string(), preset_list()));
    };
    if overrides.is_empty() {
        return parse(&text, &origin);
    }
    let mut doc: toml::Table = toml::from_str(&text).map_err(|e| AppError::Parse {
        origin: origin.clone(),
        message: e.to_string().trim_end().to_string(),
    })?;
    for spec in overrides {
        apply_override(&mut doc, spec)?;
    }
    let file: ScenarioFile = toml::Value::Table(doc)
        .try_into()
        .map_err(|e: toml::de::Error| AppError::Parse {
            origin: format!("{origin} (after overrides)"),
            message: e.to_string().trim_end().to_string(),
        })?;
    file.into_scenario()
        .map_err(|message| AppError::Parse { origin, message })
}

/// [`load_unvalidated`] followed by full validation.
pub fn load(reference: &str, overrides: &[String]) -> Result<Scenario> {
    Ok(load_unvalidated(reference, overrides)?.validated()?)
}
