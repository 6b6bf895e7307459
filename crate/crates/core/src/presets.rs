//! Built-in scenarios.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::engagement::{Autopilot, Role};
use crate::guidance::GuidanceConfig;
use crate::network::NetworkTopology;
use crate::scenario::{InterceptorSpec, Scenario, SimSettings};

pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const CATALOG: &[PresetInfo] = &[
    PresetInfo {
        name: "set1",
        description: "Equal ranges, different heading errors; ideal autopilot, T_d = 30 s",
    },
    PresetInfo {
        name: "set1-tf10",
        description: "set1 with the follower settling time reduced to 10 s",
    },
    PresetInfo {
        name: "set1-td27.52",
        description: "set1 with the desired impact time reduced to 27.52 s",
    },
    PresetInfo {
        name: "set2",
        description: "Different initial ranges; ideal autopilot, T_d = 65 s",
    },
    PresetInfo {
        name: "set3",
        description: "Different speeds; ideal autopilot, T_d = 12 s (follower 2 starts at 6000 m)",
    },
    PresetInfo {
        name: "set1-lag",
        description: "set1 geometry with a first-order autopilot, tau = 0.5 s",
    },
    PresetInfo {
        name: "eight-follower",
        description: "1 leader + 8 followers over a 9-edge graph whose lambda_min gives eta_f = 2/lambda_min = 24.7572",
    },
    PresetInfo {
        name: "comparison",
        description: "10 km / 400 m/s engagement, first-order autopilot, leader broadcasts to followers 1 and 2",
    },
];

pub fn preset_catalog() -> &'static [PresetInfo] {
    CATALOG
}

/// Interceptor list from parallel columns; the first entry is the leader.
fn fleet(r0: &[f64], speed: &[f64], theta: &[f64], gamma: &[f64], tau: Option<f64>) -> Vec<InterceptorSpec> {
    (0..theta.len())
        .map(|i| InterceptorSpec {
            name: if i == 0 { "L".to_string() } else { format!("F{i}") },
            role: if i == 0 { Role::Leader } else { Role::Follower },
            r0: r0[i.min(r0.len() - 1)],
            theta0_deg: theta[i],
            gamma0_deg: gamma[i],
            speed: speed[i.min(speed.len() - 1)],
            tau,
            a_max: 300.0,
        })
        .collect()
}

fn cycle4(leader_targets: &[usize]) -> NetworkTopology {
    NetworkTopology::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)], leader_targets.iter().copied())
        .expect("4-cycle is connected")
}

fn scenario(
    name: &str,
    autopilot: Autopilot,
    interceptors: Vec<InterceptorSpec>,
    topology: NetworkTopology,
    guidance: GuidanceConfig,
) -> Scenario {
    let description = CATALOG
        .iter()
        .find(|p| p.name == name)
        .map(|p| p.description)
        .unwrap_or_default();
    Scenario {
        name: name.into(),
        description: description.into(),
        autopilot,
        interceptors,
        topology,
        sim: SimSettings::for_impact_time(guidance.t_d),
        guidance,
    }
}

fn set1_fleet(tau: Option<f64>) -> Vec<InterceptorSpec> {
    fleet(
        &[5000.0],
        &[200.0],
        &[45.0, 0.0, -45.0, 60.0, 120.0],
        &[90.0, 60.0, -30.0, 30.0, 70.0],
        tau,
    )
}

fn set1_lag_guidance() -> GuidanceConfig {
    GuidanceConfig::first_order(30.0, 5.0, 24.0, 25.0, 7.0, 1.5, 15.0, 4.0)
}

/// Builds a preset by name.
pub fn preset(name: &str) -> Option<Scenario> {
    let ideal = Autopilot::Ideal;
    let s = match name {
        "set1" => scenario(
            name,
            ideal,
            set1_fleet(None),
            cycle4(&[0]),
            GuidanceConfig::ideal(30.0, 5.0, 25.0, 2.0, 10.73),
        ),
        "set1-tf10" => scenario(
            name,
            ideal,
            set1_fleet(None),
            cycle4(&[0]),
            GuidanceConfig::ideal(30.0, 5.0, 10.0, 2.0, 10.73),
        ),
        "set1-td27.52" => scenario(
            name,
            ideal,
            set1_fleet(None),
            cycle4(&[0]),
            GuidanceConfig::ideal(27.52, 5.0, 25.0, 2.0, 10.73),
        ),
        "set2" => scenario(
            name,
            ideal,
            fleet(
                &[10500.0, 11000.0, 9800.0, 10000.0, 9500.0],
                &[200.0],
                &[-30.0, -60.0, -45.0, -80.0, -90.0],
                &[-45.0, -90.0, -30.0, -60.0, -45.0],
                None,
            ),
            cycle4(&[0]),
            GuidanceConfig::ideal(65.0, 5.0, 50.0, 3.0, 10.73),
        ),
        "set3" => scenario(
            name,
            ideal,
            fleet(
                &[6000.0],
                &[630.0, 630.0, 600.0, 570.0, 594.0],
                &[-40.0, -50.0, -60.0, -30.0, -70.0],
                &[0.0, -5.0, 0.0, 25.0, 10.0],
                None,
            ),
            cycle4(&[0]),
            GuidanceConfig::ideal(12.0, 2.0, 10.0, 3.0, 10.73),
        ),
        "set1-lag" => scenario(
            name,
            Autopilot::FirstOrder,
            set1_fleet(Some(0.5)),
            cycle4(&[0]),
            set1_lag_guidance(),
        ),
        "eight-follower" => scenario(
            name,
            ideal,
            fleet(
                &[5000.0],
                &[200.0],
                &[45.0, 0.0, -45.0, 60.0, 120.0, 190.0, -110.0, 90.0, 160.0],
                &[90.0, 60.0, -30.0, 30.0, 70.0, 130.0, 240.0, 20.0, 100.0],
                None,
            ),
            NetworkTopology::new(
                8,
                [(0, 3), (0, 4), (0, 6), (1, 3), (2, 5), (2, 6), (2, 7), (3, 4), (4, 6)],
                [0],
            )
            .expect("eight-follower graph is connected"),
            GuidanceConfig::ideal(30.0, 5.0, 25.0, 3.0, 24.7572),
        ),
        "comparison" => scenario(
            name,
            Autopilot::FirstOrder,
            fleet(
                &[10000.0],
                &[400.0],
                &[30.0, 150.0, -30.0, 210.0, 45.0],
                &[0.0, 170.0, 0.0, 250.0, 90.0],
                Some(0.5),
            ),
            cycle4(&[0, 1]),
            set1_lag_guidance(),
        ),
        _ => return None,
    };
    Some(s)
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|p| p.name)
}

/// Names joined for error messages.
pub fn preset_list() -> String {
    preset_names().collect::<Vec<_>>().join(", ")
}
