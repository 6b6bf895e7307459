use salvo::commands::{metrics_from_file, run_one, RunOptions};
use salvo::error::{exit, AppError};
use salvo::scenario_file::{load, load_unvalidated, parse, to_toml_string};
use salvo::trajectory::{self, from_csv, from_json, to_csv, to_json, Format};
use salvo_core::simulator::{InterceptorSample, Sample, Terminal};
use salvo_core::{preset, preset_names, Autopilot, Role, RunMetrics, TrajectoryLog};

const MINIMAL: &str = r#"
name = "tiny"
autopilot = "ideal"

[guidance]
t_d = 30.0
t_f_leader = 5.0
t_f = 25.0
eta_leader = 2.0
eta_f = 10.73

[network]
edges = [[1, 2]]
leader_targets = [1]

[[interceptor]]
name = "L"
role = "leader"
r0 = 5000.0
theta0 = 45.0
gamma0 = 90.0
speed = 200.0
a_max = 300.0

[[interceptor]]
name = "A"
role = "follower"
r0 = 5000.0
theta0 = 0.0
gamma0 = 60.0
speed = 200.0
a_max = 300.0

[[interceptor]]
name = "B"
role = "follower"
r0 = 5000.0
theta0 = -45.0
gamma0 = -30.0
speed = 200.0
a_max = 300.0
"#;

fn parse_err(src: &str) -> String {
    match parse(src, "test.toml") {
        Err(AppError::Parse { message, .. }) => message,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn every_preset_round_trips_through_toml() {
    for name in preset_names() {
        let s = preset(name).unwrap();
        let text = to_toml_string(&s);
        let back = parse(&text, name).unwrap();
        assert_eq!(back, s, "{name}");
    }
}

#[test]
fn defaults_fill_omitted_fields() {
    let s = parse(MINIMAL, "minimal").unwrap();
    assert_eq!(s.guidance.nav_n, 3.0);
    assert_eq!(s.guidance.reg, 1.0);
    assert_eq!(s.sim.t_max, 60.0);
    assert_eq!(s.sim.dt, 1e-3);
    assert_eq!(s.topology.follower_edges(), &[(0, 1)]);
    assert!(s.validated().is_ok());
}

#[test]
fn parse_errors_carry_line_numbers() {
    let broken = MINIMAL.replace("t_f = 25.0", "t_f = 25.0.0");
    let msg = parse_err(&broken);
    let line = MINIMAL.lines().position(|l| l == "t_f = 25.0").unwrap() + 1;
    assert!(msg.contains(&format!("line {line}")), "{msg}");
}

#[test]
fn unknown_fields_are_rejected() {
    let msg = parse_err(&MINIMAL.replace("eta_f = 10.73", "eta_f = 10.73\netaf = 3"));
    assert!(msg.contains("etaf"), "{msg}");
}

#[test]
fn weighted_edges_are_rejected() {
    let msg = parse_err(&MINIMAL.replace("edges = [[1, 2]]", "edges = [[1, 2, 5]]"));
    assert!(msg.contains("unweighted"), "{msg}");
}

#[test]
fn out_of_range_follower_index_is_rejected() {
    let msg = parse_err(&MINIMAL.replace("leader_targets = [1]", "leader_targets = [3]"));
    assert!(msg.contains("out of range 1..=2"), "{msg}");
}

#[test]
fn insufficient_follower_gain_names_the_inequality() {
    let err = load("set1", &["guidance.eta_f=1".into()]).unwrap_err();
    assert_eq!(err.exit_code(), exit::INVALID);
    let msg = err.to_string();
    assert!(msg.contains("eta_f 1 ≤ 1/lambda_min 5.365"), "{msg}");
}

#[test]
fn first_order_without_t_one_fails_validation() {
    let s = load_unvalidated("set1-lag", &[]).unwrap();
    let mut toml: toml::Table = toml::from_str(&to_toml_string(&s)).unwrap();
    toml["guidance"].as_table_mut().unwrap().remove("t_one");
    let s = parse(&toml::to_string(&toml).unwrap(), "no-t-one").unwrap();
    let rep = s.validate();
    assert!(rep.failures().any(|c| c.name == "t_one"));
}

#[test]
fn overrides_address_fields_by_name_and_index() {
    let s = load_unvalidated(
        "set1",
        &[
            "interceptor.F2.speed=250".into(),
            "interceptor.0.a_max=100".into(),
            "autopilot=first-order".into(),
            "network.edges=[[1,2],[2,3],[3,4]]".into(),
        ],
    )
    .unwrap();
    assert_eq!(s.interceptors[2].speed, 250.0);
    assert_eq!(s.interceptors[0].a_max, 100.0);
    assert_eq!(s.autopilot, Autopilot::FirstOrder);
    assert_eq!(s.topology.follower_edges().len(), 3);
}

#[test]
fn bad_override_paths_are_reported() {
    for spec in ["guidance", "nosuch.field=1", "interceptor.Z.speed=1", "name.x=1"] {
        let err = load_unvalidated("set1", &[spec.into()]).unwrap_err();
        assert!(matches!(err, AppError::Override { .. }), "{spec}: {err}");
    }
}

#[test]
fn unknown_scenario_lists_presets() {
    let err = load("nope", &[]).unwrap_err();
    assert!(err.to_string().contains("set1-lag"));
}

fn sample_log() -> TrajectoryLog {
    let is = |k: f64| InterceptorSample {
        x: 0.1 * k,
        y: -1.0 / 3.0 * k,
        r: 5000.0 - k,
        theta: 0.123_456_789_012_345_68,
        gamma: -std::f64::consts::PI,
        theta_m: 1e-300,
        a_m: -299.99999999999994,
        a_mc: 300.0,
        tgo: 25.123456789012345,
        tgo_dot: -1.0000000000000002,
        error: 5e-324,
        saturated: k as i64 % 2 == 0,
    };
    TrajectoryLog {
        scenario: "demo".into(),
        autopilot: Autopilot::FirstOrder,
        names: vec!["L".into(), "F1".into()],
        roles: vec![Role::Leader, Role::Follower],
        samples: (0..4)
            .map(|k| Sample {
                t: k as f64 * 0.01,
                interceptors: vec![is(k as f64), is(k as f64 + 1.0)],
                delta_norm: 0.1 / (k as f64 + 1.0),
                lyap_v: 1e-17,
                lyap_vz: if k == 0 { None } else { Some(2.5) },
            })
            .collect(),
        terminals: vec![
            Terminal {
                impact_time: Some(29.999997087829453),
                miss_distance: Some(3.713252894189981e-8),
            },
            Terminal::default(),
        ],
    }
}

#[test]
fn csv_round_trip_is_exact() {
    let log = sample_log();
    assert_eq!(from_csv(&to_csv(&log), "mem").unwrap(), log);
}

#[test]
fn json_round_trip_is_exact() {
    let log = sample_log();
    assert_eq!(from_json(&to_json(&log), "mem").unwrap(), log);
}

#[test]
fn truncated_csv_is_a_schema_error() {
    let text = to_csv(&sample_log());
    let cut = &text[..text.len() - "# end\n".len()];
    let err = from_csv(cut, "cut.csv").unwrap_err();
    assert!(matches!(err, AppError::Schema { .. }));
    assert!(err.to_string().contains("truncated"));

    let mid = &text[..text.len() / 2];
    assert!(matches!(from_csv(mid, "mid.csv"), Err(AppError::Schema { .. })));
}

#[test]
fn malformed_csv_rows_are_reported_with_line() {
    let text = to_csv(&sample_log()).replacen("0.01,", "0.01x,", 1);
    let err = from_csv(&text, "bad.csv").unwrap_err().to_string();
    assert!(err.contains("line 7"), "{err}");
}

#[test]
fn no_consensus_log_has_no_consensus_time() {
    let mut log = sample_log();
    for s in &mut log.samples {
        s.delta_norm = 1.0;
    }
    let m = RunMetrics::from_log(&log);
    assert_eq!(m.consensus_time, None);
    assert!(!m.mission_success);
    assert_eq!(m.impact_spread, None);
}

#[test]
fn written_trajectories_reproduce_run_metrics() {
    let dir = tempfile::tempdir().unwrap();
    for format in [Format::Csv, Format::Json] {
        let opts = RunOptions {
            scenarios: vec![],
            out: dir.path().join(format.extension()),
            format,
            dt: Some(2e-3),
            overrides: vec![],
            jobs: None,
            gnuplot: true,
        };
        let outcome = run_one("set1", &opts).unwrap();
        assert!(outcome.metrics.mission_success);
        let (log, metrics) = metrics_from_file(&outcome.trajectory_path).unwrap();
        assert_eq!(log, outcome.log);
        assert_eq!(metrics, outcome.metrics);
        let read_back = trajectory::read(&outcome.trajectory_path).unwrap();
        assert_eq!(read_back, outcome.log);
        for f in ["metrics.json", "scenario.toml", "plots/tgo.dat", "plots/plots.gp"] {
            assert!(outcome.dir.join(f).is_file(), "{f}");
        }
        // the saved scenario reproduces the run
        let again = load(outcome.dir.join("scenario.toml").to_str().unwrap(), &[]).unwrap();
        assert_eq!(salvo_core::run(&again).unwrap().0, outcome.log);
    }
}

#[test]
fn scenario_names_cannot_escape_the_output_directory() {
    for bad in ["../up", "a/b", ".hidden", ""] {
        let err = load("set1", &[format!("name=\"{bad}\"")]).unwrap_err();
        assert!(err.to_string().contains("scenario name"), "{bad}: {err}");
    }
}
