//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed; the process fails if
//! any criterion does. Run with `cargo test -p salvo-core --test acceptance`.

use std::time::Instant;

use salvo_core::engagement::{kinematics_rhs, EngagementState, InterceptorParams};
use salvo_core::simulator::Sample;
use salvo_core::timetogo::{fb_terms, guidance_constant, tgo_estimate, TgoTerms};
use salvo_core::{preset, run, Autopilot, Role, RunMetrics, Scenario, TrajectoryLog};

// Tolerances, pinned.
const IMPACT_TOL: f64 = 0.1;
const MISS_MAX: f64 = 2.0;
const SPREAD_MAX: f64 = 0.05;
const ERROR_MAX: f64 = 0.01;
const RUNTIME_MAX_S: f64 = 10.0;
const TGO_TOL: f64 = 0.01;
const LAMBDA_TOL: f64 = 0.0005;
const RATE_TOL: f64 = 0.02;
const MONOTONE_SLACK: f64 = 1e-9;
const SPEED_REL_TOL: f64 = 1e-9;
const FD_REL_TOL: f64 = 1e-4;
const DT_HALVING_TOL: f64 = 1e-3;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn simulate(name: &str) -> (Scenario, TrajectoryLog, RunMetrics) {
    let sc = preset(name).unwrap_or_else(|| panic!("preset {name}"));
    let (log, m) = run(&sc).unwrap_or_else(|e| panic!("{name}: {e}"));
    (sc, log, m)
}

/// Logged sample closest to `t`.
fn at(log: &TrajectoryLog, t: f64) -> &Sample {
    log.samples
        .iter()
        .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
        .unwrap()
}

fn worst_impact_error(m: &RunMetrics, t_d: f64) -> f64 {
    m.impact_times
        .iter()
        .map(|t| t.map_or(f64::INFINITY, |t| (t - t_d).abs()))
        .fold(0.0, f64::max)
}

fn on_time(m: &RunMetrics, t_d: f64) -> bool {
    m.mission_success && worst_impact_error(m, t_d) <= IMPACT_TOL
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (sc, log, m) = simulate("set1");
    let elapsed = start.elapsed().as_secs_f64();
    let miss = m
        .miss_distances
        .iter()
        .map(|d| d.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let spread = m.impact_spread.unwrap_or(f64::INFINITY);
    let leader_err = log
        .samples
        .iter()
        .filter(|s| (5.0..=25.0).contains(&s.t))
        .map(|s| s.interceptors[0].error.abs())
        .fold(0.0, f64::max);
    let delta_25 = at(&log, 25.0).delta_norm;
    outcome(
        on_time(&m, sc.guidance.t_d)
            && miss <= MISS_MAX
            && spread < SPREAD_MAX
            && leader_err < ERROR_MAX
            && delta_25 < ERROR_MAX
            && elapsed < RUNTIME_MAX_S,
        format!(
            "set1: worst |t_imp - 30| {:.2e} s, miss {miss:.2e} m, spread {spread:.2e} s, \
             max|e_l| on [5,25] {leader_err:.2e} s, ||delta(25)|| {delta_25:.2e} s, runtime {elapsed:.2} s",
            worst_impact_error(&m, sc.guidance.t_d)
        ),
    )
}

fn initial_tgo(sc: &Scenario) -> Vec<f64> {
    sc.ordered()
        .iter()
        .map(|s| {
            let st = s.initial_state();
            tgo_estimate(st.r, s.speed, st.heading_error(), sc.guidance.nav_n).unwrap()
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let f1 = initial_tgo(&preset("set1").unwrap())[1];
    let cmp = initial_tgo(&preset("comparison").unwrap());
    let expected = [25.68, 25.30, 25.68, 26.22, 26.54];
    let cmp_err = cmp.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    outcome(
        (f1 - 27.74).abs() <= TGO_TOL && cmp_err <= TGO_TOL,
        format!("set1 F1 t_go(0) = {f1:.4} s; comparison t_go(0) = {cmp:.4?} (worst error {cmp_err:.4} s)"),
    )
}

fn criterion_3() -> Outcome {
    let l = preset("set1").unwrap().interaction_matrix().unwrap().lambda_min;
    outcome((l - 0.186).abs() <= LAMBDA_TOL, format!("lambda_min(H) = {l:.7}"))
}

fn criterion_4() -> Outcome {
    let (s2, _, m2) = simulate("set2");
    let (s3, log3, m3) = simulate("set3");
    let delta_10 = at(&log3, 10.0).delta_norm;
    let consensus = m3.consensus_time.unwrap_or(f64::INFINITY);
    outcome(
        on_time(&m2, s2.guidance.t_d) && on_time(&m3, s3.guidance.t_d) && delta_10 < ERROR_MAX && consensus <= 10.0,
        format!(
            "set2 worst |t_imp - 65| {:.2e} s; set3 worst |t_imp - 12| {:.2e} s, \
             consensus from {consensus:.2} s, ||delta(10)|| {delta_10:.2e} s",
            worst_impact_error(&m2, s2.guidance.t_d),
            worst_impact_error(&m3, s3.guidance.t_d)
        ),
    )
}

fn criterion_5() -> Outcome {
    let (_, _, base) = simulate("set1");
    let (_, log, fast) = simulate("set1-tf10");
    let delta_10 = at(&log, 10.0).delta_norm;
    let (sat_base, sat_fast) = (base.saturation_durations[2], fast.saturation_durations[2]);
    outcome(
        delta_10 < ERROR_MAX && sat_fast > sat_base,
        format!("||delta(10)|| {delta_10:.2e} s; F2 saturated {sat_fast:.3} s with t_f = 10 vs {sat_base:.3} s with t_f = 25"),
    )
}

fn criterion_6() -> Outcome {
    let (sc, log, m) = simulate("set1-lag");
    let leader_rate = log
        .samples
        .iter()
        .filter(|s| (5.0..=24.0).contains(&s.t))
        .map(|s| (s.interceptors[0].tgo_dot + 1.0).abs())
        .fold(0.0, f64::max);
    let nu_25 = at(&log, 25.0).interceptors[1..]
        .iter()
        .map(|i| (i.tgo_dot + 1.0).abs())
        .fold(0.0, f64::max);
    outcome(
        on_time(&m, sc.guidance.t_d) && leader_rate < RATE_TOL && nu_25 < RATE_TOL,
        format!(
            "set1-lag worst |t_imp - 30| {:.2e} s, max|dt_go,l/dt + 1| on [5,24] {leader_rate:.2e}, \
             max|nu_i(25)| {nu_25:.2e}",
            worst_impact_error(&m, sc.guidance.t_d)
        ),
    )
}

fn criterion_7() -> Outcome {
    let (sc, _, m) = simulate("eight-follower");
    let n = m.impact_times.len();
    outcome(
        n == 9 && on_time(&m, sc.guidance.t_d),
        format!(
            "{n} interceptors, worst |t_imp - 30| {:.2e} s, spread {:.2e} s (substituted 8-follower graph)",
            worst_impact_error(&m, sc.guidance.t_d),
            m.impact_spread.unwrap_or(f64::NAN)
        ),
    )
}

/// Largest per-step rise of `value` over steps inside `[from, to)` that
/// saw no clamped command, and the number of such steps.
fn worst_rise(log: &TrajectoryLog, from: f64, to: f64, value: impl Fn(&Sample) -> f64) -> (f64, usize) {
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for w in log.samples.windows(2) {
        if w[0].t >= from && w[1].t < to && !w[0].any_saturated() {
            worst = worst.max(value(&w[1]) - value(&w[0]));
            count += 1;
        }
    }
    (worst, count)
}

fn speed_error(log: &TrajectoryLog, sc: &Scenario) -> f64 {
    let specs = sc.ordered();
    let mut worst: f64 = 0.0;
    for s in &log.samples {
        for (i, is) in s.interceptors.iter().enumerate() {
            if is.r <= sc.sim.hit_radius {
                continue;
            }
            let p = specs[i].params(sc.autopilot);
            let st = EngagementState::new(is.r, is.theta, is.gamma);
            let d = kinematics_rhs(&st, &p, is.a_m).unwrap();
            let v = (d.r_dot * d.r_dot + (is.r * d.theta_dot).powi(2)).sqrt();
            worst = worst.max((v - p.speed).abs() / p.speed);
        }
    }
    worst
}

fn fd_error() -> f64 {
    let p = InterceptorParams {
        speed: 200.0,
        tau: 0.0,
        a_max: 300.0,
        role: Role::Leader,
        autopilot: Autopilot::Ideal,
    };
    let n = 3.0;
    let h = 1e-5;
    let fb = |s: &EngagementState| {
        let tgo = tgo_estimate(s.r, p.speed, s.heading_error(), n).unwrap();
        fb_terms(s, &p, tgo, n)
    };
    let step = |s: &EngagementState, a: f64, h: f64| {
        let f = |x: &EngagementState| kinematics_rhs(x, &p, a).unwrap();
        let k1 = f(s);
        let k2 = f(&s.axpy(h / 2.0, &k1));
        let k3 = f(&s.axpy(h / 2.0, &k2));
        let k4 = f(&s.axpy(h, &k3));
        let mut d = k1;
        d.r_dot = (k1.r_dot + 2.0 * k2.r_dot + 2.0 * k3.r_dot + k4.r_dot) / 6.0;
        d.theta_dot = (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot) / 6.0;
        d.gamma_dot = (k1.gamma_dot + 2.0 * k2.gamma_dot + 2.0 * k3.gamma_dot + k4.gamma_dot) / 6.0;
        s.axpy(h, &d)
    };
    let mut worst: f64 = 0.0;
    for (th, ga, a) in [(45.0, 90.0, 0.0), (0.0, 60.0, -80.0), (-45.0, -30.0, 250.0)] {
        let s = EngagementState::new(4200.0, f64::to_radians(th), f64::to_radians(ga));
        let (fp, bp) = fb(&step(&s, a, h));
        let (fm, bm) = fb(&step(&s, a, -h));
        let t = TgoTerms::evaluate_with_accel(&s, &p, a, n).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-12);
        worst = worst
            .max(rel(t.f_dot, (fp - fm) / (2.0 * h)))
            .max(rel(t.b_dot, (bp - bm) / (2.0 * h)));
    }
    worst
}

fn criterion_8() -> Outcome {
    let (sc, log, m) = simulate("set1");
    let g = &sc.guidance;
    let (v_rise, v_steps) = worst_rise(&log, g.t_f_leader, g.t_f, |s| s.lyap_v);
    let (lag_sc, lag_log, _) = simulate("set1-lag");
    let lg = &lag_sc.guidance;
    let (vz_rise, vz_steps) = worst_rise(&lag_log, lg.t_f_leader, lg.t_one.unwrap(), |s| s.lyap_vz.unwrap());
    let speed = speed_error(&log, &sc).max(speed_error(&lag_log, &lag_sc));
    let fd = fd_error();

    let mut fine = sc.clone();
    fine.sim.dt /= 2.0;
    fine.sim.log_every *= 2;
    let (_, fine_m) = run(&fine).unwrap();
    let halving = m
        .impact_times
        .iter()
        .zip(&fine_m.impact_times)
        .map(|(a, b)| (a.unwrap() - b.unwrap()).abs())
        .fold(0.0, f64::max);
    let (again, _) = run(&sc).unwrap();
    let deterministic = again == log;

    outcome(
        v_rise <= MONOTONE_SLACK
            && v_steps > 0
            && vz_rise <= MONOTONE_SLACK
            && vz_steps > 0
            && speed <= SPEED_REL_TOL
            && fd <= FD_REL_TOL
            && halving <= DT_HALVING_TOL
            && deterministic,
        format!(
            "max rise of V {v_rise:.1e} over {v_steps} steps, of V_z {vz_rise:.1e} over {vz_steps} steps; \
             speed rel. error {speed:.1e}; F'/B' FD rel. error {fd:.1e}; dt-halving shift {halving:.1e} s; \
             bit-identical repeat {deterministic}"
        ),
    )
}

/// The division by `B` is guarded for `theta_M -> 0` before consensus; on
/// the converged collision course `B ~ r theta_M` vanishes by design and the
/// guard takes over for the terminal metres. The margin is therefore checked
/// over the guidance window `[0, t_f]`, and the terminal hand-over is
/// reported alongside.
fn criterion_9() -> Outcome {
    let (sc, log, m) = simulate("set1-td27.52");
    let f1 = &sc.ordered()[1];
    let k = guidance_constant(sc.guidance.nav_n);
    let eps_b = sc.guidance.eps_b;
    // the guard fires when |B| = r |theta_M| / (V^2 K) < eps_b
    let margin = |s: &Sample| {
        let i = &s.interceptors[1];
        i.theta_m.abs() / (eps_b * f1.speed * f1.speed * k / i.r)
    };
    let window: Vec<&Sample> = log.samples.iter().filter(|s| s.t <= sc.guidance.t_f).collect();
    let min_theta = window
        .iter()
        .map(|s| s.interceptors[1].theta_m.abs())
        .fold(f64::INFINITY, f64::min);
    let min_margin = window.iter().map(|s| margin(s)).fold(f64::INFINITY, f64::min);
    let handover = log
        .samples
        .iter()
        .find(|s| s.interceptors[1].r > sc.sim.hit_radius && margin(s) <= 1.0)
        .map_or_else(
            || "never".to_string(),
            |s| format!("at t = {:.2} s, r = {:.0} m", s.t, s.interceptors[1].r),
        );
    outcome(
        on_time(&m, sc.guidance.t_d) && min_margin > 1.0,
        format!(
            "worst |t_imp - 27.52| {:.2e} s; F1 min|theta_M| on [0, t_f] {min_theta:.3e} rad = {min_margin:.1e} x guard \
             threshold; terminal guard hand-over {handover}",
            worst_impact_error(&m, sc.guidance.t_d)
        ),
    )
}

fn main() -> std::process::ExitCode {
    let criteria: [(u8, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = Vec::new();
    for (id, check) in criteria {
        let o = check();
        println!(
            "criterion {id}: {} - {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria PASS");
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
