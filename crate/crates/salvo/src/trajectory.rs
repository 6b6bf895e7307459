//! Trajectory files: a commented CSV (the default) and JSON.
//!
//! CSV layout:
//!
//! ```text
//! # salvo trajectory v1
//! # scenario: set1
//! # autopilot: ideal
//! # roles: leader,follower,...
//! t,L.x,L.y,L.r,...,delta_norm,lyap_v,lyap_vz
//! 0,...
//! # terminal,L,30.0000012,0.0123
//! # end
//! ```
//!
//! Each interceptor contributes the columns `x, y, r, theta, gamma,
//! theta_m, a_m, a_mc, tgo, tgo_dot, err, sat` (angles in radians,
//! `sat` is 0/1). `lyap_vz` is empty for the ideal autopilot; a terminal
//! line has empty fields for an interceptor that never arrived. Floats are
//! written in shortest round-trip form, so reading a file back reproduces
//! the log bit for bit. A file without the `# end` line is rejected as
//! truncated.

use std::fmt::Write as _;
use std::path::Path;

use salvo_core::simulator::{InterceptorSample, Sample, Terminal};
use salvo_core::{Autopilot, Role, TrajectoryLog};

use crate::error::{AppError, Result};

pub const CSV_MAGIC: &str = "# salvo trajectory v1";
const FIELDS: [&str; 12] = [
    "x", "y", "r", "theta", "gamma", "theta_m", "a_m", "a_mc", "tgo", "tgo_dot", "err", "sat",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn role_name(r: Role) -> &'static str {
    match r {
        Role::Leader => "leader",
        Role::Follower => "follower",
    }
}

pub fn autopilot_name(a: Autopilot) -> &'static str {
    match a {
        Autopilot::Ideal => "ideal",
        Autopilot::FirstOrder => "first-order",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn to_csv(log: &TrajectoryLog) -> String {
    let mut out = String::new();
    let roles: Vec<&str> = log.roles.iter().map(|r| role_name(*r)).collect();
    writeln!(out, "{CSV_MAGIC}").unwrap();
    writeln!(out, "# scenario: {}", log.scenario).unwrap();
    writeln!(out, "# autopilot: {}", autopilot_name(log.autopilot)).unwrap();
    writeln!(out, "# roles: {}", roles.join(",")).unwrap();

    let mut header = vec!["t".to_string()];
    for name in &log.names {
        header.extend(FIELDS.iter().map(|f| format!("{name}.{f}")));
    }
    header.extend(["delta_norm", "lyap_v", "lyap_vz"].map(String::from));
    writeln!(out, "{}", header.join(",")).unwrap();

    let mut row = Vec::with_capacity(header.len());
    for s in &log.samples {
        row.clear();
        row.push(s.t.to_string());
        for i in &s.interceptors {
            row.extend(
                [
                    i.x, i.y, i.r, i.theta, i.gamma, i.theta_m, i.a_m, i.a_mc, i.tgo, i.tgo_dot, i.error,
                ]
                .iter()
                .map(f64::to_string),
            );
            row.push(if i.saturated { "1" } else { "0" }.to_string());
        }
        row.push(s.delta_norm.to_string());
        row.push(s.lyap_v.to_string());
        row.push(opt(s.lyap_vz));
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    for (name, term) in log.names.iter().zip(&log.terminals) {
        writeln!(
            out,
            "# terminal,{name},{},{}",
            opt(term.impact_time),
            opt(term.miss_distance)
        )
        .unwrap();
    }
    writeln!(out, "# end").unwrap();
    out
}

struct CsvParser<'a> {
    origin: &'a str,
}

impl CsvParser<'_> {
    fn err(&self, line: usize, message: impl std::fmt::Display) -> AppError {
        AppError::Schema {
            origin: self.origin.to_string(),
            message: if line > 0 {
                format!("line {line}: {message}")
            } else {
                message.to_string()
            },
        }
    }

    fn float(&self, line: usize, column: &str, field: &str) -> Result<f64> {
        field
            .parse::<f64>()
            .map_err(|_| self.err(line, format!("column {column}: '{field}' is not a number")))
    }

    fn opt_float(&self, line: usize, column: &str, field: &str) -> Result<Option<f64>> {
        if field.is_empty() {
            Ok(None)
        } else {
            self.float(line, column, field).map(Some)
        }
    }

    fn meta<'l>(&self, lines: &[(usize, &'l str)], idx: usize, key: &str) -> Result<&'l str> {
        let (no, text) = lines
            .get(idx)
            .ok_or_else(|| self.err(0, format!("missing '# {key}:' header line")))?;
        text.strip_prefix(&format!("# {key}: "))
            .ok_or_else(|| self.err(*no, format!("expected '# {key}: ...'")))
    }

    fn parse(&self, text: &str) -> Result<TrajectoryLog> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        if lines.first().map(|l| l.1) != Some(CSV_MAGIC) {
            return Err(self.err(1, format!("expected '{CSV_MAGIC}'")));
        }
        let scenario = self.meta(&lines, 1, "scenario")?.to_string();
        let autopilot = match self.meta(&lines, 2, "autopilot")? {
            "ideal" => Autopilot::Ideal,
            "first-order" => Autopilot::FirstOrder,
            other => return Err(self.err(3, format!("unknown autopilot '{other}'"))),
        };
        let roles = self
            .meta(&lines, 3, "roles")?
            .split(',')
            .map(|r| match r {
                "leader" => Ok(Role::Leader),
                "follower" => Ok(Role::Follower),
                other => Err(self.err(4, format!("unknown role '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let n = roles.len();

        let (hline, header) = *lines.get(4).ok_or_else(|| self.err(0, "missing column header"))?;
        let columns: Vec<&str> = header.split(',').collect();
        let expected_len = 1 + n * FIELDS.len() + 3;
        if columns.len() != expected_len || columns[0] != "t" {
            return Err(self.err(
                hline,
                format!(
                    "expected {expected_len} columns starting with 't', found {}",
                    columns.len()
                ),
            ));
        }
        let mut names = Vec::with_capacity(n);
        for i in 0..n {
            let block = &columns[1 + i * FIELDS.len()..1 + (i + 1) * FIELDS.len()];
            let name = block[0]
                .strip_suffix(".x")
                .ok_or_else(|| self.err(hline, format!("column '{}' should end in '.x'", block[0])))?;
            for (col, field) in block.iter().zip(FIELDS) {
                if *col != format!("{name}.{field}") {
                    return Err(self.err(hline, format!("expected column '{name}.{field}', found '{col}'")));
                }
            }
            names.push(name.to_string());
        }
        if columns[expected_len - 3..] != ["delta_norm", "lyap_v", "lyap_vz"] {
            return Err(self.err(hline, "last columns must be delta_norm,lyap_v,lyap_vz"));
        }

        let mut samples = Vec::new();
        let mut terminals = vec![None; n];
        let mut ended = false;
        for &(no, line) in &lines[5..] {
            if ended {
                return Err(self.err(no, "content after '# end'"));
            }
            if line == "# end" {
                ended = true;
            } else if let Some(rest) = line.strip_prefix("# terminal,") {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(self.err(no, "terminal line needs name,impact,miss"));
                }
                let i = names
                    .iter()
                    .position(|nm| nm == parts[0])
                    .ok_or_else(|| self.err(no, format!("terminal for unknown interceptor '{}'", parts[0])))?;
                terminals[i] = Some(Terminal {
                    impact_time: self.opt_float(no, "impact", parts[1])?,
                    miss_distance: self.opt_float(no, "miss", parts[2])?,
                });
            } else if line.starts_with('#') {
                return Err(self.err(no, "unexpected comment line"));
            } else {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != expected_len {
                    return Err(self.err(no, format!("expected {expected_len} fields, found {}", fields.len())));
                }
                let f = |k: usize| self.float(no, columns[k], fields[k]);
                let mut interceptors = Vec::with_capacity(n);
                for i in 0..n {
                    let b = 1 + i * FIELDS.len();
                    interceptors.push(InterceptorSample {
                        x: f(b)?,
                        y: f(b + 1)?,
                        r: f(b + 2)?,
                        theta: f(b + 3)?,
                        gamma: f(b + 4)?,
                        theta_m: f(b + 5)?,
                        a_m: f(b + 6)?,
                        a_mc: f(b + 7)?,
                        tgo: f(b + 8)?,
                        tgo_dot: f(b + 9)?,
                        error: f(b + 10)?,
                        saturated: match fields[b + 11] {
                            "0" => false,
                            "1" => true,
                            other => {
                                return Err(self.err(no, format!("column {}: '{other}' is not 0 or 1", columns[b + 11])))
                            }
                        },
                    });
                }
                samples.push(Sample {
                    t: f(0)?,
                    interceptors,
                    delta_norm: f(expected_len - 3)?,
                    lyap_v: f(expected_len - 2)?,
                    lyap_vz: self.opt_float(no, "lyap_vz", fields[expected_len - 1])?,
                });
            }
        }
        if !ended {
            return Err(self.err(0, "missing '# end' line; the file is truncated"));
        }
        let terminals = terminals
            .into_iter()
            .zip(&names)
            .map(|(t, nm)| t.ok_or_else(|| self.err(0, format!("no terminal line for '{nm}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrajectoryLog {
            scenario,
            autopilot,
            names,
            roles,
            samples,
            terminals,
        })
    }
}

pub fn from_csv(text: &str, origin: &str) -> Result<TrajectoryLog> {
    CsvParser { origin }.parse(text)
}

pub fn to_json(log: &TrajectoryLog) -> String {
    serde_json::to_string(log).expect("trajectory logs always serialize")
}

pub fn from_json(text: &str, origin: &str) -> Result<TrajectoryLog> {
    let log: TrajectoryLog = serde_json::from_str(text).map_err(|e| AppError::Schema {
        origin: origin.to_string(),
        message: e.to_string(),
    })?;
    let n = log.names.len();
    let consistent =
        log.roles.len() == n && log.terminals.len() == n && log.samples.iter().all(|s| s.interceptors.len() == n);
    if !consistent {
        return Err(AppError::Schema {
            origin: origin.to_string(),
            message: format!("names, roles, terminals and samples disagree on the interceptor count ({n})"),
        });
    }
    Ok(log)
}

pub fn encode(log: &TrajectoryLog, format: Format) -> String {
    match format {
        Format::Csv => to_csv(log),
        Format::Json => to_json(log),
    }
}

/// Reads a trajectory, telling the formats apart by their first byte.
pub fn read(path: &Path) -> Result<TrajectoryLog> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let origin = path.display().to_string();
    if text.trim_start().starts_with('{') {
        from_json(&text, &origin)
    } else {
        from_csv(&text, &origin)
    }
}
