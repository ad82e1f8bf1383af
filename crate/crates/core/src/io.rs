//! CSV/JSON readers and writers for profiles, reference traces, trajectory
//! logs, and run summaries.
//!
//! Schemas (header is exact, field order fixed):
//!
//! - slope profile: `distance_m,grade_deg` (grades in degrees on disk,
//!   radians in memory; uniform spacing required)
//! - reference trace: `distance_m,speed_kmh`
//! - trajectory log:
//!   `step,distance_m,speed_mps,engine_torque_nm,brake_torque_nm,coast_signal,fuel_g,time_s`;
//!   the last row carries the terminal state (speed after the final step,
//!   zero controls/increments)
//! - run summary: JSON object, see [`RunSummary`]

use std::fs;
use std::path::Path;

use crate::error::IoError;
use crate::profile::{ReferenceTrace, SlopeProfile};
use crate::trajectory::{LogStep, RunSummary, TrajectoryLog};

const PROFILE_HEADER: &str = "distance_m,grade_deg";
const REFERENCE_HEADER: &str = "distance_m,speed_kmh";
const LOG_HEADER: &str =
    "step,distance_m,speed_mps,engine_torque_nm,brake_torque_nm,coast_signal,fuel_g,time_s";

/// Spacing non-uniformity tolerance [m].
const SPACING_TOL: f64 = 1e-6;

fn read_to_string(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_string(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    name: &str,
    raw: &str,
) -> Result<T, IoError> {
    raw.trim().parse().map_err(|_| IoError::Parse {
        path: path.display().to_string(),
        line,
        what: format!("invalid {name}: {raw:?}"),
    })
}

/// Split a CSV line into exactly `n` fields.
fn split_row<'a>(path: &Path, line: usize, row: &'a str, n: usize) -> Result<Vec<&'a str>, IoError> {
    let fields: Vec<&str> = row.split(',').collect();
    if fields.len() != n {
        return Err(IoError::Parse {
            path: path.display().to_string(),
            line,
            what: format!("expected {n} columns, found {}", fields.len()),
        });
    }
    Ok(fields)
}

fn check_header(path: &Path, got: Option<&str>, want: &str) -> Result<(), IoError> {
    match got {
        Some(h) if h.trim() == want => Ok(()),
        Some(h) => Err(IoError::Parse {
            path: path.display().to_string(),
            line: 1,
            what: format!("expected header {want:?}, found {:?}", h.trim()),
        }),
        None => Err(IoError::Parse {
            path: path.display().to_string(),
            line: 1,
            what: "empty file".to_string(),
        }),
    }
}

/// Infer the uniform spacing of a distance column, erroring on non-uniform
/// spacing.
fn uniform_spacing(path: &Path, distances: &[f64]) -> Result<f64, IoError> {
    if distances.len() < 2 {
        return Err(IoError::Validation {
            what: format!(
                "{}: need at least 2 rows to infer the step length",
                path.display()
            ),
        });
    }
    let ds = distances[1] - distances[0];
    if !(ds > 0.0) {
        return Err(IoError::Validation {
            what: format!("{}: distances must be strictly increasing", path.display()),
        });
    }
    for (i, w) in distances.windows(2).enumerate() {
        if ((w[1] - w[0]) - ds).abs() > SPACING_TOL {
            return Err(IoError::Validation {
                what: format!(
                    "{}: non-uniform spacing at row {} ({} m, expected {} m)",
                    path.display(),
                    i + 2,
                    w[1] - w[0],
                    ds
                ),
            });
        }
    }
    Ok(ds)
}

/// Load a slope profile from CSV. Grades are converted degrees -> radians.
pub fn load_profile(path: impl AsRef<Path>) -> Result<SlopeProfile, IoError> {
    let path = path.as_ref();
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), PROFILE_HEADER)?;

    let mut distances = Vec::new();
    let mut grades = Vec::new();
    for (i, row) in lines.enumerate() {
        let line = i + 2;
        if row.trim().is_empty() {
            continue;
        }
        let fields = split_row(path, line, row, 2)?;
        distances.push(parse_field::<f64>(path, line, "distance_m", fields[0])?);
        let deg = parse_field::<f64>(path, line, "grade_deg", fields[1])?;
        if deg.abs() >= 90.0 {
            return Err(IoError::Validation {
                what: format!("{}:{}: |grade| must be < 90 deg (got {deg})", path.display(), line),
            });
        }
        grades.push(deg.to_radians());
    }
    if grades.is_empty() {
        return Err(IoError::Parse {
            path: path.display().to_string(),
            line: 2,
            what: "no data rows".to_string(),
        });
    }
    let ds = uniform_spacing(path, &distances)?;
    SlopeProfile::new(ds, grades)
}

/// Write a slope profile to CSV (radians -> degrees).
pub fn write_profile(profile: &SlopeProfile, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for (i, g) in profile.grades.iter().enumerate() {
        out.push_str(&format!(
            "{},{}\n",
            i as f64 * profile.step_length,
            g.to_degrees()
        ));
    }
    write_string(path.as_ref(), &out)
}

/// Load a reference trace from CSV. Speeds are converted km/h -> m/s.
pub fn load_reference(path: impl AsRef<Path>) -> Result<ReferenceTrace, IoError> {
    let path = path.as_ref();
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), REFERENCE_HEADER)?;

    let mut distances = Vec::new();
    let mut speeds = Vec::new();
    for (i, row) in lines.enumerate() {
        let line = i + 2;
        if row.trim().is_empty() {
            continue;
        }
        let fields = split_row(path, line, row, 2)?;
        distances.push(parse_field::<f64>(path, line, "distance_m", fields[0])?);
        let kmh = parse_field::<f64>(path, line, "speed_kmh", fields[1])?;
        speeds.push(kmh / 3.6);
    }
    if speeds.is_empty() {
        return Err(IoError::Parse {
            path: path.display().to_string(),
            line: 2,
            what: "no data rows".to_string(),
        });
    }
    let ds = uniform_spacing(path, &distances)?;
    ReferenceTrace::new(ds, speeds)
}

/// Write a reference trace to CSV (m/s -> km/h).
pub fn write_reference(trace: &ReferenceTrace, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut out = String::from(REFERENCE_HEADER);
    out.push('\n');
    for (i, v) in trace.speeds.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i as f64 * trace.step_length, v * 3.6));
    }
    write_string(path.as_ref(), &out)
}

/// Write a trajectory log to CSV. The terminal state is appended as a final
/// row with zero controls and increments so the round trip is lossless.
pub fn write_log(log: &TrajectoryLog, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut out = String::from(LOG_HEADER);
    out.push('\n');
    for s in &log.steps {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.step,
            s.distance_m,
            s.speed_mps,
            s.engine_torque_nm,
            s.brake_torque_nm,
            s.coast_signal,
            s.fuel_g,
            s.time_s
        ));
    }
    let (n, terminal_distance, last_signal) = match log.steps.last() {
        Some(last) => {
            let spacing = if log.steps.len() >= 2 {
                last.distance_m - log.steps[log.steps.len() - 2].distance_m
            } else {
                last.distance_m
            };
            (last.step + 1, last.distance_m + spacing, last.coast_signal)
        }
        None => (0, 0.0, 1),
    };
    out.push_str(&format!(
        "{n},{terminal_distance},{},0,0,{last_signal},0,0\n",
        log.final_speed
    ));
    write_string(path.as_ref(), &out)
}

/// Read back a trajectory log written by [`write_log`].
pub fn read_log(path: impl AsRef<Path>) -> Result<TrajectoryLog, IoError> {
    let path = path.as_ref();
    let contents = read_to_string(path)?;
    let mut lines = contents.lines();
    check_header(path, lines.next(), LOG_HEADER)?;

    let mut rows = Vec::new();
    for (i, row) in lines.enumerate() {
        let line = i + 2;
        if row.trim().is_empty() {
            continue;
        }
        let fields = split_row(path, line, row, 8)?;
        rows.push(LogStep {
            step: parse_field(path, line, "step", fields[0])?,
            distance_m: parse_field(path, line, "distance_m", fields[1])?,
            speed_mps: parse_field(path, line, "speed_mps", fields[2])?,
            engine_torque_nm: parse_field(path, line, "engine_torque_nm", fields[3])?,
            brake_torque_nm: parse_field(path, line, "brake_torque_nm", fields[4])?,
            coast_signal: parse_field(path, line, "coast_signal", fields[5])?,
            fuel_g: parse_field(path, line, "fuel_g", fields[6])?,
            time_s: parse_field(path, line, "time_s", fields[7])?,
        });
    }
    let terminal = rows.pop().ok_or_else(|| IoError::Parse {
        path: path.display().to_string(),
        line: 2,
        what: "missing terminal row".to_string(),
    })?;
    Ok(TrajectoryLog {
        steps: rows,
        final_speed: terminal.speed_mps,
    })
}

/// Write a run summary as a JSON object.
pub fn write_summary(summary: &RunSummary, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(summary).expect("summary serialization");
    write_string(path, &json)
}

/// Read back a run summary.
pub fn read_summary(path: impl AsRef<Path>) -> Result<RunSummary, IoError> {
    let path = path.as_ref();
    let contents = read_to_string(path)?;
    serde_json::from_str(&contents).map_err(|e| IoError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        what: e.to_string(),
    })
}
