//! Parameter sweeps: the Cartesian product of override axes, run in
//! parallel, one directory per point plus an aggregated `sweep.csv`.

use crate::config::{ConfigError, RunConfig};
use crate::runner::{self, RunStatus};
use crate::CliError;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

/// One swept dimension. Every path in `paths` receives the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub paths: Vec<String>,
    pub values: Vec<String>,
}

impl Axis {
    /// Parses `a.b[+c.d]=v1,v2,...`. Commas inside brackets belong to the
    /// value, so `[1,2],[3,4]` is two values.
    pub fn parse(spec: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::BadOverride(spec.to_string());
        let (lhs, rhs) = spec.split_once('=').ok_or_else(bad)?;
        let paths: Vec<String> = lhs.split('+').map(|p| p.trim().to_string()).collect();
        if paths.iter().any(String::is_empty) {
            return Err(bad());
        }
        let mut values = Vec::new();
        let (mut depth, mut current) = (0i32, String::new());
        for c in rhs.chars() {
            match c {
                '[' | '{' => depth += 1,
                ']' | '}' => depth -= 1,
                ',' if depth == 0 => {
                    values.push(std::mem::take(&mut current).trim().to_string());
                    continue;
                }
                _ => {}
            }
            current.push(c);
        }
        values.push(current.trim().to_string());
        if values.iter().any(String::is_empty) || depth != 0 {
            return Err(bad());
        }
        Ok(Self { paths, values })
    }

    fn label(&self) -> String {
        self.paths.join("+")
    }
}

/// One point of the product: its index and the chosen value on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub values: Vec<String>,
    pub config: RunConfig,
}

pub fn expand(base: &RunConfig, axes: &[Axis]) -> Result<Vec<SweepPoint>, ConfigError> {
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut rem = index;
        let mut chosen = Vec::with_capacity(axes.len());
        let mut overrides = Vec::new();
        // last axis varies fastest
        let mut picks = vec![0; axes.len()];
        for (a, axis) in axes.iter().enumerate().rev() {
            picks[a] = rem % axis.values.len();
            rem /= axis.values.len();
        }
        for (axis, &p) in axes.iter().zip(&picks) {
            let v = &axis.values[p];
            chosen.push(v.clone());
            overrides.extend(axis.paths.iter().map(|path| format!("{path}={v}")));
        }
        let mut config = base.with_overrides(&overrides)?;
        config.name = format!("{}-{index:03}", base.name);
        config.validate()?;
        points.push(SweepPoint { index, values: chosen, config });
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub values: Vec<String>,
    pub status: Result<runner::Summary, String>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(axes: &[Axis], rows: &[SweepRow]) -> String {
    let mut out = String::from("run");
    for a in axes {
        let _ = write!(out, ",{}", csv_field(&a.label()));
    }
    out.push_str(",status,t,norm,peak_density,lobe_count,lobe_contrast,steady_state\n");
    for row in rows {
        let _ = write!(out, "{:03}", row.index);
        for v in &row.values {
            let _ = write!(out, ",{}", csv_field(v));
        }
        match &row.status {
            Ok(s) => {
                let f = &s.final_state;
                let status = match s.status {
                    RunStatus::Completed => "completed",
                    RunStatus::BlowUp => "blow-up",
                };
                let (count, contrast) = f.lobes.as_ref().map_or((String::new(), String::new()), |l| {
                    (l.count.to_string(), format!("{:.6}", l.contrast))
                });
                let _ = writeln!(
                    out,
                    ",{status},{},{:.9e},{:.9e},{count},{contrast},{}",
                    f.t, f.norm, f.peak_density, s.steady_state
                );
            }
            Err(msg) => {
                let _ = writeln!(out, ",{},,,,,,", csv_field(&format!("error: {msg}")));
            }
        }
    }
    out
}

/// Runs every point of the sweep on `workers` threads. Points that fail
/// numerically are reported in the table; the sweep then returns a
/// numerical error after `sweep.csv` is written.
pub fn run_sweep(base: &RunConfig, axes: &[Axis], out: &Path, workers: usize) -> Result<Vec<SweepRow>, CliError> {
    let points = expand(base, axes)?;
    std::fs::create_dir_all(out).map_err(CliError::io(format!("creating {}", out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    let results: Vec<Result<SweepRow, CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                let dir = out.join(format!("run_{:03}", p.index));
                let status = match runner::run(&p.config, &dir) {
                    Ok(o) => Ok(o.summary),
                    Err(e @ CliError::Numerical(_)) => Err(e.to_string()),
                    Err(e) => return Err(e),
                };
                Ok(SweepRow { index: p.index, values: p.values.clone(), status })
            })
            .collect()
    });
    let rows: Vec<SweepRow> = results.into_iter().collect::<Result<_, _>>()?;
    let csv = out.join("sweep.csv");
    std::fs::write(&csv, to_csv(axes, &rows)).map_err(CliError::io(format!("writing {}", csv.display())))?;
    let failed = rows.iter().filter(|r| r.status.is_err()).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} of {} sweep points failed; see {}", rows.len(), csv.display())));
    }
    Ok(rows)
}
