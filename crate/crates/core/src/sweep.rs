//! Parameter sweeps of the CHSH statistic over the squeeze parameter, crossing
//! detection, and CSV / JSON persistence.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rindler::{acceleration_from_squeeze, SqueezeParameter, TruncationSpec};
use crate::wigner::{chsh, BobObservables, ExperimentConfig};

pub const CSV_HEADER: &str = "r,a_over_kc,S";

/// Grids longer than this are rejected as malformed specs.
const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    #[default]
    Compat,
    Faithful,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub r_start: f64,
    pub r_stop: f64,
    pub r_step: f64,
    pub theta: f64,
    pub trunc: TruncationSpec,
    pub mode: SweepMode,
    pub bob_observables: Option<BobObservables>,
    pub output_format: OutputFormat,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            r_start: 0.0,
            r_stop: 2.0,
            r_step: 0.01,
            theta: std::f64::consts::FRAC_PI_4,
            trunc: TruncationSpec::Fixed(3),
            mode: SweepMode::Compat,
            bob_observables: None,
            output_format: OutputFormat::Csv,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.r_start, self.r_stop, self.r_step, self.theta]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return invalid("sweep bounds, step and theta must be finite");
        }
        if self.r_start < 0.0 {
            return invalid(format!("r_start must be >= 0, got {}", self.r_start));
        }
        if self.r_step <= 0.0 {
            return invalid(format!("r_step must be > 0, got {}", self.r_step));
        }
        if self.r_start >= self.r_stop {
            return invalid(format!(
                "need r_start < r_stop, got [{}, {})",
                self.r_start, self.r_stop
            ));
        }
        if self.mode == SweepMode::Compat && self.bob_observables.is_some() {
            return invalid("Bob observable choice only applies to faithful mode");
        }
        self.trunc.validate()?;
        let len = ((self.r_stop - self.r_start) / self.r_step).ceil();
        if len > MAX_GRID_POINTS as f64 {
            return invalid(format!("grid of {len} points is too long"));
        }
        Ok(())
    }

    /// Half-open grid `r_start + i * r_step` for `i < ceil((stop - start) / step)`,
    /// the same points `numpy.arange` yields.
    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let len = ((self.r_stop - self.r_start) / self.r_step).ceil() as usize;
        Ok((0..len)
            .map(|i| self.r_start + i as f64 * self.r_step)
            .collect())
    }

    pub fn config_at(&self, r: f64) -> Result<ExperimentConfig> {
        let r = SqueezeParameter::new(r)?;
        let cfg = match self.mode {
            SweepMode::Compat => ExperimentConfig::compat(self.trunc, r),
            SweepMode::Faithful => {
                ExperimentConfig::faithful(self.trunc, r, self.bob_observables.unwrap_or_default())
            }
        };
        Ok(cfg.with_theta(self.theta))
    }

    fn row_at(&self, r: f64) -> Result<SweepRow> {
        let result = chsh(&self.config_at(r)?)?;
        let a = acceleration_from_squeeze(SqueezeParameter::new(r)?);
        Ok(SweepRow {
            r,
            a_over_kc: a.value(),
            s: result.s,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: f64,
    pub a_over_kc: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub level: f64,
    pub r_cross: f64,
    pub a_cross: f64,
    /// Adjacent rows whose `S` values straddle `level`.
    pub bracket: [SweepRow; 2],
}

/// Full JSON document: the spec, every row, and the crossing if one was requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub crossing: Option<CrossingReport>,
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.grid()?.par_iter().map(|&r| spec.row_at(r)).collect()
}

pub fn run_sweep_serial(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.grid()?.iter().map(|&r| spec.row_at(r)).collect()
}

/// `S` above the level on one side and at-or-below on the other.
fn straddles(a: &SweepRow, b: &SweepRow, level: f64) -> bool {
    (a.s > level) != (b.s > level)
}

/// First adjacent pair straddling `level`, refined by linear interpolation in
/// `(a_over_kc, S)` (and in `(r, S)` for `r_cross`).
pub fn find_crossing(rows: &[SweepRow], level: f64) -> Result<Option<CrossingReport>> {
    if rows.len() < 2 {
        return invalid(format!(
            "crossing search needs at least 2 rows, got {}",
            rows.len()
        ));
    }
    let Some(pair) = rows.windows(2).find(|w| straddles(&w[0], &w[1], level)) else {
        return Ok(None);
    };
    let (lo, hi) = (pair[0], pair[1]);
    let t = (level - lo.s) / (hi.s - lo.s);
    Ok(Some(CrossingReport {
        level,
        r_cross: lo.r + t * (hi.r - lo.r),
        a_cross: lo.a_over_kc + t * (hi.a_over_kc - lo.a_over_kc),
        bracket: [lo, hi],
    }))
}

pub fn count_crossings(rows: &[SweepRow], level: f64) -> usize {
    rows.windows(2)
        .filter(|w| straddles(&w[0], &w[1], level))
        .count()
}

/// `printf("%.9g")`: nine significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-4 <= |x| < 1e9`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format_sig9(row.r));
        out.push(',');
        out.push_str(&format_sig9(row.a_over_kc));
        out.push(',');
        out.push_str(&format_sig9(row.s));
        out.push('\n');
    }
    out
}

pub fn render_json(report: &SweepReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(io::Error::from)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_json(text: &str) -> Result<SweepReport> {
    serde_json::from_str(text).map_err(|e| Error::Io(e.into()))
}

/// Renders in `spec.output_format` and writes to `dest`, or stdout when `None`.
pub fn write_output(
    rows: &[SweepRow],
    crossing: Option<&CrossingReport>,
    spec: &SweepSpec,
    dest: Option<&Path>,
) -> Result<()> {
    if rows.is_empty() {
        return invalid("nothing to write: sweep produced no rows");
    }
    let body = match spec.output_format {
        OutputFormat::Csv => render_csv(rows),
        OutputFormat::Json => render_json(&SweepReport {
            spec: *spec,
            rows: rows.to_vec(),
            crossing: crossing.copied(),
        })?,
    };
    match dest {
        Some(path) => {
            let with_path =
                |e: io::Error| io::Error::new(e.kind(), format!("{}: {e}", path.display()));
            let mut f = File::create(path).map_err(with_path)?;
            f.write_all(body.as_bytes()).map_err(with_path)?;
            f.flush().map_err(with_path)?;
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
