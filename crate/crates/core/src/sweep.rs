//! Parameter sweeps: one verification per cell of a Cartesian grid.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::config::VerificationConfig;
use crate::domain::Verdict;
use crate::error::{Error, Result};
use crate::report::{format_float, VerificationReport};

/// A sweepable parameter. Declaration order is the axis order of a grid:
/// the first axis varies slowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SweepParam {
    KPub,
    KPvt,
    M,
    N,
    A,
    K,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::KPub,
        SweepParam::KPvt,
        SweepParam::M,
        SweepParam::N,
        SweepParam::A,
        SweepParam::K,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::KPub => "k_pub",
            SweepParam::KPvt => "k_pvt",
            SweepParam::M => "M",
            SweepParam::N => "N",
            SweepParam::A => "a",
            SweepParam::K => "K",
        }
    }

    fn is_integer(self) -> bool {
        self != SweepParam::A
    }

    /// Sets this parameter on `cfg`.
    pub fn apply(self, cfg: &mut VerificationConfig, value: f64) {
        let n = value as usize;
        match self {
            SweepParam::KPub => cfg.k_pub = n,
            SweepParam::KPvt => cfg.k_pvt = n,
            SweepParam::M => cfg.global_views = n,
            SweepParam::N => cfg.local_views = n,
            SweepParam::A => cfg.a = value,
            SweepParam::K => cfg.rounds = n,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("cannot sweep {s:?}; expected one of k_pub, k_pvt, M, N, a, K"))
    }
}

/// Parameter name to the values it takes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    axes: BTreeMap<SweepParam, Vec<f64>>,
}

impl Grid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn axis(mut self, param: SweepParam, values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let values: Vec<f64> = values.into_iter().collect();
        let bad = |message: String| Error::Parse {
            what: "grid",
            message,
        };
        if values.is_empty() {
            return Err(bad(format!("{param} has no values")));
        }
        for &v in &values {
            let ok = if param.is_integer() {
                v.is_finite() && v >= 0.0 && v.fract() == 0.0
            } else {
                v.is_finite()
            };
            if !ok {
                return Err(bad(format!("{param} = {v} is not a valid value")));
            }
        }
        self.axes.insert(param, values);
        Ok(self)
    }

    /// Parses `{ "k_pub": [16, 32], "a": [1, 10] }` from TOML (`k_pub = [16, 32]`)
    /// or JSON when the path ends in `.json`.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: std::result::Result<BTreeMap<String, Vec<f64>>, String> =
            if path.extension().is_some_and(|e| e == "json") {
                serde_json::from_str(&text).map_err(|e| e.to_string())
            } else {
                toml::from_str(&text).map_err(|e| e.to_string())
            };
        let raw = raw.map_err(|message| Error::Parse {
            what: "grid",
            message,
        })?;
        raw.into_iter().try_fold(Grid::new(), |grid, (name, values)| {
            let param = name.parse().map_err(|message| Error::Parse {
                what: "grid",
                message,
            })?;
            grid.axis(param, values)
        })
    }

    pub fn params(&self) -> Vec<SweepParam> {
        self.axes.keys().copied().collect()
    }

    /// Every cell, first axis slowest.
    pub fn cells(&self) -> Vec<Vec<(SweepParam, f64)>> {
        let mut cells: Vec<Vec<(SweepParam, f64)>> = vec![Vec::new()];
        for (&param, values) in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|cell| {
                    values.iter().map(move |&v| {
                        let mut next = cell.clone();
                        next.push((param, v));
                        next
                    })
                })
                .collect();
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub values: Vec<(SweepParam, f64)>,
    pub report: Option<VerificationReport>,
    pub error: Option<String>,
    pub wall_ms: u64,
}

impl SweepRow {
    pub fn p_value(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.p_value)
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.report.as_ref().map(|r| r.verdict)
    }
}

/// Runs `run` once per grid cell on a copy of `base` with the cell's values
/// applied. A failing cell records its error and the sweep continues.
pub fn sweep(
    base: &VerificationConfig,
    grid: &Grid,
    mut run: impl FnMut(&VerificationConfig) -> Result<VerificationReport>,
) -> Vec<SweepRow> {
    grid.cells()
        .into_iter()
        .map(|values| {
            let mut cfg = base.clone();
            for &(param, v) in &values {
                param.apply(&mut cfg, v);
            }
            let started = Instant::now();
            let outcome = run(&cfg);
            let wall_ms = started.elapsed().as_millis() as u64;
            let (report, error) = match outcome {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRow {
                values,
                report,
                error,
                wall_ms,
            }
        })
        .collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rows as CSV: one column per swept parameter, then
/// `p_value,t_statistic,verdict,wall_ms,error`.
pub fn rows_csv(params: &[SweepParam], rows: &[SweepRow]) -> String {
    let mut out = String::new();
    for p in params {
        let _ = write!(out, "{p},");
    }
    out.push_str("p_value,t_statistic,verdict,wall_ms,error\n");
    for row in rows {
        for (param, v) in &row.values {
            if param.is_integer() {
                let _ = write!(out, "{},", *v as u64);
            } else {
                let _ = write!(out, "{},", format_float(*v));
            }
        }
        match &row.report {
            Some(r) => {
                let _ = write!(
                    out,
                    "{},{},{},",
                    format_float(r.p_value),
                    format_float(r.t_statistic),
                    r.verdict
                );
            }
            None => out.push_str(",,,"),
        }
        let _ = writeln!(
            out,
            "{},{}",
            row.wall_ms,
            csv_field(row.error.as_deref().unwrap_or(""))
        );
    }
    out
}

pub fn write_csv(params: &[SweepParam], rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, rows_csv(params, rows)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigViolations;

    #[test]
    fn cartesian_order() {
        let grid = Grid::new()
            .axis(SweepParam::KPvt, [16.0, 32.0])
            .unwrap()
            .axis(SweepParam::KPub, [16.0, 32.0])
            .unwrap();
        let cells = grid.cells();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0], vec![(SweepParam::KPub, 16.0), (SweepParam::KPvt, 16.0)]);
        assert_eq!(cells[1], vec![(SweepParam::KPub, 16.0), (SweepParam::KPvt, 32.0)]);
        assert_eq!(cells[3], vec![(SweepParam::KPub, 32.0), (SweepParam::KPvt, 32.0)]);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(Grid::new().axis(SweepParam::M, [2.5]).is_err());
        assert!(Grid::new().axis(SweepParam::K, []).is_err());
        assert!(Grid::new().axis(SweepParam::A, [0.5]).is_ok());
        assert!("alpha".parse::<SweepParam>().is_err());
    }

    #[test]
    fn grid_file_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.toml");
        std::fs::write(&path, "M = [2, 4]\nN = [2, 6]\na = [1.0]\n").unwrap();
        let grid = Grid::from_file(&path).unwrap();
        assert_eq!(grid.params(), vec![SweepParam::M, SweepParam::N, SweepParam::A]);
        assert_eq!(grid.cells().len(), 4);
        std::fs::write(&path, "view_size = [8]\n").unwrap();
        assert!(Grid::from_file(&path).is_err());
    }

    #[test]
    fn failures_are_recorded_and_sweep_continues() {
        let grid = Grid::new().axis(SweepParam::M, [1.0, 2.0]).unwrap();
        let base = VerificationConfig::with_defaults(3, 4, 4, 8);
        let rows = sweep(&base, &grid, |cfg| {
            crate::config::validate_config(cfg, None)?;
            Err(Error::Config(ConfigViolations(Vec::new())))
        });
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.as_deref().unwrap().contains("M:"));
        assert!(rows[1].error.is_some());
        let csv = rows_csv(&grid.params(), &rows);
        assert!(csv.starts_with("M,p_value,t_statistic,verdict,wall_ms,error\n1,,,,"));
    }
}
