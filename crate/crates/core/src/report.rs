//! Verification reports: JSON serialization and per-round gap export.
//!
//! Floating-point values are written with 17 significant digits in
//! scientific notation (`1.2345678901234567e-3`), so a report read back
//! reproduces every value exactly and re-serializes to the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::VerificationConfig;
use crate::domain::{GapSample, Verdict};
use crate::error::{Error, Result};

/// Images embedded by each encoder during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QueryCounts {
    pub suspect: u64,
    pub shadow: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub p_value: f64,
    /// `"+inf"` / `"-inf"` in JSON when the paired differences have zero
    /// variance and a nonzero mean.
    #[serde(with = "sentinel_float")]
    pub t_statistic: f64,
    pub df: usize,
    /// All paired differences were exactly zero.
    pub zero_difference: bool,
    pub gaps_suspect: Vec<GapSample>,
    pub gaps_shadow: Vec<GapSample>,
    pub verdict: Verdict,
    pub config_echo: VerificationConfig,
    /// Phase name to milliseconds. Empty unless timing was requested.
    #[serde(default)]
    pub timings: BTreeMap<String, u64>,
    #[serde(default)]
    pub queries: QueryCounts,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
        self.serialize(&mut ser).expect("report serializes");
        out.push(b'\n');
        String::from_utf8(out).expect("serde_json emits UTF-8")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "report",
            message: e.to_string(),
        })
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Formats a float with 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "+inf".to_string()
    } else {
        "-inf".to_string()
    }
}

struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

mod sentinel_float {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "+inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "+inf" | "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(D::Error::custom(format!("unexpected float sentinel {other:?}"))),
            },
        }
    }
}

pub const GAPS_HEADER: &str = "round,encoder,unary_gap,binary_gap";

/// CSV of per-round gaps, round-major with the suspect row before the shadow
/// row of each round.
pub fn gaps_csv(report: &VerificationReport) -> String {
    let mut out = String::from(GAPS_HEADER);
    out.push('\n');
    for (sus, sdw) in report.gaps_suspect.iter().zip(&report.gaps_shadow) {
        for (name, g) in [("suspect", sus), ("shadow", sdw)] {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                g.round,
                name,
                format_float(g.unary_gap),
                format_float(g.binary_gap)
            );
        }
    }
    out
}

/// Writes [`gaps_csv`] to `path`.
pub fn export_gaps(report: &VerificationReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, gaps_csv(report)).map_err(|e| Error::io(path, e))
}
