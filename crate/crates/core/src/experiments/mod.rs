//! Batch probes over plumbed families and random points, emitting tables of
//! rows tagged with a hash of the configuration that produced them.

mod bb_probe;
mod density;
mod distortion;
mod net_check;

pub use bb_probe::{bb_probe, BbProbeOutcome};
pub use density::{density_probe, DensityOutcome, TargetResult};
pub use distortion::{distortion_probe, distortion_with, DistortionOutcome, DistortionStep};
pub use net_check::{cone_net_check, NetCheckOutcome};

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SiegelError};

pub const MAX_GENUS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub genus: usize,
    pub samples: usize,
    pub seed: u64,
    pub t_schedule: Vec<f64>,
    pub a_param: f64,
    pub search_radius: usize,
    pub tolerance: f64,
    pub hyperelliptic: bool,
    pub output_format: OutputFormat,
    /// Deepest exponent `n` of the `t = 10^-n` continuation used by the
    /// boundary classifier.
    pub bb_depth: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            genus: 3,
            samples: 100,
            seed: 0,
            t_schedule: default_schedule(),
            a_param: 0.5,
            search_radius: 2,
            tolerance: 0.1,
            hyperelliptic: false,
            output_format: OutputFormat::Csv,
            bb_depth: 64,
        }
    }
}

/// `10^-1.5, 10^-2, ..., 10^-4`.
pub fn default_schedule() -> Vec<f64> {
    (0..6).map(|k| 10f64.powf(-1.5 - 0.5 * k as f64)).collect()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SiegelError::Config(m));
        if self.genus < 2 || self.genus > MAX_GENUS {
            return bad(format!("genus must be in 2..={MAX_GENUS}, got {}", self.genus));
        }
        if self.samples == 0 {
            return bad("samples must be positive".into());
        }
        if self.t_schedule.len() < 2 {
            return bad("t schedule needs at least two values".into());
        }
        if self.t_schedule.iter().any(|&t| !(t > 0.0 && t < 0.1)) {
            return bad("t schedule values must lie in (0, 0.1)".into());
        }
        if self.t_schedule.windows(2).any(|w| !(w[1] < w[0])) {
            return bad("t schedule must be strictly decreasing".into());
        }
        if !(self.a_param > 0.0 && self.a_param.is_finite()) {
            return bad("a-param must be positive".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be positive".into());
        }
        if self.bb_depth == 0 || self.bb_depth > 300 {
            return bad("bb_depth must be in 1..=300".into());
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON of every field except the output
    /// format, so CSV and JSON runs of one configuration share a hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_format = OutputFormat::Csv;
        let canonical = serde_json::to_string(&c).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Independent stream for sample `id`.
    pub fn sample_rng(&self, id: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(id as u64);
        r
    }
}

/// One auxiliary cell: empty, a number or a short tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Twelve significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub genus: usize,
    pub sample_id: Option<usize>,
    pub t: Option<f64>,
    pub value: f64,
    pub aux1: Cell,
    pub aux2: Cell,
    pub config_hash: String,
}

pub const CSV_HEADER: [&str; 8] = ["experiment", "genus", "sample_id", "t", "value", "aux1", "aux2", "config_hash"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        Report {
            experiment: experiment.to_string(),
            config: config.clone(),
            config_hash: config.hash(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, genus: usize, sample_id: Option<usize>, t: Option<f64>, value: f64, aux1: Cell, aux2: Cell) {
        self.rows.push(Row {
            experiment: self.experiment.clone(),
            genus,
            sample_id,
            t,
            value,
            aux1,
            aux2,
            config_hash: self.config_hash.clone(),
        });
    }

    /// Rows whose `aux2` tag equals `tag`.
    pub fn tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| matches!(&r.aux2, Cell::Text(s) if s == tag))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| SiegelError::InvalidInput(format!("writing CSV: {e}"));
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.rows {
            out.write_record([
                r.experiment.clone(),
                r.genus.to_string(),
                r.sample_id.map(|s| s.to_string()).unwrap_or_default(),
                r.t.map(fmt_num).unwrap_or_default(),
                fmt_num(r.value),
                r.aux1.render(),
                r.aux2.render(),
                r.config_hash.clone(),
            ])
            .map_err(io)?;
        }
        out.flush().map_err(|e| SiegelError::InvalidInput(format!("writing CSV: {e}")))?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self) -> Result<String> {
        match self.config.output_format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => Ok(self.to_json() + "\n"),
        }
    }
}

/// Concatenates the rows of reports produced under one configuration.
pub fn merge_reports(reports: &[Report]) -> Result<Vec<Row>> {
    let Some(first) = reports.first() else {
        return Ok(Vec::new());
    };
    let mut rows = Vec::new();
    for r in reports {
        if r.config_hash != first.config_hash || r.rows.iter().any(|row| row.config_hash != first.config_hash) {
            return Err(SiegelError::Config(format!(
                "refusing to merge rows from configurations {} and {}",
                first.config_hash, r.config_hash
            )));
        }
        rows.extend(r.rows.iter().cloned());
    }
    Ok(rows)
}

/// `log y` against `log x`, dropping pairs with a nonpositive `y`.
pub(crate) fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        xs.iter().zip(ys).filter(|(_, &y)| y > 0.0).map(|(x, y)| (x.ln(), y.ln())).unzip();
    if lx.len() < 2 {
        return f64::NAN;
    }
    crate::linalg::fit_slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_schedules() {
        let mut c = ExperimentConfig { t_schedule: vec![0.01, 0.02], ..Default::default() };
        assert!(matches!(c.validate(), Err(SiegelError::Config(_))));
        c.t_schedule = vec![0.5, 0.01];
        assert!(c.validate().is_err());
        c = ExperimentConfig { genus: 7, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_ignores_output_format_only() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { output_format: OutputFormat::Json, ..a.clone() };
        let c = ExperimentConfig { seed: 1, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn config_json_defaults_and_unknown_fields() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"genus":4}"#).unwrap();
        assert_eq!(c.genus, 4);
        assert_eq!(c.samples, 100);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"gneus":4}"#).is_err());
    }

    #[test]
    fn csv_layout() {
        let cfg = ExperimentConfig::default();
        let mut r = Report::new("demo", &cfg);
        r.push(2, Some(0), Some(0.001), 1.5, Cell::Empty, "distance".into());
        r.push(2, None, None, 0.25, 3.0.into(), "summary".into());
        let s = r.to_csv().unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "experiment,genus,sample_id,t,value,aux1,aux2,config_hash");
        assert_eq!(lines[1], format!("demo,2,0,1.00000000000e-3,1.50000000000e0,,distance,{}", cfg.hash()));
        assert_eq!(lines[2], format!("demo,2,,,2.50000000000e-1,3.00000000000e0,summary,{}", cfg.hash()));
    }

    #[test]
    fn merge_rejects_mixed_configs() {
        let a = Report::new("x", &ExperimentConfig::default());
        let b = Report::new("x", &ExperimentConfig { seed: 9, ..Default::default() });
        assert!(merge_reports(&[a.clone(), a.clone()]).is_ok());
        assert!(matches!(merge_reports(&[a, b]), Err(SiegelError::Config(_))));
    }

    #[test]
    fn sample_streams_differ() {
        use rand::Rng;
        let c = ExperimentConfig::default();
        let x: u64 = c.sample_rng(0).random();
        let y: u64 = c.sample_rng(1).random();
        assert_ne!(x, y);
        assert_eq!(x, c.sample_rng(0).random::<u64>());
    }
}
