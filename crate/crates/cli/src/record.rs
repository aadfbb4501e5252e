//! Machine-readable run results.
//!
//! JSON records serialize [`ResultRecord`] directly with stable keys.
//!
//! CSV records start with `#` comment lines carrying the metadata
//! (`run_id`, `created_unix_ms`, `command`, `config` as one-line JSON,
//! notes), then one table:
//!
//! * `name,path,value,se,n,status` for analytic, simulate and chsh runs;
//! * `delta,rho_closed,rho_quadrature,cov_mc,se` for sweeps, whose scalar
//!   results move into `# result` comment lines.
//!
//! Floats in CSV carry 17 significant digits; missing values are empty.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, RunConfig};
use crate::error::Result;

pub const SCALAR_COLUMNS: [&str; 6] = ["name", "path", "value", "se", "n", "status"];
pub const SWEEP_COLUMNS: [&str; 5] = ["delta", "rho_closed", "rho_quadrature", "cov_mc", "se"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analytic,
    Simulate,
    Chsh,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Analytic => "analytic",
            Command::Simulate => "simulate",
            Command::Chsh => "chsh",
            Command::Sweep => "sweep",
        }
    }
}

/// Which computation produced a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComputationPath {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl ComputationPath {
    pub fn as_str(self) -> &'static str {
        match self {
            ComputationPath::ClosedForm => "closed-form",
            ComputationPath::Quadrature => "quadrature",
            ComputationPath::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The quantity is undefined (zero variance); `value` is absent.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarResult {
    pub name: String,
    pub path: ComputationPath,
    pub value: Option<f64>,
    pub se: Option<f64>,
    pub n: Option<u64>,
    pub status: Status,
}

impl ScalarResult {
    pub fn value(name: &str, path: ComputationPath, value: f64) -> Self {
        Self {
            name: name.to_owned(),
            path,
            value: Some(value),
            se: None,
            n: None,
            status: Status::Ok,
        }
    }

    pub fn estimate(name: &str, value: f64, se: f64, n: u64) -> Self {
        Self {
            se: Some(se),
            n: Some(n),
            ..Self::value(name, ComputationPath::MonteCarlo, value)
        }
    }

    pub fn maybe(name: &str, path: ComputationPath, value: Option<f64>) -> Self {
        match value {
            Some(v) => Self::value(name, path, v),
            None => Self {
                name: name.to_owned(),
                path,
                value: None,
                se: None,
                n: None,
                status: Status::Degenerate,
            },
        }
    }

    pub fn flag(name: &str, path: ComputationPath, on: bool) -> Self {
        Self::value(name, path, if on { 1.0 } else { 0.0 })
    }
}

/// One sweep point. Column suffixes name the computation path:
/// `rho_closed` closed form, `rho_quadrature` quadrature, `cov_mc`/`se`
/// Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub rho_closed: f64,
    pub rho_quadrature: Option<f64>,
    pub cov_mc: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub run_id: String,
    pub created_unix_ms: u64,
    pub command: Command,
    pub config: RunConfig,
    pub results: Vec<ScalarResult>,
    pub rows: Vec<SweepRow>,
    pub notes: Vec<String>,
}

impl ResultRecord {
    pub fn new(command: Command, config: &RunConfig) -> Self {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .unwrap_or_default();
        Self {
            run_id: format!("{}-{:x}", command.as_str(), now.as_nanos()),
            created_unix_ms: now.as_millis() as u64,
            command,
            config: config.clone(),
            results: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, r: ScalarResult) {
        self.results.push(r);
    }

    pub fn get(&self, name: &str) -> Option<&ScalarResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn value_of(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(|r| r.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records are always serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| crate::error::HarnessError::Csv(csv::Error::from(e));
        writeln!(out, "# run_id={}", self.run_id).map_err(io)?;
        writeln!(out, "# created_unix_ms={}", self.created_unix_ms).map_err(io)?;
        writeln!(out, "# command={}", self.command.as_str()).map_err(io)?;
        let config = serde_json::to_string(&self.config).expect("config is serializable");
        writeln!(out, "# config={config}").map_err(io)?;
        for note in &self.notes {
            writeln!(out, "# note={}", note.replace('\n', " ")).map_err(io)?;
        }

        if !self.rows.is_empty() {
            for r in &self.results {
                writeln!(
                    out,
                    "# result={},{},{},{}",
                    r.name,
                    r.path.as_str(),
                    fmt_opt(r.value),
                    status_str(r.status)
                )
                .map_err(io)?;
            }
        }

        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record(SCALAR_COLUMNS)?;
            for r in &self.results {
                w.write_record([
                    r.name.clone(),
                    r.path.as_str().to_owned(),
                    fmt_opt(r.value),
                    fmt_opt(r.se),
                    r.n.map(|n| n.to_string()).unwrap_or_default(),
                    status_str(r.status).to_owned(),
                ])?;
            }
        } else {
            w.write_record(SWEEP_COLUMNS)?;
            for row in &self.rows {
                w.write_record([
                    fmt(row.delta),
                    fmt(row.rho_closed),
                    fmt_opt(row.rho_quadrature),
                    fmt(row.cov_mc),
                    fmt(row.se),
                ])?;
            }
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json() + "\n",
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Degenerate => "degenerate",
    }
}

/// 17 significant digits.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// A CSV record split into its comment metadata and its table.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedCsv {
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn config(&self) -> Option<RunConfig> {
        serde_json::from_str(self.meta_value("config")?).ok()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn parse_csv(text: &str) -> std::result::Result<ParsedCsv, csv::Error> {
    let meta = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers()?.iter().map(str::to_owned).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_owned).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(ParsedCsv { meta, header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let v = 0.1f64 + 0.2;
        let s = fmt(v);
        assert_eq!(s.parse::<f64>().unwrap(), v);
        assert_eq!(s, "3.0000000000000004e-1");
    }

    #[test]
    fn scalar_csv_round_trip() {
        let mut rec = ResultRecord::new(Command::Analytic, &RunConfig::default());
        rec.push(ScalarResult::value(
            "var12",
            ComputationPath::Quadrature,
            9.0 / 512.0,
        ));
        rec.push(ScalarResult::maybe(
            "rho",
            ComputationPath::Quadrature,
            None,
        ));
        rec.notes.push("a note".into());
        let parsed = parse_csv(&rec.to_csv()).unwrap();
        assert_eq!(parsed.header, SCALAR_COLUMNS);
        assert_eq!(parsed.rows.len(), 2);
        assert_eq!(parsed.rows[1][5], "degenerate");
        assert_eq!(parsed.rows[1][2], "");
        assert_eq!(parsed.rows[0][2].parse::<f64>().unwrap(), 9.0 / 512.0);
        assert_eq!(parsed.config().unwrap(), RunConfig::default());
        assert_eq!(parsed.meta_value("command"), Some("analytic"));
        assert_eq!(parsed.meta_value("note"), Some("a note"));
    }

    #[test]
    fn sweep_csv_has_fixed_columns() {
        let mut rec = ResultRecord::new(Command::Sweep, &RunConfig::default());
        rec.rows.push(SweepRow {
            delta: 0.0,
            rho_closed: -0.0,
            rho_quadrature: Some(1e-17),
            cov_mc: 0.001,
            se: 0.0005,
        });
        rec.push(ScalarResult::value(
            "max",
            ComputationPath::Quadrature,
            1e-16,
        ));
        let parsed = parse_csv(&rec.to_csv()).unwrap();
        assert_eq!(parsed.header, SWEEP_COLUMNS);
        assert_eq!(parsed.rows.len(), 1);
        assert!(parsed
            .meta_value("result")
            .unwrap()
            .starts_with("max,quadrature,"));
    }

    #[test]
    fn json_round_trip() {
        let mut rec = ResultRecord::new(Command::Chsh, &RunConfig::default());
        rec.push(ScalarResult::estimate("cov", -0.5, 0.001, 1000));
        let back = ResultRecord::from_json(&rec.to_json()).unwrap();
        assert_eq!(back, rec);
    }
}
