//! CSV and JSON emission for trajectory rows.
//!
//! Floats are written with 17 significant digits in scientific notation so
//! every value round-trips and repeated runs are byte-identical.

use std::fmt::Write as _;

use noisy_grover::analysis::TrajectoryReport;
use serde::{Deserialize, Serialize};

use crate::discrepancy::DiscrepancyRecord;

pub const CSV_HEADER: &str = "chi,n,w,m,p_success,f_paper,f_closed,cos_gamma_sim,cos_gamma_closed,\
bloch_norm,entropy_nats,majorized_by_prev,majorized_by_init";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One trajectory step, in CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub chi: f64,
    pub n: usize,
    pub w: usize,
    pub m: usize,
    pub p_success: f64,
    pub f_paper: f64,
    pub f_closed: f64,
    pub cos_gamma_sim: Option<f64>,
    pub cos_gamma_closed: f64,
    pub bloch_norm: f64,
    pub entropy_nats: f64,
    pub majorized_by_prev: bool,
    pub majorized_by_init: bool,
}

pub fn rows(report: &TrajectoryReport) -> Vec<Row> {
    let inst = &report.instance;
    report
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| Row {
            chi: inst.chi().value(),
            n: inst.n(),
            w: inst.w(),
            m: p.m,
            p_success: p.p_success,
            f_paper: p.f_paper,
            f_closed: p.f_closed,
            cos_gamma_sim: p.cos_gamma,
            cos_gamma_closed: p.cos_gamma_closed,
            bloch_norm: p.bloch_norm,
            entropy_nats: report.entropies[k],
            majorized_by_prev: report.majorized_by_prev[k],
            majorized_by_init: report.majorized_by_init[k],
        })
        .collect()
}

pub fn float(x: f64) -> String {
    if x.is_finite() {
        // no signed zeros in the output
        let x = if x == 0.0 { 0.0 } else { x };
        format!("{x:.16e}")
    } else {
        "NaN".to_string()
    }
}

pub fn csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            float(r.chi),
            r.n,
            r.w,
            r.m,
            float(r.p_success),
            float(r.f_paper),
            float(r.f_closed),
            r.cos_gamma_sim.map_or_else(|| "NaN".to_string(), float),
            float(r.cos_gamma_closed),
            float(r.bloch_norm),
            float(r.entropy_nats),
            r.majorized_by_prev,
            r.majorized_by_init,
        );
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JsonDocument {
    pub rows: Vec<Row>,
    pub discrepancies: Vec<DiscrepancyRecord>,
}

pub fn json(rows: Vec<Row>, discrepancies: Vec<DiscrepancyRecord>) -> String {
    let mut text = serde_json::to_string_pretty(&JsonDocument { rows, discrepancies })
        .expect("rows serialize without maps or non-string keys");
    text.push('\n');
    text
}

/// Parses the `csv` output back; used by tests and downstream tooling.
pub fn parse_csv(text: &str) -> Result<Vec<Row>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing or unexpected header".into());
    }
    lines
        .filter(|l| !l.is_empty() && *l != CSV_HEADER)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 13 {
                return Err(format!("expected 13 fields, got {}", f.len()));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s}: {e}"));
            let int = |s: &str| s.parse::<usize>().map_err(|e| format!("{s}: {e}"));
            let flag = |s: &str| s.parse::<bool>().map_err(|e| format!("{s}: {e}"));
            let cos = num(f[7])?;
            Ok(Row {
                chi: num(f[0])?,
                n: int(f[1])?,
                w: int(f[2])?,
                m: int(f[3])?,
                p_success: num(f[4])?,
                f_paper: num(f[5])?,
                f_closed: num(f[6])?,
                cos_gamma_sim: (!cos.is_nan()).then_some(cos),
                cos_gamma_closed: num(f[8])?,
                bloch_norm: num(f[9])?,
                entropy_nats: num(f[10])?,
                majorized_by_prev: flag(f[11])?,
                majorized_by_init: flag(f[12])?,
            })
        })
        .collect()
}
