//! Versioned JSON documents and the reconstruction CSV.
//!
//! Complex numbers serialize as `[re, im]` pairs. Every document carries a
//! `schema_version`; only version 1 exists.

use crate::error::{Error, Result};
use crate::inverse::ReconstructedField;
use crate::potential::Potential;
use crate::scattering::{ConservationReport, ScatteringData};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;
/// Solves above this condition estimate are flagged in the CSV.
pub const ILL_CONDITIONED: f64 = 1e8;

fn current_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialDocument {
    #[serde(default = "current_version")]
    pub schema_version: u32,
    #[serde(flatten)]
    pub potential: Potential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringDocument {
    pub schema_version: u32,
    #[serde(flatten)]
    pub data: ScatteringData,
    /// Conservation-law residuals at a few sample points, for the record.
    #[serde(default)]
    pub conservation: Vec<ConservationReport>,
}

impl ScatteringDocument {
    pub fn new(data: ScatteringData, conservation: Vec<ConservationReport>) -> Self {
        Self { schema_version: SCHEMA_VERSION, data, conservation }
    }
}

trait Versioned {
    fn version(&self) -> u32;
}

impl Versioned for PotentialDocument {
    fn version(&self) -> u32 {
        self.schema_version
    }
}

impl Versioned for ScatteringDocument {
    fn version(&self) -> u32 {
        self.schema_version
    }
}

fn parse<T: DeserializeOwned + Versioned>(text: &str) -> Result<T> {
    let doc: T = serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            Error::Schema(format!("{e}"))
        } else {
            Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
        }
    })?;
    if doc.version() != SCHEMA_VERSION {
        return Err(Error::Schema(format!("unsupported schema_version {}", doc.version())));
    }
    Ok(doc)
}

pub fn parse_potential(text: &str) -> Result<Potential> {
    let doc: PotentialDocument = parse(text)?;
    doc.potential.check().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(doc.potential)
}

pub fn parse_scattering(text: &str) -> Result<ScatteringDocument> {
    let doc: ScatteringDocument = parse(text)?;
    let n = doc.data.tau.len();
    if n < 2 {
        return Err(Error::GridTooSmall(format!("{n} tau node(s)")));
    }
    let d = &doc.data.direct;
    let r = &doc.data.dual;
    let lens = [
        d.r0_210.len(),
        d.r0_270.len(),
        d.r0_330.len(),
        d.s1_210.len(),
        d.s2_330.len(),
        r.r0_30.len(),
        r.r0_90.len(),
        r.r0_150.len(),
        r.s1_30.len(),
        r.s2_150.len(),
    ];
    if lens.iter().any(|&l| l != n) {
        return Err(Error::Schema(format!("coefficient arrays must have {n} entries")));
    }
    Ok(doc)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    Ok,
    IllConditioned,
    Failed,
}

impl RowFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RowFlag::Ok => "ok",
            RowFlag::IllConditioned => "ill_conditioned",
            RowFlag::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionRow {
    pub x: f64,
    pub m_route_a: f64,
    pub m_route_b: f64,
    pub discrepancy: f64,
    pub residual: f64,
    pub condition: f64,
    pub flag: RowFlag,
}

impl ReconstructionRow {
    pub fn failed(x: f64) -> Self {
        Self {
            x,
            m_route_a: f64::NAN,
            m_route_b: f64::NAN,
            discrepancy: f64::NAN,
            residual: f64::NAN,
            condition: f64::NAN,
            flag: RowFlag::Failed,
        }
    }
}

pub fn rows_from_field(f: &ReconstructedField) -> Vec<ReconstructionRow> {
    (0..f.x.len())
        .map(|i| {
            let condition = f.x_condition[i];
            ReconstructionRow {
                x: f.x[i],
                m_route_a: f.m_route_a[i],
                m_route_b: f.m_route_b[i],
                discrepancy: (f.m_route_a[i] - f.m_route_b[i]).abs(),
                residual: f.x_residual[i],
                condition,
                flag: if condition > ILL_CONDITIONED { RowFlag::IllConditioned } else { RowFlag::Ok },
            }
        })
        .collect()
}

pub const CSV_HEADER: &str = "x,m_estimate_routeA,m_estimate_routeB,discrepancy,residual,condition,flag";

/// 17 significant digits, so values survive a text round trip bit for bit.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(rows: &[ReconstructionRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(r.x),
            num(r.m_route_a),
            num(r.m_route_b),
            num(r.discrepancy),
            num(r.residual),
            num(r.condition),
            r.flag.as_str()
        );
    }
    out
}

pub fn read_csv(text: &str) -> Result<Vec<ReconstructionRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Schema("unexpected CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(Error::Schema(format!("expected 7 fields in {l:?}")));
            }
            let v = |i: usize| f[i].parse::<f64>().map_err(|e| Error::Schema(format!("{}: {e}", f[i])));
            let flag = match f[6] {
                "ok" => RowFlag::Ok,
                "ill_conditioned" => RowFlag::IllConditioned,
                "failed" => RowFlag::Failed,
                other => return Err(Error::Schema(format!("unknown flag {other}"))),
            };
            Ok(ReconstructionRow {
                x: v(0)?,
                m_route_a: v(1)?,
                m_route_b: v(2)?,
                discrepancy: v(3)?,
                residual: v(4)?,
                condition: v(5)?,
                flag,
            })
        })
        .collect()
}
