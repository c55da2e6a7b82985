//! CSV output with a fixed schema, plus the JSON metadata sidecar.
//!
//! UTF-8, LF line endings, no BOM. Rows are sorted by `(d, m_S, γ)`. Floats use
//! Rust's shortest round-trip decimal formatting, so a value parsed back from
//! the file is bit-identical to the one written.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::classifier::LossKind;
use crate::divergence::OracleCheckRow;
use crate::experiment::{BoundRecord, CellRecord, SweepResult, SweepSettings, REDRAW_POLICY, TEST_SET_POLICY};
use crate::rng::RNG_ALGORITHM;

pub const SWEEP_HEADER: [&str; 10] = [
    "d",
    "m_S",
    "gamma",
    "m_G",
    "runs",
    "mean_gen_error",
    "std_error",
    "mean_train_risk",
    "mean_test_risk",
    "redraw_count",
];

pub const BOUND_HEADER: [&str; 10] = [
    "d",
    "m_S",
    "gamma",
    "m_G",
    "divergence_term",
    "sqrt_term",
    "log_term",
    "total",
    "mode",
    "delta",
];

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn into_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

pub fn write_sweep_csv<W: Write>(w: W, records: &[CellRecord]) -> io::Result<()> {
    let mut rows: Vec<&CellRecord> = records.iter().collect();
    rows.sort_by_key(|r| (r.d, r.m_s, r.gamma));
    let mut out = writer(w);
    out.write_record(SWEEP_HEADER).map_err(into_io)?;
    for r in rows {
        out.write_record([
            r.d.to_string(),
            r.m_s.to_string(),
            r.gamma.to_f64().to_string(),
            r.m_g.to_string(),
            r.runs.to_string(),
            r.mean_gen_error.to_string(),
            r.std_error.to_string(),
            r.mean_train_risk.to_string(),
            r.mean_test_risk.to_string(),
            r.redraw_count.to_string(),
        ])
        .map_err(into_io)?;
    }
    out.flush()
}

pub fn write_bound_csv<W: Write>(w: W, records: &[BoundRecord]) -> io::Result<()> {
    let mut rows: Vec<&BoundRecord> = records.iter().collect();
    rows.sort_by_key(|r| (r.d, r.m_s, r.gamma));
    let mut out = writer(w);
    out.write_record(BOUND_HEADER).map_err(into_io)?;
    for r in rows {
        let b = &r.breakdown;
        out.write_record([
            r.d.to_string(),
            r.m_s.to_string(),
            r.gamma.to_f64().to_string(),
            r.m_g.to_string(),
            b.divergence_term.to_string(),
            b.sqrt_term.to_string(),
            b.log_term.to_string(),
            b.total.to_string(),
            r.mode.as_str().to_string(),
            r.delta.map(|d| d.to_string()).unwrap_or_default(),
        ])
        .map_err(into_io)?;
    }
    out.flush()
}

pub const KL_CHECK_HEADER: [&str; 11] = [
    "draw",
    "sigma",
    "var_ratio",
    "offset_pos",
    "offset_neg",
    "kl_closed",
    "kl_numeric",
    "kl_abs_error",
    "tv_numeric",
    "tv_pinsker",
    "pass",
];

pub fn write_kl_check_csv<W: Write>(w: W, rows: &[OracleCheckRow]) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(KL_CHECK_HEADER).map_err(into_io)?;
    for r in rows {
        out.write_record([
            r.draw.to_string(),
            r.sigma.to_string(),
            r.var_ratio.to_string(),
            r.offset_pos.to_string(),
            r.offset_neg.to_string(),
            r.kl_closed.to_string(),
            r.kl_numeric.to_string(),
            r.kl_abs_error().to_string(),
            r.tv_numeric.to_string(),
            r.tv_pinsker.to_string(),
            r.passes().to_string(),
        ])
        .map_err(into_io)?;
    }
    out.flush()
}

pub fn sweep_csv_string(records: &[CellRecord]) -> String {
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, records).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn bound_csv_string(records: &[BoundRecord]) -> String {
    let mut buf = Vec::new();
    write_bound_csv(&mut buf, records).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn emit_sweep_csv(path: &Path, result: &SweepResult) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_sweep_csv(&mut w, &result.records)?;
    w.flush()
}

pub fn emit_bound_csv(path: &Path, records: &[BoundRecord]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_bound_csv(&mut w, records)?;
    w.flush()
}

/// Provenance written next to a sweep CSV. Holds nothing that varies with the
/// worker count, so it is as reproducible as the CSV itself.
#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    pub test_set_policy: &'static str,
    pub redraw_policy: &'static str,
    pub master_seed: u64,
    pub runs: u64,
    pub sigma: f64,
    pub n_test: usize,
    pub loss: LossKind,
    pub cells: usize,
    pub total_redraws: u64,
}

impl SweepMetadata {
    pub fn new(settings: &SweepSettings, result: &SweepResult) -> Self {
        Self {
            tool: "gda-lab",
            version: env!("CARGO_PKG_VERSION"),
            rng: RNG_ALGORITHM,
            test_set_policy: TEST_SET_POLICY,
            redraw_policy: REDRAW_POLICY,
            master_seed: settings.master_seed,
            runs: settings.runs,
            sigma: settings.sigma,
            n_test: settings.n_test,
            loss: settings.loss,
            cells: result.records.len(),
            total_redraws: result.records.iter().map(|r| r.redraw_count).sum(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serialization is infallible")
    }
}
