//! Batch scanning of graph6 streams.
//!
//! Each line is processed independently by a pure pipeline; batches run in
//! parallel and records are written back in input order, so the output does
//! not depend on the number of workers.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectivity::edge_connectivity;
use crate::criticality::{is_3_flow_critical, verify_structure_with, CriticalityCertificate, StructureReport};
use crate::density::{density_report, BoundCheck, DensityReport};
use crate::error::Error;
use crate::format::parse_graph6;
use crate::graph::MultiGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub n: usize,
    pub m: usize,
    /// Non-increasing.
    pub degrees: Vec<usize>,
    /// Colour-refinement hash; equal for isomorphic graphs.
    pub hash: String,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(words: &[u64]) -> u64 {
    let mut h = FNV_OFFSET;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// Weisfeiler–Leman colour refinement run for `n` rounds, hashed with FNV-1a.
pub fn refinement_hash(g: &MultiGraph) -> u64 {
    let n = g.n();
    let inc = g.incidence();
    let mut colour: Vec<u64> = (0..n).map(|v| fnv1a(&[g.degree(v) as u64])).collect();
    for _ in 0..n {
        let next: Vec<u64> = (0..n)
            .map(|v| {
                let mut around: Vec<u64> = inc[v]
                    .iter()
                    .map(|&ei| colour[g.edges()[ei].other(v)])
                    .collect();
                around.sort_unstable();
                around.insert(0, colour[v]);
                fnv1a(&around)
            })
            .collect();
        colour = next;
    }
    let mut all = colour;
    all.sort_unstable();
    all.insert(0, g.m() as u64);
    all.insert(0, n as u64);
    fnv1a(&all)
}

pub fn fingerprint(g: &MultiGraph) -> Fingerprint {
    Fingerprint {
        n: g.n(),
        m: g.m(),
        degrees: g.degree_sequence(),
        hash: format!("{:016x}", refinement_hash(g)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ScanStatus {
    Tested,
    /// Dropped by the connectivity filters.
    Filtered { reason: String },
    Skipped { reason: String },
    DecodeError { message: String },
    /// A proven bound failed or another internal check tripped.
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub line: usize,
    #[serde(flatten)]
    pub status: ScanStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<Fingerprint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridgeless: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_connectivity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CriticalityCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<u64>,
}

impl ScanRecord {
    fn new(line: usize, status: ScanStatus) -> Self {
        ScanRecord {
            line,
            status,
            fingerprint: None,
            bridgeless: None,
            edge_connectivity: None,
            critical: None,
            certificate: None,
            structure: None,
            density: None,
            micros: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ScanOptions {
    /// Also drop graphs that are not 3-edge-connected.
    pub three_edge_connected: bool,
    /// Record per-graph wall time. Makes output non-reproducible.
    pub timing: bool,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    JsonLines,
}

/// Runs the single-graph pipeline on one graph6 line.
pub fn scan_line(line: usize, text: &str, opts: &ScanOptions) -> ScanRecord {
    let start = opts.timing.then(Instant::now);
    let mut rec = match parse_graph6(text.trim()) {
        Ok(g) => scan_graph(line, &g, opts),
        Err(e) => ScanRecord::new(
            line,
            ScanStatus::DecodeError {
                message: e.to_string(),
            },
        ),
    };
    rec.micros = start.map(|s| s.elapsed().as_micros() as u64);
    rec
}

pub fn scan_graph(line: usize, g: &MultiGraph, opts: &ScanOptions) -> ScanRecord {
    let mut rec = ScanRecord::new(line, ScanStatus::Tested);
    rec.fingerprint = Some(fingerprint(g));
    if !g.is_connected() {
        rec.status = ScanStatus::Filtered {
            reason: "disconnected".into(),
        };
        return rec;
    }
    let bridgeless = !g.has_bridge();
    rec.bridgeless = Some(bridgeless);
    if !bridgeless {
        rec.status = ScanStatus::Filtered {
            reason: "bridge".into(),
        };
        return rec;
    }
    if let Err(e) = run_checks(g, opts, &mut rec) {
        rec.status = if e.is_cap() {
            ScanStatus::Skipped {
                reason: format!("cap: {e}"),
            }
        } else {
            ScanStatus::Error {
                message: e.to_string(),
            }
        };
    }
    rec
}

fn run_checks(g: &MultiGraph, opts: &ScanOptions, rec: &mut ScanRecord) -> Result<(), Error> {
    let lambda = if g.n() >= 2 { edge_connectivity(g)? } else { 0 };
    rec.edge_connectivity = Some(lambda);
    if opts.three_edge_connected && lambda < 3 {
        rec.status = ScanStatus::Filtered {
            reason: "not 3-edge-connected".into(),
        };
        return Ok(());
    }
    let cert = is_3_flow_critical(g)?;
    rec.critical = Some(cert.is_critical());
    if cert.is_critical() {
        rec.structure = Some(verify_structure_with(g, true)?);
        rec.density = Some(density_report(g, &cert)?);
    }
    rec.certificate = Some(cert);
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub lines: usize,
    pub decode_errors: usize,
    pub filtered: usize,
    pub skipped: usize,
    pub errors: usize,
    pub tested: usize,
    /// Critical graphs by vertex count.
    pub critical_by_n: BTreeMap<usize, usize>,
    /// Critical graphs failing any structure check.
    pub structure_failures: Vec<usize>,
    /// `(line, bound)` for every conjectured bound that failed.
    pub conjecture_flags: Vec<(usize, String)>,
}

impl ScanSummary {
    fn absorb(&mut self, r: &ScanRecord) {
        self.lines += 1;
        match &r.status {
            ScanStatus::Tested => self.tested += 1,
            ScanStatus::Filtered { .. } => self.filtered += 1,
            ScanStatus::Skipped { .. } => self.skipped += 1,
            ScanStatus::DecodeError { .. } => self.decode_errors += 1,
            ScanStatus::Error { .. } => self.errors += 1,
        }
        if r.critical == Some(true) {
            let n = r.fingerprint.as_ref().map_or(0, |f| f.n);
            *self.critical_by_n.entry(n).or_default() += 1;
            if r.structure.as_ref().is_some_and(|s| !s.all_hold) {
                self.structure_failures.push(r.line);
            }
            if let Some(d) = &r.density {
                self.conjecture_flags
                    .extend(d.flags.iter().map(|f| (r.line, f.clone())));
            }
        }
    }

    pub fn critical_total(&self) -> usize {
        self.critical_by_n.values().sum()
    }
}

pub const CSV_HEADER: &str = "line,status,n,m,degrees,hash,bridgeless,edge_connectivity,critical,structure_ok,n3,n8,lower,upper,cubic_heavy,3n-8,5n/2+n3,5n/2+9n8,flags";

fn bound_cell(c: &BoundCheck) -> &'static str {
    match (c.applicable, c.holds, c.tight) {
        (false, _, _) => "n/a",
        (true, false, _) => "fail",
        (true, true, true) => "tight",
        (true, true, false) => "ok",
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or(String::new(), |v| v.to_string())
}

pub fn csv_row(r: &ScanRecord, timing: bool) -> String {
    let status = match &r.status {
        ScanStatus::Tested => "tested".to_string(),
        ScanStatus::Filtered { reason } => format!("filtered: {reason}"),
        ScanStatus::Skipped { reason } => format!("skipped: {reason}"),
        ScanStatus::DecodeError { message } => format!("decode error: {message}"),
        ScanStatus::Error { message } => format!("error: {message}"),
    };
    let status = format!("\"{}\"", status.replace('"', "\"\""));
    let (n, m, degrees, hash) = match &r.fingerprint {
        Some(f) => (
            f.n.to_string(),
            f.m.to_string(),
            f.degrees
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            f.hash.clone(),
        ),
        None => Default::default(),
    };
    let mut cells = vec![
        r.line.to_string(),
        status,
        n,
        m,
        degrees,
        hash,
        opt(&r.bridgeless),
        opt(&r.edge_connectivity),
        opt(&r.critical),
        opt(&r.structure.as_ref().map(|s| s.all_hold)),
    ];
    match &r.density {
        Some(d) => {
            cells.push(d.n3.to_string());
            cells.push(d.n8.to_string());
            cells.extend(d.checks().iter().map(|(_, c)| bound_cell(c).to_string()));
            cells.push(d.flags.join(" "));
        }
        None => cells.extend(std::iter::repeat_n(String::new(), 9)),
    }
    if timing {
        cells.push(opt(&r.micros));
    }
    cells.join(",")
}

fn emit(out: &mut dyn Write, r: &ScanRecord, format: RecordFormat, timing: bool) -> io::Result<()> {
    match format {
        RecordFormat::Csv => writeln!(out, "{}", csv_row(r, timing)),
        RecordFormat::JsonLines => {
            writeln!(out, "{}", serde_json::to_string(r).map_err(io::Error::other)?)
        }
    }
}

const BATCH: usize = 64;

/// Scans graph6 lines from `input`, writing one record per non-blank line.
pub fn scan<R: BufRead>(
    input: R,
    out: &mut dyn Write,
    format: RecordFormat,
    opts: &ScanOptions,
) -> io::Result<ScanSummary> {
    let pool = match opts.jobs {
        Some(j) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(io::Error::other)?,
        ),
        None => None,
    };
    if format == RecordFormat::Csv {
        let timing = if opts.timing { ",micros" } else { "" };
        writeln!(out, "{CSV_HEADER}{timing}")?;
    }
    let mut summary = ScanSummary::default();
    let mut batch: Vec<(usize, String)> = Vec::with_capacity(BATCH);
    let mut lines = input.lines().enumerate();
    loop {
        batch.clear();
        for (i, line) in lines.by_ref() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            batch.push((i + 1, line));
            if batch.len() == BATCH {
                break;
            }
        }
        if batch.is_empty() {
            break;
        }
        let work = || -> Vec<ScanRecord> {
            batch
                .par_iter()
                .map(|(i, text)| scan_line(*i, text, opts))
                .collect()
        };
        let records = match &pool {
            Some(p) => p.install(work),
            None => work(),
        };
        for r in &records {
            summary.absorb(r);
            emit(out, r, format, opts.timing)?;
        }
    }
    Ok(summary)
}
