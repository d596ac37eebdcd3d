//! The protocol x TTL x seed run matrix.
//!
//! Cells run on a rayon pool. Finished cells go over a channel to a single
//! writer thread, which appends report rows in cell order no matter which
//! cell finishes first.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use mau_core::contact::ContactSource;
use mau_core::metrics::RunReport;
use mau_core::routing::{build_router, Protocol, Ttl};
use mau_core::scenario::{Scenario, ScenarioError};
use mau_core::sim::{Audit, Simulation};
use mau_core::ContactEvent;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::files::{write_plan, write_positions, write_trace};
use crate::report::{plot_script, report_row, summarize, summary_csv, PlotMetric, Preamble, REPORT_HEADER};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub protocol: Protocol,
    pub ttl: Ttl,
    pub seed: u64,
}

/// Protocol-major, then TTL, then seed.
pub fn cells(protocols: &[Protocol], ttls: &[Ttl], seeds: &[u64]) -> Vec<Cell> {
    let mut out = Vec::with_capacity(protocols.len() * ttls.len() * seeds.len());
    for &protocol in protocols {
        for &ttl in ttls {
            for &seed in seeds {
                out.push(Cell { protocol, ttl, seed });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellOutcome {
    pub cell: Cell,
    pub report: RunReport,
    pub audit: Audit,
    pub mobility_digest: u64,
    pub contact_sha256: String,
    pub plan_sha256: String,
}

fn sha256(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Runs one cell with contact logging, mobility digesting and (if asked)
/// copy-budget auditing.
pub fn run_cell(s: &Scenario, cell: Cell, audit_copies: bool) -> Result<CellOutcome, ScenarioError> {
    let mut contacts = s.contacts(cell.seed)?;
    contacts.world_mut().track_digest();
    let plan = s.plan(cell.seed);
    let plan_sha256 = sha256(&write_plan(&plan));
    let router = build_router(cell.protocol, &s.routing, s.node_count());
    let mut cfg = s.sim_config(cell.ttl, cell.seed);
    cfg.audit_copies = audit_copies;
    let mut sim = Simulation::new(contacts, router, plan, cfg);
    sim.enable_contact_log();
    let report = sim.run();
    let contact_sha256 = sha256(&write_trace(s.node_count(), sim.contact_log().unwrap_or(&[])));
    Ok(CellOutcome {
        cell,
        report,
        audit: sim.audit(),
        mobility_digest: sim.source().world().digest().unwrap_or(0),
        contact_sha256,
        plan_sha256,
    })
}

/// The contact trace of run seed `seed`, produced without any routing.
pub fn export_contacts(s: &Scenario, seed: u64) -> Result<Vec<ContactEvent>, ScenarioError> {
    let mut source = s.contacts(seed)?;
    let mut out = Vec::new();
    while let Some(e) = source.next_contact() {
        out.push(e);
    }
    Ok(out)
}

/// Node positions every `every_ms`, as `time_ms node x y` lines.
pub fn export_mobility(s: &Scenario, seed: u64, every_ms: u64) -> Result<String, ScenarioError> {
    let mut world = s.build_world(seed)?;
    let tick = s.mobility_tick_ms;
    let mut out = String::new();
    let mut next_sample = 0;
    loop {
        let now = world.now();
        if now.ms() >= next_sample {
            write_positions(&mut out, now, world.positions());
            next_sample = now.ms() + every_ms.max(1);
        }
        if now >= s.duration {
            break;
        }
        world.step(tick.min(s.duration.since(now)));
    }
    Ok(out)
}

pub type CellResult = Result<CellOutcome, String>;

pub struct MatrixOptions<'a> {
    pub jobs: usize,
    pub out_dir: Option<&'a Path>,
    pub preamble: Preamble,
    pub audit_copies: bool,
    pub progress: bool,
}

fn failed_line(cell: &Cell, err: &str) -> String {
    format!(
        "# failed {},{},{}: {err}",
        cell.protocol.label(),
        cell.ttl.csv_value(),
        cell.seed
    )
}

/// Runs every cell and, with an output directory, writes `report.csv`,
/// `summary.csv`, `fairness.csv` and one plot script per metric. A failing
/// cell is recorded and the rest still run.
pub fn run_matrix(s: &Scenario, cells: &[Cell], opts: &MatrixOptions<'_>) -> io::Result<Vec<CellResult>> {
    let report_file = match opts.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Some(dir.join("report.csv"))
        }
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(io::Error::other)?;
    let (tx, rx) = mpsc::channel::<(usize, Cell, CellResult)>();
    let total = cells.len();
    let started = Instant::now();
    let preamble = opts.preamble.clone();
    let progress = opts.progress;
    let cost_mode = preamble.cost_mode;

    let writer = std::thread::spawn(move || -> io::Result<Vec<CellResult>> {
        let mut file = match &report_file {
            Some(path) => {
                let mut f = BufWriter::new(File::create(path)?);
                f.write_all(preamble.render().as_bytes())?;
                writeln!(f, "{REPORT_HEADER}")?;
                Some(f)
            }
            None => None,
        };
        let mut pending = BTreeMap::new();
        let mut done: Vec<CellResult> = Vec::with_capacity(total);
        for (i, cell, result) in rx {
            if progress {
                let status = match &result {
                    Ok(o) => match o.report.delivery_probability() {
                        Some(d) => format!("delivery {d:.3}"),
                        None => "no messages".into(),
                    },
                    Err(e) => e.clone(),
                };
                eprintln!(
                    "[{}/{total}] {} ttl={} seed={}: {status} ({:.1?})",
                    pending.len() + done.len() + 1,
                    cell.protocol,
                    cell.ttl,
                    cell.seed,
                    started.elapsed()
                );
            }
            pending.insert(i, result);
            while let Some(r) = pending.remove(&done.len()) {
                if let Some(f) = file.as_mut() {
                    match &r {
                        Ok(o) => writeln!(f, "{}", report_row(&o.report, cost_mode))?,
                        Err(e) => writeln!(f, "{e}")?,
                    }
                }
                done.push(r);
            }
        }
        if let Some(mut f) = file {
            f.flush()?;
        }
        Ok(done)
    });

    pool.install(|| {
        cells.par_iter().enumerate().for_each_with(tx, |tx, (i, cell)| {
            let r = run_cell(s, *cell, opts.audit_copies).map_err(|e| failed_line(cell, &e.to_string()));
            let _ = tx.send((i, *cell, r));
        })
    });
    let results = writer.join().map_err(|_| io::Error::other("writer thread panicked"))??;

    if let Some(dir) = opts.out_dir {
        write_outputs(dir, &opts.preamble, &results)?;
    }
    Ok(results)
}

fn write_outputs(dir: &Path, preamble: &Preamble, results: &[CellResult]) -> io::Result<()> {
    let reports: Vec<RunReport> = results.iter().filter_map(|r| r.as_ref().ok()).map(|o| o.report.clone()).collect();
    let summary = summarize(&reports, preamble.cost_mode);
    fs::write(dir.join("summary.csv"), summary_csv(preamble, &summary))?;
    for m in PlotMetric::ALL {
        fs::write(plot_path(dir, m), plot_script(m, &summary))?;
    }
    fs::write(dir.join("fairness.csv"), fairness_csv(results))?;
    Ok(())
}

pub fn plot_path(dir: &Path, m: PlotMetric) -> PathBuf {
    dir.join(format!("{}.gp", m.file_stem()))
}

pub fn fairness_csv(results: &[CellResult]) -> String {
    let mut out = String::from("protocol,ttl_s,seed,mobility_digest,contact_trace_sha256,plan_sha256\n");
    for o in results.iter().filter_map(|r| r.as_ref().ok()) {
        out.push_str(&format!(
            "{},{},{},{:016x},{},{}\n",
            o.cell.protocol.label(),
            o.cell.ttl.csv_value(),
            o.cell.seed,
            o.mobility_digest,
            o.contact_sha256,
            o.plan_sha256
        ));
    }
    out
}

/// Seeds whose cells disagree on mobility, contact or plan hashes.
pub fn fairness_violations(results: &[CellResult]) -> Vec<u64> {
    let mut first: BTreeMap<u64, (u64, &str, &str)> = BTreeMap::new();
    let mut bad = Vec::new();
    for o in results.iter().filter_map(|r| r.as_ref().ok()) {
        let key = (o.mobility_digest, o.contact_sha256.as_str(), o.plan_sha256.as_str());
        let seen = first.entry(o.cell.seed).or_insert(key);
        if *seen != key && !bad.contains(&o.cell.seed) {
            bad.push(o.cell.seed);
        }
    }
    bad
}
