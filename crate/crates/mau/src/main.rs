use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mau::config::{load_file_or_preset, Loaded};
use mau::files::{parse_trace, write_plan, write_trace};
use mau::matrix::{cells, export_contacts, export_mobility, fairness_violations, run_matrix, MatrixOptions};
use mau::report::Preamble;
use mau::units::{parse_duration, parse_list, parse_seeds, parse_ttl};
use mau_core::journey::foremost_journey;
use mau_core::routing::Protocol;
use mau_core::{NodeId, SimTime};

/// Opportunistic network simulator with MAU benchmark scenarios.
///
/// A SCENARIO is a file path or the name of a bundled preset
/// (`mau-default`, `mau-mini`).
#[derive(Parser)]
#[command(name = "mau", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol x TTL x seed matrix and write reports.
    Run {
        scenario: String,
        /// Comma separated: epidemic, prophet, snw, bubble.
        #[arg(long)]
        protocols: Option<String>,
        /// Comma separated TTLs such as `1h, 6h, 3w` or `5hops`.
        #[arg(long)]
        ttls: Option<String>,
        /// Seeds such as `1..3, 7`.
        #[arg(long)]
        seeds: Option<String>,
        /// Cells run in parallel.
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long, default_value = "mau-out")]
        out: PathBuf,
        /// Check every Spray and Wait hand-off against the copy budget.
        #[arg(long)]
        audit: bool,
        #[arg(long, short)]
        quiet: bool,
    },
    /// Earliest arrival from SRC to DST over a contact trace. DEPART and TTL
    /// take units (`90s`, `2h`); a bare number is seconds.
    Oracle {
        trace: PathBuf,
        src: NodeId,
        dst: NodeId,
        depart: String,
        ttl: String,
    },
    /// Load a scenario, report warnings and its hash.
    Validate {
        scenario: String,
        /// Print the fully resolved scenario.
        #[arg(long)]
        print: bool,
    },
    /// Write the contact trace of one seed.
    ExportTrace {
        scenario: String,
        #[arg(long)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write node positions here.
        #[arg(long)]
        mobility: Option<PathBuf>,
        /// Position sampling interval.
        #[arg(long, default_value = "60s")]
        mobility_every: String,
        /// Also write the traffic plan here.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn load(spec: &str) -> Result<Loaded> {
    let loaded = load_file_or_preset(spec).with_context(|| format!("loading scenario `{spec}`"))?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded)
}

fn opt_arg<T>(s: Option<String>, what: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
    s.map(|s| f(&s).map_err(|e| anyhow::anyhow!("--{what}: {e}"))).transpose()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            scenario,
            protocols,
            ttls,
            seeds,
            jobs,
            out,
            audit,
            quiet,
        } => {
            let loaded = load(&scenario)?;
            let s = &loaded.scenario;
            let protocols = opt_arg(protocols, "protocols", |v| {
                parse_list(v, |p| Protocol::from_label(p).ok_or_else(|| format!("unknown protocol `{p}`")))
            })?
            .unwrap_or_else(|| s.protocols.clone());
            let ttls = opt_arg(ttls, "ttls", |v| parse_list(v, parse_ttl))?.unwrap_or_else(|| s.ttls.clone());
            let seeds = opt_arg(seeds, "seeds", parse_seeds)?.unwrap_or_else(|| s.seeds.clone());
            let cells = cells(&protocols, &ttls, &seeds);
            if cells.is_empty() {
                bail!("nothing to run");
            }
            let opts = MatrixOptions {
                jobs,
                out_dir: Some(&out),
                preamble: Preamble {
                    scenario: s.name.clone(),
                    scenario_sha256: loaded.hash.clone(),
                    cost_mode: s.cost_mode,
                    warnings: loaded.warnings.clone(),
                },
                audit_copies: audit,
                progress: !quiet,
            };
            fs::create_dir_all(&out)?;
            fs::write(out.join("scenario.conf"), &loaded.resolved)?;
            let results = run_matrix(s, &cells, &opts)?;
            let failed = results.iter().filter(|r| r.is_err()).count();
            let unfair = fairness_violations(&results);
            if !unfair.is_empty() {
                eprintln!("fairness check failed for seeds {unfair:?}");
            }
            if audit {
                let v: u64 = results
                    .iter()
                    .filter_map(|r| r.as_ref().ok())
                    .map(|o| o.audit.copy_violations + o.audit.buffer_overflows + o.audit.expired_transfers)
                    .sum();
                eprintln!("audit: {v} violations");
            }
            eprintln!("wrote {} ({} cells, {failed} failed)", out.display(), cells.len());
            Ok(if failed == 0 && unfair.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Oracle {
            trace,
            src,
            dst,
            depart,
            ttl,
        } => {
            if src == dst {
                bail!("source and destination must differ");
            }
            let text = fs::read_to_string(&trace).with_context(|| format!("reading {}", trace.display()))?;
            let t = parse_trace(&text).with_context(|| format!("parsing {}", trace.display()))?;
            for n in [src, dst] {
                if n as usize >= t.nodes {
                    bail!("node {n} is outside the trace's {} nodes", t.nodes);
                }
            }
            let depart = parse_duration(&depart).map_err(|e| anyhow::anyhow!("depart: {e}"))?;
            let ttl = parse_duration(&ttl).map_err(|e| anyhow::anyhow!("ttl: {e}"))?;
            match foremost_journey(&t.events, src, dst, SimTime::from_ms(depart), ttl) {
                Some(at) => println!("arrival {} ms (latency {} ms)", at.ms(), at.ms() - depart),
                None => println!("unreachable"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario, print } => {
            let loaded = load(&scenario)?;
            let s = &loaded.scenario;
            if print {
                print!("{}", loaded.resolved);
            } else {
                println!(
                    "{}: {} nodes in {} groups, {} cells, sha256 {}",
                    s.name,
                    s.node_count(),
                    s.groups.len(),
                    s.protocols.len() * s.ttls.len() * s.seeds.len(),
                    loaded.hash
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportTrace {
            scenario,
            seed,
            out,
            mobility,
            mobility_every,
            plan,
        } => {
            let loaded = load(&scenario)?;
            let s = &loaded.scenario;
            let events = export_contacts(s, seed)?;
            let text = write_trace(s.node_count(), &events);
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            if let Some(path) = plan {
                fs::write(&path, write_plan(&s.plan(seed)))?;
            }
            if let Some(path) = mobility {
                let every = parse_duration(&mobility_every).map_err(|e| anyhow::anyhow!("--mobility-every: {e}"))?;
                fs::write(&path, export_mobility(s, seed, every)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
