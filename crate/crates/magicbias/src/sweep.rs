//! Grid runs: one enumeration per job, then one reconstruction per
//! (set, eta, p) point. Rows go to a CSV file as they are produced, PTMs and
//! per-circuit tallies to a JSONL file next to it.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{Job, NamedSet, Plan};
use crate::enumerate::config_count;
use crate::error::{Error, Result};
use crate::gadget::{Counts, Gadget, NoisyFlags};
use crate::tomography::{analyse, Mode, Reconstruction};

pub const CSV_VERSION_LINE: &str = "# magicbias results schema 1";

pub const COLUMNS: [&str; 14] = [
    "set",
    "eta",
    "p",
    "flags",
    "accept_rate",
    "leak_rate",
    "r_proc",
    "r_avg",
    "p_XL",
    "p_YL",
    "p_ZL",
    "eta_ZL",
    "eta_XL",
    "runtime",
];

/// Single-core enumeration cost per configuration, measured on the full
/// gadget at order 3 and rounded up.
pub const SECONDS_PER_CONFIG: f64 = 4e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub set: String,
    pub eta: f64,
    pub p: f64,
    pub flags: String,
    pub accept_rate: f64,
    pub leak_rate: f64,
    pub r_proc: f64,
    pub r_avg: f64,
    #[serde(rename = "p_XL")]
    pub p_xl: f64,
    #[serde(rename = "p_YL")]
    pub p_yl: f64,
    #[serde(rename = "p_ZL")]
    pub p_zl: f64,
    #[serde(rename = "eta_ZL")]
    pub eta_zl: f64,
    #[serde(rename = "eta_XL")]
    pub eta_xl: f64,
    pub runtime: f64,
}

/// Identity of a grid point; floats compared bitwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointKey {
    pub set: String,
    pub flags: String,
    pub eta: u64,
    pub p: u64,
}

impl PointKey {
    pub fn new(set: &str, flags: &str, eta: f64, p: f64) -> Self {
        PointKey {
            set: set.to_string(),
            flags: flags.to_string(),
            eta: eta.to_bits(),
            p: p.to_bits(),
        }
    }
}

impl Row {
    pub fn key(&self) -> PointKey {
        PointKey::new(&self.set, &self.flags, self.eta, self.p)
    }

    fn from_reconstruction(
        set: &str,
        flags: NoisyFlags,
        eta: f64,
        p: f64,
        r: &Reconstruction,
        runtime: f64,
    ) -> Self {
        let m = &r.metrics;
        Row {
            set: set.to_string(),
            eta,
            p,
            flags: flags.key(),
            accept_rate: m.accept_rate,
            leak_rate: m.leak_rate,
            r_proc: m.r_proc,
            r_avg: m.r_avg,
            p_xl: m.p_xl,
            p_yl: m.p_yl,
            p_zl: m.p_zl,
            eta_zl: m.eta_zl,
            eta_xl: m.eta_xl,
            runtime,
        }
    }
}

/// Sidecar record. `eta` is written as text so that infinity survives JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointRecord {
    pub set: String,
    pub flags: String,
    pub eta: String,
    pub p: f64,
    pub order: usize,
    pub mode: Mode,
    pub reconstruction: Reconstruction,
    pub tallies: std::collections::BTreeMap<String, crate::gadget::CircuitTally>,
}

pub fn eta_text(eta: f64) -> String {
    if eta.is_infinite() {
        "inf".into()
    } else {
        format!("{eta}")
    }
}

/// Estimated single-core seconds for every job of a plan.
pub fn estimate_seconds(plan: &Plan) -> Result<(f64, f64)> {
    let mut configs = 0.0;
    for job in &plan.jobs {
        let n = Gadget::new(job.flags)?.n_sites();
        configs += config_count(n, plan.order);
    }
    Ok((configs, configs * SECONDS_PER_CONFIG))
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("ptm.jsonl")
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    pub force: bool,
    pub quiet: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepSummary {
    pub written: usize,
    pub skipped: usize,
    pub enumerations: usize,
}

fn read_done(csv: &Path) -> Result<HashSet<PointKey>> {
    let mut done = HashSet::new();
    if !csv.exists() || std::fs::metadata(csv)?.len() == 0 {
        return Ok(done);
    }
    let mut first = String::new();
    BufReader::new(File::open(csv)?).read_line(&mut first)?;
    if first.trim_end() != CSV_VERSION_LINE {
        return Err(Error::Config(format!(
            "{} exists but does not start with {CSV_VERSION_LINE:?}; refusing to append",
            csv.display()
        )));
    }
    for row in read_rows(csv)? {
        done.insert(row.key());
    }
    Ok(done)
}

fn read_sidecar_keys(path: &Path) -> Result<HashSet<PointKey>> {
    let mut done = HashSet::new();
    if !path.exists() {
        return Ok(done);
    }
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn last line from an interrupted run is written again
        let Ok(v) = serde_json::from_str::<serde_json::Value>(&line) else {
            continue;
        };
        let field = |k: &str| v.get(k).and_then(|x| x.as_str()).map(str::to_string);
        if let (Some(set), Some(flags), Some(eta), Some(p)) = (
            field("set"),
            field("flags"),
            field("eta"),
            v.get("p").and_then(|x| x.as_f64()),
        ) {
            let eta = if eta == "inf" {
                f64::INFINITY
            } else {
                eta.parse().unwrap_or(f64::NAN)
            };
            done.insert(PointKey::new(&set, &flags, eta, p));
        }
    }
    Ok(done)
}

/// Reads a results CSV written by `run_sweep`.
pub fn read_rows(csv: &Path) -> Result<Vec<Row>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(csv)
        .map_err(|e| Error::Io(format!("{}: {e}", csv.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::Config(e.to_string()))?
        .clone();
    for c in COLUMNS {
        if !headers.iter().any(|h| h == c) {
            return Err(Error::Config(format!(
                "{}: missing column {c}",
                csv.display()
            )));
        }
    }
    let mut rows = Vec::new();
    for r in rdr.deserialize() {
        rows.push(r.map_err(|e| Error::Config(format!("{}: {e}", csv.display())))?);
    }
    Ok(rows)
}

fn job_keys(job: &Job) -> Vec<(usize, f64, f64)> {
    let mut v = Vec::new();
    for si in 0..job.sets.len() {
        for &eta in &job.etas {
            for &p in &job.ps {
                v.push((si, eta, p));
            }
        }
    }
    v
}

/// Runs every job of `plan`, skipping points already present in the output.
pub fn run_sweep(plan: &Plan, opts: &SweepOptions) -> Result<SweepSummary> {
    let (configs, seconds) = estimate_seconds(plan)?;
    if !opts.quiet {
        eprintln!(
            "{} points in {} enumerations: {configs:.3e} configurations, about {seconds:.0} s single-core",
            plan.points(),
            plan.jobs.len()
        );
    }
    if seconds > plan.max_seconds && !opts.force {
        return Err(Error::TooExpensive { configs, seconds });
    }
    if let Some(dir) = plan.output.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut done = read_done(&plan.output)?;
    let side = sidecar_path(&plan.output);
    let mut side_done = read_sidecar_keys(&side)?;
    let fresh = !plan.output.exists() || std::fs::metadata(&plan.output)?.len() == 0;
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&plan.output)?;
    if fresh {
        writeln!(file, "{CSV_VERSION_LINE}")?;
    }
    let mut out = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    let mut sidecar = OpenOptions::new().create(true).append(true).open(&side)?;

    let mut summary = SweepSummary::default();
    for (ji, job) in plan.jobs.iter().enumerate() {
        let keys = job_keys(job);
        // points repeated across runs are computed once
        let todo: Vec<_> = keys
            .iter()
            .filter(|(si, eta, p)| {
                !done.contains(&PointKey::new(
                    &job.sets[*si].name,
                    &job.flags.key(),
                    *eta,
                    *p,
                ))
            })
            .copied()
            .collect();
        summary.skipped += keys.len() - todo.len();
        if todo.is_empty() {
            continue;
        }
        let started = Instant::now();
        let gadget = Gadget::new(job.flags)?;
        let sets: Vec<_> = job.sets.iter().map(|s| s.set.clone()).collect();
        let counts = gadget.enumerate(plan.order, &sets, plan.workers)?;
        let enum_secs = started.elapsed().as_secs_f64();
        summary.enumerations += 1;
        if !opts.quiet {
            let names: Vec<_> = job.sets.iter().map(|s| s.name.as_str()).collect();
            eprintln!(
                "[{}/{}] flags {} sets {} order {}: {} sites enumerated in {enum_secs:.1} s",
                ji + 1,
                plan.jobs.len(),
                job.flags,
                names.join(","),
                plan.order,
                gadget.n_sites()
            );
        }
        for &(si, eta, p) in &todo {
            let t0 = Instant::now();
            let (row, rec) = point(
                &gadget,
                &counts,
                &job.sets[si],
                si,
                eta,
                p,
                plan.order,
                plan.mode,
            )?;
            let runtime = if plan.record_runtime {
                enum_secs + t0.elapsed().as_secs_f64()
            } else {
                0.0
            };
            let row = Row { runtime, ..row };
            if side_done.insert(row.key()) {
                serde_json::to_writer(&mut sidecar, &rec).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(sidecar)?;
            }
            done.insert(row.key());
            out.serialize(&row).map_err(|e| Error::Io(e.to_string()))?;
            out.flush()?;
            summary.written += 1;
        }
        sidecar.flush()?;
    }
    Ok(summary)
}

#[allow(clippy::too_many_arguments)]
fn point(
    gadget: &Gadget,
    counts: &Counts,
    set: &NamedSet,
    set_index: usize,
    eta: f64,
    p: f64,
    order: usize,
    mode: Mode,
) -> Result<(Row, PointRecord)> {
    let tallies = gadget.tallies(counts, set_index, eta, p)?;
    let rec = analyse(&tallies, mode)?;
    let row = Row::from_reconstruction(&set.name, gadget.flags(), eta, p, &rec, 0.0);
    let record = PointRecord {
        set: set.name.clone(),
        flags: gadget.flags().key(),
        eta: eta_text(eta),
        p,
        order,
        mode,
        reconstruction: rec,
        tallies: tallies.by_circuit(),
    };
    Ok((row, record))
}

/// One grid point, enumerated from scratch.
pub fn single(
    flags: NoisyFlags,
    set: &NamedSet,
    eta: f64,
    p: f64,
    order: usize,
    mode: Mode,
    workers: usize,
) -> Result<(Row, PointRecord)> {
    let started = Instant::now();
    let gadget = Gadget::new(flags)?;
    let counts = gadget.enumerate(order, std::slice::from_ref(&set.set), workers)?;
    let (row, rec) = point(&gadget, &counts, set, 0, eta, p, order, mode)?;
    Ok((
        Row {
            runtime: started.elapsed().as_secs_f64(),
            ..row
        },
        rec,
    ))
}
