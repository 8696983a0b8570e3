//! Experiment configuration files (TOML).
//!
//! ```toml
//! schema_version = 1
//! order = 3
//! mode = "adaptive"
//! output = "results/bias.csv"
//!
//! [[run]]
//! flags = "SMIE"
//! sets = ["Z", "X", { name = "ZZ", generators = ["Z1Z2", "X1X2"] }]
//! p = [5e-3]
//! eta = { from = 1, to = 1000, points = 10, include = ["depol", "inf"] }
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gadget::NoisyFlags;
use crate::noise::{BiasSet, Preset};
use crate::pauli::PauliString;
use crate::tomography::Mode;

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "MAGICBIAS_WORKERS";

fn default_order() -> usize {
    3
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub mode: Mode,
    pub output: PathBuf,
    /// 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    /// Writes 0 in the runtime column when false, so output is bitwise
    /// reproducible.
    #[serde(default = "default_true")]
    pub record_runtime: bool,
    /// Refuse runs estimated above this many seconds unless forced.
    #[serde(default)]
    pub max_seconds: Option<f64>,
    pub run: Vec<RunSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Noisy components: letters S, M, I, E or "none".
    pub flags: String,
    pub sets: Vec<SetSpec>,
    pub p: Grid,
    pub eta: Grid,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Preset(String),
    Generators {
        name: String,
        generators: Vec<String>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Number(f64),
    Word(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<GridValue>),
    Log {
        from: f64,
        to: f64,
        points: usize,
        #[serde(default)]
        include: Vec<GridValue>,
    },
}

/// A named two-qubit bias set.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedSet {
    pub name: String,
    pub set: BiasSet,
}

/// One grid, fully expanded.
#[derive(Clone, Debug, PartialEq)]
pub struct Job {
    pub flags: NoisyFlags,
    pub sets: Vec<NamedSet>,
    pub etas: Vec<f64>,
    pub ps: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub order: usize,
    pub mode: Mode,
    pub output: PathBuf,
    pub workers: usize,
    pub record_runtime: bool,
    pub max_seconds: f64,
    pub jobs: Vec<Job>,
}

/// Default refusal threshold in seconds.
pub const DEFAULT_MAX_SECONDS: f64 = 3600.0;

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

impl SetSpec {
    pub fn resolve(&self, field: &str) -> Result<NamedSet> {
        match self {
            SetSpec::Preset(s) => {
                let p = Preset::parse(s).map_err(|e| field_err(field, e))?;
                Ok(NamedSet {
                    name: p.name().to_string(),
                    set: p.set(),
                })
            }
            SetSpec::Generators { name, generators } => {
                if name.is_empty() || name.contains(',') {
                    return Err(field_err(
                        field,
                        "set names must be non-empty and contain no commas",
                    ));
                }
                let gens = generators
                    .iter()
                    .map(|g| PauliString::parse(2, g))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| field_err(field, e))?;
                let set = BiasSet::new(gens).map_err(|e| field_err(field, e))?;
                if set.n() != 2 {
                    return Err(field_err(field, "CNOT bias sets need two generators"));
                }
                Ok(NamedSet {
                    name: name.clone(),
                    set,
                })
            }
        }
    }
}

impl NamedSet {
    /// Preset name (`Z`) or comma-separated generators (`Z1Z2,X1`); a
    /// generator set is named by joining them with `+`.
    pub fn parse_arg(s: &str, field: &str) -> Result<NamedSet> {
        let spec = if s.chars().any(|c| c.is_ascii_digit()) {
            SetSpec::Generators {
                name: s.replace(',', "+"),
                generators: s.split(',').map(str::to_string).collect(),
            }
        } else {
            SetSpec::Preset(s.to_string())
        };
        spec.resolve(field)
    }
}

fn word_value(w: &str, depol: Option<f64>, field: &str) -> Result<f64> {
    match (w, depol) {
        ("inf", _) => Ok(f64::INFINITY),
        ("depol", Some(d)) => Ok(d),
        _ => w
            .parse::<f64>()
            .map_err(|_| field_err(field, format!("unknown grid value {w:?}"))),
    }
}

impl Grid {
    /// Expanded, sorted and deduplicated. `depol` resolves the word "depol".
    pub fn expand(&self, depol: Option<f64>, field: &str) -> Result<Vec<f64>> {
        let word = |v: &GridValue| match v {
            GridValue::Number(x) => Ok(*x),
            GridValue::Word(w) => word_value(w, depol, field),
        };
        let mut out = match self {
            Grid::List(v) => v.iter().map(word).collect::<Result<Vec<_>>>()?,
            Grid::Log {
                from,
                to,
                points,
                include,
            } => {
                if !(*from > 0.0 && *to >= *from && from.is_finite() && to.is_finite()) {
                    return Err(field_err(
                        field,
                        "log range needs 0 < from <= to, both finite",
                    ));
                }
                if *points == 0 {
                    return Err(field_err(field, "log range needs at least one point"));
                }
                let mut v: Vec<f64> = if *points == 1 {
                    vec![*from]
                } else {
                    let (a, b) = (from.log10(), to.log10());
                    (0..*points)
                        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (*points - 1) as f64))
                        .collect()
                };
                for x in include {
                    v.push(word(x)?);
                }
                v
            }
        };
        if out.is_empty() {
            return Err(field_err(field, "grid is empty"));
        }
        if out.iter().any(|x| x.is_nan()) {
            return Err(field_err(field, "NaN in grid"));
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
        out.dedup();
        Ok(out)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(field_err(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Validates and expands every grid. The worker count comes from
    /// `MAGICBIAS_WORKERS` when that is set.
    pub fn plan(&self) -> Result<Plan> {
        if self.order > 3 {
            return Err(field_err("order", format!("at most 3, got {}", self.order)));
        }
        if self.run.is_empty() {
            return Err(field_err("run", "at least one [[run]] table is required"));
        }
        let mut jobs = Vec::new();
        for (i, r) in self.run.iter().enumerate() {
            let at = |f: &str| format!("run[{i}].{f}");
            let flags = NoisyFlags::parse_key(&r.flags).map_err(|e| field_err(&at("flags"), e))?;
            if r.sets.is_empty() {
                return Err(field_err(&at("sets"), "no bias sets"));
            }
            let sets = r
                .sets
                .iter()
                .enumerate()
                .map(|(j, s)| s.resolve(&at(&format!("sets[{j}]"))))
                .collect::<Result<Vec<_>>>()?;
            for (j, s) in sets.iter().enumerate() {
                if sets[..j].iter().any(|o| o.name == s.name) {
                    return Err(field_err(
                        &at("sets"),
                        format!("duplicate set name {}", s.name),
                    ));
                }
            }
            let depol = sets[0].set.depolarizing_eta();
            let etas = r.eta.expand(Some(depol), &at("eta"))?;
            if etas.iter().any(|e| *e < 0.0) {
                return Err(field_err(&at("eta"), "bias must be non-negative"));
            }
            let ps = r.p.expand(None, &at("p"))?;
            if ps.iter().any(|p| !(*p > 0.0 && *p <= 0.1)) {
                return Err(field_err(&at("p"), "error rates must lie in (0, 0.1]"));
            }
            // the enumerator bins at most four sets at a time
            for chunk in sets.chunks(4) {
                jobs.push(Job {
                    flags,
                    sets: chunk.to_vec(),
                    etas: etas.clone(),
                    ps: ps.clone(),
                });
            }
        }
        let workers = match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| field_err(WORKERS_ENV, format!("not a count: {v:?}")))?,
            Err(_) => self.workers,
        };
        Ok(Plan {
            order: self.order,
            mode: self.mode,
            output: self.output.clone(),
            workers,
            record_runtime: self.record_runtime,
            max_seconds: self.max_seconds.unwrap_or(DEFAULT_MAX_SECONDS),
            jobs,
        })
    }
}

impl Plan {
    pub fn points(&self) -> usize {
        self.jobs
            .iter()
            .map(|j| j.sets.len() * j.etas.len() * j.ps.len())
            .sum()
    }
}
