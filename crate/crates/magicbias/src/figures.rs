//! Per-figure data files derived from a results CSV. No physics here: rows
//! are filtered, sorted and tagged.

use std::cmp::Ordering;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sweep::{read_rows, Row};

pub const FIGURE_VERSION_LINE: &str = "# magicbias figure data schema 1";

/// Bias of the depolarizing channel for every two-qubit bias set (3 / 12).
pub const DEPOL_ETA: f64 = 0.25;

struct Figure {
    file: &'static str,
    flags: &'static str,
    sets: &'static [&'static str],
    /// Restrict to the operating point `p`.
    at_p: bool,
    columns: &'static [&'static str],
}

const FIGURES: [Figure; 5] = [
    Figure {
        file: "infidelity_vs_p.csv",
        flags: "SMIE",
        sets: &["Z"],
        at_p: false,
        columns: &["eta", "p", "r_proc", "r_avg", "eta_ZL"],
    },
    Figure {
        file: "z_bias_by_set.csv",
        flags: "SMIE",
        sets: &["Z", "X", "Y"],
        at_p: true,
        columns: &["set", "eta", "eta_ZL"],
    },
    Figure {
        file: "x_bias.csv",
        flags: "SMIE",
        sets: &["X"],
        at_p: true,
        columns: &["eta", "eta_XL"],
    },
    Figure {
        file: "ablation_mi.csv",
        flags: "MI",
        sets: &["Z", "M"],
        at_p: true,
        columns: &["set", "eta", "eta_ZL"],
    },
    Figure {
        file: "ablation_mie.csv",
        flags: "MIE",
        sets: &["Z", "M"],
        at_p: true,
        columns: &["set", "eta", "eta_ZL"],
    },
];

fn value(r: &Row, c: &str) -> String {
    match c {
        "set" => r.set.clone(),
        "eta" => r.eta.to_string(),
        "p" => r.p.to_string(),
        "r_proc" => r.r_proc.to_string(),
        "r_avg" => r.r_avg.to_string(),
        "eta_ZL" => r.eta_zl.to_string(),
        "eta_XL" => r.eta_xl.to_string(),
        _ => unreachable!("column table is static"),
    }
}

fn cmp(a: &Row, b: &Row) -> Ordering {
    a.set
        .cmp(&b.set)
        .then(a.eta.total_cmp(&b.eta))
        .then(a.p.total_cmp(&b.p))
}

/// Writes every figure file that has rows into `dir`; returns the paths.
/// `p` is the operating point for the bias sweeps.
pub fn write_figures(csv: &Path, dir: &Path, p: f64) -> Result<Vec<PathBuf>> {
    let rows = read_rows(csv)?;
    if rows.is_empty() {
        return Err(Error::Config(format!("{}: no result rows", csv.display())));
    }
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for fig in &FIGURES {
        let mut sel: Vec<&Row> = rows
            .iter()
            .filter(|r| r.flags == fig.flags && fig.sets.contains(&r.set.as_str()))
            .filter(|r| !fig.at_p || r.p == p)
            .collect();
        if sel.is_empty() {
            continue;
        }
        sel.sort_by(|a, b| cmp(a, b));
        let path = dir.join(fig.file);
        let mut f = std::fs::File::create(&path)?;
        writeln!(f, "{FIGURE_VERSION_LINE}")?;
        let mut w = csv::Writer::from_writer(f);
        let mut header: Vec<&str> = fig.columns.to_vec();
        header.push("depol_marker");
        w.write_record(&header)
            .map_err(|e| Error::Io(e.to_string()))?;
        for r in sel {
            let mut rec: Vec<String> = fig.columns.iter().map(|c| value(r, c)).collect();
            rec.push(((r.eta == DEPOL_ETA) as u8).to_string());
            w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
