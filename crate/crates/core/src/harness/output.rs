//! CSV files, plotting scripts and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use crate::bias::BiasReport;
use crate::budget::{sweep_tx_power, write_csv, PowerBudget};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::{CancellerStats, GridResult, TxSweepResult};

pub const TX_SWEEP_HEADER: [&str; 16] = [
    "tx_dbm",
    "realizations",
    "sinr_wl_db",
    "sinr_wl_se_db",
    "attenuation_wl_db",
    "sinr_linear_db",
    "sinr_linear_se_db",
    "attenuation_linear_db",
    "p_si",
    "p_si_im",
    "p_imd",
    "p_imd_im",
    "p_noise",
    "p_noise_im",
    "p_q",
    "p_soi",
];

pub const GRID_HEADER: [&str; 7] =
    ["taps", "training", "feasible", "realizations", "sinr_db", "sinr_se_db", "attenuation_db"];

pub const BIAS_HEADER: [&str; 6] =
    ["coefficient", "analytic_re", "analytic_im", "empirical_re", "empirical_im", "standard_error"];

/// Which figure a plotting script draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    /// Layered component powers against transmit power.
    Budget,
    /// SINR and attenuation against transmit power, one series per canceller.
    TxSweep,
    /// One curve per filter length against training length.
    Grid,
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Closed-form budget sweep: writes `budget.csv` and its plot script.
pub fn run_budget(cfg: &ExperimentConfig, dir: &Path) -> Result<(Vec<PowerBudget>, Vec<PathBuf>)> {
    let sweep = sweep_tx_power(&cfg.system, &cfg.budget_tx_dbm, cfg.ldc).map_err(|e| e.in_scenario(&cfg.scenario))?;
    create_dir(dir)?;
    let csv_path = dir.join("budget.csv");
    let file = fs::File::create(&csv_path)?;
    write_csv(&sweep, file)?;
    let script = emit_plot_script(PlotStyle::Budget, &csv_path)?;
    Ok((sweep, vec![csv_path, script]))
}

fn stats(s: &CancellerStats) -> [String; 3] {
    [num(s.sinr_db), num(s.sinr_se_db), num(s.attenuation_db)]
}

pub fn write_tx_sweep(res: &TxSweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    if res.points.is_empty() {
        return Err(Error::Config("empty sweep result".into()));
    }
    create_dir(dir)?;
    let path = dir.join("sweep_tx.csv");
    let mut w = writer(&path)?;
    w.write_record(TX_SWEEP_HEADER)?;
    for p in &res.points {
        let c = &p.components;
        let mut row = vec![num(p.tx_dbm), p.realizations.to_string()];
        row.extend(stats(&p.wl));
        row.extend(stats(&p.linear));
        row.extend([c.p_si, c.p_si_im, c.p_imd, c.p_imd_im, c.p_noise, c.p_noise_im, c.p_q, c.p_soi].map(num));
        w.write_record(&row)?;
    }
    w.flush()?;
    let script = emit_plot_script(PlotStyle::TxSweep, &path)?;
    Ok(vec![path, script])
}

pub fn write_grid(res: &GridResult, dir: &Path) -> Result<Vec<PathBuf>> {
    if res.points.is_empty() {
        return Err(Error::Config("empty grid result".into()));
    }
    create_dir(dir)?;
    let path = dir.join("sweep_mn.csv");
    let mut w = writer(&path)?;
    w.write_record(GRID_HEADER)?;
    for p in &res.points {
        let mut row = vec![p.taps.to_string(), p.training.to_string(), p.feasible.to_string(), p.realizations.to_string()];
        match &p.wl {
            Some(s) => row.extend(stats(s)),
            None => row.extend(["", "", ""].map(String::from)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    let script = emit_plot_script(PlotStyle::Grid, &path)?;
    Ok(vec![path, script])
}

/// `bias.csv` with one row per coefficient and the full report as JSON.
pub fn write_bias(report: &BiasReport, dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let path = dir.join("bias.csv");
    let mut w = writer(&path)?;
    w.write_record(BIAS_HEADER)?;
    for (i, name) in ["h1", "h2"].iter().enumerate() {
        let a = report.analytic_bias[i];
        let e = report.empirical_mean_error[i];
        w.write_record([name.to_string(), num(a.re), num(a.im), num(e.re), num(e.im), format!("{:.6e}", report.standard_error[i])])?;
    }
    w.flush()?;
    let json = dir.join("bias.json");
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&json, text + "\n")?;
    Ok(vec![path, json])
}

const BUDGET_PLOT: &str = r#"
rows = load()
tx = col(rows, "tx_dbm")
fig, ax = plt.subplots(figsize=(7, 4.5))
for key, label in [
    ("p_si_im", "conjugate SI"),
    ("p_si", "linear SI after LDC"),
    ("p_imd", "IMD"),
    ("p_imd_im", "conjugate IMD"),
    ("p_noise", "noise"),
    ("p_noise_im", "noise image"),
    ("p_q", "quantization"),
    ("p_soi", "signal of interest"),
]:
    ax.plot(tx, col(rows, key), label=label)
ax.set_xlabel("transmit power [dBm]")
ax.set_ylabel("power [dBm]")
ax.grid(True)
ax.legend()
finish(fig, "budget")
"#;

const TX_PLOT: &str = r#"
rows = load()
tx = col(rows, "tx_dbm")
fig, (a, b) = plt.subplots(1, 2, figsize=(11, 4.5))
for kind, label in [("wl", "widely linear"), ("linear", "linear")]:
    a.errorbar(tx, col(rows, f"sinr_{kind}_db"), yerr=col(rows, f"sinr_{kind}_se_db"), label=label, marker="o")
    b.plot(tx, col(rows, f"attenuation_{kind}_db"), label=label, marker="o")
a.set_ylabel("SINR [dB]")
b.set_ylabel("digital attenuation [dB]")
for ax in (a, b):
    ax.set_xlabel("transmit power [dBm]")
    ax.grid(True)
    ax.legend()
finish(fig, "sweep_tx")
"#;

const GRID_PLOT: &str = r#"
rows = [r for r in load() if r["feasible"] == "true" and r["sinr_db"]]
fig, (a, b) = plt.subplots(1, 2, figsize=(11, 4.5))
for m in sorted({int(r["taps"]) for r in rows}):
    sel = [r for r in rows if int(r["taps"]) == m]
    n = col(sel, "training")
    a.semilogx(n, col(sel, "sinr_db"), marker="o", label=f"M = {m}")
    b.semilogx(n, col(sel, "attenuation_db"), marker="o", label=f"M = {m}")
a.set_ylabel("SINR [dB]")
b.set_ylabel("digital attenuation [dB]")
for ax in (a, b):
    ax.set_xlabel("training samples N")
    ax.grid(True, which="both")
    ax.legend()
finish(fig, "sweep_mn")
"#;

/// Writes a standalone matplotlib script next to `csv_path` that reads only
/// that file.
pub fn emit_plot_script(style: PlotStyle, csv_path: &Path) -> Result<PathBuf> {
    let name = csv_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::Io(format!("bad CSV path {}", csv_path.display())))?;
    let body = match style {
        PlotStyle::Budget => BUDGET_PLOT,
        PlotStyle::TxSweep => TX_PLOT,
        PlotStyle::Grid => GRID_PLOT,
    };
    let script = format!(
        r#"#!/usr/bin/env python3
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV = os.path.join(HERE, "{name}")


def load():
    with open(CSV, newline="") as f:
        return list(csv.DictReader(f))


def col(rows, key):
    return [float(r[key]) if r[key] != "" else float("nan") for r in rows]


def finish(fig, stem):
    fig.tight_layout()
    out = os.path.join(HERE, stem + ".png")
    fig.savefig(out, dpi=150)
    if "--show" in sys.argv:
        plt.show()
    print(out)

{body}"#
    );
    let path = csv_path.with_file_name(format!("plot_{}.py", name.trim_end_matches(".csv")));
    fs::write(&path, script)?;
    Ok(path)
}

/// `manifest.txt`: the command, the crate version and the resolved
/// configuration as TOML.
pub fn write_manifest(cfg: &ExperimentConfig, command: &str, files: &[PathBuf], dir: &Path) -> Result<PathBuf> {
    create_dir(dir)?;
    let mut text = format!(
        "# fdsic {}\n# command: {command}\n# scenario: {}\n# seed: {}\n# realizations: {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.scenario,
        cfg.seed,
        cfg.realizations
    );
    for f in files {
        text += &format!("# output: {}\n", f.file_name().map(|n| n.to_string_lossy()).unwrap_or_default());
    }
    text += "\n";
    text += &cfg.to_toml()?;
    let path = dir.join("manifest.txt");
    fs::write(&path, text)?;
    Ok(path)
}
