//! Generates a standalone matplotlib script that draws delta against Np.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Component, Path, PathBuf};

use clap::Args;

use crate::failure::Failure;

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Race CSV with `np` and `delta` columns.
    #[arg(long)]
    csv: PathBuf,
    /// Script to write.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: &PlotArgs) -> Result<(), Failure> {
    check_csv(&args.csv)?;
    let script_dir = match args.out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let csv_abs = fs::canonicalize(&args.csv).map_err(|e| Failure::io(&args.csv, e))?;
    let dir_abs = fs::canonicalize(&script_dir).map_err(|e| Failure::io(&script_dir, e))?;
    let relative = relative_path(&dir_abs, &csv_abs);
    let image = relative.with_extension("png");
    fs::write(&args.out, render_script(&relative, &image))
        .map_err(|e| Failure::io(&args.out, e))?;
    println!("script: {}", args.out.display());
    println!("csv: {}", relative.display());
    Ok(())
}

/// The CSV must exist, carry `np` and `delta` columns and hold at least one row.
fn check_csv(path: &Path) -> Result<(), Failure> {
    let file = fs::File::open(path).map_err(|e| Failure::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Failure::io(path, e))?,
        None => return Err(Failure::config(format!("{} is empty", path.display()))),
    };
    let columns: Vec<&str> = header.trim_end().split(',').collect();
    if columns.first() != Some(&"np") || !columns.contains(&"delta") {
        return Err(Failure::config(format!(
            "{} has no `np`/`delta` columns (header `{header}`)",
            path.display()
        )));
    }
    match lines.next() {
        Some(Ok(row)) if row.split(',').count() == columns.len() => Ok(()),
        Some(Err(e)) => Err(Failure::io(path, e)),
        Some(Ok(row)) => Err(Failure::config(format!(
            "{}: malformed row `{row}`",
            path.display()
        ))),
        None => Err(Failure::config(format!(
            "{} has no data rows",
            path.display()
        ))),
    }
}

/// Path of `target` as seen from directory `base`; both absolute.
fn relative_path(base: &Path, target: &Path) -> PathBuf {
    let base: Vec<Component> = base.components().collect();
    let target: Vec<Component> = target.components().collect();
    let common = base.iter().zip(&target).take_while(|(a, b)| a == b).count();
    let mut rel = PathBuf::new();
    for _ in common..base.len() {
        rel.push("..");
    }
    for c in &target[common..] {
        rel.push(c);
    }
    rel
}

fn python_str(p: &Path) -> String {
    // Forward slashes keep the script portable; escape for a Python literal.
    let s = p.to_string_lossy().replace('\\', "/");
    format!("{s:?}")
}

pub fn render_script(csv: &Path, image: &Path) -> String {
    let parts = |p: &Path| {
        p.components()
            .map(|c| python_str(Path::new(c.as_os_str())))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        r#"#!/usr/bin/env python3
"""Plot delta(Np) from a prime-race CSV. Generated by prime-race."""
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
CSV_PATH = HERE.joinpath({csv})
IMAGE_PATH = HERE.joinpath({image})

np_values, deltas = [], []
with open(CSV_PATH, newline="") as fh:
    for row in csv.DictReader(fh):
        np_values.append(int(row["np"]))
        deltas.append(int(row["delta"]))

fig, ax = plt.subplots(figsize=(10, 5))
ax.plot(np_values, deltas, linewidth=0.8, label="delta")
ax.axhline(0, color="grey", linewidth=0.5)
ax.set_xlabel("Np (primes analysed)")
ax.set_ylabel("delta")
ax.legend()
fig.tight_layout()
fig.savefig(IMAGE_PATH, dpi=150)
print(IMAGE_PATH)
"#,
        csv = parts(csv),
        image = parts(image),
    )
}
