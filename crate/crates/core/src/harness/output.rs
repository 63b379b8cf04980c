use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::checks::CheckResult;
use super::convergence::ConvergenceReport;
use super::evolve_run::EvolveReport;
use super::kernel_study::KernelReport;
use super::norms::NormsReport;
use crate::error::Result;
use crate::lattice::io::write_binary;

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_rows<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_header_only(path: &Path, header: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ErrorRow {
    h: f64,
    t: f64,
    l2_error: f64,
}

/// `report.json` and `errors.csv` with columns `h, t, l2_error`.
pub fn write_convergence(report: &ConvergenceReport, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(dir)?;
    let json = dir.join("report.json");
    write_json(report, &json)?;
    let csv_path = dir.join("errors.csv");
    let rows = report.levels.iter().filter(|l| l.failure.is_none()).flat_map(|l| {
        report.times.iter().zip(&l.errors).map(|(&t, &e)| ErrorRow { h: l.h, t, l2_error: e })
    });
    let rows: Vec<ErrorRow> = rows.collect();
    if rows.is_empty() {
        write_header_only(&csv_path, &["h", "t", "l2_error"])?;
    } else {
        write_rows(&csv_path, rows)?;
    }
    Ok(vec![json, csv_path])
}

#[derive(Serialize)]
struct KernelRow {
    #[serde(rename = "N")]
    n: f64,
    h: f64,
    alpha: f64,
    t: f64,
    x: f64,
    re: f64,
    im: f64,
    abs: f64,
}

/// `report.json`, `kernel.csv` (peak samples) and `kernel_fits.csv`.
pub fn write_kernel(report: &KernelReport, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(dir)?;
    let json = dir.join("report.json");
    write_json(report, &json)?;
    let samples = dir.join("kernel.csv");
    if report.samples.is_empty() {
        write_header_only(&samples, &["N", "h", "alpha", "t", "x", "re", "im", "abs"])?;
    } else {
        write_rows(
            &samples,
            report.samples.iter().map(|s| KernelRow {
                n: s.n,
                h: s.h,
                alpha: s.alpha,
                t: s.t,
                x: s.x,
                re: s.value.re,
                im: s.value.im,
                abs: s.value.norm(),
            }),
        )?;
    }
    let fits = dir.join("kernel_fits.csv");
    if report.fits.is_empty() {
        write_header_only(
            &fits,
            &[
                "alpha",
                "n",
                "exponent",
                "prefactor",
                "residual",
                "expected_exponent",
                "resonant_band",
                "max_doubling_change",
                "max_edge_ratio",
            ],
        )?;
    } else {
        write_rows(&fits, &report.fits)?;
    }
    Ok(vec![json, samples, fits])
}

/// `report.json`, `conservation.csv` for the finest grid, one
/// `conservation_M<M>.csv` per grid and, when kept, binary snapshots.
pub fn write_evolve(report: &EvolveReport, dir: &Path, short_hash: &str) -> Result<Vec<PathBuf>> {
    prepare(dir)?;
    let json = dir.join("report.json");
    write_json(report, &json)?;
    let mut written = vec![json];
    for run in &report.runs {
        let path = dir.join(format!("conservation_M{}.csv", run.points_per_axis));
        write_rows(&path, &run.rows)?;
        written.push(path);
        if let Some(traj) = &run.trajectory {
            for (k, u) in traj.snapshots().iter().enumerate() {
                let path = dir.join(format!("snapshot_{short_hash}_M{}_{k:04}.bin", run.points_per_axis));
                write_binary(u, BufWriter::new(File::create(&path)?))?;
                written.push(path);
            }
        }
    }
    if let Some(finest) = report.runs.last() {
        let path = dir.join("conservation.csv");
        write_rows(&path, &finest.rows)?;
        written.push(path);
    }
    Ok(written)
}

/// `report.json`, `norms.csv` and `strichartz.csv`.
pub fn write_norms(report: &NormsReport, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(dir)?;
    let json = dir.join("report.json");
    write_json(report, &json)?;
    let norms = dir.join("norms.csv");
    write_rows(&norms, &report.rows)?;
    let strichartz = dir.join("strichartz.csv");
    if report.strichartz.is_empty() {
        write_header_only(&strichartz, &["q", "r", "kind", "h", "quotient"])?;
    } else {
        write_rows(&strichartz, &report.strichartz)?;
    }
    Ok(vec![json, norms, strichartz])
}

#[derive(Serialize)]
struct CheckReport<'a> {
    version: &'a str,
    passed: usize,
    failed: usize,
    checks: &'a [CheckResult],
}

/// `report.json` and `checks.csv`.
pub fn write_checks(checks: &[CheckResult], dir: &Path) -> Result<Vec<PathBuf>> {
    prepare(dir)?;
    let json = dir.join("report.json");
    let passed = checks.iter().filter(|c| c.passed).count();
    write_json(
        &CheckReport { version: env!("CARGO_PKG_VERSION"), passed, failed: checks.len() - passed, checks },
        &json,
    )?;
    let path = dir.join("checks.csv");
    write_rows(&path, checks)?;
    Ok(vec![json, path])
}
