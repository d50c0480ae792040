//! CSV output: per-run prefix curves, per-run finals, and per-horizon
//! summaries with doubling ratios.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::runner::RunResult;
use crate::BenchError;

#[derive(Debug, Serialize)]
struct PrefixRow {
    t: u64,
    cum_realized_reward: f64,
    external_regret_prefix: f64,
    swap_regret_prefix: f64,
}

#[derive(Debug, Serialize)]
struct RunRow {
    horizon: u64,
    seed: u64,
    realized_reward: f64,
    external_regret: f64,
    swap_regret: f64,
}

#[derive(Debug, Serialize)]
struct AuditRow {
    horizon: u64,
    seed: u64,
    scales: u32,
    swap_regret: f64,
    bound: f64,
    slack: f64,
    holds: bool,
}

/// Mean and sample standard deviation over seeds at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub horizon: u64,
    pub seeds: usize,
    pub realized_mean: f64,
    pub realized_std: f64,
    pub external_mean: f64,
    pub external_std: f64,
    pub swap_mean: f64,
    pub swap_std: f64,
    /// `swap_mean` over the previous horizon's, when there is one.
    pub swap_ratio: Option<f64>,
    pub external_ratio: Option<f64>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One row per horizon, in the order horizons first appear.
pub fn summarize(results: &[RunResult]) -> Vec<SummaryRow> {
    let mut horizons: Vec<u64> = Vec::new();
    for r in results {
        if !horizons.contains(&r.horizon) {
            horizons.push(r.horizon);
        }
    }
    let mut rows: Vec<SummaryRow> = Vec::new();
    for h in horizons {
        let runs: Vec<&RunResult> = results.iter().filter(|r| r.horizon == h).collect();
        let col = |f: fn(&RunResult) -> f64| runs.iter().map(|r| f(r)).collect::<Vec<_>>();
        let (realized_mean, realized_std) = mean_std(&col(|r| r.realized));
        let (external_mean, external_std) = mean_std(&col(|r| r.external));
        let (swap_mean, swap_std) = mean_std(&col(|r| r.swap));
        let prev = rows.last();
        rows.push(SummaryRow {
            horizon: h,
            seeds: runs.len(),
            realized_mean,
            realized_std,
            external_mean,
            external_std,
            swap_mean,
            swap_std,
            swap_ratio: prev.map(|p| swap_mean / p.swap_mean),
            external_ratio: prev.map(|p| external_mean / p.external_mean),
        });
    }
    rows
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, BenchError> {
    let f = fs::File::create(path).map_err(|e| BenchError::Io(path.to_path_buf(), e))?;
    Ok(csv::Writer::from_writer(f))
}

/// Writes every CSV for a finished experiment into `dir`; returns the paths.
pub fn write_all(dir: &Path, results: &[RunResult]) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(dir).map_err(|e| BenchError::Io(dir.to_path_buf(), e))?;
    let mut paths = Vec::new();
    for r in results {
        let path = dir.join(format!("T{}_seed{}.csv", r.horizon, r.seed));
        let mut w = writer(&path)?;
        for &(t, cum, ext, swap) in &r.prefix {
            w.serialize(PrefixRow {
                t,
                cum_realized_reward: cum,
                external_regret_prefix: ext,
                swap_regret_prefix: swap,
            })?;
        }
        w.flush().map_err(|e| BenchError::Io(path.clone(), e))?;
        paths.push(path);
    }

    let path = dir.join("runs.csv");
    let mut w = writer(&path)?;
    for r in results {
        w.serialize(RunRow {
            horizon: r.horizon,
            seed: r.seed,
            realized_reward: r.realized,
            external_regret: r.external,
            swap_regret: r.swap,
        })?;
    }
    w.flush().map_err(|e| BenchError::Io(path.clone(), e))?;
    paths.push(path);

    let rows = summarize(results);
    let path = dir.join("summary.csv");
    let mut w = writer(&path)?;
    let with_ratios = rows.len() >= 2;
    let mut header = vec![
        "horizon", "seeds", "realized_mean", "realized_std", "external_mean", "external_std", "swap_mean", "swap_std",
    ];
    if with_ratios {
        header.extend(["swap_ratio", "external_ratio"]);
    }
    w.write_record(&header)?;
    for s in &rows {
        let mut rec = vec![
            s.horizon.to_string(),
            s.seeds.to_string(),
            s.realized_mean.to_string(),
            s.realized_std.to_string(),
            s.external_mean.to_string(),
            s.external_std.to_string(),
            s.swap_mean.to_string(),
            s.swap_std.to_string(),
        ];
        if with_ratios {
            let f = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            rec.push(f(s.swap_ratio));
            rec.push(f(s.external_ratio));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| BenchError::Io(path.clone(), e))?;
    paths.push(path);

    if results.iter().any(|r| r.audit.is_some()) {
        let path = dir.join("audit.csv");
        let mut w = writer(&path)?;
        for r in results {
            if let Some(a) = &r.audit {
                w.serialize(AuditRow {
                    horizon: r.horizon,
                    seed: r.seed,
                    scales: a.num_scales,
                    swap_regret: a.swap,
                    bound: a.rhs,
                    slack: a.slack,
                    holds: a.holds,
                })?;
            }
        }
        w.flush().map_err(|e| BenchError::Io(path.clone(), e))?;
        paths.push(path);
    }
    Ok(paths)
}
