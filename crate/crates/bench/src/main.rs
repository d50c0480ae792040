use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use swapcomb_bench::{presets, report, run_all, ExperimentConfig};

#[derive(Parser)]
#[command(name = "swapcomb", version, about = "No-swap-regret combinatorial bandit experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment config (a TOML path or a preset name).
    Run {
        config: String,
        /// Added to every seed.
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// List presets, or print one as TOML.
    Scenarios {
        #[arg(long)]
        dump: Option<String>,
    },
    /// Run with per-scale instrumentation and check the decomposition bound.
    Audit {
        config: String,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

fn load(arg: &str) -> Result<ExperimentConfig> {
    let path = PathBuf::from(arg);
    if path.exists() {
        return ExperimentConfig::load(&path).map_err(Into::into);
    }
    match presets::find(arg) {
        Some(p) => Ok(p.config()),
        None => bail!("{arg} is neither a config file nor a preset (see `swapcomb scenarios`)"),
    }
}

fn run(cfg: &ExperimentConfig, seed_offset: u64, out: &Path) -> Result<Vec<swapcomb_bench::RunResult>> {
    let results = run_all(cfg, seed_offset)?;
    let dir = out.join(&cfg.name);
    report::write_all(&dir, &results).with_context(|| format!("writing {}", dir.display()))?;
    println!("horizon  seeds  realized      external      swap          swap ratio");
    for s in report::summarize(&results) {
        let ratio = s.swap_ratio.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<8} {:<6} {:<13.3} {:<13.3} {:<13.3} {ratio}",
            s.horizon, s.seeds, s.realized_mean, s.external_mean, s.swap_mean
        );
    }
    println!("wrote {}", dir.display());
    Ok(results)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { config, seed_offset, out } => {
            let cfg = load(&config)?;
            run(&cfg, seed_offset, &out)?;
        }
        Cmd::Scenarios { dump } => match dump {
            Some(name) => {
                let p = presets::find(&name).with_context(|| format!("no preset named {name}"))?;
                print!("{}", p.config().to_toml());
            }
            None => {
                for p in presets::PRESETS {
                    println!("{:<22} {}", p.name, p.about);
                }
            }
        },
        Cmd::Audit { config, out } => {
            let mut cfg = load(&config)?;
            cfg.audit = true;
            let results = run(&cfg, 0, &out)?;
            let mut failed = 0;
            for r in &results {
                let a = r.audit.as_ref().expect("audit runs are instrumented");
                let verdict = if a.holds { "holds" } else { "VIOLATED" };
                println!(
                    "T={} seed={} K={}: swap {:.4} <= bound {:.4} (slack {:.4}) {verdict}",
                    r.horizon, r.seed, a.num_scales, a.swap, a.rhs, a.slack
                );
                failed += usize::from(!a.holds);
            }
            if failed > 0 {
                bail!("decomposition bound violated on {failed} run(s)");
            }
        }
    }
    Ok(())
}
