//! Parameter sweeps, grid emission and identity audits for the ringsim models.

pub mod audit;
pub mod config;
pub mod error;
pub mod format;
pub mod sweep;

use config::{Mode, SweepConfig};
use error::{CliError, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "RINGSIM_THREADS";

/// Worker pool sized by [`THREADS_ENV`] when set, capped at the available parallelism.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::field(THREADS_ENV, format!("expected a positive integer, got `{raw}`")))?;
        let available = std::thread::available_parallelism().map_or(1, |p| p.get());
        builder = builder.num_threads(n.min(available.max(1)));
    }
    builder.build().map_err(|e| CliError::field(THREADS_ENV, e.to_string()))
}

/// Runs one configured mode, writing its output file. Audit lines go to stdout.
pub fn run(cfg: &SweepConfig) -> Result<()> {
    let pool = thread_pool()?;
    if cfg.mode == Mode::Audit {
        let report = pool.install(|| audit::run_audit(cfg.u64("seed"), cfg.usize("samples")));
        for line in report.lines() {
            println!("{line}");
        }
        if let Some(out) = &cfg.out {
            format::write_table(out, cfg, &report.to_table())?;
        }
        if !report.passed() {
            return Err(CliError::AuditFailed(report.failures().join(", ")));
        }
        return Ok(());
    }
    let table = pool.install(|| sweep::run_sweep(cfg))?;
    let out = cfg.out.as_ref().ok_or_else(|| CliError::field("out", "an output path is required"))?;
    format::write_table(out, cfg, &table)
}
