//! Subcommand bodies behind the `quadnn` binary. Each returns a process exit
//! code: 0 success, 1 runtime abort, 2 configuration or validation error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::audit::{audit, AuditAssumptions};
use crate::config::{ScenarioConfig, Variant};
use crate::error::Error;
use crate::sim::{metrics, run_scenario, RunMetrics, SimLog};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// What to run and where to put it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: PathBuf,
    pub out: PathBuf,
    /// Variant names as typed by the user; parsed late so bad names map to exit 2.
    pub variants: Vec<String>,
    pub seed: Option<u64>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_RUNTIME, message: format!("cannot write {}: {e}", path.display()) }
}

fn finish(result: Result<(), Failure>, err: &mut dyn Write) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(manifest: &RunManifest) -> Result<ScenarioConfig, Failure> {
    let mut cfg = ScenarioConfig::from_path(&manifest.config)?;
    if let Some(seed) = manifest.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn parse_variants(names: &[String]) -> Result<Vec<Variant>, Failure> {
    names.iter().map(|n| n.parse::<Variant>().map_err(Failure::from)).collect()
}

fn write_log(log: &SimLog, path: &Path) -> Result<(), Failure> {
    let file = fs::File::create(path).map_err(|e| io_failure(path, e))?;
    log.write_csv(std::io::BufWriter::new(file)).map_err(|e| io_failure(path, e))
}

fn create_dir(out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(|e| io_failure(out, e))
}

fn full_metrics(log: &SimLog) -> Result<RunMetrics, Failure> {
    Ok(metrics(log, 0.0, log.final_time())?)
}

/// Runs one scenario and writes `log.csv` and `metrics.txt` into the output
/// directory. At most one variant may be given; it overrides the file.
pub fn cmd_run(manifest: &RunManifest, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = (|| {
        let mut cfg = load(manifest)?;
        match parse_variants(&manifest.variants)?.as_slice() {
            [] => {}
            [v] => cfg.variant = *v,
            _ => return Err(Failure { code: EXIT_CONFIG, message: "run takes at most one --variant; use compare".into() }),
        }
        cfg.validate()?;
        let log = run_scenario(&cfg)?;
        create_dir(&manifest.out)?;
        write_log(&log, &manifest.out.join("log.csv"))?;
        let m = full_metrics(&log)?;
        let path = manifest.out.join("metrics.txt");
        fs::write(&path, format!("scenario {}\nvariant {}\nseed {}\n{m}\n", cfg.name, cfg.variant.name(), cfg.seed))
            .map_err(|e| io_failure(&path, e))?;
        let _ = writeln!(out, "{} ({}): max |e_x| {:.4e}, max |e_R| {:.4e}, wrote {}", cfg.name, cfg.variant.name(), m.max_e_x, m.max_e_r, manifest.out.display());
        Ok(())
    })();
    finish(result, err)
}

/// Runs the scenario once per variant, in parallel, and writes one log per
/// variant plus a side-by-side table in `compare.txt`.
pub fn cmd_compare(manifest: &RunManifest, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = (|| {
        let cfg = load(manifest)?;
        let variants = if manifest.variants.is_empty() {
            vec![Variant::Baseline, Variant::Adaptive]
        } else {
            parse_variants(&manifest.variants)?
        };
        if variants.len() < 2 {
            return Err(Failure { code: EXIT_CONFIG, message: "compare needs at least two variants".into() });
        }
        cfg.validate()?;
        let logs: Vec<Result<SimLog, Error>> = std::thread::scope(|scope| {
            let handles: Vec<_> = variants
                .iter()
                .map(|&variant| {
                    let cfg = ScenarioConfig { variant, ..cfg.clone() };
                    scope.spawn(move || run_scenario(&cfg))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
        });
        create_dir(&manifest.out)?;
        let half = 0.5 * cfg.duration;
        let mut table = format!(
            "{:<3} {:<9} {:>12} {:>12} {:>14} {:>12} {:>9} {:>6}\n",
            "#", "variant", "rms|e_x|", "max|e_x|", "max|e_x|2nd", "max|e_R|", "max T", "sat"
        );
        for (i, (variant, log)) in variants.iter().zip(logs).enumerate() {
            let log = log?;
            write_log(&log, &manifest.out.join(format!("log_{i}_{}.csv", variant.name())))?;
            let m = full_metrics(&log)?;
            let late = metrics(&log, half, log.final_time())?;
            let _ = writeln!(
                table,
                "{:<3} {:<9} {:>12.4e} {:>12.4e} {:>14.4e} {:>12.4e} {:>9.3} {:>6}",
                i,
                variant.name(),
                m.rms_e_x,
                m.max_e_x,
                late.max_e_x,
                m.max_e_r,
                m.max_thrust,
                m.saturation_count
            );
        }
        let path = manifest.out.join("compare.txt");
        fs::write(&path, &table).map_err(|e| io_failure(&path, e))?;
        let _ = write!(out, "{table}");
        Ok(())
    })();
    finish(result, err)
}

/// Prints the audit report; exit 0 only when every condition passes. With an
/// output directory the CSV record is written as `audit.csv`.
pub fn cmd_audit(assumptions: &Path, out_dir: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut passed = false;
    let result = (|| {
        let a = AuditAssumptions::from_path(assumptions)?;
        let report = audit(&a)?;
        let _ = writeln!(out, "{}", report.to_text());
        if let Some(dir) = out_dir {
            create_dir(dir)?;
            let path = dir.join("audit.csv");
            fs::write(&path, report.to_csv()).map_err(|e| io_failure(&path, e))?;
        }
        passed = report.all_pass();
        Ok(())
    })();
    match finish(result, err) {
        EXIT_OK if !passed => EXIT_RUNTIME,
        code => code,
    }
}
