//! Argument parsing, config assembly and output writing.

use std::ffi::{OsStr, OsString};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_key_values, ConfigError, ExperimentConfig, OutputFormat};
use crate::experiments::Experiment;
use crate::record::ResultRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVARIANT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "arrowlab", version, about = "Entropy-balance, collision and fluctuation-relation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Entropy balance of random product states under Haar unitaries
    Balance,
    /// Near-product state decorrelated by a fixed unitary
    NearProduct,
    /// Two perfectly correlated bits decorrelated by a permutation
    Decorrelate,
    /// Search the unitary group for entropy-decreasing evolutions
    Search,
    /// Relative arrows of system and rest
    Schrodinger,
    /// Weak-coupling grid over coupling, correlation and time
    Sweep,
    /// Collision-model trajectory and its reversal
    Collide,
    /// Crooks ratios on random two-point protocols
    Crooks,
    /// Jarzynski equality on random two-point protocols
    Jarzynski,
    /// Heat flow between qubits at different temperatures
    Heatflow,
    /// Relative entropy to a Gibbs state
    Damping,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Self::Balance => Experiment::Balance,
            Self::NearProduct => Experiment::NearProduct,
            Self::Decorrelate => Experiment::Decorrelate,
            Self::Search => Experiment::Search,
            Self::Schrodinger => Experiment::Schrodinger,
            Self::Sweep => Experiment::Sweep,
            Self::Collide => Experiment::Collide,
            Self::Crooks => Experiment::Crooks,
            Self::Jarzynski => Experiment::Jarzynski,
            Self::Heatflow => Experiment::Heatflow,
            Self::Damping => Experiment::Damping,
        }
    }
}

/// Flags are kept as text and go through the same validation as config
/// file entries, so errors name the config key.
#[derive(Debug, Args)]
struct Options {
    /// Key-value config file; flags override its entries
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<String>,
    /// Output path (stdout when absent)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    /// Bipartition, e.g. 2x2
    #[arg(long, global = true)]
    dims: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    epsilon: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, global = true)]
    restarts: Option<String>,
    #[arg(long, global = true)]
    max_iterations: Option<String>,
    #[arg(long, global = true)]
    collisions: Option<String>,
    /// Comma-separated sweep couplings
    #[arg(long, global = true)]
    couplings: Option<String>,
    /// Comma-separated sweep correlation strengths
    #[arg(long, global = true)]
    epsilons: Option<String>,
    /// Comma-separated sweep times
    #[arg(long, global = true)]
    times: Option<String>,
}

impl Options {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("seed", &self.seed),
            ("out", &self.out),
            ("format", &self.format),
            ("trials", &self.trials),
            ("dims", &self.dims),
            ("epsilon", &self.epsilon),
            ("beta", &self.beta),
            ("theta", &self.theta),
            ("restarts", &self.restarts),
            ("max_iterations", &self.max_iterations),
            ("collisions", &self.collisions),
            ("couplings", &self.couplings),
            ("epsilons", &self.epsilons),
            ("times", &self.times),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

fn assemble_config(options: &Options, experiment: Experiment) -> Result<ExperimentConfig, String> {
    let mut config = ExperimentConfig::default();
    if let Some(path) = &options.config {
        let raw = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let config_error = |e: ConfigError| format!("{}: {e}", path.display());
        for (key, value) in parse_key_values(&raw).map_err(config_error)? {
            config.apply(&key, &value).map_err(config_error)?;
        }
    }
    for (key, value) in options.pairs() {
        config.apply(key, value).map_err(|e| e.to_string())?;
    }
    config.validate().map_err(|e| e.to_string())?;
    match &config.experiment {
        Some(name) if name != experiment.name() => {
            return Err(format!("invalid value for `experiment`: config names `{name}` but the subcommand is `{}`", experiment.name()));
        }
        _ => config.experiment = Some(experiment.name().to_string()),
    }
    Ok(config)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s: OsString = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_record(record: &ResultRecord, stdout: &mut dyn Write, stderr: &mut dyn Write) -> io::Result<()> {
    let to_io = |e: serde_json::Error| io::Error::other(e);
    match (&record.config.out, record.config.format) {
        (Some(path), OutputFormat::Json) => {
            let mut w = BufWriter::new(File::create(path)?);
            record.write_json(&mut w).map_err(to_io)?;
            writeln!(w)?;
            w.flush()
        }
        (Some(path), OutputFormat::Csv) => {
            record.write_csv(BufWriter::new(File::create(path)?)).map_err(io::Error::other)?;
            let mut meta = BufWriter::new(File::create(sidecar_path(path))?);
            serde_json::to_writer_pretty(&mut meta, &record.metadata()).map_err(to_io)?;
            writeln!(meta)?;
            meta.flush()
        }
        (None, OutputFormat::Json) => {
            record.write_json(&mut *stdout).map_err(to_io)?;
            writeln!(stdout)
        }
        (None, OutputFormat::Csv) => {
            record.write_csv(&mut *stdout).map_err(io::Error::other)?;
            writeln!(stderr, "{}", record.metadata())
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code: 0 on success, 2 when an invariant check failed, 1 on usage errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone + AsRef<OsStr>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{rendered}") } else { write!(stdout, "{rendered}") };
            return code;
        }
    };
    let experiment = cli.command.experiment();
    let config = match assemble_config(&cli.options, experiment) {
        Ok(c) => c,
        Err(message) => {
            let _ = writeln!(stderr, "error: {message}");
            return EXIT_USAGE;
        }
    };

    let start = Instant::now();
    let output = match experiment.run(&config) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {} failed: {e}", experiment.name());
            return EXIT_USAGE;
        }
    };
    let record = ResultRecord {
        experiment: experiment.name().to_string(),
        config,
        output,
        library_version: env!("CARGO_PKG_VERSION"),
        rng_algorithm: arrowlab_core::random::RNG_ALGORITHM,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    if let Err(e) = write_record(&record, stdout, stderr) {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    for check in &record.output.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(stderr, "{status} {}: {:e} (tolerance {:e})", check.name, check.value, check.tolerance);
    }
    if record.output.passed() {
        EXIT_OK
    } else {
        EXIT_INVARIANT_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("arrowlab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one_and_name_the_key() {
        let (code, _, err) = run_capture(&["near-product", "--epsilon", "1.5"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("epsilon"), "{err}");
        let (code, _, err) = run_capture(&["crooks", "--beta", "-1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("beta"));
        assert_eq!(run_capture(&["unknown-subcommand"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&[]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn near_product_json_on_stdout() {
        let (code, out, _) = run_capture(&["near-product", "--epsilon", "0.1"]);
        assert_eq!(code, EXIT_OK);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        let sum = doc["rows"][0]["sum"].as_f64().unwrap();
        assert!((sum + 0.071947).abs() < 1e-6);
        assert_eq!(doc["metadata"]["experiment"], "near-product");
        assert_eq!(doc["metadata"]["config"]["epsilon"], 0.1);
    }

    #[test]
    fn config_file_and_flags_combine() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "# sweep\ncouplings = 0, 0.1\nepsilons = 0.2\ntimes = 1, 2, 3\nseed = 3\n").unwrap();
        let out = dir.path().join("cells.csv");
        let args = ["sweep", "--config", cfg.to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()];
        let (code, _, err) = run_capture(&args);
        assert_eq!(code, EXIT_OK, "{err}");
        let csv = std::fs::read_to_string(&out).unwrap();
        assert_eq!(csv.lines().count(), 1 + 6);
        assert!(csv.starts_with("cell,coupling,epsilon,time,sum\n"));
        let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&out)).unwrap()).unwrap();
        assert_eq!(meta["planned_cells"], 6);
        assert_eq!(meta["seed"], 3);

        std::fs::write(&cfg, "experiment = crooks\n").unwrap();
        let (code, _, err) = run_capture(&["sweep", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("experiment"));
        std::fs::write(&cfg, "temperature = 3\n").unwrap();
        let (code, _, err) = run_capture(&["sweep", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("temperature"));
    }

    #[test]
    fn failed_invariant_exits_two() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("strict.cfg");
        std::fs::write(&cfg, "tol_shuffle = 10\n").unwrap();
        let (code, _, err) = run_capture(&["collide", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, EXIT_INVARIANT_FAILED);
        assert!(err.contains("FAIL shuffled_reversal"));
    }
}
