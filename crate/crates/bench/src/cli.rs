use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{
    default_m_grid, parse_columns, parse_m_grid, parse_methods, parse_norms, DataSource,
    ExperimentConfig, Selection, Synthetic,
};
use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, write_records, write_summary};
use crate::timing::run_timing;
use crate::verification::{run_verification, Suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nystrom", version, about = "Fixed-rank Nyström approximation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Relative approximation errors over an m grid and repeated trials.
    Approx {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Write zero instead of measured seconds.
        #[arg(long)]
        omit_timing: bool,
        /// Also write the mean/std summary to this file.
        #[arg(long)]
        summary_out: Option<PathBuf>,
    },
    /// Check the trace-norm guarantees, the witnesses and the out-of-sample bound.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Random instances per sweep.
        #[arg(long, default_value_t = 500)]
        instances: usize,
        /// Use sampled data points instead of K-means centroids in the out-of-sample suite.
        #[arg(long)]
        in_sample: bool,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Wall-clock times of both pipelines per m.
    Time {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SyntheticKind {
    SparseBinary,
    Gaussian,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// LIBSVM data file.
    #[arg(long, conflicts_with_all = ["fixture", "synthetic"])]
    data: Option<PathBuf>,
    /// Declared feature dimension of the data file.
    #[arg(long, requires = "data")]
    dim: Option<usize>,
    /// Named kernel matrix: example1 or remark2.
    #[arg(long, conflicts_with = "synthetic")]
    fixture: Option<String>,
    /// Generated points instead of a file.
    #[arg(long, value_enum)]
    synthetic: Option<SyntheticKind>,
    /// Dimension of generated points.
    #[arg(long, default_value_t = 300, requires = "synthetic")]
    synthetic_dim: usize,
    /// Feature density of sparse binary points.
    #[arg(long, default_value_t = 0.039, requires = "synthetic")]
    density: f64,
    /// Keep this many points (uniform, seeded by --seed); the size of generated data.
    #[arg(long)]
    subsample: Option<usize>,
}

impl DataArgs {
    fn source(&self) -> Option<DataSource> {
        if let Some(path) = &self.data {
            return Some(DataSource::File {
                path: path.clone(),
                dim: self.dim,
            });
        }
        if let Some(name) = &self.fixture {
            return Some(DataSource::Fixture(name.clone()));
        }
        self.synthetic.map(|kind| {
            DataSource::Synthetic(match kind {
                SyntheticKind::SparseBinary => Synthetic::SparseBinary {
                    p: self.synthetic_dim,
                    density: self.density,
                },
                SyntheticKind::Gaussian => Synthetic::Gaussian {
                    p: self.synthetic_dim,
                },
            })
        })
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Landmark counts, e.g. `2,4,6` or `2..=10`; defaults to r, 2r, ..., 5r.
    #[arg(long)]
    m_grid: Option<String>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value = "uniform")]
    selection: String,
    /// Fixed 1-based landmark columns, replacing random selection.
    #[arg(long)]
    columns: Option<String>,
    #[arg(long, default_value = "standard,modified,evd")]
    methods: String,
    #[arg(long, default_value = "trace,frobenius")]
    norms: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = nystrom_core::DEFAULT_PINV_TOL)]
    pinv_tol: f64,
    /// Largest n for which a dense n x n kernel matrix is built.
    #[arg(long, default_value_t = nystrom_core::DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    /// CSV output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(data: &DataArgs, run: &RunArgs) -> Result<ExperimentConfig> {
    let source = data.source().ok_or_else(|| {
        BenchError::Config("one of --data, --fixture or --synthetic is required".into())
    })?;
    let mut cfg = ExperimentConfig::new(source);
    cfg.subsample = data.subsample;
    cfg.rank = run.rank;
    cfg.m_grid = match &run.m_grid {
        Some(s) => parse_m_grid(s)?,
        None => default_m_grid(run.rank),
    };
    cfg.trials = run.trials;
    cfg.selection = run.selection.parse::<Selection>()?;
    cfg.columns = run.columns.as_deref().map(parse_columns).transpose()?;
    cfg.methods = parse_methods(&run.methods)?;
    cfg.norms = parse_norms(&run.norms)?;
    cfg.seed = run.seed;
    cfg.pinv_tol = run.pinv_tol;
    cfg.dense_cap = run.dense_cap;
    cfg.validate()?;
    Ok(cfg)
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Approx {
            data,
            run,
            omit_timing,
            summary_out,
        } => {
            let mut cfg = build_config(&data, &run)?;
            cfg.omit_timing = omit_timing;
            let out = run_experiment(&cfg)?;
            write_records(open_out(&run.out)?, &out.records)?;
            if let Some(p) = summary_out {
                write_summary(BufWriter::new(File::create(p)?), &out.summary)?;
            }
            if run.out.is_some() {
                write_summary(io::stdout().lock(), &out.summary)?;
            } else {
                write_summary(io::stderr().lock(), &out.summary)?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            instances,
            in_sample,
            data,
            run,
        } => {
            let mut vcfg = VerifyConfig::new(suite.parse()?);
            vcfg.instances = instances;
            vcfg.seed = run.seed;
            vcfg.pinv_tol = run.pinv_tol;
            vcfg.in_sample = in_sample;
            if data.source().is_some() {
                vcfg.data = Some(build_config(&data, &run)?);
            }
            if vcfg.data.is_some() && !matches!(vcfg.suite, Suite::Thm3) {
                return Err(BenchError::Config(
                    "data options apply only to --suite thm3".into(),
                ));
            }
            let report = run_verification(&vcfg)?;
            print!("{report}");
            if let Some(p) = &run.out {
                report.write_csv(BufWriter::new(File::create(p)?))?;
            }
            Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
        Command::Time { data, run } => {
            let cfg = build_config(&data, &run)?;
            let out = run_timing(&cfg)?;
            out.write_csv(open_out(&run.out)?)?;
            for &m in &crate::experiment::effective_grid(&cfg) {
                if let Some(r) = out.ratio(m) {
                    eprintln!("m={m}: modified/standard time ratio {r:.3}");
                }
            }
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(run(["nystrom"]), EXIT_CONFIG);
        assert_eq!(run(["nystrom", "approx", "--bogus"]), EXIT_CONFIG);
        assert_eq!(run(["nystrom", "approx"]), EXIT_CONFIG);
        assert_eq!(run(["nystrom", "approx", "--fixture", "nope"]), EXIT_CONFIG);
        assert_eq!(run(["nystrom", "--help"]), EXIT_OK);
    }

    #[test]
    fn config_from_flags() {
        let cli = Cli::try_parse_from([
            "nystrom", "approx", "--fixture", "example1", "--rank", "1", "--columns", "1,2",
            "--methods", "standard,modified", "--trials", "1",
        ])
        .unwrap();
        let Command::Approx { data, run, .. } = cli.command else {
            panic!()
        };
        let cfg = build_config(&data, &run).unwrap();
        assert_eq!(cfg.columns, Some(vec![0, 1]));
        assert_eq!(cfg.m_grid, vec![1, 2, 3, 4, 5]);
        assert_eq!(cfg.trials, 1);
    }
}
