//! Command-line front end: CSV ingestion, experiment configuration and
//! report emission for the `varorder` library.

pub mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use varorder::numerics::Matrix;
use varorder::residual_tests::{lm_test_with, AuxRegressionConfig, LmVariant, SampleRule};
use varorder::selection::{select_order_with, Penalty, SelectionMethod};
use varorder::var_model::{classify_roots, companion, fit_with};
use varorder::{
    DeterministicChoice, DeterministicSpec, ErrorClass, TimeSeriesData, Tolerances, VarError,
};

/// Samples shorter than this make the Hannan–Quinn penalty `2p² ln ln T`
/// smaller than the Akaike one.
const HQ_SMALL_T: usize = 30;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] VarError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Data(_) | Self::Io { .. } => 3,
            Self::Core(e) => match e.class() {
                ErrorClass::Usage => 2,
                ErrorClass::Data => 3,
                ErrorClass::Numerical => 4,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::Data(_) => "data",
            Self::Io { .. } => "io",
            Self::Core(e) => e.kind(),
        }
    }

    /// `error kind=<kind> code=<n>: <message>` on one line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!(
            "error kind={} code={}: {}",
            self.kind(),
            self.exit_code(),
            msg
        )
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Reads a CSV panel: a header of variable names, then one numeric row per
/// period, oldest first. The first `k_max` rows become initial values.
pub fn parse_csv(path: &Path, k_max: usize) -> Result<TimeSeriesData<f64>> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv_reader(file, k_max)
}

pub fn parse_csv_reader(input: impl std::io::Read, k_max: usize) -> Result<TimeSeriesData<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().any(String::is_empty) {
        return Err(CliError::Data("header must name every column".into()));
    }
    let p = names.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(format!("malformed CSV: {e}")))?;
        let line = record
            .position()
            .map_or(rows + 2, |pos| pos.line() as usize);
        if record.len() != p {
            return Err(CliError::Data(format!(
                "row {line}: expected {p} cells, found {}",
                record.len()
            )));
        }
        for (cell, name) in record.iter().zip(&names) {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    CliError::Data(format!(
                        "row {line}, column `{name}`: `{cell}` is not a finite number"
                    ))
                })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows < k_max + 2 {
        return Err(CliError::Data(format!(
            "{rows} observations; at least K_max + 2 = {} are required",
            k_max + 2
        )));
    }
    let obs = Matrix::new(rows, p, values)?;
    Ok(TimeSeriesData::new(obs, k_max, names)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

/// `m=<m>` as given to `--lm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LmOrder(pub usize);

impl FromStr for LmOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let v = s
            .strip_prefix("m=")
            .ok_or_else(|| format!("expected m=<m>, got `{s}`"))?;
        match v.parse::<usize>() {
            Ok(m) if m >= 1 => Ok(Self(m)),
            _ => Err(format!("m must be a positive integer, got `{v}`")),
        }
    }
}

impl fmt::Display for LmOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}", self.0)
    }
}

fn parse_det(s: &str) -> std::result::Result<DeterministicChoice, String> {
    s.parse().map_err(|e: VarError| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<LmVariant, String> {
    s.parse().map_err(|e: VarError| e.to_string())
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(a) if a > 0.0 && a < 1.0 => Ok(a),
        _ => Err(format!("significance level must lie in (0, 1), got `{s}`")),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "varorder",
    version,
    about = "Lag-order determination for vector autoregressions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: OutputFormat,
    /// Relative rank cutoff for least squares and Cholesky pivots.
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file with a header row, oldest observation first.
    pub input: PathBuf,
    /// Largest lag considered; the first K rows are initial values.
    #[arg(long = "max-lag")]
    pub max_lag: usize,
    #[arg(long, default_value = "const", value_parser = parse_det)]
    pub det: DeterministicChoice,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information criteria and sequential LR tests for lags 0..=K.
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',', default_value = "aic,bic,hq")]
        ic: Vec<String>,
        #[arg(long = "lr-alpha", default_value = "0.05", value_parser = parse_alpha)]
        lr_alpha: f64,
    },
    /// LM test for residual autocorrelation in the model with `--lag` lags.
    Lmtest {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        lag: usize,
        #[arg(long, default_value = "m=1")]
        lm: LmOrder,
        #[arg(long, default_value = "joint", value_parser = parse_variant)]
        variant: LmVariant,
        #[arg(long = "zero-pad")]
        zero_pad: bool,
    },
    /// Monte Carlo experiment described by a TOML file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Overrides the replication count of the config file.
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Companion-matrix roots of a fitted model.
    Roots {
        #[command(flatten)]
        data: DataArgs,
        /// Lag order to fit; defaults to the Schwarz choice.
        #[arg(long)]
        lag: Option<usize>,
        #[arg(long = "root-tol", default_value = "1e-6")]
        root_tol: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOptions {
    pub lag: usize,
    pub aux: AuxRegressionConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Select,
    LmTest(LmOptions),
    Simulate {
        config: PathBuf,
        seed: u64,
        reps: Option<usize>,
    },
    Roots {
        lag: Option<usize>,
        root_tol: f64,
    },
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub input_path: Option<PathBuf>,
    pub k_max: usize,
    pub det: DeterministicChoice,
    pub ics: Vec<Penalty>,
    pub lr_alpha: Option<f64>,
    pub format: OutputFormat,
    pub tolerances: Tolerances,
    pub action: Action,
}

impl CliConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let mut tolerances = Tolerances::default();
        if let Some(r) = cli.rank_tol {
            if !(r > 0.0 && r < 1e-2) {
                return Err(CliError::Usage(format!(
                    "--rank-tol must lie in (0, 0.01), got {r}"
                )));
            }
            tolerances.rank_rel = r;
        }
        let base = |data: DataArgs, action| Self {
            input_path: Some(data.input),
            k_max: data.max_lag,
            det: data.det,
            ics: Vec::new(),
            lr_alpha: None,
            format: cli.format,
            tolerances,
            action,
        };
        Ok(match cli.command {
            Command::Select { data, ic, lr_alpha } => {
                let ics = ic
                    .iter()
                    .map(|s| s.parse::<Penalty>())
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Self {
                    ics,
                    lr_alpha: Some(lr_alpha),
                    ..base(data, Action::Select)
                }
            }
            Command::Lmtest {
                data,
                lag,
                lm,
                variant,
                zero_pad,
            } => {
                let sample_rule = if zero_pad {
                    SampleRule::ZeroPad
                } else {
                    SampleRule::Truncate
                };
                let aux = AuxRegressionConfig {
                    m: lm.0,
                    variant,
                    sample_rule,
                };
                base(data, Action::LmTest(LmOptions { lag, aux }))
            }
            Command::Roots {
                data,
                lag,
                root_tol,
            } => {
                if !(root_tol > 0.0 && root_tol < 0.5) {
                    return Err(CliError::Usage(format!(
                        "--root-tol must lie in (0, 0.5), got {root_tol}"
                    )));
                }
                base(data, Action::Roots { lag, root_tol })
            }
            Command::Simulate { config, seed, reps } => Self {
                input_path: None,
                k_max: 0,
                det: DeterministicChoice::None,
                ics: Vec::new(),
                lr_alpha: None,
                format: cli.format,
                tolerances,
                action: Action::Simulate { config, seed, reps },
            },
        })
    }
}

/// What a successful run emits.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
}

fn emit<T: serde::Serialize>(
    value: &T,
    text: impl FnOnce(&T) -> String,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => text(value),
    }
}

pub fn run(cfg: &CliConfig) -> Result<Output> {
    let tol = &cfg.tolerances;
    let mut warnings = Vec::new();
    if let Action::Simulate { config, seed, reps } = &cfg.action {
        let experiment = config::Experiment::load(config)?;
        let summary = experiment.run(*seed, *reps, tol)?;
        return Ok(Output {
            stdout: emit(&summary, |s| s.to_text(), cfg.format),
            warnings,
        });
    }

    let path = cfg
        .input_path
        .as_deref()
        .expect("data subcommands carry an input path");
    let data = parse_csv(path, cfg.k_max)?;
    let spec = DeterministicSpec::<f64>::build(cfg.det.into(), tol)?;
    let det = data.deterministic_panel(&spec)?;

    let stdout = match &cfg.action {
        Action::Select => {
            let mut methods: Vec<SelectionMethod> = cfg
                .ics
                .iter()
                .cloned()
                .map(SelectionMethod::InformationCriterion)
                .collect();
            if let Some(alpha) = cfg.lr_alpha {
                methods.push(SelectionMethod::SequentialLr { alpha });
            }
            if data.effective_len() < HQ_SMALL_T
                && cfg.ics.iter().any(|p| matches!(p, Penalty::HannanQuinn))
            {
                warnings.push(format!(
                    "T = {} < {HQ_SMALL_T}: the Hannan-Quinn penalty is below the Akaike penalty at this sample size",
                    data.effective_len()
                ));
            }
            let report = select_order_with(&data, &det, cfg.k_max, &methods, tol)?;
            emit(&report, |r| r.to_text(), cfg.format)
        }
        Action::LmTest(opts) => {
            let result = lm_test_with(&data, &det, opts.lag, &opts.aux, tol)?;
            emit(&result, |r| r.to_text(), cfg.format)
        }
        Action::Roots { lag, root_tol } => {
            let k = match lag {
                Some(k) => *k,
                None => {
                    let bic = [SelectionMethod::InformationCriterion(Penalty::Schwarz)];
                    select_order_with(&data, &det, cfg.k_max, &bic, tol)?.k_hat["bic"]
                }
            };
            let fitted = fit_with(&data, k, &det, tol)?;
            let report = classify_roots(&companion(&fitted)?, *root_tol)?;
            emit(
                &report,
                |r| format!("lag order {k}\n{}", r.to_text()),
                cfg.format,
            )
        }
        Action::Simulate { .. } => unreachable!("handled above"),
    };
    Ok(Output { stdout, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, k_max: usize) -> Result<TimeSeriesData<f64>> {
        parse_csv_reader(text.as_bytes(), k_max)
    }

    #[test]
    fn reads_a_single_column() {
        let d = parse("x\n1\n2\n3\n", 0).unwrap();
        assert_eq!(d.dim(), 1);
        assert_eq!(d.observations().rows(), 3);
        assert_eq!(d.names(), ["x"]);
    }

    #[test]
    fn ragged_row_is_named() {
        let err = parse("a,b,c\n1,2,3\n4,5\n6,7,8\n", 0).unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let err = parse("a,b\n1,2\n3,abc\n", 0).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("row 3") && msg.contains("`b`") && msg.contains("abc"),
            "{msg}"
        );
        assert!(parse("a\n1\n\n2\n", 0).is_ok(), "blank lines are skipped");
        assert!(
            parse("a,b\n1,\n2,3\n", 0).is_err(),
            "missing values are rejected"
        );
        assert!(parse("a\n1\nNaN\n2\n", 0).is_err());
    }

    #[test]
    fn too_few_rows() {
        let err = parse("x\n1\n2\n3\n", 2).unwrap_err();
        assert!(err.to_string().contains("K_max + 2 = 4"), "{err}");
    }

    #[test]
    fn lm_order_flag() {
        assert_eq!("m=3".parse::<LmOrder>().unwrap(), LmOrder(3));
        assert!("m=0".parse::<LmOrder>().is_err());
        assert!("3".parse::<LmOrder>().is_err());
    }

    #[test]
    fn error_line_is_single_line() {
        let e = CliError::Core(VarError::SingularVariance { lag: 2 });
        assert_eq!(
            e.line(),
            "error kind=singular_variance code=4: singular variance estimate at lag 2"
        );
        assert_eq!(
            CliError::Core(VarError::InvalidArgument("x".into())).exit_code(),
            2
        );
    }
}
