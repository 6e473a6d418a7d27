//! The `fifit` command line: target ingestion, fitting and output files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use crate::fif::EvalConfig;
use crate::fit::{fit, FitResult, TargetFunction};
use crate::geometry::{NodeSpec, Partition, ScaleVector};
use crate::quadrature::QuadConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Args(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("target: {0}")]
    Target(String),
    #[error(transparent)]
    Fit(#[from] crate::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad invocations, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fifit",
    version,
    about = "Collage-optimal L2 approximation by continuous fractal interpolation functions"
)]
struct Args {
    /// Left end of the interval (defaults to the first node, or 0).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Right end of the interval (defaults to the last node, or 1).
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Number of equal segments.
    #[arg(long, conflicts_with = "nodes", required_unless_present = "nodes")]
    n: Option<usize>,
    /// Explicit comma-separated nodes, endpoints included.
    #[arg(long, allow_hyphen_values = true)]
    nodes: Option<String>,
    /// Vertical scaling: one value for every segment or a comma-separated list.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    s: String,
    /// sin | cos | exp | abs | runge | poly:c0,c1,... | csv:PATH
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 16)]
    quad_panels: usize,
    #[arg(long, default_value_t = 5)]
    quad_points: usize,
    /// Address depth for the samples and the measured error.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long)]
    out_coeffs: Option<PathBuf>,
    #[arg(long)]
    out_samples: Option<PathBuf>,
    /// Report path; the report goes to stdout when no output path is given.
    #[arg(long)]
    out_report: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Sin,
    Cos,
    Exp,
    Abs,
    /// `1 / (1 + 25 x^2)`
    Runge,
    /// Coefficients in increasing degree.
    Poly(Vec<f64>),
    Csv(PathBuf),
}

impl TargetSpec {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let spec = spec.trim();
        if let Some(coeffs) = spec.strip_prefix("poly:") {
            return parse_list(coeffs, "poly coefficients").map(TargetSpec::Poly);
        }
        if let Some(path) = spec.strip_prefix("csv:") {
            if path.is_empty() {
                return Err(CliError::Usage("csv target needs a path".into()));
            }
            return Ok(TargetSpec::Csv(PathBuf::from(path)));
        }
        match spec {
            "sin" => Ok(TargetSpec::Sin),
            "cos" => Ok(TargetSpec::Cos),
            "exp" => Ok(TargetSpec::Exp),
            "abs" => Ok(TargetSpec::Abs),
            "runge" => Ok(TargetSpec::Runge),
            "" => Err(CliError::Usage("missing target".into())),
            other => Err(CliError::Usage(format!(
                "unknown target `{other}` (expected sin, cos, exp, abs, runge, poly:c0,c1,... or csv:PATH)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPaths {
    pub coeffs: Option<PathBuf>,
    pub samples: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// A validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub partition: Partition,
    pub scale: ScaleVector,
    pub target: TargetSpec,
    pub quad: QuadConfig,
    pub eval: EvalConfig,
    pub outputs: OutputPaths,
    pub threads: Option<usize>,
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("malformed {what}: `{item}` in `{text}`")))
        })
        .collect()
}

pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let usage = |e: crate::Error| CliError::Usage(e.to_string());

    let partition = match (&args.nodes, args.n) {
        (Some(text), _) => {
            let nodes = parse_list(text, "node list")?;
            let a = args.a.or(nodes.first().copied()).unwrap_or(0.0);
            let b = args.b.or(nodes.last().copied()).unwrap_or(1.0);
            Partition::new(a, b, NodeSpec::Explicit(nodes)).map_err(usage)?
        }
        (None, Some(n)) => {
            Partition::uniform(args.a.unwrap_or(0.0), args.b.unwrap_or(1.0), n).map_err(usage)?
        }
        (None, None) => return Err(CliError::Usage("one of --n or --nodes is required".into())),
    };

    let n = partition.segments();
    let values = parse_list(&args.s, "scale list")?;
    if let Some(bad) = values.iter().find(|v| v.is_nan() || v.abs() >= 1.0) {
        return Err(CliError::Usage(format!("|s| must be < 1, got {bad}")));
    }
    let scale = match values.len() {
        1 => ScaleVector::constant(n, values[0]),
        len if len == n => ScaleVector::new(values),
        len => {
            return Err(CliError::Usage(format!(
                "--s lists {len} values but the partition has {n} segments"
            )))
        }
    }
    .map_err(usage)?;

    let quad = QuadConfig::new(args.quad_panels, args.quad_points).map_err(usage)?;
    let eval = EvalConfig {
        depth: args.depth,
        ..EvalConfig::default()
    };
    eval.validate().map_err(usage)?;
    if args.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }

    Ok(RunConfig {
        partition,
        scale,
        target: TargetSpec::parse(&args.target)?,
        quad,
        eval,
        outputs: OutputPaths {
            coeffs: args.out_coeffs,
            samples: args.out_samples,
            report: args.out_report,
        },
        threads: args.threads,
    })
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Turns a target spec into an evaluable function covering `[a, b]`.
pub fn load_target(spec: &TargetSpec, a: f64, b: f64) -> Result<TargetFunction, CliError> {
    Ok(match spec {
        TargetSpec::Sin => TargetFunction::new("sin", f64::sin),
        TargetSpec::Cos => TargetFunction::new("cos", f64::cos),
        TargetSpec::Exp => TargetFunction::new("exp", f64::exp),
        TargetSpec::Abs => TargetFunction::new("abs", f64::abs),
        TargetSpec::Runge => TargetFunction::new("runge", |x: f64| 1.0 / (1.0 + 25.0 * x * x)),
        TargetSpec::Poly(coeffs) => {
            let coeffs = coeffs.clone();
            let label = format!("poly:{}", join(&coeffs));
            TargetFunction::new(label, move |x| horner(&coeffs, x))
        }
        TargetSpec::Csv(path) => load_csv(path, a, b)?,
    })
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Reads `x,y` samples and extends them by linear interpolation.
fn load_csv(path: &Path, a: f64, b: f64) -> Result<TargetFunction, CliError> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(csv_err)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() < 2 {
            return Err(CliError::Target(format!(
                "{}: line {} needs two columns",
                path.display(),
                line + 1
            )));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => {
                xs.push(x);
                ys.push(y);
            }
            // header row
            _ if line == 0 => continue,
            _ => {
                return Err(CliError::Target(format!(
                    "{}: line {}: cannot parse `{}`",
                    path.display(),
                    line + 1,
                    record.iter().collect::<Vec<_>>().join(",")
                )))
            }
        }
    }
    if xs.len() < 2 {
        return Err(CliError::Target(format!(
            "{}: need at least two samples",
            path.display()
        )));
    }
    if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
        return Err(CliError::Target(format!(
            "{}: x column must be strictly increasing (x = {} follows {})",
            path.display(),
            xs[i + 1],
            xs[i]
        )));
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if lo > a || hi < b {
        return Err(CliError::Target(format!(
            "{}: samples cover [{lo}, {hi}] but the interval is [{a}, {b}]",
            path.display()
        )));
    }
    let label = path.display().to_string();
    Ok(TargetFunction::new(label, move |x| {
        let i = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1);
        let (x0, x1) = (xs[i - 1], xs[i]);
        let t = (x - x0) / (x1 - x0);
        ys[i - 1] + t * (ys[i] - ys[i - 1])
    })
    .with_domain(lo, hi))
}

/// Rounds to `digits` significant digits.
fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Full-precision (17 significant digit) formatting for CSV output.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct QuadReport {
    pub panels: usize,
    pub points: usize,
}

/// The machine-readable run report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub n: usize,
    pub s: Vec<f64>,
    pub contraction: f64,
    pub collage_residual: f64,
    pub collage_bound: f64,
    pub measured_l2_error: f64,
    pub max_node_jump: f64,
    pub objective: f64,
    pub quad: QuadReport,
    pub depth: usize,
}

impl Report {
    pub fn new(cfg: &RunConfig, result: &FitResult) -> Self {
        let r = |x| round_sig(x, 12);
        Self {
            n: cfg.partition.segments(),
            s: cfg.scale.as_slice().iter().map(|&v| r(v)).collect(),
            contraction: r(result.contraction),
            collage_residual: r(result.collage_residual),
            collage_bound: r(result.collage_bound),
            measured_l2_error: r(result.measured_l2_error),
            max_node_jump: r(result.max_node_jump),
            objective: r(result.objective),
            quad: QuadReport {
                panels: cfg.quad.panels_per_segment,
                points: cfg.quad.points_per_panel,
            },
            depth: result.depth,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn write_all<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let mut out = create(path)?;
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_coeffs(path: &Path, alpha: &[f64]) -> Result<(), CliError> {
    write_all(path, |out| {
        writeln!(out, "k,alpha")?;
        for (k, a) in alpha.iter().enumerate() {
            writeln!(out, "{k},{}", fmt17(*a))?;
        }
        Ok(())
    })
}

pub fn write_samples(path: &Path, result: &FitResult) -> Result<(), CliError> {
    write_all(path, |out| {
        writeln!(out, "x,f_target,f_approx")?;
        for p in &result.samples {
            writeln!(
                out,
                "{},{},{}",
                fmt17(p.x),
                fmt17(p.target),
                fmt17(p.approx)
            )?;
        }
        Ok(())
    })
}

/// Fits and writes the requested outputs.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let work = || -> Result<Report, CliError> {
        let p = &cfg.partition;
        let target = load_target(&cfg.target, p.a(), p.b())?;
        let result = fit(&target, p, &cfg.scale, &cfg.quad, &cfg.eval)?;
        let report = Report::new(cfg, &result);
        let json = serde_json::to_string_pretty(&report)?;
        if let Some(path) = &cfg.outputs.coeffs {
            write_coeffs(path, &result.alpha)?;
        }
        if let Some(path) = &cfg.outputs.samples {
            write_samples(path, &result)?;
        }
        match &cfg.outputs.report {
            Some(path) => write_all(path, |out| writeln!(out, "{json}"))?,
            None if cfg.outputs.coeffs.is_none() && cfg.outputs.samples.is_none() => {
                println!("{json}")
            }
            None => {}
        }
        Ok(report)
    };
    match cfg.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?
            .install(work),
        None => work(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("fifit".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn uniform_with_broadcast_scale() {
        let cfg = parse_args(argv("--a 0 --b 1 --n 8 --s 0.3 --target sin")).unwrap();
        assert_eq!(cfg.partition.segments(), 8);
        assert_eq!(cfg.scale.as_slice(), &[0.3; 8]);
        assert_eq!(cfg.target, TargetSpec::Sin);
        assert_eq!(cfg.quad, QuadConfig::default());
        assert_eq!(cfg.eval.depth, 6);
    }

    #[test]
    fn explicit_nodes_and_per_segment_scale() {
        let cfg = parse_args(argv("--nodes 0,0.3,1 --s 0.2,-0.4 --target csv:data.csv")).unwrap();
        assert_eq!(cfg.partition.nodes(), &[0.0, 0.3, 1.0]);
        assert_eq!(cfg.scale.as_slice(), &[0.2, -0.4]);
        assert_eq!(cfg.target, TargetSpec::Csv(PathBuf::from("data.csv")));
        let cfg = parse_args(argv("--n 3 --s -0.5 --target exp")).unwrap();
        assert_eq!(cfg.scale.as_slice(), &[-0.5; 3]);
    }

    #[test]
    fn invalid_invocations_exit_with_two() {
        let err = parse_args(argv("--n 4 --s 1.0 --target sin")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("|s| must be < 1"), "{err}");
        for bad in [
            "--n 4 --target sin --bogus 1",
            "--n 4",
            "--nodes 0,x,1 --target sin",
            "--nodes 0,0.6,0.4,1 --target sin",
            "--n 4 --s 0.1,0.2 --target sin",
            "--n 4 --target wat",
            "--n 4 --nodes 0,0.5,1 --target sin",
            "--n 4 --target sin --quad-points 13",
            "--n 4 --target sin --depth 0",
        ] {
            let err = parse_args(argv(bad)).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}: {err}");
        }
    }

    #[test]
    fn builtin_targets() {
        let f = load_target(&TargetSpec::Sin, 0.0, 1.0).unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 0.5f64.sin());
        let p = load_target(&TargetSpec::parse("poly:1,-2,3").unwrap(), 0.0, 1.0).unwrap();
        assert!((p.eval(2.0).unwrap() - 9.0).abs() < 1e-15);
        let r = load_target(&TargetSpec::Runge, -1.0, 1.0).unwrap();
        assert!((r.eval(0.2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn csv_targets() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("line.csv");
        std::fs::write(&path, "x,y\n0,0\n1,2\n").unwrap();
        let f = load_target(&TargetSpec::Csv(path.clone()), 0.0, 1.0).unwrap();
        assert!((f.eval(0.25).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(f.eval(1.0).unwrap(), 2.0);
        assert!(f.eval(1.5).is_err());

        let short = dir.path().join("short.csv");
        std::fs::write(&short, "0.1,0\n1,2\n").unwrap();
        let err = load_target(&TargetSpec::Csv(short), 0.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("cover"), "{err}");

        let unsorted = dir.path().join("unsorted.csv");
        let mut file = File::create(&unsorted).unwrap();
        writeln!(file, "0,1\n0.6,2\n0.5,3\n1,4").unwrap();
        assert!(load_target(&TargetSpec::Csv(unsorted), 0.0, 1.0).is_err());

        let garbage = dir.path().join("garbage.csv");
        std::fs::write(&garbage, "0,1\nfoo,bar\n1,2\n").unwrap();
        assert!(load_target(&TargetSpec::Csv(garbage), 0.0, 1.0).is_err());

        assert!(load_target(&TargetSpec::Csv(dir.path().join("missing.csv")), 0.0, 1.0).is_err());
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(round_sig(0.123456789012345, 12), 0.123456789012);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert_eq!(fmt17(0.25), "2.5000000000000000e-1");
    }
}
