use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use multibin::analytics::{
    c_max, exp_service_upper_bound, exp_throughput_lower_bound, expected_latency, expected_service_time_k,
    min_bins_for_throughput, throughput_k,
};
use multibin::binning::{exponential_boundaries, uniform_boundaries, ErrorModel};
use multibin::experiment::{compare, run_experiment, CompareMetric, ExperimentSpec, Scale, Scenario};
use multibin::sim::{run_detailed, write_request_log, Arrivals, ServiceSource, TraceMode};
use multibin::workload::{fit_linear_model, load_trace, LinearTimeModel, TraceFormat};

/// Multi-bin batching: closed-form analysis and discrete-event simulation.
#[derive(Parser)]
#[command(name = "multibin", version, about)]
struct Cli {
    /// Override the master seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for files the command writes.
    #[arg(long, global = true, env = "MULTIBIN_OUT_DIR", default_value = ".")]
    out: PathBuf,
    /// Run length preset; `full` runs ten times as many requests.
    #[arg(long, global = true, value_enum, default_value_t = ScaleArg::Desk)]
    scale: ScaleArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Full,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Full => Scale::Full,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print closed-form service time, throughput and latency per bin count as CSV.
    Analyze(AnalyzeArgs),
    /// Run one simulation and print its metrics as JSON.
    Simulate(SimulateArgs),
    /// Run an experiment sweep and write the results CSV.
    Sweep(SweepArgs),
    /// Check a results CSV against its analytic columns; exits 2 on any failure.
    Compare(CompareArgs),
    /// Fit a linear token-count to service-time model from a trace.
    Fit(FitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Exponential,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, short = 'b', default_value_t = 128)]
    batch_size: usize,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
    #[arg(long, default_value_t = 1.0)]
    l_min: f64,
    #[arg(long, default_value_t = 20.0)]
    l_max: f64,
    /// Exponential service rate.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Largest bin count in the table.
    #[arg(long, default_value_t = 16)]
    k_max: usize,
    /// Arrival rate for the latency column (uniform service only).
    #[arg(long)]
    lambda: Option<f64>,
    /// Also report the fewest bins reaching `c_max - epsilon` (uniform service only).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Include the bin boundaries in the table.
    #[arg(long)]
    boundaries: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file.
    config: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    /// Poisson arrival rate; `inf` for overload.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n_requests: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    n_servers: Option<usize>,
    /// Symmetric misprediction probability.
    #[arg(long)]
    p_e: Option<f64>,
    /// Confusion matrix file (one row per line, whitespace or comma separated).
    #[arg(long, conflicts_with = "p_e")]
    confusion: Option<PathBuf>,
    /// Request trace (CSV or JSONL); replaces the configured service source.
    #[arg(long, requires = "model")]
    trace: Option<PathBuf>,
    /// Linear time model JSON used to convert trace token counts to times.
    #[arg(long, requires = "trace")]
    model: Option<PathBuf>,
    /// Sample the trace with replacement instead of cycling through it.
    #[arg(long, requires = "trace")]
    resample: bool,
    /// Write one JSON line per request to this file, under the output directory.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment JSON file.
    config: PathBuf,
    /// Worker threads (defaults to all cores); results do not depend on it.
    #[arg(long, short = 'j')]
    jobs: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    /// Also write one row per replication to `<name>_replicates.csv`.
    #[arg(long)]
    replicates: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Results CSV written by `sweep`.
    results: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::Throughput)]
    metric: MetricArg,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 0.02)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Throughput,
    Latency,
}

#[derive(Args)]
struct FitArgs {
    /// Trace with `token_count` and `measured_time` for every entry.
    trace: PathBuf,
    /// Write the model to this file under the output directory instead of stdout.
    #[arg(long)]
    model: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let ctx = Globals { seed: cli.seed, out: cli.out, scale: cli.scale.into() };
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a, &ctx),
        Command::Sweep(a) => sweep(a, &ctx),
        Command::Compare(a) => compare_cmd(a),
        Command::Fit(a) => fit(a, &ctx),
    }
}

struct Globals {
    seed: Option<u64>,
    out: PathBuf,
    scale: Scale,
}

impl Globals {
    /// Creates a file under the output directory (absolute paths are kept).
    fn create(&self, name: &Path) -> anyhow::Result<(PathBuf, BufWriter<File>)> {
        let path = self.out.join(name);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok((path, BufWriter::new(file)))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn analyze(a: AnalyzeArgs) -> anyhow::Result<ExitCode> {
    if a.k_max == 0 {
        bail!("--k-max must be at least 1");
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let b = a.batch_size;
    match a.dist {
        DistArg::Uniform => {
            let cmax = c_max(b, a.l_min, a.l_max)?;
            write!(out, "k,service_time,throughput,c_max,latency")?;
            if a.boundaries {
                write!(out, ",boundaries")?;
            }
            writeln!(out)?;
            for k in 1..=a.k_max {
                let latency = a.lambda.map(|l| expected_latency(b, k, a.l_min, a.l_max, l)).transpose()?;
                write!(
                    out,
                    "{k},{},{},{cmax},{}",
                    expected_service_time_k(b, k, a.l_min, a.l_max)?,
                    throughput_k(b, k, a.l_min, a.l_max)?,
                    fmt_opt(latency)
                )?;
                if a.boundaries {
                    write!(out, ",{}", join(uniform_boundaries(k, a.l_min, a.l_max)?.boundaries()))?;
                }
                writeln!(out)?;
            }
            if let Some(eps) = a.epsilon {
                let k = min_bins_for_throughput(b, a.l_min, a.l_max, eps)?;
                eprintln!("fewest bins reaching c_max - {eps}: {k}");
            }
        }
        DistArg::Exponential => {
            if a.lambda.is_some() || a.epsilon.is_some() {
                bail!("--lambda and --epsilon apply to uniform service only");
            }
            write!(out, "k,service_upper_bound,throughput_lower_bound,c_max")?;
            if a.boundaries {
                write!(out, ",boundaries")?;
            }
            writeln!(out)?;
            let cmax = b as f64 * a.mu;
            for k in 1..=a.k_max {
                write!(
                    out,
                    "{k},{},{},{cmax}",
                    exp_service_upper_bound(b, k, a.mu)?,
                    exp_throughput_lower_bound(b, k, a.mu)?
                )?;
                if a.boundaries {
                    write!(out, ",{}", join(exponential_boundaries(k, a.mu, b)?.boundaries()))?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

fn simulate(a: SimulateArgs, ctx: &Globals) -> anyhow::Result<ExitCode> {
    let mut scenario: Scenario = read_json(&a.config)?;
    if let Some(seed) = ctx.seed {
        scenario.seed = seed;
    }
    scenario.n_requests *= ctx.scale.factor();
    if let Some(k) = a.k {
        scenario.k = k;
    }
    if let Some(lambda) = a.lambda {
        scenario.arrivals = if lambda.is_infinite() { Arrivals::Overload } else { Arrivals::Poisson { lambda } };
    }
    if let Some(n) = a.n_requests {
        scenario.n_requests = n;
    }
    if let Some(b) = a.batch_size {
        scenario.batch_size = b;
    }
    if let Some(s) = a.n_servers {
        scenario.n_servers = s;
    }
    if let Some(p) = a.p_e {
        scenario.error_model = ErrorModel::symmetric(p)?;
    }
    if let Some(path) = &a.confusion {
        scenario.error_model = multibin::binning::load_confusion_matrix(path)?;
    }
    if let (Some(trace), Some(model)) = (&a.trace, &a.model) {
        let model = LinearTimeModel::<f64>::load(model)?;
        let lengths = load_trace(trace, TraceFormat::from_path(trace))?.service_times(&model)?;
        let mode = if a.resample { TraceMode::Resample } else { TraceMode::Cyclic };
        scenario.service = ServiceSource::Trace { lengths, mode };
    }
    let config = scenario.to_sim_config()?;
    let run = run_detailed(&config)?;
    if let Some(log) = &a.log {
        let (path, mut w) = ctx.create(log)?;
        write_request_log(&run.requests, &run.batches, &mut w)?;
        w.flush()?;
        eprintln!("wrote {}", path.display());
    }
    let report = serde_json::json!({
        "metrics": run.metrics,
        "analytic": scenario.analytic(),
        "boundaries": config.bins.boundaries(),
        "seed": scenario.seed,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn sweep(a: SweepArgs, ctx: &Globals) -> anyhow::Result<ExitCode> {
    let mut spec: ExperimentSpec = read_json(&a.config)?;
    if let Some(seed) = ctx.seed {
        spec.base.seed = seed;
    }
    if let Some(r) = a.replications {
        spec.replications = r;
    }
    if a.jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }
    let spec = spec.scaled(ctx.scale);
    let table = run_experiment(&spec, a.jobs)?;
    let name = spec.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", spec.name)));
    let (path, w) = ctx.create(&name)?;
    table.write_csv(w)?;
    eprintln!("wrote {} ({} points)", path.display(), table.rows.len());
    if a.replicates {
        let stem = name.with_extension("");
        let mut rep = stem.into_os_string();
        rep.push("_replicates.csv");
        let (path, w) = ctx.create(Path::new(&rep))?;
        table.write_replicates_csv(w)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn compare_cmd(a: CompareArgs) -> anyhow::Result<ExitCode> {
    let metric = match a.metric {
        MetricArg::Throughput => CompareMetric::Throughput,
        MetricArg::Latency => CompareMetric::Latency,
    };
    if a.tolerance.is_nan() || a.tolerance < 0.0 {
        bail!("--tolerance must be non-negative");
    }
    let file = File::open(&a.results).with_context(|| format!("opening {}", a.results.display()))?;
    let report = compare(file, metric, a.tolerance)?;
    println!("{report}");
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn fit(a: FitArgs, ctx: &Globals) -> anyhow::Result<ExitCode> {
    let trace = load_trace(&a.trace, TraceFormat::from_path(&a.trace))?;
    let model = fit_linear_model::<f64>(&trace)?;
    let text = serde_json::to_string_pretty(&model)?;
    match &a.model {
        Some(name) => {
            let (path, mut w) = ctx.create(name)?;
            writeln!(w, "{text}")?;
            w.flush()?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
