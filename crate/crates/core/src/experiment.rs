//! Parameter sweeps over simulated scenarios and comparison of measured
//! metrics against the closed-form predictions.
//!
//! Replication `r` of every sweep point runs with seed
//! `derive_seed(base.seed, r)`, so each point can be rerun alone and points
//! share arrival and service draws (common random numbers across the sweep).

use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{c_max, exp_service_upper_bound, expected_latency, throughput_k};
use crate::binning::{empirical_boundaries, exponential_boundaries, uniform_boundaries, BinConfig, ErrorModel};
use crate::error::{invalid_arg, Error, Result};
use crate::rng::derive_seed;
use crate::service::ServiceDistribution;
use crate::sim::{run_simulation, Arrivals, ServiceSource, SimConfig, SimMetrics};
use crate::stats::mean_std;

/// Requests per run at desk scale.
pub const DESK_REQUESTS: usize = 12_800;
pub const DEFAULT_REPLICATIONS: usize = 10;

/// How bin boundaries are derived for a scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BinStrategy {
    /// Equal-mass bins for uniform service, bound-minimizing bins for
    /// exponential service, equiprobable quantile bins for samples and traces.
    #[default]
    Optimal,
    /// Fixed boundaries; `k` must match.
    Explicit { boundaries: Vec<f64> },
}

fn default_requests() -> usize {
    DESK_REQUESTS
}
fn default_k() -> usize {
    1
}
fn default_servers() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

/// A simulation described by its bin count rather than explicit boundaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub arrivals: Arrivals,
    #[serde(default = "default_requests")]
    pub n_requests: usize,
    pub batch_size: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub binning: BinStrategy,
    #[serde(default)]
    pub error_model: ErrorModel,
    #[serde(default = "default_servers")]
    pub n_servers: usize,
    pub service: ServiceSource,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub flush_partial: bool,
    #[serde(default)]
    pub max_batch_wait: Option<f64>,
}

/// Closed-form predictions for a scenario; `None` where no formula applies
/// (explicit boundaries or mispredicted bins).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    /// Service capacity of all servers (a lower bound for exponential service).
    pub throughput: Option<f64>,
    /// Infinite-server latency (uniform service with Poisson arrivals).
    pub latency: Option<f64>,
    pub c_max: Option<f64>,
}

impl Scenario {
    pub fn bins(&self) -> Result<BinConfig<f64>> {
        let k = self.k;
        match &self.binning {
            BinStrategy::Explicit { boundaries } => {
                let c = BinConfig::new(boundaries.clone())?;
                if c.k() != k {
                    return Err(invalid_arg(format!("explicit boundaries give {} bins but k = {k}", c.k())));
                }
                Ok(c)
            }
            BinStrategy::Optimal => match &self.service {
                ServiceSource::Distribution(ServiceDistribution::Uniform { l_min, l_max }) => {
                    uniform_boundaries(k, *l_min, *l_max)
                }
                ServiceSource::Distribution(ServiceDistribution::Exponential { mu }) => {
                    exponential_boundaries(k, *mu, self.batch_size)
                }
                ServiceSource::Distribution(ServiceDistribution::Empirical { samples }) => {
                    empirical_boundaries(k, samples)
                }
                ServiceSource::Trace { lengths, .. } => empirical_boundaries(k, lengths),
            },
        }
    }

    pub fn to_sim_config(&self) -> Result<SimConfig> {
        let config = SimConfig {
            arrivals: self.arrivals,
            n_requests: self.n_requests,
            batch_size: self.batch_size,
            bins: self.bins()?,
            error_model: self.error_model.clone(),
            n_servers: self.n_servers,
            service: self.service.clone(),
            seed: self.seed,
            flush_partial: self.flush_partial,
            max_batch_wait: self.max_batch_wait,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn analytic(&self) -> Analytic {
        let (b, k, servers) = (self.batch_size, self.k, self.n_servers as f64);
        // the formulas assume every request reaches its true bin
        let optimal = self.binning == BinStrategy::Optimal && self.error_model.is_error_free();
        match &self.service {
            ServiceSource::Distribution(ServiceDistribution::Uniform { l_min, l_max }) => Analytic {
                throughput: optimal.then(|| throughput_k(b, k, *l_min, *l_max).ok()).flatten().map(|t| t * servers),
                latency: match self.arrivals {
                    Arrivals::Poisson { lambda } if optimal => expected_latency(b, k, *l_min, *l_max, lambda).ok(),
                    _ => None,
                },
                c_max: c_max(b, *l_min, *l_max).ok().map(|c| c * servers),
            },
            ServiceSource::Distribution(ServiceDistribution::Exponential { mu }) => Analytic {
                throughput: optimal
                    .then(|| exp_service_upper_bound(b, k, *mu).ok())
                    .flatten()
                    .map(|s| servers * b as f64 / s),
                latency: None,
                c_max: Some(servers * b as f64 * mu),
            },
            source => Analytic { throughput: None, latency: None, c_max: Some(servers * b as f64 / source.mean()) },
        }
    }
}

/// Parameter a sweep axis varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Lambda,
    K,
    #[serde(rename = "b")]
    BatchSize,
    #[serde(rename = "p_e")]
    ErrorProbability,
    NServers,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Lambda => "lambda",
            Self::K => "k",
            Self::BatchSize => "b",
            Self::ErrorProbability => "p_e",
            Self::NServers => "n_servers",
        }
    }

    fn is_count(&self) -> bool {
        matches!(self, Self::K | Self::BatchSize | Self::NServers)
    }

    fn apply(&self, scenario: &mut Scenario, value: f64) {
        match self {
            Self::Lambda => {
                scenario.arrivals =
                    if value.is_infinite() { Arrivals::Overload } else { Arrivals::Poisson { lambda: value } }
            }
            Self::K => scenario.k = value as usize,
            Self::BatchSize => scenario.batch_size = value as usize,
            Self::ErrorProbability => scenario.error_model = ErrorModel::Symmetric { p_e: value },
            Self::NServers => scenario.n_servers = value as usize,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub base: Scenario,
    #[serde(default)]
    pub axes: Vec<SweepAxis>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Run-length preset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scale {
    /// Run lengths as configured.
    #[default]
    Desk,
    /// Ten times as many requests per run.
    Full,
}

impl Scale {
    pub fn factor(&self) -> usize {
        match self {
            Self::Desk => 1,
            Self::Full => 10,
        }
    }
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Self::Desk),
            "full" => Ok(Self::Full),
            other => Err(invalid_arg(format!("unknown scale `{other}` (expected desk or full)"))),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.len() > 2 {
            return Err(invalid_arg(format!("at most 2 sweep axes allowed, got {}", self.axes.len())));
        }
        if self.replications == 0 {
            return Err(invalid_arg("replications must be at least 1"));
        }
        for axis in &self.axes {
            if axis.values.is_empty() {
                return Err(invalid_arg(format!("sweep axis `{}` has no values", axis.param.name())));
            }
            if axis.param.is_count() {
                if let Some(v) = axis.values.iter().find(|v| !(v.fract() == 0.0 && **v >= 1.0)) {
                    return Err(invalid_arg(format!("axis `{}` needs positive integers, got {v}", axis.param.name())));
                }
            }
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(invalid_arg("sweep axes must vary different parameters"));
        }
        Ok(())
    }

    pub fn scaled(mut self, scale: Scale) -> Self {
        self.base.n_requests *= scale.factor();
        self
    }

    /// Scenario for every sweep point, first axis outermost.
    pub fn points(&self) -> Vec<(Vec<f64>, Scenario)> {
        let mut points = vec![(Vec::new(), self.base.clone())];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|(vals, sc)| {
                    axis.values.iter().map(move |v| {
                        let mut sc = sc.clone();
                        axis.param.apply(&mut sc, *v);
                        let mut vals = vals.clone();
                        vals.push(*v);
                        (vals, sc)
                    })
                })
                .collect();
        }
        points
    }
}

/// Aggregate over replications for one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub point: usize,
    pub k: usize,
    pub batch_size: usize,
    pub lambda: f64,
    pub p_e: Option<f64>,
    pub n_servers: usize,
    pub replications: usize,
    pub throughput_mean: f64,
    pub throughput_std: f64,
    pub latency_mean: f64,
    pub latency_std: f64,
    pub latency_p50: f64,
    pub latency_p99: f64,
    pub busy_fraction: f64,
    pub analytic_throughput: Option<f64>,
    pub analytic_latency: Option<f64>,
    pub c_max: Option<f64>,
}

/// One simulation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub point: usize,
    pub replication: usize,
    pub seed: u64,
    pub k: usize,
    pub batch_size: usize,
    pub lambda: f64,
    pub p_e: Option<f64>,
    pub n_servers: usize,
    pub throughput: f64,
    pub latency_mean: f64,
    pub latency_p50: f64,
    pub latency_p99: f64,
    pub makespan: f64,
    pub completed: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<PointRow>,
    /// Sorted by point, then replication.
    pub replicates: Vec<ReplicateRow>,
}

fn p_e_of(model: &ErrorModel) -> Option<f64> {
    match model {
        ErrorModel::Perfect => Some(0.0),
        ErrorModel::Symmetric { p_e } => Some(*p_e),
        ErrorModel::Confusion { .. } => None,
    }
}

fn point_label(axes: &[SweepAxis], values: &[f64]) -> String {
    axes.iter().zip(values).map(|(a, v)| format!("{}={v}", a.param.name())).collect::<Vec<_>>().join(", ")
}

/// Runs every sweep point `spec.replications` times. `jobs` bounds the
/// worker pool (default: all cores); results do not depend on it.
pub fn run_experiment(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ResultsTable> {
    spec.validate()?;
    let points = spec.points();
    let mut configs = Vec::with_capacity(points.len());
    for (i, (vals, scenario)) in points.iter().enumerate() {
        let cfg = scenario.to_sim_config().map_err(|e| Error::Point {
            point: format!("#{i} ({})", point_label(&spec.axes, vals)),
            source: Box::new(e),
        })?;
        configs.push(cfg);
    }
    let tasks: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|p| (0..spec.replications).map(move |r| (p, r))).collect();

    let run_task = |&(p, r): &(usize, usize)| -> Result<(u64, SimMetrics)> {
        let mut cfg = configs[p].clone();
        cfg.seed = derive_seed(spec.base.seed, r as u64);
        let seed = cfg.seed;
        run_simulation(&cfg).map(|m| (seed, m)).map_err(|e| Error::Point {
            point: format!("#{p} ({}) replication {r}", point_label(&spec.axes, &points[p].0)),
            source: Box::new(e),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| invalid_arg(format!("thread pool: {e}")))?;
    let results: Vec<(u64, SimMetrics)> =
        pool.install(|| tasks.par_iter().map(run_task).collect::<Result<Vec<_>>>())?;

    let mut table = ResultsTable::default();
    for (p, (_, scenario)) in points.iter().enumerate() {
        let runs = &results[p * spec.replications..(p + 1) * spec.replications];
        let lambda = scenario.arrivals.rate();
        let p_e = p_e_of(&scenario.error_model);
        for (r, (seed, m)) in runs.iter().enumerate() {
            table.replicates.push(ReplicateRow {
                point: p,
                replication: r,
                seed: *seed,
                k: scenario.k,
                batch_size: scenario.batch_size,
                lambda,
                p_e,
                n_servers: scenario.n_servers,
                throughput: m.throughput,
                latency_mean: m.latency_mean,
                latency_p50: m.latency_p50,
                latency_p99: m.latency_p99,
                makespan: m.makespan,
                completed: m.completed,
            });
        }
        let col = |f: fn(&SimMetrics) -> f64| runs.iter().map(|(_, m)| f(m)).collect::<Vec<_>>();
        let (throughput_mean, throughput_std) = mean_std(&col(|m| m.throughput));
        let (latency_mean, latency_std) = mean_std(&col(|m| m.latency_mean));
        let analytic = scenario.analytic();
        table.rows.push(PointRow {
            point: p,
            k: scenario.k,
            batch_size: scenario.batch_size,
            lambda,
            p_e,
            n_servers: scenario.n_servers,
            replications: spec.replications,
            throughput_mean,
            throughput_std,
            latency_mean,
            latency_std,
            latency_p50: mean_std(&col(|m| m.latency_p50)).0,
            latency_p99: mean_std(&col(|m| m.latency_p99)).0,
            busy_fraction: mean_std(&col(|m| m.server_busy_fraction)).0,
            analytic_throughput: analytic.throughput,
            analytic_latency: analytic.latency,
            c_max: analytic.c_max,
        });
    }
    Ok(table)
}

impl ResultsTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }

    pub fn write_replicates_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.replicates, out)
    }
}

fn write_rows<S: Serialize, W: Write>(rows: &[S], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Metric checked by [`compare`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareMetric {
    Throughput,
    Latency,
}

impl CompareMetric {
    fn columns(&self) -> (&'static str, &'static str) {
        match self {
            Self::Throughput => ("throughput_mean", "analytic_throughput"),
            Self::Latency => ("latency_mean", "analytic_latency"),
        }
    }
}

impl std::str::FromStr for CompareMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "throughput" => Ok(Self::Throughput),
            "latency" => Ok(Self::Latency),
            other => Err(invalid_arg(format!("unknown metric `{other}` (expected throughput or latency)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    /// Data row number, starting at 1.
    pub row: usize,
    pub measured: f64,
    pub analytic: f64,
    pub rel_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub metric: CompareMetric,
    pub tolerance: f64,
    pub rows: Vec<CompareRow>,
    /// Rows without an analytic value.
    pub skipped: usize,
}

impl CompareReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(
                f,
                "row {:>4}  measured {:>12.6}  analytic {:>12.6}  rel_error {:.4}  {}",
                r.row,
                r.measured,
                r.analytic,
                r.rel_error,
                if r.pass { "PASS" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "{:?}: {} checked, {} failed, {} skipped (tolerance {})",
            self.metric,
            self.rows.len(),
            self.failures(),
            self.skipped,
            self.tolerance
        )
    }
}

/// Relative error `|measured - analytic| / analytic` per row of a results
/// CSV, flagged against `tolerance`.
pub fn compare<R: Read>(table: R, metric: CompareMetric, tolerance: f64) -> Result<CompareReport> {
    let mut rdr = csv::Reader::from_reader(table);
    let headers = rdr.headers()?.clone();
    let (measured_col, analytic_col) = metric.columns();
    let find =
        |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn(name.to_string()));
    let (mi, ai) = (find(measured_col)?, find(analytic_col)?);
    let mut report = CompareReport { metric, tolerance, rows: Vec::new(), skipped: 0 };
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let analytic = record.get(ai).unwrap_or("");
        if analytic.is_empty() {
            report.skipped += 1;
            continue;
        }
        let parse = |s: &str, col: &str| {
            s.parse::<f64>().map_err(|e| invalid_arg(format!("row {}: bad {col} `{s}`: {e}", idx + 1)))
        };
        let analytic = parse(analytic, analytic_col)?;
        let measured = parse(record.get(mi).unwrap_or(""), measured_col)?;
        let rel_error = (measured - analytic).abs() / analytic.abs();
        report.rows.push(CompareRow { row: idx + 1, measured, analytic, rel_error, pass: rel_error <= tolerance });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_base() -> Scenario {
        Scenario {
            arrivals: Arrivals::Overload,
            n_requests: 2560,
            batch_size: 128,
            k: 1,
            binning: BinStrategy::Optimal,
            error_model: ErrorModel::Perfect,
            n_servers: 1,
            service: ServiceSource::Distribution(ServiceDistribution::uniform(1.0, 20.0).unwrap()),
            seed: 7,
            flush_partial: true,
            max_batch_wait: None,
        }
    }

    #[test]
    fn scenario_json_defaults() {
        let json = r#"{
            "arrivals": {"kind": "poisson", "lambda": 5.0},
            "batch_size": 8,
            "service": {"distribution": {"kind": "uniform", "l_min": 1.0, "l_max": 20.0}}
        }"#;
        let s: Scenario = serde_json::from_str(json).unwrap();
        assert_eq!(s.n_requests, DESK_REQUESTS);
        assert_eq!(s.k, 1);
        assert_eq!(s.n_servers, 1);
        assert!(s.flush_partial);
        assert_eq!(s.error_model, ErrorModel::Perfect);
    }

    #[test]
    fn optimal_bins_by_source() {
        let mut s = fig3_base();
        s.k = 2;
        assert_eq!(s.bins().unwrap().boundaries(), &[1.0, 10.5, 20.0]);
        s.service = ServiceSource::Distribution(ServiceDistribution::exponential(1.0).unwrap());
        s.batch_size = 200;
        assert!((s.bins().unwrap().boundaries()[1] - 1.771_221_833_059_668).abs() < 1e-12);
        s.service = ServiceSource::Trace { lengths: vec![1.0, 2.0, 3.0, 4.0], mode: Default::default() };
        assert_eq!(s.bins().unwrap().boundaries(), &[1.0, 2.5, 4.0]);
        s.binning = BinStrategy::Explicit { boundaries: vec![1.0, 4.0] };
        assert!(s.bins().is_err());
    }

    #[test]
    fn analytic_columns() {
        let mut s = fig3_base();
        let a = s.analytic();
        assert!((a.throughput.unwrap() - 6.447_481_452_557_594).abs() < 1e-12);
        assert!(a.latency.is_none());
        s.arrivals = Arrivals::Poisson { lambda: 10.0 };
        s.n_servers = 2;
        let a = s.analytic();
        assert!((a.latency.unwrap() - 26.202_713_178_294_573).abs() < 1e-12);
        assert!((a.c_max.unwrap() - 2.0 * 128.0 / 10.5).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let axis = |param, values: Vec<f64>| SweepAxis { param, values };
        let mut spec = ExperimentSpec {
            name: "x".into(),
            base: fig3_base(),
            axes: vec![axis(SweepParam::K, vec![1.0, 2.0])],
            replications: 1,
            output: None,
        };
        assert!(spec.validate().is_ok());
        spec.axes.push(axis(SweepParam::K, vec![3.0]));
        assert!(spec.validate().is_err());
        spec.axes = vec![
            axis(SweepParam::K, vec![1.0]),
            axis(SweepParam::Lambda, vec![1.0]),
            axis(SweepParam::NServers, vec![1.0]),
        ];
        assert!(spec.validate().is_err());
        spec.axes = vec![axis(SweepParam::K, vec![1.5])];
        assert!(spec.validate().is_err());
        spec.axes = vec![];
        spec.replications = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn points_cartesian_first_axis_outer() {
        let spec = ExperimentSpec {
            name: "x".into(),
            base: fig3_base(),
            axes: vec![
                SweepAxis { param: SweepParam::K, values: vec![1.0, 2.0] },
                SweepAxis { param: SweepParam::ErrorProbability, values: vec![0.1, 0.2, 0.3] },
            ],
            replications: 1,
            output: None,
        };
        let pts = spec.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0].0, vec![1.0, 0.1]);
        assert_eq!(pts[5].0, vec![2.0, 0.3]);
        assert_eq!(pts[4].1.k, 2);
        assert_eq!(pts[4].1.error_model, ErrorModel::Symmetric { p_e: 0.2 });
    }

    #[test]
    fn results_independent_of_parallelism() {
        let spec = ExperimentSpec {
            name: "x".into(),
            base: fig3_base(),
            axes: vec![SweepAxis { param: SweepParam::K, values: vec![1.0, 2.0, 3.0] }],
            replications: 3,
            output: None,
        };
        let a = run_experiment(&spec, Some(1)).unwrap();
        let b = run_experiment(&spec, Some(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 3);
        assert_eq!(a.replicates.len(), 9);
        let order: Vec<(usize, usize)> = a.replicates.iter().map(|r| (r.point, r.replication)).collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
    }

    #[test]
    fn csv_columns_are_stable() {
        let spec = ExperimentSpec { name: "x".into(), base: fig3_base(), axes: vec![], replications: 1, output: None };
        let table = run_experiment(&spec, Some(1)).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "point,k,batch_size,lambda,p_e,n_servers,replications,throughput_mean,throughput_std,\
             latency_mean,latency_std,latency_p50,latency_p99,busy_fraction,analytic_throughput,\
             analytic_latency,c_max"
        );
        assert!(text.lines().nth(1).unwrap().starts_with("0,1,128,inf,0.0,1,1,"));
    }

    #[test]
    fn compare_flags_and_skips() {
        let csv = "throughput_mean,analytic_throughput,latency_mean,analytic_latency\n\
                   6.40,6.4475,30.0,\n\
                   5.00,6.4475,30.0,26.2\n";
        let r = compare(csv.as_bytes(), CompareMetric::Throughput, 0.02).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows[0].pass && !r.rows[1].pass);
        assert!(!r.passed());
        let r = compare(csv.as_bytes(), CompareMetric::Latency, 0.05).unwrap();
        assert_eq!(r.skipped, 1);
        assert_eq!(r.failures(), 1);
        let err = compare("a,b\n1,2\n".as_bytes(), CompareMetric::Throughput, 0.02).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "throughput_mean"));
    }
}
