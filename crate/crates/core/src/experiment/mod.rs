//! Monte Carlo harness.
//!
//! A point runs `T` independent trials, each a fresh deployment drawn from
//! `seed.trial(i)`, and counts k-connected graphs, graphs with minimum
//! degree at least `k`, and graphs in between (the F-event). Sweeps give
//! row `i` the seed `seed.point(i)`. Trials may run on any number of
//! threads; results are folded in trial order, so output never depends on
//! scheduling.

mod csv;

pub use self::csv::{parse_csv, write_csv, write_csv_file, write_trials_csv, CSV_HEADER, TRIALS_HEADER};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::connectivity::{analyze, ConnectivityReport};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::params::ModelParams;
use crate::probability::{alpha_of, channel_prob_for_alpha, critical_edge_prob, edge_prob_f64};
use crate::sampling::{generate_network, Seed};

pub const DEFAULT_TRIALS: usize = 500;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub report: ConnectivityReport,
    pub edge_count: usize,
}

/// Outcome counts over one point's trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialCounts {
    pub trials: usize,
    pub k_connected: usize,
    pub min_degree_ok: usize,
    pub f_events: usize,
}

impl TrialCounts {
    fn add(mut self, report: &ConnectivityReport) -> Self {
        self.trials += 1;
        self.k_connected += usize::from(report.k_connected);
        self.min_degree_ok += usize::from(report.f_event || report.k_connected);
        self.f_events += usize::from(report.f_event);
        self
    }

    pub fn p_kconn(&self) -> f64 {
        self.k_connected as f64 / self.trials as f64
    }

    pub fn p_mindeg(&self) -> f64 {
        self.min_degree_ok as f64 / self.trials as f64
    }

    pub fn f_rate(&self) -> f64 {
        self.f_events as f64 / self.trials as f64
    }

    /// `count(min degree >= k) == count(k-connected) + count(F-event)`.
    pub fn identity_holds(&self) -> bool {
        self.min_degree_ok == self.k_connected + self.f_events
    }
}

/// Half-width of the 95% Wilson score interval for `successes / trials`.
pub fn wilson_halfwidth(successes: usize, trials: usize) -> f64 {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// A single point outside any sweep.
    Point,
    RingSize,
    PoolSize,
    ChannelProb,
    Nodes,
    /// Target deviation; `p` is solved for each value.
    Alpha,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::Point => "point",
            SweepAxis::RingSize => "K",
            SweepAxis::PoolSize => "P",
            SweepAxis::ChannelProb => "p",
            SweepAxis::Nodes => "n",
            SweepAxis::Alpha => "alpha",
        }
    }

    fn is_integral(self) -> bool {
        matches!(self, SweepAxis::RingSize | SweepAxis::PoolSize | SweepAxis::Nodes)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "point" => SweepAxis::Point,
            "K" => SweepAxis::RingSize,
            "P" => SweepAxis::PoolSize,
            "p" => SweepAxis::ChannelProb,
            "n" => SweepAxis::Nodes,
            "alpha" => SweepAxis::Alpha,
            other => return Err(Error::invalid(format!("unknown sweep axis {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Infeasible,
    Error(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::Infeasible => f.write_str("infeasible"),
            RowStatus::Error(msg) => write!(f, "error:{msg}"),
        }
    }
}

/// One parameter point of a sweep and its empirical probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: Option<f64>,
    pub params: ModelParams,
    pub k: usize,
    pub trials: usize,
    pub t: Option<f64>,
    pub alpha: Option<f64>,
    /// Present only for rows that ran.
    pub counts: Option<TrialCounts>,
    pub status: RowStatus,
}

impl SweepRow {
    pub fn p_kconn(&self) -> Option<f64> {
        self.counts.map(|c| c.p_kconn())
    }

    pub fn p_mindeg(&self) -> Option<f64> {
        self.counts.map(|c| c.p_mindeg())
    }

    pub fn f_rate(&self) -> Option<f64> {
        self.counts.map(|c| c.f_rate())
    }

    pub fn wilson_halfwidth(&self) -> Option<f64> {
        self.counts.map(|c| wilson_halfwidth(c.k_connected, c.trials))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub keep_records: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointRun {
    pub row: SweepRow,
    /// Per-trial records in trial order, when requested.
    pub records: Vec<TrialRecord>,
}

/// Network of trial `index` at a point seeded with `seed`.
pub fn trial_network(params: &ModelParams, seed: Seed, index: usize) -> Result<Graph> {
    generate_network(params, seed.trial(index as u64))
}

fn run_trial(params: &ModelParams, k: usize, seed: Seed, index: usize) -> Result<TrialRecord> {
    let g = trial_network(params, seed, index)?;
    let report = analyze(&g, k)?;
    assert!(
        report.kappa <= report.min_degree,
        "node connectivity {} exceeds minimum degree {}",
        report.kappa,
        report.min_degree
    );
    Ok(TrialRecord {
        trial_index: index,
        report,
        edge_count: g.edge_count(),
    })
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn check_run_args(params: &ModelParams, k: usize, trials: usize) -> Result<()> {
    params.validate()?;
    if k == 0 {
        return Err(Error::invalid("connectivity order k must be at least 1"));
    }
    if trials == 0 {
        return Err(Error::invalid("trial count must be at least 1"));
    }
    Ok(())
}

/// Runs `trials` trials at one point.
pub fn run_point(
    params: &ModelParams,
    k: usize,
    trials: usize,
    seed: Seed,
    options: RunOptions,
) -> Result<PointRun> {
    check_run_args(params, k, trials)?;
    let records: Vec<TrialRecord> = with_workers(options.workers, || {
        (0..trials)
            .into_par_iter()
            .map(|i| run_trial(params, k, seed, i))
            .collect::<Result<Vec<_>>>()
    })??;
    let counts = records
        .iter()
        .fold(TrialCounts::default(), |acc, r| acc.add(&r.report));
    debug_assert!(counts.identity_holds());

    let t = edge_prob_f64(params)?;
    let alpha = (params.n >= 3).then(|| alpha_of(params, k)).transpose()?;
    let row = SweepRow {
        axis: SweepAxis::Point,
        value: None,
        params: *params,
        k,
        trials,
        t: Some(t),
        alpha: alpha.map(|a| a.alpha),
        counts: Some(counts),
        status: RowStatus::Ok,
    };
    Ok(PointRun {
        row,
        records: if options.keep_records { records } else { Vec::new() },
    })
}

/// A sweep along one axis from a base point.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub base: ModelParams,
    pub k: usize,
    pub trials: usize,
    pub seed: Seed,
}

fn integral(value: f64) -> Option<u64> {
    (value >= 0.0 && value.fract() == 0.0 && value <= u64::MAX as f64).then_some(value as u64)
}

/// Runs one row per value, in order. Invalid points become `error` rows
/// and unreachable alpha targets become `infeasible` rows; neither stops
/// the sweep.
pub fn sweep(spec: &SweepSpec, options: RunOptions) -> Vec<SweepRow> {
    spec.values
        .iter()
        .enumerate()
        .map(|(i, &value)| sweep_row(spec, i, value, options))
        .collect()
}

fn sweep_row(spec: &SweepSpec, index: usize, value: f64, options: RunOptions) -> SweepRow {
    let mut row = SweepRow {
        axis: spec.axis,
        value: Some(value),
        params: spec.base,
        k: spec.k,
        trials: spec.trials,
        t: None,
        alpha: None,
        counts: None,
        status: RowStatus::Ok,
    };
    if spec.axis.is_integral() && integral(value).is_none() {
        row.status = RowStatus::Error(format!("{} must be a nonnegative integer, got {value}", spec.axis));
        return row;
    }
    match spec.axis {
        SweepAxis::Point => {}
        SweepAxis::RingSize => row.params.ring_size = value as u64,
        SweepAxis::PoolSize => row.params.pool_size = value as u64,
        SweepAxis::ChannelProb => row.params.p = value,
        SweepAxis::Nodes => row.params.n = value as usize,
        SweepAxis::Alpha => {
            let base = &spec.base;
            let solved = critical_edge_prob(base.n, spec.k, value).and_then(|t| {
                row.t = Some(t);
                row.alpha = Some(value);
                channel_prob_for_alpha(base.n, base.ring_size, base.pool_size, base.q, spec.k, value)
            });
            match solved {
                Ok(Some(p)) => row.params.p = p,
                Ok(None) => {
                    // Keep the channel probability the target would need.
                    row.params.p = required_channel_prob(base, row.t.unwrap_or(f64::NAN));
                    row.status = RowStatus::Infeasible;
                    return row;
                }
                Err(e) => {
                    row.status = RowStatus::Error(e.to_string());
                    return row;
                }
            }
        }
    }
    match run_point(&row.params, spec.k, spec.trials, spec.seed.point(index as u64), options) {
        Ok(run) => SweepRow {
            axis: spec.axis,
            value: Some(value),
            ..run.row
        },
        Err(e) => {
            row.t = None;
            row.alpha = None;
            row.status = RowStatus::Error(e.to_string());
            row
        }
    }
}

fn required_channel_prob(base: &ModelParams, t: f64) -> f64 {
    crate::probability::key_share_prob_f64(base.ring_size, base.pool_size, base.q)
        .map(|s| t / s)
        .unwrap_or(f64::NAN)
}
