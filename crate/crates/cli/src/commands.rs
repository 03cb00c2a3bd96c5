use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use qcomposite::experiment::{self, RunOptions, SweepAxis, SweepSpec};
use qcomposite::probability::{self as prob, Arithmetic, CriticalTarget, Prob, Solution};
use qcomposite::{ModelParams, Seed};

use crate::args::{AxisArg, ChannelProb, CriticalArgs, Output, ProbArgs, SimulateArgs, SweepArgs};
use crate::Failure;

type CmdResult = Result<(), Failure>;

fn io_failure(path: Option<&Path>, e: io::Error) -> Failure {
    match path {
        Some(p) => Failure::Io(format!("{}: {e}", p.display())),
        None => Failure::Io(e.to_string()),
    }
}

/// Writes `text` to `--out` or stdout.
fn emit(output: &Output, text: &str) -> CmdResult {
    match &output.out {
        Some(path) => {
            let mut f = File::create(path).map_err(|e| io_failure(Some(path), e))?;
            f.write_all(text.as_bytes()).map_err(|e| io_failure(Some(path), e))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| io_failure(None, e))
        }
    }
}

fn params(n: usize, ring_size: u64, pool_size: u64, q: u64, p: &ChannelProb) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(n, ring_size, pool_size, q, p.value)?)
}

pub fn prob(a: ProbArgs) -> CmdResult {
    let params = params(a.n, a.ring_size, a.pool_size, a.q, &a.p)?;
    let mode = Arithmetic::from(a.mode);
    let (k, pool, q) = (a.ring_size, a.pool_size, a.q);

    let s = prob::key_share_prob(k, pool, q, mode)?;
    let t = match mode {
        Arithmetic::Exact => Prob::Exact(prob::edge_prob_exact(k, pool, q, &a.p.exact)?),
        Arithmetic::Float => Prob::Float(prob::edge_prob_f64(&params)?),
    };
    let bound = prob::bloznelis_bound(k, pool, q, mode)?;
    let approx = prob::approx_key_share_prob(k, pool, q, mode)?;

    let mut text = String::new();
    text.push_str(&format!("s={s}\n"));
    text.push_str(&format!("t={t}\n"));
    text.push_str(&format!("bloznelis_bound={}\n", bound.value));
    text.push_str(&format!("bloznelis_vacuous={}\n", bound.vacuous));
    text.push_str(&format!("approx_s={approx}\n"));
    if a.n >= 3 && a.k >= 1 {
        text.push_str(&format!("alpha={}\n", prob::alpha_of(&params, a.k)?.alpha));
    } else {
        text.push_str("alpha=undefined\n");
    }
    emit(&a.output, &text)
}

pub fn critical(a: CriticalArgs) -> CmdResult {
    let mode = Arithmetic::from(a.mode);
    let target = CriticalTarget::new(a.n, a.k).with_offset(a.offset);
    let line = match (a.ring_size, a.pool_size, &a.p) {
        (None, Some(pool), Some(p)) => {
            let sol = prob::critical_key_ring_size(&target, pool, a.q, p.value, mode)?;
            format!("K*={}\n", show(sol))
        }
        (Some(ring), None, Some(p)) => {
            let sol = prob::critical_pool_size(&target, ring, a.q, p.value, a.pool_ceiling, mode)?;
            format!("P*={}\n", show(sol))
        }
        (Some(ring), Some(pool), None) => {
            let sol = prob::critical_channel_prob(&target, ring, pool, a.q, mode)?;
            format!("p*={}\n", show(sol))
        }
        _ => {
            return Err(Failure::Usage(
                "omit exactly one of -K, -P, -p to choose what to solve for".into(),
            ))
        }
    };
    emit(&a.output, &line)
}

fn show<T: std::fmt::Display>(sol: Solution<T>) -> String {
    match sol {
        Solution::Value(v) => v.to_string(),
        Solution::Infeasible => "infeasible".into(),
    }
}

fn csv_text(rows: &[experiment::SweepRow]) -> Result<String, Failure> {
    let mut buf = Vec::new();
    experiment::write_csv(rows, &mut buf).map_err(|e| io_failure(None, e))?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn check_workers(workers: Option<usize>) -> CmdResult {
    if workers == Some(0) {
        return Err(Failure::Invalid("--workers must be at least 1".into()));
    }
    Ok(())
}

pub fn simulate(a: SimulateArgs) -> CmdResult {
    let params = params(a.n, a.ring_size, a.pool_size, a.q, &a.p)?;
    check_workers(a.run.workers)?;
    let seed = Seed::new(a.run.seed);
    let options = RunOptions {
        workers: a.run.workers,
        keep_records: a.dump_trials.is_some(),
    };
    let run = experiment::run_point(&params, a.k, a.run.trials, seed, options)?;
    emit(&a.run.output, &csv_text(std::slice::from_ref(&run.row))?)?;

    if let Some(path) = &a.dump_trials {
        let f = File::create(path).map_err(|e| io_failure(Some(path), e))?;
        let mut w = BufWriter::new(f);
        experiment::write_trials_csv(&run.records, &mut w)
            .and_then(|()| w.flush())
            .map_err(|e| io_failure(Some(path), e))?;
    }
    if let Some(path) = &a.dump_graph {
        experiment::trial_network(&params, seed, 0)?.write_edge_list(path)?;
    }
    Ok(())
}

pub fn sweep(a: SweepArgs) -> CmdResult {
    check_workers(a.run.workers)?;
    let (axis, values) = match (a.axis, a.values, a.alpha_list) {
        (Some(axis), Some(values), None) => (
            match axis {
                AxisArg::RingSize => SweepAxis::RingSize,
                AxisArg::PoolSize => SweepAxis::PoolSize,
                AxisArg::ChannelProb => SweepAxis::ChannelProb,
                AxisArg::Nodes => SweepAxis::Nodes,
            },
            values,
        ),
        (None, None, Some(alphas)) => (SweepAxis::Alpha, alphas),
        _ => return Err(Failure::Usage("give either --axis with --values, or --alpha-list".into())),
    };

    // The swept parameter (and p for an alpha sweep) comes from each row.
    let need = |present: bool, swept: bool, flag: &str| -> CmdResult {
        if present || swept {
            Ok(())
        } else {
            Err(Failure::Usage(format!("{flag} is required for this sweep")))
        }
    };
    need(a.n.is_some(), axis == SweepAxis::Nodes, "-n")?;
    need(a.ring_size.is_some(), axis == SweepAxis::RingSize, "-K")?;
    need(a.pool_size.is_some(), axis == SweepAxis::PoolSize, "-P")?;
    need(
        a.p.is_some(),
        matches!(axis, SweepAxis::ChannelProb | SweepAxis::Alpha),
        "-p",
    )?;

    let base = ModelParams {
        n: a.n.unwrap_or(0),
        ring_size: a.ring_size.unwrap_or(0),
        pool_size: a.pool_size.unwrap_or(0),
        q: a.q,
        p: a.p.map_or(0.0, |p| p.value),
    };
    let spec = SweepSpec {
        axis,
        values,
        base,
        k: a.k,
        trials: a.run.trials,
        seed: Seed::new(a.run.seed),
    };
    let rows = experiment::sweep(
        &spec,
        RunOptions {
            workers: a.run.workers,
            keep_records: false,
        },
    );
    emit(&a.run.output, &csv_text(&rows)?)
}
