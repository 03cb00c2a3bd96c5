//! CSV output. Floats use 17 significant digits so that every value
//! parses back to the identical `f64`; lines end in LF.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{RowStatus, SweepAxis, SweepRow, TrialCounts, TrialRecord};
use crate::error::{Error, Result};
use crate::params::ModelParams;

pub const CSV_HEADER: &str =
    "axis,value,n,K,P,q,p,k,trials,t,alpha,p_kconn,p_mindeg,f_rate,wilson_hw,status";

pub const TRIALS_HEADER: &str = "trial,min_degree,kappa,k_connected,f_event,edge_count";

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn status_field(status: &RowStatus) -> String {
    status
        .to_string()
        .chars()
        .map(|c| match c {
            ',' => ';',
            '\n' | '\r' => ' ',
            c => c,
        })
        .collect()
}

fn render_row(row: &SweepRow) -> String {
    let value = match row.value {
        None => String::new(),
        Some(v) if row.axis.is_integral() && v.fract() == 0.0 => format!("{}", v as u64),
        Some(v) => float(v),
    };
    let prm = &row.params;
    [
        row.axis.label().to_string(),
        value,
        prm.n.to_string(),
        prm.ring_size.to_string(),
        prm.pool_size.to_string(),
        prm.q.to_string(),
        float(prm.p),
        row.k.to_string(),
        row.trials.to_string(),
        opt_float(row.t),
        opt_float(row.alpha),
        opt_float(row.p_kconn()),
        opt_float(row.p_mindeg()),
        opt_float(row.f_rate()),
        opt_float(row.wilson_halfwidth()),
        status_field(&row.status),
    ]
    .join(",")
}

/// Writes the header and one line per row.
pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", render_row(row))?;
    }
    out.flush()
}

pub fn write_csv_file(rows: &[SweepRow], path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_csv(rows, BufWriter::new(file)).map_err(io)
}

pub fn write_trials_csv<W: Write>(records: &[TrialRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRIALS_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.trial_index,
            r.report.min_degree,
            r.report.kappa,
            r.report.k_connected,
            r.report.f_event,
            r.edge_count
        )?;
    }
    out.flush()
}

/// Reads back a sweep CSV written by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: "missing or unexpected header".into(),
        });
    }
    lines
        .enumerate()
        .map(|(i, line)| parse_row(line, i + 2))
        .collect()
}

fn parse_row(line: &str, lineno: usize) -> Result<SweepRow> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 16 {
        return Err(err(format!("expected 16 fields, found {}", fields.len())));
    }
    fn num<T: std::str::FromStr>(field: &str, name: &str, lineno: usize) -> Result<T> {
        field.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad {name} field {field:?}"),
        })
    }
    let opt = |field: &str, name: &str| -> Result<Option<f64>> {
        if field.is_empty() {
            Ok(None)
        } else {
            num(field, name, lineno).map(Some)
        }
    };
    let axis: SweepAxis = fields[0].parse().map_err(|e: Error| err(e.to_string()))?;
    let params = ModelParams {
        n: num(fields[2], "n", lineno)?,
        ring_size: num(fields[3], "K", lineno)?,
        pool_size: num(fields[4], "P", lineno)?,
        q: num(fields[5], "q", lineno)?,
        p: num(fields[6], "p", lineno)?,
    };
    let trials: usize = num(fields[8], "trials", lineno)?;
    let count = |p: Option<f64>| p.map(|p| (p * trials as f64).round() as usize);
    let p_kconn = opt(fields[11], "p_kconn")?;
    let counts = match (count(p_kconn), count(opt(fields[12], "p_mindeg")?), count(opt(fields[13], "f_rate")?)) {
        (Some(k_connected), Some(min_degree_ok), Some(f_events)) => Some(TrialCounts {
            trials,
            k_connected,
            min_degree_ok,
            f_events,
        }),
        (None, None, None) => None,
        _ => return Err(err("probability columns are partially filled".into())),
    };
    let status = match fields[15] {
        "ok" => RowStatus::Ok,
        "infeasible" => RowStatus::Infeasible,
        other => match other.strip_prefix("error:") {
            Some(msg) => RowStatus::Error(msg.to_string()),
            None => return Err(err(format!("unknown status {other:?}"))),
        },
    };
    Ok(SweepRow {
        axis,
        value: opt(fields[1], "value")?,
        params,
        k: num(fields[7], "k", lineno)?,
        trials,
        t: opt(fields[9], "t")?,
        alpha: opt(fields[10], "alpha")?,
        counts,
        status,
    })
}
