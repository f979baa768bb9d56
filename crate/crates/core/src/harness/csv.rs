//! Metrics tables: per-seed rows, cross-seed aggregation and CSV text.

use serde::{Deserialize, Serialize};

use crate::dcg::EpisodeRecord;
use crate::{Error, Result};

/// Six significant digits, `%g` style: fixed notation for exponents in
/// `[-4, 6)`, scientific otherwise, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string().to_lowercase();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..6).contains(&exp) {
        let fixed = format!("{x:.*}", (5 - exp) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub seed: u64,
    pub episode: usize,
    pub env_step: usize,
    pub train_return: f64,
    pub eval_return_mean: f64,
    pub epsilon: f64,
    pub loss_mean: f64,
    pub captures: usize,
    pub miscaptures: usize,
}

pub const METRICS_HEADER: &str =
    "seed,episode,env_step,train_return,eval_return_mean,epsilon,loss_mean,captures,miscaptures";

impl MetricsRow {
    pub fn new(seed: u64, r: &EpisodeRecord) -> MetricsRow {
        MetricsRow {
            seed,
            episode: r.episode,
            env_step: r.env_step,
            train_return: r.train_return,
            eval_return_mean: r.eval_return_mean,
            epsilon: r.epsilon,
            loss_mean: r.loss_mean,
            captures: r.captures,
            miscaptures: r.miscaptures,
        }
    }

    fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.episode,
            self.env_step,
            fmt_float(self.train_return),
            fmt_float(self.eval_return_mean),
            fmt_float(self.epsilon),
            fmt_float(self.loss_mean),
            self.captures,
            self.miscaptures
        )
    }
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(METRICS_HEADER) {
        return Err(Error::Format("metrics CSV header mismatch".into()));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(Error::Format(format!("bad metrics row {line:?}")));
            }
            Ok(MetricsRow {
                seed: field(f[0], line)?,
                episode: field(f[1], line)?,
                env_step: field(f[2], line)?,
                train_return: field(f[3], line)?,
                eval_return_mean: field(f[4], line)?,
                epsilon: field(f[5], line)?,
                loss_mean: field(f[6], line)?,
                captures: field(f[7], line)?,
                miscaptures: field(f[8], line)?,
            })
        })
        .collect()
}

fn field<T: std::str::FromStr>(text: &str, line: &str) -> Result<T> {
    text.parse()
        .map_err(|_| Error::Format(format!("bad field {text:?} in metrics row {line:?}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub env_step: usize,
    pub n_seeds: usize,
    pub train_return_mean: f64,
    pub train_return_std: f64,
    pub eval_return_mean: f64,
    pub eval_return_std: f64,
}

pub const AGGREGATE_HEADER: &str =
    "env_step,n_seeds,train_return_mean,train_return_std,eval_return_mean,eval_return_std";

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Cross-seed statistics at env steps `every, 2*every, ..` up to `max_step`.
/// Each seed contributes its last episode that ended at or before the step;
/// checkpoints where some seed has no finished episode are skipped.
pub fn aggregate(per_seed: &[Vec<MetricsRow>], every: usize, max_step: usize) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    let mut step = every;
    while step <= max_step {
        let picks: Vec<&MetricsRow> = per_seed
            .iter()
            .filter_map(|rows| rows.iter().rev().find(|r| r.env_step <= step))
            .collect();
        if picks.len() == per_seed.len() && !picks.is_empty() {
            let train: Vec<f64> = picks.iter().map(|r| r.train_return).collect();
            let eval: Vec<f64> = picks.iter().map(|r| r.eval_return_mean).collect();
            let (tm, ts) = mean_std(&train);
            let (em, es) = mean_std(&eval);
            out.push(AggregateRow {
                env_step: step,
                n_seeds: picks.len(),
                train_return_mean: tm,
                train_return_std: ts,
                eval_return_mean: em,
                eval_return_std: es,
            });
        }
        step += every;
    }
    out
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.env_step,
            r.n_seeds,
            fmt_float(r.train_return_mean),
            fmt_float(r.train_return_std),
            fmt_float(r.eval_return_mean),
            fmt_float(r.eval_return_std)
        ));
    }
    out
}
