use pssts::closedform::{threshold_time, PhasePoint, Pssts};
use pssts::compare::{compare_evolved, compare_with_oracle, CompareOptions, Tolerance};
use pssts::fockoracle::{build_pssts, TruncationPolicy};
use pssts::grid::GridSpec;
use pssts::{ChannelParams, Error, Result, StateParams};
use serde_json::{json, Value};

use crate::args::{Format, RSweep, Request};
use crate::output::{Cell, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    ToleranceBreach,
    Truncation,
}

pub fn is_truncation(e: &Error) -> bool {
    matches!(
        e,
        Error::MaxDimExceeded { .. }
            | Error::UnitarityLoss { .. }
            | Error::StepSizeTooCoarse { .. }
            | Error::DisplacementOutOfRange { .. }
            | Error::GridTooSmall { .. }
    )
}

impl Request {
    /// Re-checks everything the flags would have checked, for requests
    /// read back from files.
    pub fn validate(&self) -> Result<()> {
        let sweep = |nbar: f64, s: &RSweep, m: &[u32]| -> Result<()> {
            StateParams::new(nbar, 0.0, 0)?;
            RSweep::new(s.r_min, s.r_max, s.r_steps)?;
            if m.is_empty() {
                return Err(Error::InvalidParameter("need at least one m".into()));
            }
            Ok(())
        };
        match self {
            Request::MandelSweep { nbar, sweep: s, m }
            | Request::FidelitySweep { nbar, sweep: s, m } => sweep(*nbar, s, m),
            Request::Threshold { nbar, r, nth } => {
                StateParams::new(*nbar, *r, 1)?;
                ChannelParams::new(0.0, *nth).map(|_| ())
            }
            Request::OracleCompare { max_dim, .. } => TruncationPolicy {
                max_dim: *max_dim,
                ..Default::default()
            }
            .validate(),
            Request::Pnd { .. } | Request::Wigner { .. } => Ok(()),
        }
    }

    pub fn run(&self) -> Result<(Report, Status)> {
        let ok = |r: Report| Ok((r, Status::Ok));
        match self {
            Request::Pnd { state, n_max } => ok(pnd(self, state, *n_max)),
            Request::MandelSweep { nbar, sweep, m } => ok(mandel_sweep(self, *nbar, sweep, m)),
            Request::Wigner {
                state,
                grid,
                channel,
            } => wigner(self, state, grid, channel.as_ref()).map(|r| (r, Status::Ok)),
            Request::Threshold { nbar, r, nth } => ok(threshold(self, *nbar, *r, *nth)),
            Request::FidelitySweep { nbar, sweep, m } => ok(fidelity_sweep(self, *nbar, sweep, m)),
            Request::OracleCompare {
                state,
                channel,
                max_dim,
            } => oracle_compare(self, state, channel.as_ref(), *max_dim),
        }
    }
}

fn pnd(req: &Request, state: &StateParams, n_max: usize) -> Report {
    let s = Pssts::new(*state);
    let probs = s.pnd_table(n_max);
    let mut table = Table::new(&["n", "probability"]);
    for (n, p) in probs.iter().enumerate() {
        table.rows.push(vec![Cell::Int(n as u64), Cell::from(*p)]);
    }
    let sum: f64 = probs.iter().sum();
    let mode = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(n, _)| n);
    Report {
        request: req.clone(),
        summary: json!({
            "sum": sum,
            "tail": 1.0 - sum,
            "mean_photon": s.mean_photon(),
            "mode": mode,
        }),
        table,
        default_format: Format::Csv,
    }
}

/// Values of `f(r, m)` over the sweep, `None` where the state is undefined.
fn sweep_columns(
    nbar: f64,
    sweep: &RSweep,
    m: &[u32],
    f: impl Fn(&Pssts) -> f64,
) -> (Vec<f64>, Vec<Vec<Option<f64>>>) {
    let rs = sweep.values();
    let cols = m
        .iter()
        .map(|&k| {
            rs.iter()
                .map(|&r| StateParams::new(nbar, r, k).ok().map(|p| f(&Pssts::new(p))))
                .collect()
        })
        .collect();
    (rs, cols)
}

fn sweep_table(prefix: &str, rs: &[f64], m: &[u32], cols: &[Vec<Option<f64>>]) -> Table {
    let names: Vec<String> = std::iter::once("r".to_string())
        .chain(m.iter().map(|k| format!("{prefix}{k}")))
        .collect();
    let mut table = Table {
        header: names,
        rows: Vec::new(),
    };
    for (i, &r) in rs.iter().enumerate() {
        let mut row = vec![Cell::from(r)];
        row.extend(cols.iter().map(|c| Cell::from(c[i])));
        table.rows.push(row);
    }
    table
}

/// Linear interpolation of every sign change between defined neighbours.
fn zero_crossings(rs: &[f64], values: &[Option<f64>]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..rs.len() {
        if let (Some(a), Some(b)) = (values[i - 1], values[i]) {
            if a != 0.0 && (a < 0.0) != (b < 0.0) {
                out.push(rs[i - 1] + (rs[i] - rs[i - 1]) * a / (a - b));
            }
        }
    }
    out
}

fn defined(values: &[Option<f64>]) -> impl Iterator<Item = f64> + '_ {
    values.iter().flatten().copied()
}

fn mandel_sweep(req: &Request, nbar: f64, sweep: &RSweep, m: &[u32]) -> Report {
    let (rs, cols) = sweep_columns(nbar, sweep, m, Pssts::mandel_q);
    let curves: Vec<Value> = m
        .iter()
        .zip(&cols)
        .map(|(k, c)| {
            json!({
                "m": k,
                "min": defined(c).fold(f64::INFINITY, f64::min),
                "max": defined(c).fold(f64::NEG_INFINITY, f64::max),
                "zero_crossings": zero_crossings(&rs, c),
                "undefined_points": c.iter().filter(|v| v.is_none()).count(),
            })
        })
        .collect();
    Report {
        request: req.clone(),
        summary: json!({ "curves": curves }),
        table: sweep_table("q_m", &rs, m, &cols),
        default_format: Format::Csv,
    }
}

fn wigner(
    req: &Request,
    state: &StateParams,
    grid: &GridSpec,
    channel: Option<&ChannelParams>,
) -> Result<Report> {
    let s = Pssts::new(*state);
    let (values, origin) = match channel {
        Some(ch) => {
            let ev = s.evolve(ch)?;
            (
                grid.evaluate(|pt| ev.value(pt)),
                ev.value(PhasePoint::origin()),
            )
        }
        None => (
            grid.evaluate(|pt| s.wigner(pt)),
            s.wigner(PhasePoint::origin()),
        ),
    };
    let mut table = Table::new(&["q", "p", "value"]);
    for (pt, v) in values.iter() {
        table
            .rows
            .push(vec![Cell::from(pt.q()), Cell::from(pt.p()), Cell::from(v)]);
    }
    let mut summary = serde_json::to_value(values.summary()).expect("summary serializes");
    summary["origin"] = json!(origin);
    Ok(Report {
        request: req.clone(),
        summary,
        table,
        default_format: Format::Csv,
    })
}

fn threshold(req: &Request, nbar: f64, r: f64, nth: f64) -> Report {
    let params = StateParams::new(nbar, r, 1).expect("validated");
    let tc = threshold_time(&params, nth);
    let mut table = Table::new(&["kappa_t_c"]);
    table
        .rows
        .push(vec![tc.map_or(Cell::Text("none".into()), Cell::from)]);
    let note = match tc {
        Some(_) => "origin value is negative for kappa_t below kappa_t_c",
        None => "origin value is non-negative at every time",
    };
    Report {
        request: req.clone(),
        summary: json!({ "kappa_t_c": tc, "note": note }),
        table,
        default_format: Format::Csv,
    }
}

fn fidelity_sweep(req: &Request, nbar: f64, sweep: &RSweep, m: &[u32]) -> Report {
    let (rs, cols) = sweep_columns(nbar, sweep, m, Pssts::fidelity);
    let curves: Vec<Value> = m
        .iter()
        .zip(&cols)
        .map(|(k, c)| {
            let v: Vec<f64> = defined(c).collect();
            let decreasing = v.windows(2).all(|w| if *k == 0 { w[1] == w[0] } else { w[1] < w[0] });
            json!({ "m": k, "min": v.iter().copied().fold(f64::INFINITY, f64::min), "monotone": decreasing })
        })
        .collect();
    let last_gap = (cols.len() >= 2).then(|| {
        let (a, b) = (&cols[cols.len() - 2], &cols[cols.len() - 1]);
        a.iter()
            .zip(b)
            .filter_map(|(x, y)| Some((x.as_ref()? - y.as_ref()?).abs()))
            .fold(0.0, f64::max)
    });
    Report {
        request: req.clone(),
        summary: json!({ "curves": curves, "max_gap_last_two": last_gap }),
        table: sweep_table("f_m", &rs, m, &cols),
        default_format: Format::Csv,
    }
}

fn probes() -> Vec<PhasePoint> {
    [-1.0, 0.0, 1.0]
        .iter()
        .flat_map(|&q| [-1.0, 0.0, 1.0].map(|p| PhasePoint::from_qp(q, p).expect("small probe")))
        .collect()
}

fn oracle_compare(
    req: &Request,
    state: &StateParams,
    channel: Option<&ChannelParams>,
    max_dim: usize,
) -> Result<(Report, Status)> {
    let opts = CompareOptions {
        policy: TruncationPolicy {
            max_dim,
            ..Default::default()
        },
        ..Default::default()
    };
    opts.policy.validate()?;
    let attempt = || -> Result<(pssts::compare::ComparisonReport, Option<pssts::compare::Check>)> {
        let oracle = build_pssts(state, &opts.policy)?;
        let report = compare_with_oracle(state, &oracle, &opts)?;
        let evolved = channel.map(|ch| compare_evolved(state, ch, &probes(), &oracle, Tolerance::ORACLE)).transpose()?;
        Ok((report, evolved))
    };
    let mut table = Table::new(&["check", "count", "max_abs_err", "worst_ratio", "passed"]);
    match attempt() {
        Ok((report, evolved)) => {
            let checks: Vec<_> = report.checks.iter().chain(evolved.as_ref()).collect();
            for c in &checks {
                table.rows.push(vec![
                    Cell::Text(c.name.clone()),
                    Cell::Int(c.count as u64),
                    Cell::from(c.max_abs_err),
                    Cell::from(c.worst_ratio),
                    Cell::Text(c.passed.to_string()),
                ]);
            }
            let passed = checks.iter().all(|c| c.passed);
            let status = if passed {
                Status::Ok
            } else {
                Status::ToleranceBreach
            };
            let summary = json!({
                "status": if passed { "pass" } else { "tolerance_breach" },
                "tolerance": Tolerance::ORACLE,
                "dim": report.dim,
                "dim_trace": report.dim_trace,
                "checks": checks,
            });
            Ok((
                Report {
                    request: req.clone(),
                    summary,
                    table,
                    default_format: Format::Json,
                },
                status,
            ))
        }
        Err(e) if is_truncation(&e) => {
            let trace = match &e {
                Error::MaxDimExceeded { trace } => json!(trace),
                _ => Value::Null,
            };
            let summary = json!({ "status": "truncation_failure", "error": e.to_string(), "dim_trace": trace });
            Ok((
                Report {
                    request: req.clone(),
                    summary,
                    table,
                    default_format: Format::Json,
                },
                Status::Truncation,
            ))
        }
        Err(e) => Err(e),
    }
}
