use std::f64::consts::PI;

use super::{Cell, ExperimentConfig, Report};
use crate::boundary::{bb_limit_classify, BoundaryVerdict};
use crate::elliptic::TorusModulus;
use crate::error::Result;
use crate::linalg::{fit_slope, C64};
use crate::metric::distance;
use crate::plumbing::{
    chain_period_matrix_with, junction_constants, nonseparating_period_matrix_with, NonSeparatingFamily,
    TorusChainFamily,
};
use crate::symplectic::SiegelPoint;

/// Plumbing parameter of the base chain's own junctions.
pub const BASE_T: f64 = 5e-3;

#[derive(Debug, Clone)]
pub struct BbProbeOutcome {
    pub report: Report,
    pub verdict: BoundaryVerdict,
    /// Distance from the recovered limit to the base period matrix.
    pub limit_error: f64,
    pub control: BoundaryVerdict,
    /// Largest off-diagonal entry of the control limit.
    pub control_off_diagonal: f64,
    /// Slope of `Im` of the corner entry against `log(1/t)`.
    pub corner_slope: f64,
}

fn tori(g: usize) -> Result<Vec<TorusModulus>> {
    (0..g).map(|k| TorusModulus::new(C64::new(0.1 * k as f64 - 0.15, 1.0 + 0.35 * k as f64))).collect()
}

/// The schedule followed by `10^-n` for every integer `n <= depth` with
/// `10^-n` below the last scheduled value.
pub fn extended_schedule(cfg: &ExperimentConfig) -> Vec<f64> {
    let mut ts = cfg.t_schedule.clone();
    let last = *ts.last().expect("validated schedule");
    ts.extend((1..=cfg.bb_depth as i32).map(|n| 10f64.powi(-n)).filter(|&t| t < last));
    ts
}

fn max_entry_diff(a: &SiegelPoint, b: &SiegelPoint) -> f64 {
    (a.matrix() - b.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Non-separating family pinched along the schedule, classified at rank
/// `g - 1`, with a separating chain as control.
pub fn bb_probe(cfg: &ExperimentConfig) -> Result<BbProbeOutcome> {
    cfg.validate()?;
    let g = cfg.genus;
    let mut base = TorusChainFamily::in_order(tori(g - 1)?)?;
    if cfg.hyperelliptic {
        base = base.into_hyperelliptic();
    }
    let base = base.with_t(vec![C64::new(BASE_T, 0.0); g - 2])?;
    let base_pm = chain_period_matrix_with(&base, &junction_constants(&base)?)?;
    let fam = NonSeparatingFamily::new(base, C64::new(cfg.t_schedule[0], 0.0));

    let ts = extended_schedule(cfg);
    let seq = ts
        .iter()
        .map(|&t| nonseparating_period_matrix_with(&fam.with_t(C64::new(t, 0.0)), &base_pm))
        .collect::<Result<Vec<_>>>()?;
    let verdict = bb_limit_classify(&seq, g - 1, cfg.tolerance)?;
    let limit_error = match &verdict.limit {
        Some(l) if l.genus() == g - 1 => distance(l, &base_pm)?,
        _ => f64::NAN,
    };

    let mut chain = TorusChainFamily::in_order(tori(g)?)?;
    if cfg.hyperelliptic {
        chain = chain.into_hyperelliptic();
    }
    let kappa = junction_constants(&chain)?;
    let control_seq = ts
        .iter()
        .map(|&t| chain_period_matrix_with(&chain.with_t(vec![C64::new(t, 0.0); g - 1])?, &kappa))
        .collect::<Result<Vec<_>>>()?;
    let control = bb_limit_classify(&control_seq, g - 1, cfg.tolerance)?;
    let control_off_diagonal = control
        .limit
        .as_ref()
        .map(|l| {
            let m = l.matrix();
            let mut x: f64 = 0.0;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if i != j {
                        x = x.max(m[(i, j)].norm());
                    }
                }
            }
            x
        })
        .unwrap_or(f64::NAN);

    let n = cfg.t_schedule.len();
    let corners: Vec<f64> = seq[..n].iter().map(|z| z.entry(g - 1, g - 1).im).collect();
    let log_inv: Vec<f64> = cfg.t_schedule.iter().map(|t| (1.0 / t).ln()).collect();
    let corner_slope = fit_slope(&log_inv, &corners);
    let block_err: Vec<f64> = seq[..n]
        .iter()
        .map(|z| z.principal_block(0, g - 1).map(|b| max_entry_diff(&b, &base_pm)))
        .collect::<Result<Vec<_>>>()?;

    let mut report = Report::new("bb-probe", cfg);
    for (k, &t) in cfg.t_schedule.iter().enumerate() {
        report.push(g, None, Some(t), corners[k], block_err[k].into(), "corner".into());
    }
    report.push(g, None, None, corner_slope, (corner_slope * 2.0 * PI).into(), "corner_slope".into());
    let kind = |v: &BoundaryVerdict| serde_json::to_value(v.kind).expect("kind").as_str().unwrap_or("").to_string();
    let rank = |v: &BoundaryVerdict| v.rank.map(|r| r as f64).unwrap_or(f64::NAN);
    report.push(
        g,
        None,
        None,
        rank(&verdict),
        limit_error.into(),
        Cell::Text(format!("nonseparating:{}", kind(&verdict))),
    );
    report.push(
        g,
        None,
        None,
        rank(&control),
        control_off_diagonal.into(),
        Cell::Text(format!("control:{}", kind(&control))),
    );
    Ok(BbProbeOutcome { report, verdict, limit_error, control, control_off_diagonal, corner_slope })
}
