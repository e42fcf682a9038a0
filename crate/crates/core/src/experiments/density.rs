use rand::Rng;
use rayon::prelude::*;

use super::{loglog_slope, Cell, ExperimentConfig, Report};
use crate::elliptic::TorusModulus;
use crate::error::{Result, SiegelError};
use crate::linalg::C64;
use crate::metric::distance;
use crate::plumbing::{chain_period_matrix_with, junction_constants, TorusChainFamily};
use crate::symplectic::{satisfies_chamber, ChamberPoint};

const MAX_RETRIES: usize = 100;
/// Range of `log h` for sampled chamber targets.
const LOG_H_RANGE: (f64, f64) = (-0.7, 2.0);

/// Log-uniform chamber coordinates, sorted descending, resampled until the
/// chamber inequalities at `a` hold.
pub(crate) fn sample_chamber<R: Rng>(rng: &mut R, g: usize, a: f64) -> Result<ChamberPoint> {
    for _ in 0..MAX_RETRIES {
        let mut h: Vec<f64> = (0..g).map(|_| rng.random_range(LOG_H_RANGE.0..LOG_H_RANGE.1).exp()).collect();
        h.sort_by(|x, y| y.total_cmp(x));
        if satisfies_chamber(&h, a) {
            return ChamberPoint::new(h, a);
        }
    }
    Err(SiegelError::Config(format!("no chamber point found at a = {a} after {MAX_RETRIES} draws")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetResult {
    pub h: Vec<f64>,
    /// `distance(Π(t_n), target)` along the schedule.
    pub distances: Vec<f64>,
    /// Distance at `t = 0`.
    pub limit_distance: f64,
    pub min_distance: f64,
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct DensityOutcome {
    pub report: Report,
    pub targets: Vec<TargetResult>,
    /// Sample sup of the per-target minimal distances.
    pub delta_hat: f64,
}

fn run_target(cfg: &ExperimentConfig, id: usize) -> Result<TargetResult> {
    let mut rng = cfg.sample_rng(id);
    let target = sample_chamber(&mut rng, cfg.genus, cfg.a_param)?;
    let tau = target.h.iter().map(|h| TorusModulus::new(C64::new(0.0, h * h))).collect::<Result<Vec<_>>>()?;
    let mut fam = TorusChainFamily::in_order(tau)?;
    if cfg.hyperelliptic {
        fam = fam.into_hyperelliptic();
    }
    let kappa = junction_constants(&fam)?;
    let target_pt = target.to_point();
    let limit_distance = distance(&chain_period_matrix_with(&fam, &kappa)?, &target_pt)?;
    let mut distances = Vec::with_capacity(cfg.t_schedule.len());
    for &t in &cfg.t_schedule {
        let f = fam.with_t(vec![C64::new(t, 0.0); fam.junctions()])?;
        distances.push(distance(&chain_period_matrix_with(&f, &kappa)?, &target_pt)?);
    }
    let min_distance = distances.iter().cloned().fold(f64::INFINITY, f64::min);
    let slope = loglog_slope(&cfg.t_schedule, &distances);
    Ok(TargetResult { h: target.h, distances, limit_distance, min_distance, slope })
}

/// Distances from chain period matrices `Π(t)` to chamber targets
/// `i diag(h^2)` with `Π(0)` equal to the target.
pub fn density_probe(cfg: &ExperimentConfig) -> Result<DensityOutcome> {
    cfg.validate()?;
    let targets = (0..cfg.samples).into_par_iter().map(|id| run_target(cfg, id)).collect::<Result<Vec<_>>>()?;
    let name = if cfg.hyperelliptic { "density-hyperelliptic" } else { "density" };
    let mut report = Report::new(name, cfg);
    let g = cfg.genus;
    for (id, tr) in targets.iter().enumerate() {
        report.push(g, Some(id), Some(0.0), tr.limit_distance, Cell::Empty, "distance".into());
        for (t, d) in cfg.t_schedule.iter().zip(&tr.distances) {
            report.push(g, Some(id), Some(*t), *d, Cell::Empty, "distance".into());
        }
        report.push(g, Some(id), None, tr.min_distance, tr.slope.into(), "slope".into());
    }
    let delta_hat = targets.iter().map(|t| t.min_distance).fold(0.0, f64::max);
    report.push(g, None, None, delta_hat, (targets.len() as f64).into(), "delta_hat".into());
    Ok(DensityOutcome { report, targets, delta_hat })
}
