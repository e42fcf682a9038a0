use rand::Rng;
use rayon::prelude::*;

use super::density::sample_chamber;
use super::{Cell, ExperimentConfig, Report};
use crate::error::Result;
use crate::linalg::C64;
use crate::metric::chamber_distance;
use crate::reduction::{reduce, SiegelSetParams, DEFAULT_MAX_ITER};
use crate::symplectic::{mobius_act, random_word_with, SiegelPoint};

pub const SCALES: [f64; 3] = [1.0, 1e2, 1e4];
pub const MAX_WORD_LENGTH: usize = 5;
/// Distances below this are roundoff: the exact value for an orbit point of
/// the chamber is zero.
pub const NUMERICAL_ZERO: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct NetCheckOutcome {
    pub report: Report,
    /// `distances[sample][scale]`.
    pub distances: Vec<[f64; 3]>,
    /// Per-scale sup over samples.
    pub sup: [f64; 3],
    /// `sup(10^4) / sup(1)`, each sup floored at [`NUMERICAL_ZERO`].
    pub ratio: f64,
}

fn run_sample(cfg: &ExperimentConfig, params: &SiegelSetParams, id: usize) -> Result<[f64; 3]> {
    let mut rng = cfg.sample_rng(id);
    let cp = sample_chamber(&mut rng, cfg.genus, cfg.a_param)?;
    let len = rng.random_range(1..=MAX_WORD_LENGTH);
    let gamma = random_word_with(&mut rng, cfg.genus, len)?;
    let mut out = [0.0; 3];
    for (k, s) in SCALES.iter().enumerate() {
        let d: Vec<C64> = cp.h.iter().map(|h| C64::new(0.0, s * h * h)).collect();
        let z0 = SiegelPoint::diagonal(&d)?;
        let red = reduce(&mobius_act(&gamma, &z0)?, params, DEFAULT_MAX_ITER)?.require_converged()?;
        // Same point as `red.z_reduced`, without the roundoff accumulated
        // along the way: the total group element is exact.
        let z_red = mobius_act(&red.gamma.mul(&gamma)?, &z0)?;
        out[k] = chamber_distance(&z_red, cfg.a_param)?.0;
    }
    Ok(out)
}

/// Chamber distance of reduced images `reduce(γ · i diag(s d))` at three
/// scales `s`. Reduction uses the size-reduced Siegel set (`n_bound = 1/2`)
/// so that every scale lands on the same kind of representative.
pub fn cone_net_check(cfg: &ExperimentConfig) -> Result<NetCheckOutcome> {
    cfg.validate()?;
    let params = SiegelSetParams::new(cfg.a_param, 0.5)?;
    let distances =
        (0..cfg.samples).into_par_iter().map(|id| run_sample(cfg, &params, id)).collect::<Result<Vec<_>>>()?;
    let mut sup = [0.0f64; 3];
    for d in &distances {
        for k in 0..3 {
            sup[k] = sup[k].max(d[k]);
        }
    }
    let ratio = sup[2].max(NUMERICAL_ZERO) / sup[0].max(NUMERICAL_ZERO);

    let g = cfg.genus;
    let mut report = Report::new("net-check", cfg);
    for (id, d) in distances.iter().enumerate() {
        for (k, s) in SCALES.iter().enumerate() {
            report.push(g, Some(id), None, d[k], (*s).into(), "distance".into());
        }
    }
    for (k, s) in SCALES.iter().enumerate() {
        report.push(g, None, None, sup[k], (*s).into(), "sup".into());
    }
    report.push(g, None, None, ratio, Cell::Empty, "ratio".into());
    Ok(NetCheckOutcome { report, distances, sup, ratio })
}
