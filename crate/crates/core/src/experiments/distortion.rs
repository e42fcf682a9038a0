use super::{loglog_slope, Cell, ExperimentConfig, Report};
use crate::elliptic::TorusModulus;
use crate::error::{Result, SiegelError};
use crate::linalg::C64;
use crate::metric::distance;
use crate::plumbing::{chain_period_matrix_with, junction_constants, reorder_family, TorusChainFamily};
use crate::reduction::quotient_distance_search;
use crate::symplectic::SiegelPoint;

pub const FIRST_ORDER: [usize; 4] = [0, 1, 2, 3];
pub const SWAPPED_ORDER: [usize; 4] = [1, 0, 3, 2];
pub const DISTORTION_TAUS: [(f64, f64); 4] = [(0.1, 1.1), (-0.2, 1.5), (0.3, 2.0), (0.05, 2.7)];

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionStep {
    pub t: f64,
    /// Upper bound on the distance in `A_g`.
    pub quotient_distance: f64,
    /// `min_σ distance(Π(t), σ·Π̃(t))` over coordinate permutations.
    pub aligned_distance: f64,
    pub alignment: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct DistortionOutcome {
    pub report: Report,
    /// Distance between the `t = 0` limits after alignment.
    pub limit_distance: f64,
    pub limit_alignment: Vec<usize>,
    pub steps: Vec<DistortionStep>,
    pub slope: f64,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Best coordinate permutation aligning `q` with `p`; ties go to the
/// lexicographically first permutation.
fn align(p: &SiegelPoint, q: &SiegelPoint) -> Result<(f64, Vec<usize>)> {
    let mut best = (f64::INFINITY, Vec::new());
    for perm in permutations(p.genus()) {
        let d = distance(p, &q.permuted(&perm)?)?;
        if d < best.0 {
            best = (d, perm);
        }
    }
    Ok(best)
}

/// Genus 4 chains of four distinct tori glued in the orders `1,2,3,4` and
/// `2,1,4,3`.
pub fn distortion_probe(cfg: &ExperimentConfig) -> Result<DistortionOutcome> {
    let tau = DISTORTION_TAUS.iter().map(|&(x, y)| TorusModulus::new(C64::new(x, y))).collect::<Result<Vec<_>>>()?;
    distortion_with(cfg, &tau, &FIRST_ORDER, &SWAPPED_ORDER)
}

pub fn distortion_with(
    cfg: &ExperimentConfig,
    tau: &[TorusModulus],
    order1: &[usize],
    order2: &[usize],
) -> Result<DistortionOutcome> {
    cfg.validate()?;
    let g = tau.len();
    if g < 2 {
        return Err(SiegelError::Config("distortion needs at least two tori".into()));
    }
    let base = TorusChainFamily::new(tau.to_vec(), order1.to_vec())?;
    let base = if cfg.hyperelliptic { base.into_hyperelliptic() } else { base };
    let other = reorder_family(&base, order2)?;
    let (k1, k2) = (junction_constants(&base)?, junction_constants(&other)?);

    let (limit_distance, limit_alignment) =
        align(&chain_period_matrix_with(&base, &k1)?, &chain_period_matrix_with(&other, &k2)?)?;

    let mut steps = Vec::with_capacity(cfg.t_schedule.len());
    for &t in &cfg.t_schedule {
        let ts = vec![C64::new(t, 0.0); g - 1];
        let p = chain_period_matrix_with(&base.with_t(ts.clone())?, &k1)?;
        let q = chain_period_matrix_with(&other.with_t(ts)?, &k2)?;
        let (aligned_distance, alignment) = align(&p, &q)?;
        let search = quotient_distance_search(&p, &q, cfg.search_radius)?;
        // Coordinate permutations are integral, so the aligned distance is
        // itself an upper bound.
        let quotient_distance = search.distance.min(aligned_distance);
        steps.push(DistortionStep { t, quotient_distance, aligned_distance, alignment });
    }
    let ts: Vec<f64> = steps.iter().map(|s| s.t).collect();
    let qs: Vec<f64> = steps.iter().map(|s| s.quotient_distance).collect();
    let slope = loglog_slope(&ts, &qs);

    let fmt_perm = |p: &[usize]| p.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(" ");
    let mut report = Report::new("distortion", cfg);
    report.push(g, None, Some(0.0), limit_distance, Cell::Empty, Cell::Text(fmt_perm(&limit_alignment)));
    for s in &steps {
        report.push(
            g,
            None,
            Some(s.t),
            s.quotient_distance,
            s.aligned_distance.into(),
            Cell::Text(fmt_perm(&s.alignment)),
        );
    }
    report.push(g, None, None, slope, Cell::Empty, "slope".into());
    Ok(DistortionOutcome { report, limit_distance, limit_alignment, steps, slope })
}
