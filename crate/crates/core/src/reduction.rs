//! Siegel-set membership and approximate reduction of points of `H_g`.
//!
//! `reduce` iterates three steps in a fixed order until none of them fires:
//!
//! 1. lattice step: LLL on `Im Z` (reversed so that the chamber order is
//!    descending), applied as the block matrix `(A, 0; 0, A^{-t})`; only
//!    attempted when the chamber-ratio or unipotent bounds are violated;
//! 2. translation by the integer symmetric matrix nearest to `-Re Z`;
//! 3. inversion: `J_g` when it raises `det Im Z`, otherwise the best
//!    quasi-inversion on a single coordinate.
//!
//! The accumulated integer matrix is kept exactly.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SiegelError};
use crate::lattice::{lll_gram, LLL_DELTA};
use crate::linalg::{condition_number_r, RMat};
use crate::metric::{distance, flat_coordinates};
use crate::symplectic::{generator_alphabet, j_matrix, mobius_act, IntSymplectic, SiegelPoint};

/// Minimal relative gain in `det Im Z` for an inversion to fire.
const HEIGHT_GAIN: f64 = 1e-12;
/// Rounding threshold for the translation step.
const HALF_SLACK: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiegelSetParams {
    pub a: f64,
    pub n_bound: f64,
}

impl Default for SiegelSetParams {
    fn default() -> Self {
        SiegelSetParams { a: 0.5, n_bound: 1.0 }
    }
}

impl SiegelSetParams {
    pub fn new(a: f64, n_bound: f64) -> Result<Self> {
        if !(a > 0.0) || !(n_bound >= 0.5) {
            return Err(SiegelError::InvalidInput(format!(
                "Siegel set needs a > 0 and n_bound >= 1/2 (got a={a}, n_bound={n_bound})"
            )));
        }
        Ok(SiegelSetParams { a, n_bound })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionResult {
    #[serde(rename = "point")]
    pub z_reduced: SiegelPoint,
    pub gamma: IntSymplectic,
    pub iterations: usize,
    pub converged: bool,
}

impl ReductionResult {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(SiegelError::IterationLimit(self.iterations))
        }
    }
}

fn chamber_ratios_ok(h: &[f64], a: f64) -> bool {
    (0..h.len()).all(|i| (i + 1..h.len()).all(|j| h[i] / h[j] >= a))
}

fn unipotent_ok(u: &RMat, bound: f64) -> bool {
    let g = u.nrows();
    (0..g).all(|i| (i + 1..g).all(|j| u[(i, j)].abs() <= bound))
}

/// Membership in `S_{a,ω}` with `ω` the box `|U - I| <= n_bound`,
/// `|Re Z| <= n_bound`.
pub fn in_siegel_set(z: &SiegelPoint, params: &SiegelSetParams) -> Result<bool> {
    let fc = flat_coordinates(z)?;
    let h = fc.h();
    let x = z.re();
    Ok(crate::symplectic::satisfies_chamber(&h, params.a)
        && unipotent_ok(&fc.u, params.n_bound)
        && x.iter().all(|v| v.abs() <= params.n_bound))
}

/// The unimodular block produced by LLL on the reversed Gram matrix, or
/// `None` when LLL leaves the basis unchanged.
fn lattice_step(z: &SiegelPoint) -> Result<Option<IntSymplectic>> {
    let g = z.genus();
    if g == 1 {
        return Ok(None);
    }
    let y = z.im();
    let rev = |i: usize| g - 1 - i;
    let y_rev = RMat::from_fn(g, g, |i, j| y[(rev(i), rev(j))]);
    let out = lll_gram(&y_rev, LLL_DELTA)?;
    if out.is_identity() {
        return Ok(None);
    }
    let a = DMatrix::from_fn(g, g, |i, j| out.transform[(rev(i), rev(j))]);
    let a_inv = DMatrix::from_fn(g, g, |i, j| out.inverse[(rev(i), rev(j))]);
    Ok(Some(IntSymplectic::from_unimodular(&a, &a_inv)?))
}

fn translation_step(z: &SiegelPoint) -> Result<Option<IntSymplectic>> {
    let x = z.re();
    let g = z.genus();
    let mut b = DMatrix::<i64>::zeros(g, g);
    let mut any = false;
    for i in 0..g {
        for j in i..g {
            let v = x[(i, j)];
            if v.abs() > 0.5 + HALF_SLACK {
                let r = -v.round();
                if r.abs() > (1u64 << 52) as f64 {
                    return Err(SiegelError::Overflow);
                }
                b[(i, j)] = r as i64;
                b[(j, i)] = r as i64;
                any = true;
            }
        }
    }
    if any {
        Ok(Some(IntSymplectic::translation(&b)?))
    } else {
        Ok(None)
    }
}

fn inversion_step(z: &SiegelPoint) -> Option<IntSymplectic> {
    let g = z.genus();
    let det = z.matrix().determinant().norm_sqr();
    if det > 0.0 && 1.0 / det > 1.0 + HEIGHT_GAIN {
        return Some(j_matrix(g));
    }
    let mut best: Option<(usize, f64)> = None;
    for k in 0..g {
        let n2 = z.entry(k, k).norm_sqr();
        let gain = 1.0 / n2;
        if gain > 1.0 + HEIGHT_GAIN && best.is_none_or(|(_, b)| gain > b) {
            best = Some((k, gain));
        }
    }
    best.map(|(k, _)| IntSymplectic::quasi_inversion(g, k))
}

/// Brings `z` into the Siegel set described by `params` (see module docs).
pub fn reduce(z: &SiegelPoint, params: &SiegelSetParams, max_iter: usize) -> Result<ReductionResult> {
    let g = z.genus();
    let mut cur = z.clone();
    let mut gamma = IntSymplectic::identity(g);
    let mut iterations = 0;
    let mut converged = false;

    let apply = |step: IntSymplectic, cur: &mut SiegelPoint, gamma: &mut IntSymplectic| -> Result<()> {
        let before = cur.det_im();
        // Roundoff in det Im grows with the conditioning of Im Z.
        let slack = (64.0 * f64::EPSILON * condition_number_r(&cur.im())).max(1e-9);
        let next = mobius_act(&step, cur)?;
        let after = next.det_im();
        if after < before * (1.0 - slack) {
            return Err(SiegelError::NumericalFailure(format!(
                "reduction step lowered det Im from {before:e} to {after:e}"
            )));
        }
        *cur = next;
        *gamma = step.mul(gamma)?;
        Ok(())
    };

    while iterations < max_iter {
        let mut fired = false;

        let fc = flat_coordinates(&cur)?;
        if !(chamber_ratios_ok(&fc.h(), params.a) && unipotent_ok(&fc.u, params.n_bound)) {
            if let Some(step) = lattice_step(&cur)? {
                apply(step, &mut cur, &mut gamma)?;
                fired = true;
            }
        }
        if let Some(step) = translation_step(&cur)? {
            apply(step, &mut cur, &mut gamma)?;
            fired = true;
        }
        if let Some(step) = inversion_step(&cur) {
            apply(step, &mut cur, &mut gamma)?;
            fired = true;
        }

        if !fired {
            converged = true;
            break;
        }
        iterations += 1;
    }
    if !converged {
        // The last round may have been the one that settled the point.
        converged = lattice_quiet(&cur, params)? && translation_step(&cur)?.is_none() && inversion_step(&cur).is_none();
    }
    Ok(ReductionResult { z_reduced: cur, gamma, iterations, converged })
}

fn lattice_quiet(z: &SiegelPoint, params: &SiegelSetParams) -> Result<bool> {
    let fc = flat_coordinates(z)?;
    if chamber_ratios_ok(&fc.h(), params.a) && unipotent_ok(&fc.u, params.n_bound) {
        return Ok(true);
    }
    Ok(lattice_step(z)?.is_none())
}

/// Result of a bounded word search between two reduced points.
#[derive(Debug, Clone)]
pub struct QuotientSearch {
    pub distance: f64,
    /// Indices into [`generator_alphabet`], applied left to right to `p`.
    pub word: Vec<usize>,
    pub p_reduced: SiegelPoint,
    pub q_reduced: SiegelPoint,
}

/// Upper bound on the distance in `A_g` between the classes of `p` and `q`.
pub fn quotient_distance_upper(p: &SiegelPoint, q: &SiegelPoint, search_radius: usize) -> Result<f64> {
    Ok(quotient_distance_search(p, q, search_radius)?.distance)
}

/// Reduces both points, then minimizes `distance(w·p_red, q_red)` over words
/// `w` of length at most `search_radius` in the generator alphabet.
pub fn quotient_distance_search(p: &SiegelPoint, q: &SiegelPoint, search_radius: usize) -> Result<QuotientSearch> {
    if p.genus() != q.genus() {
        return Err(SiegelError::DimensionMismatch { expected: p.genus(), got: q.genus() });
    }
    let params = SiegelSetParams::default();
    let p_red = reduce(p, &params, DEFAULT_MAX_ITER)?.z_reduced;
    let q_red = reduce(q, &params, DEFAULT_MAX_ITER)?.z_reduced;
    let alphabet = generator_alphabet(p.genus());

    let mut best = (distance(&p_red, &q_red)?, Vec::new());
    let mut frontier: Vec<(SiegelPoint, Vec<usize>)> = vec![(p_red.clone(), Vec::new())];
    for _ in 0..search_radius {
        let next: Vec<(SiegelPoint, Vec<usize>, f64)> = frontier
            .par_iter()
            .flat_map_iter(|(pt, word)| {
                let q_red = &q_red;
                alphabet.iter().enumerate().filter_map(move |(k, gen)| {
                    let moved = mobius_act(gen, pt).ok()?;
                    let d = distance(&moved, q_red).ok()?;
                    let mut w = word.clone();
                    w.push(k);
                    Some((moved, w, d))
                })
            })
            .collect();
        // Sequential scan keeps ties deterministic.
        for (_, w, d) in &next {
            if *d < best.0 {
                best = (*d, w.clone());
            }
        }
        frontier = next.into_iter().map(|(pt, w, _)| (pt, w)).collect();
    }
    Ok(QuotientSearch { distance: best.0, word: best.1, p_reduced: p_red, q_reduced: q_red })
}
