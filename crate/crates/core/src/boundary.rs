//! Limits of sequences in `H_g` toward rank-`k` boundary components, and
//! numerical detection of reducible (block-diagonal) points.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SiegelError};
use crate::linalg::{min_eigenvalue, RMat};
use crate::metric::distance;
use crate::reduction::{reduce, SiegelSetParams, DEFAULT_MAX_ITER};
use crate::symplectic::SiegelPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Interior,
    BbBoundary,
    Undetermined,
}

/// Convergence measures on the tail of the sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Index of the first tail element.
    pub tail_start: usize,
    /// Largest distance in `H_g` from a tail element to the last element.
    pub full_spread: f64,
    /// Same for the `Z'` blocks in `H_k`; absent for `k = 0` or `k = g`.
    pub block_spread: Option<f64>,
    /// Smallest eigenvalue of the Schur complement over the tail; absent for
    /// `k = g`.
    pub min_schur_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVerdict {
    pub kind: VerdictKind,
    /// `g` for interior, `k` for a boundary limit, absent when undetermined.
    pub rank: Option<usize>,
    /// Last tail element for interior limits, its `Z'` block for boundary
    /// limits. Absent when undetermined and for rank-0 boundary limits.
    pub limit: Option<SiegelPoint>,
    pub diagnostics: Diagnostics,
}

/// `Im Z'' - (Im Z''')^t (Im Z')^{-1} Im Z'''` for the split at `k`.
pub fn schur_complement(z: &SiegelPoint, k: usize) -> Result<RMat> {
    let g = z.genus();
    if k > g {
        return Err(SiegelError::RankOutOfRange { k, g });
    }
    let y = z.im();
    let y2 = y.view((k, k), (g - k, g - k)).into_owned();
    if k == 0 {
        return Ok(y2);
    }
    let y1 = y.view((0, 0), (k, k)).into_owned();
    let y3 = y.view((0, k), (k, g - k)).into_owned();
    let chol = y1.cholesky().ok_or(SiegelError::NotPositiveDefinite)?;
    Ok(&y2 - y3.transpose() * chol.solve(&y3))
}

fn tail_start(n: usize) -> usize {
    n - (n / 4).max(1)
}

/// Largest distance from `pts[start..]` to the last point.
fn spread(pts: &[SiegelPoint], start: usize) -> Result<f64> {
    let last = pts.last().expect("nonempty");
    let mut m: f64 = 0.0;
    for p in &pts[start..] {
        m = m.max(distance(p, last)?);
    }
    Ok(m)
}

/// Interior if the whole tail is Cauchy within `tol`; rank-`k` boundary if
/// the `Z'` blocks are Cauchy within `tol` and the Schur complement has all
/// eigenvalues above `1/tol` on the tail (last quarter of the sequence).
pub fn bb_limit_classify(seq: &[SiegelPoint], k: usize, tol: f64) -> Result<BoundaryVerdict> {
    let first = seq.first().ok_or_else(|| SiegelError::InvalidInput("empty sequence".into()))?;
    let g = first.genus();
    if k > g {
        return Err(SiegelError::RankOutOfRange { k, g });
    }
    if !(tol > 0.0) {
        return Err(SiegelError::InvalidInput("tolerance must be positive".into()));
    }
    if let Some(p) = seq.iter().find(|p| p.genus() != g) {
        return Err(SiegelError::DimensionMismatch { expected: g, got: p.genus() });
    }
    let start = tail_start(seq.len());
    let full_spread = spread(seq, start)?;

    let (block_spread, blocks) = if k > 0 && k < g {
        let blocks = seq[start..].iter().map(|p| p.principal_block(0, k)).collect::<Result<Vec<_>>>()?;
        (Some(spread(&blocks, 0)?), Some(blocks))
    } else {
        (None, None)
    };
    let min_schur_eigenvalue = if k < g {
        let mut m = f64::INFINITY;
        for p in &seq[start..] {
            m = m.min(min_eigenvalue(&schur_complement(p, k)?));
        }
        Some(m)
    } else {
        None
    };
    let diagnostics = Diagnostics { tail_start: start, full_spread, block_spread, min_schur_eigenvalue };

    if full_spread <= tol {
        return Ok(BoundaryVerdict {
            kind: VerdictKind::Interior,
            rank: Some(g),
            limit: seq.last().cloned(),
            diagnostics,
        });
    }
    let blocks_converge = k == 0 || block_spread.is_some_and(|s| s <= tol);
    let height_diverges = min_schur_eigenvalue.is_some_and(|m| m > 1.0 / tol);
    if k < g && blocks_converge && height_diverges {
        return Ok(BoundaryVerdict {
            kind: VerdictKind::BbBoundary,
            rank: Some(k),
            limit: blocks.and_then(|b| b.last().cloned()),
            diagnostics,
        });
    }
    Ok(BoundaryVerdict { kind: VerdictKind::Undetermined, rank: None, limit: None, diagnostics })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducibilityReport {
    /// Block sizes after grouping coupled coordinates contiguously.
    pub partition: Vec<usize>,
    /// Coordinates (of the reduced point) in each block.
    pub blocks: Vec<Vec<usize>>,
    /// For a reducible point, the largest entry between different blocks;
    /// otherwise the smallest over contiguous cuts of the largest entry
    /// crossing the cut.
    pub off_block_mass: f64,
    pub reducible: bool,
}

/// Reduces `z`, then splits the coordinates into the connected components of
/// the graph with edges `|Z_ij| > eps`.
pub fn reducibility_detect(z: &SiegelPoint, eps: f64) -> Result<ReducibilityReport> {
    if !(eps >= 0.0) {
        return Err(SiegelError::InvalidInput("tolerance must be nonnegative".into()));
    }
    let r = reduce(z, &SiegelSetParams::default(), DEFAULT_MAX_ITER)?.require_converged()?;
    let m = r.z_reduced.matrix();
    let g = m.nrows();

    let mut comp = vec![usize::MAX; g];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for s in 0..g {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let u = members[i];
            for v in 0..g {
                if comp[v] == usize::MAX && m[(u, v)].norm() > eps {
                    comp[v] = id;
                    members.push(v);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        blocks.push(members);
    }

    let reducible = blocks.len() > 1;
    let off_block_mass = if reducible {
        let mut mass: f64 = 0.0;
        for i in 0..g {
            for j in 0..g {
                if comp[i] != comp[j] {
                    mass = mass.max(m[(i, j)].norm());
                }
            }
        }
        mass
    } else {
        let mut best = if g > 1 { f64::INFINITY } else { 0.0 };
        for cut in 1..g {
            let mut mass: f64 = 0.0;
            for i in 0..cut {
                for j in cut..g {
                    mass = mass.max(m[(i, j)].norm());
                }
            }
            best = best.min(mass);
        }
        best
    };
    Ok(ReducibilityReport { partition: blocks.iter().map(Vec::len).collect(), blocks, off_block_mass, reducible })
}
