//! LLL reduction of a positive definite Gram matrix with exact tracking of
//! the unimodular change of basis.

use nalgebra::DMatrix;

use crate::error::{Result, SiegelError};
use crate::linalg::RMat;

/// Lovász parameter used by the reduction loop.
pub const LLL_DELTA: f64 = 0.99;
const SIZE_SLACK: f64 = 1e-9;
const MAX_STEPS: usize = 100_000;

/// Rows of `transform` are the new basis vectors in old coordinates, so the
/// reduced Gram matrix is `T G T^t`.
#[derive(Debug, Clone)]
pub struct LllOutcome {
    pub transform: DMatrix<i64>,
    pub inverse: DMatrix<i64>,
    pub gram: RMat,
}

impl LllOutcome {
    pub fn is_identity(&self) -> bool {
        let n = self.transform.nrows();
        self.transform == DMatrix::identity(n, n)
    }
}

/// Gram-Schmidt data `(mu, B)` from `G = L diag(B) L^t`.
fn gram_schmidt(g: &RMat) -> Result<(RMat, Vec<f64>)> {
    let n = g.nrows();
    let mut mu = RMat::identity(n, n);
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= mu[(j, k)] * mu[(i, k)] * b[k];
            }
            mu[(i, j)] = s / b[j];
        }
        let mut s = g[(i, i)];
        for k in 0..i {
            s -= mu[(i, k)] * mu[(i, k)] * b[k];
        }
        if !(s > 0.0) {
            return Err(SiegelError::NumericalFailure("Gram matrix lost positivity in LLL".into()));
        }
        b[i] = s;
    }
    Ok((mu, b))
}

fn checked_axpy_row(m: &mut DMatrix<i64>, dst: usize, src: usize, r: i64) -> Result<()> {
    for c in 0..m.ncols() {
        let v = m[(src, c)].checked_mul(r).and_then(|p| m[(dst, c)].checked_sub(p));
        m[(dst, c)] = v.ok_or(SiegelError::Overflow)?;
    }
    Ok(())
}

fn checked_axpy_col(m: &mut DMatrix<i64>, dst: usize, src: usize, r: i64) -> Result<()> {
    for row in 0..m.nrows() {
        let v = m[(row, src)].checked_mul(r).and_then(|p| m[(row, dst)].checked_add(p));
        m[(row, dst)] = v.ok_or(SiegelError::Overflow)?;
    }
    Ok(())
}

/// Classical LLL on the Gram matrix `gram` with Lovász parameter `delta`.
pub fn lll_gram(gram: &RMat, delta: f64) -> Result<LllOutcome> {
    let n = gram.nrows();
    let mut g = gram.clone();
    let mut t = DMatrix::<i64>::identity(n, n);
    let mut ti = DMatrix::<i64>::identity(n, n);
    let mut k = 1;
    let mut steps = 0;
    while k < n {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(SiegelError::NumericalFailure("LLL did not terminate".into()));
        }
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&g)?;
            let m = mu[(k, j)];
            if m.abs() > 0.5 + SIZE_SLACK {
                let r = m.round();
                if r.abs() > (1u64 << 52) as f64 {
                    return Err(SiegelError::Overflow);
                }
                let ri = r as i64;
                // b_k <- b_k - r b_j
                for c in 0..n {
                    g[(k, c)] -= r * g[(j, c)];
                }
                for c in 0..n {
                    g[(c, k)] -= r * g[(c, j)];
                }
                checked_axpy_row(&mut t, k, j, ri)?;
                checked_axpy_col(&mut ti, j, k, ri)?;
            }
        }
        let (mu, b) = gram_schmidt(&g)?;
        let m = mu[(k, k - 1)];
        if b[k] >= (delta - m * m) * b[k - 1] {
            k += 1;
        } else {
            g.swap_rows(k, k - 1);
            g.swap_columns(k, k - 1);
            t.swap_rows(k, k - 1);
            ti.swap_columns(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Ok(LllOutcome { transform: t, inverse: ti, gram: g })
}
