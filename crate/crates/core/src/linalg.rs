//! Small dense helpers shared by the geometric modules.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub fn re_part(z: &CMat) -> RMat {
    z.map(|c| c.re)
}

pub fn im_part(z: &CMat) -> RMat {
    z.map(|c| c.im)
}

pub fn compose(re: &RMat, im: &RMat) -> CMat {
    re.zip_map(im, C64::new)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|c| c.conj())
}

pub fn symmetrize_c(z: &CMat) -> CMat {
    (z + z.transpose()).map(|c| c * 0.5)
}

pub fn symmetrize_r(y: &RMat) -> RMat {
    (y + y.transpose()) * 0.5
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, c| acc.max(c.norm()))
}

pub fn max_abs_r(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn min_eigenvalue(y: &RMat) -> f64 {
    let eig = SymmetricEigen::new(symmetrize_r(y));
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// 2-norm condition number via singular values.
pub fn condition_number_c(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn condition_number_r(m: &RMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Computes `x · w^{-1}` through an LU solve of the transposed system.
pub fn right_divide(x: &CMat, w: &CMat) -> Option<CMat> {
    let lu = w.transpose().lu();
    lu.solve(&x.transpose()).map(|s| s.transpose())
}

/// Factorization `y = U diag(d) U^t` with `U` unit upper triangular.
///
/// Eliminates from the last coordinate upwards, so `d[g-1] = y[g-1][g-1]`.
/// Returns `None` when a pivot is not strictly positive.
pub fn udu_upper(y: &RMat) -> Option<(RMat, DVector<f64>)> {
    let g = y.nrows();
    let mut u = RMat::identity(g, g);
    let mut d = DVector::zeros(g);
    for j in (0..g).rev() {
        let mut dj = y[(j, j)];
        for k in j + 1..g {
            dj -= u[(j, k)] * u[(j, k)] * d[k];
        }
        if !(dj > 0.0) {
            return None;
        }
        d[j] = dj;
        for i in 0..j {
            let mut s = y[(i, j)];
            for k in j + 1..g {
                s -= u[(i, k)] * u[(j, k)] * d[k];
            }
            u[(i, j)] = s / dj;
        }
    }
    Some((u, d))
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}
