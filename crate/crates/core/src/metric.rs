//! Invariant distance on `H_g` and Iwasawa (flat) coordinates.
//!
//! Normalization: for `g = 1`, `distance(i y1, i y2) = |log(y2 / y1)|`.

use nalgebra::DVector;

use crate::error::{Result, SiegelError};
use crate::linalg::{condition_number_r, conj, right_divide, udu_upper, CMat, RMat, C64};
use crate::symplectic::{ChamberPoint, SiegelPoint};

/// Allowed excursion of cross-ratio eigenvalues outside `[0, 1]`.
const EIGEN_SLACK: f64 = 1e-10;
const EIGEN_CLAMP_HI: f64 = 1.0 - 1e-15;

/// `Im Z = U diag(d) U^t`, `U` unit upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatCoordinates {
    pub d: DVector<f64>,
    pub u: RMat,
}

impl FlatCoordinates {
    /// Chamber candidate `h_i = sqrt(d_i)` in coordinate order.
    pub fn h(&self) -> Vec<f64> {
        self.d.iter().map(|x| x.sqrt()).collect()
    }
}

/// Cross-ratio matrix `(Z1-Z2)(Z1-conj Z2)^{-1}(conj Z1-conj Z2)(conj Z1-Z2)^{-1}`.
pub fn cross_ratio(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<CMat> {
    check_same_genus(z1, z2)?;
    let (a, b) = (z1.matrix(), z2.matrix());
    let (ab, bb) = (conj(a), conj(b));
    let fail = || SiegelError::NumericalFailure("singular factor in cross ratio".into());
    let left = right_divide(&(a - b), &(a - &bb)).ok_or_else(fail)?;
    let right = right_divide(&(&ab - &bb), &(&ab - b)).ok_or_else(fail)?;
    Ok(left * right)
}

/// Eigenvalues of the cross-ratio matrix, sorted ascending and clamped into
/// `[0, 1 - 1e-15]`.
pub fn cross_ratio_eigenvalues(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<Vec<f64>> {
    let r = cross_ratio(z1, z2)?;
    let g = r.nrows();
    let eig: Vec<C64> = if g == 1 {
        vec![r[(0, 0)]]
    } else {
        r.schur()
            .eigenvalues()
            .ok_or_else(|| SiegelError::NumericalFailure("Schur iteration failed".into()))?
            .iter()
            .cloned()
            .collect()
    };
    let mut out = Vec::with_capacity(g);
    for l in eig {
        if !(l.re >= -EIGEN_SLACK && l.re <= 1.0 + EIGEN_SLACK) || l.im.abs() > 1e-6 {
            return Err(SiegelError::NumericalFailure(format!("cross-ratio eigenvalue {l} outside [0, 1)")));
        }
        out.push(l.re.clamp(0.0, EIGEN_CLAMP_HI));
    }
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

/// Riemannian distance of `ds^2 = tr(Y^{-1} dZ Y^{-1} d conj Z)`.
pub fn distance(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<f64> {
    let lambdas = cross_ratio_eigenvalues(z1, z2)?;
    let sum: f64 = lambdas
        .iter()
        .map(|&l| {
            // log((1+s)/(1-s)) = 2 atanh(s)
            let r = 2.0 * l.sqrt().atanh();
            r * r
        })
        .sum();
    Ok(sum.sqrt())
}

fn check_same_genus(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<()> {
    if z1.genus() != z2.genus() {
        return Err(SiegelError::DimensionMismatch { expected: z1.genus(), got: z2.genus() });
    }
    Ok(())
}

/// Iwasawa coordinates of `Z` relative to the standard Siegel set.
pub fn flat_coordinates(z: &SiegelPoint) -> Result<FlatCoordinates> {
    let y = z.im();
    let cond = condition_number_r(&y);
    if !(cond <= 1e14) {
        return Err(SiegelError::NumericalFailure(format!(
            "Im Z is numerically singular (condition number {cond:.3e})"
        )));
    }
    let (u, d) = udu_upper(&y).ok_or_else(|| SiegelError::NumericalFailure("UDU^t factorization broke down".into()))?;
    Ok(FlatCoordinates { d, u })
}

/// The diagonal shadow `i diag(d)` of `Z`, unsorted.
pub fn chamber_shadow(z: &SiegelPoint) -> Result<SiegelPoint> {
    let fc = flat_coordinates(z)?;
    let diag: Vec<C64> = fc.d.iter().map(|&x| C64::new(0.0, x)).collect();
    SiegelPoint::diagonal(&diag)
}

/// Distance from `Z` to its shadow `i diag(d)`, with the shadow's chamber
/// coordinates sorted descending.
pub fn chamber_distance(z: &SiegelPoint, a: f64) -> Result<(f64, ChamberPoint)> {
    if !(a > 0.0) {
        return Err(SiegelError::InvalidInput("chamber parameter must be positive".into()));
    }
    let fc = flat_coordinates(z)?;
    let diag: Vec<C64> = fc.d.iter().map(|&x| C64::new(0.0, x)).collect();
    let shadow = SiegelPoint::diagonal(&diag)?;
    let dist = distance(z, &shadow)?;
    let mut h = fc.h();
    h.sort_by(|a, b| b.total_cmp(a));
    // Reported as-is; membership in C_a is decided by the caller.
    Ok((dist, ChamberPoint { h, a }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_r;

    fn iy(ys: &[f64]) -> SiegelPoint {
        let d: Vec<C64> = ys.iter().map(|&y| C64::new(0.0, y)).collect();
        SiegelPoint::diagonal(&d).unwrap()
    }

    #[test]
    fn zero_distance_to_self() {
        let z = SiegelPoint::new(CMat::from_row_slice(
            2,
            2,
            &[C64::new(0.2, 1.3), C64::new(0.1, 0.4), C64::new(0.1, 0.4), C64::new(-0.3, 2.0)],
        ))
        .unwrap();
        assert!(distance(&z, &z).unwrap() < 1e-7);
    }

    #[test]
    fn upper_half_plane_log_distance() {
        let d = distance(&iy(&[1.0]), &iy(&[4.0])).unwrap();
        assert!((d - 4f64.ln()).abs() < 1e-14);
        let r = cross_ratio_eigenvalues(&iy(&[1.0]), &iy(&[4.0])).unwrap();
        assert!((r[0] - 9.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_identity_distance() {
        let e = std::f64::consts::E;
        let d = distance(&iy(&[1.0, 1.0]), &iy(&[e, e])).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn genus_mismatch() {
        assert!(matches!(distance(&iy(&[1.0]), &iy(&[1.0, 2.0])), Err(SiegelError::DimensionMismatch { .. })));
    }

    #[test]
    fn flat_coordinates_examples() {
        let fc = flat_coordinates(&iy(&[4.0, 1.0])).unwrap();
        assert_eq!(fc.d.as_slice(), &[4.0, 1.0]);
        assert_eq!(fc.u, RMat::identity(2, 2));

        let z =
            SiegelPoint::from_parts(&RMat::zeros(2, 2), &RMat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])).unwrap();
        let fc = flat_coordinates(&z).unwrap();
        assert!(max_abs_r(&(fc.u.clone() - RMat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]))) < 1e-15);
        assert!((fc.d[0] - 1.0).abs() < 1e-15 && (fc.d[1] - 1.0).abs() < 1e-15);

        let scaled =
            SiegelPoint::from_parts(&RMat::zeros(2, 2), &(RMat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]) * 7.5))
                .unwrap();
        let fs = flat_coordinates(&scaled).unwrap();
        assert!(max_abs_r(&(fs.u - fc.u)) < 1e-15);
        assert!((fs.d[0] - 7.5).abs() < 1e-13 && (fs.d[1] - 7.5).abs() < 1e-13);
    }

    #[test]
    fn flat_coordinates_singular() {
        let z =
            SiegelPoint::from_parts(&RMat::zeros(2, 2), &RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-15])).unwrap();
        assert!(matches!(flat_coordinates(&z), Err(SiegelError::NumericalFailure(_))));
    }

    #[test]
    fn chamber_distance_examples() {
        let (d, cp) = chamber_distance(&iy(&[9.0, 1.0]), 0.5).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(cp.h, vec![3.0, 1.0]);

        let z =
            SiegelPoint::from_parts(&RMat::zeros(2, 2), &RMat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0])).unwrap();
        let (d, _) = chamber_distance(&z, 0.5).unwrap();
        let direct = distance(&z, &SiegelPoint::base_point(2)).unwrap();
        assert!(d > 0.0);
        assert!((d - direct).abs() < 1e-12);
    }
}
