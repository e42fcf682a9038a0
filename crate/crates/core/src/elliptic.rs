//! Weierstrass `℘` on `C/(Z + τZ)`, its quasi-periods and the periods of
//! the second-kind kernel `(℘(x - p) + H1) dx`.
//!
//! `℘` is evaluated on the reduced lattice through
//! `℘(z) = -π²E₂(τ)/3 + π² Σₙ csc²(π(z + nτ))`, which converges like `|q|^n`.
//! Periods are Gauss–Legendre quadratures along straight paths kept away from
//! the poles.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Result, SiegelError};
use crate::linalg::C64;

/// Points closer than this to a lattice point are rejected.
pub const POLE_TOL: f64 = 1e-12;
/// Minimal clearance between an integration path and the poles.
pub const MIN_PATH_CLEARANCE: f64 = 1e-3;
/// Gauss–Legendre nodes per panel.
pub const DEFAULT_NODES: usize = 64;

/// Modulus `τ` of the lattice `Z + τZ`, `Im τ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusModulus(C64);

impl TorusModulus {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(SiegelError::InvalidInput(format!("torus modulus {tau} needs Im > 0")));
        }
        Ok(TorusModulus(tau))
    }

    pub fn value(&self) -> C64 {
        self.0
    }

    /// Reduced modulus `τ' = (aτ + b)/(cτ + d)` with `|Re τ'| <= 1/2`,
    /// `|τ'| >= 1`, and the matrix `[a, b, c, d]`.
    pub fn reduced(&self) -> (C64, [i64; 4]) {
        let mut t = self.0;
        let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
        for _ in 0..10_000 {
            let n = t.re.round();
            if n != 0.0 {
                t -= n;
                let n = n as i64;
                a -= n * c;
                b -= n * d;
            }
            if t.norm_sqr() < 1.0 - 1e-14 {
                t = -t.inv();
                let (na, nb, nc, nd) = (-c, -d, a, b);
                a = na;
                b = nb;
                c = nc;
                d = nd;
            } else {
                break;
            }
        }
        (t, [a, b, c, d])
    }
}

/// Quasi-periods of `ζ`: `ζ(z+1) = ζ(z) + H1`, `ζ(z+τ) = ζ(z) + H2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiPeriods {
    pub h1: C64,
    pub h2: C64,
}

impl QuasiPeriods {
    /// `|H1 τ - H2 - 2πi|`.
    pub fn legendre_residual(&self, tau: &TorusModulus) -> f64 {
        (self.h1 * tau.value() - self.h2 - C64::new(0.0, 2.0 * PI)).norm()
    }
}

fn nome_power(u: C64) -> C64 {
    (C64::new(0.0, 2.0 * PI) * u).exp()
}

/// `csc²(πu)` without overflow for large `|Im u|`.
fn csc2_pi(u: C64) -> C64 {
    let e = if u.im >= 0.0 { nome_power(u) } else { nome_power(-u) };
    let one_minus = C64::new(1.0, 0.0) - e;
    -4.0 * e / (one_minus * one_minus)
}

/// Quasimodular `E₂(τ) = 1 - 24 Σ n qⁿ/(1 - qⁿ)` for `Im τ` bounded below.
pub(crate) fn eisenstein_e2(tau: C64) -> C64 {
    let q = nome_power(tau);
    let mut sum = C64::new(0.0, 0.0);
    let mut qn = q;
    for n in 1..200 {
        let term = (n as f64) * qn / (C64::new(1.0, 0.0) - qn);
        sum += term;
        if term.norm() < 1e-18 {
            break;
        }
        qn *= q;
    }
    C64::new(1.0, 0.0) - 24.0 * sum
}

/// `℘(w; Z + τZ)` for reduced `τ` and `w` reduced into the period cell.
fn wp_reduced_lattice(w: C64, tau: C64) -> C64 {
    let mut sum = csc2_pi(w);
    for n in 1..200 {
        let nt = tau * n as f64;
        let a = csc2_pi(w + nt);
        let b = csc2_pi(w - nt);
        sum += a + b;
        if a.norm() + b.norm() < 1e-17 * sum.norm().max(1.0) {
            break;
        }
    }
    PI * PI * (sum - eisenstein_e2(tau) / 3.0)
}

/// Reduces `w` modulo `Z + τZ` and returns it with its distance to the
/// nearest lattice point.
fn reduce_mod_lattice(w: C64, tau: C64) -> (C64, f64) {
    let ny = (w.im / tau.im).round();
    let mut r = w - tau * ny;
    r -= r.re.round();
    let mut best = f64::INFINITY;
    for m in -1..=1 {
        for n in -1..=1 {
            best = best.min((r - (tau * n as f64 + m as f64)).norm());
        }
    }
    (r, best)
}

/// Weierstrass `℘(z; Z + τZ)`.
pub fn wp(z: C64, tau: &TorusModulus) -> Result<C64> {
    let (tr, [_, _, c, d]) = tau.reduced();
    let mu = tau.value() * c as f64 + d as f64;
    let (w, dist) = reduce_mod_lattice(z / mu, tr);
    if dist * mu.norm() < POLE_TOL {
        return Err(SiegelError::PoleProximity(format!("{z}"), POLE_TOL));
    }
    Ok(wp_reduced_lattice(w, tr) / (mu * mu))
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static RULE64: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    if n == DEFAULT_NODES {
        RULE64.get_or_init(|| legendre_rule(DEFAULT_NODES)).clone()
    } else {
        legendre_rule(n)
    }
}

/// Composite Gauss–Legendre integral of `f` along `start -> start + span`,
/// with panels no longer than `clearance`.
fn segment_integral<F>(f: F, start: C64, span: C64, clearance: f64, nodes: usize) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let panels = ((span.norm() / clearance).ceil() as usize).max(1);
    let (xs, ws) = gauss_legendre(nodes);
    let h = span / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = start + h * (p as f64 + 0.5);
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in xs.iter().zip(&ws) {
            acc += f(mid + h * (0.5 * x))? * *w;
        }
        total += acc * h * 0.5;
    }
    Ok(total)
}

/// Clearance of the midline between pole rows `Im = n Im τ`.
fn horizontal_clearance(tau: C64) -> f64 {
    0.5 * tau.im
}

/// Clearance of the midline between pole lines `m + Rτ`.
fn slanted_clearance(tau: C64) -> f64 {
    0.5 * tau.im / tau.norm()
}

fn check_clearance(tau: C64) -> Result<()> {
    let c = horizontal_clearance(tau).min(slanted_clearance(tau));
    if c < MIN_PATH_CLEARANCE {
        return Err(SiegelError::PoleProximity(format!("on the integration path for τ = {tau}"), MIN_PATH_CLEARANCE));
    }
    Ok(())
}

pub fn quasi_periods(tau: &TorusModulus) -> Result<QuasiPeriods> {
    quasi_periods_with(tau, DEFAULT_NODES)
}

/// `H1 = -∫℘` over `[τ/2, τ/2 + 1]`, `H2 = -∫℘` over `[1/2, 1/2 + τ]`.
pub fn quasi_periods_with(tau: &TorusModulus, nodes: usize) -> Result<QuasiPeriods> {
    let t = tau.value();
    check_clearance(t)?;
    let f = |x: C64| wp(x, tau);
    let one = C64::new(1.0, 0.0);
    let h1 = -segment_integral(f, t * 0.5, one, horizontal_clearance(t), nodes)?;
    let h2 = -segment_integral(f, C64::new(0.5, 0.0), t, slanted_clearance(t), nodes)?;
    Ok(QuasiPeriods { h1, h2 })
}

pub fn kernel_periods(tau: &TorusModulus, p: C64) -> Result<(C64, C64)> {
    kernel_periods_with(tau, p, DEFAULT_NODES)
}

/// `(A-period, B-period)` of `(℘(x - p) + H1) dx` along the cycles through
/// the origin in directions `1` and `τ`, each slid to the midline between
/// the pole rows (resp. pole lines) that bracket the origin.
pub fn kernel_periods_with(tau: &TorusModulus, p: C64, nodes: usize) -> Result<(C64, C64)> {
    let t = tau.value();
    check_clearance(t)?;
    let (_, dist) = reduce_mod_lattice(p, t);
    if dist < POLE_TOL {
        return Err(SiegelError::PoleProximity(format!("{p}"), POLE_TOL));
    }
    let qp = quasi_periods_with(tau, nodes)?;
    let kernel = |x: C64| wp(x - p, tau).map(|v| v + qp.h1);

    // Pole rows sit at heights Im p + n Im τ.
    let k = ((-p.im) / t.im).floor();
    let y_a = p.im + (k + 0.5) * t.im;
    let a = segment_integral(kernel, C64::new(0.0, y_a), C64::new(1.0, 0.0), horizontal_clearance(t), nodes)?;

    // Pole lines m + p + Rτ cut the real axis at c0 + m.
    let c0 = p.re - p.im * t.re / t.im;
    let c = c0 + (-c0).floor() + 0.5;
    let b = segment_integral(kernel, C64::new(c, 0.0), t, slanted_clearance(t), nodes)?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(re: f64, im: f64) -> TorusModulus {
        TorusModulus::new(C64::new(re, im)).unwrap()
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(TorusModulus::new(C64::new(0.0, -1.0)).is_err());
    }

    #[test]
    fn reduction_lands_in_fundamental_domain() {
        for (re, im) in [(3.7, 0.1), (-0.4, 0.05), (0.2, 5.0), (10.0, 0.9)] {
            let t = tau(re, im);
            let (r, [a, b, c, d]) = t.reduced();
            assert!(r.re.abs() <= 0.5 + 1e-12 && r.norm() >= 1.0 - 1e-12);
            assert_eq!(a * d - b * c, 1);
            let img = (t.value() * a as f64 + b as f64) / (t.value() * c as f64 + d as f64);
            assert!((img - r).norm() < 1e-10);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = legendre_rule(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn wp_periodic_and_even() {
        let t = tau(0.31, 1.17);
        let z = C64::new(0.23, 0.41);
        let v = wp(z, &t).unwrap();
        assert!((wp(z + 1.0, &t).unwrap() - v).norm() < 1e-10);
        assert!((wp(z + t.value(), &t).unwrap() - v).norm() < 1e-10);
        assert!((wp(-z, &t).unwrap() - v).norm() < 1e-10);
    }

    #[test]
    fn square_lattice_half_period_values() {
        let t = tau(0.0, 1.0);
        assert!(wp(C64::new(0.5, 0.5), &t).unwrap().norm() < 1e-12);
        let e1 = wp(C64::new(0.5, 0.0), &t).unwrap();
        assert!(e1.re > 0.0 && e1.im.abs() < 1e-12);
    }

    #[test]
    fn pole_is_rejected() {
        let t = tau(0.2, 0.9);
        assert!(matches!(wp(C64::new(1.0, 0.0) + t.value(), &t), Err(SiegelError::PoleProximity(..))));
        assert!(matches!(kernel_periods(&t, C64::new(0.0, 0.0)), Err(SiegelError::PoleProximity(..))));
    }

    #[test]
    fn degenerate_path_rejected() {
        let t = tau(2000.0, 1.0);
        assert!(matches!(quasi_periods(&t), Err(SiegelError::PoleProximity(..))));
    }

    #[test]
    fn square_lattice_quasi_period() {
        let q = quasi_periods(&tau(0.0, 1.0)).unwrap();
        assert!((q.h1 - C64::new(PI, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn h1_invariant_under_unit_shift() {
        let a = quasi_periods(&tau(0.1, 0.8)).unwrap();
        let b = quasi_periods(&tau(1.1, 0.8)).unwrap();
        assert!((a.h1 - b.h1).norm() < 1e-10);
    }
}
