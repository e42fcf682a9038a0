mod common;

use std::f64::consts::PI;

use common::{rng, C64};
use rand::Rng;
use siegel_core::elliptic::{kernel_periods, kernel_periods_with, quasi_periods, wp, TorusModulus};

/// Γ(1/4)^4 / (8π): the half-period value e1 of the square lattice Z + iZ.
const SQUARE_E1: f64 = 6.875_185_818_020_372;

/// Truncated Weierstrass sum over lattice points with |ω| ≤ radius, paired
/// as ±ω so the odd parts cancel exactly.
fn lattice_sum_wp(z: C64, tau: C64, radius: f64) -> C64 {
    let mut s = C64::new(1.0, 0.0) / (z * z);
    let nmax = (radius / tau.im).ceil() as i64 + 1;
    for n in 0..=nmax {
        let mmax = (radius + tau.re.abs() * n as f64).ceil() as i64 + 1;
        for m in -mmax..=mmax {
            if n == 0 && m <= 0 {
                continue;
            }
            let w = tau * n as f64 + m as f64;
            if w.norm() > radius {
                continue;
            }
            let (zp, zm) = (z - w, z + w);
            s += C64::new(1.0, 0.0) / (zp * zp) + C64::new(1.0, 0.0) / (zm * zm) - 2.0 / (w * w);
        }
    }
    s
}

/// E2 from the divisor sums σ1(n).
fn e2_divisor_series(tau: C64) -> C64 {
    let q = (C64::new(0.0, 2.0 * PI) * tau).exp();
    let mut s = C64::new(0.0, 0.0);
    for n in 1..400u64 {
        let sigma: u64 = (1..=n).filter(|d| n % d == 0).sum();
        let qn = q.powu(n as u32);
        if qn.norm() < 1e-20 {
            break;
        }
        s += qn * sigma as f64;
    }
    C64::new(1.0, 0.0) - 24.0 * s
}

fn random_tau<R: Rng>(r: &mut R) -> C64 {
    C64::new(r.random_range(-2.0..2.0), r.random_range(0.2..10.0))
}

#[test]
fn square_lattice_half_period_fixture() {
    let t = TorusModulus::new(C64::new(0.0, 1.0)).unwrap();
    let v = wp(C64::new(0.5, 0.0), &t).unwrap();
    assert!((v - SQUARE_E1).norm() < 1e-11, "{v}");
    let v2 = wp(C64::new(0.0, 0.5), &t).unwrap();
    assert!((v2 + SQUARE_E1).norm() < 1e-11, "{v2}");
}

#[test]
fn agrees_with_direct_lattice_sum() {
    let mut r = rng(11);
    for _ in 0..20 {
        let tau = C64::new(r.random_range(-0.5..0.5), r.random_range(0.8..1.6));
        let z = tau * r.random_range(0.1..0.9) + r.random_range(0.1..0.9);
        let t = TorusModulus::new(tau).unwrap();
        let fast = wp(z, &t).unwrap();
        let slow = lattice_sum_wp(z, tau, 60.0);
        assert!((fast - slow).norm() < 1e-6 * slow.norm().max(1.0), "τ={tau} z={z}: {fast} vs {slow}");
    }
}

#[test]
fn modular_covariance() {
    // ℘(z; Z + τZ) = τ^{-2} ℘(z/τ; Z + (-1/τ)Z).
    let mut r = rng(12);
    for _ in 0..20 {
        let tau = random_tau(&mut r);
        let z = C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)) * 0.37;
        let a = wp(z, &TorusModulus::new(tau).unwrap()).unwrap();
        let b = wp(z / tau, &TorusModulus::new(-tau.inv()).unwrap()).unwrap() / (tau * tau);
        assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
    }
}

#[test]
fn h1_matches_eisenstein_oracle() {
    let q = quasi_periods(&TorusModulus::new(C64::new(0.0, 1.0)).unwrap()).unwrap();
    assert!((q.h1 - PI).norm() < 1e-8);
    let mut r = rng(13);
    for _ in 0..20 {
        let tau = C64::new(r.random_range(-0.5..0.5), r.random_range(0.9..4.0));
        let q = quasi_periods(&TorusModulus::new(tau).unwrap()).unwrap();
        let oracle = e2_divisor_series(tau) * (PI * PI / 3.0);
        assert!((q.h1 - oracle).norm() < 1e-9, "τ={tau}: {} vs {oracle}", q.h1);
    }
}

#[test]
fn legendre_relation_random_moduli() {
    let mut r = rng(14);
    for _ in 0..50 {
        let t = TorusModulus::new(random_tau(&mut r)).unwrap();
        let q = quasi_periods(&t).unwrap();
        assert!(q.legendre_residual(&t) <= 1e-10, "τ={}: {}", t.value(), q.legendre_residual(&t));
    }
}

#[test]
fn h1_shift_invariance() {
    let mut r = rng(15);
    for _ in 0..10 {
        let tau = random_tau(&mut r);
        let a = quasi_periods(&TorusModulus::new(tau).unwrap()).unwrap();
        let b = quasi_periods(&TorusModulus::new(tau + 1.0).unwrap()).unwrap();
        assert!((a.h1 - b.h1).norm() < 1e-9);
    }
}

#[test]
fn kernel_periods_normalized() {
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let mut r = rng(16);
    for _ in 0..30 {
        let tau = random_tau(&mut r);
        let t = TorusModulus::new(tau).unwrap();
        let p1 = tau * r.random_range(0.05..0.95) + r.random_range(-3.0..3.0);
        let p2 = tau * r.random_range(-2.0..2.0) + r.random_range(0.05..0.95);
        let (a1, b1) = kernel_periods(&t, p1).unwrap();
        let (a2, b2) = kernel_periods(&t, p2).unwrap();
        assert!(a1.norm() <= 1e-9 && a2.norm() <= 1e-9, "τ={tau}: {a1} {a2}");
        assert!((b1 - two_pi_i).norm() <= 1e-8, "τ={tau}: {b1}");
        assert!((a1 - a2).norm() <= 1e-9 && (b1 - b2).norm() <= 1e-9);
    }
}

#[test]
fn quadrature_doubling_is_stable() {
    let mut r = rng(17);
    for _ in 0..10 {
        let tau = random_tau(&mut r);
        let t = TorusModulus::new(tau).unwrap();
        let p = C64::new(0.3, 0.0) + tau * 0.3;
        let (a, b) = kernel_periods_with(&t, p, 64).unwrap();
        let (a2, b2) = kernel_periods_with(&t, p, 128).unwrap();
        assert!((a - a2).norm() < 1e-10 && (b - b2).norm() < 1e-10, "τ={tau}");
    }
}
