#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siegel_core::reduction::{in_siegel_set, SiegelSetParams};
use siegel_core::symplectic::j_matrix;
use siegel_core::{RealSymplectic, SiegelPoint};

type CMat = DMatrix<C64>;

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generic point: X uniform in [-1, 1], Y = M M^t + 0.5 I.
pub fn random_point<R: Rng>(rng: &mut R, g: usize) -> SiegelPoint {
    let m = DMatrix::from_fn(g, g, |_, _| rng.random_range(-1.0..1.0));
    let y = &m * m.transpose() + DMatrix::identity(g, g) * 0.5;
    let mut x = DMatrix::from_fn(g, g, |_, _| rng.random_range(-1.0..1.0));
    x = (&x + x.transpose()) * 0.5;
    SiegelPoint::from_parts(&x, &y).unwrap()
}

/// A point of the default Siegel set with chamber coordinates spread by
/// ratios in [1, 3] per step.
pub fn random_reduced_point<R: Rng>(rng: &mut R, g: usize) -> SiegelPoint {
    loop {
        let mut h = vec![0.0; g];
        h[g - 1] = rng.random_range(0.95..2.0);
        for i in (0..g - 1).rev() {
            h[i] = h[i + 1] * rng.random_range(0.0f64..3f64.ln()).exp();
        }
        let mut u = DMatrix::<f64>::identity(g, g);
        for i in 0..g {
            for j in i + 1..g {
                u[(i, j)] = rng.random_range(-0.5..0.5);
            }
        }
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(g, h.iter().map(|v| v * v)));
        let y = &u * d * u.transpose();
        let mut x = DMatrix::from_fn(g, g, |_, _| rng.random_range(-0.5..0.5));
        x = (&x + x.transpose()) * 0.5;
        let z = SiegelPoint::from_parts(&x, &y).unwrap();
        if in_siegel_set(&z, &SiegelSetParams::default()).unwrap() {
            return z;
        }
    }
}

pub fn rel_close(a: &SiegelPoint, b: &SiegelPoint) -> f64 {
    let diff = a.matrix() - b.matrix();
    let scale = b.matrix().iter().fold(1.0f64, |m, c| m.max(c.norm()));
    diff.iter().fold(0.0f64, |m, c| m.max(c.norm())) / scale
}

/// Distance through the Cayley transform: move `z1` to `iI`, map to the
/// disk, and read off the singular values of the image of `z2`.
pub fn cayley_distance(z1: &SiegelPoint, z2: &SiegelPoint) -> f64 {
    let g = z1.genus();
    let l = z1.im().cholesky().unwrap().l();
    let l_inv = l.clone().try_inverse().unwrap().map(|v| C64::new(v, 0.0));
    let x1 = z1.re().map(|v| C64::new(v, 0.0));
    let w = &l_inv * (z2.matrix() - x1) * l_inv.transpose();
    let i = CMat::identity(g, g) * C64::i();
    let q = (&w - &i) * (&w + &i).try_inverse().unwrap();
    q.singular_values()
        .iter()
        .map(|s| {
            let r = ((1.0 + s) / (1.0 - s)).ln();
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

pub fn h1_distance(z: C64, w: C64) -> f64 {
    (1.0 + (z - w).norm_sqr() / (2.0 * z.im * w.im)).acosh()
}

pub fn random_sl2<R: Rng>(r: &mut R) -> RealSymplectic {
    let (a, b, c) = (r.random_range(0.5..2.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    RealSymplectic::new(DMatrix::from_row_slice(2, 2, &[a, b, c, (1.0 + b * c) / a])).unwrap()
}

pub fn random_real_symplectic<R: Rng>(r: &mut R, g: usize) -> RealSymplectic {
    let sym = |r: &mut R| {
        let s = DMatrix::from_fn(g, g, |_, _| r.random_range(-1.0..1.0));
        (&s + s.transpose()) * 0.5
    };
    let translation = |s: DMatrix<f64>| {
        let mut m = DMatrix::identity(2 * g, 2 * g);
        m.view_mut((0, g), (g, g)).copy_from(&s);
        m
    };
    let a = DMatrix::identity(g, g) + DMatrix::from_fn(g, g, |_, _| r.random_range(-0.3..0.3));
    let a_inv_t = a.clone().try_inverse().unwrap().transpose();
    let mut block = DMatrix::zeros(2 * g, 2 * g);
    block.view_mut((0, 0), (g, g)).copy_from(&a);
    block.view_mut((g, g), (g, g)).copy_from(&a_inv_t);
    let j = j_matrix(g).to_f64_matrix();
    let m = translation(sym(r)) * block * j * translation(sym(r));
    RealSymplectic::new(m).unwrap()
}

/// Classical SL(2, Z) reduction: translate into |x| <= 1/2, invert while |z| < 1.
pub fn classical_sl2_reduce(mut z: C64) -> C64 {
    for _ in 0..10_000 {
        z -= C64::new(z.re.round(), 0.0);
        if z.norm_sqr() < 1.0 - 1e-12 {
            z = -z.inv();
        } else {
            return z;
        }
    }
    panic!("oracle did not converge");
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
