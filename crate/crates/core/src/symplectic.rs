//! The symplectic group, the Siegel upper half space and the Möbius action.
//!
//! Integer symplectic matrices are kept exactly (checked `i64` arithmetic);
//! the action on `H_g` is evaluated in floating point and the result is
//! re-symmetrized.

use std::fmt::Debug;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SiegelError};
use crate::linalg::{
    compose, condition_number_c, im_part, max_abs_c, re_part, right_divide, symmetrize_c, CMat, RMat, C64,
};

/// Relative tolerance for symmetry of a constructed point.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Condition number of `CZ+D` above which the action is refused.
pub const MAX_DENOMINATOR_COND: f64 = 1e14;

/// A point `Z = X + iY` of the Siegel upper half space.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    z: CMat,
}

impl SiegelPoint {
    /// Validates symmetry and positivity of `Im Z`, then stores the
    /// symmetrized matrix.
    pub fn new(z: CMat) -> Result<Self> {
        if z.nrows() != z.ncols() || z.nrows() == 0 {
            return Err(SiegelError::InvalidInput(format!(
                "expected a nonempty square matrix, got {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SiegelError::InvalidInput("non-finite entry".into()));
        }
        let asym = max_abs_c(&(&z - z.transpose()));
        if asym > SYMMETRY_TOL * max_abs_c(&z).max(1.0) {
            return Err(SiegelError::NotSymmetric(asym));
        }
        let z = symmetrize_c(&z);
        if im_part(&z).cholesky().is_none() {
            return Err(SiegelError::NotPositiveDefinite);
        }
        Ok(SiegelPoint { z })
    }

    pub fn from_parts(re: &RMat, im: &RMat) -> Result<Self> {
        if re.shape() != im.shape() {
            return Err(SiegelError::InvalidInput("real and imaginary parts differ in shape".into()));
        }
        Self::new(compose(re, im))
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        let g = entries.len();
        let mut z = CMat::zeros(g, g);
        for (k, e) in entries.iter().enumerate() {
            z[(k, k)] = *e;
        }
        Self::new(z)
    }

    /// The base point `i I_g`.
    pub fn base_point(g: usize) -> Self {
        SiegelPoint { z: CMat::identity(g, g).map(|c| c * C64::i()) }
    }

    pub fn genus(&self) -> usize {
        self.z.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.z
    }

    pub fn re(&self) -> RMat {
        re_part(&self.z)
    }

    pub fn im(&self) -> RMat {
        im_part(&self.z)
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.z[(i, j)]
    }

    pub fn min_im_eigenvalue(&self) -> f64 {
        crate::linalg::min_eigenvalue(&self.im())
    }

    pub fn det_im(&self) -> f64 {
        self.im().determinant()
    }

    /// Submatrix on rows/columns `start..start+len`.
    pub fn principal_block(&self, start: usize, len: usize) -> Result<SiegelPoint> {
        SiegelPoint::new(self.z.view((start, start), (len, len)).into_owned())
    }

    /// Conjugation by a coordinate permutation: entry `(i, j)` becomes
    /// `Z[perm[i], perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<SiegelPoint> {
        check_permutation(perm, self.genus())?;
        let g = self.genus();
        let z = CMat::from_fn(g, g, |i, j| self.z[(perm[i], perm[j])]);
        Ok(SiegelPoint { z })
    }
}

#[derive(Serialize, Deserialize)]
struct SiegelPointJson {
    g: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn rows_to_matrix(g: usize, rows: &[Vec<f64>], what: &str) -> Result<RMat> {
    if rows.len() != g || rows.iter().any(|r| r.len() != g) {
        return Err(SiegelError::InvalidInput(format!("`{what}` must be a {g}x{g} array")));
    }
    Ok(RMat::from_fn(g, g, |i, j| rows[i][j]))
}

fn matrix_to_rows<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

impl Serialize for SiegelPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SiegelPointJson { g: self.genus(), re: matrix_to_rows(&self.re()), im: matrix_to_rows(&self.im()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SiegelPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SiegelPointJson::deserialize(d)?;
        let parse = || -> Result<SiegelPoint> {
            let re = rows_to_matrix(raw.g, &raw.re, "re")?;
            let im = rows_to_matrix(raw.g, &raw.im, "im")?;
            SiegelPoint::from_parts(&re, &im)
        };
        parse().map_err(serde::de::Error::custom)
    }
}

/// Scalar types a symplectic matrix may carry.
pub trait Entry: nalgebra::Scalar + Copy + Debug + PartialEq + 'static {
    const ZERO: Self;
    const ONE: Self;
    fn to_f64(self) -> f64;
    fn neg(self) -> Self;
    /// `acc + a*b`, `None` on overflow.
    fn mul_add(acc: Self, a: Self, b: Self) -> Option<Self>;
    /// Tolerance applied to the residual of `x^t J x - J`.
    fn symplectic_tolerance(scale: f64) -> f64;
}

impl Entry for i64 {
    const ZERO: Self = 0;
    const ONE: Self = 1;
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn neg(self) -> Self {
        -self
    }
    fn mul_add(acc: Self, a: Self, b: Self) -> Option<Self> {
        a.checked_mul(b).and_then(|p| acc.checked_add(p))
    }
    fn symplectic_tolerance(_scale: f64) -> f64 {
        0.0
    }
}

impl Entry for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    fn to_f64(self) -> f64 {
        self
    }
    fn neg(self) -> Self {
        -self
    }
    fn mul_add(acc: Self, a: Self, b: Self) -> Option<Self> {
        Some(acc + a * b)
    }
    fn symplectic_tolerance(scale: f64) -> f64 {
        1e-12 * scale.max(1.0)
    }
}

fn checked_matmul<T: Entry>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (n, k) = a.shape();
    let m = b.ncols();
    let mut out = DMatrix::from_element(n, m, T::ZERO);
    for i in 0..n {
        for j in 0..m {
            let mut acc = T::ZERO;
            for l in 0..k {
                acc = T::mul_add(acc, a[(i, l)], b[(l, j)]).ok_or(SiegelError::Overflow)?;
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// A `2g x 2g` matrix `x` with `x^t J_g x = J_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix<T: Entry = i64> {
    g: usize,
    m: DMatrix<T>,
}

pub type IntSymplectic = SymplecticMatrix<i64>;
pub type RealSymplectic = SymplecticMatrix<f64>;

impl<T: Entry> SymplecticMatrix<T> {
    /// Validates the shape and the symplectic identity.
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || !n.is_multiple_of(2) || m.ncols() != n {
            return Err(SiegelError::InvalidInput(format!(
                "symplectic matrix must be 2g x 2g, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let x = SymplecticMatrix { g: n / 2, m };
        let res = x.symplectic_residual()?;
        let scale = x.m.iter().fold(0.0f64, |a, v| a.max(v.to_f64().abs()));
        if res > T::symplectic_tolerance(scale * scale) {
            return Err(SiegelError::NotSymplectic(res));
        }
        Ok(x)
    }

    pub fn identity(g: usize) -> Self {
        let mut m = DMatrix::from_element(2 * g, 2 * g, T::ZERO);
        for k in 0..2 * g {
            m[(k, k)] = T::ONE;
        }
        SymplecticMatrix { g, m }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.m
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<T> {
        self.m.view((r * self.g, c * self.g), (self.g, self.g)).into_owned()
    }

    pub fn a(&self) -> DMatrix<T> {
        self.block(0, 0)
    }
    pub fn b(&self) -> DMatrix<T> {
        self.block(0, 1)
    }
    pub fn c(&self) -> DMatrix<T> {
        self.block(1, 0)
    }
    pub fn d(&self) -> DMatrix<T> {
        self.block(1, 1)
    }

    /// Max-abs entry of `x^t J x - J`.
    pub fn symplectic_residual(&self) -> Result<f64> {
        let j = j_generic::<T>(self.g);
        let lhs = checked_matmul(&checked_matmul(&self.m.transpose(), &j)?, &self.m)?;
        Ok(lhs.iter().zip(j.iter()).fold(0.0f64, |acc, (a, b)| acc.max((a.to_f64() - b.to_f64()).abs())))
    }

    /// Group product `self * other` (checked for integers).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.g != other.g {
            return Err(SiegelError::DimensionMismatch { expected: self.g, got: other.g });
        }
        Ok(SymplecticMatrix { g: self.g, m: checked_matmul(&self.m, &other.m)? })
    }

    /// Inverse `(D^t, -B^t; -C^t, A^t)`.
    pub fn inverse(&self) -> Self {
        let g = self.g;
        let mut m = DMatrix::from_element(2 * g, 2 * g, T::ZERO);
        for i in 0..g {
            for j in 0..g {
                m[(i, j)] = self.m[(g + j, g + i)];
                m[(i, g + j)] = self.m[(j, g + i)].neg();
                m[(g + i, j)] = self.m[(g + j, i)].neg();
                m[(g + i, g + j)] = self.m[(j, i)];
            }
        }
        SymplecticMatrix { g, m }
    }

    pub fn to_f64_matrix(&self) -> RMat {
        self.m.map(|v| v.to_f64())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.g)
    }
}

impl IntSymplectic {
    /// The translation `(I, B; 0, I)` for an integer symmetric `B`.
    pub fn translation(b: &DMatrix<i64>) -> Result<Self> {
        let g = b.nrows();
        if b.ncols() != g || *b != b.transpose() {
            return Err(SiegelError::InvalidInput("translation block must be symmetric".into()));
        }
        let mut x = Self::identity(g);
        x.m.view_mut((0, g), (g, g)).copy_from(b);
        Ok(x)
    }

    /// The block matrix `(A, 0; 0, A^{-t})` for unimodular `A`, given its
    /// exact inverse. Acts on `H_g` by `Z -> A Z A^t`.
    pub fn from_unimodular(a: &DMatrix<i64>, a_inv: &DMatrix<i64>) -> Result<Self> {
        let g = a.nrows();
        if checked_matmul(a, a_inv)? != DMatrix::identity(g, g) {
            return Err(SiegelError::InvalidInput("A * A_inv != I".into()));
        }
        let mut x = Self::identity(g);
        x.m.view_mut((0, 0), (g, g)).copy_from(a);
        x.m.view_mut((g, g), (g, g)).copy_from(&a_inv.transpose());
        Ok(x)
    }

    /// `Z -> P Z P^t` with `(P Z P^t)[i][j] = Z[perm[i]][perm[j]]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let g = perm.len();
        check_permutation(perm, g)?;
        let mut p = DMatrix::zeros(g, g);
        for (i, &pi) in perm.iter().enumerate() {
            p[(i, pi)] = 1i64;
        }
        Self::from_unimodular(&p, &p.transpose())
    }

    /// Quasi-inversion on coordinate `k`: the embedded `J_1` acting on the
    /// `k`-th coordinate only.
    pub fn quasi_inversion(g: usize, k: usize) -> Self {
        let mut x = Self::identity(g);
        x.m[(k, k)] = 0;
        x.m[(g + k, g + k)] = 0;
        x.m[(k, g + k)] = 1;
        x.m[(g + k, k)] = -1;
        x
    }
}

#[derive(Serialize, Deserialize)]
struct SymplecticJson<T> {
    g: usize,
    entries: Vec<Vec<T>>,
}

impl<T: Entry + Serialize> Serialize for SymplecticMatrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymplecticJson { g: self.g, entries: matrix_to_rows(&self.m) }.serialize(s)
    }
}

impl<'de, T: Entry + Deserialize<'de>> Deserialize<'de> for SymplecticMatrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SymplecticJson::<T>::deserialize(d)?;
        let n = 2 * raw.g;
        if raw.entries.len() != n || raw.entries.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom(format!("`entries` must be {n}x{n}")));
        }
        let m = DMatrix::from_fn(n, n, |i, j| raw.entries[i][j]);
        SymplecticMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

fn j_generic<T: Entry>(g: usize) -> DMatrix<T> {
    let mut m = DMatrix::from_element(2 * g, 2 * g, T::ZERO);
    for k in 0..g {
        m[(k, g + k)] = T::ONE;
        m[(g + k, k)] = T::ONE.neg();
    }
    m
}

/// `J_g = (0, I_g; -I_g, 0)`.
pub fn j_matrix(g: usize) -> IntSymplectic {
    assert!(g >= 1, "genus must be positive");
    SymplecticMatrix { g, m: j_generic(g) }
}

pub(crate) fn check_permutation(perm: &[usize], g: usize) -> Result<()> {
    let mut seen = vec![false; g];
    if perm.len() != g {
        return Err(SiegelError::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= g || seen[p] {
            return Err(SiegelError::InvalidPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// `γ·Z = (AZ+B)(CZ+D)^{-1}`, symmetrized.
pub fn mobius_act<T: Entry>(gamma: &SymplecticMatrix<T>, z: &SiegelPoint) -> Result<SiegelPoint> {
    let g = z.genus();
    if gamma.genus() != g {
        return Err(SiegelError::DimensionMismatch { expected: g, got: gamma.genus() });
    }
    let x = gamma.to_f64_matrix().map(|v| C64::new(v, 0.0));
    let a = x.view((0, 0), (g, g));
    let b = x.view((0, g), (g, g));
    let c = x.view((g, 0), (g, g));
    let d = x.view((g, g), (g, g));
    let zm = z.matrix();
    let num = a * zm + b;
    let den = c * zm + d;
    let cond = condition_number_c(&den);
    if !(cond <= MAX_DENOMINATOR_COND) {
        return Err(SiegelError::SingularDenominator(cond));
    }
    let w = right_divide(&num, &den).ok_or(SiegelError::SingularDenominator(f64::INFINITY))?;
    SiegelPoint::new(symmetrize_c(&w)).map_err(|e| match e {
        SiegelError::NotSymmetric(r) => SiegelError::NumericalFailure(format!("action lost symmetry ({r:.3e})")),
        other => other,
    })
}

/// The map `Φ` sending `g` rank-one factors `(a_k, b_k; c_k, d_k)` to the
/// `2g x 2g` matrix with diagonal blocks `diag(a)`, `diag(b)`, `diag(c)`,
/// `diag(d)`.
pub fn sl2_product_embed<T: Entry>(factors: &[SymplecticMatrix<T>]) -> Result<SymplecticMatrix<T>> {
    let g = factors.len();
    if g == 0 {
        return Err(SiegelError::InvalidInput("need at least one factor".into()));
    }
    let mut m = DMatrix::from_element(2 * g, 2 * g, T::ZERO);
    for (k, f) in factors.iter().enumerate() {
        if f.genus() != 1 {
            return Err(SiegelError::DimensionMismatch { expected: 1, got: f.genus() });
        }
        m[(k, k)] = f.m[(0, 0)];
        m[(k, g + k)] = f.m[(0, 1)];
        m[(g + k, k)] = f.m[(1, 0)];
        m[(g + k, g + k)] = f.m[(1, 1)];
    }
    Ok(SymplecticMatrix { g, m })
}

/// `diag(Z1, Z2)` in `H_{k + (g-k)}`.
pub fn block_embed(z1: &SiegelPoint, z2: &SiegelPoint) -> SiegelPoint {
    let (k, l) = (z1.genus(), z2.genus());
    let mut z = CMat::zeros(k + l, k + l);
    z.view_mut((0, 0), (k, k)).copy_from(z1.matrix());
    z.view_mut((k, k), (l, l)).copy_from(z2.matrix());
    SiegelPoint { z }
}

/// Elementary transvection `I + s E_ij` with its exact inverse.
fn transvection(g: usize, i: usize, j: usize, s: i64) -> IntSymplectic {
    let mut a = DMatrix::<i64>::identity(g, g);
    let mut ai = DMatrix::<i64>::identity(g, g);
    a[(i, j)] = s;
    ai[(i, j)] = -s;
    IntSymplectic::from_unimodular(&a, &ai).expect("transvection is unimodular")
}

fn sign_flip(g: usize, k: usize) -> IntSymplectic {
    let mut a = DMatrix::<i64>::identity(g, g);
    a[(k, k)] = -1;
    IntSymplectic::from_unimodular(&a, &a).expect("sign flip is unimodular")
}

/// A deterministic product of `length` random generators: `J_g`, integer
/// symmetric translations with entries in `-2..=2`, permutation blocks and
/// elementary transvections.
pub fn random_symplectic_word(g: usize, length: usize, seed: u64) -> Result<IntSymplectic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_word_with(&mut rng, g, length)
}

pub(crate) fn random_word_with<R: Rng>(rng: &mut R, g: usize, length: usize) -> Result<IntSymplectic> {
    let mut acc = IntSymplectic::identity(g);
    for _ in 0..length {
        let gen = match rng.random_range(0..4) {
            0 => j_matrix(g),
            1 => {
                let mut b = DMatrix::<i64>::zeros(g, g);
                for i in 0..g {
                    for j in i..g {
                        let v = rng.random_range(-2..=2);
                        b[(i, j)] = v;
                        b[(j, i)] = v;
                    }
                }
                IntSymplectic::translation(&b)?
            }
            2 => {
                let mut perm: Vec<usize> = (0..g).collect();
                for i in (1..g).rev() {
                    let j = rng.random_range(0..=i);
                    perm.swap(i, j);
                }
                IntSymplectic::permutation(&perm)?
            }
            _ => {
                if g == 1 {
                    j_matrix(1)
                } else {
                    let i = rng.random_range(0..g);
                    let mut j = rng.random_range(0..g - 1);
                    if j >= i {
                        j += 1;
                    }
                    let s = if rng.random_bool(0.5) { 1 } else { -1 };
                    transvection(g, i, j, s)
                }
            }
        };
        acc = acc.mul(&gen)?;
    }
    Ok(acc)
}

/// Finite generating alphabet used for word searches: `J_g`, unit symmetric
/// translations `±E`, adjacent transpositions, unit transvections and
/// coordinate sign flips.
pub fn generator_alphabet(g: usize) -> Vec<IntSymplectic> {
    let mut out = vec![j_matrix(g)];
    for i in 0..g {
        for j in i..g {
            for s in [1i64, -1] {
                let mut b = DMatrix::<i64>::zeros(g, g);
                b[(i, j)] = s;
                b[(j, i)] = s;
                out.push(IntSymplectic::translation(&b).expect("symmetric"));
            }
        }
    }
    for k in 0..g.saturating_sub(1) {
        let mut perm: Vec<usize> = (0..g).collect();
        perm.swap(k, k + 1);
        out.push(IntSymplectic::permutation(&perm).expect("permutation"));
    }
    for i in 0..g {
        for j in 0..g {
            if i != j {
                for s in [1i64, -1] {
                    out.push(transvection(g, i, j, s));
                }
            }
        }
    }
    for k in 0..g {
        out.push(sign_flip(g, k));
    }
    out
}

/// Weyl-chamber point `(h_1, ..., h_g)` for the chamber parameter `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChamberPoint {
    pub h: Vec<f64>,
    pub a: f64,
}

impl ChamberPoint {
    pub fn new(h: Vec<f64>, a: f64) -> Result<Self> {
        if !(a > 0.0) || h.is_empty() || h.iter().any(|x| !(*x > 0.0)) {
            return Err(SiegelError::InvalidInput("chamber coordinates must be positive".into()));
        }
        if !satisfies_chamber(&h, a) {
            return Err(SiegelError::InvalidInput(format!("{h:?} violates the chamber inequalities at a={a}")));
        }
        Ok(ChamberPoint { h, a })
    }

    /// The diagonal point `i diag(h_1^2, ..., h_g^2)`.
    pub fn to_point(&self) -> SiegelPoint {
        let d: Vec<C64> = self.h.iter().map(|x| C64::new(0.0, x * x)).collect();
        SiegelPoint::diagonal(&d).expect("positive diagonal")
    }
}

/// `h_i / h_j >= a` for `i < j` and `h_i h_j >= a` for `i <= j`.
pub fn satisfies_chamber(h: &[f64], a: f64) -> bool {
    let g = h.len();
    for i in 0..g {
        for j in i..g {
            if j > i && h[i] / h[j] < a {
                return false;
            }
            if h[i] * h[j] < a {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> C64 {
        C64::i()
    }

    #[test]
    fn j_matrix_small_cases() {
        let j1 = j_matrix(1);
        assert_eq!(j1.entries(), &DMatrix::from_row_slice(2, 2, &[0, 1, -1, 0]));
        let j2 = j_matrix(2);
        #[rustfmt::skip]
        let expect = DMatrix::from_row_slice(4, 4, &[
            0, 0, 1, 0,
            0, 0, 0, 1,
            -1, 0, 0, 0,
            0, -1, 0, 0,
        ]);
        assert_eq!(j2.entries(), &expect);
        for g in 1..5 {
            let j = j_matrix(g);
            assert_eq!(j.symplectic_residual().unwrap(), 0.0);
            let sq = j.mul(&j).unwrap();
            assert_eq!(sq.entries(), &(-DMatrix::<i64>::identity(2 * g, 2 * g)));
        }
    }

    #[test]
    fn mobius_examples() {
        let base = SiegelPoint::base_point(3);
        let w = mobius_act(&j_matrix(3), &base).unwrap();
        assert!(max_abs_c(&(w.matrix() - base.matrix())) < 1e-15);

        let t = IntSymplectic::new(DMatrix::from_row_slice(2, 2, &[1, 1, 0, 1])).unwrap();
        let z = SiegelPoint::diagonal(&[i()]).unwrap();
        let w = mobius_act(&t, &z).unwrap();
        assert!((w.entry(0, 0) - C64::new(1.0, 1.0)).norm() < 1e-15);

        let z = SiegelPoint::diagonal(&[2.0 * i()]).unwrap();
        let w = mobius_act(&j_matrix(1), &z).unwrap();
        assert!((w.entry(0, 0) - C64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn mobius_rejects_genus_mismatch() {
        let z = SiegelPoint::base_point(2);
        assert!(matches!(mobius_act(&j_matrix(3), &z), Err(SiegelError::DimensionMismatch { .. })));
    }

    #[test]
    fn new_rejects_bad_points() {
        let mut z = CMat::identity(2, 2).map(|c| c * i());
        z[(0, 1)] = C64::new(0.5, 0.0);
        assert!(matches!(SiegelPoint::new(z.clone()), Err(SiegelError::NotSymmetric(_))));
        z[(1, 0)] = C64::new(0.5, 0.0);
        assert!(SiegelPoint::new(z.clone()).is_ok());
        z[(0, 1)] = C64::new(0.5, 2.0);
        z[(1, 0)] = C64::new(0.5, 2.0);
        assert_eq!(SiegelPoint::new(z), Err(SiegelError::NotPositiveDefinite));
    }

    #[test]
    fn non_symplectic_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1i64, 1, 1, 1]);
        assert!(matches!(IntSymplectic::new(m), Err(SiegelError::NotSymplectic(_))));
    }

    #[test]
    fn embed_examples() {
        let ones = vec![IntSymplectic::identity(1); 3];
        assert!(sl2_product_embed(&ones).unwrap().is_identity());
        let js = vec![j_matrix(1), j_matrix(1)];
        assert_eq!(sl2_product_embed(&js).unwrap(), j_matrix(2));

        let z1 = SiegelPoint::diagonal(&[i()]).unwrap();
        let z2 = SiegelPoint::diagonal(&[2.0 * i()]).unwrap();
        let z = block_embed(&z1, &z2);
        assert_eq!(z, SiegelPoint::diagonal(&[i(), 2.0 * i()]).unwrap());
    }

    #[test]
    fn iterated_block_embed_of_scalars_is_diagonal() {
        let zs: Vec<C64> = (1..=4).map(|k| C64::new(0.1 * k as f64, k as f64)).collect();
        let mut acc = SiegelPoint::diagonal(&zs[..1]).unwrap();
        for z in &zs[1..] {
            acc = block_embed(&acc, &SiegelPoint::diagonal(&[*z]).unwrap());
        }
        assert_eq!(acc, SiegelPoint::diagonal(&zs).unwrap());
    }

    #[test]
    fn random_words_are_exact_and_deterministic() {
        assert!(random_symplectic_word(3, 0, 7).unwrap().is_identity());
        for seed in 0..50 {
            let w = random_symplectic_word(3, 8, seed).unwrap();
            assert_eq!(w.symplectic_residual().unwrap(), 0.0);
            assert_eq!(w, random_symplectic_word(3, 8, seed).unwrap());
        }
    }

    #[test]
    fn inverse_is_inverse() {
        let w = random_symplectic_word(3, 6, 11).unwrap();
        assert!(w.mul(&w.inverse()).unwrap().is_identity());
    }

    #[test]
    fn alphabet_is_symplectic() {
        for g in 1..5 {
            for x in generator_alphabet(g) {
                assert_eq!(x.symplectic_residual().unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn quasi_inversion_matches_embedded_j() {
        let mut factors = vec![IntSymplectic::identity(1); 3];
        factors[1] = j_matrix(1);
        assert_eq!(sl2_product_embed(&factors).unwrap(), IntSymplectic::quasi_inversion(3, 1));
    }

    #[test]
    fn permutation_action_permutes_entries() {
        let z = SiegelPoint::new(CMat::from_fn(3, 3, |r, c| {
            if r == c {
                C64::new(0.1 * r as f64, 2.0 + r as f64)
            } else {
                C64::new(0.01 * (r + c) as f64, 0.1)
            }
        }))
        .unwrap();
        let perm = [2, 0, 1];
        let act = mobius_act(&IntSymplectic::permutation(&perm).unwrap(), &z).unwrap();
        assert!(max_abs_c(&(act.matrix() - z.permuted(&perm).unwrap().matrix())) < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let z = SiegelPoint::diagonal(&[C64::new(0.25, 1.5), i()]).unwrap();
        let s = serde_json::to_string(&z).unwrap();
        assert!(s.starts_with("{\"g\":2"));
        let back: SiegelPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);

        let w = random_symplectic_word(2, 4, 3).unwrap();
        let back: IntSymplectic = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back, w);

        let bad = r#"{"g":1,"entries":[[1,1],[1,1]]}"#;
        assert!(serde_json::from_str::<IntSymplectic>(bad).is_err());
    }

    #[test]
    fn chamber_inequalities() {
        assert!(satisfies_chamber(&[2.0, 1.0], 0.5));
        assert!(!satisfies_chamber(&[1.0, 2.0], 0.9));
        assert!(ChamberPoint::new(vec![0.5, 0.4], 0.5).is_err());
    }
}
