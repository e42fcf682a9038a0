//! First-order period matrices of plumbed families built from tori.
//!
//! A chain glues tori `S_{order[0]}, ..., S_{order[g-1]}` in a line; junction
//! `k` joins positions `k` and `k+1` by the annulus `zw = t_k`. Rows and
//! columns of the period matrix are indexed by position.
//!
//! The non-separating model adds one handle of parameter `t` to a chain of
//! genus `g-1`, with the logarithmic corner entry of the pinched cycle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elliptic::{kernel_periods, TorusModulus};
use crate::error::{Result, SiegelError};
use crate::linalg::{CMat, C64};
use crate::symplectic::{check_permutation, SiegelPoint};

pub const DEFAULT_VALIDITY_RADIUS: f64 = 0.1;
/// Default glue point on either side of a junction.
pub const DEFAULT_GLUE_POINT: C64 = C64::new(0.3, 0.3);
/// Glue point of hyperelliptic chains: a 2-torsion point, fixed by `z -> -z`.
pub const HYPERELLIPTIC_GLUE_POINT: C64 = C64::new(0.5, 0.0);
/// Default handle feet of the non-separating model.
pub const DEFAULT_HANDLE_A: C64 = C64::new(0.1, 0.2);
pub const DEFAULT_HANDLE_B: C64 = C64::new(0.4, 0.5);
const BRANCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TorusChainFamily {
    pub tau: Vec<TorusModulus>,
    /// `order[k]` is the torus (0-based) sitting at position `k`.
    pub order: Vec<usize>,
    /// `(left, right)` glue points of junction `k`, on the tori at positions
    /// `k` and `k+1`.
    pub glue_points: Vec<(C64, C64)>,
    pub t: Vec<C64>,
    pub validity_radius: f64,
    pub hyperelliptic: bool,
}

impl TorusChainFamily {
    /// Chain in the given order with default glue points and all `t = 0`.
    pub fn new(tau: Vec<TorusModulus>, order: Vec<usize>) -> Result<Self> {
        let g = tau.len();
        if g == 0 {
            return Err(SiegelError::InvalidInput("a chain needs at least one torus".into()));
        }
        check_permutation(&order, g)?;
        let junctions = g - 1;
        Ok(TorusChainFamily {
            tau,
            order,
            glue_points: vec![(DEFAULT_GLUE_POINT, DEFAULT_GLUE_POINT); junctions],
            t: vec![C64::new(0.0, 0.0); junctions],
            validity_radius: DEFAULT_VALIDITY_RADIUS,
            hyperelliptic: false,
        })
    }

    /// Chain in the identity order.
    pub fn in_order(tau: Vec<TorusModulus>) -> Result<Self> {
        let g = tau.len();
        Self::new(tau, (0..g).collect())
    }

    /// Glue every junction at the 2-torsion point `1/2`.
    pub fn into_hyperelliptic(mut self) -> Self {
        self.glue_points = vec![(HYPERELLIPTIC_GLUE_POINT, HYPERELLIPTIC_GLUE_POINT); self.junctions()];
        self.hyperelliptic = true;
        self
    }

    pub fn genus(&self) -> usize {
        self.tau.len()
    }

    pub fn junctions(&self) -> usize {
        self.tau.len().saturating_sub(1)
    }

    pub fn with_t(&self, t: Vec<C64>) -> Result<Self> {
        if t.len() != self.junctions() {
            return Err(SiegelError::DimensionMismatch { expected: self.junctions(), got: t.len() });
        }
        let mut f = self.clone();
        f.t = t;
        Ok(f)
    }

    /// Modulus of the torus at position `k`.
    pub fn tau_at(&self, k: usize) -> TorusModulus {
        self.tau[self.order[k]]
    }

    fn validate(&self) -> Result<()> {
        let g = self.genus();
        if g == 0 {
            return Err(SiegelError::InvalidInput("a chain needs at least one torus".into()));
        }
        check_permutation(&self.order, g)?;
        if self.glue_points.len() != self.junctions() {
            return Err(SiegelError::DimensionMismatch { expected: self.junctions(), got: self.glue_points.len() });
        }
        if self.t.len() != self.junctions() {
            return Err(SiegelError::DimensionMismatch { expected: self.junctions(), got: self.t.len() });
        }
        if !(self.validity_radius > 0.0) {
            return Err(SiegelError::InvalidInput("validity radius must be positive".into()));
        }
        for t in &self.t {
            if !(t.norm() < self.validity_radius) {
                return Err(SiegelError::ExpansionDomain { abs: t.norm(), radius: self.validity_radius });
            }
        }
        Ok(())
    }
}

/// Coupling constants `κ_k`: B-period of the normalized kernel on the right
/// torus of junction `k`, with its pole at the right glue point.
pub fn junction_constants(fam: &TorusChainFamily) -> Result<Vec<C64>> {
    (0..fam.junctions()).map(|k| kernel_periods(&fam.tau_at(k + 1), fam.glue_points[k].1).map(|(_, b)| b)).collect()
}

pub fn chain_period_matrix(fam: &TorusChainFamily) -> Result<SiegelPoint> {
    fam.validate()?;
    let kappa = junction_constants(fam)?;
    chain_period_matrix_with(fam, &kappa)
}

/// `Π(t) = diag(τ_order) - Σ t_k κ_k (E_{k,k+1} + E_{k+1,k})` with
/// precomputed `κ`.
pub fn chain_period_matrix_with(fam: &TorusChainFamily, kappa: &[C64]) -> Result<SiegelPoint> {
    fam.validate()?;
    if kappa.len() != fam.junctions() {
        return Err(SiegelError::DimensionMismatch { expected: fam.junctions(), got: kappa.len() });
    }
    let g = fam.genus();
    let mut z = CMat::zeros(g, g);
    for k in 0..g {
        z[(k, k)] = fam.tau_at(k).value();
    }
    for k in 0..fam.junctions() {
        let c = -fam.t[k] * kappa[k];
        z[(k, k + 1)] = c;
        z[(k + 1, k)] = c;
    }
    SiegelPoint::new(z)
}

/// Same tori, glued in `order2`; glue points and `t` stay with their
/// positions.
pub fn reorder_family(fam: &TorusChainFamily, order2: &[usize]) -> Result<TorusChainFamily> {
    check_permutation(order2, fam.genus())?;
    let mut f = fam.clone();
    f.order = order2.to_vec();
    Ok(f)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonSeparatingFamily {
    /// The genus `g-1` surface `M`.
    pub base: TorusChainFamily,
    /// Position in the base chain of the torus carrying the handle feet.
    pub handle: usize,
    pub a: C64,
    pub b: C64,
    pub t: C64,
    pub c0: C64,
    pub c1: C64,
    /// First-order couplings `π_ij` (`g x g`); zero when absent.
    pub pi: Option<CMat>,
    pub validity_radius: f64,
}

impl NonSeparatingFamily {
    pub fn new(base: TorusChainFamily, t: C64) -> Self {
        NonSeparatingFamily {
            base,
            handle: 0,
            a: DEFAULT_HANDLE_A,
            b: DEFAULT_HANDLE_B,
            t,
            c0: C64::new(0.0, 0.0),
            c1: C64::new(0.0, 0.0),
            pi: None,
            validity_radius: DEFAULT_VALIDITY_RADIUS,
        }
    }

    pub fn genus(&self) -> usize {
        self.base.genus() + 1
    }

    pub fn with_t(&self, t: C64) -> Self {
        let mut f = self.clone();
        f.t = t;
        f
    }

    /// `-(i/2π) log t + c0 + c1 t` on the principal branch.
    pub fn corner(&self) -> Result<C64> {
        self.check_t()?;
        let log_t = self.t.ln();
        Ok(C64::new(0.0, -1.0 / (2.0 * PI)) * log_t + self.c0 + self.c1 * self.t)
    }

    fn check_t(&self) -> Result<()> {
        let r = self.t.norm();
        if !(r > 0.0 && r < self.validity_radius) {
            return Err(SiegelError::ExpansionDomain { abs: r, radius: self.validity_radius });
        }
        let arg = self.t.arg();
        if arg.abs() > PI - BRANCH_TOL {
            return Err(SiegelError::BranchAmbiguity(arg));
        }
        Ok(())
    }
}

pub fn nonseparating_period_matrix(fam: &NonSeparatingFamily) -> Result<SiegelPoint> {
    let base = chain_period_matrix(&fam.base)?;
    nonseparating_period_matrix_with(fam, &base)
}

/// Non-separating period matrix over a precomputed base period matrix.
pub fn nonseparating_period_matrix_with(fam: &NonSeparatingFamily, base: &SiegelPoint) -> Result<SiegelPoint> {
    let h = fam.base.genus();
    if base.genus() != h {
        return Err(SiegelError::DimensionMismatch { expected: h, got: base.genus() });
    }
    if fam.handle >= h {
        return Err(SiegelError::InvalidInput(format!("handle position {} out of range 0..{h}", fam.handle)));
    }
    if (fam.a - fam.b).norm() == 0.0 {
        return Err(SiegelError::InvalidInput("handle feet a and b coincide".into()));
    }
    let corner = fam.corner()?;
    let g = h + 1;
    let pi = match &fam.pi {
        Some(p) if p.shape() != (g, g) => {
            return Err(SiegelError::DimensionMismatch { expected: g, got: p.nrows() });
        }
        Some(p) => p.clone(),
        None => CMat::zeros(g, g),
    };
    let t = fam.t;
    let mut z = CMat::zeros(g, g);
    for i in 0..h {
        for j in 0..h {
            z[(i, j)] = base.entry(i, j) + t * pi[(i, j)];
        }
        let a_i = if i == fam.handle { fam.b - fam.a } else { C64::new(0.0, 0.0) };
        z[(i, h)] = a_i + t * pi[(i, h)];
        z[(h, i)] = a_i + t * pi[(h, i)];
    }
    z[(h, h)] = corner;
    SiegelPoint::new(z)
}

/// Either kind of family, as read from JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Chain(TorusChainFamily),
    NonSeparating(NonSeparatingFamily),
}

impl Family {
    pub fn period_matrix(&self) -> Result<SiegelPoint> {
        match self {
            Family::Chain(f) => chain_period_matrix(f),
            Family::NonSeparating(f) => nonseparating_period_matrix(f),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FamilyJson =
            serde_json::from_str(s).map_err(|e| SiegelError::InvalidInput(format!("family JSON: {e}")))?;
        raw.into_family()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&FamilyJson::from_family(self)).expect("family serializes")
    }
}

type Pair = [f64; 2];

fn c(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn p(z: C64) -> Pair {
    [z.re, z.im]
}

/// Wire format. `order` and `handle` are 1-based; for `nonseparating` the
/// last entry of `t` is the handle parameter and the rest belong to the base
/// chain. `glue_points` lists one point per junction (used on both sides) or
/// a left/right pair per junction.
#[derive(Debug, Serialize, Deserialize)]
struct FamilyJson {
    kind: String,
    tau: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    glue_points: Option<Vec<Pair>>,
    #[serde(default)]
    t: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c0: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c1: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    handle: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi: Option<Vec<Vec<Pair>>>,
    #[serde(default)]
    hyperelliptic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    validity_radius: Option<f64>,
}

impl FamilyJson {
    fn chain(&self, t: &[Pair]) -> Result<TorusChainFamily> {
        let tau = self.tau.iter().map(|&x| TorusModulus::new(c(x))).collect::<Result<Vec<_>>>()?;
        let g = tau.len();
        let order = match &self.order {
            Some(o) => {
                if o.contains(&0) {
                    return Err(SiegelError::InvalidPermutation(o.clone()));
                }
                o.iter().map(|k| k - 1).collect()
            }
            None => (0..g).collect(),
        };
        let mut fam = TorusChainFamily::new(tau, order)?;
        if self.hyperelliptic {
            fam = fam.into_hyperelliptic();
        }
        let junctions = fam.junctions();
        if let Some(gp) = &self.glue_points {
            fam.glue_points = if gp.len() == junctions {
                gp.iter().map(|&x| (c(x), c(x))).collect()
            } else if gp.len() == 2 * junctions {
                gp.chunks(2).map(|w| (c(w[0]), c(w[1]))).collect()
            } else {
                return Err(SiegelError::InvalidInput(format!(
                    "expected {junctions} or {} glue points, got {}",
                    2 * junctions,
                    gp.len()
                )));
            };
        }
        if !t.is_empty() {
            fam = fam.with_t(t.iter().map(|&x| c(x)).collect())?;
        }
        if let Some(r) = self.validity_radius {
            fam.validity_radius = r;
        }
        Ok(fam)
    }

    fn into_family(self) -> Result<Family> {
        match self.kind.as_str() {
            "chain" => Ok(Family::Chain(self.chain(&self.t)?)),
            "nonseparating" => {
                let (handle_t, base_t) = self
                    .t
                    .split_last()
                    .ok_or_else(|| SiegelError::InvalidInput("nonseparating family needs a handle t".into()))?;
                let base = self.chain(base_t)?;
                let mut fam = NonSeparatingFamily::new(base, c(*handle_t));
                if let Some(h) = self.handle {
                    if h == 0 {
                        return Err(SiegelError::InvalidInput("handle is 1-based".into()));
                    }
                    fam.handle = h - 1;
                }
                if let Some(x) = self.a {
                    fam.a = c(x);
                }
                if let Some(x) = self.b {
                    fam.b = c(x);
                }
                if let Some(x) = self.c0 {
                    fam.c0 = c(x);
                }
                if let Some(x) = self.c1 {
                    fam.c1 = c(x);
                }
                if let Some(r) = self.validity_radius {
                    fam.validity_radius = r;
                }
                if let Some(rows) = &self.pi {
                    let n = rows.len();
                    if rows.iter().any(|r| r.len() != n) {
                        return Err(SiegelError::InvalidInput("`pi` must be square".into()));
                    }
                    fam.pi = Some(CMat::from_fn(n, n, |i, j| c(rows[i][j])));
                }
                Ok(Family::NonSeparating(fam))
            }
            other => Err(SiegelError::InvalidInput(format!("unknown family kind `{other}`"))),
        }
    }

    fn from_chain(f: &TorusChainFamily, kind: &str, extra_t: Option<C64>) -> Self {
        let mut glue = Vec::with_capacity(2 * f.junctions());
        for (l, r) in &f.glue_points {
            glue.push(p(*l));
            glue.push(p(*r));
        }
        let mut t: Vec<Pair> = f.t.iter().map(|&x| p(x)).collect();
        t.extend(extra_t.map(p));
        FamilyJson {
            kind: kind.into(),
            tau: f.tau.iter().map(|x| p(x.value())).collect(),
            order: Some(f.order.iter().map(|k| k + 1).collect()),
            glue_points: Some(glue),
            t,
            a: None,
            b: None,
            c0: None,
            c1: None,
            handle: None,
            pi: None,
            hyperelliptic: f.hyperelliptic,
            validity_radius: Some(f.validity_radius),
        }
    }

    fn from_family(fam: &Family) -> Self {
        match fam {
            Family::Chain(f) => Self::from_chain(f, "chain", None),
            Family::NonSeparating(f) => {
                let mut j = Self::from_chain(&f.base, "nonseparating", Some(f.t));
                j.a = Some(p(f.a));
                j.b = Some(p(f.b));
                j.c0 = Some(p(f.c0));
                j.c1 = Some(p(f.c1));
                j.handle = Some(f.handle + 1);
                j.pi =
                    f.pi.as_ref()
                        .map(|m| (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| p(m[(i, k)])).collect()).collect());
                j.validity_radius = Some(f.validity_radius);
                j
            }
        }
    }
}
