use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ChannelId, ChannelSet};
use crate::error::{Error, Result};
use crate::linalg::{
    c, is_hermitian, max_abs, max_principal_angle, null_space, rank, svd, CMatrix, RANK_RTOL,
};

const HERMITIAN_ATOL: f64 = 1e-12;
const REGULAR_ATOL: f64 = 1e-10;
const SUBSPACE_ANGLE_TOL: f64 = 1e-8;

/// Boundary condition `P·A⁻ + Q·A⁺ = 0` selecting a self-adjoint extension.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionBC {
    pub p: CMatrix,
    pub q: CMatrix,
}

impl ExtensionBC {
    pub fn new(p: CMatrix, q: CMatrix) -> Result<Self> {
        if !p.is_square() || p.shape() != q.shape() {
            return Err(Error::DimensionMismatch(format!(
                "P is {:?}, Q is {:?}; both must be n×n",
                p.shape(),
                q.shape()
            )));
        }
        Ok(Self { p, q })
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// The `n × 2n` block `[P | Q]`.
    pub fn stacked(&self) -> CMatrix {
        let n = self.n();
        let mut m = CMatrix::zeros(n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.p);
        m.view_mut((0, n), (n, n)).copy_from(&self.q);
        m
    }

    /// Orthonormal basis of the lagrangian subspace `{(A⁻, A⁺)}` as `2n × n` columns.
    pub fn lagrangian_basis(&self) -> CMatrix {
        null_space(&self.stacked(), RANK_RTOL)
    }

    /// Channels on which `Q` has a nonzero row or column entry.
    pub fn q_support(&self) -> Vec<bool> {
        let n = self.n();
        (0..n)
            .map(|j| (0..n).any(|i| self.q[(i, j)].norm() > 0.0 || self.q[(j, i)].norm() > 0.0))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct BcJson {
    n: usize,
    #[serde(rename = "P")]
    p: Vec<[f64; 2]>,
    #[serde(rename = "Q")]
    q: Vec<[f64; 2]>,
}

fn flatten(m: &CMatrix) -> Vec<[f64; 2]> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

fn unflatten(n: usize, v: &[[f64; 2]], name: &str) -> std::result::Result<CMatrix, String> {
    if v.len() != n * n {
        return Err(format!(
            "{name} has {} entries, expected n² = {}",
            v.len(),
            n * n
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        c(v[i * n + j][0], v[i * n + j][1])
    }))
}

/// JSON form `{"n": n, "P": [[re, im], …], "Q": [[re, im], …]}`, row-major.
impl Serialize for ExtensionBC {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BcJson {
            n: self.n(),
            p: flatten(&self.p),
            q: flatten(&self.q),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtensionBC {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BcJson::deserialize(d)?;
        let p = unflatten(j.n, &j.p, "P").map_err(D::Error::custom)?;
        let q = unflatten(j.n, &j.q, "Q").map_err(D::Error::custom)?;
        Ok(ExtensionBC { p, q })
    }
}

/// Outcome of [`validate_bc`].
#[derive(Clone, Debug, PartialEq)]
pub struct BcValidity {
    pub valid: bool,
    pub rank: usize,
    /// Largest entry of `PQ* − QP*`.
    pub hermiticity_defect: f64,
    pub diagnostic: String,
}

/// Checks the rank and lagrangian conditions of `(P, Q)`.
///
/// The pair is admissible when `[P | Q]` has rank `n` and `PQ*` is
/// Hermitian.
pub fn validate_bc(bc: &ExtensionBC) -> Result<BcValidity> {
    if !bc.p.is_square() || bc.p.shape() != bc.q.shape() {
        return Err(Error::DimensionMismatch(format!(
            "P is {:?}, Q is {:?}",
            bc.p.shape(),
            bc.q.shape()
        )));
    }
    let n = bc.n();
    let r = rank(&bc.stacked(), RANK_RTOL);
    let pq = &bc.p * bc.q.adjoint();
    let defect = max_abs(&(&pq - pq.adjoint()));
    let herm = is_hermitian(&pq, HERMITIAN_ATOL);
    let mut diagnostic = String::new();
    if r != n {
        diagnostic.push_str(&format!("rank [P|Q] = {r}, expected {n}. "));
    }
    if !herm {
        diagnostic.push_str(&format!("PQ* is not Hermitian (defect {defect:e}). "));
    }
    if diagnostic.is_empty() {
        diagnostic.push_str("ok");
    }
    Ok(BcValidity {
        valid: r == n && herm,
        rank: r,
        hermiticity_defect: defect,
        diagnostic: diagnostic.trim_end().to_string(),
    })
}

pub(crate) fn require_valid(bc: &ExtensionBC) -> Result<()> {
    let v = validate_bc(bc)?;
    if v.valid {
        Ok(())
    } else {
        Err(Error::InvalidBc(v.diagnostic))
    }
}

/// True when no vector of the extension's domain carries a `ln r` term,
/// i.e. `a⁻₀` vanishes identically at every log channel.
pub fn is_regular(bc: &ExtensionBC, cs: &ChannelSet) -> Result<bool> {
    require_valid(bc)?;
    if bc.n() != cs.len() {
        return Err(Error::DimensionMismatch(format!(
            "bc has n = {}, channel set has {} channels",
            bc.n(),
            cs.len()
        )));
    }
    let basis = bc.lagrangian_basis();
    Ok(cs.log_channels().all(|j| {
        basis
            .row(j)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
            < REGULAR_ATOL
    }))
}

/// Unitary change of basis that brings `(P, Q)` to block form.
///
/// With `Q = W Σ V*` we set `U = V`, `G = W*`; then
/// `G P U = [[P₂, P₃], [0, P₁]]` and `G Q U = [[Q₁, 0], [0, 0]]`, where `Q₁`
/// is the invertible `r × r` diagonal of nonzero singular values and
/// `L = Q₁⁻¹ P₂` is Hermitian.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub rank_q: usize,
    pub u: CMatrix,
    pub g: CMatrix,
    pub p1: CMatrix,
    pub p2: CMatrix,
    pub p3: CMatrix,
    pub q1: CMatrix,
    pub l: CMatrix,
}

impl BlockDecomposition {
    /// `(G P U, G Q U)` rebuilt from the blocks.
    pub fn reassemble(&self) -> (CMatrix, CMatrix) {
        let r = self.rank_q;
        let n = self.u.nrows();
        let mut p = CMatrix::zeros(n, n);
        let mut q = CMatrix::zeros(n, n);
        p.view_mut((0, 0), (r, r)).copy_from(&self.p2);
        p.view_mut((0, r), (r, n - r)).copy_from(&self.p3);
        p.view_mut((r, r), (n - r, n - r)).copy_from(&self.p1);
        q.view_mut((0, 0), (r, r)).copy_from(&self.q1);
        (p, q)
    }
}

pub fn block_decompose(bc: &ExtensionBC) -> Result<BlockDecomposition> {
    require_valid(bc)?;
    let n = bc.n();
    let (g, u, sv) = if n == 0 {
        (CMatrix::zeros(0, 0), CMatrix::zeros(0, 0), Vec::new())
    } else {
        let d = svd(&bc.q);
        (d.u.adjoint(), d.v, d.s)
    };
    let smax = sv.first().copied().unwrap_or(0.0);
    let r = sv
        .iter()
        .filter(|&&s| s > RANK_RTOL * smax && s > 0.0)
        .count();
    let pt = &g * &bc.p * &u;
    let p2 = pt.view((0, 0), (r, r)).into_owned();
    let p3 = pt.view((0, r), (r, n - r)).into_owned();
    let p1 = pt.view((r, r), (n - r, n - r)).into_owned();
    let lower_left = max_abs(&pt.view((r, 0), (n - r, r)).into_owned());
    let scale = max_abs(&pt).max(1.0);
    assert!(
        lower_left <= 1e-8 * scale,
        "valid bc must have a vanishing lower-left block, got {lower_left:e}"
    );
    let q1 = CMatrix::from_fn(
        r,
        r,
        |i, j| if i == j { c(sv[i], 0.0) } else { c(0.0, 0.0) },
    );
    let l = CMatrix::from_fn(r, r, |i, j| p2[(i, j)] / sv[i]);
    Ok(BlockDecomposition {
        rank_q: r,
        u,
        g,
        p1,
        p2,
        p3,
        q1,
        l,
    })
}

/// The Friedrichs pair `(I, 0)`.
pub fn friedrichs_bc(cs: &ChannelSet) -> ExtensionBC {
    let n = cs.len();
    ExtensionBC {
        p: CMatrix::identity(n, n),
        q: CMatrix::zeros(n, n),
    }
}

fn snap(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

/// Diagonal pair `P = diag(cos θ_c)`, `Q = diag(sin θ_c)`, one angle per channel.
pub fn rotation_bc(cs: &ChannelSet, angles: &[f64]) -> Result<ExtensionBC> {
    if angles.len() != cs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} angles for {} channels",
            angles.len(),
            cs.len()
        )));
    }
    let n = cs.len();
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    for (i, &t) in angles.iter().enumerate() {
        p[(i, i)] = Complex64::new(snap(t.cos()), 0.0);
        q[(i, i)] = Complex64::new(snap(t.sin()), 0.0);
    }
    Ok(ExtensionBC { p, q })
}

/// [`rotation_bc`] with the listed channels rotated and all others at angle 0.
pub fn rotation_bc_on(cs: &ChannelSet, angles: &[(ChannelId, f64)]) -> Result<ExtensionBC> {
    let mut all = vec![0.0; cs.len()];
    for &(id, t) in angles {
        let i = cs.index_of(id).ok_or_else(|| {
            Error::InvalidBc(format!("no channel (point {}, k {})", id.point, id.k))
        })?;
        all[i] = t;
    }
    rotation_bc(cs, &all)
}

/// Whether two pairs define the same lagrangian subspace.
pub fn same_extension(a: &ExtensionBC, b: &ExtensionBC) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "n = {} vs n = {}",
            a.n(),
            b.n()
        )));
    }
    require_valid(a)?;
    require_valid(b)?;
    Ok(max_principal_angle(&a.lagrangian_basis(), &b.lagrangian_basis()) < SUBSPACE_ANGLE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sphere() -> ChannelSet {
        ChannelSet::new(&[4.0 * PI, PI, PI, PI, PI, PI, PI]).unwrap()
    }

    #[test]
    fn trivial_pairs() {
        let cs = ChannelSet::new(&[4.0 * PI]).unwrap();
        let f = friedrichs_bc(&cs);
        assert!(validate_bc(&f).unwrap().valid);
        assert!(is_regular(&f, &cs).unwrap());
        let n = cs.len();
        let d = ExtensionBC::new(CMatrix::zeros(n, n), CMatrix::identity(n, n)).unwrap();
        assert!(validate_bc(&d).unwrap().valid);
        assert!(!is_regular(&d, &cs).unwrap());
    }

    #[test]
    fn anti_hermitian_rejected() {
        let p = CMatrix::identity(2, 2);
        let q = CMatrix::identity(2, 2) * c(0.0, 1.0);
        let v = validate_bc(&ExtensionBC::new(p, q).unwrap()).unwrap();
        assert!(!v.valid);
        assert!(v.hermiticity_defect > 1.0);
    }

    #[test]
    fn rank_deficient_rejected() {
        let v = validate_bc(&ExtensionBC::new(CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)).unwrap())
            .unwrap();
        assert!(!v.valid);
        assert_eq!(v.rank, 0);
    }

    #[test]
    fn sphere_rotation_is_regular() {
        let cs = sphere();
        let t = 0.7;
        let bc = rotation_bc_on(
            &cs,
            &[
                (ChannelId { point: 0, k: -1 }, t),
                (ChannelId { point: 0, k: 1 }, t),
            ],
        )
        .unwrap();
        assert!(validate_bc(&bc).unwrap().valid);
        assert!(is_regular(&bc, &cs).unwrap());
        // the ν = ±1/2 block carries cos θ, sin θ; everything else is Friedrichs
        assert!((bc.p[(0, 0)].re - t.cos()).abs() < 1e-15);
        assert!((bc.q[(2, 2)].re - t.sin()).abs() < 1e-15);
        assert_eq!(bc.p[(1, 1)].re, 1.0);
        assert_eq!(bc.q[(1, 1)].re, 0.0);
    }

    #[test]
    fn quarter_turn_is_exact() {
        let cs = ChannelSet::new(&[2.0 * PI]).unwrap();
        let bc = rotation_bc(&cs, &[FRAC_PI_2]).unwrap();
        assert_eq!(bc.p[(0, 0)], c(0.0, 0.0));
        assert_eq!(bc.q[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn decomposition_of_extremes() {
        let cs = ChannelSet::new(&[4.0 * PI]).unwrap();
        let f = block_decompose(&friedrichs_bc(&cs)).unwrap();
        assert_eq!(f.rank_q, 0);
        assert_eq!(f.p1.nrows(), 3);
        let n = cs.len();
        let d = block_decompose(
            &ExtensionBC::new(CMatrix::zeros(n, n), CMatrix::identity(n, n)).unwrap(),
        )
        .unwrap();
        assert_eq!(d.rank_q, 3);
        assert!(max_abs(&d.p2) < 1e-14);
    }

    #[test]
    fn scaled_pairs_are_the_same_extension() {
        let cs = ChannelSet::new(&[4.0 * PI]).unwrap();
        let a = rotation_bc(&cs, &[0.3, 0.0, 1.1]).unwrap();
        let m = CMatrix::from_fn(3, 3, |i, j| {
            c((i + 2 * j) as f64 + if i == j { 5.0 } else { 0.0 }, 0.1)
        });
        let b = ExtensionBC::new(&m * &a.p, &m * &a.q).unwrap();
        assert!(same_extension(&a, &b).unwrap());
        let other = rotation_bc(&cs, &[0.3, 0.0, 1.2]).unwrap();
        assert!(!same_extension(&a, &other).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let cs = ChannelSet::new(&[4.0 * PI]).unwrap();
        let bc = rotation_bc(&cs, &[0.3, 0.0, 1.1]).unwrap();
        let s = serde_json::to_string(&bc).unwrap();
        assert!(s.starts_with("{\"n\":3,\"P\":[["));
        let back: ExtensionBC = serde_json::from_str(&s).unwrap();
        assert_eq!(back, bc);
        assert!(serde_json::from_str::<ExtensionBC>(r#"{"n":2,"P":[[1,0]],"Q":[[0,0]]}"#).is_err());
    }
}
