//! Fixed-size spatial tensor algebra for 1+3 frame quantities.
//!
//! All index arguments are zero-based: spatial frame index `0` is the
//! first spatial leg `e_1`. Spatial indices are raised and lowered with
//! `δ_αβ`, so there is no distinction between upper and lower positions.
//! The permutation symbol follows `ε_123 = +1`.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Errors raised while constructing or decomposing spatial tensors.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TensorError {
    #[error("non-finite tensor component")]
    NonFinite,
    #[error("tensor is not trace-free (trace = {trace:e})")]
    NotTraceFree { trace: f64 },
    #[error("matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {defect:e}")]
    NotSymmetric { i: usize, j: usize, defect: f64 },
    #[error("commutation array is not antisymmetric in its lower indices at ({upper}, {i}, {j}): defect {defect:e}")]
    NotAntisymmetric {
        upper: usize,
        i: usize,
        j: usize,
        defect: f64,
    },
}

/// Rank-3 spatial array `γ^α_βγ`, stored as `[upper][lower][lower]`.
pub type SpatialRank3 = [[[f64; 3]; 3]; 3];

/// Rank-3 frame array `γ^c_ab` over `a, b, c ∈ 0..4`, stored as `[upper][lower][lower]`.
pub type FrameRank3 = [[[f64; 4]; 4]; 4];

/// Three-dimensional permutation symbol with `ε_012 = +1` (zero-based).
#[inline]
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[inline]
pub(crate) fn kronecker(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn check_finite(values: &[f64]) -> Result<(), TensorError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(TensorError::NonFinite)
    }
}

/// Spatial frame vector `v_α`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThreeVector([f64; 3]);

impl ThreeVector {
    pub const ZERO: Self = Self([0.0; 3]);

    pub fn new(v1: f64, v2: f64, v3: f64) -> Result<Self, TensorError> {
        Self::from_array([v1, v2, v3])
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self, TensorError> {
        check_finite(&v)?;
        Ok(Self(v))
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub(crate) fn set(&mut self, i: usize, value: f64) {
        self.0[i] = value;
    }

    pub fn to_array(self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        (0..3).map(|i| self.0[i] * other.0[i]).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Add for ThreeVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for ThreeVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<f64> for ThreeVector {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|v| v * rhs))
    }
}

impl Neg for ThreeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|v| -v))
    }
}

#[inline]
fn sym_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match (i, j) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        (2, 2) => 5,
        _ => unreachable!("spatial index out of range"),
    }
}

/// Symmetric spatial tensor `m_αβ = m_βα`; only the upper triangle is stored.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymThree([f64; 6]);

impl SymThree {
    pub const ZERO: Self = Self([0.0; 6]);

    pub fn identity() -> Self {
        Self([1.0, 0.0, 0.0, 1.0, 0.0, 1.0])
    }

    /// Components in the order `m11, m12, m13, m22, m23, m33`.
    pub fn new(
        m11: f64,
        m12: f64,
        m13: f64,
        m22: f64,
        m23: f64,
        m33: f64,
    ) -> Result<Self, TensorError> {
        let v = [m11, m12, m13, m22, m23, m33];
        check_finite(&v)?;
        Ok(Self(v))
    }

    pub fn diag(d1: f64, d2: f64, d3: f64) -> Result<Self, TensorError> {
        Self::new(d1, 0.0, 0.0, d2, 0.0, d3)
    }

    /// Accepts a full matrix that is symmetric to within `1e-12` relative to its largest entry.
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Result<Self, TensorError> {
        let scale = m.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
        for i in 0..3 {
            for j in (i + 1)..3 {
                let defect = (m[i][j] - m[j][i]).abs();
                if defect > 1e-12 * scale {
                    return Err(TensorError::NotSymmetric { i, j, defect });
                }
            }
        }
        Self::new(m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2])
    }

    /// Symmetric part `½(m + mᵀ)` of an arbitrary matrix.
    pub fn symmetric_part(m: &[[f64; 3]; 3]) -> Result<Self, TensorError> {
        let s = |i: usize, j: usize| 0.5 * (m[i][j] + m[j][i]);
        Self::new(s(0, 0), s(0, 1), s(0, 2), s(1, 1), s(1, 2), s(2, 2))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[sym_index(i, j)]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: f64) {
        self.0[sym_index(i, j)] = value;
    }

    /// Returns `m_11 + m_22 + m_33`.
    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[3] + self.0[5]
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.get(i, j)))
    }

    /// Matrix square `m·m`, which is again symmetric.
    pub fn square(&self) -> Self {
        let mut out = Self::ZERO;
        for i in 0..3 {
            for j in i..3 {
                out.set(i, j, (0..3).map(|k| self.get(i, k) * self.get(k, j)).sum());
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Add for SymThree {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for SymThree {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<f64> for SymThree {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|v| v * rhs))
    }
}

impl From<TracefreeSymThree> for SymThree {
    fn from(t: TracefreeSymThree) -> Self {
        let [m11, m12, m13, m22, m23] = t.0;
        Self([m11, m12, m13, m22, m23, t.m33()])
    }
}

/// Symmetric trace-free spatial tensor.
///
/// Five independent components are stored; `m_33 = −(m_11 + m_22)` is derived,
/// so the trace is zero by construction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TracefreeSymThree([f64; 5]);

impl TracefreeSymThree {
    pub const ZERO: Self = Self([0.0; 5]);

    /// Components in the order `m11, m12, m13, m22, m23`.
    pub fn new(m11: f64, m12: f64, m13: f64, m22: f64, m23: f64) -> Result<Self, TensorError> {
        let v = [m11, m12, m13, m22, m23];
        check_finite(&v)?;
        Ok(Self(v))
    }

    /// `diag(d1, d2, −d1 − d2)`.
    pub fn diag(d1: f64, d2: f64) -> Result<Self, TensorError> {
        Self::new(d1, 0.0, 0.0, d2, 0.0)
    }

    /// Accepts a symmetric tensor whose trace is within `tol` of zero and drops the trace.
    pub fn try_from_sym(m: &SymThree, tol: f64) -> Result<Self, TensorError> {
        let trace = m.trace();
        if !trace.is_finite() || trace.abs() > tol {
            return Err(TensorError::NotTraceFree { trace });
        }
        Ok(tracefree_project(m))
    }

    #[inline]
    fn m33(&self) -> f64 {
        -(self.0[0] + self.0[3])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match sym_index(i, j) {
            5 => self.m33(),
            k if k < 5 => self.0[k],
            _ => unreachable!(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[3] + self.m33()
    }

    pub fn to_sym(&self) -> SymThree {
        SymThree::from(*self)
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.to_sym().matrix()
    }

    /// Independent components `m11, m12, m13, m22, m23`.
    pub fn components(&self) -> [f64; 5] {
        self.0
    }

    pub(crate) fn set_independent(&mut self, k: usize, value: f64) {
        self.0[k] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .fold(self.m33().abs(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite()) && self.m33().is_finite()
    }
}

impl Add for TracefreeSymThree {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for TracefreeSymThree {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<f64> for TracefreeSymThree {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|v| v * rhs))
    }
}

/// Returns `m − (tr m / 3)·δ`. Idempotent.
pub fn tracefree_project(m: &SymThree) -> TracefreeSymThree {
    let third = m.trace() / 3.0;
    TracefreeSymThree([
        m.get(0, 0) - third,
        m.get(0, 1),
        m.get(0, 2),
        m.get(1, 1) - third,
        m.get(1, 2),
    ])
}

/// Shear magnitude `σ² = ½ σ_αβ σ^αβ`.
pub fn shear_magnitude_sq(sigma: &TracefreeSymThree) -> f64 {
    let mut sum = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            sum += sigma.get(i, j).powi(2);
        }
    }
    0.5 * sum
}

/// Vorticity magnitude `ω² = ω_α ω^α`.
pub fn vorticity_magnitude_sq(omega: &ThreeVector) -> f64 {
    omega.norm_sq()
}

/// Antisymmetric spatial tensor held by its three independent components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AntisymThree {
    pub w23: f64,
    pub w31: f64,
    pub w12: f64,
}

impl AntisymThree {
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        [
            [0.0, self.w12, -self.w31],
            [-self.w12, 0.0, self.w23],
            [self.w31, -self.w23, 0.0],
        ]
    }
}

/// Frame-adapted dual `ω_α = ½ ε_αβγ w_βγ`.
pub fn vorticity_vector_from_tensor(w: &AntisymThree) -> ThreeVector {
    let m = w.matrix();
    let mut out = [0.0; 3];
    for (a, slot) in out.iter_mut().enumerate() {
        for b in 0..3 {
            for c in 0..3 {
                *slot += 0.5 * levi_civita(a, b, c) * m[b][c];
            }
        }
    }
    ThreeVector(out)
}

/// Inverse of [`vorticity_vector_from_tensor`]: `w_βγ = ε_βγα ω_α`.
pub fn vorticity_tensor_from_vector(omega: &ThreeVector) -> AntisymThree {
    let w = |b: usize, c: usize| (0..3).map(|a| levi_civita(b, c, a) * omega.get(a)).sum();
    AntisymThree {
        w23: w(1, 2),
        w31: w(2, 0),
        w12: w(0, 1),
    }
}

/// `γ^α_βγ = 2 a_[β δ^α_γ] + ε_βγδ n^δα`.
pub fn spatial_commutation_compose(a: &ThreeVector, n: &SymThree) -> SpatialRank3 {
    let mut g = [[[0.0; 3]; 3]; 3];
    for (alpha, plane) in g.iter_mut().enumerate() {
        for (beta, row) in plane.iter_mut().enumerate() {
            for (gamma, slot) in row.iter_mut().enumerate() {
                let mut v = a.get(beta) * kronecker(alpha, gamma) - a.get(gamma) * kronecker(alpha, beta);
                for delta in 0..3 {
                    v += levi_civita(beta, gamma, delta) * n.get(delta, alpha);
                }
                *slot = v;
            }
        }
    }
    g
}

/// Recovers `(a, n)` from spatial commutation functions.
///
/// `a_β = ½ γ^α_βα` and `n^μα` is the symmetric part of `½ ε_βγμ γ^α_βγ`.
pub fn spatial_commutation_decompose(
    gamma: &SpatialRank3,
) -> Result<(ThreeVector, SymThree), TensorError> {
    let scale = gamma.iter().flatten().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
    for (upper, plane) in gamma.iter().enumerate() {
        for i in 0..3 {
            for j in i..3 {
                let defect = (plane[i][j] + plane[j][i]).abs();
                if !defect.is_finite() || defect > 1e-12 * scale {
                    return Err(TensorError::NotAntisymmetric { upper, i, j, defect });
                }
            }
        }
    }
    let mut a = [0.0; 3];
    for (beta, slot) in a.iter_mut().enumerate() {
        *slot = 0.5 * (0..3).map(|alpha| gamma[alpha][beta][alpha]).sum::<f64>();
    }
    let mut raw = [[0.0; 3]; 3];
    for (mu, row) in raw.iter_mut().enumerate() {
        for (alpha, slot) in row.iter_mut().enumerate() {
            let mut v = 0.0;
            for beta in 0..3 {
                for g in 0..3 {
                    v += 0.5 * levi_civita(beta, g, mu) * gamma[alpha][beta][g];
                }
            }
            *slot = v;
        }
    }
    Ok((ThreeVector::from_array(a)?, SymThree::symmetric_part(&raw)?))
}

/// Commutation functions from rotation coefficients: `γ^a_bc = Γ^a_cb − Γ^a_bc`.
pub fn commutation_from_connection(rotation: &FrameRank3) -> FrameRank3 {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| std::array::from_fn(|c| rotation[a][c][b] - rotation[a][b][c]))
    })
}
