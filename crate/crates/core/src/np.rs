//! Newman–Penrose curvature components built from 1+3 matter and Weyl data.

use num_complex::Complex64;
use thiserror::Error;

use crate::state::{MatterState, WeylState};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum NpError {
    #[error("Φ00 = {0:e} vanishes; the diagonalizing null rotation is undefined")]
    DegenerateRotation(f64),
    #[error("frame scale must be positive and finite, got {0}")]
    BadScale(f64),
}

/// Ricci spinor components. The conjugate partners `Φ10, Φ20, Φ21` are implied.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RicciSpinor {
    pub phi00: f64,
    pub phi11: f64,
    pub phi22: f64,
    pub phi01: Complex64,
    pub phi02: Complex64,
    pub phi12: Complex64,
    /// NP curvature scalar `R/24`; not the cosmological constant.
    pub lambda_np: f64,
}

impl RicciSpinor {
    pub fn phi10(&self) -> Complex64 {
        self.phi01.conj()
    }

    pub fn phi20(&self) -> Complex64 {
        self.phi02.conj()
    }

    pub fn phi21(&self) -> Complex64 {
        self.phi12.conj()
    }

    pub fn max_abs(&self) -> f64 {
        [self.phi00.abs(), self.phi11.abs(), self.phi22.abs(), self.phi01.norm(), self.phi02.norm(), self.phi12.norm(), self.lambda_np.abs()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Weyl spinor components `Ψ0 … Ψ4`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeylSpinor {
    pub psi: [Complex64; 5],
}

impl WeylSpinor {
    pub fn max_abs(&self) -> f64 {
        self.psi.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// True when every component is below `tol` in modulus.
    pub fn is_conformally_flat(&self, tol: f64) -> bool {
        self.max_abs() < tol
    }
}

/// Ricci spinor of a matter state.
pub fn ricci_spinor(m: &MatterState) -> RicciSpinor {
    let pi = |i: usize, j: usize| m.pi.get(i, j);
    let diag = 0.25 * (m.mu + m.p + pi(2, 2));
    RicciSpinor {
        phi00: diag,
        phi22: diag,
        phi11: 0.125 * (m.mu + m.p + pi(0, 0) + pi(1, 1) - pi(2, 2)),
        phi01: Complex64::new(-pi(0, 2), pi(1, 2)) * 0.25,
        phi12: Complex64::new(pi(0, 2), -pi(1, 2)) * 0.25,
        phi02: Complex64::new(pi(0, 0) - pi(1, 1), -2.0 * pi(0, 1)) * 0.25,
        lambda_np: (m.mu - 3.0 * m.p) / 24.0,
    }
}

/// Weyl spinor from `Q = E + iH`.
pub fn weyl_spinor(w: &WeylState) -> WeylSpinor {
    let q = |i: usize, j: usize| Complex64::new(w.e.get(i, j), w.h.get(i, j));
    let i = Complex64::i();
    WeylSpinor {
        psi: [
            (q(0, 0) - q(1, 1) - 2.0 * i * q(0, 1)) * 0.5,
            (i * q(1, 2) - q(0, 2)) * 0.5,
            q(2, 2) * 0.5,
            (i * q(1, 2) + q(0, 2)) * 0.5,
            (q(0, 0) - q(1, 1) + 2.0 * i * q(0, 1)) * 0.5,
        ],
    }
}

/// Applies the null rotation with parameter `α` to every Ricci component.
pub fn null_rotate_ricci(r: &RicciSpinor, alpha: Complex64) -> RicciSpinor {
    let a = alpha;
    let ab = alpha.conj();
    let aab = a * ab;
    let p00 = Complex64::from(r.phi00);
    let p11 = Complex64::from(r.phi11);
    let p22 = Complex64::from(r.phi22);
    let (p01, p02, p12) = (r.phi01, r.phi02, r.phi12);
    let (p10, p20, p21) = (r.phi10(), r.phi20(), r.phi21());

    let n01 = p01 + a * p00;
    let n02 = p02 + 2.0 * a * p01 + a * a * p00;
    let n11 = p11 + a * p10 + ab * p01 + aab * p00;
    let n12 = p12 + 2.0 * a * p11 + a * a * p10 + ab * p02 + 2.0 * aab * p01 + a * a * ab * p00;
    let n22 = p22
        + 2.0 * a * p21
        + 2.0 * ab * p12
        + 4.0 * aab * p11
        + 2.0 * a * ab * ab * p01
        + 2.0 * a * a * ab * p10
        + a * a * p20
        + ab * ab * p02
        + ab * ab * a * a * p00;
    RicciSpinor {
        phi00: r.phi00,
        phi01: n01,
        phi02: n02,
        phi11: n11.re,
        phi12: n12,
        phi22: n22.re,
        lambda_np: r.lambda_np,
    }
}

/// `α = −Φ01/Φ00`, the rotation that removes `Φ01`.
pub fn diagonalizing_rotation(r: &RicciSpinor) -> Result<Complex64, NpError> {
    if r.phi00.abs() < f64::MIN_POSITIVE || !r.phi00.is_finite() {
        return Err(NpError::DegenerateRotation(r.phi00));
    }
    Ok(-r.phi01 / r.phi00)
}

/// Right-hand sides of the quadratic conditions on `π13², π23², π12²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub pi13_sq: f64,
    pub pi23_sq: f64,
    pub pi12_sq: f64,
}

impl Admissibility {
    pub fn holds(&self) -> bool {
        self.pi13_sq >= 0.0 && self.pi23_sq >= 0.0 && self.pi12_sq >= 0.0
    }
}

pub fn admissibility(m: &MatterState) -> Admissibility {
    let (mu, p) = (m.mu, m.p);
    let (p11, p22, p33) = (m.pi.get(0, 0), m.pi.get(1, 1), m.pi.get(2, 2));
    let lead = mu + p + p33;
    let u = p11 - 2.0 * p22 - mu - p;
    Admissibility {
        pi13_sq: lead * u / 3.0,
        pi23_sq: lead * (-2.0 * p11 + p22 - mu - p) / 3.0,
        pi12_sq: u * (-p11 + 2.0 * p22 - mu - p) / 9.0,
    }
}

/// Whether the three quadratic conditions have nonnegative right-hand sides.
pub fn rotation_admissible(m: &MatterState) -> bool {
    admissibility(m).holds()
}

/// Outcome of applying the diagonalizing rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagonalization {
    pub alpha: Complex64,
    pub rotated: RicciSpinor,
    /// `(π13, π23, π12)` read back from the rotated `Φ12` and `Φ02`.
    pub off_diagonal: [f64; 3],
}

impl Diagonalization {
    /// True when the rotated off-diagonal stresses all fall below `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.rotated.phi01.norm() < tol && self.off_diagonal.iter().all(|v| v.abs() < tol)
    }
}

pub fn diagonalize(r: &RicciSpinor) -> Result<Diagonalization, NpError> {
    let alpha = diagonalizing_rotation(r)?;
    let rotated = null_rotate_ricci(r, alpha);
    Ok(Diagonalization {
        alpha,
        rotated,
        off_diagonal: [4.0 * rotated.phi12.re, -4.0 * rotated.phi12.im, -2.0 * rotated.phi02.im],
    })
}

/// Complex 4-vector in coordinate components `(t, x, y, z)`.
pub type Vector4 = [Complex64; 4];

/// Null tetrad `l, k, m` built from the diagonal frame `e_a = F ∂_a`.
///
/// That frame is orthonormal for the conformally flat metric `F⁻²·diag(−1, 1, 1, 1)`,
/// which is the metric used by [`NullTetrad::inner`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullTetrad {
    pub scale: f64,
    pub l: Vector4,
    pub k: Vector4,
    pub m: Vector4,
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub fn null_tetrad(scale: f64) -> Result<NullTetrad, NpError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(NpError::BadScale(scale));
    }
    let s = scale / std::f64::consts::SQRT_2;
    let z = c(0.0);
    Ok(NullTetrad {
        scale,
        l: [c(s), z, z, c(-s)],
        k: [c(s), z, z, c(s)],
        m: [z, c(s), Complex64::new(0.0, -s), z],
    })
}

impl NullTetrad {
    pub fn m_bar(&self) -> Vector4 {
        self.m.map(|v| v.conj())
    }

    /// Coordinate metric `F⁻²·diag(−1, 1, 1, 1)`.
    pub fn metric(&self) -> [[f64; 4]; 4] {
        let w = self.scale.powi(-2);
        std::array::from_fn(|i| std::array::from_fn(|j| if i != j { 0.0 } else if i == 0 { -w } else { w }))
    }

    /// Bilinear (not Hermitian) product `g(a, b)`.
    pub fn inner(&self, a: &Vector4, b: &Vector4) -> Complex64 {
        let g = self.metric();
        (0..4).map(|i| a[i] * b[i] * g[i][i]).sum()
    }

    /// `e_a^μ u_μ`-style 4-velocity `(k + l)/√2`.
    pub fn velocity(&self) -> Vector4 {
        std::array::from_fn(|i| (self.k[i] + self.l[i]) / std::f64::consts::SQRT_2)
    }

    /// Covectors `(l_μ, k_μ, m_μ, m̄_μ)` assembled from the coframe `e^a = F⁻¹ dx^a`
    /// with the sign pattern `l = (e³ − e⁰)/√2`, `k = −(e⁰ + e³)/√2`.
    pub fn covectors(&self) -> [Vector4; 4] {
        let s = 1.0 / (self.scale * std::f64::consts::SQRT_2);
        let z = c(0.0);
        [
            [c(-s), z, z, c(s)],
            [c(-s), z, z, c(-s)],
            [z, c(s), Complex64::new(0.0, -s), z],
            [z, c(s), Complex64::new(0.0, s), z],
        ]
    }

    /// `g_μν = 2 m_(μ m̄_ν) − 2 l_(μ k_ν)` rebuilt from the covectors.
    pub fn metric_from_covectors(&self) -> [[f64; 4]; 4] {
        let [l, k, m, mb] = self.covectors();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let v = m[i] * mb[j] + m[j] * mb[i] - (l[i] * k[j] + l[j] * k[i]);
                v.re
            })
        })
    }
}
