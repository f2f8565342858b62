//! Relativistic elasticity kinematics: material metric pullback, strain,
//! scalar invariants and the sheared equation of state.

use thiserror::Error;

use crate::tensor::SymThree;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ElasticError {
    #[error("non-finite input")]
    NonFinite,
    #[error("deformation gradient has rank below 3 (Gram determinant {0:e})")]
    RankDeficient(f64),
    #[error("material metric is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("velocity is not unit timelike: u·u = {0}")]
    NotUnitTimelike(f64),
    #[error("degenerate material state: eigenvalue {0:e} is not positive")]
    Degenerate(f64),
    #[error("particle density must be positive, got {0}")]
    BadDensity(f64),
    #[error("squared shear must be nonnegative, got {0}")]
    NegativeShear(f64),
    #[error("ρ̃(n) vanishes, so Ω̃ = (n/ρ̃) dρ̃/dn is undefined")]
    ZeroRho,
}

/// Eigenvalues below this are treated as non-positive.
pub const POSITIVE_EIGEN_TOL: f64 = 1e-12;

pub type Matrix4 = [[f64; 4]; 4];

/// Relativistic deformation gradient `y^A_μ` (rows: material index, columns: spacetime index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationGradient([[f64; 4]; 3]);

impl DeformationGradient {
    pub fn new(y: [[f64; 4]; 3]) -> Result<Self, ElasticError> {
        if !y.iter().flatten().all(|v| v.is_finite()) {
            return Err(ElasticError::NonFinite);
        }
        let gram: [[f64; 3]; 3] =
            std::array::from_fn(|a| std::array::from_fn(|b| (0..4).map(|m| y[a][m] * y[b][m]).sum()));
        let det = det3(&gram);
        let scale = gram.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).powi(3);
        if !(det > 1e-24 * scale.max(f64::MIN_POSITIVE)) {
            return Err(ElasticError::RankDeficient(det));
        }
        Ok(Self(y))
    }

    pub fn get(&self, a: usize, mu: usize) -> f64 {
        self.0[a][mu]
    }

    /// Largest `|y^A_μ u^μ|`.
    pub fn velocity_defect(&self, u: &[f64; 4]) -> f64 {
        self.0
            .iter()
            .map(|row| (0..4).map(|m| row[m] * u[m]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

/// Positive-definite metric `γ_AB` on the material space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialMetric(SymThree);

impl MaterialMetric {
    pub fn new(gamma: SymThree) -> Result<Self, ElasticError> {
        let eig = sym_eigenvalues(&gamma.matrix());
        if eig[0] <= POSITIVE_EIGEN_TOL {
            return Err(ElasticError::NotPositiveDefinite(eig[0]));
        }
        Ok(Self(gamma))
    }

    pub fn identity() -> Self {
        Self(SymThree::identity())
    }

    pub fn as_sym(&self) -> &SymThree {
        &self.0
    }
}

/// `k_μν = y^A_μ y^B_ν γ_AB`.
pub fn pulled_back_metric(y: &DeformationGradient, gamma: &MaterialMetric) -> Matrix4 {
    let g = gamma.0.matrix();
    std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            let mut v = 0.0;
            for (a, ga) in g.iter().enumerate() {
                for (b, gab) in ga.iter().enumerate() {
                    v += y.0[a][mu] * y.0[b][nu] * gab;
                }
            }
            v
        })
    })
}

/// Strain `s = ½(h − k)` with `h = g + u⊗u` (indices lowered with `g`).
pub fn strain(k: &Matrix4, g: &Matrix4, u: &[f64; 4]) -> Result<Matrix4, ElasticError> {
    if !(k.iter().flatten().chain(g.iter().flatten()).chain(u.iter()).all(|v| v.is_finite())) {
        return Err(ElasticError::NonFinite);
    }
    let u_low: [f64; 4] = std::array::from_fn(|m| (0..4).map(|n| g[m][n] * u[n]).sum());
    let norm: f64 = (0..4).map(|m| u_low[m] * u[m]).sum();
    if (norm + 1.0).abs() > 1e-12 {
        return Err(ElasticError::NotUnitTimelike(norm));
    }
    Ok(std::array::from_fn(|m| {
        std::array::from_fn(|n| 0.5 * (g[m][n] + u_low[m] * u_low[n] - k[m][n]))
    }))
}

/// Scalar invariants of the pulled-back metric's spatial block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// Particle density `√det k`.
    pub n: f64,
    /// Linear particle densities, largest first; their product is `n`.
    pub linear: [f64; 3],
}

impl ElasticInvariants {
    /// `(I1³ − 3 I1 I2 + 2 I3)/6`, which equals `n²`.
    pub fn density_sq_from_traces(&self) -> f64 {
        (self.i1.powi(3) - 3.0 * self.i1 * self.i2 + 2.0 * self.i3) / 6.0
    }
}

pub fn invariants(k: &SymThree) -> Result<ElasticInvariants, ElasticError> {
    if !k.is_finite() {
        return Err(ElasticError::NonFinite);
    }
    let m = k.matrix();
    let eig = sym_eigenvalues(&m);
    if eig[0] <= POSITIVE_EIGEN_TOL {
        return Err(ElasticError::Degenerate(eig[0]));
    }
    let k2 = k.square();
    let i1 = k.trace();
    let i2 = k2.trace();
    let mut i3 = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            i3 += k2.get(i, j) * v;
        }
    }
    Ok(ElasticInvariants {
        i1,
        i2,
        i3,
        n: det3(&m).sqrt(),
        linear: [eig[2].sqrt(), eig[1].sqrt(), eig[0].sqrt()],
    })
}

/// A function value paired with its derivative at the query point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ValueDeriv {
    pub value: f64,
    pub deriv: f64,
}

impl ValueDeriv {
    pub fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosOutput {
    pub mu: f64,
    pub p: f64,
    /// Unsheared pressure `n² dε̃/dn`.
    pub p_tilde: f64,
    /// `(n/ρ̃) dρ̃/dn`; absent when `ρ̃ = 0` and no shear is present.
    pub omega_tilde: Option<f64>,
}

/// Sheared equation of state.
///
/// `μ = μ̃ + ρ̃ σ²` and `p = p̃ + (Ω̃ − 1) σ` with `σ = √shear_sq`. The caller
/// decides which shear scalar `shear_sq` represents.
pub fn eos(
    n: f64,
    shear_sq: f64,
    mu_tilde: f64,
    rho_tilde: ValueDeriv,
    eps_tilde: ValueDeriv,
) -> Result<EosOutput, ElasticError> {
    let inputs = [n, shear_sq, mu_tilde, rho_tilde.value, rho_tilde.deriv, eps_tilde.value, eps_tilde.deriv];
    if !inputs.iter().all(|v| v.is_finite()) {
        return Err(ElasticError::NonFinite);
    }
    if n <= 0.0 {
        return Err(ElasticError::BadDensity(n));
    }
    if shear_sq < 0.0 {
        return Err(ElasticError::NegativeShear(shear_sq));
    }
    let sigma = shear_sq.sqrt();
    let p_tilde = n * n * eps_tilde.deriv;
    let omega_tilde = if rho_tilde.value != 0.0 {
        Some(n / rho_tilde.value * rho_tilde.deriv)
    } else if shear_sq > 0.0 {
        return Err(ElasticError::ZeroRho);
    } else {
        None
    };
    let p = match omega_tilde {
        Some(w) => p_tilde + (w - 1.0) * sigma,
        None => p_tilde,
    };
    Ok(EosOutput { mu: mu_tilde + rho_tilde.value * shear_sq, p, p_tilde, omega_tilde })
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Eigenvalues of a symmetric 3×3 matrix in ascending order (trigonometric solution of the cubic).
pub fn sym_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let mut e = if p1 == 0.0 {
        [m[0][0], m[1][1], m[2][2]]
    } else {
        let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b: [[f64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| (m[i][j] - if i == j { q } else { 0.0 }) / p));
        let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        [lo, 3.0 * q - hi - lo, hi]
    };
    e.sort_by(f64::total_cmp);
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn static_y() -> DeformationGradient {
        DeformationGradient::new([[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]).unwrap()
    }

    const MINK: Matrix4 = [[-1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];

    #[test]
    fn pullback_examples() {
        let k = pulled_back_metric(&static_y(), &MaterialMetric::identity());
        assert_eq!(k, [[0.0; 4], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        let g = MaterialMetric::new(SymThree::diag(4.0, 1.0, 1.0).unwrap()).unwrap();
        let k = pulled_back_metric(&static_y(), &g);
        assert_eq!(k[1][1], 4.0);
        assert_eq!(k[0], [0.0; 4]);
        assert!(MaterialMetric::new(SymThree::diag(1.0, 0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn strain_examples() {
        let u = [1.0, 0.0, 0.0, 0.0];
        let h: Matrix4 = std::array::from_fn(|i| std::array::from_fn(|j| if i == j && i > 0 { 1.0 } else { 0.0 }));
        let s = strain(&h, &MINK, &u).unwrap();
        assert!(s.iter().flatten().all(|v| *v == 0.0));
        let s = strain(&[[0.0; 4]; 4], &MINK, &u).unwrap();
        assert_eq!(s[1][1], 0.5);
        assert_eq!(s[0][0], 0.0);
        let g = MaterialMetric::new(SymThree::diag(4.0, 1.0, 1.0).unwrap()).unwrap();
        let s = strain(&pulled_back_metric(&static_y(), &g), &MINK, &u).unwrap();
        assert_eq!(s[1][1], -1.5);
        assert_eq!(s[2][2], 0.0);
        assert!(matches!(strain(&h, &MINK, &[2.0, 0.0, 0.0, 0.0]), Err(ElasticError::NotUnitTimelike(_))));
    }

    #[test]
    fn invariant_examples() {
        let inv = invariants(&SymThree::identity()).unwrap();
        assert_eq!((inv.i1, inv.i2, inv.i3, inv.n), (3.0, 3.0, 3.0, 1.0));
        assert_eq!(inv.density_sq_from_traces(), 1.0);
        let inv = invariants(&SymThree::diag(4.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!((inv.i1, inv.i2, inv.i3, inv.n), (6.0, 18.0, 66.0, 2.0));
        assert_eq!(inv.density_sq_from_traces(), 4.0);
        assert_eq!(inv.linear, [2.0, 1.0, 1.0]);
        assert!(matches!(invariants(&SymThree::diag(1.0, 1.0, 0.0).unwrap()), Err(ElasticError::Degenerate(_))));
    }

    #[test]
    fn eos_examples() {
        let out = eos(2.0, 0.0, 1.5, ValueDeriv::new(0.7, 0.2), ValueDeriv::new(0.3, 0.4)).unwrap();
        assert_eq!(out.mu, 1.5);
        assert_eq!(out.p, out.p_tilde);
        let c = 0.8;
        let n = 1.7;
        let out = eos(n, 0.0, 0.0, ValueDeriv::new(1.0, 0.0), ValueDeriv::new(c * n, c)).unwrap();
        assert!((out.p_tilde - c * n * n).abs() < 1e-15);
        let (rho0, k) = (0.4, 3.0);
        for n in [0.5f64, 1.0, 2.5] {
            let rho = ValueDeriv::new(rho0 * n.powf(k), rho0 * k * n.powf(k - 1.0));
            let out = eos(n, 0.25, 0.0, rho, ValueDeriv::default()).unwrap();
            assert!((out.omega_tilde.unwrap() - k).abs() < 1e-14);
            assert!((out.p - (k - 1.0) * 0.5).abs() < 1e-14);
        }
        assert_eq!(eos(1.0, -0.1, 0.0, ValueDeriv::new(1.0, 0.0), ValueDeriv::default()), Err(ElasticError::NegativeShear(-0.1)));
        assert_eq!(eos(1.0, 0.1, 0.0, ValueDeriv::default(), ValueDeriv::default()), Err(ElasticError::ZeroRho));
    }

    #[test]
    fn eigen_sorted() {
        let e = sym_eigenvalues(&[[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]]);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14 && (e[2] - 5.0).abs() < 1e-14);
    }
}
