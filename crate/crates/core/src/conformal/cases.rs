use std::fmt;
use std::str::FromStr;

use crate::numerics::integrate;
use crate::state::StateJet;

use super::special::{special_jet, SpecialState};
use super::{ConformalError, ScaleFactor, QUADRATURE_TOL};

/// Algebraic outputs of case A1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Closure {
    pub pi11: f64,
    pub p: f64,
    pub udot3: f64,
}

/// `π11 = 12σ11² − (4/3)a3²`, `p = −3σ11² + a3²/3`, `u̇3 = −a3`.
pub fn case_a1_closure(sigma11: f64, a3: f64) -> A1Closure {
    let s2 = sigma11 * sigma11;
    let a2 = a3 * a3;
    A1Closure { pi11: 12.0 * s2 - 4.0 / 3.0 * a2, p: -3.0 * s2 + a2 / 3.0, udot3: -a3 }
}

/// `d/dz (σ11, a3, Ω3)` for case A1 with `e_3 = F d/dz`.
pub fn case_a1_rhs(z: f64, y: &[f64; 3], scale: &dyn ScaleFactor) -> Result<[f64; 3], ConformalError> {
    let f = scale.positive(z)?;
    let [s, a3, om] = *y;
    Ok([a3 * s / f, (-9.0 * s * s + 2.0 * a3 * a3) / f, a3 * om / f])
}

/// `A = (a3² − 9σ11²)/σ11⁴`, conserved along case A1 flows.
pub fn case_a1_first_integral(sigma11: f64, a3: f64) -> Result<f64, ConformalError> {
    if sigma11 == 0.0 {
        return Err(ConformalError::ZeroShear);
    }
    Ok((a3 * a3 - 9.0 * sigma11 * sigma11) / sigma11.powi(4))
}

/// `a3 = sign · σ11 √(Aσ11² + 9)`, the initial value on the family with first integral `A`.
pub fn case_a1_a3_from_integral(sigma11: f64, a: f64, sign: f64) -> Result<f64, ConformalError> {
    let r = a * sigma11 * sigma11 + 9.0;
    if r < 0.0 {
        return Err(ConformalError::NegativeRadicand { z: f64::NAN, value: r });
    }
    Ok(sign * r.sqrt() * sigma11)
}

/// Case A2 right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A2Rhs {
    /// `d/dz (p, u̇3, a3, Ω3)`.
    pub dy: [f64; 4],
    /// Algebraic anisotropic pressure `π11 = ½p − ½a3² + a3 u̇3`.
    pub pi11: f64,
}

pub fn case_a2_pi11(p: f64, udot3: f64, a3: f64) -> f64 {
    0.5 * p - 0.5 * a3 * a3 + a3 * udot3
}

pub fn case_a2_rhs(z: f64, y: &[f64; 4], scale: &dyn ScaleFactor) -> Result<A2Rhs, ConformalError> {
    let f = scale.positive(z)?;
    let [p, u3, a3, om] = *y;
    let e3 = [
        -u3 * p - u3 * a3 * a3 / 3.0 + 2.0 / 3.0 * a3 * u3 * u3,
        3.0 * p - u3 * u3 + 2.0 * a3 * u3,
        1.5 * p + 1.5 * a3 * a3,
        -u3 * om,
    ];
    Ok(A2Rhs { dy: e3.map(|v| v / f), pi11: case_a2_pi11(p, u3, a3) })
}

/// Pressure implied by imposing `π11 = −4p` on the case A2 stress relation:
/// `p = (a3² − 2 a3 u̇3)/9`.
pub fn case_a2_ansatz_pressure(udot3: f64, a3: f64) -> f64 {
    (a3 * a3 - 2.0 * a3 * udot3) / 9.0
}

/// The two acceleration branches compatible with `π11 = −4p` in case A2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `u̇3 = −a3`, identical to shearless case A1.
    Opposite,
    /// `u̇3 = a3/2`, for which `p = 0`.
    Half,
}

impl Branch {
    /// `k` in `e3(a3) = k a3²`, so `a3 = 1/(const − k ∫ dz/F)`.
    pub fn growth(self) -> f64 {
        match self {
            Branch::Opposite => 2.0,
            Branch::Half => 1.5,
        }
    }

    pub fn udot3(self, a3: f64) -> f64 {
        match self {
            Branch::Opposite => -a3,
            Branch::Half => 0.5 * a3,
        }
    }

    pub fn pressure(self, a3: f64) -> f64 {
        case_a2_ansatz_pressure(self.udot3(a3), a3)
    }

    /// `e3(Ω3)/Ω3 = −u̇3`.
    pub fn omega_rate(self, a3: f64) -> f64 {
        -self.udot3(a3)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Opposite => "udot3=-a3",
            Branch::Half => "udot3=a3/2",
        })
    }
}

impl FromStr for Branch {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "opposite" => Ok(Branch::Opposite),
            "2" | "half" => Ok(Branch::Half),
            other => Err(format!("unknown branch `{other}` (expected 1 or 2)")),
        }
    }
}

fn inverse_scale_integral(scale: &dyn ScaleFactor, z: f64) -> Result<f64, ConformalError> {
    let g = |x: f64| scale.positive(x).map(|f| 1.0 / f).map_err(|e| e.to_string());
    Ok(integrate(g, 0.0, z, QUADRATURE_TOL)?)
}

/// `a3(z) = 1/(∫₀^z (−2/F) dz' + C)`, the shearless case A1 solution.
pub fn shearless_a3(scale: &dyn ScaleFactor, c: f64, z: f64) -> Result<f64, ConformalError> {
    case_a2_branch_a3(scale, Branch::Opposite, c, z)
}

/// `a3(z) = 1/(C − k ∫₀^z dz'/F)` with `k = 2` or `3/2` depending on the branch.
pub fn case_a2_branch_a3(scale: &dyn ScaleFactor, branch: Branch, constant: f64, z: f64) -> Result<f64, ConformalError> {
    let denom = constant - branch.growth() * inverse_scale_integral(scale, z)?;
    if denom == 0.0 || !denom.is_finite() {
        return Err(ConformalError::Pole { z });
    }
    Ok(1.0 / denom)
}

/// `(σ11, a3, Ω3)` values, or their `e_3` derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct A1Values {
    pub sigma11: f64,
    pub a3: f64,
    pub omega3: f64,
}

/// Embeds a case A1 point, given its values and `e_3` derivatives, into a full
/// jet with `e_0 = e_1 = e_2 = 0`.
pub fn a1_special_jet(z: f64, v: &A1Values, e3: &A1Values) -> Result<StateJet, ConformalError> {
    let c = case_a1_closure(v.sigma11, v.a3);
    let value = SpecialState {
        p: c.p,
        pi11: c.pi11,
        theta: 6.0 * v.sigma11,
        sigma11: v.sigma11,
        udot: [0.0, 0.0, c.udot3],
        a: [0.0, 0.0, v.a3],
        angular: [0.0, 0.0, v.omega3],
        ..Default::default()
    };
    let d3 = SpecialState {
        p: -6.0 * v.sigma11 * e3.sigma11 + 2.0 / 3.0 * v.a3 * e3.a3,
        pi11: 24.0 * v.sigma11 * e3.sigma11 - 8.0 / 3.0 * v.a3 * e3.a3,
        theta: 6.0 * e3.sigma11,
        sigma11: e3.sigma11,
        udot: [0.0, 0.0, -e3.a3],
        a: [0.0, 0.0, e3.a3],
        angular: [0.0, 0.0, e3.omega3],
        ..Default::default()
    };
    let zero = SpecialState::default();
    Ok(special_jet(z, &value, &[zero, zero, zero, d3])?)
}

/// Case A1 jet whose `e_3` derivatives come from the ODE right-hand side.
pub fn a1_ode_jet(z: f64, y: &[f64; 3], scale: &dyn ScaleFactor) -> Result<StateJet, ConformalError> {
    let f = scale.positive(z)?;
    let dy = case_a1_rhs(z, y, scale)?;
    let v = A1Values { sigma11: y[0], a3: y[1], omega3: y[2] };
    let e3 = A1Values { sigma11: f * dy[0], a3: f * dy[1], omega3: f * dy[2] };
    a1_special_jet(z, &v, &e3)
}

/// `(p, u̇3, a3, Ω3)` values, or their `e_3` derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct A2Values {
    pub p: f64,
    pub udot3: f64,
    pub a3: f64,
    pub omega3: f64,
}

/// Embeds a case A2 point into a full jet with `e_0 = e_1 = e_2 = 0`.
pub fn a2_special_jet(z: f64, v: &A2Values, e3: &A2Values) -> Result<StateJet, ConformalError> {
    let value = SpecialState {
        p: v.p,
        pi11: case_a2_pi11(v.p, v.udot3, v.a3),
        udot: [0.0, 0.0, v.udot3],
        a: [0.0, 0.0, v.a3],
        angular: [0.0, 0.0, v.omega3],
        ..Default::default()
    };
    let d3 = SpecialState {
        p: e3.p,
        pi11: 0.5 * e3.p - v.a3 * e3.a3 + e3.a3 * v.udot3 + v.a3 * e3.udot3,
        udot: [0.0, 0.0, e3.udot3],
        a: [0.0, 0.0, e3.a3],
        angular: [0.0, 0.0, e3.omega3],
        ..Default::default()
    };
    let zero = SpecialState::default();
    Ok(special_jet(z, &value, &[zero, zero, zero, d3])?)
}

/// Case A2 jet whose `e_3` derivatives come from the ODE right-hand side.
pub fn a2_ode_jet(z: f64, y: &[f64; 4], scale: &dyn ScaleFactor) -> Result<StateJet, ConformalError> {
    let f = scale.positive(z)?;
    let dy = case_a2_rhs(z, y, scale)?.dy;
    let v = A2Values { p: y[0], udot3: y[1], a3: y[2], omega3: y[3] };
    let e3 = A2Values { p: f * dy[0], udot3: f * dy[1], a3: f * dy[2], omega3: f * dy[3] };
    a2_special_jet(z, &v, &e3)
}
