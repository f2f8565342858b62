use crate::state::StateJet;

use super::{ConformalError, NamedResiduals, SpecialState};

/// Residuals of the non-rotating, non-accelerated system with `n = 0`,
/// `a = (0, 0, a3)` and shear `diag(σ11, σ11, −2σ11)`. The jet must carry
/// `e_0` and `e_3` derivatives; absent `e_1`, `e_2` derivatives count as zero.
pub fn futurework_residuals(jet: &StateJet) -> Result<NamedResiduals, ConformalError> {
    const WHO: &str = "non-rotating residual system";
    let s = SpecialState::from_fieldset(&jet.value);
    let d0 = SpecialState::from_fieldset(jet.require(0, WHO)?);
    let d3 = SpecialState::from_fieldset(jet.require(3, WHO)?);
    let side = |k: usize| jet.derivative(k).map(SpecialState::from_fieldset).unwrap_or_default();
    let (d1, d2) = (side(1), side(2));
    let (p, pi, theta, s11, a3) = (s.p, s.pi11, s.theta, s.sigma11, s.a[2]);

    let mut r = NamedResiduals::default();
    r.push("BS1", d0.p - (-4.0 / 3.0 * p * theta - 2.0 * s11 * pi));
    r.push("BS2", d0.pi11 - (-4.0 * s11 * p + (s11 - theta / 3.0) * pi));
    r.push("BS3", d3.pi11 - 3.0 * a3 * pi);
    r.push("BS4.p.e1", d1.p);
    r.push("BS4.p.e2", d2.p);
    r.push("BS4.p.e3", d3.p);
    r.push("BS4.pi11.e1", d1.pi11);
    r.push("BS4.pi11.e2", d2.pi11);
    r.push("RES1", d0.a[2] - (-a3 * theta / 3.0 - a3 * s11));
    r.push("RES2", d3.a[2] - (1.5 * p - theta * theta / 6.0 + 1.5 * s11 * s11 + 1.5 * a3 * a3));
    r.push(
        "RES3",
        d0.sigma11 - (0.5 * p + pi + 1.5 * s11 * s11 + 0.5 * a3 * a3 - theta * theta / 18.0 - theta * s11),
    );
    r.push("RES4", d3.sigma11 + d3.theta / 3.0 - 3.0 * a3 * s11);
    r.push("RES5", d0.theta - (-theta * theta / 3.0 - 6.0 * s11 * s11 - 3.0 * p));
    r.push("RES6.e1", d1.a[2]);
    r.push("RES6.e2", d2.a[2]);
    r.push("RES7.e1", d1.sigma11);
    r.push("RES7.e2", d2.sigma11);
    r.push("RES8.e1", d1.theta);
    r.push("RES8.e2", d2.theta);
    r.push("RES10.e1", d1.angular[2]);
    r.push("RES10.e2", d2.angular[2]);
    r.push("RES10.e3", d3.angular[2]);
    r.finite()
}

/// The system above is a nonlinear PDE system; only residual evaluation is offered.
pub fn futurework_solve() -> Result<(), ConformalError> {
    Err(ConformalError::FutureWork)
}

#[cfg(test)]
mod tests {
    use super::super::special_jet;
    use super::*;

    fn jet(value: SpecialState, d: [SpecialState; 4]) -> StateJet {
        special_jet(0.0, &value, &d).unwrap()
    }

    #[test]
    fn zero_jet_is_exact() {
        let r = futurework_residuals(&jet(SpecialState::default(), [SpecialState::default(); 4])).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        assert_eq!(r.len(), 22);
    }

    #[test]
    fn flrw_like_raychaudhuri() {
        let v = SpecialState { theta: 2.0, p: 0.5, ..Default::default() };
        let d0 = SpecialState { theta: -1.0, ..Default::default() };
        let zero = SpecialState::default();
        let r = futurework_residuals(&jet(v, [d0, zero, zero, zero])).unwrap();
        assert!((r.get("RES5").unwrap() - (-1.0 + 4.0 / 3.0 + 1.5)).abs() < 1e-15);
    }

    #[test]
    fn transverse_derivative_is_residual() {
        let zero = SpecialState::default();
        let d1 = SpecialState { theta: 0.7, ..Default::default() };
        let r = futurework_residuals(&jet(zero, [zero, d1, zero, zero])).unwrap();
        assert_eq!(r.get("RES8.e1"), Some(0.7));
        assert!(futurework_solve().is_err());
    }

    #[test]
    fn requires_e0_and_e3() {
        let j = StateJet::new(0.0, SpecialState::default().to_fieldset().unwrap()).unwrap();
        assert!(futurework_residuals(&j).is_err());
    }
}
