use crate::state::{FieldSet, MatterState, StateError, StateJet};
use crate::tensor::{SymThree, ThreeVector, TracefreeSymThree};

use super::ConformalError;

/// Variables that survive the specialization to a diagonal anisotropic stress
/// `π = diag(π11, π11, −2π11)`, `μ = 3p`, vanishing Weyl tensor and heat flux.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpecialState {
    pub p: f64,
    pub pi11: f64,
    pub theta: f64,
    pub sigma11: f64,
    pub sigma13: f64,
    pub sigma23: f64,
    pub udot: [f64; 3],
    pub a: [f64; 3],
    pub n11: f64,
    pub n13: f64,
    pub n23: f64,
    pub omega: [f64; 3],
    pub angular: [f64; 3],
}

impl SpecialState {
    /// Full 1+3 record. Linear in `self`, so it also maps derivative records.
    pub fn to_fieldset(&self) -> Result<FieldSet, StateError> {
        let mut out = FieldSet::default();
        out.matter = MatterState::new(
            3.0 * self.p,
            self.p,
            ThreeVector::ZERO,
            TracefreeSymThree::diag(self.pi11, self.pi11)?,
            0.0,
        )?;
        let c = &mut out.connection;
        c.theta = self.theta;
        c.sigma = TracefreeSymThree::new(self.sigma11, 0.0, self.sigma13, self.sigma11, self.sigma23)?;
        c.udot = ThreeVector::from_array(self.udot)?;
        c.a = ThreeVector::from_array(self.a)?;
        c.n = SymThree::new(self.n11, 0.0, self.n13, self.n11, self.n23, 0.0)?;
        c.omega = ThreeVector::from_array(self.omega)?;
        c.angular = ThreeVector::from_array(self.angular)?;
        out.validate()?;
        Ok(out)
    }

    /// Reads the surviving variables from a full record, ignoring everything else.
    pub fn from_fieldset(f: &FieldSet) -> Self {
        let c = &f.connection;
        Self {
            p: f.matter.p,
            pi11: f.matter.pi.get(0, 0),
            theta: c.theta,
            sigma11: c.sigma.get(0, 0),
            sigma13: c.sigma.get(0, 2),
            sigma23: c.sigma.get(1, 2),
            udot: c.udot.to_array(),
            a: c.a.to_array(),
            n11: c.n.get(0, 0),
            n13: c.n.get(0, 2),
            n23: c.n.get(1, 2),
            omega: c.omega.to_array(),
            angular: c.angular.to_array(),
        }
    }
}

/// Jet whose value and four derivative records are embeddings of special states.
pub fn special_jet(point: f64, value: &SpecialState, deriv: &[SpecialState; 4]) -> Result<StateJet, StateError> {
    let d = [
        deriv[0].to_fieldset()?,
        deriv[1].to_fieldset()?,
        deriv[2].to_fieldset()?,
        deriv[3].to_fieldset()?,
    ];
    StateJet::complete(point, value.to_fieldset()?, d)
}

/// `(Φ00, Φ11) = (½(2p − π11), ½(p + π11))`.
pub fn special_ricci(p: f64, pi11: f64) -> (f64, f64) {
    (0.5 * (2.0 * p - pi11), 0.5 * (p + pi11))
}

/// Forces `σ13 = σ23 = ω = Ω1 = Ω2 = u̇1 = u̇2 = 0`, `n23 = a1`, `n13 = −a2`.
pub fn gauge_reduce(s: &SpecialState) -> SpecialState {
    SpecialState {
        sigma13: 0.0,
        sigma23: 0.0,
        omega: [0.0; 3],
        angular: [0.0, 0.0, s.angular[2]],
        udot: [0.0, 0.0, s.udot[2]],
        n23: s.a[0],
        n13: -s.a[1],
        ..*s
    }
}

/// Named scalar residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub value: f64,
}

/// Ordered list of named residuals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NamedResiduals(pub Vec<Residual>);

impl NamedResiduals {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, r| m.max(r.value.abs()))
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|r| r.name == name).map(|r| r.value)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Residual> {
        self.0.iter()
    }

    pub(super) fn push(&mut self, name: &'static str, value: f64) {
        self.0.push(Residual { name, value });
    }

    pub(super) fn finite(self) -> Result<Self, ConformalError> {
        if self.0.iter().all(|r| r.value.is_finite()) {
            Ok(self)
        } else {
            Err(ConformalError::NonFinite("special residuals"))
        }
    }
}

/// Specialized Bianchi identities: eight derivative equations, six algebraic
/// constraints and three structural conditions reported as max-abs defects.
pub fn bianchi_special_residuals(jet: &StateJet) -> Result<NamedResiduals, ConformalError> {
    const WHO: &str = "specialized Bianchi identities";
    let v = &jet.value;
    let d = [jet.require(0, WHO)?, jet.require(1, WHO)?, jet.require(2, WHO)?, jet.require(3, WHO)?];
    let s = SpecialState::from_fieldset(v);
    let ds = d.map(SpecialState::from_fieldset);
    let (p, pi) = (s.p, s.pi11);
    let (theta, s11) = (s.theta, s.sigma11);
    let [u1, u2, u3] = s.udot;
    let [a1, a2, a3] = s.a;
    let [w1, w2, _] = s.omega;
    let [o1, o2, _] = s.angular;
    let (n13, n23) = (s.n13, s.n23);
    let (s13, s23) = (s.sigma13, s.sigma23);
    let c = &v.connection;

    let mut r = NamedResiduals::default();
    r.push("b1", ds[0].p - (-4.0 / 3.0 * p * theta - 2.0 * s11 * pi));
    r.push("b2", ds[0].pi11 - (-4.0 * s11 * p + (s11 - theta / 3.0) * pi));
    r.push("b3", ds[1].p + (a1 - n23) * pi);
    r.push("b4", ds[1].pi11 - (a1 - n23) * pi);
    r.push("b5", ds[2].p + (a2 + n13) * pi);
    r.push("b6", ds[2].pi11 - (a2 + n13) * pi);
    r.push("b7", ds[3].p - (-4.0 / 3.0 * u3 * p + 2.0 / 3.0 * u3 * pi));
    r.push("b8", ds[3].pi11 - (4.0 / 3.0 * u3 * p + (3.0 * a3 - 2.0 / 3.0 * u3) * pi));
    r.push("b9", 4.0 * u1 * p + (u1 - 3.0 * a1 + 3.0 * n23) * pi);
    r.push("b10", 4.0 * u2 * p + (u2 - 3.0 * a2 - 3.0 * n13) * pi);
    r.push("b11", -2.0 * s13 * p + 0.25 * (3.0 * w2 - 6.0 * o2 + s13) * pi);
    r.push("b12", -2.0 * s23 * p - 0.25 * (3.0 * w1 - 6.0 * o1 - s23) * pi);
    r.push("b13", -4.0 * w1 * p + 0.5 * (w1 - 3.0 * s23) * pi);
    r.push("b14", -4.0 * w2 * p + 0.5 * (w2 + 3.0 * s13) * pi);
    let b15 = [c.omega.get(2), c.n.get(2, 2), c.n.get(0, 1), c.sigma.get(0, 1)];
    r.push("b15", b15.iter().fold(0.0, |m, x| m.max(x.abs())));
    let b16 = [c.sigma.get(1, 1) - s11, c.sigma.get(2, 2) + 2.0 * s11];
    r.push("b16", b16.iter().fold(0.0, |m, x| m.max(x.abs())));
    r.push("b17", (c.n.get(0, 0) - c.n.get(1, 1)).abs());
    r.finite()
}

/// The specialized Bianchi identities after gauge reduction: the eight
/// derivative equations with `e_1`, `e_2` of `p` and `π11` forced to zero.
pub fn bianchi_reduced_residuals(jet: &StateJet) -> Result<NamedResiduals, ConformalError> {
    const WHO: &str = "reduced Bianchi identities";
    let d = [jet.require(0, WHO)?, jet.require(1, WHO)?, jet.require(2, WHO)?, jet.require(3, WHO)?];
    let s = SpecialState::from_fieldset(&jet.value);
    let ds = d.map(SpecialState::from_fieldset);
    let (p, pi, theta, s11, u3, a3) = (s.p, s.pi11, s.theta, s.sigma11, s.udot[2], s.a[2]);
    let mut r = NamedResiduals::default();
    r.push("b1.1", ds[0].p - (-4.0 / 3.0 * p * theta - 2.0 * s11 * pi));
    r.push("b2.1", ds[0].pi11 - (-4.0 * s11 * p + (s11 - theta / 3.0) * pi));
    r.push("b3.1", ds[1].p);
    r.push("b4.1", ds[1].pi11);
    r.push("b5.1", ds[2].p);
    r.push("b6.1", ds[2].pi11);
    r.push("b7.1", ds[3].p - (-4.0 / 3.0 * u3 * p + 2.0 / 3.0 * u3 * pi));
    r.push("b8.1", ds[3].pi11 - (4.0 / 3.0 * u3 * p + (3.0 * a3 - 2.0 / 3.0 * u3) * pi));
    r.finite()
}

/// Ricci and Einstein equations of the gauge-reduced system. The four
/// two-sided conditions each contribute an `e_1` and an `e_2` entry.
pub fn ricci_einstein_residuals(jet: &StateJet) -> Result<NamedResiduals, ConformalError> {
    const WHO: &str = "reduced Ricci/Einstein equations";
    let d = [jet.require(0, WHO)?, jet.require(1, WHO)?, jet.require(2, WHO)?, jet.require(3, WHO)?];
    let s = SpecialState::from_fieldset(&jet.value);
    let [e0, e1, e2, e3] = d.map(SpecialState::from_fieldset);
    let (p, pi, th, s11, u3, n11, om3) = (s.p, s.pi11, s.theta, s.sigma11, s.udot[2], s.n11, s.angular[2]);
    let [a1, a2, a3] = s.a;

    let mut r = NamedResiduals::default();
    r.push("RE1", e0.a[2] - (-u3 * th / 3.0 - a3 * th / 3.0 - u3 * s11 - a3 * s11));
    r.push(
        "RE2",
        e1.a[0] + e2.a[1] + e3.a[2]
            - (1.5 * p - th * th / 6.0 + 1.5 * s11 * s11 + 2.0 * a1 * a1 + 2.0 * a2 * a2 + 1.5 * a3 * a3),
    );
    r.push(
        "RE3",
        e3.a[2] - e0.sigma11 - e3.udot[2] / 3.0
            - (th * s11 - pi + u3 * u3 / 3.0 + a3 * u3 / 3.0 + p - th * th / 9.0 + s11 * s11 + a3 * a3),
    );
    r.push("RE4", e3.sigma11 + e3.theta / 3.0 - 3.0 * a3 * s11);
    r.push("RE5", e3.angular[2] + e0.n11 - (-u3 * om3 + 2.0 * s11 * n11 - th * n11 / 3.0));
    r.push(
        "RE6",
        e0.theta - e3.udot[2] - (-th * th / 3.0 - 6.0 * s11 * s11 - 3.0 * p + u3 * u3 - 2.0 * a3 * u3),
    );
    r.push("RE7", e1.n11 - 2.0 * e3.a[1] - (2.0 * a1 * n11 - 2.0 * a3 * a2));
    r.push("RE8", 2.0 * e3.a[0] - e2.n11 - (2.0 * a2 * n11 + 2.0 * a3 * a1));
    r.push("RE9", e0.a[0] - 0.5 * e2.angular[2] - (-a1 * th / 3.0 - a1 * s11 - a2 * om3));
    r.push("RE10", e0.a[1] + 0.5 * e1.angular[2] - (-a2 * th / 3.0 - a2 * s11 + a1 * om3));
    r.push("RE11.e1", e1.udot[2]);
    r.push("RE11.e2", e2.udot[2]);
    r.push("RE12.e1", e1.a[2]);
    r.push("RE12.e2", e2.a[2]);
    r.push("RE13.e1", e1.sigma11);
    r.push("RE13.e2", e2.sigma11);
    r.push("RE14.e1", e1.theta);
    r.push("RE14.e2", e2.theta);
    r.finite()
}
