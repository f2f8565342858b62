//! 1+3 state records, jets, and the derivative-provider contract.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::tensor::{SymThree, TensorError, ThreeVector, TracefreeSymThree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("non-finite value for {0}")]
    NonFinite(String),
    #[error("{0} is derived from the trace-free constraint and cannot be set directly")]
    Derived(Field),
    #[error("unknown field name `{0}`")]
    UnknownField(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet lacks the e_{direction} derivative record required by {needed_by}")]
    MissingDerivative {
        direction: usize,
        needed_by: &'static str,
    },
    #[error("frame direction {0} out of range (expected 0..=3)")]
    BadDirection(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProviderError {
    #[error("provider does not supply second derivatives")]
    NoSecondDerivatives,
    #[error("point {0} lies outside the provider's domain")]
    OutOfDomain(f64),
    #[error("malformed table: {0}")]
    Table(String),
    #[error("provider cannot evaluate {field}: {reason}")]
    Unavailable { field: Field, reason: String },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Matter variables `{μ, p, q_α, π_αβ, Λ}` of the energy-momentum decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatterState {
    pub mu: f64,
    pub p: f64,
    pub q: ThreeVector,
    pub pi: TracefreeSymThree,
    /// Cosmological constant.
    pub lambda: f64,
}

impl MatterState {
    pub fn new(
        mu: f64,
        p: f64,
        q: ThreeVector,
        pi: TracefreeSymThree,
        lambda: f64,
    ) -> Result<Self, StateError> {
        let state = Self { mu, p, q, pi, lambda };
        state.validate()?;
        Ok(state)
    }

    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Perfect fluid with `q = π = 0`.
    pub fn perfect_fluid(mu: f64, p: f64, lambda: f64) -> Result<Self, StateError> {
        Self::new(mu, p, ThreeVector::ZERO, TracefreeSymThree::ZERO, lambda)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        for (name, v) in [("mu", self.mu), ("p", self.p), ("lambda", self.lambda)] {
            if !v.is_finite() {
                return Err(StateError::NonFinite(name.into()));
            }
        }
        if !self.q.is_finite() || !self.pi.is_finite() {
            return Err(StateError::NonFinite("matter tensor".into()));
        }
        Ok(())
    }
}

/// Kinematic and spatial commutation variables `{Θ, u̇, σ, ω, Ω, a, n}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConnectionState {
    pub theta: f64,
    pub udot: ThreeVector,
    pub sigma: TracefreeSymThree,
    /// Vorticity vector ω_α.
    pub omega: ThreeVector,
    /// Angular velocity Ω_α of the spatial triad.
    pub angular: ThreeVector,
    pub a: ThreeVector,
    pub n: SymThree,
}

impl ConnectionState {
    pub fn validate(&self) -> Result<(), StateError> {
        if !self.theta.is_finite() {
            return Err(StateError::NonFinite("theta".into()));
        }
        let ok = self.udot.is_finite()
            && self.sigma.is_finite()
            && self.omega.is_finite()
            && self.angular.is_finite()
            && self.a.is_finite()
            && self.n.is_finite();
        if ok {
            Ok(())
        } else {
            Err(StateError::NonFinite("connection tensor".into()))
        }
    }
}

/// Electric and magnetic Weyl parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WeylState {
    pub e: TracefreeSymThree,
    pub h: TracefreeSymThree,
}

/// Every 1+3 variable at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldSet {
    pub matter: MatterState,
    pub connection: ConnectionState,
    pub weyl: WeylState,
}

/// Selector for a single scalar component of a [`FieldSet`].
///
/// Tensor indices are zero-based; symmetric pairs are normalized so that
/// `Sigma(2, 0)` and `Sigma(0, 2)` name the same component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Mu,
    P,
    Q(usize),
    Pi(usize, usize),
    Lambda,
    Theta,
    Udot(usize),
    Sigma(usize, usize),
    Vorticity(usize),
    AngularVelocity(usize),
    A(usize),
    N(usize, usize),
    E(usize, usize),
    H(usize, usize),
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

const UPPER: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
const TRACEFREE: [(usize, usize); 5] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)];

impl Field {
    /// Normalizes symmetric index pairs.
    pub fn canonical(self) -> Self {
        match self {
            Field::Pi(i, j) => {
                let (i, j) = ordered(i, j);
                Field::Pi(i, j)
            }
            Field::Sigma(i, j) => {
                let (i, j) = ordered(i, j);
                Field::Sigma(i, j)
            }
            Field::N(i, j) => {
                let (i, j) = ordered(i, j);
                Field::N(i, j)
            }
            Field::E(i, j) => {
                let (i, j) = ordered(i, j);
                Field::E(i, j)
            }
            Field::H(i, j) => {
                let (i, j) = ordered(i, j);
                Field::H(i, j)
            }
            other => other,
        }
    }

    /// True for the `33` entry of a trace-free tensor, which is derived rather than stored.
    pub fn is_derived(self) -> bool {
        matches!(
            self.canonical(),
            Field::Pi(2, 2) | Field::Sigma(2, 2) | Field::E(2, 2) | Field::H(2, 2)
        )
    }

    /// All independently settable fields, in a fixed order.
    pub fn independent() -> Vec<Field> {
        let mut out = vec![Field::Mu, Field::P];
        out.extend((0..3).map(Field::Q));
        out.extend(TRACEFREE.iter().map(|&(i, j)| Field::Pi(i, j)));
        out.push(Field::Lambda);
        out.push(Field::Theta);
        out.extend((0..3).map(Field::Udot));
        out.extend(TRACEFREE.iter().map(|&(i, j)| Field::Sigma(i, j)));
        out.extend((0..3).map(Field::Vorticity));
        out.extend((0..3).map(Field::AngularVelocity));
        out.extend((0..3).map(Field::A));
        out.extend(UPPER.iter().map(|&(i, j)| Field::N(i, j)));
        out.extend(TRACEFREE.iter().map(|&(i, j)| Field::E(i, j)));
        out.extend(TRACEFREE.iter().map(|&(i, j)| Field::H(i, j)));
        out
    }

    /// Column name used in tables and state files, with one-based indices.
    pub fn name(self) -> String {
        let f = self.canonical();
        let v = |prefix: &str, i: usize| format!("{prefix}{}", i + 1);
        let t = |prefix: &str, i: usize, j: usize| format!("{prefix}{}{}", i + 1, j + 1);
        match f {
            Field::Mu => "mu".into(),
            Field::P => "p".into(),
            Field::Q(i) => v("q", i),
            Field::Pi(i, j) => t("pi", i, j),
            Field::Lambda => "lambda".into(),
            Field::Theta => "theta".into(),
            Field::Udot(i) => v("udot", i),
            Field::Sigma(i, j) => t("sigma", i, j),
            Field::Vorticity(i) => v("omega", i),
            Field::AngularVelocity(i) => v("Omega", i),
            Field::A(i) => v("a", i),
            Field::N(i, j) => t("n", i, j),
            Field::E(i, j) => t("E", i, j),
            Field::H(i, j) => t("H", i, j),
        }
    }

    fn valid_indices(self) -> bool {
        match self {
            Field::Q(i)
            | Field::Udot(i)
            | Field::Vorticity(i)
            | Field::AngularVelocity(i)
            | Field::A(i) => i < 3,
            Field::Pi(i, j) | Field::Sigma(i, j) | Field::N(i, j) | Field::E(i, j) | Field::H(i, j) => {
                i < 3 && j < 3
            }
            _ => true,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Field {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || StateError::UnknownField(s.to_string());
        let scalar = match s {
            "mu" => Some(Field::Mu),
            "p" => Some(Field::P),
            "lambda" => Some(Field::Lambda),
            "theta" => Some(Field::Theta),
            _ => None,
        };
        if let Some(f) = scalar {
            return Ok(f);
        }
        let split = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(unknown)?;
        let (prefix, digits) = s.split_at(split);
        let idx: Vec<usize> = digits
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(unknown)?;
        if idx.iter().any(|&d| d == 0 || d > 3) {
            return Err(unknown());
        }
        let field = match (prefix, idx.as_slice()) {
            ("q", [i]) => Field::Q(i - 1),
            ("udot", [i]) => Field::Udot(i - 1),
            ("omega", [i]) => Field::Vorticity(i - 1),
            ("Omega", [i]) => Field::AngularVelocity(i - 1),
            ("a", [i]) => Field::A(i - 1),
            ("pi", [i, j]) => Field::Pi(i - 1, j - 1),
            ("sigma", [i, j]) => Field::Sigma(i - 1, j - 1),
            ("n", [i, j]) => Field::N(i - 1, j - 1),
            ("E", [i, j]) => Field::E(i - 1, j - 1),
            ("H", [i, j]) => Field::H(i - 1, j - 1),
            _ => return Err(unknown()),
        };
        Ok(field.canonical())
    }
}

fn tracefree_slot(i: usize, j: usize) -> usize {
    TRACEFREE
        .iter()
        .position(|&p| p == ordered(i, j))
        .expect("derived component has no slot")
}

impl FieldSet {
    pub fn new(
        matter: MatterState,
        connection: ConnectionState,
        weyl: WeylState,
    ) -> Result<Self, StateError> {
        let set = Self {
            matter,
            connection,
            weyl,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        self.matter.validate()?;
        self.connection.validate()?;
        if !self.weyl.e.is_finite() || !self.weyl.h.is_finite() {
            return Err(StateError::NonFinite("weyl".into()));
        }
        Ok(())
    }

    pub fn get(&self, field: Field) -> f64 {
        let m = &self.matter;
        let c = &self.connection;
        let w = &self.weyl;
        match field {
            Field::Mu => m.mu,
            Field::P => m.p,
            Field::Q(i) => m.q.get(i),
            Field::Pi(i, j) => m.pi.get(i, j),
            Field::Lambda => m.lambda,
            Field::Theta => c.theta,
            Field::Udot(i) => c.udot.get(i),
            Field::Sigma(i, j) => c.sigma.get(i, j),
            Field::Vorticity(i) => c.omega.get(i),
            Field::AngularVelocity(i) => c.angular.get(i),
            Field::A(i) => c.a.get(i),
            Field::N(i, j) => c.n.get(i, j),
            Field::E(i, j) => w.e.get(i, j),
            Field::H(i, j) => w.h.get(i, j),
        }
    }

    /// Sets one independent component. Derived `33` entries of trace-free tensors are rejected.
    pub fn set(&mut self, field: Field, value: f64) -> Result<(), StateError> {
        if !field.valid_indices() {
            return Err(StateError::UnknownField(format!("{field:?}")));
        }
        if !value.is_finite() {
            return Err(StateError::NonFinite(field.name()));
        }
        let field = field.canonical();
        if field.is_derived() {
            return Err(StateError::Derived(field));
        }
        let m = &mut self.matter;
        let c = &mut self.connection;
        let w = &mut self.weyl;
        match field {
            Field::Mu => m.mu = value,
            Field::P => m.p = value,
            Field::Q(i) => m.q.set(i, value),
            Field::Pi(i, j) => m.pi.set_independent(tracefree_slot(i, j), value),
            Field::Lambda => m.lambda = value,
            Field::Theta => c.theta = value,
            Field::Udot(i) => c.udot.set(i, value),
            Field::Sigma(i, j) => c.sigma.set_independent(tracefree_slot(i, j), value),
            Field::Vorticity(i) => c.omega.set(i, value),
            Field::AngularVelocity(i) => c.angular.set(i, value),
            Field::A(i) => c.a.set(i, value),
            Field::N(i, j) => c.n.set(i, j, value),
            Field::E(i, j) => w.e.set_independent(tracefree_slot(i, j), value),
            Field::H(i, j) => w.h.set_independent(tracefree_slot(i, j), value),
        }
        Ok(())
    }

    /// Componentwise `self + s·other`.
    pub fn add_scaled(&self, other: &FieldSet, s: f64) -> FieldSet {
        let mut out = *self;
        for f in Field::independent() {
            // Values are finite by the jet invariant; overflow surfaces in validate().
            let _ = out.set(f, self.get(f) + s * other.get(f));
        }
        out
    }

    pub fn scaled(&self, s: f64) -> FieldSet {
        FieldSet::default().add_scaled(self, s)
    }
}

/// A state with its frame derivatives `e_a(·)` at one point.
///
/// Derivative records are optional so evaluators can report exactly which
/// direction a caller failed to supply.
#[derive(Debug, Clone, PartialEq)]
pub struct StateJet {
    /// Point label along the working line (`z` or `t`).
    pub point: f64,
    pub value: FieldSet,
    deriv: [Option<FieldSet>; 4],
}

impl StateJet {
    pub fn new(point: f64, value: FieldSet) -> Result<Self, StateError> {
        value.validate()?;
        Ok(Self {
            point,
            value,
            deriv: [None; 4],
        })
    }

    /// Jet with every derivative record present.
    pub fn complete(point: f64, value: FieldSet, deriv: [FieldSet; 4]) -> Result<Self, StateError> {
        let mut jet = Self::new(point, value)?;
        for (a, d) in deriv.into_iter().enumerate() {
            jet = jet.with_derivative(a, d)?;
        }
        Ok(jet)
    }

    pub fn with_derivative(mut self, direction: usize, d: FieldSet) -> Result<Self, StateError> {
        assert!(direction < 4, "frame direction out of range");
        d.validate()?;
        self.deriv[direction] = Some(d);
        Ok(self)
    }

    pub fn derivative(&self, direction: usize) -> Option<&FieldSet> {
        self.deriv.get(direction).and_then(|d| d.as_ref())
    }

    pub fn require(&self, direction: usize, needed_by: &'static str) -> Result<&FieldSet, JetError> {
        if direction > 3 {
            return Err(JetError::BadDirection(direction));
        }
        self.derivative(direction)
            .ok_or(JetError::MissingDerivative { direction, needed_by })
    }

    /// Spatial derivative records `e_1, e_2, e_3`.
    pub fn require_spatial(&self, needed_by: &'static str) -> Result<[&FieldSet; 3], JetError> {
        Ok([
            self.require(1, needed_by)?,
            self.require(2, needed_by)?,
            self.require(3, needed_by)?,
        ])
    }

    /// Copy with every present derivative record multiplied by `s`.
    pub fn with_scaled_derivatives(&self, s: f64) -> StateJet {
        let mut out = self.clone();
        for d in out.deriv.iter_mut().flatten() {
            *d = d.scaled(s);
        }
        out
    }
}

/// A field value together with its four frame derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldJet {
    pub value: f64,
    pub deriv: [f64; 4],
}

/// Source of field values and their frame derivatives.
///
/// Implementations must be safe for concurrent read-only queries.
pub trait DerivativeProvider {
    type Point: Copy;

    fn field(&self, field: Field, at: Self::Point) -> Result<FieldJet, ProviderError>;

    /// `e_outer(e_inner(f))`.
    fn second_derivative(
        &self,
        _field: Field,
        _outer: usize,
        _inner: usize,
        _at: Self::Point,
    ) -> Result<f64, ProviderError> {
        Err(ProviderError::NoSecondDerivatives)
    }
}

/// Queries every independent field and builds a complete jet.
pub fn assemble_jet<P>(provider: &P, at: f64) -> Result<StateJet, ProviderError>
where
    P: DerivativeProvider<Point = f64> + ?Sized,
{
    let mut value = FieldSet::default();
    let mut deriv = [FieldSet::default(); 4];
    for f in Field::independent() {
        let jet = provider.field(f, at)?;
        value.set(f, jet.value)?;
        for (a, d) in deriv.iter_mut().enumerate() {
            d.set(f, jet.deriv[a])?;
        }
    }
    Ok(StateJet::complete(at, value, deriv)?)
}

/// Connection variables at a point, read through a provider.
pub fn provider_connection<P>(provider: &P, at: P::Point) -> Result<ConnectionState, ProviderError>
where
    P: DerivativeProvider + ?Sized,
{
    let mut set = FieldSet::default();
    for f in Field::independent() {
        if matches!(
            f,
            Field::Theta
                | Field::Udot(_)
                | Field::Sigma(..)
                | Field::Vorticity(_)
                | Field::AngularVelocity(_)
                | Field::A(_)
                | Field::N(..)
        ) {
            set.set(f, provider.field(f, at)?.value)?;
        }
    }
    Ok(set.connection)
}
