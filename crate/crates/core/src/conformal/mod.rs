//! Conformally flat spacetimes with elastic anisotropic stress: the specialized
//! Bianchi and Ricci/Einstein systems, the non-rotating ODE cases and their
//! closed-form families.

mod cases;
mod closed_form;
mod futurework;
mod special;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numerics::{NumericsError, Table};
use crate::state::{JetError, StateError};

pub use cases::*;
pub use closed_form::*;
pub use futurework::*;
pub use special::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error("scale factor F({z}) = {value} is not positive")]
    NonPositiveScale { z: f64, value: f64 },
    #[error("first integral undefined at σ11 = 0; use the shearless branch")]
    ZeroShear,
    #[error("dσ11/dz vanishes at z = {z}")]
    FlatProfile { z: f64 },
    #[error("radicand Aσ11² + 9 = {value:e} is negative at z = {z}")]
    NegativeRadicand { z: f64, value: f64 },
    #[error("denominator vanishes at z = {z} (pole)")]
    Pole { z: f64 },
    #[error("sign must be +1 or -1, got {0}")]
    BadSign(f64),
    #[error("the future-work system is residual-only; solving it is not supported")]
    FutureWork,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Default tolerance for the refined Simpson quadratures.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Distance kept between a clipped interval and a detected pole or domain edge.
pub const CLIP_MARGIN: f64 = 1e-3;

/// Frame scale `F(z)` of the diagonal basis `e_a = F ∂_a`, with its slope.
pub trait ScaleFactor: Send + Sync {
    /// `(F, dF/dz)` without any sign check.
    fn eval(&self, z: f64) -> Result<(f64, f64), ConformalError>;

    /// `F(z)`, rejecting non-positive values.
    fn positive(&self, z: f64) -> Result<f64, ConformalError> {
        let (f, _) = self.eval(z)?;
        if f > 0.0 && f.is_finite() {
            Ok(f)
        } else {
            Err(ConformalError::NonPositiveScale { z, value: f })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantScale(pub f64);

impl ScaleFactor for ConstantScale {
    fn eval(&self, _z: f64) -> Result<(f64, f64), ConformalError> {
        Ok((self.0, 0.0))
    }
}

/// Scale factor interpolated from a table of `(z, F)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedScale(pub Table);

impl ScaleFactor for TabulatedScale {
    fn eval(&self, z: f64) -> Result<(f64, f64), ConformalError> {
        Ok(self.0.eval(z)?)
    }
}

/// Scale factor given by a closure returning `(F, F')`.
#[derive(Clone)]
pub struct FnScale(pub Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>);

impl FnScale {
    pub fn new(f: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }
}

impl fmt::Debug for FnScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnScale(..)")
    }
}

impl ScaleFactor for FnScale {
    fn eval(&self, z: f64) -> Result<(f64, f64), ConformalError> {
        Ok((self.0)(z))
    }
}

impl<S: ScaleFactor + ?Sized> ScaleFactor for &S {
    fn eval(&self, z: f64) -> Result<(f64, f64), ConformalError> {
        (**self).eval(z)
    }
}

impl<S: ScaleFactor + ?Sized> ScaleFactor for Box<S> {
    fn eval(&self, z: f64) -> Result<(f64, f64), ConformalError> {
        (**self).eval(z)
    }
}

impl<S: ScaleFactor + ?Sized> ScaleFactor for Arc<S> {
    fn eval(&self, z: f64) -> Result<(f64, f64), ConformalError> {
        (**self).eval(z)
    }
}

/// Shear profile `σ11(z)` with its first two derivatives.
pub trait Profile: Send + Sync {
    /// `[σ, σ', σ'']` at `z`.
    fn eval(&self, z: f64) -> [f64; 3];
}

/// `amplitude · exp(rate · z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpProfile {
    pub amplitude: f64,
    pub rate: f64,
}

impl Profile for ExpProfile {
    fn eval(&self, z: f64) -> [f64; 3] {
        let v = self.amplitude * (self.rate * z).exp();
        [v, self.rate * v, self.rate * self.rate * v]
    }
}

/// `offset + slope · z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearProfile {
    pub offset: f64,
    pub slope: f64,
}

impl Profile for LinearProfile {
    fn eval(&self, z: f64) -> [f64; 3] {
        [self.offset + self.slope * z, self.slope, 0.0]
    }
}

impl<P: Profile + ?Sized> Profile for &P {
    fn eval(&self, z: f64) -> [f64; 3] {
        (**self).eval(z)
    }
}

impl<P: Profile + ?Sized> Profile for Box<P> {
    fn eval(&self, z: f64) -> [f64; 3] {
        (**self).eval(z)
    }
}

/// Where an interval was cut short and why.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipReport {
    /// Estimated location of the pole or domain edge.
    pub z_singular: f64,
    /// Last retained grid point.
    pub z_clip: f64,
    pub kind: ClipKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipKind {
    /// A denominator changes sign.
    Pole,
    /// The closed form leaves its real domain.
    Domain,
}

impl fmt::Display for ClipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClipKind::Pole => "pole",
            ClipKind::Domain => "domain edge",
        })
    }
}
