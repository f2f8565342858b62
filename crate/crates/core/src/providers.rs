//! Derivative providers for data that depend on the frame coordinate `z` only,
//! with the diagonal basis `e_a = F ∂_a`, so `e_0`, `e_1`, `e_2` annihilate every field.

use crate::conformal::{ClosedFormA1, Profile};
use crate::numerics::{fd_derivative, FdOrder, Grid, NumericsError};
use crate::state::{DerivativeProvider, Field, FieldJet, FieldSet, ProviderError, StateJet};

fn unavailable(field: Field, reason: impl ToString) -> ProviderError {
    ProviderError::Unavailable { field, reason: reason.to_string() }
}

/// Closed-form case A1 data with `Θ = 6σ11 + theta_offset`.
///
/// A nonzero offset breaks the frame equations; it exists to probe the
/// commutator relations. Second derivatives along `e_3` are obtained by a
/// five-point difference of the analytic first derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Provider<P> {
    pub family: ClosedFormA1<P>,
    pub theta_offset: f64,
    /// Step of the `e_3 e_3` difference.
    pub step: f64,
}

impl<P: Profile> A1Provider<P> {
    pub fn new(family: ClosedFormA1<P>, theta_offset: f64) -> Self {
        Self { family, theta_offset, step: 1e-3 }
    }

    pub fn jet(&self, z: f64) -> Result<StateJet, ProviderError> {
        let row = self.family.point(z).map_err(|e| unavailable(Field::Theta, e))?;
        let mut jet = row.jet().map_err(|e| unavailable(Field::Theta, e))?;
        jet.value.connection.theta += self.theta_offset;
        Ok(jet)
    }

    fn e3(&self, field: Field, z: f64) -> Result<f64, ProviderError> {
        let jet = self.jet(z)?;
        Ok(jet.derivative(3).map_or(0.0, |d| d.get(field)))
    }
}

impl<P: Profile> DerivativeProvider for A1Provider<P> {
    type Point = f64;

    fn field(&self, field: Field, z: f64) -> Result<FieldJet, ProviderError> {
        let jet = self.jet(z)?;
        let mut deriv = [0.0; 4];
        for (a, d) in deriv.iter_mut().enumerate() {
            *d = jet.derivative(a).map_or(0.0, |s| s.get(field));
        }
        Ok(FieldJet { value: jet.value.get(field), deriv })
    }

    fn second_derivative(&self, field: Field, outer: usize, inner: usize, z: f64) -> Result<f64, ProviderError> {
        if outer > 3 || inner > 3 {
            return Err(unavailable(field, format!("direction {} out of range", outer.max(inner))));
        }
        if outer != 3 || inner != 3 {
            return Ok(0.0);
        }
        let h = self.step;
        let g = |k: f64| self.e3(field, z + k * h);
        let slope = (g(-2.0)? - 8.0 * g(-1.0)? + 8.0 * g(1.0)? - g(2.0)?) / (12.0 * h);
        let f = self.family.local(z).map_err(|e| unavailable(field, e))?.f;
        Ok(f * slope)
    }
}

/// Tabulated fields on a uniform grid of one frame coordinate `x`, with
/// `e_direction = F d/dx` by finite differences and the other three frame
/// derivatives zero. Points are grid indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedProvider {
    grid: Grid,
    direction: usize,
    scale: Vec<f64>,
    values: Vec<FieldSet>,
    /// `e_direction` of every field, and the same derivative applied twice.
    along: Vec<FieldSet>,
    twice: Vec<FieldSet>,
}

impl GriddedProvider {
    /// `scale[i]` is `F(z_i)`; every field absent from `values` is zero.
    pub fn new(
        grid: Grid,
        direction: usize,
        scale: Vec<f64>,
        values: Vec<FieldSet>,
        order: FdOrder,
    ) -> Result<Self, ProviderError> {
        if direction > 3 {
            return Err(ProviderError::Table(format!("direction {direction} out of range")));
        }
        let n = grid.len();
        if scale.len() != n || values.len() != n {
            return Err(ProviderError::Table(format!(
                "table has {} scale and {} state rows for {} grid points",
                scale.len(),
                values.len(),
                n
            )));
        }
        if let Some(i) = scale.iter().position(|f| !(*f > 0.0 && f.is_finite())) {
            return Err(ProviderError::OutOfDomain(grid.point(i)));
        }
        let derive = |rows: &[FieldSet]| -> Result<Vec<FieldSet>, ProviderError> {
            let mut out = vec![FieldSet::default(); n];
            for field in Field::independent() {
                let column: Vec<f64> = rows.iter().map(|r| r.get(field)).collect();
                let d = fd_derivative(&column, grid.h(), order).map_err(|e: NumericsError| unavailable(field, e))?;
                for (i, row) in out.iter_mut().enumerate() {
                    row.set(field, scale[i] * d[i])?;
                }
            }
            Ok(out)
        };
        let along = derive(&values)?;
        let twice = derive(&along)?;
        Ok(Self { grid, direction, scale, values, along, twice })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn direction(&self) -> usize {
        self.direction
    }

    pub fn scale(&self, i: usize) -> f64 {
        self.scale[i]
    }

    fn check(&self, i: usize) -> Result<(), ProviderError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(ProviderError::OutOfDomain(i as f64))
        }
    }

    pub fn jet(&self, i: usize) -> Result<StateJet, ProviderError> {
        self.check(i)?;
        let mut deriv = [FieldSet::default(); 4];
        deriv[self.direction] = self.along[i];
        Ok(StateJet::complete(self.grid.point(i), self.values[i], deriv)?)
    }
}

impl DerivativeProvider for GriddedProvider {
    type Point = usize;

    fn field(&self, field: Field, i: usize) -> Result<FieldJet, ProviderError> {
        self.check(i)?;
        let mut deriv = [0.0; 4];
        deriv[self.direction] = self.along[i].get(field);
        Ok(FieldJet { value: self.values[i].get(field), deriv })
    }

    fn second_derivative(&self, field: Field, outer: usize, inner: usize, i: usize) -> Result<f64, ProviderError> {
        self.check(i)?;
        let along = outer == self.direction && inner == self.direction;
        Ok(if along { self.twice[i].get(field) } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ExpProfile;

    #[test]
    fn gridded_linear_field() {
        let grid = Grid::new(0.0, 1.0, 10).unwrap();
        let values: Vec<FieldSet> = grid
            .points()
            .iter()
            .map(|&z| {
                let mut s = FieldSet::default();
                s.set(Field::Theta, 2.0 * z).unwrap();
                s
            })
            .collect();
        let p = GriddedProvider::new(grid, 3, vec![3.0; 11], values, FdOrder::Fourth).unwrap();
        let j = p.field(Field::Theta, 4).unwrap();
        assert!((j.deriv[3] - 6.0).abs() < 1e-12);
        assert!(p.second_derivative(Field::Theta, 3, 3, 4).unwrap().abs() < 1e-10);
        assert!(p.field(Field::Theta, 11).is_err());
    }

    #[test]
    fn a1_provider_matches_jet() {
        let fam = ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, 0.0, 1.0, 1.0, 0.0).unwrap();
        let p = A1Provider::new(fam, 0.0);
        let j = p.field(Field::Sigma(0, 0), 0.3).unwrap();
        // σ = e^z, F = 3e^z: e3σ = 3e^{2z}, e3e3σ = 3e^z · 6e^{2z}.
        assert!((j.deriv[3] - 3.0 * (0.6f64).exp()).abs() < 1e-12);
        let dd = p.second_derivative(Field::Sigma(0, 0), 3, 3, 0.3).unwrap();
        assert!((dd - 18.0 * (0.9f64).exp()).abs() < 1e-8);
    }
}
