//! Fixed-step integration, finite differences and quadrature on uniform grids.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("{needed} samples required, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("quadrature did not reach tolerance {tol:e} after {levels} refinements (last change {change:e})")]
    NotConverged { tol: f64, levels: u32, change: f64 },
    #[error("integrand failed at z = {z}: {reason}")]
    Integrand { z: f64, reason: String },
    #[error("interpolation point {0} outside the table")]
    OutOfTable(f64),
}

/// Uniform grid `z_i = z0 + i h`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    z0: f64,
    z1: f64,
    n: usize,
}

impl Grid {
    pub fn new(z0: f64, z1: f64, n: usize) -> Result<Self, NumericsError> {
        if !(z0.is_finite() && z1.is_finite()) {
            return Err(NumericsError::BadGrid("non-finite endpoint".into()));
        }
        if z1 <= z0 {
            return Err(NumericsError::BadGrid(format!("z1 = {z1} must exceed z0 = {z0}")));
        }
        if n < 4 {
            return Err(NumericsError::BadGrid(format!("N = {n} is below the minimum of 4")));
        }
        Ok(Self { z0, z1, n })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of points, `N + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.z1 - self.z0) / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == self.n {
            self.z1
        } else {
            self.z0 + i as f64 * self.h()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Same interval with `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Self {
        Self { n: self.n * factor.max(1), ..*self }
    }

    /// Grid ending at `z1` with the same spacing, rounded down to whole cells.
    pub fn truncated(&self, z1: f64) -> Option<Self> {
        let cells = ((z1 - self.z0) / self.h() + 1e-9).floor() as usize;
        if cells < 4 {
            return None;
        }
        let cells = cells.min(self.n);
        Some(Self { z0: self.z0, z1: self.point(cells), n: cells })
    }
}

/// State vectors sampled on (a prefix of) a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub z: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[f64])> {
        Some((*self.z.last()?, self.y.last()?.as_slice()))
    }

    /// Samples of component `k`.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.y.iter().map(|v| v[k]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError<E> {
    #[error("right-hand side failed at z = {z}: {error}")]
    Rhs { z: f64, error: E, partial: Trajectory },
    #[error("solution left the finite range after z = {last_good_z}")]
    Singular { last_good_z: f64, partial: Trajectory },
}

impl<E> IntegrationError<E> {
    pub fn partial(&self) -> &Trajectory {
        match self {
            Self::Rhs { partial, .. } | Self::Singular { partial, .. } => partial,
        }
    }
}

/// Classical fourth-order Runge–Kutta over every cell of `grid`.
///
/// Any non-finite stage value, or a state exceeding `limit` in magnitude, stops
/// the integration; the error carries the finite prefix computed so far.
pub fn rk4_integrate_bounded<E, R>(
    mut rhs: R,
    y0: &[f64],
    grid: &Grid,
    limit: f64,
) -> Result<Trajectory, IntegrationError<E>>
where
    R: FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
{
    let mut traj = Trajectory { z: vec![grid.point(0)], y: vec![y0.to_vec()] };
    let h = grid.h();
    let ok = |v: &[f64]| v.iter().all(|x| x.is_finite() && x.abs() <= limit);
    if !ok(y0) {
        return Err(IntegrationError::Singular { last_good_z: grid.point(0), partial: Trajectory { z: vec![], y: vec![] } });
    }
    let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for i in 0..grid.intervals() {
        let z = grid.point(i);
        let y = traj.y.last().expect("trajectory starts non-empty").clone();
        let mut stage = |zs: f64, ys: &[f64], traj: &Trajectory| -> Result<Vec<f64>, IntegrationError<E>> {
            if !ok(ys) {
                return Err(IntegrationError::Singular { last_good_z: z, partial: traj.clone() });
            }
            let k = rhs(zs, ys).map_err(|error| IntegrationError::Rhs { z: zs, error, partial: traj.clone() })?;
            if !k.iter().all(|v| v.is_finite()) {
                return Err(IntegrationError::Singular { last_good_z: z, partial: traj.clone() });
            }
            Ok(k)
        };
        let k1 = stage(z, &y, &traj)?;
        let k2 = stage(z + 0.5 * h, &axpy(&y, &k1, 0.5 * h), &traj)?;
        let k3 = stage(z + 0.5 * h, &axpy(&y, &k2, 0.5 * h), &traj)?;
        let k4 = stage(z + h, &axpy(&y, &k3, h), &traj)?;
        let next: Vec<f64> = (0..y.len())
            .map(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
            .collect();
        if !ok(&next) {
            return Err(IntegrationError::Singular { last_good_z: z, partial: traj });
        }
        traj.z.push(grid.point(i + 1));
        traj.y.push(next);
    }
    Ok(traj)
}

/// [`rk4_integrate_bounded`] with no magnitude limit beyond finiteness.
pub fn rk4_integrate<E, R>(rhs: R, y0: &[f64], grid: &Grid) -> Result<Trajectory, IntegrationError<E>>
where
    R: FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
{
    rk4_integrate_bounded(rhs, y0, grid, f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Second,
    Fourth,
}

impl FdOrder {
    pub fn from_int(order: u32) -> Option<Self> {
        match order {
            2 => Some(Self::Second),
            4 => Some(Self::Fourth),
            _ => None,
        }
    }

    pub fn min_points(self) -> usize {
        match self {
            Self::Second => 3,
            Self::Fourth => 5,
        }
    }
}

fn check_samples(f: &[f64], needed: usize) -> Result<(), NumericsError> {
    if f.len() < needed {
        return Err(NumericsError::TooFewSamples { needed, got: f.len() });
    }
    match f.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(NumericsError::NonFiniteSample(i)),
        None => Ok(()),
    }
}

/// Derivative of uniformly spaced samples; central in the interior, one-sided
/// stencils of the same order at the ends.
pub fn fd_derivative(f: &[f64], h: f64, order: FdOrder) -> Result<Vec<f64>, NumericsError> {
    check_samples(f, order.min_points())?;
    let n = f.len();
    let mut d = vec![0.0; n];
    match order {
        FdOrder::Second => {
            for i in 1..n - 1 {
                d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
            }
            d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
            d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        }
        FdOrder::Fourth => {
            let c = 12.0 * h;
            for i in 2..n - 2 {
                d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / c;
            }
            let edge0 = |g: &dyn Fn(usize) -> f64| (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / c;
            let edge1 = |g: &dyn Fn(usize) -> f64| (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)) / c;
            let fwd = |k: usize| f[k];
            let bwd = |k: usize| f[n - 1 - k];
            d[0] = edge0(&fwd);
            d[1] = edge1(&fwd);
            d[n - 1] = -edge0(&bwd);
            d[n - 2] = -edge1(&bwd);
        }
    }
    Ok(d)
}

/// Cumulative integral samples `∫_{z0}^{z_i} f`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeIntegral {
    pub values: Vec<f64>,
    /// Set when the final cell of an odd-cell grid was closed with the trapezoid rule.
    pub trapezoid_tail: bool,
}

impl CumulativeIntegral {
    pub fn total(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }
}

/// Composite Simpson cumulative integral.
///
/// Even-indexed points use the standard composite rule; odd-indexed interior
/// points add the half-panel rule `h/12 (5f_{i−1} + 8f_i − f_{i+1})`.
pub fn quadrature(f: &[f64], h: f64) -> Result<CumulativeIntegral, NumericsError> {
    check_samples(f, 3)?;
    let n = f.len() - 1;
    let mut values = vec![0.0; n + 1];
    let mut trapezoid_tail = false;
    let mut i = 2;
    while i <= n {
        values[i] = values[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        i += 2;
    }
    let mut i = 1;
    while i <= n {
        values[i] = if i < n {
            values[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1])
        } else {
            trapezoid_tail = true;
            values[i - 1] + 0.5 * h * (f[i - 1] + f[i])
        };
        i += 2;
    }
    Ok(CumulativeIntegral { values, trapezoid_tail })
}

/// Cumulative integral of `f` at the points of `grid`, recomputed on grids
/// refined by powers of two until successive answers differ by less than `tol`.
pub fn refined_cumulative<F>(f: F, grid: &Grid, tol: f64, max_levels: u32) -> Result<Vec<f64>, NumericsError>
where
    F: Fn(f64) -> Result<f64, String>,
{
    let sample = |g: &Grid| -> Result<Vec<f64>, NumericsError> {
        g.points()
            .into_iter()
            .map(|z| f(z).map_err(|reason| NumericsError::Integrand { z, reason }))
            .collect()
    };
    let mut factor = if grid.intervals() % 2 == 0 { 1 } else { 2 };
    let at_grid = |g: &Grid, factor: usize| -> Result<Vec<f64>, NumericsError> {
        let q = quadrature(&sample(g)?, g.h())?;
        Ok(q.values.into_iter().step_by(factor).collect())
    };
    let mut prev = at_grid(&grid.refined(factor), factor)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_levels {
        factor *= 2;
        let next = at_grid(&grid.refined(factor), factor)?;
        change = prev.iter().zip(&next).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prev = next;
        if change < tol {
            return Ok(prev);
        }
    }
    Err(NumericsError::NotConverged { tol, levels: max_levels, change })
}

/// Definite integral by composite Simpson with interval doubling.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> Result<f64, String>,
{
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let grid = Grid::new(lo, hi, 8)?;
    let v = refined_cumulative(f, &grid, tol, 20)?;
    Ok(sign * v[v.len() - 1])
}

/// Location of the first zero crossing of sampled data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    /// Last index before the crossing.
    pub index: usize,
    /// Linear estimate of the crossing point.
    pub z_root: f64,
}

pub fn first_sign_change(z: &[f64], values: &[f64]) -> Option<SignChange> {
    if values.first() == Some(&0.0) {
        return Some(SignChange { index: 0, z_root: z[0] });
    }
    for i in 0..values.len().saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if b == 0.0 || a.signum() != b.signum() {
            let t = a / (a - b);
            return Some(SignChange { index: i, z_root: z[i] + t * (z[i + 1] - z[i]) });
        }
    }
    None
}

/// Tabulated function with 4-point Lagrange interpolation of value and slope.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    z: Vec<f64>,
    v: Vec<f64>,
}

impl Table {
    /// Requires at least four strictly increasing abscissae.
    pub fn new(z: Vec<f64>, v: Vec<f64>) -> Result<Self, NumericsError> {
        if z.len() != v.len() {
            return Err(NumericsError::BadGrid("column lengths differ".into()));
        }
        check_samples(&z, 4)?;
        check_samples(&v, 4)?;
        if z.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NumericsError::BadGrid("abscissae must increase strictly".into()));
        }
        Ok(Self { z, v })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.z[0], self.z[self.z.len() - 1])
    }

    /// Interpolated `(f, f')` at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64), NumericsError> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * (hi - lo).max(1.0);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(NumericsError::OutOfTable(x));
        }
        let k = self.z.partition_point(|zi| *zi <= x).saturating_sub(1);
        let start = k.saturating_sub(1).min(self.z.len() - 4);
        let zs = &self.z[start..start + 4];
        let vs = &self.v[start..start + 4];
        let mut val = 0.0;
        let mut der = 0.0;
        for j in 0..4 {
            let mut basis = 1.0;
            let mut dbasis = 0.0;
            for m in 0..4 {
                if m == j {
                    continue;
                }
                let denom = zs[j] - zs[m];
                let mut term = 1.0 / denom;
                for l in 0..4 {
                    if l != j && l != m {
                        term *= (x - zs[l]) / (zs[j] - zs[l]);
                    }
                }
                dbasis += term;
                basis *= (x - zs[m]) / denom;
            }
            val += vs[j] * basis;
            der += vs[j] * dbasis;
        }
        Ok((val, der))
    }
}

/// Observed order `log2(e_k / e_{k+1})` between successive halvings.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Richardson order estimate from three solutions on grids refined by two.
pub fn richardson_order(coarse: f64, mid: f64, fine: f64) -> f64 {
    ((coarse - mid) / (mid - fine)).abs().log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rules() {
        assert!(Grid::new(0.0, 1.0, 3).is_err());
        assert!(Grid::new(1.0, 0.0, 10).is_err());
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.point(10), 1.0);
        assert_eq!(g.truncated(0.55).unwrap().intervals(), 5);
    }

    #[test]
    fn rk4_constant_and_exponential() {
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        let t = rk4_integrate::<(), _>(|_, _| Ok(vec![0.0, 0.0]), &[1.0, 2.0], &g).unwrap();
        assert!(t.y.iter().all(|y| y == &vec![1.0, 2.0]));
        let g = Grid::new(0.0, 1.0, 1000).unwrap();
        let t = rk4_integrate::<(), _>(|_, y| Ok(vec![y[0]]), &[1.0], &g).unwrap();
        assert!((t.y[1000][0] - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn rk4_reports_pole() {
        // y' = y², y(0) = 1 blows up at z = 1.
        let g = Grid::new(0.0, 2.0, 200).unwrap();
        let err = rk4_integrate_bounded::<(), _>(|_, y| Ok(vec![y[0] * y[0]]), &[1.0], &g, 1e8).unwrap_err();
        match err {
            IntegrationError::Singular { last_good_z, partial } => {
                assert!(last_good_z < 1.1 && last_good_z > 0.9, "{last_good_z}");
                assert!(partial.y.iter().flatten().all(|v| v.is_finite()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fd_examples() {
        let h = 0.1;
        assert!(fd_derivative(&[1.0; 8], h, FdOrder::Fourth).unwrap().iter().all(|d| *d == 0.0));
        let lin: Vec<f64> = (0..8).map(|i| 3.0 * i as f64 * h + 1.0).collect();
        for order in [FdOrder::Second, FdOrder::Fourth] {
            assert!(fd_derivative(&lin, h, order).unwrap().iter().all(|d| (d - 3.0).abs() < 1e-12));
        }
        let h = 1e-2;
        let s: Vec<f64> = (0..=200).map(|i| (i as f64 * h).sin()).collect();
        let d = fd_derivative(&s, h, FdOrder::Fourth).unwrap();
        for i in 2..199 {
            assert!((d[i] - (i as f64 * h).cos()).abs() < 1e-8);
        }
        assert!(matches!(fd_derivative(&[1.0; 4], h, FdOrder::Fourth), Err(NumericsError::TooFewSamples { .. })));
    }

    #[test]
    fn quadrature_examples() {
        let g = Grid::new(0.0, 1.0, 100).unwrap();
        let q = quadrature(&vec![0.0; 101], g.h()).unwrap();
        assert!(q.values.iter().all(|v| *v == 0.0));
        let f: Vec<f64> = g.points().iter().map(|z| 2.0 * z).collect();
        assert!((quadrature(&f, g.h()).unwrap().total() - 1.0).abs() < 1e-12);
        let f: Vec<f64> = g.points().iter().map(|z| z.exp()).collect();
        let q = quadrature(&f, g.h()).unwrap();
        assert!(!q.trapezoid_tail);
        assert!((q.total() - (std::f64::consts::E - 1.0)).abs() < 1e-9);
        let odd = Grid::new(0.0, 1.0, 5).unwrap();
        let f: Vec<f64> = odd.points().iter().map(|z| 2.0 * z).collect();
        assert!(quadrature(&f, odd.h()).unwrap().trapezoid_tail);
    }

    #[test]
    fn refined_quadrature_converges() {
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        let v = refined_cumulative(|z| Ok(z.cos()), &g, 1e-12, 12).unwrap();
        for (z, val) in g.points().iter().zip(&v) {
            assert!((val - z.sin()).abs() < 1e-11);
        }
        assert!((integrate(|z| Ok(z.exp()), 1.0, 0.0, 1e-12).unwrap() + std::f64::consts::E - 1.0).abs() < 1e-11);
    }

    #[test]
    fn sign_change_and_table() {
        let z = [0.0, 1.0, 2.0, 3.0];
        let s = first_sign_change(&z, &[1.0, 0.5, -0.5, -1.0]).unwrap();
        assert_eq!(s.index, 1);
        assert!((s.z_root - 1.5).abs() < 1e-15);
        assert!(first_sign_change(&z, &[1.0, 2.0, 3.0, 4.0]).is_none());

        let zs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let vs: Vec<f64> = zs.iter().map(|z| z * z * z - z).collect();
        let t = Table::new(zs, vs).unwrap();
        let (v, d) = t.eval(0.73).unwrap();
        assert!((v - (0.73f64.powi(3) - 0.73)).abs() < 1e-13);
        assert!((d - (3.0 * 0.73f64.powi(2) - 1.0)).abs() < 1e-12);
        assert!(t.eval(2.5).is_err());
    }
}
