//! Python bindings: field sets and jets, residual evaluation, NP curvature
//! spinors, elastic invariants and the conformally flat case families.

use std::collections::BTreeMap;
use std::str::FromStr;

use f13_core::conformal::{
    bianchi_reduced_residuals, bianchi_special_residuals, case_a1_closure, case_a1_first_integral, case_a1_rhs,
    case_a2_rhs, futurework_residuals, ricci_einstein_residuals, Branch, BranchFamily, ClipReport, ClosedFormA1,
    ConstantScale, ExpProfile, FnScale, NamedResiduals,
};
use f13_core::elastic::invariants;
use f13_core::frame::evaluate;
use f13_core::np::{diagonalizing_rotation, null_rotate_ricci, rotation_admissible, weyl_spinor};
use f13_core::numerics::Grid;
use f13_core::state::{Field, StateJet};
use f13_core::tensor::SymThree;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(name: &str) -> PyResult<Field> {
    Field::from_str(name).map_err(value_error)
}

/// Every 1+3 variable at one point, addressed by names such as `mu`, `sigma11` or `Omega3`.
#[pyclass(name = "FieldSet", skip_from_py_object)]
#[derive(Clone, Default)]
struct PyFieldSet(f13_core::state::FieldSet);

#[pymethods]
impl PyFieldSet {
    #[new]
    #[pyo3(signature = (**values))]
    fn new(values: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut set = Self::default();
        if let Some(values) = values {
            for (k, v) in values.iter() {
                set.set(&k.extract::<String>()?, v.extract()?)?;
            }
        }
        Ok(set)
    }

    fn get(&self, name: &str) -> PyResult<f64> {
        Ok(self.0.get(field(name)?))
    }

    fn set(&mut self, name: &str, value: f64) -> PyResult<()> {
        self.0.set(field(name)?, value).map_err(value_error)
    }

    fn __getitem__(&self, name: &str) -> PyResult<f64> {
        self.get(name)
    }

    fn __setitem__(&mut self, name: &str, value: f64) -> PyResult<()> {
        self.set(name, value)
    }

    /// Nonzero independent components.
    fn to_dict(&self) -> BTreeMap<String, f64> {
        Field::independent()
            .into_iter()
            .filter_map(|f| {
                let v = self.0.get(f);
                (v != 0.0).then(|| (f.name(), v))
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        let body: Vec<String> = self.to_dict().iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("FieldSet({})", body.join(", "))
    }
}

/// Field values with their frame derivatives `e_0 … e_3` at one point.
#[pyclass(name = "StateJet")]
struct PyStateJet(StateJet);

fn named(r: NamedResiduals) -> BTreeMap<String, f64> {
    r.iter().map(|e| (e.name.to_string(), e.value)).collect()
}

#[pymethods]
impl PyStateJet {
    /// `derivatives` lists the four frame derivatives; `None` marks one as unavailable.
    #[new]
    #[pyo3(signature = (point, value, derivatives))]
    fn new(point: f64, value: PyRef<'_, PyFieldSet>, derivatives: Vec<Option<PyRef<'_, PyFieldSet>>>) -> PyResult<Self> {
        if derivatives.len() != 4 {
            return Err(PyValueError::new_err(format!("expected 4 derivatives, got {}", derivatives.len())));
        }
        let mut jet = StateJet::new(point, value.0).map_err(value_error)?;
        for (a, d) in derivatives.iter().enumerate() {
            if let Some(d) = d {
                jet = jet.with_derivative(a, d.0).map_err(value_error)?;
            }
        }
        Ok(Self(jet))
    }

    #[getter]
    fn point(&self) -> f64 {
        self.0.point
    }

    #[getter]
    fn value(&self) -> PyFieldSet {
        PyFieldSet(self.0.value)
    }

    /// Maximum absolute residual of every block of the general frame equations.
    fn residuals(&self) -> PyResult<BTreeMap<String, f64>> {
        let report = evaluate(&self.0).map_err(value_error)?;
        Ok(report.blocks().into_iter().map(|b| (b.name.to_string(), b.max_abs)).collect())
    }

    fn max_residual(&self) -> PyResult<f64> {
        Ok(evaluate(&self.0).map_err(value_error)?.max_abs())
    }

    /// Named residuals of one reduced system: `special`, `reduced`, `ricci-einstein` or `futurework`.
    fn system_residuals(&self, system: &str) -> PyResult<BTreeMap<String, f64>> {
        let r = match system {
            "special" => bianchi_special_residuals(&self.0),
            "reduced" => bianchi_reduced_residuals(&self.0),
            "ricci-einstein" => ricci_einstein_residuals(&self.0),
            "futurework" => futurework_residuals(&self.0),
            other => return Err(PyValueError::new_err(format!("unknown system `{other}`"))),
        };
        Ok(named(r.map_err(value_error)?))
    }
}

/// Newman–Penrose Ricci components of a matter state.
#[pyclass(name = "RicciSpinor", skip_from_py_object)]
#[derive(Clone)]
struct PyRicciSpinor(f13_core::np::RicciSpinor);

#[pymethods]
impl PyRicciSpinor {
    #[getter]
    fn phi00(&self) -> f64 {
        self.0.phi00
    }

    #[getter]
    fn phi11(&self) -> f64 {
        self.0.phi11
    }

    #[getter]
    fn phi22(&self) -> f64 {
        self.0.phi22
    }

    #[getter]
    fn phi01(&self) -> Complex64 {
        self.0.phi01
    }

    #[getter]
    fn phi02(&self) -> Complex64 {
        self.0.phi02
    }

    #[getter]
    fn phi12(&self) -> Complex64 {
        self.0.phi12
    }

    #[getter]
    fn lambda_np(&self) -> f64 {
        self.0.lambda_np
    }

    /// Components after the null rotation fixing `l` with parameter `alpha`.
    fn null_rotate(&self, alpha: Complex64) -> Self {
        Self(null_rotate_ricci(&self.0, alpha))
    }

    /// The `alpha` whose null rotation sets `Phi01` to zero.
    fn diagonalizing_rotation(&self) -> PyResult<Complex64> {
        diagonalizing_rotation(&self.0).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        let r = &self.0;
        format!(
            "RicciSpinor(phi00={}, phi01={}, phi02={}, phi11={}, phi12={}, phi22={}, lambda_np={})",
            r.phi00, r.phi01, r.phi02, r.phi11, r.phi12, r.phi22, r.lambda_np
        )
    }
}

#[pyfunction]
fn ricci_spinor(state: PyRef<'_, PyFieldSet>) -> PyRicciSpinor {
    PyRicciSpinor(f13_core::np::ricci_spinor(&state.0.matter))
}

/// `[Psi0, …, Psi4]` from the electric and magnetic Weyl parts.
#[pyfunction]
fn weyl_spinor_components(state: PyRef<'_, PyFieldSet>) -> Vec<Complex64> {
    weyl_spinor(&state.0.weyl).psi.to_vec()
}

#[pyfunction]
#[pyo3(signature = (state, tol = 1e-14))]
fn is_conformally_flat(state: PyRef<'_, PyFieldSet>, tol: f64) -> bool {
    weyl_spinor(&state.0.weyl).is_conformally_flat(tol)
}

/// Whether the Ricci components admit the diagonalizing null rotation.
#[pyfunction]
fn is_rotation_admissible(state: PyRef<'_, PyFieldSet>) -> bool {
    rotation_admissible(&state.0.matter)
}

/// Trace invariants, particle density and linear densities of a positive-definite spatial block.
#[pyfunction]
fn elastic_invariants(k: [[f64; 3]; 3]) -> PyResult<BTreeMap<&'static str, f64>> {
    let inv = invariants(&SymThree::from_matrix(&k).map_err(value_error)?).map_err(value_error)?;
    Ok(BTreeMap::from([
        ("I1", inv.i1),
        ("I2", inv.i2),
        ("I3", inv.i3),
        ("n", inv.n),
        ("n_from_traces_sq", inv.density_sq_from_traces()),
        ("n1", inv.linear[0]),
        ("n2", inv.linear[1]),
        ("n3", inv.linear[2]),
    ]))
}

/// `(pi11, p, udot3)` of case A1.
#[pyfunction]
fn a1_closure(sigma11: f64, a3: f64) -> (f64, f64, f64) {
    let c = case_a1_closure(sigma11, a3);
    (c.pi11, c.p, c.udot3)
}

#[pyfunction]
fn a1_first_integral(sigma11: f64, a3: f64) -> PyResult<f64> {
    case_a1_first_integral(sigma11, a3).map_err(value_error)
}

/// `d/dz (sigma11, a3, Omega3)` for frame scale `f` with slope `df` at `z`.
#[pyfunction]
#[pyo3(signature = (z, y, f = 1.0, df = 0.0))]
fn a1_rhs(z: f64, y: [f64; 3], f: f64, df: f64) -> PyResult<[f64; 3]> {
    case_a1_rhs(z, &y, &FnScale::new(move |_| (f, df))).map_err(value_error)
}

/// `d/dz (p, udot3, a3, Omega3)` for case A2.
#[pyfunction]
#[pyo3(signature = (z, y, f = 1.0, df = 0.0))]
fn a2_rhs(z: f64, y: [f64; 4], f: f64, df: f64) -> PyResult<[f64; 4]> {
    Ok(case_a2_rhs(z, &y, &FnScale::new(move |_| (f, df))).map_err(value_error)?.dy)
}

fn clip_dict<'py>(py: Python<'py>, clip: Option<ClipReport>) -> PyResult<Option<Bound<'py, PyDict>>> {
    clip.map(|c| {
        let d = PyDict::new(py);
        d.set_item("kind", c.kind.to_string())?;
        d.set_item("z_singular", c.z_singular)?;
        d.set_item("z_clip", c.z_clip)?;
        Ok(d)
    })
    .transpose()
}

/// Largest residual of a jet over the frame equations and the three reduced systems.
fn worst(jet: &StateJet) -> PyResult<f64> {
    Ok([
        evaluate(jet).map_err(value_error)?.max_abs(),
        bianchi_special_residuals(jet).map_err(value_error)?.max_abs(),
        bianchi_reduced_residuals(jet).map_err(value_error)?.max_abs(),
        ricci_einstein_residuals(jet).map_err(value_error)?.max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Case A1 closed form with `sigma11 = amplitude·exp(rate·z)` sampled on `n` intervals of `[z0, z1]`.
///
/// Returns the columns `z, sigma11, a3, Omega3, F`, the clip report, the
/// orientation flag and the largest residual over every system.
#[pyfunction]
#[pyo3(signature = (a, sign, b, z0, z1, n, amplitude = 1.0, rate = 1.0))]
#[allow(clippy::too_many_arguments)]
fn closed_form_a1<'py>(
    py: Python<'py>,
    a: f64,
    sign: f64,
    b: f64,
    z0: f64,
    z1: f64,
    n: usize,
    amplitude: f64,
    rate: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = ClosedFormA1::new(ExpProfile { amplitude, rate }, a, sign, b, z0).map_err(value_error)?;
    let samples = fam.sample(&Grid::new(z0, z1, n).map_err(value_error)?).map_err(value_error)?;
    let mut max = 0.0f64;
    for row in &samples.rows {
        max = max.max(worst(&row.jet().map_err(value_error)?)?);
    }
    let rows = &samples.rows;
    let d = PyDict::new(py);
    d.set_item("z", rows.iter().map(|r| r.z).collect::<Vec<_>>())?;
    d.set_item("sigma11", rows.iter().map(|r| r.values.sigma11).collect::<Vec<_>>())?;
    d.set_item("a3", rows.iter().map(|r| r.values.a3).collect::<Vec<_>>())?;
    d.set_item("Omega3", rows.iter().map(|r| r.values.omega3).collect::<Vec<_>>())?;
    d.set_item("F", rows.iter().map(|r| r.f).collect::<Vec<_>>())?;
    d.set_item("clip", clip_dict(py, samples.clip)?)?;
    d.set_item("orientation_flagged", samples.orientation_flagged)?;
    d.set_item("max_residual", max)?;
    Ok(d)
}

/// Shearless branch family (`opposite`: `udot3 = -a3`, `half`: `udot3 = a3/2`) at constant frame scale `f`.
#[pyfunction]
#[pyo3(signature = (branch, constant, b, z0, z1, n, f = 1.0))]
#[allow(clippy::too_many_arguments)]
fn branch_family<'py>(
    py: Python<'py>,
    branch: &str,
    constant: f64,
    b: f64,
    z0: f64,
    z1: f64,
    n: usize,
    f: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let branch = match branch {
        "opposite" => Branch::Opposite,
        "half" => Branch::Half,
        other => return Err(PyValueError::new_err(format!("unknown branch `{other}`"))),
    };
    let grid = Grid::new(z0, z1, n).map_err(value_error)?;
    let samples = BranchFamily { branch, constant, b }.sample(&ConstantScale(f), &grid).map_err(value_error)?;
    let mut max = 0.0f64;
    for row in &samples.rows {
        max = max.max(worst(&row.jet().map_err(value_error)?)?);
    }
    let rows = &samples.rows;
    let d = PyDict::new(py);
    d.set_item("z", rows.iter().map(|r| r.z).collect::<Vec<_>>())?;
    d.set_item("p", rows.iter().map(|r| r.values.p).collect::<Vec<_>>())?;
    d.set_item("udot3", rows.iter().map(|r| r.values.udot3).collect::<Vec<_>>())?;
    d.set_item("a3", rows.iter().map(|r| r.values.a3).collect::<Vec<_>>())?;
    d.set_item("Omega3", rows.iter().map(|r| r.values.omega3).collect::<Vec<_>>())?;
    d.set_item("pi11", rows.iter().map(|r| r.pi11()).collect::<Vec<_>>())?;
    d.set_item("clip", clip_dict(py, samples.clip)?)?;
    d.set_item("max_residual", max)?;
    Ok(d)
}

#[pymodule]
fn f13(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFieldSet>()?;
    m.add_class::<PyStateJet>()?;
    m.add_class::<PyRicciSpinor>()?;
    m.add_function(wrap_pyfunction!(ricci_spinor, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_spinor_components, m)?)?;
    m.add_function(wrap_pyfunction!(is_conformally_flat, m)?)?;
    m.add_function(wrap_pyfunction!(is_rotation_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(elastic_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(a1_closure, m)?)?;
    m.add_function(wrap_pyfunction!(a1_first_integral, m)?)?;
    m.add_function(wrap_pyfunction!(a1_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(a2_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_a1, m)?)?;
    m.add_function(wrap_pyfunction!(branch_family, m)?)?;
    Ok(())
}
