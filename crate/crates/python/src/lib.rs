//! Python bindings. Matrices cross the boundary as nested lists of numbers
//! (real or complex), reports and records as JSON text.

use mh_core::harness::{run_campaign as core_run_campaign, CampaignConfig};
use mh_core::nclp::{self, OptConfig};
use mh_core::{holder_verify, ComplexMatrix, Error};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    ComplexMatrix::from_row_major(dim, &flat).map_err(py_err)
}

fn to_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let d = m.dim();
    m.row_major().chunks(d).map(|r| r.to_vec()).collect()
}

fn to_matrices(list: Vec<Vec<Vec<Complex64>>>) -> PyResult<Vec<ComplexMatrix>> {
    list.into_iter().map(to_matrix).collect()
}

fn to_tuple(z: Vec<Complex64>) -> PyResult<holder_verify::InsertionTuple> {
    holder_verify::InsertionTuple::new(z).map_err(py_err)
}

/// Outcome of one check.
#[pyclass(frozen, module = "modular_holder")]
struct VerificationRecord(mh_core::VerificationRecord);

#[pymethods]
impl VerificationRecord {
    #[getter]
    fn check(&self) -> String {
        self.0.check.clone()
    }

    #[getter]
    fn lhs(&self) -> Complex64 {
        self.0.lhs
    }

    #[getter]
    fn rhs(&self) -> f64 {
        self.0.rhs
    }

    #[getter]
    fn margin(&self) -> f64 {
        self.0.margin
    }

    #[getter]
    fn rel_margin(&self) -> f64 {
        self.0.rel_margin
    }

    #[getter]
    fn passed(&self) -> bool {
        self.0.pass
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("records serialize")
    }

    fn __repr__(&self) -> String {
        format!(
            "VerificationRecord(check={:?}, pass={}, rel_margin={:.3e})",
            self.0.check, self.0.pass, self.0.rel_margin
        )
    }
}

/// Thermal state `ρ = e^{−βH}/Z` in its standard form.
#[pyclass(frozen, module = "modular_holder")]
struct GibbsEnsemble(mh_core::GibbsEnsemble);

#[pymethods]
impl GibbsEnsemble {
    #[new]
    fn new(hamiltonian: Vec<Vec<Complex64>>, beta: f64) -> PyResult<Self> {
        let h = to_matrix(hamiltonian)?;
        mh_core::GibbsEnsemble::new(h, beta).map(Self).map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    fn rho(&self) -> Vec<Vec<Complex64>> {
        to_rows(self.0.rho())
    }

    fn expectation(&self, a: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
        let a = to_matrix(a)?;
        a.check_dim(self.0.dim()).map_err(py_err)?;
        Ok(self.0.expectation(&a))
    }

    fn kms_norm(&self, a: Vec<Vec<Complex64>>, p: u32) -> PyResult<f64> {
        nclp::kms_norm(&self.0, &to_matrix(a)?, p).map_err(py_err)
    }

    fn kms_norm_analytic(&self, a: Vec<Vec<Complex64>>, p: u32) -> PyResult<f64> {
        nclp::kms_norm_analytic(&self.0, &to_matrix(a)?, p).map_err(py_err)
    }

    /// `‖ζ‖_p` estimate for the cone vector `Δ^{1/2p} A Ω`.
    #[pyo3(signature = (a, p, restarts = 64, seed = 0))]
    fn am_norm(&self, a: Vec<Vec<Complex64>>, p: f64, restarts: usize, seed: u64) -> PyResult<f64> {
        let zeta = nclp::cone_vector(&self.0, &to_matrix(a)?, p).map_err(py_err)?;
        let cfg = OptConfig { restarts, seed, ..OptConfig::default() };
        nclp::am_norm(&self.0, &zeta, p, &cfg).map(|e| e.value).map_err(py_err)
    }

    fn multi_correlation(&self, a_list: Vec<Vec<Vec<Complex64>>>, z: Vec<Complex64>) -> PyResult<Complex64> {
        holder_verify::multi_correlation(&self.0, &to_matrices(a_list)?, &to_tuple(z)?).map_err(py_err)
    }

    fn holder_check(&self, a_list: Vec<Vec<Vec<Complex64>>>, z: Vec<Complex64>) -> PyResult<VerificationRecord> {
        holder_verify::holder_check(&self.0, &to_matrices(a_list)?, &to_tuple(z)?)
            .map(VerificationRecord)
            .map_err(py_err)
    }

    fn kms_boundary_check(
        &self,
        a: Vec<Vec<Complex64>>,
        b: Vec<Vec<Complex64>>,
        t: f64,
    ) -> PyResult<VerificationRecord> {
        self.0.kms_boundary_check(&to_matrix(a)?, &to_matrix(b)?, t).map(VerificationRecord).map_err(py_err)
    }

    fn tomita_check(&self, samples: Vec<Vec<Vec<Complex64>>>) -> PyResult<VerificationRecord> {
        self.0.tomita_check(&to_matrices(samples)?).map(VerificationRecord).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("GibbsEnsemble(dim={}, beta={})", self.0.dim(), self.0.beta())
    }
}

/// Even exponents `(p_0, …, p_n)` assigned to an insertion tuple.
#[pyfunction]
fn exponent_rule(z: Vec<Complex64>) -> PyResult<Vec<u32>> {
    holder_verify::exponent_rule(&to_tuple(z)?).map_err(py_err)
}

/// Runs a campaign from a JSON configuration and returns the JSON report.
#[pyfunction]
fn run_campaign(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg: CampaignConfig = serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let report = py.detach(|| core_run_campaign(&cfg)).map_err(py_err)?;
    Ok(report.to_json())
}

#[pymodule]
fn modular_holder(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GibbsEnsemble>()?;
    m.add_class::<VerificationRecord>()?;
    m.add_function(wrap_pyfunction!(exponent_rule, m)?)?;
    m.add_function(wrap_pyfunction!(run_campaign, m)?)?;
    m.add("SCHEMA_VERSION", mh_core::harness::SCHEMA_VERSION)?;
    Ok(())
}
