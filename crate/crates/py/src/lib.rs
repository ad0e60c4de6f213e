//! Python bindings: meshing, spectra, experiment runs and the disk constants.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dn_spectra::config::{disk_bubble, parse_config, parse_domain_spec, sine_product};
use dn_spectra::eigen::{self, solve_lowest};
use dn_spectra::fem::{assemble, restrict_dirichlet};
use dn_spectra::verify;
use dn_spectra::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::Config { .. } | Error::Hypothesis(_) => PyValueError::new_err(e.to_string()),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_json(v: &impl serde::Serialize) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// A triangulation (or interval partition).
#[pyclass(frozen)]
struct Mesh {
    inner: Arc<dn_spectra::Mesh>,
}

#[pymethods]
impl Mesh {
    /// Meshes a domain written as `rect{x0=0, x1=1, y0=0, y1=1}`,
    /// `disk{cx=0, cy=0, r=1}`, `interval{a=0, b=1}` or
    /// `polygon{vertices=0 0; 1 0; 0 1}`.
    #[new]
    fn new(domain: &str, h: f64) -> PyResult<Self> {
        let spec = parse_domain_spec(domain).map_err(py_err)?;
        Ok(Mesh { inner: Arc::new(spec.mesh(h).map_err(py_err)?) })
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.n_nodes()
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.inner.n_cells()
    }

    #[getter]
    fn mesh_size(&self) -> f64 {
        self.inner.mesh_size()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn nodes(&self) -> Vec<(f64, f64)> {
        self.inner.nodes().iter().map(|p| (p[0], p[1])).collect()
    }

    fn to_text(&self) -> String {
        dn_spectra::geometry::write_mesh(&self.inner)
    }

    fn __repr__(&self) -> String {
        self.inner.describe()
    }
}

/// Eigenvalues with residuals and nodal eigenvectors.
#[pyclass(frozen)]
struct Spectrum {
    inner: eigen::Spectrum,
}

#[pymethods]
impl Spectrum {
    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues.clone()
    }

    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.inner.residuals.clone()
    }

    #[getter]
    fn cluster_ids(&self) -> Vec<usize> {
        self.inner.cluster_ids.clone()
    }

    #[getter]
    fn bc(&self) -> String {
        self.inner.bc.to_string()
    }

    #[getter]
    fn mesh_size(&self) -> f64 {
        self.inner.mesh_size
    }

    #[getter]
    fn method(&self) -> String {
        self.inner.method.clone()
    }

    /// Eigenvector `k` (0-based) at the mesh nodes, zero on a Dirichlet boundary.
    fn eigenvector(&self, k: usize) -> PyResult<Vec<f64>> {
        if k >= self.inner.len() {
            return Err(PyValueError::new_err(format!("only {} eigenpairs computed", self.inner.len())));
        }
        Ok(self.inner.nodal(k))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Solves `count` eigenpairs for the domain and coefficients of a
/// configuration text on its coarsest mesh (or at mesh size `h`).
#[pyfunction]
#[pyo3(signature = (config, bc = "dirichlet", count = 6, h = None))]
fn solve(py: Python<'_>, config: &str, bc: &str, count: usize, h: Option<f64>) -> PyResult<Spectrum> {
    let cfg = parse_config(config).map_err(py_err)?;
    let dirichlet = match bc {
        "dirichlet" => true,
        "neumann" => false,
        o => return Err(PyValueError::new_err(format!("bc must be dirichlet or neumann, got {o}"))),
    };
    py.detach(|| {
        let mesh = Arc::new(cfg.domain_spec()?.mesh(h.unwrap_or(cfg.h))?);
        let coeffs = cfg.coefficients(&mesh)?;
        let mut pair = assemble(&mesh, &coeffs, cfg.quadrature)?;
        if dirichlet {
            pair = restrict_dirichlet(&pair)?;
        }
        solve_lowest(&pair, count.min(pair.dim()))
    })
    .map(|inner| Spectrum { inner })
    .map_err(py_err)
}

/// Runs an experiment configuration and returns the JSON report.
#[pyfunction]
fn run_config(py: Python<'_>, config: &str) -> PyResult<String> {
    let cfg = parse_config(config).map_err(py_err)?;
    let report = py.detach(|| verify::run_config(&cfg)).map_err(py_err)?;
    to_json(&report)
}

/// The integration-by-parts identity under refinement as JSON; `phi` is
/// `sine_product` (rectangles) or `bubble` (disks).
#[pyfunction]
#[pyo3(signature = (domain, phi, b = (1.0, 0.0), h = 0.0625, levels = 3))]
fn ibp(py: Python<'_>, domain: &str, phi: &str, b: (f64, f64), h: f64, levels: usize) -> PyResult<String> {
    let spec = parse_domain_spec(domain).map_err(py_err)?;
    let field = match phi {
        "sine_product" => sine_product(&spec),
        "bubble" => disk_bubble(&spec),
        o => return Err(PyValueError::new_err(format!("unknown phi {o}"))),
    }
    .map_err(py_err)?;
    let c = py.detach(|| verify::ibp_convergence(&spec, &field, [b.0, b.1], h, levels)).map_err(py_err)?;
    to_json(&c)
}

/// First positive zero of `J_0`.
#[pyfunction]
fn first_zero_j0() -> f64 {
    verify::first_zero_j0().value
}

/// First positive zero of `J_1'`.
#[pyfunction]
fn first_zero_j1_prime() -> f64 {
    verify::first_zero_j1_prime().value
}

#[pymodule]
fn dnspectra(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Mesh>()?;
    m.add_class::<Spectrum>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(ibp, m)?)?;
    m.add_function(wrap_pyfunction!(first_zero_j0, m)?)?;
    m.add_function(wrap_pyfunction!(first_zero_j1_prime, m)?)?;
    Ok(())
}
