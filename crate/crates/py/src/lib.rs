//! Python bindings for `obsnet`.

use obsnet::analysis::RobustCheck;
use obsnet::io;
use obsnet::realization::{instantiate_deterministic, DEFAULT_RETRIES};
use obsnet::robustness::failure_curve;
use obsnet::{CostModel, CurveConfig, Error, Recovery, Robustness};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(pyobsnet, ObsnetError, PyException, "Base class for obsnet errors.");
create_exception!(pyobsnet, InfeasibleError, ObsnetError, "The requested robustness cannot be met.");
create_exception!(pyobsnet, FormatError, ObsnetError, "Malformed input document or dimensions.");
create_exception!(pyobsnet, InconsistentTraceError, ObsnetError, "No initial state reproduces the trace.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Infeasible { .. }
        | Error::UnreachableBackbone(_)
        | Error::RedrawBudget { .. }
        | Error::NotStructurallyObservable
        | Error::NotBranching(_)
        | Error::FieldTooSmall { .. } => InfeasibleError::new_err(msg),
        Error::InconsistentTrace => InconsistentTraceError::new_err(msg),
        Error::Format(_) | Error::Json(_) | Error::DimensionMismatch(_) | Error::InvalidStructure(_) => {
            FormatError::new_err(msg)
        }
        _ => ObsnetError::new_err(msg),
    }
}

fn cost_model(name: &str) -> PyResult<CostModel> {
    CostModel::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown cost model `{name}`")))
}

/// Sensor, backbone and fusion nodes with weighted directed links.
#[pyclass(name = "PhysicalGraph", module = "pyobsnet", frozen)]
struct PyPhysicalGraph(obsnet::PhysicalGraph);

#[pymethods]
impl PyPhysicalGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::parse_physical_graph(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::to_pretty(&io::graph_to_json(&self.0))
    }

    fn to_dot(&self) -> String {
        io::graph_to_dot(&self.0)
    }

    #[getter]
    fn sensors(&self) -> Vec<String> {
        self.0.sensor_names().to_vec()
    }

    #[getter]
    fn backbone(&self) -> Vec<String> {
        self.0.backbone_names().to_vec()
    }

    #[getter]
    fn fusion(&self) -> String {
        self.0.fusion_name().to_string()
    }

    /// Edges as `(from, to, cost)` tuples in id order.
    #[getter]
    fn edges(&self) -> Vec<(String, String, f64)> {
        let g = &self.0;
        g.edges().iter().map(|e| (g.name(e.tail).to_string(), g.name(e.head).to_string(), e.cost.as_f64())).collect()
    }

    /// Largest admissible k, or `None` when no k is.
    fn max_robustness(&self) -> Option<usize> {
        match obsnet::max_robustness(&self.0) {
            Robustness::Max(k) => Some(k),
            Robustness::Infeasible => None,
        }
    }

    fn design(&self, k: usize) -> PyResult<PyDesign> {
        obsnet::design(&self.0, k).map(PyDesign).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "PhysicalGraph(sensors={}, backbone={}, edges={})",
            self.0.n_sensors(),
            self.0.n_backbone(),
            self.0.edges().len()
        )
    }
}

/// A designed structural pair with both cost readings.
#[pyclass(name = "Design", module = "pyobsnet", frozen)]
struct PyDesign(obsnet::DesignSolution);

#[pymethods]
impl PyDesign {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::parse_design(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::to_pretty(&io::design_to_json(&self.0))
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k
    }

    #[getter]
    fn sensors(&self) -> Vec<String> {
        self.0.sensors.clone()
    }

    #[getter]
    fn cost_per_output_sum(&self) -> f64 {
        self.0.cost_per_output_sum.as_f64()
    }

    #[getter]
    fn cost_deduplicated(&self) -> f64 {
        self.0.cost_deduplicated.as_f64()
    }

    #[getter]
    fn a_pattern(&self) -> Vec<Vec<u8>> {
        self.0.structure.a().to_rows()
    }

    #[getter]
    fn c_pattern(&self) -> Vec<Vec<u8>> {
        self.0.structure.c().to_rows()
    }

    /// Physical edge ids the design uses.
    #[getter]
    fn used_edges(&self) -> Vec<usize> {
        self.0.used_edge_ids()
    }

    fn is_structurally_observable(&self) -> bool {
        obsnet::is_structurally_observable(&self.0.structure)
    }

    /// `None` when robust to every failure of at most `k` sensors,
    /// otherwise the names in the smallest failing set.
    fn verify(&self, k: usize) -> PyResult<Option<Vec<String>>> {
        match obsnet::robust_structural_observability(&self.0.structure, k).map_err(to_py)? {
            RobustCheck::Robust => Ok(None),
            RobustCheck::Counterexample(u) => Ok(Some(u.states.iter().map(|&i| self.0.sensors[i].clone()).collect())),
        }
    }

    /// Cactus certificate as a JSON document.
    fn certificate(&self) -> String {
        let cert = obsnet::extract_cactus_certificate(&self.0.structure);
        io::to_pretty(&io::certificate_to_json(&self.0.sensors, &cert))
    }

    fn network_fails(&self, failed: Vec<usize>) -> PyResult<bool> {
        if let Some(&bad) = failed.iter().find(|&&i| i >= self.0.sensors.len()) {
            return Err(PyValueError::new_err(format!("sensor index {bad} out of range")));
        }
        Ok(obsnet::network_fails(&self.0, &failed))
    }

    #[pyo3(signature = (prime = obsnet::DEFAULT_PRIME, seed = 0, retries = DEFAULT_RETRIES))]
    fn instantiate(&self, prime: u64, seed: u64, retries: usize) -> PyResult<PySystem> {
        let field = obsnet::PrimeField::new(prime).map_err(to_py)?;
        obsnet::instantiate_random(&self.0.structure, field, seed, retries).map(|i| PySystem(i.system)).map_err(to_py)
    }

    fn instantiate_deterministic(&self, prime: u64) -> PyResult<PySystem> {
        let field = obsnet::PrimeField::new(prime).map_err(to_py)?;
        instantiate_deterministic(&self.0.structure, field).map(PySystem).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Design(k={}, states={}, cost_per_output_sum={}, cost_deduplicated={})",
            self.0.k,
            self.0.sensors.len(),
            self.0.cost_per_output_sum.to_decimal(),
            self.0.cost_deduplicated.to_decimal()
        )
    }
}

/// Numeric dynamics `x(n+1) = A x(n)`, `y(n) = C x(n)` over GF(p).
#[pyclass(name = "System", module = "pyobsnet", frozen)]
struct PySystem(obsnet::FieldSystem);

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::parse_system(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::to_pretty(&io::system_to_json(&self.0))
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.field().p()
    }

    #[getter]
    fn a(&self) -> Vec<Vec<u64>> {
        self.0.a().to_rows()
    }

    #[getter]
    fn c(&self) -> Vec<Vec<u64>> {
        self.0.c().to_rows()
    }

    fn observability_rank(&self) -> usize {
        obsnet::observability_rank(&self.0, self.0.n_states())
    }

    fn simulate(&self, x0: Vec<u64>, steps: usize) -> PyResult<Vec<Vec<u64>>> {
        obsnet::simulate(&self.0, &x0, steps).map_err(to_py)
    }

    /// The initial state, or `None` when the trace does not determine it.
    fn recover(&self, trace: Vec<Vec<u64>>) -> PyResult<Option<Vec<u64>>> {
        match obsnet::recover_initial_state(&self.0, &trace).map_err(to_py)? {
            Recovery::State(x) => Ok(Some(x)),
            Recovery::Unobservable => Ok(None),
        }
    }

    fn __repr__(&self) -> String {
        format!("System(p={}, states={}, outputs={})", self.0.field().p(), self.0.n_states(), self.0.n_outputs())
    }
}

#[pyfunction]
#[pyo3(signature = (n_sensors, n_backbone, radius, seed, cost_model = "distance-squared"))]
fn random_geometric(n_sensors: usize, n_backbone: usize, radius: f64, seed: u64, cost_model: &str) -> PyResult<PyPhysicalGraph> {
    obsnet::random_geometric(n_sensors, n_backbone, radius, self::cost_model(cost_model)?, seed)
        .map(PyPhysicalGraph)
        .map_err(to_py)
}

/// Monte Carlo failure curve as `(l, ratio, probability)` rows plus the
/// CSV document.
#[pyfunction]
#[pyo3(signature = (n_sensors, n_backbone, radius, k, n_graphs, n_trials, seed, cost_model = "distance-squared"))]
#[allow(clippy::too_many_arguments)]
fn robustness_curve(
    py: Python<'_>,
    n_sensors: usize,
    n_backbone: usize,
    radius: f64,
    k: usize,
    n_graphs: usize,
    n_trials: usize,
    seed: u64,
    cost_model: &str,
) -> PyResult<(Vec<(usize, f64, f64)>, String)> {
    let cfg = CurveConfig {
        n_sensors,
        n_backbone,
        radius,
        cost_model: self::cost_model(cost_model)?,
        k,
        n_graphs,
        n_trials,
        seed,
    };
    let curve = py.detach(|| failure_curve(&cfg)).map_err(to_py)?;
    let rows = curve.points.iter().map(|p| (p.l, p.ratio, p.probability())).collect();
    Ok((rows, curve.to_csv()))
}

#[pymodule]
fn pyobsnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyPhysicalGraph>()?;
    m.add_class::<PyDesign>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(random_geometric, m)?)?;
    m.add_function(wrap_pyfunction!(robustness_curve, m)?)?;
    m.add("ObsnetError", py.get_type::<ObsnetError>())?;
    m.add("InfeasibleError", py.get_type::<InfeasibleError>())?;
    m.add("FormatError", py.get_type::<FormatError>())?;
    m.add("InconsistentTraceError", py.get_type::<InconsistentTraceError>())?;
    m.add("DEFAULT_PRIME", obsnet::DEFAULT_PRIME)?;
    Ok(())
}
