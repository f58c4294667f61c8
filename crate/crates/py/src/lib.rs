//! Python bindings: a `Game` class wrapping the core types plus the grid
//! oracles, so scans and spot checks can be driven from Python.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use coblotto::model::TransferPair;
use coblotto::oracle;
use coblotto::transfer;
use coblotto::GameInstance;

fn err(e: coblotto::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One coalitional Blotto game instance.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Game {
    inner: GameInstance,
}

#[pymethods]
impl Game {
    #[new]
    fn new(phi1: f64, phi2: f64, x1: f64, x2: f64) -> PyResult<Self> {
        Ok(Game { inner: GameInstance::new(phi1, phi2, x1, x2).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        let g = &self.inner;
        format!("Game(phi1={}, phi2={}, x1={}, x2={})", g.phi1, g.phi2, g.x1, g.x2)
    }

    /// Best-response case label of the untransferred game.
    fn case(&self) -> PyResult<String> {
        Ok(coblotto::classify_case(&self.inner.zero_transfer()).map_err(err)?.to_string())
    }

    /// Budget-region label.
    fn region(&self) -> String {
        self.inner.budget_region().to_string()
    }

    /// Adversary's optimal split against the untransferred game.
    fn allocation(&self) -> PyResult<(f64, f64)> {
        let a = coblotto::adversary_allocation(&self.inner.zero_transfer()).map_err(err)?;
        Ok((a.xa1, a.xa2))
    }

    /// Equilibrium payoffs after a transfer (both default to zero).
    #[pyo3(signature = (tau_v=0.0, tau_b=0.0))]
    fn payoffs(&self, tau_v: f64, tau_b: f64) -> PyResult<(f64, f64)> {
        let p = coblotto::player_payoffs(&self.inner, &TransferPair { tau_v, tau_b }).map_err(err)?;
        Ok((p.u1, p.u2))
    }

    /// Payoff changes relative to the no-transfer baseline.
    #[pyo3(signature = (tau_v=0.0, tau_b=0.0))]
    fn deltas(&self, tau_v: f64, tau_b: f64) -> PyResult<(f64, f64)> {
        coblotto::payoff_deltas(&self.inner, &TransferPair { tau_v, tau_b }).map_err(err)
    }

    /// Payoff gradients with respect to (tau_b, tau_v) at the origin.
    fn gradients(&self) -> PyResult<((f64, f64), (f64, f64))> {
        let (g1, g2) = coblotto::joint_gradients(&self.inner).map_err(err)?;
        Ok(((g1.d_b, g1.d_v), (g2.d_b, g2.d_v)))
    }

    /// Whether a mutually beneficial valuation transfer exists.
    fn in_gv(&self) -> bool {
        transfer::in_gv(&self.inner).0
    }

    /// Certificates witnessing valuation-transfer feasibility, as dicts
    /// with rule id, canonical-orientation interval, and direction.
    fn certificates<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let (_, certs) = transfer::in_gv(&self.inner);
        certs
            .iter()
            .map(|c| {
                let d = PyDict::new(py);
                d.set_item("prop", c.proposition)?;
                d.set_item("lo", c.interval.0)?;
                d.set_item("hi", c.interval.1)?;
                d.set_item("direction", c.direction)?;
                Ok(d)
            })
            .collect()
    }

    /// Whether a mutually beneficial budget transfer exists (grid test).
    #[pyo3(signature = (n=4001))]
    fn in_gb(&self, n: usize) -> bool {
        transfer::in_gb(&self.inner, n)
    }

    /// Whether the game lies on the exceptional set for joint transfers.
    #[pyo3(signature = (tol=1e-9))]
    fn in_measure_zero(&self, tol: f64) -> bool {
        transfer::in_measure_zero_joint(&self.inner, tol)
    }

    /// A verified (d_b, d_v) ascent direction for a joint transfer, or None.
    fn joint_direction(&self) -> Option<(f64, f64)> {
        transfer::joint_beneficial_direction(&self.inner).ok().map(|d| (d.d_b, d.d_v))
    }

    /// Full membership record as a dict.
    fn membership<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = transfer::membership(&self.inner);
        let d = PyDict::new(py);
        d.set_item("in_gv", m.in_gv)?;
        d.set_item("in_gb", m.in_gb)?;
        d.set_item("joint", m.joint_feasible)?;
        d.set_item("measure_zero", m.in_measure_zero)?;
        d.set_item("case", m.case.to_string())?;
        d.set_item("region", m.region.to_string())?;
        d.set_item("near_boundary", m.near_boundary)?;
        Ok(d)
    }

    /// Grid oracle over valuation transfers: maximal win-win intervals.
    #[pyo3(signature = (n=20001))]
    fn search_valuation(&self, n: usize) -> Vec<(f64, f64)> {
        oracle::search_valuation(&self.inner, n).intervals
    }

    /// Grid oracle over budget transfers.
    #[pyo3(signature = (n=20001))]
    fn search_budget(&self, n: usize) -> Vec<(f64, f64)> {
        oracle::search_budget(&self.inner, n).intervals
    }

    /// Grid oracle over joint transfers: the best (tau_v, tau_b) if any.
    #[pyo3(signature = (n_b=201, n_v=201))]
    fn search_joint(&self, n_b: usize, n_v: usize) -> Option<(f64, f64)> {
        oracle::search_joint(&self.inner, n_b, n_v).map(|(t, _)| (t.tau_v, t.tau_b))
    }
}

/// Value a player defends on one front given budgets and the adversary's
/// allocation against it.
#[pyfunction]
fn front_payoff(phi: f64, x_p: f64, x_a: f64) -> f64 {
    coblotto::front_payoff(phi, x_p, x_a)
}

#[pymodule]
fn coblotto_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_function(wrap_pyfunction!(front_payoff, m)?)?;
    Ok(())
}
