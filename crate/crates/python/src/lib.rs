//! Python bindings for the coupled Quicksort simulation.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;

use quicksort_limit as core;
use quicksort_limit::experiments::{self, Experiment, ExperimentConfig};
use quicksort_limit::stats::{self, EmpiricalCdf};
use quicksort_limit::{ExactValues, MasterSeed, UniformSource};

create_exception!(qslab, QslabError, PyValueError);

fn err(e: core::Error) -> PyErr {
    QslabError::new_err(e.to_string())
}

#[pyclass(name = "UniformStream")]
struct PyUniformStream {
    inner: core::UniformStream,
}

#[pymethods]
impl PyUniformStream {
    #[new]
    fn new(seed: u64, trial_index: u64) -> Self {
        PyUniformStream {
            inner: core::substream(MasterSeed(seed), trial_index),
        }
    }

    fn next_uniform(&mut self) -> f64 {
        self.inner.next_uniform()
    }

    fn take(&mut self, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.inner.next_uniform()).collect()
    }
}

#[pyclass(name = "SearchTree")]
struct PySearchTree {
    inner: core::SearchTree,
}

#[pymethods]
impl PySearchTree {
    #[new]
    #[pyo3(signature = (keys=None))]
    fn new(keys: Option<Vec<f64>>) -> PyResult<Self> {
        let inner = core::SearchTree::from_keys(&keys.unwrap_or_default()).map_err(err)?;
        Ok(PySearchTree { inner })
    }

    fn insert_key(&mut self, u: f64) -> PyResult<u32> {
        self.inner.insert_key(u).map_err(err)
    }

    /// `(left_endpoint, length, depth)` per unoccupied slot, left to right.
    fn fringe(&self) -> Vec<(f64, f64, u32)> {
        self.inner
            .fringe()
            .iter()
            .map(|s| (s.left_endpoint, s.length, s.depth))
            .collect()
    }

    #[getter]
    fn internal_path_length(&self) -> u64 {
        self.inner.internal_path_length()
    }

    #[getter]
    fn external_path_length(&self) -> u64 {
        self.inner.external_path_length()
    }

    #[getter]
    fn left_count(&self) -> u64 {
        self.inner.left_count()
    }

    #[getter]
    fn toll_sum_total(&self) -> f64 {
        self.inner.toll_sum_total()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "CouplingOutcome", frozen)]
struct PyCouplingOutcome {
    inner: core::CouplingOutcome,
}

#[pymethods]
impl PyCouplingOutcome {
    #[getter]
    fn n(&self) -> u64 {
        self.inner.n
    }
    #[getter]
    fn k_n(&self) -> u64 {
        self.inner.k_n
    }
    #[getter]
    fn y_n(&self) -> f64 {
        self.inner.y_n
    }
    #[getter]
    fn y_trunc(&self) -> f64 {
        self.inner.y_trunc
    }
    #[getter]
    fn y0_trunc(&self) -> f64 {
        self.inner.y0_trunc
    }
    #[getter]
    fn y1_trunc(&self) -> f64 {
        self.inner.y1_trunc
    }
    #[getter]
    fn u1(&self) -> f64 {
        self.inner.u1
    }
    #[getter]
    fn i_n(&self) -> u64 {
        self.inner.i_n
    }
    #[getter]
    fn y_n0(&self) -> f64 {
        self.inner.y_n0
    }
    #[getter]
    fn y_n1(&self) -> f64 {
        self.inner.y_n1
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }
    #[getter]
    fn discarded_mass_sq(&self) -> f64 {
        self.inner.discarded_mass_sq
    }

    fn residuals(&self) -> PyResult<BTreeMap<&'static str, f64>> {
        let ev = ExactValues::new(self.inner.n as usize + 1);
        let r = core::decomposition_residuals(&self.inner, &ev).map_err(err)?;
        Ok(BTreeMap::from([
            ("rec_y", r.rec_y),
            ("rec_yn", r.rec_yn),
            ("rec_bifi", r.rec_bifi),
            ("basic_eqn", r.basic_eqn),
        ]))
    }

    fn perturbation_b(&self) -> PyResult<f64> {
        let ev = ExactValues::new(self.inner.n as usize + 1);
        core::perturbation_b(&self.inner, &ev).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "CouplingOutcome(n={}, k_n={}, y_n={}, y_trunc={})",
            self.inner.n, self.inner.k_n, self.inner.y_n, self.inner.y_trunc
        )
    }
}

#[pyfunction]
fn partition(keys: Vec<f64>) -> PyResult<(f64, Vec<f64>, Vec<f64>)> {
    core::partition(&keys).map_err(err)
}

#[pyfunction]
fn quicksort_comparisons(keys: Vec<f64>) -> PyResult<u64> {
    core::quicksort_comparisons(&keys).map_err(err)
}

/// Maps comparison count to number of permutations.
#[pyfunction]
fn enumerate_exact(n: usize) -> PyResult<BTreeMap<u64, u64>> {
    Ok(core::enumerate_exact(n).map_err(err)?.counts)
}

/// Exact mean of `K_n` over all permutations, as `"p/q"`.
#[pyfunction]
fn exact_mean(n: usize) -> PyResult<String> {
    Ok(core::enumerate_exact(n).map_err(err)?.exact_mean().to_string())
}

#[pyfunction]
fn mean_kn(n: u64) -> f64 {
    core::formulas::mean_kn(n)
}

#[pyfunction]
fn sigma_sq(n: u64) -> f64 {
    core::formulas::sigma_sq(n)
}

#[pyfunction]
fn toll_cn(n: u64, i: u64) -> PyResult<f64> {
    ExactValues::new(n as usize).toll_cn(n, i).map_err(err)
}

#[pyfunction]
fn cost_c(x: f64) -> PyResult<f64> {
    core::formulas::cost_c(x).map_err(err)
}

#[pyfunction]
fn clt_scale(n: f64) -> PyResult<f64> {
    core::formulas::clt_scale(n).map_err(err)
}

#[pyfunction]
fn l3_prediction(n: f64) -> PyResult<f64> {
    core::formulas::l3_prediction(n).map_err(err)
}

#[pyfunction]
fn sample_limit(seed: u64, trial_index: u64, delta: f64) -> PyResult<f64> {
    core::sample_limit(&mut core::substream(MasterSeed(seed), trial_index), delta).map_err(err)
}

/// Coupled sample; `delta` defaults to the rule keeping truncation error at 5% of sigma(n).
#[pyfunction]
#[pyo3(signature = (seed, trial_index, n, delta=None))]
fn sample_coupled(seed: u64, trial_index: u64, n: u64, delta: Option<f64>) -> PyResult<PyCouplingOutcome> {
    let ev = ExactValues::new(n as usize + 1);
    let delta = delta.unwrap_or_else(|| core::default_delta(n, &ev));
    let mut stream = core::substream(MasterSeed(seed), trial_index);
    let inner = core::sample_coupled(&mut stream, n, delta, &ev).map_err(err)?;
    Ok(PyCouplingOutcome { inner })
}

#[pyfunction]
fn normal_cdf(x: f64) -> f64 {
    stats::normal_cdf(x)
}

#[pyfunction]
fn ks_distance_normal(samples: Vec<f64>) -> PyResult<f64> {
    let cdf = EmpiricalCdf::new(samples).map_err(err)?;
    Ok(stats::ks_distance(&cdf, stats::normal_cdf))
}

#[pyfunction]
fn ks_two_sample(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    let a = EmpiricalCdf::new(a).map_err(err)?;
    let b = EmpiricalCdf::new(b).map_err(err)?;
    Ok(stats::ks_two_sample(&a, &b))
}

#[pyfunction]
fn abs_third_moment(samples: Vec<f64>) -> PyResult<f64> {
    stats::abs_third_moment(&samples).map_err(err)
}

/// Runs an experiment by subcommand name and returns its summary as JSON text.
#[pyfunction]
#[pyo3(signature = (subcommand, seed=1, n=None, trials=None, delta=None, workers=1))]
fn run_experiment(
    subcommand: &str,
    seed: u64,
    n: Option<Vec<u64>>,
    trials: Option<u64>,
    delta: Option<f64>,
    workers: usize,
) -> PyResult<String> {
    let experiment = match subcommand {
        "enumerate" => Experiment::Enumerate,
        "mean-check" => Experiment::MeanCheck,
        "variance-profile" => Experiment::VarianceProfile,
        "clt" => Experiment::Clt,
        "l3" => Experiment::L3,
        "bn-decay" => Experiment::BnDecay,
        "coeff-convergence" => Experiment::CoeffConvergence,
        "fixed-point" => Experiment::FixedPoint,
        "coupling-audit" => Experiment::CouplingAudit,
        "formulas" => Experiment::Formulas,
        other => return Err(QslabError::new_err(format!("unknown subcommand {other:?}"))),
    };
    let mut cfg = ExperimentConfig::new(experiment, seed);
    if let Some(n) = n {
        cfg.n_values = n;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    cfg.delta = delta;
    cfg.workers = workers;
    let report = experiments::run(&cfg).map_err(err)?;
    serde_json::to_string(&report).map_err(|e| QslabError::new_err(e.to_string()))
}

#[pymodule]
fn qslab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QslabError", m.py().get_type::<QslabError>())?;
    m.add("LIMIT_VARIANCE", core::formulas::LIMIT_VARIANCE)?;
    m.add_class::<PyUniformStream>()?;
    m.add_class::<PySearchTree>()?;
    m.add_class::<PyCouplingOutcome>()?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(quicksort_comparisons, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_exact, m)?)?;
    m.add_function(wrap_pyfunction!(exact_mean, m)?)?;
    m.add_function(wrap_pyfunction!(mean_kn, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_sq, m)?)?;
    m.add_function(wrap_pyfunction!(toll_cn, m)?)?;
    m.add_function(wrap_pyfunction!(cost_c, m)?)?;
    m.add_function(wrap_pyfunction!(clt_scale, m)?)?;
    m.add_function(wrap_pyfunction!(l3_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(sample_limit, m)?)?;
    m.add_function(wrap_pyfunction!(sample_coupled, m)?)?;
    m.add_function(wrap_pyfunction!(normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance_normal, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(abs_third_moment, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
