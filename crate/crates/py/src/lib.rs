//! Python bindings for the core library: transition systems, Markov
//! measures, locally constant potentials, Lyapunov estimation, periodic
//! spectra and the interval functional.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use shiftlyap::cocycle;
use shiftlyap::intervals::IntervalSet;
use shiftlyap::measure::MarkovMeasure;
use shiftlyap::spectra;
use shiftlyap::symbolic::{PeriodicOrbit, TransitionSystem};
use shiftlyap::zeros;

fn err(e: shiftlyap::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn orbit(word: Vec<usize>) -> PyResult<PeriodicOrbit> {
    PeriodicOrbit::new(&word)
        .ok_or_else(|| PyValueError::new_err(format!("{word:?} is not a primitive cyclic word")))
}

#[pyclass(name = "TransitionSystem", skip_from_py_object)]
#[derive(Clone)]
struct PyTransitionSystem {
    inner: TransitionSystem,
}

#[pymethods]
impl PyTransitionSystem {
    /// Build from a square 0/1 transition matrix given as nested lists.
    #[new]
    fn new(rows: Vec<Vec<bool>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("transition matrix must be square"));
        }
        let flat: Vec<bool> = rows.into_iter().flatten().collect();
        Ok(Self {
            inner: TransitionSystem::new(n, flat).map_err(err)?,
        })
    }

    #[staticmethod]
    fn full_shift(n: usize) -> Self {
        Self {
            inner: TransitionSystem::full_shift(n),
        }
    }

    #[staticmethod]
    fn golden_mean() -> Self {
        Self {
            inner: TransitionSystem::golden_mean(),
        }
    }

    fn alphabet_size(&self) -> usize {
        self.inner.alphabet_size()
    }

    fn is_transitive(&self) -> bool {
        self.inner.is_transitive()
    }

    fn allowed(&self, a: usize, b: usize) -> bool {
        self.inner.allowed(a, b)
    }

    /// Canonical primitive periodic orbits up to the given period, as words.
    fn periodic_orbits(&self, max_period: usize) -> PyResult<Vec<Vec<usize>>> {
        Ok(self
            .inner
            .enumerate_periodic_orbits(max_period)
            .map_err(err)?
            .into_iter()
            .map(|p| p.word().to_vec())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("TransitionSystem(alphabet_size={})", self.inner.alphabet_size())
    }
}

#[pyclass(name = "MarkovMeasure", skip_from_py_object)]
#[derive(Clone)]
struct PyMarkovMeasure {
    inner: MarkovMeasure,
}

#[pymethods]
impl PyMarkovMeasure {
    #[new]
    fn new(p: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: MarkovMeasure::from_transition_matrix(p).map_err(err)?,
        })
    }

    fn stationary(&self) -> Vec<f64> {
        self.inner.pi().to_vec()
    }

    fn sample_orbit(&self, length: usize, seed: u64) -> PyResult<Vec<usize>> {
        self.inner.sample_orbit(length, seed).map_err(err)
    }
}

#[pyclass(name = "Potential", skip_from_py_object)]
#[derive(Clone)]
struct PyPotential {
    inner: cocycle::Potential,
}

#[pymethods]
impl PyPotential {
    /// Radius-zero potential: one value per symbol.
    #[staticmethod]
    fn from_symbol_values(system: &PyTransitionSystem, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: cocycle::Potential::from_symbol_values(&system.inner, &values).map_err(err)?,
        })
    }

    /// Locally constant potential from a window table `{tuple: value}` of
    /// radius `r` (windows have length `2r + 1`).
    #[staticmethod]
    fn from_table(
        system: &PyTransitionSystem,
        radius: usize,
        table: std::collections::HashMap<Vec<usize>, f64>,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: cocycle::Potential::new(&system.inner, radius, table.into_iter().collect())
                .map_err(err)?,
        })
    }

    fn radius(&self) -> usize {
        self.inner.radius()
    }

    fn sup_norm(&self) -> f64 {
        self.inner.sup_norm()
    }
}

/// Monte-Carlo Lyapunov estimate; returns `(value, raw_mean, std_error)`.
#[pyfunction]
#[pyo3(signature = (energy, potential, measure, n_steps=100_000, n_samples=20, seed=0, energy_index=0))]
#[allow(clippy::too_many_arguments)]
fn estimate_lyapunov(
    energy: f64,
    potential: &PyPotential,
    measure: &PyMarkovMeasure,
    n_steps: usize,
    n_samples: usize,
    seed: u64,
    energy_index: u64,
) -> PyResult<(f64, f64, f64)> {
    let est = cocycle::estimate_lyapunov(
        energy,
        &potential.inner,
        &measure.inner,
        n_steps,
        n_samples,
        seed,
        energy_index,
    )
    .map_err(err)?;
    Ok((est.value, est.raw_mean, est.std_error))
}

/// Exact Lyapunov exponent of the periodic point with the given word.
#[pyfunction]
fn periodic_lyapunov(energy: f64, potential: &PyPotential, word: Vec<usize>) -> PyResult<f64> {
    cocycle::periodic_lyapunov(energy, &potential.inner, &orbit(word)?).map_err(err)
}

/// Coefficients (ascending) of the monic discriminant polynomial of an orbit.
#[pyfunction]
fn discriminant_coefficients(potential: &PyPotential, word: Vec<usize>) -> PyResult<Vec<f64>> {
    Ok(spectra::DiscriminantPoly::new(&orbit(word)?, &potential.inner)
        .map_err(err)?
        .poly()
        .coeffs()
        .to_vec())
}

/// The truncated punctured band union over orbits of period `<= max_period`:
/// returns `(intervals, measure)`.
#[pyfunction]
fn union_s(
    system: &PyTransitionSystem,
    potential: &PyPotential,
    max_period: usize,
) -> PyResult<(Vec<(f64, f64)>, f64)> {
    let u = spectra::union_s(&system.inner, &potential.inner, max_period).map_err(err)?;
    Ok((u.set.intervals().to_vec(), u.set.measure()))
}

/// The interval functional J over the window `(-5/2 - sup_norm, 5/2 + sup_norm)`.
#[pyfunction]
fn compute_j(zeros_list: Vec<f64>, s: Vec<(f64, f64)>, sup_norm: f64) -> PyResult<f64> {
    let set = IntervalSet::from_intervals(s);
    Ok(zeros::compute_j(&zeros_list, &set, sup_norm)
        .map_err(err)?
        .j_value)
}

/// Single-coordinate positivity certificate.
#[pyfunction]
fn positivity_certificate(system: &PyTransitionSystem, potential: &PyPotential) -> bool {
    zeros::positivity_certificate(&system.inner, &potential.inner).holds
}

#[pymodule]
fn shiftlyap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTransitionSystem>()?;
    m.add_class::<PyMarkovMeasure>()?;
    m.add_class::<PyPotential>()?;
    m.add_function(wrap_pyfunction!(estimate_lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(discriminant_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(union_s, m)?)?;
    m.add_function(wrap_pyfunction!(compute_j, m)?)?;
    m.add_function(wrap_pyfunction!(positivity_certificate, m)?)?;
    Ok(())
}
