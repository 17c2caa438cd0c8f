//! Experiment configuration: a TOML file with `system`, optional
//! `subsystem`, `potential`, `measure` / `submeasure`, `scan` and `output`
//! sections. Every field has a default; the empty config describes the
//! bundled golden-mean example.
//!
//! Grammar (all sections optional):
//!
//! ```toml
//! [system]
//! alphabet = ["1", "2"]          # single-character labels
//! matrix = [[1, 1], [1, 0]]      # row-major 0/1 allowed transitions
//!
//! [subsystem]                    # same shape, compared against [system]
//! matrix = [[1, 0], [1, 0]]
//!
//! [potential]
//! radius = 0
//! table = { "1" = 0.0, "2" = 0.5 }   # keys are words of length 2r + 1
//!
//! [measure]
//! p = [[0.5, 0.5], [1.0, 0.0]]   # entries are decimals or "a/b" strings
//! pi = [0.6667, 0.3333]          # optional; computed when absent
//!
//! [submeasure]
//! p = [["2/3", "1/3"], [1.0, 0.0]]
//!
//! [scan]
//! grid_lo = -3.0                 # defaults to -5/2 - ‖V‖
//! grid_hi = 3.0                  # defaults to  5/2 + ‖V‖
//! grid_points = 1001
//! theta = 0.01
//! n_steps = 100000
//! n_samples = 20
//! seed = 0
//! max_period = 10
//! tol_delta = 1e-6
//!
//! [output]
//! dir = "out"
//! ```

use std::collections::HashMap;

use serde::Deserialize;

use crate::cocycle::Potential;
use crate::error::{Error, Result};
use crate::measure::MarkovMeasure;
use crate::spectra::TOL_DELTA;
use crate::symbolic::{SubshiftEmbedding, Symbol, TransitionSystem};
use crate::zeros::{EstimatorParams, ExperimentParams, DEFAULT_GRID_POINTS, DEFAULT_THETA};

/// A numeric config entry: decimal, integer, or a rational string "a/b".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NumEntry {
    Float(f64),
    Int(i64),
    Rational(String),
}

impl NumEntry {
    fn value(&self, key: &str) -> Result<f64> {
        match self {
            NumEntry::Float(f) => Ok(*f),
            NumEntry::Int(i) => Ok(*i as f64),
            NumEntry::Rational(s) => {
                let parts: Vec<&str> = s.split('/').collect();
                if parts.len() != 2 {
                    return Err(Error::Config(format!(
                        "{key}: rational entry {s:?} must look like \"a/b\""
                    )));
                }
                let num: f64 = parts[0].trim().parse().map_err(|_| {
                    Error::Config(format!("{key}: bad numerator in {s:?}"))
                })?;
                let den: f64 = parts[1].trim().parse().map_err(|_| {
                    Error::Config(format!("{key}: bad denominator in {s:?}"))
                })?;
                if den == 0.0 {
                    return Err(Error::Config(format!("{key}: zero denominator in {s:?}")));
                }
                Ok(num / den)
            }
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    alphabet: Option<Vec<String>>,
    matrix: Option<Vec<Vec<u8>>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    radius: Option<usize>,
    table: Option<HashMap<String, NumEntry>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    p: Option<Vec<Vec<NumEntry>>>,
    pi: Option<Vec<NumEntry>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    grid_lo: Option<f64>,
    grid_hi: Option<f64>,
    grid_points: Option<usize>,
    theta: Option<f64>,
    n_steps: Option<usize>,
    n_samples: Option<usize>,
    seed: Option<u64>,
    max_period: Option<usize>,
    tol_delta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: Option<RawSystem>,
    subsystem: Option<RawSystem>,
    potential: Option<RawPotential>,
    measure: Option<RawMeasure>,
    submeasure: Option<RawMeasure>,
    scan: Option<RawScan>,
    output: Option<RawOutput>,
}

/// A fully validated configuration with all defaults filled.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub system: TransitionSystem,
    pub subsystem: Option<TransitionSystem>,
    pub alphabet: Vec<String>,
    pub potential: Potential,
    pub measure: MarkovMeasure,
    pub submeasure: Option<MarkovMeasure>,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
    pub theta: f64,
    pub n_steps: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub max_period: usize,
    pub tol_delta: f64,
    pub out_dir: String,
    /// The raw config text, hashed into every report.
    pub source_text: String,
}

impl ExperimentConfig {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_points.max(2);
        let step = (self.grid_hi - self.grid_lo) / (n - 1) as f64;
        let mut grid: Vec<f64> = (0..n).map(|i| self.grid_lo + step * i as f64).collect();
        grid[0] += 1e-9;
        *grid.last_mut().unwrap() -= 1e-9;
        grid
    }

    pub fn estimator_params(&self) -> EstimatorParams {
        EstimatorParams {
            n_steps: self.n_steps,
            n_samples: self.n_samples,
            base_seed: self.seed,
        }
    }

    pub fn experiment_params(&self) -> ExperimentParams {
        ExperimentParams {
            max_period: self.max_period,
            grid_points: self.grid_points,
            theta: self.theta,
            tol_delta: self.tol_delta,
            estimator: self.estimator_params(),
        }
    }

    /// Embedding of the configured subsystem into the main system (the main
    /// system itself when no subsystem block is present).
    pub fn embedding(&self) -> SubshiftEmbedding {
        SubshiftEmbedding {
            sub: self.subsystem.clone().unwrap_or_else(|| self.system.clone()),
            super_sys: self.system.clone(),
        }
    }

    pub fn submeasure_or_measure(&self) -> &MarkovMeasure {
        self.submeasure.as_ref().unwrap_or(&self.measure)
    }
}

fn default_alphabet(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn build_system(raw: &RawSystem, context: &str) -> Result<(TransitionSystem, Vec<String>)> {
    let matrix = raw
        .matrix
        .clone()
        .unwrap_or_else(|| vec![vec![1, 1], vec![1, 0]]);
    let n = matrix.len();
    let alphabet = raw.alphabet.clone().unwrap_or_else(|| default_alphabet(n));
    if alphabet.len() != n {
        return Err(Error::Config(format!(
            "{context}.alphabet has {} labels but the matrix has {n} rows",
            alphabet.len()
        )));
    }
    for (i, label) in alphabet.iter().enumerate() {
        if label.chars().count() != 1 {
            return Err(Error::Config(format!(
                "{context}.alphabet[{i}] = {label:?} must be a single character"
            )));
        }
    }
    let mut flat = Vec::with_capacity(n * n);
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Config(format!(
                "{context}.matrix row {i} has length {} but the matrix has {n} rows",
                row.len()
            )));
        }
        for &e in row {
            if e > 1 {
                return Err(Error::Config(format!(
                    "{context}.matrix row {i} contains {e}; entries must be 0 or 1"
                )));
            }
            flat.push(e == 1);
        }
    }
    let system = TransitionSystem::new(n, flat)
        .map_err(|e| Error::Config(format!("{context}: {e}")))?;
    Ok((system, alphabet))
}

fn parse_word(key: &str, alphabet: &[String]) -> Result<Vec<Symbol>> {
    key.chars()
        .map(|c| {
            alphabet
                .iter()
                .position(|l| l.chars().next() == Some(c))
                .ok_or_else(|| {
                    Error::Config(format!(
                        "potential.table key {key:?}: symbol {c:?} is not in the alphabet"
                    ))
                })
        })
        .collect()
}

/// Render a symbol word using the alphabet labels.
pub fn format_word(word: &[Symbol], alphabet: &[String]) -> String {
    word.iter().map(|&s| alphabet[s].as_str()).collect()
}

fn build_potential(
    raw: &RawPotential,
    system: &TransitionSystem,
    alphabet: &[String],
) -> Result<Potential> {
    let radius = raw.radius.unwrap_or(0);
    let table = match &raw.table {
        Some(t) => {
            let mut out = HashMap::new();
            for (key, entry) in t {
                let word = parse_word(key, alphabet)?;
                out.insert(word, entry.value(&format!("potential.table.{key}"))?);
            }
            out
        }
        None => {
            // bundled golden-mean default: V = 0.5 on symbol 1 (label "1"),
            // 0 elsewhere, radius 0
            (0..system.alphabet_size())
                .map(|s| (vec![s], if s == 0 { 0.5 } else { 0.0 }))
                .collect()
        }
    };
    Potential::new(system, radius, table).map_err(|e| Error::Config(format!("potential: {e}")))
}

fn build_measure(
    raw: &RawMeasure,
    system: &TransitionSystem,
    context: &str,
) -> Result<MarkovMeasure> {
    let n = system.alphabet_size();
    let p: Vec<Vec<f64>> = match &raw.p {
        Some(rows) => {
            let mut out = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::Config(format!(
                        "{context}.p row {i} has length {}, expected {n}",
                        row.len()
                    )));
                }
                out.push(
                    row.iter()
                        .map(|e| e.value(&format!("{context}.p[{i}]")))
                        .collect::<Result<Vec<f64>>>()?,
                );
            }
            out
        }
        None => {
            // uniform over allowed transitions
            (0..n)
                .map(|i| {
                    let outs: Vec<usize> = (0..n).filter(|&j| system.allowed(i, j)).collect();
                    let w = if outs.is_empty() {
                        0.0
                    } else {
                        1.0 / outs.len() as f64
                    };
                    (0..n)
                        .map(|j| if system.allowed(i, j) { w } else { 0.0 })
                        .collect()
                })
                .collect()
        }
    };
    let measure = match &raw.pi {
        Some(pi) => {
            let pi = pi
                .iter()
                .enumerate()
                .map(|(i, e)| e.value(&format!("{context}.pi[{i}]")))
                .collect::<Result<Vec<f64>>>()?;
            MarkovMeasure::with_stationary(p, pi)
        }
        None => MarkovMeasure::from_transition_matrix(p),
    }
    .map_err(|e| Error::Config(format!("{context}: {e}")))?;
    measure
        .validate_measure(system)
        .map_err(|e| Error::Config(format!("{context}: {e}")))?;
    Ok(measure)
}

/// Parse and validate a config, filling every default.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| Error::Config(format!("TOML parse failure: {e}")))?;
    let (system, alphabet) = build_system(&raw.system.clone().unwrap_or_default(), "system")?;
    let subsystem = match &raw.subsystem {
        Some(rs) => {
            let (sub, _) = build_system(rs, "subsystem")?;
            let embedding = SubshiftEmbedding {
                sub: sub.clone(),
                super_sys: system.clone(),
            };
            if !embedding.is_valid() {
                return Err(Error::Config(
                    "subsystem.matrix allows a transition forbidden by system.matrix".into(),
                ));
            }
            Some(sub)
        }
        None => None,
    };
    let potential = build_potential(&raw.potential.clone().unwrap_or_default(), &system, &alphabet)?;
    let measure = build_measure(&raw.measure.clone().unwrap_or_default(), &system, "measure")?;
    let submeasure = match (&raw.submeasure, &subsystem) {
        (Some(rm), Some(sub)) => Some(build_measure(rm, sub, "submeasure")?),
        (Some(rm), None) => Some(build_measure(rm, &system, "submeasure")?),
        (None, Some(sub)) => Some(build_measure(&RawMeasure::default(), sub, "submeasure")?),
        (None, None) => None,
    };
    let scan = raw.scan.clone().unwrap_or_default();
    let sup = potential.sup_norm();
    let grid_lo = scan.grid_lo.unwrap_or(-2.5 - sup);
    let grid_hi = scan.grid_hi.unwrap_or(2.5 + sup);
    if grid_lo >= grid_hi {
        return Err(Error::Config(format!(
            "scan.grid_lo = {grid_lo} must be below scan.grid_hi = {grid_hi}"
        )));
    }
    Ok(ExperimentConfig {
        system,
        subsystem,
        alphabet,
        potential,
        measure,
        submeasure,
        grid_lo,
        grid_hi,
        grid_points: scan.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
        theta: scan.theta.unwrap_or(DEFAULT_THETA),
        n_steps: scan.n_steps.unwrap_or(100_000),
        n_samples: scan.n_samples.unwrap_or(20),
        seed: scan.seed.unwrap_or(0),
        max_period: scan.max_period.unwrap_or(10),
        tol_delta: scan.tol_delta.unwrap_or(TOL_DELTA),
        out_dir: raw
            .output
            .unwrap_or_default()
            .dir
            .unwrap_or_else(|| "out".into()),
        source_text: text.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_golden_mean_default() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.system, TransitionSystem::golden_mean());
        assert_eq!(cfg.potential.radius(), 0);
        assert_eq!(cfg.potential.sup_norm(), 0.5);
        assert_eq!(cfg.grid_points, DEFAULT_GRID_POINTS);
        assert_eq!(cfg.grid_lo, -3.0);
        assert_eq!(cfg.grid_hi, 3.0);
        assert!(cfg.measure.validate_measure(&cfg.system).unwrap().ergodic);
    }

    #[test]
    fn minimal_config_parses() {
        let cfg = parse_config(
            r#"
            [system]
            matrix = [[1, 1], [1, 1]]
            [potential]
            table = { "1" = 0.0, "2" = 1.0 }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.system, TransitionSystem::full_shift(2));
        assert_eq!(cfg.potential.sup_norm(), 1.0);
    }

    #[test]
    fn wrong_row_length_names_row() {
        let err = parse_config("[system]\nmatrix = [[1, 1], [1]]").unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
    }

    #[test]
    fn non_stochastic_row_rejected() {
        let err = parse_config(
            r#"
            [measure]
            p = [[0.5, 0.4], [0.5, 0.5]]
            "#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("stochastic"), "{err}");
    }

    #[test]
    fn rational_entries() {
        let cfg = parse_config(
            r#"
            [system]
            matrix = [[1, 1], [1, 1]]
            [potential]
            table = { "1" = 0.0, "2" = 0.0 }
            [measure]
            p = [["2/3", "1/3"], [1, 0]]
            "#,
        )
        .unwrap();
        assert!((cfg.measure.pi()[0] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(parse_config("[scan]\nbogus = 1").is_err());
    }

    #[test]
    fn invalid_subsystem_rejected() {
        let err = parse_config(
            r#"
            [system]
            matrix = [[1, 1], [1, 0]]
            [subsystem]
            matrix = [[1, 1], [1, 1]]
            [potential]
            table = { "1" = 0.0, "2" = 0.0 }
            "#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("forbidden"), "{err}");
    }

    #[test]
    fn inadmissible_table_key_rejected() {
        let err = parse_config(
            r#"
            [potential]
            radius = 1
            table = { "222" = 1.0 }
            "#,
        )
        .unwrap_err();
        // golden-mean default system forbids 22
        assert!(err.to_string().contains("admissible"), "{err}");
    }
}
