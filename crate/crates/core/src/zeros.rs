//! Zero-set machinery: scanning for Lyapunov zeros, the removable /
//! unremovable classification, the interval functional J, the
//! single-coordinate positivity certificate, and the embedding
//! monotonicity experiment.

use serde::{Deserialize, Serialize};

use crate::cocycle::{estimate_lyapunov, LyapunovEstimate, Potential};
use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::measure::MarkovMeasure;
use crate::spectra::{union_s, DiscriminantPoly, UnionS, TOL_DELTA};
use crate::symbolic::{PeriodicOrbit, SubshiftEmbedding, TransitionSystem};

/// Default zero-detection threshold on the estimated exponent.
pub const DEFAULT_THETA: f64 = 0.01;
/// Default energy-grid resolution.
pub const DEFAULT_GRID_POINTS: usize = 1001;
/// A candidate cluster spanning more than this fraction of the grid triggers
/// the infinite-zero-set heuristic.
pub const CLUSTER_WIDTH_FRACTION: f64 = 0.2;

/// Outcome of classifying one energy against the enumerated orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Some orbit has `tol < |Δ(E)| < 2 - tol`.
    UnremovableElliptic,
    /// Every enumerated orbit has `|Δ(E)|` within tol of `{0, 2}`.
    UnremovableDegenerate,
    Removable,
    Inconclusive,
}

impl Classification {
    pub fn is_unremovable(self) -> bool {
        matches!(
            self,
            Classification::UnremovableElliptic | Classification::UnremovableDegenerate
        )
    }
}

/// A witness orbit for an elliptic classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub orbit_word: Vec<usize>,
    pub delta: f64,
}

/// One detected near-zero of the estimated Lyapunov exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCandidate {
    pub energy: f64,
    pub l_hat: f64,
    pub std_error: f64,
    pub classification: Classification,
    pub evidence: Option<Witness>,
    /// Number of consecutive grid points in the cluster this candidate
    /// represents.
    pub cluster_points: usize,
    /// Energy width of the cluster.
    pub cluster_width: f64,
}

/// Estimator parameters for grid scans.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub n_steps: usize,
    pub n_samples: usize,
    pub base_seed: u64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            n_steps: 100_000,
            n_samples: 20,
            base_seed: 0,
        }
    }
}

/// Output of a grid scan: all per-energy estimates, the clustered candidates
/// and any per-point estimator failures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub estimates: Vec<LyapunovEstimate>,
    pub candidates: Vec<ZeroCandidate>,
    pub failures: Vec<(f64, String)>,
    pub theta: f64,
}

/// Scan the grid, estimate the exponent at each energy, and reduce runs of
/// consecutive sub-threshold points to their minimizer.
pub fn scan_zero_candidates(
    potential: &Potential,
    measure: &MarkovMeasure,
    grid: &[f64],
    params: &EstimatorParams,
    theta: f64,
) -> Result<ScanResult> {
    if theta <= 0.0 {
        return Err(Error::Input("threshold must be positive".into()));
    }
    let mut estimates = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (i, &e) in grid.iter().enumerate() {
        match estimate_lyapunov(
            e,
            potential,
            measure,
            params.n_steps,
            params.n_samples,
            params.base_seed,
            i as u64,
        ) {
            Ok(est) => estimates.push(est),
            Err(err) => failures.push((e, err.to_string())),
        }
    }
    let mut candidates = Vec::new();
    let mut cluster: Vec<&LyapunovEstimate> = Vec::new();
    let flush = |cluster: &mut Vec<&LyapunovEstimate>, out: &mut Vec<ZeroCandidate>| {
        if cluster.is_empty() {
            return;
        }
        let best = cluster
            .iter()
            .min_by(|a, b| a.value.partial_cmp(&b.value).unwrap())
            .unwrap();
        out.push(ZeroCandidate {
            energy: best.energy,
            l_hat: best.value,
            std_error: best.std_error,
            classification: Classification::Inconclusive,
            evidence: None,
            cluster_points: cluster.len(),
            cluster_width: cluster.last().unwrap().energy - cluster[0].energy,
        });
        cluster.clear();
    };
    for est in &estimates {
        if est.value < theta {
            cluster.push(est);
        } else {
            flush(&mut cluster, &mut candidates);
        }
    }
    flush(&mut cluster, &mut candidates);
    Ok(ScanResult {
        estimates,
        candidates,
        failures,
        theta,
    })
}

/// Classify one energy against a truncated orbit list.
pub fn classify_unremovable(
    energy: f64,
    orbits: &[PeriodicOrbit],
    potential: &Potential,
    tol_delta: f64,
) -> Result<(Classification, Option<Witness>)> {
    if orbits.is_empty() {
        return Err(Error::Input("orbit list must be nonempty".into()));
    }
    // an energy that leaves the spectrum of any periodic operator is
    // removable regardless of elliptic witnesses elsewhere
    let mut witness = None;
    for orbit in orbits {
        let delta = DiscriminantPoly::new(orbit, potential)?.eval(energy);
        let ad = delta.abs();
        if ad > 2.0 + tol_delta {
            return Ok((Classification::Removable, None));
        }
        if witness.is_none() && ad > tol_delta && ad < 2.0 - tol_delta {
            witness = Some(Witness {
                orbit_word: orbit.word().to_vec(),
                delta,
            });
        }
    }
    if witness.is_some() {
        Ok((Classification::UnremovableElliptic, witness))
    } else {
        // every |Δ| within tol of {0, 2}, the degenerate configuration
        Ok((Classification::UnremovableDegenerate, None))
    }
}

/// Classify every candidate of a scan in place.
pub fn classify_candidates(
    scan: &mut ScanResult,
    orbits: &[PeriodicOrbit],
    potential: &Potential,
    tol_delta: f64,
) -> Result<()> {
    for cand in &mut scan.candidates {
        let (class, evidence) = classify_unremovable(cand.energy, orbits, potential, tol_delta)?;
        cand.classification = class;
        cand.evidence = evidence;
    }
    Ok(())
}

/// Definitional consistency: an unremovable energy must lie in the spectrum
/// of every periodic operator (`|Δ_p(E)| <= 2` for all orbits), a removable
/// one must fail both branches of the definition.
pub fn corollary_cross_check(
    candidates: &[ZeroCandidate],
    orbits: &[PeriodicOrbit],
    potential: &Potential,
    tol: f64,
) -> Result<()> {
    for cand in candidates {
        match cand.classification {
            Classification::UnremovableElliptic | Classification::UnremovableDegenerate => {
                for orbit in orbits {
                    let delta = DiscriminantPoly::new(orbit, potential)?.eval(cand.energy);
                    if delta.abs() > 2.0 + tol {
                        return Err(Error::Consistency(format!(
                            "E = {} classified unremovable but orbit {:?} has |Δ| = {}",
                            cand.energy,
                            orbit.word(),
                            delta.abs()
                        )));
                    }
                }
            }
            Classification::Removable => {
                let mut leaves = false;
                for orbit in orbits {
                    let delta = DiscriminantPoly::new(orbit, potential)?.eval(cand.energy);
                    if delta.abs() > 2.0 + tol {
                        leaves = true;
                        break;
                    }
                }
                if !leaves {
                    return Err(Error::Consistency(format!(
                        "E = {} classified removable but no orbit leaves its spectrum",
                        cand.energy
                    )));
                }
            }
            Classification::Inconclusive => {}
        }
    }
    Ok(())
}

/// Per-interval record inside a `JReport`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JInterval {
    pub lower: f64,
    pub upper: f64,
    /// `|(E_j, E_{j+1}) ∩ S|`
    pub s_measure: f64,
    pub n_j: u64,
    pub term: f64,
}

/// The interval functional built from the zero positions and the punctured
/// band union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JReport {
    pub e_lo: f64,
    pub e_hi: f64,
    pub lambda: f64,
    pub zeros: Vec<f64>,
    pub intervals: Vec<JInterval>,
    pub n_max: u64,
    pub complement_measure: f64,
    pub j_value: f64,
    pub truncation_max_period: Option<usize>,
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Evaluate the functional on a finite sorted zero set `U` and an interval
/// set `S`, over the window `E_lo = -5/2 - ‖V‖`, `E_hi = 5/2 + ‖V‖`.
pub fn compute_j(zeros: &[f64], s: &IntervalSet, sup_norm: f64) -> Result<JReport> {
    let e_lo = -2.5 - sup_norm;
    let e_hi = 2.5 + sup_norm;
    let lambda = e_hi - e_lo;
    for w in zeros.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Input("zero set must be strictly increasing".into()));
        }
    }
    if zeros.iter().any(|&e| e <= e_lo || e >= e_hi) {
        return Err(Error::Input(format!(
            "zero set must lie inside ({e_lo}, {e_hi})"
        )));
    }
    let l = zeros.len();
    let mut points = Vec::with_capacity(l + 2);
    points.push(e_lo);
    points.extend_from_slice(zeros);
    points.push(e_hi);
    let complement = lambda - s.restrict(e_lo, e_hi).measure();
    let mut intervals = Vec::with_capacity(l + 1);
    let mut n_values = Vec::with_capacity(l + 1);
    for w in points.windows(2) {
        let x = s.restrict(w[0], w[1]).measure();
        let n_j = if x == 0.0 {
            2
        } else {
            (2.0 * lambda / x).floor() as u64
        };
        n_values.push(n_j);
        intervals.push(JInterval {
            lower: w[0],
            upper: w[1],
            s_measure: x,
            n_j,
            term: 0.0,
        });
    }
    let n_max = *n_values.iter().max().unwrap();
    let mut j_value = 0.0;
    for rec in &mut intervals {
        let first = xlnx(rec.s_measure / lambda);
        let second = if complement <= 0.0 {
            0.0
        } else {
            complement / (lambda * (l + 1) as f64) * (complement / (n_max as f64 * lambda)).ln()
        };
        rec.term = first + second;
        j_value += rec.term;
    }
    Ok(JReport {
        e_lo,
        e_hi,
        lambda,
        zeros: zeros.to_vec(),
        intervals,
        n_max,
        complement_measure: complement,
        j_value,
        truncation_max_period: None,
    })
}

/// Positivity certificate for single-coordinate potentials: true iff the
/// potential has window radius zero, takes at least two distinct values on
/// live symbols, and the D-set chain condition holds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub holds: bool,
    pub radius_zero: bool,
    pub two_values: bool,
    pub d_sets_connected: bool,
    pub d_sets: Vec<Vec<usize>>,
}

pub fn positivity_certificate(
    system: &TransitionSystem,
    potential: &Potential,
) -> PositivityCertificate {
    let radius_zero = potential.radius() == 0;
    let two_values = if radius_zero {
        let mut values: Vec<f64> = potential
            .table()
            .iter()
            .filter(|(w, _)| system.is_alive(w[0]))
            .map(|(_, &v)| v)
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.windows(2).any(|w| w[1] - w[0] > 0.0)
    } else {
        false
    };
    let (d_sets, connected) = system.d_sets_and_connectivity();
    PositivityCertificate {
        holds: radius_zero && two_values && connected,
        radius_zero,
        two_values,
        d_sets_connected: connected,
        d_sets,
    }
}

/// Parameters of a monotonicity experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub max_period: usize,
    pub grid_points: usize,
    pub theta: f64,
    pub tol_delta: f64,
    pub estimator: EstimatorParams,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            max_period: 10,
            grid_points: DEFAULT_GRID_POINTS,
            theta: DEFAULT_THETA,
            tol_delta: TOL_DELTA,
            estimator: EstimatorParams::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
}

/// One side (super or sub) of an experiment, fully evaluated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemRun {
    pub s_measure: f64,
    pub s_set: IntervalSet,
    pub candidates: Vec<ZeroCandidate>,
    pub unremovable_energies: Vec<f64>,
    pub finite_zero_set: bool,
    pub n_value: u64,
    pub j_report: Option<JReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub params: ExperimentParams,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_step: f64,
    pub super_run: SystemRun,
    pub sub_run: SystemRun,
    pub assertions: Vec<Assertion>,
    pub all_passed: bool,
}

fn evaluate_system(
    system: &TransitionSystem,
    potential: &Potential,
    measure: &MarkovMeasure,
    grid: &[f64],
    params: &ExperimentParams,
) -> Result<(SystemRun, UnionS)> {
    let union = union_s(system, potential, params.max_period)?;
    let mut scan = scan_zero_candidates(
        potential,
        measure,
        grid,
        &params.estimator,
        params.theta,
    )?;
    let orbits: Vec<PeriodicOrbit> = union.per_orbit.iter().map(|o| o.orbit.clone()).collect();
    if !orbits.is_empty() {
        classify_candidates(&mut scan, &orbits, potential, params.tol_delta)?;
        corollary_cross_check(&scan.candidates, &orbits, potential, params.tol_delta)?;
    }
    let grid_width = grid.last().unwrap() - grid[0];
    let finite = scan
        .candidates
        .iter()
        .all(|c| c.cluster_width <= CLUSTER_WIDTH_FRACTION * grid_width);
    let unremovable: Vec<f64> = scan
        .candidates
        .iter()
        .filter(|c| c.classification.is_unremovable())
        .map(|c| c.energy)
        .collect();
    let j_report = if finite {
        let mut rep = compute_j(&unremovable, &union.set, potential.sup_norm())?;
        rep.truncation_max_period = Some(params.max_period);
        Some(rep)
    } else {
        None
    };
    let n_value = j_report.as_ref().map(|r| r.n_max).unwrap_or(0);
    Ok((
        SystemRun {
            s_measure: union.set.measure(),
            s_set: union.set.clone(),
            candidates: scan.candidates,
            unremovable_energies: unremovable,
            finite_zero_set: finite,
            n_value,
            j_report,
        },
        union,
    ))
}

/// Run the full monotonicity experiment for an embedding `sub ⊆ super` with
/// measures on each side and a shared potential.
pub fn run_monotonicity_experiment(
    embedding: &SubshiftEmbedding,
    measure_super: &MarkovMeasure,
    measure_sub: &MarkovMeasure,
    potential: &Potential,
    params: &ExperimentParams,
) -> Result<ExperimentReport> {
    if !embedding.is_valid() {
        return Err(Error::Input("invalid subshift embedding".into()));
    }
    measure_super.validate_measure(&embedding.super_sys)?;
    measure_sub.validate_measure(&embedding.sub)?;
    let sub_potential = potential.restrict_to(&embedding.sub)?;

    let sup_norm = potential.sup_norm();
    let (grid_lo, grid_hi) = (-2.5 - sup_norm, 2.5 + sup_norm);
    let n = params.grid_points.max(2);
    let grid_step = (grid_hi - grid_lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| grid_lo + grid_step * i as f64).collect();
    // keep candidate energies strictly inside the window so compute_j accepts
    // them: nudge the two boundary grid points inward
    let mut grid = grid;
    grid[0] += 1e-9;
    *grid.last_mut().unwrap() -= 1e-9;

    let (super_run, _) = evaluate_system(
        &embedding.super_sys,
        potential,
        measure_super,
        &grid,
        params,
    )?;
    let (sub_run, _) = evaluate_system(&embedding.sub, &sub_potential, measure_sub, &grid, params)?;

    let mut assertions = Vec::new();

    // (i) S(sub) ⊆ S(super) exactly
    let inclusion = sub_run.s_set.subset_of(&super_run.s_set, 1e-9);
    assertions.push(Assertion {
        name: "s-set-inclusion".into(),
        passed: inclusion,
        skipped: false,
        detail: format!(
            "measure sub {} vs super {}",
            sub_run.s_measure, super_run.s_measure
        ),
    });

    // (ii) every unremovable super candidate matched by an unremovable sub
    // candidate within one grid step
    let mut unmatched = Vec::new();
    for &e in &super_run.unremovable_energies {
        let matched = sub_run
            .unremovable_energies
            .iter()
            .any(|&f| (e - f).abs() <= grid_step + 1e-12);
        if !matched {
            unmatched.push(e);
        }
    }
    assertions.push(Assertion {
        name: "unremovable-persistence".into(),
        passed: unmatched.is_empty(),
        skipped: false,
        detail: if unmatched.is_empty() {
            format!(
                "{} super candidates all matched",
                super_run.unremovable_energies.len()
            )
        } else {
            format!("unmatched super energies: {unmatched:?}")
        },
    });

    let both_finite = super_run.finite_zero_set && sub_run.finite_zero_set;

    // (iii) N(sub) >= N(super)
    assertions.push(Assertion {
        name: "n-monotone".into(),
        passed: !both_finite || sub_run.n_value >= super_run.n_value,
        skipped: !both_finite,
        detail: format!(
            "N(sub) = {}, N(super) = {}",
            sub_run.n_value, super_run.n_value
        ),
    });

    // (iv) J(super) >= J(sub) - slack
    let slack = 1e-9 + grid_step;
    let (passed, skipped, detail) = match (&super_run.j_report, &sub_run.j_report) {
        (Some(a), Some(b)) if both_finite => (
            a.j_value >= b.j_value - slack,
            false,
            format!("J(super) = {}, J(sub) = {}", a.j_value, b.j_value),
        ),
        _ => (
            true,
            true,
            "skipped: zero-candidate cluster too wide, finiteness hypothesis fails".into(),
        ),
    };
    assertions.push(Assertion {
        name: "j-monotone".into(),
        passed,
        skipped,
        detail,
    });

    let all_passed = assertions.iter().all(|a| a.passed);
    Ok(ExperimentReport {
        params: params.clone(),
        grid_lo,
        grid_hi,
        grid_step,
        super_run,
        sub_run,
        assertions,
        all_passed,
    })
}
