//! Stationary Markov measures on an SFT and seeded orbit sampling.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::symbolic::{Symbol, TransitionSystem};

const STOCHASTIC_TOL: f64 = 1e-12;

/// A stationary Markov measure: row-stochastic `P` with stationary vector `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    p: Vec<f64>,
    pi: Vec<f64>,
    n: usize,
}

/// Outcome of validating a measure against a transition system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureReport {
    pub ergodic: bool,
    pub full_support: bool,
}

impl MarkovMeasure {
    /// Build from a row-stochastic matrix, computing π.
    pub fn from_transition_matrix(p: Vec<Vec<f64>>) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(Error::Input("empty transition matrix".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in p.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "row {i} has length {} but matrix is {n}x{n}",
                    row.len()
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "row {i} of P sums to {sum}, not 1 (stochasticity violated)"
                )));
            }
            if row.iter().any(|&x| x < 0.0) {
                return Err(Error::Validation(format!("row {i} has a negative entry")));
            }
            flat.extend(row.iter().map(|&x| x / sum));
        }
        let pi = stationary_distribution_flat(&flat, n)?;
        Ok(Self { p: flat, pi, n })
    }

    /// Build with a supplied stationary vector (checked to residual 1e-12).
    pub fn with_stationary(p: Vec<Vec<f64>>, pi: Vec<f64>) -> Result<Self> {
        let m = Self::from_transition_matrix(p)?;
        if pi.len() != m.n {
            return Err(Error::Input("π has wrong length".into()));
        }
        let sum: f64 = pi.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || pi.iter().any(|&x| x < 0.0) {
            return Err(Error::Validation("π is not a probability vector".into()));
        }
        for j in 0..m.n {
            let pip: f64 = (0..m.n).map(|i| pi[i] * m.p[i * m.n + j]).sum();
            if (pip - pi[j]).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "πP ≠ π at component {j}: {pip} vs {}",
                    pi[j]
                )));
            }
        }
        Ok(Self { pi, ..m })
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn p(&self, i: Symbol, j: Symbol) -> f64 {
        self.p[i * self.n + j]
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Ergodicity (irreducibility of P on its support) and full support
    /// (support of P equals the allowed transitions of `system`).
    pub fn validate_measure(&self, system: &TransitionSystem) -> Result<MeasureReport> {
        if system.alphabet_size() != self.n {
            return Err(Error::Input("alphabet size mismatch".into()));
        }
        let mut full_support = true;
        for i in 0..self.n {
            for j in 0..self.n {
                let pos = self.p(i, j) > 0.0;
                if pos && !system.allowed(i, j) {
                    return Err(Error::Validation(format!(
                        "P[{i}][{j}] > 0 but the transition {i}->{j} is forbidden"
                    )));
                }
                if system.allowed(i, j) && system.is_alive(i) && system.is_alive(j) && !pos {
                    full_support = false;
                }
            }
        }
        let ergodic = support_irreducible(&self.p, self.n).is_ok();
        Ok(MeasureReport {
            ergodic,
            full_support,
        })
    }

    /// Sample a word of `length` symbols: first from π, then rows of P.
    /// Deterministic in (seed, measure, length).
    pub fn sample_orbit(&self, length: usize, seed: u64) -> Result<Vec<Symbol>> {
        if length == 0 {
            return Err(Error::Input("orbit length must be positive".into()));
        }
        support_irreducible(&self.p, self.n)
            .map_err(|c| Error::Ergodicity(format!("P is reducible; trapped component {c:?}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut word = Vec::with_capacity(length);
        let first = sample_index(&mut rng, &self.pi);
        word.push(first);
        for _ in 1..length {
            let prev = *word.last().unwrap();
            let row = &self.p[prev * self.n..(prev + 1) * self.n];
            word.push(sample_index(&mut rng, row));
        }
        Ok(word)
    }
}

fn sample_index(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // round-off tail
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Symbols reachable from `start` through positive entries of `p`.
fn reachable(p: &[f64], n: usize, start: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if p[i * n + j] > 0.0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// Ok when the chain has a unique closed communicating class: then π is
/// unique, its support is that class, and P restricted to the support is
/// irreducible. Err carries one of the competing closed classes otherwise.
fn support_irreducible(p: &[f64], n: usize) -> std::result::Result<(), Vec<usize>> {
    let reach: Vec<Vec<bool>> = (0..n).map(|s| reachable(p, n, s)).collect();
    let mut closed: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        // s is in a closed class iff everything it reaches can reach it back
        if (0..n).all(|t| !reach[s][t] || reach[t][s]) && !closed.iter().any(|c| c.contains(&s))
        {
            closed.push((0..n).filter(|&t| reach[s][t]).collect());
        }
    }
    if closed.len() > 1 {
        return Err(closed.swap_remove(0));
    }
    Ok(())
}

/// Unique stationary vector of a row-stochastic irreducible matrix.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    let mut flat = Vec::with_capacity(n * n);
    for row in p {
        flat.extend_from_slice(row);
    }
    stationary_distribution_flat(&flat, n)
}

fn stationary_distribution_flat(p: &[f64], n: usize) -> Result<Vec<f64>> {
    support_irreducible(p, n)
        .map_err(|c| Error::Ergodicity(format!("P is reducible; trapped component {c:?}")))?;
    let pi = if n <= 64 {
        stationary_linear_solve(p, n)?
    } else {
        stationary_power_iteration(p, n)
    };
    // residual check
    for j in 0..n {
        let pip: f64 = (0..n).map(|i| pi[i] * p[i * n + j]).sum();
        if (pip - pi[j]).abs() > STOCHASTIC_TOL.max(1e-12 * n as f64) {
            return Err(Error::Numerical(format!(
                "stationary residual too large at component {j}"
            )));
        }
    }
    Ok(pi)
}

/// Solve (P^T - I) π = 0 with Σπ = 1 by replacing one equation.
fn stationary_linear_solve(p: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = nalgebra::DVector::<f64>::zeros(n);
    for j in 0..n {
        for i in 0..n {
            a[(j, i)] = p[i * n + j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for i in 0..n {
        a[(n - 1, i)] = 1.0;
    }
    b[n - 1] = 1.0;
    let lu = a.lu();
    let x = lu
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular stationary system".into()))?;
    let mut pi: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
    let s: f64 = pi.iter().sum();
    for v in &mut pi {
        *v /= s;
    }
    Ok(pi)
}

fn stationary_power_iteration(p: &[f64], n: usize) -> Vec<f64> {
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let mut next = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += pi[i] * p[i * n + j];
            }
        }
        let diff: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if diff < 1e-15 {
            break;
        }
    }
    pi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_symmetric() {
        let pi = stationary_distribution(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-12 && (pi[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stationary_hand_solved() {
        let pi = stationary_distribution(&[vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0, 0.0]]).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-12);
        assert!((pi[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn stationary_identity_is_reducible() {
        let err = stationary_distribution(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::Ergodicity(_)));
    }

    #[test]
    fn validate_bernoulli_full_shift() {
        let m = MarkovMeasure::from_transition_matrix(vec![vec![0.5, 0.5], vec![0.5, 0.5]])
            .unwrap();
        let r = m.validate_measure(&TransitionSystem::full_shift(2)).unwrap();
        assert!(r.ergodic && r.full_support);
    }

    #[test]
    fn validate_degenerate_on_golden_mean() {
        let m = MarkovMeasure::from_transition_matrix(vec![vec![1.0, 0.0], vec![1.0, 0.0]])
            .unwrap();
        let r = m.validate_measure(&TransitionSystem::golden_mean()).unwrap();
        assert!(r.ergodic);
        assert!(!r.full_support);
    }

    #[test]
    fn stochasticity_rejected() {
        assert!(MarkovMeasure::from_transition_matrix(vec![vec![0.4, 0.5], vec![0.5, 0.5]])
            .is_err());
    }

    #[test]
    fn sampling_determinism_and_degenerate_chain() {
        let m = MarkovMeasure::from_transition_matrix(vec![vec![1.0]]).unwrap();
        assert_eq!(m.sample_orbit(5, 7).unwrap(), vec![0, 0, 0, 0, 0]);
        assert!(m.sample_orbit(0, 7).is_err());

        let m = MarkovMeasure::from_transition_matrix(vec![vec![0.3, 0.7], vec![0.6, 0.4]])
            .unwrap();
        let a = m.sample_orbit(1000, 42).unwrap();
        let b = m.sample_orbit(1000, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, m.sample_orbit(1000, 43).unwrap());
    }

    #[test]
    fn pair_frequencies_match_measure() {
        let p = vec![vec![0.3, 0.7], vec![0.6, 0.4]];
        let m = MarkovMeasure::from_transition_matrix(p.clone()).unwrap();
        let n = 1_000_000usize;
        let w = m.sample_orbit(n, 1234).unwrap();
        let mut pair = [[0usize; 2]; 2];
        let mut single = [0usize; 2];
        for k in 0..n - 1 {
            pair[w[k]][w[k + 1]] += 1;
            single[w[k]] += 1;
        }
        single[w[n - 1]] += 1;
        for i in 0..2 {
            let freq = single[i] as f64 / n as f64;
            let expect = m.pi()[i];
            // serial correlation inflates the variance a bit; 5σ of the iid bound
            let se = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!((freq - expect).abs() < 5.0 * se, "symbol {i}: {freq} vs {expect}");
            for j in 0..2 {
                let freq = pair[i][j] as f64 / (n - 1) as f64;
                let expect = m.pi()[i] * p[i][j];
                let se = (expect * (1.0 - expect) / n as f64).sqrt();
                assert!((freq - expect).abs() < 5.0 * se, "pair {i}{j}");
            }
        }
    }

    #[test]
    fn sampled_words_are_admissible() {
        let sys = TransitionSystem::golden_mean();
        let m = MarkovMeasure::from_transition_matrix(vec![vec![0.5, 0.5], vec![1.0, 0.0]])
            .unwrap();
        assert!(m.validate_measure(&sys).unwrap().full_support);
        let w = m.sample_orbit(10_000, 9).unwrap();
        assert!(sys.validate_word(&w).unwrap());
    }
}
