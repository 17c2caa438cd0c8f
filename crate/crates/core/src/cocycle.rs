//! The Schrödinger cocycle: one-step matrices, renormalized products,
//! Lyapunov-exponent estimation, holonomies and elliptic fixed points.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::measure::MarkovMeasure;
use crate::symbolic::{PeriodicOrbit, Symbol, SymbolicPoint, TransitionSystem};

/// Renormalization cadence for long products.
pub const RENORM_EVERY: usize = 16;

/// A 2x2 real matrix; cocycle values have determinant 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Frobenius norm; for 2x2 it is within a factor sqrt(2) of the operator
    /// norm, which is all the renormalized product bookkeeping needs.
    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv_unimodular(&self) -> Mat2 {
        Mat2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2 {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    pub fn approx_eq(&self, o: &Mat2, tol: f64) -> bool {
        (self.a - o.a).abs() <= tol
            && (self.b - o.b).abs() <= tol
            && (self.c - o.c).abs() <= tol
            && (self.d - o.d).abs() <= tol
    }
}

/// One-step transfer matrix `[[E - v, -1], [1, 0]]`.
pub fn one_step_matrix(energy: f64, v: f64) -> Mat2 {
    Mat2::new(energy - v, -1.0, 1.0, 0.0)
}

/// A locally constant potential: a total table over allowed windows of
/// length `2r + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    radius: usize,
    table: HashMap<Vec<Symbol>, f64>,
    sup_norm: f64,
}

impl Potential {
    /// Build and check totality over all admissible windows of `system`.
    pub fn new(
        system: &TransitionSystem,
        radius: usize,
        table: HashMap<Vec<Symbol>, f64>,
    ) -> Result<Self> {
        let width = 2 * radius + 1;
        for key in table.keys() {
            if key.len() != width {
                return Err(Error::Input(format!(
                    "table key {key:?} has length {}, expected {width}",
                    key.len()
                )));
            }
            if !system.validate_word(key)? {
                return Err(Error::Input(format!(
                    "table key {key:?} is not an admissible word"
                )));
            }
        }
        for word in admissible_words(system, width) {
            if !table.contains_key(&word) {
                return Err(Error::Validation(format!(
                    "potential table missing admissible window {word:?}"
                )));
            }
        }
        let sup_norm = table
            .values()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        Ok(Self {
            radius,
            table,
            sup_norm,
        })
    }

    /// Radius-zero potential from per-symbol values.
    pub fn from_symbol_values(system: &TransitionSystem, values: &[f64]) -> Result<Self> {
        if values.len() != system.alphabet_size() {
            return Err(Error::Input("one value per symbol required".into()));
        }
        let table = values
            .iter()
            .enumerate()
            .map(|(s, &v)| (vec![s], v))
            .collect();
        Self::new(system, 0, table)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn table(&self) -> &HashMap<Vec<Symbol>, f64> {
        &self.table
    }

    /// Restrict the table to the windows admissible in `sub`.
    pub fn restrict_to(&self, sub: &TransitionSystem) -> Result<Potential> {
        let width = 2 * self.radius + 1;
        let mut table = HashMap::new();
        for word in admissible_words(sub, width) {
            let v = self.table.get(&word).ok_or_else(|| {
                Error::Validation(format!("window {word:?} admissible in sub but untabulated"))
            })?;
            table.insert(word, *v);
        }
        Potential::new(sub, self.radius, table)
    }

    /// `V(T^n ω)`: the table value at the window `ω_{n-r} .. ω_{n+r}`.
    pub fn eval(&self, omega: &SymbolicPoint, n: i64) -> Result<f64> {
        let r = self.radius as i64;
        let window = omega.window(n - r, n + r);
        self.table.get(&window).copied().ok_or_else(|| {
            Error::Numerical(format!(
                "internal: window {window:?} missing from potential table"
            ))
        })
    }

    /// Potential values along a finite sampled word: index `i` uses the
    /// window `w[i - r ..= i + r]`, so only `r <= i < len - r` are defined.
    pub fn eval_along_word(&self, word: &[Symbol]) -> Result<Vec<f64>> {
        let r = self.radius;
        if word.len() < 2 * r + 1 {
            return Err(Error::Input("word shorter than one window".into()));
        }
        word.windows(2 * r + 1)
            .map(|w| {
                self.table.get(w).copied().ok_or_else(|| {
                    Error::Numerical(format!("window {w:?} missing from potential table"))
                })
            })
            .collect()
    }

    /// Potential values over one period of a periodic orbit.
    pub fn eval_orbit(&self, orbit: &PeriodicOrbit) -> Result<Vec<f64>> {
        let point = orbit.point();
        (0..orbit.period() as i64)
            .map(|n| self.eval(&point, n))
            .collect()
    }
}

/// All admissible words of a given length (empty when `len == 0`).
pub fn admissible_words(system: &TransitionSystem, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    let mut word = Vec::with_capacity(len);
    fn rec(
        system: &TransitionSystem,
        len: usize,
        word: &mut Vec<Symbol>,
        out: &mut Vec<Vec<Symbol>>,
    ) {
        if word.len() == len {
            out.push(word.clone());
            return;
        }
        for s in 0..system.alphabet_size() {
            if !system.is_alive(s) {
                continue;
            }
            if let Some(&last) = word.last() {
                if !system.allowed(last, s) {
                    continue;
                }
            }
            word.push(s);
            rec(system, len, word, out);
            word.pop();
        }
    }
    rec(system, len, &mut word, &mut out);
    out
}

/// A renormalized product: the matrix is `exp(log_scale) * normalized`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledMat2 {
    pub normalized: Mat2,
    pub log_scale: f64,
}

impl ScaledMat2 {
    pub const IDENTITY: ScaledMat2 = ScaledMat2 {
        normalized: Mat2::IDENTITY,
        log_scale: 0.0,
    };

    /// `log ‖A‖` of the represented matrix.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + self.normalized.norm().ln()
    }

    /// Reconstruct the full matrix (may overflow for long products).
    pub fn to_mat(&self) -> Mat2 {
        self.normalized.scale(self.log_scale.exp())
    }
}

/// Renormalized left product of one-step matrices for the potential values
/// `vs[0], vs[1], ...` in cocycle order: `A(v[n-1]) ... A(v[0])`.
pub fn product_over_values(energy: f64, vs: &[f64]) -> ScaledMat2 {
    let mut m = Mat2::IDENTITY;
    let mut log_scale = 0.0f64;
    for (k, &v) in vs.iter().enumerate() {
        m = one_step_matrix(energy, v).mul(&m);
        if (k + 1) % RENORM_EVERY == 0 {
            let n = m.norm();
            m = m.scale(1.0 / n);
            log_scale += n.ln();
        }
    }
    ScaledMat2 {
        normalized: m,
        log_scale,
    }
}

/// `A_n(ω)` as a renormalized pair; `n = 0` is the identity and negative `n`
/// uses the inverse branch `[A_{-n}(T^n ω)]^{-1}`.
pub fn cocycle_product(
    energy: f64,
    potential: &Potential,
    omega: &SymbolicPoint,
    n: i64,
) -> Result<ScaledMat2> {
    if n == 0 {
        return Ok(ScaledMat2::IDENTITY);
    }
    if n > 0 {
        let vs: Vec<f64> = (0..n)
            .map(|k| potential.eval(omega, k))
            .collect::<Result<_>>()?;
        let prod = product_over_values(energy, &vs);
        check_det(&prod)?;
        Ok(prod)
    } else {
        let shifted = omega.shift(n);
        let vs: Vec<f64> = (0..-n)
            .map(|k| potential.eval(&shifted, k))
            .collect::<Result<_>>()?;
        let prod = product_over_values(energy, &vs);
        check_det(&prod)?;
        // the represented matrix e^s B has determinant one, so its inverse
        // is its adjugate e^s adj(B); adj(B) is as well scaled as B itself
        let inv = ScaledMat2 {
            normalized: prod.normalized.inv_unimodular(),
            log_scale: prod.log_scale,
        };
        Ok(inv)
    }
}

/// The represented determinant is `det(B) e^{2s}`, so unimodularity means
/// `det(B) = e^{-2s}`. Once `e^{-2s}` drops near the rounding floor of the
/// normalized entries the computed `det(B)` is pure cancellation noise, so
/// the drift is only checked while the accumulated scale is moderate.
fn check_det(prod: &ScaledMat2) -> Result<()> {
    let two_s = 2.0 * prod.log_scale;
    if two_s.abs() > 12.0 {
        return Ok(());
    }
    let det_b = prod.normalized.det();
    if det_b <= 0.0 {
        return Err(Error::Numerical(
            "renormalized product determinant lost its sign".into(),
        ));
    }
    // det(B) is computed by cancellation of terms of size ‖B‖², so its
    // achievable absolute accuracy is a few hundred ulps of that
    let drift = det_b.ln() + two_s;
    let noise_floor = 1e-13 * prod.normalized.norm().powi(2) * two_s.exp();
    if drift.abs() > 1e-6 + noise_floor {
        return Err(Error::Numerical(format!(
            "determinant drifted by e^{drift} in renormalized product"
        )));
    }
    Ok(())
}

/// A Lyapunov-exponent estimate at a fixed energy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LyapunovEstimate {
    pub energy: f64,
    pub value: f64,
    pub raw_mean: f64,
    pub std_error: f64,
    pub n_steps: usize,
    pub n_samples: usize,
}

/// Per-sample seed derivation for reproducible fan-out.
pub fn derive_seed(base_seed: u64, energy_index: u64, sample_index: u64) -> u64 {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    h.update(energy_index.to_le_bytes());
    h.update(sample_index.to_le_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().unwrap())
}

/// Monte-Carlo estimate of `L(A, μ)` by Kingman averaging along sampled
/// orbits. Values below zero (noise at `L = 0`) are clamped; the raw mean is
/// kept in the report.
pub fn estimate_lyapunov(
    energy: f64,
    potential: &Potential,
    measure: &MarkovMeasure,
    n_steps: usize,
    n_samples: usize,
    base_seed: u64,
    energy_index: u64,
) -> Result<LyapunovEstimate> {
    if n_steps < 1000 {
        return Err(Error::Input("n_steps must be at least 1000".into()));
    }
    if n_samples == 0 {
        return Err(Error::Input("n_samples must be positive".into()));
    }
    let r = potential.radius();
    let mut per_sample = Vec::with_capacity(n_samples);
    for s in 0..n_samples {
        let seed = derive_seed(base_seed, energy_index, s as u64);
        let word = measure.sample_orbit(n_steps + 2 * r, seed)?;
        let vs = potential.eval_along_word(&word)?;
        let prod = product_over_values(energy, &vs[..n_steps]);
        per_sample.push(prod.log_norm() / n_steps as f64);
    }
    let mean = per_sample.iter().sum::<f64>() / n_samples as f64;
    let var = if n_samples > 1 {
        per_sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n_samples - 1) as f64
    } else {
        0.0
    };
    Ok(LyapunovEstimate {
        energy,
        value: mean.max(0.0),
        raw_mean: mean,
        std_error: (var / n_samples as f64).sqrt(),
        n_steps,
        n_samples,
    })
}

/// Exact Lyapunov exponent of a periodic point from its discriminant:
/// zero on `|Δ| <= 2`, else `ln((|Δ| + sqrt(Δ² - 4)) / 2) / n_p`.
pub fn periodic_lyapunov(energy: f64, potential: &Potential, orbit: &PeriodicOrbit) -> Result<f64> {
    let delta = discriminant_value(energy, potential, orbit)?;
    let ad = delta.abs();
    if ad <= 2.0 {
        Ok(0.0)
    } else {
        Ok(((ad + (ad * ad - 4.0).sqrt()) / 2.0).ln() / orbit.period() as f64)
    }
}

/// Monodromy matrix `A_{n_p}(p)` evaluated numerically.
pub fn monodromy(energy: f64, potential: &Potential, orbit: &PeriodicOrbit) -> Result<Mat2> {
    let vs = potential.eval_orbit(orbit)?;
    let mut m = Mat2::IDENTITY;
    for &v in &vs {
        m = one_step_matrix(energy, v).mul(&m);
    }
    Ok(m)
}

/// `Δ_p(E) = Tr(A_{n_p}(p))` evaluated numerically.
pub fn discriminant_value(energy: f64, potential: &Potential, orbit: &PeriodicOrbit) -> Result<f64> {
    Ok(monodromy(energy, potential, orbit)?.trace())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolonomyKind {
    Stable,
    Unstable,
}

/// The stabilized holonomy matrix comparing cocycle frames along two points
/// with the same future (stable) or past (unstable).
#[derive(Debug, Clone, Copy)]
pub struct HolonomyMatrix {
    pub matrix: Mat2,
    pub kind: HolonomyKind,
    pub stabilization_index: i64,
}

/// `H^{s} = [A_n(ω')]^{-1} A_n(ω)` at `n = r` (stable) or `n = -r` (unstable).
/// For locally constant cocycles the product stabilizes exactly at the window
/// radius; the value at one step further is rechecked.
pub fn holonomy(
    energy: f64,
    potential: &Potential,
    omega: &SymbolicPoint,
    omega2: &SymbolicPoint,
    kind: HolonomyKind,
) -> Result<HolonomyMatrix> {
    match kind {
        HolonomyKind::Stable => {
            if !omega.same_future(omega2) {
                return Err(Error::Domain(
                    "stable holonomy requires ω' in the local stable set of ω".into(),
                ));
            }
        }
        HolonomyKind::Unstable => {
            if !omega.same_past(omega2) {
                return Err(Error::Domain(
                    "unstable holonomy requires ω' in the local unstable set of ω".into(),
                ));
            }
        }
    }
    let r = potential.radius() as i64;
    let n0 = match kind {
        HolonomyKind::Stable => r,
        HolonomyKind::Unstable => -r,
    };
    let at = |n: i64| -> Result<Mat2> {
        let an = cocycle_product(energy, potential, omega, n)?.to_mat();
        let an2 = cocycle_product(energy, potential, omega2, n)?.to_mat();
        Ok(an2.inv_unimodular().scale(1.0 / an2.det()).mul(&an))
    };
    let h = at(n0)?;
    let next = match kind {
        HolonomyKind::Stable => n0 + 1,
        HolonomyKind::Unstable => n0 - 1,
    };
    let h_next = at(next)?;
    if !h.approx_eq(&h_next, 1e-12 * (1.0 + h.norm())) {
        return Err(Error::Numerical(
            "holonomy failed to stabilize at the window radius".into(),
        ));
    }
    Ok(HolonomyMatrix {
        matrix: h,
        kind,
        stabilization_index: n0,
    })
}

/// A point of the closed upper half-plane together with the projective point
/// at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZPoint {
    Finite { re: f64, im: f64 },
    Infinity,
}

impl ZPoint {
    pub fn finite(re: f64, im: f64) -> Self {
        ZPoint::Finite { re, im }
    }

    pub fn approx_eq(&self, other: &ZPoint, tol: f64) -> bool {
        match (self, other) {
            (ZPoint::Infinity, ZPoint::Infinity) => true,
            (ZPoint::Finite { re: r1, im: i1 }, ZPoint::Finite { re: r2, im: i2 }) => {
                (r1 - r2).abs() <= tol && (i1 - i2).abs() <= tol
            }
            _ => false,
        }
    }
}

/// The unique upper-half-plane fixed point of the Möbius action of an
/// elliptic monodromy, i.e. the root of `c z² + (d - a) z - b = 0` with
/// positive imaginary part.
pub fn z_point(energy: f64, potential: &Potential, orbit: &PeriodicOrbit) -> Result<ZPoint> {
    let m = monodromy(energy, potential, orbit)?;
    elliptic_fixed_point(&m)
}

pub fn elliptic_fixed_point(m: &Mat2) -> Result<ZPoint> {
    let delta = m.trace();
    if delta.abs() >= 2.0 {
        return Err(Error::Domain(format!(
            "monodromy is not elliptic: |Δ| = {} >= 2",
            delta.abs()
        )));
    }
    let disc = 4.0 - delta * delta;
    if m.c.abs() < f64::EPSILON {
        // Upper triangular with |a + d| < 2 and ad = 1 is impossible over ℝ.
        return Err(Error::Numerical(
            "elliptic matrix with vanishing lower-left entry".into(),
        ));
    }
    Ok(ZPoint::finite(
        (m.a - m.d) / (2.0 * m.c),
        disc.sqrt() / (2.0 * m.c.abs()),
    ))
}

/// Möbius image `(a z + b) / (c z + d)`, projectively at infinity.
pub fn transport_z(z: &ZPoint, q: &Mat2) -> Result<ZPoint> {
    if (q.det() - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "transport matrix determinant {} is not 1",
            q.det()
        )));
    }
    Ok(match *z {
        ZPoint::Infinity => {
            if q.c.abs() < f64::EPSILON {
                ZPoint::Infinity
            } else {
                ZPoint::finite(q.a / q.c, 0.0)
            }
        }
        ZPoint::Finite { re, im } => {
            // (a z + b)(conj(c z + d)) / |c z + d|^2
            let nr = q.a * re + q.b;
            let ni = q.a * im;
            let dr = q.c * re + q.d;
            let di = q.c * im;
            let den = dr * dr + di * di;
            if den < f64::EPSILON * f64::EPSILON {
                ZPoint::Infinity
            } else {
                ZPoint::finite((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
            }
        }
    })
}
