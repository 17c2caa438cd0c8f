//! Discriminants of periodic orbits as exact polynomials, spectral bands,
//! and the union of punctured band interiors over all short orbits.

use crate::cocycle::{discriminant_value, Potential};
use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::poly::{solve_level_set, Poly, Root};
use crate::symbolic::{PeriodicOrbit, TransitionSystem};

/// Energies with `|Δ| ∈ {0, 2}` within this tolerance count as level-set
/// members for classification purposes.
pub const TOL_DELTA: f64 = 1e-6;

/// The trace of the monodromy as a monic polynomial in the energy.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantPoly {
    poly: Poly,
    orbit: PeriodicOrbit,
}

/// 2x2 matrix of polynomials, used only to carry the symbolic monodromy.
#[derive(Clone)]
struct PolyMat2 {
    a: Poly,
    b: Poly,
    c: Poly,
    d: Poly,
}

impl PolyMat2 {
    fn identity() -> Self {
        Self {
            a: Poly::constant(1.0),
            b: Poly::zero(),
            c: Poly::zero(),
            d: Poly::constant(1.0),
        }
    }

    fn mul(&self, o: &PolyMat2) -> PolyMat2 {
        PolyMat2 {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }
}

impl DiscriminantPoly {
    /// `Δ_p(E) = Tr(A(T^{n_p - 1} p) ⋯ A(p))` with polynomial entries.
    pub fn new(orbit: &PeriodicOrbit, potential: &Potential) -> Result<Self> {
        let vs = potential.eval_orbit(orbit)?;
        let mut m = PolyMat2::identity();
        for &v in &vs {
            // one-step matrix [[E - v, -1], [1, 0]]
            let step = PolyMat2 {
                a: Poly::new(vec![-v, 1.0]),
                b: Poly::constant(-1.0),
                c: Poly::constant(1.0),
                d: Poly::zero(),
            };
            m = step.mul(&m);
        }
        let mut coeffs = m.a.add(&m.d).coeffs().to_vec();
        // the leading coefficient is a product of exact ones; pin it
        if coeffs.len() != orbit.period() + 1 {
            return Err(Error::Numerical(format!(
                "discriminant degree {} but period {}",
                coeffs.len().saturating_sub(1),
                orbit.period()
            )));
        }
        *coeffs.last_mut().unwrap() = 1.0;
        Ok(Self {
            poly: Poly::new(coeffs),
            orbit: orbit.clone(),
        })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn orbit(&self) -> &PeriodicOrbit {
        &self.orbit
    }

    pub fn eval(&self, energy: f64) -> f64 {
        self.poly.eval(energy)
    }

    /// Cross-check against the numerically multiplied monodromy.
    pub fn check_against_numeric(
        &self,
        potential: &Potential,
        energies: &[f64],
        tol: f64,
    ) -> Result<()> {
        for &e in energies {
            let numeric = discriminant_value(e, potential, &self.orbit)?;
            if (self.eval(e) - numeric).abs() > tol {
                return Err(Error::Numerical(format!(
                    "discriminant mismatch at E={e}: poly {} vs trace {numeric}",
                    self.eval(e)
                )));
            }
        }
        Ok(())
    }

    pub fn solve_level_set(&self, c: f64) -> Result<Vec<Root>> {
        solve_level_set(&self.poly, c)
    }

    /// The spectrum `σ(H_p) = {|Δ| <= 2}` as closed bands, and the punctured
    /// band interiors `s = {Δ ∈ (-2,0) ∪ (0,2)}` as open intervals split at
    /// the roots of `Δ`.
    pub fn band_and_s_sets(&self) -> Result<(IntervalSet, IntervalSet)> {
        let mut breaks: Vec<f64> = Vec::new();
        for c in [-2.0, 0.0, 2.0] {
            for r in self.solve_level_set(c)? {
                breaks.push(r.value);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
        let mut band_pieces: Vec<(f64, f64)> = Vec::new();
        let mut s_pieces: Vec<(f64, f64)> = Vec::new();
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            if self.eval(mid).abs() < 2.0 {
                s_pieces.push((lo, hi));
                // bands are closed: merge across any interior breakpoint
                match band_pieces.last_mut() {
                    Some(&mut (_, ref mut end)) if *end == lo => *end = hi,
                    _ => band_pieces.push((lo, hi)),
                }
            }
        }
        Ok((
            IntervalSet::from_intervals(band_pieces),
            IntervalSet::from_intervals(s_pieces),
        ))
    }
}

/// Per-orbit provenance inside a truncated 𝔖 computation.
#[derive(Debug, Clone)]
pub struct OrbitSpectrum {
    pub orbit: PeriodicOrbit,
    pub discriminant: DiscriminantPoly,
    pub bands: IntervalSet,
    pub s_set: IntervalSet,
}

/// The union of punctured band interiors over all orbits of period up to
/// `max_period`, with per-orbit provenance.
#[derive(Debug, Clone)]
pub struct UnionS {
    pub set: IntervalSet,
    pub per_orbit: Vec<OrbitSpectrum>,
    pub max_period: usize,
}

pub fn union_s(
    system: &TransitionSystem,
    potential: &Potential,
    max_period: usize,
) -> Result<UnionS> {
    let orbits = system.enumerate_periodic_orbits(max_period)?;
    let mut set = IntervalSet::empty();
    let mut per_orbit = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let discriminant = DiscriminantPoly::new(&orbit, potential)?;
        let (bands, s_set) = discriminant.band_and_s_sets()?;
        set = set.union(&s_set);
        per_orbit.push(OrbitSpectrum {
            orbit,
            discriminant,
            bands,
            s_set,
        });
    }
    Ok(UnionS {
        set,
        per_orbit,
        max_period,
    })
}
