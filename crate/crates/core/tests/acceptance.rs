//! End-to-end acceptance suite. Each test prints a single PASS line with its
//! runtime; tolerances and budgets are asserted inline.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shiftlyap::cocycle::{
    cocycle_product, discriminant_value, elliptic_fixed_point, estimate_lyapunov, holonomy,
    monodromy, one_step_matrix, periodic_lyapunov, product_over_values, transport_z, HolonomyKind,
    Mat2, Potential,
};
use shiftlyap::intervals::IntervalSet;
use shiftlyap::measure::MarkovMeasure;
use shiftlyap::spectra::{union_s, DiscriminantPoly, TOL_DELTA};
use shiftlyap::symbolic::{PeriodicOrbit, SubshiftEmbedding, SymbolicPoint, TransitionSystem};
use shiftlyap::zeros::{
    compute_j, positivity_certificate, run_monotonicity_experiment, scan_zero_candidates,
    EstimatorParams, ExperimentParams,
};

fn report(name: &str, started: Instant) {
    println!("[PASS] {name} ({:.1} s)", started.elapsed().as_secs_f64());
}

fn full2() -> TransitionSystem {
    TransitionSystem::full_shift(2)
}

fn bernoulli2() -> MarkovMeasure {
    MarkovMeasure::from_transition_matrix(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
}

/// Closed form for the constant zero potential: L = ln((|E| + sqrt(E^2-4))/2)
/// outside [-2, 2], zero inside.
fn free_lyapunov(e: f64) -> f64 {
    let a = e.abs();
    if a <= 2.0 {
        0.0
    } else {
        ((a + (a * a - 4.0).sqrt()) / 2.0).ln()
    }
}

#[test]
fn constant_potential_oracle() {
    let t0 = Instant::now();
    let sys = full2();
    let v = Potential::from_symbol_values(&sys, &[0.0, 0.0]).unwrap();
    let mu = bernoulli2();
    for (i, &e) in [2.2, 2.5, 3.0, 4.0].iter().enumerate() {
        let est = estimate_lyapunov(e, &v, &mu, 100_000, 20, 1, i as u64).unwrap();
        let expect = free_lyapunov(e);
        assert!(
            (est.value - expect).abs() <= 0.02,
            "E = {e}: {} vs {expect}",
            est.value
        );
    }
    for (i, &e) in [-1.5, 0.3, 1.9].iter().enumerate() {
        let est = estimate_lyapunov(e, &v, &mu, 100_000, 20, 1, 100 + i as u64).unwrap();
        assert!(est.value <= 0.02, "E = {e}: {}", est.value);
    }
    assert!(t0.elapsed().as_secs_f64() < 30.0, "budget exceeded");
    report("constant-potential-oracle", t0);
}

#[test]
fn discriminant_oracle() {
    let t0 = Instant::now();
    let sys = full2();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let orbits = sys.enumerate_periodic_orbits(10).unwrap();
    for k in 0..20 {
        let orbit = &orbits[rng.gen_range(0..orbits.len())];
        let vals: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let v = Potential::from_symbol_values(&sys, &vals).unwrap();
        let poly = DiscriminantPoly::new(orbit, &v).unwrap();
        for _ in 0..10 {
            let e = rng.gen_range(-4.0..4.0);
            let numeric = discriminant_value(e, &v, orbit).unwrap();
            assert!(
                (poly.eval(e) - numeric).abs() <= 1e-8,
                "run {k}, orbit {:?}, E = {e}",
                orbit.word()
            );
        }
    }
    // Chebyshev identity for the constant potential: Δ = 2 T_n(E / 2)
    let v0 = Potential::from_symbol_values(&sys, &[0.0, 0.0]).unwrap();
    for n in 1..=8usize {
        let word: Vec<usize> = (0..n).map(|i| usize::from(i == n - 1 && n > 1)).collect();
        let orbit = PeriodicOrbit::new(&word).unwrap();
        let poly = DiscriminantPoly::new(&orbit, &v0).unwrap();
        for i in 0..=40 {
            let e = -4.0 + 0.2 * i as f64;
            let theta = e / 2.0;
            let cheb = if theta.abs() <= 1.0 {
                2.0 * (n as f64 * theta.acos()).cos()
            } else {
                let u = theta.abs() + (theta * theta - 1.0).sqrt();
                theta.signum().powi(n as i32) * (u.powi(n as i32) + u.powi(-(n as i32)))
            };
            assert!(
                (poly.eval(e) - cheb).abs() <= 1e-9 * (1.0 + cheb.abs()),
                "n = {n}, E = {e}: {} vs {cheb}",
                poly.eval(e)
            );
        }
    }
    report("discriminant-oracle", t0);
}

/// A random pair sub ⊆ super on three symbols, both containing the self loop
/// at symbol 0 so that neither prunes to nothing.
fn random_embedding_pair(rng: &mut ChaCha8Rng) -> (TransitionSystem, TransitionSystem) {
    loop {
        let n = 3usize;
        let mut sup = vec![false; n * n];
        let mut sub = vec![false; n * n];
        for i in 0..n * n {
            sup[i] = rng.gen_bool(0.7);
            sub[i] = sup[i] && rng.gen_bool(0.7);
        }
        sup[0] = true;
        sub[0] = true;
        let (Ok(sup), Ok(sub)) = (
            TransitionSystem::new(n, sup),
            TransitionSystem::new(n, sub),
        ) else {
            continue;
        };
        return (sub, sup);
    }
}

#[test]
fn s_set_monotonicity() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for k in 0..20 {
        let (sub, sup) = random_embedding_pair(&mut rng);
        let vals: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v_sup = Potential::from_symbol_values(&sup, &vals).unwrap();
        let v_sub = v_sup.restrict_to(&sub).unwrap();
        let union_sub = union_s(&sub, &v_sub, 8).unwrap();
        let union_sup = union_s(&sup, &v_sup, 8).unwrap();
        assert!(
            union_sub.set.subset_of(&union_sup.set, 1e-9),
            "pair {k}: S(sub) not contained in S(super)"
        );
    }
    assert!(t0.elapsed().as_secs_f64() < 10.0, "budget exceeded");
    report("s-set-monotonicity", t0);
}

#[test]
fn periodic_approximation() {
    let t0 = Instant::now();
    let sys = TransitionSystem::golden_mean();
    let v = Potential::from_symbol_values(&sys, &[0.5, 0.0]).unwrap();
    let mu =
        MarkovMeasure::from_transition_matrix(vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
    assert!(mu.validate_measure(&sys).unwrap().full_support);
    let orbits = sys.enumerate_periodic_orbits(14).unwrap();
    for i in 0..10u64 {
        let e = -3.0 + 6.0 * i as f64 / 9.0;
        let est = estimate_lyapunov(e, &v, &mu, 100_000, 20, 2, i).unwrap();
        let best = orbits
            .iter()
            .map(|p| (periodic_lyapunov(e, &v, p).unwrap() - est.value).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(best <= 0.1, "E = {e}: nearest periodic exponent off by {best}");
    }
    assert!(t0.elapsed().as_secs_f64() < 120.0, "budget exceeded");
    report("periodic-approximation", t0);
}

#[test]
fn positivity_section() {
    let t0 = Instant::now();
    let sys = full2();
    let v = Potential::from_symbol_values(&sys, &[0.0, 1.0]).unwrap();
    let mu = bernoulli2();
    let cert = positivity_certificate(&sys, &v);
    assert!(cert.holds, "{cert:?}");
    let lo = -3.5 + 1e-9;
    let hi = 3.5 - 1e-9;
    let grid: Vec<f64> = (0..101).map(|i| lo + (hi - lo) * i as f64 / 100.0).collect();
    let params = EstimatorParams {
        n_steps: 100_000,
        n_samples: 20,
        base_seed: 3,
    };
    let scan = scan_zero_candidates(&v, &mu, &grid, &params, 0.005).unwrap();
    assert!(scan.failures.is_empty());
    let min = scan
        .estimates
        .iter()
        .map(|e| e.value)
        .fold(f64::INFINITY, f64::min);
    assert!(min >= 0.005, "minimum estimated exponent {min}");
    assert!(
        scan.candidates.is_empty(),
        "θ-scan found {} candidates",
        scan.candidates.len()
    );
    assert!(t0.elapsed().as_secs_f64() < 120.0, "budget exceeded");
    report("positivity-section", t0);
}

struct Experiment {
    name: &'static str,
    embedding: SubshiftEmbedding,
    measure_super: MarkovMeasure,
    measure_sub: MarkovMeasure,
    potential: Potential,
}

fn bundled_corpus() -> Vec<Experiment> {
    let full = full2();
    let gm = TransitionSystem::golden_mean();
    let gm_measure =
        MarkovMeasure::from_transition_matrix(vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
    let absorbing = TransitionSystem::new(2, vec![true, false, true, true]).unwrap();
    let absorbing_measure =
        MarkovMeasure::from_transition_matrix(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
    let full3 = TransitionSystem::full_shift(3);
    let cyclic = TransitionSystem::new(
        3,
        vec![true, true, false, false, false, true, true, false, false],
    )
    .unwrap();
    let cyclic_measure = MarkovMeasure::from_transition_matrix(vec![
        vec![0.5, 0.5, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0],
    ])
    .unwrap();
    let third = 1.0 / 3.0;
    vec![
        Experiment {
            name: "golden-mean-in-full",
            embedding: SubshiftEmbedding {
                sub: gm.clone(),
                super_sys: full.clone(),
            },
            measure_super: bernoulli2(),
            measure_sub: gm_measure,
            potential: Potential::from_symbol_values(&full, &[0.5, 0.0]).unwrap(),
        },
        Experiment {
            name: "full-reflexive",
            embedding: SubshiftEmbedding {
                sub: full.clone(),
                super_sys: full.clone(),
            },
            measure_super: bernoulli2(),
            measure_sub: bernoulli2(),
            potential: Potential::from_symbol_values(&full, &[0.0, 1.0]).unwrap(),
        },
        Experiment {
            name: "fixed-point-in-full",
            embedding: SubshiftEmbedding {
                sub: absorbing,
                super_sys: full.clone(),
            },
            measure_super: bernoulli2(),
            measure_sub: absorbing_measure,
            potential: Potential::from_symbol_values(&full, &[0.3, 0.0]).unwrap(),
        },
        Experiment {
            name: "cyclic-in-full3",
            embedding: SubshiftEmbedding {
                sub: cyclic,
                super_sys: full3.clone(),
            },
            measure_super: MarkovMeasure::from_transition_matrix(vec![
                vec![third, third, third],
                vec![third, third, third],
                vec![third, third, third],
            ])
            .unwrap(),
            measure_sub: cyclic_measure,
            potential: Potential::from_symbol_values(&full3, &[0.0, 0.6, 1.0]).unwrap(),
        },
    ]
}

fn corpus_params() -> ExperimentParams {
    ExperimentParams {
        max_period: 6,
        grid_points: 101,
        theta: 0.01,
        tol_delta: TOL_DELTA,
        estimator: EstimatorParams {
            n_steps: 20_000,
            n_samples: 8,
            base_seed: 7,
        },
    }
}

#[test]
fn classifier_corollary_consistency() {
    let t0 = Instant::now();
    let params = corpus_params();
    for exp in bundled_corpus() {
        // the driver runs corollary_cross_check on both sides and surfaces
        // any inconsistency as an error
        run_monotonicity_experiment(
            &exp.embedding,
            &exp.measure_super,
            &exp.measure_sub,
            &exp.potential,
            &params,
        )
        .unwrap_or_else(|e| panic!("{}: {e}", exp.name));
    }
    report("classifier-corollary-consistency", t0);
}

#[test]
fn j_arithmetic_fixture() {
    let t0 = Instant::now();
    let s = IntervalSet::from_intervals(vec![(-2.0, 0.0), (0.0, 2.0)]);
    let rep = compute_j(&[], &s, 0.0).unwrap();
    assert!(
        (rep.j_value - (-0.639032)).abs() <= 1e-5,
        "J = {}",
        rep.j_value
    );
    report("j-arithmetic-fixture", t0);
}

#[test]
fn theorem_monotonicity_suite() {
    let t0 = Instant::now();
    let params = corpus_params();
    for exp in bundled_corpus() {
        let rep = run_monotonicity_experiment(
            &exp.embedding,
            &exp.measure_super,
            &exp.measure_sub,
            &exp.potential,
            &params,
        )
        .unwrap_or_else(|e| panic!("{}: {e}", exp.name));
        if !(rep.super_run.finite_zero_set && rep.sub_run.finite_zero_set) {
            continue;
        }
        for a in &rep.assertions {
            if a.name == "n-monotone" || a.name == "j-monotone" {
                assert!(a.passed || a.skipped, "{}: {} failed: {}", exp.name, a.name, a.detail);
            }
        }
    }
    // randomized synthetic refinements: adding zeros and shrinking S can only
    // decrease the functional, as long as the shrinkage respects the slope
    // condition (N + 1) x > τ with N taken from the coarse configuration
    let keep_left = |portion: &IntervalSet, target: f64| -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut acc = 0.0;
        for &(a, b) in portion.intervals() {
            let len = b - a;
            if acc + len <= target {
                out.push((a, b));
                acc += len;
            } else {
                let need = target - acc;
                if need > 0.0 {
                    out.push((a, a + need));
                }
                break;
            }
        }
        out
    };
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for k in 0..200 {
        let sup_norm = rng.gen_range(0.0..1.0);
        let (lo, hi) = (-2.5 - sup_norm, 2.5 + sup_norm);
        let lambda = hi - lo;
        let mut zeros: Vec<f64> = (0..rng.gen_range(0..4))
            .map(|_| rng.gen_range(lo + 0.01..hi - 0.01))
            .collect();
        zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
        zeros.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let mut pieces = Vec::new();
        for _ in 0..rng.gen_range(1..5) {
            let a = rng.gen_range(lo..hi);
            let b = rng.gen_range(lo..hi);
            if (a - b).abs() > 1e-3 {
                pieces.push((a.min(b), a.max(b)));
            }
        }
        let s = IntervalSet::from_intervals(pieces);
        let coarse = compute_j(&zeros, &s, sup_norm).unwrap();
        let n = coarse.n_max as f64;
        // shrink each interval's S-portion, keeping x' >= 2λ / (N + 1) so the
        // derivative of the j-th term stays nonnegative along the path
        let mut small = Vec::new();
        for rec in &coarse.intervals {
            if rec.s_measure <= 0.0 {
                continue;
            }
            let portion = s.restrict(rec.lower, rec.upper);
            let floor_x = (2.0 * lambda / (n + 1.0)).min(rec.s_measure);
            let target = floor_x + rng.gen_range(0.0..1.0) * (rec.s_measure - floor_x);
            small.extend(keep_left(&portion, target));
        }
        let s_small = IntervalSet::from_intervals(small);
        // refinement: keep all old zeros, insert extra ones
        let mut refined = zeros.clone();
        for _ in 0..rng.gen_range(1..3) {
            refined.push(rng.gen_range(lo + 0.01..hi - 0.01));
        }
        refined.sort_by(|a, b| a.partial_cmp(b).unwrap());
        refined.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let j_fine = compute_j(&refined, &s_small, sup_norm).unwrap().j_value;
        assert!(
            j_fine <= coarse.j_value + 1e-9,
            "pair {k}: J refined {j_fine} > J {}",
            coarse.j_value
        );
    }
    report("theorem-monotonicity-suite", t0);
}

#[test]
fn cocycle_invariants() {
    let t0 = Instant::now();

    // determinant over 10^6 renormalized steps of a bounded cocycle
    let vs = vec![0.0; 1_000_000];
    let prod = product_over_values(0.3, &vs);
    let drift = prod.normalized.det().ln() + 2.0 * prod.log_scale;
    assert!(drift.abs() <= 1e-6, "determinant drift e^{drift}");

    // cocycle identity A_{m+n}(ω) = A_n(T^m ω) A_m(ω)
    let sys = full2();
    let v = Potential::from_symbol_values(&sys, &[0.0, 1.0]).unwrap();
    let omega = SymbolicPoint::periodic(&[0, 1, 1, 0, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let m = rng.gen_range(-50i64..=50);
        let n = rng.gen_range(-50i64..=50);
        let e = rng.gen_range(-3.0..3.0);
        let lhs = cocycle_product(e, &v, &omega, m + n).unwrap().to_mat();
        let am = cocycle_product(e, &v, &omega, m).unwrap().to_mat();
        let an = cocycle_product(e, &v, &omega.shift(m), n).unwrap().to_mat();
        let rhs = an.mul(&am);
        assert!(
            lhs.approx_eq(&rhs, 1e-9 * (1.0 + am.norm() * an.norm())),
            "identity failed at m = {m}, n = {n}, E = {e}"
        );
    }

    // holonomy is the identity for radius-zero potentials
    let a = SymbolicPoint::new(vec![0], vec![1, 0], 0, vec![1]).unwrap();
    let b = SymbolicPoint::new(vec![1], vec![1, 0], 0, vec![1]).unwrap();
    let h = holonomy(1.3, &v, &a, &b, HolonomyKind::Stable).unwrap();
    assert!(h.matrix.approx_eq(&Mat2::IDENTITY, 1e-12));

    // elliptic fixed points: residual and transport along the orbit
    let v2 = Potential::from_symbol_values(&sys, &[0.0, 0.5]).unwrap();
    let orbits = sys.enumerate_periodic_orbits(5).unwrap();
    let mut checked = 0usize;
    for orbit in &orbits {
        for i in 0..=30 {
            let e = -1.5 + 0.1 * i as f64;
            let m = monodromy(e, &v2, orbit).unwrap();
            if m.trace().abs() >= 1.9 || m.c.abs() < 1e-6 {
                continue;
            }
            let z = elliptic_fixed_point(&m).unwrap();
            let shiftlyap::cocycle::ZPoint::Finite { re, im } = z else {
                panic!("finite fixed point expected");
            };
            let rr = m.c * (re * re - im * im) + (m.d - m.a) * re - m.b;
            let ri = m.c * (2.0 * re * im) + (m.d - m.a) * im;
            assert!(rr.abs() <= 1e-10 * (1.0 + m.norm()));
            assert!(ri.abs() <= 1e-10 * (1.0 + m.norm()));
            // A(p) moves Z(p) to Z(Tp): the fixed point of the rotated
            // monodromy A_0 M A_0^{-1}
            let a0 = one_step_matrix(e, v2.eval(&orbit.point(), 0).unwrap());
            let m_next = a0.mul(&m).mul(&a0.inv_unimodular());
            if m_next.c.abs() < 1e-6 {
                continue;
            }
            let z_next = elliptic_fixed_point(&m_next).unwrap();
            let moved = transport_z(&z, &a0).unwrap();
            assert!(
                moved.approx_eq(&z_next, 1e-9),
                "transport mismatch for {:?} at E = {e}",
                orbit.word()
            );
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} elliptic cases exercised");
    report("cocycle-invariants", t0);
}
