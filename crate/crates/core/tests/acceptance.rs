//! Acceptance criteria, one line per criterion.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see
//! the report; the test fails if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use phs::borel::{self, FiniteUniverse, MatchedGrid, Refinement};
use phs::convergence::{self, StateSequence};
use phs::hilbert::{inner, normalize, random_unit_from, StateVector, UnitVector};
use phs::oracle::spectral_norms;
use phs::projector::{diff_eigenvalues, materialize, norm_bound_check, rho_n, rho_tr, PureState};
use phs::ray::{phase_align, phase_align_bound};
use phs::seed;
use phs::topology::{in_weak_nbhd, separate, verify_ball_identity};

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, title: &str, elapsed: Duration, o: &Outcome) -> bool {
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!(
        "[{tag}] {id:>2} {title}: {} ({:.2} s)",
        o.detail,
        elapsed.as_secs_f64()
    );
    o.pass
}

fn state<R: Rng>(rng: &mut R, dim: usize) -> PureState {
    PureState::new(random_unit_from(rng, dim).unwrap())
}

fn near<R: Rng>(rng: &mut R, p: &PureState, step: f64) -> PureState {
    let d = random_unit_from(rng, p.dim()).unwrap();
    let v = p
        .vector()
        .as_state()
        .add(&d.as_state().scale(Complex64::new(step, 0.0)))
        .unwrap();
    PureState::new(normalize(&v).unwrap())
}

fn metric_closed_forms() -> Outcome {
    let mut rng = seed::rng(101);
    let (mut worst_n, mut worst_tr) = (0.0f64, 0.0f64);
    let mut exact = true;
    let mut pairs = 0;
    for dim in [2, 3, 4, 8, 16, 64] {
        for _ in 0..1000 {
            let (p, q) = (state(&mut rng, dim), state(&mut rng, dim));
            let n = rho_n(&p, &q).unwrap();
            let tr = rho_tr(&p, &q).unwrap();
            exact &= tr == 2.0 * n;
            let o = spectral_norms(&materialize(&p).sub(&materialize(&q)).unwrap()).unwrap();
            worst_n = worst_n.max((n - o.operator_norm).abs());
            worst_tr = worst_tr.max((tr - o.trace_norm).abs());
            pairs += 1;
        }
    }
    Outcome {
        pass: worst_n <= 1e-10 && worst_tr <= 1e-10 && exact,
        detail: format!(
            "{pairs} pairs, max |Δρ_n| = {worst_n:.2e}, max |Δρ_tr| = {worst_tr:.2e}, ρ_tr = 2ρ_n exactly: {exact}"
        ),
    }
}

fn spectrum_structure() -> Outcome {
    let mut rng = seed::rng(102);
    let (mut worst_pair, mut worst_rest, mut worst_closed) = (0.0f64, 0.0f64, 0.0f64);
    for dim in [2, 4, 8, 16] {
        for _ in 0..100 {
            let (p, q) = (state(&mut rng, dim), state(&mut rng, dim));
            let s = spectral_norms(&materialize(&p).sub(&materialize(&q)).unwrap())
                .unwrap()
                .spectrum;
            let (lam, mu) = (s[0], s[dim - 1]);
            worst_pair = worst_pair.max((lam + mu).abs());
            for x in &s[1..dim - 1] {
                worst_rest = worst_rest.max(x.abs());
            }
            let (a, b) = diff_eigenvalues(&p, &q).unwrap();
            worst_closed = worst_closed.max((a - lam).abs()).max((b - mu).abs());
        }
    }
    Outcome {
        pass: worst_pair <= 1e-10 && worst_rest <= 1e-10 && worst_closed <= 1e-10,
        detail: format!(
            "400 pairs, max |λ₊ + λ₋| = {worst_pair:.2e}, max |other eigenvalue| = {worst_rest:.2e}, closed form gap {worst_closed:.2e}"
        ),
    }
}

fn continuity_bound() -> Outcome {
    let mut rng = seed::rng(103);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..10_000 {
        let dim = rng.random_range(2..=64);
        let phi = random_unit_from(&mut rng, dim).unwrap();
        // half Haar pairs, half close pairs with a random phase
        let psi = if i % 2 == 0 {
            random_unit_from(&mut rng, dim).unwrap()
        } else {
            let step = 10f64.powf(rng.random_range(-8.0..0.0));
            let theta: f64 = rng.random_range(0.0..0.1);
            near(&mut rng, &PureState::new(phi.clone()), step)
                .vector()
                .phase(Complex64::from_polar(1.0, theta))
        };
        let b = norm_bound_check(&phi, &psi).unwrap();
        worst = worst.max(b.lhs - b.rhs);
        if b.lhs > b.rhs + 1e-12 {
            violations += 1;
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("10000 pairs, {violations} violations, max ρ_n − ‖φ−ψ‖ = {worst:.2e}"),
    }
}

fn ball_identity() -> Outcome {
    let mut rng = seed::rng(104);
    let mut lines = Vec::new();
    let mut pass = true;
    for dim in [2, 4, 16] {
        for eps in [0.1, 0.5, 0.9] {
            let p = state(&mut rng, dim);
            let r = verify_ball_identity(&p, eps, 1000, rng.random()).unwrap();
            pass &= r.checked == 1000 && r.agreed == 1000;
            if !r.passed() {
                lines.push(format!(
                    "dim {dim} ε {eps}: {} disagreements",
                    r.violations.len()
                ));
            }
        }
    }
    Outcome {
        pass,
        detail: if lines.is_empty() {
            "9 (dim, ε) cells × 1000 samples, 100% agreement".into()
        } else {
            lines.join("; ")
        },
    }
}

fn hausdorff_separation() -> Outcome {
    let mut rng = seed::rng(105);
    let mut joint = 0;
    let mut centres_outside = 0;
    for i in 0..1000 {
        let dim = [2, 4, 16][i % 3];
        let (p1, p2) = (state(&mut rng, dim), state(&mut rng, dim));
        let sep = separate(&p1, &p2).unwrap();
        if !in_weak_nbhd(&p1, &sep.first).unwrap() || !in_weak_nbhd(&p2, &sep.second).unwrap() {
            centres_outside += 1;
        }
        for k in 0..1000 {
            let x = match k % 3 {
                0 => state(&mut rng, dim),
                1 => {
                    let s = rng.random_range(0.0..0.5);
                    near(&mut rng, &p1, s)
                }
                _ => {
                    let s = rng.random_range(0.0..0.5);
                    near(&mut rng, &p2, s)
                }
            };
            if in_weak_nbhd(&x, &sep.first).unwrap() && in_weak_nbhd(&x, &sep.second).unwrap() {
                joint += 1;
            }
        }
    }
    Outcome {
        pass: joint == 0 && centres_outside == 0,
        detail: format!("1000 pairs × 1000 probes, {joint} joint memberships, {centres_outside} centres outside"),
    }
}

fn counterexample() -> Outcome {
    let seq = convergence::orthonormal_counterexample(64, 64, 106).unwrap();
    let consecutive = seq
        .states()
        .windows(2)
        .map(|w| (rho_n(&w[0], &w[1]).unwrap() - 1.0).abs())
        .fold(0.0f64, f64::max);
    let haar = convergence::haar_probes(64, 32, 107).unwrap();
    let bessel = haar
        .iter()
        .map(|q| convergence::bessel_sum(&seq, q).unwrap())
        .fold(0.0f64, f64::max);
    let basis: Vec<UnitVector> = seq.states().iter().map(|p| p.vector().clone()).collect();
    let probes = convergence::l2_probes(&basis, 32, 108).unwrap();
    let vectors: Vec<UnitVector> = probes.iter().map(|p| p.vector().clone()).collect();
    let r = convergence::analyze(&seq, &probes, &vectors, 0.05, 16).unwrap();
    Outcome {
        pass: consecutive <= 1e-10 && bessel <= 1.0 + 1e-9 && r.weak.cauchy && !r.norm.cauchy,
        detail: format!(
            "dim 64, max |ρ_n − 1| = {consecutive:.2e}, max Bessel sum = {bessel:.6}, weak probe-cauchy = {}, norm cauchy = {}",
            r.weak.cauchy, r.norm.cauchy
        ),
    }
}

fn completeness() -> Outcome {
    let states = (1..=1000)
        .map(|k| {
            PureState::new(
                normalize(&StateVector::from_real(&[1.0, 1.0 / k as f64]).unwrap()).unwrap(),
            )
        })
        .collect();
    let seq = StateSequence::new(states, "tilted").unwrap();
    let c = convergence::completeness_check(&seq, 1e-2).unwrap();
    let target = materialize(&PureState::new(UnitVector::basis(2, 0).unwrap()));
    let gap = spectral_norms(&c.limit.sub(&target).unwrap())
        .unwrap()
        .operator_norm;
    Outcome {
        pass: c.is_pure
            && c.idempotency_residual <= 1e-4
            && c.trace_residual <= 1e-4
            && gap <= 2e-3,
        detail: format!(
            "is_pure = {}, idempotency {:.2e}, trace {:.2e}, ρ_n(limit, P_(1,0)) = {gap:.2e}",
            c.is_pure, c.idempotency_residual, c.trace_residual
        ),
    }
}

fn misra() -> Outcome {
    let grid = MatchedGrid::new(10).unwrap();
    let poor = grid.clone().with_sigma_m(vec![2]);
    let mut equal = 0;
    let mut wrong_direction = 0;
    let mut strictly_coarser = 0;
    for s in 0..20 {
        let u = FiniteUniverse::random(4, 20, seed::derive_indexed(109, "universe", s)).unwrap();
        let pts = u.points().to_vec();
        let r = borel::grid_check(&u, &grid, &pts, &pts).unwrap();
        if r.matched.equal && r.sigma_within_xi() {
            equal += 1;
        }
        for probes in [&pts[..], &pts[..1]] {
            let r = borel::grid_check(&u, &poor, &pts, probes).unwrap();
            for rep in [&r.matched, &r.augmented] {
                match rep.refinement {
                    Refinement::Equal => {}
                    Refinement::SigmaCoarser => strictly_coarser += 1,
                    Refinement::XiCoarser | Refinement::Incomparable => wrong_direction += 1,
                }
            }
        }
    }
    Outcome {
        pass: equal == 20 && wrong_direction == 0,
        detail: format!(
            "matched R = 10: {equal}/20 equal; impoverished m ∈ {{2}}: {strictly_coarser} Σ-coarser, {wrong_direction} reversed"
        ),
    }
}

fn phase_alignment() -> Outcome {
    let mut rng = seed::rng(110);
    let mut pairs = 0;
    let (mut grid_excess, mut bound_excess) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    while pairs < 1000 {
        let dim = rng.random_range(2..=64);
        let phi0 = random_unit_from(&mut rng, dim).unwrap();
        let phi = if rng.random_bool(0.5) {
            random_unit_from(&mut rng, dim).unwrap()
        } else {
            let s = rng.random_range(0.0..2.0);
            near(&mut rng, &PureState::new(phi0.clone()), s)
                .vector()
                .phase(Complex64::from_polar(
                    1.0,
                    rng.random_range(0.0..std::f64::consts::TAU),
                ))
        };
        if inner(phi.as_state(), phi0.as_state()).unwrap().norm() <= 0.1 {
            continue;
        }
        pairs += 1;
        let aligned = phase_align(&phi, &phi0).unwrap();
        let d = aligned.as_state().distance(phi0.as_state()).unwrap();
        for k in 0..1000 {
            let theta = std::f64::consts::TAU * k as f64 / 1000.0;
            let other = phi
                .phase(Complex64::from_polar(1.0, theta))
                .as_state()
                .distance(phi0.as_state())
                .unwrap();
            grid_excess = grid_excess.max(d - other);
        }
        let b = phase_align_bound(&phi, &phi0).unwrap();
        bound_excess = bound_excess.max(b.distance - b.bound);
    }
    Outcome {
        pass: grid_excess <= 1e-9 && bound_excess <= 1e-12,
        detail: format!(
            "1000 pairs, max (aligned − grid) = {grid_excess:.2e}, max (aligned − bound) = {bound_excess:.2e}"
        ),
    }
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_phs"))
            .args(["verify", "all", "--seed", "1"])
            .env_remove("PHS_SEED")
            .output()
            .expect("phs runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    Outcome {
        pass: same,
        detail: format!(
            "{} bytes, byte-identical: {same}, exit codes {:?} / {:?}",
            a.stdout.len(),
            a.status.code(),
            b.status.code()
        ),
    }
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, fn() -> Outcome, Option<f64>);
    let criteria: [Criterion; 10] = [
        (
            1,
            "metric closed forms vs dense oracle",
            metric_closed_forms,
            Some(60.0),
        ),
        (2, "spectrum of P − Q", spectrum_structure, None),
        (3, "continuity bound", continuity_bound, None),
        (4, "ball identity U(P;P;ε²) = K_ε(P)", ball_identity, None),
        (5, "Hausdorff separation", hausdorff_separation, None),
        (6, "orthonormal counterexample", counterexample, None),
        (7, "completeness echo", completeness, None),
        (8, "Misra equality on finite universes", misra, Some(30.0)),
        (9, "phase alignment", phase_alignment, None),
        (10, "determinism of verify all", determinism, None),
    ];
    println!();
    let mut failed = Vec::new();
    for (id, title, f, budget) in criteria {
        let start = Instant::now();
        let mut o = f();
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            if elapsed.as_secs_f64() >= limit {
                o.pass = false;
                o.detail.push_str(&format!(", over the {limit} s budget"));
            }
        }
        if !report(id, title, elapsed, &o) {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
