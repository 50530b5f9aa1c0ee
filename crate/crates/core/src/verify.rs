//! Seeded invariant suites behind `phs verify`.
//!
//! Each suite draws its randomness from the root seed through fixed labels,
//! so a suite's summary depends only on its own configuration. Summaries
//! contain counts and short failure descriptions and serialize to stable
//! JSON.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::borel::{self, FiniteUniverse, MatchedGrid, Refinement};
use crate::convergence::{self, StateSequence};
use crate::error::{Error, Result};
use crate::hilbert::{normalize, random_unit_from, StateVector, UnitVector};
use crate::oracle::spectral_norms;
use crate::projector::{self, materialize, rho_n, rho_tr, PureState};
use crate::ray::{phase_align_bound, phase_orbit_distance};
use crate::seed;
use crate::topology;

/// Metric oracle agreement tolerance.
pub const ORACLE_TOL: f64 = 1e-10;
const MAX_DETAILS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Metrics,
    Topology,
    Convergence,
    Sigma,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metrics" => Ok(Suite::Metrics),
            "topology" => Ok(Suite::Topology),
            "convergence" => Ok(Suite::Convergence),
            "sigma" => Ok(Suite::Sigma),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!("unknown suite `{other}`"))),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Metrics => "metrics",
            Suite::Topology => "topology",
            Suite::Convergence => "convergence",
            Suite::Sigma => "sigma",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Dimensions to test; `None` uses each suite's defaults.
    pub dims: Option<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
    /// Matched grid resolution for the sigma suite.
    pub grid: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dims: None,
            trials: 100,
            seed: seed::DEFAULT_SEED,
            grid: 10,
        }
    }
}

impl VerifyConfig {
    fn dims_or(&self, default: &[usize]) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| default.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseSummary {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub case: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub suite: String,
    pub cases: Vec<CaseSummary>,
    pub failures: Vec<Failure>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.failed == 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Accumulates pass/fail counts per case, in insertion order.
#[derive(Default)]
struct Tally {
    order: Vec<String>,
    counts: BTreeMap<String, (usize, usize)>,
    failures: Vec<Failure>,
}

impl Tally {
    fn check(&mut self, case: &str, ok: bool, detail: impl FnOnce() -> String) {
        if !self.counts.contains_key(case) {
            self.order.push(case.to_string());
        }
        let entry = self.counts.entry(case.to_string()).or_default();
        entry.0 += 1;
        if !ok {
            entry.1 += 1;
            if entry.1 <= MAX_DETAILS {
                self.failures.push(Failure {
                    case: case.to_string(),
                    detail: detail(),
                });
            }
        }
    }

    /// Records an error as a failed check.
    fn check_result<T>(&mut self, case: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(case, false, || format!("error: {e}"));
                None
            }
        }
    }

    fn finish(self, suite: &str) -> Summary {
        let cases = self
            .order
            .iter()
            .map(|name| {
                let (checked, failed) = self.counts[name];
                CaseSummary {
                    name: name.clone(),
                    checked,
                    failed,
                }
            })
            .collect();
        Summary {
            suite: suite.to_string(),
            cases,
            failures: self.failures,
        }
    }
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Summary {
    let mut t = Tally::default();
    match suite {
        Suite::Metrics => metrics(cfg, &mut t),
        Suite::Topology => topology_suite(cfg, &mut t),
        Suite::Convergence => convergence_suite(cfg, &mut t),
        Suite::Sigma => sigma(cfg, &mut t),
        Suite::All => {
            metrics(cfg, &mut t);
            topology_suite(cfg, &mut t);
            convergence_suite(cfg, &mut t);
            sigma(cfg, &mut t);
        }
    }
    t.finish(suite.name())
}

fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<PureState> {
    random_unit_from(rng, dim).map(PureState::new)
}

fn metrics(cfg: &VerifyConfig, t: &mut Tally) {
    for dim in cfg.dims_or(&[2, 3, 4, 8, 16, 64]) {
        for i in 0..cfg.trials {
            let mut rng = seed::rng(seed::derive_indexed(
                cfg.seed,
                &format!("metrics/{dim}"),
                i as u64,
            ));
            let Some((p, q, r)) = t.check_result(
                "draw",
                (|| {
                    Ok((
                        random_state(&mut rng, dim)?,
                        random_state(&mut rng, dim)?,
                        random_state(&mut rng, dim)?,
                    ))
                })(),
            ) else {
                continue;
            };
            let tag = || format!("dim {dim} trial {i}");
            let (n, tr) = (
                rho_n(&p, &q).unwrap_or(f64::NAN),
                rho_tr(&p, &q).unwrap_or(f64::NAN),
            );

            t.check("trace-is-twice-norm", tr == 2.0 * n, || {
                format!("{}: {tr} vs {n}", tag())
            });

            let diff = materialize(&p).sub(&materialize(&q));
            if let Some(norms) = t.check_result("oracle", diff.and_then(|d| spectral_norms(&d))) {
                let (dn, dtr) = (
                    (n - norms.operator_norm).abs(),
                    (tr - norms.trace_norm).abs(),
                );
                t.check("oracle", dn <= ORACLE_TOL && dtr <= ORACLE_TOL, || {
                    format!("{}: |Δρ_n| = {dn:e}, |Δρ_tr| = {dtr:e}", tag())
                });
                let s = &norms.spectrum;
                let (lam, mu) = (s[0], s[s.len() - 1]);
                let rest = s
                    .get(1..s.len().saturating_sub(1))
                    .unwrap_or(&[])
                    .iter()
                    .fold(0.0f64, |a, x| a.max(x.abs()));
                let shape = (lam + mu).abs() <= ORACLE_TOL
                    && (lam - n).abs() <= ORACLE_TOL
                    && (dim == 2 || rest <= ORACLE_TOL);
                t.check("spectrum-shape", shape, || {
                    format!("{}: spectrum {s:?}", tag())
                });
            }

            if let Some(b) = t.check_result(
                "continuity",
                projector::norm_bound_check(p.vector(), q.vector()),
            ) {
                t.check("continuity", b.holds, || {
                    format!("{}: {} > {}", tag(), b.lhs, b.rhs)
                });
            }

            let sym = (n - rho_n(&q, &p).unwrap_or(f64::NAN)).abs() <= 1e-15;
            let zero = rho_n(&p, &p).map(|d| d <= 1e-12).unwrap_or(false);
            let tri =
                n <= rho_n(&p, &r).unwrap_or(f64::NAN) + rho_n(&r, &q).unwrap_or(f64::NAN) + 1e-12;
            let h = p.h(&q);
            t.check(
                "metric-axioms",
                sym && zero && tri && (0.0..=1.0).contains(&h),
                || {
                    format!(
                        "{}: symmetric {sym}, zero {zero}, triangle {tri}, h {h}",
                        tag()
                    )
                },
            );

            if p.overlap(&q).norm() > 0.1 {
                let grid = phase_orbit_distance(q.vector(), p.vector(), 1000);
                let bound = phase_align_bound(q.vector(), p.vector());
                if let (Some(g), Some(b)) = (
                    t.check_result("phase-alignment", grid),
                    t.check_result("phase-alignment", bound),
                ) {
                    t.check(
                        "phase-alignment",
                        b.distance <= g + 1e-9 && b.distance <= b.bound + 1e-12,
                        || {
                            format!(
                                "{}: aligned {} grid {g} bound {}",
                                tag(),
                                b.distance,
                                b.bound
                            )
                        },
                    );
                }
            }
        }
    }
}

fn topology_suite(cfg: &VerifyConfig, t: &mut Tally) {
    let probes_per_pair = cfg.trials.max(1);
    for dim in cfg.dims_or(&[2, 4, 16]) {
        for (j, eps) in [0.1, 0.5, 0.9].into_iter().enumerate() {
            let s = seed::derive_indexed(cfg.seed, &format!("topology/ball/{dim}"), j as u64);
            let mut rng = seed::rng(s);
            let Some(p) = t.check_result("ball-identity", random_state(&mut rng, dim)) else {
                continue;
            };
            if let Some(rep) = t.check_result(
                "ball-identity",
                topology::verify_ball_identity(&p, eps, cfg.trials, s ^ 1),
            ) {
                for v in &rep.violations {
                    t.check("ball-identity", false, || {
                        format!("dim {dim} ε {eps}: sample {v}")
                    });
                }
                for _ in 0..rep.agreed {
                    t.check("ball-identity", true, String::new);
                }
            }
            let probes: Vec<PureState> = (0..4)
                .filter_map(|_| random_state(&mut rng, dim).ok())
                .collect();
            if let Some(rep) = t.check_result(
                "inclusion",
                topology::inclusion_check(&p, &probes, eps, cfg.trials, s ^ 2),
            ) {
                t.check("inclusion", rep.passed() && rep.checked > 0, || {
                    format!("dim {dim} ε {eps}: {} of {} in U", rep.agreed, rep.checked)
                });
            }
        }
        for i in 0..cfg.trials {
            let mut rng = seed::rng(seed::derive_indexed(
                cfg.seed,
                &format!("topology/separation/{dim}"),
                i as u64,
            ));
            let Some((p1, p2)) = t.check_result(
                "separation",
                (|| Ok((random_state(&mut rng, dim)?, random_state(&mut rng, dim)?)))(),
            ) else {
                continue;
            };
            let Some(sep) = t.check_result("separation", topology::separate(&p1, &p2)) else {
                continue;
            };
            let ok = topology::in_weak_nbhd(&p1, &sep.first).unwrap_or(false)
                && topology::in_weak_nbhd(&p2, &sep.second).unwrap_or(false);
            let mut joint = 0;
            for k in 0..probes_per_pair {
                // alternate Haar probes with probes close to either point
                let probe = match k % 3 {
                    0 => random_state(&mut rng, dim),
                    c => {
                        let base = if c == 1 { &p1 } else { &p2 };
                        let step = rng.random_range(0.0..0.5);
                        random_unit_from(&mut rng, dim)
                            .and_then(|d| {
                                base.vector()
                                    .as_state()
                                    .add(&d.as_state().scale(step.into()))
                            })
                            .and_then(|v| normalize(&v))
                            .map(PureState::new)
                    }
                };
                if let Ok(x) = probe {
                    if topology::in_weak_nbhd(&x, &sep.first).unwrap_or(true)
                        && topology::in_weak_nbhd(&x, &sep.second).unwrap_or(true)
                    {
                        joint += 1;
                    }
                }
            }
            t.check("separation", ok && joint == 0, || {
                format!("dim {dim} pair {i}: centres inside {ok}, joint members {joint}")
            });
        }
    }
}

fn convergence_suite(cfg: &VerifyConfig, t: &mut Tally) {
    const CE_DIM: usize = 64;
    const TOL: f64 = 0.05;
    let tail = convergence::DEFAULT_COMPLETENESS_TAIL;

    let s = seed::derive(cfg.seed, "convergence/counterexample");
    if let Some(seq) = t.check_result(
        "counterexample",
        convergence::orthonormal_counterexample(CE_DIM, CE_DIM, s),
    ) {
        let worst = seq
            .states()
            .windows(2)
            .map(|w| (w[0].dist(&w[1]) - 1.0).abs())
            .fold(0.0f64, f64::max);
        t.check("counterexample", worst <= 1e-10, || {
            format!("consecutive ρ_n off by {worst:e}")
        });
        if let Some(probes) = t.check_result("bessel", convergence::haar_probes(CE_DIM, 32, s ^ 1))
        {
            for (k, q) in probes.iter().enumerate() {
                let sum = convergence::bessel_sum(&seq, q).unwrap_or(f64::INFINITY);
                t.check("bessel", sum <= 1.0 + 1e-9, || {
                    format!("probe {k}: Σ h = {sum}")
                });
            }
        }
        let basis: Vec<UnitVector> = seq.states().iter().map(|p| p.vector().clone()).collect();
        let report = convergence::l2_probes(&basis, 32, s ^ 2).and_then(|probes| {
            let vectors: Vec<UnitVector> = probes.iter().map(|p| p.vector().clone()).collect();
            convergence::analyze(&seq, &probes, &vectors, TOL, tail)
        });
        if let Some(r) = t.check_result("counterexample", report) {
            let ok = r.weak.cauchy
                && !r.norm.cauchy
                && !r.norm.converges
                && r.norm.limit_candidate.is_none()
                && r.weak.limit_candidate.is_none()
                && r.is_consistent();
            t.check("counterexample", ok, || {
                format!(
                    "weak cauchy {}, norm cauchy {}",
                    r.weak.cauchy, r.norm.cauchy
                )
            });
        }
    }

    let tilted: Result<StateSequence> = (1..=1000)
        .map(|k| {
            let v = StateVector::from_real(&[1.0, 1.0 / k as f64])?;
            Ok(PureState::new(normalize(&v)?))
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|s| StateSequence::new(s, "tilted"));
    if let Some(seq) = t.check_result("completeness", tilted) {
        if let Some(c) = t.check_result("completeness", convergence::completeness_check(&seq, 1e-2))
        {
            let target = materialize(&PureState::new(UnitVector::basis(2, 0).expect("dim 2")));
            let gap = c
                .limit
                .sub(&target)
                .and_then(|d| spectral_norms(&d))
                .map(|n| n.operator_norm)
                .unwrap_or(f64::INFINITY);
            let ok = c.is_pure
                && c.idempotency_residual <= 1e-4
                && c.trace_residual <= 1e-4
                && gap <= 2e-3;
            t.check("completeness", ok, || {
                format!(
                    "pure {} idempotency {:e} trace {:e} gap {gap:e}",
                    c.is_pure, c.idempotency_residual, c.trace_residual
                )
            });
        }
        if let Some(seq) = t.check_result(
            "completeness",
            convergence::orthonormal_counterexample(8, 8, s ^ 3),
        ) {
            let rejected = matches!(
                convergence::completeness_check(&seq, 1e-2),
                Err(Error::NotCauchy { .. })
            );
            t.check("completeness", rejected, || {
                "orthonormal sequence accepted".into()
            });
        }
    }

    for dim in cfg.dims_or(&[2, 4, 16]) {
        let n_seq = cfg.trials.clamp(1, 20);
        for i in 0..n_seq {
            let mut rng = seed::rng(seed::derive_indexed(
                cfg.seed,
                &format!("convergence/ordering/{dim}"),
                i as u64,
            ));
            let Some(seq) =
                t.check_result("topology-ordering", ordering_sequence(&mut rng, dim, i))
            else {
                continue;
            };
            let probes = convergence::haar_probes(dim, 8, rng.random());
            let Some(probes) = t.check_result("topology-ordering", probes) else {
                continue;
            };
            let vectors: Vec<UnitVector> = probes.iter().map(|p| p.vector().clone()).collect();
            if let Some(r) = t.check_result(
                "topology-ordering",
                convergence::analyze(&seq, &probes, &vectors, 1e-3, 8),
            ) {
                t.check("topology-ordering", r.is_consistent(), || {
                    format!("dim {dim} sequence {i} ({})", seq.label())
                });
            }
            let limit = seq.last();
            let mut worst = f64::NEG_INFINITY;
            for p in seq.states() {
                let d = p.dist(limit);
                for q in &probes {
                    worst = worst.max((q.h(p) - q.h(limit)).abs() - d);
                }
            }
            t.check("weak-below-norm", worst <= 1e-12, || {
                format!("dim {dim} sequence {i}: excess {worst:e}")
            });
        }
    }
}

/// Mix of norm-convergent, slowly drifting and Haar random sequences.
fn ordering_sequence<R: Rng + ?Sized>(rng: &mut R, dim: usize, i: usize) -> Result<StateSequence> {
    let base = random_unit_from(rng, dim)?;
    let dir = random_unit_from(rng, dim)?;
    let len = 40;
    let states = (1..=len)
        .map(|k| match i % 3 {
            0 => {
                let c = 1.0 / (k * k) as f64;
                normalize(&base.as_state().add(&dir.as_state().scale(c.into()))?)
                    .map(PureState::new)
            }
            1 => {
                let c = 1.0 / k as f64;
                normalize(&base.as_state().add(&dir.as_state().scale(c.into()))?)
                    .map(PureState::new)
            }
            _ => random_state(rng, dim),
        })
        .collect::<Result<Vec<_>>>()?;
    let label = ["quadratic", "harmonic", "haar"][i % 3];
    StateSequence::new(states, label)
}

fn sigma(cfg: &VerifyConfig, t: &mut Tally) {
    const POINTS: usize = 20;
    let universes = cfg.trials.clamp(1, 20);
    for dim in cfg.dims_or(&[4]) {
        let grid = match MatchedGrid::new(cfg.grid) {
            Ok(g) => g,
            Err(e) => {
                t.check("misra-matched", false, || format!("error: {e}"));
                return;
            }
        };
        let poor = grid.clone().with_sigma_m(vec![2]);
        for i in 0..universes {
            let s = seed::derive_indexed(cfg.seed, &format!("sigma/{dim}"), i as u64);
            let Some(u) = t.check_result("misra-matched", FiniteUniverse::random(dim, POINTS, s))
            else {
                continue;
            };
            let pts = u.points().to_vec();

            if let Some(r) =
                t.check_result("misra-matched", borel::grid_check(&u, &grid, &pts, &pts))
            {
                t.check("misra-matched", r.matched.equal, || {
                    format!(
                        "dim {dim} universe {i}: {} vs {} atoms",
                        r.matched.atoms_xi.len(),
                        r.matched.atoms_sigma.len()
                    )
                });
                t.check("sigma-within-xi", r.sigma_within_xi(), || {
                    format!("dim {dim} universe {i}: {:?}", r.augmented.refinement)
                });
            }
            for (name, probes) in [
                ("misra-impoverished", &pts[..]),
                ("misra-restricted", &pts[..1]),
            ] {
                if let Some(r) = t.check_result(name, borel::grid_check(&u, &poor, &pts, probes)) {
                    let ok = matches!(
                        r.augmented.refinement,
                        Refinement::Equal | Refinement::SigmaCoarser
                    );
                    t.check(name, ok, || {
                        format!("dim {dim} universe {i}: {:?}", r.augmented.refinement)
                    });
                }
            }

            let gap = borel::min_gap(&u).unwrap_or(1.0);
            let m_max = (1.0 / gap).ceil().min(1e6) as u32 + 1;
            let mut sep = borel::GeneratorFamily::empty("h-preimages");
            for m in 2..=m_max {
                if let Some(g) = t.check_result(
                    "singleton-separation",
                    borel::h_generators(&u, &pts, &[1.0], m),
                ) {
                    sep.extend(&g);
                }
            }
            t.check(
                "singleton-separation",
                borel::atoms(&u, &sep).is_discrete(),
                || format!("dim {dim} universe {i}: m up to {m_max}"),
            );

            if let Some(mut g) = t.check_result("order-invariance", grid.xi_generators(&u, &pts)) {
                let before = borel::atoms(&u, &g);
                let mut rng = seed::rng(s ^ 1);
                g.sets.shuffle(&mut rng);
                if let Some(first) = g.sets.first().cloned() {
                    g.sets.push(first);
                }
                t.check("order-invariance", borel::atoms(&u, &g) == before, || {
                    format!("dim {dim} universe {i}")
                });
            }
        }
    }
}
