//! Membership predicates for the weak topology `T₀` (generated by the
//! transition-probability functions `h_Q`) and the norm topology `T_n`.
//!
//! All sets are open, so every comparison is strict.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{check_dims, normalize, random_unit_from};
use crate::projector::{rho_n, transition_probability, PureState};
use crate::ray::same_ray;
use crate::seed;

/// Open norm ball `K_ε(P) = {P̃ : ‖P̃ − P‖ < ε}`.
#[derive(Debug, Clone)]
pub struct MetricBall {
    pub center: PureState,
    pub epsilon: f64,
}

impl MetricBall {
    pub fn new(center: PureState, epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ball radius {epsilon} must be positive"
            )));
        }
        Ok(Self { center, epsilon })
    }
}

/// Weak neighborhood `U(P; Q₁,…,Q_n; ε)`:
/// all `P̃` with `|h_{Q_i}(P̃) − h_{Q_i}(P)| < ε` for every probe.
#[derive(Debug, Clone)]
pub struct WeakNeighborhood {
    pub center: PureState,
    pub probes: Vec<PureState>,
    pub epsilon: f64,
}

impl WeakNeighborhood {
    pub fn new(center: PureState, probes: Vec<PureState>, epsilon: f64) -> Result<Self> {
        if probes.is_empty() {
            return Err(Error::EmptyProbes);
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "neighborhood width {epsilon} must be positive"
            )));
        }
        for q in &probes {
            check_dims(center.dim(), q.dim())?;
        }
        Ok(Self {
            center,
            probes,
            epsilon,
        })
    }
}

/// A grid rational `num/den` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRational {
    pub num: u32,
    pub den: u32,
}

impl GridRational {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::InvalidParameter(format!(
                "{num}/{den} is not in [0, 1]"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn value(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

/// Index `(k, l, m)` of the base set `U_klm = {P : |tr{P Q_k} − q_l| < 1/m}`.
#[derive(Debug, Clone)]
pub struct BaseSetIndex {
    pub k: usize,
    pub probe: Arc<PureState>,
    pub q: GridRational,
    pub m: u32,
}

impl BaseSetIndex {
    pub fn new(k: usize, probe: Arc<PureState>, q: GridRational, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        Ok(Self { k, probe, q, m })
    }
}

pub fn in_ball(p: &PureState, ball: &MetricBall) -> Result<bool> {
    Ok(rho_n(p, &ball.center)? < ball.epsilon)
}

pub fn in_weak_nbhd(p: &PureState, u: &WeakNeighborhood) -> Result<bool> {
    let mut worst = 0.0f64;
    for q in &u.probes {
        let d = (transition_probability(p, q)? - transition_probability(&u.center, q)?).abs();
        worst = worst.max(d);
    }
    Ok(worst < u.epsilon)
}

pub fn in_base_set(p: &PureState, idx: &BaseSetIndex) -> Result<bool> {
    let h = transition_probability(p, &idx.probe)?;
    Ok((h - idx.q.value()).abs() < 1.0 / f64::from(idx.m))
}

/// Disjoint weak neighborhoods of two distinct states.
///
/// With `ε = 1 − h_{P₁}(P₂)` and threshold `t = 1 − ε/2`:
/// `U₁ = U(P₁; P₁; ε/2) = {h_{P₁} > t}` and
/// `U₂ = U(P₂; P₁; ε/2) = {1 − 3ε/2 < h_{P₁} < t}`.
#[derive(Debug, Clone)]
pub struct Separation {
    pub first: WeakNeighborhood,
    pub second: WeakNeighborhood,
    pub threshold: f64,
}

pub fn separate(p1: &PureState, p2: &PureState) -> Result<Separation> {
    check_dims(p1.dim(), p2.dim())?;
    if same_ray(p1.vector().as_state(), p2.vector().as_state())? {
        return Err(Error::EqualStates);
    }
    let eps = 1.0 - transition_probability(p2, p1)?;
    let half = eps / 2.0;
    Ok(Separation {
        first: WeakNeighborhood::new(p1.clone(), vec![p1.clone()], half)?,
        second: WeakNeighborhood::new(p2.clone(), vec![p1.clone()], half)?,
        threshold: 1.0 - half,
    })
}

/// Outcome of a sampled set-identity or inclusion check.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checked: usize,
    pub agreed: usize,
    pub violations: Vec<usize>,
}

impl Report {
    fn record(&mut self, index: usize, ok: bool) {
        self.checked += 1;
        if ok {
            self.agreed += 1;
        } else {
            self.violations.push(index);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.agreed == self.checked
    }
}

/// Random state near `center`: the centre pushed a distance `step` along a
/// random direction, then renormalized.
fn perturb<R: Rng + ?Sized>(rng: &mut R, center: &PureState, step: f64) -> Result<PureState> {
    let dir = random_unit_from(rng, center.dim())?;
    let v = center
        .vector()
        .as_state()
        .add(&dir.as_state().scale(num_complex::Complex64::new(step, 0.0)))?;
    Ok(PureState::new(normalize(&v)?))
}

/// Sample `i` for the ball checks: sample 0 is the centre itself, odd samples
/// are Haar random, even samples sit at random distances up to `3ε` from the
/// centre so both sides of the ball boundary are exercised.
fn ball_sample<R: Rng + ?Sized>(
    rng: &mut R,
    p: &PureState,
    eps: f64,
    i: usize,
) -> Result<PureState> {
    if i == 0 {
        Ok(p.clone())
    } else if i % 2 == 1 {
        Ok(PureState::new(random_unit_from(rng, p.dim())?))
    } else {
        let step = rng.random_range(0.0..3.0 * eps);
        perturb(rng, p, step)
    }
}

/// Samples `P̃` and checks `P̃ ∈ U(P; P; ε²) ⇔ P̃ ∈ K_ε(P)`.
pub fn verify_ball_identity(p: &PureState, eps: f64, samples: usize, seed: u64) -> Result<Report> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside (0, 1]")));
    }
    let weak = WeakNeighborhood::new(p.clone(), vec![p.clone()], eps * eps)?;
    let ball = MetricBall::new(p.clone(), eps)?;
    let mut rng = seed::rng(seed);
    let mut report = Report::default();
    for i in 0..samples {
        let s = ball_sample(&mut rng, p, eps, i)?;
        report.record(i, in_weak_nbhd(&s, &weak)? == in_ball(&s, &ball)?);
    }
    Ok(report)
}

/// Samples `P̃ ∈ K_ε(P)` and checks `P̃ ∈ U(P; Q₁,…,Q_n; ε)`.
///
/// `checked` counts in-ball samples only; at most `50·samples` candidates are
/// drawn.
pub fn inclusion_check(
    p: &PureState,
    probes: &[PureState],
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    let weak = WeakNeighborhood::new(p.clone(), probes.to_vec(), eps)?;
    let ball = MetricBall::new(p.clone(), eps)?;
    let mut rng = seed::rng(seed);
    let mut report = Report::default();
    let mut drawn = 0;
    while report.checked < samples && drawn < 50 * samples.max(1) {
        let candidate = if drawn == 0 {
            p.clone()
        } else if eps >= 1.0 {
            PureState::new(random_unit_from(&mut rng, p.dim())?)
        } else {
            let step = rng.random_range(0.0..eps);
            perturb(&mut rng, p, step)?
        };
        drawn += 1;
        if in_ball(&candidate, &ball)? {
            let idx = report.checked;
            report.record(idx, in_weak_nbhd(&candidate, &weak)?);
        }
    }
    Ok(report)
}

/// Random probe states `Q_1..Q_k_max`, deterministic in `seed`.
pub fn base_probes(dim: usize, k_max: usize, seed: u64) -> Result<Vec<Arc<PureState>>> {
    let mut rng = seed::rng(seed);
    (0..k_max)
        .map(|_| random_unit_from(&mut rng, dim).map(|u| Arc::new(PureState::new(u))))
        .collect()
}

/// Finite truncation of the countable base: `k_max` random probes,
/// `q ∈ {0, 1/l_max, …, 1}`, `m ∈ {1, …, m_max}`.
pub fn sample_base(
    dim: usize,
    k_max: usize,
    l_max: u32,
    m_max: u32,
    seed: u64,
) -> Result<Vec<BaseSetIndex>> {
    if k_max == 0 || l_max == 0 || m_max == 0 {
        return Err(Error::InvalidParameter(
            "base bounds must be at least 1".into(),
        ));
    }
    let probes = base_probes(dim, k_max, seed)?;
    let mut out = Vec::with_capacity(k_max * (l_max as usize + 1) * m_max as usize);
    for (k, probe) in probes.iter().enumerate() {
        for l in 0..=l_max {
            for m in 1..=m_max {
                out.push(BaseSetIndex::new(
                    k,
                    Arc::clone(probe),
                    GridRational::new(l, l_max)?,
                    m,
                )?);
            }
        }
    }
    Ok(out)
}

/// Open interval `(lo, hi)` of the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// Looks for a base set `U_klm` with `P ∈ U_klm ⊆ h_Q⁻¹(O)`.
///
/// Inclusion is certified rather than sampled: since
/// `|h_Q(P̃) − h_{Q_k}(P̃)| ≤ ‖Q − Q_k‖`, every `P̃ ∈ U_klm` has
/// `h_Q(P̃) ∈ (q_l − 1/m − δ, q_l + 1/m + δ)` with `δ = ρ_n(Q, Q_k)`, and it
/// suffices that this widened interval lies inside `O`.
pub fn covering_base_set(
    p: &PureState,
    q: &PureState,
    interval: Interval,
    probes: &[Arc<PureState>],
    l_max: u32,
    m_max: u32,
) -> Result<Option<(usize, u32, u32)>> {
    check_dims(p.dim(), q.dim())?;
    let lf = f64::from(l_max);
    for (k, probe) in probes.iter().enumerate() {
        check_dims(p.dim(), probe.dim())?;
        let delta = rho_n(q, probe)?;
        let hk = transition_probability(p, probe)?;
        for m in 1..=m_max {
            let r = 1.0 / f64::from(m);
            // need |hk − q_l| < r and [q_l − r − δ, q_l + r + δ] ⊆ (lo, hi)
            let lo = (hk - r).max(interval.lo + r + delta);
            let hi = (hk + r).min(interval.hi - r - delta);
            if lo >= hi {
                continue;
            }
            let first = (lo * lf).floor().max(0.0) as u32;
            let last = ((hi * lf).ceil() as u32).min(l_max);
            for l in first..=last {
                let ql = f64::from(l) / lf;
                if (hk - ql).abs() < r
                    && interval.lo < ql - r - delta
                    && ql + r + delta < interval.hi
                {
                    return Ok(Some((k, l, m)));
                }
            }
        }
    }
    Ok(None)
}
