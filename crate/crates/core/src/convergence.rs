//! Sequence diagnostics in the weak, strong, norm and trace topologies.
//!
//! A finite sequence "converges" when its tail stays within `tol` of the last
//! element (the limit candidate) with a nonincreasing least-squares trend,
//! and is "Cauchy" when consecutive tail elements stay within `tol` of each
//! other. Weak residuals use finitely many probe functionals `h_Q`, so the
//! weak Cauchy verdict is probe-wise ("probe-Cauchy"): passing finitely many
//! probes does not imply Cauchy-ness in the full weak uniformity.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    check_dims, normalize, orthonormal_system, random_unit_from, StateVector, UnitVector,
};
use crate::oracle::{spectral_norms, HermitianMatrix};
use crate::projector::{diff_apply_norm, materialize, PureState};
use crate::seed;

/// Tail length used by [`completeness_check`].
pub const DEFAULT_COMPLETENESS_TAIL: usize = 16;

/// An ordered sequence of at least two pure states of a common dimension.
#[derive(Debug, Clone)]
pub struct StateSequence {
    dim: usize,
    states: Vec<PureState>,
    label: String,
}

impl StateSequence {
    pub fn new(states: Vec<PureState>, label: impl Into<String>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a sequence needs at least 2 states, got {}",
                states.len()
            )));
        }
        let dim = states[0].dim();
        for s in &states {
            check_dims(dim, s.dim())?;
        }
        Ok(Self {
            dim,
            states,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &PureState {
        self.states.last().expect("length >= 2")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Weak,
    Strong,
    Norm,
    Trace,
}

/// Verdict for one topology.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyVerdict {
    pub converges: bool,
    pub cauchy: bool,
    pub limit_candidate: Option<UnitVector>,
    /// Residuals of the tail elements against the limit candidate.
    pub residual_tail: Vec<f64>,
    /// Residuals between consecutive tail elements.
    pub cauchy_tail: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub weak: TopologyVerdict,
    pub strong: TopologyVerdict,
    pub norm: TopologyVerdict,
    pub trace: TopologyVerdict,
    pub probes: String,
    /// Kind of Cauchy check behind the weak verdict.
    pub weak_cauchy_kind: String,
    pub tol: f64,
    pub tail: usize,
}

impl ConvergenceReport {
    pub fn verdict(&self, t: Topology) -> &TopologyVerdict {
        match t {
            Topology::Weak => &self.weak,
            Topology::Strong => &self.strong,
            Topology::Norm => &self.norm,
            Topology::Trace => &self.trace,
        }
    }

    /// `norm ⇒ strong ⇒ weak`, `converges ⇒ cauchy` and `trace ≡ norm`.
    pub fn is_consistent(&self) -> bool {
        let chain = |f: fn(&TopologyVerdict) -> bool| {
            (!f(&self.norm) || f(&self.strong)) && (!f(&self.strong) || f(&self.weak))
        };
        let each = [&self.weak, &self.strong, &self.norm, &self.trace]
            .iter()
            .all(|v| !v.converges || v.cauchy);
        chain(|v| v.converges)
            && chain(|v| v.cauchy)
            && each
            && self.trace.converges == self.norm.converges
            && self.trace.cauchy == self.norm.cauchy
    }
}

/// Least-squares slope of `ys` against `0, 1, 2, …`.
fn trend_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

fn raw_verdict(residual_tail: Vec<f64>, cauchy_tail: Vec<f64>, threshold: f64) -> TopologyVerdict {
    let cauchy = cauchy_tail.iter().all(|&r| r < threshold);
    let settled = residual_tail.iter().all(|&r| r < threshold);
    let trending = trend_slope(&residual_tail) <= threshold / residual_tail.len() as f64;
    TopologyVerdict {
        converges: settled && trending && cauchy,
        cauchy,
        limit_candidate: None,
        residual_tail,
        cauchy_tail,
    }
}

fn max_weak(a: &PureState, b: &PureState, probes: &[PureState]) -> f64 {
    probes
        .iter()
        .map(|q| (q.h(a) - q.h(b)).abs())
        .fold(0.0, f64::max)
}

fn max_strong(a: &PureState, b: &PureState, vectors: &[UnitVector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for v in vectors {
        worst = worst.max(diff_apply_norm(a, b, v.as_state())?);
    }
    Ok(worst)
}

/// Classifies `seq` in each topology.
///
/// Weak residuals against the limit candidate `L` use `probes` together
/// with `h_L` itself; weak Cauchy residuals use only the fixed `probes`.
/// Strong residuals are `max ‖(P − P')ψ‖` over `probe_vectors`. The trace
/// threshold is `2·tol`, matching `ρ_tr = 2ρ_n`.
pub fn analyze(
    seq: &StateSequence,
    probes: &[PureState],
    probe_vectors: &[UnitVector],
    tol: f64,
    tail: usize,
) -> Result<ConvergenceReport> {
    if probes.is_empty() || probe_vectors.is_empty() {
        return Err(Error::EmptyProbes);
    }
    if tail == 0 || tail >= seq.len() {
        return Err(Error::TailTooLong {
            tail,
            length: seq.len(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    for q in probes {
        check_dims(seq.dim(), q.dim())?;
    }
    for v in probe_vectors {
        check_dims(seq.dim(), v.dim())?;
    }

    let states = seq.states();
    let n = states.len();
    let limit = seq.last();
    let window = &states[n - 1 - tail..];
    let mut weak_probes = probes.to_vec();
    weak_probes.push(limit.clone());

    let mut weak = (Vec::with_capacity(tail), Vec::with_capacity(tail));
    let mut strong = (Vec::with_capacity(tail), Vec::with_capacity(tail));
    let mut norm = (Vec::with_capacity(tail), Vec::with_capacity(tail));
    for pair in window.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        weak.0.push(max_weak(a, limit, &weak_probes));
        strong.0.push(max_strong(a, limit, probe_vectors)?);
        norm.0.push(a.dist(limit));
        weak.1.push(max_weak(a, b, probes));
        strong.1.push(max_strong(a, b, probe_vectors)?);
        norm.1.push(a.dist(b));
    }
    let trace = (
        norm.0.iter().map(|r| 2.0 * r).collect(),
        norm.1.iter().map(|r| 2.0 * r).collect(),
    );

    let mut weak = raw_verdict(weak.0, weak.1, tol);
    let mut strong = raw_verdict(strong.0, strong.1, tol);
    let norm = raw_verdict(norm.0, norm.1, tol);
    let trace = raw_verdict(trace.0, trace.1, 2.0 * tol);

    // norm convergence implies strong, and strong implies weak
    strong.converges |= norm.converges;
    strong.cauchy |= norm.cauchy;
    weak.converges |= strong.converges;
    weak.cauchy |= strong.cauchy;

    let mut verdicts = [weak, strong, norm, trace];
    let norm_cauchy = verdicts[2].cauchy;
    for v in &mut verdicts {
        // no limit is reported for sequences that are not norm-Cauchy: their
        // weak limit may lie outside the state space
        if v.converges && norm_cauchy {
            v.limit_candidate = Some(limit.vector().clone());
        }
    }
    let [weak, strong, norm, trace] = verdicts;
    Ok(ConvergenceReport {
        label: seq.label().to_string(),
        weak,
        strong,
        norm,
        trace,
        probes: format!(
            "{} probe states (+ limit candidate for convergence), {} probe vectors",
            probes.len(),
            probe_vectors.len()
        ),
        weak_cauchy_kind: "probe-cauchy".into(),
        tol,
        tail,
    })
}

/// Haar random probe states.
pub fn haar_probes(dim: usize, count: usize, seed: u64) -> Result<Vec<PureState>> {
    let mut rng = seed::rng(seed);
    (0..count)
        .map(|_| random_unit_from(&mut rng, dim).map(PureState::new))
        .collect()
}

/// Probe states with square-summable coefficients `z_k/(k+1)` along `basis`
/// (`z_k` standard complex Gaussian).
///
/// The coefficient profile does not depend on how many basis vectors are
/// kept, so these probes behave like fixed vectors of `ℓ²` under
/// truncation: their overlap with late basis vectors decays.
pub fn l2_probes(basis: &[UnitVector], count: usize, seed: u64) -> Result<Vec<PureState>> {
    let first = basis.first().ok_or(Error::EmptyProbes)?;
    let dim = first.dim();
    let mut rng = seed::rng(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for (k, e) in basis.iter().enumerate() {
            check_dims(dim, e.dim())?;
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let w = Complex64::new(re, im) / (k as f64 + 1.0);
            for (vi, ei) in v.iter_mut().zip(e.components()) {
                *vi += w * ei;
            }
        }
        out.push(PureState::new(normalize(&StateVector::new(v)?)?));
    }
    Ok(out)
}

/// Projectors onto an orthonormal system: weakly null, pairwise at norm
/// distance 1.
pub fn orthonormal_counterexample(dim: usize, length: usize, seed: u64) -> Result<StateSequence> {
    if length > dim {
        return Err(Error::LengthExceedsDim { length, dim });
    }
    let system = orthonormal_system(dim, length, seed)?;
    StateSequence::new(
        system.into_iter().map(PureState::new).collect(),
        "orthonormal-counterexample",
    )
}

/// `Σ_n h_Q(P_n)`; at most 1 for an orthonormal sequence.
pub fn bessel_sum(seq: &StateSequence, probe: &PureState) -> Result<f64> {
    check_dims(seq.dim(), probe.dim())?;
    Ok(seq.states().iter().map(|p| probe.h(p)).sum())
}

/// Candidate limit of a trace-Cauchy sequence and its distance from being a
/// pure state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub limit: HermitianMatrix,
    /// `‖A² − A‖` (operator norm).
    pub idempotency_residual: f64,
    /// `|tr A − 1|`.
    pub trace_residual: f64,
    pub is_pure: bool,
}

pub fn completeness_check(seq: &StateSequence, tol: f64) -> Result<CompletenessReport> {
    completeness_check_with_tail(seq, tol, DEFAULT_COMPLETENESS_TAIL.min(seq.len() - 1))
}

/// The limit candidate `A` is the entrywise mean of the materialized last
/// `tail + 1` elements.
pub fn completeness_check_with_tail(
    seq: &StateSequence,
    tol: f64,
    tail: usize,
) -> Result<CompletenessReport> {
    if tail == 0 || tail >= seq.len() {
        return Err(Error::TailTooLong {
            tail,
            length: seq.len(),
        });
    }
    let states = seq.states();
    let window = &states[states.len() - 1 - tail..];
    let residual = window
        .windows(2)
        .map(|w| 2.0 * w[0].dist(&w[1]))
        .fold(0.0, f64::max);
    if residual >= tol {
        return Err(Error::NotCauchy { residual, tol });
    }
    let mut sum = materialize(&window[0]);
    for p in &window[1..] {
        sum = sum.add(&materialize(p))?;
    }
    let limit = sum.scale(1.0 / window.len() as f64);
    let idempotency_residual = spectral_norms(&limit.square().sub(&limit)?)?.operator_norm;
    let trace_residual = (limit.trace() - 1.0).abs();
    Ok(CompletenessReport {
        is_pure: idempotency_residual < tol && trace_residual < tol,
        limit,
        idempotency_residual,
        trace_residual,
    })
}
