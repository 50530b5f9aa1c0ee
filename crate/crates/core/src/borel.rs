//! Sigma-algebras on finite state universes.
//!
//! On a finite universe the sigma-algebra generated by a family of subsets is
//! exactly the set of unions of its atoms, and the atoms are obtained by
//! partition refinement. Comparing the atoms generated by metric balls (the
//! Borel side, `Ξ`) with those generated by windows of the transition
//! probability functions `h_Q` (the `Σ` side) gives a finite echo of the
//! equality `Ξ = Σ`. It is an echo, not a proof: finitely many generators
//! stand in for a countable base.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::RAY_EQ_TOL;
use crate::error::{Error, Result};
use crate::hilbert::{check_dims, random_unit_from};
use crate::projector::PureState;
use crate::ray::same_ray;
use crate::seed;

/// Finitely many pairwise distinct rays, addressed by ids `0..len`.
#[derive(Debug, Clone)]
pub struct FiniteUniverse {
    dim: usize,
    points: Vec<PureState>,
}

impl FiniteUniverse {
    pub fn new(points: Vec<PureState>) -> Result<Self> {
        let dim = points.first().map(PureState::dim).ok_or_else(|| {
            Error::InvalidParameter("universe must contain at least one point".into())
        })?;
        for (i, p) in points.iter().enumerate() {
            check_dims(dim, p.dim())?;
            for (j, q) in points[..i].iter().enumerate() {
                if same_ray(p.vector().as_state(), q.vector().as_state())? {
                    return Err(Error::DuplicatePoint(j, i));
                }
            }
        }
        Ok(Self { dim, points })
    }

    /// `size` Haar random states, deterministic in `seed`.
    pub fn random(dim: usize, size: usize, seed: u64) -> Result<Self> {
        let mut rng = seed::rng(seed);
        let points = (0..size)
            .map(|_| random_unit_from(&mut rng, dim).map(PureState::new))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[PureState] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(h, ρ_n)` between `p` and `reference`. Rays that coincide at the
/// universe's resolution get exactly `(1, 0)`, so windows and balls whose
/// boundary passes through a reference point classify it consistently.
fn overlap_pair(p: &PureState, reference: &PureState) -> (f64, f64) {
    if 1.0 - p.overlap(reference).norm() <= RAY_EQ_TOL {
        (1.0, 0.0)
    } else {
        (reference.h(p), p.dist(reference))
    }
}

/// Smallest `1 − h` over distinct pairs of the universe, or `None` for a
/// single point. Windows `{h_Q > 1 − 1/m}` with probes at every point
/// separate all points once `1/m` is below this gap.
pub fn min_gap(universe: &FiniteUniverse) -> Option<f64> {
    let pts = universe.points();
    let mut best: Option<f64> = None;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[..i] {
            let g = 1.0 - overlap_pair(p, q).0;
            best = Some(best.map_or(g, |b| b.min(g)));
        }
    }
    best
}

/// Subsets of a universe, each stored as sorted ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorFamily {
    pub sets: Vec<Vec<usize>>,
    pub provenance: String,
}

impl GeneratorFamily {
    pub fn new(
        universe: &FiniteUniverse,
        sets: Vec<Vec<usize>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(sets.len());
        for mut s in sets {
            if let Some(&id) = s.iter().find(|&&id| id >= universe.len()) {
                return Err(Error::IdOutOfRange {
                    id,
                    size: universe.len(),
                });
            }
            s.sort_unstable();
            s.dedup();
            out.push(s);
        }
        Ok(Self {
            sets: out,
            provenance: provenance.into(),
        })
    }

    pub fn empty(provenance: impl Into<String>) -> Self {
        Self {
            sets: Vec::new(),
            provenance: provenance.into(),
        }
    }

    pub fn extend(&mut self, other: &GeneratorFamily) {
        self.sets.extend(other.sets.iter().cloned());
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Disjoint nonempty blocks covering all ids, in canonical order (each
/// block sorted, blocks sorted by smallest id).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitePartition {
    pub blocks: Vec<Vec<usize>>,
}

impl FinitePartition {
    fn from_labels(labels: &[usize]) -> Self {
        let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (id, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().push(id);
        }
        let mut blocks: Vec<Vec<usize>> = by_label.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        Self { blocks }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Number of sets in the generated sigma-algebra, `2^blocks`, if it fits.
    pub fn sigma_algebra_size(&self) -> Option<u128> {
        1u128.checked_shl(self.blocks.len() as u32)
    }

    fn labels(&self) -> Vec<usize> {
        let n = self.blocks.iter().map(Vec::len).sum();
        let mut labels = vec![0; n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &id in block {
                labels[id] = b;
            }
        }
        labels
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &FinitePartition) -> bool {
        let theirs = other.labels();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&id| theirs[id] == theirs[b[0]]))
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }
}

/// Atoms of the sigma-algebra generated by `gen`: two points share a block
/// iff no generator set contains exactly one of them.
pub fn atoms(universe: &FiniteUniverse, gen: &GeneratorFamily) -> FinitePartition {
    let n = universe.len();
    let mut labels = vec![0usize; n];
    let mut inside = vec![false; n];
    for set in &gen.sets {
        for &id in set {
            inside[id] = true;
        }
        // split every block into its parts inside and outside the set
        let mut relabel: BTreeMap<(usize, bool), usize> = BTreeMap::new();
        for id in 0..n {
            let next = relabel.len();
            labels[id] = *relabel.entry((labels[id], inside[id])).or_insert(next);
        }
        for &id in set {
            inside[id] = false;
        }
    }
    FinitePartition::from_labels(&labels)
}

/// Traces of open balls `{i : ρ_n(point_i, c) < r}` for every centre and
/// radius. Empty traces are dropped.
pub fn ball_generators(
    universe: &FiniteUniverse,
    centers: &[PureState],
    radii: &[f64],
) -> Result<GeneratorFamily> {
    if let Some(r) = radii.iter().find(|r| r.is_nan() || **r <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ball radius {r} must be positive"
        )));
    }
    let mut sets = Vec::new();
    for c in centers {
        check_dims(universe.dim(), c.dim())?;
        let d: Vec<f64> = universe
            .points()
            .iter()
            .map(|p| overlap_pair(p, c).1)
            .collect();
        for &r in radii {
            let s: Vec<usize> = (0..d.len()).filter(|&i| d[i] < r).collect();
            if !s.is_empty() {
                sets.push(s);
            }
        }
    }
    Ok(GeneratorFamily {
        sets,
        provenance: "metric-balls".into(),
    })
}

/// Traces of `{i : |h_Q(point_i) − q| < 1/m}` for every probe and threshold.
/// Empty traces are dropped.
pub fn h_generators(
    universe: &FiniteUniverse,
    probes: &[PureState],
    thresholds: &[f64],
    m: u32,
) -> Result<GeneratorFamily> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if let Some(q) = thresholds.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::InvalidParameter(format!(
            "threshold {q} outside [0, 1]"
        )));
    }
    let width = 1.0 / f64::from(m);
    let mut sets = Vec::new();
    for probe in probes {
        check_dims(universe.dim(), probe.dim())?;
        let h: Vec<f64> = universe
            .points()
            .iter()
            .map(|p| overlap_pair(p, probe).0)
            .collect();
        for &q in thresholds {
            let s: Vec<usize> = (0..h.len()).filter(|&i| (h[i] - q).abs() < width).collect();
            if !s.is_empty() {
                sets.push(s);
            }
        }
    }
    Ok(GeneratorFamily {
        sets,
        provenance: "h-preimages".into(),
    })
}

/// The window `{|h_Q − q| < 1/m}` rewritten through `ρ_n = √(1 − h_Q)` as
/// the open ball `{ρ_n < √(1 − q + 1/m)}` intersected with the open
/// exterior `{ρ_n > √(1 − q − 1/m)}`. Both pieces are norm-open, so adding
/// them to a ball family makes every `Σ` generator `Ξ`-measurable.
pub fn ball_equivalents(
    universe: &FiniteUniverse,
    probes: &[PureState],
    thresholds: &[f64],
    m: u32,
) -> Result<GeneratorFamily> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let width = 1.0 / f64::from(m);
    let mut sets = Vec::new();
    for probe in probes {
        check_dims(universe.dim(), probe.dim())?;
        let d: Vec<f64> = universe
            .points()
            .iter()
            .map(|p| overlap_pair(p, probe).1)
            .collect();
        for &q in thresholds {
            let outer = (1.0 - q + width).max(0.0).sqrt();
            let inner = 1.0 - q - width;
            let ball: Vec<usize> = (0..d.len()).filter(|&i| d[i] < outer).collect();
            sets.push(ball);
            if inner >= 0.0 {
                let r = inner.sqrt();
                sets.push((0..d.len()).filter(|&i| d[i] > r).collect());
            }
        }
    }
    sets.retain(|s: &Vec<usize>| !s.is_empty());
    Ok(GeneratorFamily {
        sets,
        provenance: "metric-balls (h-window equivalents)".into(),
    })
}

/// How two partitions compare under refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refinement {
    Equal,
    /// `Σ`-atoms are unions of `Ξ`-atoms (`Σ ⊊ Ξ`).
    SigmaCoarser,
    /// `Ξ`-atoms are unions of `Σ`-atoms (`Ξ ⊊ Σ`).
    XiCoarser,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisraReport {
    pub atoms_xi: Vec<Vec<usize>>,
    pub atoms_sigma: Vec<Vec<usize>>,
    pub equal: bool,
    pub refinement: Refinement,
}

pub fn compare(xi: &FinitePartition, sigma: &FinitePartition) -> Refinement {
    match (xi.refines(sigma), sigma.refines(xi)) {
        (true, true) => Refinement::Equal,
        (true, false) => Refinement::SigmaCoarser,
        (false, true) => Refinement::XiCoarser,
        (false, false) => Refinement::Incomparable,
    }
}

pub fn misra_check(
    universe: &FiniteUniverse,
    xi_gen: &GeneratorFamily,
    sigma_gen: &GeneratorFamily,
) -> MisraReport {
    let xi = atoms(universe, xi_gen);
    let sigma = atoms(universe, sigma_gen);
    let refinement = compare(&xi, &sigma);
    MisraReport {
        equal: refinement == Refinement::Equal,
        atoms_xi: xi.blocks,
        atoms_sigma: sigma.blocks,
        refinement,
    }
}

/// Matched resolution grids: radii `k/R` (`k = 1..=R`), thresholds `l/R`
/// (`l = 0..=R`), window parameters `m ∈ sigma_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedGrid {
    pub resolution: u32,
    pub sigma_m: Vec<u32>,
}

impl MatchedGrid {
    /// The default pairing: `m ∈ {2, …, R}`.
    pub fn new(resolution: u32) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {resolution} must be at least 2"
            )));
        }
        Ok(Self {
            resolution,
            sigma_m: (2..=resolution).collect(),
        })
    }

    pub fn with_sigma_m(mut self, sigma_m: Vec<u32>) -> Self {
        self.sigma_m = sigma_m;
        self
    }

    pub fn radii(&self) -> Vec<f64> {
        let r = f64::from(self.resolution);
        (1..=self.resolution).map(|k| f64::from(k) / r).collect()
    }

    pub fn thresholds(&self) -> Vec<f64> {
        let r = f64::from(self.resolution);
        (0..=self.resolution).map(|l| f64::from(l) / r).collect()
    }

    /// Balls centred at `centers` with the radius grid.
    pub fn xi_generators(
        &self,
        universe: &FiniteUniverse,
        centers: &[PureState],
    ) -> Result<GeneratorFamily> {
        ball_generators(universe, centers, &self.radii())
    }

    /// `h`-windows with `probes`, the threshold grid and every `m`.
    pub fn sigma_generators(
        &self,
        universe: &FiniteUniverse,
        probes: &[PureState],
    ) -> Result<GeneratorFamily> {
        let mut fam = GeneratorFamily::empty("h-preimages");
        for &m in &self.sigma_m {
            fam.extend(&h_generators(universe, probes, &self.thresholds(), m)?);
        }
        Ok(fam)
    }

    /// Ball equivalents of every `Σ` generator.
    pub fn sigma_equivalents(
        &self,
        universe: &FiniteUniverse,
        probes: &[PureState],
    ) -> Result<GeneratorFamily> {
        let mut fam = GeneratorFamily::empty("metric-balls (h-window equivalents)");
        for &m in &self.sigma_m {
            fam.extend(&ball_equivalents(universe, probes, &self.thresholds(), m)?);
        }
        Ok(fam)
    }
}

/// Result of the grid-based comparison on one universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCheck {
    /// Balls (radius grid, centres at `xi_centers`) vs `h`-windows.
    pub matched: MisraReport,
    /// Balls augmented with the ball equivalents of every `Σ` generator vs
    /// `h`-windows. The `Σ` atoms are then provably unions of `Ξ` atoms.
    pub augmented: MisraReport,
}

impl GridCheck {
    /// `Σ ⊆ Ξ` holds on the augmented families.
    pub fn sigma_within_xi(&self) -> bool {
        matches!(
            self.augmented.refinement,
            Refinement::Equal | Refinement::SigmaCoarser
        )
    }
}

pub fn grid_check(
    universe: &FiniteUniverse,
    grid: &MatchedGrid,
    xi_centers: &[PureState],
    sigma_probes: &[PureState],
) -> Result<GridCheck> {
    let xi = grid.xi_generators(universe, xi_centers)?;
    let sigma = grid.sigma_generators(universe, sigma_probes)?;
    let mut augmented = xi.clone();
    augmented.extend(&grid.sigma_equivalents(universe, sigma_probes)?);
    Ok(GridCheck {
        matched: misra_check(universe, &xi, &sigma),
        augmented: misra_check(universe, &augmented, &sigma),
    })
}
