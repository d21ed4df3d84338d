//! Degeneracies of `H(g)`: discriminant roots grouped into clusters and
//! classified as exceptional points (square-root branch points where two
//! eigenvectors coalesce) or level crossings (eigenvectors stay distinct).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::assign::min_cost_assignment;
use crate::discriminant::{
    discriminant_of_pencil, discriminant_polynomial_with, polynomial_roots, ReconstructionConfig,
};
use crate::linalg::{self, overlap, range_basis, restrict, CMatrix};
use crate::math;
use crate::model::{HamiltonianPencil, ModelSpec, PairingModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegeneracyKind {
    /// Exceptional point: a simple discriminant root.
    Ep,
    /// Two eigenvalues cross with distinct eigenvectors.
    Crossing,
    /// A crossing with multiplicity above two: several pairs crossing at the
    /// same coupling, or three or more eigenvalues meeting.
    HigherOrderCrossing,
    /// Several exceptional points that are numerically indistinguishable.
    EpCluster,
}

impl DegeneracyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DegeneracyKind::Ep => "EP",
            DegeneracyKind::Crossing => "crossing",
            DegeneracyKind::HigherOrderCrossing => "higher-order-crossing",
            DegeneracyKind::EpCluster => "EP-cluster",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Self::Ep,
            Self::Crossing,
            Self::HigherOrderCrossing,
            Self::EpCluster,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }

    pub fn is_crossing(self) -> bool {
        matches!(
            self,
            DegeneracyKind::Crossing | DegeneracyKind::HigherOrderCrossing
        )
    }
}

impl fmt::Display for DegeneracyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of the integral-of-motion test at a degenerate coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QTest {
    /// Distance between the two closest eigenvalues of `H(g₀)`.
    pub h_gap: f64,
    /// Smallest eigenvalue gap of `Q(g₀)` restricted to the near-degenerate
    /// eigenspace of `H(g₀)`.
    pub q_gap: f64,
    /// Dimension of that eigenspace.
    pub subspace_dim: usize,
}

/// Branch permutation after one loop: eigenvalue `i` continues into
/// eigenvalue `map[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    pub map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Lengths of the nontrivial cycles, ascending.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.map.len()];
        let mut out = Vec::new();
        for start in 0..self.map.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.map[i];
                len += 1;
            }
            if len > 1 {
                out.push(len);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_transposition(&self) -> bool {
        self.cycle_lengths() == [2]
    }
}

/// Diagnostics gathered for one cluster.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Evidence {
    /// Present only on the integrable line with `ε₁ = 0`.
    pub q_test: Option<QTest>,
    pub monodromy: Option<Permutation>,
    pub monodromy_radius: Option<f64>,
    /// `(|δ|, overlap)` of the two closest eigenvalues' right eigenvectors at
    /// `g₀ + δ`, for shrinking `δ`.
    pub overlaps: Vec<(f64, f64)>,
    /// Beyond the escape radius: classified by multiplicity alone.
    pub beyond_escape: bool,
    /// Whether all available tests agree with the assigned kind.
    pub consistent: bool,
}

impl Evidence {
    /// Overlap at the closest approach.
    pub fn limit_overlap(&self) -> Option<f64> {
        self.overlaps.last().map(|&(_, o)| o)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Degeneracy {
    pub location: Complex64,
    pub multiplicity: usize,
    pub kind: Option<DegeneracyKind>,
    pub evidence: Evidence,
    /// The individual roots that make up the cluster.
    pub members: Vec<Complex64>,
}

impl Degeneracy {
    /// Largest distance between two member roots.
    pub fn diameter(&self) -> f64 {
        let m = &self.members;
        let mut out: f64 = 0.0;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                out = out.max((m[i] - m[j]).norm());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracySet {
    pub degeneracies: Vec<Degeneracy>,
    /// Σ multiplicities, equal to the discriminant degree.
    pub total_root_count: usize,
    pub spec: ModelSpec,
}

impl DegeneracySet {
    pub fn count_kind(&self, kind: DegeneracyKind) -> usize {
        self.degeneracies
            .iter()
            .filter(|d| d.kind == Some(kind))
            .count()
    }

    pub fn crossings(&self) -> impl Iterator<Item = &Degeneracy> {
        self.degeneracies
            .iter()
            .filter(|d| d.kind.is_some_and(DegeneracyKind::is_crossing))
    }

    pub fn eps(&self) -> impl Iterator<Item = &Degeneracy> {
        self.degeneracies
            .iter()
            .filter(|d| d.kind == Some(DegeneracyKind::Ep))
    }

    /// All roots with multiplicity.
    pub fn roots(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.degeneracies
            .iter()
            .flat_map(|d| d.members.iter().copied())
    }

    fn sort(&mut self) {
        self.degeneracies.sort_by(|a, b| {
            a.location
                .re
                .total_cmp(&b.location.re)
                .then(a.location.im.total_cmp(&b.location.im))
        });
    }
}

/// Tunables for root refinement, clustering and classification.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyConfig {
    pub reconstruction: ReconstructionConfig,
    /// Initial clustering tolerance, relative to `1 + |g|`.
    pub cluster_tol: f64,
    /// Smallest tolerance tried when clusters are ambiguous.
    pub min_cluster_tol: f64,
    /// Refined copies of one multiple root agree to within this (relative to
    /// `1 + |g|`); wider clusters are split by tightening the tolerance.
    pub coincidence_tol: f64,
    /// Roots beyond this modulus are treated as being at infinity.
    pub escape_radius: f64,
    /// Sweeps of simultaneous root refinement.
    pub polish_iterations: usize,
    /// Eigenvalues of `H` within this distance (relative to `1 + |E|`) of the
    /// closest pair span the Q-test subspace.
    pub q_group_tol: f64,
    /// `Q_gap` above this marks a crossing.
    pub q_crossing_gap: f64,
    /// `Q_gap` below this marks coalescence (an exceptional point).
    pub q_coalescence_gap: f64,
    pub monodromy_steps: usize,
    /// Loop radius as a fraction of the distance to the nearest other cluster.
    pub monodromy_radius_factor: f64,
    /// Number of decades in the eigenvector approach sequence.
    pub overlap_decades: u32,
    /// Skip monodromy and overlap diagnostics.
    pub multiplicity_only: bool,
}

impl Default for DegeneracyConfig {
    fn default() -> Self {
        DegeneracyConfig {
            reconstruction: ReconstructionConfig::default(),
            cluster_tol: 1e-5,
            min_cluster_tol: 1e-12,
            coincidence_tol: 1e-10,
            escape_radius: 1e3,
            polish_iterations: 200,
            q_group_tol: 1e-4,
            q_crossing_gap: 1e-3,
            q_coalescence_gap: 1e-5,
            monodromy_steps: 128,
            monodromy_radius_factor: 0.2,
            overlap_decades: 6,
            multiplicity_only: false,
        }
    }
}

/// Refines an approximate discriminant root by Newton iteration on `D(g)`
/// evaluated from the eigenvalues of `H(g)`, which stays accurate where the
/// interpolated polynomial loses digits. Each step also tries integer
/// multiples of the Newton correction so that multiple roots converge
/// quickly. Moves larger than `max_move` are rejected and the starting point
/// is returned.
pub fn polish_degeneracy(
    pencil: &HamiltonianPencil,
    start: Complex64,
    max_iter: usize,
    max_move: f64,
) -> Result<Complex64> {
    let d = |g: Complex64| discriminant_of_pencil(pencil, g).map(|v| v.value);
    let mut g = start;
    let mut dg = d(g)?;
    let mut h = 1e-10 * (1.0 + g.norm());
    for _ in 0..max_iter {
        if dg.norm() == 0.0 || !dg.norm().is_finite() {
            break;
        }
        let hc = Complex64::new(h, 0.0);
        let deriv = (d(g + hc)? - d(g - hc)?) / (2.0 * h);
        if deriv.norm() == 0.0 || !deriv.norm().is_finite() {
            break;
        }
        let step = dg / deriv;
        let mut best = (g, dg);
        for m in 1..=MAX_POLISH_MULTIPLICITY {
            let trial = g - step * m as f64;
            let dt = d(trial)?;
            if dt.norm() < best.1.norm() {
                best = (trial, dt);
            }
        }
        if best.0 == g {
            break;
        }
        let moved = (best.0 - g).norm();
        g = best.0;
        dg = best.1;
        let unit = 1.0 + g.norm();
        h = (1e-3 * moved).clamp(1e-15 * unit, 1e-8 * unit);
        if moved <= 4.0 * f64::EPSILON * unit {
            break;
        }
    }
    if (g - start).norm() > max_move {
        return Ok(start);
    }
    Ok(g)
}

const MAX_POLISH_MULTIPLICITY: usize = 8;

/// Simultaneous refinement of all discriminant roots inside `radius` by
/// Aberth–Ehrlich iteration on `D(g)` evaluated from eigenvalues. The mutual
/// repulsion term keeps nearby roots apart, so clusters of distinct roots
/// resolve even when the interpolated polynomial placed them poorly. Roots
/// outside `radius` stay fixed but still repel.
pub fn refine_roots_aberth(
    pencil: &HamiltonianPencil,
    roots: &mut [Complex64],
    radius: f64,
    max_sweeps: usize,
) -> Result<()> {
    let n = roots.len();
    let mut active: Vec<bool> = roots.iter().map(|r| r.norm() <= radius).collect();
    let mut calm = vec![0u32; n];
    for _ in 0..max_sweeps {
        if !active.iter().any(|&a| a) {
            break;
        }
        for k in 0..n {
            if !active[k] {
                continue;
            }
            let z = roots[k];
            let unit = 1.0 + z.norm();
            let nearest = (0..n)
                .filter(|&j| j != k)
                .map(|j| (roots[j] - z).norm())
                .fold(f64::INFINITY, f64::min);
            let h = (1e-4 * nearest).clamp(1e-13 * unit, 1e-6 * unit);
            let d0 = discriminant_of_pencil(pencil, z)?;
            if d0.log_abs == f64::NEG_INFINITY {
                active[k] = false;
                continue;
            }
            let hc = Complex64::new(h, 0.0);
            let dp = discriminant_of_pencil(pencil, z + hc)?;
            let dm = discriminant_of_pencil(pencil, z - hc)?;
            // D(z ± h)/D(z) in log form, then the logarithmic derivative.
            let ratio = |d: &crate::discriminant::DiscriminantValue| {
                math::polar(math::exp(d.log_abs - d0.log_abs), d.arg - d0.arg)
            };
            let logderiv = (ratio(&dp) - ratio(&dm)) / (2.0 * h);
            if logderiv.norm() == 0.0 || !logderiv.norm().is_finite() {
                active[k] = false;
                continue;
            }
            let newton = Complex64::new(1.0, 0.0) / logderiv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k && roots[j] != z)
                .map(|j| Complex64::new(1.0, 0.0) / (z - roots[j]))
                .sum();
            let w = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if !(w.re.is_finite() && w.im.is_finite()) {
                active[k] = false;
                continue;
            }
            roots[k] = z - w;
            if w.norm() <= 1e-14 * unit {
                calm[k] += 1;
                if calm[k] >= 2 {
                    active[k] = false;
                }
            } else {
                calm[k] = 0;
            }
        }
    }
    Ok(())
}

/// Single-linkage clustering. Two roots are linked when their distance is at
/// most `tol · (1 + max(|a|, |b|))`. Cluster locations are centroids and
/// clusters come back sorted by real, then imaginary part.
///
/// Fails with `AmbiguousClustering` when two clusters sit closer than three
/// times the local tolerance.
pub fn cluster_roots(roots: &[Complex64], tol: f64, spec: &ModelSpec) -> Result<DegeneracySet> {
    let n = roots.len();
    let local = |a: Complex64, b: Complex64| tol * (1.0 + a.norm().max(b.norm()));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= local(roots[i], roots[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if labels[i] != labels[j] {
                let gap = (roots[i] - roots[j]).norm();
                let t = local(roots[i], roots[j]);
                if gap < 3.0 * t {
                    return Err(Error::AmbiguousClustering { gap, tol: t });
                }
            }
        }
    }
    let mut degeneracies = Vec::new();
    for root in 0..n {
        let members: Vec<Complex64> = (0..n)
            .filter(|&i| labels[i] == root)
            .map(|i| roots[i])
            .collect();
        if members.is_empty() {
            continue;
        }
        let location = members.iter().sum::<Complex64>() / members.len() as f64;
        degeneracies.push(Degeneracy {
            location,
            multiplicity: members.len(),
            kind: None,
            evidence: Evidence::default(),
            members,
        });
    }
    let mut set = DegeneracySet {
        degeneracies,
        total_root_count: n,
        spec: spec.clone(),
    };
    set.sort();
    Ok(set)
}

/// Indices of the two closest eigenvalues.
fn closest_pair(values: &[Complex64]) -> (usize, usize, f64) {
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let d = (values[i] - values[j]).norm();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

pub fn q_independence_test(spec: &ModelSpec, g0: Complex64) -> Result<QTest> {
    q_test_with(
        &PairingModel::new(spec)?,
        g0,
        DegeneracyConfig::default().q_group_tol,
    )
}

/// Diagonalizes `Q(g₀)` on the invariant subspace of `H(g₀)` belonging to the
/// cluster of eigenvalues around the closest pair. The subspace is the range
/// of `Π_{j∉group}(H − E_j)`, which `Q` leaves invariant because it commutes
/// with `H`.
pub fn q_test_with(model: &PairingModel, g0: Complex64, group_tol: f64) -> Result<QTest> {
    let spec = model.spec();
    if spec.zeta != 1.0 || !spec.q_available() {
        return Err(Error::PreconditionViolated(format!(
            "Q-test needs zeta = 1 and three levels with epsilon_1 = 0 (zeta = {})",
            spec.zeta
        )));
    }
    let h = model.pencil().at(g0);
    let e = linalg::eigenvalues(&h)?;
    if e.len() < 2 {
        return Err(Error::PreconditionViolated(
            "Q-test needs at least two states".into(),
        ));
    }
    let (a, b, h_gap) = closest_pair(&e);
    let mut group = vec![false; e.len()];
    group[a] = true;
    group[b] = true;
    loop {
        let mut grew = false;
        for k in 0..e.len() {
            if group[k] {
                continue;
            }
            let near = (0..e.len())
                .any(|m| group[m] && (e[k] - e[m]).norm() <= group_tol * (1.0 + e[m].norm()));
            if near {
                group[k] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let dim = group.iter().filter(|&&x| x).count();
    let mut proj = CMatrix::identity(e.len());
    let scale = h.frobenius_norm().max(1.0);
    for (k, &ek) in e.iter().enumerate() {
        if !group[k] {
            proj = &proj * &h.add_identity(-ek).scale(Complex64::new(1.0 / scale, 0.0));
        }
    }
    let basis = range_basis(&proj, dim);
    let q = model.q_operator(g0)?.matrix;
    let qe = linalg::eigenvalues(&restrict(&q, &basis))?;
    let (_, _, q_gap) = closest_pair(&qe);
    Ok(QTest {
        h_gap,
        q_gap,
        subspace_dim: dim,
    })
}

/// Tracks the eigenvalues of `H(g)` once around `center + radius·e^{iθ}` and
/// returns the induced permutation. Each step is matched against a linear
/// extrapolation of the tracked branches and subdivided whenever a branch
/// lands more than a third of the current level spacing from its prediction.
pub fn monodromy(
    pencil: &HamiltonianPencil,
    center: Complex64,
    radius: f64,
    steps: usize,
) -> Result<Permutation> {
    if steps < 4 || !(radius > 0.0) {
        return Err(Error::PreconditionViolated(
            "monodromy loop needs radius > 0 and at least 4 steps".into(),
        ));
    }
    let point = |t: f64| center + math::polar(radius, 2.0 * PI * t);
    let start = linalg::eigenvalues(&pencil.at(point(0.0)))?;
    let n = start.len();
    let mut current = start.clone();
    let mut velocity = vec![Complex64::new(0.0, 0.0); n];
    let base = 1.0 / steps as f64;
    let mut t = 0.0;
    let mut dt = base;
    let mut step_index = 0;
    while t < 1.0 {
        let t_next = (t + dt).min(1.0);
        let h = t_next - t;
        let next = linalg::eigenvalues(&pencil.at(point(t_next)))?;
        let spacing = min_spacing(&next);
        let scale = 1.0 + next.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if spacing < 1e-10 * scale {
            return Err(Error::TrackingAmbiguity { step: step_index });
        }
        let predicted: Vec<Complex64> = current
            .iter()
            .zip(&velocity)
            .map(|(c, v)| c + v * h)
            .collect();
        let matched = match_values(&predicted, &next);
        let miss = predicted
            .iter()
            .zip(&matched)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if miss > spacing / 3.0 && h > base * 1e-6 {
            dt = h / 2.0;
            continue;
        }
        for k in 0..n {
            velocity[k] = (matched[k] - current[k]) / h;
        }
        current = matched;
        t = t_next;
        step_index += 1;
        if miss < spacing / 12.0 {
            dt = (dt * 2.0).min(base);
        }
    }
    let back = match_values(&start, &current);
    // back[j] is the tracked value that returned onto start[j]
    let mut map = vec![0usize; n];
    for (i, v) in current.iter().enumerate() {
        map[i] = back.iter().position(|b| b == v).expect("matched value");
    }
    Ok(Permutation { map })
}

fn min_spacing(v: &[Complex64]) -> f64 {
    closest_pair(v).2
}

/// Reorders `next` so that `next[k]` continues `prev[k]`, minimizing the total
/// squared displacement.
fn match_values(prev: &[Complex64], next: &[Complex64]) -> Vec<Complex64> {
    let n = prev.len();
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = (prev[i] - next[j]).norm_sqr();
        }
    }
    min_cost_assignment(&cost, n)
        .into_iter()
        .map(|j| next[j])
        .collect()
}

/// Overlap of the right eigenvectors of the two closest eigenvalues at
/// `g₀ + δ`, for `|δ| = d, d/10, …` over `decades` decades.
pub fn eigenvector_overlaps(
    pencil: &HamiltonianPencil,
    g0: Complex64,
    d: f64,
    decades: u32,
) -> Result<Vec<(f64, f64)>> {
    let direction = math::polar(1.0, 0.3 * PI);
    let mut out = Vec::with_capacity(decades as usize);
    let mut r = d;
    for _ in 0..decades {
        let eig = linalg::eigen(&pencil.at(g0 + direction * r))?;
        let (a, b, _) = closest_pair(&eig.values);
        out.push((r, overlap(&eig.vectors[a], &eig.vectors[b])));
        r /= 10.0;
    }
    Ok(out)
}

/// Assigns a kind to every cluster from its multiplicity, the monodromy of a
/// small loop around it and, on the integrable line, the Q-test.
///
/// Multiple roots whose tests disagree raise `ClassificationConflict`. Simple
/// roots are exceptional points by definition; disagreement there is only
/// recorded in `Evidence::consistent`.
pub fn classify(
    model: &PairingModel,
    set: &DegeneracySet,
    config: &DegeneracyConfig,
) -> Result<DegeneracySet> {
    let pencil = model.pencil();
    let with_q = model.spec().zeta == 1.0 && model.spec().q_available();
    let mut out = set.clone();
    let locations: Vec<Complex64> = set.degeneracies.iter().map(|d| d.location).collect();
    for (idx, deg) in out.degeneracies.iter_mut().enumerate() {
        let g0 = deg.location;
        let mut ev = Evidence {
            consistent: true,
            ..Evidence::default()
        };
        let by_multiplicity = match deg.multiplicity {
            1 => DegeneracyKind::Ep,
            2 => DegeneracyKind::Crossing,
            _ => DegeneracyKind::HigherOrderCrossing,
        };
        if g0.norm() > config.escape_radius || config.multiplicity_only {
            ev.beyond_escape = g0.norm() > config.escape_radius;
            deg.kind = Some(by_multiplicity);
            deg.evidence = ev;
            continue;
        }
        let nearest = locations
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != idx)
            .map(|(_, l)| (l - g0).norm())
            .fold(f64::INFINITY, f64::min);
        let reach = if nearest.is_finite() {
            nearest
        } else {
            1.0 + g0.norm()
        };
        let radius = config.monodromy_radius_factor * reach;
        let perm = match monodromy(pencil, g0, radius, config.monodromy_steps) {
            Ok(p) => Some(p),
            // a simple root is an EP whatever the loop shows
            Err(Error::TrackingAmbiguity { .. }) if deg.multiplicity == 1 => None,
            Err(e) => return Err(e),
        };
        ev.monodromy_radius = Some(radius);
        ev.overlaps = eigenvector_overlaps(pencil, g0, 0.1 * radius, config.overlap_decades)?;
        if with_q {
            ev.q_test = Some(q_test_with(model, g0, config.q_group_tol)?);
        }
        let branch = perm.as_ref().is_some_and(|p| !p.is_identity());
        let q_verdict = ev.q_test.map(|q| {
            if q.q_gap > config.q_crossing_gap {
                Some(false)
            } else if q.q_gap < config.q_coalescence_gap {
                Some(true)
            } else {
                None
            }
        });
        let tracked = perm.is_some();
        ev.monodromy = perm;

        let kind = if deg.multiplicity == 1 {
            ev.consistent =
                tracked && branch && !matches!(q_verdict, Some(Some(false)) | Some(None));
            DegeneracyKind::Ep
        } else {
            match q_verdict {
                Some(None) => {
                    return Err(conflict(
                        deg,
                        format!("Q gap {:e} is inconclusive", ev.q_test.unwrap().q_gap),
                    ));
                }
                Some(Some(coalesced)) if coalesced != branch => {
                    return Err(conflict(
                        deg,
                        format!(
                            "monodromy {} but Q gap {:e}",
                            if branch { "nontrivial" } else { "trivial" },
                            ev.q_test.unwrap().q_gap
                        ),
                    ));
                }
                _ => {}
            }
            if branch {
                DegeneracyKind::EpCluster
            } else {
                by_multiplicity
            }
        };
        deg.kind = Some(kind);
        deg.evidence = ev;
    }
    Ok(out)
}

fn conflict(deg: &Degeneracy, detail: String) -> Error {
    Error::ClassificationConflict {
        location: deg.location,
        multiplicity: deg.multiplicity,
        detail,
    }
}

/// Refined discriminant roots with multiplicity, before clustering.
pub fn refined_roots(model: &PairingModel, config: &DegeneracyConfig) -> Result<Vec<Complex64>> {
    let pencil = model.pencil();
    let poly = discriminant_polynomial_with(pencil, &config.reconstruction)?;
    if poly.degree() == 0 {
        return Ok(Vec::new());
    }
    let mut roots = polynomial_roots(&poly)?;
    refine_roots_aberth(
        pencil,
        &mut roots,
        config.escape_radius,
        config.polish_iterations,
    )?;
    Ok(roots)
}

/// Clusters refined roots, tightening the tolerance by decades while the
/// grouping is ambiguous or a cluster is wider than `coincidence_tol`.
/// Refined copies of a genuine multiple root coincide to rounding error, so a
/// wide cluster means distinct roots that were merged.
pub fn cluster_adaptive(
    roots: &[Complex64],
    spec: &ModelSpec,
    config: &DegeneracyConfig,
) -> Result<DegeneracySet> {
    let mut tol = config.cluster_tol;
    loop {
        let can_tighten = tol / 10.0 >= config.min_cluster_tol * 0.999;
        match cluster_roots(roots, tol, spec) {
            Err(Error::AmbiguousClustering { .. }) if can_tighten => tol /= 10.0,
            Ok(set)
                if can_tighten
                    && set.degeneracies.iter().any(|d| {
                        d.diameter() > config.coincidence_tol * (1.0 + d.location.norm())
                    }) =>
            {
                tol /= 10.0
            }
            other => return other,
        }
    }
}

/// Discriminant → roots → refinement → clustering → classification.
pub fn find_degeneracies(spec: &ModelSpec, config: &DegeneracyConfig) -> Result<DegeneracySet> {
    let model = PairingModel::new(spec)?;
    let roots = refined_roots(&model, config)?;
    let set = cluster_adaptive(&roots, spec, config)?;
    classify(&model, &set, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(eps3: f64, zeta: f64) -> ModelSpec {
        ModelSpec::three_level(eps3, zeta)
    }

    #[test]
    fn trivial_clustering() {
        let roots = [c(2.0 + 1e-7, 0.0), c(2.0 - 1e-7, 0.0), c(5.0, 0.0)];
        let set = cluster_roots(&roots, 1e-5, &spec(2.0, 1.0)).unwrap();
        assert_eq!(set.degeneracies.len(), 2);
        assert_eq!(set.degeneracies[0].multiplicity, 2);
        assert!((set.degeneracies[0].location - c(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(set.degeneracies[1].multiplicity, 1);
        assert_eq!(set.total_root_count, 3);
    }

    #[test]
    fn ambiguous_clustering() {
        let roots = [c(1.0, 0.0), c(1.0 + 4e-5, 0.0)];
        assert!(matches!(
            cluster_roots(&roots, 1e-5, &spec(2.0, 1.0)),
            Err(Error::AmbiguousClustering { .. })
        ));
        assert_eq!(
            cluster_roots(&roots, 1e-6, &spec(2.0, 1.0))
                .unwrap()
                .degeneracies
                .len(),
            2
        );
    }

    #[test]
    fn permutation_cycles() {
        assert!(Permutation::identity(4).is_identity());
        let p = Permutation {
            map: vec![1, 0, 2, 3],
        };
        assert!(p.is_transposition());
        assert_eq!(
            Permutation {
                map: vec![1, 2, 0, 4, 3]
            }
            .cycle_lengths(),
            vec![2, 3]
        );
    }

    #[test]
    fn census_at_integrable_point() {
        let set = find_degeneracies(&spec(7.0 / 3.0, 1.0), &DegeneracyConfig::default()).unwrap();
        assert_eq!(set.total_root_count, 16);
        assert_eq!(set.count_kind(DegeneracyKind::Ep), 12);
        assert_eq!(set.count_kind(DegeneracyKind::Crossing), 2);
        let crossings: Vec<f64> = set.crossings().map(|d| d.location.re).collect();
        assert!(
            (crossings[0] + 0.221139375311659).abs() < 1e-9,
            "{crossings:?}"
        );
        assert!(
            (crossings[1] - 0.06280604197834).abs() < 1e-9,
            "{crossings:?}"
        );
        for d in &set.degeneracies {
            assert!(d.evidence.consistent, "{d:?}");
        }
    }

    #[test]
    fn diagonal_limit_has_only_real_crossings() {
        let set = find_degeneracies(&spec(1.5, 0.0), &DegeneracyConfig::default()).unwrap();
        assert_eq!(set.total_root_count, 16);
        assert_eq!(set.count_kind(DegeneracyKind::Ep), 0);
        let six: Vec<&Degeneracy> = set
            .degeneracies
            .iter()
            .filter(|d| d.multiplicity == 6)
            .collect();
        assert_eq!(six.len(), 1);
        assert!((six[0].location - c(-0.125, 0.0)).norm() < 1e-9);
        for d in &set.degeneracies {
            assert!(d.location.im.abs() < 1e-9);
            assert!(d.kind.unwrap().is_crossing());
        }
    }

    #[test]
    fn q_test_separates_crossing_from_ep() {
        let model = PairingModel::new(&spec(7.0 / 3.0, 1.0)).unwrap();
        let set = find_degeneracies(model.spec(), &DegeneracyConfig::default()).unwrap();
        for d in &set.degeneracies {
            let q = d.evidence.q_test.unwrap();
            assert!(q.h_gap < 1e-6, "{d:?}");
            if d.kind == Some(DegeneracyKind::Crossing) {
                assert!(q.q_gap > 1e-3, "{q:?}");
            } else {
                assert!(q.q_gap < 1e-5, "{q:?}");
            }
        }
        let generic = q_test_with(&model, c(0.3, 0.4), 1e-4).unwrap();
        assert!(generic.h_gap > 1e-2);
        assert!(matches!(
            q_independence_test(&spec(7.0 / 3.0, 0.5), c(0.1, 0.0)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn loop_enclosing_nothing_is_identity() {
        let model = PairingModel::new(&spec(7.0 / 3.0, 1.0)).unwrap();
        let p = monodromy(model.pencil(), c(1.0, 1.0), 0.05, 128).unwrap();
        assert!(p.is_identity());
    }
}
