//! Parameter sweeps: degeneracies followed from one parameter value to the
//! next, with collisions, splittings and passages through infinity recorded
//! as events, plus the critical `ε₃` where the two level crossings of the
//! integrable model collide.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::assign::min_cost_assignment;
use crate::degeneracy::{
    classify, cluster_adaptive, cluster_roots, refined_roots, Degeneracy, DegeneracyConfig,
    DegeneracyKind, DegeneracySet,
};
use crate::model::{ModelSpec, PairingModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Energy of the third level.
    Epsilon3,
    Zeta,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Epsilon3 => "epsilon3",
            SweepParameter::Zeta => "zeta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "epsilon3" => Some(SweepParameter::Epsilon3),
            "zeta" => Some(SweepParameter::Zeta),
            _ => None,
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub base: ModelSpec,
    pub parameter: SweepParameter,
    pub start: f64,
    pub end: f64,
    pub initial_step: f64,
    pub min_step: f64,
    /// Largest accepted root motion per step, relative to `max(1, |g|)`.
    pub max_displacement: f64,
    /// Roots farther out are not tracked; crossing this circle is an entry or
    /// escape event.
    pub escape_radius: f64,
    /// Parameter resolution for locating collision and split events.
    pub event_tol: f64,
    pub degeneracy: DegeneracyConfig,
}

impl SweepPlan {
    pub fn new(base: ModelSpec, parameter: SweepParameter, start: f64, end: f64) -> Self {
        SweepPlan {
            base,
            parameter,
            start,
            end,
            initial_step: 0.05,
            min_step: 1e-6,
            max_displacement: 0.1,
            escape_radius: 1e3,
            event_tol: 1e-6,
            degeneracy: DegeneracyConfig::default(),
        }
    }

    /// `ε₃` from 6 down to 1.2 on the integrable line, through the collision
    /// of the two real level crossings.
    pub fn fig1() -> Self {
        SweepPlan::new(
            ModelSpec::three_level(6.0, 1.0),
            SweepParameter::Epsilon3,
            6.0,
            1.2,
        )
    }

    /// `ζ` from 1 to 0 at `ε₃ = 7/3`.
    pub fn fig2a() -> Self {
        Self::zeta_preset(7.0 / 3.0)
    }

    /// `ζ` from 1 to 0 at the crossing collision, `ε₃ = 1.8499`.
    pub fn fig2b() -> Self {
        Self::zeta_preset(1.8499)
    }

    /// `ζ` from 1 to 0 at `ε₃ = 3/2`.
    pub fn fig2c() -> Self {
        Self::zeta_preset(1.5)
    }

    fn zeta_preset(eps3: f64) -> Self {
        let mut plan = SweepPlan::new(
            ModelSpec::three_level(eps3, 1.0),
            SweepParameter::Zeta,
            1.0,
            0.0,
        );
        plan.initial_step = 0.02;
        plan
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "fig1" => Some(Self::fig1()),
            "fig2a" => Some(Self::fig2a()),
            "fig2b" => Some(Self::fig2b()),
            "fig2c" => Some(Self::fig2c()),
            _ => None,
        }
    }

    pub const PRESETS: [&'static str; 4] = ["fig1", "fig2a", "fig2b", "fig2c"];

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSpec(format!("sweep plan: {msg}")));
        if !(self.start.is_finite() && self.end.is_finite()) || self.start == self.end {
            return bad("start and end must be finite and distinct");
        }
        if !(self.min_step > 0.0) || !(self.initial_step >= self.min_step) {
            return bad("need 0 < min_step <= initial_step");
        }
        if !(self.max_displacement > 0.0) || !(self.escape_radius > 0.0) || !(self.event_tol > 0.0)
        {
            return bad("max_displacement, escape_radius and event_tol must be positive");
        }
        self.base.validate()?;
        let (lo, hi) = (self.start.min(self.end), self.start.max(self.end));
        match self.parameter {
            SweepParameter::Zeta => {
                if lo < 0.0 || hi > 1.0 {
                    return bad("zeta range must lie in [0, 1]");
                }
            }
            SweepParameter::Epsilon3 => {
                if self.base.levels() != 3 {
                    return bad("epsilon3 sweeps need three levels");
                }
                if let Some(j) = self.base.epsilon[..2]
                    .iter()
                    .position(|&e| e >= lo && e <= hi)
                {
                    return Err(Error::DegenerateEpsilon {
                        first: j,
                        second: 2,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn spec_at(&self, value: f64) -> ModelSpec {
        match self.parameter {
            SweepParameter::Epsilon3 => self.base.with_epsilon(2, value),
            SweepParameter::Zeta => self.base.with_zeta(value),
        }
    }

    fn direction(&self) -> f64 {
        if self.end > self.start {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    Collision,
    Split,
    Escape,
    Entry,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Collision => "collision",
            EventKind::Split => "split",
            EventKind::Escape => "escape",
            EventKind::Entry => "entry",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            EventKind::Collision,
            EventKind::Split,
            EventKind::Escape,
            EventKind::Entry,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    /// Located to `event_tol` for collisions and splits; the first parameter
    /// beyond the escape radius (or inside it) for escapes (entries).
    pub parameter: f64,
    /// Sweep step at which the event was detected.
    pub detected_at: f64,
    pub location: Complex64,
    pub trajectories: Vec<usize>,
    /// Total multiplicity involved.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub parameter: f64,
    pub location: Complex64,
    /// Multiplicity of the cluster the root belongs to at this step.
    pub multiplicity: usize,
    pub kind: Option<DegeneracyKind>,
}

/// One discriminant root followed along the sweep. A root of multiplicity
/// `k` is carried by `k` trajectories that share their locations until a
/// split separates them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: usize,
    pub points: Vec<TrajectoryPoint>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn first(&self) -> &TrajectoryPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectory has points")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    pub parameter: f64,
    /// Discriminant degree.
    pub degree: usize,
    /// Roots inside the escape radius.
    pub tracked: usize,
    pub beyond_escape: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub plan: SweepPlan,
    pub trajectories: Vec<Trajectory>,
    /// All events in sweep order.
    pub events: Vec<Event>,
    pub steps: Vec<StepSummary>,
    /// Degeneracy sets at the first and last parameter values.
    pub first: DegeneracySet,
    pub last: DegeneracySet,
}

impl SweepResult {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Tracked root locations at a step, in trajectory order.
    pub fn locations_at(&self, step: usize) -> Vec<Complex64> {
        let p = self.steps[step].parameter;
        self.trajectories
            .iter()
            .filter_map(|t| {
                t.points
                    .iter()
                    .find(|pt| pt.parameter == p)
                    .map(|pt| pt.location)
            })
            .collect()
    }
}

struct Snapshot {
    parameter: f64,
    set: DegeneracySet,
    /// `(cluster index, root)` for every root inside the escape radius.
    tracked: Vec<(usize, Complex64)>,
}

impl Snapshot {
    fn beyond(&self) -> usize {
        self.set.total_root_count - self.tracked.len()
    }
}

fn snapshot(plan: &SweepPlan, parameter: f64) -> Result<Snapshot> {
    let spec = plan.spec_at(parameter);
    let model = PairingModel::new(&spec)?;
    let roots = refined_roots(&model, &plan.degeneracy)?;
    let set = cluster_adaptive(&roots, &spec, &plan.degeneracy)?;
    let tracked = set
        .degeneracies
        .iter()
        .enumerate()
        .flat_map(|(c, d)| d.members.iter().map(move |&g| (c, g)))
        .filter(|(_, g)| g.norm() <= plan.escape_radius)
        .collect();
    Ok(Snapshot {
        parameter,
        set,
        tracked,
    })
}

fn classify_snapshot(plan: &SweepPlan, snap: &mut Snapshot) -> Result<()> {
    let model = PairingModel::new(&snap.set.spec)?;
    snap.set = classify(&model, &snap.set, &plan.degeneracy)?;
    Ok(())
}

/// Minimum total squared displacement matching of tracked roots. Either side
/// may instead pair with the escape circle at cost `(R − |g|)²`. Returns the
/// successor of each previous root.
fn match_roots(prev: &[Complex64], next: &[Complex64], radius: f64) -> Vec<Option<usize>> {
    const FORBIDDEN: f64 = 1e18;
    let (np, nn) = (prev.len(), next.len());
    let n = np + nn;
    if n == 0 {
        return Vec::new();
    }
    let mut cost = vec![FORBIDDEN; n * n];
    for i in 0..np {
        for j in 0..nn {
            cost[i * n + j] = (prev[i] - next[j]).norm_sqr();
        }
        let r = radius - prev[i].norm();
        cost[i * n + nn + i] = r * r;
    }
    for j in 0..nn {
        let r = radius - next[j].norm();
        cost[(np + j) * n + j] = r * r;
        for i in 0..np {
            cost[(np + j) * n + nn + i] = 0.0;
        }
    }
    let assignment = min_cost_assignment(&cost, n);
    (0..np)
        .map(|i| {
            if assignment[i] < nn {
                Some(assignment[i])
            } else {
                None
            }
        })
        .collect()
}

/// Connected groups of clusters linked by matched roots, as
/// `(previous clusters, next clusters)`, both sorted.
fn components(
    prev: &Snapshot,
    next: &Snapshot,
    link: &[Option<usize>],
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let np = prev.set.degeneracies.len();
    let nn = next.set.degeneracies.len();
    let mut parent: Vec<usize> = (0..np + nn).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut used = vec![false; np + nn];
    for (i, l) in link.iter().enumerate() {
        let a = prev.tracked[i].0;
        used[a] = true;
        if let Some(j) = *l {
            let b = np + next.tracked[j].0;
            used[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    for &(c, _) in &next.tracked {
        used[np + c] = true;
    }
    let mut out: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for node in 0..np + nn {
        if !used[node] {
            continue;
        }
        let root = find(&mut parent, node);
        let entry = match out.iter_mut().find(|(r, _, _)| *r == root) {
            Some(e) => e,
            None => {
                out.push((root, Vec::new(), Vec::new()));
                out.last_mut().unwrap()
            }
        };
        if node < np {
            entry.1.push(node);
        } else {
            entry.2.push(node - np);
        }
    }
    out.into_iter().map(|(_, a, b)| (a, b)).collect()
}

fn step_is_acceptable(
    plan: &SweepPlan,
    prev: &Snapshot,
    next: &Snapshot,
    link: &[Option<usize>],
) -> bool {
    let edge = 0.5 * plan.escape_radius;
    let mut hit = vec![false; next.tracked.len()];
    for (i, l) in link.iter().enumerate() {
        let g = prev.tracked[i].1;
        match *l {
            Some(j) => {
                hit[j] = true;
                if (next.tracked[j].1 - g).norm() > plan.max_displacement * g.norm().max(1.0) {
                    return false;
                }
            }
            None => {
                if g.norm() < edge {
                    return false;
                }
            }
        }
    }
    hit.iter()
        .zip(&next.tracked)
        .all(|(&h, (_, g))| h || g.norm() >= edge)
}

/// Whether the clusters `group` of `prev` have already merged or separated at
/// `parameter`.
fn event_happened(
    plan: &SweepPlan,
    prev: &Snapshot,
    group: &[usize],
    parameter: f64,
) -> Result<Option<Complex64>> {
    let mid = snapshot(plan, parameter)?;
    let prev_roots: Vec<Complex64> = prev.tracked.iter().map(|t| t.1).collect();
    let mid_roots: Vec<Complex64> = mid.tracked.iter().map(|t| t.1).collect();
    let link = match_roots(&prev_roots, &mid_roots, plan.escape_radius);
    let touched: Vec<(Vec<usize>, Vec<usize>)> = components(prev, &mid, &link)
        .into_iter()
        .filter(|(a, _)| a.iter().any(|c| group.contains(c)))
        .collect();
    if touched.iter().all(|(a, b)| a.len() == 1 && b.len() == 1) {
        return Ok(None);
    }
    let clusters: Vec<usize> = touched.into_iter().flat_map(|(_, b)| b).collect();
    Ok(Some(centroid(&mid.set, &clusters)))
}

fn centroid(set: &DegeneracySet, clusters: &[usize]) -> Complex64 {
    let roots: Vec<Complex64> = clusters
        .iter()
        .flat_map(|&c| set.degeneracies[c].members.iter().copied())
        .collect();
    roots.iter().sum::<Complex64>() / roots.len() as f64
}

/// Bisects for the parameter where `group` merges or separates; returns it
/// with the centroid of the roots involved just after the event.
fn locate_event(
    plan: &SweepPlan,
    prev: &Snapshot,
    group: &[usize],
    next_parameter: f64,
    next_location: Complex64,
) -> Result<(f64, Complex64)> {
    let (mut before, mut after) = (prev.parameter, next_parameter);
    let mut location = next_location;
    while (after - before).abs() > plan.event_tol {
        let mid = 0.5 * (before + after);
        match event_happened(plan, prev, group, mid)? {
            Some(at) => {
                after = mid;
                location = at;
            }
            None => before = mid,
        }
    }
    Ok((0.5 * (before + after), location))
}

/// Follows every discriminant root inside the escape radius from `start` to
/// `end`, halving the step whenever a root would move farther than the
/// displacement cap or appear/disappear away from the escape circle.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let dir = plan.direction();
    let mut prev = snapshot(plan, plan.start)?;
    classify_snapshot(plan, &mut prev)?;
    let mut trajectories: Vec<Trajectory> = Vec::new();
    let mut ids: Vec<usize> = Vec::with_capacity(prev.tracked.len());
    for &(c, g) in &prev.tracked {
        let id = trajectories.len();
        trajectories.push(Trajectory {
            id,
            points: vec![point(&prev, c, g)],
            events: Vec::new(),
        });
        ids.push(id);
    }
    let mut events: Vec<Event> = Vec::new();
    let mut steps = vec![StepSummary {
        parameter: prev.parameter,
        degree: prev.set.total_root_count,
        tracked: prev.tracked.len(),
        beyond_escape: prev.beyond(),
    }];
    let first = prev.set.clone();
    let mut step = plan.initial_step;

    while (plan.end - prev.parameter) * dir > 0.0 {
        let remaining = (plan.end - prev.parameter).abs();
        let h = step.min(remaining);
        let target = if h == remaining {
            plan.end
        } else {
            prev.parameter + dir * h
        };
        let next = snapshot(plan, target)?;
        let prev_roots: Vec<Complex64> = prev.tracked.iter().map(|t| t.1).collect();
        let next_roots: Vec<Complex64> = next.tracked.iter().map(|t| t.1).collect();
        let link = match_roots(&prev_roots, &next_roots, plan.escape_radius);
        if !step_is_acceptable(plan, &prev, &next, &link) {
            if h / 2.0 < plan.min_step {
                return Err(Error::StepUnderflow { parameter: target });
            }
            step = h / 2.0;
            continue;
        }
        let mut next = next;
        classify_snapshot(plan, &mut next)?;

        let mut step_events: Vec<Event> = Vec::new();
        for (group_prev, group_next) in components(&prev, &next, &link) {
            let (np, nn) = (group_prev.len(), group_next.len());
            if np == 0 || nn == 0 || (np == 1 && nn == 1) {
                continue;
            }
            let (at, location) = locate_event(
                plan,
                &prev,
                &group_prev,
                target,
                centroid(&next.set, &group_next),
            )?;
            let members: Vec<usize> = prev
                .tracked
                .iter()
                .enumerate()
                .filter(|(_, (c, _))| group_prev.contains(c))
                .map(|(i, _)| ids[i])
                .collect();
            let multiplicity = members.len();
            if np > 1 {
                step_events.push(Event {
                    kind: EventKind::Collision,
                    parameter: at,
                    detected_at: target,
                    location,
                    trajectories: members.clone(),
                    multiplicity,
                });
            }
            if nn > 1 {
                step_events.push(Event {
                    kind: EventKind::Split,
                    parameter: at,
                    detected_at: target,
                    location,
                    trajectories: members,
                    multiplicity,
                });
            }
        }

        let mut next_ids: Vec<Option<usize>> = vec![None; next.tracked.len()];
        for (i, l) in link.iter().enumerate() {
            match *l {
                Some(j) => next_ids[j] = Some(ids[i]),
                None => step_events.push(Event {
                    kind: EventKind::Escape,
                    parameter: target,
                    detected_at: target,
                    location: prev.tracked[i].1,
                    trajectories: vec![ids[i]],
                    multiplicity: 1,
                }),
            }
        }
        let mut new_ids = Vec::with_capacity(next.tracked.len());
        for (j, slot) in next_ids.iter().enumerate() {
            let (c, g) = next.tracked[j];
            let id = match *slot {
                Some(id) => id,
                None => {
                    let id = trajectories.len();
                    trajectories.push(Trajectory {
                        id,
                        points: Vec::new(),
                        events: Vec::new(),
                    });
                    step_events.push(Event {
                        kind: EventKind::Entry,
                        parameter: target,
                        detected_at: target,
                        location: g,
                        trajectories: vec![id],
                        multiplicity: 1,
                    });
                    id
                }
            };
            trajectories[id].points.push(point(&next, c, g));
            new_ids.push(id);
        }
        for e in &step_events {
            for &id in &e.trajectories {
                trajectories[id].events.push(e.clone());
            }
        }
        events.extend(step_events);
        steps.push(StepSummary {
            parameter: next.parameter,
            degree: next.set.total_root_count,
            tracked: next.tracked.len(),
            beyond_escape: next.beyond(),
        });
        ids = new_ids;
        prev = next;
        step = (2.0 * h).min(plan.initial_step);
    }
    Ok(SweepResult {
        plan: plan.clone(),
        trajectories,
        events,
        steps,
        first,
        last: prev.set,
    })
}

fn point(snap: &Snapshot, cluster: usize, g: Complex64) -> TrajectoryPoint {
    let d = &snap.set.degeneracies[cluster];
    TrajectoryPoint {
        parameter: snap.parameter,
        location: g,
        multiplicity: d.multiplicity,
        kind: d.kind,
    }
}

/// Bisection result for the collision of the two level crossings.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub epsilon3: f64,
    /// Final bracket `[lo, hi]`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// The merged cluster at `epsilon3` when the two crossings are within the
    /// clustering tolerance of each other.
    pub collision: Option<Degeneracy>,
}

impl CriticalPoint {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// `(g₁ − g₂)²` for the two closest double roots: positive while both lie on
/// the real axis, negative once they form a conjugate pair. Clustering is at
/// the coarse tolerance only; near the collision the four roots form one
/// cluster, which is split into the pairing with the smallest spread.
fn crossing_separation(spec: &ModelSpec, config: &DegeneracyConfig) -> Result<f64> {
    let model = PairingModel::new(spec)?;
    let roots = refined_roots(&model, config)?;
    let coarse = DegeneracyConfig {
        coincidence_tol: f64::INFINITY,
        ..config.clone()
    };
    let set = cluster_adaptive(&roots, spec, &coarse)?;
    if let Some(d) = set.degeneracies.iter().find(|d| d.multiplicity == 4) {
        let m = &d.members;
        let pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
        let spread = |((a, b), (c, e)): ((usize, usize), (usize, usize))| {
            (m[a] - m[b]).norm() + (m[c] - m[e]).norm()
        };
        let best = pairings
            .into_iter()
            .min_by(|x, y| spread(*x).total_cmp(&spread(*y)))
            .unwrap();
        let ((a, b), (c, e)) = best;
        let sep = 0.5 * (m[a] + m[b]) - 0.5 * (m[c] + m[e]);
        return Ok((sep * sep).re);
    }
    let doubles: Vec<Complex64> = set
        .degeneracies
        .iter()
        .filter(|d| d.multiplicity == 2)
        .map(|d| d.location)
        .collect();
    let mut best: Option<(f64, Complex64)> = None;
    for i in 0..doubles.len() {
        for j in i + 1..doubles.len() {
            let d = doubles[i] - doubles[j];
            if best.is_none_or(|(n, _)| d.norm() < n) {
                best = Some((d.norm(), d * d));
            }
        }
    }
    best.map(|(_, s)| s.re).ok_or_else(|| {
        Error::PreconditionViolated(format!(
            "fewer than two level crossings at epsilon3 = {}",
            spec.epsilon[2]
        ))
    })
}

/// Bisects on the sign of the crossing separation until the bracket is
/// narrower than `tol`.
pub fn locate_critical_epsilon3(
    spec: &ModelSpec,
    bracket: (f64, f64),
    tol: f64,
) -> Result<CriticalPoint> {
    locate_critical_epsilon3_with(spec, bracket, tol, &DegeneracyConfig::default())
}

pub fn locate_critical_epsilon3_with(
    spec: &ModelSpec,
    bracket: (f64, f64),
    tol: f64,
    config: &DegeneracyConfig,
) -> Result<CriticalPoint> {
    if spec.zeta != 1.0 || spec.levels() != 3 {
        return Err(Error::PreconditionViolated(
            "critical epsilon3 needs three levels at zeta = 1".into(),
        ));
    }
    let (mut lo, mut hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::PreconditionViolated(
            "bracket must be a nonempty interval and tol positive".into(),
        ));
    }
    let f = |e: f64| crossing_separation(&spec.with_epsilon(2, e), config);
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 || fhi == 0.0 {
        let e = if flo == 0.0 { lo } else { hi };
        return Ok(CriticalPoint {
            epsilon3: e,
            bracket: (e, e),
            iterations: 0,
            collision: collision_cluster(spec, e, config)?,
        });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketInvalid { lo, hi });
    }
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        iterations += 1;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = 0.5 * (lo + hi);
    Ok(CriticalPoint {
        epsilon3: e,
        bracket: (lo, hi),
        iterations,
        collision: collision_cluster(spec, e, config)?,
    })
}

/// The highest-multiplicity cluster at fixed tolerance `config.cluster_tol`,
/// if it holds at least four roots.
fn collision_cluster(
    spec: &ModelSpec,
    eps3: f64,
    config: &DegeneracyConfig,
) -> Result<Option<Degeneracy>> {
    let spec = spec.with_epsilon(2, eps3);
    let model = PairingModel::new(&spec)?;
    let roots = refined_roots(&model, config)?;
    let set = match cluster_roots(&roots, config.cluster_tol, &spec) {
        Ok(set) => set,
        Err(Error::AmbiguousClustering { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(set
        .degeneracies
        .into_iter()
        .filter(|d| d.multiplicity >= 4)
        .max_by_key(|d| d.multiplicity))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticRow {
    pub epsilon3: f64,
    /// Level crossings sorted by real part.
    pub crossings: Vec<Complex64>,
    pub ep_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub rows: Vec<AsymptoticRow>,
    /// Every row has exactly two crossings, one on each side of `g = 0`.
    pub opposite_signs: bool,
    /// `|Re g|` of both crossings increases strictly from row to row.
    pub monotone: bool,
}

/// Follows the two level crossings of the integrable model to large `ε₃`.
pub fn asymptotic_check(spec: &ModelSpec, epsilon3_values: &[f64]) -> Result<AsymptoticReport> {
    asymptotic_check_with(spec, epsilon3_values, &DegeneracyConfig::default())
}

pub fn asymptotic_check_with(
    spec: &ModelSpec,
    epsilon3_values: &[f64],
    config: &DegeneracyConfig,
) -> Result<AsymptoticReport> {
    if spec.zeta != 1.0 || spec.levels() != 3 {
        return Err(Error::PreconditionViolated(
            "asymptotic check needs three levels at zeta = 1".into(),
        ));
    }
    let mut rows = Vec::with_capacity(epsilon3_values.len());
    for &e in epsilon3_values {
        let s = spec.with_epsilon(2, e);
        let model = PairingModel::new(&s)?;
        let roots = refined_roots(&model, config)?;
        let set = classify(&model, &cluster_adaptive(&roots, &s, config)?, config)?;
        let mut crossings: Vec<Complex64> = set.crossings().map(|d| d.location).collect();
        crossings.sort_by(|a, b| a.re.total_cmp(&b.re));
        rows.push(AsymptoticRow {
            epsilon3: e,
            crossings,
            ep_count: set.count_kind(DegeneracyKind::Ep),
        });
    }
    let opposite_signs = rows
        .iter()
        .all(|r| r.crossings.len() == 2 && r.crossings[0].re < 0.0 && r.crossings[1].re > 0.0);
    let monotone = opposite_signs
        && rows
            .windows(2)
            .all(|w| (0..2).all(|k| w[1].crossings[k].re.abs() > w[0].crossings[k].re.abs()));
    Ok(AsymptoticReport {
        rows,
        opposite_signs,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plan_validation() {
        let mut p = SweepPlan::fig1();
        assert!(p.validate().is_ok());
        p.end = p.start;
        assert!(p.validate().is_err());
        let mut p = SweepPlan::fig1();
        p.end = 0.5;
        assert_eq!(
            p.validate(),
            Err(Error::DegenerateEpsilon {
                first: 1,
                second: 2
            })
        );
        let mut p = SweepPlan::fig2a();
        p.min_step = 0.0;
        assert!(p.validate().is_err());
        let mut p = SweepPlan::fig2a();
        p.end = -0.5;
        assert!(p.validate().is_err());
        for name in SweepPlan::PRESETS {
            assert!(SweepPlan::preset(name).unwrap().validate().is_ok());
        }
        assert!(SweepPlan::preset("fig3").is_none());
    }

    #[test]
    fn matching_prefers_short_moves_and_escape_circle() {
        let prev = [c(0.0, 0.0), c(1.0, 0.0), c(900.0, 0.0)];
        let next = [c(1.01, 0.0), c(0.01, 0.0)];
        assert_eq!(match_roots(&prev, &next, 1e3), vec![Some(1), Some(0), None]);
        let next = [c(1.01, 0.0), c(0.01, 0.0), c(950.0, 0.0), c(-990.0, 0.0)];
        let link = match_roots(&prev, &next, 1e3);
        assert_eq!(link, vec![Some(1), Some(0), Some(2)]);
    }

    #[test]
    fn bracket_without_collision() {
        let spec = ModelSpec::three_level(7.0 / 3.0, 1.0);
        assert!(matches!(
            locate_critical_epsilon3(&spec, (3.0, 4.0), 1e-5),
            Err(Error::BracketInvalid { .. })
        ));
        assert!(matches!(
            locate_critical_epsilon3(&spec.with_zeta(0.5), (1.5, 2.5), 1e-5),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn crossings_move_apart_with_epsilon3() {
        let rep =
            asymptotic_check(&ModelSpec::three_level(3.0, 1.0), &[3.0, 6.0, 12.0, 24.0]).unwrap();
        assert!(rep.opposite_signs);
        assert!(rep.monotone, "{:?}", rep.rows);
        assert!(rep.rows.iter().all(|r| r.ep_count == 12));
    }
}
