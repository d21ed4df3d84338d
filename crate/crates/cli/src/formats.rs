//! JSON and CSV encodings of specs, matrices, polynomials, degeneracy sets and
//! sweep results.

use std::fmt;

use pairdeg_core::continuation::{CriticalPoint, Event, SweepResult};
use pairdeg_core::degeneracy::{
    Degeneracy, DegeneracyKind, DegeneracySet, Evidence, Permutation, QTest,
};
use pairdeg_core::model::{IdentityReport, ModelSpec, OperatorMatrix};
use pairdeg_core::poly::ComplexPolynomial;
use pairdeg_core::Complex64;
use serde::{Deserialize, Serialize};

/// A complex number as `[re, im]`.
pub type ComplexJson = [f64; 2];

pub fn to_pair(z: Complex64) -> ComplexJson {
    [z.re, z.im]
}

pub fn from_pair(c: ComplexJson) -> Complex64 {
    Complex64::new(c[0], c[1])
}

#[derive(Debug)]
pub enum FormatError {
    Json(serde_json::Error),
    Csv(csv::Error),
    Model(pairdeg_core::Error),
    Invalid(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Json(e) => write!(f, "malformed JSON: {e}"),
            FormatError::Csv(e) => write!(f, "CSV: {e}"),
            FormatError::Model(e) => write!(f, "{e}"),
            FormatError::Invalid(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

impl From<csv::Error> for FormatError {
    fn from(e: csv::Error) -> Self {
        FormatError::Csv(e)
    }
}

impl From<pairdeg_core::Error> for FormatError {
    fn from(e: pairdeg_core::Error) -> Self {
        FormatError::Model(e)
    }
}

fn default_zeta() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub omega: Vec<u32>,
    pub epsilon: Vec<f64>,
    pub pairs: u32,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
}

impl From<&ModelSpec> for SpecJson {
    fn from(s: &ModelSpec) -> Self {
        SpecJson {
            omega: s.omega.clone(),
            epsilon: s.epsilon.clone(),
            pairs: s.pairs,
            zeta: s.zeta,
        }
    }
}

/// Parses and validates a spec.
pub fn spec_from_json(text: &str) -> Result<ModelSpec, FormatError> {
    let j: SpecJson = serde_json::from_str(text)?;
    Ok(ModelSpec::new(j.omega, j.epsilon, j.pairs, j.zeta)?)
}

pub fn spec_to_json(spec: &ModelSpec) -> String {
    serde_json::to_string(&SpecJson::from(spec)).expect("spec serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub label: String,
    pub dim: usize,
    /// Row-major.
    pub entries: Vec<ComplexJson>,
}

impl From<&OperatorMatrix> for MatrixJson {
    fn from(m: &OperatorMatrix) -> Self {
        MatrixJson {
            label: m.label.to_string(),
            dim: m.dim(),
            entries: m.matrix.as_slice().iter().map(|&z| to_pair(z)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub degree: usize,
    /// Ascending powers of `g`.
    pub coeffs: Vec<ComplexJson>,
}

impl From<&ComplexPolynomial> for PolynomialJson {
    fn from(p: &ComplexPolynomial) -> Self {
        PolynomialJson {
            degree: p.degree(),
            coeffs: p.coeffs().iter().map(|&z| to_pair(z)).collect(),
        }
    }
}

impl PolynomialJson {
    pub fn to_polynomial(&self) -> ComplexPolynomial {
        ComplexPolynomial::new(self.coeffs.iter().map(|&c| from_pair(c)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTestJson {
    pub h_gap: f64,
    pub q_gap: f64,
    pub subspace_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceJson {
    pub q_test: Option<QTestJson>,
    pub monodromy: Option<Vec<usize>>,
    pub monodromy_radius: Option<f64>,
    /// `[distance, overlap]` pairs.
    pub overlaps: Vec<[f64; 2]>,
    pub beyond_escape: bool,
    pub consistent: bool,
}

impl From<&Evidence> for EvidenceJson {
    fn from(e: &Evidence) -> Self {
        EvidenceJson {
            q_test: e.q_test.map(|q| QTestJson {
                h_gap: q.h_gap,
                q_gap: q.q_gap,
                subspace_dim: q.subspace_dim,
            }),
            monodromy: e.monodromy.as_ref().map(|p| p.map.clone()),
            monodromy_radius: e.monodromy_radius,
            overlaps: e.overlaps.iter().map(|&(d, o)| [d, o]).collect(),
            beyond_escape: e.beyond_escape,
            consistent: e.consistent,
        }
    }
}

impl From<&EvidenceJson> for Evidence {
    fn from(e: &EvidenceJson) -> Self {
        Evidence {
            q_test: e.q_test.as_ref().map(|q| QTest {
                h_gap: q.h_gap,
                q_gap: q.q_gap,
                subspace_dim: q.subspace_dim,
            }),
            monodromy: e.monodromy.clone().map(|map| Permutation { map }),
            monodromy_radius: e.monodromy_radius,
            overlaps: e.overlaps.iter().map(|&[d, o]| (d, o)).collect(),
            beyond_escape: e.beyond_escape,
            consistent: e.consistent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyJson {
    pub g: ComplexJson,
    pub multiplicity: usize,
    pub kind: Option<String>,
    pub evidence: EvidenceJson,
    pub members: Vec<ComplexJson>,
}

impl From<&Degeneracy> for DegeneracyJson {
    fn from(d: &Degeneracy) -> Self {
        DegeneracyJson {
            g: to_pair(d.location),
            multiplicity: d.multiplicity,
            kind: d.kind.map(|k| k.as_str().to_owned()),
            evidence: (&d.evidence).into(),
            members: d.members.iter().map(|&z| to_pair(z)).collect(),
        }
    }
}

impl DegeneracyJson {
    pub fn to_degeneracy(&self) -> Result<Degeneracy, FormatError> {
        let kind = match &self.kind {
            None => None,
            Some(s) => Some(
                DegeneracyKind::parse(s)
                    .ok_or_else(|| FormatError::Invalid(format!("unknown kind {s:?}")))?,
            ),
        };
        if self.members.len() != self.multiplicity {
            return Err(FormatError::Invalid(format!(
                "multiplicity {} but {} members",
                self.multiplicity,
                self.members.len()
            )));
        }
        Ok(Degeneracy {
            location: from_pair(self.g),
            multiplicity: self.multiplicity,
            kind,
            evidence: (&self.evidence).into(),
            members: self.members.iter().map(|&c| from_pair(c)).collect(),
        })
    }
}

pub fn degeneracies_to_json(set: &DegeneracySet) -> String {
    let list: Vec<DegeneracyJson> = set.degeneracies.iter().map(DegeneracyJson::from).collect();
    serde_json::to_string_pretty(&list).expect("degeneracies serialize")
}

/// Rebuilds a set from its JSON list; the spec is not part of the list.
pub fn degeneracies_from_json(text: &str, spec: &ModelSpec) -> Result<DegeneracySet, FormatError> {
    let list: Vec<DegeneracyJson> = serde_json::from_str(text)?;
    let degeneracies = list
        .iter()
        .map(DegeneracyJson::to_degeneracy)
        .collect::<Result<Vec<_>, _>>()?;
    let total_root_count = degeneracies.iter().map(|d| d.multiplicity).sum();
    Ok(DegeneracySet {
        degeneracies,
        total_root_count,
        spec: spec.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheckJson {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReportJson {
    pub passed: bool,
    pub samples: Vec<ComplexJson>,
    pub checks: Vec<IdentityCheckJson>,
    pub constants: Vec<ComplexJson>,
}

impl From<&IdentityReport> for IdentityReportJson {
    fn from(r: &IdentityReport) -> Self {
        IdentityReportJson {
            passed: r.all_passed(),
            samples: r.samples.iter().map(|&z| to_pair(z)).collect(),
            checks: r
                .checks
                .iter()
                .map(|c| IdentityCheckJson {
                    name: c.name.clone(),
                    max_residual: c.max_residual,
                    tolerance: c.tolerance,
                    passed: c.passed,
                })
                .collect(),
            constants: r.constants.iter().map(|&z| to_pair(z)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub g: ComplexJson,
    pub eigenvalues: Vec<ComplexJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hamiltonian: Option<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionJson {
    pub g: ComplexJson,
    pub multiplicity: usize,
    pub members: Vec<ComplexJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalJson {
    pub epsilon3: f64,
    pub bracket: [f64; 2],
    pub width: f64,
    pub iterations: usize,
    pub collision: Option<CollisionJson>,
}

impl From<&CriticalPoint> for CriticalJson {
    fn from(c: &CriticalPoint) -> Self {
        CriticalJson {
            epsilon3: c.epsilon3,
            bracket: [c.bracket.0, c.bracket.1],
            width: c.width(),
            iterations: c.iterations,
            collision: c.collision.as_ref().map(|d| CollisionJson {
                g: to_pair(d.location),
                multiplicity: d.multiplicity,
                members: d.members.iter().map(|&z| to_pair(z)).collect(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventJson {
    pub kind: String,
    pub parameter: f64,
    pub detected_at: f64,
    pub g: ComplexJson,
    pub multiplicity: usize,
    pub trajectories: Vec<usize>,
}

impl From<&Event> for EventJson {
    fn from(e: &Event) -> Self {
        EventJson {
            kind: e.kind.as_str().to_owned(),
            parameter: e.parameter,
            detected_at: e.detected_at,
            g: to_pair(e.location),
            multiplicity: e.multiplicity,
            trajectories: e.trajectories.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub parameter: f64,
    pub g: ComplexJson,
    pub multiplicity: usize,
    pub kind: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryJson {
    pub id: usize,
    pub points: Vec<PointJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    pub parameter: f64,
    pub degree: usize,
    pub tracked: usize,
    pub beyond_escape: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepJson {
    pub spec: SpecJson,
    pub parameter: String,
    pub start: f64,
    pub end: f64,
    pub steps: Vec<StepJson>,
    pub events: Vec<EventJson>,
    pub trajectories: Vec<TrajectoryJson>,
}

impl From<&SweepResult> for SweepJson {
    fn from(r: &SweepResult) -> Self {
        SweepJson {
            spec: (&r.plan.base).into(),
            parameter: r.plan.parameter.as_str().to_owned(),
            start: r.plan.start,
            end: r.plan.end,
            steps: r
                .steps
                .iter()
                .map(|s| StepJson {
                    parameter: s.parameter,
                    degree: s.degree,
                    tracked: s.tracked,
                    beyond_escape: s.beyond_escape,
                })
                .collect(),
            events: r.events.iter().map(EventJson::from).collect(),
            trajectories: r
                .trajectories
                .iter()
                .map(|t| TrajectoryJson {
                    id: t.id,
                    points: t
                        .points
                        .iter()
                        .map(|p| PointJson {
                            parameter: p.parameter,
                            g: to_pair(p.location),
                            multiplicity: p.multiplicity,
                            kind: p.kind.map(|k| k.as_str().to_owned()),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub const SWEEP_CSV_COLUMNS: [&str; 7] = [
    "parameter",
    "trajectory_id",
    "re_g",
    "im_g",
    "multiplicity",
    "kind",
    "event",
];

/// One row per trajectory point. The `event` column lists the events the
/// trajectory took part in at that step, joined by `;`; an escape is attached
/// to the last point before the root left.
pub fn sweep_to_csv(r: &SweepResult) -> Result<String, FormatError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_CSV_COLUMNS)?;
    for t in &r.trajectories {
        let last = t.points.len().saturating_sub(1);
        for (k, p) in t.points.iter().enumerate() {
            let events: Vec<&str> = t
                .events
                .iter()
                .filter(|e| {
                    if e.kind == pairdeg_core::continuation::EventKind::Escape {
                        k == last
                    } else {
                        e.detected_at == p.parameter
                    }
                })
                .map(|e| e.kind.as_str())
                .collect();
            w.write_record([
                p.parameter.to_string(),
                t.id.to_string(),
                p.location.re.to_string(),
                p.location.im.to_string(),
                p.multiplicity.to_string(),
                p.kind.map_or("", |k| k.as_str()).to_owned(),
                events.join(";"),
            ])?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV is UTF-8"))
}
