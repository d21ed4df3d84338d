//! Seniority-zero pairing model: pair basis, SU(2) pair operators, the
//! Richardson–Gaudin integrals of motion and the Hamiltonian family
//!
//! ```text
//! H(g) = Σᵢ εᵢ Nᵢ + ζ g Σᵢⱼ A†ᵢ Aⱼ − (1 − ζ) g Σᵢ Nᵢ²
//! ```
//!
//! which is the integrable pairing Hamiltonian at `ζ = 1`, diagonal (and
//! integrable through the number operators) at `ζ = 0`, and non-integrable in
//! between.
//!
//! Each level `j` carries an SU(2) copy with `K⁰ⱼ = Nⱼ/2 − Ωⱼ/4`,
//! `K⁺ⱼ = A†ⱼ/2`, `K⁻ⱼ = Aⱼ/2` in the standard normalization
//! `[K⁺, K⁻] = 2K⁰`, `[K⁰, K^±] = ±K^±`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Defines one member of the model family.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Particle degeneracy `Ωⱼ` of each level (positive, even).
    pub omega: Vec<u32>,
    /// Single-particle energies `εⱼ`, pairwise distinct.
    pub epsilon: Vec<f64>,
    /// Number of fermion pairs `P`.
    pub pairs: u32,
    /// Mixing between the pairing (`ζ = 1`) and diagonal (`ζ = 0`) limits.
    pub zeta: f64,
}

impl ModelSpec {
    pub fn new(omega: Vec<u32>, epsilon: Vec<f64>, pairs: u32, zeta: f64) -> Result<Self> {
        let spec = ModelSpec {
            omega,
            epsilon,
            pairs,
            zeta,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Three levels with `Ω = (6, 4, 2)`, `ε = (0, 1, ε₃)` and four pairs.
    pub fn three_level(epsilon3: f64, zeta: f64) -> Self {
        ModelSpec {
            omega: vec![6, 4, 2],
            epsilon: vec![0.0, 1.0, epsilon3],
            pairs: 4,
            zeta,
        }
    }

    pub fn levels(&self) -> usize {
        self.omega.len()
    }

    pub fn with_zeta(&self, zeta: f64) -> Self {
        ModelSpec {
            zeta,
            ..self.clone()
        }
    }

    pub fn with_epsilon(&self, level: usize, value: f64) -> Self {
        let mut s = self.clone();
        s.epsilon[level] = value;
        s
    }

    /// Pair capacity `Ωⱼ/2` of each level.
    pub fn capacities(&self) -> impl Iterator<Item = u32> + '_ {
        self.omega.iter().map(|o| o / 2)
    }

    /// True on the integrable pairing line where `Q(g)` is an integral of
    /// motion.
    pub fn q_available(&self) -> bool {
        self.levels() == 3
            && self.epsilon[0] == 0.0
            && self.epsilon[1] != 0.0
            && self.epsilon[2] != 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least 2 levels, got {}",
                self.omega.len()
            )));
        }
        if self.epsilon.len() != self.omega.len() {
            return Err(Error::InvalidSpec(format!(
                "{} degeneracies but {} energies",
                self.omega.len(),
                self.epsilon.len()
            )));
        }
        if let Some((j, o)) = self
            .omega
            .iter()
            .enumerate()
            .find(|(_, &o)| o == 0 || o % 2 == 1)
        {
            return Err(Error::InvalidSpec(format!(
                "degeneracy of level {j} must be positive and even, got {o}"
            )));
        }
        if self.epsilon.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidSpec(
                "single-particle energies must be finite".into(),
            ));
        }
        if self.pairs == 0 {
            return Err(Error::InvalidSpec("need at least one pair".into()));
        }
        let capacity: u32 = self.capacities().sum();
        if self.pairs > capacity {
            return Err(Error::InvalidSpec(format!(
                "{} pairs exceed capacity {capacity}",
                self.pairs
            )));
        }
        if !(0.0..=1.0).contains(&self.zeta) {
            return Err(Error::InvalidSpec(format!(
                "zeta = {} outside [0, 1]",
                self.zeta
            )));
        }
        for i in 0..self.epsilon.len() {
            for j in i + 1..self.epsilon.len() {
                if self.epsilon[i] == self.epsilon[j] {
                    return Err(Error::DegenerateEpsilon {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Ordered pair-occupation basis `(p₁, …, p_L)` with `Σ pⱼ = P`.
///
/// States are ordered colexicographically: the occupation of the last level
/// is the most significant key, then the previous one, and so on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairBasis {
    states: Vec<Vec<u32>>,
}

impl PairBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn index_of(&self, state: &[u32]) -> Option<usize> {
        self.states.binary_search_by(|s| colex_cmp(s, state)).ok()
    }
}

fn colex_cmp(a: &[u32], b: &[u32]) -> core::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

pub fn enumerate_basis(spec: &ModelSpec) -> Result<PairBasis> {
    spec.validate()?;
    let caps: Vec<u32> = spec.capacities().collect();
    let mut states = Vec::new();
    let mut cur = vec![0u32; caps.len()];
    fn fill(level: usize, left: u32, caps: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if level == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let room: u32 = caps[level + 1..].iter().sum();
        let lo = left.saturating_sub(room);
        for p in lo..=caps[level].min(left) {
            cur[level] = p;
            fill(level + 1, left - p, caps, cur, out);
        }
    }
    fill(0, spec.pairs, &caps, &mut cur, &mut states);
    states.sort_by(|a, b| colex_cmp(a, b));
    Ok(PairBasis { states })
}

/// Identifies an operator matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorLabel {
    Hamiltonian,
    /// Integral of motion `R_l`.
    R(usize),
    Q,
    TotalNumber,
    Create(usize),
    Annihilate(usize),
    Number(usize),
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorLabel::Hamiltonian => write!(f, "H"),
            OperatorLabel::R(l) => write!(f, "R{}", l + 1),
            OperatorLabel::Q => write!(f, "Q"),
            OperatorLabel::TotalNumber => write!(f, "N"),
            OperatorLabel::Create(j) => write!(f, "A+{}", j + 1),
            OperatorLabel::Annihilate(j) => write!(f, "A{}", j + 1),
            OperatorLabel::Number(j) => write!(f, "N{}", j + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: OperatorLabel,
    pub matrix: CMatrix,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// `A†ⱼ`, `Aⱼ`, `Nⱼ` for every level on a fixed basis.
#[derive(Debug, Clone)]
pub struct PairOperators {
    pub create: Vec<CMatrix>,
    pub annihilate: Vec<CMatrix>,
    pub number: Vec<CMatrix>,
}

impl PairOperators {
    pub fn levels(&self) -> usize {
        self.create.len()
    }

    /// `K⁺ⱼ = A†ⱼ/2`.
    pub fn k_plus(&self, j: usize) -> CMatrix {
        self.create[j].scale(Complex64::new(0.5, 0.0))
    }

    /// `K⁻ⱼ = Aⱼ/2`.
    pub fn k_minus(&self, j: usize) -> CMatrix {
        self.annihilate[j].scale(Complex64::new(0.5, 0.0))
    }

    /// `K⁰ⱼ = Nⱼ/2 − Ωⱼ/4`.
    pub fn k_zero(&self, j: usize, omega: u32) -> CMatrix {
        self.number[j]
            .scale(Complex64::new(0.5, 0.0))
            .add_identity(Complex64::new(-(omega as f64) / 4.0, 0.0))
    }

    pub fn as_labeled(&self) -> Vec<OperatorMatrix> {
        let mut out = Vec::with_capacity(3 * self.levels());
        for j in 0..self.levels() {
            out.push(OperatorMatrix {
                label: OperatorLabel::Create(j),
                matrix: self.create[j].clone(),
            });
            out.push(OperatorMatrix {
                label: OperatorLabel::Annihilate(j),
                matrix: self.annihilate[j].clone(),
            });
            out.push(OperatorMatrix {
                label: OperatorLabel::Number(j),
                matrix: self.number[j].clone(),
            });
        }
        out
    }
}

/// Matrix element `⟨pⱼ+1| A†ⱼ |pⱼ⟩ = 2·sqrt((Ωⱼ/2 − pⱼ)(pⱼ + 1))`.
pub fn pair_creation_element(omega: u32, p: u32) -> f64 {
    let cap = (omega / 2) as f64;
    let p = p as f64;
    if p >= cap {
        0.0
    } else {
        2.0 * crate::math::sqrt((cap - p) * (p + 1.0))
    }
}

/// Every occupation vector with `0 ≤ pⱼ ≤ Ωⱼ/2`, for any total pair number.
/// This space is closed under the individual ladder operators.
pub fn enumerate_pair_space(spec: &ModelSpec) -> Result<PairBasis> {
    spec.validate()?;
    let caps: Vec<u32> = spec.capacities().collect();
    let mut states: Vec<Vec<u32>> = vec![Vec::new()];
    for &c in &caps {
        states = states
            .into_iter()
            .flat_map(|s| {
                (0..=c).map(move |p| {
                    let mut t = s.clone();
                    t.push(p);
                    t
                })
            })
            .collect();
    }
    states.sort_by(|a, b| colex_cmp(a, b));
    Ok(PairBasis { states })
}

/// Matrix elements of `A†ⱼ`, `Aⱼ`, `Nⱼ` between the states of `basis`.
///
/// On a fixed-pair-number basis the standalone ladder operators have no
/// matrix elements inside the basis; build them on [`enumerate_pair_space`]
/// and restrict products instead.
pub fn build_pair_operators(spec: &ModelSpec, basis: &PairBasis) -> Result<PairOperators> {
    let levels = spec.levels();
    let caps: Vec<u32> = spec.capacities().collect();
    for s in basis.states() {
        if s.len() != levels {
            return Err(Error::DimensionMismatch {
                expected: levels,
                found: s.len(),
            });
        }
        if let Some(j) = s.iter().zip(&caps).position(|(p, c)| p > c) {
            return Err(Error::InvalidSpec(format!(
                "basis state {s:?} overfills level {j}"
            )));
        }
    }
    let n = basis.dim();
    let mut create = Vec::with_capacity(levels);
    let mut number = Vec::with_capacity(levels);
    let mut target = vec![0u32; levels];
    for j in 0..levels {
        let mut a_dag = CMatrix::zeros(n);
        let mut num = CMatrix::zeros(n);
        for (col, s) in basis.states().iter().enumerate() {
            num[(col, col)] = Complex64::new(2.0 * s[j] as f64, 0.0);
            let amp = pair_creation_element(spec.omega[j], s[j]);
            if amp == 0.0 {
                continue;
            }
            target.copy_from_slice(s);
            target[j] += 1;
            if let Some(row) = basis.index_of(&target) {
                a_dag[(row, col)] = Complex64::new(amp, 0.0);
            }
        }
        create.push(a_dag);
        number.push(num);
    }
    let annihilate = create.iter().map(CMatrix::transpose).collect();
    Ok(PairOperators {
        create,
        annihilate,
        number,
    })
}

/// `H(g) = H₀ + g·H₁`; both the integrable and the interpolating Hamiltonian
/// are linear in the coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPencil {
    pub h0: CMatrix,
    pub h1: CMatrix,
}

impl HamiltonianPencil {
    pub fn at(&self, g: Complex64) -> CMatrix {
        self.h0.add_scaled(g, &self.h1)
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    /// Norm scale used to make eigenvalue tolerances relative.
    pub fn scale_at(&self, g: Complex64) -> f64 {
        self.h0.frobenius_norm() + g.norm() * self.h1.frobenius_norm()
    }
}

/// Model operators on the fixed-pair-number basis.
///
/// Ladder operators are built on the full pair-occupation space and products
/// are restricted to the `P`-pair sector, which is exact because every
/// product used here conserves the pair number.
#[derive(Debug, Clone)]
pub struct PairingModel {
    spec: ModelSpec,
    basis: PairBasis,
    space: PairBasis,
    space_ops: PairOperators,
    sector: Vec<usize>,
    pencil: HamiltonianPencil,
}

impl PairingModel {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let basis = enumerate_basis(spec)?;
        let space = enumerate_pair_space(spec)?;
        let space_ops = build_pair_operators(spec, &space)?;
        let sector = basis
            .states()
            .iter()
            .map(|s| space.index_of(s).expect("fixed-P state lies in pair space"))
            .collect();
        let mut model = PairingModel {
            spec: spec.clone(),
            basis,
            space,
            space_ops,
            sector,
            pencil: HamiltonianPencil {
                h0: CMatrix::zeros(0),
                h1: CMatrix::zeros(0),
            },
        };
        model.pencil = model.build_pencil();
        Ok(model)
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn basis(&self) -> &PairBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn pair_space(&self) -> &PairBasis {
        &self.space
    }

    /// Ladder and number operators on the full pair-occupation space.
    pub fn pair_space_operators(&self) -> &PairOperators {
        &self.space_ops
    }

    pub fn pencil(&self) -> &HamiltonianPencil {
        &self.pencil
    }

    fn restrict(&self, m: &CMatrix) -> CMatrix {
        let n = self.sector.len();
        let mut out = CMatrix::zeros(n);
        for (i, &si) in self.sector.iter().enumerate() {
            for (j, &sj) in self.sector.iter().enumerate() {
                out[(i, j)] = m[(si, sj)];
            }
        }
        out
    }

    /// `A†ᵢ Aⱼ` on the pair space.
    fn hop(&self, i: usize, j: usize) -> CMatrix {
        &self.space_ops.create[i] * &self.space_ops.annihilate[j]
    }

    fn number(&self, j: usize) -> CMatrix {
        self.restrict(&self.space_ops.number[j])
    }

    fn build_pencil(&self) -> HamiltonianPencil {
        let levels = self.spec.levels();
        let n = self.dim();
        let zeta = self.spec.zeta;
        let mut h0 = CMatrix::zeros(n);
        let mut h1 = CMatrix::zeros(n);
        for i in 0..levels {
            let ni = self.number(i);
            h0 = h0.add_scaled(Complex64::new(self.spec.epsilon[i], 0.0), &ni);
            if zeta != 1.0 {
                h1 = h1.add_scaled(Complex64::new(-(1.0 - zeta), 0.0), &(&ni * &ni));
            }
            if zeta != 0.0 {
                for j in 0..levels {
                    h1 = h1.add_scaled(Complex64::new(zeta, 0.0), &self.restrict(&self.hop(i, j)));
                }
            }
        }
        HamiltonianPencil { h0, h1 }
    }

    pub fn hamiltonian(&self, g: Complex64) -> OperatorMatrix {
        OperatorMatrix {
            label: OperatorLabel::Hamiltonian,
            matrix: self.pencil.at(g),
        }
    }

    pub fn total_number(&self) -> OperatorMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n);
        for j in 0..self.spec.levels() {
            m = &m + &self.number(j);
        }
        OperatorMatrix {
            label: OperatorLabel::TotalNumber,
            matrix: m,
        }
    }

    /// Integral of motion
    /// `R_l = K⁰_l + 4g Σ_{l'≠l} [½(K⁺_l K⁻_l' + K⁻_l K⁺_l') + K⁰_l K⁰_l'] / (ε_l − ε_l')`.
    pub fn integral_of_motion(&self, l: usize, g: Complex64) -> Result<OperatorMatrix> {
        let levels = self.spec.levels();
        if l >= levels {
            return Err(Error::PreconditionViolated(format!(
                "level {l} out of range"
            )));
        }
        let ops = &self.space_ops;
        let k0 = |j: usize| ops.k_zero(j, self.spec.omega[j]);
        let k0l = k0(l);
        let mut coupling = CMatrix::zeros(self.space.dim());
        for lp in (0..levels).filter(|&lp| lp != l) {
            let de = self.spec.epsilon[l] - self.spec.epsilon[lp];
            if de == 0.0 {
                return Err(Error::DegenerateEpsilon {
                    first: l.min(lp),
                    second: l.max(lp),
                });
            }
            let flip = &(&ops.k_plus(l) * &ops.k_minus(lp)) + &(&ops.k_minus(l) * &ops.k_plus(lp));
            let term = flip
                .scale(Complex64::new(0.5, 0.0))
                .add_scaled(Complex64::new(1.0, 0.0), &(&k0l * &k0(lp)));
            coupling = coupling.add_scaled(Complex64::new(1.0 / de, 0.0), &term);
        }
        let r = k0l.add_scaled(g * 4.0, &coupling);
        Ok(OperatorMatrix {
            label: OperatorLabel::R(l),
            matrix: self.restrict(&r),
        })
    }

    /// Second parameter-dependent integral of motion of the three-level model
    /// with `ε₁ = 0`:
    ///
    /// ```text
    /// Q(g) = [1 + g(Ω₂/ε₂ + Ω₃/ε₃)] N₁/2 + g Ω₁/ε₂ · N₂/2 + g Ω₁/ε₃ · N₃/2
    ///        − g Σ_{l=2,3} [½(A†₁A_l + A†_lA₁) + N₁N_l] / ε_l
    /// ```
    pub fn q_operator(&self, g: Complex64) -> Result<OperatorMatrix> {
        if self.spec.levels() != 3 {
            return Err(Error::PreconditionViolated(format!(
                "Q(g) needs exactly 3 levels, got {}",
                self.spec.levels()
            )));
        }
        if self.spec.epsilon[0] != 0.0 {
            return Err(Error::PreconditionViolated(format!(
                "Q(g) needs epsilon_1 = 0, got {}",
                self.spec.epsilon[0]
            )));
        }
        let om: Vec<f64> = self.spec.omega.iter().map(|&o| o as f64).collect();
        let eps = &self.spec.epsilon;
        if eps[1] == 0.0 || eps[2] == 0.0 {
            return Err(Error::PreconditionViolated(
                "Q(g) needs epsilon_2, epsilon_3 nonzero".into(),
            ));
        }
        let ops = &self.space_ops;
        let half = Complex64::new(0.5, 0.0);
        let n = |j: usize| &ops.number[j];
        let mut q =
            n(0).scale((Complex64::new(1.0, 0.0) + g * (om[1] / eps[1] + om[2] / eps[2])) * half);
        for l in 1..3 {
            q = q.add_scaled(g * (om[0] / eps[l]) * half, n(l));
            let flip = &self.hop(0, l) + &self.hop(l, 0);
            let term = flip
                .scale(half)
                .add_scaled(Complex64::new(1.0, 0.0), &(n(0) * n(l)));
            q = q.add_scaled(-g / eps[l], &term);
        }
        Ok(OperatorMatrix {
            label: OperatorLabel::Q,
            matrix: self.restrict(&q),
        })
    }

    /// Checks the algebra of the integrals of motion at each sample coupling.
    pub fn verify_identities(&self, samples: &[Complex64], tol: f64) -> Result<IdentityReport> {
        let levels = self.spec.levels();
        let with_q = self.spec.q_available();
        let mut checks: Vec<IdentityCheck> = Vec::new();
        let mut constants = Vec::with_capacity(samples.len());
        let n_op = self.total_number();
        let omega_sum: f64 = self.spec.omega.iter().map(|&o| o as f64).sum();
        let dim = self.dim() as f64;

        let mut record = |name: String, residual: f64| {
            if let Some(c) = checks.iter_mut().find(|c| c.name == name) {
                c.max_residual = c.max_residual.max(residual);
            } else {
                checks.push(IdentityCheck {
                    name,
                    max_residual: residual,
                    tolerance: tol,
                    passed: true,
                });
            }
        };

        for &g in samples {
            let mut ops: Vec<OperatorMatrix> = Vec::with_capacity(levels + 3);
            ops.push(self.hamiltonian(g));
            for l in 0..levels {
                ops.push(self.integral_of_motion(l, g)?);
            }
            if with_q {
                ops.push(self.q_operator(g)?);
            }
            ops.push(n_op.clone());
            for a in 0..ops.len() {
                for b in a + 1..ops.len() {
                    let name = format!("[{},{}]", ops[a].label, ops[b].label);
                    record(name, relative_commutator(&ops[a].matrix, &ops[b].matrix));
                }
            }

            // H − 2Σ εᵢ Rᵢ = C·I
            let h = &ops[0].matrix;
            let mut diff = h.clone();
            for l in 0..levels {
                diff = diff.add_scaled(
                    Complex64::new(-2.0 * self.spec.epsilon[l], 0.0),
                    &ops[1 + l].matrix,
                );
            }
            let c = diff.trace() / dim;
            constants.push(c);
            let res =
                diff.add_identity(-c).frobenius_norm() / h.frobenius_norm().max(f64::MIN_POSITIVE);
            record("H-2sum(eps*R)-C".into(), res);

            // 2Σ R_l + ½ΣΩ_l = N
            let mut sum = CMatrix::zeros(self.dim());
            for l in 0..levels {
                sum = sum.add_scaled(Complex64::new(2.0, 0.0), &ops[1 + l].matrix);
            }
            let res = (&sum.add_identity(Complex64::new(omega_sum / 2.0, 0.0)) - &n_op.matrix)
                .frobenius_norm()
                / n_op.matrix.frobenius_norm();
            record("2sum(R)+sum(omega)/2-N".into(), res);
        }
        for c in &mut checks {
            c.passed = c.max_residual < c.tolerance;
        }
        Ok(IdentityReport {
            samples: samples.to_vec(),
            checks,
            constants,
        })
    }
}

/// `‖[A, B]‖_F / (‖A‖_F ‖B‖_F)`.
pub fn relative_commutator(a: &CMatrix, b: &CMatrix) -> f64 {
    let denom = a.frobenius_norm() * b.frobenius_norm();
    if denom == 0.0 {
        0.0
    } else {
        a.commutator(b).frobenius_norm() / denom
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub samples: Vec<Complex64>,
    pub checks: Vec<IdentityCheck>,
    /// Fitted `C` in `H − 2Σεᵢ Rᵢ = C·I`, one per sample.
    pub constants: Vec<Complex64>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn build_hamiltonian(spec: &ModelSpec, g: Complex64) -> Result<OperatorMatrix> {
    Ok(PairingModel::new(spec)?.hamiltonian(g))
}

pub fn build_r(spec: &ModelSpec, g: Complex64, l: usize) -> Result<OperatorMatrix> {
    PairingModel::new(spec)?.integral_of_motion(l, g)
}

pub fn build_q(spec: &ModelSpec, g: Complex64) -> Result<OperatorMatrix> {
    PairingModel::new(spec)?.q_operator(g)
}

pub fn verify_identities(
    spec: &ModelSpec,
    samples: &[Complex64],
    tol: f64,
) -> Result<IdentityReport> {
    PairingModel::new(spec)?.verify_identities(samples, tol)
}
