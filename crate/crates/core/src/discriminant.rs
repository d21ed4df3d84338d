//! The discriminant `D(g) = Π_{m<m'} [E_m(g) − E_m'(g)]²` of the
//! characteristic polynomial of `H(g)`, evaluated pointwise from eigenvalues
//! and reconstructed as an exact polynomial in `g`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{self, CMatrix};
use crate::math;
use crate::model::{HamiltonianPencil, ModelSpec, OperatorMatrix, PairingModel};
use crate::poly::{newton_polish, ComplexPolynomial};
use crate::{Error, Result};

/// Eigenvalues of `H(g)`, unordered.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSet {
    pub values: Vec<Complex64>,
}

impl EigenSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Complex64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Smallest pairwise distance.
    pub fn min_gap(&self) -> f64 {
        let v = &self.values;
        let mut gap = f64::INFINITY;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                gap = gap.min((v[i] - v[j]).norm());
            }
        }
        gap
    }
}

pub fn eigenvalues(h: &OperatorMatrix) -> Result<EigenSet> {
    Ok(EigenSet {
        values: linalg::eigenvalues(&h.matrix)?,
    })
}

/// `D` together with `log|D|` and `arg D`; `value` may overflow to infinity
/// while the logarithmic form stays finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantValue {
    pub value: Complex64,
    pub log_abs: f64,
    pub arg: f64,
}

/// Discriminant of a set of eigenvalues. The empty product is 1.
pub fn discriminant_of(values: &[Complex64]) -> DiscriminantValue {
    let mut log_abs = 0.0;
    let mut arg = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let d = values[i] - values[j];
            let r = d.norm();
            if r == 0.0 {
                return DiscriminantValue {
                    value: Complex64::new(0.0, 0.0),
                    log_abs: f64::NEG_INFINITY,
                    arg: 0.0,
                };
            }
            log_abs += 2.0 * math::ln(r);
            arg += 2.0 * d.arg();
        }
    }
    let arg = libm::remainder(arg, 2.0 * PI);
    DiscriminantValue {
        value: math::polar(math::exp(log_abs), arg),
        log_abs,
        arg,
    }
}

pub fn discriminant_at(spec: &ModelSpec, g: Complex64) -> Result<DiscriminantValue> {
    discriminant_of_pencil(PairingModel::new(spec)?.pencil(), g)
}

pub fn discriminant_of_pencil(
    pencil: &HamiltonianPencil,
    g: Complex64,
) -> Result<DiscriminantValue> {
    Ok(discriminant_of(&linalg::eigenvalues(&pencil.at(g))?))
}

/// Controls the reconstruction of `D(g)` from samples on circles.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionConfig {
    /// Circle radii. Each coefficient is taken from the radius where it is
    /// best resolved, so the ladder should span the root magnitudes of
    /// interest.
    pub radii: Vec<f64>,
    /// A coefficient counts toward the degree if, on some circle, its
    /// contribution exceeds this fraction of the largest contribution.
    pub trim_tol: f64,
    /// Largest accepted relative misfit between the polynomial and the
    /// samples.
    pub residual_tol: f64,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            radii: vec![1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3],
            trim_tol: 1e-9,
            residual_tol: 1e-6,
        }
    }
}

struct Circle {
    radius: f64,
    /// Geometric mean of `|D|` over the samples.
    log_mean: f64,
    /// `log max|D|` over the samples.
    log_max: f64,
    /// Normalized Fourier coefficients: `cₖ = e^{log_mean} r⁻ᵏ · mantissa[k]`.
    mantissa: Vec<Complex64>,
    points: Vec<Complex64>,
    samples: Vec<DiscriminantValue>,
}

fn sample_circle(pencil: &HamiltonianPencil, radius: f64, count: usize) -> Result<Circle> {
    let mut points = Vec::with_capacity(count);
    let mut samples = Vec::with_capacity(count);
    for j in 0..count {
        let g = math::polar(radius, 2.0 * PI * j as f64 / count as f64);
        points.push(g);
        samples.push(discriminant_of_pencil(pencil, g)?);
    }
    let finite: Vec<f64> = samples
        .iter()
        .map(|s| s.log_abs)
        .filter(|l| l.is_finite())
        .collect();
    let log_mean = if finite.is_empty() {
        0.0
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    let log_max = samples
        .iter()
        .map(|s| s.log_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    let normalized: Vec<Complex64> = samples
        .iter()
        .map(|s| math::polar(math::exp(s.log_abs - log_mean), s.arg))
        .collect();
    let mantissa = (0..count)
        .map(|k| {
            let sum: Complex64 = normalized
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    d * math::polar(1.0, -2.0 * PI * ((j * k) % count) as f64 / count as f64)
                })
                .sum();
            sum / count as f64
        })
        .collect();
    Ok(Circle {
        radius,
        log_mean,
        log_max,
        mantissa,
        points,
        samples,
    })
}

pub fn discriminant_polynomial(spec: &ModelSpec) -> Result<ComplexPolynomial> {
    discriminant_polynomial_with(
        PairingModel::new(spec)?.pencil(),
        &ReconstructionConfig::default(),
    )
}

/// Reconstructs `D(g)` by discrete Fourier inversion on each circle of the
/// radius ladder, taking every coefficient from the circle where its error
/// bound `max|D| / rᵏ` is smallest.
pub fn discriminant_polynomial_with(
    pencil: &HamiltonianPencil,
    config: &ReconstructionConfig,
) -> Result<ComplexPolynomial> {
    let n = pencil.dim();
    if n <= 1 {
        return Ok(ComplexPolynomial::new(vec![Complex64::new(1.0, 0.0)]));
    }
    if config.radii.is_empty() || config.radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::PreconditionViolated(
            "reconstruction radii must be positive".into(),
        ));
    }
    let max_degree = n * (n - 1);
    let count = (max_degree + 1).next_power_of_two();
    let circles = config
        .radii
        .iter()
        .map(|&r| sample_circle(pencil, r, count))
        .collect::<Result<Vec<_>>>()?;
    if circles.iter().all(|c| c.log_max == f64::NEG_INFINITY) {
        return Err(Error::DegenerateDiscriminant);
    }

    let degree = (0..=max_degree)
        .rev()
        .find(|&k| {
            circles.iter().any(|c| {
                let peak = c.mantissa.iter().map(|m| m.norm()).fold(0.0, f64::max);
                peak > 0.0 && c.mantissa[k].norm() > config.trim_tol * peak
            })
        })
        .unwrap_or(0);

    let coeffs: Vec<Complex64> = (0..=degree)
        .map(|k| {
            let best = circles
                .iter()
                .filter(|c| c.log_max.is_finite())
                .min_by(|a, b| {
                    let ea = a.log_max - k as f64 * math::ln(a.radius);
                    let eb = b.log_max - k as f64 * math::ln(b.radius);
                    ea.total_cmp(&eb)
                })
                .expect("some circle has nonzero samples");
            best.mantissa[k] * math::exp(best.log_mean - k as f64 * math::ln(best.radius))
        })
        .collect();
    let poly = ComplexPolynomial::new(coeffs);

    let mut residual: f64 = 0.0;
    for c in circles.iter().filter(|c| c.log_max.is_finite()) {
        let scale = math::exp(c.log_max);
        for (g, s) in c.points.iter().zip(&c.samples) {
            residual = residual.max((poly.eval(*g) - s.value).norm() / scale);
        }
    }
    if !(residual <= config.residual_tol) {
        return Err(Error::IllConditioned { residual });
    }
    Ok(poly)
}

/// All roots with multiplicity: companion eigenvalues refined by Newton
/// iteration until `|p(g)| < 1e−12 · Σ|cₖ||g|ᵏ` or 50 steps.
pub fn polynomial_roots(poly: &ComplexPolynomial) -> Result<Vec<Complex64>> {
    if poly.is_zero() || poly.degree() == 0 {
        return Err(Error::PreconditionViolated(
            "root finding needs degree >= 1".into(),
        ));
    }
    let mut roots = poly.roots()?;
    let dp = poly.derivative();
    for r in &mut roots {
        let (v, scale) = poly.eval_with_scale(*r);
        if v.norm() >= 1e-12 * scale {
            *r = newton_polish(poly, &dp, *r, 50);
        }
        if !(r.re.is_finite() && r.im.is_finite()) {
            return Err(Error::ConvergenceFailure(
                "non-finite polynomial root".into(),
            ));
        }
    }
    Ok(roots)
}

/// Eigenvalues of an explicit matrix, for callers holding a bare `CMatrix`.
pub fn matrix_eigenvalues(m: &CMatrix) -> Result<EigenSet> {
    Ok(EigenSet {
        values: linalg::eigenvalues(m)?,
    })
}
