//! Dense complex polynomials and their roots.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{balance, eigenvalues, CMatrix};
use crate::{Error, Result};

/// `Σₖ cₖ gᵏ` with coefficients stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Trailing exact zeros are dropped; the zero polynomial has no
    /// coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        ComplexPolynomial { coeffs }
    }

    /// Monic polynomial `Π (g − rᵢ)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        ComplexPolynomial::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, g: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * g + c)
    }

    /// `p(g)` together with `Σ |cₖ| |g|ᵏ`, the natural scale of rounding
    /// error in the evaluation.
    pub fn eval_with_scale(&self, g: Complex64) -> (Complex64, f64) {
        let r = g.norm();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * g + c;
            scale = scale * r + c.norm();
        }
        (acc, scale)
    }

    pub fn derivative(&self) -> Self {
        ComplexPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Drops leading coefficients whose magnitude is below `rel_tol` times the
    /// largest coefficient.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.norm() > rel_tol * max)
            .map_or(0, |k| k + 1);
        ComplexPolynomial::new(self.coeffs[..keep].to_vec())
    }

    pub fn monic(&self) -> Self {
        let lead = self.leading();
        ComplexPolynomial {
            coeffs: self.coeffs.iter().map(|&c| c / lead).collect(),
        }
    }

    /// Companion-matrix eigenvalues refined by Newton iteration. Roots come
    /// back with multiplicity, in no particular order.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::PreconditionViolated(
                "roots of the zero polynomial".into(),
            ));
        }
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let monic = self.monic();
        let mut comp = CMatrix::zeros(n);
        for k in 0..n {
            comp[(0, k)] = -monic.coeffs[n - 1 - k];
            if k + 1 < n {
                comp[(k + 1, k)] = Complex64::new(1.0, 0.0);
            }
        }
        let mut roots = eigenvalues(&balance(&comp))?;
        let dp = monic.derivative();
        for r in &mut roots {
            *r = newton_polish(&monic, &dp, *r, 50);
        }
        Ok(roots)
    }
}

/// Newton steps that are only kept while they reduce `|p|`.
pub fn newton_polish(
    p: &ComplexPolynomial,
    dp: &ComplexPolynomial,
    start: Complex64,
    max_iter: usize,
) -> Complex64 {
    let mut z = start;
    let mut fz = p.eval(z).norm();
    for _ in 0..max_iter {
        if fz == 0.0 {
            break;
        }
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - p.eval(z) / d;
        let fnext = p.eval(next).norm();
        if !(fnext < fz) {
            break;
        }
        z = next;
        fz = fnext;
    }
    z
}
