//! Dense complex matrices and a general (non-hermitian) eigensolver.
//!
//! The eigensolver reduces to upper Hessenberg form with Householder
//! reflections and then runs single-shift complex QR with Wilkinson shifts
//! until the matrix is upper triangular (complex Schur form). Eigenvectors
//! are recovered by back substitution on the triangular factor. Matrices in
//! this crate are small (the pairing Hamiltonians are 5×5, companion
//! matrices at most 20×20), so everything is stored densely, row-major.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::math;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row-major entries; `None` unless `data.len()` is a
    /// perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Option<Self> {
        let dim = math::round(math::sqrt(data.len() as f64)) as usize;
        (dim * dim == data.len()).then_some(CMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self + s·other`, the workhorse for `H(g) = H₀ + g·H₁`.
    pub fn add_scaled(&self, s: Complex64, other: &CMatrix) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn add_identity(&self, s: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] += s;
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &CMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.add_scaled(ONE, rhs)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.add_scaled(-ONE, rhs)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        let n = self.dim;
        debug_assert_eq!(n, rhs.dim);
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// Hermitian inner product `⟨u|v⟩ = Σ conj(uᵢ) vᵢ`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    math::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// `|⟨u|v⟩| / (‖u‖‖v‖)`.
pub fn overlap(u: &[Complex64], v: &[Complex64]) -> f64 {
    let d = norm(u) * norm(v);
    if d == 0.0 {
        0.0
    } else {
        inner(u, v).norm() / d
    }
}

/// Complex Schur decomposition `A = Z T Z*` with `T` upper triangular and `Z`
/// unitary.
#[derive(Debug, Clone)]
pub struct Schur {
    pub t: CMatrix,
    pub z: CMatrix,
}

/// Eigenvalues with unit-norm right eigenvectors (`vectors[k]` belongs to
/// `values[k]`).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
}

/// Plane rotation `G = [[c̄, s̄], [−s, c]]` mapping `(a, b)` to `(r, 0)`.
#[derive(Clone, Copy)]
struct Givens {
    c: Complex64,
    s: Complex64,
}

impl Givens {
    fn new(a: Complex64, b: Complex64) -> Self {
        let r = math::sqrt(a.norm_sqr() + b.norm_sqr());
        if r == 0.0 {
            Givens { c: ONE, s: ZERO }
        } else {
            Givens { c: a / r, s: b / r }
        }
    }

    /// Applies `G` to rows `k, k+1` over columns `cols`.
    fn rows(&self, m: &mut CMatrix, k: usize, cols: core::ops::Range<usize>) {
        for j in cols {
            let x = m[(k, j)];
            let y = m[(k + 1, j)];
            m[(k, j)] = self.c.conj() * x + self.s.conj() * y;
            m[(k + 1, j)] = -self.s * x + self.c * y;
        }
    }

    /// Applies `G*` from the right to columns `k, k+1` over rows `rows`.
    fn cols(&self, m: &mut CMatrix, k: usize, rows: core::ops::Range<usize>) {
        for i in rows {
            let x = m[(i, k)];
            let y = m[(i, k + 1)];
            m[(i, k)] = self.c * x + self.s * y;
            m[(i, k + 1)] = -self.s.conj() * x + self.c.conj() * y;
        }
    }
}

/// Householder reduction to upper Hessenberg form, accumulating the unitary
/// factor into `z`.
fn hessenberg(a: &mut CMatrix, z: &mut CMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let alpha_norm = math::sqrt((k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum());
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * alpha_norm;
        for i in 0..n {
            v[i] = if i <= k { ZERO } else { a[(i, k)] };
        }
        v[k + 1] -= alpha;
        let vnorm = norm(&v[k + 1..]);
        if vnorm == 0.0 {
            continue;
        }
        for x in &mut v[k + 1..] {
            *x /= vnorm;
        }
        // A ← (I − 2vv*) A
        for j in 0..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * a[(i, j)]).sum();
            for i in k + 1..n {
                a[(i, j)] -= 2.0 * v[i] * s;
            }
        }
        // A ← A (I − 2vv*),  Z ← Z (I − 2vv*)
        for m in [&mut *a, &mut *z] {
            for i in 0..n {
                let s: Complex64 = (k + 1..n).map(|j| m[(i, j)] * v[j]).sum();
                for j in k + 1..n {
                    m[(i, j)] -= 2.0 * s * v[j].conj();
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition.
pub fn schur(a: &CMatrix) -> Result<Schur> {
    let n = a.dim();
    let mut t = a.clone();
    let mut z = CMatrix::identity(n);
    if n == 0 {
        return Ok(Schur { t, z });
    }
    hessenberg(&mut t, &mut z);
    let anorm = t.frobenius_norm();
    let small = f64::EPSILON * if anorm > 0.0 { anorm } else { 1.0 };
    let max_iter = 60 * n.max(4);

    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let mut rots: Vec<Givens> = Vec::with_capacity(n);
    while hi > 0 {
        // locate the active block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let diag = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            let scale = if diag > 0.0 { diag } else { anorm };
            if sub <= f64::EPSILON * scale || sub <= small * 1e-3 {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter * n {
            return Err(Error::ConvergenceFailure(alloc::format!(
                "complex QR on {n}x{n} matrix"
            )));
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift
            t[(hi, hi)] + 0.75 * t[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        // explicit shifted QR sweep on the active block, applied to the full
        // matrix so that T stays a similarity transform of A
        for k in lo..=hi {
            t[(k, k)] -= mu;
        }
        rots.clear();
        for k in lo..hi {
            let g = Givens::new(t[(k, k)], t[(k + 1, k)]);
            g.rows(&mut t, k, k..n);
            t[(k + 1, k)] = ZERO;
            rots.push(g);
        }
        for (idx, g) in rots.iter().enumerate() {
            let k = lo + idx;
            g.cols(&mut t, k, 0..(k + 2).min(hi + 1));
            g.cols(&mut z, k, 0..n);
        }
        for k in lo..=hi {
            t[(k, k)] += mu;
        }
    }
    // clean the strictly lower part
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t, z })
}

/// All eigenvalues of a general complex matrix.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let s = schur(a)?;
    Ok((0..a.dim()).map(|i| s.t[(i, i)]).collect())
}

/// Eigenvalues and unit right eigenvectors.
///
/// At (or very near) a defective eigenvalue the returned vectors for the
/// coalescing pair are nearly parallel, which is exactly what the overlap
/// diagnostics look for.
pub fn eigen(a: &CMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let Schur { t, z } = schur(a)?;
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let smin = f64::EPSILON * tnorm;
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut y = vec![ZERO; n];
    for k in 0..n {
        let lambda = t[(k, k)];
        y.iter_mut().for_each(|v| *v = ZERO);
        y[k] = ONE;
        for j in (0..k).rev() {
            let s: Complex64 = (j + 1..=k).map(|m| t[(j, m)] * y[m]).sum();
            let mut d = t[(j, j)] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            y[j] = -s / d;
        }
        let mut v = z.mul_vec(&y);
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        values.push(lambda);
        vectors.push(v);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Diagonal similarity scaling with powers of two that balances row and
/// column norms. Returns the balanced matrix; eigenvalues are unchanged.
pub fn balance(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let mut m = a.clone();
    let radix = 2.0f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let mut rr = r;
            while cc < rr / radix {
                cc *= radix;
                rr /= radix;
                f *= radix;
            }
            while cc >= rr * radix {
                cc /= radix;
                rr *= radix;
                f /= radix;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    m
}

/// Orthonormal basis (as columns, returned as a list of vectors) for the
/// column space of `a`, keeping the `rank` most significant directions.
/// Modified Gram–Schmidt with column pivoting.
pub fn range_basis(a: &CMatrix, rank: usize) -> Vec<Vec<Complex64>> {
    let n = a.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)]).collect())
        .collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    for _ in 0..rank.min(n) {
        let (best, best_norm) = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (j, norm(c)))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_norm <= 0.0 {
            break;
        }
        let q: Vec<Complex64> = cols[best].iter().map(|x| x / best_norm).collect();
        for c in cols.iter_mut() {
            let p = inner(&q, c);
            for (ci, qi) in c.iter_mut().zip(&q) {
                *ci -= p * qi;
            }
        }
        basis.push(q);
    }
    basis
}

/// `B* M B` for a matrix `M` and orthonormal basis vectors `B`.
pub fn restrict(m: &CMatrix, basis: &[Vec<Complex64>]) -> CMatrix {
    let k = basis.len();
    let mut out = CMatrix::zeros(k);
    let mb: Vec<Vec<Complex64>> = basis.iter().map(|b| m.mul_vec(b)).collect();
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = inner(&basis[i], &mb[j]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(a: &CMatrix, e: &EigenDecomposition) -> f64 {
        e.values
            .iter()
            .zip(&e.vectors)
            .map(|(l, v)| {
                let av = a.mul_vec(v);
                norm(&av.iter().zip(v).map(|(x, y)| x - l * y).collect::<Vec<_>>())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_spectrum() {
        let d = [c(1.0, 0.0), c(-2.0, 0.5), c(3.0, -1.0)];
        let mut ev = eigenvalues(&CMatrix::from_diagonal(&d)).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[0] - d[1]).norm() < 1e-15);
        assert!((ev[1] - d[0]).norm() < 1e-15);
        assert!((ev[2] - d[2]).norm() < 1e-15);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[a, b], [b, d]] has eigenvalues (a+d)/2 ± sqrt(((a−d)/2)² + b²)
        let (a, b, d) = (c(0.3, 0.2), c(-1.0, 0.7), c(2.0, -0.4));
        let m = CMatrix::from_row_major(vec![a, b, b, d]).unwrap();
        let ev = eigenvalues(&m).unwrap();
        let disc = (((a - d) * 0.5) * ((a - d) * 0.5) + b * b).sqrt();
        let mean = (a + d) * 0.5;
        let expect = [mean + disc, mean - disc];
        for e in expect {
            assert!(ev.iter().any(|x| (x - e).norm() < 1e-13), "{ev:?} vs {e}");
        }
    }

    #[test]
    fn jordan_block_vectors_coalesce() {
        let m = CMatrix::from_row_major(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let e = eigen(&m).unwrap();
        assert!((e.values[0] - e.values[1]).norm() < 1e-12);
        assert!(overlap(&e.vectors[0], &e.vectors[1]) > 0.999);
    }

    #[test]
    fn random_matrices_have_small_residuals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 8, 13, 20] {
            for _ in 0..5 {
                let data = (0..n * n)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let m = CMatrix::from_row_major(data).unwrap();
                let e = eigen(&m).unwrap();
                assert!(residual(&m, &e) < 1e-12 * (n as f64), "n={n}");
                let tr: Complex64 = e.values.iter().sum();
                assert!((tr - m.trace()).norm() < 1e-12 * n as f64);
            }
        }
    }

    #[test]
    fn schur_is_unitary_similarity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 6;
        let data = (0..n * n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let m = CMatrix::from_row_major(data).unwrap();
        let s = schur(&m).unwrap();
        let back = &(&s.z * &s.t) * &s.z.adjoint();
        assert!((&back - &m).frobenius_norm() < 1e-12);
        let zz = &s.z.adjoint() * &s.z;
        assert!((&zz - &CMatrix::identity(n)).frobenius_norm() < 1e-13);
    }

    /// Independent route: nalgebra's complex Schur form.
    #[test]
    fn agrees_with_nalgebra_schur() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [3usize, 5, 9] {
            let data: Vec<Complex64> = (0..n * n)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let m = CMatrix::from_row_major(data.clone()).unwrap();
            let na = nalgebra::DMatrix::from_row_slice(n, n, &data);
            let oracle = na.schur().eigenvalues().unwrap();
            let mine = eigenvalues(&m).unwrap();
            for o in oracle.iter() {
                let best = mine
                    .iter()
                    .map(|x| (x - o).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 1e-10, "n={n}: {o} not found");
            }
        }
    }

    #[test]
    fn balancing_keeps_spectrum() {
        let m = CMatrix::from_row_major(vec![
            c(1.0, 0.0),
            c(1e6, 0.0),
            c(0.0, 0.0),
            c(1e-6, 0.0),
            c(2.0, 0.0),
            c(1e4, 0.0),
            c(0.0, 0.0),
            c(1e-4, 0.0),
            c(3.0, 0.0),
        ])
        .unwrap();
        let mut a = eigenvalues(&m).unwrap();
        let mut b = eigenvalues(&balance(&m)).unwrap();
        a.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        b.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn range_basis_spans_rank_one() {
        let u = [c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let mut m = CMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = u[i] * (j as f64 + 1.0);
            }
        }
        let b = range_basis(&m, 1);
        assert_eq!(b.len(), 1);
        assert!((overlap(&b[0], &u) - 1.0).abs() < 1e-14);
    }
}
