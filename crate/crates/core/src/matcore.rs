//! Dense complex matrices and the branch-sensitive matrix functions used by
//! every other module.
//!
//! Matrices are small (at most 8x8 in practice), so everything is dense and
//! backed by `nalgebra::DMatrix<Complex64>`. Square roots always use the
//! principal branch, `Arg ∈ (-π, π]`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Condition estimate above which `solve`/`inverse` report `SingularMatrix`.
pub const MAX_CONDITION: f64 = 1e14;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix, row-major in its public constructors.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat(DMatrix<C64>);

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMat(DMatrix::identity(n, n))
    }

    pub fn scalar(n: usize, s: C64) -> Self {
        CMat(DMatrix::identity(n, n) * s)
    }

    pub fn from_rows(rows: usize, cols: usize, data: &[C64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(CMat(DMatrix::from_row_slice(rows, cols, data)))
    }

    pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let data: Vec<C64> = data.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_rows(rows, cols, &data)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMat(DMatrix::from_fn(rows, cols, f))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        CMat(m)
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    /// The standard symplectic form `J = [[0, I], [-I, 0]]` of size 2n.
    pub fn j(n: usize) -> Self {
        Self::from_fn(2 * n, 2 * n, |i, k| {
            if i < n && k == i + n {
                ONE
            } else if i >= n && k + n == i {
                -ONE
            } else {
                ZERO
            }
        })
    }

    /// `U = [[I, iI], [I, -iI]]`, mapping `(x, y)` to `(z, conj z)`.
    pub fn u(n: usize) -> Self {
        Self::from_fn(2 * n, 2 * n, |i, k| {
            let (bi, bk) = (i / n, k / n);
            if i % n != k % n {
                return ZERO;
            }
            match (bi, bk) {
                (0, 0) | (1, 0) => ONE,
                (0, 1) => I,
                _ => -I,
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        CMat(self.0.transpose())
    }

    pub fn adjoint(&self) -> Self {
        CMat(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        CMat(self.0.map(|x| x.conj()))
    }

    pub fn re(&self) -> Self {
        CMat(self.0.map(|x| c(x.re, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        CMat(&self.0 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Max-column-sum norm.
    pub fn norm1(&self) -> f64 {
        (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.0[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|x| x.im.abs()).fold(0.0, f64::max)
    }

    /// `‖M - Mᵗ‖`.
    pub fn symmetry_residual(&self) -> f64 {
        (self - &self.transpose()).norm()
    }

    pub fn symmetrized(&self) -> Self {
        (self + &self.transpose()).scale_re(0.5)
    }

    /// Splits a `2n x 2n` matrix into its four `n x n` blocks.
    pub fn blocks(&self) -> Result<(CMat, CMat, CMat, CMat)> {
        if !self.is_square() || self.rows() % 2 != 0 {
            return Err(Error::Shape(format!(
                "expected an even square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )));
        }
        let n = self.rows() / 2;
        let block = |r: usize, k: usize| CMat(self.0.view((r * n, k * n), (n, n)).into_owned());
        Ok((block(0, 0), block(0, 1), block(1, 0), block(1, 1)))
    }

    pub fn from_blocks(a: &CMat, b: &CMat, cc: &CMat, d: &CMat) -> Result<Self> {
        let n = a.rows();
        for m in [a, b, cc, d] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape("blocks must share one square size".into()));
            }
        }
        Ok(Self::from_fn(2 * n, 2 * n, |i, k| {
            let m = match (i / n, k / n) {
                (0, 0) => a,
                (0, 1) => b,
                (1, 0) => cc,
                _ => d,
            };
            m.0[(i % n, k % n)]
        }))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len(), "matrix-vector shape mismatch");
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|k| self.0[(i, k)] * v[k]).sum())
            .collect()
    }

    /// Bilinear form `xᵗ M y` (no conjugation).
    pub fn bilinear(&self, x: &[C64], y: &[C64]) -> C64 {
        dot(x, &self.mul_vec(y))
    }

    pub(crate) fn check_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )))
        }
    }
}

impl<'a> Add<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        CMat(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        CMat(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        CMat(&self.0 * &rhs.0)
    }
}

impl Add for CMat {
    type Output = CMat;
    fn add(self, rhs: CMat) -> CMat {
        CMat(self.0 + rhs.0)
    }
}

impl Sub for CMat {
    type Output = CMat;
    fn sub(self, rhs: CMat) -> CMat {
        CMat(self.0 - rhs.0)
    }
}

impl Mul for CMat {
    type Output = CMat;
    fn mul(self, rhs: CMat) -> CMat {
        CMat(self.0 * rhs.0)
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat(-&self.0)
    }
}

impl Neg for CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat(-self.0)
    }
}

/// Bilinear dot product `Σ x_k y_k`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `Σ |x_k|²`.
pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum()
}

pub fn conj_vec(x: &[C64]) -> Vec<C64> {
    x.iter().map(|a| a.conj()).collect()
}

pub fn add_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn sub_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scale_vec(x: &[C64], s: C64) -> Vec<C64> {
    x.iter().map(|a| a * s).collect()
}

/// Principal square root, `Arg ∈ (-π, π]`; the negative real axis maps to `+i√|c|`
/// regardless of the sign of a zero imaginary part.
pub fn principal_sqrt(z: C64) -> C64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            return c(z.re.sqrt(), 0.0);
        }
        return c(0.0, (-z.re).sqrt());
    }
    let r = z.norm().sqrt();
    let theta = z.im.atan2(z.re) / 2.0;
    C64::from_polar(r, theta)
}

pub fn det(m: &CMat) -> Result<C64> {
    m.check_square("det")?;
    if m.rows() == 0 {
        return Ok(ONE);
    }
    Ok(m.0.clone().lu().determinant())
}

/// Inverse with a 1-norm condition check.
pub fn inverse(m: &CMat) -> Result<CMat> {
    m.check_square("inverse")?;
    let inv = m
        .0
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularMatrix { cond: f64::INFINITY })?;
    let inv = CMat(inv);
    let cond = m.norm1() * inv.norm1();
    if !cond.is_finite() || cond > MAX_CONDITION || !inv.is_finite() {
        return Err(Error::SingularMatrix { cond });
    }
    Ok(inv)
}

/// Solves `M X = B`.
pub fn solve(m: &CMat, b: &CMat) -> Result<CMat> {
    if b.rows() != m.rows() {
        return Err(Error::Shape("solve: right-hand side row count mismatch".into()));
    }
    Ok(&inverse(m)? * b)
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    m.check_square("eigenvalues")?;
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::linalg::Schur::try_new(m.0.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Shape("Schur iteration did not converge".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::Shape("Schur form is not triangular".into()))?;
    Ok(ev.iter().copied().collect())
}

pub fn mat_exp(m: &CMat) -> Result<CMat> {
    m.check_square("mat_exp")?;
    let e = CMat(m.0.exp());
    if !e.is_finite() {
        return Err(Error::Shape("matrix exponential overflowed".into()));
    }
    Ok(e)
}

pub fn mat_cosh(m: &CMat) -> Result<CMat> {
    let ep = mat_exp(m)?;
    let em = mat_exp(&-m)?;
    Ok((&ep + &em).scale_re(0.5))
}

pub fn mat_sinh(m: &CMat) -> Result<CMat> {
    let ep = mat_exp(m)?;
    let em = mat_exp(&-m)?;
    Ok((&ep - &em).scale_re(0.5))
}

/// `sinh(M) cosh(M)⁻¹`.
pub fn mat_tanh(m: &CMat) -> Result<CMat> {
    let ch = mat_cosh(m)?;
    Ok(&mat_sinh(m)? * &inverse(&ch)?)
}

pub fn mat_cos(m: &CMat) -> Result<CMat> {
    mat_cosh(&m.scale(I))
}

/// `sin(M) = -i sinh(iM)`.
pub fn mat_sin(m: &CMat) -> Result<CMat> {
    Ok(mat_sinh(&m.scale(I))?.scale(-I))
}

pub fn mat_tan(m: &CMat) -> Result<CMat> {
    Ok(&mat_sin(m)? * &inverse(&mat_cos(m)?)?)
}

/// Cayley transform `(g - I)(g + I)⁻¹`.
pub fn cayley(g: &CMat) -> Result<CMat> {
    g.check_square("cayley")?;
    let n = g.rows();
    let id = CMat::identity(n);
    let plus = g + &id;
    let d = det(&plus)?;
    let scale = plus.norm().max(1.0);
    if d.norm() <= 1e-12 * scale.powi(n as i32) {
        return Err(Error::CayleySingular);
    }
    let inv = inverse(&plus).map_err(|_| Error::CayleySingular)?;
    Ok(&(g - &id) * &inv)
}

/// Smallest pivot of a Cholesky factorization of the Hermitian part
/// `(N + N*)/2`, or a non-positive number if the factorization breaks down.
pub fn hermitian_part_min_pivot(n: &CMat) -> f64 {
    let h = (n + &n.adjoint()).scale_re(0.5);
    let size = h.rows();
    let mut l = vec![ZERO; size * size];
    let mut min_pivot = f64::INFINITY;
    for j in 0..size {
        let mut d = h.get(j, j).re;
        for k in 0..j {
            d -= l[j * size + k].norm_sqr();
        }
        if d <= 0.0 {
            return d.min(0.0);
        }
        min_pivot = min_pivot.min(d);
        let djj = d.sqrt();
        l[j * size + j] = c(djj, 0.0);
        for i in (j + 1)..size {
            let mut s = h.get(i, j);
            for k in 0..j {
                s -= l[i * size + k] * l[j * size + k].conj();
            }
            l[i * size + j] = s / djj;
        }
    }
    if size == 0 {
        1.0
    } else {
        min_pivot
    }
}

/// Is the Hermitian part positive definite, with pivots above
/// `rel_tol · max(1, ‖N‖)`? Returns the smallest pivot on success.
pub fn check_positive_real(n: &CMat, rel_tol: f64) -> Result<f64> {
    let pivot = hermitian_part_min_pivot(n);
    if pivot <= rel_tol * n.norm().max(1.0) {
        return Err(Error::NotPositiveReal { pivot });
    }
    Ok(pivot)
}

/// `det(N)^{1/2}` for complex symmetric `N` whose Hermitian part is positive
/// definite, as the product of the principal roots of its eigenvalues. All
/// eigenvalues lie in the open right half-plane, so this is the branch that is
/// continuous along `(1-s)I + sN`.
pub fn det_powhalf_posreal(n: &CMat) -> Result<C64> {
    n.check_square("det_powhalf_posreal")?;
    check_positive_real(n, 1e-12)?;
    Ok(eigenvalues(n)?.into_iter().map(principal_sqrt).product())
}

/// Integer or half-integer power `d^m` with the principal branch for the
/// square root; `m` must satisfy `2m ∈ ℤ`.
pub fn det_pow_half_integer(d: C64, m: f64) -> C64 {
    let twice = (2.0 * m).round() as i32;
    debug_assert!((2.0 * m - twice as f64).abs() < 1e-12, "m must be a half-integer");
    if twice % 2 == 0 {
        d.powi(twice / 2)
    } else {
        principal_sqrt(d).powi(twice)
    }
}

/// `det(cosh H)^{1/2}` for a Hamiltonian matrix `H` (its spectrum is symmetric
/// under `μ ↦ -μ`), computed as `Π cosh(μ_j)` over one member of each `±μ`
/// pair. This is the analytic continuation of the positive root from `H = 0`
/// and does not depend on which member of a pair is picked.
pub fn det_sqrt_even_fn_hamiltonian(h: &CMat, f: impl Fn(C64) -> C64) -> Result<C64> {
    let mut ev = eigenvalues(h)?;
    if ev.len() % 2 != 0 {
        return Err(Error::Shape("Hamiltonian matrix must have even size".into()));
    }
    let scale = h.norm().max(1.0);
    let mut prod = ONE;
    while let Some(mu) = ev.pop() {
        let (idx, dist) = ev
            .iter()
            .enumerate()
            .map(|(i, nu)| (i, (nu + mu).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if idx == usize::MAX || dist > 1e-6 * scale {
            return Err(Error::Shape("spectrum is not symmetric under μ ↦ -μ".into()));
        }
        let nu = ev.swap_remove(idx);
        prod *= f((mu - nu) * 0.5);
    }
    Ok(prod)
}
