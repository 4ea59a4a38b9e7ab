//! `Sp(n,ℝ)`, the group `S = Sp(n,ℂ) ∩ SU(n,n)` of block matrices
//! `k = [[P, Q], [conj Q, conj P]]`, their Lie algebras, and the conjugation
//! `g ↦ U g U⁻¹` that identifies the two pictures.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matcore::{self, c, CMat, C64, ZERO};
use crate::rng;

/// Default structural tolerance: `1e-10 · (1 + ‖input‖)`.
pub fn default_tol(norm: f64) -> f64 {
    1e-10 * (1.0 + norm)
}

/// Residual norms of the defining equations of a group or algebra element.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub residuals: Vec<(&'static str, f64)>,
    pub tol: f64,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_finite() && *r <= self.tol)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

/// A real symplectic matrix `g = [[A, B], [C, D]]`, `gᵗ J g = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpReal {
    n: usize,
    g: CMat,
}

impl SpReal {
    pub fn new(g: CMat) -> Result<Self> {
        let s = Self::new_unchecked(g)?;
        let report = validate_sp(&s, default_tol(s.g.norm()));
        if !report.ok() {
            return Err(Error::NotSymplectic { residual: report.max_residual() });
        }
        Ok(s)
    }

    /// Only checks the shape.
    pub fn new_unchecked(g: CMat) -> Result<Self> {
        if !g.is_square() || g.rows() % 2 != 0 || g.rows() == 0 {
            return Err(Error::Shape(format!("expected 2n x 2n, got {}x{}", g.rows(), g.cols())));
        }
        Ok(SpReal { n: g.rows() / 2, g })
    }

    pub fn from_real_rows(n: usize, data: &[f64]) -> Result<Self> {
        Self::new(CMat::from_real_rows(2 * n, 2 * n, data)?)
    }

    pub fn identity(n: usize) -> Self {
        SpReal { n, g: CMat::identity(2 * n) }
    }

    /// `[[cos θ, sin θ], [-sin θ, cos θ]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, co) = theta.sin_cos();
        SpReal { n: 1, g: CMat::from_real_rows(2, 2, &[co, s, -s, co]).unwrap() }
    }

    /// `diag(e^r, e^-r)`.
    pub fn squeeze(r: f64) -> Self {
        SpReal { n: 1, g: CMat::from_real_rows(2, 2, &[r.exp(), 0.0, 0.0, (-r).exp()]).unwrap() }
    }

    /// Direct sum of `n = 1` factors acting on coordinate pairs `(x_j, y_j)`.
    pub fn block_diag(factors: &[SpReal]) -> Self {
        let n = factors.len();
        let mut g = CMat::zeros(2 * n, 2 * n);
        for (j, f) in factors.iter().enumerate() {
            assert_eq!(f.n, 1, "block_diag takes n = 1 factors");
            for (bi, bk) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                g.set(bi * n + j, bk * n + j, f.g.get(bi, bk));
            }
        }
        SpReal { n, g }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.g
    }

    pub fn blocks(&self) -> (CMat, CMat, CMat, CMat) {
        self.g.blocks().expect("2n x 2n by construction")
    }
}

/// An element `k = [[P, Q], [conj Q, conj P]]` of `S`, stored as its blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SuBlocks {
    n: usize,
    p: CMat,
    q: CMat,
}

impl SuBlocks {
    pub fn new(p: CMat, q: CMat) -> Result<Self> {
        let k = Self::new_unchecked(p, q)?;
        let report = validate_su(&k, default_tol(k.p.norm() + k.q.norm()));
        if !report.ok() {
            return Err(Error::NotInS { residual: report.max_residual() });
        }
        Ok(k)
    }

    pub fn new_unchecked(p: CMat, q: CMat) -> Result<Self> {
        let n = p.rows();
        if n == 0 || !p.is_square() || q.rows() != n || q.cols() != n {
            return Err(Error::Shape("P and Q must be n x n".into()));
        }
        Ok(SuBlocks { n, p, q })
    }

    pub fn identity(n: usize) -> Self {
        SuBlocks { n, p: CMat::identity(n), q: CMat::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &CMat {
        &self.p
    }

    pub fn q(&self) -> &CMat {
        &self.q
    }

    /// The full `2n x 2n` matrix.
    pub fn matrix(&self) -> CMat {
        CMat::from_blocks(&self.p, &self.q, &self.q.conj(), &self.p.conj()).unwrap()
    }

    /// `kz = P z + Q conj(z)`.
    pub fn act(&self, z: &[C64]) -> Vec<C64> {
        matcore::add_vec(&self.p.mul_vec(z), &self.q.mul_vec(&matcore::conj_vec(z)))
    }

    pub fn det_p(&self) -> C64 {
        matcore::det(&self.p).expect("square")
    }

    pub fn p_inv(&self) -> Result<CMat> {
        matcore::inverse(&self.p).map_err(|_| Error::NotInS { residual: f64::INFINITY })
    }
}

/// `X = [[A, B], [C, -Aᵗ]] ∈ sp(n,ℝ)` with `B`, `C` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SpLieReal {
    n: usize,
    a: CMat,
    b: CMat,
    c: CMat,
}

impl SpLieReal {
    pub fn new(a: CMat, b: CMat, cc: CMat) -> Result<Self> {
        let x = Self::new_unchecked(a, b, cc)?;
        let report = validate_sp_lie(&x, default_tol(x.matrix().norm()));
        if !report.ok() {
            return Err(Error::NotInLie { residual: report.max_residual() });
        }
        Ok(x)
    }

    pub fn new_unchecked(a: CMat, b: CMat, cc: CMat) -> Result<Self> {
        let n = a.rows();
        for m in [&a, &b, &cc] {
            if m.rows() != n || m.cols() != n || n == 0 {
                return Err(Error::Shape("A, B, C must be n x n".into()));
            }
        }
        Ok(SpLieReal { n, a, b, c: cc })
    }

    /// Reads the blocks of a full `2n x 2n` matrix and validates it.
    pub fn from_matrix(x: &CMat) -> Result<Self> {
        let (a, b, cc, d) = x.blocks()?;
        let residual = (&d + &a.transpose()).norm();
        if residual > default_tol(x.norm()) {
            return Err(Error::NotInLie { residual });
        }
        Self::new(a, b, cc)
    }

    pub fn zero(n: usize) -> Self {
        let z = CMat::zeros(n, n);
        SpLieReal { n, a: z.clone(), b: z.clone(), c: z }
    }

    /// `θ J`, the generator of rotations for `n = 1` (and of the diagonal torus otherwise).
    pub fn rotation_generator(n: usize, theta: f64) -> Self {
        let z = CMat::zeros(n, n);
        let id = CMat::scalar(n, c(theta, 0.0));
        SpLieReal { n, a: z, b: id.clone(), c: -id }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn c(&self) -> &CMat {
        &self.c
    }

    pub fn matrix(&self) -> CMat {
        CMat::from_blocks(&self.a, &self.b, &self.c, &-self.a.transpose()).unwrap()
    }

    pub fn scale(&self, t: f64) -> Self {
        SpLieReal {
            n: self.n,
            a: self.a.scale_re(t),
            b: self.b.scale_re(t),
            c: self.c.scale_re(t),
        }
    }
}

/// `X = [[A, B], [conj B, conj A]] ∈ 𝔰` with `A` skew-Hermitian, `B` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SuLie {
    n: usize,
    a: CMat,
    b: CMat,
}

impl SuLie {
    pub fn new(a: CMat, b: CMat) -> Result<Self> {
        let x = Self::new_unchecked(a, b)?;
        let report = validate_su_lie(&x, default_tol(x.a.norm() + x.b.norm()));
        if !report.ok() {
            return Err(Error::NotInLie { residual: report.max_residual() });
        }
        Ok(x)
    }

    pub fn new_unchecked(a: CMat, b: CMat) -> Result<Self> {
        let n = a.rows();
        if n == 0 || !a.is_square() || b.rows() != n || b.cols() != n {
            return Err(Error::Shape("A and B must be n x n".into()));
        }
        Ok(SuLie { n, a, b })
    }

    /// Reads `[[A, B], [conj B, conj A]]` and validates it.
    pub fn from_matrix(x: &CMat) -> Result<Self> {
        let (a, b, bb, aa) = x.blocks()?;
        let residual = (&bb - &b.conj()).norm() + (&aa - &a.conj()).norm();
        if residual > default_tol(x.norm()) {
            return Err(Error::NotInLie { residual });
        }
        Self::new(a, b)
    }

    pub fn zero(n: usize) -> Self {
        SuLie { n, a: CMat::zeros(n, n), b: CMat::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn matrix(&self) -> CMat {
        CMat::from_blocks(&self.a, &self.b, &self.b.conj(), &self.a.conj()).unwrap()
    }

    pub fn scale(&self, t: f64) -> Self {
        SuLie { n: self.n, a: self.a.scale_re(t), b: self.b.scale_re(t) }
    }
}

pub fn validate_sp(g: &SpReal, tol: f64) -> ValidationReport {
    let j = CMat::j(g.n);
    let sympl = (&(&g.g.transpose() * &j) * &g.g - j).norm();
    ValidationReport {
        residuals: vec![("g^t J g - J", sympl), ("imaginary part", g.g.max_imag())],
        tol,
    }
}

pub fn validate_su(k: &SuBlocks, tol: f64) -> ValidationReport {
    let n = k.n;
    let id = CMat::identity(n);
    let (p, q) = (&k.p, &k.q);
    let r1 = (&(&(p * &p.adjoint()) - &(q * &q.adjoint())) - &id).norm();
    let r2 = (&(p * &q.transpose()) - &(q * &p.transpose())).norm();
    let r3 = (&(&(&p.adjoint() * p) - &(&q.transpose() * &q.conj())) - &id).norm();
    let r4 = (&(&p.adjoint() * q) - &(&q.transpose() * &p.conj())).norm();
    let mut residuals = vec![
        ("P P* - Q Q* - I", r1),
        ("P Q^t - Q P^t", r2),
        ("P* P - Q^t conj(Q) - I", r3),
        ("P* Q - Q^t conj(P)", r4),
    ];
    match matcore::inverse(p) {
        Ok(pinv) => {
            residuals.push(("P^-1 Q symmetry", (&pinv * q).symmetry_residual()));
            residuals.push(("conj(Q) P^-1 symmetry", (&q.conj() * &pinv).symmetry_residual()));
        }
        Err(_) => residuals.push(("P invertible", f64::INFINITY)),
    }
    ValidationReport { residuals, tol }
}

pub fn validate_sp_lie(x: &SpLieReal, tol: f64) -> ValidationReport {
    let m = x.matrix();
    let j = CMat::j(x.n);
    ValidationReport {
        residuals: vec![
            ("B symmetry", x.b.symmetry_residual()),
            ("C symmetry", x.c.symmetry_residual()),
            ("X^t J + J X", (&(&m.transpose() * &j) + &(&j * &m)).norm()),
            ("imaginary part", m.max_imag()),
        ],
        tol,
    }
}

pub fn validate_su_lie(x: &SuLie, tol: f64) -> ValidationReport {
    ValidationReport {
        residuals: vec![
            ("A* + A", (&x.a.adjoint() + &x.a).norm()),
            ("B symmetry", x.b.symmetry_residual()),
        ],
        tol,
    }
}

/// `k = U g U⁻¹`: `P = (A + D + i(C - B))/2`, `Q = (A - D + i(C + B))/2`.
pub fn su_from_sp(g: &SpReal) -> Result<SuBlocks> {
    let report = validate_sp(g, default_tol(g.g.norm()));
    if !report.ok() {
        return Err(Error::NotSymplectic { residual: report.max_residual() });
    }
    let (a, b, cc, d) = g.blocks();
    let i = matcore::I;
    let p = (&(&a + &d) + &(&cc - &b).scale(i)).scale_re(0.5);
    let q = (&(&a - &d) + &(&cc + &b).scale(i)).scale_re(0.5);
    Ok(SuBlocks { n: g.n, p, q })
}

/// Inverse conjugation `g = U⁻¹ k U`: `A = Re(P + Q)`, `B = Im(Q - P)`,
/// `C = Im(P + Q)`, `D = Re(P - Q)`.
pub fn sp_from_su(k: &SuBlocks) -> Result<SpReal> {
    let report = validate_su(k, default_tol(k.p.norm() + k.q.norm()));
    if !report.ok() {
        return Err(Error::NotInS { residual: report.max_residual() });
    }
    let sum = &k.p + &k.q;
    let diff = &k.q - &k.p;
    let re = |m: &CMat| CMat::from_fn(k.n, k.n, |i, j| c(m.get(i, j).re, 0.0));
    let im = |m: &CMat| CMat::from_fn(k.n, k.n, |i, j| c(m.get(i, j).im, 0.0));
    let a = re(&sum);
    let b = im(&diff);
    let cc = im(&sum);
    let d = re(&(&k.p - &k.q));
    Ok(SpReal { n: k.n, g: CMat::from_blocks(&a, &b, &cc, &d)? })
}

/// `U X U⁻¹` for `X ∈ sp(n,ℝ)`.
pub fn su_lie_from_sp_lie(x: &SpLieReal) -> SuLie {
    let d = -x.a.transpose();
    let i = matcore::I;
    let a = (&(&x.a + &d) + &(&x.c - &x.b).scale(i)).scale_re(0.5);
    let b = (&(&x.a - &d) + &(&x.c + &x.b).scale(i)).scale_re(0.5);
    SuLie { n: x.n, a, b }
}

pub fn sp_mul(g1: &SpReal, g2: &SpReal) -> Result<SpReal> {
    if g1.n != g2.n {
        return Err(Error::Shape("sp_mul: dimension mismatch".into()));
    }
    Ok(SpReal { n: g1.n, g: &g1.g * &g2.g })
}

/// `g⁻¹ = -J gᵗ J`.
pub fn sp_inv(g: &SpReal) -> SpReal {
    let j = CMat::j(g.n);
    SpReal { n: g.n, g: -(&(&j * &g.g.transpose()) * &j) }
}

pub fn su_mul(k1: &SuBlocks, k2: &SuBlocks) -> Result<SuBlocks> {
    if k1.n != k2.n {
        return Err(Error::Shape("su_mul: dimension mismatch".into()));
    }
    let p = &(&k1.p * &k2.p) + &(&k1.q * &k2.q.conj());
    let q = &(&k1.p * &k2.q) + &(&k1.q * &k2.p.conj());
    Ok(SuBlocks { n: k1.n, p, q })
}

/// Closed block form `k⁻¹ = [[P*, -Qᵗ], [-Q*, Pᵗ]]`.
pub fn su_inv(k: &SuBlocks) -> SuBlocks {
    SuBlocks { n: k.n, p: k.p.adjoint(), q: -k.q.transpose() }
}

pub fn su_exp(x: &SuLie) -> Result<SuBlocks> {
    let e = matcore::mat_exp(&x.matrix())?;
    let (p, q, _, _) = e.blocks()?;
    Ok(SuBlocks { n: x.n, p, q })
}

pub fn sp_exp(x: &SpLieReal) -> Result<SpReal> {
    let mut g = matcore::mat_exp(&x.matrix())?;
    // exp of a real matrix is real; drop rounding noise in the imaginary part
    g = g.re();
    Ok(SpReal { n: x.n, g })
}

fn uniform_mat(rng: &mut impl Rng, n: usize, scale: f64) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        if scale == 0.0 {
            ZERO
        } else {
            c(rng.gen_range(-scale..=scale), 0.0)
        }
    })
}

/// Entrywise uniform in `[-scale, scale]`, with `B` and `C` symmetrized.
pub fn random_sp_lie(n: usize, seed: u64, scale: f64) -> SpLieReal {
    let mut rng = rng::stream(seed, "sp-lie");
    let a = uniform_mat(&mut rng, n, scale);
    let b = uniform_mat(&mut rng, n, scale).symmetrized();
    let cc = uniform_mat(&mut rng, n, scale).symmetrized();
    SpLieReal { n, a, b, c: cc }
}

/// `exp(X)` with `X = random_sp_lie(n, seed, scale)`.
pub fn random_sp(n: usize, seed: u64, scale: f64) -> SpReal {
    sp_exp(&random_sp_lie(n, seed, scale)).expect("small algebra elements exponentiate")
}

pub fn random_su(n: usize, seed: u64, scale: f64) -> SuBlocks {
    su_from_sp(&random_sp(n, seed, scale)).expect("conjugate of a symplectic matrix")
}

pub fn random_su_lie(n: usize, seed: u64, scale: f64) -> SuLie {
    su_lie_from_sp_lie(&random_sp_lie(n, seed, scale))
}

/// An element with `det(I + g) < 0`: a direct sum of rotation-times-squeeze
/// blocks `R(±(π - δ)) S(r)` whose trace is below `-2`, padded with small
/// random rotations when `n > 1` so the total determinant stays negative.
/// `Arg det P` stays clear of `{0, π}` so the phase of `c_n` is decidable.
pub fn random_negative_sp(n: usize, seed: u64) -> SpReal {
    let mut rng = rng::stream(seed, "negative-sp");
    let mut factors = Vec::with_capacity(n);
    for j in 0..n {
        if j == 0 {
            let delta = rng.gen_range(0.05..0.25);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let theta = sign * (std::f64::consts::PI - delta);
            let r = rng.gen_range(1.5..2.3);
            factors.push(sp_mul(&SpReal::rotation(theta), &SpReal::squeeze(r)).unwrap());
        } else {
            let theta = rng.gen_range(-0.6..0.6);
            let r = rng.gen_range(-0.3..0.3);
            factors.push(sp_mul(&SpReal::rotation(theta), &SpReal::squeeze(r)).unwrap());
        }
    }
    SpReal::block_diag(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn conjugation_examples() {
        let k = su_from_sp(&SpReal::identity(2)).unwrap();
        assert!(close(k.p(), &CMat::identity(2), 0.0));
        assert!(close(k.q(), &CMat::zeros(2, 2), 0.0));

        let j = SpReal::new(CMat::j(1)).unwrap();
        let k = su_from_sp(&j).unwrap();
        assert!(close(k.p(), &CMat::scalar(1, c(0.0, -1.0)), 1e-15));
        assert!(close(k.q(), &CMat::zeros(1, 1), 1e-15));

        let theta = 0.7;
        let k = su_from_sp(&SpReal::rotation(theta)).unwrap();
        assert!(close(k.p(), &CMat::scalar(1, C64::from_polar(1.0, -theta)), 1e-15));
        assert!(close(k.q(), &CMat::zeros(1, 1), 1e-15));

        for g in [SpReal::identity(1), j, SpReal::rotation(theta)] {
            let back = sp_from_su(&su_from_sp(&g).unwrap()).unwrap();
            assert!(close(back.matrix(), g.matrix(), 1e-15));
        }
    }

    #[test]
    fn validation_reports() {
        let r = validate_su(&SuBlocks::identity(2), 1e-12);
        assert!(r.ok());
        assert_eq!(r.max_residual(), 0.0);
        let bad = SuBlocks::new_unchecked(CMat::identity(1), CMat::identity(1)).unwrap();
        let r = validate_su(&bad, 1e-10);
        assert!(!r.ok());
        assert!((r.residuals[0].1 - 1.0).abs() < 1e-15);
        assert!(matches!(
            SuBlocks::new(CMat::identity(1), CMat::identity(1)),
            Err(Error::NotInS { .. })
        ));
        for seed in 0..5 {
            let k = su_exp(&random_su_lie(2, seed, 0.8)).unwrap();
            assert!(validate_su(&k, 1e-10).ok());
        }
    }

    #[test]
    fn random_generators() {
        let g = random_sp(2, 3, 0.0);
        assert!(close(g.matrix(), &CMat::identity(4), 0.0));
        let g = random_sp(1, 42, 0.5);
        assert!(validate_sp(&g, 1e-10).ok());
        assert_ne!(random_sp(1, 1, 0.5), random_sp(1, 2, 0.5));
        assert_eq!(random_sp(2, 9, 0.5), random_sp(2, 9, 0.5));
    }

    #[test]
    fn group_operations() {
        let k = random_su(2, 5, 0.7);
        let e = su_mul(&k, &su_inv(&k)).unwrap();
        assert!(close(e.p(), &CMat::identity(2), 1e-12));
        assert!(close(e.q(), &CMat::zeros(2, 2), 1e-12));

        let r: f64 = 0.3;
        let sq = SuBlocks::new(CMat::scalar(1, c(r.cosh(), 0.0)), CMat::scalar(1, c(r.sinh(), 0.0)))
            .unwrap();
        let inv = su_inv(&sq);
        assert!(close(inv.p(), &CMat::scalar(1, c(r.cosh(), 0.0)), 0.0));
        assert!(close(inv.q(), &CMat::scalar(1, c(-r.sinh(), 0.0)), 0.0));

        let g = random_sp(2, 8, 0.6);
        let gi = sp_inv(&g);
        assert!(close(&(g.matrix() * gi.matrix()), &CMat::identity(4), 1e-12));
    }

    #[test]
    fn negative_elements() {
        for seed in 0..20 {
            for n in [1, 2] {
                let g = random_negative_sp(n, seed);
                assert!(validate_sp(&g, 1e-10).ok());
                let d = matcore::det(&(g.matrix() + &CMat::identity(2 * n))).unwrap();
                assert!(d.re < -0.1, "det(I+g) = {d}");
                let k = su_from_sp(&g).unwrap();
                let arg = k.det_p().arg();
                assert!(arg.abs() > 1e-3 && (std::f64::consts::PI - arg.abs()) > 1e-3);
            }
        }
    }
}
