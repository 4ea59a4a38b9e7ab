//! Complex Gaussian integrals over `ℂⁿ`, Gaussian kernels and their
//! composition, and the block-matrix identities behind the `W₀` closed form.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matcore::{self, c, CMat, C64, ONE};
use crate::quadrature;
use crate::rng;
use crate::sympgroup::SuBlocks;

/// `∫ exp(-(wAw + w̄Dw̄ + 2w̄Bw)) exp(uw + vw̄) dm(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianIntegrand {
    pub n: usize,
    pub a: CMat,
    pub b: CMat,
    pub d: CMat,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl GaussianIntegrand {
    pub fn new(a: CMat, b: CMat, d: CMat, u: Vec<C64>, v: Vec<C64>) -> Result<Self> {
        let n = a.rows();
        for m in [&a, &b, &d] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape("A, B, D must be n x n".into()));
            }
        }
        if u.len() != n || v.len() != n {
            return Err(Error::Shape("u, v must have length n".into()));
        }
        let tol = 1e-10 * (1.0 + a.norm() + d.norm());
        if a.symmetry_residual() > tol || d.symmetry_residual() > tol {
            return Err(Error::Shape("A and D must be symmetric".into()));
        }
        Ok(GaussianIntegrand { n, a, b, d, u, v })
    }

    /// `M = [[A, Bᵗ], [B, D]]`.
    pub fn m(&self) -> CMat {
        CMat::from_blocks(&self.a, &self.b.transpose(), &self.b, &self.d).unwrap()
    }

    /// `N = Uᵗ M U`, the quadratic form in real coordinates `(x, y)`.
    pub fn n_matrix(&self) -> CMat {
        let u = CMat::u(self.n);
        &(&u.transpose() * &self.m()) * &u
    }

    /// Integrand value at `w`.
    pub fn eval(&self, w: &[C64]) -> C64 {
        let wb = matcore::conj_vec(w);
        let quad = self.a.bilinear(w, w) + self.d.bilinear(&wb, &wb) + self.b.bilinear(&wb, w) * 2.0;
        (-quad + matcore::dot(&self.u, w) + matcore::dot(&self.v, &wb)).exp()
    }
}

/// `πⁿ det(N)^{-1/2} exp(¼ (u,v) M⁻¹ (u,v)ᵗ)`.
pub fn gaussian_integral_closed(gi: &GaussianIntegrand) -> Result<C64> {
    let nm = gi.n_matrix();
    let root = matcore::det_powhalf_posreal(&nm).map_err(|e| match e {
        Error::NotPositiveReal { pivot } => Error::DivergentIntegral { pivot },
        other => other,
    })?;
    let minv = matcore::inverse(&gi.m())?;
    let uv: Vec<C64> = gi.u.iter().chain(&gi.v).copied().collect();
    let expo = minv.bilinear(&uv, &uv) * 0.25;
    Ok(std::f64::consts::PI.powi(gi.n as i32) / root * expo.exp())
}

/// Tensor Gauss–Hermite value of the same integral in real coordinates
/// `v = (x, y)`, where the integrand is `exp(-vᵗNv + ℓv)` with
/// `ℓ = (u + v, i(u - v))`. The weight is matched to the mean decay rate of
/// `Re N`.
pub fn gaussian_integral_quadrature(gi: &GaussianIntegrand, nodes: usize) -> C64 {
    let n = gi.n;
    let dim = 2 * n;
    let nm = gi.n_matrix();
    let a = (nm.re().trace().re / dim as f64).max(1e-3);
    let scale = 1.0 / a.sqrt();
    let q: Vec<C64> = (0..dim * dim).map(|k| nm.get(k / dim, k % dim) * (scale * scale)).collect();
    let l: Vec<C64> = (0..n)
        .map(|j| (gi.u[j] + gi.v[j]) * scale)
        .chain((0..n).map(|j| (gi.u[j] - gi.v[j]) * c(0.0, scale)))
        .collect();
    quadrature::integrate_hermite(dim, nodes, |s| {
        let mut e = C64::new(s.iter().map(|t| t * t).sum(), 0.0);
        for i in 0..dim {
            let mut row = l[i];
            for j in 0..dim {
                row -= q[i * dim + j] * s[j];
            }
            e += row * s[i];
        }
        e.exp()
    }) * scale.powi(dim as i32)
}

/// A convergent integrand: `B` near a positive diagonal, small symmetric
/// `A`, `D`, and linear terms in the box `|Re|, |Im| ≤ 0.5`.
pub fn random_integrand(n: usize, seed: u64) -> GaussianIntegrand {
    let mut r = rng::stream(seed, "gaussian-integrand");
    loop {
        let mut cm = |s: f64| CMat::from_fn(n, n, |_, _| c(r.gen_range(-s..s), r.gen_range(-s..s)));
        let a = cm(0.25).symmetrized();
        let d = cm(0.25).symmetrized();
        let mut b = cm(0.15);
        let mut vec = |s: f64| -> Vec<C64> { (0..n).map(|_| c(r.gen_range(-s..s), r.gen_range(-s..s))).collect() };
        let u = vec(0.5);
        let v = vec(0.5);
        for j in 0..n {
            let x = b.get(j, j) + r.gen_range(0.6..1.2);
            b.set(j, j, x);
        }
        let gi = GaussianIntegrand { n, a, b, d, u, v };
        if matcore::check_positive_real(&gi.n_matrix(), 0.05).is_ok() {
            return gi;
        }
    }
}

/// `K(z,w) = c exp((λ/4)(zᵗαz + 2zᵗβw̄ + w̄ᵗγw̄))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    pub n: usize,
    pub lambda: f64,
    pub c: C64,
    pub alpha: CMat,
    pub beta: CMat,
    pub gamma: CMat,
}

impl GaussianKernel {
    pub fn new(lambda: f64, c0: C64, alpha: CMat, beta: CMat, gamma: CMat) -> Result<Self> {
        let n = alpha.rows();
        for m in [&alpha, &beta, &gamma] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape("kernel blocks must be n x n".into()));
            }
        }
        if !(lambda > 0.0) {
            return Err(Error::BadConfig("λ must be positive".into()));
        }
        if c0 == C64::new(0.0, 0.0) {
            return Err(Error::BadConfig("kernel constant must be nonzero".into()));
        }
        Ok(GaussianKernel { n, lambda, c: c0, alpha, beta, gamma })
    }

    /// `exp(λ z w̄ / 2)`, the reproducing kernel of Fock space.
    pub fn identity(n: usize, lambda: f64) -> Self {
        GaussianKernel {
            n,
            lambda,
            c: ONE,
            alpha: CMat::zeros(n, n),
            beta: CMat::identity(n),
            gamma: CMat::zeros(n, n),
        }
    }

    pub fn exponent(&self, z: &[C64], w: &[C64]) -> C64 {
        let wb = matcore::conj_vec(w);
        let q = self.alpha.bilinear(z, z) + self.beta.bilinear(z, &wb) * 2.0 + self.gamma.bilinear(&wb, &wb);
        q * (self.lambda / 4.0)
    }

    pub fn eval(&self, z: &[C64], w: &[C64]) -> C64 {
        self.c * self.exponent(z, w).exp()
    }

    pub fn scale(&self, s: C64) -> Self {
        GaussianKernel { c: self.c * s, ..self.clone() }
    }

    /// Largest entrywise deviation between the quadratic parameters.
    pub fn param_distance(&self, other: &GaussianKernel) -> f64 {
        (&self.alpha - &other.alpha)
            .max_abs()
            .max((&self.beta - &other.beta).max_abs())
            .max((&self.gamma - &other.gamma).max_abs())
    }
}

/// Minimum Cholesky pivot of `Re N` below which composition is treated as
/// degenerate.
pub const DEGENERATE_PIVOT: f64 = 1e-10;

/// `(K₁∘K₂)(z,w) = ∫ K₁(z,u) K₂(u,w) e^{-λ|u|²/2} dμ_λ(u)` in closed form.
pub fn compose_kernels(k1: &GaussianKernel, k2: &GaussianKernel) -> Result<GaussianKernel> {
    if k1.n != k2.n {
        return Err(Error::Shape("compose_kernels: dimension mismatch".into()));
    }
    if (k1.lambda - k2.lambda).abs() > 1e-14 * k1.lambda {
        return Err(Error::BadConfig("compose_kernels: λ mismatch".into()));
    }
    let n = k1.n;
    let lam = k1.lambda;
    let q = lam / 4.0;
    let a = k2.alpha.scale_re(-q);
    let d = k1.gamma.scale_re(-q);
    let b = CMat::scalar(n, c(q, 0.0));
    let m = CMat::from_blocks(&a, &b, &b, &d)?;
    let u = CMat::u(n);
    let nm = &(&u.transpose() * &m) * &u;
    let pivot = matcore::hermitian_part_min_pivot(&nm);
    if pivot <= 0.0 {
        return Err(Error::DivergentIntegral { pivot });
    }
    if pivot < DEGENERATE_PIVOT * nm.norm().max(1.0) {
        return Err(Error::DegenerateComposition { pivot });
    }
    let root = matcore::det_powhalf_posreal(&nm)?;
    let minv = matcore::inverse(&m)?;
    let (m11, _m12, m21, m22) = minv.blocks()?;
    let b1 = &k1.beta;
    let b2 = &k2.beta;
    let alpha = (&k1.alpha + &(&(b1 * &m22) * &b1.transpose()).scale_re(q)).symmetrized();
    let beta = (&(b1 * &m21) * b2).scale_re(q);
    let gamma = (&k2.gamma + &(&(&b2.transpose() * &m11) * b2).scale_re(q)).symmetrized();
    let c0 = k1.c * k2.c * (lam / 2.0).powi(n as i32) / root;
    Ok(GaussianKernel { n, lambda: lam, c: c0, alpha, beta, gamma })
}

/// Pointwise value of the composition by quadrature.
pub fn compose_kernels_quadrature(
    k1: &GaussianKernel,
    k2: &GaussianKernel,
    z: &[C64],
    w: &[C64],
    nodes: usize,
) -> C64 {
    quadrature::quadrature_cn(k1.n, k1.lambda, nodes, |u| k1.eval(z, u) * k2.eval(u, w))
}

fn lemma_inverse(a: &CMat, d: &CMat, p: &CMat) -> Result<(CMat, CMat, CMat, CMat)> {
    let n = a.rows();
    let id = CMat::identity(n);
    let m = CMat::from_blocks(&-a, &(&id + &p.transpose()), &(&id + p), d)?;
    matcore::inverse(&m)?.blocks()
}

/// Residual of
/// `[[a, I-pᵗ],[p-I, d]] · [[α,β],[γ,δ]] · [[a, pᵗ-I],[I-p, d]] = [[4δ-a, 3I-4γ-pᵗ],[3I-4β-p, 4α+d]]`
/// where `[[α,β],[γ,δ]]` inverts `[[-a, I+pᵗ],[I+p, d]]`.
pub fn block_inverse_identity_residual(a: &CMat, d: &CMat, p: &CMat) -> Result<f64> {
    let n = a.rows();
    let id = CMat::identity(n);
    let (al, be, ga, de) = lemma_inverse(a, d, p)?;
    let pt = p.transpose();
    let left = CMat::from_blocks(a, &(&id - &pt), &(p - &id), d)?;
    let mid = CMat::from_blocks(&al, &be, &ga, &de)?;
    let right = CMat::from_blocks(a, &(&pt - &id), &(&id - p), d)?;
    let lhs = &(&left * &mid) * &right;
    let three = id.scale_re(3.0);
    let rhs = CMat::from_blocks(
        &(&de.scale_re(4.0) - a),
        &(&(&three - &ga.scale_re(4.0)) - &pt),
        &(&(&three - &be.scale_re(4.0)) - p),
        &(&al.scale_re(4.0) + d),
    )?;
    Ok((&lhs - &rhs).norm())
}

/// The inverse blocks `(α, β, γ, δ)` for `a = Q̄P⁻¹`, `d = P⁻¹Q`, `p = P⁻¹`.
pub fn su_lemma_blocks(k: &SuBlocks) -> Result<(CMat, CMat, CMat, CMat)> {
    let pinv = k.p_inv()?;
    let a = &k.q().conj() * &pinv;
    let d = &pinv * k.q();
    lemma_inverse(&a, &d, &pinv)
}

/// Residual of `½ J (k-I)(k+I)⁻¹ = [[δ, ½I-γ],[½I-β, α]]`.
pub fn cayley_block_identity_residual(k: &SuBlocks) -> Result<f64> {
    let n = k.n();
    let cay = matcore::cayley(&k.matrix())?;
    let lhs = (&CMat::j(n) * &cay).scale_re(0.5);
    let (al, be, ga, de) = su_lemma_blocks(k)?;
    let half = CMat::scalar(n, c(0.5, 0.0));
    let rhs = CMat::from_blocks(&de, &(&half - &ga), &(&half - &be), &al)?;
    Ok((&lhs - &rhs).norm())
}

/// `|det([[-Q̄P⁻¹, I+(Pᵗ)⁻¹],[I+P⁻¹, P⁻¹Q]]) - (-1)ⁿ det(P)⁻¹ det(k+I)|`.
pub fn det_identity_residual(k: &SuBlocks) -> Result<f64> {
    let n = k.n();
    let id = CMat::identity(n);
    let pinv = k.p_inv()?;
    let m = CMat::from_blocks(
        &-(&k.q().conj() * &pinv),
        &(&id + &pinv.transpose()),
        &(&id + &pinv),
        &(&pinv * k.q()),
    )?;
    let lhs = matcore::det(&m)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = matcore::det(&(&k.matrix() + &CMat::identity(2 * n)))? / k.det_p() * sign;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympgroup;

    fn scalar(x: f64) -> CMat {
        CMat::scalar(1, c(x, 0.0))
    }

    #[test]
    fn integral_examples() {
        let gi = GaussianIntegrand::new(scalar(0.0), scalar(0.5), scalar(0.0), vec![c(0.0, 0.0)], vec![c(0.0, 0.0)])
            .unwrap();
        assert!(gi.n_matrix().max_abs() - 1.0 < 1e-15);
        let v = gaussian_integral_closed(&gi).unwrap();
        assert!((v - std::f64::consts::PI).norm() < 1e-14);

        // ∫ e^{-|w|²} e^{w + w̄} dm = ∫ e^{-x²-y²+2x} = π e
        let gi = GaussianIntegrand::new(scalar(0.0), scalar(0.5), scalar(0.0), vec![ONE], vec![ONE]).unwrap();
        let v = gaussian_integral_closed(&gi).unwrap();
        let want = std::f64::consts::PI * std::f64::consts::E;
        assert!((v - want).norm() < 1e-13 * want);
        let q = gaussian_integral_quadrature(&gi, 80);
        assert!((q - want).norm() < 1e-10 * want);
    }

    #[test]
    fn random_integrands_match_quadrature() {
        for seed in 0..6 {
            let n = 1 + seed as usize % 2;
            let gi = random_integrand(n, seed);
            let closed = gaussian_integral_closed(&gi).unwrap();
            let quad = gaussian_integral_quadrature(&gi, quadrature::default_nodes(n));
            assert!((closed - quad).norm() < 1e-8 * closed.norm(), "seed {seed}: {closed} vs {quad}");
        }
    }

    #[test]
    fn divergent_integral() {
        let gi = GaussianIntegrand::new(scalar(0.0), scalar(-0.5), scalar(0.0), vec![ONE], vec![ONE]).unwrap();
        assert!(matches!(gaussian_integral_closed(&gi), Err(Error::DivergentIntegral { .. })));
    }

    #[test]
    fn identity_composition() {
        for n in [1, 2] {
            let id = GaussianKernel::identity(n, 1.7);
            let k = compose_kernels(&id, &id).unwrap();
            assert!((k.c - 1.0).norm() < 1e-14);
            assert!(k.param_distance(&id) < 1e-14);
        }
    }

    #[test]
    fn lemma_examples() {
        let z = CMat::zeros(1, 1);
        let r = block_inverse_identity_residual(&z, &z, &CMat::identity(1)).unwrap();
        assert!(r < 1e-15);
        let id = SuBlocks::identity(1);
        assert!(cayley_block_identity_residual(&id).unwrap() < 1e-15);
        assert!(det_identity_residual(&id).unwrap() < 1e-14);
        for seed in 0..10 {
            for n in [1, 2] {
                let k = sympgroup::random_su(n, seed, 0.8);
                assert!(cayley_block_identity_residual(&k).unwrap() < 1e-10);
                assert!(det_identity_residual(&k).unwrap() < 1e-10);
            }
        }
    }
}
