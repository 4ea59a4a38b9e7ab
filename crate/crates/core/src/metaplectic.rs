//! Metaplectic operators `σ(k)` and `dσ(X)` on Fock space through their
//! kernels, with the checks that tie them to the Heisenberg action.

use crate::error::{Error, Result};
use crate::gaussint::{self, GaussianKernel};
use crate::matcore::{self, c, CMat, C64, ONE};
use crate::poly::Poly;
use crate::quadrature;
use crate::sympgroup::{self, SuBlocks, SuLie};

fn check_su(k: &SuBlocks) -> Result<()> {
    let report = sympgroup::validate_su(k, sympgroup::default_tol(k.p().norm() + k.q().norm()));
    if report.ok() {
        Ok(())
    } else {
        Err(Error::NotInS { residual: report.max_residual() })
    }
}

fn check_su_lie(x: &SuLie) -> Result<()> {
    let report = sympgroup::validate_su_lie(x, sympgroup::default_tol(x.a().norm() + x.b().norm()));
    if report.ok() {
        Ok(())
    } else {
        Err(Error::NotInLie { residual: report.max_residual() })
    }
}

/// Kernel of `σ(k)`: `c = (det P)^{-1/2}`, `α = Q̄P⁻¹`, `β = (Pᵗ)⁻¹`,
/// `γ = -P⁻¹Q`.
pub fn sigma_kernel(k: &SuBlocks, lambda: f64) -> Result<GaussianKernel> {
    check_su(k)?;
    let pinv = k.p_inv()?;
    let c0 = ONE / matcore::principal_sqrt(k.det_p());
    let alpha = (&k.q().conj() * &pinv).symmetrized();
    let beta = pinv.transpose();
    let gamma = (-(&pinv * k.q())).symmetrized();
    GaussianKernel::new(lambda, c0, alpha, beta, gamma)
}

/// Both sides of the functional equation
/// `e^{-(λ/4)|kz₀|² + (λ/2)\overline{kz₀}z} b_k(z - kz₀, w) = e^{-(λ/4)|z₀|² - (λ/2)w̄z₀} b_k(z, w + z₀)`.
pub fn intertwining_sides(k: &SuBlocks, z0: &[C64], z: &[C64], w: &[C64], lambda: f64) -> Result<(C64, C64)> {
    let b = sigma_kernel(k, lambda)?;
    let kz0 = k.act(z0);
    let lhs_e = -lambda / 4.0 * matcore::norm_sqr(&kz0) + matcore::dot(&matcore::conj_vec(&kz0), z) * (lambda / 2.0);
    let lhs = lhs_e.exp() * b.eval(&matcore::sub_vec(z, &kz0), w);
    let rhs_e = -lambda / 4.0 * matcore::norm_sqr(z0) - matcore::dot(&matcore::conj_vec(w), z0) * (lambda / 2.0);
    let rhs = rhs_e.exp() * b.eval(z, &matcore::add_vec(w, z0));
    Ok((lhs, rhs))
}

/// `|LHS - RHS|` of the functional equation.
pub fn verify_intertwining(k: &SuBlocks, z0: &[C64], z: &[C64], w: &[C64], lambda: f64) -> Result<f64> {
    let (l, r) = intertwining_sides(k, z0, z, w, lambda)?;
    Ok((l - r).norm())
}

/// Outcome of comparing `σ(k)σ(k')` with `σ(kk')`.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleReport {
    /// `s` with `σ(k)σ(k') = s σ(kk')`.
    pub sign: i8,
    /// The measured relating scalar.
    pub scalar: C64,
    /// Largest deviation of `(α, β, γ)`; zero when measured by quadrature.
    pub param_residual: f64,
    /// Sign predicted from the determinant identity for `α(k,k')`.
    pub predicted_sign: i8,
    /// Whether the scalar came from the quadrature fallback.
    pub via_quadrature: bool,
}

/// Tolerance on `|s ∓ 1|` for the analytic path.
pub const COCYCLE_TOL: f64 = 1e-8;
/// Tolerance on `|s ∓ 1|` when the composition is degenerate and the
/// scalar is measured by quadrature.
pub const COCYCLE_QUADRATURE_TOL: f64 = 1e-6;

/// `(det P)^{1/2}(det P')^{1/2} det(I + P⁻¹QQ̄'P'⁻¹)^{1/2} / (det P'')^{1/2}`,
/// with the middle root taken eigenvalue by eigenvalue.
pub fn predicted_cocycle_scalar(k: &SuBlocks, kp: &SuBlocks) -> Result<C64> {
    let kk = sympgroup::su_mul(k, kp)?;
    let m = &(&(&k.p_inv()? * k.q()) * &kp.q().conj()) * &kp.p_inv()?;
    let mid: C64 = matcore::eigenvalues(&(&CMat::identity(k.n()) + &m))?
        .into_iter()
        .map(matcore::principal_sqrt)
        .product();
    Ok(matcore::principal_sqrt(kk.det_p())
        / (matcore::principal_sqrt(k.det_p()) * matcore::principal_sqrt(kp.det_p()) * mid))
}

fn sign_of(s: C64) -> i8 {
    if s.re >= 0.0 {
        1
    } else {
        -1
    }
}

pub fn sigma_cocycle_sign(k: &SuBlocks, kp: &SuBlocks, lambda: f64) -> Result<CocycleReport> {
    let k1 = sigma_kernel(k, lambda)?;
    let k2 = sigma_kernel(kp, lambda)?;
    let target = sigma_kernel(&sympgroup::su_mul(k, kp)?, lambda)?;
    let predicted = predicted_cocycle_scalar(k, kp)?;
    let (scalar, param_residual, via_quadrature, tol) = match gaussint::compose_kernels(&k1, &k2) {
        Ok(comp) => (comp.c / target.c, comp.param_distance(&target), false, COCYCLE_TOL),
        Err(Error::DegenerateComposition { .. }) => {
            let n = k.n();
            let zero = vec![C64::new(0.0, 0.0); n];
            let nodes = quadrature::default_nodes(n);
            let v = gaussint::compose_kernels_quadrature(&k1, &k2, &zero, &zero, nodes);
            (v / target.c, 0.0, true, COCYCLE_QUADRATURE_TOL)
        }
        Err(e) => return Err(e),
    };
    let sign = sign_of(scalar);
    if (scalar - sign as f64).norm() > tol {
        return Err(Error::NotUnimodular { re: scalar.re, im: scalar.im });
    }
    Ok(CocycleReport { sign, scalar, param_residual, predicted_sign: sign_of(predicted), via_quadrature })
}

/// Residuals of the two candidate adjoint identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointReport {
    /// `|b_{k⁻¹}(z,w) - conj(b_k(z,w))|`.
    pub same_args: f64,
    /// `|b_{k⁻¹}(z,w) - conj(b_k(w,z))|`, the kernel of the Hilbert adjoint.
    pub swapped_args: f64,
}

pub fn sigma_adjoint_check(k: &SuBlocks, z: &[C64], w: &[C64], lambda: f64) -> Result<AdjointReport> {
    let b = sigma_kernel(k, lambda)?;
    let bi = sigma_kernel(&sympgroup::su_inv(k), lambda)?;
    let lhs = bi.eval(z, w);
    Ok(AdjointReport {
        same_args: (lhs - b.eval(z, w).conj()).norm(),
        swapped_args: (lhs - b.eval(w, z).conj()).norm(),
    })
}

/// Kernel of `dσ(X)`:
/// `(-½Tr A + (λ/4)z(B̄z) - (λ/2)(Az)w̄ - (λ/4)w̄(Bw̄)) exp((λ/2)zw̄)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DsigmaKernel {
    pub n: usize,
    pub lambda: f64,
    pub a: CMat,
    pub b: CMat,
}

impl DsigmaKernel {
    pub fn prefactor(&self, z: &[C64], w: &[C64]) -> C64 {
        let l = self.lambda;
        let wb = matcore::conj_vec(w);
        -self.a.trace() * 0.5 + self.b.conj().bilinear(z, z) * (l / 4.0)
            - matcore::dot(&self.a.mul_vec(z), &wb) * (l / 2.0)
            - self.b.bilinear(&wb, &wb) * (l / 4.0)
    }

    pub fn eval(&self, z: &[C64], w: &[C64]) -> C64 {
        let wb = matcore::conj_vec(w);
        self.prefactor(z, w) * (matcore::dot(z, &wb) * (self.lambda / 2.0)).exp()
    }
}

pub fn dsigma_kernel(x: &SuLie, lambda: f64) -> Result<DsigmaKernel> {
    check_su_lie(x)?;
    Ok(DsigmaKernel { n: x.n(), lambda, a: x.a().clone(), b: x.b().clone() })
}

/// `dσ(X)f = (-½Tr A + (λ/4)z(B̄z)) f - Σ(Az)_j ∂_j f - (1/λ) Σ b_jk ∂_j∂_k f`
/// on holomorphic polynomials in `n` variables.
pub fn dsigma_apply(x: &SuLie, f: &Poly, lambda: f64) -> Result<Poly> {
    check_su_lie(x)?;
    let n = x.n();
    if f.nvars() != n {
        return Err(Error::Shape("polynomial must have n variables".into()));
    }
    let (a, b) = (x.a(), x.b());
    let bb = b.conj();
    let mut mult = Poly::constant(n, -a.trace() * 0.5);
    for j in 0..n {
        for k in 0..n {
            let zz = &Poly::var(n, j) * &Poly::var(n, k);
            mult = &mult + &zz.scale(bb.get(j, k) * (lambda / 4.0));
        }
    }
    let mut out = &mult * f;
    for j in 0..n {
        let dj = f.derivative(j);
        let mut az = Poly::zero(n);
        for k in 0..n {
            az = &az + &Poly::var(n, k).scale(a.get(j, k));
        }
        out = &out - &(&az * &dj);
        for k in 0..n {
            out = &out - &dj.derivative(k).scale(b.get(j, k) / lambda);
        }
    }
    Ok(out)
}

/// The same operator applied to the coherent state `e_{w₀}`, using
/// `∂_j e_{w₀} = (λ/2) w̄₀_j e_{w₀}`.
pub fn dsigma_apply_coherent(x: &SuLie, w0: &[C64], z: &[C64], lambda: f64) -> Result<C64> {
    check_su_lie(x)?;
    let (a, b) = (x.a(), x.b());
    let wb = matcore::conj_vec(w0);
    let e = (matcore::dot(&wb, z) * (lambda / 2.0)).exp();
    let grad = matcore::scale_vec(&wb, c(lambda / 2.0, 0.0));
    let mult = -a.trace() * 0.5 + b.conj().bilinear(z, z) * (lambda / 4.0);
    let first = matcore::dot(&a.mul_vec(z), &grad);
    let second = b.bilinear(&grad, &grad) / lambda;
    Ok((mult - first - second) * e)
}

/// `S_λ(σ(k))(z) = (det P)^{-1/2} exp((λ/4)(z(Q̄P⁻¹z) + 2z̄(P⁻¹ - I)z - z̄(P⁻¹Qz̄)))`.
pub fn berezin_symbol_sigma(k: &SuBlocks, z: &[C64], lambda: f64) -> Result<C64> {
    check_su(k)?;
    let pinv = k.p_inv()?;
    let zb = matcore::conj_vec(z);
    let e = (&k.q().conj() * &pinv).bilinear(z, z)
        + (&pinv - &CMat::identity(k.n())).bilinear(&zb, z) * 2.0
        - (&pinv * k.q()).bilinear(&zb, &zb);
    Ok((e * (lambda / 4.0)).exp() / matcore::principal_sqrt(k.det_p()))
}

/// `S_λ(dσ(X))(z) = -½Tr A + (λ/4)z(B̄z) - (λ/2)(Az)z̄ - (λ/4)z̄(Bz̄)`.
pub fn berezin_symbol_dsigma(x: &SuLie, z: &[C64], lambda: f64) -> Result<C64> {
    Ok(dsigma_kernel(x, lambda)?.prefactor(z, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{I, ZERO};

    #[test]
    fn identity_kernel() {
        let k = sigma_kernel(&SuBlocks::identity(2), 1.5).unwrap();
        assert_eq!(k, GaussianKernel::identity(2, 1.5));
    }

    #[test]
    fn squeeze_kernel() {
        let r: f64 = 0.4;
        let k = SuBlocks::new(CMat::scalar(1, c(r.cosh(), 0.0)), CMat::scalar(1, c(r.sinh(), 0.0))).unwrap();
        let b = sigma_kernel(&k, 1.0).unwrap();
        assert!((b.c - r.cosh().powf(-0.5)).norm() < 1e-15);
        assert!((b.alpha.get(0, 0) - r.tanh()).norm() < 1e-15);
        assert!((b.beta.get(0, 0) - 1.0 / r.cosh()).norm() < 1e-15);
        assert!((b.gamma.get(0, 0) + r.tanh()).norm() < 1e-15);
    }

    #[test]
    fn rotations_past_pi_flip_sign() {
        let k = sympgroup::su_from_sp(&sympgroup::SpReal::rotation(2.0)).unwrap();
        let rep = sigma_cocycle_sign(&k, &k, 1.0).unwrap();
        assert_eq!(rep.sign, -1);
        assert_eq!(rep.predicted_sign, -1);
        assert!(rep.param_residual < 1e-12);
    }

    #[test]
    fn dsigma_on_square() {
        let x = SuLie::new(CMat::scalar(1, I), CMat::zeros(1, 1)).unwrap();
        let f = Poly::monomial(vec![2], ONE);
        let out = dsigma_apply(&x, &f, 1.0).unwrap();
        assert_eq!(out, Poly::monomial(vec![2], c(0.0, -2.5)));
        let x = SuLie::new(CMat::zeros(1, 1), CMat::scalar(1, c(0.3, 0.2))).unwrap();
        let out = dsigma_apply(&x, &Poly::one(1), 2.0).unwrap();
        assert_eq!(out, Poly::monomial(vec![2], c(0.3, -0.2) * 0.5));
    }

    #[test]
    fn rotation_berezin_symbol() {
        let theta: f64 = 0.9;
        let k = sympgroup::su_from_sp(&sympgroup::SpReal::rotation(theta)).unwrap();
        let z = [c(0.4, -0.3)];
        let v = berezin_symbol_sigma(&k, &z, 1.3).unwrap();
        let want = (I * theta / 2.0).exp() * ((I * theta).exp() - 1.0).scale(1.3 / 2.0 * z[0].norm_sqr()).exp();
        assert!((v - want).norm() < 1e-14);
        let x = SuLie::new(CMat::scalar(1, I), CMat::zeros(1, 1)).unwrap();
        let s = berezin_symbol_dsigma(&x, &z, 1.0).unwrap();
        assert!((s - (-I * 0.5 - I * 0.5 * z[0].norm_sqr())).norm() < 1e-15);
        assert_eq!(berezin_symbol_dsigma(&SuLie::zero(1), &z, 1.0).unwrap(), ZERO);
    }

    #[test]
    fn adjoint_identities() {
        let z = [c(0.3, -0.2), c(0.1, 0.5)];
        let w = [c(-0.4, 0.1), c(0.2, 0.2)];
        let mut same: f64 = 0.0;
        for seed in 0..10 {
            let k = sympgroup::random_su(2, seed, 0.8);
            let r = sigma_adjoint_check(&k, &z, &w, 1.0).unwrap();
            assert!(r.swapped_args < 1e-13, "{r:?}");
            same = same.max(r.same_args);
        }
        assert!(same > 1e-3);
        let g = sympgroup::SpReal::squeeze(0.4);
        let k = sympgroup::su_from_sp(&g).unwrap();
        let r = sigma_adjoint_check(&k, &[c(0.3, 0.0)], &[c(-0.7, 0.0)], 1.0).unwrap();
        assert!(r.swapped_args < 1e-12 && r.same_args > 1e-3, "{r:?}");
        let r = sigma_adjoint_check(&k, &[c(0.3, 0.0)], &[c(-0.3, 0.0)], 1.0).unwrap();
        assert!(r.same_args < 1e-12 && r.swapped_args < 1e-12, "{r:?}");
    }
}
