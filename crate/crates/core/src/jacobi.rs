//! The Jacobi group `G = Hₙ ⋊ S`, its complexification, the `P⁺KᶜP⁻`
//! decomposition, the action on the domain `𝒟`, and the functions `K_χ`,
//! `J_χ` from which the metaplectic kernel is recovered.

use crate::error::{Error, Result};
use crate::matcore::{self, CMat, C64, I, ZERO};
use crate::sympgroup::{self, SuBlocks};

/// The point `a(y, Y)` of `𝔭⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPoint {
    pub y: Vec<C64>,
    pub yy: CMat,
}

impl JacobiPoint {
    /// Validates `Yᵗ = Y` and `I - YȲ ≻ 0`.
    pub fn new(y: Vec<C64>, yy: CMat) -> Result<Self> {
        let p = Self::new_unchecked(y, yy)?;
        let tol = 1e-10 * (1.0 + p.yy.norm());
        if p.yy.symmetry_residual() > tol {
            return Err(Error::Shape("Y must be symmetric".into()));
        }
        if !p.in_domain() {
            return Err(Error::DomainViolation);
        }
        Ok(p)
    }

    pub fn new_unchecked(y: Vec<C64>, yy: CMat) -> Result<Self> {
        if yy.rows() != y.len() || yy.cols() != y.len() {
            return Err(Error::Shape("Y must be n x n with n = len(y)".into()));
        }
        Ok(JacobiPoint { y, yy })
    }

    /// `a(y, 0)`.
    pub fn flat(y: Vec<C64>) -> Self {
        let n = y.len();
        JacobiPoint { y, yy: CMat::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn in_domain(&self) -> bool {
        let n = self.n();
        let m = &CMat::identity(n) - &(&self.yy * &self.yy.conj());
        matcore::hermitian_part_min_pivot(&m) > 0.0
    }
}

/// `((z₀, z̄₀), c, k) ∈ G`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiGroupElt {
    pub z0: Vec<C64>,
    pub c: f64,
    pub k: SuBlocks,
}

/// `((z₀, w₀), c, g) ∈ Gᶜ` with `g = [[A, B], [C, D]] ∈ Sp(n,ℂ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiGroupEltC {
    pub z0: Vec<C64>,
    pub w0: Vec<C64>,
    pub c: C64,
    pub g: CMat,
}

/// The character `χ(k) = e^{iλc} (det P)^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharParams {
    pub lambda: f64,
    pub m: f64,
}

impl CharParams {
    pub fn new(lambda: f64, m: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::BadConfig("λ must be positive".into()));
        }
        if ((2.0 * m).round() - 2.0 * m).abs() > 1e-12 {
            return Err(Error::BadConfig("m must be a half-integer".into()));
        }
        Ok(CharParams { lambda, m })
    }

    /// The metaplectic value `m = -1/2`.
    pub fn metaplectic(lambda: f64) -> Self {
        CharParams { lambda, m: -0.5 }
    }

    /// Whether `π_χ` is a nonzero unitary representation.
    pub fn is_holomorphic(&self, n: usize) -> bool {
        self.m.fract() == 0.0 && self.m + n as f64 + 0.5 < 0.0
    }
}

impl JacobiGroupElt {
    pub fn new(z0: Vec<C64>, c: f64, k: SuBlocks) -> Result<Self> {
        if z0.len() != k.n() {
            return Err(Error::Shape("z0 length must equal n".into()));
        }
        Ok(JacobiGroupElt { z0, c, k })
    }

    pub fn identity(n: usize) -> Self {
        JacobiGroupElt { z0: vec![ZERO; n], c: 0.0, k: SuBlocks::identity(n) }
    }

    pub fn n(&self) -> usize {
        self.z0.len()
    }

    /// `k(z, w) = (Pz + Qw, Q̄z + P̄w)`.
    fn k_pair(&self, z: &[C64], w: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let (p, q) = (self.k.p(), self.k.q());
        (
            matcore::add_vec(&p.mul_vec(z), &q.mul_vec(w)),
            matcore::add_vec(&q.conj().mul_vec(z), &p.conj().mul_vec(w)),
        )
    }

    pub fn complexify(&self) -> JacobiGroupEltC {
        JacobiGroupEltC {
            z0: self.z0.clone(),
            w0: matcore::conj_vec(&self.z0),
            c: C64::new(self.c, 0.0),
            g: self.k.matrix(),
        }
    }
}

fn omega(z: &[C64], w: &[C64], zp: &[C64], wp: &[C64]) -> C64 {
    crate::heisenberg::omega(z, w, zp, wp)
}

pub fn jacobi_mul(g1: &JacobiGroupElt, g2: &JacobiGroupElt) -> Result<JacobiGroupElt> {
    if g1.n() != g2.n() {
        return Err(Error::Shape("jacobi_mul: dimension mismatch".into()));
    }
    let (kz, kw) = g1.k_pair(&g2.z0, &matcore::conj_vec(&g2.z0));
    let om = omega(&g1.z0, &matcore::conj_vec(&g1.z0), &kz, &kw);
    Ok(JacobiGroupElt {
        z0: matcore::add_vec(&g1.z0, &kz),
        c: g1.c + g2.c + 0.5 * om.re,
        k: sympgroup::su_mul(&g1.k, &g2.k)?,
    })
}

/// `g⁻¹ = (-k⁻¹(z₀, z̄₀), -c, k⁻¹)`.
pub fn jacobi_inv(g: &JacobiGroupElt) -> JacobiGroupElt {
    let kinv = sympgroup::su_inv(&g.k);
    let h = JacobiGroupElt { z0: vec![ZERO; g.n()], c: 0.0, k: kinv.clone() };
    let (z, _) = h.k_pair(&g.z0, &matcore::conj_vec(&g.z0));
    JacobiGroupElt { z0: z.iter().map(|v| -v).collect(), c: -g.c, k: kinv }
}

/// The complexified law: `z̄` replaced by `w` throughout.
pub fn jacobi_mul_c(g1: &JacobiGroupEltC, g2: &JacobiGroupEltC) -> Result<JacobiGroupEltC> {
    let n = g1.z0.len();
    if g2.z0.len() != n {
        return Err(Error::Shape("jacobi_mul_c: dimension mismatch".into()));
    }
    let pair: Vec<C64> = g2.z0.iter().chain(&g2.w0).copied().collect();
    let kp = g1.g.mul_vec(&pair);
    let (kz, kw) = kp.split_at(n);
    let om = omega(&g1.z0, &g1.w0, kz, kw);
    Ok(JacobiGroupEltC {
        z0: matcore::add_vec(&g1.z0, kz),
        w0: matcore::add_vec(&g1.w0, kw),
        c: g1.c + g2.c + om * 0.5,
        g: &g1.g * &g2.g,
    })
}

/// Components of `g = p⁺(y, Y) · k(c, P) · p⁻(v, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PkpFactors {
    pub y: Vec<C64>,
    pub yy: CMat,
    pub c: C64,
    pub p: CMat,
    pub v: Vec<C64>,
    pub vv: CMat,
}

pub fn pkp_decompose(g: &JacobiGroupEltC) -> Result<PkpFactors> {
    let (_a, b, cc, d) = g.g.blocks()?;
    let dinv = matcore::inverse(&d).map_err(|_| Error::NoDecomposition)?;
    let yy = &b * &dinv;
    let y = matcore::sub_vec(&g.z0, &yy.mul_vec(&g.w0));
    let v = dinv.mul_vec(&g.w0);
    let vv = &dinv * &cc;
    let p = dinv.transpose();
    let c0 = g.c - I * 0.25 * matcore::dot(&y, &g.w0);
    Ok(PkpFactors { y, yy, c: c0, p, v, vv })
}

/// `((y,0), 0, [[I, Y], [0, I]])`.
pub fn p_plus(y: &[C64], yy: &CMat) -> JacobiGroupEltC {
    let n = y.len();
    JacobiGroupEltC {
        z0: y.to_vec(),
        w0: vec![ZERO; n],
        c: ZERO,
        g: CMat::from_blocks(&CMat::identity(n), yy, &CMat::zeros(n, n), &CMat::identity(n)).unwrap(),
    }
}

/// `((0,v), 0, [[I, 0], [V, I]])`.
pub fn p_minus(v: &[C64], vv: &CMat) -> JacobiGroupEltC {
    let n = v.len();
    JacobiGroupEltC {
        z0: vec![ZERO; n],
        w0: v.to_vec(),
        c: ZERO,
        g: CMat::from_blocks(&CMat::identity(n), &CMat::zeros(n, n), vv, &CMat::identity(n)).unwrap(),
    }
}

/// `((0,0), c, [[P, 0], [0, (Pᵗ)⁻¹]])`.
pub fn k_c(c0: C64, p: &CMat) -> Result<JacobiGroupEltC> {
    let n = p.rows();
    let pti = matcore::inverse(&p.transpose())?;
    Ok(JacobiGroupEltC {
        z0: vec![ZERO; n],
        w0: vec![ZERO; n],
        c: c0,
        g: CMat::from_blocks(p, &CMat::zeros(n, n), &CMat::zeros(n, n), &pti)?,
    })
}

pub fn pkp_recompose(f: &PkpFactors) -> Result<JacobiGroupEltC> {
    let left = jacobi_mul_c(&p_plus(&f.y, &f.yy), &k_c(f.c, &f.p)?)?;
    jacobi_mul_c(&left, &p_minus(&f.v, &f.vv))
}

/// `Y' = (AY + B)(CY + D)⁻¹`, `y' = z₀ + Ay - Y'(w₀ + Cy)`.
pub fn jacobi_action(g: &JacobiGroupEltC, z: &JacobiPoint) -> Result<JacobiPoint> {
    let (a, b, cc, d) = g.g.blocks()?;
    let num = &(&a * &z.yy) + &b;
    let den = &(&cc * &z.yy) + &d;
    let yp = &num * &matcore::inverse(&den)?;
    let inner = matcore::add_vec(&g.w0, &cc.mul_vec(&z.y));
    let y = matcore::sub_vec(&matcore::add_vec(&g.z0, &a.mul_vec(&z.y)), &yp.mul_vec(&inner));
    JacobiPoint::new_unchecked(y, yp)
}

/// Action of a real element; the image must stay in `𝒟`.
pub fn jacobi_action_real(g: &JacobiGroupElt, z: &JacobiPoint) -> Result<JacobiPoint> {
    let out = jacobi_action(&g.complexify(), z)?;
    if !out.in_domain() {
        return Err(Error::DomainViolation);
    }
    Ok(out)
}

/// `K_χ(Z, W) = det(I - YV̄)^m exp((λ/4)(2y(I-V̄Y)⁻¹v̄ + y(I-V̄Y)⁻¹V̄y + v̄Y(I-V̄Y)⁻¹v̄))`.
pub fn k_chi(z: &JacobiPoint, w: &JacobiPoint, chi: &CharParams) -> Result<C64> {
    let n = z.n();
    let id = CMat::identity(n);
    let vb = w.yy.conj();
    let vbar = matcore::conj_vec(&w.y);
    let d = matcore::det(&(&id - &(&z.yy * &vb)))?;
    let r = matcore::inverse(&(&id - &(&vb * &z.yy)))?;
    let e = r.bilinear(&z.y, &vbar) * 2.0
        + (&r * &vb).bilinear(&z.y, &z.y)
        + (&z.yy * &r).bilinear(&vbar, &vbar);
    Ok(matcore::det_pow_half_integer(d, chi.m) * (e * (chi.lambda / 4.0)).exp())
}

/// `J_χ(g, Z) = e^{iλc₀} det(Q̄Y + P̄)^{-m} exp((λ/4)(z₀z̄₀ + 2z̄₀Py + yPᵗQ̄y
/// - (z̄₀ + Q̄y)(PY + Q)(Q̄Y + P̄)⁻¹(z̄₀ + Q̄y)))`.
pub fn j_chi(g: &JacobiGroupElt, z: &JacobiPoint, chi: &CharParams) -> Result<C64> {
    let (p, q) = (g.k.p(), g.k.q());
    let (pb, qb) = (p.conj(), q.conj());
    let z0b = matcore::conj_vec(&g.z0);
    let den = &(&qb * &z.yy) + &pb;
    let d = matcore::det(&den)?;
    let deninv = matcore::inverse(&den)?;
    let u = matcore::add_vec(&z0b, &qb.mul_vec(&z.y));
    let m = &(&(p * &z.yy) + q) * &deninv;
    let e = matcore::dot(&g.z0, &z0b)
        + matcore::dot(&z0b, &p.mul_vec(&z.y)) * 2.0
        + (&p.transpose() * &qb).bilinear(&z.y, &z.y)
        - m.bilinear(&u, &u);
    let lam = chi.lambda;
    Ok((I * (lam * g.c)).exp() * matcore::det_pow_half_integer(d, -chi.m) * (e * (lam / 4.0)).exp())
}

/// `(π_χ(g)f)(Z) = J_χ(g⁻¹, Z)⁻¹ f(g⁻¹·Z)`.
pub fn pi_chi_apply(
    g: &JacobiGroupElt,
    f: impl Fn(&JacobiPoint) -> C64,
    z: &JacobiPoint,
    chi: &CharParams,
) -> Result<C64> {
    let gi = jacobi_inv(g);
    let moved = jacobi_action(&gi.complexify(), z)?;
    Ok(f(&moved) / j_chi(&gi, z, chi)?)
}

/// `B_k(a(y,0), a(v,0)) = J_χ(g⁻¹, Z)⁻¹ K_χ(g⁻¹·Z, W)` with `g = ((0,0),0,k)`.
pub fn bk_via_jacobi(k: &SuBlocks, y: &[C64], v: &[C64], chi: &CharParams) -> Result<C64> {
    let n = k.n();
    let g = JacobiGroupElt { z0: vec![ZERO; n], c: 0.0, k: k.clone() };
    let gi = jacobi_inv(&g);
    let z = JacobiPoint::flat(y.to_vec());
    let w = JacobiPoint::flat(v.to_vec());
    let moved = jacobi_action(&gi.complexify(), &z)?;
    Ok(k_chi(&moved, &w, chi)? / j_chi(&gi, &z, chi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::c;

    #[test]
    fn central_elements() {
        let a = JacobiGroupElt { z0: vec![ZERO], c: 0.4, k: SuBlocks::identity(1) };
        let b = JacobiGroupElt { z0: vec![ZERO], c: -1.1, k: SuBlocks::identity(1) };
        let p = jacobi_mul(&a, &b).unwrap();
        assert!((p.c + 0.7).abs() < 1e-15);
        let chi = CharParams::new(1.3, -1.0).unwrap();
        let z = JacobiPoint::flat(vec![c(0.3, 0.1)]);
        let v = j_chi(&a, &z, &chi).unwrap();
        assert!((v - (I * (1.3 * 0.4)).exp()).norm() < 1e-15);
    }

    #[test]
    fn identity_decomposition() {
        let g = JacobiGroupElt::identity(2).complexify();
        let f = pkp_decompose(&g).unwrap();
        assert!(f.y.iter().all(|v| v.norm() == 0.0));
        assert_eq!(f.yy.max_abs(), 0.0);
        assert_eq!(f.vv.max_abs(), 0.0);
        assert!((&f.p - &CMat::identity(2)).max_abs() == 0.0);
        assert_eq!(f.c, ZERO);
    }

    #[test]
    fn p_plus_is_fixed() {
        let yy = CMat::from_rows(1, 1, &[c(0.2, 0.1)]).unwrap();
        let g = p_plus(&[c(0.5, -0.4)], &yy);
        let f = pkp_decompose(&g).unwrap();
        assert!(f.v[0].norm() < 1e-15 && f.vv.max_abs() < 1e-15);
        assert!((f.y[0] - c(0.5, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn kernel_at_origin_and_flat_slice() {
        let chi = CharParams::new(1.0, -3.0).unwrap();
        let o = JacobiPoint::flat(vec![ZERO]);
        assert!((k_chi(&o, &o, &chi).unwrap() - 1.0).norm() < 1e-15);
        let y = vec![c(0.3, -0.2)];
        let v = vec![c(-0.1, 0.6)];
        let val = k_chi(&JacobiPoint::flat(y.clone()), &JacobiPoint::flat(v.clone()), &chi).unwrap();
        let want = crate::heisenberg::coherent_eval(&v, &y, 1.0);
        assert!((val - want).norm() < 1e-15);
    }

    #[test]
    fn squeeze_at_origin() {
        let r: f64 = 0.4;
        let k = SuBlocks::new(CMat::scalar(1, c(r.cosh(), 0.0)), CMat::scalar(1, c(r.sinh(), 0.0))).unwrap();
        for m in [-0.5, -2.0, -1.5] {
            let v = bk_via_jacobi(&k, &[ZERO], &[ZERO], &CharParams::new(1.0, m).unwrap()).unwrap();
            assert!((v - r.cosh().powf(m)).norm() < 1e-14, "m={m}: {v}");
        }
        let id = SuBlocks::identity(1);
        let y = [c(0.2, 0.3)];
        let v = [c(0.5, -0.1)];
        let val = bk_via_jacobi(&id, &y, &v, &CharParams::metaplectic(2.0)).unwrap();
        assert!((val - (y[0] * v[0].conj()).exp()).norm() < 1e-15);
    }
}
