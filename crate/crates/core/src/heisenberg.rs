//! The Heisenberg group in its Fock and Schrödinger models, coherent states,
//! the Bargmann transform, the parity quantizers `Ω₀`, `Ω₁`, and the trace
//! formula for the classical Weyl calculus.

use crate::matcore::{self, c, C64, I, ZERO};
use crate::quadrature;

/// `((z₀, z̄₀), c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisElt {
    pub z0: Vec<C64>,
    pub c: f64,
}

impl HeisElt {
    pub fn new(z0: Vec<C64>, c: f64) -> Self {
        HeisElt { z0, c }
    }

    pub fn identity(n: usize) -> Self {
        HeisElt { z0: vec![ZERO; n], c: 0.0 }
    }

    /// The element `((a + ib, a - ib), c)` of the Schrödinger model.
    pub fn from_real(a: &[f64], b: &[f64], c0: f64) -> Self {
        HeisElt { z0: a.iter().zip(b).map(|(x, y)| c(*x, *y)).collect(), c: c0 }
    }

    pub fn n(&self) -> usize {
        self.z0.len()
    }

    pub fn a(&self) -> Vec<f64> {
        self.z0.iter().map(|z| z.re).collect()
    }

    pub fn b(&self) -> Vec<f64> {
        self.z0.iter().map(|z| z.im).collect()
    }
}

/// `ω((z,w),(z',w')) = (i/2)(zw' - z'w)`.
pub fn omega(z: &[C64], w: &[C64], zp: &[C64], wp: &[C64]) -> C64 {
    (matcore::dot(z, wp) - matcore::dot(zp, w)) * (I * 0.5)
}

pub fn heis_mul(h1: &HeisElt, h2: &HeisElt) -> HeisElt {
    let w = omega(&h1.z0, &matcore::conj_vec(&h1.z0), &h2.z0, &matcore::conj_vec(&h2.z0));
    HeisElt { z0: matcore::add_vec(&h1.z0, &h2.z0), c: h1.c + h2.c + 0.5 * w.re }
}

pub fn heis_inv(h: &HeisElt) -> HeisElt {
    HeisElt { z0: h.z0.iter().map(|z| -z).collect(), c: -h.c }
}

/// `(ρ_λ(h)f)(z) = exp(iλc₀ + (λ/2) z̄₀z - (λ/4)|z₀|²) f(z - z₀)`.
pub fn rho_fock_apply(h: &HeisElt, f: impl Fn(&[C64]) -> C64, z: &[C64], lambda: f64) -> C64 {
    let z0b = matcore::conj_vec(&h.z0);
    let e = I * (lambda * h.c) + matcore::dot(&z0b, z) * (lambda / 2.0)
        - lambda / 4.0 * matcore::norm_sqr(&h.z0);
    e.exp() * f(&matcore::sub_vec(z, &h.z0))
}

/// `(ρ'_λ(h)φ)(x) = exp(iλ(c - bx + ab/2)) φ(x - a)`.
pub fn rho_schrod_apply(h: &HeisElt, phi: impl Fn(&[f64]) -> C64, x: &[f64], lambda: f64) -> C64 {
    let (a, b) = (h.a(), h.b());
    let bx: f64 = b.iter().zip(x).map(|(u, v)| u * v).sum();
    let ab: f64 = a.iter().zip(&b).map(|(u, v)| u * v).sum();
    let shifted: Vec<f64> = x.iter().zip(&a).map(|(u, v)| u - v).collect();
    (I * (lambda * (h.c - bx + 0.5 * ab))).exp() * phi(&shifted)
}

/// `e_z(w) = exp(λ z̄ w / 2)`.
pub fn coherent_eval(z: &[C64], w: &[C64], lambda: f64) -> C64 {
    (matcore::dot(&matcore::conj_vec(z), w) * (lambda / 2.0)).exp()
}

/// `(𝓑φ)(z) = (λ/π)^{n/4} ∫ exp(-(λ/4)z² + λzx - (λ/2)x²) φ(x) dx` by
/// Gauss–Hermite quadrature against the `e^{-(λ/2)x²}` factor.
pub fn bargmann_apply(phi: impl Fn(&[f64]) -> C64, z: &[C64], lambda: f64, nodes: usize) -> C64 {
    let n = z.len();
    let pre = (lambda / std::f64::consts::PI).powf(n as f64 / 4.0);
    let zz = matcore::dot(z, z) * (-lambda / 4.0);
    quadrature::integrate_rn_gaussian(n, lambda / 2.0, nodes, |x| {
        let zx: C64 = z.iter().zip(x).map(|(a, b)| a * b).sum();
        (zz + zx * lambda).exp() * phi(x)
    }) * pre
}

/// `(Ω₀(z)f)(w) = 2ⁿ exp(λ(w z̄ - |z|²)) f(2z - w)`.
pub fn omega0_apply(z: &[C64], f: impl Fn(&[C64]) -> C64, w: &[C64], lambda: f64) -> C64 {
    let n = z.len();
    let e = (matcore::dot(w, &matcore::conj_vec(z)) - matcore::norm_sqr(z)) * lambda;
    let arg: Vec<C64> = z.iter().zip(w).map(|(a, b)| a * 2.0 - b).collect();
    e.exp() * f(&arg) * 2f64.powi(n as i32)
}

/// `(R₀f)(z) = 2ⁿ f(-z)`.
pub fn parity_fock_apply(f: impl Fn(&[C64]) -> C64, z: &[C64]) -> C64 {
    let neg: Vec<C64> = z.iter().map(|v| -v).collect();
    f(&neg) * 2f64.powi(z.len() as i32)
}

/// `(Ω₁(a,b)φ)(x) = 2ⁿ exp(2iλ b(a - x)) φ(2a - x)`.
pub fn omega1_apply(a: &[f64], b: &[f64], phi: impl Fn(&[f64]) -> C64, x: &[f64], lambda: f64) -> C64 {
    let n = a.len();
    let phase: f64 = b.iter().zip(a.iter().zip(x)).map(|(bb, (aa, xx))| bb * (aa - xx)).sum();
    let arg: Vec<f64> = a.iter().zip(x).map(|(aa, xx)| 2.0 * aa - xx).collect();
    (I * (2.0 * lambda * phase)).exp() * phi(&arg) * 2f64.powi(n as i32)
}

/// `(R₁φ)(x) = 2ⁿ φ(-x)`.
pub fn parity_schrod_apply(phi: impl Fn(&[f64]) -> C64, x: &[f64]) -> C64 {
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    phi(&neg) * 2f64.powi(x.len() as i32)
}

/// `s(z,w) = K(z,w) / ⟨e_w, e_z⟩`.
pub fn berezin_double_symbol(
    kernel: impl Fn(&[C64], &[C64]) -> C64,
    z: &[C64],
    w: &[C64],
    lambda: f64,
) -> C64 {
    kernel(z, w) / coherent_eval(w, z, lambda)
}

/// `|ρ_λ(h₁)ρ_λ(h₂)f - ρ_λ(h₁h₂)f|` at `z`.
pub fn rho_fock_homomorphism_residual(
    h1: &HeisElt,
    h2: &HeisElt,
    f: impl Fn(&[C64]) -> C64,
    z: &[C64],
    lambda: f64,
) -> f64 {
    let lhs = rho_fock_apply(h1, |u| rho_fock_apply(h2, &f, u, lambda), z, lambda);
    let rhs = rho_fock_apply(&heis_mul(h1, h2), &f, z, lambda);
    (lhs - rhs).norm()
}

/// `|ρ'_λ(h₁)ρ'_λ(h₂)φ - ρ'_λ(h₁h₂)φ|` at `x`.
pub fn rho_schrod_homomorphism_residual(
    h1: &HeisElt,
    h2: &HeisElt,
    phi: impl Fn(&[f64]) -> C64,
    x: &[f64],
    lambda: f64,
) -> f64 {
    let lhs = rho_schrod_apply(h1, |u| rho_schrod_apply(h2, &phi, u, lambda), x, lambda);
    let rhs = rho_schrod_apply(&heis_mul(h1, h2), &phi, x, lambda);
    (lhs - rhs).norm()
}

/// `|∫ f(w) conj(e_z(w)) e^{-λ|w|²/2} dμ_λ(w) - f(z)|`.
pub fn reproducing_residual(f: impl Fn(&[C64]) -> C64, z: &[C64], lambda: f64, nodes: usize) -> f64 {
    let v = quadrature::quadrature_cn(z.len(), lambda, nodes, |w| f(w) * coherent_eval(z, w, lambda).conj());
    (v - f(z)).norm()
}

/// `|𝓑(ρ'_λ(h)φ)(z) - ρ_λ(h)(𝓑φ)(z)|` for the Hermite function `φ = h_j`.
pub fn bargmann_intertwining_residual(h: &HeisElt, j: &[u32], z: &[C64], lambda: f64, nodes: usize) -> f64 {
    let phi = |x: &[f64]| c(hermite_function(j, x, lambda), 0.0);
    let lhs = bargmann_apply(|x| rho_schrod_apply(h, phi, x, lambda), z, lambda, nodes);
    let rhs = rho_fock_apply(h, |u| bargmann_apply(phi, u, lambda, nodes), z, lambda);
    (lhs - rhs).norm()
}

/// Physicists' Hermite polynomial `H_j(s)`.
pub fn hermite_poly(j: u32, s: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * s);
    if j == 0 {
        return h0;
    }
    for k in 1..j {
        let h2 = 2.0 * s * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Normalized Hermite function of multi-order `j`, scaled so that order 0 is
/// the ground state `(λ/π)^{n/4} e^{-λx²/2}`.
pub fn hermite_function(j: &[u32], x: &[f64], lambda: f64) -> f64 {
    let sl = lambda.sqrt();
    j.iter()
        .zip(x)
        .map(|(&order, &xi)| {
            let s = sl * xi;
            let fact: f64 = (1..=order).map(|k| k as f64).product();
            let norm = (2f64.powi(order as i32) * fact * std::f64::consts::PI.sqrt()).sqrt();
            lambda.powf(0.25) * hermite_poly(order, s) * (-s * s / 2.0).exp() / norm
        })
        .product()
}

/// `Tr(Ω₁(a,b) 𝓦(f))` for `n = 1` by the Mercer diagonal integral. The
/// partial Fourier transform of the kernel of `𝓦(f)` uses Gauss–Hermite
/// nodes against `e^{-t²}`, so `f(x,t) e^{t²}` should be a low-degree
/// polynomial in `t`; the diagonal integral is a trapezoid rule on `|x - a| ≤ 8`.
pub fn w1_of_classical_weyl(f: impl Fn(f64, f64) -> C64, a: f64, b: f64, lambda: f64, nodes: usize) -> C64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    // (𝓕₂f)(x, y) = (2π)^{-1/2} ∫ e^{-iyt} f(x,t) dt
    let f2 = |x: f64, y: f64| -> C64 {
        quadrature::integrate_rn_gaussian(1, 1.0, nodes, |t| {
            (I * (-y * t[0])).exp() * f(x, t[0]) * (t[0] * t[0]).exp()
        }) / two_pi.sqrt()
    };
    // k_𝓦(f)(x, y) = (2π)^{-1/2} (𝓕₂f)((x+y)/2, x-y)
    let kernel = |x: f64, y: f64| f2(0.5 * (x + y), x - y) / two_pi.sqrt();
    const HALF_WIDTH: f64 = 8.0;
    const STEPS: usize = 256;
    let h = 2.0 * HALF_WIDTH / STEPS as f64;
    let mut trace = ZERO;
    for i in 0..=STEPS {
        let x = a - HALF_WIDTH + h * i as f64;
        let w = if i == 0 || i == STEPS { 0.5 * h } else { h };
        trace += (I * (2.0 * lambda * b * (a - x))).exp() * kernel(2.0 * a - x, x) * w;
    }
    trace * 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law_examples() {
        let h = heis_mul(&HeisElt::new(vec![ZERO], 1.5), &HeisElt::new(vec![ZERO], -0.25));
        assert_eq!(h, HeisElt::new(vec![ZERO], 1.25));
        let z = vec![c(0.3, -0.7)];
        let h = heis_mul(&HeisElt::new(z.clone(), 0.0), &HeisElt::new(vec![-z[0]], 0.0));
        assert!(h.z0[0].norm() == 0.0 && h.c.abs() < 1e-16);
    }

    #[test]
    fn identity_actions() {
        let f = |z: &[C64]| z[0] * z[0] + 1.0;
        let z = [c(0.2, 0.4)];
        assert_eq!(rho_fock_apply(&HeisElt::identity(1), f, &z, 1.0), f(&z));
        let phi = |x: &[f64]| c((-x[0] * x[0]).exp(), 0.0);
        assert_eq!(rho_schrod_apply(&HeisElt::identity(1), phi, &[0.3], 2.0), phi(&[0.3]));
        let h = HeisElt::from_real(&[0.0], &[0.7], 0.0);
        let v = rho_schrod_apply(&h, phi, &[0.3], 2.0);
        assert!((v - (I * (-2.0 * 0.7 * 0.3)).exp() * phi(&[0.3])).norm() < 1e-15);
    }

    #[test]
    fn coherent_state_symmetry() {
        let z = [c(0.4, -0.1), c(-0.3, 0.2)];
        let w = [c(0.1, 0.5), c(0.6, -0.2)];
        assert_eq!(coherent_eval(&[ZERO, ZERO], &w, 1.3), c(1.0, 0.0));
        assert!((coherent_eval(&z, &w, 1.3) - coherent_eval(&w, &z, 1.3).conj()).norm() < 1e-15);
    }

    #[test]
    fn ground_state_maps_to_one() {
        for lambda in [0.7, 1.0, 2.5] {
            for z in [c(0.0, 0.0), c(0.4, -0.3), c(-1.0, 0.8)] {
                let v = bargmann_apply(|x| c(hermite_function(&[0], x, lambda), 0.0), &[z], lambda, 40);
                assert!((v - 1.0).norm() < 1e-12, "λ={lambda} z={z}: {v}");
            }
        }
    }

    #[test]
    fn parity_quantizer_at_origin() {
        let f = |z: &[C64]| z[0].powi(3) + z[0];
        let w = [c(0.3, 0.2)];
        let v = omega0_apply(&[ZERO], f, &w, 1.0);
        assert!((v - parity_fock_apply(f, &w)).norm() < 1e-15);
        let phi = |x: &[f64]| c(x[0].powi(2) - x[0], 0.0);
        let v = omega1_apply(&[0.0], &[0.0], phi, &[0.4], 1.0);
        assert!((v - parity_schrod_apply(phi, &[0.4])).norm() < 1e-15);
    }

    #[test]
    fn hermite_orthonormal() {
        for (j, k) in [(0u32, 0u32), (1, 1), (2, 2), (4, 4), (1, 3), (2, 4)] {
            let v = quadrature::integrate_rn_gaussian(1, 1.7, 20, |x| {
                c(hermite_function(&[j], x, 1.7) * hermite_function(&[k], x, 1.7) * (1.7 * x[0] * x[0]).exp(), 0.0)
            });
            let want = if j == k { 1.0 } else { 0.0 };
            assert!((v.re - want).abs() < 1e-12, "({j},{k}): {v}");
        }
    }

    #[test]
    fn representation_properties() {
        let h1 = HeisElt::new(vec![c(0.3, -0.2), c(0.1, 0.4)], 0.7);
        let h2 = HeisElt::new(vec![c(-0.5, 0.1), c(0.2, 0.3)], -0.2);
        let f = |z: &[C64]| z[0] * z[1] + z[0] * z[0] * 0.5 + 1.0;
        let z = [c(0.2, 0.1), c(-0.4, 0.3)];
        assert!(rho_fock_homomorphism_residual(&h1, &h2, f, &z, 1.3) < 1e-14);
        let phi = |x: &[f64]| c((-x[0] * x[0] - 0.5 * x[1] * x[1]).exp(), x[0]);
        assert!(rho_schrod_homomorphism_residual(&h1, &h2, phi, &[0.3, -0.6], 1.3) < 1e-14);
        assert!(reproducing_residual(f, &z, 1.3, 30) < 1e-10);
    }

    #[test]
    fn bargmann_intertwines() {
        let h = HeisElt::from_real(&[0.4], &[-0.3], 0.25);
        for j in 0..4 {
            let r = bargmann_intertwining_residual(&h, &[j], &[c(0.3, 0.5)], 1.0, 60);
            assert!(r < 1e-10, "j={j}: {r}");
        }
    }

    #[test]
    fn trace_formula_gaussian() {
        let f = |x: f64, t: f64| c((-x * x - t * t).exp(), 0.0);
        let v = w1_of_classical_weyl(f, 0.0, 0.0, 1.0, 96);
        assert!((v - 1.0).norm() < 1e-10, "{v}");
    }
}
