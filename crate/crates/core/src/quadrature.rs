//! Gauss–Hermite rules and tensor-product integration over `ℝⁿ` and `ℂⁿ`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::matcore::{c, C64, ZERO};

/// Nodes and weights for `∫ f(x) e^{-x²} dx`.
#[derive(Debug, Clone)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const DEFAULT_NODES_N1: usize = 80;
pub const DEFAULT_NODES_N2: usize = 40;
pub const MAX_NODES: usize = 128;

pub fn default_nodes(n: usize) -> usize {
    if n <= 1 {
        DEFAULT_NODES_N1
    } else {
        DEFAULT_NODES_N2
    }
}

static RULES: OnceLock<Mutex<HashMap<usize, Arc<HermiteRule>>>> = OnceLock::new();

/// Cached `m`-point rule.
pub fn gauss_hermite(m: usize) -> Arc<HermiteRule> {
    assert!((1..=MAX_NODES).contains(&m), "node count must be in 1..={MAX_NODES}");
    let cache = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&m) {
        return rule.clone();
    }
    let rule = Arc::new(compute_rule(m));
    cache.lock().unwrap().entry(m).or_insert(rule).clone()
}

// Newton iteration on the orthonormal Hermite recurrence, with the usual
// asymptotic starting guesses for the largest roots.
fn compute_rule(m: usize) -> HermiteRule {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let nf = m as f64;
    let mut z = 0.0_f64;
    for i in 0..m.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[m - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[m - 1 - i] = w[i];
    }
    HermiteRule { nodes: x, weights: w }
}

/// `∫_{ℝᵈ} f(s) e^{-|s|²} ds` by a `nodes`-point rule on each axis.
pub fn integrate_hermite(dim: usize, nodes: usize, mut f: impl FnMut(&[f64]) -> C64) -> C64 {
    let rule = gauss_hermite(nodes);
    let mut idx = vec![0usize; dim];
    let mut s = vec![0.0; dim];
    let mut total = ZERO;
    loop {
        let mut wt = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            s[k] = rule.nodes[i];
            wt *= rule.weights[i];
        }
        total += f(&s) * wt;
        let mut k = 0;
        loop {
            if k == dim {
                return total;
            }
            idx[k] += 1;
            if idx[k] < nodes {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `∫_{ℂⁿ} f(w) e^{-λ|w|²/2} dμ_λ(w)`, normalized so that `f ≡ 1` gives 1.
/// Real parts of `w` occupy the first `n` real axes, imaginary parts the rest.
pub fn quadrature_cn(n: usize, lambda: f64, nodes: usize, f: impl Fn(&[C64]) -> C64) -> C64 {
    let scale = (2.0 / lambda).sqrt();
    let norm = std::f64::consts::PI.powi(-(n as i32));
    let mut w = vec![ZERO; n];
    integrate_hermite(2 * n, nodes, |s| {
        for j in 0..n {
            w[j] = c(scale * s[j], scale * s[n + j]);
        }
        f(&w)
    }) * norm
}

/// `∫_{ℝⁿ} f(x) e^{-a|x|²} dx` for `a > 0`.
pub fn integrate_rn_gaussian(n: usize, a: f64, nodes: usize, mut f: impl FnMut(&[f64]) -> C64) -> C64 {
    let scale = 1.0 / a.sqrt();
    let mut x = vec![0.0; n];
    integrate_hermite(n, nodes, |s| {
        for j in 0..n {
            x[j] = scale * s[j];
        }
        f(&x)
    }) * scale.powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_moments() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for m in [5, 20, 40, 80, 128] {
            let rule = gauss_hermite(m);
            let w: f64 = rule.weights.iter().sum();
            assert!((w - sqrt_pi).abs() < 1e-13, "m={m}: {w}");
            let x2: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| x * x * w).sum();
            assert!((x2 - sqrt_pi / 2.0).abs() < 1e-13);
            let x4: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| x.powi(4) * w).sum();
            assert!((x4 - 0.75 * sqrt_pi).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_mixing_integral() {
        // ∫ cos(x) e^{-x²} dx = √π e^{-1/4}
        let v = integrate_hermite(1, 40, |s| c(s[0].cos(), 0.0));
        assert!((v.re - std::f64::consts::PI.sqrt() * (-0.25f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn fock_normalization() {
        for lambda in [0.5, 1.0, 3.0] {
            let one = quadrature_cn(1, lambda, 30, |_| c(1.0, 0.0));
            assert!((one - 1.0).norm() < 1e-13);
            let odd = quadrature_cn(2, lambda, 10, |w| w[0]);
            assert!(odd.norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_reproducing() {
        let lambda = 1.3;
        let z = c(0.3, -0.2);
        let zp = c(-0.1, 0.4);
        let v = quadrature_cn(1, lambda, 60, |w| {
            (lambda * z.conj() * w[0] / 2.0).exp() * (lambda * w[0].conj() * zp / 2.0).exp()
        });
        let want = (lambda * z.conj() * zp / 2.0).exp();
        assert!((v - want).norm() < 1e-12);
    }

    #[test]
    fn real_gaussian_weight() {
        let v = integrate_rn_gaussian(2, 2.5, 20, |_| c(1.0, 0.0));
        assert!((v.re - std::f64::consts::PI / 2.5).abs() < 1e-13);
    }
}
