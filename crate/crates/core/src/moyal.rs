//! The Moyal product on polynomials in `(p, q)` at `t = -i/2`, star
//! exponentials of quadratic forms, and Weyl quantization of polynomials as
//! differential operators.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matcore::{self, c, CMat, C64, I, ONE};
use crate::poly::Poly;
use crate::rng;
use crate::sympgroup::SpLieReal;
use crate::weyl::{self, QuadForm2n};

/// A polynomial in `2n` variables ordered `(p₁..pₙ, q₁..qₙ)`.
pub type PhasePoly = Poly;

/// The deformation parameter.
pub const T: C64 = C64 { re: 0.0, im: -0.5 };

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn multi_factorial(a: &[u32]) -> f64 {
    a.iter().map(|&k| factorial(k)).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Exponent vectors of length `len` with entries summing to `total`.
fn compositions(len: usize, total: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(len - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Exponent vectors `β ≤ α` componentwise.
fn sub_indices(alpha: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |b| {
                    let mut v = prefix.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    out
}

fn half_vars(u: &Poly) -> usize {
    debug_assert!(u.nvars() % 2 == 0, "phase-space polynomials have 2n variables");
    u.nvars() / 2
}

/// `Pˡ(u, v) = Σ Λ^{i₁j₁}⋯Λ^{iₗjₗ} ∂ˡ_{i₁..iₗ}u ∂ˡ_{j₁..jₗ}v` with
/// `Λ^{k,n+k} = 1 = -Λ^{n+k,k}`, expanded as
/// `Σ_{|α|+|β|=l} l!/(α!β!) (-1)^{|β|} ∂_p^α∂_q^β u · ∂_q^α∂_p^β v`.
pub fn poisson_power(u: &PhasePoly, v: &PhasePoly, l: u32) -> PhasePoly {
    let n = half_vars(u);
    let mut out = Poly::zero(2 * n);
    let lf = factorial(l);
    for idx in compositions(2 * n, l) {
        let (alpha, beta) = idx.split_at(n);
        let du = u.derivative_multi(&idx);
        if du.is_zero() {
            continue;
        }
        let swapped: Vec<u32> = beta.iter().chain(alpha).copied().collect();
        let dv = v.derivative_multi(&swapped);
        if dv.is_zero() {
            continue;
        }
        let sign = if beta.iter().sum::<u32>() % 2 == 0 { 1.0 } else { -1.0 };
        let coef = sign * lf / (multi_factorial(alpha) * multi_factorial(beta));
        out = &out + &(&du * &dv).scale(c(coef, 0.0));
    }
    out
}

/// `Pˡ` by the literal sum over all `(2n)^{2l}` index tuples.
pub fn poisson_power_bruteforce(u: &PhasePoly, v: &PhasePoly, l: u32) -> PhasePoly {
    let n = half_vars(u);
    let dim = 2 * n;
    let lambda = |i: usize, j: usize| -> f64 {
        if i < n && j == i + n {
            1.0
        } else if i >= n && j + n == i {
            -1.0
        } else {
            0.0
        }
    };
    let l = l as usize;
    let mut out = Poly::zero(dim);
    let total = dim.pow(2 * l as u32);
    for code in 0..total {
        let mut rest = code;
        let mut is = Vec::with_capacity(l);
        let mut js = Vec::with_capacity(l);
        for _ in 0..l {
            is.push(rest % dim);
            rest /= dim;
        }
        for _ in 0..l {
            js.push(rest % dim);
            rest /= dim;
        }
        let w: f64 = is.iter().zip(&js).map(|(&i, &j)| lambda(i, j)).product();
        if w == 0.0 {
            continue;
        }
        let (mut du, mut dv) = (u.clone(), v.clone());
        for (&i, &j) in is.iter().zip(&js) {
            du = du.derivative(i);
            dv = dv.derivative(j);
        }
        out = &out + &(&du * &dv).scale(c(w, 0.0));
    }
    out
}

/// `u ∗ v = Σ_l tˡ/l! Pˡ(u, v)` at `t = -i/2`.
pub fn moyal_mul(u: &PhasePoly, v: &PhasePoly) -> PhasePoly {
    let top = u.degree().unwrap_or(0).min(v.degree().unwrap_or(0));
    let mut out = Poly::zero(u.nvars());
    for l in 0..=top {
        let coef = T.powu(l) / factorial(l);
        out = &out + &poisson_power(u, v, l).scale(coef);
    }
    out
}

/// The quadratic polynomial `s·q_M`.
pub fn quad_form_poly(q: &QuadForm2n, s: C64) -> PhasePoly {
    let dim = 2 * q.n;
    let mut out = Poly::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut e = vec![0; dim];
            e[i] += 1;
            e[j] += 1;
            out.add_term(e, q.m.get(i, j) * s);
        }
    }
    out.pruned(0.0)
}

/// Partial sum of `exp_∗` and the size of its last term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    pub last_term: f64,
}

pub const SERIES_MAX_NORM: f64 = 0.25;
pub const SERIES_MAX_POINT: f64 = 1.5;
pub const SERIES_MAX_ORDER: usize = 60;

/// `Σ_{l ≤ L} (s q_M)^{∗l}(v)/l!`.
pub fn star_exp_series(q: &QuadForm2n, s: C64, order: usize, point: &[f64]) -> Result<SeriesValue> {
    if point.len() != 2 * q.n {
        return Err(Error::Shape(format!("point has {} coordinates, expected {}", point.len(), 2 * q.n)));
    }
    let size = q.m.norm() * s.norm();
    if size > SERIES_MAX_NORM {
        return Err(Error::BadConfig(format!("‖sM‖ = {size:.3} exceeds {SERIES_MAX_NORM}")));
    }
    let r = point.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r > SERIES_MAX_POINT {
        return Err(Error::BadConfig(format!("|point| = {r:.3} exceeds {SERIES_MAX_POINT}")));
    }
    if order > SERIES_MAX_ORDER {
        return Err(Error::BadConfig(format!("order {order} exceeds {SERIES_MAX_ORDER}")));
    }
    let f = quad_form_poly(q, s);
    let v: Vec<C64> = point.iter().map(|x| c(*x, 0.0)).collect();
    let mut term = Poly::one(2 * q.n);
    let mut value = ONE;
    let mut last = 1.0;
    for l in 1..=order {
        term = moyal_mul(&term, &f).scale(c(1.0 / l as f64, 0.0));
        let t = term.eval(&v);
        value += t;
        last = t.norm();
    }
    if order > 0 && last > 1e-10 * value.norm() {
        return Err(Error::NonConvergent { last_term: last, partial: value.norm() });
    }
    Ok(SeriesValue { value, last_term: if order == 0 { 0.0 } else { last } })
}

/// `exp_∗(-i q_M)(v) = det(cosh(JM))^{-1/2} exp(i vᵗ J tanh(JM) v)` for a
/// complex symmetric `M`, the root continued from `M = 0`.
pub fn star_exp_closed_matrix(m: &CMat, point: &[f64]) -> Result<C64> {
    let n = m.rows() / 2;
    let jm = &CMat::j(n) * m;
    let root = matcore::det_sqrt_even_fn_hamiltonian(&jm, |mu| mu.cosh())?;
    if root.norm() <= 1e-14 {
        return Err(Error::SingularMatrix { cond: f64::INFINITY });
    }
    let th = matcore::mat_tanh(&jm)?;
    let v: Vec<C64> = point.iter().map(|x| c(*x, 0.0)).collect();
    Ok(((&CMat::j(n) * &th).bilinear(&v, &v) * I).exp() / root)
}

/// `exp_∗(-i q_M)` at `v`.
pub fn star_exp_quadratic_closed(q: &QuadForm2n, point: &[f64]) -> Result<C64> {
    star_exp_closed_matrix(&q.m, point)
}

/// `exp_∗(s q_M)`, through `s q_M = -i q_{isM}`.
pub fn star_exp_closed_scaled(q: &QuadForm2n, s: C64, point: &[f64]) -> Result<C64> {
    star_exp_closed_matrix(&q.m.scale(I * s), point)
}

/// Series against the two candidate normalizations of
/// `exp_∗(-it(|x|² + |y|²))`: `(cos t)^{-n}` from the determinant and
/// `(cos t)^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicReport {
    pub series: C64,
    pub det_normalized: C64,
    pub half_normalized: C64,
    pub det_rel_error: f64,
    pub half_rel_error: f64,
}

pub fn harmonic_oscillator_check(n: usize, t: f64, point: &[f64], order: usize) -> Result<HarmonicReport> {
    let q = QuadForm2n::new(CMat::identity(2 * n))?;
    let series = star_exp_series(&q, c(0.0, -t), order, point)?.value;
    let r2: f64 = point.iter().map(|x| x * x).sum();
    let phase = c(0.0, -t.tan() * r2).exp();
    let det_normalized = phase / t.cos().powi(n as i32);
    let half_normalized = phase / t.cos().sqrt();
    let rel = |a: C64| (a - series).norm() / series.norm();
    Ok(HarmonicReport {
        series,
        det_normalized,
        half_normalized,
        det_rel_error: rel(det_normalized),
        half_rel_error: rel(half_normalized),
    })
}

/// `Σ c_β(p) ∂^β` acting on functions of `p ∈ ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp {
    n: usize,
    terms: BTreeMap<Vec<u32>, Poly>,
}

impl DiffOp {
    pub fn zero(n: usize) -> Self {
        DiffOp { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::multiplication(Poly::one(n))
    }

    pub fn multiplication(f: Poly) -> Self {
        let mut d = DiffOp::zero(f.nvars());
        d.add_term(vec![0; f.nvars()], f);
        d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Poly> {
        &self.terms
    }

    pub fn coeff(&self, beta: &[u32]) -> Poly {
        self.terms.get(beta).cloned().unwrap_or_else(|| Poly::zero(self.n))
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|b| b.iter().sum()).max()
    }

    pub fn add_term(&mut self, beta: Vec<u32>, f: Poly) {
        if f.is_zero() {
            return;
        }
        match self.terms.entry(beta) {
            Entry::Vacant(e) => {
                e.insert(f);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &f;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = DiffOp::zero(self.n);
        for (b, f) in &self.terms {
            out.add_term(b.clone(), f.scale(s));
        }
        out
    }

    /// Largest coefficient deviation over all terms.
    pub fn max_coeff_diff(&self, other: &DiffOp) -> f64 {
        let mut worst: f64 = 0.0;
        for b in self.terms.keys().chain(other.terms.keys()) {
            worst = worst.max(self.coeff(b).max_coeff_diff(&other.coeff(b)));
        }
        worst
    }
}

/// `W(u(p)q^α)φ = (i∂_s)^α(u(p + s/2)φ(p + s))|_{s=0}`, expanded by Leibniz:
/// `i^{|α|} Σ_{β≤α} C(α,β) 2^{-|α-β|} (∂^{α-β}u) ∂^β`.
pub fn weyl_quantize_poly(f: &PhasePoly) -> DiffOp {
    let n = half_vars(f);
    let mut out = DiffOp::zero(n);
    for (e, coef) in f.terms() {
        let (gamma, alpha) = e.split_at(n);
        let u = Poly::monomial(gamma.to_vec(), *coef);
        let ia = I.powu(alpha.iter().sum());
        for beta in sub_indices(alpha) {
            let rest: Vec<u32> = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
            let binom: f64 = alpha.iter().zip(&beta).map(|(&a, &b)| binomial(a, b)).product();
            let w = binom * 0.5f64.powi(rest.iter().sum::<u32>() as i32);
            out.add_term(beta, u.derivative_multi(&rest).scale(ia * w));
        }
    }
    out
}

/// `D₁ ∘ D₂`, moving derivatives of `D₁` through the coefficients of `D₂`.
pub fn diffop_compose(d1: &DiffOp, d2: &DiffOp) -> DiffOp {
    let mut out = DiffOp::zero(d1.n);
    for (beta, a) in &d1.terms {
        for (gamma, b) in &d2.terms {
            for delta in sub_indices(beta) {
                let binom: f64 = beta.iter().zip(&delta).map(|(&x, &y)| binomial(x, y)).product();
                let db = b.derivative_multi(&delta);
                if db.is_zero() {
                    continue;
                }
                let idx: Vec<u32> = beta.iter().zip(&delta).zip(gamma).map(|((x, y), g)| x - y + g).collect();
                out.add_term(idx, (a * &db).scale(c(binom, 0.0)));
            }
        }
    }
    out
}

pub fn diffop_apply(d: &DiffOp, phi: &Poly) -> Poly {
    let mut out = Poly::zero(d.n);
    for (beta, a) in &d.terms {
        out = &out + &(a * &phi.derivative_multi(beta));
    }
    out
}

/// Max coefficient deviation between `W(f₁ ∗ f₂)` and `W(f₁)W(f₂)`.
pub fn homomorphism_residual(f1: &PhasePoly, f2: &PhasePoly) -> f64 {
    let lhs = weyl_quantize_poly(&moyal_mul(f1, f2));
    let rhs = diffop_compose(&weyl_quantize_poly(f1), &weyl_quantize_poly(f2));
    lhs.max_coeff_diff(&rhs)
}

/// `|exp_∗(-i q_M)(v) - W₁(σ'(exp X))(v)|` with `M = ½JX`.
pub fn star_exp_bridge_residual(x: &SpLieReal, point: &[f64]) -> Result<f64> {
    let n = x.n();
    let q = QuadForm2n::from_sp_lie(x);
    let a = star_exp_quadratic_closed(&q, point)?;
    let b = weyl::w1_exp_closed(x, &point[..n], &point[n..], 1.0)?;
    Ok((a - b).norm())
}

/// Every monomial of total degree at most `deg` in `2n` variables, with
/// coefficients uniform in the unit square.
pub fn random_phase_poly(n: usize, deg: u32, seed: u64) -> PhasePoly {
    let mut r = rng::stream(seed, "phase-poly");
    let mut p = Poly::zero(2 * n);
    for d in 0..=deg {
        for e in compositions(2 * n, d) {
            p.add_term(e, c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        }
    }
    p
}

/// Real symmetric `2n × 2n` matrix scaled to Frobenius norm `norm`.
pub fn random_quad_form(n: usize, seed: u64, norm: f64) -> QuadForm2n {
    let mut r = rng::stream(seed, "quad-form");
    let m = CMat::from_fn(2 * n, 2 * n, |_, _| c(r.gen_range(-1.0..1.0), 0.0)).symmetrized();
    let m = m.scale_re(norm / m.norm().max(1e-300));
    QuadForm2n { n, m }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, k: usize) -> Poly {
        Poly::var(2 * n, k)
    }

    fn q(n: usize, k: usize) -> Poly {
        Poly::var(2 * n, n + k)
    }

    #[test]
    fn bracket_values() {
        assert_eq!(poisson_power(&p(1, 0), &q(1, 0), 1), Poly::one(2));
        assert_eq!(poisson_power(&q(1, 0), &p(1, 0), 1), Poly::one(2).scale(-ONE));
        let p2 = &p(1, 0) * &p(1, 0);
        let q2 = &q(1, 0) * &q(1, 0);
        let v = poisson_power(&p2, &q2, 2);
        assert_eq!(v, Poly::constant(2, c(4.0, 0.0)));
        assert_eq!(v, poisson_power(&q2, &p2, 2));
        assert!(poisson_power(&p2, &q2, 3).is_zero());
    }

    #[test]
    fn bruteforce_agrees() {
        for seed in 0..4 {
            let u = random_phase_poly(2, 3, seed);
            let v = random_phase_poly(2, 3, seed + 100);
            for l in 0..=3 {
                let a = poisson_power(&u, &v, l);
                let b = poisson_power_bruteforce(&u, &v, l);
                assert!(a.max_coeff_diff(&b) < 1e-12, "seed {seed} l {l}");
            }
        }
    }

    #[test]
    fn star_commutator() {
        for n in [1, 2] {
            for j in 0..n {
                for k in 0..n {
                    let comm = &moyal_mul(&p(n, j), &q(n, k)) - &moyal_mul(&q(n, k), &p(n, j));
                    let want = if j == k { Poly::constant(2 * n, -I) } else { Poly::zero(2 * n) };
                    assert_eq!(comm, want);
                }
            }
        }
        let u = random_phase_poly(1, 3, 7);
        assert_eq!(moyal_mul(&Poly::one(2), &u), u);
    }

    #[test]
    fn associativity() {
        for seed in 0..5 {
            let u = random_phase_poly(1, 3, seed);
            let v = random_phase_poly(1, 3, seed + 10);
            let w = random_phase_poly(1, 3, seed + 20);
            let a = moyal_mul(&moyal_mul(&u, &v), &w);
            let b = moyal_mul(&u, &moyal_mul(&v, &w));
            assert!(a.max_coeff_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn quantization_examples() {
        let w = weyl_quantize_poly(&p(1, 0));
        assert_eq!(w, DiffOp::multiplication(Poly::var(1, 0)));
        let w = weyl_quantize_poly(&q(1, 0));
        let mut want = DiffOp::zero(1);
        want.add_term(vec![1], Poly::constant(1, I));
        assert_eq!(w, want);
        let w = weyl_quantize_poly(&(&p(1, 0) * &q(1, 0)));
        let mut want = DiffOp::zero(1);
        want.add_term(vec![1], Poly::var(1, 0).scale(I));
        want.add_term(vec![0], Poly::constant(1, I * 0.5));
        assert_eq!(w, want);

        let phi = &Poly::var(1, 0) * &Poly::var(1, 0);
        let comm = &diffop_apply(&diffop_compose(&weyl_quantize_poly(&p(1, 0)), &weyl_quantize_poly(&q(1, 0))), &phi)
            - &diffop_apply(&diffop_compose(&weyl_quantize_poly(&q(1, 0)), &weyl_quantize_poly(&p(1, 0))), &phi);
        assert_eq!(comm, phi.scale(-I));
        let id = DiffOp::identity(1);
        assert_eq!(diffop_compose(&id, &w), w);
        assert_eq!(diffop_compose(&w, &id), w);
    }

    #[test]
    fn homomorphism() {
        let p2 = &p(1, 0) * &p(1, 0);
        let q2 = &q(1, 0) * &q(1, 0);
        assert!(homomorphism_residual(&p2, &q2) < 1e-12);
        for seed in 0..10 {
            let n = 1 + (seed as usize % 2);
            let u = random_phase_poly(n, 3, seed);
            let v = random_phase_poly(n, 3, seed + 50);
            assert!(homomorphism_residual(&u, &v) < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn star_exponential() {
        let q0 = random_quad_form(1, 1, 0.2);
        let s0 = star_exp_series(&q0, matcore::ZERO, 10, &[0.5, 0.5]).unwrap();
        assert_eq!(s0.value, ONE);

        let rep = harmonic_oscillator_check(1, 0.15, &[0.8, -0.3], 40).unwrap();
        assert!(rep.det_rel_error < 1e-7, "{rep:?}");
        assert!(rep.half_rel_error > 1e-3, "{rep:?}");

        for seed in 0..5 {
            let qf = random_quad_form(1, seed, 0.2);
            let pt = [0.9, -0.6];
            let s = star_exp_series(&qf, -I, 40, &pt).unwrap();
            let closed = star_exp_quadratic_closed(&qf, &pt).unwrap();
            assert!((s.value - closed).norm() / closed.norm() < 1e-6);
            let s30 = star_exp_series(&qf, -I, 30, &pt).unwrap();
            assert!((s.value - s30.value).norm() < 1e-9);
        }
        assert!(matches!(star_exp_series(&q0, c(2.0, 0.0), 10, &[0.1, 0.1]), Err(Error::BadConfig(_))));
    }

    #[test]
    fn hormander_via_series() {
        let qf = random_quad_form(1, 3, 0.2);
        let pt = [0.4, 0.7];
        let s = star_exp_series(&qf, ONE, 40, &pt).unwrap();
        let h = weyl::hormander_exp_symbol(&qf, &pt[..1], &pt[1..]).unwrap();
        assert!((s.value - h).norm() / h.norm() < 1e-8);
        let closed = star_exp_closed_scaled(&qf, ONE, &pt).unwrap();
        assert!((closed - h).norm() < 1e-12);
    }

    #[test]
    fn bridge() {
        assert!(star_exp_bridge_residual(&SpLieReal::zero(1), &[0.3, 0.2]).unwrap() < 1e-15);
        for seed in 0..5 {
            let x = crate::sympgroup::random_sp_lie(1, seed, 0.3);
            assert!(star_exp_bridge_residual(&x, &[0.5, -0.4]).unwrap() < 1e-8);
        }
    }
}
