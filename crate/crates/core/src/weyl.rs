//! Complex and classical Weyl symbols of metaplectic operators, the Berezin
//! transform on Gaussians and the phase constants `c_n`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gaussint::GaussianKernel;
use crate::matcore::{self, c, CMat, C64, ZERO};
use crate::metaplectic;
use crate::quadrature;
use crate::rng;
use crate::sympgroup::{self, SpLieReal, SpReal, SuBlocks, SuLie};

/// `v ↦ γ exp(vᵗSv)` on `ℝ²ⁿ`, `v = (x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSymbol {
    pub n: usize,
    pub gamma: C64,
    pub s: CMat,
}

impl GaussianSymbol {
    pub fn new(gamma: C64, s: CMat) -> Result<Self> {
        s.check_square("GaussianSymbol")?;
        if s.rows() % 2 != 0 {
            return Err(Error::Shape("Gaussian symbol needs an even-sized matrix".into()));
        }
        let tol = 1e-10 * (1.0 + s.norm());
        if s.symmetry_residual() > tol {
            return Err(Error::Shape("Gaussian symbol matrix must be symmetric".into()));
        }
        Ok(GaussianSymbol { n: s.rows() / 2, gamma, s: s.symmetrized() })
    }

    pub fn constant(n: usize, gamma: C64) -> Self {
        GaussianSymbol { n, gamma, s: CMat::zeros(2 * n, 2 * n) }
    }

    /// From `γ exp((z, z̄) K (z, z̄)ᵗ)`, using `(z, z̄)ᵗ = U(x, y)ᵗ`.
    pub fn from_complex_form(gamma: C64, k: &CMat) -> Result<Self> {
        k.check_square("GaussianSymbol")?;
        let u = CMat::u(k.rows() / 2);
        Self::new(gamma, (&(&u.transpose() * k) * &u).symmetrized())
    }

    pub fn eval(&self, v: &[f64]) -> C64 {
        let vc: Vec<C64> = v.iter().map(|x| c(*x, 0.0)).collect();
        self.gamma * self.s.bilinear(&vc, &vc).exp()
    }

    /// Value at `z = x + iy`.
    pub fn eval_z(&self, z: &[C64]) -> C64 {
        self.eval(&split(z))
    }
}

/// Real symmetric `M` defining `q_M(v) = vᵗMv`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadForm2n {
    pub n: usize,
    pub m: CMat,
}

impl QuadForm2n {
    pub fn new(m: CMat) -> Result<Self> {
        m.check_square("QuadForm2n")?;
        if m.rows() % 2 != 0 {
            return Err(Error::Shape("quadratic form needs an even-sized matrix".into()));
        }
        let tol = 1e-12 * (1.0 + m.norm());
        if m.max_imag() > tol || m.symmetry_residual() > tol {
            return Err(Error::Shape("quadratic form matrix must be real symmetric".into()));
        }
        Ok(QuadForm2n { n: m.rows() / 2, m: m.re().symmetrized() })
    }

    /// `M = ½JX`, the form whose Weyl symbol is that of `i dσ'(X)`.
    pub fn from_sp_lie(x: &SpLieReal) -> Self {
        let m = (&CMat::j(x.n()) * &x.matrix()).scale_re(0.5).symmetrized();
        QuadForm2n { n: x.n(), m }
    }

    pub fn eval(&self, v: &[C64]) -> C64 {
        self.m.bilinear(v, v)
    }
}

fn split(z: &[C64]) -> Vec<f64> {
    z.iter().map(|w| w.re).chain(z.iter().map(|w| w.im)).collect()
}

fn real_vec(x: &[f64], y: &[f64]) -> Vec<C64> {
    x.iter().chain(y).map(|t| c(*t, 0.0)).collect()
}

/// `∫_{ℂⁿ} f(w) dμ_λ(w)` by Gauss-Hermite with weight `e^{-a|w|²}`;
/// `f` must decay roughly like that weight.
fn integrate_cn_scaled(n: usize, lambda: f64, a: f64, nodes: usize, f: impl Fn(&[C64]) -> C64) -> C64 {
    let scale = 1.0 / a.sqrt();
    let pref = (lambda / (2.0 * std::f64::consts::PI * a)).powi(n as i32);
    let mut w = vec![ZERO; n];
    quadrature::integrate_hermite(2 * n, nodes, |s| {
        let mut r2 = 0.0;
        for j in 0..n {
            w[j] = c(scale * s[j], scale * s[n + j]);
            r2 += s[j] * s[j] + s[n + j] * s[n + j];
        }
        f(&w) * r2.exp()
    }) * pref
}

/// `W₀(A)(z) = 2ⁿ∫ k_A(z+w, z-w) exp((λ/2)(-zz̄ - ww̄ + zw̄ - z̄w)) dμ_λ(w)`.
pub fn w0_integral(kernel: impl Fn(&[C64], &[C64]) -> C64, z: &[C64], lambda: f64, nodes: usize) -> C64 {
    w0_integral_weighted(kernel, z, lambda, lambda / 2.0, nodes)
}

/// As [`w0_integral`], with Gauss-Hermite weight `e^{-a|w|²}`.
pub fn w0_integral_weighted(
    kernel: impl Fn(&[C64], &[C64]) -> C64,
    z: &[C64],
    lambda: f64,
    a: f64,
    nodes: usize,
) -> C64 {
    let n = z.len();
    let zz = matcore::norm_sqr(z);
    let zb = matcore::conj_vec(z);
    let two_n = 2f64.powi(n as i32);
    integrate_cn_scaled(n, lambda, a, nodes, |w| {
        let wb = matcore::conj_vec(w);
        let e = (-zz - matcore::norm_sqr(w)) + matcore::dot(z, &wb) - matcore::dot(&zb, w);
        kernel(&matcore::add_vec(z, w), &matcore::sub_vec(z, w)) * (e * (lambda / 2.0)).exp() * two_n
    })
}

/// `W₀(A)(z) = 2ⁿ∫ k_A(w, 2z-w) exp(λ(-zz̄ + zw̄ - ½ww̄)) dμ_λ(w)`.
pub fn w0_integral_shifted(
    kernel: impl Fn(&[C64], &[C64]) -> C64,
    z: &[C64],
    lambda: f64,
    a: f64,
    nodes: usize,
) -> C64 {
    let n = z.len();
    let zz = matcore::norm_sqr(z);
    let two_n = 2f64.powi(n as i32);
    let z2 = matcore::scale_vec(z, c(2.0, 0.0));
    integrate_cn_scaled(n, lambda, a, nodes, |w| {
        let wb = matcore::conj_vec(w);
        let e = matcore::dot(z, &wb) - zz - matcore::norm_sqr(w) * 0.5;
        kernel(w, &matcore::sub_vec(&z2, w)) * (e * lambda).exp() * two_n
    })
}

/// Decay rate of the `W₀` integrand of a Gaussian kernel: the mean eigenvalue
/// of the negated real part of its quadratic form in `(Re w, Im w)`.
pub fn w0_decay_rate(k: &GaussianKernel) -> f64 {
    let n = k.n;
    let id = CMat::identity(n);
    let bi = &k.beta + &id;
    let kq = CMat::from_blocks(&k.alpha, &-&bi, &-&bi.transpose(), &k.gamma)
        .expect("square blocks")
        .scale_re(k.lambda / 4.0);
    let u = CMat::u(n);
    let s = (&(&u.transpose() * &kq) * &u).symmetrized();
    let rate = -s.re().trace().re / (2 * n) as f64;
    if rate.is_finite() && rate > 0.0 {
        rate
    } else {
        k.lambda / 2.0
    }
}

/// `W₀(σ(k))(z)` by quadrature, with the Gauss-Hermite weight matched to the
/// integrand's decay.
pub fn w0_sigma_quadrature(k: &SuBlocks, z: &[C64], lambda: f64, nodes: usize) -> Result<C64> {
    let kernel = metaplectic::sigma_kernel(k, lambda)?;
    let a = w0_decay_rate(&kernel);
    Ok(w0_integral_weighted(|u, v| kernel.eval(u, v), z, lambda, a, nodes))
}

/// As [`w0_sigma_quadrature`] through the shifted form.
pub fn w0_sigma_quadrature_shifted(k: &SuBlocks, z: &[C64], lambda: f64, nodes: usize) -> Result<C64> {
    let kernel = metaplectic::sigma_kernel(k, lambda)?;
    let a = w0_decay_rate(&kernel);
    Ok(w0_integral_shifted(|u, v| kernel.eval(u, v), z, lambda, a, nodes))
}

const PHASE_TOL: f64 = 1e-8;

/// `det(I + k)`, which is real on `S`.
pub fn det_one_plus(k: &SuBlocks) -> Result<f64> {
    let m = k.matrix();
    let d = matcore::det(&(&m + &CMat::identity(2 * k.n())))?;
    if d.im.abs() > 1e-8 * d.norm().max(1.0) {
        return Err(Error::NotInS { residual: d.im.abs() });
    }
    Ok(d.re)
}

/// `2ⁿ|det(I + k)|^{-1/2}` and the sign of `det(I + k)`.
fn phase_modulus(k: &SuBlocks) -> Result<(f64, f64)> {
    let n = k.n();
    let d = det_one_plus(k)?;
    let scale = (2.0 + k.p().norm() + k.q().norm()).powi(2 * n as i32);
    if d.abs() <= 1e-12 * scale {
        return Err(Error::CayleySingular);
    }
    Ok((2f64.powi(n as i32) / d.abs().sqrt(), d))
}

/// `c_n(k)`: `2ⁿ det(I+k)^{-1/2}` when the determinant is positive, otherwise
/// `∓i 2ⁿ|det(I+k)|^{-1/2}` according to the sign of `Arg det P`.
pub fn metaplectic_phase_c(k: &SuBlocks) -> Result<C64> {
    let (m, d) = phase_modulus(k)?;
    if d > 0.0 {
        return Ok(c(m, 0.0));
    }
    let dp = k.det_p();
    if dp.im.abs() < PHASE_TOL * dp.norm().max(1.0) {
        return Err(Error::AmbiguousPhase);
    }
    Ok(if dp.im > 0.0 { c(0.0, -m) } else { c(0.0, m) })
}

/// The two candidate phases `±i 2ⁿ|det(I+k)|^{-1/2}` when `det(I+k) < 0`,
/// or the single positive one.
pub fn phase_candidates(k: &SuBlocks) -> Result<Vec<C64>> {
    let (m, d) = phase_modulus(k)?;
    Ok(if d > 0.0 { vec![c(m, 0.0)] } else { vec![c(0.0, -m), c(0.0, m)] })
}

/// `(λ/2) J (k - I)(k + I)⁻¹`.
pub fn w0_exponent_matrix(k: &SuBlocks, lambda: f64) -> Result<CMat> {
    let cay = matcore::cayley(&k.matrix())?;
    Ok((&CMat::j(k.n()) * &cay).scale_re(lambda / 2.0))
}

fn zzbar(z: &[C64]) -> Vec<C64> {
    z.iter().copied().chain(z.iter().map(|w| w.conj())).collect()
}

/// `W₀(σ(k))(z) = c_n(k) exp((λ/2)(z, z̄) J(k - I)(k + I)⁻¹ (z, z̄)ᵗ)`.
pub fn w0_sigma_closed(k: &SuBlocks, z: &[C64], lambda: f64) -> Result<C64> {
    let cn = metaplectic_phase_c(k)?;
    let e = w0_exponent_matrix(k, lambda)?;
    let v = zzbar(z);
    Ok(cn * e.bilinear(&v, &v).exp())
}

/// The closed form with the phase supplied by the caller.
pub fn w0_sigma_with_phase(k: &SuBlocks, z: &[C64], lambda: f64, cn: C64) -> Result<C64> {
    let e = w0_exponent_matrix(k, lambda)?;
    let v = zzbar(z);
    Ok(cn * e.bilinear(&v, &v).exp())
}

/// Result of deciding the phase of `W₀(σ(k))` by quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAdjudication {
    pub phase: C64,
    /// Phase from the case analysis, if it is decidable.
    pub analytic: Option<C64>,
    pub quadrature_value: C64,
    pub closed_value: C64,
    pub rel_error: f64,
}

/// Picks the candidate phase whose closed form is nearest the quadrature
/// value at `z`.
pub fn adjudicate_phase(k: &SuBlocks, z: &[C64], lambda: f64, nodes: usize) -> Result<PhaseAdjudication> {
    let quad = w0_sigma_quadrature(k, z, lambda, nodes)?;
    let analytic = match metaplectic_phase_c(k) {
        Ok(p) => Some(p),
        Err(Error::AmbiguousPhase) => None,
        Err(e) => return Err(e),
    };
    let mut best: Option<(C64, C64, f64)> = None;
    for cand in phase_candidates(k)? {
        let v = w0_sigma_with_phase(k, z, lambda, cand)?;
        let err = (v - quad).norm() / quad.norm().max(1e-300);
        if best.map_or(true, |b| err < b.2) {
            best = Some((cand, v, err));
        }
    }
    let (phase, closed_value, rel_error) = best.expect("at least one candidate");
    Ok(PhaseAdjudication { phase, analytic, quadrature_value: quad, closed_value, rel_error })
}

/// `W₀(σ(k))` as a Gaussian symbol on `ℝ²ⁿ`.
pub fn w0_sigma_symbol(k: &SuBlocks, lambda: f64) -> Result<GaussianSymbol> {
    let cn = metaplectic_phase_c(k)?;
    GaussianSymbol::from_complex_form(cn, &w0_exponent_matrix(k, lambda)?)
}

/// `W₀(dσ(X))(z) = (λ/4)(z(B̄z) - z̄(Bz̄) - 2(Az)z̄)`.
pub fn w0_dsigma_closed(x: &SuLie, z: &[C64], lambda: f64) -> Result<C64> {
    let report = sympgroup::validate_su_lie(x, sympgroup::default_tol(x.a().norm() + x.b().norm()));
    if !report.ok() {
        return Err(Error::NotInLie { residual: report.max_residual() });
    }
    let zb = matcore::conj_vec(z);
    let v = x.b().conj().bilinear(z, z) - x.b().bilinear(&zb, &zb) - x.a().bilinear(&zb, z) * 2.0;
    Ok(v * (lambda / 4.0))
}

/// `J(g - I)(g + I)⁻¹`.
pub fn cayley_j(g: &SpReal) -> Result<CMat> {
    Ok(&CMat::j(g.n()) * &matcore::cayley(g.matrix())?)
}

/// `W₁(σ'(g))(x, y) = c'_n(g) exp(-iλ(x, y) J(g - I)(g + I)⁻¹ (x, y)ᵗ)`,
/// the phase keyed to `Arg det(A + D + i(C - B))`.
pub fn w1_sigma_closed(g: &SpReal, x: &[f64], y: &[f64], lambda: f64) -> Result<C64> {
    let k = sympgroup::su_from_sp(g)?;
    let cn = metaplectic_phase_c(&k)?;
    let v = real_vec(x, y);
    Ok(cn * (cayley_j(g)?.bilinear(&v, &v) * c(0.0, -lambda)).exp())
}

/// `W₁(σ'(exp X))(x, y) = det(cosh(X/2))^{-1/2} exp(-iλ(x, y) J tanh(X/2) (x, y)ᵗ)`.
pub fn w1_exp_closed(x: &SpLieReal, xs: &[f64], ys: &[f64], lambda: f64) -> Result<C64> {
    let half = x.matrix().scale_re(0.5);
    let d = matcore::det(&matcore::mat_cosh(&half)?)?;
    if d.re <= 1e-14 {
        return Err(Error::SingularMatrix { cond: f64::INFINITY });
    }
    let th = matcore::mat_tanh(&half)?;
    let v = real_vec(xs, ys);
    let e = (&CMat::j(x.n()) * &th).bilinear(&v, &v) * c(0.0, -lambda);
    Ok(e.exp() / d.re.sqrt())
}

/// Both forms `(iλ/2)(2y(Ax) + y(By) - x(Cx))` and `-(iλ/2)(x, y)JX(x, y)ᵗ`.
pub fn w1_dsigma_forms(x: &SpLieReal, xs: &[f64], ys: &[f64], lambda: f64) -> (C64, C64) {
    let xv: Vec<C64> = xs.iter().map(|t| c(*t, 0.0)).collect();
    let yv: Vec<C64> = ys.iter().map(|t| c(*t, 0.0)).collect();
    let first = (x.a().bilinear(&yv, &xv) * 2.0 + x.b().bilinear(&yv, &yv) - x.c().bilinear(&xv, &xv))
        * c(0.0, lambda / 2.0);
    let v = real_vec(xs, ys);
    let second = (&CMat::j(x.n()) * &x.matrix()).bilinear(&v, &v) * c(0.0, -lambda / 2.0);
    (first, second)
}

/// `W₁(dσ'(X))(x, y)`.
pub fn w1_dsigma_closed(x: &SpLieReal, xs: &[f64], ys: &[f64], lambda: f64) -> C64 {
    let (first, second) = w1_dsigma_forms(x, xs, ys, lambda);
    debug_assert!((first - second).norm() <= 1e-12 * (1.0 + first.norm()));
    first
}

/// `det(cos(JM))^{-1/2} exp(-(x, y) J tan(JM) (x, y)ᵗ)`, the root continued
/// from `M = 0`.
pub fn hormander_exp_symbol(m: &QuadForm2n, xs: &[f64], ys: &[f64]) -> Result<C64> {
    let jm = &CMat::j(m.n) * &m.m;
    let root = matcore::det_sqrt_even_fn_hamiltonian(&jm, |mu| mu.cos())?;
    if root.norm() <= 1e-14 {
        return Err(Error::SingularMatrix { cond: f64::INFINITY });
    }
    let tan = matcore::mat_tan(&jm)?;
    let v = real_vec(xs, ys);
    Ok((-(&CMat::j(m.n) * &tan).bilinear(&v, &v)).exp() / root)
}

/// `W₁(σ'(exp Y))` for a complex Hamiltonian `Y`, the root continued from
/// `Y = 0`. At `Y = iX` this is the symbol of `exp(dσ'(iX))`.
pub fn w1_exp_continued(y: &CMat, xs: &[f64], ys: &[f64], lambda: f64) -> Result<C64> {
    let n = y.rows() / 2;
    let half = y.scale_re(0.5);
    let root = matcore::det_sqrt_even_fn_hamiltonian(&half, |mu| mu.cosh())?;
    if root.norm() <= 1e-14 {
        return Err(Error::SingularMatrix { cond: f64::INFINITY });
    }
    let th = matcore::mat_tanh(&half)?;
    let v = real_vec(xs, ys);
    let e = (&CMat::j(n) * &th).bilinear(&v, &v) * c(0.0, -lambda);
    Ok(e.exp() / root)
}

/// `γ exp(vᵗSv) ↦ γ det(I - 4tS)^{-1/2} exp(vᵗS(I - 4tS)⁻¹v)`, the heat flow
/// `exp(tΔ)` on `ℝ²ⁿ`.
pub fn heat_flow_gaussian(f: &GaussianSymbol, t: f64) -> Result<GaussianSymbol> {
    let dim = 2 * f.n;
    let m = &CMat::identity(dim) - &f.s.scale_re(4.0 * t);
    let root = matcore::det_powhalf_posreal(&m).map_err(|_| Error::HeatFlowSingular)?;
    let inv = matcore::inverse(&m).map_err(|_| Error::HeatFlowSingular)?;
    let s = (&f.s * &inv).symmetrized();
    Ok(GaussianSymbol { n: f.n, gamma: f.gamma / root, s })
}

/// `exp(tΔ)f(v)` as a Gaussian convolution, by quadrature.
pub fn heat_flow_quadrature(f: &GaussianSymbol, t: f64, v: &[f64], nodes: usize) -> C64 {
    let dim = 2 * f.n;
    let a = 1.0 / (4.0 * t);
    let norm = (4.0 * std::f64::consts::PI * t).powf(-(dim as f64) / 2.0);
    let mut w = vec![0.0; dim];
    quadrature::integrate_rn_gaussian(dim, a, nodes, |u| {
        for j in 0..dim {
            w[j] = v[j] - u[j];
        }
        f.eval(&w)
    }) * norm
}

/// `B_λ = exp(Δ/2λ)` on a Gaussian symbol.
pub fn berezin_transform_gaussian(f: &GaussianSymbol, lambda: f64) -> Result<GaussianSymbol> {
    heat_flow_gaussian(f, 1.0 / (2.0 * lambda))
}

/// `(B_λ f)(z) = ∫ f(w) e^{-λ|z-w|²/2} dμ_λ(w)` by quadrature.
pub fn berezin_transform_quadrature(f: &GaussianSymbol, z: &[C64], lambda: f64, nodes: usize) -> C64 {
    let zz = matcore::norm_sqr(z);
    let zb = matcore::conj_vec(z);
    quadrature::quadrature_cn(f.n, lambda, nodes, |w| {
        let e = (matcore::dot(&zb, w).re * 2.0 - zz) * (lambda / 2.0);
        f.eval_z(w) * e.exp()
    })
}

/// Fixed sample points in `ℂⁿ` with entries in the unit box.
pub fn sample_points(n: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut r = rng::stream(seed, "sample-points");
    (0..count)
        .map(|_| (0..n).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect())
        .collect()
}

/// `sup |B_λ^{1/2} W₀(σ(k)) - S_λ(σ(k))|` over ten sample points.
pub fn polar_relation_residual(k: &SuBlocks, lambda: f64) -> Result<f64> {
    let w0 = w0_sigma_symbol(k, lambda)?;
    let half = heat_flow_gaussian(&w0, 1.0 / (4.0 * lambda))?;
    let mut worst: f64 = 0.0;
    for z in sample_points(k.n(), 10, 0) {
        let s = metaplectic::berezin_symbol_sigma(k, &z, lambda)?;
        worst = worst.max((half.eval_z(&z) - s).norm());
    }
    Ok(worst)
}

/// Symmetric `S` with entries uniform in the unit disc scaled so that
/// `‖S‖ ≤ scale`, with nonpositive real part on the diagonal.
pub fn random_gaussian_symbol(n: usize, seed: u64, scale: f64) -> GaussianSymbol {
    let mut r = rng::stream(seed, "gaussian-symbol");
    let dim = 2 * n;
    let mut s = CMat::from_fn(dim, dim, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).symmetrized();
    for j in 0..dim {
        let d = s.get(j, j);
        s.set(j, j, c(-d.re.abs(), d.im));
    }
    let s = s.scale_re(scale / s.norm().max(1e-300));
    let gamma = c(r.gen_range(0.5..1.5), r.gen_range(-0.5..0.5));
    GaussianSymbol { n, gamma, s }
}

/// Symmetric difference quotient at `0` with one Richardson step.
pub fn richardson_derivative(f: impl Fn(f64) -> Result<C64>, h: f64) -> Result<C64> {
    let d = |h: f64| -> Result<C64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    Ok((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
}

/// `|d/dt W₀(σ(exp tX))(z)|_{t=0} - W₀(dσ(X))(z)| / (1 + |W₀(dσ(X))(z)|)`.
pub fn w0_derivative_residual(x: &SuLie, z: &[C64], lambda: f64) -> Result<f64> {
    let fd = richardson_derivative(|t| w0_sigma_closed(&sympgroup::su_exp(&x.scale(t))?, z, lambda), 1e-3)?;
    let want = w0_dsigma_closed(x, z, lambda)?;
    Ok((fd - want).norm() / (1.0 + want.norm()))
}

/// The same check for `W₁` along both `σ'(exp tX)` and the exponential
/// form; returns the larger residual.
pub fn w1_derivative_residual(x: &SpLieReal, xs: &[f64], ys: &[f64], lambda: f64) -> Result<f64> {
    let want = w1_dsigma_closed(x, xs, ys, lambda);
    let a = richardson_derivative(|t| w1_sigma_closed(&sympgroup::sp_exp(&x.scale(t))?, xs, ys, lambda), 1e-3)?;
    let b = richardson_derivative(|t| w1_exp_closed(&x.scale(t), xs, ys, lambda), 1e-3)?;
    Ok((a - want).norm().max((b - want).norm()) / (1.0 + want.norm()))
}
