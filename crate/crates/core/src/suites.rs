//! Named verification suites: seeded random trials of each identity, run in
//! parallel, reported per case.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussint::{self, GaussianKernel};
use crate::heisenberg::{self, HeisElt};
use crate::jacobi::{self, CharParams};
use crate::matcore::{c, C64};
use crate::metaplectic;
use crate::moyal;
use crate::quadrature;
use crate::rng;
use crate::sympgroup::{self, SpLieReal};
use crate::weyl;

/// Suite names with their default tolerances and largest admissible `n`.
pub const SUITES: [(&str, f64, usize); 12] = [
    ("gaussint", 1e-8, 2),
    ("lemmatrices", 1e-10, 4),
    ("jacobi-bk", 1e-9, 4),
    ("intertwining", 1e-10, 4),
    ("cocycle", 1e-9, 2),
    ("w0-quadrature", 1e-6, 2),
    ("w1-bridge", 1e-6, 4),
    ("polar", 1e-8, 4),
    ("star-exp", 1e-6, 2),
    ("quantize-hom", 1e-12, 2),
    ("bargmann", 1e-6, 2),
    ("phase", 1e-5, 2),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

pub fn default_tol(name: &str) -> Result<f64> {
    SUITES
        .iter()
        .find(|s| s.0 == name)
        .map(|s| s.1)
        .ok_or_else(|| Error::UnknownSuite(name.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub n: usize,
    pub lambda: f64,
    pub trials: usize,
    pub seed: u64,
    /// Falls back to the suite default.
    pub tol: Option<f64>,
    /// Gauss-Hermite nodes per axis; falls back to the default for `n`.
    pub nodes: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { n: 1, lambda: 1.0, trials: 20, seed: 0, tol: None, nodes: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub trial: usize,
    pub case: String,
    /// Digest of the random inputs.
    pub inputs: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub n: usize,
    pub lambda: f64,
    pub trials: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub seed: u64,
    pub tol: f64,
    pub records: Vec<CaseRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Columns `suite,case,residual,tol,pass`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "case", "residual", "tol", "pass"]).expect("in-memory write");
        for r in &self.records {
            let case = format!("{}/{}/{}", r.trial, r.case, r.inputs);
            w.write_record([
                self.suite.as_str(),
                case.as_str(),
                &format!("{:.6e}", r.residual),
                &format!("{:e}", self.tol),
                if passes(r.residual, self.tol) { "true" } else { "false" },
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn passes(residual: f64, tol: f64) -> bool {
    residual <= tol
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let &(_, default, max_n) =
        SUITES.iter().find(|s| s.0 == name).ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    if cfg.n == 0 || cfg.n > max_n {
        return Err(Error::BadConfig(format!("suite `{name}` supports 1 ≤ n ≤ {max_n}, got {}", cfg.n)));
    }
    if !(cfg.lambda > 0.0 && cfg.lambda.is_finite()) {
        return Err(Error::BadConfig(format!("λ must be positive, got {}", cfg.lambda)));
    }
    if let Some(m) = cfg.nodes {
        if m < 2 || m > quadrature::MAX_NODES {
            return Err(Error::BadConfig(format!("nodes must lie in [2, {}]", quadrature::MAX_NODES)));
        }
    }
    let tol = cfg.tol.unwrap_or(default);
    if !(tol > 0.0) {
        return Err(Error::BadConfig(format!("tolerance must be positive, got {tol}")));
    }
    let ctx = Ctx { n: cfg.n, lambda: cfg.lambda, nodes: cfg.nodes.unwrap_or(quadrature::default_nodes(cfg.n)) };
    let per_trial: Vec<Vec<CaseRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = rng::trial_seed(cfg.seed, trial);
            let mut out = Vec::new();
            let mut push = |case: &str, inputs: &[f64], r: Result<f64>| {
                let (case, residual) = match r {
                    Ok(v) => (case.to_string(), if v.is_nan() { f64::INFINITY } else { v }),
                    Err(e) => (format!("{case}: {e}"), f64::INFINITY),
                };
                out.push(CaseRecord { trial, case, inputs: rng::digest(inputs), residual });
            };
            run_trial(name, &ctx, seed, &mut push);
            out
        })
        .collect();
    let records: Vec<CaseRecord> = per_trial.into_iter().flatten().collect();
    let failures = records.iter().filter(|r| !passes(r.residual, tol)).count();
    let max_residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(SuiteReport {
        suite: name.to_string(),
        n: cfg.n,
        lambda: cfg.lambda,
        trials: cfg.trials,
        failures,
        max_residual,
        seed: cfg.seed,
        tol,
        records,
    })
}

struct Ctx {
    n: usize,
    lambda: f64,
    nodes: usize,
}

fn cvec(r: &mut ChaCha8Rng, n: usize, s: f64) -> Vec<C64> {
    (0..n).map(|_| c(r.gen_range(-s..s), r.gen_range(-s..s))).collect()
}

fn rvec(r: &mut ChaCha8Rng, n: usize, s: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-s..s)).collect()
}

fn flat(parts: &[&[C64]]) -> Vec<f64> {
    parts.iter().flat_map(|p| p.iter().flat_map(|z| [z.re, z.im])).collect()
}

fn su_digest(k: &sympgroup::SuBlocks) -> Vec<f64> {
    k.matrix().to_row_major().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn run_trial(name: &str, ctx: &Ctx, seed: u64, push: &mut dyn FnMut(&str, &[f64], Result<f64>)) {
    let (n, lambda, nodes) = (ctx.n, ctx.lambda, ctx.nodes);
    let mut r = rng::stream(seed, name);
    match name {
        "gaussint" => {
            let gi = gaussint::random_integrand(n, seed);
            let inputs = flat(&[&gi.u, &gi.v]);
            let res = gaussint::gaussian_integral_closed(&gi)
                .map(|closed| rel(gaussint::gaussian_integral_quadrature(&gi, nodes), closed));
            push("closed-vs-quadrature", &inputs, res);
        }
        "lemmatrices" => {
            let k = sympgroup::random_su(n, seed, 0.8);
            let inputs = su_digest(&k);
            let res = k.p_inv().and_then(|pinv| {
                let a = &k.q().conj() * &pinv;
                let d = &pinv * k.q();
                gaussint::block_inverse_identity_residual(&a, &d, &pinv)
            });
            push("block-inverse", &inputs, res);
            push("cayley-blocks", &inputs, gaussint::cayley_block_identity_residual(&k));
            push("determinant", &inputs, gaussint::det_identity_residual(&k));
        }
        "jacobi-bk" => {
            let k = sympgroup::random_su(n, seed, 0.8);
            let y = cvec(&mut r, n, 0.7);
            let v = cvec(&mut r, n, 0.7);
            let mut inputs = su_digest(&k);
            inputs.extend(flat(&[&y, &v]));
            let res = metaplectic::sigma_kernel(&k, lambda).and_then(|b| {
                let direct = b.eval(&y, &v);
                Ok(rel(jacobi::bk_via_jacobi(&k, &y, &v, &CharParams::metaplectic(lambda))?, direct))
            });
            push("sigma-vs-jacobi", &inputs, res);
        }
        "intertwining" => {
            let k = sympgroup::random_su(n, seed, 0.8);
            let z0 = cvec(&mut r, n, 0.8);
            let z = cvec(&mut r, n, 0.8);
            let w = cvec(&mut r, n, 0.8);
            let mut inputs = su_digest(&k);
            inputs.extend(flat(&[&z0, &z, &w]));
            let res = metaplectic::intertwining_sides(&k, &z0, &z, &w, lambda)
                .map(|(l, rr)| (l - rr).norm() / (1.0 + l.norm()));
            push("functional-equation", &inputs, res);
        }
        "cocycle" => {
            let k = sympgroup::random_su(n, seed, 0.8);
            let kp = sympgroup::random_su(n, rng::mix(seed, "second"), 0.8);
            let mut inputs = su_digest(&k);
            inputs.extend(su_digest(&kp));
            let res = metaplectic::sigma_cocycle_sign(&k, &kp, lambda)
                .map(|rep| (rep.scalar - rep.sign as f64).norm() + rep.param_residual);
            push("product", &inputs, res);
            let unit = metaplectic::sigma_kernel(&k, lambda).and_then(|b| {
                let bi = metaplectic::sigma_kernel(&sympgroup::su_inv(&k), lambda)?;
                let comp = gaussint::compose_kernels(&b, &bi)?;
                Ok((comp.c - 1.0).norm() + comp.param_distance(&GaussianKernel::identity(n, lambda)))
            });
            push("unitarity", &inputs, unit);
        }
        "w0-quadrature" => {
            let k = sympgroup::random_su(n, seed, 0.6);
            let z = cvec(&mut r, n, 0.7);
            let mut inputs = su_digest(&k);
            inputs.extend(flat(&[&z]));
            let res = weyl::w0_sigma_closed(&k, &z, lambda)
                .and_then(|closed| Ok(rel(weyl::w0_sigma_quadrature(&k, &z, lambda, nodes)?, closed)));
            push("symmetric-form", &inputs, res);
            let res = weyl::w0_sigma_closed(&k, &z, lambda)
                .and_then(|closed| Ok(rel(weyl::w0_sigma_quadrature_shifted(&k, &z, lambda, nodes)?, closed)));
            push("shifted-form", &inputs, res);
        }
        "w1-bridge" => {
            let mut x = sympgroup::random_sp_lie(n, seed, 0.5);
            let norm = x.matrix().norm();
            if norm > 1.0 {
                x = x.scale(1.0 / norm);
            }
            let xs = rvec(&mut r, n, 1.0);
            let ys = rvec(&mut r, n, 1.0);
            let mut inputs: Vec<f64> = x.matrix().to_row_major().iter().map(|v| v.re).collect();
            inputs.extend(xs.iter().chain(&ys));
            let res = sympgroup::sp_exp(&x).and_then(|g| {
                Ok(rel(weyl::w1_exp_closed(&x, &xs, &ys, lambda)?, weyl::w1_sigma_closed(&g, &xs, &ys, lambda)?))
            });
            push("exp-vs-sigma", &inputs, res);
            let res = sympgroup::sp_exp(&x).and_then(|g| {
                let z: Vec<C64> = xs.iter().zip(&ys).map(|(a, b)| c(*a, *b)).collect();
                let w0 = weyl::w0_sigma_closed(&sympgroup::su_from_sp(&g)?, &z, lambda)?;
                Ok(rel(weyl::w1_sigma_closed(&g, &xs, &ys, lambda)?, w0))
            });
            push("w1-vs-w0", &inputs, res);
            let (f1, f2) = weyl::w1_dsigma_forms(&x, &xs, &ys, lambda);
            push("dsigma-forms", &inputs, Ok((f1 - f2).norm() / (1.0 + f1.norm())));
            push("derivative-w1", &inputs, weyl::w1_derivative_residual(&x, &xs, &ys, lambda));
            let z: Vec<C64> = xs.iter().zip(&ys).map(|(a, b)| c(*a, *b)).collect();
            let xl = sympgroup::su_lie_from_sp_lie(&x);
            push("derivative-w0", &inputs, weyl::w0_derivative_residual(&xl, &z, lambda));
        }
        "polar" => {
            let k = sympgroup::random_su(n, seed, 0.6);
            push("polar", &su_digest(&k), weyl::polar_relation_residual(&k, lambda));
        }
        "star-exp" => {
            let (order, norm) = if n == 1 { (40, 0.2) } else { (24, 0.1) };
            let q = moyal::random_quad_form(n, seed, norm * r.gen_range(0.1..1.0));
            let pt = rvec(&mut r, 2 * n, 1.5 / (2.0 * n as f64).sqrt());
            let mut inputs: Vec<f64> = q.m.to_row_major().iter().map(|v| v.re).collect();
            inputs.extend(&pt);
            let res = moyal::star_exp_series(&q, c(0.0, -1.0), order, &pt)
                .and_then(|s| Ok(rel(s.value, moyal::star_exp_quadratic_closed(&q, &pt)?)));
            push("series-vs-closed", &inputs, res);
            let x = SpLieReal::from_matrix(&(&crate::matcore::CMat::j(n) * &q.m).scale_re(-2.0));
            push("bridge", &inputs, x.and_then(|x| moyal::star_exp_bridge_residual(&x, &pt)));
        }
        "quantize-hom" => {
            let u = moyal::random_phase_poly(n, 3, seed);
            let v = moyal::random_phase_poly(n, 3, rng::mix(seed, "second"));
            let inputs: Vec<f64> = u.terms().values().chain(v.terms().values()).flat_map(|z| [z.re, z.im]).collect();
            push("homomorphism", &inputs, Ok(moyal::homomorphism_residual(&u, &v)));
            let uv = moyal::moyal_mul(&u, &v);
            let vu = moyal::moyal_mul(&v, &u);
            let graded = (0..=3u32).fold(crate::poly::Poly::zero(2 * n), |acc, l| {
                let coef = moyal::T.powu(l) / (1..=l).map(f64::from).product::<f64>();
                &acc + &moyal::poisson_power(&u, &v, l).scale(coef)
            });
            push("grading", &inputs, Ok(uv.max_coeff_diff(&graded)));
            let odd = (&uv - &vu).max_coeff_diff(&{
                let mut s = crate::poly::Poly::zero(2 * n);
                for l in [1u32, 3] {
                    let coef = moyal::T.powu(l) * 2.0 / (1..=l).map(f64::from).product::<f64>();
                    s = &s + &moyal::poisson_power(&u, &v, l).scale(coef);
                }
                s
            });
            push("commutator", &inputs, Ok(odd));
        }
        "bargmann" => {
            let h = HeisElt::new(cvec(&mut r, n, 0.5), r.gen_range(-1.0..1.0));
            let h2 = HeisElt::new(cvec(&mut r, n, 0.5), r.gen_range(-1.0..1.0));
            let j: Vec<u32> = (0..n).map(|_| r.gen_range(0..4)).collect();
            let z = cvec(&mut r, n, 0.6);
            let mut inputs = flat(&[&h.z0, &h2.z0, &z]);
            inputs.extend(j.iter().map(|&v| v as f64));
            let res = heisenberg::bargmann_intertwining_residual(&h, &j, &z, lambda, nodes);
            push("intertwining", &inputs, Ok(res));
            let f = |w: &[C64]| w.iter().fold(c(1.0, 0.0), |acc, x| acc * (x * 0.5 + 1.0)) + w[0] * w[0];
            push("reproducing", &inputs, Ok(heisenberg::reproducing_residual(f, &z, lambda, nodes)));
            push(
                "fock-homomorphism",
                &inputs,
                Ok(heisenberg::rho_fock_homomorphism_residual(&h, &h2, f, &z, lambda)),
            );
            let phi = |x: &[f64]| c(heisenberg::hermite_function(&j, x, lambda), 0.0);
            let x: Vec<f64> = z.iter().map(|w| w.re).collect();
            push(
                "schrodinger-homomorphism",
                &inputs,
                Ok(heisenberg::rho_schrod_homomorphism_residual(&h, &h2, phi, &x, lambda)),
            );
        }
        "phase" => {
            let g = sympgroup::random_negative_sp(n, seed);
            let res = sympgroup::su_from_sp(&g);
            let z = cvec(&mut r, n, 0.3);
            match res {
                Ok(k) => {
                    let mut inputs = su_digest(&k);
                    inputs.extend(flat(&[&z]));
                    match weyl::adjudicate_phase(&k, &z, lambda, nodes) {
                        Ok(adj) => {
                            push("quadrature", &inputs, Ok(adj.rel_error));
                            let agree = match adj.analytic {
                                Some(p) => (p - adj.phase).norm() / adj.phase.norm(),
                                None => f64::INFINITY,
                            };
                            push("case-analysis", &inputs, Ok(agree));
                        }
                        Err(e) => push("quadrature", &inputs, Err(e)),
                    }
                }
                Err(e) => push("quadrature", &[], Err(e)),
            }
        }
        _ => unreachable!("suite names are checked before dispatch"),
    }
}
