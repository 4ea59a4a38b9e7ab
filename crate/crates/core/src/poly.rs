//! Sparse multivariate polynomials with complex coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matcore::{C64, ONE, ZERO};

/// `Σ c_e x^e`, keyed by exponent vectors of length `nvars`. Zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, ONE)
    }

    pub fn monomial(exps: Vec<u32>, c: C64) -> Self {
        let nvars = exps.len();
        let mut p = Poly::zero(nvars);
        p.add_term(exps, c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, ONE)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Result<Self> {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Shape(format!("exponent of length {} in a {nvars}-variable polynomial", e.len())));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, C64> {
        &self.terms
    }

    pub fn coeff(&self, exps: &[u32]) -> C64 {
        self.terms.get(exps).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C64) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c == ZERO {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == ZERO {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * e[i] as f64);
            }
        }
        out
    }

    /// `∂^β` for a multi-index `β`.
    pub fn derivative_multi(&self, beta: &[u32]) -> Self {
        let mut out = self.clone();
        for (i, &b) in beta.iter().enumerate() {
            for _ in 0..b {
                out = out.derivative(i);
            }
        }
        out
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (&k, xi)| acc * xi.powu(k)))
            .sum()
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(e, c)| (e.clone(), *c)).collect(),
        }
    }

    /// Largest coefficient deviation.
    pub fn max_coeff_diff(&self, other: &Poly) -> f64 {
        (self - other).terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `{"nvars": k, "terms": [[[e...], re, im], ...]}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|(e, c)| json!([e, c.re, c.im])).collect();
        json!({"nvars": self.nvars, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("polynomial: {m}"));
        let nvars = v.get("nvars").and_then(Value::as_u64).ok_or_else(|| bad("missing nvars"))? as usize;
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
        let mut p = Poly::zero(nvars);
        for t in terms {
            let arr = t.as_array().ok_or_else(|| bad("term must be an array"))?;
            let exps = arr
                .first()
                .and_then(Value::as_array)
                .ok_or_else(|| bad("term exponent"))?
                .iter()
                .map(|x| x.as_u64().map(|k| k as u32))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| bad("exponents must be nonnegative integers"))?;
            if exps.len() != nvars {
                return Err(bad("exponent length must equal nvars"));
            }
            let re = arr.get(1).and_then(Value::as_f64).ok_or_else(|| bad("real part"))?;
            let im = arr.get(2).and_then(Value::as_f64).unwrap_or(0.0);
            if !re.is_finite() || !im.is_finite() {
                return Err(bad("non-finite coefficient"));
            }
            p.add_term(exps, C64::new(re, im));
        }
        Ok(p)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-ONE)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::c;

    #[test]
    fn arithmetic() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x + &y) * &(&x - &y);
        let want = &(&x * &x) - &(&y * &y);
        assert_eq!(p, want);
        assert!((&p - &want).is_zero());
        assert_eq!(p.degree(), Some(2));
        assert_eq!(Poly::zero(2).degree(), None);
        let v = p.eval(&[c(2.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(v, c(5.0, 0.0));
    }

    #[test]
    fn derivatives() {
        let x = Poly::var(1, 0);
        let p = &(&x * &x) * &x;
        assert_eq!(p.derivative(0), (&x * &x).scale(c(3.0, 0.0)));
        assert_eq!(p.derivative_multi(&[3]), Poly::constant(1, c(6.0, 0.0)));
        assert!(p.derivative_multi(&[4]).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let p = Poly::from_terms(2, [(vec![1, 0], c(1.0, -2.0)), (vec![0, 3], c(0.5, 0.0))]).unwrap();
        let q = Poly::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
        assert!(Poly::from_json(&serde_json::json!({"nvars": 1, "terms": [[[1, 2], 1.0]]})).is_err());
    }
}
