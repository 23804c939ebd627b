//! Sparse multivariate polynomials with exact derivatives.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial<T> {
    pub coef: T,
    /// One exponent per variable.
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly<T> {
    pub nvars: usize,
    pub terms: Vec<Monomial<T>>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(c, vec![0; nvars]);
        p
    }

    /// `c · x_var`
    pub fn linear(nvars: usize, var: usize, c: T) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(c, e);
        p
    }

    pub fn add_term(&mut self, coef: T, exps: Vec<u32>) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
        if coef == T::zero() {
            return;
        }
        if let Some(m) = self.terms.iter_mut().find(|m| m.exps == exps) {
            m.coef += coef;
        } else {
            self.terms.push(Monomial { coef, exps });
        }
        self.terms.retain(|m| m.coef != T::zero());
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for m in &other.terms {
            out.add_term(m.coef, m.exps.clone());
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = Self::zero(self.nvars);
        for m in &self.terms {
            out.add_term(m.coef * s, m.exps.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for a in &self.terms {
            for b in &other.terms {
                let e = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                out.add_term(a.coef * b.coef, e);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|m| m.exps.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[T]) -> T {
        let mut s = T::zero();
        for m in &self.terms {
            let mut v = m.coef;
            for (xi, &e) in x.iter().zip(&m.exps) {
                for _ in 0..e {
                    v *= *xi;
                }
            }
            s += v;
        }
        s
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for m in &self.terms {
            let e = m.exps[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[var] -= 1;
            out.add_term(m.coef * T::lit(e as f64), exps);
        }
        out
    }

    /// `∂_{vars[0]} ∂_{vars[1]} … p`; beyond the degree this is exactly zero.
    pub fn derivatives(&self, vars: &[usize]) -> Self {
        vars.iter().fold(self.clone(), |p, &v| p.derivative(v))
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .map(|m| m.coef.abs().as_f64())
            .fold(0.0, f64::max)
    }
}
