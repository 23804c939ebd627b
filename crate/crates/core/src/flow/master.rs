//! The classical master equation `{C, C} = 0` for Courant data.
//!
//! Functions on `W ⊕ V[1] ⊕ W*[2]` are polynomials in even coordinates `x^i`
//! (degree 0), odd `A^a` (degree 1) and even `p_i` (degree 2). The bracket is
//!
//! ```text
//! {F, G} = ∂F/∂x^i ∂G/∂p_i − ∂F/∂p_i ∂G/∂x^i + (F ∂←/∂A^a) t^{ab} (∂→/∂A^b G)
//! ```
//!
//! so that `{x^i, p_j} = δ^i_j` and `{A^a, A^b} = t^{ab}`.

use std::collections::BTreeMap;

use super::courant::CourantData;
use crate::scalar::Scalar;

/// Exponents of `x`, sorted odd generators, exponents of `p`.
type Key = (Vec<u32>, Vec<usize>, Vec<u32>);

/// A polynomial in the graded variables, keyed by monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedPoly<T> {
    m: usize,
    n: usize,
    terms: BTreeMap<Key, T>,
}

impl<T: Scalar> GradedPoly<T> {
    pub fn zero(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Adds `coef · x^xe · A^{odd[0]} ⋯ A^{odd[k]} · p^pe` (odd indices in the given order).
    pub fn add_term(&mut self, coef: T, xe: Vec<u32>, odd: &[usize], pe: Vec<u32>) {
        if let Some((sign, sorted)) = sort_odd(odd) {
            self.push((xe, sorted, pe), if sign { -coef } else { coef });
        }
    }

    fn push(&mut self, key: Key, coef: T) {
        if coef == T::zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(T::zero);
        *e += coef;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|&c| c == T::zero())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.m, self.n);
        for ((xa, aa, pa), &ca) in &self.terms {
            for ((xb, ab, pb), &cb) in &other.terms {
                let mut odd = aa.clone();
                odd.extend_from_slice(ab);
                if let Some((sign, sorted)) = sort_odd(&odd) {
                    let xe = xa.iter().zip(xb).map(|(a, b)| a + b).collect();
                    let pe = pa.iter().zip(pb).map(|(a, b)| a + b).collect();
                    let c = ca * cb;
                    out.push((xe, sorted, pe), if sign { -c } else { c });
                }
            }
        }
        out
    }

    fn add_assign(&mut self, other: &Self, scale: T) {
        for (k, &c) in &other.terms {
            self.push(k.clone(), c * scale);
        }
    }

    fn d_even(&self, var: usize, momentum: bool) -> Self {
        let mut out = Self::zero(self.m, self.n);
        for ((xe, odd, pe), &c) in &self.terms {
            let (mut xe, mut pe) = (xe.clone(), pe.clone());
            let e = if momentum { &mut pe[var] } else { &mut xe[var] };
            if *e == 0 {
                continue;
            }
            let f = T::lit(*e as f64);
            *e -= 1;
            out.push((xe, odd.clone(), pe), c * f);
        }
        out
    }

    /// `∂→/∂A^a` (`left = true`) or `∂←/∂A^a`.
    fn d_odd(&self, a: usize, left: bool) -> Self {
        let mut out = Self::zero(self.m, self.n);
        for ((xe, odd, pe), &c) in &self.terms {
            let Some(j) = odd.iter().position(|&b| b == a) else {
                continue;
            };
            let moves = if left { j } else { odd.len() - 1 - j };
            let mut rest = odd.clone();
            rest.remove(j);
            out.push((xe.clone(), rest, pe.clone()), if moves % 2 == 1 { -c } else { c });
        }
        out
    }

    /// The graded Poisson bracket with inverse pairing `t` (row-major `n × n`).
    pub fn bracket(&self, other: &Self, t: &[T]) -> Self {
        let (m, n) = (self.m, self.n);
        let mut out = Self::zero(m, n);
        for i in 0..m {
            out.add_assign(&self.d_even(i, false).mul(&other.d_even(i, true)), T::one());
            out.add_assign(&self.d_even(i, true).mul(&other.d_even(i, false)), -T::one());
        }
        let right: Vec<Self> = (0..n).map(|a| self.d_odd(a, false)).collect();
        let left: Vec<Self> = (0..n).map(|b| other.d_odd(b, true)).collect();
        for a in 0..n {
            if right[a].is_empty() {
                continue;
            }
            for b in 0..n {
                let tab = t[a * n + b];
                if tab != T::zero() && !left[b].is_empty() {
                    out.add_assign(&right[a].mul(&left[b]), tab);
                }
            }
        }
        out
    }

    /// Max over `(A, p)` monomials of `|coefficient(x)|`, evaluated at `x`.
    pub fn max_abs_at(&self, x: &[T]) -> f64 {
        let mut grouped: BTreeMap<(&Vec<usize>, &Vec<u32>), T> = BTreeMap::new();
        for ((xe, odd, pe), &c) in &self.terms {
            let mut v = c;
            for (xi, &e) in x.iter().zip(xe) {
                for _ in 0..e {
                    v *= *xi;
                }
            }
            *grouped.entry((odd, pe)).or_insert_with(T::zero) += v;
        }
        grouped.values().map(|v| v.abs().as_f64()).fold(0.0, f64::max)
    }
}

/// Sorts odd generators, returning `(negative, sorted)` or `None` if one repeats.
fn sort_odd(odd: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut v = odd.to_vec();
    let mut swaps = 0usize;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((swaps % 2 == 1, v))
}

/// `C = Σ_{a<b<c} c_abc(x) A^a A^b A^c + ρ^i_a(x) p_i A^a`.
pub fn hamiltonian<T: Scalar>(cdata: &CourantData<T>) -> GradedPoly<T> {
    let (m, n) = (cdata.base_dim(), cdata.fiber_dim());
    let mut h = GradedPoly::zero(m, n);
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for mono in &cdata.c_component(a, b, c).terms {
                    h.add_term(mono.coef, mono.exps.clone(), &[a, b, c], vec![0; m]);
                }
            }
        }
    }
    for i in 0..m {
        let mut pe = vec![0; m];
        pe[i] = 1;
        for a in 0..n {
            for mono in &cdata.rho_component(i, a).terms {
                h.add_term(mono.coef, mono.exps.clone(), &[a], pe.clone());
            }
        }
    }
    h
}

/// `{C, C}` expanded symbolically.
pub fn master_bracket<T: Scalar>(cdata: &CourantData<T>) -> GradedPoly<T> {
    let n = cdata.fiber_dim();
    let t = cdata
        .pairing()
        .clone()
        .try_inverse()
        .expect("CourantData pairing is validated as regular");
    let t: Vec<T> = (0..n * n).map(|k| t[(k / n, k % n)]).collect();
    let c = hamiltonian(cdata);
    c.bracket(&c, &t)
}

/// Max absolute coefficient of `{C, C}` over the sample points.
pub fn master_equation_residual<T: Scalar>(cdata: &CourantData<T>, sample_points: &[Vec<T>]) -> f64 {
    let cc = master_bracket(cdata);
    sample_points
        .iter()
        .map(|x| cc.max_abs_at(x))
        .fold(0.0, f64::max)
}
