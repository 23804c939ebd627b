//! Component data of a Courant algebroid that is trivial as a bundle over a
//! vector space `W`: the fibre pairing on `V`, the bracket components
//! `c_abc(x)` and the anchor `ρ^i_a(x)`, all polynomial in `x ∈ W`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::QuadraticLieAlgebra;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Largest polynomial degree accepted for `c` and `ρ`.
pub const MAX_DEGREE: u32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CourantData<T: Scalar> {
    base_dim: usize,
    fiber_dim: usize,
    #[serde(with = "crate::io::matrix_rows")]
    pairing: DMatrix<T>,
    /// Row-major `c[a][b][c]`.
    c_poly: Vec<Poly<T>>,
    /// Row-major `ρ[i][a]`.
    rho_poly: Vec<Poly<T>>,
}

impl<T: Scalar> CourantData<T> {
    pub fn new(
        pairing: DMatrix<T>,
        base_dim: usize,
        c_poly: Vec<Poly<T>>,
        rho_poly: Vec<Poly<T>>,
    ) -> Result<Self> {
        let n = pairing.nrows();
        if n == 0 || pairing.ncols() != n {
            return Err(Error::Dimension("fibre pairing must be square".into()));
        }
        if c_poly.len() != n * n * n || rho_poly.len() != base_dim * n {
            return Err(Error::Dimension(format!(
                "expected {} bracket and {} anchor components, got {} and {}",
                n * n * n,
                base_dim * n,
                c_poly.len(),
                rho_poly.len()
            )));
        }
        for p in c_poly.iter().chain(&rho_poly) {
            if p.nvars != base_dim {
                return Err(Error::Dimension("polynomial variable count != base_dim".into()));
            }
            if p.degree() > MAX_DEGREE {
                return Err(Error::InvalidConfig(format!(
                    "polynomial degree {} exceeds {MAX_DEGREE}",
                    p.degree()
                )));
            }
            if p.terms.iter().any(|m| !m.coef.as_f64().is_finite()) {
                return Err(Error::InvalidConfig("non-finite coefficient".into()));
            }
        }
        let data = Self {
            base_dim,
            fiber_dim: n,
            pairing,
            c_poly,
            rho_poly,
        };
        // validates the pairing
        QuadraticLieAlgebra::new(data.pairing.clone(), vec![T::zero(); n * n * n])?;
        let scale = data
            .c_poly
            .iter()
            .map(Poly::max_abs_coefficient)
            .fold(1.0, f64::max);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let r1 = data.c_component(a, b, c).add(data.c_component(b, a, c));
                    let r2 = data.c_component(a, b, c).add(data.c_component(a, c, b));
                    if r1.max_abs_coefficient() > 1e-14 * scale
                        || r2.max_abs_coefficient() > 1e-14 * scale
                    {
                        return Err(Error::InvalidConfig(format!(
                            "c_({a}{b}{c}) is not totally antisymmetric"
                        )));
                    }
                }
            }
        }
        Ok(data)
    }

    /// Empty data (`c = 0`, `ρ = 0`) over the given fibre pairing.
    pub fn zero(pairing: DMatrix<T>, base_dim: usize) -> Result<Self> {
        let n = pairing.nrows();
        Self::new(
            pairing,
            base_dim,
            vec![Poly::zero(base_dim); n * n * n],
            vec![Poly::zero(base_dim); base_dim * n],
        )
    }

    /// Chern–Simons data: constant `c` from a Lie algebra, no anchor.
    pub fn from_lie_algebra(alg: &QuadraticLieAlgebra<T>, base_dim: usize) -> Result<Self> {
        let c = alg
            .structure()
            .iter()
            .map(|&v| Poly::constant(base_dim, v))
            .collect();
        let n = alg.dim();
        Self::new(
            alg.pairing().clone(),
            base_dim,
            c,
            vec![Poly::zero(base_dim); base_dim * n],
        )
    }

    /// Sets `c_abc = p` and fills the other five orderings with signs.
    pub fn with_c(mut self, a: usize, b: usize, c: usize, p: Poly<T>) -> Result<Self> {
        let n = self.fiber_dim;
        if a == b || b == c || a == c {
            return Err(Error::InvalidConfig("c_abc needs distinct indices".into()));
        }
        let neg = p.scale(-T::one());
        for (i, j, k, even) in [
            (a, b, c, true),
            (b, c, a, true),
            (c, a, b, true),
            (b, a, c, false),
            (a, c, b, false),
            (c, b, a, false),
        ] {
            self.c_poly[(i * n + j) * n + k] = if even { p.clone() } else { neg.clone() };
        }
        Self::new(self.pairing, self.base_dim, self.c_poly, self.rho_poly)
    }

    pub fn with_rho(mut self, i: usize, a: usize, p: Poly<T>) -> Result<Self> {
        let n = self.fiber_dim;
        self.rho_poly[i * n + a] = p;
        Self::new(self.pairing, self.base_dim, self.c_poly, self.rho_poly)
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn pairing(&self) -> &DMatrix<T> {
        &self.pairing
    }

    pub fn c_component(&self, a: usize, b: usize, c: usize) -> &Poly<T> {
        let n = self.fiber_dim;
        &self.c_poly[(a * n + b) * n + c]
    }

    pub fn rho_component(&self, i: usize, a: usize) -> &Poly<T> {
        &self.rho_poly[i * self.fiber_dim + a]
    }

    /// `c_abc(x)` as a quadratic Lie-algebra-shaped object (the bracket need
    /// not satisfy Jacobi pointwise).
    pub fn fiber_at(&self, x: &[T]) -> Result<QuadraticLieAlgebra<T>> {
        QuadraticLieAlgebra::new(
            self.pairing.clone(),
            self.c_poly.iter().map(|p| p.eval(x)).collect(),
        )
    }

    pub fn rho_at(&self, x: &[T]) -> DMatrix<T> {
        DMatrix::from_fn(self.base_dim, self.fiber_dim, |i, a| {
            self.rho_component(i, a).eval(x)
        })
    }

    /// `∂_{ds[0]}…∂_{ds[k-1]} c_abc(x)`, flattened as `[a][b][c][d_1]…[d_k]`.
    pub fn c_derivative_tensor(&self, x: &[T], order: usize) -> Vec<T> {
        let n = self.fiber_dim;
        let m = self.base_dim;
        let per = m.pow(order as u32);
        let mut out = Vec::with_capacity(n * n * n * per);
        for p in &self.c_poly {
            for flat in 0..per {
                out.push(p.derivatives(&multi_index(flat, m, order)).eval(x));
            }
        }
        out
    }

    /// `∂_{ds}… ρ^i_a(x)`, flattened as `[a][i][d_1]…[d_k]`.
    pub fn rho_derivative_tensor(&self, x: &[T], order: usize) -> Vec<T> {
        let n = self.fiber_dim;
        let m = self.base_dim;
        let per = m.pow(order as u32);
        let mut out = Vec::with_capacity(n * m * per);
        for a in 0..n {
            for i in 0..m {
                let p = self.rho_component(i, a);
                for flat in 0..per {
                    out.push(p.derivatives(&multi_index(flat, m, order)).eval(x));
                }
            }
        }
        out
    }
}

/// Row-major digits of `flat` in base `m`, `len` digits.
pub(crate) fn multi_index(mut flat: usize, m: usize, len: usize) -> Vec<usize> {
    let mut idx = vec![0; len];
    for k in (0..len).rev() {
        idx[k] = flat % m;
        flat /= m;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r22() -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]))
    }

    #[test]
    fn antisymmetry_filled_by_with_c() {
        let d = CourantData::zero(r22(), 1)
            .unwrap()
            .with_c(0, 1, 2, Poly::linear(1, 0, 2.0))
            .unwrap();
        assert_eq!(d.c_component(2, 1, 0).eval(&[1.5]), -3.0);
        assert_eq!(d.c_component(1, 2, 0).eval(&[1.5]), 3.0);
        let derivs = d.c_derivative_tensor(&[0.3], 1);
        assert_eq!(derivs[(0 * 4 + 1) * 4 + 2], 2.0);
    }

    #[test]
    fn rejects_non_antisymmetric_and_high_degree() {
        let mut c = vec![Poly::zero(1); 64];
        c[(0 * 4 + 1) * 4 + 2] = Poly::constant(1, 1.0);
        assert!(CourantData::new(r22(), 1, c, vec![Poly::zero(1); 4]).is_err());
        let mut p = Poly::zero(1);
        p.add_term(1.0, vec![5]);
        assert!(CourantData::zero(r22(), 1).unwrap().with_rho(0, 0, p).is_err());
    }

    #[test]
    fn lie_algebra_reduction() {
        let alg = QuadraticLieAlgebra::<f64>::su2();
        let d = CourantData::from_lie_algebra(&alg, 2).unwrap();
        assert_eq!(d.fiber_at(&[0.1, -4.0]).unwrap().structure(), alg.structure());
        assert!(d.rho_at(&[1.0, 1.0]).iter().all(|&v| v == 0.0));
    }
}
