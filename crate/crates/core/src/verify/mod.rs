//! Numerical checks of the divergent one-loop integrals on `Conf₂(H³)` and of
//! the convergence of longer loops.

pub mod exterior;
pub mod lemma;
pub mod mc;
pub mod scan;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use lemma::{courant_lhs, courant_rhs, lemma_lhs, lemma_rhs, DEFAULT_EPSILON};
pub use mc::{MCEstimate, McOptions};
pub use scan::{alternating_edges, convergence_scan, excision_radius, Propagator, ScanPoint, ScanResult};

/// `coef · x^e₀ y^e₁ h^e₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    pub exps: [u32; 3],
}

/// Polynomial components times the bump `exp(1 − 1/(1 − s²))`, `s = |q − center|/radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: [f64; 3],
    pub radius: f64,
    /// Degree 0: `[f]`. Degree 1: `[dx, dy, dh]`. Degree 2: `[dx∧dy, dx∧dh, dy∧dh]`.
    pub components: Vec<Vec<Term>>,
}

/// A compactly supported form on `H³` with coordinates `(x, y, h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestForm {
    pub degree: u8,
    pub pieces: Vec<Bump>,
}

/// Axis-aligned rectangle in the boundary plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rect {
    pub fn expand(&self, d: f64) -> Self {
        Self {
            lo: [self.lo[0] - d, self.lo[1] - d],
            hi: [self.hi[0] + d, self.hi[1] + d],
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let r = Self {
            lo: [self.lo[0].max(other.lo[0]), self.lo[1].max(other.lo[1])],
            hi: [self.hi[0].min(other.hi[0]), self.hi[1].min(other.hi[1])],
        };
        (r.lo[0] < r.hi[0] && r.lo[1] < r.hi[1]).then_some(r)
    }

    pub fn area(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }
}

fn n_components(degree: u8) -> usize {
    if degree == 0 {
        1
    } else {
        3
    }
}

impl Bump {
    fn profile<R: Real>(&self, q: &[R; 3]) -> R {
        let c = &self.center;
        let d: [R; 3] = std::array::from_fn(|k| q[k] - R::cst(c[k]));
        let s2 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / R::cst(self.radius * self.radius);
        if s2.value() >= 1.0 {
            R::zero()
        } else {
            (R::one() - R::one() / (R::one() - s2)).exp()
        }
    }
}

impl TestForm {
    pub fn new(degree: u8, pieces: Vec<Bump>) -> Result<Self> {
        let f = Self { degree, pieces };
        f.validate()?;
        Ok(f)
    }

    /// One bump with constant components.
    pub fn constant(degree: u8, center: [f64; 3], radius: f64, coefs: &[f64]) -> Result<Self> {
        let components = coefs.iter().map(|&c| vec![Term { coef: c, exps: [0, 0, 0] }]).collect();
        Self::new(degree, vec![Bump { center, radius, components }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree > 2 {
            return Err(Error::InvalidConfig(format!("test form degree {} > 2", self.degree)));
        }
        if self.pieces.is_empty() {
            return Err(Error::InvalidConfig("test form needs at least one bump".into()));
        }
        for b in &self.pieces {
            if !(b.radius.is_finite() && b.radius > 0.0) || b.center.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidConfig("bump center and radius must be finite, radius > 0".into()));
            }
            if b.components.len() != n_components(self.degree) {
                return Err(Error::InvalidConfig(format!(
                    "degree {} form needs {} components, got {}",
                    self.degree,
                    n_components(self.degree),
                    b.components.len()
                )));
            }
            if b.components.iter().flatten().any(|t| !t.coef.is_finite()) {
                return Err(Error::InvalidConfig("non-finite coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        for t in out.pieces.iter_mut().flat_map(|b| b.components.iter_mut().flatten()) {
            t.coef *= k;
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::InvalidConfig("cannot add forms of different degree".into()));
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Self::new(self.degree, pieces)
    }

    /// Components at `q` (unused slots are zero).
    pub fn eval<R: Real>(&self, q: &[R; 3]) -> [R; 3] {
        let mut out = [R::zero(); 3];
        for b in &self.pieces {
            let phi = b.profile(q);
            if phi.value() == 0.0 {
                continue;
            }
            for (slot, terms) in out.iter_mut().zip(&b.components) {
                let mut p = R::zero();
                for t in terms {
                    p += R::cst(t.coef) * q[0].powi(t.exps[0] as i32) * q[1].powi(t.exps[1] as i32)
                        * q[2].powi(t.exps[2] as i32);
                }
                *slot += p * phi;
            }
        }
        out
    }

    /// Projection of the support onto the boundary plane.
    pub fn footprint(&self) -> Rect {
        let mut r = Rect { lo: [f64::INFINITY; 2], hi: [f64::NEG_INFINITY; 2] };
        for b in &self.pieces {
            for k in 0..2 {
                r.lo[k] = r.lo[k].min(b.center[k] - b.radius);
                r.hi[k] = r.hi[k].max(b.center[k] + b.radius);
            }
        }
        r
    }

    /// Lowest height of the support.
    pub fn floor(&self) -> f64 {
        self.pieces.iter().map(|b| b.center[2] - b.radius).fold(f64::INFINITY, f64::min)
    }

    /// Value of the form at `q` on the frame vectors `vecs` (degree many).
    pub(crate) fn on_vectors(&self, q: &[f64; 3], vecs: &[[f64; 3]]) -> f64 {
        let c = self.eval::<f64>(q);
        match self.degree {
            0 => c[0],
            1 => c[0] * vecs[0][0] + c[1] * vecs[0][1] + c[2] * vecs[0][2],
            _ => {
                let (v, w) = (&vecs[0], &vecs[1]);
                let m = |i: usize, j: usize| v[i] * w[j] - v[j] * w[i];
                c[0] * m(0, 1) + c[1] * m(0, 2) + c[2] * m(1, 2)
            }
        }
    }

    /// The form at `q` as an element of the exterior algebra of a frame whose
    /// vectors have `q`-components `frame[k]`, placed at indices `index[k]`.
    pub(crate) fn on_frame(&self, q: &[f64; 3], index: &[usize], frame: &[[f64; 3]]) -> exterior::Form {
        let mut terms = Vec::new();
        match self.degree {
            0 => terms.push((0, Complex64::new(self.on_vectors(q, &[]), 0.0))),
            1 => {
                for (i, v) in index.iter().zip(frame) {
                    terms.push((1u32 << i, Complex64::new(self.on_vectors(q, &[*v]), 0.0)));
                }
            }
            _ => {
                for a in 0..index.len() {
                    for b in a + 1..index.len() {
                        let (i, j) = (index[a], index[b]);
                        let val = self.on_vectors(q, &[frame[a], frame[b]]);
                        let val = if i < j { val } else { -val };
                        terms.push(((1u32 << i) | (1u32 << j), Complex64::new(val, 0.0)));
                    }
                }
            }
        }
        terms.retain(|t| t.1 != Complex64::new(0.0, 0.0));
        exterior::Form { terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Jet;

    #[test]
    fn bump_is_compactly_supported_and_smooth() {
        let f = TestForm::constant(1, [0.0, 0.0, 0.0], 1.0, &[1.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.eval::<f64>(&[0.0; 3]), [1.0, 2.0, 0.0]);
        assert_eq!(f.eval::<f64>(&[0.9, 0.5, 0.0]), [0.0; 3]);
        let q = [Jet::<1>::variable(0.999, 0), Jet::constant(0.0), Jet::constant(0.0)];
        assert!(f.eval(&q)[0].du[0].abs() < 1e-100);
    }

    #[test]
    fn validation() {
        assert!(TestForm::constant(3, [0.0; 3], 1.0, &[1.0]).is_err());
        assert!(TestForm::constant(1, [0.0; 3], 1.0, &[1.0]).is_err());
        assert!(TestForm::constant(0, [0.0; 3], -1.0, &[1.0]).is_err());
        let json = r#"{"degree":0,"pieces":[{"center":[0,0,0],"radius":1,"components":[[{"coef":1,"exps":[0,0,0]}]],"x":1}]}"#;
        assert!(serde_json::from_str::<TestForm>(json).is_err());
    }

    #[test]
    fn polynomial_components() {
        let b = Bump {
            center: [0.0; 3],
            radius: 2.0,
            components: vec![vec![Term { coef: 3.0, exps: [1, 2, 0] }]],
        };
        let f = TestForm::new(0, vec![b]).unwrap();
        let q = [0.5, 0.5, 0.0];
        let phi = (1.0f64 - 1.0 / (1.0 - 0.5 / 4.0)).exp();
        assert!((f.eval::<f64>(&q)[0] - 3.0 * 0.5 * 0.25 * phi).abs() < 1e-15);
    }
}
