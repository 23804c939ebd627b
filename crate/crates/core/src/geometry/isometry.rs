//! Orientation-preserving isometries of both models, acting on interior and
//! boundary points.

use num_complex::{Complex, Complex64};
use rand::Rng;

use super::{ball_mobius, dot, lift, BoundaryPoint};
use crate::scalar::Real;

/// `q ↦ (a q + b)(c q + d)⁻¹` on the half-space (quaternionic action of
/// `SL(2, ℂ)`), `z ↦ (a z + b)/(c z + d)` on the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfspaceIsometry {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

fn lc<R: Real>(z: Complex64) -> Complex<R> {
    Complex::new(R::cst(z.re), R::cst(z.im))
}

fn norm2<R: Real>(z: Complex<R>) -> R {
    z.re * z.re + z.im * z.im
}

impl HalfspaceIsometry {
    /// Normalizes to determinant 1.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Option<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 {
            return None;
        }
        let s = det.sqrt();
        Some(Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        let mut z = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        loop {
            let (a, b, c, d) = (z(), z(), z(), z());
            if let Some(g) = Self::new(a, b, c, d) {
                if (a * d - b * c).norm() > 0.2 {
                    return g;
                }
            }
        }
    }

    pub fn apply<R: Real>(&self, q: &[R; 3]) -> [R; 3] {
        let (a, b, c, d) = (lc::<R>(self.a), lc::<R>(self.b), lc::<R>(self.c), lc::<R>(self.d));
        let z = Complex::new(q[0], q[1]);
        let h2 = q[2] * q[2];
        let czd = c * z + d;
        let den = norm2(czd) + norm2(c) * h2;
        let num = (a * z + b) * czd.conj() + a * c.conj() * Complex::new(h2, R::zero());
        [num.re / den, num.im / den, q[2] / den]
    }

    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match *p {
            BoundaryPoint::Plane(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Plane((self.a * z + self.b) / den)
                }
            }
            BoundaryPoint::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Plane(self.a / self.c)
                }
            }
            BoundaryPoint::Sphere(_) => *p,
        }
    }
}

/// `x ↦ O · T_a(x)` with `O` a rotation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallIsometry {
    pub rotation: [[f64; 3]; 3],
    pub a: [f64; 3],
}

impl BallIsometry {
    pub fn random(rng: &mut impl Rng, max_shift: f64) -> Self {
        let a = loop {
            let p = [
                rng.gen_range(-max_shift..max_shift),
                rng.gen_range(-max_shift..max_shift),
                rng.gen_range(-max_shift..max_shift),
            ];
            if dot(&p, &p) < max_shift * max_shift {
                break p;
            }
        };
        // rotation from a random unit quaternion
        let q = loop {
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let n = v.iter().map(|x| x * x).sum::<f64>();
            if n > 1e-3 && n < 1.0 {
                let s = n.sqrt();
                break v.map(|x| x / s);
            }
        };
        let [w, x, y, z] = q;
        let rotation = [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ];
        Self { rotation, a }
    }

    pub fn apply<R: Real>(&self, q: &[R; 3]) -> [R; 3] {
        let t = ball_mobius(&lift::<R>(&self.a), q);
        let o = &self.rotation;
        std::array::from_fn(|i| R::cst(o[i][0]) * t[0] + R::cst(o[i][1]) * t[1] + R::cst(o[i][2]) * t[2])
    }

    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Sphere(v) => BoundaryPoint::Sphere(self.apply::<f64>(v)),
            other => *other,
        }
    }
}
