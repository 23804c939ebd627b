//! Hyperbolic 3-space in the ball and upper half-space models: the geodesic
//! boundary map, the propagator forms `P₀`, `P̄₀`, `P₁`, half-space geodesic
//! coordinates and the cutoff `Θ_ℓ`.
//!
//! Everything that gets differentiated is written over [`Real`], so form
//! pullbacks are evaluated exactly with [`Jet`](crate::scalar::Jet) numbers.

pub mod cutoff;
pub mod forms;
pub mod isometry;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use cutoff::{boundary_distance, cutoff_theta, CutoffSpec, Expr};
pub use forms::{
    choose_chart, eval_p0, eval_p0_split, eval_p0_with, eval_p0bar, eval_p1,
    eval_p1_coordinate_form, p0_matrix, p1_direction, p1_matrix, Chart, Differentiation,
};
pub use isometry::{BallIsometry, HalfspaceIsometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Ball,
    Halfspace,
}

/// A point of the boundary sphere or of `ℂ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint {
    Sphere([f64; 3]),
    Plane(Complex64),
    Infinity,
}

/// A point of `Conf₂` of the ball (`|q| < 1`) or half-space (`q[2] > 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigPoint {
    pub model: Model,
    pub q1: [f64; 3],
    pub q2: [f64; 3],
}

impl ConfigPoint {
    pub fn new(model: Model, q1: [f64; 3], q2: [f64; 3]) -> Result<Self> {
        let inside = |q: &[f64; 3]| {
            q.iter().all(|x| x.is_finite())
                && match model {
                    Model::Ball => dot(q, q) < 1.0,
                    Model::Halfspace => q[2] > 0.0,
                }
        };
        if !inside(&q1) || !inside(&q2) {
            return Err(Error::InvalidConfig(format!(
                "points must lie strictly inside the {model:?} model"
            )));
        }
        if q1 == q2 {
            return Err(Error::CoincidentPoints);
        }
        Ok(Self { model, q1, q2 })
    }

    pub fn ball(q1: [f64; 3], q2: [f64; 3]) -> Result<Self> {
        Self::new(Model::Ball, q1, q2)
    }

    pub fn halfspace(q1: [f64; 3], q2: [f64; 3]) -> Result<Self> {
        Self::new(Model::Halfspace, q1, q2)
    }

    pub fn swapped(&self) -> Self {
        Self {
            q1: self.q2,
            q2: self.q1,
            ..*self
        }
    }
}

pub(crate) fn dot<R: Real>(a: &[R; 3], b: &[R; 3]) -> R {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn sub3<R: Real>(a: &[R; 3], b: &[R; 3]) -> [R; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale3<R: Real>(s: R, a: &[R; 3]) -> [R; 3] {
    [s * a[0], s * a[1], s * a[2]]
}

pub(crate) fn cross<R: Real>(a: &[R; 3], b: &[R; 3]) -> [R; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn lift<R: Real>(q: &[f64; 3]) -> [R; 3] {
    [R::cst(q[0]), R::cst(q[1]), R::cst(q[2])]
}

/// The ball isometry `T_a` sending `a` to the origin; `T_{-a}` is its inverse.
/// It extends to the boundary sphere.
pub fn ball_mobius<R: Real>(a: &[R; 3], x: &[R; 3]) -> [R; 3] {
    let one = R::one();
    let a2 = dot(a, a);
    let xa = sub3(x, a);
    let xa2 = dot(&xa, &xa);
    let den = one - R::cst(2.0) * dot(a, x) + a2 * dot(x, x);
    let k = (one - a2) / den;
    let m = xa2 / den;
    [
        k * xa[0] - m * a[0],
        k * xa[1] - m * a[1],
        k * xa[2] - m * a[2],
    ]
}

/// Endpoints `(z1, z2)` on the unit sphere of the geodesic through `q1`, `q2`.
pub fn ball_endpoints<R: Real>(q1: &[R; 3], q2: &[R; 3]) -> ([R; 3], [R; 3]) {
    let y = ball_mobius(q1, q2);
    let inv = R::one() / dot(&y, &y).sqrt();
    let yn = scale3(inv, &y);
    let neg = [-q1[0], -q1[1], -q1[2]];
    let z2 = ball_mobius(&neg, &yn);
    let z1 = ball_mobius(&neg, &scale3(-R::one(), &yn));
    (z1, z2)
}

/// Geodesic data in the half-space for non-vertical pairs: the endpoints and
/// the geodesic parameters `t1 < t2` with `p_i = z1 + t_i (z2 − z1)`.
pub fn halfspace_geodesic<R: Real>(
    q1: &[R; 3],
    q2: &[R; 3],
) -> (Complex<R>, Complex<R>, R, R) {
    let two = R::cst(2.0);
    let (wx, wy) = (q2[0] - q1[0], q2[1] - q1[1]);
    let len = (wx * wx + wy * wy).sqrt();
    let (dx, dy) = (wx / len, wy / len);
    let (h1, h2) = (q1[2], q2[2]);
    let sc = (len * len + h2 * h2 - h1 * h1) / (two * len);
    let rad = (sc * sc + h1 * h1).sqrt();
    // stable forms of sc − R and sc + R
    let (lo, hi) = if sc.value() > 0.0 {
        (-(h1 * h1) / (sc + rad), sc + rad)
    } else {
        (sc - rad, h1 * h1 / (rad - sc))
    };
    let z1 = Complex::new(q1[0] + lo * dx, q1[1] + lo * dy);
    let z2 = Complex::new(q1[0] + hi * dx, q1[1] + hi * dy);
    let t1 = -lo / (two * rad);
    let t2 = t1 + len / (two * rad);
    (z1, z2, t1, t2)
}

/// Endpoints of the geodesic through `cfg.q1`, `cfg.q2`; `z1` on the `q1` side.
pub fn geodesic_endpoints(cfg: &ConfigPoint) -> Result<(BoundaryPoint, BoundaryPoint)> {
    if cfg.q1 == cfg.q2 {
        return Err(Error::CoincidentPoints);
    }
    match cfg.model {
        Model::Ball => {
            let (z1, z2) = ball_endpoints::<f64>(&cfg.q1, &cfg.q2);
            Ok((BoundaryPoint::Sphere(z1), BoundaryPoint::Sphere(z2)))
        }
        Model::Halfspace => {
            let (q1, q2) = (&cfg.q1, &cfg.q2);
            if q1[0] == q2[0] && q1[1] == q2[1] {
                let base = BoundaryPoint::Plane(Complex64::new(q1[0], q1[1]));
                return Ok(if q1[2] < q2[2] {
                    (base, BoundaryPoint::Infinity)
                } else {
                    (BoundaryPoint::Infinity, base)
                });
            }
            let (z1, z2, _, _) = halfspace_geodesic::<f64>(q1, q2);
            Ok((BoundaryPoint::Plane(z1), BoundaryPoint::Plane(z2)))
        }
    }
}

/// Coordinates `(z, u, t₁, t₂)` of a non-vertical half-space pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceCoords {
    pub z: Complex64,
    pub u: Complex64,
    pub t1: f64,
    pub t2: f64,
}

/// Half-space coordinates, with vertical geodesics kept separate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeodesicCoords {
    Regular(HalfspaceCoords),
    /// Both points above `base`, at heights `h1 != h2`.
    Vertical { base: Complex64, h1: f64, h2: f64 },
}

impl HalfspaceCoords {
    pub fn to_config(&self) -> Result<ConfigPoint> {
        let (q1, q2) = coords_to_points::<f64>(
            Complex::new(self.z.re, self.z.im),
            Complex::new(self.u.re, self.u.im),
            self.t1,
            self.t2,
        );
        ConfigPoint::halfspace(q1, q2)
    }
}

impl GeodesicCoords {
    pub fn to_config(&self) -> Result<ConfigPoint> {
        match *self {
            GeodesicCoords::Regular(c) => c.to_config(),
            GeodesicCoords::Vertical { base, h1, h2 } => {
                ConfigPoint::halfspace([base.re, base.im, h1], [base.re, base.im, h2])
            }
        }
    }
}

/// Points `q_i = (z + t_i u, |u| √(t_i (1 − t_i)))`.
pub fn coords_to_points<R: Real>(z: Complex<R>, u: Complex<R>, t1: R, t2: R) -> ([R; 3], [R; 3]) {
    let mu = (u.re * u.re + u.im * u.im).sqrt();
    let pt = |t: R| {
        [
            z.re + t * u.re,
            z.im + t * u.im,
            mu * (t * (R::one() - t)).sqrt(),
        ]
    };
    (pt(t1), pt(t2))
}

pub fn to_halfspace_coords(cfg: &ConfigPoint) -> Result<GeodesicCoords> {
    if cfg.model != Model::Halfspace {
        return Err(Error::WrongModel("half-space coordinates need the half-space model"));
    }
    let (q1, q2) = (&cfg.q1, &cfg.q2);
    if q1[0] == q2[0] && q1[1] == q2[1] {
        return Ok(GeodesicCoords::Vertical {
            base: Complex64::new(q1[0], q1[1]),
            h1: q1[2],
            h2: q2[2],
        });
    }
    let (z1, z2, t1, t2) = halfspace_geodesic::<f64>(q1, q2);
    Ok(GeodesicCoords::Regular(HalfspaceCoords {
        z: z1,
        u: z2 - z1,
        t1,
        t2,
    }))
}

/// Residual of "the circle through `z1, q1, q2, z2` is orthogonal to the
/// boundary": distance of the four points from the circle through `q1`, `q2`
/// and the mirror image of `q1`, plus the boundary residual of the endpoints.
pub fn orthogonality_residual(cfg: &ConfigPoint) -> Result<f64> {
    let (e1, e2) = geodesic_endpoints(cfg)?;
    let (mirror, z1, z2) = match (cfg.model, e1, e2) {
        (Model::Ball, BoundaryPoint::Sphere(a), BoundaryPoint::Sphere(b)) => {
            // inversion in the unit sphere
            let r2 = dot(&cfg.q1, &cfg.q1);
            if r2 < 1e-12 {
                // the geodesic is a diameter: check collinearity instead
                let d = sub3(&cfg.q2, &cfg.q1);
                let res = [a, b]
                    .iter()
                    .map(|z| norm(&cross(&sub3(z, &cfg.q1), &d)) / norm(&d))
                    .fold(0.0, f64::max);
                return Ok(res.max((dot(&a, &a) - 1.0).abs()).max((dot(&b, &b) - 1.0).abs()));
            }
            (scale3(1.0 / r2, &cfg.q1), a, b)
        }
        (Model::Halfspace, BoundaryPoint::Plane(a), BoundaryPoint::Plane(b)) => (
            [cfg.q1[0], cfg.q1[1], -cfg.q1[2]],
            [a.re, a.im, 0.0],
            [b.re, b.im, 0.0],
        ),
        (Model::Halfspace, _, _) => {
            // vertical line: endpoints are exactly the base point and ∞
            return Ok(0.0);
        }
        _ => unreachable!("endpoints match the model"),
    };
    let (center, radius, normal) = circle_through(&cfg.q1, &cfg.q2, &mirror);
    let mut res: f64 = 0.0;
    for p in [&z1, &z2] {
        let d = sub3(p, &center);
        res = res.max(dot(&d, &normal).abs());
        res = res.max((norm(&d) - radius).abs() / radius.max(1.0));
    }
    if cfg.model == Model::Ball {
        res = res.max((dot(&z1, &z1) - 1.0).abs()).max((dot(&z2, &z2) - 1.0).abs());
    }
    Ok(res)
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Center, radius and unit normal of the circle through three points.
fn circle_through(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> ([f64; 3], f64, [f64; 3]) {
    let ab = sub3(b, a);
    let ac = sub3(c, a);
    let n = cross(&ab, &ac);
    let n2 = dot(&n, &n);
    let t1 = scale3(dot(&ac, &ac), &cross(&n, &ab));
    let t2 = scale3(dot(&ab, &ab), &cross(&ac, &n));
    let off = scale3(0.5 / n2, &[t1[0] + t2[0], t1[1] + t2[1], t1[2] + t2[2]]);
    let center = [a[0] + off[0], a[1] + off[1], a[2] + off[2]];
    (center, norm(&off), scale3(1.0 / n2.sqrt(), &n))
}
