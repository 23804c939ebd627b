//! The logarithmically divergent two-point integrals
//!
//! `I = ∫ r*(Θ_{εℓ₁} − Θ_{εℓ₂}) P₀ P̄₀ p₁*α p₂*β` and
//! `J = ∫ r*(Θ_{εℓ₁} − Θ_{εℓ₂}) P₀ P₁ p₂*α`
//!
//! on `Conf₂(H³)`, estimated by importance sampling in the chart
//! `(z, u, t₁, t₂)` and compared with their `ε → 0` limits
//! `−(1/2π) ∫ log(ℓ₁/ℓ₂) α⁽¹⁾ ∧ *β⁽¹⁾` and `−(1/4πi) ∫ log(ℓ₁/ℓ₂) α`.

use std::f64::consts::PI;

use nalgebra::Matrix6;
use num_complex::{Complex, Complex64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::exterior::{top_coefficient, Form};
use super::mc::{estimate, MCEstimate, McOptions};
use super::{Rect, TestForm};
use crate::error::{Error, Result};
use crate::geometry::{
    coords_to_points, cutoff_theta, p0_matrix, p1_matrix, BoundaryPoint, ConfigPoint, CutoffSpec, Model,
};
use crate::scalar::Jet;

pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Orientation of `Conf₂(H³)` relative to the product orientation of `H³ × H³`.
pub const CONF2_ORIENTATION: f64 = -1.0;

/// Grid used to bound the cutoff functions over the sampling rectangle.
const ELL_GRID: usize = 48;
const ELL_MARGIN: f64 = 1.25;

fn check_cutoff(spec: &CutoffSpec) -> Result<()> {
    if spec.model != Model::Halfspace {
        return Err(Error::WrongModel("verification runs on the half-space model"));
    }
    Ok(())
}

fn same_cutoff(a: &CutoffSpec, b: &CutoffSpec) -> bool {
    a.text().trim() == b.text().trim()
        || matches!((a.expr().as_constant(), b.expr().as_constant()), (Some(x), Some(y)) if x == y)
}

fn ell_range(specs: [&CutoffSpec; 2], r: &Rect) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..=ELL_GRID {
        for j in 0..=ELL_GRID {
            let x = r.lo[0] + (r.hi[0] - r.lo[0]) * i as f64 / ELL_GRID as f64;
            let y = r.lo[1] + (r.hi[1] - r.lo[1]) * j as f64 / ELL_GRID as f64;
            for s in specs {
                let l = s.ell([x, y, 0.0]);
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
    }
    (lo, hi)
}

/// Sampler for `(z, u, t₁, t₂)` concentrated on the shell where the two
/// cutoffs differ.
struct ShellSampler {
    rect: Rect,
    umin: f64,
    umax: f64,
}

struct ChartSample {
    z: Complex64,
    u: Complex64,
    t1: f64,
    t2: f64,
    density: f64,
}

impl ShellSampler {
    /// `None` when no configuration with both endpoints in the shell meets the supports.
    fn new(footprints: &[Rect], floor: f64, ell: [&CutoffSpec; 2], epsilon: f64) -> Option<Self> {
        let mut rect = footprints[0];
        for f in &footprints[1..] {
            rect = rect.intersect(f)?;
        }
        let (lo, hi) = ell_range(ell, &rect.expand(0.05 * rect.area().sqrt()));
        let (umin, umax) = (epsilon * lo / 2.0, epsilon * hi * ELL_MARGIN);
        // heights are at most |u|/2
        if floor >= umax / 2.0 {
            return None;
        }
        Some(Self { rect: rect.expand(umax), umin, umax })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> ChartSample {
        let r = &self.rect;
        let z = Complex64::new(rng.gen_range(r.lo[0]..r.hi[0]), rng.gen_range(r.lo[1]..r.hi[1]));
        let log_span = (self.umax / self.umin).ln();
        let rho = self.umin * (log_span * rng.gen::<f64>()).exp();
        let phi = 2.0 * PI * rng.gen::<f64>();
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let (t1, t2) = if a < b { (a, b) } else { (b, a) };
        ChartSample {
            z,
            u: Complex64::from_polar(rho, phi),
            t1,
            t2,
            density: 2.0 / (r.area() * 2.0 * PI * log_span * rho * rho),
        }
    }
}

/// Chart point, its configuration, the pushed-forward coordinate frame
/// `∂/∂(Re z, Im z, Re u, Im u, t₁, t₂)` and the orientation sign of the chart.
struct Frame {
    cfg: ConfigPoint,
    vecs: [[f64; 6]; 6],
    sign: f64,
}

fn frame(s: &ChartSample) -> Option<Frame> {
    let v = |re: f64, k: usize| Jet::<6>::variable(re, k);
    let z = Complex::new(v(s.z.re, 0), v(s.z.im, 1));
    let u = Complex::new(v(s.u.re, 2), v(s.u.im, 3));
    let (q1, q2) = coords_to_points(z, u, v(s.t1, 4), v(s.t2, 5));
    let cfg = ConfigPoint::halfspace(q1.map(|x| x.re), q2.map(|x| x.re)).ok()?;
    let vecs: [[f64; 6]; 6] =
        std::array::from_fn(|k| std::array::from_fn(|c| if c < 3 { q1[c].du[k] } else { q2[c - 3].du[k] }));
    let det = Matrix6::from_fn(|i, j| vecs[j][i]).determinant();
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some(Frame { cfg, vecs, sign: det.signum() })
}

fn delta_theta(ell: [&CutoffSpec; 2], s: &ChartSample) -> f64 {
    let (a, b) = (BoundaryPoint::Plane(s.z), BoundaryPoint::Plane(s.z + s.u));
    cutoff_theta(ell[0], &a, &b) as f64 - cutoff_theta(ell[1], &a, &b) as f64
}

fn point_frame(f: &Frame, second: bool) -> ([f64; 3], [[f64; 3]; 6]) {
    let off = if second { 3 } else { 0 };
    let q = if second { f.cfg.q2 } else { f.cfg.q1 };
    (q, std::array::from_fn(|k| std::array::from_fn(|c| f.vecs[k][off + c])))
}

const IDX: [usize; 6] = [0, 1, 2, 3, 4, 5];

fn with_epsilon(ell: &CutoffSpec, epsilon: f64) -> Result<CutoffSpec> {
    check_cutoff(ell)?;
    ell.with_epsilon(epsilon)
}

/// Monte Carlo estimate of `I` at cutoff scale `epsilon`.
pub fn lemma_lhs(
    alpha: &TestForm,
    beta: &TestForm,
    ell1: &CutoffSpec,
    ell2: &CutoffSpec,
    epsilon: f64,
    opts: &McOptions,
) -> Result<MCEstimate> {
    if alpha.degree + beta.degree != 2 {
        return Err(Error::InvalidConfig("α and β must have total degree 2".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    let (l1, l2) = (with_epsilon(ell1, epsilon)?, with_epsilon(ell2, epsilon)?);
    if same_cutoff(&l1, &l2) {
        return Ok(MCEstimate::exact_zero(opts.seed));
    }
    let Some(sampler) = ShellSampler::new(
        &[alpha.footprint(), beta.footprint()],
        alpha.floor().max(beta.floor()),
        [&l1, &l2],
        epsilon,
    ) else {
        return Ok(MCEstimate::exact_zero(opts.seed));
    };
    estimate(opts, |rng| {
        let s = sampler.sample(rng);
        let dt = delta_theta([&l1, &l2], &s);
        if dt == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let Some(f) = frame(&s) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let p0 = p0_matrix(&f.cfg, &f.vecs)?;
        let p0bar = p0.map(|row| row.map(|x| x.conj()));
        let (q1, e1) = point_frame(&f, false);
        let (q2, e2) = point_frame(&f, true);
        let factors = [
            Form::two_form(&IDX, &p0),
            Form::two_form(&IDX, &p0bar),
            alpha.on_frame(&q1, &IDX, &e1),
            beta.on_frame(&q2, &IDX, &e2),
        ];
        Ok(top_coefficient(&factors, 6) * (CONF2_ORIENTATION * dt * f.sign / s.density))
    })
}

/// Monte Carlo estimate of `J` for a 2-form `alpha` at the second point.
pub fn courant_lhs(
    alpha: &TestForm,
    ell1: &CutoffSpec,
    ell2: &CutoffSpec,
    epsilon: f64,
    opts: &McOptions,
) -> Result<MCEstimate> {
    if alpha.degree != 2 {
        return Err(Error::InvalidConfig("α must be a 2-form".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    let (l1, l2) = (with_epsilon(ell1, epsilon)?, with_epsilon(ell2, epsilon)?);
    if same_cutoff(&l1, &l2) {
        return Ok(MCEstimate::exact_zero(opts.seed));
    }
    let Some(sampler) = ShellSampler::new(&[alpha.footprint()], alpha.floor(), [&l1, &l2], epsilon) else {
        return Ok(MCEstimate::exact_zero(opts.seed));
    };
    estimate(opts, |rng| {
        let s = sampler.sample(rng);
        let dt = delta_theta([&l1, &l2], &s);
        if dt == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let Some(f) = frame(&s) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let p0 = p0_matrix(&f.cfg, &f.vecs)?;
        let p1 = p1_matrix(&f.cfg, &f.vecs)?.map(|row| row.map(|x| Complex64::new(x, 0.0)));
        let (q2, e2) = point_frame(&f, true);
        let factors = [
            Form::two_form(&IDX, &p0),
            Form::two_form(&IDX, &p1),
            alpha.on_frame(&q2, &IDX, &e2),
        ];
        Ok(top_coefficient(&factors, 6) * (CONF2_ORIENTATION * dt * f.sign / s.density))
    })
}

const RHS_TOL: f64 = 1e-11;

/// Discs where the forms meet the boundary plane: `(cx, cy, radius)`.
fn boundary_discs(forms: &[&TestForm]) -> Vec<(f64, f64, f64)> {
    forms
        .iter()
        .flat_map(|f| f.pieces.iter())
        .filter(|b| b.center[2].abs() < b.radius)
        .map(|b| (b.center[0], b.center[1], (b.radius * b.radius - b.center[2] * b.center[2]).sqrt()))
        .collect()
}

fn de(f: impl Fn(f64) -> f64, breaks: &mut Vec<f64>) -> f64 {
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
        .windows(2)
        .map(|w| quadrature::double_exponential::integrate(&f, w[0], w[1], RHS_TOL).integral)
        .sum()
}

/// `∫∫ f dx dy` over the plane for `f` supported in the union of `discs`.
///
/// Both nested integrals are split where a disc boundary crosses, so each
/// panel has a smooth integrand for the double-exponential rule.
fn integrate_plane(discs: &[(f64, f64, f64)], f: impl Fn(f64, f64) -> f64) -> f64 {
    if discs.is_empty() {
        return 0.0;
    }
    let mut xs: Vec<f64> = discs.iter().flat_map(|d| [d.0 - d.2, d.0 + d.2]).collect();
    de(
        |x| {
            let mut ys: Vec<f64> = discs
                .iter()
                .filter(|d| (x - d.0).abs() < d.2)
                .flat_map(|d| {
                    let w = (d.2 * d.2 - (x - d.0).powi(2)).sqrt();
                    [d.1 - w, d.1 + w]
                })
                .collect();
            if ys.is_empty() {
                return 0.0;
            }
            de(|y| f(x, y), &mut ys)
        },
        &mut xs,
    )
}

fn log_ratio(ell1: &CutoffSpec, ell2: &CutoffSpec, x: f64, y: f64) -> f64 {
    (ell1.ell([x, y, 0.0]) / ell2.ell([x, y, 0.0])).ln()
}

/// `−(1/2π) ∫ log(ℓ₁/ℓ₂) α⁽¹⁾|∧*β⁽¹⁾` over the boundary plane.
pub fn lemma_rhs(alpha: &TestForm, beta: &TestForm, ell1: &CutoffSpec, ell2: &CutoffSpec) -> Result<f64> {
    check_cutoff(ell1)?;
    check_cutoff(ell2)?;
    if alpha.degree != 1 || beta.degree != 1 || same_cutoff(ell1, ell2) {
        return Ok(0.0);
    }
    let integral = integrate_plane(&boundary_discs(&[alpha, beta]), |x, y| {
        let (a, b) = (alpha.eval::<f64>(&[x, y, 0.0]), beta.eval::<f64>(&[x, y, 0.0]));
        let ab = a[0] * b[0] + a[1] * b[1];
        if ab == 0.0 {
            0.0
        } else {
            log_ratio(ell1, ell2, x, y) * ab
        }
    });
    Ok(-integral / (2.0 * PI))
}

/// `−(1/4πi) ∫ log(ℓ₁/ℓ₂) α` over the boundary plane.
pub fn courant_rhs(alpha: &TestForm, ell1: &CutoffSpec, ell2: &CutoffSpec) -> Result<Complex64> {
    check_cutoff(ell1)?;
    check_cutoff(ell2)?;
    if alpha.degree != 2 || same_cutoff(ell1, ell2) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let integral = integrate_plane(&boundary_discs(&[alpha]), |x, y| {
        let f = alpha.eval::<f64>(&[x, y, 0.0])[0];
        if f == 0.0 {
            0.0
        } else {
            log_ratio(ell1, ell2, x, y) * f
        }
    });
    Ok(-Complex64::new(integral, 0.0) / Complex64::new(0.0, 4.0 * PI))
}
