//! Scaling of one-loop cycles near the boundary diagonal.
//!
//! `I_ε` integrates the cycle over configurations that are not all within
//! `ε` of a common boundary point. The difference `I_{ε'} − I_ε` between
//! adjacent grid points is a shell integral, estimated by Monte Carlo, and
//! `ε dI/dε` is fitted to a power law.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::exterior::{top_coefficient, Form};
use super::mc::{estimate, MCEstimate, McOptions};
use super::{Rect, TestForm};
use crate::error::{Error, Result};
use crate::geometry::{p0_matrix, p1_matrix, ConfigPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagator {
    P0,
    P0Bar,
    P1,
    P1Op,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// Geometric mean of the two grid points bounding the shell.
    pub epsilon: f64,
    pub shell: MCEstimate,
    /// `ε dI/dε` at `epsilon`.
    pub derivative: Complex64,
    pub derivative_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub n_vertices: usize,
    pub points: Vec<ScanPoint>,
    pub slope: f64,
    pub slope_stderr: f64,
    /// 95% confidence half-width.
    pub slope_ci: f64,
}

pub const MIN_GRID: usize = 4;

/// `min over c ∈ ℂ of max_i |q_i − (c, 0)|`.
pub fn excision_radius(qs: &[[f64; 3]]) -> f64 {
    let cost = |c: [f64; 2]| {
        qs.iter()
            .map(|q| (q[0] - c[0]).powi(2) + (q[1] - c[1]).powi(2) + q[2] * q[2])
            .fold(0.0f64, f64::max)
    };
    let mut best = f64::INFINITY;
    let n = qs.len();
    for i in 0..n {
        best = best.min(cost([qs[i][0], qs[i][1]]));
        for j in i + 1..n {
            let d = [qs[j][0] - qs[i][0], qs[j][1] - qs[i][1]];
            let d2 = d[0] * d[0] + d[1] * d[1];
            if d2 > 0.0 {
                let lam = 0.5 * (1.0 + (qs[j][2].powi(2) - qs[i][2].powi(2)) / d2);
                best = best.min(cost([qs[i][0] + lam * d[0], qs[i][1] + lam * d[1]]));
            }
            for k in j + 1..n {
                // equal lifted distance to i, j, k
                let row = |a: usize| {
                    let b = &qs[a];
                    let c = &qs[i];
                    (
                        2.0 * (b[0] - c[0]),
                        2.0 * (b[1] - c[1]),
                        b[0] * b[0] + b[1] * b[1] + b[2] * b[2] - c[0] * c[0] - c[1] * c[1] - c[2] * c[2],
                    )
                };
                let (a1, b1, r1) = row(j);
                let (a2, b2, r2) = row(k);
                let det = a1 * b2 - a2 * b1;
                if det.abs() > 1e-300 {
                    best = best.min(cost([(r1 * b2 - r2 * b1) / det, (a1 * r2 - a2 * r1) / det]));
                }
            }
        }
    }
    best.sqrt()
}

/// Mixture of chain samplers, one per cycle edge left open.
struct ChainSampler {
    n: usize,
    rect: Rect,
    eps: f64,
}

impl ChainSampler {
    fn link_density(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let r2 = (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>();
        let reach = 2.0 * self.eps;
        if r2 >= reach * reach || r2 == 0.0 {
            0.0
        } else {
            1.0 / (4.0 * PI * r2 * reach)
        }
    }

    fn base_density(&self, q: &[f64; 3]) -> f64 {
        let r = &self.rect;
        let inside = (r.lo[0]..r.hi[0]).contains(&q[0])
            && (r.lo[1]..r.hi[1]).contains(&q[1])
            && q[2] > 0.0
            && q[2] < self.eps;
        if inside {
            1.0 / (r.area() * self.eps)
        } else {
            0.0
        }
    }

    fn density(&self, qs: &[[f64; 3]]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for s in 0..n {
            let mut p = self.base_density(&qs[s]);
            for k in 0..n - 1 {
                if p == 0.0 {
                    break;
                }
                p *= self.link_density(&qs[(s + k) % n], &qs[(s + k + 1) % n]);
            }
            total += p;
        }
        total / n as f64
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
        let n = self.n;
        let s = rng.gen_range(0..n);
        let r = &self.rect;
        let mut qs = vec![[0.0; 3]; n];
        qs[s] = [
            rng.gen_range(r.lo[0]..r.hi[0]),
            rng.gen_range(r.lo[1]..r.hi[1]),
            self.eps * (1.0 - rng.gen::<f64>()),
        ];
        for k in 0..n - 1 {
            let prev = qs[(s + k) % n];
            let rad = 2.0 * self.eps * rng.gen::<f64>();
            let cz: f64 = rng.gen_range(-1.0..1.0);
            let phi = 2.0 * PI * rng.gen::<f64>();
            let sz = (1.0 - cz * cz).sqrt();
            qs[(s + k + 1) % n] = [
                prev[0] + rad * sz * phi.cos(),
                prev[1] + rad * sz * phi.sin(),
                prev[2] + rad * cz,
            ];
        }
        qs
    }
}

const EYE: [[f64; 6]; 6] = {
    let mut m = [[0.0; 6]; 6];
    let mut i = 0;
    while i < 6 {
        m[i][i] = 1.0;
        i += 1;
    }
    m
};

fn edge_form(kind: Propagator, qs: &[[f64; 3]], i: usize, j: usize) -> Result<Form> {
    let (a, b, idx) = match kind {
        Propagator::P1Op => (j, i, [3 * j, 3 * j + 1, 3 * j + 2, 3 * i, 3 * i + 1, 3 * i + 2]),
        _ => (i, j, [3 * i, 3 * i + 1, 3 * i + 2, 3 * j, 3 * j + 1, 3 * j + 2]),
    };
    let cfg = ConfigPoint::halfspace(qs[a], qs[b])?;
    let m = match kind {
        Propagator::P0 => p0_matrix(&cfg, &EYE)?,
        Propagator::P0Bar => p0_matrix(&cfg, &EYE)?.map(|r| r.map(|x| x.conj())),
        Propagator::P1 | Propagator::P1Op => {
            p1_matrix(&cfg, &EYE)?.map(|r| r.map(|x| Complex64::new(x, 0.0)))
        }
    };
    Ok(Form::two_form(&idx, &m))
}

/// Integrand of the cycle on the standard frame of `(H³)ⁿ`.
fn cycle_value(forms: &[TestForm], edges: &[Propagator], qs: &[[f64; 3]]) -> Result<Complex64> {
    let n = qs.len();
    let mut factors = Vec::with_capacity(2 * n);
    for (k, q) in qs.iter().enumerate() {
        let f = forms[k].on_frame(q, &[3 * k, 3 * k + 1, 3 * k + 2], &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        if f.terms.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        factors.push(f);
    }
    for (k, &e) in edges.iter().enumerate() {
        let (i, j) = if n == 2 && k == 1 { (1, 0) } else { (k, (k + 1) % n) };
        factors.push(edge_form(e, qs, i, j)?);
    }
    // interleave so that vertex coordinates retire early
    let mut ordered = Vec::with_capacity(factors.len());
    let (vf, ef) = factors.split_at(n);
    for k in 0..n {
        ordered.push(vf[k].clone());
        ordered.push(ef[k].clone());
    }
    Ok(top_coefficient(&ordered, 3 * n))
}

/// Default edge labels: alternating `P₀`, `P̄₀`.
pub fn alternating_edges(n: usize) -> Vec<Propagator> {
    (0..n).map(|k| if k % 2 == 0 { Propagator::P0 } else { Propagator::P0Bar }).collect()
}

const TURNS: usize = 4;

/// Shell integral over `eps_in ≤ D(q) < eps_out`.
fn shell(
    forms: &[TestForm],
    edges: &[Propagator],
    eps_in: f64,
    eps_out: f64,
    opts: &McOptions,
) -> Result<MCEstimate> {
    let mut rect = forms[0].footprint();
    for f in &forms[1..] {
        match rect.intersect(&f.footprint().expand(2.0 * eps_out)) {
            Some(r) => rect = r,
            None => return Ok(MCEstimate::exact_zero(opts.seed)),
        }
    }
    if forms.iter().any(|f| f.floor() >= eps_out) {
        return Ok(MCEstimate::exact_zero(opts.seed));
    }
    let sampler = ChainSampler { n: forms.len(), rect: rect.expand(2.0 * eps_out), eps: eps_out };
    estimate(opts, |rng| {
        let qs = sampler.sample(rng);
        if qs.iter().any(|q| q[2] <= 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let d = excision_radius(&qs);
        if !(eps_in..eps_out).contains(&d) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let p = sampler.density(&qs);
        if p == 0.0 {
            return Err(Error::Numeric("sample outside the sampler support".into()));
        }
        // average over equally spaced turns about the vertical axis through q_0;
        // each turn is a volume-preserving bijection that keeps D fixed
        let (cx, cy) = (qs[0][0], qs[0][1]);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..TURNS {
            let (s, c) = (2.0 * PI * k as f64 / TURNS as f64).sin_cos();
            let turned: Vec<[f64; 3]> = qs
                .iter()
                .map(|q| {
                    let (dx, dy) = (q[0] - cx, q[1] - cy);
                    [cx + c * dx - s * dy, cy + s * dx + c * dy, q[2]]
                })
                .collect();
            acc += cycle_value(forms, edges, &turned)?;
        }
        Ok(acc / (TURNS as f64 * p))
    })
}

/// Weighted least-squares slope of `log|ε dI/dε|` against `log ε`.
fn fit(points: &[ScanPoint]) -> Result<(f64, f64)> {
    let data: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|p| p.derivative.norm() > 0.0)
        .map(|p| {
            let y = p.derivative.norm();
            let sy = (p.derivative_stderr / y).max(1e-12);
            (p.epsilon.ln(), y.ln(), 1.0 / (sy * sy))
        })
        .collect();
    if data.len() < 3 {
        return Err(Error::Numeric("fewer than three nonzero shells to fit".into()));
    }
    let sw: f64 = data.iter().map(|d| d.2).sum();
    let xm = data.iter().map(|d| d.2 * d.0).sum::<f64>() / sw;
    let ym = data.iter().map(|d| d.2 * d.1).sum::<f64>() / sw;
    let sxx: f64 = data.iter().map(|d| d.2 * (d.0 - xm).powi(2)).sum();
    let sxy: f64 = data.iter().map(|d| d.2 * (d.0 - xm) * (d.1 - ym)).sum();
    let slope = sxy / sxx;
    let chi2: f64 = data.iter().map(|d| d.2 * (d.1 - ym - slope * (d.0 - xm)).powi(2)).sum();
    let red = chi2 / (data.len() - 2) as f64;
    Ok((slope, (red.max(1.0) / sxx).sqrt()))
}

/// Scans `ε dI_ε/dε` over `epsilons` and fits its power law.
///
/// `edges[k]` joins vertices `k` and `k + 1` (cyclically); for two vertices
/// both edges join the pair. Each shell uses `opts.n` samples with a seed
/// derived from `opts.seed` and the shell index.
pub fn convergence_scan(
    forms: &[TestForm],
    edges: Option<&[Propagator]>,
    epsilons: &[f64],
    opts: &McOptions,
) -> Result<ScanResult> {
    let n = forms.len();
    if !(2..=5).contains(&n) {
        return Err(Error::InvalidConfig(format!("cycle length {n} outside 2..=5")));
    }
    let degree: usize = forms.iter().map(|f| f.degree as usize).sum();
    if degree != n {
        return Err(Error::InvalidConfig(format!(
            "form degrees sum to {degree}, the cycle needs {n}"
        )));
    }
    let edges = match edges {
        Some(e) if e.len() != n => {
            return Err(Error::InvalidConfig(format!("{} edge labels for {n} edges", e.len())))
        }
        Some(e) => e.to_vec(),
        None => alternating_edges(n),
    };
    if epsilons.len() < MIN_GRID {
        return Err(Error::InvalidConfig(format!(
            "epsilon grid needs at least {MIN_GRID} points, got {}",
            epsilons.len()
        )));
    }
    let mut grid = epsilons.to_vec();
    if grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidConfig("epsilons must be positive".into()));
    }
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    if grid.len() < MIN_GRID {
        return Err(Error::InvalidConfig("epsilon grid has repeated points".into()));
    }
    let mut points = Vec::with_capacity(grid.len() - 1);
    for (k, w) in grid.windows(2).enumerate() {
        let (outer, inner) = (w[0], w[1]);
        let mut o = *opts;
        o.seed = opts.seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let s = shell(forms, &edges, inner, outer, &o)?;
        let span = (outer / inner).ln();
        points.push(ScanPoint {
            epsilon: (outer * inner).sqrt(),
            shell: s,
            derivative: -s.value / span,
            derivative_stderr: s.stderr / span,
        });
    }
    let (slope, se) = fit(&points)?;
    Ok(ScanResult { n_vertices: n, points, slope, slope_stderr: se, slope_ci: 1.96 * se })
}
