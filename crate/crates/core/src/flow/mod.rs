//! The one-loop generalized Ricci tensor, the beta operator and the flow of
//! generalized metrics, plus the Courant-algebroid generalization.
//!
//! The flow is `dτ/ds = [ħB(τ), τ]` with `s = log ε`. Since `B` is
//! pairing-antisymmetric, every update is a conjugation by a pairing-orthogonal
//! exponential and the metric invariants are preserved up to roundoff.

pub mod courant;
pub mod master;

use nalgebra::DMatrix;

use crate::algebra::{
    metric_report, GeneralizedMetric, QuadraticLieAlgebra, DEFAULT_TOL,
};
use crate::diagrams::{contract, contract_courant, eye_diagram, ggric_diagrams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use courant::CourantData;
pub use master::{hamiltonian, master_bracket, master_equation_residual, GradedPoly};

/// `T_D`, the eye diagram contracted to an `n × n` matrix with upper indices.
pub fn t_d<T: Scalar>(alg: &QuadraticLieAlgebra<T>, metric: &GeneralizedMetric<T>) -> Result<DMatrix<T>> {
    contract(&eye_diagram(), alg, metric)?.matrix()
}

/// The generalized Ricci tensor `−T_D`.
pub fn generalized_ricci<T: Scalar>(
    alg: &QuadraticLieAlgebra<T>,
    metric: &GeneralizedMetric<T>,
) -> Result<DMatrix<T>> {
    Ok(-t_d(alg, metric)?)
}

/// Largest entry of the `V₊⊗V₊` and `V₋⊗V₋` blocks of an upper-index tensor.
pub fn off_block_residual<T: Scalar>(metric: &GeneralizedMetric<T>, m: &DMatrix<T>) -> f64 {
    let pp = metric.pplus() * m * metric.pplus().transpose();
    let mm = metric.pminus() * m * metric.pminus().transpose();
    pp.amax().as_f64().max(mm.amax().as_f64())
}

/// The beta operator from an upper-index tensor `T`: the bivector
/// `R = (T − Tᵀ)/2π` acting as `B = Rᵀη`, i.e. `⟨Bv, w⟩ = ⟨R, v⊗w⟩`.
pub fn beta_from_td<T: Scalar>(alg: &QuadraticLieAlgebra<T>, td: &DMatrix<T>) -> DMatrix<T> {
    let r = (td - td.transpose()) / T::two_pi();
    r.transpose() * alg.pairing()
}

pub fn beta<T: Scalar>(alg: &QuadraticLieAlgebra<T>, metric: &GeneralizedMetric<T>) -> Result<DMatrix<T>> {
    Ok(beta_from_td(alg, &t_d(alg, metric)?))
}

/// `‖ηB + Bᵀη‖_∞`
pub fn beta_antisymmetry<T: Scalar>(alg: &QuadraticLieAlgebra<T>, b: &DMatrix<T>) -> f64 {
    let eta = alg.pairing();
    (eta * b + b.transpose() * eta).amax().as_f64()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState<T: Scalar> {
    pub s: f64,
    pub metric: GeneralizedMetric<T>,
    /// Frobenius norm of `T_D`.
    pub residual: f64,
}

impl<T: Scalar> FlowState<T> {
    pub fn new(alg: &QuadraticLieAlgebra<T>, metric: GeneralizedMetric<T>, s: f64) -> Result<Self> {
        let residual = t_d(alg, &metric)?.norm().as_f64();
        Ok(Self { s, metric, residual })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// First-order Lie–Euler.
    LieEuler,
    /// Fourth-order Runge–Kutta–Munthe-Kaas.
    Rkmk4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOptions {
    pub scheme: Scheme,
    /// Tolerance on the metric invariants after a step.
    pub tol: f64,
    /// Smallest `|ds|` tried before giving up.
    pub min_ds: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            scheme: Scheme::Rkmk4,
            tol: DEFAULT_TOL,
            min_ds: 1e-12,
        }
    }
}

fn conj<T: Scalar>(x: &DMatrix<T>, tau: &DMatrix<T>) -> DMatrix<T> {
    let e = x.clone().exp();
    let einv = (-x).exp();
    e * tau * einv
}

fn comm<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a * b - b * a
}

/// One unchecked step of size `ds`, returning the new `τ`.
fn raw_step<T: Scalar>(
    alg: &QuadraticLieAlgebra<T>,
    tau: &DMatrix<T>,
    ds: T,
    hbar: T,
    scheme: Scheme,
) -> Result<DMatrix<T>> {
    let gen = |tau: &DMatrix<T>| -> Result<DMatrix<T>> {
        let metric = unchecked_metric(tau);
        Ok(beta(alg, &metric)? * (hbar * ds))
    };
    let half = T::lit(0.5);
    match scheme {
        Scheme::LieEuler => Ok(conj(&gen(tau)?, tau)),
        Scheme::Rkmk4 => {
            let k1 = gen(tau)?;
            let k2 = gen(&conj(&(&k1 * half), tau))?;
            let u3 = &k2 * half - comm(&k1, &k2) * T::lit(0.125);
            let k3 = gen(&conj(&u3, tau))?;
            let k4 = gen(&conj(&k3, tau))?;
            let v = (&k1 + (&k2 + &k3) * T::lit(2.0) + &k4) / T::lit(6.0)
                - comm(&k1, &k4) / T::lit(12.0);
            Ok(conj(&v, tau))
        }
    }
}

fn unchecked_metric<T: Scalar>(tau: &DMatrix<T>) -> GeneralizedMetric<T> {
    GeneralizedMetric::from_tau_unchecked(tau.clone())
}

/// Advances `state` by `ds` (halving on invariant violations down to
/// `opts.min_ds`); the returned state's `s` reflects the step actually taken.
pub fn flow_step<T: Scalar>(
    alg: &QuadraticLieAlgebra<T>,
    state: &FlowState<T>,
    ds: f64,
    hbar: f64,
    opts: &StepOptions,
) -> Result<FlowState<T>> {
    if ds == 0.0 || !ds.is_finite() {
        return Err(Error::InvalidConfig("ds must be finite and nonzero".into()));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidConfig("hbar must be positive".into()));
    }
    let mut h = ds;
    let mut last = String::new();
    while h.abs() >= opts.min_ds {
        let tau = raw_step(alg, state.metric.tau(), T::lit(h), T::lit(hbar), opts.scheme)?;
        let report = metric_report(alg, &tau);
        let v = report.violations(opts.tol);
        if v.is_empty() && tau.iter().all(|x| x.as_f64().is_finite()) {
            return FlowState::new(alg, unchecked_metric(&tau), state.s + h);
        }
        last = v.join("; ");
        h *= 0.5;
    }
    Err(Error::StepUnderflow {
        s: state.s,
        reason: if last.is_empty() {
            "non-finite state".into()
        } else {
            last
        },
    })
}

/// Result of [`integrate_flow`].
#[derive(Clone, Debug)]
pub struct Trajectory<T: Scalar> {
    pub states: Vec<FlowState<T>>,
    /// Set when integration stopped early.
    pub diagnostic: Option<String>,
}

/// Integrates from `s_span.0` to `s_span.1` with steps of size `|ds0|`,
/// shortening the last step to land exactly on the end point.
pub fn integrate_flow<T: Scalar>(
    alg: &QuadraticLieAlgebra<T>,
    metric0: &GeneralizedMetric<T>,
    s_span: (f64, f64),
    ds0: f64,
    hbar: f64,
    opts: &StepOptions,
) -> Result<Trajectory<T>> {
    let (s0, s1) = s_span;
    if !(s0.is_finite() && s1.is_finite()) || ds0 == 0.0 || !ds0.is_finite() {
        return Err(Error::InvalidConfig("invalid s span or step".into()));
    }
    let violations = metric_report(alg, metric0.tau()).violations(opts.tol);
    if !violations.is_empty() {
        return Err(Error::InvalidMetric(violations));
    }
    let dir = (s1 - s0).signum();
    let h = ds0.abs() * dir;
    let mut states = vec![FlowState::new(alg, metric0.clone(), s0)?];
    let mut diagnostic = None;
    let steps = ((s1 - s0) / h).abs();
    let nsteps = (steps - 1e-9).ceil().max(0.0) as usize;
    for k in 0..nsteps {
        let cur = states.last().expect("non-empty");
        // aim at the grid point s0 + (k+1)h to avoid drift
        let target = if k + 1 == nsteps { s1 } else { s0 + (k + 1) as f64 * h };
        let mut st = cur.clone();
        let mut failed = None;
        while (target - st.s) * dir > 1e-15 * (1.0 + target.abs()) {
            match flow_step(alg, &st, target - st.s, hbar, opts) {
                Ok(next) => st = next,
                Err(e) => {
                    failed = Some(e.to_string());
                    break;
                }
            }
        }
        if let Some(msg) = failed {
            diagnostic = Some(msg);
            break;
        }
        st.s = target;
        states.push(st);
    }
    Ok(Trajectory { states, diagnostic })
}

/// `T_{D′}` at `x`: the weighted sum of the three `D′` graphs.
pub fn courant_t_dprime<T: Scalar>(
    cdata: &CourantData<T>,
    x: &[T],
    metric: &GeneralizedMetric<T>,
) -> Result<DMatrix<T>> {
    let n = cdata.fiber_dim();
    let mut acc = DMatrix::zeros(n, n);
    for (coef, g) in ggric_diagrams() {
        let w = T::lit(*coef.numer() as f64 / *coef.denom() as f64);
        acc += contract_courant(&g, cdata, x, metric)?.matrix()? * w;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{metric_from_involution, random_metric, split_inverse};
    use nalgebra::DVector;

    fn subalgebra_split() -> (QuadraticLieAlgebra<f64>, GeneralizedMetric<f64>) {
        let alg = QuadraticLieAlgebra::su2_double();
        let tau = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0]));
        let m = metric_from_involution(&alg, tau, 1e-10).unwrap();
        (alg, m)
    }

    /// Rotation by `theta` in the `(e_a, e_{a+3})` plane, pairing-orthogonal for `diag(1,-1)`.
    pub(crate) fn boost(theta: f64, a: usize) -> DMatrix<f64> {
        let mut g = DMatrix::identity(6, 6);
        g[(a, a)] = theta.cosh();
        g[(a + 3, a + 3)] = theta.cosh();
        g[(a, a + 3)] = theta.sinh();
        g[(a + 3, a)] = theta.sinh();
        g
    }

    #[test]
    fn single_plane_rotation_stays_flat() {
        // one boosted plane leaves no index path through both vertices
        let (alg, m0) = subalgebra_split();
        for theta in [0.1, 0.7, 1.3] {
            let m = m0.conjugate(&alg, &boost(theta, 2), 1e-10).unwrap();
            assert!(t_d(&alg, &m).unwrap().amax() < 1e-14);
        }
    }

    #[test]
    fn rotated_splitting_has_nonzero_ricci() {
        let (alg, m0) = subalgebra_split();
        assert!(t_d(&alg, &m0).unwrap().amax() < 1e-15);
        let m = m0.conjugate(&alg, &(boost(0.3, 0) * boost(0.2, 1)), 1e-10).unwrap();
        let td = t_d(&alg, &m).unwrap();
        assert!(td.amax() > 1e-3);
        assert!(off_block_residual(&m, &td) < 1e-12);
        let b = beta(&alg, &m).unwrap();
        assert!(beta_antisymmetry(&alg, &b) < 1e-12);
        // B swaps V+ and V-
        assert!((m.pplus() * &b * m.pplus()).amax() < 1e-12);
        assert!((m.pminus() * &b * m.pminus()).amax() < 1e-12);
        assert_eq!(generalized_ricci(&alg, &m).unwrap(), -td);
    }

    #[test]
    fn beta_matches_index_formula() {
        let alg = QuadraticLieAlgebra::<f64>::su2_double();
        let m = random_metric(&alg, 9).unwrap();
        let td = t_d(&alg, &m).unwrap();
        let b = beta(&alg, &m).unwrap();
        let eta = alg.pairing();
        let n = 6;
        // <B v, w> = R^{ab} <e_a, v> <e_b, w>
        for (i, j) in [(0, 1), (2, 5), (4, 3)] {
            let (v, w) = (DVector::from_fn(n, |k, _| (k == i) as u8 as f64), DVector::from_fn(n, |k, _| (k == j) as u8 as f64));
            let lhs = ((&b * &v).transpose() * eta * &w)[(0, 0)];
            let mut rhs = 0.0;
            for a in 0..n {
                for c in 0..n {
                    let r = (td[(a, c)] - td[(c, a)]) / (2.0 * std::f64::consts::PI);
                    rhs += r * (eta.row(a) * &v)[(0, 0)] * (eta.row(c) * &w)[(0, 0)];
                }
            }
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn fixed_points_do_not_move() {
        let (alg, m) = subalgebra_split();
        let st = FlowState::new(&alg, m.clone(), 0.0).unwrap();
        let next = flow_step(&alg, &st, 0.5, 1.0, &StepOptions::default()).unwrap();
        assert_eq!(next.metric.tau(), m.tau());
        let ab = QuadraticLieAlgebra::<f64>::abelian(2, 2).unwrap();
        let mr = random_metric(&ab, 7).unwrap();
        let traj = integrate_flow(&ab, &mr, (0.0, 1.0), 0.1, 1.0, &StepOptions::default()).unwrap();
        assert_eq!(traj.states.len(), 11);
        assert!(traj.states.iter().all(|s| s.metric.tau() == mr.tau()));
    }

    fn endpoint(scheme: Scheme, steps: usize) -> DMatrix<f64> {
        let (alg, m0) = subalgebra_split();
        let m = m0.conjugate(&alg, &(boost(0.3, 0) * boost(0.2, 1)), 1e-10).unwrap();
        let opts = StepOptions {
            scheme,
            ..Default::default()
        };
        let traj = integrate_flow(&alg, &m, (0.0, 1.0), 1.0 / steps as f64, 1.0, &opts).unwrap();
        traj.states.last().unwrap().metric.tau().clone()
    }

    fn measured_order(scheme: Scheme, base: usize) -> f64 {
        let a = endpoint(scheme, base);
        let b = endpoint(scheme, 2 * base);
        let c = endpoint(scheme, 4 * base);
        ((&a - &b).norm() / (&b - &c).norm()).log2()
    }

    #[test]
    fn lie_euler_local_error_is_second_order() {
        let (alg, m0) = subalgebra_split();
        let m = m0.conjugate(&alg, &(boost(0.3, 0) * boost(0.2, 1)), 1e-10).unwrap();
        let st = FlowState::new(&alg, m, 0.0).unwrap();
        let opts = StepOptions {
            scheme: Scheme::LieEuler,
            ..Default::default()
        };
        let diff = |h: f64| {
            let one = flow_step(&alg, &st, h, 1.0, &opts).unwrap();
            let half = flow_step(&alg, &st, h / 2.0, 1.0, &opts).unwrap();
            let two = flow_step(&alg, &half, h / 2.0, 1.0, &opts).unwrap();
            (one.metric.tau() - two.metric.tau()).norm()
        };
        let order = (diff(0.1) / diff(0.05)).log2();
        assert!(order >= 1.9, "local order {order}");
    }

    #[test]
    fn integrator_orders() {
        let p1 = measured_order(Scheme::LieEuler, 8);
        assert!(p1 > 0.9 && p1 < 1.2, "Lie-Euler order {p1}");
        let p4 = measured_order(Scheme::Rkmk4, 2);
        assert!((p4 - 4.0).abs() < 0.3, "RKMK4 order {p4}");
    }

    #[test]
    fn courant_reduces_to_t_d() {
        let alg = QuadraticLieAlgebra::<f64>::su2_double();
        let m = random_metric(&alg, 4).unwrap();
        let d = CourantData::from_lie_algebra(&alg, 2).unwrap();
        let a = courant_t_dprime(&d, &[0.1, 0.2], &m).unwrap();
        assert_eq!(a, t_d(&alg, &m).unwrap());
        let s = split_inverse(&alg, &m);
        assert!((s.tplus.clone() + &s.tminus - s.t).amax() < 1e-15);
    }
}
