//! Quadratic Lie algebras, generalized metrics and the split inverse pairing.
//!
//! Conventions: `pairing[(a, b)] = ⟨e_a, e_b⟩` and the structure constants are
//! stored fully lowered, `structure(a, b, c) = ⟨[e_a, e_b], e_c⟩`. Raising goes
//! through the inverse pairing `t = η⁻¹`, so `[e_a, e_b] = c_abe t^{ed} e_d`.
//! A generalized metric is stored as the involution `τ` with `V± = ker(τ ∓ 1)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default residual tolerance for validation.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticLieAlgebra<T: Scalar> {
    dim: usize,
    pairing: DMatrix<T>,
    pairing_inv: DMatrix<T>,
    structure: Vec<T>,
    condition: f64,
}

/// Per-axiom maximum absolute residuals of a [`QuadraticLieAlgebra`].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ValidationReport {
    pub pairing_symmetry: f64,
    /// `max |c_abc + c_bac|`
    pub antisymmetry: f64,
    /// `max |c_abc + c_acb|`, i.e. ad-invariance of the pairing given antisymmetry.
    pub invariance: f64,
    pub jacobi: f64,
    pub condition: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl<T: Scalar> QuadraticLieAlgebra<T> {
    /// Builds an algebra from a pairing matrix and lowered structure constants
    /// (flat, row-major `c[a][b][c]`). Only the shapes and the invertibility of
    /// the pairing are enforced here; the Lie axioms are checked by [`validate`].
    ///
    /// [`validate`]: QuadraticLieAlgebra::validate
    pub fn new(pairing: DMatrix<T>, structure: Vec<T>) -> Result<Self> {
        let dim = pairing.nrows();
        if dim == 0 || pairing.ncols() != dim {
            return Err(Error::Dimension(format!(
                "pairing must be square and non-empty, got {}x{}",
                pairing.nrows(),
                pairing.ncols()
            )));
        }
        if structure.len() != dim * dim * dim {
            return Err(Error::Dimension(format!(
                "structure constants need {} entries, got {}",
                dim * dim * dim,
                structure.len()
            )));
        }
        let condition = condition_number(&pairing);
        let limit = 1e-2 / T::default_epsilon().as_f64();
        if !condition.is_finite() || condition > limit {
            return Err(Error::SingularPairing { condition });
        }
        let pairing_inv = pairing
            .clone()
            .try_inverse()
            .ok_or(Error::SingularPairing { condition })?;
        Ok(Self {
            dim,
            pairing,
            pairing_inv,
            structure,
            condition,
        })
    }

    /// Abelian algebra with pairing `diag(1,…,1,-1,…,-1)`.
    pub fn abelian(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidConfig("abelian(p, q) needs p + q >= 1".into()));
        }
        let n = p + q;
        let eta = DMatrix::from_fn(n, n, |i, j| {
            if i != j {
                T::zero()
            } else if i < p {
                T::one()
            } else {
                -T::one()
            }
        });
        Self::new(eta, vec![T::zero(); n * n * n])
    }

    /// su(2) with `c_abc = ε_abc` and the negative-definite pairing `-I`.
    pub fn su2() -> Self {
        let mut c = vec![T::zero(); 27];
        for (a, b, e, s) in levi_civita() {
            c[(a * 3 + b) * 3 + e] = T::lit(s);
        }
        Self::new(-DMatrix::identity(3, 3), c).expect("su2 pairing is regular")
    }

    /// `ḡ₀ ⊕ g₀` for `g₀ = su(2)`: the first block carries the opposite
    /// (positive) pairing, the second block the compact one. Both blocks are ideals.
    pub fn su2_double() -> Self {
        let mut eta = DMatrix::zeros(6, 6);
        for i in 0..3 {
            eta[(i, i)] = T::one();
            eta[(i + 3, i + 3)] = -T::one();
        }
        let mut c = vec![T::zero(); 216];
        for (a, b, e, s) in levi_civita() {
            // same bracket in both blocks; lowering with +I flips the sign
            c[(a * 6 + b) * 6 + e] = T::lit(-s);
            c[((a + 3) * 6 + b + 3) * 6 + e + 3] = T::lit(s);
        }
        Self::new(eta, c).expect("su2_double pairing is regular")
    }

    /// Rescales pairing and structure constants together (the bracket is unchanged).
    pub fn with_level(&self, level: T) -> Result<Self> {
        Self::new(
            &self.pairing * level,
            self.structure.iter().map(|&x| x * level).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairing(&self) -> &DMatrix<T> {
        &self.pairing
    }

    pub fn pairing_inv(&self) -> &DMatrix<T> {
        &self.pairing_inv
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn structure(&self) -> &[T] {
        &self.structure
    }

    #[inline]
    pub fn c(&self, a: usize, b: usize, c: usize) -> T {
        self.structure[(a * self.dim + b) * self.dim + c]
    }

    /// `f_ab^d` with `[e_a, e_b] = f_ab^d e_d`.
    pub fn bracket_coefficients(&self) -> Vec<T> {
        let n = self.dim;
        let mut f = vec![T::zero(); n * n * n];
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let mut s = T::zero();
                    for e in 0..n {
                        s += self.c(a, b, e) * self.pairing_inv[(e, d)];
                    }
                    f[(a * n + b) * n + d] = s;
                }
            }
        }
        f
    }

    /// Matrix of `ad_x` acting on column vectors.
    pub fn ad(&self, x: &[T]) -> DMatrix<T> {
        let n = self.dim;
        let f = self.bracket_coefficients();
        DMatrix::from_fn(n, n, |d, b| {
            let mut s = T::zero();
            for (a, xa) in x.iter().enumerate() {
                s += *xa * f[(a * n + b) * n + d];
            }
            s
        })
    }

    /// Structure constants and pairing after the change of basis `v ↦ g v`.
    pub fn pushforward(&self, g: &DMatrix<T>) -> Result<Self> {
        let n = self.dim;
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numeric("basis change is singular".into()))?;
        let eta = ginv.transpose() * &self.pairing * &ginv;
        let mut tmp1 = vec![T::zero(); n * n * n];
        let mut tmp2 = vec![T::zero(); n * n * n];
        let mut out = vec![T::zero(); n * n * n];
        // contract one slot at a time with g⁻¹
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = T::zero();
                    for k in 0..n {
                        s += self.c(k, b, c) * ginv[(k, a)];
                    }
                    tmp1[(a * n + b) * n + c] = s;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = T::zero();
                    for k in 0..n {
                        s += tmp1[(a * n + k) * n + c] * ginv[(k, b)];
                    }
                    tmp2[(a * n + b) * n + c] = s;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = T::zero();
                    for k in 0..n {
                        s += tmp2[(a * n + b) * n + k] * ginv[(k, c)];
                    }
                    out[(a * n + b) * n + c] = s;
                }
            }
        }
        Self::new(eta, out)
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let n = self.dim;
        let mut sym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                sym = sym.max((self.pairing[(i, j)] - self.pairing[(j, i)]).abs().as_f64());
            }
        }
        let (mut anti, mut inv) = (0.0f64, 0.0f64);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    anti = anti.max((self.c(a, b, c) + self.c(b, a, c)).abs().as_f64());
                    inv = inv.max((self.c(a, b, c) + self.c(a, c, b)).abs().as_f64());
                }
            }
        }
        let jacobi = self.jacobi_residual();
        let passed = sym <= tol && anti <= tol && inv <= tol && jacobi <= tol;
        ValidationReport {
            pairing_symmetry: sym,
            antisymmetry: anti,
            invariance: inv,
            jacobi,
            condition: self.condition,
            tolerance: tol,
            passed,
        }
    }

    /// `max |⟨[[e_a,e_b],e_c] + cyclic, e_d⟩|`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let f = self.bracket_coefficients();
        let fl = |a: usize, b: usize, e: usize| f[(a * n + b) * n + e];
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = T::zero();
                        for e in 0..n {
                            s += fl(a, b, e) * self.c(e, c, d)
                                + fl(b, c, e) * self.c(e, a, d)
                                + fl(c, a, e) * self.c(e, b, d);
                        }
                        worst = worst.max(s.abs().as_f64());
                    }
                }
            }
        }
        worst
    }

    /// `(p, q)`: numbers of positive and negative eigenvalues of the pairing.
    pub fn signature(&self) -> (usize, usize) {
        let eig = SymmetricEigen::new(symmetrize(&self.pairing));
        let p = eig.eigenvalues.iter().filter(|&&l| l > T::zero()).count();
        (p, self.dim - p)
    }
}

/// Named constructions of quadratic Lie algebras.
#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Abelian { p: usize, q: usize },
    Su2,
    Su2Double,
}

impl Preset {
    /// Parses `abelian:P,Q`, `su2` or `su2_double`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some(rest) = name.strip_prefix("abelian") {
            let rest = rest.trim_start_matches([':', '(']).trim_end_matches(')');
            let parts: Vec<_> = rest.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::UnknownPreset(name.into()));
            }
            let p = parts[0].parse().map_err(|_| Error::UnknownPreset(name.into()))?;
            let q = parts[1].parse().map_err(|_| Error::UnknownPreset(name.into()))?;
            return Ok(Preset::Abelian { p, q });
        }
        match name {
            "su2" => Ok(Preset::Su2),
            "su2_double" | "su2-double" => Ok(Preset::Su2Double),
            _ => Err(Error::UnknownPreset(name.into())),
        }
    }
}

/// Builds a preset algebra, with the pairing (and hence `c`) scaled by `level`.
pub fn preset_algebra<T: Scalar>(preset: &Preset, level: T) -> Result<QuadraticLieAlgebra<T>> {
    let base = match preset {
        Preset::Abelian { p, q } => QuadraticLieAlgebra::abelian(*p, *q)?,
        Preset::Su2 => QuadraticLieAlgebra::su2(),
        Preset::Su2Double => QuadraticLieAlgebra::su2_double(),
    };
    if level == T::one() {
        Ok(base)
    } else {
        base.with_level(level)
    }
}

/// A splitting `g = V₊ ⊕ V₋` stored as its involution.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedMetric<T: Scalar> {
    tau: DMatrix<T>,
    pplus: DMatrix<T>,
    pminus: DMatrix<T>,
}

/// Residuals of the generalized-metric invariants.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MetricReport {
    /// `‖τ² − I‖_∞`
    pub involution: f64,
    /// `‖ητ − τᵀη‖_∞`
    pub pairing_symmetry: f64,
    /// Smallest eigenvalue of the symmetrized `ητ`.
    pub positivity_margin: f64,
    pub rank_plus: usize,
    pub positive_count: usize,
}

impl MetricReport {
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.involution <= tol) {
            v.push(format!("tau^2 != I (residual {:.3e})", self.involution));
        }
        if !(self.pairing_symmetry <= tol) {
            v.push(format!(
                "tau is not pairing-symmetric (residual {:.3e})",
                self.pairing_symmetry
            ));
        }
        if !(self.positivity_margin > 0.0) {
            v.push(format!(
                "<tau x, x> is not positive definite (min eigenvalue {:.3e})",
                self.positivity_margin
            ));
        }
        if self.rank_plus != self.positive_count {
            v.push(format!(
                "rank of V+ is {} but the pairing has {} positive directions",
                self.rank_plus, self.positive_count
            ));
        }
        v
    }
}

pub fn metric_report<T: Scalar>(alg: &QuadraticLieAlgebra<T>, tau: &DMatrix<T>) -> MetricReport {
    let n = alg.dim();
    let eta = alg.pairing();
    let id = DMatrix::<T>::identity(n, n);
    let involution = inf_norm(&(tau * tau - &id));
    let et = eta * tau;
    let pairing_symmetry = inf_norm(&(&et - tau.transpose() * eta));
    let eig = SymmetricEigen::new(symmetrize(&et));
    let positivity_margin = eig
        .eigenvalues
        .iter()
        .map(|l| l.as_f64())
        .fold(f64::INFINITY, f64::min);
    let trace_plus = ((&id + tau) * T::lit(0.5)).trace().as_f64();
    MetricReport {
        involution,
        pairing_symmetry,
        positivity_margin,
        rank_plus: trace_plus.round().max(0.0) as usize,
        positive_count: alg.signature().0,
    }
}

impl<T: Scalar> GeneralizedMetric<T> {
    pub fn tau(&self) -> &DMatrix<T> {
        &self.tau
    }

    /// `Π₊ = (I + τ)/2`
    pub fn pplus(&self) -> &DMatrix<T> {
        &self.pplus
    }

    /// `Π₋ = (I − τ)/2`
    pub fn pminus(&self) -> &DMatrix<T> {
        &self.pminus
    }

    pub fn rank_plus(&self) -> usize {
        self.pplus.trace().as_f64().round().max(0.0) as usize
    }

    pub(crate) fn from_tau_unchecked(tau: DMatrix<T>) -> Self {
        let n = tau.nrows();
        let id = DMatrix::<T>::identity(n, n);
        let half = T::lit(0.5);
        let pplus = (&id + &tau) * half;
        let pminus = (&id - &tau) * half;
        Self { tau, pplus, pminus }
    }

    /// Conjugated metric `g τ g⁻¹`, validated.
    pub fn conjugate(
        &self,
        alg: &QuadraticLieAlgebra<T>,
        g: &DMatrix<T>,
        tol: f64,
    ) -> Result<Self> {
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numeric("conjugating matrix is singular".into()))?;
        metric_from_involution(alg, g * &self.tau * ginv, tol)
    }
}

/// Validates `tau` as a generalized metric for `alg`.
pub fn metric_from_involution<T: Scalar>(
    alg: &QuadraticLieAlgebra<T>,
    tau: DMatrix<T>,
    tol: f64,
) -> Result<GeneralizedMetric<T>> {
    let n = alg.dim();
    if tau.nrows() != n || tau.ncols() != n {
        return Err(Error::Dimension(format!(
            "tau must be {n}x{n}, got {}x{}",
            tau.nrows(),
            tau.ncols()
        )));
    }
    let violations = metric_report(alg, &tau).violations(tol);
    if !violations.is_empty() {
        return Err(Error::InvalidMetric(violations));
    }
    Ok(GeneralizedMetric::from_tau_unchecked(tau))
}

/// The canonical metric `τ₀ = η⁻¹|η|`, which is `diag(±1)` for diagonal pairings.
pub fn canonical_metric<T: Scalar>(alg: &QuadraticLieAlgebra<T>) -> GeneralizedMetric<T> {
    let eig = SymmetricEigen::new(symmetrize(alg.pairing()));
    let abs = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.abs()));
    let abs_eta = &eig.eigenvectors * abs * eig.eigenvectors.transpose();
    GeneralizedMetric::from_tau_unchecked(alg.pairing_inv() * abs_eta)
}

/// A random pairing-orthogonal matrix `exp(η⁻¹A)` with `A` antisymmetric,
/// entries of `A` uniform in `[-scale, scale]`.
pub fn random_orthogonal<T: Scalar>(
    alg: &QuadraticLieAlgebra<T>,
    rng: &mut impl Rng,
    scale: f64,
) -> DMatrix<T> {
    let n = alg.dim();
    let mut a = DMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x = T::lit(rng.gen_range(-scale..=scale));
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    (alg.pairing_inv() * a).exp()
}

/// Random metric `g τ₀ g⁻¹` with `g` pairing-orthogonal; deterministic per seed.
/// The generator scale follows `max|η|`, so rescaling the pairing leaves the result unchanged.
pub fn random_metric<T: Scalar>(
    alg: &QuadraticLieAlgebra<T>,
    seed: u64,
) -> Result<GeneralizedMetric<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_orthogonal(alg, &mut rng, 0.5 * inf_norm(alg.pairing()));
    canonical_metric(alg).conjugate(alg, &g, DEFAULT_TOL.max(1e3 * T::default_epsilon().as_f64()))
}

/// `t = t₊ + t₋`, the inverse pairing split along `V±`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitInversePairing<T: Scalar> {
    pub t: DMatrix<T>,
    pub tplus: DMatrix<T>,
    pub tminus: DMatrix<T>,
}

pub fn split_inverse<T: Scalar>(
    alg: &QuadraticLieAlgebra<T>,
    metric: &GeneralizedMetric<T>,
) -> SplitInversePairing<T> {
    let t = alg.pairing_inv().clone();
    let tplus = symmetrize(&(metric.pplus() * &t));
    let tminus = &t - &tplus;
    SplitInversePairing { t, tplus, tminus }
}

pub(crate) fn symmetrize<T: Scalar>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

pub(crate) fn inf_norm<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.abs().as_f64()).fold(0.0, f64::max)
}

fn condition_number<T: Scalar>(m: &DMatrix<T>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().map(|x| x.as_f64()).fold(0.0, f64::max);
    let min = sv.iter().map(|x| x.as_f64()).fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn levi_civita() -> [(usize, usize, usize, f64); 6] {
    [
        (0, 1, 2, 1.0),
        (1, 2, 0, 1.0),
        (2, 0, 1, 1.0),
        (1, 0, 2, -1.0),
        (2, 1, 0, -1.0),
        (0, 2, 1, -1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force Jacobi check for `ε_abc` straight from the definition of
    /// the bracket of cross products, independent of `jacobi_residual`.
    #[test]
    fn epsilon_satisfies_jacobi_by_cross_products() {
        let cross = |x: [f64; 3], y: [f64; 3]| {
            [
                x[1] * y[2] - x[2] * y[1],
                x[2] * y[0] - x[0] * y[2],
                x[0] * y[1] - x[1] * y[0],
            ]
        };
        let e = |i: usize| {
            let mut v = [0.0; 3];
            v[i] = 1.0;
            v
        };
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let t1 = cross(cross(e(a), e(b)), e(c));
                    let t2 = cross(cross(e(b), e(c)), e(a));
                    let t3 = cross(cross(e(c), e(a)), e(b));
                    for k in 0..3 {
                        assert_eq!(t1[k] + t2[k] + t3[k], 0.0);
                    }
                }
            }
        }
        let r = QuadraticLieAlgebra::<f64>::su2().validate(DEFAULT_TOL);
        assert!(r.passed);
        assert_eq!(r.jacobi, 0.0);
    }

    #[test]
    fn abelian_residuals_vanish() {
        let alg = QuadraticLieAlgebra::<f64>::abelian(1, 1).unwrap();
        let r = alg.validate(DEFAULT_TOL);
        assert_eq!(
            (r.antisymmetry, r.invariance, r.jacobi, r.pairing_symmetry),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert!(r.passed);
    }

    #[test]
    fn corrupted_su2_breaks_jacobi() {
        let su2 = QuadraticLieAlgebra::<f64>::su2();
        let mut c = su2.structure().to_vec();
        c[1 * 3 + 2] += 0.1; // c_012
        let bad = QuadraticLieAlgebra::new(su2.pairing().clone(), c).unwrap();
        let r = bad.validate(DEFAULT_TOL);
        assert!(r.jacobi > 0.0);
        assert!(!r.passed);
    }

    #[test]
    fn corrupted_su2_jacobi_matches_direct_sum() {
        // direct evaluation of one Jacobi component with explicit loops
        let su2 = QuadraticLieAlgebra::<f64>::su2();
        let mut c = su2.structure().to_vec();
        c[5] += 0.1;
        let bad = QuadraticLieAlgebra::new(su2.pairing().clone(), c.clone()).unwrap();
        let cc = |a: usize, b: usize, d: usize| c[(a * 3 + b) * 3 + d];
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                for x in 0..3 {
                    for d in 0..3 {
                        // η⁻¹ = -I
                        let mut s = 0.0;
                        for e in 0..3 {
                            s -= cc(a, b, e) * cc(e, x, d)
                                + cc(b, x, e) * cc(e, a, d)
                                + cc(x, a, e) * cc(e, b, d);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        assert!(worst > 1e-3);
        assert!((bad.jacobi_residual() - worst).abs() < 1e-14);
    }

    #[test]
    fn singular_pairing_is_rejected() {
        let eta = DMatrix::<f64>::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            QuadraticLieAlgebra::new(eta, vec![0.0; 8]),
            Err(Error::SingularPairing { .. })
        ));
    }

    #[test]
    fn presets() {
        let a = preset_algebra::<f64>(&Preset::parse("abelian:2,2").unwrap(), 1.0).unwrap();
        assert_eq!(a.dim(), 4);
        assert_eq!(
            a.pairing(),
            &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]))
        );
        assert!(a.structure().iter().all(|&x| x == 0.0));

        let s = preset_algebra::<f64>(&Preset::Su2, 1.0).unwrap();
        assert_eq!(s.pairing(), &(-DMatrix::<f64>::identity(3, 3)));
        assert_eq!(s.signature(), (0, 3));

        let d = preset_algebra::<f64>(&Preset::Su2Double, 1.0).unwrap();
        assert_eq!(d.dim(), 6);
        assert!(d.validate(DEFAULT_TOL).passed);
        assert!(matches!(Preset::parse("so5"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn su2_double_blocks_close() {
        // brackets of two elements of the same block have no component in the other
        let d = QuadraticLieAlgebra::<f64>::su2_double();
        let f = d.bracket_coefficients();
        for a in 0..6 {
            for b in 0..6 {
                if (a < 3) != (b < 3) {
                    continue;
                }
                for e in 0..6 {
                    if (e < 3) != (a < 3) {
                        assert_eq!(f[(a * 6 + b) * 6 + e], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn level_rescales_pairing_and_structure() {
        let s = preset_algebra::<f64>(&Preset::Su2, 2.0).unwrap();
        assert_eq!(s.pairing()[(0, 0)], -2.0);
        assert_eq!(s.c(0, 1, 2), 2.0);
        assert!(s.validate(DEFAULT_TOL).passed);
    }

    #[test]
    fn diagonal_metric() {
        let alg = QuadraticLieAlgebra::<f64>::abelian(1, 1).unwrap();
        let tau = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let m = metric_from_involution(&alg, tau, DEFAULT_TOL).unwrap();
        assert_eq!(m.pplus(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let bad = metric_from_involution(&alg, DMatrix::identity(2, 2), DEFAULT_TOL);
        assert!(matches!(bad, Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn su2_double_subalgebra_metric() {
        let alg = QuadraticLieAlgebra::<f64>::su2_double();
        let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 1.0, 1.0, -1.0, -1.0, -1.0,
        ]));
        let m = metric_from_involution(&alg, tau, DEFAULT_TOL).unwrap();
        assert_eq!(m.rank_plus(), 3);
    }

    #[test]
    fn split_inverse_examples() {
        let alg = QuadraticLieAlgebra::<f64>::abelian(1, 1).unwrap();
        let m = canonical_metric(&alg);
        let s = split_inverse(&alg, &m);
        assert_eq!(s.tplus, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(s.tminus, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -1.0]));

        let chiral = QuadraticLieAlgebra::<f64>::abelian(0, 2).unwrap();
        let m = metric_from_involution(&chiral, -DMatrix::identity(2, 2), DEFAULT_TOL).unwrap();
        let s = split_inverse(&chiral, &m);
        assert_eq!(s.tplus, DMatrix::zeros(2, 2));
        assert_eq!(&s.tminus, chiral.pairing_inv());
    }

    #[test]
    fn random_metric_on_abelian_11_is_a_boost() {
        let alg = QuadraticLieAlgebra::<f64>::abelian(1, 1).unwrap();
        for seed in 0..5 {
            let m = random_metric(&alg, seed).unwrap();
            // regenerate the generator and compare
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_orthogonal(&alg, &mut rng, 0.5);
            let expect = &g * DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
                * g.clone().try_inverse().unwrap();
            assert!(inf_norm(&(m.tau() - expect)) < 1e-14);
            // g = [[cosh, sinh], [sinh, cosh]]
            assert!((g[(0, 0)] - g[(1, 1)]).abs() < 1e-14);
            assert!((g[(0, 1)] - g[(1, 0)]).abs() < 1e-14);
            assert!((g[(0, 0)].powi(2) - g[(0, 1)].powi(2) - 1.0).abs() < 1e-13);
            // rank-1 positive semidefinite t₊
            let s = split_inverse(&alg, &m);
            let eig = SymmetricEigen::new(s.tplus.clone());
            let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!(ev[0].abs() < 1e-12 && ev[1] > 0.5);
        }
    }

    #[test]
    fn f32_algebra_works() {
        let alg = QuadraticLieAlgebra::<f32>::su2_double();
        assert!(alg.validate(1e-5).passed);
        let m = random_metric(&alg, 3).unwrap();
        assert_eq!(m.rank_plus(), 3);
    }
}
