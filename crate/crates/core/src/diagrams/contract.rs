//! Tensor factors of signed graphs.
//!
//! Each vertex contributes a dense tensor (`c` or `ρ` with one derivative
//! index per incoming dotted half-edge), each solid edge contributes `t₊` or
//! `t₋`, dotted edges identify their two `W` indices, and each leaf either
//! contributes `t±` to an output slot or (dotted) exposes its `W` index.
//! The network is contracted pairwise in a fixed order, so results do not
//! depend on scheduling.

use nalgebra::DMatrix;

use super::graph::{EdgeKind, End, SignedGraph, SlotKind, VertexKind};
use crate::algebra::{split_inverse, GeneralizedMetric, QuadraticLieAlgebra};
use crate::error::{Error, Result};
use crate::flow::courant::CourantData;
use crate::scalar::Scalar;

/// Dense output of a contraction, one slot per leaf in leaf order.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorFactor<T: Scalar> {
    pub dims: Vec<usize>,
    pub slot_kinds: Vec<EdgeKind>,
    /// Row-major.
    pub data: Vec<T>,
}

impl<T: Scalar> TensorFactor<T> {
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[flat_index(&self.dims, idx)]
    }

    /// Order-2 factors as a matrix `M[(a, b)] = T^{ab}`.
    pub fn matrix(&self) -> Result<DMatrix<T>> {
        if self.order() != 2 {
            return Err(Error::Dimension(format!(
                "tensor of order {} is not a matrix",
                self.order()
            )));
        }
        Ok(DMatrix::from_row_slice(self.dims[0], self.dims[1], &self.data))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs().as_f64()).fold(0.0, f64::max)
    }

    /// Applies `m` to slot `slot` (`T ↦ m·T` in that index).
    pub fn apply_to_slot(&self, slot: usize, m: &DMatrix<T>) -> Self {
        let dims = &self.dims;
        let stride: usize = dims[slot + 1..].iter().product();
        let d = dims[slot];
        let mut out = vec![T::zero(); self.data.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let i = (flat / stride) % d;
            let base = flat - i * stride;
            let mut s = T::zero();
            for k in 0..d {
                s += m[(i, k)] * self.data[base + k * stride];
            }
            *o = s;
        }
        Self {
            dims: dims.clone(),
            slot_kinds: self.slot_kinds.clone(),
            data: out,
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            data: self.data.iter().map(|&x| x * s).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::Dimension("tensor shapes differ".into()));
        }
        Ok(Self {
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
            ..self.clone()
        })
    }
}

/// `T_Γ` for a pure Chern–Simons graph (c-vertices and solid edges only).
pub fn contract<T: Scalar>(
    graph: &SignedGraph,
    alg: &QuadraticLieAlgebra<T>,
    metric: &GeneralizedMetric<T>,
) -> Result<TensorFactor<T>> {
    graph.validate()?;
    if graph.has_dotted_content() {
        return Err(Error::DottedContent);
    }
    check_metric_dim(alg.dim(), metric)?;
    let n = alg.dim();
    let vertex_tensor = |_: usize, solid: &[usize], _: &[usize], _: Option<usize>| LTensor {
        labels: solid.to_vec(),
        dims: vec![n; 3],
        data: alg.structure().to_vec(),
    };
    network(graph, alg, metric, 0, vertex_tensor)
}

/// `T_Γ` for a Courant graph, with `c`, `ρ` and their derivatives taken at `x`.
pub fn contract_courant<T: Scalar>(
    graph: &SignedGraph,
    cdata: &CourantData<T>,
    x: &[T],
    metric: &GeneralizedMetric<T>,
) -> Result<TensorFactor<T>> {
    graph.validate()?;
    let (n, m) = (cdata.fiber_dim(), cdata.base_dim());
    if x.len() != m {
        return Err(Error::Dimension(format!("x has {} entries, W has dim {m}", x.len())));
    }
    check_metric_dim(n, metric)?;
    let alg = cdata.fiber_at(x)?;
    let vertex_tensor = |v: usize, solid: &[usize], dotted_in: &[usize], out: Option<usize>| {
        let order = dotted_in.len();
        match graph.vertices[v].kind {
            VertexKind::CVertex => {
                let mut labels = solid.to_vec();
                labels.extend_from_slice(dotted_in);
                let mut dims = vec![n; 3];
                dims.extend(std::iter::repeat(m).take(order));
                LTensor {
                    labels,
                    dims,
                    data: cdata.c_derivative_tensor(x, order),
                }
            }
            VertexKind::RhoVertex => {
                let mut labels = vec![solid[0], out.expect("validated rho vertex")];
                labels.extend_from_slice(dotted_in);
                let mut dims = vec![n, m];
                dims.extend(std::iter::repeat(m).take(order));
                LTensor {
                    labels,
                    dims,
                    data: cdata.rho_derivative_tensor(x, order),
                }
            }
        }
    };
    network(graph, &alg, metric, m, vertex_tensor)
}

fn check_metric_dim<T: Scalar>(n: usize, metric: &GeneralizedMetric<T>) -> Result<()> {
    if metric.tau().nrows() != n {
        return Err(Error::Dimension(format!(
            "metric has dim {}, algebra has dim {n}",
            metric.tau().nrows()
        )));
    }
    Ok(())
}

/// Builds and contracts the tensor network of `graph`.
fn network<T: Scalar>(
    graph: &SignedGraph,
    alg: &QuadraticLieAlgebra<T>,
    metric: &GeneralizedMetric<T>,
    w_dim: usize,
    vertex_tensor: impl Fn(usize, &[usize], &[usize], Option<usize>) -> LTensor<T>,
) -> Result<TensorFactor<T>> {
    let n = alg.dim();
    let split = split_inverse(alg, metric);
    // one label per half-edge, then one per leaf output
    let offsets: Vec<usize> = graph
        .vertices
        .iter()
        .scan(0, |acc, v| {
            let o = *acc;
            *acc += v.slots.len();
            Some(o)
        })
        .collect();
    let he = |e: End| offsets[e.vertex] + e.slot;
    let nhe = graph.half_edge_count();
    let mut uf: Vec<usize> = (0..nhe + graph.leaves.len()).collect();
    for e in graph.edges.iter().filter(|e| e.kind == EdgeKind::Dotted) {
        union(&mut uf, he(e.a), he(e.b));
    }
    for (k, l) in graph.leaves.iter().enumerate() {
        if l.kind == EdgeKind::Dotted {
            union(&mut uf, nhe + k, he(l.at));
        }
    }
    let label = |uf: &mut Vec<usize>, h: usize| find(uf, h);

    let edge_matrix = |k: EdgeKind| match k {
        EdgeKind::Plus => &split.tplus,
        _ => &split.tminus,
    };
    let mut tensors = Vec::new();
    for (v, vert) in graph.vertices.iter().enumerate() {
        let mut solid = Vec::new();
        let mut dotted_in = Vec::new();
        let mut out = None;
        for (s, &kind) in vert.slots.iter().enumerate() {
            let l = label(&mut uf, offsets[v] + s);
            match kind {
                SlotKind::Solid => solid.push(l),
                SlotKind::DottedIn => dotted_in.push(l),
                SlotKind::DottedOut => out = Some(l),
            }
        }
        tensors.push(vertex_tensor(v, &solid, &dotted_in, out));
    }
    for e in graph.edges.iter().filter(|e| e.kind != EdgeKind::Dotted) {
        let (a, b) = (label(&mut uf, he(e.a)), label(&mut uf, he(e.b)));
        tensors.push(LTensor::matrix(a, b, edge_matrix(e.kind)));
    }
    let mut outputs = Vec::new();
    let mut out_dims = Vec::new();
    for (k, l) in graph.leaves.iter().enumerate() {
        let o = label(&mut uf, nhe + k);
        outputs.push(o);
        if l.kind == EdgeKind::Dotted {
            out_dims.push(w_dim);
        } else {
            out_dims.push(n);
            let inner = label(&mut uf, he(l.at));
            tensors.push(LTensor::matrix(o, inner, edge_matrix(l.kind)));
        }
    }

    let mut acc = tensors.remove(0);
    while !tensors.is_empty() {
        let next = tensors
            .iter()
            .position(|t| t.labels.iter().any(|l| acc.labels.contains(l)))
            .unwrap_or(0);
        acc = acc.contract(&tensors.remove(next));
    }
    let data = acc.permuted(&outputs);
    Ok(TensorFactor {
        dims: out_dims,
        slot_kinds: graph.leaves.iter().map(|l| l.kind).collect(),
        data,
    })
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

fn union(uf: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(uf, a), find(uf, b));
    let (lo, hi) = (ra.min(rb), ra.max(rb));
    uf[hi] = lo;
}

fn flat_index(dims: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Dense row-major tensor with one label per index.
#[derive(Clone, Debug)]
struct LTensor<T> {
    labels: Vec<usize>,
    dims: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> LTensor<T> {
    fn matrix(a: usize, b: usize, m: &DMatrix<T>) -> Self {
        let (r, c) = m.shape();
        Self {
            labels: vec![a, b],
            dims: vec![r, c],
            data: (0..r * c).map(|f| m[(f / c, f % c)]).collect(),
        }
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    /// Sums over all labels shared with `other`.
    fn contract(&self, other: &Self) -> Self {
        let (sa, sb) = (self.strides(), other.strides());
        let mut shared = Vec::new();
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(j) = other.labels.iter().position(|m| m == l) {
                shared.push((i, j));
            }
        }
        let free_a: Vec<usize> = (0..self.labels.len())
            .filter(|i| !shared.iter().any(|s| s.0 == *i))
            .collect();
        let free_b: Vec<usize> = (0..other.labels.len())
            .filter(|j| !shared.iter().any(|s| s.1 == *j))
            .collect();
        let sum_offsets = offsets(
            &shared
                .iter()
                .map(|&(i, j)| (self.dims[i], sa[i], sb[j]))
                .collect::<Vec<_>>(),
        );
        let off_a = offsets(&free_a.iter().map(|&i| (self.dims[i], sa[i], 0)).collect::<Vec<_>>());
        let off_b = offsets(&free_b.iter().map(|&j| (other.dims[j], 0, sb[j])).collect::<Vec<_>>());
        let mut data = Vec::with_capacity(off_a.len() * off_b.len());
        for &(oa, _) in &off_a {
            for &(_, ob) in &off_b {
                let mut s = T::zero();
                for &(da, db) in &sum_offsets {
                    s += self.data[oa + da] * other.data[ob + db];
                }
                data.push(s);
            }
        }
        let mut labels: Vec<usize> = free_a.iter().map(|&i| self.labels[i]).collect();
        labels.extend(free_b.iter().map(|&j| other.labels[j]));
        let mut dims: Vec<usize> = free_a.iter().map(|&i| self.dims[i]).collect();
        dims.extend(free_b.iter().map(|&j| other.dims[j]));
        Self { labels, dims, data }
    }

    /// Data reordered so that the labels appear in `order`.
    fn permuted(&self, order: &[usize]) -> Vec<T> {
        let strides = self.strides();
        let spec: Vec<(usize, usize, usize)> = order
            .iter()
            .map(|l| {
                let k = self.labels.iter().position(|m| m == l).expect("output label present");
                (self.dims[k], strides[k], 0)
            })
            .collect();
        offsets(&spec).iter().map(|&(o, _)| self.data[o]).collect()
    }
}

/// Lexicographic walk over a multi-index with per-axis `(dim, stride_a, stride_b)`,
/// returning the two accumulated offsets for each position.
fn offsets(axes: &[(usize, usize, usize)]) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0)];
    for &(d, sa, sb) in axes {
        out = out
            .iter()
            .flat_map(|&(a, b)| (0..d).map(move |i| (a + i * sa, b + i * sb)))
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{metric_from_involution, random_metric};
    use crate::diagrams::graph::*;

    fn eye_oracle(alg: &QuadraticLieAlgebra<f64>, metric: &GeneralizedMetric<f64>) -> DMatrix<f64> {
        let s = split_inverse(alg, metric);
        let (tp, tm) = (&s.tplus, &s.tminus);
        let n = alg.dim();
        DMatrix::from_fn(n, n, |a, b| {
            let mut sum = 0.0;
            for a1 in 0..n {
                for b1 in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            for p in 0..n {
                                for q in 0..n {
                                    sum += tp[(a, a1)]
                                        * tm[(b, b1)]
                                        * alg.c(a1, k, l)
                                        * alg.c(b1, p, q)
                                        * tm[(k, q)]
                                        * tp[(l, p)];
                                }
                            }
                        }
                    }
                }
            }
            sum
        })
    }

    #[test]
    fn eye_matches_nested_loops() {
        let alg = QuadraticLieAlgebra::<f64>::su2_double();
        for seed in 0..4 {
            let m = random_metric(&alg, seed).unwrap();
            let t = contract(&eye_diagram(), &alg, &m).unwrap().matrix().unwrap();
            let o = eye_oracle(&alg, &m);
            assert!((t - &o).amax() < 1e-12, "seed {seed}");
            assert!(o.amax() > 1e-3);
        }
    }

    #[test]
    fn vanishing_cases() {
        let ab = QuadraticLieAlgebra::<f64>::abelian(2, 2).unwrap();
        let m = random_metric(&ab, 1).unwrap();
        assert_eq!(contract(&eye_diagram(), &ab, &m).unwrap().max_abs(), 0.0);

        let su2 = QuadraticLieAlgebra::<f64>::su2();
        let chiral = metric_from_involution(&su2, -DMatrix::identity(3, 3), 1e-10).unwrap();
        assert_eq!(contract(&eye_diagram(), &su2, &chiral).unwrap().max_abs(), 0.0);

        let dbl = QuadraticLieAlgebra::<f64>::su2_double();
        let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 1.0, 1.0, -1.0, -1.0, -1.0,
        ]));
        let wzw = metric_from_involution(&dbl, tau, 1e-10).unwrap();
        assert!(contract(&eye_diagram(), &dbl, &wzw).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn theta_is_a_scalar() {
        let alg = QuadraticLieAlgebra::<f64>::su2_double();
        let m = random_metric(&alg, 2).unwrap();
        let t = contract(&theta_graph(), &alg, &m).unwrap();
        assert_eq!(t.order(), 0);
        assert_eq!(t.data.len(), 1);
    }

    #[test]
    fn dotted_graphs_need_courant() {
        let alg = QuadraticLieAlgebra::<f64>::abelian(1, 1).unwrap();
        let m = random_metric(&alg, 0).unwrap();
        let g = rho_loop_graph(EdgeKind::Plus).unwrap();
        assert!(matches!(contract(&g, &alg, &m), Err(Error::DottedContent)));
    }

    #[test]
    fn rho_loop_matches_nested_loops() {
        use crate::poly::Poly;
        // dim 2 admits no nonzero antisymmetric c, so use R^{2,2}
        let eta4 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]));
        let mut d = CourantData::zero(eta4.clone(), 1).unwrap();
        let lin = |a: f64, b: f64| {
            let mut p = Poly::constant(1, a);
            p.add_term(b, vec![1]);
            p
        };
        d = d.with_c(0, 1, 2, lin(0.3, 1.1)).unwrap();
        d = d.with_c(0, 2, 3, lin(-0.2, 0.7)).unwrap();
        d = d.with_c(1, 2, 3, lin(0.5, -0.4)).unwrap();
        for a in 0..4 {
            d = d.with_rho(0, a, Poly::constant(1, 0.25 * (a as f64 + 1.0))).unwrap();
        }
        let alg = d.fiber_at(&[0.0]).unwrap();
        let m = random_metric(&alg, 5).unwrap();
        let s = split_inverse(&alg, &m);
        let x = [0.4];
        for (sign, ts) in [(EdgeKind::Plus, &s.tplus), (EdgeKind::Minus, &s.tminus)] {
            let got = contract_courant(&rho_loop_graph(sign).unwrap(), &d, &x, &m)
                .unwrap()
                .matrix()
                .unwrap();
            let n = 4;
            let oracle = DMatrix::from_fn(n, n, |a, b| {
                let mut sum = 0.0;
                for a1 in 0..n {
                    for b1 in 0..n {
                        for e in 0..n {
                            for dd in 0..n {
                                let dc = d.c_component(a1, b1, e).derivative(0).eval(&x);
                                let rho = d.rho_component(0, dd).eval(&x);
                                sum += s.tplus[(a, a1)] * s.tminus[(b, b1)] * dc * ts[(e, dd)] * rho;
                            }
                        }
                    }
                }
                sum
            });
            assert!((got - &oracle).amax() < 1e-12);
            assert!(oracle.amax() > 1e-4);
        }
    }
}
