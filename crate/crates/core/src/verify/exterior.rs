//! Sparse exterior algebra over a small frame, with forms stored by basis bitmask.

use std::collections::BTreeMap;

use num_complex::Complex64;

/// A form whose coefficient on `mask` is its value on the frame vectors in
/// `mask`, taken in increasing order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Form {
    pub terms: Vec<(u32, Complex64)>,
}

/// Sign of the shuffle that sorts the concatenation of `a` then `b`.
pub fn shuffle_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Form {
    pub fn scalar(c: Complex64) -> Self {
        Self { terms: vec![(0, c)] }
    }

    /// One-form with `values[k]` on frame vector `index[k]`.
    pub fn one_form(index: &[usize], values: &[Complex64]) -> Self {
        Self {
            terms: index.iter().zip(values).map(|(&i, &v)| (1u32 << i, v)).collect(),
        }
    }

    /// Two-form from `m[a][b] = ω(e_{index[a]}, e_{index[b]})`.
    pub fn two_form<const N: usize>(index: &[usize; N], m: &[[Complex64; N]; N]) -> Self {
        let mut terms = Vec::with_capacity(N * (N - 1) / 2);
        for a in 0..N {
            for b in a + 1..N {
                let (i, j) = (index[a], index[b]);
                let v = if i < j { m[a][b] } else { -m[a][b] };
                terms.push(((1u32 << i) | (1u32 << j), v));
            }
        }
        Self { terms }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.count_ones())
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<u32, Complex64> = BTreeMap::new();
        for &(a, x) in &self.terms {
            for &(b, y) in &other.terms {
                if a & b == 0 {
                    *acc.entry(a | b).or_default() += x * y * shuffle_sign(a, b);
                }
            }
        }
        Self { terms: acc.into_iter().collect() }
    }
}

/// Coefficient of `e_0 ∧ … ∧ e_{dim−1}` in the wedge of `factors`, in order.
///
/// Partial products that can no longer cover a basis vector are dropped as
/// soon as the last factor touching it has been consumed.
pub fn top_coefficient(factors: &[Form], dim: usize) -> Complex64 {
    let full = if dim == 32 { u32::MAX } else { (1u32 << dim) - 1 };
    let mut last = [usize::MAX; 32];
    for (k, f) in factors.iter().enumerate() {
        let touched = f.terms.iter().fold(0u32, |m, (t, _)| m | t);
        for (bit, slot) in last.iter_mut().enumerate().take(dim) {
            if touched >> bit & 1 == 1 {
                *slot = k;
            }
        }
    }
    if (0..dim).any(|b| last[b] == usize::MAX) {
        return Complex64::new(0.0, 0.0);
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut states: Vec<(u32, Complex64)> = vec![(0, Complex64::new(1.0, 0.0))];
    let mut raw: Vec<(u32, Complex64)> = Vec::new();
    for (k, f) in factors.iter().enumerate() {
        let required = (0..dim).filter(|&b| last[b] <= k).fold(0u32, |m, b| m | 1 << b);
        raw.clear();
        for &(a, x) in &states {
            for &(b, y) in &f.terms {
                let m = a | b;
                if a & b == 0 && m & required == required && y != zero {
                    raw.push((m, x * y * shuffle_sign(a, b)));
                }
            }
        }
        // stable sort keeps the summation order deterministic
        raw.sort_by_key(|t| t.0);
        states.clear();
        for &(m, v) in &raw {
            match states.last_mut() {
                Some(last) if last.0 == m => last.1 += v,
                _ => states.push((m, v)),
            }
        }
        if states.is_empty() {
            return zero;
        }
    }
    states.iter().find(|t| t.0 == full).map_or(zero, |t| t.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn det3(m: &[[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    #[test]
    fn shuffle_signs() {
        assert_eq!(shuffle_sign(0b01, 0b10), 1.0);
        assert_eq!(shuffle_sign(0b10, 0b01), -1.0);
        assert_eq!(shuffle_sign(0b100, 0b011), 1.0);
        assert_eq!(shuffle_sign(0b010, 0b101), -1.0);
    }

    proptest! {
        #[test]
        fn three_one_forms_give_determinant(v in proptest::array::uniform3(proptest::array::uniform3(-2.0f64..2.0))) {
            let idx = [0, 1, 2];
            let forms: Vec<Form> = v.iter().map(|r| Form::one_form(&idx, &r.map(c))).collect();
            let top = top_coefficient(&forms, 3);
            let direct = forms[0].wedge(&forms[1]).wedge(&forms[2]);
            prop_assert!((top.re - det3(&v)).abs() < 1e-12);
            prop_assert!((direct.terms[0].1 - top).norm() < 1e-12);
        }

        #[test]
        fn pruned_product_matches_plain_wedge(
            a in proptest::array::uniform6(-1.0f64..1.0),
            b in proptest::array::uniform6(-1.0f64..1.0),
            x in proptest::array::uniform4(-1.0f64..1.0),
        ) {
            let m = |v: &[f64; 6]| {
                let mut out = [[c(0.0); 4]; 4];
                let mut k = 0;
                for i in 0..4 {
                    for j in i + 1..4 {
                        out[i][j] = c(v[k]);
                        out[j][i] = c(-v[k]);
                        k += 1;
                    }
                }
                out
            };
            let p = Form::two_form(&[0, 1, 2, 3], &m(&a));
            let q = Form::two_form(&[2, 3, 4, 5], &m(&b));
            let r = Form::one_form(&[0, 4], &[c(x[0]), c(x[1])]);
            let s = Form::one_form(&[1, 5], &[c(x[2]), c(x[3])]);
            let factors = [p, q, r, s];
            let plain = factors[1..].iter().fold(factors[0].clone(), |acc, f| acc.wedge(f));
            let expect = plain.terms.iter().find(|t| t.0 == 0b111111).map(|t| t.1).unwrap_or_default();
            prop_assert!((top_coefficient(&factors, 6) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn two_form_orientation() {
        // dx∧dy on (e_1, e_0) has value −1
        let m = [[c(0.0), c(-1.0)], [c(1.0), c(0.0)]];
        let f = Form::two_form(&[1, 0], &m);
        assert_eq!(f.terms, vec![(0b11, c(1.0))]);
    }
}
