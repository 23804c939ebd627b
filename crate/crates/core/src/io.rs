//! JSON and CSV persistence.
//!
//! Floating-point numbers are always written with 17 significant digits so
//! that a round trip through text is exact for `f64`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{metric_from_involution, GeneralizedMetric, QuadraticLieAlgebra};
use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::scalar::Scalar;

/// Serde adapter storing a `DMatrix` as a list of rows of `f64`.
pub mod matrix_rows {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<T: Scalar, S: Serializer>(m: &DMatrix<T>, s: S) -> Result<S::Ok, S::Error> {
        rows(m).serialize(s)
    }

    pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<DMatrix<T>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

pub fn rows<T: Scalar>(m: &DMatrix<T>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].as_f64()).collect())
        .collect()
}

pub fn from_rows<T: Scalar>(rows: &[Vec<f64>]) -> Result<DMatrix<T>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| T::lit(rows[i][j])))
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub dim: usize,
    pub pairing: Vec<Vec<f64>>,
    pub structure: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<Vec<f64>>>,
}

impl AlgebraDocument {
    pub fn from_algebra<T: Scalar>(
        alg: &QuadraticLieAlgebra<T>,
        metric: Option<&GeneralizedMetric<T>>,
    ) -> Self {
        let n = alg.dim();
        let structure = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| (0..n).map(|c| alg.c(a, b, c).as_f64()).collect())
                    .collect()
            })
            .collect();
        Self {
            dim: n,
            pairing: rows(alg.pairing()),
            structure,
            tau: metric.map(|m| rows(m.tau())),
        }
    }

    pub fn algebra<T: Scalar>(&self) -> Result<QuadraticLieAlgebra<T>> {
        let n = self.dim;
        if self.pairing.len() != n
            || self.structure.len() != n
            || self.structure.iter().any(|s| s.len() != n || s.iter().any(|r| r.len() != n))
        {
            return Err(Error::Dimension(format!("document arrays do not match dim {n}")));
        }
        let pairing = from_rows(&self.pairing)?;
        if pairing.ncols() != n {
            return Err(Error::Dimension("pairing must be dim × dim".into()));
        }
        let c = self
            .structure
            .iter()
            .flatten()
            .flatten()
            .map(|&v| T::lit(v))
            .collect();
        QuadraticLieAlgebra::new(pairing, c)
    }

    pub fn metric<T: Scalar>(
        &self,
        alg: &QuadraticLieAlgebra<T>,
        tol: f64,
    ) -> Result<Option<GeneralizedMetric<T>>> {
        self.tau
            .as_ref()
            .map(|t| metric_from_involution(alg, from_rows(t)?, tol))
            .transpose()
    }

    /// Canonical JSON text, floats with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mat = |m: &[Vec<f64>]| {
            let inner: Vec<String> = m
                .iter()
                .map(|r| {
                    let v: Vec<String> = r.iter().map(|&x| fmt_f64(x)).collect();
                    format!("[{}]", v.join(", "))
                })
                .collect();
            format!("[{}]", inner.join(", "))
        };
        let mut s = String::new();
        let _ = write!(s, "{{\"dim\": {}, \"pairing\": {}, \"structure\": [", self.dim, mat(&self.pairing));
        let blocks: Vec<String> = self.structure.iter().map(|b| mat(b)).collect();
        s.push_str(&blocks.join(", "));
        s.push(']');
        if let Some(t) = &self.tau {
            let _ = write!(s, ", \"tau\": {}", mat(t));
        }
        s.push('}');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: impl AsRef<[u8]>) -> String {
    hex::encode(Sha256::digest(bytes.as_ref()))
}

/// Writes a trajectory as CSV: `s, residual, tau_00, tau_01, …`.
pub fn write_trajectory_csv<T: Scalar>(mut w: impl Write, traj: &[FlowState<T>]) -> Result<()> {
    let n = traj.first().map_or(0, |st| st.metric.tau().nrows());
    let mut header = vec!["s".to_string(), "residual".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("tau_{i}_{j}"));
        }
    }
    writeln!(w, "{}", header.join(","))?;
    for st in traj {
        let tau = st.metric.tau();
        let mut cols = vec![fmt_f64(st.s), fmt_f64(st.residual)];
        for i in 0..n {
            for j in 0..n {
                cols.push(fmt_f64(tau[(i, j)].as_f64()));
            }
        }
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}

/// Parses a trajectory CSV back into `(s, residual, tau)` rows.
pub fn read_trajectory_csv(text: &str) -> Result<Vec<(f64, f64, DMatrix<f64>)>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::InvalidConfig("empty CSV".into()))?;
    let cols = header.split(',').count();
    let n = ((cols.saturating_sub(2)) as f64).sqrt().round() as usize;
    if n * n + 2 != cols {
        return Err(Error::InvalidConfig("trajectory header is not s,residual,tau…".into()));
    }
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let v: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidConfig(format!("bad CSV number: {e}")))?;
        if v.len() != cols {
            return Err(Error::InvalidConfig("ragged CSV row".into()));
        }
        out.push((v[0], v[1], DMatrix::from_row_slice(n, n, &v[2..])));
    }
    Ok(out)
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_metric;

    #[test]
    fn algebra_json_round_trip_is_exact() {
        let alg = QuadraticLieAlgebra::<f64>::su2_double();
        let m = random_metric(&alg, 3).unwrap();
        let doc = AlgebraDocument::from_algebra(&alg, Some(&m));
        let text = doc.to_json();
        let back = AlgebraDocument::from_json(&text).unwrap();
        let alg2: QuadraticLieAlgebra<f64> = back.algebra().unwrap();
        assert_eq!(alg2.structure(), alg.structure());
        let m2 = back.metric(&alg2, 1e-10).unwrap().unwrap();
        assert_eq!(m2.tau(), m.tau());
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = r#"{"dim":1,"pairing":[[1]],"structure":[[[0]]],"extra":1}"#;
        assert!(AlgebraDocument::from_json(bad).is_err());
    }
}
