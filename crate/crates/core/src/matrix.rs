//! Small dense complex matrices and Hermitian eigendecomposition.
//!
//! Everything runs on `Complex64` with relative tolerances; the one
//! exact path is for diagonal matrices with rational entries, whose
//! spectrum is read off the diagonal and kept as exact rationals. All
//! eigenvalues returned anywhere are `Rat`s: Jacobi output is converted
//! exactly (a finite double is a dyadic rational), so threshold
//! comparisons downstream never compare floats.

use num::complex::Complex64;
use serde_json::Value;
use thiserror::Error;

use crate::rat::Rat;

/// Dimension cap for the floating (Jacobi) workflow.
pub const MAX_DIM_FLOAT: usize = 32;

/// Dimension cap for the exact diagonal workflow.
pub const MAX_DIM_EXACT: usize = 16;

const JACOBI_SWEEP_CAP: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("matrix is not a projection within tolerance")]
    NotProjection,
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimCapExceeded { dim: usize, cap: usize },
    #[error("Jacobi sweeps did not converge")]
    NoConvergence,
    #[error("bad matrix JSON: {0}")]
    BadJson(String),
}

/// A dense `dim × dim` complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
    /// Set when the matrix was built as an exactly diagonal matrix with
    /// rational entries; carries the exact diagonal.
    exact_diag: Option<Vec<Rat>>,
}

impl ComplexMatrix {
    pub fn zero(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
            exact_diag: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m.exact_diag = Some(vec![Rat::one(); dim]);
        m
    }

    /// Exact diagonal matrix from rationals.
    pub fn diagonal(entries: &[Rat]) -> Self {
        let dim = entries.len();
        let mut m = Self::zero(dim);
        for (i, r) in entries.iter().enumerate() {
            m.set(i, i, Complex64::new(r.to_f64(), 0.0));
        }
        m.exact_diag = Some(entries.to_vec());
        m
    }

    /// The matrix unit with a single 1 at `(i, j)`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(dim);
        m.set(i, j, Complex64::new(1.0, 0.0));
        if i == j {
            let mut diag = vec![Rat::zero(); dim];
            diag[i] = Rat::one();
            m.exact_diag = Some(diag);
        }
        m
    }

    /// The diagonal 0/1 projection onto the given basis indices.
    pub fn basis_projection(dim: usize, indices: &[usize]) -> Self {
        let mut diag = vec![Rat::zero(); dim];
        for &i in indices {
            diag[i] = Rat::one();
        }
        Self::diagonal(&diag)
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        let mut m = Self::zero(dim);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), dim, "square matrix expected");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
        self.exact_diag = None;
    }

    pub fn exact_diag(&self) -> Option<&[Rat]> {
        self.exact_diag.as_deref()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Relative tolerance scale: `tol · max(1, max entry magnitude)`.
    pub fn tol_scale(&self, tol: f64) -> f64 {
        tol * self.max_abs().max(1.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut m = Self::zero(self.dim);
        for k in 0..self.data.len() {
            m.data[k] = self.data[k] + other.data[k];
        }
        // sums of exact diagonals stay exact
        m.exact_diag = match (&self.exact_diag, &other.exact_diag) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            _ => None,
        };
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut m = Self::zero(self.dim);
        for k in 0..self.data.len() {
            m.data[k] = self.data[k] - other.data[k];
        }
        m.exact_diag = match (&self.exact_diag, &other.exact_diag) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x - y).collect()),
            _ => None,
        };
        m
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut m = Self::zero(self.dim);
        for k in 0..self.data.len() {
            m.data[k] = self.data[k] * factor;
        }
        m
    }

    pub fn scale_rat(&self, factor: &Rat) -> Self {
        let mut m = self.scale(Complex64::new(factor.to_f64(), 0.0));
        m.exact_diag = self
            .exact_diag
            .as_ref()
            .map(|d| d.iter().map(|x| x * factor).collect());
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut m = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        m.exact_diag = match (&self.exact_diag, &other.exact_diag) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x * y).collect()),
            _ => None,
        };
        m
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m.exact_diag = self.exact_diag.clone();
        m
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.dim == other.dim && self.sub(other).max_abs() <= eps
    }

    pub fn is_zero_within(&self, eps: f64) -> bool {
        self.max_abs() <= eps
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).max_abs() <= self.tol_scale(tol)
    }

    /// `P² = P` and `P* = P` within tolerance.
    pub fn is_projection(&self, tol: f64) -> bool {
        let eps = self.tol_scale(tol).max(tol);
        self.is_hermitian(tol) && self.mul(self).sub(self).max_abs() <= eps
    }

    pub fn commutator_norm(&self, other: &Self) -> f64 {
        self.mul(other).sub(&other.mul(self)).max_abs()
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// Entries outside the diagonal blocks are zero within tolerance.
    pub fn respects_blocks(&self, blocks: &[usize], tol: f64) -> bool {
        let eps = self.tol_scale(tol);
        let mut block_of = vec![0usize; self.dim];
        let mut start = 0usize;
        for (b, &len) in blocks.iter().enumerate() {
            for k in start..start + len {
                block_of[k] = b;
            }
            start += len;
        }
        assert_eq!(start, self.dim, "block sizes must sum to the dimension");
        for i in 0..self.dim {
            for j in 0..self.dim {
                if block_of[i] != block_of[j] && self.get(i, j).norm() > eps {
                    return false;
                }
            }
        }
        true
    }

    /// JSON: `{"dim": n, "entries": [[[re, im], ...], ...]}` with each
    /// component a number or a rational string.
    pub fn from_json(value: &Value) -> Result<Self, MatrixError> {
        let obj = value.as_object().ok_or_else(|| bad("expected object"))?;
        let dim = obj
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing \"dim\""))? as usize;
        if dim == 0 || dim > MAX_DIM_FLOAT {
            return Err(MatrixError::DimCapExceeded {
                dim,
                cap: MAX_DIM_FLOAT,
            });
        }
        let rows = obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"entries\""))?;
        if rows.len() != dim {
            return Err(bad(&format!("expected {dim} rows")));
        }
        let mut m = Self::zero(dim);
        let mut all_exact = true;
        let mut exact = vec![Rat::zero(); dim];
        let mut diagonal_shape = true;
        for (i, row) in rows.iter().enumerate() {
            let cols = row.as_array().ok_or_else(|| bad("row is not an array"))?;
            if cols.len() != dim {
                return Err(bad(&format!("row {i} should have {dim} entries")));
            }
            for (j, cell) in cols.iter().enumerate() {
                let (re, re_rat) = parse_component(cell, 0)?;
                let (im, im_rat) = parse_component(cell, 1)?;
                m.set(i, j, Complex64::new(re, im));
                let zero_exactly = re_rat == Some(Rat::zero()) && im_rat == Some(Rat::zero());
                if i == j {
                    if im_rat != Some(Rat::zero()) {
                        all_exact = false;
                    }
                    match re_rat {
                        Some(r) => exact[i] = r,
                        None => all_exact = false,
                    }
                } else if !zero_exactly {
                    diagonal_shape = false;
                }
            }
        }
        if all_exact && diagonal_shape && dim <= MAX_DIM_EXACT {
            m.exact_diag = Some(exact);
        }
        Ok(m)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.dim)
            .map(|i| {
                Value::Array(
                    (0..self.dim)
                        .map(|j| {
                            let z = self.get(i, j);
                            serde_json::json!([z.re, z.im])
                        })
                        .collect(),
                )
            })
            .collect();
        serde_json::json!({"dim": self.dim, "entries": rows})
    }
}

fn bad(msg: &str) -> MatrixError {
    MatrixError::BadJson(msg.to_string())
}

/// One entry component: index 0 (re) or 1 (im) of an `[re, im]` pair.
/// Returns the float value and, when the component was an integer or a
/// rational string, its exact value.
fn parse_component(cell: &Value, which: usize) -> Result<(f64, Option<Rat>), MatrixError> {
    let pair = cell
        .as_array()
        .ok_or_else(|| bad("entry is not an [re, im] pair"))?;
    if pair.len() != 2 {
        return Err(bad("entry is not an [re, im] pair"));
    }
    match &pair[which] {
        Value::Number(n) => {
            let f = n.as_f64().ok_or_else(|| bad("non-finite number"))?;
            let exact = if n.is_i64() || n.is_u64() {
                Rat::from_f64_exact(f)
            } else {
                // floats are exact dyadic rationals too
                Rat::from_f64_exact(f)
            };
            Ok((f, exact))
        }
        Value::String(s) => {
            let r = Rat::parse(s).map_err(|e| bad(&e.to_string()))?;
            Ok((r.to_f64(), Some(r)))
        }
        other => Err(bad(&format!("bad entry component: {other}"))),
    }
}

/// One point of a finite spectrum: an exact eigenvalue with its
/// spectral projection.
#[derive(Debug, Clone)]
pub struct SpectralPoint {
    pub value: Rat,
    pub projection: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations,
/// with eigenvalue clustering.
///
/// Eigenvalues whose gap is at most `tol · max(1, max entry) · dim` are
/// merged into one cluster, whose eigenvalue is the exact mean and
/// whose projection is the sum of the eigenvector dyads. For exactly
/// diagonal rational input the diagonal is used directly, so the
/// spectrum is exact.
pub fn eigendecompose(h: &ComplexMatrix, tol: f64) -> Result<Vec<SpectralPoint>, MatrixError> {
    if h.dim() > MAX_DIM_FLOAT {
        return Err(MatrixError::DimCapExceeded {
            dim: h.dim(),
            cap: MAX_DIM_FLOAT,
        });
    }
    if !h.is_hermitian(tol) {
        return Err(MatrixError::NotHermitian);
    }
    let n = h.dim();
    let cluster_gap = h.tol_scale(tol) * n as f64;

    // eigenpairs as (exact eigenvalue, eigenvector columns)
    let pairs: Vec<(Rat, Vec<Complex64>)> = if let Some(diag) = h.exact_diag() {
        diag.iter()
            .enumerate()
            .map(|(i, r)| {
                let mut col = vec![Complex64::new(0.0, 0.0); n];
                col[i] = Complex64::new(1.0, 0.0);
                (r.clone(), col)
            })
            .collect()
    } else {
        let (values, vectors) = jacobi(h)?;
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let col: Vec<Complex64> = (0..n).map(|r| vectors.get(r, i)).collect();
                (
                    Rat::from_f64_exact(v).ok_or(MatrixError::NoConvergence),
                    col,
                )
            })
            .map(|(v, col)| v.map(|v| (v, col)))
            .collect::<Result<_, _>>()?
    };

    let mut sorted = pairs;
    sorted.sort_by(|a, b| a.0.cmp(&b.0));

    let gap = Rat::from_f64_exact(cluster_gap).unwrap_or_else(Rat::zero);
    let mut clusters: Vec<Vec<(Rat, Vec<Complex64>)>> = Vec::new();
    for pair in sorted {
        match clusters.last_mut() {
            Some(cluster) if (&pair.0 - &cluster.last().unwrap().0).abs() <= gap => {
                cluster.push(pair);
            }
            _ => clusters.push(vec![pair]),
        }
    }

    let mut points = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let count = Rat::from_int(cluster.len() as i64);
        let mean = cluster
            .iter()
            .fold(Rat::zero(), |acc, (v, _)| acc + v.clone())
            / count;
        let mut projection = ComplexMatrix::zero(n);
        for (_, col) in &cluster {
            for i in 0..n {
                for j in 0..n {
                    let v = projection.get(i, j) + col[i] * col[j].conj();
                    projection.set(i, j, v);
                }
            }
        }
        points.push(SpectralPoint {
            value: mean,
            projection,
        });
    }

    // reconstruction and projection identities must hold within headroom
    let eps = 10.0 * h.tol_scale(tol).max(tol);
    let mut sum = ComplexMatrix::zero(n);
    let mut rebuilt = ComplexMatrix::zero(n);
    for p in &points {
        if !p.projection.is_projection(10.0 * tol) {
            return Err(MatrixError::NoConvergence);
        }
        sum = sum.add(&p.projection);
        rebuilt = rebuilt.add(&p.projection.scale(Complex64::new(p.value.to_f64(), 0.0)));
    }
    if !sum.approx_eq(&ComplexMatrix::identity(n), eps) || !rebuilt.approx_eq(h, eps) {
        return Err(MatrixError::NoConvergence);
    }
    Ok(points)
}

/// Cyclic Jacobi for Hermitian matrices. Returns (eigenvalues,
/// eigenvector matrix V with eigenvectors as columns).
fn jacobi(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), MatrixError> {
    let n = h.dim();
    let mut a = h.clone();
    // symmetrize away the Hermitian tolerance slack
    let adj = a.adjoint();
    a = a.add(&adj).scale(Complex64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(1.0);
    let target = 1e-14 * scale;

    for _sweep in 0..JACOBI_SWEEP_CAP {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a.get(i, j).norm());
            }
        }
        if off <= target {
            let values = (0..n).map(|i| a.get(i, i).re).collect();
            return Ok((values, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = a.get(p, q);
                let mag = hpq.norm();
                if mag <= target / (n as f64 * 10.0) {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = hpq / Complex64::new(mag, 0.0);
                let tau = (app - aqq) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let cs = Complex64::new(c, 0.0);
                let sp = Complex64::new(s, 0.0) * phase; // s·e^{iφ}
                let spc = sp.conj(); // s·e^{-iφ}

                // rows: U† from the left
                for k in 0..n {
                    let rp = a.get(p, k);
                    let rq = a.get(q, k);
                    a.set(p, k, cs * rp + sp * rq);
                    a.set(q, k, -spc * rp + cs * rq);
                }
                // columns: U from the right
                for k in 0..n {
                    let cp = a.get(k, p);
                    let cq = a.get(k, q);
                    a.set(k, p, cs * cp + spc * cq);
                    a.set(k, q, -sp * cp + cs * cq);
                }
                for k in 0..n {
                    let vp = v.get(k, p);
                    let vq = v.get(k, q);
                    v.set(k, p, cs * vp + spc * vq);
                    v.set(k, q, -sp * vp + cs * vq);
                }
            }
        }
    }
    Err(MatrixError::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_with_clustering() {
        let m = ComplexMatrix::diagonal(&[Rat::from_int(1), Rat::from_int(2), Rat::from_int(2)]);
        let spec = eigendecompose(&m, TOL).unwrap();
        assert_eq!(spec.len(), 2);
        assert_eq!(spec[0].value, Rat::from_int(1));
        assert_eq!(spec[1].value, Rat::from_int(2));
        assert!(spec[0]
            .projection
            .approx_eq(&ComplexMatrix::basis_projection(3, &[0]), 1e-12));
        assert!(spec[1]
            .projection
            .approx_eq(&ComplexMatrix::basis_projection(3, &[1, 2]), 1e-12));
    }

    #[test]
    fn pauli_x_eigendecomposition() {
        // [[0,1],[1,0]] has eigenprojections (1 ∓ X)/2 at ∓1
        let x = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let spec = eigendecompose(&x, TOL).unwrap();
        assert_eq!(spec.len(), 2);
        assert!((spec[0].value.to_f64() + 1.0).abs() < 1e-12);
        assert!((spec[1].value.to_f64() - 1.0).abs() < 1e-12);
        let half = Complex64::new(0.5, 0.0);
        let minus = ComplexMatrix::identity(2).sub(&x).scale(half);
        let plus = ComplexMatrix::identity(2).add(&x).scale(half);
        assert!(spec[0].projection.approx_eq(&minus, 1e-10));
        assert!(spec[1].projection.approx_eq(&plus, 1e-10));
    }

    #[test]
    fn near_degenerate_clusters_to_identity() {
        let m = ComplexMatrix::diagonal(&[
            Rat::one(),
            Rat::one() + Rat::from_f64_exact(TOL / 10.0).unwrap(),
        ]);
        let spec = eigendecompose(&m, TOL).unwrap();
        assert_eq!(spec.len(), 1);
        assert!(spec[0]
            .projection
            .approx_eq(&ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn complex_hermitian_jacobi() {
        // [[2, i],[-i, 2]]: eigenvalues 1 and 3
        let m = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ]);
        let spec = eigendecompose(&m, TOL).unwrap();
        assert_eq!(spec.len(), 2);
        assert!((spec[0].value.to_f64() - 1.0).abs() < 1e-10);
        assert!((spec[1].value.to_f64() - 3.0).abs() < 1e-10);
        let rebuilt = spec[0]
            .projection
            .scale(c(spec[0].value.to_f64(), 0.0))
            .add(&spec[1].projection.scale(c(spec[1].value.to_f64(), 0.0)));
        assert!(rebuilt.approx_eq(&m, 1e-10));
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert_eq!(
            eigendecompose(&m, TOL).unwrap_err(),
            MatrixError::NotHermitian
        );
    }

    #[test]
    fn projection_checks() {
        let p = ComplexMatrix::basis_projection(3, &[0, 2]);
        assert!(p.is_projection(TOL));
        let not_p = ComplexMatrix::diagonal(&[Rat::from_int(2)]);
        assert!(!not_p.is_projection(TOL));
    }

    #[test]
    fn block_mask() {
        let m = ComplexMatrix::basis_projection(4, &[0, 1]);
        assert!(m.respects_blocks(&[2, 2], TOL));
        let mut off = ComplexMatrix::zero(4);
        off.set(0, 3, c(1.0, 0.0));
        off.set(3, 0, c(1.0, 0.0));
        assert!(!off.respects_blocks(&[2, 2], TOL));
    }

    #[test]
    fn json_parse_keeps_exact_diagonal() {
        let v = serde_json::json!({
            "dim": 2,
            "entries": [[["1/3", 0], [0, 0]], [[0, 0], [2, 0]]],
        });
        let m = ComplexMatrix::from_json(&v).unwrap();
        let diag = m.exact_diag().unwrap();
        assert_eq!(diag[0], Rat::new(1, 3));
        assert_eq!(diag[1], Rat::from_int(2));
        // a non-diagonal matrix drops exactness
        let v2 = serde_json::json!({
            "dim": 2,
            "entries": [[[1, 0], [0.5, 0]], [[0.5, 0], [2, 0]]],
        });
        let m2 = ComplexMatrix::from_json(&v2).unwrap();
        assert!(m2.exact_diag().is_none());
        assert_eq!(m2.get(0, 1).re, 0.5);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        // deterministic pseudo-random Hermitian, dim 5
        let n = 5;
        let mut m = ComplexMatrix::zero(n);
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for i in 0..n {
            let d = next();
            m.set(i, i, c(d, 0.0));
            for j in (i + 1)..n {
                let z = c(next(), next());
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        let spec = eigendecompose(&m, TOL).unwrap();
        let mut rebuilt = ComplexMatrix::zero(n);
        let mut sum = ComplexMatrix::zero(n);
        for p in &spec {
            rebuilt = rebuilt.add(&p.projection.scale(c(p.value.to_f64(), 0.0)));
            sum = sum.add(&p.projection);
        }
        assert!(rebuilt.approx_eq(&m, 1e-9));
        assert!(sum.approx_eq(&ComplexMatrix::identity(n), 1e-10));
        // projections are pairwise orthogonal
        for (i, p) in spec.iter().enumerate() {
            for q in &spec[i + 1..] {
                assert!(p.projection.mul(&q.projection).is_zero_within(1e-10));
            }
        }
    }
}
