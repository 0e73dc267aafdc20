//! Hermitian flattening and folding, a cyclic complex Jacobi eigensolver, and
//! the small dense matrix helpers the rest of the crate leans on.
//!
//! Multi-indices are enumerated row-major with mode 1 slowest. A Hermitian
//! tensor is stored in exactly that flattened layout, so `flatten` and
//! `fold_matrix` are plain copies.

use std::ops::{Index, IndexMut, Mul};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{ComplexTensor, HermitianTensor};
use crate::C64;

/// Off-diagonal threshold of the Jacobi sweeps, relative to `‖M‖_F`.
pub const JACOBI_OFF_TOL: f64 = 1e-13;
/// Sweep budget of the Jacobi solver.
pub const JACOBI_MAX_SWEEPS: usize = 60;
/// Eigenvalues with `|λ| ≤ ZERO_EIG_TOL·max(1, ‖M‖_F)` count as zero.
pub const ZERO_EIG_TOL: f64 = 1e-10;
/// Phase-gauge threshold: first component with modulus above this is made real positive.
pub const GAUGE_TOL: f64 = 1e-8;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build a matrix whose columns are the given equal-length vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::ShapeMismatch("columns of unequal length".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖Q†Q − I‖_F`; zero for an exact unitary (or isometry when tall).
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .sub(&Self::identity(self.cols))
            .frobenius_norm()
    }

    /// Largest entrywise `|M[i,j] − conj(M[j,i])|`, with its location.
    pub fn hermiticity_defect(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// A conjugate-symmetric square matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermitianMatrix {
    matrix: CMatrix,
}

impl HermitianMatrix {
    /// Validate `M = M†` within `1e-12·max(1, max|M|)`, then symmetrize.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if let Some(index) = matrix.as_slice().iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let (defect, row, col) = matrix.hermiticity_defect();
        if defect > 1e-12 * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { defect, row, col });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Average `(M + M†)/2` without checking.
    pub(crate) fn symmetrized(mut matrix: CMatrix) -> Self {
        let n = matrix.rows();
        for i in 0..n {
            matrix[(i, i)] = C64::new(matrix[(i, i)].re, 0.0);
            for j in i + 1..n {
                let avg = (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5;
                matrix[(i, j)] = avg;
                matrix[(j, i)] = avg.conj();
            }
        }
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    /// Real trace (the diagonal is real by construction).
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Zero cutoff used for rank decisions on this matrix.
    pub fn zero_cutoff(&self) -> f64 {
        ZERO_EIG_TOL * self.frobenius_norm().max(1.0)
    }
}

/// Eigen-decomposition `M = V·diag(λ)·V†`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixSpectrum {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`; phase-gauged.
    pub eigenvectors: CMatrix,
    /// `max_i ‖M v_i − λ_i v_i‖`.
    pub residual: f64,
    pub sweeps: usize,
}

impl MatrixSpectrum {
    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        CMatrix::from_fn(v.rows(), v.rows(), |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
                .sum()
        })
    }
}

/// Flatten an order-2m Hermitian tensor into its `n × n` Hermitian matrix.
pub fn flatten(h: &HermitianTensor) -> HermitianMatrix {
    let n = h.flat_dim();
    HermitianMatrix {
        matrix: CMatrix {
            rows: n,
            cols: n,
            data: h.as_slice().to_vec(),
        },
    }
}

/// Inverse of [`flatten`].
pub fn fold_matrix(m: &HermitianMatrix, mode_dims: &[usize]) -> Result<HermitianTensor> {
    let n: usize = mode_dims.iter().product();
    if n != m.dim() {
        return Err(Error::ShapeMismatch(format!(
            "matrix dimension {} does not match mode dims {:?}",
            m.dim(),
            mode_dims
        )));
    }
    Ok(HermitianTensor::from_trusted(
        mode_dims.to_vec(),
        m.as_matrix().as_slice().to_vec(),
    ))
}

/// Fold an `n`-vector into a tensor of shape `mode_dims`.
pub fn fold_vector(q: &[C64], mode_dims: &[usize]) -> Result<ComplexTensor> {
    let n: usize = mode_dims.iter().product();
    if q.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} cannot fold into {:?}",
            q.len(),
            mode_dims
        )));
    }
    ComplexTensor::new(mode_dims.to_vec(), q.to_vec())
}

/// Cyclic Jacobi eigensolver for a Hermitian matrix.
pub fn eigh(m: &HermitianMatrix) -> Result<MatrixSpectrum> {
    let n = m.dim();
    let mut a = m.as_matrix().as_slice().to_vec();
    let mut v = CMatrix::identity(n).into_vec();
    let norm = m.frobenius_norm();
    let threshold = JACOBI_OFF_TOL * norm;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let vmat = CMatrix {
        rows: n,
        cols: n,
        data: v,
    };
    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|i| {
            let mut col = vmat.column(i);
            gauge_phase(&mut col);
            (a[i * n + i].re, col)
        })
        .collect();
    sort_pairs(&mut pairs, m.zero_cutoff());

    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let columns: Vec<Vec<C64>> = pairs.into_iter().map(|p| p.1).collect();
    let eigenvectors = CMatrix::from_columns(&columns)?;

    let residual = (0..n)
        .map(|i| {
            let mv = m.as_matrix().mul_vec(&columns[i]);
            mv.iter()
                .zip(&columns[i])
                .map(|(a, b)| (a - b * eigenvalues[i]).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);

    Ok(MatrixSpectrum {
        eigenvalues,
        eigenvectors,
        residual,
        sweeps,
    })
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One unitary rotation in the (p, q) plane annihilating `a[p][q]`.
fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / mag;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = [[c, s], [-s·conj(phase), c·conj(phase)]] on (p, q)
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * g_pp + akq * g_qp;
        a[k * n + q] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[q * n + k] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * g_pp + vkq * g_qp;
        v[k * n + q] = vkp * g_pq + vkq * g_qq;
    }
}

/// Scale `x` so its first component with modulus above [`GAUGE_TOL`] is real positive.
pub fn gauge_phase(x: &mut [C64]) {
    if let Some(lead) = x.iter().find(|z| z.norm() > GAUGE_TOL).copied() {
        let rot = lead.conj() / lead.norm();
        for z in x.iter_mut() {
            *z *= rot;
        }
    }
}

/// Descending by value; runs of values within `tie_tol` are ordered by the
/// gauged vectors lexicographically on (re, im).
fn sort_pairs(pairs: &mut [(f64, Vec<C64>)], tie_tol: f64) {
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end - 1].0 - pairs[end].0 <= tie_tol {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lex_cmp(&a.1, &b.1));
        }
        start = end;
    }
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord.is_ne() {
            return ord.reverse();
        }
    }
    std::cmp::Ordering::Equal
}

/// Eigenvalues of `flatten(H)`, descending.
pub fn matrix_eigenvalues(h: &HermitianTensor) -> Result<Vec<f64>> {
    Ok(eigh(&flatten(h))?.eigenvalues)
}

/// Solve `A·X = B` by LU with partial pivoting and one refinement step.
///
/// Fails with [`Error::SingularSystem`] when a pivot falls below
/// `1e-12·max|A|`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(Error::ShapeMismatch(format!(
            "cannot solve {}x{} system with {}x{} right-hand side",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let lu = LuFactors::new(a)?;
    let mut x = lu.solve(b);
    let residual = b.sub(&a.matmul(&x));
    let correction = lu.solve(&residual);
    x = x.add(&correction);
    Ok(x)
}

struct LuFactors {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    fn new(a: &CMatrix) -> Result<Self> {
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for col in 0..n {
            let (piv_row, piv_mag) = (col..n)
                .map(|r| (r, lu[(r, col)].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv_mag <= 1e-12 * scale || piv_mag == 0.0 {
                return Err(Error::SingularSystem { pivot: piv_mag });
            }
            if piv_row != col {
                perm.swap(piv_row, col);
                for j in 0..n {
                    let tmp = lu[(piv_row, j)];
                    lu[(piv_row, j)] = lu[(col, j)];
                    lu[(col, j)] = tmp;
                }
            }
            let pivot = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / pivot;
                lu[(r, col)] = factor;
                for j in col + 1..n {
                    let u = lu[(col, j)];
                    lu[(r, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.rows();
        let mut x = CMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for j in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        x
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `x†y`.
pub fn vdot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}
