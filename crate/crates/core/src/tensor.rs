//! Dense complex tensors, Hermitian tensors, and their basic algebra.
//!
//! Storage is row-major with the last index fastest. A Hermitian tensor over
//! mode dims `[n_1..n_m]` is an order-2m array indexed `(i_1..i_m, j_1..j_m)`;
//! its flat position is `I·n + J` where `I`, `J` are the row-major offsets of
//! the two half-indices and `n = ∏ n_k`.
//!
//! Mode indices are zero-based in this API. The contraction orientation of
//! [`ComplexTensor::mode_product`] is `Σ_t A[.., t, ..]·Q[t, i]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, CMatrix};
use crate::C64;

/// Default entrywise tolerance for `H[I,J] = conj(H[J,I])`.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Per-mode `‖Q†Q − I‖_F` allowed for a unitary transform.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Row-major strides for `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Decompose a flat offset into a multi-index.
pub fn unravel(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    idx
}

/// Flat offset of a multi-index.
pub fn ravel(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &n)| acc * n + i)
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::ShapeMismatch(format!(
            "mode dims must be a non-empty list of positive integers, got {dims:?}"
        )));
    }
    Ok(())
}

fn check_finite(data: &[C64]) -> Result<()> {
    match data.iter().position(|z| !z.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// A dense order-m complex tensor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexTensor {
    mode_dims: Vec<usize>,
    entries: Vec<C64>,
}

impl ComplexTensor {
    pub fn new(mode_dims: Vec<usize>, entries: Vec<C64>) -> Result<Self> {
        check_dims(&mode_dims)?;
        let n: usize = mode_dims.iter().product();
        if entries.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for mode dims {:?} (expected {n})",
                entries.len(),
                mode_dims
            )));
        }
        check_finite(&entries)?;
        Ok(Self { mode_dims, entries })
    }

    pub fn zeros(mode_dims: Vec<usize>) -> Result<Self> {
        let n = mode_dims.iter().product();
        Self::new(mode_dims, vec![ZERO; n])
    }

    /// `u_1 ⊗ ⋯ ⊗ u_m`.
    pub fn product(u: &ModeVectorTuple) -> Self {
        let mut entries = vec![C64::new(1.0, 0.0)];
        for v in &u.vectors {
            entries = entries
                .iter()
                .flat_map(|a| v.iter().map(move |b| a * b))
                .collect();
        }
        Self {
            mode_dims: u.dims(),
            entries,
        }
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn order(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.entries
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.entries[ravel(idx, &self.mode_dims)]
    }

    /// `Σ conj(A)·B`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.mode_dims != other.mode_dims {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.mode_dims, other.mode_dims
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        vec_norm(&self.entries)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            mode_dims: self.mode_dims.clone(),
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            mode_dims: self.mode_dims.clone(),
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.mode_dims != other.mode_dims {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.mode_dims, other.mode_dims
            )));
        }
        Ok(Self {
            mode_dims: self.mode_dims.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Mode-k product: `(A ×_k Q)[.., i, ..] = Σ_t A[.., t, ..]·Q[t, i]`.
    pub fn mode_product(&self, mode: usize, q: &CMatrix) -> Result<Self> {
        if mode >= self.order() {
            return Err(Error::BadModeIndex {
                index: mode + 1,
                order: self.order(),
            });
        }
        let n = self.mode_dims[mode];
        if q.rows() != n || q.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "mode {} has dimension {n}, matrix is {}x{}",
                mode + 1,
                q.rows(),
                q.cols()
            )));
        }
        let outer: usize = self.mode_dims[..mode].iter().product();
        let inner: usize = self.mode_dims[mode + 1..].iter().product();
        let mut out = vec![ZERO; self.entries.len()];
        for o in 0..outer {
            let base = o * n * inner;
            for t in 0..n {
                for i in 0..n {
                    let qti = q[(t, i)];
                    if qti == ZERO {
                        continue;
                    }
                    let src = &self.entries[base + t * inner..base + (t + 1) * inner];
                    let dst = &mut out[base + i * inner..base + (i + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += s * qti;
                    }
                }
            }
        }
        Ok(Self {
            mode_dims: self.mode_dims.clone(),
            entries: out,
        })
    }

    /// `A ×_1 Q_1 ⋯ ×_m Q_m` with one matrix per mode.
    pub fn multi_mode_product(&self, qs: &[CMatrix]) -> Result<Self> {
        if qs.len() != self.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices for an order-{} tensor",
                qs.len(),
                self.order()
            )));
        }
        let mut out = self.clone();
        for (k, q) in qs.iter().enumerate() {
            out = out.mode_product(k, q)?;
        }
        Ok(out)
    }
}

/// `U ⊗ V*` as an order-2m array (Hermitian only when `U = V`).
pub fn outer_conj(u: &ComplexTensor, v: &ComplexTensor) -> Result<ComplexTensor> {
    if u.mode_dims != v.mode_dims {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            u.mode_dims, v.mode_dims
        )));
    }
    let mut dims = u.mode_dims.clone();
    dims.extend_from_slice(&u.mode_dims);
    let entries = u
        .entries
        .iter()
        .flat_map(|a| v.entries.iter().map(move |b| a * b.conj()))
        .collect();
    ComplexTensor::new(dims, entries)
}

/// Half of a doubled mode list `[n_1..n_m, n_1..n_m]`.
fn half_dims(dims: &[usize]) -> Result<&[usize]> {
    let m = dims.len() / 2;
    if !dims.len().is_multiple_of(2) || m == 0 || dims[..m] != dims[m..] {
        return Err(Error::ShapeMismatch(format!(
            "{dims:?} is not a doubled mode list"
        )));
    }
    Ok(&dims[..m])
}

/// `Σ_I A[I, I]` for an order-2m array (no hermiticity assumed).
pub fn diagonal_trace(a: &ComplexTensor) -> Result<C64> {
    let half = half_dims(&a.mode_dims)?;
    let n: usize = half.iter().product();
    Ok((0..n).map(|i| a.entries[i * n + i]).sum())
}

/// Largest `|H[I,J] − conj(H[J,I])|` over an order-2m array, with its flat
/// (row, column) location.
pub fn hermiticity_defect(entries: &ComplexTensor) -> Result<(f64, usize, usize)> {
    let half = half_dims(&entries.mode_dims)?;
    let n: usize = half.iter().product();
    let m = CMatrix::from_vec(n, n, entries.entries.clone())?;
    Ok(m.hermiticity_defect())
}

/// True iff `max |H[I,J] − conj(H[J,I])| ≤ tol`.
pub fn is_hermitian(entries: &ComplexTensor, tol: f64) -> Result<bool> {
    Ok(hermiticity_defect(entries)?.0 <= tol)
}

/// An order-2m complex tensor with `H[I,J] = conj(H[J,I])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermitianTensor {
    mode_dims: Vec<usize>,
    entries: Vec<C64>,
    hermiticity_tol: f64,
}

impl HermitianTensor {
    /// Validate with the default tolerance.
    pub fn new(mode_dims: Vec<usize>, entries: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(mode_dims, entries, HERMITICITY_TOL)
    }

    /// Validate `H[I,J] = conj(H[J,I])` within `tol`, then store the
    /// symmetrized average so downstream code sees an exactly Hermitian array.
    pub fn with_tolerance(mode_dims: Vec<usize>, entries: Vec<C64>, tol: f64) -> Result<Self> {
        check_dims(&mode_dims)?;
        let n: usize = mode_dims.iter().product();
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for Hermitian mode dims {:?} (expected {})",
                entries.len(),
                mode_dims,
                n * n
            )));
        }
        check_finite(&entries)?;
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidInput(format!("hermiticity tolerance {tol}")));
        }
        let m = CMatrix::from_vec(n, n, entries)?;
        let (defect, row, col) = m.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect, row, col });
        }
        let mut h = Self::from_trusted(mode_dims, m.into_vec());
        h.hermiticity_tol = tol;
        Ok(h)
    }

    /// Build from an order-2m array, validating the doubled shape.
    pub fn from_array(array: &ComplexTensor, tol: f64) -> Result<Self> {
        let half = half_dims(&array.mode_dims)?.to_vec();
        Self::with_tolerance(half, array.entries.clone(), tol)
    }

    /// Symmetrize without checking; for internal construction paths whose
    /// output is Hermitian up to rounding.
    pub(crate) fn from_trusted(mode_dims: Vec<usize>, mut entries: Vec<C64>) -> Self {
        let n: usize = mode_dims.iter().product();
        debug_assert_eq!(entries.len(), n * n);
        for i in 0..n {
            entries[i * n + i].im = 0.0;
            for j in i + 1..n {
                let avg = (entries[i * n + j] + entries[j * n + i].conj()) * 0.5;
                entries[i * n + j] = avg;
                entries[j * n + i] = avg.conj();
            }
        }
        Self {
            mode_dims,
            entries,
            hermiticity_tol: HERMITICITY_TOL,
        }
    }

    pub fn zeros(mode_dims: Vec<usize>) -> Result<Self> {
        check_dims(&mode_dims)?;
        let n: usize = mode_dims.iter().product();
        Ok(Self::from_trusted(mode_dims, vec![ZERO; n * n]))
    }

    /// The tensor `I` with `I(x) = (x_1*x_1)⋯(x_m*x_m)`; it flattens to the identity.
    pub fn identity(mode_dims: Vec<usize>) -> Result<Self> {
        let mut h = Self::zeros(mode_dims)?;
        let n = h.flat_dim();
        for i in 0..n {
            h.entries[i * n + i] = C64::new(1.0, 0.0);
        }
        Ok(h)
    }

    /// `⊗u ⊗ ⊗u*`; exactly Hermitian.
    pub fn rank_one(u: &ModeVectorTuple) -> Self {
        Self::hermitianize(&ComplexTensor::product(u))
    }

    /// `ρ(A) = A ⊗ A*`, entries `A[I]·conj(A[J])`.
    pub fn hermitianize(a: &ComplexTensor) -> Self {
        let x = &a.entries;
        let n = x.len();
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = C64::new(x[i].norm_sqr(), 0.0);
            for j in i + 1..n {
                let v = x[i] * x[j].conj();
                entries[i * n + j] = v;
                entries[j * n + i] = v.conj();
            }
        }
        Self {
            mode_dims: a.mode_dims.clone(),
            entries,
            hermiticity_tol: HERMITICITY_TOL,
        }
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    /// `m`, the number of modes (the array has order `2m`).
    pub fn order(&self) -> usize {
        self.mode_dims.len()
    }

    /// `n = ∏ n_k`.
    pub fn flat_dim(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn hermiticity_tol(&self) -> f64 {
        self.hermiticity_tol
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    /// Entry at `(i_1..i_m, j_1..j_m)`.
    pub fn get(&self, i: &[usize], j: &[usize]) -> C64 {
        let n = self.flat_dim();
        self.entries[ravel(i, &self.mode_dims) * n + ravel(j, &self.mode_dims)]
    }

    /// Entry at flat (row, column) position.
    pub fn get_flat(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.flat_dim() + col]
    }

    /// The order-2m array view.
    pub fn as_array(&self) -> ComplexTensor {
        let mut dims = self.mode_dims.clone();
        dims.extend_from_slice(&self.mode_dims);
        ComplexTensor {
            mode_dims: dims,
            entries: self.entries.clone(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.mode_dims != other.mode_dims {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.mode_dims, other.mode_dims
            )));
        }
        Ok(())
    }

    /// `⟨A, B⟩ = Σ conj(A[I,J])·B[I,J]`.
    pub fn inner_product(&self, other: &Self) -> Result<C64> {
        self.check_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        vec_norm(&self.entries)
    }

    /// `Tr_M A = Σ_I A[I, I]`.
    pub fn matrix_trace(&self) -> Result<f64> {
        let n = self.flat_dim();
        let t: C64 = (0..n).map(|i| self.entries[i * n + i]).sum();
        if t.im.abs() > self.hermiticity_tol * (n as f64).max(1.0) {
            return Err(Error::NonRealTrace { imag: t.im });
        }
        Ok(t.re)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mode_dims: self.mode_dims.clone(),
            entries: self.entries.iter().map(|z| z * s).collect(),
            hermiticity_tol: self.hermiticity_tol,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            mode_dims: self.mode_dims.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            hermiticity_tol: self.hermiticity_tol,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// `self + s·other`.
    pub fn add_scaled(&mut self, other: &Self, s: f64) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * s;
        }
        Ok(())
    }

    /// `A ×_1 Q_1 ⋯ ×_m Q_m ×_{m+1} Q_1* ⋯ ×_{2m} Q_m*`.
    pub fn unitary_transform(&self, qs: &[CMatrix]) -> Result<Self> {
        let m = self.order();
        if qs.len() != m {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices for {m} modes",
                qs.len()
            )));
        }
        for (k, q) in qs.iter().enumerate() {
            if q.rows() != self.mode_dims[k] || q.cols() != self.mode_dims[k] {
                return Err(Error::ShapeMismatch(format!(
                    "mode {} has dimension {}, matrix is {}x{}",
                    k + 1,
                    self.mode_dims[k],
                    q.rows(),
                    q.cols()
                )));
            }
            let defect = q.unitarity_defect();
            if defect > UNITARY_TOL {
                return Err(Error::NotUnitary { mode: k + 1, defect });
            }
        }
        let mut arr = self.as_array();
        for (k, q) in qs.iter().enumerate() {
            arr = arr.mode_product(k, q)?;
            arr = arr.mode_product(m + k, &q.conj())?;
        }
        let mut out = Self::from_trusted(self.mode_dims.clone(), arr.entries);
        out.hermiticity_tol = self.hermiticity_tol;
        Ok(out)
    }

    /// Invariance under simultaneous permutation of the i- and j-blocks.
    pub fn is_symmetric_hermitian(&self, tol: f64) -> Result<bool> {
        let d = self.mode_dims[0];
        if self.mode_dims.iter().any(|&n| n != d) {
            return Err(Error::ShapeMismatch(format!(
                "symmetric Hermitian tensors need equal mode dims, got {:?}",
                self.mode_dims
            )));
        }
        let m = self.order();
        let n = self.flat_dim();
        // adjacent transpositions generate the symmetric group
        for s in 0..m.saturating_sub(1) {
            for row in 0..n {
                let mut i = unravel(row, &self.mode_dims);
                i.swap(s, s + 1);
                let prow = ravel(&i, &self.mode_dims);
                for col in 0..n {
                    let mut j = unravel(col, &self.mode_dims);
                    j.swap(s, s + 1);
                    let pcol = ravel(&j, &self.mode_dims);
                    if (self.entries[row * n + col] - self.entries[prow * n + pcol]).norm() > tol {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// `(H[I,J] + conj(H[J,I]))/2` for a near-Hermitian order-2m array.
pub fn symmetrize(array: &ComplexTensor) -> Result<HermitianTensor> {
    let half = half_dims(&array.mode_dims)?.to_vec();
    Ok(HermitianTensor::from_trusted(half, array.entries.clone()))
}

/// One complex vector per mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeVectorTuple {
    pub vectors: Vec<Vec<C64>>,
}

impl ModeVectorTuple {
    pub fn new(vectors: Vec<Vec<C64>>) -> Self {
        Self { vectors }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.vectors.iter().map(Vec::len).collect()
    }

    pub fn order(&self) -> usize {
        self.vectors.len()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| vec_norm(v)).collect()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.norms().iter().all(|n| (n - 1.0).abs() <= tol)
    }

    /// Each vector scaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let mut out = self.clone();
        for v in &mut out.vectors {
            let norm = vec_norm(v);
            if norm < 1e-300 {
                return Err(Error::ZeroTensor);
            }
            for z in v.iter_mut() {
                *z /= norm;
            }
        }
        Ok(out)
    }

    /// Apply the phase gauge to every vector.
    pub fn gauged(mut self) -> Self {
        for v in &mut self.vectors {
            crate::linalg::gauge_phase(v);
        }
        self
    }

    pub fn check_dims(&self, mode_dims: &[usize]) -> Result<()> {
        if self.dims() != mode_dims {
            return Err(Error::ShapeMismatch(format!(
                "vector lengths {:?} do not match mode dims {:?}",
                self.dims(),
                mode_dims
            )));
        }
        Ok(())
    }
}

pub fn inner_product(a: &HermitianTensor, b: &HermitianTensor) -> Result<C64> {
    a.inner_product(b)
}

pub fn frobenius_norm(a: &HermitianTensor) -> f64 {
    a.frobenius_norm()
}

pub fn matrix_trace(a: &HermitianTensor) -> Result<f64> {
    a.matrix_trace()
}

pub fn rank_one(u: &ModeVectorTuple) -> HermitianTensor {
    HermitianTensor::rank_one(u)
}

pub fn mode_product(a: &ComplexTensor, mode: usize, q: &CMatrix) -> Result<ComplexTensor> {
    a.mode_product(mode, q)
}

pub fn unitary_transform(a: &HermitianTensor, qs: &[CMatrix]) -> Result<HermitianTensor> {
    a.unitary_transform(qs)
}

pub fn is_symmetric_hermitian(a: &HermitianTensor, tol: f64) -> Result<bool> {
    a.is_symmetric_hermitian(tol)
}
