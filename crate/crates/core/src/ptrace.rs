//! Partial traces, Schmidt polar form, and rank-one detection.
//!
//! Mode indices are zero-based. `ρ(A) = A ⊗ A*` is built by
//! [`HermitianTensor::hermitianize`]; the per-mode densities
//! `ρ_k = Tr_{bar k} ρ(A)` are formed straight from the mode-k unfolding of
//! `A` so the `n²` array is never materialized on the hot path.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{eigh, flatten, vdot, CMatrix, HermitianMatrix, MatrixSpectrum};
use crate::tensor::{diagonal_trace, outer_conj, strides, unravel, UNITARY_TOL};
use crate::{ComplexTensor, HermitianTensor, ModeVectorTuple, C64};

/// Default `|λ_max(ρ_k) − 1|` tolerance of [`is_rank_one`].
pub const RANK_ONE_TOL: f64 = 1e-8;
/// Orthonormality tolerance for decomposition factors.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Agreement required of spectra and densities in the verification reports.
pub const SPECTRAL_TOL: f64 = 1e-8;

pub fn hermitianize(a: &ComplexTensor) -> HermitianTensor {
    HermitianTensor::hermitianize(a)
}

/// `Tr_{bar I} H` together with the kept modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialTraceResult {
    pub kept_modes: Vec<usize>,
    pub tensor: HermitianTensor,
}

impl PartialTraceResult {
    pub fn matrix(&self) -> HermitianMatrix {
        flatten(&self.tensor)
    }
}

/// Flat offsets contributed by each multi-index over `modes`.
pub(crate) fn offsets(dims: &[usize], modes: &[usize]) -> Vec<usize> {
    let s = strides(dims);
    let sub: Vec<usize> = modes.iter().map(|&k| dims[k]).collect();
    let count: usize = sub.iter().product();
    (0..count)
        .map(|flat| {
            unravel(flat, &sub)
                .iter()
                .zip(modes)
                .map(|(&i, &k)| i * s[k])
                .sum()
        })
        .collect()
}

/// Sum over `i_k = j_k` for every mode not in `kept`.
pub fn partial_trace(h: &HermitianTensor, kept: &[usize]) -> Result<PartialTraceResult> {
    if kept.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let m = h.order();
    let mut kept = kept.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= m) {
        return Err(Error::BadModeIndex {
            index: bad + 1,
            order: m,
        });
    }
    let dims = h.mode_dims();
    let traced: Vec<usize> = (0..m).filter(|k| !kept.contains(k)).collect();
    let keep_off = offsets(dims, &kept);
    let trace_off = offsets(dims, &traced);
    let n = h.flat_dim();
    let out_n = keep_off.len();
    let data = h.as_slice();
    let mut out = vec![C64::new(0.0, 0.0); out_n * out_n];
    for (a, &ra) in keep_off.iter().enumerate() {
        for (b, &rb) in keep_off.iter().enumerate() {
            out[a * out_n + b] = trace_off
                .iter()
                .map(|&t| data[(ra + t) * n + rb + t])
                .sum();
        }
    }
    let out_dims = kept.iter().map(|&k| dims[k]).collect();
    Ok(PartialTraceResult {
        kept_modes: kept,
        tensor: HermitianTensor::from_trusted(out_dims, out),
    })
}

/// Mode-k unfolding: rows indexed by `i_k`, columns by the remaining modes.
pub fn unfold(a: &ComplexTensor, mode: usize) -> Result<CMatrix> {
    let dims = a.mode_dims();
    if mode >= dims.len() {
        return Err(Error::BadModeIndex {
            index: mode + 1,
            order: dims.len(),
        });
    }
    let nk = dims[mode];
    let outer: usize = dims[..mode].iter().product();
    let inner: usize = dims[mode + 1..].iter().product();
    let x = a.as_slice();
    Ok(CMatrix::from_fn(nk, outer * inner, |i, c| {
        let (o, r) = (c / inner, c % inner);
        x[(o * nk + i) * inner + r]
    }))
}

/// `ρ_k = Tr_{bar k} ρ(A) = A_(k)·A_(k)†`.
pub fn mode_density(a: &ComplexTensor, mode: usize) -> Result<HermitianMatrix> {
    let u = unfold(a, mode)?;
    HermitianMatrix::new(u.matmul(&u.adjoint()))
}

/// Spectra of every `ρ_k`, one task per mode.
pub fn mode_spectra(a: &ComplexTensor, exec: Execution) -> Result<Vec<MatrixSpectrum>> {
    exec.map(a.order(), |k| mode_density(a, k).and_then(|d| eigh(&d)))
        .into_iter()
        .collect()
}

/// `A = Σ √λ_i e_i ⊗ f_i` for an order-2 tensor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtForm {
    /// `√λ_i`, descending.
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<Vec<C64>>,
    pub right_vectors: Vec<Vec<C64>>,
    /// Max gap between the nonzero spectra of `ρ_1` and `ρ_2`.
    pub spectral_gap: f64,
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> ComplexTensor {
        let n1 = self.left_vectors.first().map_or(0, Vec::len);
        let n2 = self.right_vectors.first().map_or(0, Vec::len);
        let mut out = vec![C64::new(0.0, 0.0); n1 * n2];
        for ((s, e), f) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            for a in 0..n1 {
                for b in 0..n2 {
                    out[a * n2 + b] += e[a] * f[b] * *s;
                }
            }
        }
        ComplexTensor::new(vec![n1, n2], out).expect("finite")
    }
}

pub fn schmidt_polar(a: &ComplexTensor) -> Result<SchmidtForm> {
    if a.order() != 2 {
        return Err(Error::OrderMismatch {
            expected: 2,
            found: a.order(),
        });
    }
    let (n1, n2) = (a.mode_dims()[0], a.mode_dims()[1]);
    let rho1 = mode_density(a, 0)?;
    let rho2 = mode_density(a, 1)?;
    let s1 = eigh(&rho1)?;
    let s2 = eigh(&rho2)?;
    let cutoff = rho1.zero_cutoff();
    let x = a.as_slice();

    let mut coefficients = Vec::new();
    let mut left_vectors = Vec::new();
    let mut right_vectors = Vec::new();
    for (i, &lambda) in s1.eigenvalues.iter().enumerate() {
        if lambda <= cutoff {
            break;
        }
        let e = s1.eigenvector(i);
        let root = lambda.sqrt();
        // f_i = Aᵀ conj(e_i) / √λ_i
        let f: Vec<C64> = (0..n2)
            .map(|b| (0..n1).map(|r| x[r * n2 + b] * e[r].conj()).sum::<C64>() / root)
            .collect();
        coefficients.push(root);
        left_vectors.push(e);
        right_vectors.push(f);
    }
    let nonzero = |s: &MatrixSpectrum| -> Vec<f64> {
        s.eigenvalues.iter().copied().filter(|&l| l > cutoff).collect()
    };
    let (z1, z2) = (nonzero(&s1), nonzero(&s2));
    let spectral_gap = if z1.len() != z2.len() {
        f64::INFINITY
    } else {
        z1.iter().zip(&z2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    Ok(SchmidtForm {
        coefficients,
        left_vectors,
        right_vectors,
        spectral_gap,
    })
}

/// `max |G − I|` over the Gram matrix of `vectors`.
fn orthonormality_defect(vectors: &[&Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((vdot(u, v) - target).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalSpectraReport {
    /// `λ_i²`, descending.
    pub expected: Vec<f64>,
    /// Max spectral deviation over all modes.
    pub spectral_deviation: f64,
    /// Max `‖ρ_k − Σ λ_i² u_i u_i†‖_F` over all modes.
    pub density_deviation: f64,
    pub passed: bool,
}

/// Build `A = Σ λ_i ⊗u_i` from orthonormal factors and compare every `ρ_k`
/// with `Σ λ_i² u_i^{(k)} u_i^{(k)†}`.
pub fn verify_orthogonal_decomposition_spectra(
    terms: &[(f64, ModeVectorTuple)],
    exec: Execution,
) -> Result<OrthogonalSpectraReport> {
    let Some((_, first)) = terms.first() else {
        return Err(Error::InvalidInput("no terms".into()));
    };
    let dims = first.dims();
    if dims.len() < 2 {
        return Err(Error::InvalidInput(
            "orthogonal decompositions need at least two modes".into(),
        ));
    }
    for (_, u) in terms {
        u.check_dims(&dims)?;
    }
    for k in 0..dims.len() {
        let vecs: Vec<&Vec<C64>> = terms.iter().map(|(_, u)| &u.vectors[k]).collect();
        let defect = orthonormality_defect(&vecs);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotOrthogonal { mode: k + 1, defect });
        }
    }

    let mut a = ComplexTensor::zeros(dims.clone())?;
    for (lambda, u) in terms {
        a = a.add(&ComplexTensor::product(u).scale(C64::new(*lambda, 0.0)))?;
    }
    let mut expected: Vec<f64> = terms.iter().map(|(l, _)| l * l).collect();
    expected.sort_by(|x, y| y.total_cmp(x));

    let per_mode = exec.map(dims.len(), |k| -> Result<(f64, f64)> {
        let rho = mode_density(&a, k)?;
        let spec = eigh(&rho)?;
        let spectral = spec
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, l)| (l - expected.get(i).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max);
        let n = dims[k];
        let predicted = CMatrix::from_fn(n, n, |i, j| {
            terms
                .iter()
                .map(|(l, u)| u.vectors[k][i] * u.vectors[k][j].conj() * (l * l))
                .sum()
        });
        let density = rho.as_matrix().sub(&predicted).frobenius_norm();
        Ok((spectral, density))
    });
    let mut spectral_deviation = 0.0f64;
    let mut density_deviation = 0.0f64;
    for r in per_mode {
        let (s, d) = r?;
        spectral_deviation = spectral_deviation.max(s);
        density_deviation = density_deviation.max(d);
    }
    Ok(OrthogonalSpectraReport {
        expected,
        spectral_deviation,
        density_deviation,
        passed: spectral_deviation <= SPECTRAL_TOL && density_deviation <= SPECTRAL_TOL,
    })
}

/// `(Tr_M(⊗u ⊗ ⊗v*), Π_k v_k† u_k)`; the two agree for product tensors.
pub fn mixed_product_trace(u: &ModeVectorTuple, v: &ModeVectorTuple) -> Result<(C64, C64)> {
    v.check_dims(&u.dims())?;
    let arr = outer_conj(&ComplexTensor::product(u), &ComplexTensor::product(v))?;
    let lhs = diagonal_trace(&arr)?;
    let rhs = u
        .vectors
        .iter()
        .zip(&v.vectors)
        .map(|(a, b)| vdot(b, a))
        .product();
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankOneReport {
    pub is_rank_one: bool,
    /// `λ_max(ρ_k)` per mode.
    pub top_eigenvalues: Vec<f64>,
    /// `Det(ρ_k − I_k) = Π_j (λ_j − 1)` per mode.
    pub determinants: Vec<f64>,
    /// Input was rescaled to unit norm.
    pub normalized_input: bool,
    pub input_norm: f64,
}

/// Rank-one test through the top eigenvalue of every `ρ_k`.
pub fn is_rank_one(a: &ComplexTensor, tol: f64, exec: Execution) -> Result<RankOneReport> {
    let input_norm = a.frobenius_norm();
    if input_norm < 1e-12 {
        return Err(Error::ZeroTensor);
    }
    let normalized_input = (input_norm - 1.0).abs() > 1e-8;
    let unit;
    let a = if normalized_input {
        unit = a.scale(C64::new(1.0 / input_norm, 0.0));
        &unit
    } else {
        a
    };
    let spectra = mode_spectra(a, exec)?;
    let top_eigenvalues: Vec<f64> = spectra.iter().map(MatrixSpectrum::max).collect();
    let determinants = spectra
        .iter()
        .map(|s| s.eigenvalues.iter().map(|l| l - 1.0).product())
        .collect();
    Ok(RankOneReport {
        is_rank_one: top_eigenvalues.iter().all(|l| (l - 1.0).abs() <= tol),
        top_eigenvalues,
        determinants,
        normalized_input,
        input_norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectraSimilarityReport {
    pub per_mode: Vec<f64>,
    pub max_deviation: f64,
}

/// Compare the `ρ_k` spectra of `A` and `A ×_1 Q_1 ⋯ ×_m Q_m`.
pub fn partial_trace_spectra_similarity(
    a: &ComplexTensor,
    qs: &[CMatrix],
    exec: Execution,
) -> Result<SpectraSimilarityReport> {
    for (k, q) in qs.iter().enumerate() {
        let defect = q.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { mode: k + 1, defect });
        }
    }
    let b = a.multi_mode_product(qs)?;
    let sa = mode_spectra(a, exec)?;
    let sb = mode_spectra(&b, exec)?;
    let per_mode: Vec<f64> = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| {
            x.eigenvalues
                .iter()
                .zip(&y.eigenvalues)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let max_deviation = per_mode.iter().copied().fold(0.0, f64::max);
    Ok(SpectraSimilarityReport {
        per_mode,
        max_deviation,
    })
}
