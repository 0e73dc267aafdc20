//! Eigen-matrix and rank-one Hermitian decompositions, and the relations
//! between two positive decompositions of the same tensor.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigh, flatten, fold_vector, solve, vdot, vec_norm, CMatrix};
use crate::{ComplexTensor, HermitianTensor, ModeVectorTuple, C64};

/// Default bound on the flattened dimension `n` accepted by [`hermitian_decompose`].
pub const SOLVE_BUDGET: usize = 64;
/// Acceptance bound for the defects reported by [`hjw_relate`] and [`overlap_q`].
pub const RELATION_TOL: f64 = 1e-8;

/// `H = Σ λ_i U_i ⊗ U_i*` with orthonormal `U_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenMatrixDecomposition {
    /// Nonzero, descending.
    pub lambdas: Vec<f64>,
    pub factors: Vec<ComplexTensor>,
    pub s: usize,
}

pub fn eigen_matrix_decompose(h: &HermitianTensor) -> Result<EigenMatrixDecomposition> {
    let m = flatten(h);
    let cutoff = m.zero_cutoff();
    let spec = eigh(&m)?;
    let mut lambdas = Vec::new();
    let mut factors = Vec::new();
    for (i, &l) in spec.eigenvalues.iter().enumerate() {
        if l.abs() > cutoff {
            lambdas.push(l);
            factors.push(fold_vector(&spec.eigenvector(i), h.mode_dims())?);
        }
    }
    Ok(EigenMatrixDecomposition {
        s: lambdas.len(),
        lambdas,
        factors,
    })
}

/// One weighted rank-one term `λ ⊗u ⊗ ⊗u*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermitianTerm {
    pub weight: f64,
    pub factors: ModeVectorTuple,
}

/// `H = Σ λ_i ⊗u_i ⊗ ⊗u_i*` with real `λ_i` and unit factor vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermitianDecomposition {
    pub terms: Vec<HermitianTerm>,
    /// Term count; an upper bound on the Hermitian rank, never minimized.
    pub r: usize,
    pub positive: bool,
}

impl HermitianDecomposition {
    pub fn new(terms: Vec<HermitianTerm>) -> Self {
        Self {
            r: terms.len(),
            positive: terms.iter().all(|t| t.weight > 0.0),
            terms,
        }
    }
}

/// `{e_a} ∪ {(e_a+e_b)/√2} ∪ {(e_a+i·e_b)/√2}`, `a < b`; their projectors
/// form a real basis of the `n × n` Hermitian matrices.
pub fn projector_basis_vectors(n: usize) -> Vec<Vec<C64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let unit = |a: usize| {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[a] = C64::new(1.0, 0.0);
        v
    };
    let mut out: Vec<Vec<C64>> = (0..n).map(unit).collect();
    for a in 0..n {
        for b in a + 1..n {
            let mut v = vec![C64::new(0.0, 0.0); n];
            v[a] = C64::new(s, 0.0);
            v[b] = C64::new(s, 0.0);
            out.push(v);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut v = vec![C64::new(0.0, 0.0); n];
            v[a] = C64::new(s, 0.0);
            v[b] = C64::new(0.0, s);
            out.push(v);
        }
    }
    out
}

/// Expand `H` over products of per-mode projector bases.
///
/// The coefficient system is the Kronecker product of the per-mode
/// `n_k² × n_k²` basis matrices, so it is inverted one mode at a time.
pub fn hermitian_decompose(h: &HermitianTensor) -> Result<HermitianDecomposition> {
    hermitian_decompose_with_budget(h, SOLVE_BUDGET)
}

pub fn hermitian_decompose_with_budget(
    h: &HermitianTensor,
    budget: usize,
) -> Result<HermitianDecomposition> {
    let n = h.flat_dim();
    if n > budget {
        return Err(Error::BudgetExceeded { dim: n, budget });
    }
    let dims = h.mode_dims();
    let m = dims.len();

    // regroup H[(i_1..i_m),(j_1..j_m)] as T[(i_1,j_1),..,(i_m,j_m)]
    let sq: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let mut t = vec![C64::new(0.0, 0.0); n * n];
    for (flat, slot) in t.iter_mut().enumerate() {
        let pairs = crate::tensor::unravel(flat, &sq);
        let i: Vec<usize> = pairs.iter().zip(dims).map(|(p, d)| p / d).collect();
        let j: Vec<usize> = pairs.iter().zip(dims).map(|(p, d)| p % d).collect();
        *slot = h.get(&i, &j);
    }
    let mut coeffs = ComplexTensor::new(sq.clone(), t)?;

    let bases: Vec<Vec<Vec<C64>>> = dims.iter().map(|&d| projector_basis_vectors(d)).collect();
    for k in 0..m {
        let d = dims[k];
        // column p holds vec(v_p v_p†)
        let b = CMatrix::from_fn(d * d, d * d, |row, p| {
            let v = &bases[k][p];
            v[row / d] * v[row % d].conj()
        });
        let inv = solve(&b, &CMatrix::identity(d * d)).map_err(|e| match e {
            Error::SingularSystem { pivot } => Error::SingularBasisSystem { mode: k + 1, pivot },
            other => other,
        })?;
        coeffs = coeffs.mode_product(k, &inv.transpose())?;
    }

    let drop = 1e-15 * h.frobenius_norm().max(1.0);
    let terms = coeffs
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.re.abs() > drop)
        .map(|(flat, c)| {
            let idx = crate::tensor::unravel(flat, &sq);
            HermitianTerm {
                weight: c.re,
                factors: ModeVectorTuple::new(
                    idx.iter().enumerate().map(|(k, &p)| bases[k][p].clone()).collect(),
                ),
            }
        })
        .collect();
    Ok(HermitianDecomposition::new(terms))
}

/// Anything that rebuilds a Hermitian tensor.
pub trait Decomposition {
    fn reconstruct(&self, mode_dims: &[usize]) -> Result<HermitianTensor>;
    /// Worst violation of the side conditions (unit or orthonormal factors).
    fn side_condition_defect(&self) -> f64;
}

impl Decomposition for EigenMatrixDecomposition {
    fn reconstruct(&self, mode_dims: &[usize]) -> Result<HermitianTensor> {
        let mut out = HermitianTensor::zeros(mode_dims.to_vec())?;
        for (l, u) in self.lambdas.iter().zip(&self.factors) {
            if u.mode_dims() != mode_dims {
                return Err(Error::ShapeMismatch(format!(
                    "factor {:?} vs {:?}",
                    u.mode_dims(),
                    mode_dims
                )));
            }
            out.add_scaled(&HermitianTensor::hermitianize(u), *l)?;
        }
        Ok(out)
    }

    fn side_condition_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.factors.iter().enumerate() {
            for (j, b) in self.factors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((vdot(a.as_slice(), b.as_slice()) - target).norm());
            }
        }
        worst
    }
}

impl Decomposition for HermitianDecomposition {
    fn reconstruct(&self, mode_dims: &[usize]) -> Result<HermitianTensor> {
        let mut out = HermitianTensor::zeros(mode_dims.to_vec())?;
        for t in &self.terms {
            t.factors.check_dims(mode_dims)?;
            out.add_scaled(&HermitianTensor::rank_one(&t.factors), t.weight)?;
        }
        Ok(out)
    }

    fn side_condition_defect(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.factors.norms())
            .map(|n| (n - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationReport {
    /// `‖H − reconstruction‖_F`.
    pub reconstruction_error: f64,
    pub side_condition_defect: f64,
}

pub fn verify_decomposition(h: &HermitianTensor, d: &impl Decomposition) -> Result<VerificationReport> {
    let rebuilt = d.reconstruct(h.mode_dims())?;
    Ok(VerificationReport {
        reconstruction_error: h.sub(&rebuilt)?.frobenius_norm(),
        side_condition_defect: d.side_condition_defect(),
    })
}

fn column_matrix(factors: &[ComplexTensor]) -> Result<CMatrix> {
    let Some(first) = factors.first() else {
        return Err(Error::InvalidInput("empty factor list".into()));
    };
    for f in factors {
        if f.mode_dims() != first.mode_dims() {
            return Err(Error::ShapeMismatch(format!(
                "factor {:?} vs {:?}",
                f.mode_dims(),
                first.mode_dims()
            )));
        }
    }
    let cols: Vec<Vec<C64>> = factors.iter().map(|f| f.as_slice().to_vec()).collect();
    CMatrix::from_columns(&cols)
}

/// `V = U·Q` between two factorizations `Σ U_i U_i† = Σ V_j V_j†`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HJWRelation {
    /// `s × r`.
    pub q: CMatrix,
    /// `‖Q Q† − I_s‖_F`.
    pub co_isometry_defect: f64,
    /// `‖V − U Q‖_F`.
    pub reconstruction_defect: f64,
    pub accepted: bool,
}

/// Relate the scaled eigen factors `U` (`s` of them) to another list `V`
/// (`r` of them) through least squares on the flattened factor matrices.
pub fn hjw_relate(u_factors: &[ComplexTensor], v_factors: &[ComplexTensor]) -> Result<HJWRelation> {
    let u = column_matrix(u_factors)?;
    let v = column_matrix(v_factors)?;
    if u.rows() != v.rows() {
        return Err(Error::ShapeMismatch(format!(
            "factors flatten to {} and {} entries",
            u.rows(),
            v.rows()
        )));
    }
    let gu = u.matmul(&u.adjoint());
    let gv = v.matmul(&v.adjoint());
    let defect = gu.sub(&gv).frobenius_norm();
    if defect > RELATION_TOL * gu.frobenius_norm().max(1.0) {
        return Err(Error::NotSameTensor { defect });
    }
    let uh = u.adjoint();
    let q = solve(&uh.matmul(&u), &uh.matmul(&v)).map_err(|e| match e {
        Error::SingularSystem { .. } => Error::RankDeficientU,
        other => other,
    })?;
    let s = u.cols();
    let co_isometry_defect = q.matmul(&q.adjoint()).sub(&CMatrix::identity(s)).frobenius_norm();
    let reconstruction_defect = v.sub(&u.matmul(&q)).frobenius_norm();
    Ok(HJWRelation {
        accepted: v.cols() >= s
            && co_isometry_defect <= RELATION_TOL
            && reconstruction_defect <= RELATION_TOL,
        q,
        co_isometry_defect,
        reconstruction_defect,
    })
}

/// Overlap matrix between an eigen-matrix decomposition and a positive
/// rank-one candidate, with the residuals of the identities it must satisfy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    /// `r × s`, `Q_ij = √(p_i/λ_j)·⟨U_j, ⊗u_i⟩`.
    pub q: CMatrix,
    /// `‖Q†Q − I_s‖_F`.
    pub isometry_defect: f64,
    /// `‖√p_i ⊗u_i − Σ_j Q_ij √λ_j U_j‖` over all `i`.
    pub candidate_residual: f64,
    /// `‖√λ_j U_j − Σ_i conj(Q_ij) √p_i ⊗u_i‖` over all `j`.
    pub eigen_residual: f64,
    pub accepted: bool,
}

pub fn overlap_q(eigen: &EigenMatrixDecomposition, candidate: &HermitianDecomposition) -> Result<OverlapReport> {
    if let Some(l) = eigen.lambdas.iter().find(|&&l| l <= 0.0) {
        return Err(Error::NonPositiveWeights(format!("eigen-matrix weight {l}")));
    }
    if let Some(t) = candidate.terms.iter().find(|t| t.weight <= 0.0) {
        return Err(Error::NonPositiveWeights(format!("candidate weight {}", t.weight)));
    }
    let r = candidate.terms.len();
    let s = eigen.s;
    // rows: √p_i ⊗u_i and √λ_j U_j
    let a: Vec<Vec<C64>> = candidate
        .terms
        .iter()
        .map(|t| {
            let sp = t.weight.sqrt();
            ComplexTensor::product(&t.factors)
                .into_vec()
                .into_iter()
                .map(|z| z * sp)
                .collect()
        })
        .collect();
    let u: Vec<Vec<C64>> = eigen
        .factors
        .iter()
        .zip(&eigen.lambdas)
        .map(|(f, l)| f.as_slice().iter().map(|z| z * l.sqrt()).collect())
        .collect();
    if let (Some(x), Some(y)) = (a.first(), u.first()) {
        if x.len() != y.len() {
            return Err(Error::ShapeMismatch(format!(
                "candidate factors flatten to {} entries, eigen factors to {}",
                x.len(),
                y.len()
            )));
        }
    }
    // ⟨U_j, √p_i ⊗u_i⟩·√λ_j / λ_j = √(p_i/λ_j)⟨U_j, ⊗u_i⟩
    let q = CMatrix::from_fn(r, s, |i, j| vdot(&u[j], &a[i]) / eigen.lambdas[j]);
    let isometry_defect = q.adjoint().matmul(&q).sub(&CMatrix::identity(s)).frobenius_norm();

    let combo = |coef: &dyn Fn(usize) -> C64, rows: &[Vec<C64>]| -> Vec<C64> {
        let len = rows.first().map_or(0, Vec::len);
        let mut out = vec![C64::new(0.0, 0.0); len];
        for (idx, row) in rows.iter().enumerate() {
            let c = coef(idx);
            for (o, z) in out.iter_mut().zip(row) {
                *o += z * c;
            }
        }
        out
    };
    let mut candidate_residual = 0.0f64;
    for (i, ai) in a.iter().enumerate() {
        let rebuilt = combo(&|j| q[(i, j)], &u);
        let d: Vec<C64> = ai.iter().zip(&rebuilt).map(|(x, y)| x - y).collect();
        candidate_residual = candidate_residual.max(vec_norm(&d));
    }
    let mut eigen_residual = 0.0f64;
    for (j, uj) in u.iter().enumerate() {
        let rebuilt = combo(&|i| q[(i, j)].conj(), &a);
        let d: Vec<C64> = uj.iter().zip(&rebuilt).map(|(x, y)| x - y).collect();
        eigen_residual = eigen_residual.max(vec_norm(&d));
    }
    Ok(OverlapReport {
        accepted: isometry_defect <= RELATION_TOL
            && candidate_residual <= RELATION_TOL
            && eigen_residual <= RELATION_TOL,
        q,
        isometry_defect,
        candidate_residual,
        eigen_residual,
    })
}
