//! Mixed-state ensembles, density tensors, entanglement witnesses, and the
//! separability analyzer.
//!
//! The analyzer runs four stages: eigen-matrix decomposition, a witness scan
//! (negative matrix eigenvalue, then a negative Hermitian eigenvalue search),
//! enumeration of the rank-one elements of the eigen span, and an exact
//! nonnegative fit over those elements. Every verdict carries a certificate
//! that [`SeparabilityVerdict::reverify`] checks from scratch.

use serde::Serialize;

use crate::decomposition::{
    eigen_matrix_decompose, Decomposition, EigenMatrixDecomposition, HermitianDecomposition,
    HermitianTerm,
};
use crate::error::{Error, Result};
use crate::heig::{nonnegativity_probe, HeigOptions, NonnegativityVerdict, NEGATIVE_TOL};
use crate::linalg::{eigh, flatten, fold_vector, solve, vdot, vec_norm, CMatrix};
use crate::tensor::unravel;
use crate::{ComplexTensor, HermitianTensor, ModeVectorTuple, C64};

/// `|Σ p_i − 1|` and `|‖χ_i‖ − 1|` allowed in an ensemble.
pub const ENSEMBLE_TOL: f64 = 1e-10;
/// Span-determinant coefficients below this are treated as zero.
pub const SPAN_COEFF_TOL: f64 = 1e-12;

/// Probabilities with unit pure states of a common shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedStateEnsemble {
    probabilities: Vec<f64>,
    pure_states: Vec<ComplexTensor>,
}

impl MixedStateEnsemble {
    pub fn new(probabilities: Vec<f64>, pure_states: Vec<ComplexTensor>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidEnsemble("no states".into()));
        }
        if probabilities.len() != pure_states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} probabilities for {} states",
                probabilities.len(),
                pure_states.len()
            )));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidEnsemble(format!("probability {p} is not positive")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > ENSEMBLE_TOL {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        let dims = pure_states[0].mode_dims();
        for (i, s) in pure_states.iter().enumerate() {
            if s.mode_dims() != dims {
                return Err(Error::InconsistentShapes(format!(
                    "state {} has mode dims {:?}, state 1 has {:?}",
                    i + 1,
                    s.mode_dims(),
                    dims
                )));
            }
            let norm = s.frobenius_norm();
            if (norm - 1.0).abs() > ENSEMBLE_TOL {
                return Err(Error::InvalidEnsemble(format!(
                    "state {} has norm {norm}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            probabilities,
            pure_states,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn pure_states(&self) -> &[ComplexTensor] {
        &self.pure_states
    }

    pub fn mode_dims(&self) -> &[usize] {
        self.pure_states[0].mode_dims()
    }

    /// Apply the local unitaries `χ_i ← χ_i ×_1 Q_1 ⋯ ×_m Q_m` to every state.
    pub fn transformed(&self, qs: &[CMatrix]) -> Result<Self> {
        let states = self
            .pure_states
            .iter()
            .map(|s| s.multi_mode_product(qs))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.probabilities.clone(), states)
    }
}

/// `Σ p_i χ_i ⊗ χ_i*`.
pub fn density_tensor(e: &MixedStateEnsemble) -> HermitianTensor {
    let mut h = HermitianTensor::zeros(e.mode_dims().to_vec()).expect("validated dims");
    for (p, s) in e.probabilities.iter().zip(&e.pure_states) {
        h.add_scaled(&HermitianTensor::hermitianize(s), *p)
            .expect("validated dims");
    }
    h
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    NegativeMatrixEigenvalue {
        lambda_min: f64,
        eigenvector: ComplexTensor,
    },
    NegativeHermitianEigenvalue {
        lambda: f64,
        witness: ModeVectorTuple,
    },
    PositiveHermitianDecomposition {
        decomposition: HermitianDecomposition,
        reconstruction_error: f64,
    },
    SpanObstruction {
        candidates: Vec<ComplexTensor>,
        residual: f64,
    },
    Reason {
        text: String,
    },
}

/// Entanglement witnesses: a negative matrix eigenvalue, else a product tuple
/// with a negative value found by the multi-start search.
pub fn witness_scan(h: &HermitianTensor, opts: &HeigOptions) -> Result<Option<Certificate>> {
    let spec = eigh(&flatten(h))?;
    let last = spec.eigenvalues.len() - 1;
    if spec.min() < NEGATIVE_TOL {
        return Ok(Some(Certificate::NegativeMatrixEigenvalue {
            lambda_min: spec.min(),
            eigenvector: fold_vector(&spec.eigenvector(last), h.mode_dims())?,
        }));
    }
    let probe = nonnegativity_probe(h, opts)?;
    if probe.verdict == NonnegativityVerdict::NegativeWitness {
        return Ok(Some(Certificate::NegativeHermitianEigenvalue {
            lambda: probe.min_value_found,
            witness: probe.witness,
        }));
    }
    Ok(None)
}

/// A rank-one element `k_1 U_1 + k_2 U_2` of the eigen span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanElement {
    pub k1: C64,
    pub k2: C64,
    /// Unit-norm `u ⊗ v`.
    pub tensor: ComplexTensor,
    pub factors: ModeVectorTuple,
}

impl SpanElement {
    /// `k_2/k_1`, `None` on the `k_1 = 0` ray.
    pub fn ratio(&self) -> Option<C64> {
        (self.k1.norm() > 0.0).then(|| self.k2 / self.k1)
    }
}

fn det2(m: &[C64]) -> C64 {
    m[0] * m[3] - m[1] * m[2]
}

/// Split a rank-one 2×2 matrix into unit `u`, `v` with `M/‖M‖ = u ⊗ v`.
fn factor_rank_one(m: &[C64]) -> Result<(ComplexTensor, ModeVectorTuple)> {
    let norm = vec_norm(m);
    if norm < 1e-300 {
        return Err(Error::ZeroTensor);
    }
    let unit: Vec<C64> = m.iter().map(|z| z / norm).collect();
    let cols = [vec![unit[0], unit[2]], vec![unit[1], unit[3]]];
    let a = if vec_norm(&cols[0]) >= vec_norm(&cols[1]) { &cols[0] } else { &cols[1] };
    let an = vec_norm(a);
    let u: Vec<C64> = a.iter().map(|z| z / an).collect();
    // bᵀ = u† M
    let v = vec![
        u[0].conj() * unit[0] + u[1].conj() * unit[2],
        u[0].conj() * unit[1] + u[1].conj() * unit[3],
    ];
    let factors = ModeVectorTuple::new(vec![u, v]);
    let tensor = ComplexTensor::product(&factors);
    Ok((tensor, factors.normalized()?))
}

fn element(u1: &[C64], u2: &[C64], k1: C64, k2: C64) -> Result<SpanElement> {
    let m: Vec<C64> = u1.iter().zip(u2).map(|(a, b)| a * k1 + b * k2).collect();
    let (tensor, factors) = factor_rank_one(&m)?;
    Ok(SpanElement {
        k1,
        k2,
        tensor,
        factors,
    })
}

/// Rank-one elements of `span{U_1, U_2}` for 2×2 factors: the roots of
/// `det(k_1 U_1 + k_2 U_2) = 0` in `k_2/k_1`, plus the `k_1 = 0` ray.
pub fn rank_one_rays(u1: &ComplexTensor, u2: &ComplexTensor) -> Result<Vec<SpanElement>> {
    for u in [u1, u2] {
        if u.mode_dims() != [2, 2] {
            return Err(Error::OutOfScope(format!("mode dims {:?}", u.mode_dims())));
        }
    }
    let (x, y) = (u1.as_slice(), u2.as_slice());
    // det(A + B) = det A + det B + (a11 b22 + a22 b11 − a12 b21 − a21 b12)
    let a = det2(y);
    let c = det2(x);
    let b = x[0] * y[3] + x[3] * y[0] - x[1] * y[2] - x[2] * y[1];
    let zero = |z: C64| z.norm() <= SPAN_COEFF_TOL;
    if zero(a) && zero(b) && zero(c) {
        return Err(Error::DegenerateSpan);
    }
    let one = C64::new(1.0, 0.0);
    let mut out = Vec::new();
    if zero(a) {
        out.push(element(x, y, C64::new(0.0, 0.0), one)?);
        if !zero(b) {
            out.push(element(x, y, one, -c / b)?);
        }
        return Ok(out);
    }
    let root = (b * b - a * c * 4.0).sqrt();
    let plus = b + root;
    let minus = b - root;
    let q = if plus.norm() >= minus.norm() { plus } else { minus } * -0.5;
    if zero(root) {
        out.push(element(x, y, one, -b / (a * 2.0))?);
    } else {
        out.push(element(x, y, one, q / a)?);
        out.push(element(x, y, one, c / q)?);
    }
    Ok(out)
}

/// All rank-one rays of the eigen span, within the 2×2, `s ≤ 2` scope.
pub fn rank_one_elements_in_span(eigen: &EigenMatrixDecomposition) -> Result<Vec<SpanElement>> {
    let dims = eigen.factors.first().map(ComplexTensor::mode_dims);
    if dims.is_some_and(|d| d != [2, 2]) || eigen.s > 2 {
        return Err(Error::OutOfScope(format!(
            "span enumeration needs mode dims [2, 2] and s ≤ 2, got {:?} and s = {}",
            dims.unwrap_or(&[]),
            eigen.s
        )));
    }
    match eigen.factors.as_slice() {
        [] => Ok(Vec::new()),
        [u] => {
            if det2(u.as_slice()).norm() <= SPAN_COEFF_TOL {
                Ok(vec![element(u.as_slice(), u.as_slice(), C64::new(1.0, 0.0), C64::new(0.0, 0.0))?])
            } else {
                Ok(Vec::new())
            }
        }
        [u1, u2] => rank_one_rays(u1, u2),
        _ => unreachable!(),
    }
}

/// Best nonnegative weights for `H ≈ Σ p_j ρ(A_j)` over unit candidates,
/// found by solving the normal equations on every support subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonnegativeFit {
    pub weights: Vec<f64>,
    pub residual: f64,
}

pub fn nonnegative_fit(h: &HermitianTensor, candidates: &[ComplexTensor]) -> Result<NonnegativeFit> {
    let k = candidates.len();
    if k > 16 {
        return Err(Error::InvalidInput(format!("{k} candidates is too many to enumerate")));
    }
    let terms: Vec<HermitianTensor> = candidates.iter().map(HermitianTensor::hermitianize).collect();
    let gram = |i: usize, j: usize| vdot(candidates[i].as_slice(), candidates[j].as_slice()).norm_sqr();
    let rhs: Vec<f64> = terms
        .iter()
        .map(|t| t.inner_product(h).map(|z| z.re))
        .collect::<Result<_>>()?;

    let residual_of = |w: &[f64]| -> Result<f64> {
        let mut r = h.clone();
        for (t, &p) in terms.iter().zip(w) {
            r.add_scaled(t, -p)?;
        }
        Ok(r.frobenius_norm())
    };

    let mut best = NonnegativeFit {
        weights: vec![0.0; k],
        residual: h.frobenius_norm(),
    };
    for mask in 1usize..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let g = CMatrix::from_fn(idx.len(), idx.len(), |a, b| C64::new(gram(idx[a], idx[b]), 0.0));
        let b = CMatrix::from_fn(idx.len(), 1, |a, _| C64::new(rhs[idx[a]], 0.0));
        let Ok(sol) = solve(&g, &b) else { continue };
        let mut w = vec![0.0; k];
        let mut feasible = true;
        for (a, &i) in idx.iter().enumerate() {
            let p = sol[(a, 0)].re;
            if p < -1e-10 {
                feasible = false;
            }
            w[i] = p.max(0.0);
        }
        if !feasible {
            continue;
        }
        let residual = residual_of(&w)?;
        if residual < best.residual {
            best = NonnegativeFit { weights: w, residual };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityConfig {
    pub heig: HeigOptions,
    /// Rescale the input to unit matrix trace before analysis.
    pub normalize_trace: bool,
    /// Fit residual accepted as a positive decomposition.
    pub separable_tol: f64,
    /// Fit residual above which an in-scope span proves entanglement.
    pub obstruction_floor: f64,
}

impl Default for SeparabilityConfig {
    fn default() -> Self {
        Self {
            heig: HeigOptions::default(),
            normalize_trace: false,
            separable_tol: 1e-8,
            obstruction_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Entangled,
    Separable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparabilityVerdict {
    pub verdict: Verdict,
    pub certificate: Certificate,
    /// Number of nonzero matrix eigenvalues.
    pub eigen_rank: usize,
    pub trace_normalized: bool,
}

fn inconclusive(text: impl Into<String>, eigen_rank: usize, trace_normalized: bool) -> SeparabilityVerdict {
    SeparabilityVerdict {
        verdict: Verdict::Inconclusive,
        certificate: Certificate::Reason { text: text.into() },
        eigen_rank,
        trace_normalized,
    }
}

pub fn separability_analyze_ensemble(
    e: &MixedStateEnsemble,
    config: &SeparabilityConfig,
) -> SeparabilityVerdict {
    separability_analyze(&density_tensor(e), config)
}

pub fn separability_analyze(h: &HermitianTensor, config: &SeparabilityConfig) -> SeparabilityVerdict {
    let mut trace_normalized = false;
    let scaled;
    let h = if config.normalize_trace {
        match h.matrix_trace() {
            Ok(t) if t.abs() > 1e-12 => {
                trace_normalized = true;
                scaled = h.scale(1.0 / t);
                &scaled
            }
            Ok(_) => return inconclusive("matrix trace is zero; cannot normalize", 0, false),
            Err(e) => return inconclusive(e.to_string(), 0, false),
        }
    } else {
        h
    };

    let eigen = match eigen_matrix_decompose(h) {
        Ok(e) => e,
        Err(e) => return inconclusive(format!("eigen-matrix decomposition failed: {e}"), 0, trace_normalized),
    };
    let rank = eigen.s;
    match witness_scan(h, &config.heig) {
        Ok(Some(certificate)) => {
            return SeparabilityVerdict {
                verdict: Verdict::Entangled,
                certificate,
                eigen_rank: rank,
                trace_normalized,
            }
        }
        Ok(None) => {}
        Err(e) => return inconclusive(format!("witness scan failed: {e}"), rank, trace_normalized),
    }

    let elements = match rank_one_elements_in_span(&eigen) {
        Ok(v) => v,
        Err(Error::OutOfScope(why)) => {
            return inconclusive(
                format!("no witness found; span enumeration out of scope ({why})"),
                rank,
                trace_normalized,
            )
        }
        Err(Error::DegenerateSpan) => {
            return inconclusive(
                "no witness found; the eigen span contains infinitely many rank-one rays",
                rank,
                trace_normalized,
            )
        }
        Err(e) => return inconclusive(format!("span enumeration failed: {e}"), rank, trace_normalized),
    };
    let candidates: Vec<ComplexTensor> = elements.iter().map(|e| e.tensor.clone()).collect();
    let fit = match nonnegative_fit(h, &candidates) {
        Ok(f) => f,
        Err(e) => return inconclusive(format!("nonnegative fit failed: {e}"), rank, trace_normalized),
    };
    let scale = h.frobenius_norm().max(1.0);
    if fit.residual <= config.separable_tol * scale {
        let terms = elements
            .iter()
            .zip(&fit.weights)
            .filter(|(_, &p)| p > 0.0)
            .map(|(e, &p)| HermitianTerm {
                weight: p,
                factors: e.factors.clone(),
            })
            .collect();
        return SeparabilityVerdict {
            verdict: Verdict::Separable,
            certificate: Certificate::PositiveHermitianDecomposition {
                decomposition: HermitianDecomposition::new(terms),
                reconstruction_error: fit.residual,
            },
            eigen_rank: rank,
            trace_normalized,
        };
    }
    if fit.residual > config.obstruction_floor * scale {
        return SeparabilityVerdict {
            verdict: Verdict::Entangled,
            certificate: Certificate::SpanObstruction {
                candidates,
                residual: fit.residual,
            },
            eigen_rank: rank,
            trace_normalized,
        };
    }
    inconclusive(
        format!(
            "best nonnegative fit residual {:.3e} lies between the acceptance and obstruction thresholds",
            fit.residual
        ),
        rank,
        trace_normalized,
    )
}

/// `Σ_{I,J} conj(X_I) H[I,J] X_J` by explicit multi-index loops.
fn naive_form(h: &HermitianTensor, x: &[C64]) -> C64 {
    let dims = h.mode_dims();
    let n = h.flat_dim();
    let mut acc = C64::new(0.0, 0.0);
    for row in 0..n {
        let i = unravel(row, dims);
        for col in 0..n {
            let j = unravel(col, dims);
            acc += x[row].conj() * h.get(&i, &j) * x[col];
        }
    }
    acc
}

/// Outcome of an independent certificate check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reverification {
    pub holds: bool,
    pub detail: String,
}

impl SeparabilityVerdict {
    /// Re-check the certificate against `h` without reusing analyzer state.
    /// `h` is the tensor that was analyzed (after any trace normalization).
    pub fn reverify(&self, h: &HermitianTensor, config: &SeparabilityConfig) -> Result<Reverification> {
        let scale = h.frobenius_norm().max(1.0);
        let out = match &self.certificate {
            Certificate::NegativeMatrixEigenvalue { eigenvector, .. } => {
                let norm = eigenvector.frobenius_norm();
                let value = naive_form(h, eigenvector.as_slice()).re / (norm * norm);
                Reverification {
                    holds: value < NEGATIVE_TOL,
                    detail: format!("X†HX/‖X‖² = {value:.6e}"),
                }
            }
            Certificate::NegativeHermitianEigenvalue { witness, .. } => {
                let unit = witness.normalized()?;
                let value = naive_form(h, ComplexTensor::product(&unit).as_slice()).re;
                Reverification {
                    holds: value < NEGATIVE_TOL,
                    detail: format!("H(x) = {value:.6e}"),
                }
            }
            Certificate::PositiveHermitianDecomposition { decomposition, .. } => {
                let err = h.sub(&decomposition.reconstruct(h.mode_dims())?)?.frobenius_norm();
                let unit = decomposition.side_condition_defect();
                let positive = decomposition.terms.iter().all(|t| t.weight > 0.0);
                let span = eigen_matrix_decompose(h)?;
                let span_defect = decomposition
                    .terms
                    .iter()
                    .map(|t| span_distance(&span, &ComplexTensor::product(&t.factors)))
                    .fold(0.0, f64::max);
                Reverification {
                    holds: err <= config.separable_tol * scale
                        && unit <= 1e-12
                        && positive
                        && span_defect <= 1e-8,
                    detail: format!(
                        "reconstruction {err:.3e}, unit defect {unit:.3e}, span distance {span_defect:.3e}"
                    ),
                }
            }
            Certificate::SpanObstruction { candidates, residual } => {
                let span = eigen_matrix_decompose(h)?;
                let fresh = rank_one_elements_in_span(&span)?;
                let covered = fresh.len() == candidates.len()
                    && fresh.iter().all(|f| {
                        candidates
                            .iter()
                            .any(|c| (vdot(f.tensor.as_slice(), c.as_slice()).norm() - 1.0).abs() < 1e-8)
                    });
                let refit = nonnegative_fit(h, candidates)?;
                Reverification {
                    holds: covered
                        && refit.residual > config.obstruction_floor * scale
                        && (refit.residual - residual).abs() <= 1e-9 * scale,
                    detail: format!(
                        "{} rank-one rays, best nonnegative fit residual {:.6e}",
                        fresh.len(),
                        refit.residual
                    ),
                }
            }
            Certificate::Reason { text } => Reverification {
                holds: true,
                detail: text.clone(),
            },
        };
        Ok(out)
    }
}

/// `‖X − P_span X‖` for the span of the eigen factors.
fn span_distance(span: &EigenMatrixDecomposition, x: &ComplexTensor) -> f64 {
    let mut r = x.as_slice().to_vec();
    for u in &span.factors {
        let c = vdot(u.as_slice(), &r);
        for (ri, ui) in r.iter_mut().zip(u.as_slice()) {
            *ri -= c * ui;
        }
    }
    vec_norm(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_mode_tuple, random_unit_tensor, seeded_rng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn basis_product(a: usize, b: usize) -> ComplexTensor {
        let mut v = vec![c(0., 0.); 4];
        v[a * 2 + b] = c(1., 0.);
        ComplexTensor::new(vec![2, 2], v).unwrap()
    }

    fn quick() -> SeparabilityConfig {
        SeparabilityConfig {
            heig: HeigOptions {
                starts: 8,
                ..HeigOptions::default()
            },
            ..SeparabilityConfig::default()
        }
    }

    #[test]
    fn ensemble_validation() {
        let s = basis_product(0, 0);
        assert!(MixedStateEnsemble::new(vec![0.5, 0.4], vec![s.clone(), s.clone()]).is_err());
        assert!(MixedStateEnsemble::new(vec![1.0], vec![s.scale(c(2., 0.))]).is_err());
        assert!(MixedStateEnsemble::new(vec![1.5, -0.5], vec![s.clone(), s.clone()]).is_err());
        let other = ComplexTensor::new(vec![4], vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert!(matches!(
            MixedStateEnsemble::new(vec![0.5, 0.5], vec![s, other]),
            Err(Error::InconsistentShapes(_))
        ));
    }

    #[test]
    fn single_product_state_density() {
        let u = random_mode_tuple(&mut seeded_rng(1, 0), &[2, 3]);
        let e = MixedStateEnsemble::new(vec![1.0], vec![ComplexTensor::product(&u)]).unwrap();
        let h = density_tensor(&e);
        assert!(h.sub(&HermitianTensor::rank_one(&u)).unwrap().frobenius_norm() < 1e-15);
        assert!((h.matrix_trace().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_is_affine_in_probabilities() {
        let mut rng = seeded_rng(2, 0);
        let s: Vec<ComplexTensor> = (0..3).map(|_| random_unit_tensor(&mut rng, &[2, 2])).collect();
        let e1 = MixedStateEnsemble::new(vec![0.4, 0.6], s[..2].to_vec()).unwrap();
        let e2 = MixedStateEnsemble::new(vec![1.0], s[2..].to_vec()).unwrap();
        let alpha = 0.3;
        let mixed = MixedStateEnsemble::new(vec![alpha * 0.4, alpha * 0.6, 1.0 - alpha], s).unwrap();
        let mut expect = density_tensor(&e1).scale(alpha);
        expect.add_scaled(&density_tensor(&e2), 1.0 - alpha).unwrap();
        assert!(density_tensor(&mixed).sub(&expect).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn witness_from_negative_matrix_eigenvalue() {
        let h = HermitianTensor::hermitianize(&basis_product(0, 0))
            .sub(&HermitianTensor::hermitianize(&basis_product(1, 1)).scale(0.1))
            .unwrap();
        match witness_scan(&h, &quick().heig).unwrap() {
            Some(Certificate::NegativeMatrixEigenvalue { lambda_min, .. }) => {
                assert!((lambda_min + 0.1).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_witness_for_density_or_zero() {
        let mut rng = seeded_rng(3, 0);
        let s: Vec<ComplexTensor> = (0..2).map(|_| random_unit_tensor(&mut rng, &[2, 2])).collect();
        let h = density_tensor(&MixedStateEnsemble::new(vec![0.5, 0.5], s).unwrap());
        assert!(witness_scan(&h, &quick().heig).unwrap().is_none());
        let z = HermitianTensor::zeros(vec![2, 2]).unwrap();
        assert!(witness_scan(&z, &quick().heig).unwrap().is_none());
    }

    #[test]
    fn axis_rays() {
        let rays = rank_one_rays(&basis_product(0, 0), &basis_product(1, 1)).unwrap();
        assert_eq!(rays.len(), 2);
        let mut kinds: Vec<bool> = rays.iter().map(|r| r.ratio().is_none_or(|t| t.norm() < 1e-14)).collect();
        kinds.sort();
        assert_eq!(kinds, vec![true, true]);
        for r in &rays {
            let overlap00 = vdot(r.tensor.as_slice(), basis_product(0, 0).as_slice()).norm();
            let overlap11 = vdot(r.tensor.as_slice(), basis_product(1, 1).as_slice()).norm();
            assert!((overlap00.max(overlap11) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_span() {
        // e1 ⊗ span{e1, e2}: every element is a product
        assert!(matches!(
            rank_one_rays(&basis_product(0, 0), &basis_product(0, 1)),
            Err(Error::DegenerateSpan)
        ));
    }

    #[test]
    fn out_of_scope_shapes() {
        let mut rng = seeded_rng(4, 0);
        let s = random_unit_tensor(&mut rng, &[2, 3]);
        let h = density_tensor(&MixedStateEnsemble::new(vec![1.0], vec![s]).unwrap());
        let e = eigen_matrix_decompose(&h).unwrap();
        assert!(matches!(rank_one_elements_in_span(&e), Err(Error::OutOfScope(_))));
        let v = separability_analyze(&h, &quick());
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn orthogonal_products_are_separable() {
        let e = MixedStateEnsemble::new(vec![0.3, 0.7], vec![basis_product(0, 0), basis_product(1, 1)]).unwrap();
        let h = density_tensor(&e);
        let v = separability_analyze(&h, &quick());
        assert_eq!(v.verdict, Verdict::Separable);
        let Certificate::PositiveHermitianDecomposition { decomposition, reconstruction_error } = &v.certificate else {
            panic!("{v:?}")
        };
        assert_eq!(decomposition.r, 2);
        assert!(*reconstruction_error <= 1e-9);
        assert!(v.reverify(&h, &quick()).unwrap().holds);
    }

    #[test]
    fn bell_state_is_entangled() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexTensor::new(vec![2, 2], vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]).unwrap();
        let h = density_tensor(&MixedStateEnsemble::new(vec![1.0], vec![bell]).unwrap());
        let v = separability_analyze(&h, &quick());
        assert_eq!(v.verdict, Verdict::Entangled);
        assert!(matches!(v.certificate, Certificate::SpanObstruction { .. }));
        assert!(v.reverify(&h, &quick()).unwrap().holds);
    }

    #[test]
    fn negative_input_is_entangled_with_matrix_witness() {
        let h = HermitianTensor::hermitianize(&basis_product(0, 0))
            .sub(&HermitianTensor::hermitianize(&basis_product(1, 1)).scale(0.1))
            .unwrap();
        let v = separability_analyze(&h, &quick());
        assert_eq!(v.verdict, Verdict::Entangled);
        assert!(v.reverify(&h, &quick()).unwrap().holds);
    }

    #[test]
    fn trace_normalization() {
        let e = MixedStateEnsemble::new(vec![0.3, 0.7], vec![basis_product(0, 0), basis_product(1, 1)]).unwrap();
        let h = density_tensor(&e).scale(4.0);
        let cfg = SeparabilityConfig { normalize_trace: true, ..quick() };
        let v = separability_analyze(&h, &cfg);
        assert!(v.trace_normalized);
        assert_eq!(v.verdict, Verdict::Separable);
    }

    #[test]
    fn fit_prefers_feasible_support() {
        let a = basis_product(0, 0);
        let b = basis_product(1, 1);
        let mut h = HermitianTensor::hermitianize(&a).scale(0.25);
        h.add_scaled(&HermitianTensor::hermitianize(&b), 0.75).unwrap();
        let f = nonnegative_fit(&h, &[a, b]).unwrap();
        assert!((f.weights[0] - 0.25).abs() < 1e-14 && (f.weights[1] - 0.75).abs() < 1e-14);
        assert!(f.residual < 1e-14);
    }
}
