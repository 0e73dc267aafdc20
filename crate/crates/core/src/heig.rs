//! Conjugate polynomial evaluation, stationarity contractions, and
//! multi-start searches for extreme Hermitian eigenvalues.
//!
//! `H(x) = X†·H·X` with `X = x_1 ⊗ ⋯ ⊗ x_m`. Fixing every vector but `x_k`
//! leaves a Hermitian quadratic form `x_k†·M_k·x_k`; its gradient `M_k·x_k`
//! is the contraction whose fixed points `M_k x_k = λ x_k` are the
//! eigenpairs. Searches sweep the modes cyclically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{eigh, vdot, vec_norm, CMatrix, HermitianMatrix};
use crate::ptrace::offsets;
use crate::random::{random_mode_tuple, seeded_rng};
use crate::{ComplexTensor, HermitianTensor, ModeVectorTuple, C64};

/// Values below this count as a negative witness.
pub const NEGATIVE_TOL: f64 = -1e-9;

const ZERO_CONTRACTION: f64 = 1e-14;

fn product_vector(h: &HermitianTensor, x: &ModeVectorTuple) -> Result<Vec<C64>> {
    x.check_dims(h.mode_dims())?;
    Ok(ComplexTensor::product(x).into_vec())
}

fn mat_vec(h: &HermitianTensor, x: &[C64]) -> Vec<C64> {
    let n = x.len();
    h.as_slice()
        .chunks_exact(n)
        .map(|row| vdot_plain(row, x))
        .collect()
}

fn vdot_plain(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `X†·H·X` before discarding the imaginary part.
pub fn evaluate_complex(h: &HermitianTensor, x: &ModeVectorTuple) -> Result<C64> {
    let big = product_vector(h, x)?;
    Ok(vdot(&big, &mat_vec(h, &big)))
}

/// `H(x) = ⟨H, ⊗x_i ⊗ x_j*⟩`, always real for Hermitian `H`.
pub fn evaluate(h: &HermitianTensor, x: &ModeVectorTuple) -> Result<f64> {
    Ok(evaluate_complex(h, x)?.re)
}

fn check_mode(h: &HermitianTensor, mode: usize) -> Result<()> {
    if mode >= h.order() {
        return Err(Error::BadModeIndex {
            index: mode + 1,
            order: h.order(),
        });
    }
    Ok(())
}

/// Contract `y` against `w_l` on every mode `l ≠ k`.
fn contract_except(y: &[C64], dims: &[usize], w: &[Vec<C64>], mode: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dims[mode]];
    let mut idx = vec![0usize; dims.len()];
    for &v in y {
        let weight: C64 = (0..dims.len())
            .filter(|&l| l != mode)
            .map(|l| w[l][idx[l]])
            .product();
        out[idx[mode]] += v * weight;
        for l in (0..dims.len()).rev() {
            idx[l] += 1;
            if idx[l] < dims[l] {
                break;
            }
            idx[l] = 0;
        }
    }
    out
}

/// `⟨H, ⊗_i x_i ⊗_{j≠k} x_j*⟩`, indexed by the open conjugate slot of mode `k`.
pub fn gradient_contraction(h: &HermitianTensor, x: &ModeVectorTuple, mode: usize) -> Result<Vec<C64>> {
    check_mode(h, mode)?;
    let y = mat_vec(h, &product_vector(h, x)?);
    let conj: Vec<Vec<C64>> = x
        .vectors
        .iter()
        .map(|v| v.iter().map(|z| z.conj()).collect())
        .collect();
    Ok(contract_except(&y, h.mode_dims(), &conj, mode))
}

/// `⟨H, ⊗_{i≠k} x_i ⊗_j x_j*⟩`, indexed by the open slot of mode `k`; the
/// conjugate of [`gradient_contraction`]. Summed directly over `conj(H)`.
pub fn gradient_contraction_conj(
    h: &HermitianTensor,
    x: &ModeVectorTuple,
    mode: usize,
) -> Result<Vec<C64>> {
    check_mode(h, mode)?;
    let big = product_vector(h, x)?;
    let n = big.len();
    let dims = h.mode_dims();
    // z[I] = Σ_J conj(H[I,J])·conj(X_J)
    let z: Vec<C64> = h
        .as_slice()
        .chunks_exact(n)
        .map(|row| row.iter().zip(&big).map(|(a, b)| (a * b).conj()).sum())
        .collect();
    Ok(contract_except(&z, dims, &x.vectors, mode))
}

/// Index layout splitting the flat index into mode `k` and the rest.
struct ModeLayout {
    own: Vec<usize>,
    rest: Vec<usize>,
    rest_modes: Vec<usize>,
}

impl ModeLayout {
    fn new(dims: &[usize], mode: usize) -> Self {
        let rest_modes: Vec<usize> = (0..dims.len()).filter(|&l| l != mode).collect();
        Self {
            own: offsets(dims, &[mode]),
            rest: offsets(dims, &rest_modes),
            rest_modes,
        }
    }

    /// `M_k` with `H(x) = x_k† M_k x_k`.
    fn block(&self, h: &HermitianTensor, x: &ModeVectorTuple) -> CMatrix {
        let n = h.flat_dim();
        let data = h.as_slice();
        let rest = ModeVectorTuple::new(
            self.rest_modes.iter().map(|&l| x.vectors[l].clone()).collect(),
        );
        let w = if self.rest_modes.is_empty() {
            vec![C64::new(1.0, 0.0)]
        } else {
            ComplexTensor::product(&rest).into_vec()
        };
        let nk = self.own.len();
        // hw[row][b] = Σ_s H[row, (b, s)]·w_s
        let mut hw = vec![C64::new(0.0, 0.0); n * nk];
        for row in 0..n {
            let line = &data[row * n..(row + 1) * n];
            for (b, &ob) in self.own.iter().enumerate() {
                hw[row * nk + b] = self
                    .rest
                    .iter()
                    .zip(&w)
                    .map(|(&os, ws)| line[ob + os] * ws)
                    .sum();
            }
        }
        CMatrix::from_fn(nk, nk, |a, b| {
            self.rest
                .iter()
                .zip(&w)
                .map(|(&or, wr)| wr.conj() * hw[(self.own[a] + or) * nk + b])
                .sum()
        })
    }
}

/// The Hermitian block `M_k(x)`; `gradient_contraction(H, x, k) = M_k·x_k`.
pub fn block_matrix(h: &HermitianTensor, x: &ModeVectorTuple, mode: usize) -> Result<HermitianMatrix> {
    check_mode(h, mode)?;
    x.check_dims(h.mode_dims())?;
    Ok(HermitianMatrix::new(ModeLayout::new(h.mode_dims(), mode).block(h, x))
        .expect("block of a Hermitian tensor is Hermitian"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Max,
    Min,
}

/// How one mode is refreshed inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// `x_k ←` top (or bottom) eigenvector of `M_k`: exact block ascent.
    #[default]
    BlockEigen,
    /// Shifted power step, `x_k ∝ g ± σ x_k` with `σ = ‖H‖_F`.
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeigOptions {
    /// Bound on the per-sweep change of λ.
    pub tol: f64,
    /// Bound on the stationarity residual.
    pub residual_tol: f64,
    /// Sweep budget per start.
    pub max_iters: usize,
    pub starts: usize,
    pub seed: u64,
    pub rule: UpdateRule,
    pub exec: Execution,
}

impl Default for HeigOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            residual_tol: 1e-8,
            max_iters: 2000,
            starts: 32,
            seed: 1,
            rule: UpdateRule::BlockEigen,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermitianEigenpair {
    pub lambda: f64,
    /// Unit, phase-gauged.
    pub x: ModeVectorTuple,
    /// `max_k ‖⟨H, ⊗x_i ⊗_{j≠k} x_j*⟩ − λ x_k‖`.
    pub residual: f64,
    /// Same for the conjugate stationarity condition.
    pub residual_conj: f64,
    /// Sweeps used.
    pub iterations: usize,
    /// Stream index of the seeded start (0 when started from a given tuple).
    pub start_seed: u64,
    pub converged: bool,
}

impl HermitianEigenpair {
    pub fn require_converged(&self) -> Result<&Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
                residual: self.residual,
            })
        }
    }
}

/// Both stationarity residuals at `(λ, x)`.
pub fn residuals(h: &HermitianTensor, x: &ModeVectorTuple, lambda: f64) -> Result<(f64, f64)> {
    let mut r13 = 0.0f64;
    let mut r12 = 0.0f64;
    for k in 0..h.order() {
        let g = gradient_contraction(h, x, k)?;
        let gc = gradient_contraction_conj(h, x, k)?;
        let xk = &x.vectors[k];
        let d13: Vec<C64> = g.iter().zip(xk).map(|(a, b)| a - b * lambda).collect();
        let d12: Vec<C64> = gc.iter().zip(xk).map(|(a, b)| a - b.conj() * lambda).collect();
        r13 = r13.max(vec_norm(&d13));
        r12 = r12.max(vec_norm(&d12));
    }
    Ok((r13, r12))
}

fn unit(v: Vec<C64>, mode: usize) -> Result<Vec<C64>> {
    let norm = vec_norm(&v);
    if norm < ZERO_CONTRACTION {
        return Err(Error::ZeroContraction { mode: mode + 1 });
    }
    Ok(v.into_iter().map(|z| z / norm).collect())
}

/// Cyclic block updates from `start` until λ and the residual settle.
///
/// Running out of sweeps still returns the pair, with `converged = false`.
pub fn power_iterate(
    h: &HermitianTensor,
    start: &ModeVectorTuple,
    objective: Objective,
    opts: &HeigOptions,
) -> Result<HermitianEigenpair> {
    start.check_dims(h.mode_dims())?;
    let mut x = start.normalized()?;
    let m = h.order();
    let layouts: Vec<ModeLayout> = (0..m).map(|k| ModeLayout::new(h.mode_dims(), k)).collect();
    let sigma = h.frobenius_norm();
    let mut lambda = evaluate(h, &x)?;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iters {
        iterations += 1;
        for (k, layout) in layouts.iter().enumerate() {
            let mk = layout.block(h, &x);
            x.vectors[k] = match opts.rule {
                UpdateRule::BlockEigen => {
                    let spec = eigh(&HermitianMatrix::new(mk)?)?;
                    let pick = match objective {
                        Objective::Max => 0,
                        Objective::Min => spec.eigenvalues.len() - 1,
                    };
                    spec.eigenvector(pick)
                }
                UpdateRule::Power => {
                    let xk = &x.vectors[k];
                    let g = mk.mul_vec(xk);
                    if vec_norm(&g) < ZERO_CONTRACTION && sigma < ZERO_CONTRACTION {
                        return Err(Error::ZeroContraction { mode: k + 1 });
                    }
                    let step: Vec<C64> = match objective {
                        Objective::Max => g.iter().zip(xk).map(|(a, b)| a + b * sigma).collect(),
                        Objective::Min => g.iter().zip(xk).map(|(a, b)| b * sigma - a).collect(),
                    };
                    // a vanishing shifted step means x_k is already an eigenvector of M_k
                    if vec_norm(&step) < ZERO_CONTRACTION {
                        xk.clone()
                    } else {
                        unit(step, k)?
                    }
                }
            };
        }
        let next = evaluate(h, &x)?;
        let delta = (next - lambda).abs();
        lambda = next;
        if delta <= opts.tol {
            let (r, _) = residuals(h, &x, lambda)?;
            if r <= opts.residual_tol {
                converged = true;
                break;
            }
        }
    }

    let x = x.gauged();
    let lambda = evaluate(h, &x)?;
    let (residual, residual_conj) = residuals(h, &x, lambda)?;
    Ok(HermitianEigenpair {
        lambda,
        x,
        residual,
        residual_conj,
        iterations,
        start_seed: 0,
        converged,
    })
}

/// Deterministic start tuple for stream `index`.
pub fn start_tuple(dims: &[usize], seed: u64, index: u64) -> ModeVectorTuple {
    random_mode_tuple(&mut seeded_rng(seed, index), dims)
}

fn better(candidate: &HermitianEigenpair, best: &HermitianEigenpair, objective: Objective) -> bool {
    if candidate.converged != best.converged {
        return candidate.converged;
    }
    match objective {
        Objective::Max => candidate.lambda > best.lambda + 1e-12,
        Objective::Min => candidate.lambda < best.lambda - 1e-12,
    }
}

/// Best pair over `opts.starts` seeded starts; ties go to the lowest start index.
pub fn search(
    h: &HermitianTensor,
    objective: Objective,
    opts: &HeigOptions,
) -> Result<HermitianEigenpair> {
    if opts.starts == 0 {
        return Err(Error::InvalidInput("at least one start is required".into()));
    }
    let dims = h.mode_dims().to_vec();
    let runs = opts.exec.map(opts.starts, |i| {
        let start = start_tuple(&dims, opts.seed, i as u64);
        power_iterate(h, &start, objective, opts).map(|mut p| {
            p.start_seed = i as u64;
            p
        })
    });
    let mut best: Option<HermitianEigenpair> = None;
    let mut first_err = None;
    for run in runs {
        match run {
            Ok(p) => {
                if best.as_ref().is_none_or(|b| better(&p, b, objective)) {
                    best = Some(p);
                }
            }
            Err(e @ Error::ZeroContraction { .. }) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| first_err.expect("some start ran"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremePairs {
    pub max: HermitianEigenpair,
    pub min: HermitianEigenpair,
}

pub fn extreme_hermitian_eigenvalues(h: &HermitianTensor, opts: &HeigOptions) -> Result<ExtremePairs> {
    Ok(ExtremePairs {
        max: search(h, Objective::Max, opts)?,
        min: search(h, Objective::Min, opts)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonnegativityVerdict {
    /// No negative value found; a sampled search, not a proof.
    NonnegativeSoFar,
    NegativeWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonnegativityReport {
    pub min_value_found: f64,
    pub witness: ModeVectorTuple,
    pub starts: usize,
    pub converged: bool,
    pub verdict: NonnegativityVerdict,
}

/// Search for a unit tuple with `H(x) < −1e-9`.
pub fn nonnegativity_probe(h: &HermitianTensor, opts: &HeigOptions) -> Result<NonnegativityReport> {
    let pair = search(h, Objective::Min, opts)?;
    let value = evaluate(h, &pair.x)?;
    Ok(NonnegativityReport {
        min_value_found: value,
        witness: pair.x,
        starts: opts.starts,
        converged: pair.converged,
        verdict: if value < NEGATIVE_TOL {
            NonnegativityVerdict::NegativeWitness
        } else {
            NonnegativityVerdict::NonnegativeSoFar
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::flatten;
    use crate::random::{
        complex_gaussian_vector, orthonormal_columns, random_hermitian_tensor, random_unitary,
    };
    use proptest::prelude::*;

    fn opts(starts: usize) -> HeigOptions {
        HeigOptions {
            starts,
            ..HeigOptions::default()
        }
    }

    #[test]
    fn identity_tensor_evaluates_to_product_of_norms() {
        let h = HermitianTensor::identity(vec![2, 3]).unwrap();
        let x = start_tuple(&[2, 3], 1, 0);
        assert!((evaluate(&h, &x).unwrap() - 1.0).abs() < 1e-14);
        let mut y = x.clone();
        y.vectors[0].iter_mut().for_each(|z| *z *= 2.0);
        assert!((evaluate(&h, &y).unwrap() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn rank_one_at_its_own_factors() {
        let u = start_tuple(&[2, 3, 2], 2, 0);
        let h = HermitianTensor::rank_one(&u);
        assert!((evaluate(&h, &u).unwrap() - 1.0).abs() < 1e-13);
        for k in 0..3 {
            let g = gradient_contraction(&h, &u, k).unwrap();
            for (a, b) in g.iter().zip(&u.vectors[k]) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn evaluate_rejects_wrong_lengths() {
        let h = HermitianTensor::identity(vec![2, 2]).unwrap();
        let x = start_tuple(&[2, 3], 1, 0);
        assert!(matches!(evaluate(&h, &x), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn single_mode_gradient_is_matvec() {
        let mut rng = seeded_rng(3, 0);
        let h = random_hermitian_tensor(&mut rng, &[4]);
        let x = ModeVectorTuple::new(vec![complex_gaussian_vector(&mut rng, 4)]);
        let g = gradient_contraction(&h, &x, 0).unwrap();
        let expect = flatten(&h).as_matrix().mul_vec(&x.vectors[0]);
        for (a, b) in g.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // f(x + h e) − f(x − h e) over 2h gives 2 Re g_a; the i-direction gives 2 Im g_a
        let mut rng = seeded_rng(4, 0);
        let h = random_hermitian_tensor(&mut rng, &[2, 3, 2]);
        let x = start_tuple(&[2, 3, 2], 4, 1);
        let step = 1e-5;
        for k in 0..3 {
            let g = gradient_contraction(&h, &x, k).unwrap();
            for a in 0..x.vectors[k].len() {
                for (dir, part) in [(C64::new(step, 0.0), 0), (C64::new(0.0, step), 1)] {
                    let mut plus = x.clone();
                    plus.vectors[k][a] += dir;
                    let mut minus = x.clone();
                    minus.vectors[k][a] -= dir;
                    let fd = (evaluate(&h, &plus).unwrap() - evaluate(&h, &minus).unwrap()) / (2.0 * step);
                    let expect = 2.0 * if part == 0 { g[a].re } else { g[a].im };
                    assert!((fd - expect).abs() < 1e-6, "mode {k} entry {a}: {fd} vs {expect}");
                }
            }
        }
    }

    #[test]
    fn conjugate_contraction_is_conjugate() {
        let mut rng = seeded_rng(5, 0);
        let h = random_hermitian_tensor(&mut rng, &[3, 2]);
        let x = start_tuple(&[3, 2], 5, 0);
        for k in 0..2 {
            let g = gradient_contraction(&h, &x, k).unwrap();
            let gc = gradient_contraction_conj(&h, &x, k).unwrap();
            for (a, b) in g.iter().zip(&gc) {
                assert!((a.conj() - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn block_matrix_reproduces_value_and_gradient() {
        let mut rng = seeded_rng(6, 0);
        let h = random_hermitian_tensor(&mut rng, &[2, 3, 2]);
        let x = start_tuple(&[2, 3, 2], 6, 0);
        let value = evaluate(&h, &x).unwrap();
        for k in 0..3 {
            let mk = block_matrix(&h, &x, k).unwrap();
            let g = mk.as_matrix().mul_vec(&x.vectors[k]);
            let g2 = gradient_contraction(&h, &x, k).unwrap();
            for (a, b) in g.iter().zip(&g2) {
                assert!((a - b).norm() < 1e-12);
            }
            assert!((vdot(&x.vectors[k], &g).re - value).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_search_recovers_factors() {
        let u = start_tuple(&[2, 2, 3], 7, 0).gauged();
        let h = HermitianTensor::rank_one(&u);
        for rule in [UpdateRule::BlockEigen, UpdateRule::Power] {
            let o = HeigOptions { rule, ..opts(4) };
            let p = search(&h, Objective::Max, &o).unwrap();
            assert!(p.converged && (p.lambda - 1.0).abs() < 1e-8, "{rule:?}: {p:?}");
            for (a, b) in p.x.vectors.iter().zip(&u.vectors) {
                assert!((vdot(a, b).norm() - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn identity_tensor_converges_immediately() {
        let h = HermitianTensor::identity(vec![2, 2]).unwrap();
        let p = power_iterate(&h, &start_tuple(&[2, 2], 1, 0), Objective::Max, &opts(1)).unwrap();
        assert!(p.converged && p.iterations == 1 && (p.lambda - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_mode_extremes_match_matrix_spectrum() {
        let mut rng = seeded_rng(8, 0);
        let h = random_hermitian_tensor(&mut rng, &[5]);
        let spec = eigh(&flatten(&h)).unwrap();
        for rule in [UpdateRule::BlockEigen, UpdateRule::Power] {
            let e = extreme_hermitian_eigenvalues(&h, &HeigOptions { rule, ..opts(8) }).unwrap();
            assert!((e.max.lambda - spec.max()).abs() < 1e-8, "{rule:?}");
            assert!((e.min.lambda - spec.min()).abs() < 1e-8, "{rule:?}");
        }
    }

    #[test]
    fn single_mode_converged_values_lie_in_spectrum() {
        let mut rng = seeded_rng(9, 0);
        let h = random_hermitian_tensor(&mut rng, &[4]);
        let spec = eigh(&flatten(&h)).unwrap();
        for i in 0..50 {
            let p = power_iterate(&h, &start_tuple(&[4], 9, i), Objective::Max, &opts(1)).unwrap();
            if p.converged {
                assert!(spec.eigenvalues.iter().any(|l| (l - p.lambda).abs() < 1e-7));
            }
        }
    }

    #[test]
    fn orthogonal_difference_has_extremes_plus_minus_one() {
        let mut rng = seeded_rng(10, 0);
        let cols = orthonormal_columns(&mut rng, 2, 2);
        let w = crate::random::random_unit_vector(&mut rng, 3);
        let u = ModeVectorTuple::new(vec![cols[0].clone(), w.clone()]);
        let v = ModeVectorTuple::new(vec![cols[1].clone(), w]);
        let h = HermitianTensor::rank_one(&u).sub(&HermitianTensor::rank_one(&v)).unwrap();
        let e = extreme_hermitian_eigenvalues(&h, &opts(16)).unwrap();
        assert!((e.max.lambda - 1.0).abs() < 1e-8);
        assert!((e.min.lambda + 1.0).abs() < 1e-8);
    }

    #[test]
    fn accepted_pairs_satisfy_both_conditions() {
        let mut rng = seeded_rng(11, 0);
        let h = random_hermitian_tensor(&mut rng, &[2, 3, 2]);
        let e = extreme_hermitian_eigenvalues(&h, &opts(16)).unwrap();
        for p in [&e.max, &e.min] {
            assert!(p.converged);
            assert!(p.residual <= 1e-8 && p.residual_conj <= 1e-8);
            assert!((p.residual - p.residual_conj).abs() < 1e-12);
            assert!((p.lambda - evaluate(&h, &p.x).unwrap()).abs() < 1e-10);
            assert!(p.x.is_normalized(1e-12));
        }
        assert!(e.max.lambda >= e.min.lambda);
    }

    #[test]
    fn power_rule_handles_negative_scalar() {
        let h = HermitianTensor::new(vec![1], vec![C64::new(-2.0, 0.0)]).unwrap();
        let o = HeigOptions { rule: UpdateRule::Power, ..opts(2) };
        let e = extreme_hermitian_eigenvalues(&h, &o).unwrap();
        assert!((e.max.lambda + 2.0).abs() < 1e-12 && e.max.converged);
        assert!((e.min.lambda + 2.0).abs() < 1e-12 && e.min.converged);
    }

    #[test]
    fn search_is_deterministic_across_policies() {
        let mut rng = seeded_rng(12, 0);
        let h = random_hermitian_tensor(&mut rng, &[3, 3]);
        let a = search(&h, Objective::Max, &HeigOptions { exec: Execution::Sequential, ..opts(8) }).unwrap();
        let b = search(&h, Objective::Max, &HeigOptions { exec: Execution::Parallel, ..opts(8) }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_starts_rejected() {
        let h = HermitianTensor::identity(vec![2]).unwrap();
        assert!(search(&h, Objective::Max, &opts(0)).is_err());
    }

    #[test]
    fn probe_finds_negative_rank_one() {
        let u = start_tuple(&[2, 2], 13, 0);
        let h = HermitianTensor::rank_one(&u).scale(-1.0);
        let r = nonnegativity_probe(&h, &opts(4)).unwrap();
        assert_eq!(r.verdict, NonnegativityVerdict::NegativeWitness);
        assert!((r.min_value_found + 1.0).abs() < 1e-8);
        assert!((evaluate(&h, &r.witness).unwrap() - r.min_value_found).abs() < 1e-10);
        let r2 = nonnegativity_probe(&h.scale(2.5), &opts(4)).unwrap();
        assert!((r2.min_value_found - 2.5 * r.min_value_found).abs() < 1e-8);
    }

    #[test]
    fn probe_accepts_product_mixture() {
        let mut h = HermitianTensor::zeros(vec![2, 3]).unwrap();
        for (i, w) in [0.5, 0.3, 0.2].iter().enumerate() {
            h.add_scaled(&HermitianTensor::rank_one(&start_tuple(&[2, 3], 14, i as u64)), *w)
                .unwrap();
        }
        let r = nonnegativity_probe(&h, &opts(8)).unwrap();
        assert_eq!(r.verdict, NonnegativityVerdict::NonnegativeSoFar);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn evaluate_is_real_and_matches_quadratic_form(seed in any::<u64>()) {
            let mut rng = seeded_rng(seed, 0);
            let h = random_hermitian_tensor(&mut rng, &[2, 2, 2]);
            let x = ModeVectorTuple::new((0..3).map(|_| complex_gaussian_vector(&mut rng, 2)).collect());
            let z = evaluate_complex(&h, &x).unwrap();
            prop_assert!(z.im.abs() <= 1e-10 * z.norm().max(1.0));
            let big = ComplexTensor::product(&x).into_vec();
            let quad = vdot(&big, &flatten(&h).as_matrix().mul_vec(&big));
            prop_assert!((quad - z).norm() <= 1e-10 * z.norm().max(1.0));
        }

        #[test]
        fn transform_pulls_back(seed in any::<u64>()) {
            let mut rng = seeded_rng(seed, 1);
            let h = random_hermitian_tensor(&mut rng, &[2, 3]);
            let qs = [random_unitary(&mut rng, 2), random_unitary(&mut rng, 3)];
            let x = start_tuple(&[2, 3], seed, 2);
            let pulled = ModeVectorTuple::new(
                qs.iter().zip(&x.vectors).map(|(q, v)| q.conj().mul_vec(v)).collect(),
            );
            let lhs = evaluate(&h.unitary_transform(&qs).unwrap(), &x).unwrap();
            let rhs = evaluate(&h, &pulled).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * h.frobenius_norm().max(1.0));
        }
    }
}
