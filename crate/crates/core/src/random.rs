//! Seeded random generators for tensors, unitaries and start points.
//!
//! Every stream is a ChaCha20 generator keyed by `(seed, stream)`, so a
//! multi-start search gets the same start `i` no matter which thread runs it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec_norm, CMatrix, HermitianMatrix};
use crate::tensor::{ComplexTensor, HermitianTensor, ModeVectorTuple};
use crate::C64;

pub type TensorRng = ChaCha20Rng;

pub fn seeded_rng(seed: u64, stream: u64) -> TensorRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn complex_gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v = complex_gaussian_vector(rng, n);
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Unit vector per mode.
pub fn random_mode_tuple<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> ModeVectorTuple {
    ModeVectorTuple::new(dims.iter().map(|&n| random_unit_vector(rng, n)).collect())
}

/// Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let columns = orthonormal_columns(rng, n, n);
    CMatrix::from_columns(&columns).expect("equal column lengths")
}

/// `k` orthonormal vectors in `C^n` (requires `k ≤ n`).
pub fn orthonormal_columns<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<C64>> {
    assert!(k <= n, "cannot fit {k} orthonormal vectors in dimension {n}");
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v = complex_gaussian_vector(rng, n);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    basis
}

pub fn random_complex_tensor<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> ComplexTensor {
    let n = dims.iter().product();
    ComplexTensor::new(dims.to_vec(), complex_gaussian_vector(rng, n)).expect("finite entries")
}

pub fn random_unit_tensor<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> ComplexTensor {
    let t = random_complex_tensor(rng, dims);
    let norm = t.frobenius_norm();
    t.scale(C64::new(1.0 / norm, 0.0))
}

/// `(G + G†)/2` for a complex Gaussian `G`.
pub fn random_hermitian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    HermitianMatrix::symmetrized(g.add(&g.adjoint()).scale(C64::new(0.5, 0.0)))
}

pub fn random_hermitian_tensor<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> HermitianTensor {
    let n: usize = dims.iter().product();
    let m = random_hermitian_matrix(rng, n);
    crate::linalg::fold_matrix(&m, dims).expect("dimensions agree")
}

/// Probabilities drawn uniformly from the simplex interior.
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}
