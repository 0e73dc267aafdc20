//! Named fixtures: the worked examples built from their closed forms, plus
//! seeded random generators for rank-one and separable inputs.

use std::f64::consts::PI;

use crate::decomposition::EigenMatrixDecomposition;
use crate::error::{Error, Result};
use crate::quantum::MixedStateEnsemble;
use crate::random::{random_mode_tuple, random_probabilities, seeded_rng};
use crate::{ComplexTensor, ModeVectorTuple, C64};

pub const FIXTURE_NAMES: [&str; 5] = [
    "example-3.2",
    "example-3.4",
    "example-6.2",
    "rank-one",
    "separable",
];

/// Term weights of the order-3 example, as printed (six digits).
pub const EXAMPLE_3_4_WEIGHTS: [f64; 3] = [0.371391, 0.742781, 0.557086];

/// Published spectra of `ρ_1, ρ_2, ρ_3` for the order-3 example.
pub const EXAMPLE_3_4_SPECTRA: [[f64; 3]; 3] = [
    [0.57901, 0.42099, 0.0],
    [0.624058, 0.339349, 0.0365928],
    [0.590626, 0.383293, 0.0260811],
];

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// A fixed 2×3 complex matrix for the order-2 partial-trace example.
pub fn example_3_2() -> ComplexTensor {
    ComplexTensor::new(
        vec![2, 3],
        vec![
            re(1.0),
            C64::new(0.0, 1.0),
            re(0.5),
            C64::new(0.5, -1.0),
            re(0.0),
            re(-1.0),
        ],
    )
    .expect("finite")
}

/// `v(α, β) = (cos α sin β, sin α sin β, cos β)`.
pub fn v(alpha: f64, beta: f64) -> Vec<C64> {
    vec![
        re(alpha.cos() * beta.sin()),
        re(alpha.sin() * beta.sin()),
        re(beta.cos()),
    ]
}

/// Three weighted real product terms in `C^{3×3×3}`.
pub fn example_3_4() -> ComplexTensor {
    let terms = [
        [(PI / 3.0, PI / 3.0), (PI / 3.0, 5.0 * PI / 6.0), (-PI / 6.0, 5.0 * PI / 6.0)],
        [(PI / 3.0, 5.0 * PI / 6.0), (PI / 3.0, PI / 2.0), (PI / 3.0, PI / 3.0)],
        [(PI / 3.0, PI / 3.0), (-PI / 6.0, PI / 2.0), (PI / 3.0, 5.0 * PI / 6.0)],
    ];
    let mut a = ComplexTensor::zeros(vec![3, 3, 3]).expect("positive dims");
    for (w, angles) in EXAMPLE_3_4_WEIGHTS.iter().zip(terms) {
        let tuple = ModeVectorTuple::new(angles.iter().map(|&(al, be)| v(al, be)).collect());
        a = a
            .add(&ComplexTensor::product(&tuple).scale(re(*w)))
            .expect("same dims");
    }
    a
}

/// The two pure states of the two-qubit mixture, as 2×2 tensors.
pub fn example_6_2_states() -> [ComplexTensor; 2] {
    let s3 = 3f64.sqrt();
    let d = 3.0 * 2f64.sqrt();
    let i = C64::new(0.0, 1.0);
    [
        ComplexTensor::new(vec![2, 2], vec![re(1.0 / s3), re(1.0 / s3), re(0.0), i / s3]).expect("finite"),
        ComplexTensor::new(vec![2, 2], vec![re(1.0 / d), re(-1.0 / d), i * 4.0 / d, re(0.0)])
            .expect("finite"),
    ]
}

/// `ρ_1 |ψ_1⟩⟨ψ_1| + ρ_2 |ψ_2⟩⟨ψ_2|`.
pub fn example_6_2(rho1: f64, rho2: f64) -> Result<MixedStateEnsemble> {
    MixedStateEnsemble::new(vec![rho1, rho2], example_6_2_states().to_vec())
}

/// The mixture's eigen-matrix decomposition in its own orthonormal basis.
pub fn example_6_2_eigen(rho1: f64, rho2: f64) -> EigenMatrixDecomposition {
    EigenMatrixDecomposition {
        lambdas: vec![rho1, rho2],
        factors: example_6_2_states().to_vec(),
        s: 2,
    }
}

/// Roots `k_2/k_1 = (3√6 ∓ i√42)/8` of the span determinant.
pub fn example_6_2_ratios() -> [C64; 2] {
    let r = 3.0 * 6f64.sqrt() / 8.0;
    let q = 42f64.sqrt() / 8.0;
    [C64::new(r, -q), C64::new(r, q)]
}

/// Unit product tensor `u_1 ⊗ ⋯ ⊗ u_m` from a seeded stream.
pub fn rank_one(dims: &[usize], seed: u64) -> Result<ComplexTensor> {
    check_dims(dims)?;
    Ok(ComplexTensor::product(&random_mode_tuple(&mut seeded_rng(seed, 0), dims)))
}

/// Mixture of `terms` random product states with random weights.
pub fn separable(dims: &[usize], terms: usize, seed: u64) -> Result<MixedStateEnsemble> {
    check_dims(dims)?;
    if terms == 0 {
        return Err(Error::InvalidInput("a separable fixture needs at least one term".into()));
    }
    let mut rng = seeded_rng(seed, 0);
    let states = (0..terms)
        .map(|_| ComplexTensor::product(&random_mode_tuple(&mut rng, dims)))
        .collect();
    let p = random_probabilities(&mut rng, terms);
    let total: f64 = p.iter().sum();
    MixedStateEnsemble::new(p.into_iter().map(|x| x / total).collect(), states)
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidInput(format!("bad mode dims {dims:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::ptrace::{is_rank_one, mode_spectra};
    use crate::quantum::density_tensor;

    #[test]
    fn order_three_example_is_nearly_unit() {
        let a = example_3_4();
        assert!((a.frobenius_norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn order_three_example_spectra() {
        let spectra = mode_spectra(&example_3_4(), Execution::Sequential).unwrap();
        for (s, expect) in spectra.iter().zip(EXAMPLE_3_4_SPECTRA) {
            for (got, want) in s.eigenvalues.iter().zip(expect) {
                assert!((got - want).abs() < 1e-4, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn two_qubit_states_are_orthonormal() {
        let [u1, u2] = example_6_2_states();
        assert!((u1.frobenius_norm() - 1.0).abs() < 1e-15);
        assert!((u2.frobenius_norm() - 1.0).abs() < 1e-15);
        assert!(u1.inner(&u2).unwrap().norm() < 1e-15);
    }

    #[test]
    fn two_qubit_density_entries() {
        let h = density_tensor(&example_6_2(0.5, 0.5).unwrap());
        let at = |i: [usize; 2], j: [usize; 2]| h.get(&i, &j);
        assert!((at([0, 0], [0, 0]) - re(7.0 / 36.0)).norm() < 1e-12);
        assert!((at([0, 1], [0, 1]) - re(7.0 / 36.0)).norm() < 1e-12);
        assert!((at([1, 0], [1, 0]) - re(4.0 / 9.0)).norm() < 1e-12);
        assert!((at([1, 1], [1, 1]) - re(1.0 / 6.0)).norm() < 1e-12);
        assert!((h.matrix_trace().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_fixtures() {
        let a = rank_one(&[2, 2, 2], 7).unwrap();
        assert!(is_rank_one(&a, 1e-8, Execution::Sequential).unwrap().is_rank_one);
        let e = separable(&[2, 3], 3, 1).unwrap();
        assert_eq!(e.pure_states().len(), 3);
        assert!(separable(&[2], 0, 1).is_err());
        assert!(rank_one(&[], 1).is_err());
    }
}
