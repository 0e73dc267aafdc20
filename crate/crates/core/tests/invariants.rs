use hermitia::decomposition::{eigen_matrix_decompose, hjw_relate};
use hermitia::linalg::{eigh, flatten, fold_matrix};
use hermitia::ptrace::{mode_density, partial_trace};
use hermitia::quantum::{density_tensor, MixedStateEnsemble};
use hermitia::random::{
    random_complex_tensor, random_hermitian_matrix, random_hermitian_tensor, random_mode_tuple,
    random_probabilities, random_unit_tensor, random_unitary, seeded_rng,
};
use hermitia::{CMatrix, ComplexTensor, Execution, C64};
use proptest::prelude::*;
use rand::Rng;

const SHAPES: [&[usize]; 4] = [&[2], &[2, 2], &[2, 3], &[2, 2, 2]];

fn product_mixture(seed: u64, dims: &[usize], terms: usize) -> (Vec<f64>, Vec<ComplexTensor>) {
    let mut rng = seeded_rng(seed, 0);
    let p = random_probabilities(&mut rng, terms);
    let states = (0..terms)
        .map(|_| ComplexTensor::product(&random_mode_tuple(&mut rng, dims)))
        .collect();
    (p, states)
}

#[test]
fn flatten_fold_is_exact() {
    for (i, dims) in SHAPES.iter().enumerate() {
        let h = random_hermitian_tensor(&mut seeded_rng(i as u64, 0), dims);
        let m = flatten(&h);
        let back = fold_matrix(&m, dims).unwrap();
        assert_eq!(back, h);
        assert_eq!(flatten(&back), m);
    }
}

#[test]
fn eigh_on_two_hundred_matrices() {
    let mut rng = seeded_rng(99, 0);
    for _ in 0..200 {
        let n = rng.random_range(2..=16);
        let m = random_hermitian_matrix(&mut rng, n);
        let s = eigh(&m).unwrap();
        let scale = m.as_matrix().frobenius_norm().max(1.0);
        assert!(s.reconstruct().sub(m.as_matrix()).frobenius_norm() <= 1e-10 * scale);
        let v = &s.eigenvectors;
        assert!(v.adjoint().matmul(v).sub(&CMatrix::identity(n)).max_abs() <= 1e-10);
        let sum: f64 = s.eigenvalues.iter().sum();
        let sq: f64 = s.eigenvalues.iter().map(|l| l * l).sum();
        assert!((sum - m.as_matrix().trace().re).abs() <= 1e-10);
        assert!((sq - m.as_matrix().frobenius_norm().powi(2)).abs() <= 1e-9);
    }
}

#[test]
fn order_two_mode_densities_share_spectra() {
    let mut rng = seeded_rng(5, 0);
    for _ in 0..20 {
        let a = random_complex_tensor(&mut rng, &[3, 4]);
        let s1 = eigh(&mode_density(&a, 0).unwrap()).unwrap().eigenvalues;
        let s2 = eigh(&mode_density(&a, 1).unwrap()).unwrap().eigenvalues;
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() <= 1e-10);
        }
        assert!(s2[3].abs() <= 1e-10);
    }
}

#[test]
fn policies_agree_on_mode_spectra() {
    let a = random_unit_tensor(&mut seeded_rng(3, 0), &[3, 2, 3]);
    let seq = hermitia::ptrace::mode_spectra(&a, Execution::Sequential).unwrap();
    let par = hermitia::ptrace::mode_spectra(&a, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_mixtures_have_psd_flattening(seed in any::<u64>(), shape in 0usize..4, terms in 1usize..5) {
        let (p, states) = product_mixture(seed, SHAPES[shape], terms);
        let h = density_tensor(&MixedStateEnsemble::new(p, states).unwrap());
        prop_assert!(eigh(&flatten(&h)).unwrap().min() >= -1e-9);
        for k in 0..h.order() {
            let reduced = partial_trace(&h, &[k]).unwrap();
            prop_assert!(eigh(&reduced.matrix()).unwrap().min() >= -1e-10);
        }
    }

    #[test]
    fn positive_decompositions_are_related(seed in any::<u64>(), shape in 1usize..4, terms in 1usize..5) {
        let (p, states) = product_mixture(seed, SHAPES[shape], terms);
        let scaled: Vec<ComplexTensor> = p.iter().zip(&states)
            .map(|(w, s)| s.scale(C64::new(w.sqrt(), 0.0)))
            .collect();
        let h = density_tensor(&MixedStateEnsemble::new(p, states).unwrap());
        let eigen = eigen_matrix_decompose(&h).unwrap();
        let u: Vec<ComplexTensor> = eigen.factors.iter().zip(&eigen.lambdas)
            .map(|(f, l)| f.scale(C64::new(l.sqrt(), 0.0)))
            .collect();
        let rel = hjw_relate(&u, &scaled).unwrap();
        prop_assert!(rel.accepted);
        prop_assert!(scaled.len() >= u.len());
        prop_assert!(rel.co_isometry_defect <= 1e-8);
    }

    #[test]
    fn local_unitaries_preserve_mode_density_spectra(seed in any::<u64>(), shape in 1usize..4) {
        let mut rng = seeded_rng(seed, 1);
        let dims = SHAPES[shape];
        let h = random_hermitian_tensor(&mut rng, dims);
        let qs: Vec<CMatrix> = dims.iter().map(|&n| random_unitary(&mut rng, n)).collect();
        let b = h.unitary_transform(&qs).unwrap();
        for k in 0..dims.len() {
            let x = eigh(&partial_trace(&h, &[k]).unwrap().matrix()).unwrap().eigenvalues;
            let y = eigh(&partial_trace(&b, &[k]).unwrap().matrix()).unwrap().eigenvalues;
            for (a, c) in x.iter().zip(&y) {
                prop_assert!((a - c).abs() <= 1e-9);
            }
        }
    }
}
