use dqc1_lpn::qstate::{
    apply_channel, apply_unitary, partial_trace, tensor, von_neumann_entropy, CMatrix, DensityMatrix, KrausSet,
    OperatorMatrix,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn random_unitary(qubits: usize, entries: &[(f64, f64)]) -> OperatorMatrix {
    let dim = 1 << qubits;
    let a = DMatrix::from_fn(dim, dim, |r, c| {
        let (re, im) = entries[r * dim + c];
        Complex64::new(re, im)
    });
    let q = a.qr().q();
    OperatorMatrix::unitary(q).unwrap()
}

fn random_state(qubits: usize, entries: &[(f64, f64)]) -> DensityMatrix {
    let dim = 1 << qubits;
    let a = CMatrix::from_fn(dim, dim, |r, c| {
        let (re, im) = entries[r * dim + c];
        Complex64::new(re, im)
    });
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).unwrap()
}

fn entries(qubits: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    let dim = 1usize << qubits;
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_conjugation_preserves_spectrum(u in entries(2), r in entries(2)) {
        let rho = random_state(2, &r);
        let out = apply_unitary(&rho, &random_unitary(2, &u)).unwrap();
        let (a, b) = (rho.eigenvalues(), out.eigenvalues());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&out)).abs() < 1e-10);
    }

    #[test]
    fn pauli_channel_is_trace_preserving(w in prop::array::uniform4(0.0..1.0f64), r in entries(2), t in 0usize..2) {
        let total: f64 = w.iter().sum::<f64>() + 1e-9;
        let w = w.map(|x| (x + 1e-9 / 4.0) / total);
        let channel = KrausSet::pauli_mixture(w).unwrap().embed(t, 2).unwrap();
        let out = apply_channel(&random_state(2, &r), &channel).unwrap();
        prop_assert!((out.trace() - 1.0).norm() < 1e-12);
        prop_assert!(out.hermiticity_error() < 1e-12);
        prop_assert!(out.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn partial_trace_undoes_tensor(a in entries(1), b in entries(2)) {
        let (ra, rb) = (random_state(1, &a), random_state(2, &b));
        let joint = tensor(&ra, &rb).unwrap();
        prop_assert!(partial_trace(&joint, &[0]).unwrap().max_abs_diff(&ra) < 1e-12);
        prop_assert!(partial_trace(&joint, &[1, 2]).unwrap().max_abs_diff(&rb) < 1e-12);
    }

    #[test]
    fn depolarizing_shrinks_bloch_vector(x in -0.5..0.5f64, y in -0.5..0.5f64, z in -0.5..0.5f64, p in 0.0..1.0f64) {
        let rho = DensityMatrix::from_bloch([x, y, z]).unwrap();
        let out = apply_channel(&rho, &KrausSet::depolarizing(p).unwrap()).unwrap();
        let expected = DensityMatrix::from_bloch([(1.0 - p) * x, (1.0 - p) * y, (1.0 - p) * z]).unwrap();
        prop_assert!(out.max_abs_diff(&expected) < 1e-12);
    }
}
