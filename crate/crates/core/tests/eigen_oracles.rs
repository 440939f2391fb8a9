//! Eigensolver results cross-checked against an unrelated dense solver
//! (nalgebra's symmetric eigendecomposition) and against algebraic
//! invariants at the working problem size.

use faer::Mat;
use spinshell::{
    compose_model, diagonalize, mean_field_representation, ModelSpec, SectorBasis, SymMatrix,
};

fn nalgebra_eigenvalues(h: &SymMatrix) -> Vec<f64> {
    let n = h.order();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| h.get(i, j));
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn eigenvalues_match_independent_solver_at_working_size() {
    let cases = [
        ModelSpec::model1(15, 5, 1.5),
        ModelSpec::model2(12, 4, 0.5, 1.0),
        ModelSpec::model1(9, 3, 0.4),
    ];
    for spec in cases {
        let basis = SectorBasis::build(spec.sites, spec.n_up).unwrap();
        let h = compose_model(&spec, &basis).unwrap();
        let ours = diagonalize(&h).unwrap();
        let theirs = nalgebra_eigenvalues(&h);
        let scale = theirs.iter().fold(1.0f64, |m, &e| m.max(e.abs()));
        for (a, b) in ours.values.iter().zip(&theirs) {
            assert!(
                (a - b).abs() < 1e-9 * scale,
                "L={} N={}: {a} vs {b}",
                spec.sites,
                h.order()
            );
        }
    }
}

#[test]
fn eigenvectors_reconstruct_and_stay_orthonormal_at_working_size() {
    let basis = SectorBasis::build(15, 5).unwrap();
    let spec = ModelSpec::model2(15, 5, 0.5, 0.4);
    let h = compose_model(&spec, &basis).unwrap();
    let s = diagonalize(&h).unwrap();
    let n = h.order();

    let gram = s.vectors.transpose() * &s.vectors;
    let mut gram_defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((gram[(i, j)] - expect).abs());
        }
    }
    assert!(gram_defect < 1e-10, "orthonormality defect {gram_defect}");

    let scaled = Mat::from_fn(n, n, |i, a| s.vectors[(i, a)] * s.values[a]);
    let recon = &scaled * s.vectors.transpose();
    let mut recon_defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            recon_defect = recon_defect.max((recon[(i, j)] - h.get(i, j)).abs());
        }
    }
    assert!(
        recon_defect < 1e-8 * h.max_abs().max(1.0),
        "reconstruction defect {recon_defect}"
    );
}

#[test]
fn canonical_sign_puts_largest_component_positive() {
    let basis = SectorBasis::build(12, 4).unwrap();
    let spec = ModelSpec::model1(12, 4, 0.8);
    let s = diagonalize(&compose_model(&spec, &basis).unwrap()).unwrap();
    for a in 0..s.values.len() {
        let mut best = 0usize;
        for i in 0..s.values.len() {
            if s.vectors[(i, a)].abs() > s.vectors[(best, a)].abs() {
                best = i;
            }
        }
        assert!(s.vectors[(best, a)] > 0.0, "column {a} sign not canonical");
    }
}

#[test]
fn repeated_runs_are_bitwise_identical_in_sequential_mode() {
    faer::set_global_parallelism(faer::Parallelism::None);
    let basis = SectorBasis::build(12, 4).unwrap();
    let spec = ModelSpec::model2(12, 4, 0.5, 0.6);
    let rep1 = mean_field_representation(&spec, &basis).unwrap();
    let rep2 = mean_field_representation(&spec, &basis).unwrap();
    assert_eq!(rep1.energies, rep2.energies);
    assert_eq!(rep1.epsilon, rep2.epsilon);
    let n = rep1.dim();
    for i in 0..n {
        for a in 0..n {
            assert!(rep1.coeff[(i, a)] == rep2.coeff[(i, a)], "coeff drift at ({i},{a})");
        }
    }
}

#[test]
fn exactly_degenerate_pairs_resolve_to_an_orthonormal_block_basis() {
    // Matrix with a fourfold and a twofold exact degeneracy, rotated by a
    // reproducible orthogonal map (Householder). The solver must return an
    // orthonormal set spanning each degenerate subspace.
    let n = 10usize;
    let values = [1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 3.5, 4.0, 5.0, 6.0];
    let mut v = vec![0.0f64; n];
    for (i, slot) in v.iter_mut().enumerate() {
        *slot = ((i * 2654435761) % 97) as f64 / 97.0 + 0.1;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    // Q = I - 2 v v^T, symmetric orthogonal; H = Q D Q.
    let q = Mat::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - 2.0 * v[i] * v[j]
    });
    let d = Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 });
    let h = SymMatrix::new_symmetrized(&q * &d * &q);
    let s = diagonalize(&h).unwrap();

    for (a, &expect) in values.iter().enumerate() {
        assert!((s.values[a] - expect).abs() < 1e-12);
    }
    let gram = s.vectors.transpose() * &s.vectors;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((gram[(i, j)] - expect).abs() < 1e-12);
        }
    }
    // Each eigenvector lies inside its multiplet's exact eigenspace.
    for a in 0..n {
        for i in 0..n {
            let mut hv = 0.0;
            for k in 0..n {
                hv += h.get(i, k) * s.vectors[(k, a)];
            }
            assert!((hv - s.values[a] * s.vectors[(i, a)]).abs() < 1e-10);
        }
    }
}
