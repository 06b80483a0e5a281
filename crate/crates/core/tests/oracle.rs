mod common;

use common::*;
use num_complex::Complex64;

use eprlab::error::Error;
use eprlab::measurement::{joint_distribution, CommutingContext};
use eprlab::quantum::{Direction, Observable, PauliString, StateVector};
use eprlab::scenarios::{build_cabello, build_ghz, build_hardy, hardy_at_angle, Scenario};

#[test]
fn commutation_matches_matrices_on_all_three_qubit_pairs() {
    let ps = all_paulis(3);
    let mats: Vec<Matrix> = ps.iter().map(pauli_matrix).collect();
    let mut disagreements = 0;
    for (i, p) in ps.iter().enumerate() {
        for (j, q) in ps.iter().enumerate() {
            if p.commutes(q).unwrap() != dense_commutes(&mats[i], &mats[j]) {
                disagreements += 1;
            }
        }
    }
    assert_eq!(disagreements, 0);
    assert_eq!(ps.len() * ps.len(), 4096);
}

#[test]
fn products_match_matrices_on_two_qubits() {
    let ps = all_paulis(2);
    for p in &ps {
        for q in &ps {
            let dense = matmul(&pauli_matrix(p), &pauli_matrix(q));
            match p.product(q) {
                Ok(r) => assert!(max_abs_diff(&dense, &pauli_matrix(&r)) < 1e-12, "{p} {q}"),
                Err(Error::NonHermitianProduct(_)) => assert!(!dense_commutes(&pauli_matrix(p), &pauli_matrix(q))),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn pauli_action_matches_matrices() {
    let s = build_ghz().state.tensor(&StateVector::singlet_pair()).unwrap();
    for label in ["XYZIY", "-ZZIXX", "IIIII", "YYYYY", "+IXZYI"] {
        let p: PauliString = label.parse().unwrap();
        let dense = apply(&pauli_matrix(&p), s.amplitudes());
        let fast = p.apply(&s).unwrap();
        for (a, b) in dense.iter().zip(fast.amplitudes()) {
            assert!((a - b).norm() < 1e-12, "{label}");
        }
        let e = expectation(&pauli_matrix(&p), &s);
        assert!(e.im.abs() < 1e-12);
        assert!((e.re - p.expectation(&s).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn spin_observables_match_matrices() {
    let d = |x: f64, y: f64, z: f64| {
        let n = (x * x + y * y + z * z).sqrt();
        Direction::new(x / n, y / n, z / n).unwrap()
    };
    let dirs = [d(1., 2., 3.), d(0., 1., 0.), d(-1., 0., 1.), d(1., 0., 0.), d(0.3, -0.4, 0.2)];
    let obs: Vec<Observable> = dirs
        .iter()
        .flat_map(|&a| {
            dirs.iter().map(move |&b| {
                Observable::local(2, 0, a)
                    .unwrap()
                    .joined(&Observable::local(2, 1, b).unwrap())
                    .unwrap()
            })
        })
        .collect();
    let state = build_hardy().state;
    for a in &obs {
        let ma = observable_matrix(a);
        assert!((expectation(&ma, &state).re - a.expectation(&state).unwrap()).abs() < 1e-12);
        for b in &obs {
            assert_eq!(
                a.commutes(b).unwrap(),
                dense_commutes(&ma, &observable_matrix(b)),
                "{a} {b}"
            );
        }
    }
}

fn compare_with_dense(s: &Scenario) {
    let ctx = s.joint().unwrap();
    let fast = joint_distribution(&s.state, &ctx).unwrap();
    let dense = dense_distribution(&s.state, &ctx);
    for (t, p) in &dense {
        assert!((fast.probability(t) - p).abs() < 1e-12, "{} {t}", s.name);
        if *p <= 1e-12 {
            assert!(!fast.entries().contains_key(t));
        }
    }
    let total: f64 = dense.iter().map(|(_, p)| p).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn cabello_distribution_matches_projectors() {
    let s = build_cabello();
    compare_with_dense(&s);
    let dense = dense_distribution(&s.state, &s.joint().unwrap());
    let nonzero: Vec<f64> = dense.iter().map(|(_, p)| *p).filter(|p| *p > 1e-12).collect();
    assert_eq!(nonzero.len(), 8);
    assert!(nonzero.iter().all(|p| (p - 0.125).abs() < 1e-12));
}

#[test]
fn ghz_and_hardy_distributions_match_projectors() {
    compare_with_dense(&build_ghz());
    compare_with_dense(&build_hardy());
    compare_with_dense(&hardy_at_angle(0.7, 0.0));
    let ghz = build_ghz();
    let all = ghz
        .context_for(&["X1Y2Y3", "Y1X2Y3", "Y1Y2X3", "X1X2X3"])
        .unwrap();
    let dense = dense_distribution(&ghz.state, &all);
    let certain: Vec<_> = dense.iter().filter(|(_, p)| *p > 1e-12).collect();
    assert_eq!(certain.len(), 1);
    assert_eq!(certain[0].0.to_string(), "(-1,-1,-1,+1)");
}

#[test]
fn cabello_state_is_a_yyyy_eigenstate() {
    let s = build_cabello();
    let yyyy: PauliString = "YYYY".parse().unwrap();
    let e = expectation(&pauli_matrix(&yyyy), &s.state);
    assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn collapsed_state_matches_projector() {
    let s = build_cabello();
    let ctx = CommutingContext::unlabeled(vec!["ZIZI".parse::<PauliString>().unwrap()]).unwrap();
    let o = &ctx.observables()[0];
    for outcome in eprlab::measurement::Outcome::BOTH {
        let (post, p) = eprlab::measurement::collapse(&s.state, o, outcome).unwrap();
        let v = apply(&projector(&observable_matrix(o), outcome), s.state.amplitudes());
        let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - p).abs() < 1e-12);
        for (a, b) in v.iter().zip(post.amplitudes()) {
            assert!((a / norm.sqrt() - b).norm() < 1e-12);
        }
    }
}
