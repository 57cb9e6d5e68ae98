mod oracles;

use proptest::prelude::*;
use tcpkit::classify::{classify, TensorClass, Verdict};
use tcpkit::fixtures::{diagonally_dominant, counterexample, random_symmetric, random_vector, rng};
use tcpkit::{
    check_pseudomonotone_violation, solve_enumerate, solve_merit, verify_solution, MeritOutcome, SearchBudget,
    TcpInstance, Tensor,
};

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn counterexample_solutions_and_pseudomonotonicity() {
    let inst = TcpInstance::new(counterexample(), vec![-1.5, -0.5]).unwrap();
    let b = SearchBudget::default();
    let sols = solve_enumerate(&inst, &b).unwrap();
    let expected = oracles::counterexample_solutions();
    assert_eq!(sols.len(), expected.len());
    for (s, e) in sols.iter().zip(&expected) {
        assert!(close(&s.x, e, 1e-10), "{:?} vs {e:?}", s.x);
        assert!(s.verified && s.residuals.max() <= 1e-8);
    }
    let merit = solve_merit(&inst, &b).unwrap();
    let x = &merit.solution().expect("merit solver converges").x;
    assert!(expected.iter().any(|e| close(x, e, 1e-6)));

    let pm = check_pseudomonotone_violation(&inst, &[1.0, 0.0], &[1.0, 1.0]).unwrap();
    assert!((pm.lhs - 0.5).abs() < 1e-12 && (pm.rhs + 0.5).abs() < 1e-12 && pm.violated);
}

#[test]
fn nonnegative_q_has_only_the_zero_solution() {
    let b = SearchBudget::default();
    let mut r = rng(31);
    for i in 0..8 {
        let (m, n) = [(3, 2), (4, 3), (3, 3), (4, 2)][i % 4];
        let a = diagonally_dominant(&mut r, m, n);
        for _ in 0..3 {
            let q = random_vector(&mut r, n, 0.0, 2.0);
            let inst = TcpInstance::new(a.clone(), q).unwrap();
            let sols = solve_enumerate(&inst, &b).unwrap();
            assert_eq!(sols.len(), 1);
            assert!(sols[0].x.iter().all(|&v| v == 0.0));
            match solve_merit(&inst, &b).unwrap() {
                MeritOutcome::Found(s) => assert!(s.x.iter().all(|&v| v == 0.0)),
                other => panic!("{other:?}"),
            }
        }
    }
}

#[test]
fn merit_solutions_are_enumerated_and_every_q_is_solvable() {
    let b = SearchBudget::default();
    let mut r = rng(41);
    for i in 0..6 {
        let (m, n) = [(3, 2), (4, 2), (3, 3)][i % 3];
        let a = diagonally_dominant(&mut r, m, n);
        assert_eq!(classify(&a, TensorClass::StrictlySemiPositive, &b).unwrap().verdict, Verdict::Holds);
        for _ in 0..8 {
            let q = random_vector(&mut r, n, -3.0, 3.0);
            let inst = TcpInstance::new(a.clone(), q).unwrap();
            let sols = solve_enumerate(&inst, &b).unwrap();
            assert!(!sols.is_empty(), "no solution for {:?}", inst.q());
            for s in &sols {
                assert!(s.residuals.max() <= 1e-8, "{s:?}");
            }
            if let MeritOutcome::Found(s) = solve_merit(&inst, &b).unwrap() {
                assert!(sols.iter().any(|e| close(&e.x, &s.x, 1e-6)), "{:?} not enumerated", s.x);
            }
        }
    }
}

#[test]
fn q_behavior_on_strictly_semi_positive_fixture() {
    let b = SearchBudget::default().with_multistarts(16);
    let mut r = rng(51);
    let a = diagonally_dominant(&mut r, 3, 2);
    for _ in 0..100 {
        let inst = TcpInstance::new(a.clone(), random_vector(&mut r, 2, -5.0, 5.0)).unwrap();
        assert!(!solve_enumerate(&inst, &b).unwrap().is_empty(), "{:?}", inst.q());
    }
}

#[test]
fn solutions_of_r0_fixtures_stay_bounded() {
    let b = SearchBudget::default().with_multistarts(16);
    let mut r = rng(61);
    let a = diagonally_dominant(&mut r, 3, 2);
    assert_eq!(classify(&a, TensorClass::R0, &b).unwrap().verdict, Verdict::Holds);
    // at a maximal coordinate k, w_k = 0 forces a_k x_k^2 - off_k x_k^2 <= -q_k
    let margin = (0..2)
        .map(|i| {
            let row: f64 = (0..2)
                .flat_map(|j| (0..2).map(move |k| (j, k)))
                .filter(|&(j, k)| (j, k) != (i, i))
                .map(|(j, k)| a.get(&[i, j, k]).abs())
                .sum();
            a.get(&[i, i, i]) - row
        })
        .fold(f64::INFINITY, f64::min);
    for _ in 0..30 {
        let q = random_vector(&mut r, 2, -4.0, 4.0);
        let qneg = q.iter().fold(0.0f64, |m, v| m.max(-v));
        let inst = TcpInstance::new(a.clone(), q).unwrap();
        for s in solve_enumerate(&inst, &b).unwrap() {
            let size = s.x.iter().fold(0.0f64, |m, v| m.max(*v));
            assert!(size * size <= qneg / margin + 1e-9);
        }
    }
    let z = TcpInstance::new(Tensor::zeros(3, 2).unwrap(), vec![0.0, 0.0]).unwrap();
    for tau in [1.0, 1e3, 1e6] {
        assert!(verify_solution(&z, &[tau, 2.0 * tau], 0.0).unwrap().verified);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solutions_invariant_under_joint_scaling(
        seed in 0u64..1000,
        c in 0.1f64..10.0,
        support in prop::collection::vec(any::<bool>(), 3),
        perturb in any::<bool>(),
    ) {
        let mut r = rng(seed);
        let a = random_symmetric(&mut r, 3, 3, -1.0, 1.0);
        let x: Vec<f64> = random_vector(&mut r, 3, 0.1, 2.0)
            .into_iter()
            .zip(&support)
            .map(|(v, &on)| if on { v } else { 0.0 })
            .collect();
        // q chosen so that x solves TCP(A, q): w = 0 on the support, w > 0 off it
        let ax = a.apply(&x).unwrap();
        let slack = random_vector(&mut r, 3, 0.1, 1.0);
        let mut q: Vec<f64> = (0..3).map(|i| if x[i] > 0.0 { -ax[i] } else { slack[i] - ax[i] }).collect();
        if perturb {
            q[0] -= 1.5;
        }
        let base = TcpInstance::new(a.clone(), q.clone()).unwrap();
        let scaled = TcpInstance::new(a.scaled(c).unwrap(), q.iter().map(|v| c * v).collect()).unwrap();
        let rb = verify_solution(&base, &x, 1e-9).unwrap();
        let rs = verify_solution(&scaled, &x, 1e-9).unwrap();
        prop_assert!(rb.verified != perturb);
        prop_assert_eq!(rb.verified, rs.verified);
        prop_assert!((rs.residuals.w_neg - c * rb.residuals.w_neg).abs() <= 1e-12 * (1.0 + c));
        prop_assert!((rs.residuals.compl - c * rb.residuals.compl).abs() <= 1e-12 * (1.0 + c));
    }
}
