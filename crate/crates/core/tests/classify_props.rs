use tcpkit::classify::{classify, witness_holds, TensorClass, Verdict, WitnessMeaning};
use tcpkit::fixtures::{degenerate_r0, diagonally_dominant, counterexample, random_symmetric, rng};
use tcpkit::{SearchBudget, Tensor};

fn fixtures() -> Vec<Tensor> {
    let mut r = rng(11);
    let mut out = vec![counterexample(), Tensor::identity(3, 2).unwrap(), Tensor::zeros(3, 2).unwrap()];
    for (m, n) in [(3, 2), (4, 2), (3, 3), (2, 3)] {
        out.push(diagonally_dominant(&mut r, m, n));
        out.push(random_symmetric(&mut r, m, n, -1.0, 1.0));
        out.push(random_symmetric(&mut r, m, n, -0.3, 1.0));
        out.push(degenerate_r0(&mut r, m, n));
    }
    out
}

fn verdicts(a: &Tensor, b: &SearchBudget) -> Vec<tcpkit::ClassificationReport> {
    TensorClass::ALL.iter().map(|&c| classify(a, c, b).unwrap()).collect()
}

#[test]
fn witnesses_are_sound_and_classes_monotone() {
    let b = SearchBudget::default();
    for a in fixtures() {
        let reports = verdicts(&a, &b);
        for r in &reports {
            if let Some(w) = &r.witness {
                assert!(witness_holds(&a, r.class_name, w, b.tolerance / 2.0).unwrap(), "{r:?}");
                let expected = match r.verdict {
                    Verdict::Violated => WitnessMeaning::ViolatingVector,
                    _ => WitnessMeaning::CertifyingVector,
                };
                assert_eq!(r.witness_meaning, Some(expected));
            } else {
                assert_ne!(r.verdict, Verdict::Violated);
            }
        }
        let v = |c: TensorClass| reports.iter().find(|r| r.class_name == c).unwrap().verdict;
        let implies = |strong: TensorClass, weak: TensorClass| {
            if v(strong) == Verdict::Holds {
                assert_eq!(v(weak), Verdict::Holds, "{strong} holds but {weak} does not on {a:?}");
            }
        };
        implies(TensorClass::StrictlySemiPositive, TensorClass::SemiPositive);
        implies(TensorClass::P, TensorClass::P0);
        implies(TensorClass::StrictlyCopositive, TensorClass::Copositive);
        implies(TensorClass::S, TensorClass::S0);
    }
}

#[test]
fn known_verdicts() {
    let b = SearchBudget::default();
    let id = Tensor::identity(4, 2).unwrap();
    for c in TensorClass::ALL {
        assert_eq!(classify(&id, c, &b).unwrap().verdict, Verdict::Holds, "{c}");
    }
    // odd order: x = -e gives x_i (A x^2)_i = x_i^3 < 0 everywhere
    let odd = Tensor::identity(3, 2).unwrap();
    for c in [TensorClass::P, TensorClass::P0] {
        let r = classify(&odd, c, &b).unwrap();
        assert_eq!(r.verdict, Verdict::Violated, "{c}");
        let w = r.witness.unwrap();
        assert!(w.iter().all(|&v| v <= 0.0) && w.iter().any(|&v| v < 0.0), "{w:?}");
    }
    for c in [TensorClass::StrictlyCopositive, TensorClass::StrictlySemiPositive, TensorClass::R0, TensorClass::S] {
        assert_eq!(classify(&odd, c, &b).unwrap().verdict, Verdict::Holds, "{c}");
    }
    let z = Tensor::zeros(4, 2).unwrap();
    for (c, v) in [
        (TensorClass::SemiPositive, Verdict::Holds),
        (TensorClass::StrictlySemiPositive, Verdict::Violated),
        (TensorClass::Copositive, Verdict::Holds),
        (TensorClass::StrictlyCopositive, Verdict::Violated),
        (TensorClass::R0, Verdict::Violated),
        (TensorClass::S0, Verdict::Holds),
        (TensorClass::P0, Verdict::Holds),
        (TensorClass::P, Verdict::Violated),
    ] {
        assert_eq!(classify(&z, c, &b).unwrap().verdict, v, "{c}");
    }
    // x₁³ - x₂³ style tensor: copositivity fails at e₂
    let a = Tensor::diagonal(3, &[1.0, -1.0]).unwrap();
    let r = classify(&a, TensorClass::Copositive, &b).unwrap();
    assert_eq!(r.verdict, Verdict::Violated);
    assert!(r.witness.unwrap()[1] > 0.5);
    let mut r = rng(3);
    for _ in 0..4 {
        let d = degenerate_r0(&mut r, 3, 3);
        assert_eq!(classify(&d, TensorClass::R0, &b).unwrap().verdict, Verdict::Violated);
    }
}

#[test]
fn symmetric_strict_semi_positivity_matches_strict_copositivity() {
    let b = SearchBudget::default();
    let mut r = rng(5);
    let mut seen = [0usize; 2];
    for i in 0..16 {
        let (m, n) = [(3, 2), (4, 2), (3, 3), (4, 3)][i % 4];
        let a = random_symmetric(&mut r, m, n, -0.5, 1.0);
        let ssp = classify(&a, TensorClass::StrictlySemiPositive, &b).unwrap().verdict;
        let scop = classify(&a, TensorClass::StrictlyCopositive, &b).unwrap().verdict;
        assert_eq!(ssp, scop, "{a:?}");
        seen[(ssp == Verdict::Holds) as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "fixtures exercise only one verdict: {seen:?}");
}

#[test]
fn verdicts_are_scale_invariant_and_deterministic() {
    let b = SearchBudget::default().with_seed(9);
    for a in fixtures().into_iter().take(9) {
        let base = verdicts(&a, &b);
        assert_eq!(base, verdicts(&a, &b));
        for c in [0.25, 4.0] {
            let scaled = verdicts(&a.scaled(c).unwrap(), &b);
            for (x, y) in base.iter().zip(&scaled) {
                assert_eq!(x.verdict, y.verdict, "{} under scaling {c}", x.class_name);
            }
        }
    }
}
