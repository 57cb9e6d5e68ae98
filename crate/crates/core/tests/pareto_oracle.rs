mod oracles;

use tcpkit::classify::{classify, TensorClass, Verdict};
use tcpkit::fixtures::{diagonally_dominant, random_symmetric, rng};
use tcpkit::{lambda_min, mu_min, SearchBudget, Tensor};

fn fixtures() -> Vec<Tensor> {
    let mut r = rng(21);
    let shapes = [(3, 2), (4, 2), (3, 3), (4, 3), (2, 3)];
    let mut out = Vec::new();
    for (i, &(m, n)) in shapes.iter().enumerate() {
        out.push(random_symmetric(&mut r, m, n, -0.5, 1.0));
        if i % 2 == 0 {
            out.push(diagonally_dominant(&mut r, m, n));
        } else {
            out.push(random_symmetric(&mut r, m, n, -1.0, 1.0));
        }
    }
    out
}

#[test]
fn extremal_values_agree_with_grid_oracle() {
    let b = SearchBudget::pareto();
    for a in fixtures() {
        let l = lambda_min(&a, &b).unwrap();
        let lo = oracles::lambda_grid(&a, 200);
        assert!(l.value <= lo + 1e-9 && lo - l.value <= 1e-3, "lambda {} vs grid {lo}", l.value);
        assert!(l.residuals.eigen_equation <= 1e-6 && l.residuals.slackness <= 1e-6, "{:?}", l.residuals);
        let mu = mu_min(&a, &b).unwrap();
        let mo = oracles::mu_grid(&a, 200);
        assert!(mu.value <= mo + 1e-9 && mo - mu.value <= 1e-3, "mu {} vs grid {mo}", mu.value);
        assert!(mu.residuals.eigen_equation <= 1e-6 && mu.residuals.slackness <= 1e-6, "{:?}", mu.residuals);
        let m = a.order() as f64;
        let lnorm: f64 = l.vector.iter().map(|v| v.powf(m)).sum::<f64>();
        assert!((lnorm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn positive_on_strictly_copositive_fixtures() {
    let b = SearchBudget::pareto();
    let mut checked = 0;
    for a in fixtures() {
        if classify(&a, TensorClass::StrictlyCopositive, &SearchBudget::default()).unwrap().verdict == Verdict::Holds {
            assert!(lambda_min(&a, &b).unwrap().value > 0.0);
            assert!(mu_min(&a, &b).unwrap().value > 0.0);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn lambda_scales_linearly() {
    let b = SearchBudget::pareto();
    for a in fixtures().into_iter().take(6) {
        let base = lambda_min(&a, &b).unwrap();
        for c in [0.5, 3.0] {
            let s = lambda_min(&a.scaled(c).unwrap(), &b).unwrap();
            assert!((s.value - c * base.value).abs() <= 1e-8 * (1.0 + base.value.abs() * c), "{c}");
            let gap = s.vector.iter().zip(&base.vector).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            assert!(gap < 1e-4, "argmin moved by {gap}");
        }
    }
}

#[test]
fn diagonal_minima() {
    let b = SearchBudget::pareto();
    let d = Tensor::diagonal(4, &[3.0, 2.0, 5.0]).unwrap();
    assert!((lambda_min(&d, &b).unwrap().value - 2.0).abs() < 1e-9);
    // min Σ dᵢxᵢ⁴ on the unit 2-sphere: 1 / Σ 1/dᵢ
    let expected = 1.0 / (1.0 / 3.0 + 1.0 / 2.0 + 1.0 / 5.0);
    assert!((mu_min(&d, &b).unwrap().value - expected).abs() < 1e-9);
}
