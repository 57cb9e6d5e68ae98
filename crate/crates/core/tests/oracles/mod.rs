//! Brute-force reference values computed without the library's search.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use tcpkit::Tensor;

/// Nonnegative unit directions (Euclidean) on an angular grid with `steps`
/// intervals per angle; `n ≤ 3`.
fn directions(n: usize, steps: usize) -> Vec<Vec<f64>> {
    let h = FRAC_PI_2 / steps as f64;
    match n {
        1 => vec![vec![1.0]],
        2 => (0..=steps)
            .map(|i| {
                let t = i as f64 * h;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let mut out = Vec::new();
            for i in 0..=steps {
                let t = i as f64 * h;
                for j in 0..=steps {
                    let p = j as f64 * h;
                    out.push(vec![t.cos() * p.cos(), t.cos() * p.sin(), t.sin()]);
                }
            }
            out
        }
        _ => panic!("oracle supports n <= 3"),
    }
}

fn poly(a: &Tensor, x: &[f64]) -> f64 {
    a.indices()
        .map(|idx| a.get(&idx) * idx.iter().map(|&i| x[i]).product::<f64>())
        .sum()
}

fn p_norm(x: &[f64], p: f64) -> f64 {
    x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `min A x^m` over the nonnegative `p`-sphere, sampled on the angular grid.
pub fn sphere_min(a: &Tensor, p: f64, steps: usize) -> f64 {
    directions(a.dim(), steps)
        .into_iter()
        .map(|d| {
            let s = p_norm(&d, p);
            let x: Vec<f64> = d.iter().map(|v| v / s).collect();
            poly(a, &x)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn lambda_grid(a: &Tensor, steps: usize) -> f64 {
    sphere_min(a, a.order() as f64, steps)
}

pub fn mu_grid(a: &Tensor, steps: usize) -> f64 {
    sphere_min(a, 2.0, steps)
}

/// `min max_i x_i (A x^{m-1})_i` over a uniform grid with spacing `h` on each
/// face `x_k = 1` of the nonnegative ∞-sphere; `n ≤ 3`.
pub fn beta_grid(a: &Tensor, h: f64) -> f64 {
    let n = a.dim();
    let m = a.order();
    let k = (1.0 / h).round() as usize;
    let objective = |x: &[f64]| -> f64 {
        (0..n)
            .map(|i| {
                let mut s = 0.0;
                for rest in tail_indices(n, m - 1) {
                    let mut idx = vec![i];
                    idx.extend_from_slice(&rest);
                    s += a.get(&idx) * rest.iter().map(|&j| x[j]).product::<f64>();
                }
                x[i] * s
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = f64::INFINITY;
    for pinned in 0..n {
        let free: Vec<usize> = (0..n).filter(|&i| i != pinned).collect();
        let total = (k + 1).pow(free.len() as u32);
        for p in 0..total {
            let mut x = vec![1.0; n];
            let mut r = p;
            for &f in &free {
                x[f] = (r % (k + 1)) as f64 / k as f64;
                r /= k + 1;
            }
            best = best.min(objective(&x));
        }
    }
    best
}

fn tail_indices(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |j| {
                    let mut w = v.clone();
                    w.push(j);
                    w
                })
            })
            .collect();
    }
    out
}

/// The three solutions of the order-3 example with `q = (−3/2, −1/2)`,
/// from its support cases: `x₂ = 0` gives `x₁² = 3/2`; full support gives
/// `x₁² + x₂² = 3/2`, `x₁² − 2x₁x₂ + x₂² = 1/2`, hence
/// `x₁ + x₂ = √(5/2)`, `|x₁ − x₂| = √(1/2)`.
pub fn counterexample_solutions() -> Vec<[f64; 2]> {
    let s = 2.5f64.sqrt();
    let d = 0.5f64.sqrt();
    vec![[(s - d) / 2.0, (s + d) / 2.0], [(s + d) / 2.0, (s - d) / 2.0], [1.5f64.sqrt(), 0.0]]
}
