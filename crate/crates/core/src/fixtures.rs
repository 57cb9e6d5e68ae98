//! Seeded generators for test and benchmark tensors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::Tensor;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The order-3, dimension-2 tensor with `a₁₁₁ = a₁₂₂ = a₂₁₁ = a₂₂₂ = 1`,
/// `a₂₂₁ = −2` and all other entries zero. Strictly semi-positive, not
/// symmetric, and `F(x) = A x² + q` is not pseudo-monotone for
/// `q = (−3/2, −1/2)`.
pub fn counterexample() -> Tensor {
    Tensor::from_fn(3, 2, |idx| match idx {
        [0, 0, 0] | [0, 1, 1] | [1, 0, 0] | [1, 1, 1] => 1.0,
        [1, 1, 0] => -2.0,
        _ => 0.0,
    })
    .expect("valid shape")
}

/// Symmetrized tensor with entries uniform in `[lo, hi)`.
pub fn random_symmetric(rng: &mut impl Rng, order: usize, dim: usize, lo: f64, hi: f64) -> Tensor {
    Tensor::from_fn(order, dim, |_| rng.gen_range(lo..hi))
        .expect("valid shape")
        .symmetrize()
}

/// Symmetric tensor whose diagonal entry `a_{i…i}` exceeds the absolute sum
/// of the other entries in slice `i` by a margin in `[0.5, 1.5)`. Such a
/// tensor is strictly semi-positive: at a maximal coordinate `x_k = ‖x‖_∞`
/// the diagonal term dominates `(A x^{m-1})_k`.
pub fn diagonally_dominant(rng: &mut impl Rng, order: usize, dim: usize) -> Tensor {
    let base = random_symmetric(rng, order, dim, -1.0, 1.0);
    let margins: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..1.5)).collect();
    let slice = dim.pow(order as u32 - 1);
    let off: Vec<f64> = (0..dim)
        .map(|i| {
            let diag = diag_offset(i, order, dim) - i * slice;
            base.entries()[i * slice..(i + 1) * slice]
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != diag)
                .map(|(_, v)| v.abs())
                .sum()
        })
        .collect();
    let mut entries = base.entries().to_vec();
    for i in 0..dim {
        entries[diag_offset(i, order, dim)] = off[i] + margins[i];
    }
    Tensor::new(order, dim, entries)
        .and_then(|t| t.with_symmetric_flag(true))
        .expect("symmetry preserved")
}

/// Random symmetric tensor with a nonzero solution of `TCP(A, 0)` along a
/// coordinate axis: entries whose index multiset is `{i, k, …, k}` are
/// nonnegative and `a_{k…k} = 0`, so `x = e_k` has `A x^{m-1} ≥ 0` and
/// `A x^m = 0`.
pub fn degenerate_r0(rng: &mut impl Rng, order: usize, dim: usize) -> Tensor {
    let k = rng.gen_range(0..dim);
    let base = random_symmetric(rng, order, dim, -1.0, 1.0);
    let mut entries = base.entries().to_vec();
    for idx in base.indices() {
        let others: Vec<usize> = idx.iter().copied().filter(|&j| j != k).collect();
        if others.len() <= 1 {
            let pos = base.flat_index(&idx);
            entries[pos] = if others.is_empty() { 0.0 } else { entries[pos].abs() };
        }
    }
    Tensor::new(order, dim, entries)
        .and_then(|t| t.with_symmetric_flag(true))
        .expect("symmetry preserved")
}

/// Uniform vector in `[lo, hi)ⁿ`.
pub fn random_vector(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
}

fn diag_offset(i: usize, order: usize, dim: usize) -> usize {
    (0..order).fold(0, |acc, _| acc * dim + i)
}
