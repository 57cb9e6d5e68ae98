//! Dense m-order n-dimensional real tensors and the two contraction maps
//! `A x^{m-1}` (a vector) and `A x^m` (a scalar form of degree m).
//!
//! Entries are stored row-major with the first index most significant, so
//! the slab `a_{i, *, ..., *}` is contiguous. Contractions sum the slab in
//! lexicographic order of the trailing indices, which makes results
//! reproducible bit for bit across runs.

use crate::error::{Result, TcpError};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
    symmetric: bool,
}

impl Tensor {
    /// Builds a tensor from its dense row-major entries.
    pub fn new(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        if order < 2 {
            return Err(TcpError::InvalidOrder(order));
        }
        if dim == 0 {
            return Err(TcpError::InvalidDimension);
        }
        let len = checked_len(order, dim)?;
        if entries.len() != len {
            return Err(TcpError::DimensionMismatch {
                expected: len,
                found: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(TcpError::NonFinite(pos));
        }
        Ok(Tensor {
            order,
            dim,
            entries,
            symmetric: false,
        })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = if order >= 2 && dim >= 1 {
            checked_len(order, dim)?
        } else {
            0
        };
        Tensor::new(order, dim, vec![0.0; len])
    }

    /// Diagonal tensor with `a_{i...i} = diag[i]`.
    pub fn diagonal(order: usize, diag: &[f64]) -> Result<Self> {
        if let Some(pos) = diag.iter().position(|v| !v.is_finite()) {
            return Err(TcpError::NonFinite(pos));
        }
        let mut t = Tensor::zeros(order, diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            let flat = t.flat_index(&vec![i; order]);
            t.entries[flat] = d;
        }
        t.symmetric = true;
        Ok(t)
    }

    /// The unit diagonal tensor `a_{i...i} = 1`.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        Tensor::diagonal(order, &vec![1.0; dim])
    }

    /// Builds a tensor by evaluating `f` on every 0-based index tuple.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = if order >= 2 && dim >= 1 {
            checked_len(order, dim)?
        } else {
            0
        };
        let mut entries = Vec::with_capacity(len);
        let mut idx = vec![0usize; order];
        for _ in 0..len {
            entries.push(f(&idx));
            increment(&mut idx, dim);
        }
        Tensor::new(order, dim, entries)
    }

    /// Sets the claimed-symmetry flag. Claiming symmetry for a tensor that
    /// is not permutation invariant is an error.
    pub fn with_symmetric_flag(mut self, symmetric: bool) -> Result<Self> {
        if symmetric && !self.is_symmetric() {
            return Err(TcpError::NotSymmetric);
        }
        self.symmetric = symmetric;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// The claimed-symmetry flag (verified when it was set).
    pub fn symmetric_flag(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.entries[self.flat_index(idx)]
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// `c · A`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut t = Tensor::new(
            self.order,
            self.dim,
            self.entries.iter().map(|v| c * v).collect(),
        )?;
        t.symmetric = self.symmetric;
        Ok(t)
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(TcpError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `A x^{m-1}`: component i is `Σ a_{i i2...im} x_{i2}···x_{im}`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let tail = self.order - 1;
        let slab = self.entries.len() / n;
        let mut out = vec![0.0; n];
        let mut idx = vec![0usize; tail];
        // prefix[k] = x[idx[0]] * ... * x[idx[k]], left associated
        let mut prefix = vec![0.0; tail];
        for (i, out_i) in out.iter_mut().enumerate() {
            idx.iter_mut().for_each(|d| *d = 0);
            refresh_prefix(&mut prefix, &idx, x, 0);
            let block = &self.entries[i * slab..(i + 1) * slab];
            let mut acc = 0.0;
            for &a in block {
                acc += a * prefix[tail - 1];
                if let Some(changed) = increment(&mut idx, n) {
                    refresh_prefix(&mut prefix, &idx, x, changed);
                }
            }
            *out_i = acc;
        }
        out
    }

    /// `A x^m = xᵀ (A x^{m-1})`.
    pub fn poly_value(&self, x: &[f64]) -> Result<f64> {
        let ax = self.apply(x)?;
        Ok(dot(x, &ax))
    }

    /// Jacobian of `x ↦ A x^{m-1}` as a row-major `n × n` matrix:
    /// `J[i][j] = ∂(A x^{m-1})_i / ∂x_j`.
    pub fn jacobian(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(self.jacobian_unchecked(x))
    }

    pub(crate) fn jacobian_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let tail = self.order - 1;
        let slab = self.entries.len() / n;
        let mut jac = vec![0.0; n * n];
        let mut idx = vec![0usize; tail];
        let mut suffix = vec![1.0; tail + 1];
        for i in 0..n {
            idx.iter_mut().for_each(|d| *d = 0);
            let block = &self.entries[i * slab..(i + 1) * slab];
            for &a in block {
                if a != 0.0 {
                    suffix[tail] = 1.0;
                    for p in (0..tail).rev() {
                        suffix[p] = suffix[p + 1] * x[idx[p]];
                    }
                    let mut pre = 1.0;
                    for p in 0..tail {
                        jac[i * n + idx[p]] += a * pre * suffix[p + 1];
                        pre *= x[idx[p]];
                    }
                }
                increment(&mut idx, n);
            }
        }
        jac
    }

    /// Gradient of `x ↦ A x^m`, i.e. `A x^{m-1} + Jᵀ x`.
    pub fn poly_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let n = self.dim;
        let mut g = self.apply_unchecked(x);
        let jac = self.jacobian_unchecked(x);
        for i in 0..n {
            for j in 0..n {
                g[j] += x[i] * jac[i * n + j];
            }
        }
        Ok(g)
    }

    /// True iff every entry equals the entries at all permutations of its index.
    pub fn is_symmetric(&self) -> bool {
        let mut idx = vec![0usize; self.order];
        let mut sorted = vec![0usize; self.order];
        for &v in &self.entries {
            sorted.copy_from_slice(&idx);
            sorted.sort_unstable();
            if self.entries[self.flat_index(&sorted)] != v {
                return false;
            }
            increment(&mut idx, self.dim);
        }
        true
    }

    /// Averages the entries over each index-permutation orbit. The
    /// resulting tensor has the same homogeneous form `A x^m`.
    pub fn symmetrize(&self) -> Tensor {
        let len = self.entries.len();
        let mut canon = Vec::with_capacity(len);
        let mut sums = vec![0.0; len];
        let mut counts = vec![0u32; len];
        let mut idx = vec![0usize; self.order];
        let mut sorted = vec![0usize; self.order];
        for &v in &self.entries {
            sorted.copy_from_slice(&idx);
            sorted.sort_unstable();
            let c = self.flat_index(&sorted);
            sums[c] += v;
            counts[c] += 1;
            canon.push(c);
            increment(&mut idx, self.dim);
        }
        let entries = canon
            .iter()
            .map(|&c| sums[c] / f64::from(counts[c]))
            .collect();
        Tensor {
            order: self.order,
            dim: self.dim,
            entries,
            symmetric: true,
        }
    }

    /// All 0-based index tuples in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let mut idx = vec![0usize; self.order];
        let mut first = true;
        (0..self.entries.len()).map(move |_| {
            if !first {
                increment(&mut idx, self.dim);
            }
            first = false;
            idx.clone()
        })
    }
}

fn checked_len(order: usize, dim: usize) -> Result<usize> {
    let exp = u32::try_from(order)
        .map_err(|_| TcpError::InvalidParameter(format!("order {order} too large")))?;
    dim.checked_pow(exp)
        .ok_or_else(|| TcpError::InvalidParameter(format!("{dim}^{order} entries overflow")))
}

/// Odometer increment; returns the most significant position that changed,
/// or `None` on wrap-around.
fn increment(idx: &mut [usize], n: usize) -> Option<usize> {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < n {
            return Some(p);
        }
        idx[p] = 0;
    }
    None
}

fn refresh_prefix(prefix: &mut [f64], idx: &[usize], x: &[f64], from: usize) {
    for p in from..idx.len() {
        prefix[p] = if p == 0 {
            x[idx[0]]
        } else {
            prefix[p - 1] * x[idx[p]]
        };
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Componentwise `max(v_i, 0)`.
pub fn positive_part(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| x.max(0.0)).collect()
}

/// The `p`-norm for `p > 1`, or the max-norm for `p = ∞`.
pub fn norm(v: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p <= 1.0 {
        return Err(TcpError::InvalidNorm(p));
    }
    if p.is_infinite() {
        return Ok(v.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    Ok(v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p))
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample() -> Tensor {
        let mut t = Tensor::zeros(3, 2).unwrap();
        for (idx, v) in [
            ([0, 0, 0], 1.0),
            ([0, 1, 1], 1.0),
            ([1, 0, 0], 1.0),
            ([1, 1, 0], -2.0),
            ([1, 1, 1], 1.0),
        ] {
            let f = t.flat_index(&idx);
            t.entries[f] = v;
        }
        t
    }

    #[test]
    fn apply_counterexample() {
        let a = counterexample();
        assert_eq!(a.apply(&[1.0, 1.0]).unwrap(), vec![2.0, 0.0]);
        assert_eq!(a.poly_value(&[1.0, 1.0]).unwrap(), 2.0);
        let f: Vec<f64> = a
            .apply(&[1.0, 1.0])
            .unwrap()
            .iter()
            .zip([-1.5, -0.5])
            .map(|(a, q)| a + q)
            .collect();
        assert_eq!(f, vec![0.5, -0.5]);
    }

    #[test]
    fn apply_zero_and_identity() {
        let z = Tensor::zeros(4, 3).unwrap();
        assert_eq!(z.apply(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0; 3]);
        let id = Tensor::identity(3, 2).unwrap();
        assert_eq!(id.apply(&[1.0, 2.0]).unwrap(), vec![1.0, 4.0]);
        assert_eq!(id.poly_value(&[1.0, 2.0]).unwrap(), 9.0);
        assert_eq!(id.poly_value(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let id = Tensor::identity(3, 2).unwrap();
        assert!(matches!(
            id.apply(&[1.0]),
            Err(TcpError::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(id.poly_value(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(Tensor::new(1, 2, vec![0.0; 2]), Err(TcpError::InvalidOrder(1))));
        assert!(Tensor::new(2, 2, vec![0.0; 3]).is_err());
        assert!(matches!(
            Tensor::new(2, 2, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(TcpError::NonFinite(1))
        ));
        assert!(Tensor::new(2, 1, vec![f64::INFINITY]).is_err());
        assert!(matches!(
            counterexample().with_symmetric_flag(true),
            Err(TcpError::NotSymmetric)
        ));
    }

    #[test]
    fn symmetry() {
        assert!(Tensor::identity(3, 2).unwrap().is_symmetric());
        assert!(!counterexample().is_symmetric());
        let s = counterexample().symmetrize();
        assert!(s.is_symmetric());
        assert!(s.symmetric_flag());
        assert_eq!(s.poly_value(&[1.0, 1.0]).unwrap(), 2.0);
        let id = Tensor::identity(4, 3).unwrap();
        assert_eq!(id.symmetrize().entries(), id.entries());
        let z = Tensor::zeros(3, 3).unwrap();
        assert_eq!(z.symmetrize().entries(), z.entries());
    }

    #[test]
    fn symmetrize_preserves_form_on_grid() {
        let a = counterexample();
        let s = a.symmetrize();
        for i in 0..=10 {
            for j in 0..=10 {
                let x = [f64::from(i) / 5.0 - 1.0, f64::from(j) / 5.0 - 1.0];
                let p = a.poly_value(&x).unwrap();
                assert!((p - s.poly_value(&x).unwrap()).abs() <= 1e-12 * (1.0 + p.abs()));
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let a = counterexample();
        let x = [0.7, -0.3];
        let jac = a.jacobian(&x).unwrap();
        let h = 1e-6;
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fp = a.apply(&xp).unwrap();
            let fm = a.apply(&xm).unwrap();
            for i in 0..2 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                assert!((fd - jac[i * 2 + j]).abs() < 1e-8);
            }
        }
        let g = a.poly_gradient(&x).unwrap();
        let s = a.symmetrize();
        let ax = s.apply(&x).unwrap();
        for j in 0..2 {
            assert!((g[j] - 3.0 * ax[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn positive_part_and_norms() {
        assert_eq!(positive_part(&[1.5, 0.5]), vec![1.5, 0.5]);
        assert_eq!(positive_part(&[-1.0, 2.0]), vec![0.0, 2.0]);
        assert_eq!(positive_part(&[2.0, 3.0]), vec![2.0, 3.0]);
        assert!((norm(&[1.0, 2.0], 3.0).unwrap() - 9f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(norm(&[1.0, 2.0], f64::INFINITY).unwrap(), 2.0);
        assert!((norm(&[1.0, 4.0], 1.5).unwrap() - 9f64.powf(2.0 / 3.0)).abs() < 1e-14);
        assert!(matches!(norm(&[1.0], 1.0), Err(TcpError::InvalidNorm(_))));
        assert!(norm(&[1.0], 0.5).is_err());
        assert!(norm(&[1.0], f64::NAN).is_err());
    }
}
