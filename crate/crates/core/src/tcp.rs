//! The tensor complementarity problem `TCP(A, q)`: find `x ≥ 0` with
//! `w = q + A x^{m-1} ≥ 0` and `xᵀw = 0`.
//!
//! Two solvers with different roles live here. [`solve_enumerate`] fixes,
//! for every support set `S`, `x_i = 0` off `S` and `w_i = 0` on `S`, then
//! finds the real roots of that square polynomial system by multistart
//! damped Newton. It is exponential in `n` and serves as the reference.
//! [`solve_merit`] minimizes the natural-residual merit
//! `Θ(x) = ‖min(x, q + A x^{m-1})‖²` by a semismooth Newton method and
//! scales past the enumeration limit.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::SearchBudget;
use crate::error::{Result, TcpError};
use crate::tensor::{dot, norm_inf, Tensor};

/// Default largest dimension accepted by [`solve_enumerate`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 4;
/// Two solutions closer than this in the ∞-norm are the same solution.
pub const DEDUP_RADIUS: f64 = 1e-6;

const NEWTON_ITERS: usize = 100;
const MERIT_ITERS: usize = 200;
const MERIT_BATCH: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TcpInstance {
    tensor: Tensor,
    q: Vec<f64>,
}

impl TcpInstance {
    pub fn new(tensor: Tensor, q: Vec<f64>) -> Result<Self> {
        if q.len() != tensor.dim() {
            return Err(TcpError::DimensionMismatch {
                expected: tensor.dim(),
                found: q.len(),
            });
        }
        if let Some(pos) = q.iter().position(|v| !v.is_finite()) {
            return Err(TcpError::NonFinite(pos));
        }
        Ok(TcpInstance { tensor, q })
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// `F(x) = A x^{m-1} + q`.
    pub fn map(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut w = self.tensor.apply(x)?;
        for (wi, qi) in w.iter_mut().zip(&self.q) {
            *wi += qi;
        }
        Ok(w)
    }

    fn map_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut w = self.tensor.apply_unchecked(x);
        for (wi, qi) in w.iter_mut().zip(&self.q) {
            *wi += qi;
        }
        w
    }

    /// Typical magnitude of a solution, used to place random starts.
    fn start_radius(&self) -> f64 {
        let amax = norm_inf(self.tensor.entries());
        let qmax = norm_inf(&self.q);
        if amax == 0.0 {
            return 1.0;
        }
        let m = self.tensor.order() as f64;
        2.0 * (qmax / amax).powf(1.0 / (m - 1.0)).max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `max_i max(-x_i, 0)`.
    pub x_neg: f64,
    /// `max_i max(-w_i, 0)`.
    pub w_neg: f64,
    /// `max_i |x_i w_i|`.
    pub compl: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.x_neg.max(self.w_neg).max(self.compl)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    Enumerate,
    Merit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcpSolution {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub residuals: Residuals,
    /// Solver that produced `x`; `None` for externally supplied vectors.
    pub method: Option<SolveMethod>,
    pub verified: bool,
}

/// Computes `w = q + A x^{m-1}` and the complementarity residuals of `x`.
pub fn verify_solution(inst: &TcpInstance, x: &[f64], tol: f64) -> Result<TcpSolution> {
    let w = inst.map(x)?;
    let residuals = Residuals {
        x_neg: x.iter().fold(0.0f64, |m, v| m.max(-v)),
        w_neg: w.iter().fold(0.0f64, |m, v| m.max(-v)),
        compl: x.iter().zip(&w).fold(0.0f64, |m, (a, b)| m.max((a * b).abs())),
    };
    Ok(TcpSolution {
        x: x.to_vec(),
        verified: residuals.max() <= tol,
        w,
        residuals,
        method: None,
    })
}

/// All solutions found by support enumeration, sorted lexicographically.
pub fn solve_enumerate(inst: &TcpInstance, budget: &SearchBudget) -> Result<Vec<TcpSolution>> {
    solve_enumerate_with_limit(inst, budget, DEFAULT_ENUMERATION_LIMIT)
}

pub fn solve_enumerate_with_limit(
    inst: &TcpInstance,
    budget: &SearchBudget,
    n_max: usize,
) -> Result<Vec<TcpSolution>> {
    budget.validate()?;
    let n = inst.dim();
    if n > n_max || n >= 31 {
        return Err(TcpError::TooLarge { n, max: n_max });
    }
    let tol = budget.tolerance;
    let radius = inst.start_radius();
    let starts = budget.multistarts.max(1);
    let jobs: Vec<(u32, usize)> = (0u32..(1u32 << n))
        .flat_map(|mask| {
            let count = if mask == 0 { 1 } else { starts };
            (0..count).map(move |s| (mask, s))
        })
        .collect();
    let candidates: Vec<Option<TcpSolution>> = jobs
        .into_par_iter()
        .map(|(mask, s)| {
            let support: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let mut rng = budget.rng((u64::from(mask) << 32) | s as u64);
            let y0: Vec<f64> = support.iter().map(|_| rng.gen_range(0.0..radius)).collect();
            let y = if support.is_empty() {
                Vec::new()
            } else {
                newton_on_support(inst, &support, y0)?
            };
            let mut x = vec![0.0; n];
            for (&i, &v) in support.iter().zip(&y) {
                if v < -tol {
                    return None;
                }
                x[i] = v.max(0.0);
            }
            let mut sol = verify_solution(inst, &x, tol).ok()?;
            sol.method = Some(SolveMethod::Enumerate);
            sol.verified.then_some(sol)
        })
        .collect();
    let mut found = dedup(candidates.into_iter().flatten());
    found.sort_by(|a, b| lex_cmp(&a.x, &b.x));
    Ok(found)
}

fn dedup(sols: impl Iterator<Item = TcpSolution>) -> Vec<TcpSolution> {
    let mut out: Vec<TcpSolution> = Vec::new();
    for s in sols {
        let dup = out.iter().any(|o| {
            o.x.iter()
                .zip(&s.x)
                .all(|(a, b)| (a - b).abs() <= DEDUP_RADIUS)
        });
        if !dup {
            out.push(s);
        }
    }
    out
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Levenberg-Marquardt damped Newton on `(q + A x^{m-1})_S = 0` with `x`
/// vanishing off `S`. Returns the support coordinates of a root.
fn newton_on_support(inst: &TcpInstance, support: &[usize], mut y: Vec<f64>) -> Option<Vec<f64>> {
    let n = inst.dim();
    let k = support.len();
    let scale = 1.0 + norm_inf(inst.q());
    let bound = 1e6 * inst.start_radius();
    let embed = |y: &[f64]| {
        let mut x = vec![0.0; n];
        for (&i, &v) in support.iter().zip(y) {
            x[i] = v;
        }
        x
    };
    let residual = |y: &[f64]| -> Vec<f64> {
        let w = inst.map_unchecked(&embed(y));
        support.iter().map(|&i| w[i]).collect()
    };
    let mut f = residual(&y);
    let mut damping = 1e-6;
    for _ in 0..NEWTON_ITERS {
        if norm_inf(&f) <= 1e-13 * scale {
            return Some(y);
        }
        let jac_full = inst.tensor.jacobian_unchecked(&embed(&y));
        let jac = DMatrix::from_fn(k, k, |r, c| jac_full[support[r] * n + support[c]]);
        let fv = DVector::from_column_slice(&f);
        let jtj = jac.transpose() * &jac;
        let jtf = jac.transpose() * &fv;
        let f2 = dot(&f, &f);
        let mut improved = false;
        for _ in 0..20 {
            let lhs = &jtj + DMatrix::identity(k, k) * (damping * (1.0 + jtj.diagonal().amax()));
            let Some(delta) = lhs.cholesky().map(|c| c.solve(&(-&jtf))) else {
                damping *= 10.0;
                continue;
            };
            let yt: Vec<f64> = y.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            let ft = residual(&yt);
            if dot(&ft, &ft) < f2 {
                y = yt;
                f = ft;
                damping = (damping / 10.0).max(1e-15);
                improved = true;
                break;
            }
            damping *= 10.0;
        }
        if !improved || norm_inf(&y) > bound {
            break;
        }
    }
    (norm_inf(&f) <= 1e-9 * scale).then_some(y)
}

/// Result of the merit-function solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeritOutcome {
    Found(TcpSolution),
    /// No start reached the target merit; not a proof that no solution exists.
    NotFound { best_merit: f64, best_x: Vec<f64> },
}

impl MeritOutcome {
    pub fn solution(&self) -> Option<&TcpSolution> {
        match self {
            MeritOutcome::Found(s) => Some(s),
            MeritOutcome::NotFound { .. } => None,
        }
    }
}

/// Natural residual `min(x, q + A x^{m-1})`.
pub fn natural_residual(inst: &TcpInstance, x: &[f64]) -> Result<Vec<f64>> {
    let w = inst.map(x)?;
    Ok(x.iter().zip(&w).map(|(a, b)| a.min(*b)).collect())
}

/// Multistart semismooth Newton on the natural residual over `x ≥ 0`.
/// Start 0 is the origin; the rest are seeded uniform draws. The lowest
/// index start that reaches `Θ ≤ tol²` with a verified solution wins.
pub fn solve_merit(inst: &TcpInstance, budget: &SearchBudget) -> Result<MeritOutcome> {
    budget.validate()?;
    let n = inst.dim();
    let radius = inst.start_radius();
    let starts = budget.multistarts.max(1);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for batch in (0..starts).collect::<Vec<_>>().chunks(MERIT_BATCH) {
        let runs: Vec<(f64, Vec<f64>, Option<TcpSolution>)> = batch
            .par_iter()
            .map(|&s| {
                let x0: Vec<f64> = if s == 0 {
                    vec![0.0; n]
                } else {
                    let mut rng = budget.rng((1u64 << 40) | s as u64);
                    (0..n).map(|_| rng.gen_range(0.0..radius)).collect()
                };
                semismooth_newton(inst, x0, budget.tolerance)
            })
            .collect();
        for (merit, x, sol) in runs {
            if let Some(sol) = sol {
                return Ok(MeritOutcome::Found(sol));
            }
            if best.as_ref().is_none_or(|(b, _)| merit < *b) {
                best = Some((merit, x));
            }
        }
    }
    let (best_merit, best_x) = best.unwrap_or((f64::INFINITY, vec![0.0; n]));
    Ok(MeritOutcome::NotFound { best_merit, best_x })
}

fn merit_parts(inst: &TcpInstance, x: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let w = inst.map_unchecked(x);
    let phi: Vec<f64> = x.iter().zip(&w).map(|(a, b)| a.min(*b)).collect();
    let theta = dot(&phi, &phi);
    (w, phi, theta)
}

fn semismooth_newton(inst: &TcpInstance, mut x: Vec<f64>, tol: f64) -> (f64, Vec<f64>, Option<TcpSolution>) {
    let n = inst.dim();
    let (mut w, mut phi, mut theta) = merit_parts(inst, &x);
    let accept = |x: &[f64], theta: f64| -> Option<TcpSolution> {
        if theta > tol * tol {
            return None;
        }
        let mut sol = verify_solution(inst, x, tol).ok()?;
        sol.method = Some(SolveMethod::Merit);
        sol.verified.then_some(sol)
    };
    for _ in 0..MERIT_ITERS {
        if let Some(sol) = accept(&x, theta) {
            return (theta, x, Some(sol));
        }
        if !theta.is_finite() || theta < 1e-300 {
            break;
        }
        let jf = inst.tensor.jacobian_unchecked(&x);
        // generalized Jacobian of min(x, F(x)): identity rows where x is the min
        let h = DMatrix::from_fn(n, n, |r, c| {
            if x[r] <= w[r] {
                if r == c {
                    1.0
                } else {
                    0.0
                }
            } else {
                jf[r * n + c]
            }
        });
        let pv = DVector::from_column_slice(&phi);
        let hth = h.transpose() * &h;
        let grad = h.transpose() * &pv;
        let reg = 1e-12 * (1.0 + hth.diagonal().amax());
        let newton = (&hth + DMatrix::identity(n, n) * reg)
            .cholesky()
            .map(|c| c.solve(&(-&grad)));
        let mut moved = false;
        let directions: Vec<DVector<f64>> = newton.into_iter().chain([-&grad]).collect();
        for d in directions {
            let mut alpha = 1.0;
            for _ in 0..40 {
                let xt: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| (a + alpha * b).max(0.0)).collect();
                let (wt, pt, tt) = merit_parts(inst, &xt);
                if tt <= (1.0 - 1e-4 * alpha) * theta || (tt < theta && alpha < 1e-6) {
                    x = xt;
                    w = wt;
                    phi = pt;
                    theta = tt;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if moved {
                break;
            }
        }
        if !moved {
            break;
        }
    }
    let sol = accept(&x, theta);
    (theta, x, sol)
}

/// Scales an S-witness `y` (`y > 0`, `A y^{m-1} > 0`) into a feasible vector:
/// `x = t^{1/(m-1)} y` with `t = max(0, max_i -q_i / (A y^{m-1})_i)`, so that
/// `q + A x^{m-1} = q + t A y^{m-1} ≥ 0`.
pub fn find_feasible(inst: &TcpInstance, s_witness: &[f64]) -> Result<Vec<f64>> {
    let ay = inst.tensor.apply(s_witness)?;
    if let Some(i) = (0..ay.len()).find(|&i| ay[i].is_nan() || ay[i] <= 0.0) {
        return Err(TcpError::InvalidWitness(format!(
            "(A y^(m-1))_{} = {} is not positive",
            i + 1,
            ay[i]
        )));
    }
    if let Some(i) = (0..s_witness.len()).find(|&i| s_witness[i].is_nan() || s_witness[i] <= 0.0) {
        return Err(TcpError::InvalidWitness(format!(
            "y_{} = {} is not positive",
            i + 1,
            s_witness[i]
        )));
    }
    let t = inst
        .q()
        .iter()
        .zip(&ay)
        .map(|(q, a)| -q / a)
        .fold(0.0f64, f64::max);
    let m = inst.tensor.order() as f64;
    let mut scale = t.powf(1.0 / (m - 1.0));
    let slack = 1e-12 * (1.0 + norm_inf(inst.q()));
    for _ in 0..8 {
        let x: Vec<f64> = s_witness.iter().map(|v| scale * v).collect();
        let w = inst.map(&x)?;
        if w.iter().all(|&v| v >= -slack) {
            return Ok(x);
        }
        // rounding left a component slightly negative: nudge outward
        scale *= 1.0 + 4.0 * f64::EPSILON;
    }
    Err(TcpError::InvalidWitness(
        "scaled witness failed feasibility re-check".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoMonotoneCheck {
    /// `(x - y)ᵀ F(y)`.
    pub lhs: f64,
    /// `(x - y)ᵀ F(x)`.
    pub rhs: f64,
    /// `lhs ≥ 0` and `rhs < 0`.
    pub violated: bool,
}

/// Tests one pair against pseudo-monotonicity of `F(x) = A x^{m-1} + q`.
pub fn check_pseudomonotone_violation(inst: &TcpInstance, x: &[f64], y: &[f64]) -> Result<PseudoMonotoneCheck> {
    let fx = inst.map(x)?;
    let fy = inst.map(y)?;
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let lhs = dot(&diff, &fy);
    let rhs = dot(&diff, &fx);
    Ok(PseudoMonotoneCheck {
        lhs,
        rhs,
        violated: lhs >= 0.0 && rhs < 0.0,
    })
}
