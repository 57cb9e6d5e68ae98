//! Budget-relative membership tests for structured tensor classes.
//!
//! Each class predicate is universally or existentially quantified over a
//! cone, and all of them are homogeneous, so the search runs on the compact
//! slice `‖x‖_∞ = 1`. A violation search minimizes a max of polynomial
//! pieces; predicates that only look at the support of `x` are split into
//! one subproblem per support subset so every objective stays continuous.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::SearchBudget;
use crate::error::{Result, TcpError};
use crate::search::{nonempty_subsets, nonneg_faces, signed_faces, Face, LocalResult, Pieces, Problem};
use crate::tensor::{dot, Tensor};

/// A coordinate counts as part of the support iff it exceeds this.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TensorClass {
    SemiPositive,
    StrictlySemiPositive,
    P,
    P0,
    Copositive,
    StrictlyCopositive,
    S,
    S0,
    R0,
}

impl TensorClass {
    pub const ALL: [TensorClass; 9] = [
        TensorClass::SemiPositive,
        TensorClass::StrictlySemiPositive,
        TensorClass::P,
        TensorClass::P0,
        TensorClass::Copositive,
        TensorClass::StrictlyCopositive,
        TensorClass::S,
        TensorClass::S0,
        TensorClass::R0,
    ];

    /// Kebab-case name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            TensorClass::SemiPositive => "semi-positive",
            TensorClass::StrictlySemiPositive => "strictly-semi-positive",
            TensorClass::P => "p",
            TensorClass::P0 => "p0",
            TensorClass::Copositive => "copositive",
            TensorClass::StrictlyCopositive => "strictly-copositive",
            TensorClass::S => "s",
            TensorClass::S0 => "s0",
            TensorClass::R0 => "r0",
        }
    }
}

impl fmt::Display for TensorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for TensorClass {
    type Err = TcpError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        TensorClass::ALL
            .into_iter()
            .find(|c| c.cli_name() == key)
            .ok_or_else(|| TcpError::InvalidParameter(format!("unknown tensor class '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Violated,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessMeaning {
    ViolatingVector,
    CertifyingVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub class_name: TensorClass,
    pub verdict: Verdict,
    pub witness: Option<Vec<f64>>,
    pub witness_meaning: Option<WitnessMeaning>,
    /// Best objective value reached by the search (its meaning depends on the class).
    pub objective: f64,
    pub budget: SearchBudget,
}

impl ClassificationReport {
    fn new(class: TensorClass, verdict: Verdict, objective: f64, budget: &SearchBudget) -> Self {
        ClassificationReport {
            class_name: class,
            verdict,
            witness: None,
            witness_meaning: None,
            objective,
            budget: *budget,
        }
    }

    fn with_witness(mut self, x: Vec<f64>, meaning: WitnessMeaning) -> Self {
        self.witness = Some(x);
        self.witness_meaning = Some(meaning);
        self
    }
}

/// Dispatches to the check for `class`.
pub fn classify(a: &Tensor, class: TensorClass, budget: &SearchBudget) -> Result<ClassificationReport> {
    match class {
        TensorClass::SemiPositive => check_semi_positive(a, budget),
        TensorClass::StrictlySemiPositive => check_strictly_semi_positive(a, budget),
        TensorClass::P => check_p(a, budget),
        TensorClass::P0 => check_p0(a, budget),
        TensorClass::Copositive => check_copositive(a, budget),
        TensorClass::StrictlyCopositive => check_strictly_copositive(a, budget),
        TensorClass::S => find_s_witness(a, budget),
        TensorClass::S0 => find_s0_witness(a, budget),
        TensorClass::R0 => check_r0(a, budget),
    }
}

fn support(x: &[f64]) -> impl Iterator<Item = usize> + '_ {
    (0..x.len()).filter(|&i| x[i] > SUPPORT_CUTOFF)
}

fn nonzero(x: &[f64]) -> impl Iterator<Item = usize> + '_ {
    (0..x.len()).filter(|&i| x[i].abs() > SUPPORT_CUTOFF)
}

fn nonneg(x: &[f64]) -> bool {
    x.iter().all(|&v| v >= 0.0)
}

/// Re-evaluates the negation of `class`'s defining condition at `x` with
/// exact contractions. True means `x` witnesses non-membership.
///
/// For `S` and `S0` (existential classes) this returns true when `x`
/// certifies membership instead.
pub fn witness_holds(a: &Tensor, class: TensorClass, x: &[f64], tol: f64) -> Result<bool> {
    let ax = a.apply(x)?;
    let poly = dot(x, &ax);
    let ok = match class {
        TensorClass::SemiPositive => {
            nonneg(x) && support(x).count() > 0 && support(x).all(|k| ax[k] < -tol)
        }
        TensorClass::StrictlySemiPositive => {
            nonneg(x) && support(x).count() > 0 && support(x).all(|k| ax[k] <= tol)
        }
        TensorClass::P => nonzero(x).count() > 0 && (0..x.len()).all(|i| x[i] * ax[i] <= tol),
        TensorClass::P0 => nonzero(x).count() > 0 && nonzero(x).all(|i| x[i] * ax[i] < -tol),
        TensorClass::Copositive => nonneg(x) && poly < -tol,
        TensorClass::StrictlyCopositive => nonneg(x) && support(x).count() > 0 && poly < tol,
        TensorClass::R0 => {
            nonneg(x) && support(x).count() > 0 && ax.iter().all(|&v| v >= -tol) && poly.abs() <= tol
        }
        TensorClass::S => x.iter().all(|&v| v >= tol) && ax.iter().all(|&v| v >= tol),
        TensorClass::S0 => nonneg(x) && support(x).count() > 0 && ax.iter().all(|&v| v >= -tol),
    };
    Ok(ok)
}

/// `A x^{m-1}` together with its Jacobian rows.
fn contract(a: &Tensor, x: &[f64], grads: bool) -> (Vec<f64>, Vec<f64>) {
    let ax = a.apply_unchecked(x);
    let jac = if grads {
        a.jacobian_unchecked(x)
    } else {
        Vec::new()
    };
    (ax, jac)
}

fn row(jac: &[f64], n: usize, i: usize) -> Vec<f64> {
    jac[i * n..(i + 1) * n].to_vec()
}

/// Pieces `(A x^{m-1})_k` for `k` in the face's support, optionally negated.
fn component_pieces<'a>(a: &'a Tensor, negate: bool) -> impl Fn(&Face, &[f64], bool) -> Pieces + Sync + 'a {
    move |face, x, grads| {
        let n = a.dim();
        let (ax, jac) = contract(a, x, grads);
        let sign = if negate { -1.0 } else { 1.0 };
        let values = face.support.iter().map(|&k| sign * ax[k]).collect();
        let grads = if grads {
            face.support
                .iter()
                .map(|&k| row(&jac, n, k).into_iter().map(|v| sign * v).collect())
                .collect()
        } else {
            Vec::new()
        };
        Pieces { values, grads }
    }
}

/// Pieces `x_i (A x^{m-1})_i` for `i` in the face's support.
pub(crate) fn product_pieces(a: &Tensor) -> impl Fn(&Face, &[f64], bool) -> Pieces + Sync + '_ {
    move |face, x, grads| {
        let n = a.dim();
        let (ax, jac) = contract(a, x, grads);
        let values = face.support.iter().map(|&i| x[i] * ax[i]).collect();
        let grads = if grads {
            face.support
                .iter()
                .map(|&i| {
                    let mut g: Vec<f64> = row(&jac, n, i).into_iter().map(|v| x[i] * v).collect();
                    g[i] += ax[i];
                    g
                })
                .collect()
        } else {
            Vec::new()
        };
        Pieces { values, grads }
    }
}

fn poly_piece(a: &Tensor) -> impl Fn(&Face, &[f64], bool) -> Pieces + Sync + '_ {
    move |_, x, grads| {
        let ax = a.apply_unchecked(x);
        Pieces {
            values: vec![dot(x, &ax)],
            grads: if grads {
                vec![a.poly_gradient(x).expect("dimension checked")]
            } else {
                Vec::new()
            },
        }
    }
}

/// Pieces `-(A x^{m-1})_i`, `A x^m` and `-A x^m`.
fn escape_pieces(a: &Tensor) -> impl Fn(&Face, &[f64], bool) -> Pieces + Sync + '_ {
    move |_, x, grads| {
        let n = a.dim();
        let (ax, jac) = contract(a, x, grads);
        let poly = dot(x, &ax);
        let mut values: Vec<f64> = ax.iter().map(|v| -v).collect();
        values.push(poly);
        values.push(-poly);
        let grads = if grads {
            let mut gs: Vec<Vec<f64>> = (0..n)
                .map(|i| row(&jac, n, i).into_iter().map(|v| -v).collect())
                .collect();
            let mut pg = ax.clone();
            for i in 0..n {
                for j in 0..n {
                    pg[j] += x[i] * jac[i * n + j];
                }
            }
            gs.push(pg.clone());
            gs.push(pg.into_iter().map(|v| -v).collect());
            gs
        } else {
            Vec::new()
        };
        Pieces { values, grads }
    }
}

fn full_support(n: usize) -> Vec<Vec<usize>> {
    vec![(0..n).collect()]
}

/// First search result (in merged order) whose point passes `accept`.
fn first_accepted(
    results: &[LocalResult],
    mut accept: impl FnMut(&LocalResult) -> bool,
) -> Option<&LocalResult> {
    results.iter().find(|r| accept(r))
}

/// Shared driver for the seven violation searches.
fn violation_search(
    a: &Tensor,
    class: TensorClass,
    budget: &SearchBudget,
    problem: Problem<'_>,
    threshold_hit: impl Fn(f64) -> bool,
) -> Result<ClassificationReport> {
    budget.validate()?;
    let results = problem.multistart(budget);
    let best = results.first().map_or(f64::INFINITY, |r| r.value);
    if !best.is_finite() {
        return Ok(ClassificationReport::new(class, Verdict::Undetermined, best, budget));
    }
    let tol = budget.tolerance;
    let witness = first_accepted(&results, |r| {
        threshold_hit(r.value) && witness_holds(a, class, &r.z, tol).unwrap_or(false)
    });
    Ok(match witness {
        Some(r) => ClassificationReport::new(class, Verdict::Violated, r.value, budget)
            .with_witness(r.z.clone(), WitnessMeaning::ViolatingVector),
        None => ClassificationReport::new(class, Verdict::Holds, best, budget),
    })
}

/// Searches for `x ≥ 0, x ≠ 0` with `(A x^{m-1})_k < 0` on its whole support.
pub fn check_semi_positive(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    let n = a.dim();
    let tol = budget.tolerance;
    let problem = Problem {
        faces: nonneg_faces(n, &nonempty_subsets(n)),
        eval: Box::new(component_pieces(a, false)),
    };
    violation_search(a, TensorClass::SemiPositive, budget, problem, |v| v < -tol)
}

/// Searches for `x ≥ 0, x ≠ 0` with `(A x^{m-1})_k ≤ 0` on its whole support.
pub fn check_strictly_semi_positive(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    let n = a.dim();
    let tol = budget.tolerance;
    let problem = Problem {
        faces: nonneg_faces(n, &nonempty_subsets(n)),
        eval: Box::new(component_pieces(a, false)),
    };
    violation_search(a, TensorClass::StrictlySemiPositive, budget, problem, |v| v <= tol)
}

/// Searches the signed sphere for `x ≠ 0` with `x_i (A x^{m-1})_i ≤ 0` for all `i`.
pub fn check_p(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    let n = a.dim();
    let tol = budget.tolerance;
    let problem = Problem {
        faces: signed_faces(n, &full_support(n)),
        eval: Box::new(product_pieces(a)),
    };
    violation_search(a, TensorClass::P, budget, problem, |v| v <= tol)
}

/// Searches for `x ≠ 0` with `x_i (A x^{m-1})_i < 0` for every `x_i ≠ 0`.
pub fn check_p0(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    let n = a.dim();
    let tol = budget.tolerance;
    let problem = Problem {
        faces: signed_faces(n, &nonempty_subsets(n)),
        eval: Box::new(product_pieces(a)),
    };
    violation_search(a, TensorClass::P0, budget, problem, |v| v < -tol)
}

pub fn check_copositive(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    let n = a.dim();
    let tol = budget.tolerance;
    let problem = Problem {
        faces: nonneg_faces(n, &full_support(n)),
        eval: Box::new(poly_piece(a)),
    };
    violation_search(a, TensorClass::Copositive, budget, problem, |v| v < -tol)
}

pub fn check_strictly_copositive(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    let n = a.dim();
    let tol = budget.tolerance;
    let problem = Problem {
        faces: nonneg_faces(n, &full_support(n)),
        eval: Box::new(poly_piece(a)),
    };
    violation_search(a, TensorClass::StrictlyCopositive, budget, problem, |v| v < tol)
}

/// Searches for a nonzero solution of `TCP(A, 0)`: `x ≥ 0`, `A x^{m-1} ≥ 0`,
/// `A x^m = 0`.
pub fn check_r0(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    let n = a.dim();
    let tol = budget.tolerance;
    let problem = Problem {
        faces: nonneg_faces(n, &full_support(n)),
        eval: Box::new(escape_pieces(a)),
    };
    violation_search(a, TensorClass::R0, budget, problem, |v| v <= tol)
}

fn max_min_component(a: &Tensor, budget: &SearchBudget) -> Vec<LocalResult> {
    let n = a.dim();
    let problem = Problem {
        faces: nonneg_faces(n, &full_support(n)),
        eval: Box::new(component_pieces(a, true)),
    };
    problem.multistart(budget)
}

/// Maximizes `min_i (A x^{m-1})_i` over `x ≥ 0, ‖x‖_∞ = 1`. When the optimum
/// is positive, the maximizer is shifted along `e` into the open orthant and
/// returned as a certificate `w > 0` with `A w^{m-1} > 0`. A failed search
/// is `Undetermined`, never `Violated`.
pub fn find_s_witness(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    budget.validate()?;
    let tol = budget.tolerance;
    let results = max_min_component(a, budget);
    let best = results.first().map_or(f64::INFINITY, |r| r.value);
    for r in results.iter().filter(|r| r.value < -tol) {
        if let Some(w) = shift_into_orthant(a, &r.z, tol) {
            return Ok(ClassificationReport::new(TensorClass::S, Verdict::Holds, -r.value, budget)
                .with_witness(w, WitnessMeaning::CertifyingVector));
        }
    }
    Ok(ClassificationReport::new(TensorClass::S, Verdict::Undetermined, -best, budget))
}

/// Looks for `x ≥ 0, x ≠ 0` with `A x^{m-1} ≥ 0`.
pub fn find_s0_witness(a: &Tensor, budget: &SearchBudget) -> Result<ClassificationReport> {
    budget.validate()?;
    let tol = budget.tolerance;
    let results = max_min_component(a, budget);
    let best = results.first().map_or(f64::INFINITY, |r| r.value);
    let hit = first_accepted(&results, |r| {
        r.value <= tol && witness_holds(a, TensorClass::S0, &r.z, tol).unwrap_or(false)
    });
    Ok(match hit {
        Some(r) => ClassificationReport::new(TensorClass::S0, Verdict::Holds, -r.value, budget)
            .with_witness(r.z.clone(), WitnessMeaning::CertifyingVector),
        None => ClassificationReport::new(TensorClass::S0, Verdict::Undetermined, -best, budget),
    })
}

/// `y = x + t e` for the largest `t ∈ {1, 1/2, 1/4, ...}` (down to `tol`)
/// keeping `A y^{m-1} ≥ tol` after rescaling to `‖y‖_∞ = 1`.
fn shift_into_orthant(a: &Tensor, x: &[f64], tol: f64) -> Option<Vec<f64>> {
    let mut t = 1.0;
    while t >= tol {
        let y: Vec<f64> = x.iter().map(|v| v.max(0.0) + t).collect();
        let scale = y.iter().fold(0.0f64, |m, v| m.max(*v));
        let y: Vec<f64> = y.iter().map(|v| v / scale).collect();
        if witness_holds(a, TensorClass::S, &y, tol).unwrap_or(false) {
            return Some(y);
        }
        t *= 0.5;
    }
    None
}
