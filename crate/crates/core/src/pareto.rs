//! Extremal Pareto H- and Z-eigenvalues.
//!
//! `λ(A) = min { A x^m : x ≥ 0, ‖x‖_m = 1 }` and
//! `μ(A) = min { A x^m : x ≥ 0, ‖x‖_2 = 1 }`. For a strictly copositive
//! symmetric tensor these minima are the smallest Pareto H- and
//! Z-eigenvalues. The minimization is carried out on the faces of the
//! nonnegative ∞-sphere using the degree-0 form `A u^m / ‖u‖_p^m`, which
//! takes the same values as the constrained problem and only needs box
//! constraints.

use serde::{Deserialize, Serialize};

use crate::budget::SearchBudget;
use crate::error::{Result, TcpError};
use crate::search::{nonneg_faces, Pieces, Problem};
use crate::tensor::{dot, norm, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenKind {
    H,
    Z,
}

impl EigenKind {
    fn exponent(self, order: usize) -> f64 {
        match self {
            EigenKind::H => order as f64,
            EigenKind::Z => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenResiduals {
    pub eigen_equation: f64,
    pub slackness: f64,
    pub nonneg_violation: f64,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoEigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub kind: EigenKind,
    pub residuals: EigenResiduals,
    /// False when the input was not symmetric; the minimum is still
    /// computed but its eigenvalue interpretation assumed symmetry.
    pub symmetric_input: bool,
    pub budget: SearchBudget,
}

fn residuals(eq: f64, slack: &[f64], x: &[f64], tol: f64) -> EigenResiduals {
    let slackness = slack.iter().fold(0.0f64, |m, v| m.max(-v));
    let nonneg_violation = x.iter().fold(0.0f64, |m, v| m.max(-v));
    let eigen_equation = eq.abs();
    EigenResiduals {
        eigen_equation,
        slackness,
        nonneg_violation,
        verified: eigen_equation <= tol && slackness <= tol && nonneg_violation <= tol,
    }
}

/// Residuals of `A x^m = μ xᵀx^{[m-1]}`, `A x^{m-1} − μ x^{[m-1]} ≥ 0`, `x ≥ 0`.
pub fn verify_pareto_h(a: &Tensor, value: f64, x: &[f64], tol: f64) -> Result<EigenResiduals> {
    let ax = a.apply(x)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(TcpError::ZeroVector);
    }
    let m = a.order() as i32;
    let pow: Vec<f64> = x.iter().map(|v| v.powi(m - 1)).collect();
    let eq = dot(x, &ax) - value * dot(x, &pow);
    let slack: Vec<f64> = ax.iter().zip(&pow).map(|(a, p)| a - value * p).collect();
    Ok(residuals(eq, &slack, x, tol))
}

/// Residuals of `A x^m = μ (xᵀx)^{m/2}`, `A x^{m-1} − μ (xᵀx)^{m/2−1} x ≥ 0`, `x ≥ 0`.
pub fn verify_pareto_z(a: &Tensor, value: f64, x: &[f64], tol: f64) -> Result<EigenResiduals> {
    let ax = a.apply(x)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(TcpError::ZeroVector);
    }
    let m = a.order() as f64;
    let xx = dot(x, x);
    let eq = dot(x, &ax) - value * xx.powf(m / 2.0);
    let c = xx.powf(m / 2.0 - 1.0);
    let slack: Vec<f64> = ax.iter().zip(x).map(|(a, xi)| a - value * c * xi).collect();
    Ok(residuals(eq, &slack, x, tol))
}

pub fn lambda_min(a: &Tensor, budget: &SearchBudget) -> Result<ParetoEigenpair> {
    extremal(a, EigenKind::H, budget)
}

pub fn mu_min(a: &Tensor, budget: &SearchBudget) -> Result<ParetoEigenpair> {
    extremal(a, EigenKind::Z, budget)
}

pub fn pareto_min(a: &Tensor, kind: EigenKind, budget: &SearchBudget) -> Result<ParetoEigenpair> {
    extremal(a, kind, budget)
}

/// How many of the best local results get a Newton polish.
const POLISHED: usize = 4;

fn extremal(a: &Tensor, kind: EigenKind, budget: &SearchBudget) -> Result<ParetoEigenpair> {
    budget.validate()?;
    let n = a.dim();
    let m = a.order();
    let p = kind.exponent(m);
    let problem = Problem {
        faces: nonneg_faces(n, &[(0..n).collect()]),
        eval: Box::new(move |_, u, grads| {
            let s = norm(u, p).expect("exponent > 1");
            let poly = a.poly_value(u).expect("dimension checked");
            let sm = s.powi(m as i32);
            let value = poly / sm;
            let grads = if grads {
                let gp = a.poly_gradient(u).expect("dimension checked");
                let coef = m as f64 * poly / (sm * s);
                let g = gp
                    .iter()
                    .zip(u)
                    .map(|(g, ui)| g / sm - coef * (ui / s).powf(p - 1.0))
                    .collect();
                vec![g]
            } else {
                Vec::new()
            };
            Pieces {
                values: vec![value],
                grads,
            }
        }),
    };
    let results = problem.multistart(budget);
    let (_, u) = results
        .iter()
        .take(POLISHED)
        .map(|r| problem.polish_smooth(&problem.faces[r.face], r.z.clone()))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| TcpError::InvalidParameter("search produced no iterate".into()))?;
    let s = norm(&u, p)?;
    let vector: Vec<f64> = u.iter().map(|v| v / s).collect();
    let value = a.poly_value(&vector)?;
    let tol = budget.tolerance;
    let residuals = match kind {
        EigenKind::H => verify_pareto_h(a, value, &vector, tol)?,
        EigenKind::Z => verify_pareto_z(a, value, &vector, tol)?,
    };
    Ok(ParetoEigenpair {
        value,
        vector,
        kind,
        residuals,
        symmetric_input: a.is_symmetric(),
        budget: *budget,
    })
}
