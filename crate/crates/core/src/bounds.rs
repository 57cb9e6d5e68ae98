//! Global upper bounds on TCP solutions and the boundedness probe for the
//! level sets `Γ(q, s, t)`.

use serde::{Deserialize, Serialize};

use crate::budget::SearchBudget;
use crate::classify::{check_r0, product_pieces};
use crate::error::{Result, TcpError};
use crate::search::{nonneg_faces, Face, Pieces, Problem};
use crate::tcp::TcpInstance;
use crate::tensor::{dot, norm, norm_inf, positive_part, Tensor};

/// `satisfied` allows this much excess of `lhs` over `rhs`.
pub const BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaResult {
    pub value: f64,
    pub vector: Vec<f64>,
    pub budget: SearchBudget,
}

/// `β(A) = min_{x ≥ 0, ‖x‖_∞ = 1} max_i x_i (A x^{m-1})_i`.
///
/// The ∞-sphere slice is the union of the faces `x_k = 1`; each face is a
/// box problem, solved separately, and the face minima are merged.
pub fn beta(a: &Tensor, budget: &SearchBudget) -> Result<BetaResult> {
    budget.validate()?;
    let n = a.dim();
    let problem = Problem {
        faces: nonneg_faces(n, &[(0..n).collect()]),
        eval: Box::new(product_pieces(a)),
    };
    let best = problem
        .multistart(budget)
        .into_iter()
        .next()
        .ok_or_else(|| TcpError::InvalidParameter("search produced no iterate".into()))?;
    let ax = a.apply(&best.z)?;
    let value = best
        .z
        .iter()
        .zip(&ax)
        .map(|(x, y)| x * y)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BetaResult {
        value,
        vector: best.z,
        budget: *budget,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    MNorm,
    TwoNorm,
    InfNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    pub satisfied: bool,
    pub slack: f64,
}

fn report(kind: BoundKind, lhs: f64, rhs: f64, constant: f64) -> BoundReport {
    BoundReport {
        kind,
        lhs,
        rhs,
        constant_used: constant,
        satisfied: lhs <= rhs + BOUND_SLACK,
        slack: rhs - lhs,
    }
}

fn check_constant(name: &str, c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(TcpError::InvalidParameter(format!("{name} must be positive, got {c}")))
    }
}

fn neg_q_plus(inst: &TcpInstance) -> Vec<f64> {
    positive_part(&inst.q().iter().map(|v| -v).collect::<Vec<_>>())
}

fn check_x(inst: &TcpInstance, x: &[f64]) -> Result<()> {
    if x.len() != inst.dim() {
        return Err(TcpError::DimensionMismatch {
            expected: inst.dim(),
            found: x.len(),
        });
    }
    Ok(())
}

/// `‖x‖_m^{m-1} ≤ ‖(−q)₊‖_{m/(m−1)} / λ(A)` for symmetric strictly
/// semi-positive `A`; the caller attests the class.
pub fn bound_m_norm(inst: &TcpInstance, x: &[f64], lambda: f64) -> Result<BoundReport> {
    check_constant("lambda", lambda)?;
    check_x(inst, x)?;
    let m = inst.tensor().order() as f64;
    let lhs = norm(x, m)?.powf(m - 1.0);
    let rhs = norm(&neg_q_plus(inst), m / (m - 1.0))? / lambda;
    Ok(report(BoundKind::MNorm, lhs, rhs, lambda))
}

/// `‖x‖_2^{m-1} ≤ ‖(−q)₊‖_2 / μ(A)` for symmetric strictly semi-positive `A`.
pub fn bound_2_norm(inst: &TcpInstance, x: &[f64], mu: f64) -> Result<BoundReport> {
    check_constant("mu", mu)?;
    check_x(inst, x)?;
    let m = inst.tensor().order() as f64;
    let lhs = norm(x, 2.0)?.powf(m - 1.0);
    let rhs = norm(&neg_q_plus(inst), 2.0)? / mu;
    Ok(report(BoundKind::TwoNorm, lhs, rhs, mu))
}

/// `‖x‖_∞^{m-1} ≤ ‖(−q)₊‖_∞ / β(A)` for strictly semi-positive `A`
/// (symmetry not required).
pub fn bound_inf_norm(inst: &TcpInstance, x: &[f64], beta: f64) -> Result<BoundReport> {
    check_constant("beta", beta)?;
    check_x(inst, x)?;
    let m = inst.tensor().order() as f64;
    let lhs = norm_inf(x).powf(m - 1.0);
    let rhs = norm_inf(&neg_q_plus(inst)) / beta;
    Ok(report(BoundKind::InfNorm, lhs, rhs, beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaVerdict {
    LikelyBounded,
    UnboundedWitness,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaProbe {
    pub q: Vec<f64>,
    pub s: f64,
    pub t: f64,
    pub members_found: Vec<Vec<f64>>,
    pub escape_direction: Option<Vec<f64>>,
    pub verdict: GammaVerdict,
    /// Largest norm cap searched.
    pub final_cap: f64,
}

/// Number of cap doublings: caps are 1, 2, 4, ..., 2^10.
const CAP_DOUBLINGS: u32 = 10;

/// Scale-normalized violation of `x ∈ Γ(q, s, t)`: each defining inequality
/// is divided by `1 + ‖x‖^k` for its degree `k`, matching the limit taken
/// along an unbounded sequence of members.
pub fn gamma_violation(a: &Tensor, q: &[f64], s: f64, t: f64, x: &[f64]) -> Result<f64> {
    let ax = a.apply(x)?;
    if q.len() != x.len() {
        return Err(TcpError::DimensionMismatch {
            expected: x.len(),
            found: q.len(),
        });
    }
    let m = a.order() as i32;
    let r = norm_inf(x);
    let d1 = 1.0 + r.powi(m - 1);
    let dm = 1.0 + r.powi(m);
    let neg = x.iter().fold(0.0f64, |acc, v| acc.max(-v));
    let feas = q
        .iter()
        .zip(&ax)
        .map(|(qi, ai)| -(qi + ai) / d1)
        .fold(f64::NEG_INFINITY, f64::max);
    let level = (dot(x, q) + t * dot(x, &ax) - s) / dm;
    Ok(neg.max(feas).max(level))
}

/// Escape-direction conditions: `x ≥ 0`, `‖x‖_∞ = 1`, `A x^{m-1} ≥ −tol`,
/// `|A x^m| ≤ tol`.
pub fn is_escape_direction(a: &Tensor, x: &[f64], tol: f64) -> Result<bool> {
    let ax = a.apply(x)?;
    let poly = dot(x, &ax);
    Ok(x.iter().all(|&v| v >= 0.0)
        && (norm_inf(x) - 1.0).abs() <= 1e-12
        && ax.iter().all(|&v| v >= -tol)
        && poly.abs() <= tol)
}

/// Probes boundedness of `Γ(q, s, t) = {x ≥ 0 : q + A x^{m-1} ≥ 0, xᵀq + t A x^m ≤ s}`.
///
/// First searches the nonnegative unit ∞-sphere for an escape direction
/// (`A x'^{m-1} ≥ 0`, `A x'^m ≤ 0`) with the same search as the R₀ check;
/// finding one means `A` is not R₀ and `Γ` is unbounded. Otherwise looks for members in the shells
/// `R/2 ≤ ‖x‖_∞ ≤ R` for `R = 1, 2, ..., 2^10` (the first shell is the unit
/// ball) and reports `LikelyBounded` when the last shell has none.
pub fn gamma_probe(a: &Tensor, q: &[f64], s: f64, t: f64, budget: &SearchBudget) -> Result<GammaProbe> {
    budget.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(TcpError::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if !s.is_finite() {
        return Err(TcpError::InvalidParameter(format!("s must be finite, got {s}")));
    }
    let n = a.dim();
    if q.len() != n {
        return Err(TcpError::DimensionMismatch {
            expected: n,
            found: q.len(),
        });
    }
    let escape_direction = check_r0(a, budget)?
        .witness
        .filter(|x| is_escape_direction(a, x, budget.tolerance).unwrap_or(false));

    let mut probe = GammaProbe {
        q: q.to_vec(),
        s,
        t,
        members_found: Vec::new(),
        escape_direction: None,
        verdict: GammaVerdict::Undetermined,
        final_cap: f64::from(1u32 << CAP_DOUBLINGS),
    };
    if let Some(dir) = escape_direction {
        probe.escape_direction = Some(dir);
        probe.verdict = GammaVerdict::UnboundedWitness;
        return Ok(probe);
    }

    let mut last_shell_hit = false;
    for k in 0..=CAP_DOUBLINGS {
        let cap = f64::from(1u32 << k);
        let inner = if k == 0 { 0.0 } else { cap / 2.0 };
        let members = shell_members(a, q, s, t, inner, cap, budget)?;
        last_shell_hit = !members.is_empty();
        for x in members {
            let radius = DEDUP * cap.max(1.0);
            let dup = probe
                .members_found
                .iter()
                .any(|o| o.iter().zip(&x).all(|(p, r)| (p - r).abs() <= radius));
            if !dup {
                probe.members_found.push(x);
            }
        }
    }
    probe.verdict = if last_shell_hit {
        GammaVerdict::Undetermined
    } else {
        GammaVerdict::LikelyBounded
    };
    Ok(probe)
}

const DEDUP: f64 = 1e-6;

/// Members of `Γ` with `inner ≤ ‖x‖_∞ ≤ outer`, searched over `x = r·u`
/// with `u` on a face of the ∞-sphere and `r = inner + ρ (outer − inner)`.
fn shell_members(
    a: &Tensor,
    q: &[f64],
    s: f64,
    t: f64,
    inner: f64,
    outer: f64,
    budget: &SearchBudget,
) -> Result<Vec<Vec<f64>>> {
    let n = a.dim();
    let m = a.order() as i32;
    let mf = f64::from(m);
    let width = outer - inner;
    let faces: Vec<Face> = nonneg_faces(n, &[(0..n).collect()])
        .into_iter()
        .map(|mut f| {
            f.lo.push(0.0);
            f.hi.push(1.0);
            f
        })
        .collect();
    let eval = move |_: &Face, z: &[f64], grads: bool| -> Pieces {
        let u = &z[..n];
        let r = inner + z[n] * width;
        let au = a.apply_unchecked(u);
        let pu = dot(u, &au);
        let uq = dot(u, q);
        let rm1 = r.powi(m - 1);
        let rm = r.powi(m);
        let d1 = 1.0 + rm1;
        let dm = 1.0 + rm;
        let mut values: Vec<f64> = (0..n).map(|i| -(q[i] + rm1 * au[i]) / d1).collect();
        let level_num = r * uq + t * rm * pu - s;
        values.push(level_num / dm);
        let grads = if grads {
            let jac = a.jacobian_unchecked(u);
            let drm1 = (mf - 1.0) * r.powi(m - 2);
            let mut gs: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let mut g: Vec<f64> = (0..n).map(|j| -rm1 * jac[i * n + j] / d1).collect();
                    g.push(drm1 * (q[i] - au[i]) / (d1 * d1) * width);
                    g
                })
                .collect();
            let mut gp = au.clone();
            for i in 0..n {
                for j in 0..n {
                    gp[j] += u[i] * jac[i * n + j];
                }
            }
            let mut g: Vec<f64> = (0..n).map(|j| (r * q[j] + t * rm * gp[j]) / dm).collect();
            let dnum = uq + mf * t * r.powi(m - 1) * pu;
            let dden = mf * r.powi(m - 1);
            g.push((dnum * dm - level_num * dden) / (dm * dm) * width);
            gs.push(g);
            gs
        } else {
            Vec::new()
        };
        Pieces { values, grads }
    };
    let problem = Problem {
        faces,
        eval: Box::new(eval),
    };
    let tol = budget.tolerance;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in problem.multistart(budget) {
        if r.value > tol {
            break;
        }
        let radius = inner + r.z[n] * width;
        let x: Vec<f64> = r.z[..n].iter().map(|u| radius * u).collect();
        if norm_inf(&x) < inner || gamma_violation(a, q, s, t, &x)? > tol {
            continue;
        }
        let close = DEDUP * outer.max(1.0);
        if !out
            .iter()
            .any(|o| o.iter().zip(&x).all(|(p, y)| (p - y).abs() <= close))
        {
            out.push(x);
        }
    }
    Ok(out)
}
