//! Tensor complementarity problems over real tensors.
//!
//! Given an order-`m`, dimension-`n` tensor `A` and `q ∈ ℝⁿ`, `TCP(A, q)`
//! asks for `x ≥ 0` with `w = q + A x^{m-1} ≥ 0` and `xᵀw = 0`. The crate
//! provides the dense tensor kernels, budgeted class membership tests,
//! extremal Pareto eigenvalues, two solvers and global solution bounds.
//!
//! ```
//! use tcpkit::{solve_enumerate, SearchBudget, TcpInstance, Tensor};
//!
//! let a = Tensor::identity(3, 2).unwrap();
//! let inst = TcpInstance::new(a, vec![-1.0, 2.0]).unwrap();
//! let sols = solve_enumerate(&inst, &SearchBudget::default()).unwrap();
//! assert_eq!(sols.len(), 1);
//! assert!((sols[0].x[0] - 1.0).abs() < 1e-9);
//! ```

pub mod bounds;
pub mod budget;
pub mod classify;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod pareto;
mod search;
pub mod tcp;
pub mod tensor;

pub use bounds::{
    beta, bound_2_norm, bound_inf_norm, bound_m_norm, gamma_probe, BetaResult, BoundKind, BoundReport,
    GammaProbe, GammaVerdict,
};
pub use budget::SearchBudget;
pub use classify::{classify, witness_holds, ClassificationReport, TensorClass, Verdict, WitnessMeaning};
pub use error::{Result, TcpError};
pub use pareto::{lambda_min, mu_min, pareto_min, EigenKind, EigenResiduals, ParetoEigenpair};
pub use tcp::{
    check_pseudomonotone_violation, find_feasible, solve_enumerate, solve_merit, verify_solution, MeritOutcome,
    PseudoMonotoneCheck, Residuals, SolveMethod, TcpInstance, TcpSolution,
};
pub use tensor::Tensor;
