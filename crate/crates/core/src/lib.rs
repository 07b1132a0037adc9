//! Half-eigenvalues, Fucik spectrum and resonant Dirichlet problems for the
//! one-dimensional p-Laplacian with jumping coefficients
//!
//! ```text
//! -(phi_p(u'))' - a+(x) phi_p(u^+) + a-(x) phi_p(u^-) - lambda phi_p(u) = f(x, u),
//! u(0) = u(1) = 0,
//! ```
//!
//! with `phi_p(s) = |s|^(p-2) s`. Every routine is generic over [`Real`]
//! (`f32` or `f64`); the aliases at the crate root fix `T = f64`.
//!
//! ```
//! use halfspec::{compute_slice, normalize, ProblemSpec, Sign, Tolerances};
//!
//! let spec = ProblemSpec::builder(2.0).a("pi^2").build().unwrap();
//! let slice = compute_slice(&normalize(&spec), 1, &Tolerances::default()).unwrap();
//! let l = slice.pair(1, Sign::Plus).unwrap().lambda + slice.shift;
//! assert!((l - 3.0 * std::f64::consts::PI.powi(2)).abs() < 1e-6);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod expr;
pub mod ivp;
pub mod landesman;
pub mod ode;
pub mod problem;
pub mod quad;
pub mod real;
pub mod solver;
pub mod spectrum;
pub mod variational;

pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use ivp::{count_zeros, solve_half_eig_ivp, solve_rescaled_ivp, solve_shooting_ivp, Mode, Route, ShootRoute};
pub use landesman::{ll_integral, ll_verdict, LLCase, Verdict};
pub use problem::{normalize, phi_p, phi_p_inv, validate_hypotheses, Sign};
pub use real::Real;
pub use solver::{find_bracket, shoot, solve};
pub use spectrum::{
    check_c_lambda, check_sign_lemma, classify_lambda, compute_slice, find_half_eigenvalue, pi_p, trace_fucik,
    trace_fucik_alpha_minus,
};
pub use variational::{boundary_identity, small_ttau_sign, solve_variational};

pub type ProblemSpec = problem::ProblemSpec<f64>;
pub type NormalizedProblem = problem::NormalizedProblem<f64>;
pub type Tolerances = problem::Tolerances<f64>;
pub type ValidationReport = problem::ValidationReport<f64>;
pub type Trajectory = ivp::Trajectory<f64>;
pub type HalfEigenpair = spectrum::HalfEigenpair<f64>;
pub type SpectrumSlice = spectrum::SpectrumSlice<f64>;
pub type Classification = spectrum::Classification<f64>;
pub type FucikPoint = spectrum::FucikPoint<f64>;
pub type LLReport = landesman::LLReport<f64>;
pub type SensitivityResult = variational::SensitivityResult<f64>;
pub type SignPrediction = variational::SignPrediction<f64>;
pub type Bracket = solver::Bracket<f64>;
pub type ShootingResult = solver::ShootingResult<f64>;
pub type SolveReport = solver::SolveReport<f64>;
