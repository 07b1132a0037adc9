//! Shooting in `tau` for the resonant Dirichlet problem.

use crate::error::{Error, Result};
use crate::ivp::{solve_rescaled_ivp, solve_shooting_ivp, FirstOrderField, Mode, Trajectory};
use crate::landesman::{ll_verdict, LLReport, Verdict};
use crate::problem::{normalize, NormalizedProblem, ProblemSpec, Sign, Tolerances};
use crate::quad::integrate_pieces;
use crate::real::{count, lit, Real};
use crate::spectrum::{compute_slice, SpectrumSlice};
use crate::variational::small_ttau_sign;
use rayon::prelude::*;
use serde::Serialize;

/// Geometric search points for `ttau_0`.
pub const TTAU_SEARCH: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
/// Points of the sign-relocation scan.
pub const SCAN_POINTS: usize = 1024;
/// Grid of the integrated-form defect check.
pub const DEFECT_GRID: usize = 1025;
const TAU_WIDTH: f64 = 1e-13;

/// `tau` interval with the endpoint values `psi(tau)(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket<T> {
    pub tau_lo: T,
    pub tau_hi: T,
    pub value_lo: T,
    pub value_hi: T,
    /// `1 / tau_0` when the bracket came from the rescaled search.
    pub ttau0: Option<T>,
}

/// Outcome of [`find_bracket`] with the search record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketSearch<T> {
    pub bracket: Bracket<T>,
    /// `(ttau, psi~_+(ttau)(1), psi~_-(ttau)(1))` for each tried `ttau`.
    pub tried: Vec<(T, T, T)>,
}

/// Searches `ttau in {1e-2, ..., 1e-8}` below `delta_ttau` for
/// `psi~_+(ttau)(1) psi~_-(ttau)(1) < 0` and maps it to `tau = ±1/ttau`.
pub fn find_bracket<T: Real>(problem: &NormalizedProblem<T>, ll: &LLReport<T>, tol: &Tolerances<T>) -> Result<BracketSearch<T>> {
    tol.validate()?;
    if ll.verdict != Verdict::SolvableByTheorem {
        return Err(Error::Precondition(format!(
            "the solvability condition is not established (verdict {:?})",
            ll.verdict
        )));
    }
    if problem.f_is_zero() {
        return Err(Error::NoBracket("f = 0: every endpoint value vanishes".into()));
    }
    let q = T::one() / (problem.p() - T::one());
    let mut tried = Vec::new();
    for &t in TTAU_SEARCH.iter() {
        let ttau = lit::<T>(t);
        if ttau >= tol.delta_ttau {
            continue;
        }
        let plus = solve_rescaled_ivp(problem, ttau, Sign::Plus, tol)?.u_end;
        let minus = solve_rescaled_ivp(problem, ttau, Sign::Minus, tol)?.u_end;
        tried.push((ttau, plus, minus));
        if plus * minus < T::zero() {
            let tau0 = T::one() / ttau;
            let s = tau0.powf(q);
            return Ok(BracketSearch {
                bracket: Bracket {
                    tau_lo: -tau0,
                    tau_hi: tau0,
                    value_lo: s * minus,
                    value_hi: s * plus,
                    ttau0: Some(ttau),
                },
                tried,
            });
        }
    }
    Err(Error::NoBracket(format!(
        "no sign split of psi~_±(ttau)(1) down to ttau = 1e-8; tried {tried:?}"
    )))
}

#[derive(Debug, Clone, Serialize)]
pub struct ShootingResult<T> {
    pub tau_star: T,
    #[serde(skip)]
    pub solution: Trajectory<T>,
    /// `|psi(tau*)(1)|` after the final re-integration.
    pub endpoint_residual: T,
    /// Largest integrated-form defect on the check grid.
    pub bvp_residual: T,
    pub bracket: Bracket<T>,
    pub history: Vec<(T, T)>,
    pub iterations: usize,
    pub accepted: bool,
    pub notice: Option<String>,
}

fn endpoint<T: Real>(problem: &NormalizedProblem<T>, tau: T, tol: &Tolerances<T>) -> Option<T> {
    solve_shooting_ivp(problem, tau, tol).ok().map(|t| t.u_end).filter(|v| v.is_finite())
}

/// Bisection on `tau -> psi(tau)(1)` inside `bracket`.
///
/// A failed or non-finite evaluation triggers a dense scan of the current
/// interval to relocate a sign change.
pub fn shoot<T: Real>(problem: &NormalizedProblem<T>, bracket: &Bracket<T>, tol: &Tolerances<T>) -> Result<ShootingResult<T>> {
    tol.validate()?;
    let mut history = vec![(bracket.tau_lo, bracket.value_lo), (bracket.tau_hi, bracket.value_hi)];
    let (mut lo, mut hi) = (bracket.tau_lo, bracket.tau_hi);
    let (mut flo, mut fhi) = (bracket.value_lo, bracket.value_hi);
    let mut iterations = 0;

    let tau_star = if flo.abs() < tol.bvp_tol {
        lo
    } else if fhi.abs() < tol.bvp_tol {
        hi
    } else {
        if !(flo * fhi < T::zero()) {
            return Err(Error::Precondition(format!(
                "bracket endpoints do not have opposite signs: {flo:e}, {fhi:e}"
            )));
        }
        loop {
            let mid = (lo + hi) * lit(0.5);
            if hi - lo <= lit::<T>(TAU_WIDTH) * T::one().max(mid.abs()) || mid <= lo || mid >= hi {
                let best = if flo.abs() <= fhi.abs() { lo } else { hi };
                let r = flo.abs().min(fhi.abs());
                if r >= tol.bvp_tol {
                    return Err(Error::Shooting(format!(
                        "residual stagnates at {r:e} with tau in [{lo}, {hi}]; history {history:?}"
                    )));
                }
                break best;
            }
            iterations += 1;
            match endpoint(problem, mid, tol) {
                Some(fm) => {
                    history.push((mid, fm));
                    if fm.abs() < tol.bvp_tol {
                        break mid;
                    }
                    if (fm < T::zero()) == (flo < T::zero()) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                        fhi = fm;
                    }
                }
                None => {
                    let (l, h, fl, fh) = relocate(problem, lo, hi, tol, &mut history)?;
                    lo = l;
                    hi = h;
                    flo = fl;
                    fhi = fh;
                }
            }
        }
    };

    let fine = tol.with_ode_scaled(lit(0.1));
    let solution = solve_shooting_ivp(problem, tau_star, &fine)?;
    let endpoint_residual = solution.u_end.abs();
    let bvp_residual = bvp_defect(problem, &solution, DEFECT_GRID, tol)?;
    Ok(ShootingResult {
        tau_star,
        accepted: endpoint_residual < tol.bvp_tol && bvp_residual < tol.defect_tol,
        solution,
        endpoint_residual,
        bvp_residual,
        bracket: *bracket,
        history,
        iterations,
        notice: None,
    })
}

fn relocate<T: Real>(
    problem: &NormalizedProblem<T>,
    lo: T,
    hi: T,
    tol: &Tolerances<T>,
    history: &mut Vec<(T, T)>,
) -> Result<(T, T, T, T)> {
    let taus: Vec<T> = (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * count::<T>(i) / count::<T>(SCAN_POINTS - 1))
        .collect();
    let vals: Vec<Option<T>> = taus.par_iter().map(|&t| endpoint(problem, t, tol)).collect();
    for (t, v) in taus.iter().zip(&vals) {
        if let Some(v) = v {
            history.push((*t, *v));
        }
    }
    for i in 0..SCAN_POINTS - 1 {
        if let (Some(a), Some(b)) = (vals[i], vals[i + 1]) {
            if a * b <= T::zero() {
                return Ok((taus[i], taus[i + 1], a, b));
            }
        }
    }
    Err(Error::Shooting(format!(
        "no sign change located by a {SCAN_POINTS}-point scan of [{lo}, {hi}]"
    )))
}

/// `max_i |v(x_i) - v(0) - int_0^{x_i} g(s, u(s)) ds|` on `n` uniform points,
/// with `g` the right-hand side of the unscaled equation.
pub fn bvp_defect<T: Real>(problem: &NormalizedProblem<T>, traj: &Trajectory<T>, n: usize, tol: &Tolerances<T>) -> Result<T> {
    let field = FirstOrderField::new(problem, Mode::Shooting);
    let zeros: Vec<T> = traj.zeros.iter().map(|z| z.x).collect();
    let v0 = traj.v(T::zero());
    let mut acc = T::zero();
    let mut worst = T::zero();
    let mut prev = T::zero();
    for i in 1..n {
        let x = count::<T>(i) / count::<T>(n - 1);
        let mut breaks = vec![prev];
        breaks.extend(zeros.iter().copied().filter(|&z| z > prev && z < x));
        breaks.push(x);
        let q = integrate_pieces(|s| field.g(s, traj.u(s)), &breaks, tol.quad_tol / count::<T>(n))?;
        acc += q.value;
        worst = worst.max((traj.v(x) - v0 - acc).abs());
        prev = x;
    }
    Ok(worst)
}

/// Every stage of the resonant solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport<T> {
    pub ll: LLReport<T>,
    pub search: Option<BracketSearch<T>>,
    pub result: ShootingResult<T>,
}

/// Spectrum, Landesman-Lazer verdict, bracket and shooting for `spec`.
///
/// With `f = 0` the normalized half-eigenfunction is returned directly.
pub fn solve<T: Real>(spec: &ProblemSpec<T>, k_max: usize, tol: &Tolerances<T>) -> Result<SolveReport<T>> {
    let problem = normalize(spec);
    let slice = compute_slice(&problem, k_max, tol)?;
    solve_with_slice(spec, &problem, &slice, tol)
}

pub fn solve_with_slice<T: Real>(
    spec: &ProblemSpec<T>,
    problem: &NormalizedProblem<T>,
    slice: &SpectrumSlice<T>,
    tol: &Tolerances<T>,
) -> Result<SolveReport<T>> {
    let ll = ll_verdict(spec, slice, tol)?;
    if problem.f_is_zero() {
        if let Some(k) = ll.k {
            let pair = slice.min_pair(k)?;
            let solution = pair.eigenfunction.clone();
            let residual = solution.u_end.abs();
            let bvp_residual = bvp_defect(problem, &solution, DEFECT_GRID, tol)?;
            let tau = pair.nu.value::<T>();
            return Ok(SolveReport {
                ll,
                search: None,
                result: ShootingResult {
                    tau_star: tau,
                    accepted: residual < tol.bvp_tol && bvp_residual < tol.defect_tol,
                    solution,
                    endpoint_residual: residual,
                    bvp_residual,
                    bracket: Bracket {
                        tau_lo: tau,
                        tau_hi: tau,
                        value_lo: residual,
                        value_hi: residual,
                        ttau0: None,
                    },
                    history: vec![(tau, residual)],
                    iterations: 0,
                    notice: Some(
                        "f = 0: every nonnegative multiple of the half-eigenfunction solves the problem".into(),
                    ),
                },
            });
        }
    }
    let search = match find_bracket(problem, &ll, tol) {
        Err(Error::NoBracket(msg)) => {
            let diag = match small_ttau_sign(problem, slice, tol) {
                Ok(s) => format!(
                    "predicted signs {:?}/{:?}, z1(1) = {:?}/{:?}",
                    s.predicted_plus, s.predicted_minus, s.derivative_plus, s.derivative_minus
                ),
                Err(e) => format!("sensitivity unavailable: {e}"),
            };
            return Err(Error::NoBracket(format!(
                "{msg}; {diag}; eig_tol or quad_tol may be too loose, or the condition is marginal"
            )));
        }
        other => other?,
    };
    let result = shoot(problem, &search.bracket, tol)?;
    Ok(SolveReport {
        ll,
        search: Some(search),
        result,
    })
}
