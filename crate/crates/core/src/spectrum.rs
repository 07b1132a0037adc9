//! Half-eigenvalues, classification of `lambda` against the half-spectrum,
//! condition (C_lambda) and the constant-coefficient Fucik curves.

use crate::error::{Error, Result};
use crate::ivp::{count_zeros, solve_half_eig_ivp, Trajectory};
use crate::problem::{NormalizedProblem, Sign, Tolerances};
use crate::real::{lit, Real};
use rayon::prelude::*;
use serde::Serialize;

/// `pi_p = 2 pi / (p sin(pi / p))`.
pub fn pi_p<T: Real>(p: T) -> T {
    lit::<T>(2.0) * T::PI() / (p * (T::PI() / p).sin())
}

/// Relative gap below which two half-eigenvalues are treated as equal.
pub const TIE_REL: f64 = 1e-7;
/// Endpoint residual accepted when cross-checking a resonant `lambda`.
const RESONANCE_RESIDUAL: f64 = 1e-6;
const COEFF_GRID: usize = 65;

#[derive(Debug, Clone, Serialize)]
pub struct HalfEigenpair<T> {
    pub k: usize,
    pub nu: Sign,
    /// Eigenvalue of the normalized problem.
    pub lambda: T,
    /// `u_{k,nu}` with `u'(0) = nu`.
    #[serde(skip)]
    pub eigenfunction: Trajectory<T>,
    pub endpoint_residual: T,
}

/// Whether the trajectory has passed its `(k+1)`-th zero at `x = 1`.
fn past<T: Real>(traj: &Trajectory<T>, k: usize, nu: Sign) -> Result<bool> {
    let n = count_zeros(traj)?;
    if n != k {
        return Ok(n > k);
    }
    let parity = if k.is_multiple_of(2) { T::one() } else { -T::one() };
    Ok(parity * nu.value::<T>() * traj.u_end <= T::zero())
}

/// Locates the parameter at which `x = 1` becomes the `(k+1)`-th zero of a
/// family of trajectories whose zero count is nondecreasing in the parameter.
fn locate<T, E>(eval: E, k: usize, nu: Sign, start: T, tol: &Tolerances<T>) -> Result<(T, Trajectory<T>)>
where
    T: Real,
    E: Fn(T) -> Result<Trajectory<T>>,
{
    let mut lo = start;
    let mut lo_traj = eval(lo)?;
    if past(&lo_traj, k, nu)? {
        return Err(Error::NoBracket(format!(
            "already past the crossing at the scan start {lo}"
        )));
    }
    let mut last_count = count_zeros(&lo_traj)?;
    let mut step = T::one().max(start.abs() * lit(0.1));
    let (mut hi, mut hi_traj) = loop {
        let cand = lo + step;
        if cand > tol.lambda_scan_max {
            return Err(Error::NoBracket(format!(
                "k = {k}, nu = {nu}: no crossing below {}",
                tol.lambda_scan_max
            )));
        }
        let t = eval(cand)?;
        let n = count_zeros(&t)?;
        if n < last_count {
            return Err(Error::Inconsistent(format!(
                "zero count decreased from {last_count} to {n} at {cand}"
            )));
        }
        last_count = n;
        if past(&t, k, nu)? {
            break (cand, t);
        }
        lo = cand;
        lo_traj = t;
        step *= lit(2.0);
    };

    let width = |l: T| tol.eig_width * T::one().max(l.abs());
    let mut iterations = 0;
    while hi - lo > width(lo) || best(&lo_traj, &hi_traj, k).1 > tol.eig_tol {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi || iterations > 200 {
            break;
        }
        iterations += 1;
        let t = eval(mid)?;
        if past(&t, k, nu)? {
            hi = mid;
            hi_traj = t;
        } else {
            lo = mid;
            lo_traj = t;
        }
    }
    let (use_hi, residual) = best(&lo_traj, &hi_traj, k);
    if residual > tol.eig_tol {
        return Err(Error::Inconsistent(format!(
            "k = {k}, nu = {nu}: endpoint residual {residual:e} above eig_tol at {lo}"
        )));
    }
    Ok(if use_hi { (hi, hi_traj) } else { (lo, lo_traj) })
}

/// Chooses the side with zero count `k` and the smaller endpoint residual.
fn best<T: Real>(lo: &Trajectory<T>, hi: &Trajectory<T>, k: usize) -> (bool, T) {
    let ok_hi = hi.zeros.len() == k;
    let ok_lo = lo.zeros.len() == k;
    match (ok_lo, ok_hi) {
        (true, true) if hi.u_end.abs() < lo.u_end.abs() => (true, hi.u_end.abs()),
        (true, _) => (false, lo.u_end.abs()),
        (false, true) => (true, hi.u_end.abs()),
        (false, false) => (false, T::infinity()),
    }
}

/// `lambda_{k,nu}` of the normalized problem with its eigenfunction.
pub fn find_half_eigenvalue<T: Real>(
    problem: &NormalizedProblem<T>,
    k: usize,
    nu: Sign,
    tol: &Tolerances<T>,
) -> Result<HalfEigenpair<T>> {
    tol.validate()?;
    let sup = problem.coefficient_sup(COEFF_GRID)?;
    let start = -lit::<T>(2.0) * sup - lit(10.0);
    let (lambda, traj) = locate(|l| solve_half_eig_ivp(problem, l, nu, tol), k, nu, start, tol)?;
    Ok(HalfEigenpair {
        k,
        nu,
        lambda,
        endpoint_residual: traj.u_end.abs(),
        eigenfunction: traj,
    })
}

/// Half-eigenpairs for `k = 0..=k_max` and both signs.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSlice<T> {
    /// `lambda` absorbed by normalization; original-frame values are
    /// `pair.lambda + shift`.
    pub shift: T,
    pub k_max: usize,
    pub pairs: Vec<HalfEigenpair<T>>,
    #[serde(skip)]
    problem: NormalizedProblem<T>,
    #[serde(skip)]
    tol: Tolerances<T>,
}

/// Computes every pair of the slice in parallel.
pub fn compute_slice<T: Real>(problem: &NormalizedProblem<T>, k_max: usize, tol: &Tolerances<T>) -> Result<SpectrumSlice<T>> {
    tol.validate()?;
    let jobs: Vec<(usize, Sign)> = (0..=k_max).flat_map(|k| Sign::BOTH.map(|s| (k, s))).collect();
    let pairs = jobs
        .par_iter()
        .map(|&(k, nu)| find_half_eigenvalue(problem, k, nu, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSlice {
        shift: problem.shift(),
        k_max,
        pairs,
        problem: problem.clone(),
        tol: *tol,
    })
}

impl<T: Real> SpectrumSlice<T> {
    pub fn problem(&self) -> &NormalizedProblem<T> {
        &self.problem
    }

    pub fn tolerances(&self) -> &Tolerances<T> {
        &self.tol
    }

    pub fn pair(&self, k: usize, nu: Sign) -> Option<&HalfEigenpair<T>> {
        self.pairs.iter().find(|p| p.k == k && p.nu == nu)
    }

    fn both(&self, k: usize) -> Result<(&HalfEigenpair<T>, &HalfEigenpair<T>)> {
        match (self.pair(k, Sign::Plus), self.pair(k, Sign::Minus)) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Precondition(format!("slice has no pair for k = {k}"))),
        }
    }

    /// The pair attaining `lambda_{k,min}`; `Plus` on a tie.
    pub fn min_pair(&self, k: usize) -> Result<&HalfEigenpair<T>> {
        let (a, b) = self.both(k)?;
        Ok(if b.lambda < a.lambda && !self.is_tie(k)? { b } else { a })
    }

    /// The pair attaining `lambda_{k,max}`; `Minus` on a tie.
    pub fn max_pair(&self, k: usize) -> Result<&HalfEigenpair<T>> {
        let (a, b) = self.both(k)?;
        Ok(if a.lambda > b.lambda && !self.is_tie(k)? { a } else { b })
    }

    pub fn lambda_min(&self, k: usize) -> Result<T> {
        let (a, b) = self.both(k)?;
        Ok(a.lambda.min(b.lambda))
    }

    pub fn lambda_max(&self, k: usize) -> Result<T> {
        let (a, b) = self.both(k)?;
        Ok(a.lambda.max(b.lambda))
    }

    /// `lambda_{k,+}` and `lambda_{k,-}` agree to the tie threshold.
    pub fn is_tie(&self, k: usize) -> Result<bool> {
        let (a, b) = self.both(k)?;
        Ok((a.lambda - b.lambda).abs() < lit::<T>(TIE_REL) * T::one().max(a.lambda.abs()))
    }

    /// Strict increase `lambda_{k+1,min} > lambda_{k,max}` for every `k`.
    pub fn check_monotonicity(&self) -> Result<()> {
        for k in 0..self.k_max {
            let (hi, lo) = (self.lambda_min(k + 1)?, self.lambda_max(k)?);
            if !(hi > lo) {
                return Err(Error::Inconsistent(format!(
                    "lambda_{{{},min}} = {hi} does not exceed lambda_{{{k},max}} = {lo}",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

/// Where a `lambda` sits relative to the half-spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Classification<T> {
    /// `lambda = lambda_{k,nu}` for every listed `nu`; `tie` when
    /// `lambda_{k,min} = lambda_{k,max}`.
    Resonant { k: usize, signs: Vec<Sign>, tie: bool },
    /// `lambda < lambda_{0,min}`.
    BelowSpectrum { sign_product: Option<T> },
    /// `lambda_{k,max} < lambda < lambda_{k+1,min}`.
    BetweenPairs { k: usize, sign_product: Option<T> },
    /// `lambda_{k,min} < lambda < lambda_{k,max}`.
    InsidePair { k: usize, sign_product: Option<T> },
}

impl<T> Classification<T> {
    pub fn is_resonant(&self) -> bool {
        matches!(self, Classification::Resonant { .. })
    }
}

/// `Psi_{lambda,+}(1) Psi_{lambda,-}(1)` in the normalized frame.
pub fn sign_product<T: Real>(problem: &NormalizedProblem<T>, lambda: T, tol: &Tolerances<T>) -> Result<T> {
    let a = solve_half_eig_ivp(problem, lambda, Sign::Plus, tol)?;
    let b = solve_half_eig_ivp(problem, lambda, Sign::Minus, tol)?;
    Ok(a.u_end * b.u_end)
}

/// Classifies `lambda`, given in the frame of the original problem.
///
/// Off the spectrum the ordering of the slice is cross-checked against the
/// sign product, which is positive exactly inside a pair. The product is
/// `None` when the shooting solutions overflow (far below the spectrum).
pub fn classify_lambda<T: Real>(slice: &SpectrumSlice<T>, lambda: T) -> Result<Classification<T>> {
    let mu = lambda - slice.shift;
    let tol = &slice.tol;
    let near = |a: T| (mu - a).abs() < lit::<T>(TIE_REL) * T::one().max(a.abs());
    for k in 0..=slice.k_max {
        let signs: Vec<Sign> = Sign::BOTH
            .into_iter()
            .filter(|&s| slice.pair(k, s).is_some_and(|p| near(p.lambda)))
            .collect();
        if signs.is_empty() {
            continue;
        }
        for &s in &signs {
            let t = solve_half_eig_ivp(&slice.problem, mu, s, tol)?;
            let scale = T::one().max(t.sup_u);
            if t.u_end.abs() > lit::<T>(RESONANCE_RESIDUAL) * scale {
                return Err(Error::Inconsistent(format!(
                    "lambda = {lambda} matches lambda_{{{k},{s}}} but |Psi(1)| = {:e}",
                    t.u_end.abs()
                )));
            }
        }
        let tie = slice.is_tie(k)?;
        return Ok(Classification::Resonant { k, signs, tie });
    }
    let top = slice.lambda_max(slice.k_max)?;
    if mu > top {
        return Err(Error::Precondition(format!(
            "lambda = {lambda} lies above the computed slice (k_max = {})",
            slice.k_max
        )));
    }
    let prod = match sign_product(&slice.problem, mu, tol) {
        Ok(v) => Some(v),
        Err(Error::Overflow { .. }) => None,
        Err(e) => return Err(e),
    };
    let class = if mu < slice.lambda_min(0)? {
        Classification::BelowSpectrum { sign_product: prod }
    } else {
        let mut found = None;
        for k in 0..=slice.k_max {
            if mu > slice.lambda_min(k)? && mu < slice.lambda_max(k)? {
                found = Some(Classification::InsidePair { k, sign_product: prod });
                break;
            }
            if k < slice.k_max && mu > slice.lambda_max(k)? && mu < slice.lambda_min(k + 1)? {
                found = Some(Classification::BetweenPairs { k, sign_product: prod });
                break;
            }
        }
        found.ok_or_else(|| Error::Inconsistent(format!("cannot place lambda = {lambda}")))?
    };
    let inside = matches!(class, Classification::InsidePair { .. });
    if let Some(prod) = prod {
        if inside != (prod > T::zero()) {
            return Err(Error::Inconsistent(format!(
                "sign product {prod:e} disagrees with the ordering of the slice at lambda = {lambda}"
            )));
        }
    }
    Ok(class)
}

/// Products `Psi'_{lambda,nu}(1) Psi_{lambda,-nu}(1)` at both ends of a pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignLemmaReport<T> {
    pub k: usize,
    pub lambda_min: T,
    pub nu_min: Sign,
    /// Expected positive.
    pub product_min: T,
    pub lambda_max: T,
    pub nu_max: Sign,
    /// Expected negative.
    pub product_max: T,
    pub holds: bool,
    /// A product fell below `eig_tol` in magnitude.
    pub inconclusive: bool,
}

pub fn check_sign_lemma<T: Real>(slice: &SpectrumSlice<T>, k: usize) -> Result<SignLemmaReport<T>> {
    if slice.is_tie(k)? {
        return Err(Error::Precondition(format!(
            "lambda_{{{k},min}} = lambda_{{{k},max}}; the sign test needs distinct values"
        )));
    }
    let tol = &slice.tol;
    let product = |pair: &HalfEigenpair<T>| -> Result<T> {
        let other = solve_half_eig_ivp(&slice.problem, pair.lambda, pair.nu.flip(), tol)?;
        Ok(pair.eigenfunction.du_end() * other.u_end)
    };
    let (lo, hi) = (slice.min_pair(k)?, slice.max_pair(k)?);
    let (pmin, pmax) = (product(lo)?, product(hi)?);
    let inconclusive = pmin.abs() < tol.eig_tol || pmax.abs() < tol.eig_tol;
    Ok(SignLemmaReport {
        k,
        lambda_min: lo.lambda,
        nu_min: lo.nu,
        product_min: pmin,
        lambda_max: hi.lambda,
        nu_max: hi.nu,
        product_max: pmax,
        holds: !inconclusive && pmin > T::zero() && pmax < T::zero(),
        inconclusive,
    })
}

/// Smallest relevant coefficient at the critical points of `Psi_{lambda,±}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CLambdaReport<T> {
    /// `p <= 2`: the condition is not required.
    pub trivially_satisfied: bool,
    pub satisfied: bool,
    /// `min |a_{sgn Psi}(x) + lambda|` over critical points `x`; `None` when
    /// there are none.
    pub min_coefficient: Option<T>,
    /// Where the minimum is attained.
    pub at: Option<T>,
    pub critical_points: usize,
}

pub fn check_c_lambda<T: Real>(
    problem: &NormalizedProblem<T>,
    traj_plus: &Trajectory<T>,
    traj_minus: &Trajectory<T>,
    tol: &Tolerances<T>,
) -> Result<CLambdaReport<T>> {
    if problem.p() <= lit(2.0) {
        return Ok(CLambdaReport {
            trivially_satisfied: true,
            satisfied: true,
            min_coefficient: None,
            at: None,
            critical_points: 0,
        });
    }
    let mut min: Option<(T, T)> = None;
    let mut n = 0;
    for traj in [traj_plus, traj_minus] {
        for c in &traj.critical_points {
            let s = match Sign::of(c.u) {
                Some(s) if c.u.abs() > tol.zero_simple_tol => s,
                _ => {
                    return Err(Error::Inconsistent(format!(
                        "critical point at x = {} with |Psi| = {:e}; integration accuracy is insufficient",
                        c.x,
                        c.u.abs()
                    )))
                }
            };
            n += 1;
            let a = (problem.coefficient(s, c.x)? + traj.lambda).abs();
            if min.is_none_or(|(m, _)| a < m) {
                min = Some((a, c.x));
            }
        }
    }
    Ok(CLambdaReport {
        trivially_satisfied: false,
        satisfied: min.is_none_or(|(m, _)| m > tol.c_lambda_tol),
        min_coefficient: min.map(|m| m.0),
        at: min.map(|m| m.1),
        critical_points: n,
    })
}

/// A point of the Fucik spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FucikPoint<T> {
    pub alpha_plus: T,
    pub alpha_minus: T,
    pub k: usize,
    pub branch: Sign,
    pub residual: T,
}

const FUCIK_START: f64 = -10.0;

fn fucik_one<T: Real>(p: T, k: usize, branch: Sign, fixed: T, fixed_is_plus: bool, tol: &Tolerances<T>) -> Result<FucikPoint<T>> {
    let eval = |a: T| {
        let (ap, am) = if fixed_is_plus { (fixed, a) } else { (a, fixed) };
        let problem = NormalizedProblem::constant(p, ap, am)?;
        solve_half_eig_ivp(&problem, T::zero(), branch, tol)
    };
    // the crossing does not move if the trajectory never visits the varied sign
    let probe = eval(lit(FUCIK_START))?;
    let probe_hi = eval(lit(1e4))?;
    if probe.zeros.is_empty() && probe_hi.zeros.is_empty() {
        let visits = (branch == Sign::Plus) != fixed_is_plus;
        if !visits {
            return Err(Error::NoBracket(format!(
                "the branch {branch} trajectory never changes sign, so the varied coefficient has no effect"
            )));
        }
    }
    let (a, traj) = locate(eval, k, branch, lit(FUCIK_START), tol).map_err(|e| match e {
        Error::NoBracket(m) => Error::NoBracket(format!(
            "alpha_{} = {fixed}: {m}",
            if fixed_is_plus { "+" } else { "-" }
        )),
        other => other,
    })?;
    let (alpha_plus, alpha_minus) = if fixed_is_plus { (fixed, a) } else { (a, fixed) };
    Ok(FucikPoint {
        alpha_plus,
        alpha_minus,
        k,
        branch,
        residual: traj.u_end.abs(),
    })
}

/// For each `alpha_plus`, the `alpha_minus` on the curve with `k` interior
/// zeros and initial slope sign `branch`. Grid points are independent.
pub fn trace_fucik<T: Real>(
    p: T,
    k: usize,
    branch: Sign,
    alpha_plus_grid: &[T],
    tol: &Tolerances<T>,
) -> Result<Vec<Result<FucikPoint<T>>>> {
    tol.validate()?;
    NormalizedProblem::constant(p, T::zero(), T::zero())?;
    Ok(alpha_plus_grid
        .par_iter()
        .map(|&ap| fucik_one(p, k, branch, ap, true, tol))
        .collect())
}

/// Same curves parameterized by `alpha_minus`; needed for the vertical line
/// `k = 0`, branch `+`.
pub fn trace_fucik_alpha_minus<T: Real>(
    p: T,
    k: usize,
    branch: Sign,
    alpha_minus_grid: &[T],
    tol: &Tolerances<T>,
) -> Result<Vec<Result<FucikPoint<T>>>> {
    tol.validate()?;
    NormalizedProblem::constant(p, T::zero(), T::zero())?;
    Ok(alpha_minus_grid
        .par_iter()
        .map(|&am| fucik_one(p, k, branch, am, false, tol))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{normalize, ProblemSpec};
    use std::f64::consts::PI;

    fn np(p: f64, ap: &str, am: &str, lambda: f64) -> NormalizedProblem<f64> {
        let rho = if p <= 2.0 { 0.9 } else { 0.0 };
        normalize(&ProblemSpec::builder(p).a_plus(ap).a_minus(am).lambda(lambda).rho(rho).build().unwrap())
    }

    #[test]
    fn dirichlet_eigenvalues() {
        let tol = Tolerances::default();
        let prob = np(2.0, "0", "0", 0.0);
        for k in [0, 3] {
            for nu in Sign::BOTH {
                let pair = find_half_eigenvalue(&prob, k, nu, &tol).unwrap();
                let exact = ((k + 1) as f64 * PI).powi(2);
                assert!((pair.lambda - exact).abs() / exact < 1e-8, "{} vs {exact}", pair.lambda);
                assert!(pair.endpoint_residual <= tol.eig_tol);
                assert_eq!(pair.eigenfunction.zeros.len(), k);
                assert_eq!(pair.eigenfunction.du_start(), nu.value::<f64>());
            }
        }
    }

    #[test]
    fn one_signed_eigenfunctions_see_one_coefficient() {
        let tol = Tolerances::default();
        let prob = np(2.0, "1", "0", 0.0);
        let plus = find_half_eigenvalue(&prob, 0, Sign::Plus, &tol).unwrap();
        let minus = find_half_eigenvalue(&prob, 0, Sign::Minus, &tol).unwrap();
        let pi2 = PI * PI;
        assert!((plus.lambda - (pi2 - 1.0)).abs() / (pi2 - 1.0) < 1e-8);
        assert!((minus.lambda - pi2).abs() / pi2 < 1e-8);
        for i in 1..200 {
            let x = i as f64 / 200.0;
            assert!(plus.eigenfunction.u(x) > 0.0 && minus.eigenfunction.u(x) < 0.0);
        }
    }

    #[test]
    fn shift_covariance() {
        let tol = Tolerances::default();
        let base = find_half_eigenvalue(&np(2.0, "1+x", "2", 0.0), 1, Sign::Minus, &tol).unwrap();
        let shifted = find_half_eigenvalue(&np(2.0, "1+x", "2", 3.0), 1, Sign::Minus, &tol).unwrap();
        assert!((shifted.lambda - (base.lambda - 3.0)).abs() < 1e-9 * base.lambda.abs());
    }

    #[test]
    fn classification_cases() {
        let tol = Tolerances::default();
        let slice = compute_slice(&np(2.0, "1", "0", 0.0), 2, &tol).unwrap();
        slice.check_monotonicity().unwrap();
        let pi2 = PI * PI;
        match classify_lambda(&slice, pi2 - 0.5).unwrap() {
            Classification::InsidePair { k: 0, sign_product } => assert!(sign_product.unwrap() > 0.0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            classify_lambda(&slice, -1e6).unwrap(),
            Classification::BelowSpectrum { .. }
        ));
        assert!(matches!(
            classify_lambda(&slice, pi2).unwrap(),
            Classification::Resonant { k: 0, tie: false, .. }
        ));
        let r = check_sign_lemma(&slice, 0).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.nu_min, Sign::Plus);
    }

    #[test]
    fn tie_is_case_a() {
        let slice = compute_slice(&np(2.0, "0", "0", PI * PI), 1, &Tolerances::default()).unwrap();
        assert!(slice.is_tie(0).unwrap());
        match classify_lambda(&slice, PI * PI).unwrap() {
            Classification::Resonant { k: 0, signs, tie: true } => assert_eq!(signs.len(), 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(check_sign_lemma(&slice, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn c_lambda_trivial_and_positive_constants() {
        let tol = Tolerances::default();
        let prob = np(2.0, "1", "1", 0.0);
        let t = solve_half_eig_ivp(&prob, 0.0, Sign::Plus, &tol).unwrap();
        assert!(check_c_lambda(&prob, &t, &t, &tol).unwrap().trivially_satisfied);
        let prob = np(3.0, "40", "60", 0.0);
        let a = solve_half_eig_ivp(&prob, 0.0, Sign::Plus, &tol).unwrap();
        let b = solve_half_eig_ivp(&prob, 0.0, Sign::Minus, &tol).unwrap();
        let r = check_c_lambda(&prob, &a, &b, &tol).unwrap();
        assert!(r.satisfied && !r.trivially_satisfied && r.critical_points > 0);
    }

    #[test]
    fn fucik_first_curve() {
        let tol = Tolerances::default();
        let a = 4.0 * PI * PI;
        let pts = trace_fucik(2.0, 1, Sign::Plus, &[a, 2.0 * PI * PI], &tol).unwrap();
        let p0 = pts[0].as_ref().unwrap();
        assert!((p0.alpha_minus - a).abs() / a < 1e-7);
        let p1 = pts[1].as_ref().unwrap();
        let lhs = PI / p1.alpha_plus.sqrt() + PI / p1.alpha_minus.sqrt();
        assert!((lhs - 1.0).abs() < 1e-7);
        // below the asymptote alpha_plus = pi^2 there is no point
        let pts = trace_fucik(2.0, 1, Sign::Plus, &[0.5 * PI * PI], &tol).unwrap();
        assert!(matches!(pts[0], Err(Error::NoBracket(_))));
    }

    #[test]
    fn fucik_lines_of_the_first_curve() {
        let tol = Tolerances::default();
        let pts = trace_fucik(2.0, 0, Sign::Plus, &[5.0], &tol).unwrap();
        assert!(matches!(pts[0], Err(Error::NoBracket(_))));
        for am in [1.0, 50.0] {
            let pts = trace_fucik_alpha_minus(2.0, 0, Sign::Plus, &[am], &tol).unwrap();
            let p = pts[0].as_ref().unwrap();
            assert!((p.alpha_plus - PI * PI).abs() < 1e-7);
        }
    }
}
