//! Derivative of the rescaled shooting solution in `ttau` at `ttau = 0`.
//!
//! With base trajectory `Psi = Psi_nu` the derivative `z1` solves the linear
//! system
//!
//! ```text
//! z1' = J12 z2,       J12 = |Psi'|^(2-p) / (p-1)
//! z2' = J21 z1 + J23, J21 = -(p-1) a_{sgn Psi} |Psi|^(p-2),  J23 = -f_{sgn Psi}
//! z(0) = 0,           z3 = 1
//! ```
//!
//! `J12` is singular at critical points of `Psi` when `p > 2`, `J21` at zeros
//! of `Psi` when `p < 2`. The interval is split at those points and each
//! panel is mapped from `t in [0, 1]` through a regularized incomplete beta
//! function whose derivative vanishes at both ends to the order needed to
//! make the transformed field bounded.

use crate::error::{Error, Result};
use crate::ivp::{solve_half_eig_ivp, solve_rescaled_ivp, Trajectory};
use crate::landesman::ll_integral;
use crate::ode::{dopri5, DenseSolution, OdeOptions};
use crate::problem::{phi_p_inv, NormalizedProblem, Sign, Tolerances};
use crate::real::{lit, Real};
use crate::spectrum::{check_c_lambda, classify_lambda, Classification, SpectrumSlice};
use serde::Serialize;

/// `I_t(m, m)` and its derivative for integer `m >= 1`.
#[derive(Debug, Clone)]
struct BetaMap<T> {
    m: u32,
    binom: Vec<T>,
    norm: T,
}

impl<T: Real> BetaMap<T> {
    fn new(m: u32) -> Self {
        let n = 2 * m - 1;
        let mut binom = vec![T::one()];
        for j in 1..=n {
            let prev = binom[j as usize - 1];
            binom.push(prev * lit::<T>((n - j + 1) as f64) / lit::<T>(j as f64));
        }
        let norm = binom[m as usize] * lit::<T>(m as f64);
        BetaMap { m, binom, norm }
    }

    fn s(&self, t: T) -> T {
        let n = 2 * self.m - 1;
        let mut acc = T::zero();
        for j in self.m..=n {
            acc += self.binom[j as usize] * t.powi(j as i32) * (T::one() - t).powi((n - j) as i32);
        }
        acc
    }

    fn ds(&self, t: T) -> T {
        let k = (self.m - 1) as i32;
        self.norm * t.powi(k) * (T::one() - t).powi(k)
    }

    fn inverse(&self, s: T) -> T {
        let (mut lo, mut hi) = (T::zero(), T::one());
        for _ in 0..80 {
            let mid = (lo + hi) * lit(0.5);
            if self.s(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) * lit(0.5)
    }
}

/// Order of the end-point grading for exponent `p`.
fn grading<T: Real>(p: T) -> u32 {
    let two = lit::<T>(2.0);
    let beta = if p > two {
        (p - two) / (p - T::one())
    } else if p < two {
        two - p
    } else {
        return 1;
    };
    (two / (T::one() - beta)).ceil().to_u32().unwrap_or(u32::MAX).max(1)
}

#[derive(Debug, Clone, Serialize)]
pub struct PanelReport<T> {
    pub a: T,
    pub b: T,
    /// Grading order of the end-point map.
    pub m: u32,
    pub z_end: [T; 2],
    /// Change of `z(b)` when the panel is re-solved at a tenth of the tolerances.
    pub error: T,
    pub steps: usize,
}

#[derive(Debug, Clone)]
struct Panel<T> {
    a: T,
    b: T,
    map: BetaMap<T>,
    dense: DenseSolution<T, 2>,
}

/// Solution of the variational system.
#[derive(Debug, Clone, Serialize)]
pub struct SensitivityResult<T> {
    pub nu: Sign,
    /// `z1(1)`, the derivative of `psi~_nu(ttau)(1)` at `ttau = 0`.
    pub psi0_at_1: T,
    pub z2_at_1: T,
    /// Constant third component.
    pub z3: T,
    pub error_estimate: T,
    pub panels: Vec<PanelReport<T>>,
    #[serde(skip)]
    dense: Vec<Panel<T>>,
}

impl<T: Real> SensitivityResult<T> {
    /// `(z1, z2, z3)` at `x`.
    pub fn z(&self, x: T) -> [T; 3] {
        let i = self.dense.partition_point(|p| p.b < x).min(self.dense.len() - 1);
        let pan = &self.dense[i];
        let s = ((x - pan.a) / (pan.b - pan.a)).max(T::zero()).min(T::one());
        let y = pan.dense.eval(pan.map.inverse(s));
        [y[0], y[1], self.z3]
    }
}

struct Coefficients<'a, T> {
    problem: &'a NormalizedProblem<T>,
    base: &'a Trajectory<T>,
    p: T,
}

impl<T: Real> Coefficients<'_, T> {
    fn j12(&self, x: T) -> T {
        let v = self.base.v(x);
        let two = lit::<T>(2.0);
        if self.p == two {
            return T::one();
        }
        if v == T::zero() {
            return T::zero();
        }
        v.abs().powf((two - self.p) / (self.p - T::one())) / (self.p - T::one())
    }

    fn j21(&self, x: T, sign: Sign) -> Result<T> {
        let a = self.problem.coefficient(sign, x)? + self.base.lambda;
        let u = self.base.u(x).abs();
        let two = lit::<T>(2.0);
        let w = if self.p == two {
            T::one()
        } else if u == T::zero() {
            T::zero()
        } else {
            u.powf(self.p - two)
        };
        Ok(-(self.p - T::one()) * a * w)
    }

    fn j23(&self, x: T, sign: Sign) -> Result<T> {
        Ok(-self.problem.f_limit_at(sign, x)?)
    }
}

fn breakpoints<T: Real>(base: &Trajectory<T>) -> Vec<T> {
    let mut b = base.breakpoints();
    if base.p() > lit(2.0) {
        b.extend(base.critical_points.iter().map(|c| c.x).filter(|&x| x > T::zero() && x < T::one()));
    }
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    b.dedup_by(|x, y| (*x - *y).abs() <= lit(1e-14));
    b
}

fn solve_chain<T: Real>(
    coef: &Coefficients<'_, T>,
    breaks: &[T],
    m: u32,
    tol: &Tolerances<T>,
) -> Result<Vec<(Panel<T>, [T; 2], usize)>> {
    let mut z = [T::zero(); 2];
    let mut out = Vec::new();
    let opts = OdeOptions {
        h_max: Some(lit(0.0625)),
        ..OdeOptions::new(tol.ode_rel, tol.ode_abs, tol.max_steps)
    };
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = (a + b) * lit(0.5);
        let sign = match Sign::of(coef.base.u(mid)) {
            Some(s) => s,
            None => return Err(Error::Variational(format!("base trajectory vanishes inside the panel [{a}, {b}]"))),
        };
        let map = BetaMap::new(m);
        let len = b - a;
        let rhs = |t: T, y: &[T; 2]| -> Result<[T; 2]> {
            let ds = map.ds(t);
            if ds == T::zero() {
                return Ok([T::zero(); 2]);
            }
            let x = a + len * map.s(t);
            let w = len * ds;
            Ok([
                w * coef.j12(x) * y[1],
                w * (coef.j21(x, sign)? * y[0] + coef.j23(x, sign)?),
            ])
        };
        let sol = dopri5(rhs, T::zero(), z, T::one(), &opts, |_| Ok(()))
            .map_err(|e| Error::Variational(format!("panel [{a}, {b}]: {e}")))?;
        let end = sol.dense.segments()[sol.dense.segments().len() - 1].end();
        if !(end[0].is_finite() && end[1].is_finite()) {
            return Err(Error::Variational(format!("blow-up on panel [{a}, {b}]")));
        }
        z = end;
        out.push((
            Panel {
                a,
                b,
                map,
                dense: sol.dense,
            },
            end,
            sol.stats.accepted,
        ));
    }
    Ok(out)
}

/// Solves the variational system along `base` (`Psi_nu` of the normalized
/// problem at `lambda = base.lambda`).
pub fn solve_variational<T: Real>(
    problem: &NormalizedProblem<T>,
    base: &Trajectory<T>,
    nu: Sign,
    tol: &Tolerances<T>,
) -> Result<SensitivityResult<T>> {
    tol.validate()?;
    let p = problem.p();
    if p > lit(2.0) {
        let c = check_c_lambda(problem, base, base, tol)?;
        if !c.satisfied {
            return Err(Error::Variational(format!(
                "|Psi'|^(2-p) is not integrable: coefficient {:e} at critical point x = {:?}",
                c.min_coefficient.map_or(f64::NAN, |v| v.as_f64()),
                c.at.map(|v| v.as_f64())
            )));
        }
    }
    let coef = Coefficients { problem, base, p };
    let breaks = breakpoints(base);
    let m = grading(p);
    let coarse = solve_chain(&coef, &breaks, m, tol)?;
    let fine = solve_chain(&coef, &breaks, m, &tol.with_ode_scaled(lit(0.1)))?;
    let panels = coarse
        .iter()
        .zip(&fine)
        .map(|((_, zc, _), (pan, zf, steps))| PanelReport {
            a: pan.a,
            b: pan.b,
            m,
            z_end: *zf,
            error: (zc[0] - zf[0]).abs().max((zc[1] - zf[1]).abs()),
            steps: *steps,
        })
        .collect::<Vec<_>>();
    let end = fine.last().map(|f| f.1).unwrap_or([T::zero(); 2]);
    let end_coarse = coarse.last().map(|f| f.1).unwrap_or([T::zero(); 2]);
    Ok(SensitivityResult {
        nu,
        psi0_at_1: end[0],
        z2_at_1: end[1],
        z3: T::one(),
        error_estimate: (end[0] - end_coarse[0]).abs(),
        panels,
        dense: fine.into_iter().map(|f| f.0).collect(),
    })
}

/// Both sides of the boundary identity
/// `(p-1) |u'(1)|^(p-2) u'(1) z1(1) = int (f+ u^+ - f- u^-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub rhs_error: T,
    pub discrepancy: T,
    pub relative: T,
}

pub fn boundary_identity<T: Real>(
    problem: &NormalizedProblem<T>,
    eigenfunction: &Trajectory<T>,
    sens: &SensitivityResult<T>,
    tol: &Tolerances<T>,
) -> Result<IdentityReport<T>> {
    let p = problem.p();
    if eigenfunction.du_end().abs() <= tol.zero_simple_tol {
        return Err(Error::Inconsistent(format!(
            "u'(1) = {:e}: the endpoint zero is not simple",
            eigenfunction.du_end()
        )));
    }
    let lhs = (p - T::one()) * eigenfunction.v_end * sens.psi0_at_1;
    let spec = problem.spec();
    let q = ll_integral(&spec.f_plus, &spec.f_minus, eigenfunction, tol)?;
    let discrepancy = (lhs - q.value).abs();
    let scale = lhs.abs().max(q.value.abs());
    Ok(IdentityReport {
        lhs,
        rhs: q.value,
        rhs_error: q.error,
        discrepancy,
        relative: if scale > T::zero() { discrepancy / scale } else { T::zero() },
    })
}

/// One verification run at a sampled `ttau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignSample<T> {
    pub ttau: T,
    pub psi_plus: T,
    pub psi_minus: T,
    pub matches_prediction: bool,
}

/// Predicted signs of `psi~_±(ttau)(1)` for small `ttau > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignPrediction<T> {
    pub k: usize,
    pub tie: bool,
    pub predicted_plus: Option<Sign>,
    pub predicted_minus: Option<Sign>,
    /// `z1(1)` for each resonant sign.
    pub derivative_plus: Option<T>,
    pub derivative_minus: Option<T>,
    pub samples: Vec<SignSample<T>>,
    /// Largest sampled `ttau` at which `psi~_+(ttau)(1) psi~_-(ttau)(1) < 0`.
    pub largest_split: Option<T>,
    /// Both endpoint values vanish identically (`f = 0`).
    pub degenerate: bool,
}

pub const SIGN_SAMPLES: [f64; 2] = [1e-2, 1e-3];

/// Predicts the endpoint signs from the derivative (resonant sign) and from
/// `Psi_{-nu}(1)` (non-resonant sign), then checks them by integration.
pub fn small_ttau_sign<T: Real>(
    problem: &NormalizedProblem<T>,
    slice: &SpectrumSlice<T>,
    tol: &Tolerances<T>,
) -> Result<SignPrediction<T>> {
    let (k, signs, tie) = match classify_lambda(slice, problem.shift())? {
        Classification::Resonant { k, signs, tie } => (k, signs, tie),
        other => return Err(Error::Precondition(format!("lambda is not resonant: {other:?}"))),
    };
    let mut predicted = [None, None];
    let mut derivative = [None, None];
    for (i, nu) in Sign::BOTH.into_iter().enumerate() {
        let base = solve_half_eig_ivp(problem, T::zero(), nu, tol)?;
        if signs.contains(&nu) {
            let sens = solve_variational(problem, &base, nu, tol)?;
            derivative[i] = Some(sens.psi0_at_1);
            if sens.psi0_at_1.abs() > sens.error_estimate.max(tol.bvp_tol) {
                predicted[i] = Sign::of(sens.psi0_at_1);
            }
        } else {
            predicted[i] = Sign::of(base.u_end);
        }
    }
    let mut samples = Vec::new();
    let mut largest_split = None;
    let mut all_zero = true;
    for &t in SIGN_SAMPLES.iter() {
        let ttau = lit::<T>(t);
        let a = solve_rescaled_ivp(problem, ttau, Sign::Plus, tol)?.u_end;
        let b = solve_rescaled_ivp(problem, ttau, Sign::Minus, tol)?.u_end;
        all_zero &= a.abs() <= tol.bvp_tol && b.abs() <= tol.bvp_tol;
        let matches = predicted[0].is_some()
            && predicted[1].is_some()
            && Sign::of(a) == predicted[0]
            && Sign::of(b) == predicted[1];
        let resolved = a.abs() > tol.bvp_tol && b.abs() > tol.bvp_tol;
        if resolved && a * b < T::zero() && largest_split.is_none_or(|l| ttau > l) {
            largest_split = Some(ttau);
        }
        samples.push(SignSample {
            ttau,
            psi_plus: a,
            psi_minus: b,
            matches_prediction: matches,
        });
    }
    let degenerate = problem.f_is_zero() || all_zero;
    if !degenerate && samples.iter().all(|s| !s.matches_prediction) {
        return Err(Error::Inconsistent(format!(
            "predicted signs ({:?}, {:?}) contradicted at every sampled ttau: {samples:?}",
            predicted[0], predicted[1]
        )));
    }
    Ok(SignPrediction {
        k,
        tie,
        predicted_plus: predicted[0],
        predicted_minus: predicted[1],
        derivative_plus: derivative[0],
        derivative_minus: derivative[1],
        samples,
        largest_split,
        degenerate,
    })
}

/// `u'(1)` of the base trajectory, exposed for reports.
pub fn endpoint_slope<T: Real>(base: &Trajectory<T>) -> T {
    phi_p_inv(base.p(), base.v_end)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{normalize, ProblemSpec};
    use crate::spectrum::compute_slice;
    use std::f64::consts::PI;

    fn case_a(p: f64, f: &str) -> NormalizedProblem<f64> {
        let spec = ProblemSpec::builder(p).a("pi^2").f(f).f_limits("1", "-1").build().unwrap();
        normalize(&spec)
    }

    #[test]
    fn beta_map_endpoints() {
        for m in [1, 2, 4, 7] {
            let b = BetaMap::<f64>::new(m);
            assert!(b.s(0.0).abs() < 1e-15 && (b.s(1.0) - 1.0).abs() < 1e-14);
            assert!((b.s(0.5) - 0.5).abs() < 1e-14);
            let h = 1e-6;
            let fd = (b.s(0.3 + h) - b.s(0.3 - h)) / (2.0 * h);
            assert!((fd - b.ds(0.3)).abs() < 1e-7, "m = {m}");
            assert!((b.s(b.inverse(0.2)) - 0.2).abs() < 1e-14);
        }
        assert_eq!(grading(2.0), 1);
        assert_eq!(grading(3.0), 4);
        assert_eq!(grading(1.5), 4);
    }

    #[test]
    fn linear_case_closed_form() {
        let tol = Tolerances::default();
        let np = case_a(2.0, "tanh(xi)");
        let base = solve_half_eig_ivp(&np, 0.0, Sign::Plus, &tol).unwrap();
        let s = solve_variational(&np, &base, Sign::Plus, &tol).unwrap();
        assert!((s.psi0_at_1 + 2.0 / (PI * PI)).abs() < 1e-9, "{}", s.psi0_at_1);
        let z = s.z(0.5);
        assert!((z[0] + 1.0 / (PI * PI)).abs() < 1e-9);
        assert_eq!(z[2], 1.0);
        let id = boundary_identity(&np, &base, &s, &tol).unwrap();
        assert!(id.relative < 1e-8, "{id:?}");
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let tol = Tolerances::default();
        let spec = ProblemSpec::builder(2.0).a("pi^2").build().unwrap();
        let np = normalize(&spec);
        let base = solve_half_eig_ivp(&np, 0.0, Sign::Minus, &tol).unwrap();
        let s = solve_variational(&np, &base, Sign::Minus, &tol).unwrap();
        assert_eq!(s.psi0_at_1, 0.0);
        assert_eq!(s.z(0.7), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn case_a_sign_prediction() {
        let tol = Tolerances::default();
        let np = case_a(2.0, "2/pi*atan(xi)");
        let slice = compute_slice(&np, 1, &tol).unwrap();
        let pred = small_ttau_sign(&np, &slice, &tol).unwrap();
        assert!(pred.tie);
        assert_eq!(pred.predicted_plus, Some(Sign::Minus));
        assert_eq!(pred.predicted_minus, Some(Sign::Plus));
        let s = pred.samples.iter().find(|s| s.ttau == 1e-3).unwrap();
        assert!(s.psi_plus * s.psi_minus < 0.0);
        assert!(s.matches_prediction);
    }

    #[test]
    fn zero_forcing_prediction_is_degenerate() {
        let tol = Tolerances::default();
        let np = normalize(&ProblemSpec::builder(2.0).a("pi^2").build().unwrap());
        let slice = compute_slice(&np, 1, &tol).unwrap();
        let pred = small_ttau_sign(&np, &slice, &tol).unwrap();
        assert!(pred.degenerate);
        assert_eq!(pred.predicted_plus, None);
        assert_eq!(pred.largest_split, None);
    }
}
