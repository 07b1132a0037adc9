//! Shooting initial value problems written as the first-order system
//! `u' = phi_p'(v)`, `v' = g(x, u)` on `[0, 1]`.

use crate::error::{Error, Result};
use crate::ode::{dopri5, DenseSegment, DenseSolution, OdeOptions, OdeStats};
use crate::problem::{phi_p, phi_p_inv, NormalizedProblem, Sign, Tolerances};
use crate::real::{count, lit, Real};
use serde::Serialize;

/// Which initial value problem the field describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Mode<T> {
    /// `g = -(a± + lambda) phi_p(u)`, no forcing.
    HalfEigen { lambda: T },
    /// `g = -a± phi_p(u) - f(x, u)`.
    Shooting,
    /// `g = -a± phi_p(u) - ttau f(x, |ttau|^(-1/(p-1)) u)`, forcing 0 at `ttau = 0`.
    Rescaled { ttau: T },
}

/// How a shooting trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    HalfEigen,
    Direct,
    Rescaled,
    /// `tau = 0` with `f(., 0) = 0`: the zero function.
    Trivial,
}

/// Requested integration route for [`solve_shooting_ivp_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShootRoute {
    /// Direct for `|tau| < 1/delta_ttau`, rescaled otherwise.
    Auto,
    Direct,
    Rescaled,
}

/// Right-hand side of the first-order system.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrderField<'a, T> {
    problem: &'a NormalizedProblem<T>,
    p: T,
    mode: Mode<T>,
    rescale: T,
}

const DEGENERATE_V: f64 = 1e-14;
const DEGENERATE_STATE: f64 = 1e-12;

impl<'a, T: Real> FirstOrderField<'a, T> {
    pub fn new(problem: &'a NormalizedProblem<T>, mode: Mode<T>) -> Self {
        let p = problem.p();
        let rescale = match mode {
            Mode::Rescaled { ttau } if ttau != T::zero() => ttau.abs().powf(-T::one() / (p - T::one())),
            _ => T::zero(),
        };
        FirstOrderField {
            problem,
            p,
            mode,
            rescale,
        }
    }

    pub fn mode(&self) -> Mode<T> {
        self.mode
    }

    pub fn problem(&self) -> &NormalizedProblem<T> {
        self.problem
    }

    /// `v' = g(x, u)`.
    #[inline]
    pub fn g(&self, x: T, u: T) -> Result<T> {
        let pu = phi_p(self.p, u);
        let a = match Sign::of(u) {
            Some(s) => self.problem.coefficient(s, x)?,
            None => T::zero(),
        };
        let forcing = match self.mode {
            Mode::HalfEigen { lambda } => lambda * pu,
            Mode::Shooting => self.problem.f_at(x, u)?,
            Mode::Rescaled { ttau } => {
                if ttau == T::zero() || self.problem.f_is_zero() {
                    T::zero()
                } else {
                    ttau * self.problem.f_at(x, self.rescale * u)?
                }
            }
        };
        Ok(-a * pu - forcing)
    }

    /// `u' = phi_p'(v)`, read as 0 for `|v| < 1e-14` when `p > 2`.
    #[inline]
    pub fn du(&self, v: T) -> T {
        if self.p > lit(2.0) && v.abs() < lit(DEGENERATE_V) {
            T::zero()
        } else {
            phi_p_inv(self.p, v)
        }
    }

    #[inline]
    pub fn rhs(&self, x: T, y: &[T; 2]) -> Result<[T; 2]> {
        Ok([self.du(y[1]), self.g(x, y[0])?])
    }
}

/// Simple zero of `u` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero<T> {
    pub x: T,
    /// `u'` at the zero.
    pub slope: T,
}

/// Zero of `v`, i.e. a critical point of `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint<T> {
    pub x: T,
    pub u: T,
}

/// Diagnostics attached to a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryFlags {
    pub route: Route,
    /// False when a rescaled problem was solved outside the uniqueness window.
    pub uniqueness_asserted: bool,
    /// Result of the a priori sup-norm check, when it applies.
    pub gronwall_ok: Option<bool>,
}

/// Dense solution `(u, v)` on `[0, 1]` with located zeros of `u` and `v`.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    p: T,
    dense: DenseSolution<T, 2>,
    pub zeros: Vec<Zero<T>>,
    pub critical_points: Vec<CriticalPoint<T>>,
    pub u_end: T,
    pub v_end: T,
    /// The `lambda` of a half-eigenvalue trajectory, 0 otherwise.
    pub lambda: T,
    /// Largest sampled `|u|`.
    pub sup_u: T,
    /// Largest sampled `|u'|`.
    pub sup_du: T,
    /// Accumulated local error estimate of `u`.
    pub error_estimate: T,
    pub zero_simple_tol: T,
    pub stats: OdeStats,
    pub flags: TrajectoryFlags,
}

/// Zeros closer than this to `x = 1` belong to the endpoint, not the interior.
const END_GAP: f64 = 1e-8;
const EVENT_TOL: f64 = 1e-12;
const H_MAX: f64 = 1.0 / 16.0;

impl<T: Real> Trajectory<T> {
    pub fn p(&self) -> T {
        self.p
    }

    pub fn dense(&self) -> &DenseSolution<T, 2> {
        &self.dense
    }

    #[inline]
    pub fn u(&self, x: T) -> T {
        self.dense.component(0, x)
    }

    #[inline]
    pub fn v(&self, x: T) -> T {
        self.dense.component(1, x)
    }

    /// `u'(x) = phi_p'(v(x))`.
    #[inline]
    pub fn du(&self, x: T) -> T {
        phi_p_inv(self.p, self.v(x))
    }

    pub fn du_end(&self) -> T {
        phi_p_inv(self.p, self.v_end)
    }

    pub fn du_start(&self) -> T {
        phi_p_inv(self.p, self.v(T::zero()))
    }

    /// `|u|_0 + |u'|_0` over the samples.
    pub fn sup_norm(&self) -> T {
        self.sup_u + self.sup_du
    }

    /// Integrator mesh.
    pub fn nodes(&self) -> Vec<T> {
        self.dense.nodes()
    }

    /// `0`, the interior zeros, `1`.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut b = vec![T::zero()];
        b.extend(self.zeros.iter().map(|z| z.x));
        b.push(T::one());
        b
    }

    /// `(x, u, v, u')` at `n` uniform points.
    pub fn sample(&self, n: usize) -> Vec<[T; 4]> {
        (0..n)
            .map(|i| {
                let x = count::<T>(i) / count::<T>(n.max(2) - 1);
                [x, self.u(x), self.v(x), self.du(x)]
            })
            .collect()
    }

    /// The trajectory of `t u` for `t > 0`: `u` scales by `t`, `v` by `t^(p-1)`.
    pub fn scaled(&self, t: T) -> Self {
        assert!(t > T::zero(), "scale factor must be positive");
        let tv = phi_p(self.p, t);
        Trajectory {
            p: self.p,
            dense: self.dense.scaled(&[t, tv]),
            zeros: self.zeros.iter().map(|z| Zero { x: z.x, slope: z.slope * t }).collect(),
            critical_points: self
                .critical_points
                .iter()
                .map(|c| CriticalPoint { x: c.x, u: c.u * t })
                .collect(),
            u_end: self.u_end * t,
            v_end: self.v_end * tv,
            lambda: self.lambda,
            sup_u: self.sup_u * t,
            sup_du: self.sup_du * t,
            error_estimate: self.error_estimate * t,
            zero_simple_tol: self.zero_simple_tol,
            stats: self.stats,
            flags: self.flags,
        }
    }

    /// Largest `|v - phi_p(u')|` over nodes and midpoints, with `u'` taken
    /// from the derivative of the interpolant.
    pub fn consistency_defect(&self) -> T {
        let mut worst = T::zero();
        for seg in self.dense.segments() {
            for theta in [0.0, 0.5] {
                let x = seg.x0 + seg.h * lit(theta);
                let du = seg.derivative(0, x);
                worst = worst.max((seg.component(1, x) - phi_p(self.p, du)).abs());
            }
        }
        worst
    }
}

/// Number of interior zeros; fails on a degenerate zero.
pub fn count_zeros<T: Real>(traj: &Trajectory<T>) -> Result<usize> {
    for z in &traj.zeros {
        if z.slope.abs() <= traj.zero_simple_tol {
            return Err(Error::DegenerateZero {
                x: z.x.as_f64(),
                slope: z.slope.abs().as_f64(),
            });
        }
    }
    Ok(traj.zeros.len())
}

fn bisect_event<T: Real>(seg: &DenseSegment<T, 2>, i: usize, mut lo: T, mut hi: T) -> T {
    let s_lo = seg.component(i, lo) > T::zero();
    let tol = lit::<T>(EVENT_TOL).max(T::epsilon() * lit(4.0));
    while hi - lo > tol {
        let mid = (lo + hi) * lit(0.5);
        if (seg.component(i, mid) > T::zero()) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid <= lo && mid >= hi {
            break;
        }
    }
    (lo + hi) * lit(0.5)
}

struct EventTracker<T> {
    last: [Option<(T, bool)>; 2],
    zeros: Vec<T>,
    crit: Vec<T>,
    sup: [T; 2],
}

impl<T: Real> EventTracker<T> {
    fn new(y0: [T; 2]) -> Self {
        let mut t = EventTracker {
            last: [None, None],
            zeros: Vec::new(),
            crit: Vec::new(),
            sup: [y0[0].abs(), y0[1].abs()],
        };
        for i in 0..2 {
            if y0[i] != T::zero() {
                t.last[i] = Some((T::zero(), y0[i] > T::zero()));
            }
        }
        t
    }

    fn observe(&mut self, seg: &DenseSegment<T, 2>) {
        let x1 = seg.x1();
        for theta in [0.25, 0.5, 0.75, 1.0] {
            let x = if theta == 1.0 { x1 } else { seg.x0 + seg.h * lit(theta) };
            let y = seg.eval(x);
            self.sup[0] = self.sup[0].max(y[0].abs());
            self.sup[1] = self.sup[1].max(y[1].abs());
            for i in 0..2 {
                if y[i] == T::zero() {
                    self.push(i, x);
                    self.last[i] = None;
                    continue;
                }
                let pos = y[i] > T::zero();
                match self.last[i] {
                    Some((xl, sl)) if sl != pos => {
                        let lo = xl.max(seg.x0);
                        let root = if (seg.component(i, lo) > T::zero()) == sl {
                            bisect_event(seg, i, lo, x)
                        } else {
                            lo
                        };
                        self.push(i, root);
                    }
                    _ => {}
                }
                self.last[i] = Some((x, pos));
            }
        }
    }

    fn push(&mut self, i: usize, x: T) {
        if i == 0 {
            if x > T::zero() && x < T::one() - lit(END_GAP) {
                self.zeros.push(x);
            }
        } else if x > T::zero() && x <= T::one() {
            self.crit.push(x);
        }
    }
}

/// Integrates `field` on `[0, 1]` from `(u, v)(0) = y0`.
pub fn integrate_field<T: Real>(field: &FirstOrderField<'_, T>, y0: [T; 2], tol: &Tolerances<T>) -> Result<Trajectory<T>> {
    let p = field.problem().p();
    let opts = OdeOptions {
        h_max: Some(lit(H_MAX)),
        ..OdeOptions::new(tol.ode_rel, tol.ode_abs, tol.max_steps)
    };
    let mut events = EventTracker::new(y0);
    let sol = dopri5(
        |x, y| field.rhs(x, y),
        T::zero(),
        y0,
        T::one(),
        &opts,
        |seg| {
            events.observe(seg);
            let x1 = seg.x1();
            if x1 < T::one() {
                let y = seg.end();
                if y[1].abs() < lit(DEGENERATE_STATE) && field.g(x1, y[0])?.abs() < lit(DEGENERATE_STATE) {
                    return Err(Error::Degenerate {
                        x: x1.as_f64(),
                        what: format!("|v| and |g| both below 1e-12 (u = {:.3e})", y[0].as_f64()),
                    });
                }
            }
            Ok(())
        },
    )?;
    let dense = sol.dense;
    let end = dense.segments()[dense.segments().len() - 1].end();
    let zeros = events
        .zeros
        .iter()
        .map(|&x| Zero {
            x,
            slope: phi_p_inv(p, dense.component(1, x)),
        })
        .collect();
    let critical_points = events
        .crit
        .iter()
        .map(|&x| CriticalPoint {
            x,
            u: dense.component(0, x),
        })
        .collect();
    let route = match field.mode() {
        Mode::HalfEigen { .. } => Route::HalfEigen,
        Mode::Shooting => Route::Direct,
        Mode::Rescaled { .. } => Route::Rescaled,
    };
    Ok(Trajectory {
        p,
        dense,
        zeros,
        critical_points,
        u_end: end[0],
        v_end: end[1],
        lambda: match field.mode() {
            Mode::HalfEigen { lambda } => lambda,
            _ => T::zero(),
        },
        sup_u: events.sup[0],
        sup_du: phi_p_inv(p, events.sup[1]),
        error_estimate: sol.error_estimate[0],
        zero_simple_tol: tol.zero_simple_tol,
        stats: sol.stats,
        flags: TrajectoryFlags {
            route,
            uniqueness_asserted: true,
            gronwall_ok: None,
        },
    })
}

/// `Psi_{lambda,nu}`: `u(0) = 0`, `u'(0) = nu`.
pub fn solve_half_eig_ivp<T: Real>(
    problem: &NormalizedProblem<T>,
    lambda: T,
    nu: Sign,
    tol: &Tolerances<T>,
) -> Result<Trajectory<T>> {
    tol.validate()?;
    let field = FirstOrderField::new(problem, Mode::HalfEigen { lambda });
    integrate_field(&field, [T::zero(), nu.value()], tol)
}

/// Rescaled problem `psi~_nu(ttau)` with `u(0) = 0`, `u'(0) = nu`.
pub fn solve_rescaled_ivp<T: Real>(
    problem: &NormalizedProblem<T>,
    ttau: T,
    nu: Sign,
    tol: &Tolerances<T>,
) -> Result<Trajectory<T>> {
    tol.validate()?;
    let field = FirstOrderField::new(problem, Mode::Rescaled { ttau });
    let mut traj = integrate_field(&field, [T::zero(), nu.value()], tol)?;
    let q = T::one() / (problem.p() - T::one());
    let bound = tol.gronwall_c * (T::one() + ttau.abs().powf(q));
    traj.flags.uniqueness_asserted = ttau.abs() < tol.delta_ttau;
    traj.flags.gronwall_ok = Some(traj.sup_norm() <= bound);
    Ok(traj)
}

/// `psi(tau)`: `u(0) = 0`, `u'(0) = |tau|^(1/(p-1)) sgn tau`, routed automatically.
pub fn solve_shooting_ivp<T: Real>(problem: &NormalizedProblem<T>, tau: T, tol: &Tolerances<T>) -> Result<Trajectory<T>> {
    solve_shooting_ivp_with(problem, tau, tol, ShootRoute::Auto)
}

const ZERO_CHECK_GRID: usize = 65;

pub fn solve_shooting_ivp_with<T: Real>(
    problem: &NormalizedProblem<T>,
    tau: T,
    tol: &Tolerances<T>,
    route: ShootRoute,
) -> Result<Trajectory<T>> {
    tol.validate()?;
    if !tau.is_finite() {
        return Err(Error::Precondition(format!("tau must be finite, got {tau}")));
    }
    let p = problem.p();
    if tau == T::zero() {
        if route == ShootRoute::Rescaled {
            return Err(Error::Precondition("the rescaled route needs tau != 0".into()));
        }
        if forcing_vanishes_at_zero(problem)? {
            return Ok(zero_trajectory(p, tol));
        }
    }
    let rescaled = match route {
        ShootRoute::Auto => tau.abs() >= T::one() / tol.delta_ttau,
        ShootRoute::Direct => false,
        ShootRoute::Rescaled => true,
    };
    if rescaled {
        let nu = Sign::of(tau).expect("tau is nonzero");
        let base = solve_rescaled_ivp(problem, T::one() / tau.abs(), nu, tol)?;
        let mut traj = base.scaled(tau.abs().powf(T::one() / (p - T::one())));
        traj.flags.route = Route::Rescaled;
        Ok(traj)
    } else {
        let field = FirstOrderField::new(problem, Mode::Shooting);
        integrate_field(&field, [T::zero(), tau], tol)
    }
}

fn forcing_vanishes_at_zero<T: Real>(problem: &NormalizedProblem<T>) -> Result<bool> {
    if problem.f_is_zero() {
        return Ok(true);
    }
    for i in 0..ZERO_CHECK_GRID {
        let x = count::<T>(i) / count::<T>(ZERO_CHECK_GRID - 1);
        if problem.f_at(x, T::zero())? != T::zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn zero_trajectory<T: Real>(p: T, tol: &Tolerances<T>) -> Trajectory<T> {
    Trajectory {
        p,
        dense: DenseSolution::new(vec![DenseSegment::constant(T::zero(), T::one(), [T::zero(); 2])]),
        zeros: Vec::new(),
        critical_points: Vec::new(),
        u_end: T::zero(),
        v_end: T::zero(),
        lambda: T::zero(),
        sup_u: T::zero(),
        sup_du: T::zero(),
        error_estimate: T::zero(),
        zero_simple_tol: tol.zero_simple_tol,
        stats: OdeStats::default(),
        flags: TrajectoryFlags {
            route: Route::Trivial,
            uniqueness_asserted: false,
            gronwall_ok: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{normalize, ProblemSpec};
    use std::f64::consts::PI;

    fn pi_p(p: f64) -> f64 {
        2.0 * PI / (p * (PI / p).sin())
    }

    fn np(p: f64, a: &str, f: &str) -> NormalizedProblem<f64> {
        let rho = if p <= 2.0 { 0.9 } else { 0.0 };
        normalize(&ProblemSpec::builder(p).a(a).f(f).rho(rho).build().unwrap())
    }

    #[test]
    fn sine_eigenfunction() {
        let tol = Tolerances::default();
        let t = solve_half_eig_ivp(&np(2.0, "0", "0"), PI * PI, Sign::Plus, &tol).unwrap();
        assert!(t.u_end.abs() < 1e-9);
        assert_eq!(count_zeros(&t).unwrap(), 0);
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((t.u(x) - (PI * x).sin() / PI).abs() < 1e-9);
        }
        assert_eq!(t.critical_points.len(), 1);
        assert!((t.critical_points[0].x - 0.5).abs() < 1e-9);
    }

    #[test]
    fn straight_line() {
        let t = solve_half_eig_ivp(&np(2.0, "0", "0"), 0.0, Sign::Minus, &Tolerances::default()).unwrap();
        assert!((t.u_end + 1.0).abs() <= 4.0 * f64::EPSILON);
        assert_eq!(count_zeros(&t).unwrap(), 0);
    }

    #[test]
    fn first_eigenvalue_p3() {
        let lam = 2.0 * pi_p(3.0).powi(3);
        let t = solve_half_eig_ivp(&np(3.0, "0", "0"), lam, Sign::Plus, &Tolerances::default()).unwrap();
        assert!(t.u_end.abs() < 1e-7, "{}", t.u_end);
        assert_eq!(count_zeros(&t).unwrap(), 0);
    }

    #[test]
    fn dirichlet_zero_counts() {
        let tol = Tolerances::default();
        let prob = np(2.0, "0", "0");
        for k in 0..=5 {
            let lam = ((k + 1) as f64 * PI).powi(2);
            let t = solve_half_eig_ivp(&prob, lam, Sign::Plus, &tol).unwrap();
            assert_eq!(count_zeros(&t).unwrap(), k);
            for (j, z) in t.zeros.iter().enumerate() {
                assert!((z.x - (j + 1) as f64 / (k + 1) as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rescaled_at_zero_matches_half_eig() {
        let tol = Tolerances::default();
        let prob = np(2.0, "pi^2", "atan(xi)");
        let a = solve_rescaled_ivp(&prob, 0.0, Sign::Plus, &tol).unwrap();
        let b = solve_half_eig_ivp(&prob, 0.0, Sign::Plus, &tol).unwrap();
        assert_eq!(a.u_end, b.u_end);
        assert_eq!(a.v_end, b.v_end);
        assert!(a.flags.uniqueness_asserted);
        assert_eq!(a.flags.gronwall_ok, Some(true));
    }

    #[test]
    fn rescaled_continuity_in_ttau() {
        let tol = Tolerances::default();
        let prob = np(2.0, "pi^2", "2/pi*atan(xi)");
        let base = solve_half_eig_ivp(&prob, 0.0, Sign::Plus, &tol).unwrap().u_end;
        let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&t| (solve_rescaled_ivp(&prob, t, Sign::Plus, &tol).unwrap().u_end - base).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn linear_shooting_closed_form() {
        let t = solve_shooting_ivp(&np(2.0, "pi^2", "0"), 2.0, &Tolerances::default()).unwrap();
        assert!(t.u_end.abs() < 1e-9);
        assert!((t.u(0.5) - 2.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn zero_tau_routes() {
        let tol = Tolerances::default();
        let t = solve_shooting_ivp(&np(2.0, "pi^2", "atan(xi)"), 0.0, &tol).unwrap();
        assert_eq!(t.flags.route, Route::Trivial);
        assert_eq!(t.u(0.3), 0.0);
        let t = solve_shooting_ivp(&np(2.0, "pi^2", "sin(2*pi*x)"), 0.0, &tol).unwrap();
        assert_eq!(t.flags.route, Route::Direct);
        assert!(t.sup_u > 0.0);
    }

    #[test]
    fn route_selection_and_agreement() {
        let tol = Tolerances::default();
        for p in [1.5, 2.0, 3.0] {
            let prob = np(p, "3+sin(pi*x)", "atan(xi)+cos(x)");
            for tau in [-10.0, 10.0] {
                let auto = solve_shooting_ivp(&prob, tau, &tol).unwrap();
                assert_eq!(auto.flags.route, Route::Rescaled);
                let direct = solve_shooting_ivp_with(&prob, tau, &tol, ShootRoute::Direct).unwrap();
                let rel = (auto.u_end - direct.u_end).abs() / direct.u_end.abs().max(1e-300);
                assert!(rel < 1e-7, "p = {p}, tau = {tau}: {rel:e}");
            }
        }
    }

    #[test]
    fn degenerate_zero_is_reported() {
        let mut t = solve_half_eig_ivp(&np(2.0, "0", "0"), 4.0 * PI * PI, Sign::Plus, &Tolerances::default()).unwrap();
        t.zeros[0].slope = 1e-10;
        assert!(matches!(count_zeros(&t), Err(Error::DegenerateZero { .. })));
    }

    #[test]
    fn scaled_trajectory() {
        let tol = Tolerances::default();
        let t = solve_half_eig_ivp(&np(3.0, "1", "0"), 5.0, Sign::Plus, &tol).unwrap();
        let s = t.scaled(2.0);
        assert!((s.u(0.4) - 2.0 * t.u(0.4)).abs() < 1e-15);
        assert!((s.v(0.4) - 4.0 * t.v(0.4)).abs() < 1e-14);
    }
}
