//! Problem data and the scalar p-Laplacian primitives.

use crate::error::{Error, Result};
use crate::expr::{diff_xi, parse, BinOp, Bindings, Expr, ExprError, Var};
use crate::real::{count, lit, Real};
use serde::{Deserialize, Serialize};

/// `phi_p(s) = |s|^(p-1) sgn s`, with `phi_p(0) = 0`.
#[inline]
pub fn phi_p<T: Real>(p: T, s: T) -> T {
    if s == T::zero() {
        T::zero()
    } else if p == lit(2.0) {
        s
    } else {
        s.abs().powf(p - T::one()).copysign(s)
    }
}

/// Inverse of [`phi_p`], i.e. `phi_{p'}` with `p' = p/(p-1)`.
#[inline]
pub fn phi_p_inv<T: Real>(p: T, s: T) -> T {
    if s == T::zero() {
        T::zero()
    } else if p == lit(2.0) {
        s
    } else {
        s.abs().powf(T::one() / (p - T::one())).copysign(s)
    }
}

/// Initial slope sign of a shooting trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Sign of a nonzero value; `None` for zero or NaN.
    pub fn of<T: Real>(v: T) -> Option<Sign> {
        if v > T::zero() {
            Some(Sign::Plus)
        } else if v < T::zero() {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "+" | "plus" | "+1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(format!("invalid sign `{other}` (expected + or -)")),
        }
    }
}

/// Numerical thresholds used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances<T> {
    /// Accepted endpoint residual `|Psi(1)|` for a half-eigenvalue.
    pub eig_tol: T,
    /// Relative width at which the eigenvalue bisection stops.
    pub eig_width: T,
    pub ode_rel: T,
    pub ode_abs: T,
    pub max_steps: usize,
    /// Zeros with `|u'|` below this are reported as degenerate.
    pub zero_simple_tol: T,
    pub quad_tol: T,
    /// Endpoint residual accepted by the shooting solver.
    pub bvp_tol: T,
    /// Integrated-form defect accepted for a shooting solution.
    pub defect_tol: T,
    pub c_lambda_tol: T,
    /// Uniqueness window for the rescaled problem; `|tau| >= 1/delta_ttau`
    /// is integrated through the rescaled route.
    pub delta_ttau: T,
    pub gronwall_c: T,
    pub lambda_scan_max: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            eig_tol: lit(1e-9),
            eig_width: lit(1e-11),
            ode_rel: lit(1e-10),
            ode_abs: lit(1e-12),
            max_steps: 1_000_000,
            zero_simple_tol: lit(1e-8),
            quad_tol: lit(1e-10),
            bvp_tol: lit(1e-8),
            defect_tol: lit(1e-6),
            c_lambda_tol: lit(1e-6),
            delta_ttau: lit(0.1),
            gronwall_c: lit(100.0),
            lambda_scan_max: lit(1e8),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("eig_tol", self.eig_tol),
            ("eig_width", self.eig_width),
            ("ode_rel", self.ode_rel),
            ("ode_abs", self.ode_abs),
            ("zero_simple_tol", self.zero_simple_tol),
            ("quad_tol", self.quad_tol),
            ("bvp_tol", self.bvp_tol),
            ("defect_tol", self.defect_tol),
            ("c_lambda_tol", self.c_lambda_tol),
            ("delta_ttau", self.delta_ttau),
            ("gronwall_c", self.gronwall_c),
            ("lambda_scan_max", self.lambda_scan_max),
        ];
        for (name, v) in named {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidTolerances(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidTolerances("max_steps must be positive".into()));
        }
        Ok(())
    }

    /// Same thresholds with the integrator tolerances scaled by `factor`.
    pub fn with_ode_scaled(&self, factor: T) -> Self {
        Tolerances {
            ode_rel: self.ode_rel * factor,
            ode_abs: self.ode_abs * factor,
            ..*self
        }
    }
}

/// Full input of the Dirichlet problem
/// `-(phi_p(u'))' - a+ phi_p(u+) + a- phi_p(u-) - lambda phi_p(u) = f(x, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T> {
    pub p: T,
    pub a_plus: Expr,
    pub a_minus: Expr,
    pub lambda: T,
    pub f: Expr,
    pub f_plus: Expr,
    pub f_minus: Expr,
    pub rho: T,
    pub k0: T,
    pub k1: T,
}

/// Builder accepting expression sources; `build` parses and validates.
#[derive(Debug, Clone)]
pub struct ProblemBuilder<T> {
    p: T,
    a_plus: String,
    a_minus: String,
    lambda: T,
    f: String,
    f_plus: String,
    f_minus: String,
    rho: Option<T>,
    k0: T,
    k1: T,
}

impl<T: Real> ProblemBuilder<T> {
    pub fn a_plus(mut self, src: &str) -> Self {
        self.a_plus = src.into();
        self
    }
    pub fn a_minus(mut self, src: &str) -> Self {
        self.a_minus = src.into();
        self
    }
    /// Sets both coefficients to the same expression.
    pub fn a(self, src: &str) -> Self {
        self.a_plus(src).a_minus(src)
    }
    pub fn lambda(mut self, lambda: T) -> Self {
        self.lambda = lambda;
        self
    }
    pub fn f(mut self, src: &str) -> Self {
        self.f = src.into();
        self
    }
    pub fn f_limits(mut self, plus: &str, minus: &str) -> Self {
        self.f_plus = plus.into();
        self.f_minus = minus.into();
        self
    }
    pub fn rho(mut self, rho: T) -> Self {
        self.rho = Some(rho);
        self
    }
    pub fn bounds(mut self, k0: T, k1: T) -> Self {
        self.k0 = k0;
        self.k1 = k1;
        self
    }

    pub fn build(self) -> Result<ProblemSpec<T>> {
        let rho = self.rho.unwrap_or_else(|| default_rho(self.p));
        ProblemSpec::new(
            self.p,
            parse(&self.a_plus)?,
            parse(&self.a_minus)?,
            self.lambda,
            parse(&self.f)?,
            parse(&self.f_plus)?,
            parse(&self.f_minus)?,
            rho,
            self.k0,
            self.k1,
        )
    }
}

/// Midpoint of the admissible range for `rho` given `p`.
pub fn default_rho<T: Real>(p: T) -> T {
    let two = lit::<T>(2.0);
    if p <= two {
        (two - p + T::one()) / two
    } else {
        T::zero()
    }
}

const COEFF_GRID: usize = 65;

impl<T: Real> ProblemSpec<T> {
    pub fn builder(p: T) -> ProblemBuilder<T> {
        ProblemBuilder {
            p,
            a_plus: "0".into(),
            a_minus: "0".into(),
            lambda: T::zero(),
            f: "0".into(),
            f_plus: "0".into(),
            f_minus: "0".into(),
            rho: None,
            k0: lit(100.0),
            k1: lit(100.0),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: T,
        a_plus: Expr,
        a_minus: Expr,
        lambda: T,
        f: Expr,
        f_plus: Expr,
        f_minus: Expr,
        rho: T,
        k0: T,
        k1: T,
    ) -> Result<Self> {
        let spec = ProblemSpec {
            p,
            a_plus,
            a_minus,
            lambda,
            f,
            f_plus,
            f_minus,
            rho,
            k0,
            k1,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProblem(m));
        if !(self.p > T::one()) || !self.p.is_finite() {
            return bad(format!("p must exceed 1, got {}", self.p));
        }
        if !self.lambda.is_finite() {
            return bad("lambda must be finite".into());
        }
        if !(self.rho >= T::zero() && self.rho < T::one()) {
            return bad(format!("rho must lie in [0, 1), got {}", self.rho));
        }
        if self.p <= lit(2.0) && !(self.rho > lit::<T>(2.0) - self.p) {
            return bad(format!("rho must exceed 2 - p = {} when p <= 2, got {}", lit::<T>(2.0) - self.p, self.rho));
        }
        if !(self.k0 > T::zero() && self.k1 > T::zero()) {
            return bad("K0 and K1 must be positive".into());
        }
        for (name, e) in [
            ("a_plus", &self.a_plus),
            ("a_minus", &self.a_minus),
            ("f_plus", &self.f_plus),
            ("f_minus", &self.f_minus),
        ] {
            if e.uses(Var::Xi) {
                return bad(format!("{name} may depend on x only"));
            }
            for i in 0..COEFF_GRID {
                let x = count::<T>(i) / count::<T>(COEFF_GRID - 1);
                e.eval(&Bindings::x(x))
                    .map_err(|err| Error::InvalidProblem(format!("{name} at x = {x}: {err}")))?;
            }
        }
        Ok(())
    }

    pub fn with_lambda(&self, lambda: T) -> Self {
        ProblemSpec {
            lambda,
            ..self.clone()
        }
    }

    /// True when `f` folds to the literal zero.
    pub fn f_is_zero(&self) -> bool {
        self.f.simplify().as_num() == Some(0.0)
    }
}

/// Coefficient in `x`, with constants pre-evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum Coef<T> {
    Const(T),
    Expr(Expr),
}

impl<T: Real> Coef<T> {
    pub fn compile(e: &Expr) -> Self {
        let e = e.simplify();
        match e.as_num() {
            Some(v) => Coef::Const(lit(v)),
            None if e.is_constant() => match e.eval::<T>(&Bindings::none()) {
                Ok(v) => Coef::Const(v),
                Err(_) => Coef::Expr(e),
            },
            None => Coef::Expr(e),
        }
    }

    #[inline]
    pub fn at(&self, x: T) -> std::result::Result<T, ExprError> {
        match self {
            Coef::Const(c) => Ok(*c),
            Coef::Expr(e) => e.eval(&Bindings::x(x)),
        }
    }

    pub fn constant(&self) -> Option<T> {
        match self {
            Coef::Const(c) => Some(*c),
            Coef::Expr(_) => None,
        }
    }
}

/// Problem with `lambda` absorbed into the coefficients (`lambda = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedProblem<T> {
    spec: ProblemSpec<T>,
    shift: T,
    pub(crate) a_plus: Coef<T>,
    pub(crate) a_minus: Coef<T>,
    pub(crate) f_plus: Coef<T>,
    pub(crate) f_minus: Coef<T>,
    f_zero: bool,
}

/// Replaces `a±` by `a± + lambda` and sets `lambda = 0`.
pub fn normalize<T: Real>(spec: &ProblemSpec<T>) -> NormalizedProblem<T> {
    let shift = spec.lambda;
    let shifted = |a: &Expr| {
        if shift == T::zero() {
            a.clone()
        } else {
            Expr::bin(BinOp::Add, a.clone(), Expr::Num(shift.as_f64())).simplify()
        }
    };
    let spec = ProblemSpec {
        a_plus: shifted(&spec.a_plus),
        a_minus: shifted(&spec.a_minus),
        lambda: T::zero(),
        ..spec.clone()
    };
    NormalizedProblem {
        a_plus: Coef::compile(&spec.a_plus),
        a_minus: Coef::compile(&spec.a_minus),
        f_plus: Coef::compile(&spec.f_plus),
        f_minus: Coef::compile(&spec.f_minus),
        f_zero: spec.f_is_zero(),
        spec,
        shift,
    }
}

impl<T: Real> NormalizedProblem<T> {
    /// Constant coefficients `a± = alpha±` with `f = 0`, the Fucik setting.
    pub fn constant(p: T, alpha_plus: T, alpha_minus: T) -> Result<Self> {
        let spec = ProblemSpec::new(
            p,
            Expr::Num(alpha_plus.as_f64()),
            Expr::Num(alpha_minus.as_f64()),
            T::zero(),
            Expr::Num(0.0),
            Expr::Num(0.0),
            Expr::Num(0.0),
            default_rho(p),
            lit(1.0),
            lit(1.0),
        )?;
        let mut np = normalize(&spec);
        // keep full precision for generic scalars
        np.a_plus = Coef::Const(alpha_plus);
        np.a_minus = Coef::Const(alpha_minus);
        Ok(np)
    }

    pub fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    pub fn p(&self) -> T {
        self.spec.p
    }

    /// The `lambda` that was absorbed into the coefficients.
    pub fn shift(&self) -> T {
        self.shift
    }

    pub fn f_is_zero(&self) -> bool {
        self.f_zero
    }

    #[inline]
    pub fn a_plus_at(&self, x: T) -> std::result::Result<T, ExprError> {
        self.a_plus.at(x)
    }

    #[inline]
    pub fn a_minus_at(&self, x: T) -> std::result::Result<T, ExprError> {
        self.a_minus.at(x)
    }

    #[inline]
    pub fn f_at(&self, x: T, xi: T) -> std::result::Result<T, ExprError> {
        if self.f_zero {
            return Ok(T::zero());
        }
        self.spec.f.eval(&Bindings::x_xi(x, xi))
    }

    #[inline]
    pub fn f_limit_at(&self, sign: Sign, x: T) -> std::result::Result<T, ExprError> {
        match sign {
            Sign::Plus => self.f_plus.at(x),
            Sign::Minus => self.f_minus.at(x),
        }
    }

    /// Coefficient seen by a solution of sign `sign` at `x`.
    #[inline]
    pub fn coefficient(&self, sign: Sign, x: T) -> std::result::Result<T, ExprError> {
        match sign {
            Sign::Plus => self.a_plus.at(x),
            Sign::Minus => self.a_minus.at(x),
        }
    }

    /// Sup of `|a+|` and `|a-|` over a uniform grid.
    pub fn coefficient_sup(&self, grid_n: usize) -> Result<T> {
        let mut m = T::zero();
        for i in 0..grid_n {
            let x = count::<T>(i) / count::<T>(grid_n - 1);
            m = m.max(self.a_plus_at(x)?.abs()).max(self.a_minus_at(x)?.abs());
        }
        Ok(m)
    }

    /// Sup of `|f+|` and `|f-|` over a uniform grid.
    pub fn f_limit_sup(&self, grid_n: usize) -> Result<T> {
        let mut m = T::zero();
        for i in 0..grid_n {
            let x = count::<T>(i) / count::<T>(grid_n - 1);
            m = m
                .max(self.f_limit_at(Sign::Plus, x)?.abs())
                .max(self.f_limit_at(Sign::Minus, x)?.abs());
        }
        Ok(m)
    }
}

/// Outcome of sampling the hypotheses on `f`. Advisory only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport<T> {
    /// `(Xi, max_x |f(x, Xi) - f+(x)|, max_x |f(x, -Xi) - f-(x)|)`.
    pub limit_deviation: Vec<(T, T, T)>,
    /// Largest sampled `|f|`, to compare with the declared `K0`.
    pub f_sup: T,
    /// Largest sampled `|xi|^rho |f_xi|`, to compare with the declared `K1`.
    pub f_xi_weighted_sup: T,
    pub limits_ok: bool,
    pub k0_ok: bool,
    pub k1_ok: bool,
    pub warnings: Vec<String>,
}

impl<T: Real> ValidationReport<T> {
    pub fn passed(&self) -> bool {
        self.limits_ok && self.k0_ok && self.k1_ok
    }
}

/// Deviation at the largest sample point accepted as "converged".
const LIMIT_TOL: f64 = 1e-3;

/// Samples the limit hypothesis and the derivative bound on an x-grid.
pub fn validate_hypotheses<T: Real>(spec: &ProblemSpec<T>, grid_n: usize) -> Result<ValidationReport<T>> {
    if grid_n < 8 {
        return Err(Error::Precondition(format!("grid_n must be at least 8, got {grid_n}")));
    }
    let xs: Vec<T> = (0..grid_n).map(|i| count::<T>(i) / count::<T>(grid_n - 1)).collect();
    let f_at = |x: T, xi: T| spec.f.eval(&Bindings::x_xi(x, xi));
    let mut warnings = Vec::new();

    let mut limit_deviation = Vec::new();
    for big in [1e2, 1e4, 1e6].map(lit::<T>) {
        let (mut dp, mut dm) = (T::zero(), T::zero());
        for &x in &xs {
            dp = dp.max((f_at(x, big)? - spec.f_plus.eval(&Bindings::x(x))?).abs());
            dm = dm.max((f_at(x, -big)? - spec.f_minus.eval(&Bindings::x(x))?).abs());
        }
        limit_deviation.push((big, dp, dm));
    }
    let worst = |i: usize| limit_deviation[i].1.max(limit_deviation[i].2);
    let last = worst(limit_deviation.len() - 1);
    let growing = worst(2) > worst(0) && worst(2) > lit(LIMIT_TOL);
    let limits_ok = last <= lit(LIMIT_TOL) && !growing;
    if growing {
        warnings.push(format!(
            "f has no finite limit as |xi| grows: deviation from f± rises from {:.3e} to {:.3e}",
            worst(0),
            last
        ));
    } else if !limits_ok {
        warnings.push(format!("deviation from f± at |xi| = 1e6 is {last:.3e}, above {LIMIT_TOL:e}"));
    }

    let mut xis = vec![T::zero()];
    for k in 0..=6 {
        let m = T::from_i32(10).unwrap().powi(k);
        xis.push(m);
        xis.push(-m);
    }
    let mut f_sup = T::zero();
    for &x in &xs {
        for &xi in &xis {
            f_sup = f_sup.max(f_at(x, xi)?.abs());
        }
    }
    let k0_ok = f_sup <= spec.k0;
    if !k0_ok {
        warnings.push(format!("sampled |f| reaches {f_sup:.3e}, above K0 = {}", spec.k0));
    }

    let mut f_xi_weighted_sup = T::zero();
    let k1_ok;
    match diff_xi(&spec.f) {
        Ok(df) => {
            let mut log_xis = Vec::new();
            for k in -12..=24 {
                let m = lit::<T>(10f64.powf(k as f64 / 4.0));
                log_xis.push(m);
                log_xis.push(-m);
            }
            for &x in &xs {
                for &xi in &log_xis {
                    let d = df.eval(&Bindings::x_xi(x, xi))?;
                    f_xi_weighted_sup = f_xi_weighted_sup.max(xi.abs().powf(spec.rho) * d.abs());
                }
            }
            k1_ok = f_xi_weighted_sup <= spec.k1;
            if !k1_ok {
                warnings.push(format!(
                    "sampled |xi|^rho |f_xi| reaches {f_xi_weighted_sup:.3e}, above K1 = {}",
                    spec.k1
                ));
            }
        }
        Err(e) => {
            k1_ok = false;
            warnings.push(format!("cannot differentiate f in xi: {e}"));
        }
    }

    Ok(ValidationReport {
        limit_deviation,
        f_sup,
        f_xi_weighted_sup,
        limits_ok,
        k0_ok,
        k1_ok,
        warnings,
    })
}
