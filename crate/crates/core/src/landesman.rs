//! Landesman-Lazer integrals and the solvability verdict at resonance.

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr};
use crate::ivp::{solve_half_eig_ivp, Trajectory};
use crate::problem::{ProblemSpec, Sign, Tolerances};
use crate::quad::integrate_pieces;
use crate::real::{lit, Real};
use crate::spectrum::{check_c_lambda, classify_lambda, CLambdaReport, Classification, SpectrumSlice};
use serde::Serialize;

/// `int_0^1 (f+ u^+ - f- u^-)` with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LLIntegral<T> {
    pub value: T,
    pub error: T,
}

/// Quadrature of `f+(x) u^+(x) - f-(x) u^-(x)`, split at the zeros of `u`.
pub fn ll_integral<T: Real>(f_plus: &Expr, f_minus: &Expr, eigenfunction: &Trajectory<T>, tol: &Tolerances<T>) -> Result<LLIntegral<T>> {
    let (fp, fm) = (f_plus.simplify(), f_minus.simplify());
    let integrand = |x: T| -> Result<T> {
        let u = eigenfunction.u(x);
        Ok(if u > T::zero() {
            fp.eval(&Bindings::x(x))? * u
        } else if u < T::zero() {
            fm.eval(&Bindings::x(x))? * u
        } else {
            T::zero()
        })
    };
    let q = integrate_pieces(integrand, &eigenfunction.breakpoints(), tol.quad_tol)?;
    Ok(LLIntegral {
        value: q.value,
        error: q.error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LLCase {
    /// `lambda_{k,min} = lambda_{k,max}`.
    A,
    /// `lambda = lambda_{k,min} < lambda_{k,max}`.
    B1,
    /// `lambda = lambda_{k,max} > lambda_{k,min}`.
    B2,
    #[serde(rename = "not_resonant")]
    NotResonant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SolvableByTheorem,
    ConditionFails,
    Inconclusive,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LLReport<T> {
    pub case: LLCase,
    pub k: Option<usize>,
    pub classification: Classification<T>,
    /// Integral against `u_{k,min}`.
    pub i_min: Option<T>,
    /// Integral against `u_{k,max}`.
    pub i_max: Option<T>,
    /// `i_min * i_max` in case A.
    pub product: Option<T>,
    pub verdict: Verdict,
    pub quadrature_error: T,
    /// Margin a sign must clear to count.
    pub threshold: T,
    pub c_lambda: Option<CLambdaReport<T>>,
    pub tolerances: Tolerances<T>,
}

const SUP_GRID: usize = 65;

fn decide<T: Real>(value: T, threshold: T, want_negative: bool) -> Verdict {
    let signed = if want_negative { -value } else { value };
    if signed > threshold {
        Verdict::SolvableByTheorem
    } else if signed < -threshold {
        Verdict::ConditionFails
    } else {
        Verdict::Inconclusive
    }
}

/// Classifies `spec.lambda` against `slice` and evaluates the matching
/// condition.
///
/// `slice` may be computed on any normalization of the coefficients of
/// `spec`; `lambda` is compared in the frame of `spec`.
pub fn ll_verdict<T: Real>(spec: &ProblemSpec<T>, slice: &SpectrumSlice<T>, tol: &Tolerances<T>) -> Result<LLReport<T>> {
    tol.validate()?;
    let classification = classify_lambda(slice, spec.lambda)?;
    let mut report = LLReport {
        case: LLCase::NotResonant,
        k: None,
        classification: classification.clone(),
        i_min: None,
        i_max: None,
        product: None,
        verdict: Verdict::NotApplicable,
        quadrature_error: T::zero(),
        threshold: T::zero(),
        c_lambda: None,
        tolerances: *tol,
    };
    let (k, signs, tie) = match classification {
        Classification::Resonant { k, signs, tie } => (k, signs, tie),
        _ => return Ok(report),
    };
    report.k = Some(k);

    let problem = slice.problem();
    let mu = spec.lambda - slice.shift;
    let f_sup = problem.f_limit_sup(SUP_GRID)?;
    let allowance = lit::<T>(10.0) * tol.eig_tol * f_sup;
    let integral = |pair_nu: Sign| -> Result<LLIntegral<T>> {
        let pair = slice
            .pair(k, pair_nu)
            .ok_or_else(|| Error::Precondition(format!("slice lacks the pair ({k}, {pair_nu})")))?;
        ll_integral(&spec.f_plus, &spec.f_minus, &pair.eigenfunction, tol)
    };

    let (case, verdict) = if tie {
        let lo = integral(slice.min_pair(k)?.nu)?;
        let hi = integral(slice.max_pair(k)?.nu)?;
        let thr = lo.error.max(hi.error) + allowance;
        report.quadrature_error = lo.error + hi.error;
        report.i_min = Some(lo.value);
        report.i_max = Some(hi.value);
        let product = lo.value * hi.value;
        report.product = Some(product);
        let pthr = thr * (lo.value.abs() + hi.value.abs()) + thr * thr;
        report.threshold = pthr;
        let verdict = if product == T::zero() { Verdict::Inconclusive } else { decide(product, pthr, false) };
        (LLCase::A, verdict)
    } else {
        let lo = slice.min_pair(k)?;
        let at_min = signs.contains(&lo.nu);
        let q = integral(if at_min { lo.nu } else { slice.max_pair(k)?.nu })?;
        let thr = q.error + allowance;
        report.quadrature_error = q.error;
        report.threshold = thr;
        if at_min {
            report.i_min = Some(q.value);
            (LLCase::B1, decide(q.value, thr, true))
        } else {
            report.i_max = Some(q.value);
            (LLCase::B2, decide(q.value, thr, false))
        }
    };
    report.case = case;
    report.verdict = verdict;

    if problem.p() > lit(2.0) {
        let plus = solve_half_eig_ivp(problem, mu, Sign::Plus, tol)?;
        let minus = solve_half_eig_ivp(problem, mu, Sign::Minus, tol)?;
        let c = check_c_lambda(problem, &plus, &minus, tol)?;
        if !c.satisfied {
            report.verdict = Verdict::Inconclusive;
        }
        report.c_lambda = Some(c);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::problem::normalize;
    use crate::spectrum::{compute_slice, find_half_eigenvalue};
    use std::f64::consts::PI;

    fn slice_for(spec: &ProblemSpec<f64>) -> SpectrumSlice<f64> {
        compute_slice(&normalize(spec), 1, &Tolerances::default()).unwrap()
    }

    #[test]
    fn integrals_against_first_eigenfunctions() {
        let tol = Tolerances::default();
        let spec = ProblemSpec::builder(2.0).a("pi^2").build().unwrap();
        let np = normalize(&spec);
        let (one, m_one, zero) = (parse("1").unwrap(), parse("-1").unwrap(), parse("0").unwrap());
        for nu in Sign::BOTH {
            let pair = find_half_eigenvalue(&np, 0, nu, &tol).unwrap();
            let i = ll_integral(&one, &m_one, &pair.eigenfunction, &tol).unwrap();
            assert!((i.value - 2.0 / (PI * PI)).abs() < 1e-9, "{nu}: {}", i.value);
            assert!(i.error < 1e-10);
            let z = ll_integral(&zero, &zero, &pair.eigenfunction, &tol).unwrap();
            assert_eq!(z.value, 0.0);
        }
    }

    #[test]
    fn case_a_verdicts() {
        let tol = Tolerances::default();
        let spec = ProblemSpec::builder(2.0)
            .a("pi^2")
            .f("2/pi*atan(xi)")
            .f_limits("1", "-1")
            .build()
            .unwrap();
        let r = ll_verdict(&spec, &slice_for(&spec), &tol).unwrap();
        assert_eq!(r.case, LLCase::A);
        assert_eq!(r.verdict, Verdict::SolvableByTheorem);
        let expect = (2.0 / (PI * PI)).powi(2);
        assert!((r.product.unwrap() - expect).abs() < 1e-9);

        let spec = ProblemSpec::builder(2.0)
            .a("pi^2")
            .f("2/pi*atan(xi)+2")
            .f_limits("3", "1")
            .build()
            .unwrap();
        let r = ll_verdict(&spec, &slice_for(&spec), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::ConditionFails);
        assert!(r.product.unwrap() < 0.0);

        let spec = ProblemSpec::builder(2.0).a("pi^2").build().unwrap();
        let r = ll_verdict(&spec, &slice_for(&spec), &tol).unwrap();
        assert_eq!(r.product, Some(0.0));
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn case_b1_and_sign_flip() {
        let tol = Tolerances::default();
        let lam = PI * PI - 1.0;
        let build = |f: &str, fp: &str, fm: &str| {
            ProblemSpec::builder(2.0)
                .a_plus("1")
                .a_minus("0")
                .lambda(lam)
                .f(f)
                .f_limits(fp, fm)
                .build()
                .unwrap()
        };
        let spec = build("-1", "-1", "-1");
        let r = ll_verdict(&spec, &slice_for(&spec), &tol).unwrap();
        assert_eq!(r.case, LLCase::B1);
        assert_eq!(r.verdict, Verdict::SolvableByTheorem);
        let i = r.i_min.unwrap();
        assert!((i + 2.0 / (PI * PI)).abs() < 1e-9);

        let spec = build("1", "1", "1");
        let r = ll_verdict(&spec, &slice_for(&spec), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::ConditionFails);
        assert!((r.i_min.unwrap() + i).abs() < 1e-12);
    }

    #[test]
    fn off_spectrum_is_not_applicable() {
        let spec = ProblemSpec::builder(2.0).a("pi^2").lambda(-3.0).f("1").f_limits("1", "1").build().unwrap();
        let r = ll_verdict(&spec, &slice_for(&spec), &Tolerances::default()).unwrap();
        assert_eq!(r.case, LLCase::NotResonant);
        assert_eq!(r.verdict, Verdict::NotApplicable);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["case"], "not_resonant");
        assert!(json["tolerances"]["eig_tol"].is_number());
    }
}
