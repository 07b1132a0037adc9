use crate::config::{Config, FucikParameter};
use crate::output::{Output, SCHEMA};
use crate::CliError;
use halfspec::export::{write_fucik_csv, write_solution_csv, write_spectrum_csv, write_trajectory_csv};
use halfspec::solver::{solve_with_slice, Bracket};
use halfspec::spectrum::SignLemmaReport;
use halfspec::{
    boundary_identity, check_sign_lemma, classify_lambda, compute_slice, ll_verdict, normalize, shoot, small_ttau_sign,
    solve_shooting_ivp, solve_variational, trace_fucik, trace_fucik_alpha_minus, validate_hypotheses, Classification,
    Error, LLCase, LLReport, NormalizedProblem, ProblemSpec, SensitivityResult, Sign, SpectrumSlice, Verdict,
};
use serde::Serialize;
use serde_json::json;

fn header(cfg: &Config, command: &str) -> serde_json::Map<String, serde_json::Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("problem".into(), json!(cfg.problem));
    m.insert("tolerances".into(), json!(cfg.tolerances));
    m
}

fn value<V: Serialize>(v: &V) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

fn setup(cfg: &Config, k: Option<usize>) -> Result<(ProblemSpec, NormalizedProblem, SpectrumSlice), CliError> {
    let spec = cfg.problem.spec()?;
    let np = normalize(&spec);
    let slice = compute_slice(&np, k.unwrap_or(cfg.run.k_max), &cfg.tolerances)?;
    Ok((spec, np, slice))
}

#[derive(Serialize)]
struct PairRow {
    k: usize,
    nu: Sign,
    lambda: f64,
    residual: f64,
    zeros: Vec<f64>,
}

pub fn spectrum(cfg: &Config, k: Option<usize>, out: &Output) -> Result<(), CliError> {
    let (_, _, slice) = setup(cfg, k)?;
    out.say(format!("{:>3} {:>2} {:>24} {:>10}", "k", "nu", "lambda", "residual"));
    let mut rows = Vec::new();
    for pair in &slice.pairs {
        let lambda = pair.lambda + slice.shift;
        out.say(format!("{:>3} {:>2} {:>24.15e} {:>10.2e}", pair.k, pair.nu, lambda, pair.endpoint_residual));
        rows.push(PairRow {
            k: pair.k,
            nu: pair.nu,
            lambda,
            residual: pair.endpoint_residual,
            zeros: pair.eigenfunction.zeros.iter().map(|z| z.x).collect(),
        });
    }

    let mut violations = Vec::new();
    if let Err(e) = slice.check_monotonicity() {
        violations.push(e.to_string());
    }
    let mut lemmas: Vec<SignLemmaReport<f64>> = Vec::new();
    for k in 0..=slice.k_max {
        if slice.is_tie(k)? {
            continue;
        }
        let r = check_sign_lemma(&slice, k)?;
        if !r.holds && !r.inconclusive {
            violations.push(format!("sign test fails at k = {k}: {:e}, {:e}", r.product_min, r.product_max));
        }
        if r.inconclusive {
            out.warn(format!("sign test at k = {k} is inconclusive"));
        }
        lemmas.push(r);
    }

    out.csv("spectrum.csv", |w| write_spectrum_csv(&slice, w))?;
    if cfg.run.trajectory {
        for pair in &slice.pairs {
            let name = format!("eigenfunction_k{}_{}.csv", pair.k, sign_name(pair.nu));
            out.csv(&name, |w| write_trajectory_csv(&pair.eigenfunction, w))?;
        }
    }
    let mut doc = header(cfg, "spectrum");
    doc.insert("shift".into(), json!(slice.shift));
    doc.insert("k_max".into(), json!(slice.k_max));
    doc.insert("pairs".into(), value(&rows));
    doc.insert("sign_test".into(), value(&lemmas));
    doc.insert("violations".into(), json!(violations));
    out.json("spectrum.json", &doc)?;

    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(violations.join("; ")))
    }
}

pub fn fucik(cfg: &Config, k: Option<usize>, branch: Option<Sign>, out: &Output) -> Result<(), CliError> {
    let run = &cfg.run;
    let k = k.unwrap_or(run.fucik_k);
    let branch = branch.unwrap_or(run.fucik_branch);
    let grid = run.fucik_grid();
    let fixed_is_plus = run.fucik_parameter == FucikParameter::AlphaPlus;
    let p = cfg.problem.p;
    let points = if fixed_is_plus {
        trace_fucik(p, k, branch, &grid, &cfg.tolerances)?
    } else {
        trace_fucik_alpha_minus(p, k, branch, &grid, &cfg.tolerances)?
    };

    out.say(format!("{:>24} {:>24}  status", "alpha_plus", "alpha_minus"));
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (&g, pt) in grid.iter().zip(&points) {
        match pt {
            Ok(pt) => {
                out.say(format!("{:>24.15e} {:>24.15e}  ok", pt.alpha_plus, pt.alpha_minus));
                rows.push(json!({"alpha_plus": pt.alpha_plus, "alpha_minus": pt.alpha_minus, "residual": pt.residual, "status": "ok"}));
            }
            Err(e) => {
                let no_bracket = matches!(e, Error::NoBracket(_));
                let status = if no_bracket { "no_bracket" } else { "error" };
                let (ap, am) = if fixed_is_plus { (json!(g), json!(null)) } else { (json!(null), json!(g)) };
                out.say(format!("{:>24} {:>24}  {status}", fmt_opt(&ap), fmt_opt(&am)));
                rows.push(json!({"alpha_plus": ap, "alpha_minus": am, "status": status, "message": e.to_string()}));
                if no_bracket {
                    out.warn(format!("grid point {g:e}: {e}"));
                } else {
                    failures.push(format!("grid point {g:e}: {e}"));
                }
            }
        }
    }

    let tagged: Vec<(f64, bool)> = grid.iter().map(|&g| (g, fixed_is_plus)).collect();
    out.csv("fucik.csv", |w| write_fucik_csv(k, branch, &tagged, &points, w))?;
    let mut doc = header(cfg, "fucik");
    doc.insert("k".into(), json!(k));
    doc.insert("branch".into(), json!(branch));
    doc.insert("parameter".into(), json!(run.fucik_parameter));
    doc.insert("points".into(), json!(rows));
    out.json("fucik.json", &doc)?;

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(failures.join("; ")))
    }
}

fn fmt_opt(v: &serde_json::Value) -> String {
    v.as_f64().map_or_else(|| "-".into(), |x| format!("{x:.15e}"))
}

pub fn check(cfg: &Config, k: Option<usize>, out: &Output) -> Result<(), CliError> {
    let (spec, _, slice) = setup(cfg, k)?;
    let audit = validate_hypotheses(&spec, cfg.run.validate_grid)?;
    let ll = ll_verdict(&spec, &slice, &cfg.tolerances)?;

    out.say(format!(
        "hypotheses: limits {}, K0 {}, K1 {}",
        ok(audit.limits_ok),
        ok(audit.k0_ok),
        ok(audit.k1_ok)
    ));
    for w in &audit.warnings {
        out.warn(w);
    }
    out.say(format!("lambda = {}: {}", spec.lambda, describe(&ll.classification)));
    if let Some(c) = &ll.c_lambda {
        out.say(format!(
            "(C_lambda): {} at {} critical point(s), min coefficient {:?}",
            ok(c.satisfied),
            c.critical_points,
            c.min_coefficient
        ));
    }
    if ll.case != LLCase::NotResonant {
        out.say(format!(
            "case {:?}: I_min = {:?}, I_max = {:?}, product = {:?}, threshold {:.3e}",
            ll.case, ll.i_min, ll.i_max, ll.product, ll.threshold
        ));
    }
    out.say(format!("verdict: {}", verdict_text(ll.verdict)));

    let mut doc = header(cfg, "check");
    doc.insert("hypotheses".into(), value(&audit));
    doc.insert("report".into(), value(&ll));
    out.json("check.json", &doc)?;
    Ok(())
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn describe(c: &Classification) -> String {
    match c {
        Classification::Resonant { k, signs, tie } => {
            let s: Vec<String> = signs.iter().map(|s| s.to_string()).collect();
            format!("resonant with lambda_{{{k},{}}}{}", s.join(","), if *tie { " (tie)" } else { "" })
        }
        Classification::BelowSpectrum { .. } => "below the half-spectrum".into(),
        Classification::BetweenPairs { k, .. } => format!("between pairs {k} and {}", k + 1),
        Classification::InsidePair { k, .. } => format!("inside pair {k}"),
    }
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::SolvableByTheorem => "solvable (Landesman-Lazer condition holds)",
        Verdict::ConditionFails => "condition fails",
        Verdict::Inconclusive => "inconclusive",
        Verdict::NotApplicable => "not applicable (lambda is not a half-eigenvalue)",
    }
}

pub fn solve(cfg: &Config, k: Option<usize>, out: &Output) -> Result<(), CliError> {
    let tol = &cfg.tolerances;
    let (spec, np, slice) = setup(cfg, k)?;
    let mut doc = header(cfg, "solve");
    let result = match cfg.run.bracket {
        Some([lo, hi]) => {
            let value = |t: f64| -> Result<f64, CliError> { Ok(solve_shooting_ivp(&np, t, tol)?.u_end) };
            let bracket = Bracket {
                tau_lo: lo,
                tau_hi: hi,
                value_lo: value(lo)?,
                value_hi: value(hi)?,
                ttau0: None,
            };
            doc.insert("report".into(), value_of_ll(ll_verdict(&spec, &slice, tol).ok()));
            doc.insert("search".into(), json!(null));
            shoot(&np, &bracket, tol)?
        }
        None => {
            let r = solve_with_slice(&spec, &np, &slice, tol)?;
            doc.insert("report".into(), value(&r.ll));
            doc.insert("search".into(), value(&r.search));
            r.result
        }
    };

    if let Some(n) = &result.notice {
        out.warn(n);
    }
    out.say(format!("tau* = {:.15e}", result.tau_star));
    out.say(format!(
        "endpoint residual {:.3e} (bvp_tol {:e}), defect {:.3e} (defect_tol {:e}), {} bisection steps",
        result.endpoint_residual, tol.bvp_tol, result.bvp_residual, tol.defect_tol, result.iterations
    ));
    out.say(format!("accepted: {}", result.accepted));

    out.csv("solution.csv", |w| write_solution_csv(&result.solution, w))?;
    if cfg.run.trajectory {
        out.csv("trajectory.csv", |w| write_trajectory_csv(&result.solution, w))?;
    }
    doc.insert("result".into(), value(&result));
    out.json("solve.json", &doc)?;
    if result.accepted {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "solution not accepted: endpoint residual {:e}, defect {:e}",
            result.endpoint_residual, result.bvp_residual
        )))
    }
}

fn value_of_ll(ll: Option<LLReport>) -> serde_json::Value {
    ll.map_or(json!(null), |r| value(&r))
}

pub fn sensitivity(cfg: &Config, k: Option<usize>, out: &Output) -> Result<(), CliError> {
    let tol = &cfg.tolerances;
    let (spec, np, slice) = setup(cfg, k)?;
    let (k, signs) = match classify_lambda(&slice, spec.lambda)? {
        Classification::Resonant { k, signs, .. } => (k, signs),
        c => {
            return Err(CliError::Numeric(format!(
                "sensitivity needs a resonant lambda; lambda = {} is {}",
                spec.lambda,
                describe(&c)
            )))
        }
    };
    let mut results = Vec::new();
    for nu in signs {
        let pair = slice.pair(k, nu).expect("resonant pair is in the slice");
        let sens = solve_variational(&np, &pair.eigenfunction, nu, tol)?;
        let id = boundary_identity(&np, &pair.eigenfunction, &sens, tol)?;
        out.say(format!(
            "nu = {nu}: d/dttau psi~(1) = {:.12e} (+- {:.1e}); identity lhs {:.12e}, rhs {:.12e}, relative gap {:.2e}",
            sens.psi0_at_1, sens.error_estimate, id.lhs, id.rhs, id.relative
        ));
        out.csv(&format!("sensitivity_{}.csv", sign_name(nu)), |w| write_variational_csv(&sens, w))?;
        results.push(json!({"nu": nu, "sensitivity": value(&sens), "identity": value(&id)}));
    }
    let prediction = small_ttau_sign(&np, &slice, tol)?;
    out.say(format!(
        "predicted signs for small ttau: + -> {:?}, - -> {:?}; largest sampled split {:?}",
        prediction.predicted_plus, prediction.predicted_minus, prediction.largest_split
    ));
    let mut doc = header(cfg, "sensitivity");
    doc.insert("k".into(), json!(k));
    doc.insert("results".into(), json!(results));
    doc.insert("prediction".into(), value(&prediction));
    out.json("sensitivity.json", &doc)?;
    Ok(())
}

fn write_variational_csv<W: std::io::Write>(sens: &SensitivityResult, mut w: W) -> halfspec::Result<()> {
    writeln!(w, "x,z1,z2")?;
    let n = halfspec::export::SOLUTION_NODES;
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        let [z1, z2, _] = sens.z(x);
        writeln!(w, "{x:e},{z1:e},{z2:e}")?;
    }
    Ok(())
}
