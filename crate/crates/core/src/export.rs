//! CSV writers. Header row, `.` decimals, `\n` line ends, values in `{:e}`
//! form so they round-trip exactly.

use crate::error::{Error, Result};
use crate::ivp::Trajectory;
use crate::problem::Sign;
use crate::real::Real;
use crate::spectrum::{FucikPoint, SpectrumSlice};
use std::io::Write;

/// Uniform grid of the solution export.
pub const SOLUTION_NODES: usize = 1025;

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header).map_err(io)?;
    Ok(w)
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn e<T: Real>(v: T) -> String {
    format!("{v:e}")
}

/// `k,nu,lambda,residual`, with `lambda` in the frame of the original problem.
pub fn write_spectrum_csv<T: Real, W: Write>(slice: &SpectrumSlice<T>, out: W) -> Result<()> {
    let mut w = writer(out, &["k", "nu", "lambda", "residual"])?;
    for pair in &slice.pairs {
        w.write_record([pair.k.to_string(), pair.nu.symbol().into(), e(pair.lambda + slice.shift), e(pair.endpoint_residual)])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// `alpha_plus,alpha_minus,k,branch,status`. A grid point that failed keeps
/// its fixed coordinate, an empty unknown and status `no_bracket` or `error`.
pub fn write_fucik_csv<T: Real, W: Write>(
    k: usize,
    branch: Sign,
    grid: &[(T, bool)],
    points: &[Result<FucikPoint<T>>],
    out: W,
) -> Result<()> {
    let mut w = writer(out, &["alpha_plus", "alpha_minus", "k", "branch", "status"])?;
    for (&(fixed, fixed_is_plus), p) in grid.iter().zip(points) {
        let row = match p {
            Ok(p) => [e(p.alpha_plus), e(p.alpha_minus), p.k.to_string(), p.branch.symbol().into(), "ok".into()],
            Err(err) => {
                let status = if matches!(err, Error::NoBracket(_)) { "no_bracket" } else { "error" };
                let (ap, am) = if fixed_is_plus { (e(fixed), String::new()) } else { (String::new(), e(fixed)) };
                [ap, am, k.to_string(), branch.symbol().into(), status.into()]
            }
        };
        w.write_record(row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// `x,u,v,du` at the integrator nodes.
pub fn write_trajectory_csv<T: Real, W: Write>(traj: &Trajectory<T>, out: W) -> Result<()> {
    let mut w = writer(out, &["x", "u", "v", "du"])?;
    for x in traj.nodes() {
        w.write_record([e(x), e(traj.u(x)), e(traj.v(x)), e(traj.du(x))]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// `x,u,du` on [`SOLUTION_NODES`] uniform points.
pub fn write_solution_csv<T: Real, W: Write>(traj: &Trajectory<T>, out: W) -> Result<()> {
    let mut w = writer(out, &["x", "u", "du"])?;
    for [x, u, _, du] in traj.sample(SOLUTION_NODES) {
        w.write_record([e(x), e(u), e(du)]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
