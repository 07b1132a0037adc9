//! Dormand-Prince 5(4) integrator with continuous (dense) output.

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// One accepted step together with its 4th-order interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment<T, const N: usize> {
    pub x0: T,
    pub h: T,
    rcont: [[T; N]; 5],
}

impl<T: Real, const N: usize> DenseSegment<T, N> {
    pub fn x1(&self) -> T {
        self.x0 + self.h
    }

    pub fn start(&self) -> [T; N] {
        self.rcont[0]
    }

    pub fn end(&self) -> [T; N] {
        let mut y = [T::zero(); N];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.rcont[0][i] + self.rcont[1][i];
        }
        y
    }

    #[inline]
    pub fn component(&self, i: usize, x: T) -> T {
        let theta = (x - self.x0) / self.h;
        let t1 = T::one() - theta;
        let r = &self.rcont;
        r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])))
    }

    pub fn eval(&self, x: T) -> [T; N] {
        let mut y = [T::zero(); N];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.component(i, x);
        }
        y
    }

    /// `d/dx` of the interpolant of component `i`.
    pub fn derivative(&self, i: usize, x: T) -> T {
        let theta = (x - self.x0) / self.h;
        let t1 = T::one() - theta;
        let r = &self.rcont;
        let a = r[2][i] + theta * (r[3][i] + t1 * r[4][i]);
        let da = r[3][i] + (t1 - theta) * r[4][i];
        let b = r[1][i] + t1 * a;
        let db = -a + t1 * da;
        (b + theta * db) / self.h
    }

    /// Segment of a constant state.
    pub fn constant(x0: T, h: T, y: [T; N]) -> Self {
        let mut rcont = [[T::zero(); N]; 5];
        rcont[0] = y;
        DenseSegment { x0, h, rcont }
    }

    /// Multiplies component `i` of the interpolant by `scale[i]`.
    pub fn scaled(&self, scale: &[T; N]) -> Self {
        let mut rcont = self.rcont;
        for row in rcont.iter_mut() {
            for (v, s) in row.iter_mut().zip(scale) {
                *v *= *s;
            }
        }
        DenseSegment {
            x0: self.x0,
            h: self.h,
            rcont,
        }
    }
}

/// Piecewise polynomial solution on `[x_start, x_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution<T, const N: usize> {
    segments: Vec<DenseSegment<T, N>>,
}

impl<T: Real, const N: usize> DenseSolution<T, N> {
    pub fn new(segments: Vec<DenseSegment<T, N>>) -> Self {
        assert!(!segments.is_empty(), "dense solution needs at least one segment");
        DenseSolution { segments }
    }

    pub fn segments(&self) -> &[DenseSegment<T, N>] {
        &self.segments
    }

    pub fn x_start(&self) -> T {
        self.segments[0].x0
    }

    pub fn x_end(&self) -> T {
        self.segments[self.segments.len() - 1].x1()
    }

    pub fn segment_at(&self, x: T) -> &DenseSegment<T, N> {
        let i = self.segments.partition_point(|s| s.x1() < x);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    pub fn eval(&self, x: T) -> [T; N] {
        self.segment_at(x).eval(x)
    }

    pub fn component(&self, i: usize, x: T) -> T {
        self.segment_at(x).component(i, x)
    }

    pub fn derivative(&self, i: usize, x: T) -> T {
        self.segment_at(x).derivative(i, x)
    }

    /// Mesh nodes `x_0 < x_1 < ... < x_end`.
    pub fn nodes(&self) -> Vec<T> {
        let mut v: Vec<T> = self.segments.iter().map(|s| s.x0).collect();
        v.push(self.x_end());
        v
    }

    pub fn scaled(&self, scale: &[T; N]) -> Self {
        DenseSolution {
            segments: self.segments.iter().map(|s| s.scaled(scale)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    /// Initial step; `None` picks a fraction of the interval.
    pub h_init: Option<T>,
    pub h_max: Option<T>,
}

impl<T: Real> OdeOptions<T> {
    pub fn new(rtol: T, atol: T, max_steps: usize) -> Self {
        OdeOptions {
            rtol,
            atol,
            max_steps,
            h_init: None,
            h_max: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Result of an integration: dense output, statistics and the accumulated
/// local error estimate per component.
#[derive(Debug, Clone)]
pub struct OdeSolution<T, const N: usize> {
    pub dense: DenseSolution<T, N>,
    pub stats: OdeStats,
    pub error_estimate: [T; N],
}

/// Integrates `y' = rhs(x, y)` from `x0` to `x1 > x0`.
///
/// `on_step` sees every accepted segment in order and may abort the run by
/// returning an error.
pub fn dopri5<T, const N: usize, F, S>(
    rhs: F,
    x0: T,
    y0: [T; N],
    x1: T,
    opts: &OdeOptions<T>,
    mut on_step: S,
) -> Result<OdeSolution<T, N>>
where
    T: Real,
    F: Fn(T, &[T; N]) -> Result<[T; N]>,
    S: FnMut(&DenseSegment<T, N>) -> Result<()>,
{
    let c = Tableau::<T>::new();
    let span = x1 - x0;
    assert!(span > T::zero(), "integration interval must be non-empty");
    let h_max = opts.h_max.unwrap_or(span);
    let mut h = opts.h_init.unwrap_or(span * lit(1e-3)).min(h_max);
    let h_floor = lit::<T>(64.0) * T::epsilon();

    let mut stats = OdeStats::default();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = rhs(x, &y)?;
    stats.evaluations += 1;
    check_finite(x, &k1)?;
    let mut segments = Vec::new();
    let mut err_acc = [T::zero(); N];
    let mut last_rejected = false;
    let safety = lit::<T>(0.9);

    while x < x1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::TooManySteps {
                x: x.as_f64(),
                max_steps: opts.max_steps,
            });
        }
        let mut last = false;
        if x + h >= x1 - h_floor * x1.abs().max(T::one()) {
            h = x1 - x;
            last = true;
        }
        if h <= h_floor * x.abs().max(T::one()) {
            return Err(Error::StepSizeCollapse { x: x.as_f64() });
        }

        let stage = |coef: &[T], ks: &[&[T; N]]| -> [T; N] {
            let mut out = y;
            for (i, o) in out.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (a, k) in coef.iter().zip(ks) {
                    acc += *a * k[i];
                }
                *o += h * acc;
            }
            out
        };
        let y2 = stage(&[c.a21], &[&k1]);
        let k2 = rhs(x + c.c2 * h, &y2)?;
        let y3 = stage(&[c.a31, c.a32], &[&k1, &k2]);
        let k3 = rhs(x + c.c3 * h, &y3)?;
        let y4 = stage(&[c.a41, c.a42, c.a43], &[&k1, &k2, &k3]);
        let k4 = rhs(x + c.c4 * h, &y4)?;
        let y5 = stage(&[c.a51, c.a52, c.a53, c.a54], &[&k1, &k2, &k3, &k4]);
        let k5 = rhs(x + c.c5 * h, &y5)?;
        let y6 = stage(&[c.a61, c.a62, c.a63, c.a64, c.a65], &[&k1, &k2, &k3, &k4, &k5]);
        let k6 = rhs(x + h, &y6)?;
        let ynew = stage(
            &[c.a71, T::zero(), c.a73, c.a74, c.a75, c.a76],
            &[&k1, &k2, &k3, &k4, &k5, &k6],
        );
        let xnew = if last { x1 } else { x + h };
        let k7 = rhs(xnew, &ynew)?;
        stats.evaluations += 6;

        let mut err_sq = T::zero();
        let mut err_vec = [T::zero(); N];
        let mut finite = true;
        for i in 0..N {
            let e = h
                * (c.e1 * k1[i] + c.e3 * k3[i] + c.e4 * k4[i] + c.e5 * k5[i] + c.e6 * k6[i] + c.e7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err_sq += (e / sc) * (e / sc);
            err_vec[i] = e.abs();
            finite &= ynew[i].is_finite() && k7[i].is_finite();
        }
        let err = (err_sq / lit::<T>(N as f64)).sqrt();
        if !finite || !err.is_finite() {
            // shrink hard and retry; report overflow when there is no room left
            stats.rejected += 1;
            h *= lit(0.1);
            last_rejected = true;
            if h <= h_floor * x.abs().max(T::one()) {
                return Err(Error::Overflow { x: x.as_f64() });
            }
            continue;
        }

        if err <= T::one() {
            stats.accepted += 1;
            let mut rcont = [[T::zero(); N]; 5];
            for i in 0..N {
                let ydiff = ynew[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k7[i] - bspl;
                rcont[4][i] = h
                    * (c.d1 * k1[i] + c.d3 * k3[i] + c.d4 * k4[i] + c.d5 * k5[i] + c.d6 * k6[i] + c.d7 * k7[i]);
                err_acc[i] += err_vec[i];
            }
            let seg = DenseSegment { x0: x, h, rcont };
            on_step(&seg)?;
            segments.push(seg);
            x = xnew;
            y = ynew;
            k1 = k7;
            let grow = if err == T::zero() {
                lit(5.0)
            } else {
                (safety * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
            };
            let factor = if last_rejected { grow.min(T::one()) } else { grow };
            last_rejected = false;
            h = (h * factor).min(h_max);
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h *= (safety * err.powf(lit(-0.2))).max(lit(0.1));
        }
    }
    Ok(OdeSolution {
        dense: DenseSolution::new(segments),
        stats,
        error_estimate: err_acc,
    })
}

fn check_finite<T: Real, const N: usize>(x: T, y: &[T; N]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Overflow { x: x.as_f64() })
    }
}

struct Tableau<T> {
    c2: T,
    c3: T,
    c4: T,
    c5: T,
    a21: T,
    a31: T,
    a32: T,
    a41: T,
    a42: T,
    a43: T,
    a51: T,
    a52: T,
    a53: T,
    a54: T,
    a61: T,
    a62: T,
    a63: T,
    a64: T,
    a65: T,
    a71: T,
    a73: T,
    a74: T,
    a75: T,
    a76: T,
    e1: T,
    e3: T,
    e4: T,
    e5: T,
    e6: T,
    e7: T,
    d1: T,
    d3: T,
    d4: T,
    d5: T,
    d6: T,
    d7: T,
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let q = |a: f64, b: f64| lit::<T>(a) / lit::<T>(b);
        Tableau {
            c2: q(1.0, 5.0),
            c3: q(3.0, 10.0),
            c4: q(4.0, 5.0),
            c5: q(8.0, 9.0),
            a21: q(1.0, 5.0),
            a31: q(3.0, 40.0),
            a32: q(9.0, 40.0),
            a41: q(44.0, 45.0),
            a42: q(-56.0, 15.0),
            a43: q(32.0, 9.0),
            a51: q(19372.0, 6561.0),
            a52: q(-25360.0, 2187.0),
            a53: q(64448.0, 6561.0),
            a54: q(-212.0, 729.0),
            a61: q(9017.0, 3168.0),
            a62: q(-355.0, 33.0),
            a63: q(46732.0, 5247.0),
            a64: q(49.0, 176.0),
            a65: q(-5103.0, 18656.0),
            a71: q(35.0, 384.0),
            a73: q(500.0, 1113.0),
            a74: q(125.0, 192.0),
            a75: q(-2187.0, 6784.0),
            a76: q(11.0, 84.0),
            e1: q(71.0, 57600.0),
            e3: q(-71.0, 16695.0),
            e4: q(71.0, 1920.0),
            e5: q(-17253.0, 339200.0),
            e6: q(22.0, 525.0),
            e7: q(-1.0, 40.0),
            d1: q(-12715105075.0, 11282082432.0),
            d3: q(87487479700.0, 32700410799.0),
            d4: q(-10690763975.0, 1880347072.0),
            d5: q(701980252875.0, 199316789632.0),
            d6: q(-1453857185.0, 822651844.0),
            d7: q(69997945.0, 29380423.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(rtol: f64) -> OdeOptions<f64> {
        OdeOptions::new(rtol, rtol * 1e-2, 100_000)
    }

    #[test]
    fn harmonic_oscillator_end_and_dense_values() {
        let rhs = |_x: f64, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let sol = dopri5(rhs, 0.0, [0.0, 1.0], 10.0, &opts(1e-10), |_| Ok(())).unwrap();
        let end = sol.dense.eval(10.0);
        assert!((end[0] - 10f64.sin()).abs() < 1e-8);
        assert!((end[1] - 10f64.cos()).abs() < 1e-8);
        for i in 0..=200 {
            let x = i as f64 * 0.05;
            let y = sol.dense.eval(x);
            assert!((y[0] - x.sin()).abs() < 1e-8, "dense at {x}");
            assert!((sol.dense.derivative(0, x) - x.cos()).abs() < 1e-7, "slope at {x}");
        }
    }

    #[test]
    fn fifth_order_convergence() {
        // fixed-ish steps via a huge tolerance and h_max
        let run = |h: f64| {
            let o = OdeOptions {
                h_init: Some(h),
                h_max: Some(h),
                ..OdeOptions::new(1e3, 1e3, 100_000)
            };
            let sol = dopri5(|_x, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 1.0, &o, |_| Ok(())).unwrap();
            (sol.dense.eval(1.0)[0] - 1f64.exp()).abs()
        };
        let (e1, e2) = (run(0.1), run(0.05));
        let order = (e1 / e2).log2();
        assert!(order > 4.7, "observed order {order}");
    }

    #[test]
    fn works_in_single_precision() {
        let o = OdeOptions::new(1e-5f32, 1e-7, 10_000);
        let sol = dopri5(|_x, y: &[f32; 1]| Ok([-y[0]]), 0.0, [1.0], 2.0, &o, |_| Ok(())).unwrap();
        assert!((sol.dense.eval(2.0)[0] - (-2f32).exp()).abs() < 1e-4);
    }

    #[test]
    fn step_budget_is_enforced() {
        let o = OdeOptions::new(1e-12, 1e-14, 5);
        let r = dopri5(|_x, y: &[f64; 2]| Ok([y[1], -y[0]]), 0.0, [0.0, 1.0], 100.0, &o, |_| Ok(()));
        assert!(matches!(r, Err(Error::TooManySteps { .. })));
    }

    #[test]
    fn blowup_is_reported() {
        let o = OdeOptions::new(1e-8, 1e-10, 100_000);
        // y' = y^2, y(0) = 1 blows up at x = 1
        let r = dopri5(|_x, y: &[f64; 1]| Ok([y[0] * y[0]]), 0.0, [1.0], 2.0, &o, |_| Ok(()));
        assert!(r.is_err());
    }
}
