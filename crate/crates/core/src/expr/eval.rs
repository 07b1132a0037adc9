use super::{BinOp, Constant, Expr, ExprError, Func, Var};
use crate::real::{lit, Real};

/// Variable values for one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings<T> {
    pub x: Option<T>,
    pub xi: Option<T>,
}

impl<T: Real> Bindings<T> {
    pub fn none() -> Self {
        Bindings { x: None, xi: None }
    }

    pub fn x(x: T) -> Self {
        Bindings {
            x: Some(x),
            xi: None,
        }
    }

    pub fn x_xi(x: T, xi: T) -> Self {
        Bindings {
            x: Some(x),
            xi: Some(xi),
        }
    }
}

fn domain(op: &'static str, message: impl Into<String>) -> ExprError {
    ExprError::Domain {
        op,
        message: message.into(),
    }
}

fn finite<T: Real>(op: &'static str, v: T) -> Result<T, ExprError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(op, format!("non-finite result {v}")))
    }
}

/// Sign with `sgn(0) = 0`.
pub(crate) fn sgn<T: Real>(v: T) -> T {
    if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

impl Expr {
    /// Evaluates the tree. Non-finite intermediate values are reported as
    /// domain errors rather than propagated.
    pub fn eval<T: Real>(&self, b: &Bindings<T>) -> Result<T, ExprError> {
        match self {
            Expr::Num(v) => Ok(lit(*v)),
            Expr::Const(Constant::Pi) => Ok(T::PI()),
            Expr::Const(Constant::E) => Ok(T::E()),
            Expr::Var(Var::X) => b.x.ok_or(ExprError::Unbound("x")),
            Expr::Var(Var::Xi) => b.xi.ok_or(ExprError::Unbound("xi")),
            Expr::Neg(a) => Ok(-a.eval(b)?),
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(b)?, r.eval(b)?);
                match op {
                    BinOp::Add => finite("+", l + r),
                    BinOp::Sub => finite("-", l - r),
                    BinOp::Mul => finite("*", l * r),
                    BinOp::Div => {
                        if r == T::zero() {
                            Err(domain("/", "division by zero"))
                        } else {
                            finite("/", l / r)
                        }
                    }
                    BinOp::Pow => pow(l, r),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(b)?;
                match f {
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                    Func::Tan => finite("tan", a.tan()),
                    Func::Atan => Ok(a.atan()),
                    Func::Exp => finite("exp", a.exp()),
                    Func::Log => {
                        if a <= T::zero() {
                            Err(domain("log", format!("argument {a} is not positive")))
                        } else {
                            Ok(a.ln())
                        }
                    }
                    Func::Tanh => Ok(a.tanh()),
                    Func::Abs => Ok(a.abs()),
                    Func::Sgn => Ok(sgn(a)),
                    Func::Min => Ok(a.min(args[1].eval(b)?)),
                    Func::Max => Ok(a.max(args[1].eval(b)?)),
                }
            }
        }
    }
}

fn pow<T: Real>(base: T, exp: T) -> Result<T, ExprError> {
    if base == T::zero() && exp < T::zero() {
        return Err(domain("^", "zero raised to a negative power"));
    }
    if base < T::zero() && exp.fract() != T::zero() {
        return Err(domain("^", format!("negative base {base} with non-integer exponent")));
    }
    let v = if exp.fract() == T::zero() && exp.abs() <= lit(64.0) {
        base.powi(exp.to_i32().expect("small integer exponent"))
    } else {
        base.powf(exp)
    };
    finite("^", v)
}
