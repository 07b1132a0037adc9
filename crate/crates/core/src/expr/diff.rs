use super::{BinOp, Expr, ExprError, Func, Var};

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Add, a, b)
}

fn sub(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Sub, a, b)
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Mul, a, b)
}

fn div(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Div, a, b)
}

fn pow(a: Expr, b: Expr) -> Expr {
    Expr::bin(BinOp::Pow, a, b)
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::call(f, vec![a])
}

/// Symbolic derivative with respect to `xi`, constant-folded.
///
/// `abs`, `sgn`, `min` and `max` are accepted only in subtrees that do not
/// depend on `xi`.
pub fn diff_xi(e: &Expr) -> Result<Expr, ExprError> {
    Ok(d(e)?.simplify())
}

fn d(e: &Expr) -> Result<Expr, ExprError> {
    if !e.uses(Var::Xi) {
        return Ok(num(0.0));
    }
    Ok(match e {
        Expr::Num(_) | Expr::Const(_) => num(0.0),
        Expr::Var(Var::Xi) => num(1.0),
        Expr::Var(Var::X) => num(0.0),
        Expr::Neg(a) => Expr::neg(d(a)?),
        Expr::Bin(op, a, b) => {
            let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
            match op {
                BinOp::Add => add(d(&a)?, d(&b)?),
                BinOp::Sub => sub(d(&a)?, d(&b)?),
                BinOp::Mul => add(mul(d(&a)?, b.clone()), mul(a.clone(), d(&b)?)),
                BinOp::Div => div(
                    sub(mul(d(&a)?, b.clone()), mul(a.clone(), d(&b)?)),
                    pow(b.clone(), num(2.0)),
                ),
                BinOp::Pow if !b.uses(Var::Xi) => mul(
                    mul(b.clone(), pow(a.clone(), sub(b.clone(), num(1.0)))),
                    d(&a)?,
                ),
                BinOp::Pow if !a.uses(Var::Xi) => {
                    mul(mul(pow(a.clone(), b.clone()), call(Func::Log, a.clone())), d(&b)?)
                }
                BinOp::Pow => mul(
                    pow(a.clone(), b.clone()),
                    add(
                        mul(d(&b)?, call(Func::Log, a.clone())),
                        div(mul(b.clone(), d(&a)?), a.clone()),
                    ),
                ),
            }
        }
        Expr::Call(f, args) => {
            let a = args[0].clone();
            let da = d(&a)?;
            match f {
                Func::Sin => mul(call(Func::Cos, a), da),
                Func::Cos => mul(Expr::neg(call(Func::Sin, a)), da),
                Func::Tan => mul(add(num(1.0), pow(call(Func::Tan, a), num(2.0))), da),
                Func::Atan => div(da, add(num(1.0), pow(a, num(2.0)))),
                Func::Exp => mul(call(Func::Exp, a), da),
                Func::Log => div(da, a),
                Func::Tanh => mul(sub(num(1.0), pow(call(Func::Tanh, a), num(2.0))), da),
                Func::Abs | Func::Sgn | Func::Min | Func::Max => {
                    return Err(ExprError::NonDifferentiable(f.name()))
                }
            }
        }
    })
}
