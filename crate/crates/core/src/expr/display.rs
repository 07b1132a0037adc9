use super::{BinOp, Constant, Expr, Var};
use std::fmt;

// Binding strength of the grammar levels; higher binds tighter.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => UNARY,
        Expr::Num(_) | Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => ATOM,
        Expr::Neg(_) => UNARY,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => SUM,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => PRODUCT,
        Expr::Bin(BinOp::Pow, ..) => POWER,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min_level: u8) -> fmt::Result {
    if level(e) < min_level {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Const(Constant::Pi) => write!(f, "pi"),
        Expr::Const(Constant::E) => write!(f, "e"),
        Expr::Var(Var::X) => write!(f, "x"),
        Expr::Var(Var::Xi) => write!(f, "xi"),
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, UNARY)
        }
        Expr::Bin(op, a, b) => {
            let (sym, left, right) = match op {
                BinOp::Add => ("+", SUM, PRODUCT),
                BinOp::Sub => ("-", SUM, PRODUCT),
                BinOp::Mul => ("*", PRODUCT, UNARY),
                BinOp::Div => ("/", PRODUCT, UNARY),
                BinOp::Pow => ("^", ATOM, UNARY),
            };
            write_at(f, a, left)?;
            write!(f, "{sym}")?;
            write_at(f, b, right)
        }
        Expr::Call(func, args) => {
            write!(f, "{}(", func.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_expr(f, a)?;
            }
            write!(f, ")")
        }
    }
}

// Negative literals (only produced by folding) print as `-v`, which reparses
// as a negation node with the same value.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    #[test]
    fn minimal_parentheses() {
        for (src, shown) in [
            ("(x+1)*2", "(x+1)*2"),
            ("x-(1-xi)", "x-(1-xi)"),
            ("-(x*2)", "-(x*2)"),
            ("(-x)^2", "(-x)^2"),
            ("(2^3)^2", "(2^3)^2"),
            ("2^3^2", "2^3^2"),
            ("x/(2*xi)", "x/(2*xi)"),
            ("max(x,1)", "max(x, 1)"),
        ] {
            assert_eq!(parse(src).unwrap().to_string(), shown);
        }
    }
}
