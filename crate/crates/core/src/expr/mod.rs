//! Scalar expression language for coefficients `a±(x)`, nonlinearities
//! `f(x, xi)` and the asymptotic limits `f±(x)`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;
//! primary = number | "pi" | "e" | "x" | "xi"
//!         | func "(" expr { "," expr } ")" | "(" expr ")" ;
//! func    = "sin" | "cos" | "tan" | "atan" | "exp" | "log" | "tanh"
//!         | "abs" | "sgn" | "min" | "max" ;
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^3^2` is `2^(3^2)`.

mod diff;
mod display;
mod eval;
mod parse;

pub use diff::diff_xi;
pub use eval::Bindings;
pub use parse::parse;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` expects {expected} argument(s), got {found} (byte {offset})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("unbound variable `{0}`")]
    Unbound(&'static str),
    #[error("domain error in {op}: {message}")]
    Domain { op: &'static str, message: String },
    #[error("`{0}` is not differentiable in xi")]
    NonDifferentiable(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Xi,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Xi => "xi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Exp,
    Log,
    Tanh,
    Abs,
    Sgn,
    Min,
    Max,
}

impl Func {
    pub const ALL: [Func; 11] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Exp,
        Func::Log,
        Func::Tanh,
        Func::Abs,
        Func::Sgn,
        Func::Min,
        Func::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
            Func::Sgn => "sgn",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Immutable once built; evaluation is reentrant.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(Constant),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn xi() -> Expr {
        Expr::Var(Var::Xi)
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        debug_assert_eq!(f.arity(), args.len());
        Expr::Call(f, args)
    }

    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) => a.uses(var),
            Expr::Bin(_, a, b) => a.uses(var) || b.uses(var),
            Expr::Call(_, args) => args.iter().any(|a| a.uses(var)),
        }
    }

    pub fn is_constant(&self) -> bool {
        !self.uses(Var::X) && !self.uses(Var::Xi)
    }

    /// Literal value when the tree is a plain number.
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    /// Constant folding of numeric subtrees plus the neutral-element
    /// identities `0+e`, `e*1`, `e^1`, `0*e`.
    pub fn simplify(&self) -> Expr {
        use BinOp::*;
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => match a.simplify() {
                Expr::Num(v) => Expr::Num(if v == 0.0 { 0.0 } else { -v }),
                Expr::Neg(inner) => *inner,
                s => Expr::neg(s),
            },
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (op, a.as_num(), b.as_num()) {
                    (Add, Some(x), Some(y)) => Expr::Num(x + y),
                    (Sub, Some(x), Some(y)) => Expr::Num(x - y),
                    (Mul, Some(x), Some(y)) => Expr::Num(x * y),
                    (Div, Some(x), Some(y)) if y != 0.0 => Expr::Num(x / y),
                    (Pow, Some(x), Some(y)) if (x.powf(y)).is_finite() => Expr::Num(x.powf(y)),
                    (Add, Some(0.0), _) => b,
                    (Add | Sub, _, Some(0.0)) => a,
                    (Sub, Some(0.0), _) => Expr::neg(b).simplify(),
                    (Mul, Some(0.0), _) | (Mul, _, Some(0.0)) => Expr::Num(0.0),
                    (Div, Some(0.0), _) => Expr::Num(0.0),
                    (Mul, Some(1.0), _) => b,
                    (Mul | Div, _, Some(1.0)) => a,
                    (Pow, _, Some(1.0)) => a,
                    (Pow, _, Some(0.0)) => Expr::Num(1.0),
                    _ => Expr::bin(*op, a, b),
                }
            }
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(Expr::simplify).collect()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
