use super::{BinOp, Constant, Expr, ExprError, Func, Var};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii identifier")
                .to_string();
            return Ok((Tok::Ident(name), start));
        }
        Err(ExprError::Syntax {
            offset: start,
            message: format!("unexpected character `{}`", c as char),
        })
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), ExprError> {
        let digits = |lx: &mut Lexer| {
            let s = lx.pos;
            while lx.src.get(lx.pos).is_some_and(u8::is_ascii_digit) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ExprError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        // Exponent only when followed by digits, so `2e` stays a syntax error
        // downstream instead of silently swallowing the constant `e`.
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mut look = self.pos + 1;
            if matches!(self.src.get(look), Some(b'+' | b'-')) {
                look += 1;
            }
            if self.src.get(look).is_some_and(u8::is_ascii_digit) {
                self.pos = look;
                digits(self);
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        text.parse::<f64>()
            .map(|v| (Tok::Num(v), start))
            .map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ExprError {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        ExprError::Syntax {
            offset: self.offset(),
            message: format!("expected {wanted}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, at),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a number, identifier or `(`"))
            }
        }
    }

    fn identifier(&mut self, name: String, at: usize) -> Result<Expr, ExprError> {
        let simple = match name.as_str() {
            "x" => Some(Expr::Var(Var::X)),
            "xi" => Some(Expr::Var(Var::Xi)),
            "pi" => Some(Expr::Const(Constant::Pi)),
            "e" => Some(Expr::Const(Constant::E)),
            _ => None,
        };
        if let Some(e) = simple {
            return Ok(e);
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(ExprError::UnknownIdentifier { name, offset: at });
        };
        if *self.peek() != Tok::LParen {
            return Err(self.unexpected(&format!("`(` after `{name}`")));
        }
        self.bump();
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        if *self.peek() != Tok::RParen {
            return Err(self.unexpected("`,` or `)`"));
        }
        self.bump();
        if args.len() != func.arity() {
            return Err(ExprError::Arity {
                name,
                expected: func.arity(),
                found: args.len(),
                offset: at,
            });
        }
        Ok(Expr::Call(func, args))
    }
}

/// Parses an expression in `x` and `xi`.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    if src.trim().is_empty() {
        return Err(ExprError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks: Lexer::tokens(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinOp::*, Func};

    #[test]
    fn single_variable() {
        assert_eq!(parse("x").unwrap(), Expr::x());
    }

    #[test]
    fn sin_of_pi_x() {
        let e = parse("sin(pi*x)").unwrap();
        assert_eq!(
            e,
            Expr::call(Func::Sin, vec![Expr::bin(Mul, Expr::Const(Constant::Pi), Expr::x())])
        );
    }

    #[test]
    fn precedence_and_associativity() {
        // -x^2 is -(x^2)
        assert_eq!(
            parse("-x^2").unwrap(),
            Expr::neg(Expr::bin(Pow, Expr::x(), Expr::Num(2.0)))
        );
        // right-associative power
        assert_eq!(
            parse("2^3^2").unwrap(),
            Expr::bin(Pow, Expr::Num(2.0), Expr::bin(Pow, Expr::Num(3.0), Expr::Num(2.0)))
        );
        // left-associative subtraction
        assert_eq!(
            parse("1-2-3").unwrap(),
            Expr::bin(Sub, Expr::bin(Sub, Expr::Num(1.0), Expr::Num(2.0)), Expr::Num(3.0))
        );
        assert_eq!(
            parse("x^-1").unwrap(),
            Expr::bin(Pow, Expr::x(), Expr::neg(Expr::Num(1.0)))
        );
    }

    #[test]
    fn numbers_with_exponent() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse(".5").unwrap(), Expr::Num(0.5));
        assert!(parse("2e").is_err());
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("1 + * 2") {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse("foo(x)") {
            Err(ExprError::UnknownIdentifier { name, offset }) => {
                assert_eq!((name.as_str(), offset), ("foo", 0))
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("x + min(x)") {
            Err(ExprError::Arity {
                expected, found, offset, ..
            }) => assert_eq!((expected, found, offset), (2, 1, 4)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(x"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x)"), Err(ExprError::Syntax { offset: 1, .. })));
        assert!(parse("").is_err());
        assert!(parse("x $ 1").is_err());
    }
}
