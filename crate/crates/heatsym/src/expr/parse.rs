//! Recursive-descent parser for the expression grammar.
//!
//! Infix with precedence `^` > unary `-` > `*` `/` > `+` `-`, parentheses,
//! function calls `name(expr)`, identifiers `[a-zA-Z_][a-zA-Z0-9_]*`, and
//! rational literals written as an integer, `integer/integer` (folded by
//! constant merging) or a decimal. Reserved names: `z t u eta lam exp ln
//! K C J Jinv F`.

use super::ast::{Expr, Rational};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::One;

/// Function names accepted in call position. The first eight are the public
/// grammar contract; the rest are derivative symbols the crate itself prints.
const FUNC_NAMES: &[&str] = &[
    "exp", "ln", "K", "C", "J", "Jinv", "F", "li", "liinv", "Kp", "Kpp", "Kppp", "Cp", "Cpp",
    "Fp", "Fpp",
];

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e.simplify())
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(Expr::neg(self.term()?));
            } else {
                break;
            }
        }
        Ok(Expr::add(terms))
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Prod(vec![acc, self.unary()?]);
            } else if self.eat(b'/') {
                acc = Expr::div(acc, self.unary()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    // power := atom ('^' unary)?   (right-binding through unary)
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            Ok(make_power(base, exponent))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident_or_call(),
            Some(_) => Err(self.err("expected a number, identifier or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = &self.src[start..self.pos];
        let mut frac_part: &[u8] = b"";
        if self.peek() == Some(b'.') {
            self.pos += 1;
            let fs = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            frac_part = &self.src[fs..self.pos];
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(self.err("malformed number"));
            }
        } else if int_part.is_empty() {
            return Err(self.err("malformed number"));
        }
        self.skip_ws();
        // decimal digits are converted exactly: d.f -> (d*10^k + f) / 10^k
        let digits: String = int_part
            .iter()
            .chain(frac_part.iter())
            .map(|&b| b as char)
            .collect();
        let digits = if digits.is_empty() { "0".into() } else { digits };
        let numer: BigInt = digits.parse().expect("digit string");
        let mut denom = BigInt::one();
        for _ in 0..frac_part.len() {
            denom *= 10;
        }
        Ok(Expr::Const(Rational::new(numer, denom)))
    }

    fn ident_or_call(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii ident")
            .to_string();
        self.skip_ws();
        if self.peek() == Some(b'(') {
            if !FUNC_NAMES.contains(&name.as_str()) {
                return Err(Error::UnknownSymbol {
                    name,
                    offset: start,
                });
            }
            self.pos += 1;
            self.skip_ws();
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)` after function argument"));
            }
            Ok(match name.as_str() {
                "exp" => Expr::exp(arg),
                "ln" => Expr::ln(arg),
                _ => Expr::call(&name, arg),
            })
        } else {
            Ok(Expr::Var(name))
        }
    }
}

/// `base ^ exponent` with the tree restricted to rational exponents.
/// A non-constant exponent becomes `exp(exponent * ln(base))`.
fn make_power(base: Expr, exponent: Expr) -> Expr {
    match exponent.simplify() {
        Expr::Const(r) => Expr::Pow(Box::new(base), r),
        other => Expr::exp(Expr::Prod(vec![other, Expr::ln(base)])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_reported() {
        match parse("z +") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            r => panic!("expected syntax error, got {r:?}"),
        }
        match parse("K(") {
            Err(Error::Syntax { .. }) => {}
            r => panic!("expected syntax error, got {r:?}"),
        }
    }

    #[test]
    fn unknown_function_named() {
        match parse("sinh(z)") {
            Err(Error::UnknownSymbol { name, offset }) => {
                assert_eq!(name, "sinh");
                assert_eq!(offset, 0);
            }
            r => panic!("expected unknown symbol, got {r:?}"),
        }
    }

    #[test]
    fn decimal_is_exact() {
        assert_eq!(parse("0.5").unwrap(), Expr::ratio(1, 2));
        assert_eq!(parse("2.50").unwrap(), Expr::ratio(5, 2));
        assert_eq!(parse("1/3").unwrap(), Expr::ratio(1, 3));
    }

    #[test]
    fn precedence() {
        // ^ binds tighter than unary minus, * tighter than +
        assert_eq!(parse("-z^2").unwrap(), parse("-(z^2)").unwrap());
        assert_eq!(parse("2*z+3*z").unwrap(), parse("5*z").unwrap());
        assert_eq!(parse("z^2*z").unwrap(), parse("z^3").unwrap());
    }
}
