//! Recursive-descent parser for rational expressions in `p`, `s`, `q`.
//!
//! Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/') unary)*`,
//! `unary := '-' unary | '+' unary | power`, `power := atom ('^' '-'? int)?`,
//! `atom := int | 'p' | 's' | 'q' | '(' expr ')'`.

use num_bigint::BigInt;

use super::{ParamScalar, Rational, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(char),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ScalarError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if matches!(c, 'p' | 's' | 'q') {
            out.push((i, Tok::Var(c)));
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ScalarError::Parse {
                pos: i,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse {
            pos: self.here(),
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ParamScalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.plus(&self.term()?);
            } else if self.eat('-') {
                acc = acc.minus(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ParamScalar, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.times(&self.unary()?);
            } else if self.eat('/') {
                let at = self.here();
                let d = self.unary()?;
                acc = acc.try_div(&d).map_err(|_| ScalarError::Parse {
                    pos: at,
                    msg: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ParamScalar, ScalarError> {
        if self.eat('-') {
            return Ok(self.unary()?.negate());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ParamScalar, ScalarError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let n = match self.peek() {
            Some(Tok::Int(n)) => {
                let n: i64 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                self.pos += 1;
                n
            }
            _ => return Err(self.err("expected integer exponent")),
        };
        let n = if neg { -n } else { n };
        base.powi(n).map_err(|_| self.err("negative power of zero"))
    }

    fn atom(&mut self) -> Result<ParamScalar, ScalarError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(ParamScalar::from_rational(&Rational::from_integer(n)))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(match v {
                    'p' => ParamScalar::p(),
                    's' => ParamScalar::s(),
                    _ => ParamScalar::q(),
                })
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            _ => Err(self.err("expected number, variable or '('")),
        }
    }
}

pub(crate) fn parse_param(text: &str) -> Result<ParamScalar, ScalarError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let value = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.err("trailing input"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_powers() {
        let x = parse_param("1 + 2*p^2 - s/2").unwrap();
        let y = parse_param("(2 + 4*p*p - s)/2").unwrap();
        assert_eq!(x, y);
        assert_eq!(parse_param("s^-2").unwrap(), parse_param("1/(s*s)").unwrap());
    }

    #[test]
    fn errors_report_position() {
        assert!(matches!(parse_param("p + x"), Err(ScalarError::Parse { pos: 4, .. })));
        assert!(matches!(parse_param("(p"), Err(ScalarError::Parse { .. })));
        assert!(matches!(parse_param("1/(p-p)"), Err(ScalarError::Parse { .. })));
        assert!(matches!(parse_param("p p"), Err(ScalarError::Parse { .. })));
    }
}
