//! Evaluator for the coordinate strings accepted in polytope files.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('+' | '-') factor | number | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! This covers decimals, `a/b`, `sqrt(k)`, and combinations such as
//! `(1+sqrt(5))/2`.

use crate::error::{Error, Result};

/// Evaluate a coordinate expression to the nearest binary floating point value.
pub fn eval(src: &str) -> Result<f64> {
    let tokens: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parser = Parser { tokens, pos: 0 };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!(
            "unexpected '{}' in \"{}\"",
            parser.tokens[parser.pos], src
        )));
    }
    if !value.is_finite() {
        return Err(Error::Parse(format!("\"{src}\" is not a finite number")));
    }
    Ok(value)
}

struct Parser {
    tokens: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{c}' at position {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<f64> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<f64> {
        let mut acc = self.factor()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if op == '*' { acc * rhs } else { acc / rhs };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<f64> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some('+') => {
                self.pos += 1;
                self.factor()
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                let name: String = self.tokens[start..self.pos].iter().collect();
                if name != "sqrt" {
                    return Err(Error::Parse(format!("unknown function '{name}'")));
                }
                self.expect('(')?;
                let v = self.expr()?;
                self.expect(')')?;
                if v < 0.0 {
                    return Err(Error::Parse(format!("sqrt of negative value {v}")));
                }
                Ok(v.sqrt())
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || c == '.')
        {
            self.pos += 1;
        }
        // exponent part
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.tokens[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number '{text}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_numbers() {
        assert_eq!(eval("1.5").unwrap(), 1.5);
        assert_eq!(eval("-2").unwrap(), -2.0);
        assert_eq!(eval("1e-3").unwrap(), 1e-3);
    }

    #[test]
    fn fractions_and_roots() {
        assert_eq!(eval("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(eval("sqrt(3)").unwrap(), 3f64.sqrt());
        assert_eq!(eval("-sqrt(2)").unwrap(), -(2f64.sqrt()));
        let phi = eval("(1+sqrt(5))/2").unwrap();
        assert!((phi - 1.618_033_988_749_895).abs() < 1e-15);
        assert_eq!(eval(" 2 * sqrt( 3 ) ").unwrap(), 2.0 * 3f64.sqrt());
    }

    #[test]
    fn rejects_garbage() {
        assert!(eval("sqrt(-1)").is_err());
        assert!(eval("cos(1)").is_err());
        assert!(eval("1+").is_err());
        assert!(eval("1/0").is_err());
        assert!(eval("(1").is_err());
    }
}
