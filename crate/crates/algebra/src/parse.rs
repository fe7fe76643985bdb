//! Text syntax for trees, combinations and tensors.
//!
//! The syntax is the one produced by the `Display` impls: `Xi`, `1`, `X1`,
//! `X^(l0,l1)`, `I(..)`, `I'(..)`, products with `*`, sums with `+`/`-`,
//! division by rational constants, and `<name>` references to diagrams.
//! Tensors separate the two factors of each term with `⊗`.

use num_traits::Zero;

use crate::combination::{TensorElement, TreeCombination};
use crate::poly::{Poly, Rational};
use crate::tree::Tree;
use crate::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(i64),
    Ident(String),
    Name(String),
    IPrime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Comma,
    LParen,
    RParen,
    Tensor,
}

fn tokenize(input: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            ',' => {
                out.push(Token::Comma);
                i += 1
            }
            '(' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' => {
                out.push(Token::RParen);
                i += 1
            }
            '⊗' => {
                out.push(Token::Tensor);
                i += 1
            }
            '<' => {
                let start = i;
                while i < chars.len() && chars[i] != '>' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(format!("unterminated diagram name at {start}"));
                }
                out.push(Token::Name(chars[start..=i].iter().collect()));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Num(s.parse().map_err(|e| format!("{e}"))?));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                if s == "I" && i < chars.len() && chars[i] == '\'' {
                    out.push(Token::IPrime);
                    i += 1;
                } else {
                    out.push(Token::Ident(s));
                }
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    lookup: &'a dyn Fn(&str) -> Option<Tree>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> Result<(), String> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(format!("expected {t:?}, found {got:?}")),
        }
    }

    fn tensor(&mut self) -> Result<TensorElement, String> {
        let mut acc = self.tensor_term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.tensor_term()?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.tensor_term()?;
                }
                other => return Err(format!("unexpected {other:?} in tensor")),
            }
        }
        Ok(acc)
    }

    fn tensor_term(&mut self) -> Result<TensorElement, String> {
        let left = self.product()?;
        self.expect(Token::Tensor)?;
        let right = self.product()?;
        Ok(TensorElement::from_pair(&left, &right))
    }

    fn expr(&mut self) -> Result<TreeCombination, String> {
        let mut acc = self.product()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<TreeCombination, String> {
        let mut acc = self.unary()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Star => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Token::Slash => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let c = as_rational(&d).ok_or("division by a non-constant")?;
                    if c.is_zero() {
                        return Err("division by zero".into());
                    }
                    acc = acc.scale_rational(c.recip());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<TreeCombination, String> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<TreeCombination, String> {
        match self.next() {
            Some(Token::Num(n)) => Ok(TreeCombination::scalar(Poly::int(n))),
            Some(Token::Name(name)) => (self.lookup)(&name)
                .map(TreeCombination::tree)
                .ok_or_else(|| format!("unknown diagram {name}")),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::IPrime) => {
                self.expect(Token::LParen)?;
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e.integ_prime())
            }
            Some(Token::Ident(id)) => match id.as_str() {
                "Xi" => Ok(TreeCombination::tree(Tree::Xi)),
                "X1" => Ok(TreeCombination::tree(Tree::x1())),
                "X" => {
                    self.expect(Token::Caret)?;
                    self.expect(Token::LParen)?;
                    let t = self.small_int()?;
                    self.expect(Token::Comma)?;
                    let s = self.small_int()?;
                    self.expect(Token::RParen)?;
                    Ok(TreeCombination::tree(Tree::monomial(t, s)))
                }
                "I" => {
                    self.expect(Token::LParen)?;
                    let e = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(e.integ())
                }
                var => Ok(TreeCombination::scalar(Poly::var(var))),
            },
            other => Err(format!("unexpected {other:?}")),
        }
    }

    fn small_int(&mut self) -> Result<u32, String> {
        match self.next() {
            Some(Token::Num(n)) if n >= 0 => Ok(n as u32),
            other => Err(format!("expected exponent, found {other:?}")),
        }
    }

    fn finish(&self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("trailing input at {t:?}")),
        }
    }
}

fn as_rational(x: &TreeCombination) -> Option<Rational> {
    if x.is_zero() {
        return Some(Rational::zero());
    }
    if x.len() != 1 {
        return None;
    }
    x.coefficient(&Tree::one()).as_constant().filter(|_| {
        x.trees().all(|t| t.is_one())
    })
}

fn err(input: &str, message: String) -> AlgebraError {
    AlgebraError::Parse {
        input: input.to_string(),
        message,
    }
}

pub fn parse_combination(
    input: &str,
    lookup: &dyn Fn(&str) -> Option<Tree>,
) -> Result<TreeCombination, AlgebraError> {
    let tokens = tokenize(input).map_err(|m| err(input, m))?;
    let mut p = Parser { tokens, pos: 0, lookup };
    let e = p.expr().map_err(|m| err(input, m))?;
    p.finish().map_err(|m| err(input, m))?;
    Ok(e)
}

pub fn parse_tensor(
    input: &str,
    lookup: &dyn Fn(&str) -> Option<Tree>,
) -> Result<TensorElement, AlgebraError> {
    let tokens = tokenize(input).map_err(|m| err(input, m))?;
    let mut p = Parser { tokens, pos: 0, lookup };
    let e = p.tensor().map_err(|m| err(input, m))?;
    p.finish().map_err(|m| err(input, m))?;
    Ok(e)
}

/// Parse a single tree (a combination consisting of exactly one tree with
/// coefficient one).
pub fn parse_tree(
    input: &str,
    lookup: &dyn Fn(&str) -> Option<Tree>,
) -> Result<Tree, AlgebraError> {
    let c = parse_combination(input, lookup)?;
    let mut terms = c.terms();
    match (terms.next(), terms.next()) {
        (Some((t, coeff)), None) if *coeff == Poly::one() => Ok(t.clone()),
        _ => Err(err(input, "expected a single tree".into())),
    }
}

/// Parse a polynomial coefficient (an expression free of trees).
pub fn parse_poly(input: &str) -> Result<Poly, AlgebraError> {
    let c = parse_combination(input, &|_| None)?;
    if c.trees().any(|t| !t.is_one()) {
        return Err(err(input, "expected a scalar expression".into()));
    }
    Ok(c.coefficient(&Tree::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none(_: &str) -> Option<Tree> {
        None
    }

    #[test]
    fn display_round_trip() {
        let src = "I'(Xi)*I'(I'(Xi)*I'(Xi))";
        let t = parse_tree(src, &none).unwrap();
        assert_eq!(t.to_string(), src);
        let c = parse_combination("(h + a*w)*1 + w*X1 - 1/2*I(Xi)", &none).unwrap();
        let again = parse_combination(&c.to_string(), &none).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn integration_of_polynomial_parses_to_zero() {
        let c = parse_combination("I(X1) + I'(1)", &none).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn tensor_terms() {
        let t = parse_tensor("I(Xi) ⊗ 1 + 1 ⊗ I(Xi)", &none).unwrap();
        assert_eq!(t.len(), 2);
        assert!(parse_tensor("I(Xi)", &none).is_err());
    }

    #[test]
    fn division_requires_constant() {
        assert!(parse_poly("wt/2").is_ok());
        assert!(parse_poly("1/wt").is_err());
        assert!(parse_poly("1/0").is_err());
    }
}
