//! Symbols of the regularity structure.
//!
//! A [`Tree`] is kept in canonical form at all times: products are flattened,
//! sorted multisets with at most one polynomial factor and no unit factor,
//! and integration of a pure polynomial does not exist (it is zero).

use std::fmt;

use crate::degree::ExactDegree;
use crate::poly::Rational;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    /// The noise symbol.
    Xi,
    /// `X^(time, space)`; the unit is `X^(0,0)`.
    Monomial { time: u32, space: u32 },
    /// Convolution with the heat kernel.
    Integ(Box<Tree>),
    /// Convolution with the spatial derivative of the heat kernel.
    IntegPrime(Box<Tree>),
    /// Commutative product of at least two non-unit factors.
    Product(Vec<Tree>),
}

impl Tree {
    pub fn one() -> Tree {
        Tree::Monomial { time: 0, space: 0 }
    }

    pub fn x1() -> Tree {
        Tree::Monomial { time: 0, space: 1 }
    }

    pub fn monomial(time: u32, space: u32) -> Tree {
        Tree::Monomial { time, space }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Tree::Monomial { time: 0, space: 0 })
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, Tree::Monomial { .. })
    }

    /// `I(t)`, or `None` for polynomial arguments.
    pub fn integ(t: Tree) -> Option<Tree> {
        if t.is_polynomial() {
            None
        } else {
            Some(Tree::Integ(Box::new(t)))
        }
    }

    /// `I'(t) = I(d t)`, or `None` for polynomial arguments.
    pub fn integ_prime(t: Tree) -> Option<Tree> {
        if t.is_polynomial() {
            None
        } else {
            Some(Tree::IntegPrime(Box::new(t)))
        }
    }

    /// Shorthand for `I'(Xi)`.
    pub fn psi() -> Tree {
        Tree::IntegPrime(Box::new(Tree::Xi))
    }

    /// Canonical product of an arbitrary collection of factors.
    pub fn product<I: IntoIterator<Item = Tree>>(factors: I) -> Tree {
        let mut time = 0;
        let mut space = 0;
        let mut rest = Vec::new();
        for f in factors {
            match f {
                Tree::Monomial { time: t, space: s } => {
                    time += t;
                    space += s;
                }
                Tree::Product(inner) => {
                    for g in inner {
                        match g {
                            Tree::Monomial { time: t, space: s } => {
                                time += t;
                                space += s;
                            }
                            other => rest.push(other),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if time > 0 || space > 0 {
            rest.push(Tree::Monomial { time, space });
        }
        rest.sort();
        match rest.len() {
            0 => Tree::one(),
            1 => rest.pop().expect("one factor"),
            _ => Tree::Product(rest),
        }
    }

    pub fn times(&self, other: &Tree) -> Tree {
        Tree::product([self.clone(), other.clone()])
    }

    /// The factors hanging from the root; empty for the unit.
    pub fn factors(&self) -> Vec<Tree> {
        match self {
            t if t.is_one() => Vec::new(),
            Tree::Product(fs) => fs.clone(),
            other => vec![other.clone()],
        }
    }

    pub fn degree(&self) -> ExactDegree {
        match self {
            Tree::Xi => ExactDegree::frac(-3, 2, -1),
            Tree::Monomial { time, space } => ExactDegree::int(2 * *time as i64 + *space as i64),
            Tree::Integ(t) => t.degree() + ExactDegree::int(2),
            Tree::IntegPrime(t) => t.degree() + ExactDegree::int(1),
            Tree::Product(fs) => fs
                .iter()
                .fold(ExactDegree::zero(), |acc, f| acc + f.degree()),
        }
    }

    /// Abstract spatial derivative on the symbols where it is defined:
    /// monomials and `I(t)`. Returns `Ok(None)` when the result is zero.
    pub fn derivative(&self) -> Result<Option<(Rational, Tree)>, Tree> {
        match self {
            Tree::Monomial { time, space } => {
                if *space == 0 {
                    Ok(None)
                } else {
                    Ok(Some((
                        Rational::from_integer(*space as i64),
                        Tree::Monomial { time: *time, space: space - 1 },
                    )))
                }
            }
            Tree::Integ(t) => Ok(Some((Rational::from_integer(1), Tree::IntegPrime(t.clone())))),
            other => Err(other.clone()),
        }
    }

    /// Number of noise leaves.
    pub fn noise_count(&self) -> usize {
        match self {
            Tree::Xi => 1,
            Tree::Monomial { .. } => 0,
            Tree::Integ(t) | Tree::IntegPrime(t) => t.noise_count(),
            Tree::Product(fs) => fs.iter().map(Tree::noise_count).sum(),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Xi => f.write_str("Xi"),
            Tree::Monomial { time: 0, space: 0 } => f.write_str("1"),
            Tree::Monomial { time: 0, space: 1 } => f.write_str("X1"),
            Tree::Monomial { time, space } => write!(f, "X^({time},{space})"),
            Tree::Integ(t) => write!(f, "I({t})"),
            Tree::IntegPrime(t) => write!(f, "I'({t})"),
            Tree::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}
