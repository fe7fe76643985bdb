//! Degrees in `Q + Q*kappa`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::poly::{rat, Rational};

/// Upper end of the admissible interval `kappa in (0, 1/10)`.
pub fn kappa_upper() -> Rational {
    rat(1, 10)
}

/// Value of kappa used to realise the total order.
pub fn kappa_reference() -> Rational {
    rat(1, 100)
}

/// Exact degree `rational + kappa_coeff * kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExactDegree {
    pub rational: Rational,
    pub kappa: Rational,
}

impl ExactDegree {
    pub fn new(rational: Rational, kappa: Rational) -> Self {
        ExactDegree { rational, kappa }
    }

    pub fn zero() -> Self {
        ExactDegree::new(Rational::zero(), Rational::zero())
    }

    pub fn int(n: i64) -> Self {
        ExactDegree::new(Rational::from_integer(n), Rational::zero())
    }

    /// `p/q + k*kappa` from integer parts.
    pub fn frac(p: i64, q: i64, k: i64) -> Self {
        ExactDegree::new(rat(p, q), Rational::from_integer(k))
    }

    pub fn at(&self, kappa: Rational) -> Rational {
        self.rational + self.kappa * kappa
    }

    pub fn scale(&self, n: i64) -> Self {
        let n = Rational::from_integer(n);
        ExactDegree::new(self.rational * n, self.kappa * n)
    }

    /// Ordering that holds for every kappa in the open interval (0, 1/10),
    /// or `None` when the comparison flips inside it.
    pub fn cmp_uniform(&self, other: &ExactDegree) -> Option<Ordering> {
        let d = *self - *other;
        let lo = d.at(Rational::zero());
        let hi = d.at(kappa_upper());
        // d is affine in kappa, so its sign on the open interval is fixed by the endpoints.
        if lo.is_zero() && hi.is_zero() {
            Some(Ordering::Equal)
        } else if !lo.is_negative() && !hi.is_negative() {
            Some(Ordering::Greater)
        } else if !lo.is_positive() && !hi.is_positive() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn is_positive(&self) -> bool {
        self.cmp(&ExactDegree::zero()) == Ordering::Greater
    }
}

impl Ord for ExactDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.at(kappa_reference())
            .cmp(&other.at(kappa_reference()))
            .then(self.kappa.cmp(&other.kappa))
    }
}

impl PartialOrd for ExactDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ExactDegree {
    type Output = ExactDegree;
    fn add(self, rhs: ExactDegree) -> ExactDegree {
        ExactDegree::new(self.rational + rhs.rational, self.kappa + rhs.kappa)
    }
}

impl Sub for ExactDegree {
    type Output = ExactDegree;
    fn sub(self, rhs: ExactDegree) -> ExactDegree {
        ExactDegree::new(self.rational - rhs.rational, self.kappa - rhs.kappa)
    }
}

impl Neg for ExactDegree {
    type Output = ExactDegree;
    fn neg(self) -> ExactDegree {
        ExactDegree::new(-self.rational, -self.kappa)
    }
}

impl fmt::Display for ExactDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.kappa;
        let kterm = |k: Rational| {
            if k.abs() == Rational::from_integer(1) {
                "k".to_string()
            } else {
                format!("{}k", k.abs())
            }
        };
        match (self.rational.is_zero(), k.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.rational),
            (true, false) => {
                if k.is_negative() {
                    write!(f, "-")?;
                }
                write!(f, "{}", kterm(k))
            }
            (false, false) => {
                let sign = if k.is_negative() { '-' } else { '+' };
                write!(f, "{} {} {}", self.rational, sign, kterm(k))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(ExactDegree::frac(-3, 2, -1).to_string(), "-3/2 - k");
        assert_eq!(ExactDegree::frac(0, 1, -4).to_string(), "-4k");
        assert_eq!(ExactDegree::zero().to_string(), "0");
        assert_eq!(ExactDegree::frac(1, 2, 2).to_string(), "1/2 + 2k");
    }

    #[test]
    fn uniform_order_detects_crossings() {
        let zero = ExactDegree::zero();
        // -1/2 + 6k changes sign at k = 1/12
        let crossing = ExactDegree::frac(-1, 2, 6);
        assert_eq!(crossing.cmp_uniform(&zero), None);
        assert_eq!(
            ExactDegree::frac(0, 1, -4).cmp_uniform(&zero),
            Some(Ordering::Less)
        );
        assert_eq!(
            ExactDegree::frac(1, 2, -1).cmp_uniform(&zero),
            Some(Ordering::Greater)
        );
    }
}
