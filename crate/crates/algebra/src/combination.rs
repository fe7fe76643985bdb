//! Formal linear combinations of trees and of tensors `T (x) T+`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::degree::ExactDegree;
use crate::poly::{Poly, Rational};
use crate::tree::Tree;

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Poly>, key: K, coeff: &Poly) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += coeff;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(coeff.clone());
        }
    }
}

/// Element of `<T>`: a finite sum of trees with polynomial coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TreeCombination(BTreeMap<Tree, Poly>);

impl TreeCombination {
    pub fn zero() -> Self {
        TreeCombination(BTreeMap::new())
    }

    pub fn tree(t: Tree) -> Self {
        TreeCombination::term(Poly::one(), t)
    }

    pub fn term(c: Poly, t: Tree) -> Self {
        let mut out = TreeCombination::zero();
        out.add_term(t, &c);
        out
    }

    /// `c * 1`.
    pub fn scalar(c: Poly) -> Self {
        TreeCombination::term(c, Tree::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, t: Tree, c: &Poly) {
        accumulate(&mut self.0, t, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tree, &Poly)> {
        self.0.iter()
    }

    pub fn coefficient(&self, t: &Tree) -> Poly {
        self.0.get(t).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Poly) -> Self {
        let mut out = TreeCombination::zero();
        for (t, p) in &self.0 {
            out.add_term(t.clone(), &(p * c));
        }
        out
    }

    pub fn scale_rational(&self, c: Rational) -> Self {
        self.scale(&Poly::constant(c))
    }

    /// Apply a linear map given on basis trees; `None` images are zero.
    pub fn map_linear<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&Tree) -> Option<TreeCombination>,
    {
        let mut out = TreeCombination::zero();
        for (t, c) in &self.0 {
            if let Some(img) = f(t) {
                out = &out + &img.scale(c);
            }
        }
        out
    }

    pub fn try_map_linear<F, E>(&self, mut f: F) -> Result<Self, E>
    where
        F: FnMut(&Tree) -> Result<TreeCombination, E>,
    {
        let mut out = TreeCombination::zero();
        for (t, c) in &self.0 {
            out = &out + &f(t)?.scale(c);
        }
        Ok(out)
    }

    /// Keep only the trees satisfying `keep`.
    pub fn filter<F: Fn(&Tree) -> bool>(&self, keep: F) -> Self {
        TreeCombination(
            self.0
                .iter()
                .filter(|(t, _)| keep(t))
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
        )
    }

    /// Projection onto trees of degree `<= 0`.
    pub fn project_leq(&self, bound: ExactDegree) -> Self {
        self.filter(|t| t.degree() <= bound)
    }

    /// Projection onto trees of degree `< bound`.
    pub fn project_lt(&self, bound: ExactDegree) -> Self {
        self.filter(|t| t.degree() < bound)
    }

    /// Linear extension of `I`.
    pub fn integ(&self) -> Self {
        self.map_linear(|t| Tree::integ(t.clone()).map(TreeCombination::tree))
    }

    /// Linear extension of `I'`.
    pub fn integ_prime(&self) -> Self {
        self.map_linear(|t| Tree::integ_prime(t.clone()).map(TreeCombination::tree))
    }

    /// Linear extension of the abstract derivative; `Err` names a tree it
    /// is not defined on.
    pub fn derivative(&self) -> Result<Self, Tree> {
        self.try_map_linear(|t| {
            Ok(match t.derivative()? {
                Some((c, d)) => TreeCombination::term(Poly::constant(c), d),
                None => TreeCombination::zero(),
            })
        })
    }

    pub fn substitute(&self, var: &str, value: &Poly) -> Self {
        let mut out = TreeCombination::zero();
        for (t, c) in &self.0 {
            out.add_term(t.clone(), &c.substitute(var, value));
        }
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.0.values().any(|c| c.mentions(var))
    }

    pub fn trees(&self) -> impl Iterator<Item = &Tree> {
        self.0.keys()
    }
}

impl Add<&TreeCombination> for &TreeCombination {
    type Output = TreeCombination;
    fn add(self, rhs: &TreeCombination) -> TreeCombination {
        let mut out = self.clone();
        for (t, c) in &rhs.0 {
            out.add_term(t.clone(), c);
        }
        out
    }
}

impl Sub<&TreeCombination> for &TreeCombination {
    type Output = TreeCombination;
    fn sub(self, rhs: &TreeCombination) -> TreeCombination {
        self + &(-rhs)
    }
}

impl Neg for &TreeCombination {
    type Output = TreeCombination;
    fn neg(self) -> TreeCombination {
        self.scale(&Poly::int(-1))
    }
}

/// Bilinear extension of the commutative tree product.
impl Mul<&TreeCombination> for &TreeCombination {
    type Output = TreeCombination;
    fn mul(self, rhs: &TreeCombination) -> TreeCombination {
        let mut out = TreeCombination::zero();
        for (t1, c1) in &self.0 {
            for (t2, c2) in &rhs.0 {
                out.add_term(t1.times(t2), &(c1 * c2));
            }
        }
        out
    }
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: &Poly, first: bool) -> fmt::Result {
    match c.as_constant() {
        Some(r) if r == Rational::from_integer(1) => {
            if !first {
                f.write_str(" + ")?;
            }
            Ok(())
        }
        Some(r) if r == Rational::from_integer(-1) => f.write_str(if first { "-" } else { " - " }),
        Some(r) if r < Rational::from_integer(0) => {
            write!(f, "{}{}*", if first { "-" } else { " - " }, -r)
        }
        Some(r) => write!(f, "{}{r}*", if first { "" } else { " + " }),
        None => write!(f, "{}({c})*", if first { "" } else { " + " }),
    }
}

impl fmt::Display for TreeCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.0.iter().enumerate() {
            write_coefficient(f, c, i == 0)?;
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Element of `T (x) T+`. The right factor is a commutative monomial over
/// the generators of `T+`, stored in canonical product form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TensorElement(BTreeMap<(Tree, Tree), Poly>);

impl TensorElement {
    pub fn zero() -> Self {
        TensorElement(BTreeMap::new())
    }

    pub fn simple(left: Tree, right: Tree) -> Self {
        let mut out = TensorElement::zero();
        out.add_term(left, right, &Poly::one());
        out
    }

    /// `x (x) y` for combinations.
    pub fn from_pair(x: &TreeCombination, y: &TreeCombination) -> Self {
        let mut out = TensorElement::zero();
        for (l, cl) in x.terms() {
            for (r, cr) in y.terms() {
                out.add_term(l.clone(), r.clone(), &(cl * cr));
            }
        }
        out
    }

    pub fn add_term(&mut self, left: Tree, right: Tree, c: &Poly) {
        accumulate(&mut self.0, (left, right), c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tree, &Tree, &Poly)> {
        self.0.iter().map(|((l, r), c)| (l, r, c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Apply a map to the left factor, keeping the right one.
    pub fn map_left<F: Fn(&Tree) -> Option<Tree>>(&self, f: F) -> Self {
        let mut out = TensorElement::zero();
        for ((l, r), c) in &self.0 {
            if let Some(nl) = f(l) {
                out.add_term(nl, r.clone(), c);
            }
        }
        out
    }

    /// Contract the right factor against a scalar functional.
    pub fn contract_right<F, E>(&self, f: F) -> Result<TreeCombination, E>
    where
        F: Fn(&Tree) -> Result<Poly, E>,
    {
        let mut out = TreeCombination::zero();
        for ((l, r), c) in &self.0 {
            out.add_term(l.clone(), &(c * &f(r)?));
        }
        Ok(out)
    }
}

impl Add<&TensorElement> for &TensorElement {
    type Output = TensorElement;
    fn add(self, rhs: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for ((l, r), c) in &rhs.0 {
            out.add_term(l.clone(), r.clone(), c);
        }
        out
    }
}

impl Sub<&TensorElement> for &TensorElement {
    type Output = TensorElement;
    fn sub(self, rhs: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for ((l, r), c) in &rhs.0 {
            out.add_term(l.clone(), r.clone(), &(-c));
        }
        out
    }
}

/// `(l1 (x) r1)(l2 (x) r2) = l1 l2 (x) r1 r2`.
impl Mul<&TensorElement> for &TensorElement {
    type Output = TensorElement;
    fn mul(self, rhs: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for ((l1, r1), c1) in &self.0 {
            for ((l2, r2), c2) in &rhs.0 {
                out.add_term(l1.times(l2), r1.times(r2), &(c1 * c2));
            }
        }
        out
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, ((l, r), c)) in self.0.iter().enumerate() {
            write_coefficient(f, c, i == 0)?;
            write!(f, "{l} ⊗ {r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_is_bilinear_with_unit() {
        let psi = TreeCombination::tree(Tree::psi());
        let one = TreeCombination::tree(Tree::one());
        assert_eq!(&one * &psi, psi);
        let two_psi = psi.scale_rational(Rational::from_integer(2));
        let sq = &two_psi * &psi;
        assert_eq!(
            sq.coefficient(&Tree::product([Tree::psi(), Tree::psi()])),
            Poly::int(2)
        );
    }

    #[test]
    fn x1_squared() {
        let x = TreeCombination::tree(Tree::x1());
        assert_eq!(&x * &x, TreeCombination::tree(Tree::monomial(0, 2)));
    }

    #[test]
    fn zero_coefficients_pruned() {
        let psi = TreeCombination::tree(Tree::psi());
        assert!((&psi - &psi).is_zero());
    }
}
