//! The coproduct `Delta: T -> T (x) T+`.

use crate::combination::TensorElement;
use crate::degree::ExactDegree;
use crate::poly::Poly;
use crate::tree::Tree;
use crate::AlgebraError;

/// How `Delta I'(t)` is expanded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PrimeRule {
    /// `(I' (x) id) Delta t`, with no recentring term.
    #[default]
    Primitive,
    /// Adds `1 (x) I'(t)` whenever `I'(t)` has positive degree.
    Recentred,
}

fn outside(t: &Tree, reason: &str) -> AlgebraError {
    AlgebraError::OutsideDomain {
        tree: t.to_string(),
        reason: reason.to_string(),
    }
}

pub fn coproduct(t: &Tree) -> Result<TensorElement, AlgebraError> {
    coproduct_with(t, PrimeRule::default())
}

pub fn coproduct_with(t: &Tree, rule: PrimeRule) -> Result<TensorElement, AlgebraError> {
    match t {
        Tree::Xi => Ok(TensorElement::simple(Tree::Xi, Tree::one())),
        Tree::Monomial { time, .. } if *time > 0 => Err(outside(t, "time monomials do not occur")),
        Tree::Monomial { space, .. } => {
            let x1 = &TensorElement::simple(Tree::x1(), Tree::one())
                + &TensorElement::simple(Tree::one(), Tree::x1());
            let mut out = TensorElement::simple(Tree::one(), Tree::one());
            for _ in 0..*space {
                out = &out * &x1;
            }
            Ok(out)
        }
        Tree::Product(fs) => {
            let mut out = TensorElement::simple(Tree::one(), Tree::one());
            for f in fs {
                out = &out * &coproduct_with(f, rule)?;
            }
            Ok(out)
        }
        Tree::Integ(inner) => {
            let deg = t.degree();
            let zero = ExactDegree::zero();
            let one = ExactDegree::int(1);
            let two = ExactDegree::int(2);
            let pos = deg.cmp_uniform(&zero).ok_or_else(|| outside(t, "degree sign depends on kappa"))?;
            if pos.is_le() {
                return Err(outside(t, "integration of non-positive degree"));
            }
            let above_one = deg.cmp_uniform(&one).ok_or_else(|| outside(t, "degree ambiguous at 1"))?;
            if deg.cmp_uniform(&two).is_none_or(|o| o.is_ge()) {
                return Err(outside(t, "degree of at least 2"));
            }
            let mut out = coproduct_with(inner, rule)?.map_left(|l| Tree::integ(l.clone()));
            out.add_term(Tree::one(), t.clone(), &Poly::one());
            if above_one.is_gt() {
                let d = Tree::IntegPrime(inner.clone());
                out.add_term(Tree::one(), Tree::x1().times(&d), &Poly::one());
                out.add_term(Tree::x1(), d, &Poly::one());
            }
            Ok(out)
        }
        Tree::IntegPrime(inner) => {
            let mut out = coproduct_with(inner, rule)?.map_left(|l| Tree::integ_prime(l.clone()));
            if rule == PrimeRule::Recentred && t.degree().is_positive() {
                out.add_term(Tree::one(), t.clone(), &Poly::one());
            }
            Ok(out)
        }
    }
}

/// `(id (x) eps) x` with `eps(1) = 1` and `eps` zero on every generator.
pub fn counit(x: &TensorElement) -> crate::TreeCombination {
    x.contract_right::<_, ()>(|r| Ok(if r.is_one() { Poly::one() } else { Poly::zero() }))
        .expect("counit is total")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::DiagramTable;
    use crate::TreeCombination;

    #[test]
    fn unit_and_noise() {
        assert_eq!(
            coproduct(&Tree::one()).unwrap(),
            TensorElement::simple(Tree::one(), Tree::one())
        );
        assert_eq!(coproduct(&Tree::Xi).unwrap(), TensorElement::simple(Tree::Xi, Tree::one()));
    }

    #[test]
    fn counit_recovers_every_basis_tree() {
        let table = DiagramTable::standard();
        for row in table.basis_rows() {
            let d = coproduct(&row.tree).unwrap();
            assert_eq!(counit(&d), TreeCombination::tree(row.tree.clone()), "{}", row.name);
        }
    }

    #[test]
    fn rejects_trees_outside_domain() {
        let table = DiagramTable::standard();
        assert!(coproduct(&Tree::monomial(1, 0)).is_err());
        // I(<2d2d1>) has degree above 2.
        let big = Tree::integ(table.tree("<2d2d1>").unwrap()).unwrap();
        assert!(coproduct(&big).is_err());
        // I(<2d>) is fine, I(<2d>*<2d>) has negative degree.
        let neg = Tree::integ(table.tree("<2d>").unwrap().times(&table.tree("<2d>").unwrap())).unwrap();
        assert!(coproduct(&neg).is_err());
    }

    #[test]
    fn recentred_rule_adds_terms() {
        let table = DiagramTable::standard();
        let t = table.tree("<1d2d>").unwrap();
        let prim = coproduct_with(&t, PrimeRule::Primitive).unwrap();
        let rec = coproduct_with(&t, PrimeRule::Recentred).unwrap();
        let diff = &rec - &prim;
        let expected = TensorElement::simple(Tree::psi(), table.tree("<1d1d>").unwrap());
        assert_eq!(diff, expected);
    }
}
