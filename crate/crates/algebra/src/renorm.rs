//! The renormalisation maps `M_g` built from contractions `L_0 .. L_3`.

use crate::combination::TreeCombination;
use crate::poly::{Poly, Rational};
use crate::tables::DiagramTable;
use crate::tree::Tree;

/// Constants multiplying the four contractions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenormParams {
    pub c: [Poly; 4],
}

impl RenormParams {
    /// `C0, C1, C2, C3` as indeterminates.
    pub fn symbolic() -> Self {
        RenormParams {
            c: std::array::from_fn(|i| Poly::var(&format!("C{i}"))),
        }
    }

    pub fn from_rationals(values: [Rational; 4]) -> Self {
        RenormParams {
            c: values.map(Poly::constant),
        }
    }

    pub fn zero() -> Self {
        RenormParams {
            c: std::array::from_fn(|_| Poly::zero()),
        }
    }
}

/// How the generators are assembled into `M_g`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Expansion {
    /// `I - sum C_i L_i`.
    #[default]
    FirstOrder,
    /// `exp(-sum C_i L_i)`, summed until the powers vanish.
    Exponential,
}

/// Names of the patterns contracted by `L_0 .. L_3`.
pub const PATTERNS: [&str; 4] = ["<1d2d>", "<2d>", "<tree2>", "<tree1>"];

fn pattern_trees() -> [Tree; 4] {
    let table = DiagramTable::standard();
    PATTERNS.map(|n| table.tree(n).expect("pattern in table"))
}

/// Leftover factors for each labelled way of matching the single factor `p`
/// onto `q`.
fn match_factor(p: &Tree, q: &Tree) -> Vec<Vec<Tree>> {
    match (p, q) {
        (Tree::Integ(a), Tree::Integ(b)) | (Tree::IntegPrime(a), Tree::IntegPrime(b)) => {
            embed(&a.factors(), &b.factors())
        }
        _ if p == q && !matches!(p, Tree::Product(_)) => vec![Vec::new()],
        _ => Vec::new(),
    }
}

/// Leftover factors for each labelled embedding of the multiset `pattern`
/// into the multiset `target`.
fn embed(pattern: &[Tree], target: &[Tree]) -> Vec<Vec<Tree>> {
    fn go(pattern: &[Tree], target: &[Tree], used: &mut Vec<bool>, acc: Vec<Tree>, out: &mut Vec<Vec<Tree>>) {
        let Some((p, rest)) = pattern.split_first() else {
            let mut left = acc;
            left.extend(target.iter().zip(used.iter()).filter(|(_, u)| !**u).map(|(t, _)| t.clone()));
            out.push(left);
            return;
        };
        for j in 0..target.len() {
            if used[j] {
                continue;
            }
            for inner in match_factor(p, &target[j]) {
                used[j] = true;
                let mut next = acc.clone();
                next.extend(inner);
                go(rest, target, used, next, out);
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(pattern, target, &mut vec![false; target.len()], Vec::new(), &mut out);
    out
}

/// Every tree obtained by contracting one occurrence of `pattern` inside `t`,
/// once per labelled embedding. Contractions that leave `I` or `I'` of a
/// polynomial vanish and are dropped.
fn contractions(t: &Tree, pattern: &Tree) -> Vec<Tree> {
    let factors = t.factors();
    let mut out: Vec<Tree> = embed(&pattern.factors(), &factors)
        .into_iter()
        .map(Tree::product)
        .collect();
    for (i, f) in factors.iter().enumerate() {
        let (inner, wrap): (&Tree, fn(Tree) -> Option<Tree>) = match f {
            Tree::Integ(c) => (c, Tree::integ),
            Tree::IntegPrime(c) => (c, Tree::integ_prime),
            _ => continue,
        };
        for r in contractions(inner, pattern) {
            if let Some(nf) = wrap(r) {
                let mut fs = factors.clone();
                fs[i] = nf;
                out.push(Tree::product(fs));
            }
        }
    }
    out
}

fn automorphisms(pattern: &Tree) -> usize {
    embed(&pattern.factors(), &pattern.factors())
        .iter()
        .filter(|l| l.is_empty())
        .count()
}

/// `L` for one pattern, on a single tree.
pub fn contract(t: &Tree, pattern: &Tree) -> TreeCombination {
    let weight = Rational::new(1, automorphisms(pattern) as i64);
    let mut out = TreeCombination::zero();
    for r in contractions(t, pattern) {
        out.add_term(r, &Poly::constant(weight));
    }
    out
}

/// `sum_i C_i L_i`.
fn generator(params: &RenormParams, x: &TreeCombination, patterns: &[Tree; 4]) -> TreeCombination {
    x.map_linear(|t| {
        let mut acc = TreeCombination::zero();
        for (c, p) in params.c.iter().zip(patterns) {
            acc = &acc + &contract(t, p).scale(c);
        }
        Some(acc)
    })
}

pub fn renormalize(params: &RenormParams, x: &TreeCombination) -> TreeCombination {
    renormalize_with(params, x, Expansion::default())
}

pub fn renormalize_with(params: &RenormParams, x: &TreeCombination, expansion: Expansion) -> TreeCombination {
    let patterns = pattern_trees();
    match expansion {
        Expansion::FirstOrder => x - &generator(params, x, &patterns),
        Expansion::Exponential => {
            let mut out = x.clone();
            let mut power = x.clone();
            let mut n = 1i64;
            loop {
                power = (-&generator(params, &power, &patterns)).scale_rational(Rational::new(1, n));
                if power.is_zero() {
                    break;
                }
                out = &out + &power;
                n += 1;
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> DiagramTable {
        DiagramTable::standard()
    }

    #[test]
    fn two_ways_to_contract_inside_2d2d() {
        let t = table().tree("<2d2d>").unwrap();
        let l0 = contract(&t, &table().tree("<1d2d>").unwrap());
        assert_eq!(l0, TreeCombination::term(Poly::int(2), Tree::psi()));
    }

    #[test]
    fn pattern_symmetry_is_divided_out() {
        let t = table().tree("<2d>").unwrap();
        assert_eq!(automorphisms(&t), 2);
        assert_eq!(contract(&t, &t), TreeCombination::tree(Tree::one()));
    }

    #[test]
    fn integration_of_contracted_polynomial_vanishes() {
        let t = table().tree("<2d1d>").unwrap();
        assert!(contract(&t, &table().tree("<2d>").unwrap()).is_zero());
    }

    #[test]
    fn exponential_differs_on_tree1() {
        let t = TreeCombination::tree(table().tree("<tree1>").unwrap());
        let p = RenormParams::symbolic();
        let diff = &renormalize_with(&p, &t, Expansion::Exponential) - &renormalize(&p, &t);
        let c0 = Poly::var("C0");
        assert_eq!(diff, TreeCombination::scalar(&c0 * &c0));
    }

    #[test]
    fn zero_params_act_trivially() {
        for row in table().rows() {
            let t = TreeCombination::tree(row.tree.clone());
            assert_eq!(renormalize(&RenormParams::zero(), &t), t);
        }
    }
}
