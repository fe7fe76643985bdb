//! Characters of `T+` and the maps `Gamma_f = (id (x) f) Delta`.

use std::collections::BTreeMap;

use crate::combination::TreeCombination;
use crate::coproduct::{coproduct_with, PrimeRule};
use crate::degree::ExactDegree;
use crate::poly::Poly;
use crate::tables::DiagramTable;
use crate::tree::Tree;
use crate::AlgebraError;

/// Generator names of `T+` and the variable each one is sent to.
pub const GENERATORS: [(&str, &str); 7] = [
    ("X1", "a"),
    ("<1>", "b"),
    ("<2d1>", "c"),
    ("<1d1>", "d"),
    ("<1d1d>", "g"),
    ("<2d2d1>", "h"),
    ("<2d2d1d>", "w"),
];

/// A multiplicative functional on `T+`, given by its values on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterF {
    values: BTreeMap<Tree, Poly>,
}

impl CharacterF {
    fn from_fn(mut value: impl FnMut(&str) -> Poly) -> Self {
        let table = DiagramTable::standard();
        let values = GENERATORS
            .iter()
            .map(|(name, var)| (table.tree(name).expect("generator in table"), value(var)))
            .collect();
        CharacterF { values }
    }

    /// Generic character `a, b, c, d, g, h, w`, each name followed by `suffix`.
    pub fn symbolic(suffix: &str) -> Self {
        CharacterF::from_fn(|v| Poly::var(&format!("{v}{suffix}")))
    }

    /// The counit: zero on every generator.
    pub fn identity() -> Self {
        CharacterF::from_fn(|_| Poly::zero())
    }

    /// Character with the given values, keyed by variable name (`a` .. `w`).
    pub fn from_values(values: &BTreeMap<String, Poly>) -> Self {
        CharacterF::from_fn(|v| values.get(v).cloned().unwrap_or_default())
    }

    pub fn value(&self, generator: &Tree) -> Option<&Poly> {
        self.values.get(generator)
    }

    pub fn values(&self) -> impl Iterator<Item = (&Tree, &Poly)> {
        self.values.iter()
    }

    /// Values keyed by variable name.
    pub fn named_values(&self) -> BTreeMap<String, Poly> {
        let table = DiagramTable::standard();
        GENERATORS
            .iter()
            .map(|(name, var)| {
                let t = table.tree(name).expect("generator in table");
                (var.to_string(), self.values[&t].clone())
            })
            .collect()
    }

    /// Multiplicative extension to a monomial of `T+`.
    pub fn eval(&self, monomial: &Tree) -> Result<Poly, AlgebraError> {
        let mut out = Poly::one();
        for f in monomial.factors() {
            match f {
                Tree::Monomial { time: 0, space } => {
                    let a = &self.values[&Tree::x1()];
                    for _ in 0..space {
                        out = &out * a;
                    }
                }
                other => {
                    let v = self
                        .values
                        .get(&other)
                        .ok_or_else(|| AlgebraError::UnknownGenerator(other.to_string()))?;
                    out = &out * v;
                }
            }
        }
        Ok(out)
    }
}

pub fn gamma_f(f: &CharacterF, x: &TreeCombination) -> Result<TreeCombination, AlgebraError> {
    gamma_f_with(f, x, PrimeRule::default())
}

pub fn gamma_f_with(
    f: &CharacterF,
    x: &TreeCombination,
    rule: PrimeRule,
) -> Result<TreeCombination, AlgebraError> {
    x.try_map_linear(|t| coproduct_with(t, rule)?.contract_right(|r| f.eval(r)))
}

fn gamma_tree(f: &CharacterF, t: &Tree) -> Result<TreeCombination, AlgebraError> {
    gamma_f(f, &TreeCombination::tree(t.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyCheck {
    pub property: String,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Outcome of the four structure group checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureGroupReport {
    pub checks: Vec<PropertyCheck>,
}

impl StructureGroupReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(property: &str, witness: Option<String>) -> PropertyCheck {
    PropertyCheck {
        property: property.to_string(),
        passed: witness.is_none(),
        witness,
    }
}

fn first_failure<I>(items: I) -> Option<String>
where
    I: IntoIterator<Item = Result<Option<String>, AlgebraError>>,
{
    for item in items {
        match item {
            Ok(None) => {}
            Ok(Some(w)) => return Some(w),
            Err(e) => return Some(e.to_string()),
        }
    }
    None
}

fn is_polynomial(x: &TreeCombination) -> bool {
    x.trees().all(Tree::is_polynomial)
}

/// Check the defining properties of the structure group on all of `W`.
pub fn check_structure_group(f: &CharacterF) -> StructureGroupReport {
    let table = DiagramTable::standard();
    let basis: Vec<Tree> = table.basis_rows().map(|r| r.tree.clone()).collect();

    let fixed = first_failure([Tree::Xi, Tree::one(), Tree::x1()].into_iter().map(|t| {
        let img = gamma_tree(f, &t)?;
        let diff = &img - &TreeCombination::tree(t.clone());
        let ok = if t == Tree::x1() {
            diff.trees().all(Tree::is_one)
        } else {
            diff.is_zero()
        };
        Ok((!ok).then(|| format!("Gamma {t} = {img}")))
    }));

    let triangular = first_failure(basis.iter().map(|t| {
        let img = gamma_tree(f, t)?;
        let diff = &img - &TreeCombination::tree(t.clone());
        let deg = t.degree();
        let bad = diff
            .trees()
            .find(|s| s.degree().cmp_uniform(&deg) != Some(std::cmp::Ordering::Less));
        Ok(bad.map(|s| format!("Gamma {} contains {} of degree {}", t, s, s.degree())))
    }));

    let mut pairs = Vec::new();
    for (i, s) in basis.iter().enumerate() {
        for t in &basis[i..] {
            if table.is_basis(&s.times(t)) {
                pairs.push((s.clone(), t.clone()));
            }
        }
    }
    let multiplicative = first_failure(pairs.iter().map(|(s, t)| {
        let lhs = gamma_tree(f, &s.times(t))?;
        let rhs = &gamma_tree(f, s)? * &gamma_tree(f, t)?;
        Ok((lhs != rhs).then(|| format!("Gamma({s}*{t}) != Gamma({s}) Gamma({t})")))
    }));

    let mut lifted = Vec::new();
    for t in &basis {
        for (name, op) in [("I", Tree::integ as fn(Tree) -> Option<Tree>), ("I'", Tree::integ_prime)] {
            if let Some(it) = op(t.clone()) {
                if table.name_of(&it).is_some() {
                    lifted.push((name, t.clone(), it));
                }
            }
        }
    }
    let commutes = first_failure(lifted.iter().map(|(name, t, it)| {
        let lhs = gamma_tree(f, it)?;
        let inner = gamma_tree(f, t)?;
        let rhs = if *name == "I" { inner.integ() } else { inner.integ_prime() };
        let diff = &lhs - &rhs;
        Ok((!is_polynomial(&diff)).then(|| format!("Gamma {name}({t}) - {name}(Gamma {t}) = {diff}")))
    }));

    StructureGroupReport {
        checks: vec![
            check("fixes Xi and 1, shifts X1", fixed),
            check("triangular", triangular),
            check("multiplicative", multiplicative),
            check("commutes with integration up to polynomials", commutes),
        ],
    }
}

/// Find `h` with `Gamma_f Gamma_g = Gamma_h` on `W`.
pub fn compose_gamma(f: &CharacterF, g: &CharacterF) -> Result<CharacterF, AlgebraError> {
    let table = DiagramTable::standard();
    let basis: Vec<Tree> = table.basis_rows().map(|r| r.tree.clone()).collect();
    let generators: Vec<Tree> = g.values.keys().cloned().collect();

    let mut targets = BTreeMap::new();
    let mut deltas = BTreeMap::new();
    for t in &basis {
        let once = gamma_tree(g, t)?;
        targets.insert(t.clone(), gamma_f(f, &once)?);
        deltas.insert(t.clone(), coproduct_with(t, PrimeRule::default())?);
    }

    let mut known: BTreeMap<Tree, Poly> = BTreeMap::new();
    let eval_known = |known: &BTreeMap<Tree, Poly>, m: &Tree| -> Option<Poly> {
        let mut out = Poly::one();
        for fac in m.factors() {
            let v = match fac {
                Tree::Monomial { time: 0, space } => {
                    let a = known.get(&Tree::x1())?;
                    let mut p = Poly::one();
                    for _ in 0..space {
                        p = &p * a;
                    }
                    p
                }
                other => known.get(&other)?.clone(),
            };
            out = &out * &v;
        }
        Some(out)
    };

    loop {
        let mut progress = false;
        for t in &basis {
            let delta = &deltas[t];
            let lefts: Vec<Tree> = delta.terms().map(|(l, _, _)| l.clone()).collect();
            for left in lefts {
                let mut unknown = Vec::new();
                let mut rest = Poly::zero();
                for (l, r, c) in delta.terms() {
                    if *l != left {
                        continue;
                    }
                    match eval_known(&known, r) {
                        Some(v) => rest += &(c * &v),
                        None => unknown.push((r.clone(), c.clone())),
                    }
                }
                if let [(r, c)] = unknown.as_slice() {
                    let is_generator = generators.contains(r) && !known.contains_key(r);
                    if let (true, Some(c)) = (is_generator, c.as_constant()) {
                        let target = targets[t].coefficient(&left);
                        let value = (&target - &rest).scale(c.recip());
                        known.insert(r.clone(), value);
                        progress = true;
                    }
                }
            }
        }
        if known.len() == generators.len() || !progress {
            break;
        }
    }
    if let Some(missing) = generators.iter().find(|g| !known.contains_key(*g)) {
        return Err(AlgebraError::Composition {
            tree: missing.to_string(),
            residual: "generator not determined".into(),
        });
    }

    let h = CharacterF { values: known };
    for t in &basis {
        let residual = &targets[t] - &gamma_tree(&h, t)?;
        if !residual.is_zero() {
            return Err(AlgebraError::Composition {
                tree: t.to_string(),
                residual: residual.to_string(),
            });
        }
    }
    Ok(h)
}

/// Degree of the lowest correction term in `Gamma_f t - t`, if any.
pub fn lowest_correction(f: &CharacterF, t: &Tree) -> Result<Option<ExactDegree>, AlgebraError> {
    let diff = &gamma_tree(f, t)? - &TreeCombination::tree(t.clone());
    Ok(diff.trees().map(Tree::degree).max())
}
