//! The diagram table: names, algebraic decodings and reference images.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::combination::{TensorElement, TreeCombination};
use crate::degree::ExactDegree;
use crate::parse::{parse_combination, parse_poly, parse_tensor, parse_tree};
use crate::poly::Poly;
use crate::tree::Tree;
use crate::AlgebraError;

const STANDARD_TABLE: &str = include_str!("../data/tables.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// One of the fourteen symbols spanning the model space.
    Basis,
    /// A tree outside the model space that the solution expansion uses.
    Extended,
}

#[derive(Clone, Debug)]
pub struct DiagramRow {
    pub name: String,
    pub tree: Tree,
    pub membership: Membership,
    pub degree: Option<ExactDegree>,
    pub coproduct: Option<TensorElement>,
    pub gamma: Option<TreeCombination>,
    pub renormalization: Option<TreeCombination>,
}

#[derive(Clone, Debug)]
pub struct DiagramTable {
    rows: Vec<DiagramRow>,
    by_tree: BTreeMap<Tree, usize>,
}

/// One basis element with its computed degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub tree: Tree,
    pub degree: ExactDegree,
}

fn table_err(line: usize, message: impl Into<String>) -> AlgebraError {
    AlgebraError::Table {
        line,
        message: message.into(),
    }
}

fn opt(s: &str) -> Option<&str> {
    if s == "-" {
        None
    } else {
        Some(s)
    }
}

fn parse_degree(text: &str) -> Result<ExactDegree, AlgebraError> {
    // Allow the compact form `2k` for `2*k`.
    let mut expanded = String::new();
    let mut prev_digit = false;
    for ch in text.chars() {
        if ch == 'k' && prev_digit {
            expanded.push('*');
        }
        prev_digit = ch.is_ascii_digit();
        expanded.push(ch);
    }
    let p = parse_poly(&expanded)?;
    let mut out = ExactDegree::zero();
    for (m, c) in p.terms() {
        if m.is_unit() {
            out.rational = *c;
        } else if m.vars().collect::<Vec<_>>() == [("k", 1)] {
            out.kappa = *c;
        } else {
            return Err(AlgebraError::Parse {
                input: text.to_string(),
                message: "degree must be affine in k".into(),
            });
        }
    }
    Ok(out)
}

impl DiagramTable {
    /// The table shipped with the crate.
    pub fn standard() -> Self {
        DiagramTable::parse(STANDARD_TABLE).expect("bundled diagram table is well formed")
    }

    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        struct Raw<'a> {
            line: usize,
            cols: Vec<&'a str>,
        }
        let mut raws = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = trimmed.split('|').map(str::trim).collect();
            if cols.len() != 7 {
                return Err(table_err(line_no, format!("expected 7 columns, found {}", cols.len())));
            }
            raws.push(Raw { line: line_no, cols });
        }

        // Pass 1: decodings, each may reference earlier rows.
        let mut names: BTreeMap<String, Tree> = BTreeMap::new();
        let mut trees = Vec::new();
        for raw in &raws {
            let lookup = |n: &str| names.get(n).cloned();
            let tree = parse_tree(raw.cols[2], &lookup).map_err(|e| table_err(raw.line, e.to_string()))?;
            let name = raw.cols[1].to_string();
            if names.insert(name.clone(), tree.clone()).is_some() {
                return Err(table_err(raw.line, format!("duplicate name {name}")));
            }
            trees.push(tree);
        }

        // Pass 2: reference images, which may reference any row.
        let lookup = |n: &str| names.get(n).cloned();
        let mut rows = Vec::new();
        let mut by_tree = BTreeMap::new();
        for (raw, tree) in raws.iter().zip(trees) {
            let membership = match raw.cols[0] {
                "W" => Membership::Basis,
                "ext" => Membership::Extended,
                other => return Err(table_err(raw.line, format!("unknown set {other}"))),
            };
            let wrap = |e: AlgebraError| table_err(raw.line, e.to_string());
            let degree = opt(raw.cols[3]).map(parse_degree).transpose().map_err(wrap)?;
            let coproduct = opt(raw.cols[4])
                .map(|s| parse_tensor(s, &lookup))
                .transpose()
                .map_err(wrap)?;
            let gamma = opt(raw.cols[5])
                .map(|s| parse_combination(s, &lookup))
                .transpose()
                .map_err(wrap)?;
            let renormalization = opt(raw.cols[6])
                .map(|s| parse_combination(s, &lookup))
                .transpose()
                .map_err(wrap)?;
            if by_tree.insert(tree.clone(), rows.len()).is_some() {
                return Err(table_err(raw.line, "two names decode to the same tree"));
            }
            rows.push(DiagramRow {
                name: raw.cols[1].to_string(),
                tree,
                membership,
                degree,
                coproduct,
                gamma,
                renormalization,
            });
        }
        Ok(DiagramTable { rows, by_tree })
    }

    pub fn rows(&self) -> &[DiagramRow] {
        &self.rows
    }

    pub fn basis_rows(&self) -> impl Iterator<Item = &DiagramRow> {
        self.rows.iter().filter(|r| r.membership == Membership::Basis)
    }

    pub fn row(&self, name: &str) -> Option<&DiagramRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn tree(&self, name: &str) -> Result<Tree, AlgebraError> {
        self.row(name)
            .map(|r| r.tree.clone())
            .ok_or_else(|| AlgebraError::UnknownDiagram(name.to_string()))
    }

    pub fn name_of(&self, tree: &Tree) -> Option<&str> {
        self.by_tree.get(tree).map(|&i| self.rows[i].name.as_str())
    }

    pub fn is_basis(&self, tree: &Tree) -> bool {
        self.by_tree
            .get(tree)
            .is_some_and(|&i| self.rows[i].membership == Membership::Basis)
    }

    pub fn lookup(&self) -> impl Fn(&str) -> Option<Tree> + '_ {
        move |n| self.row(n).map(|r| r.tree.clone())
    }

    pub fn parse_combination(&self, text: &str) -> Result<TreeCombination, AlgebraError> {
        parse_combination(text, &self.lookup())
    }

    pub fn parse_tensor(&self, text: &str) -> Result<TensorElement, AlgebraError> {
        parse_tensor(text, &self.lookup())
    }

    /// A tree written with diagram names where available.
    pub fn render_tree(&self, t: &Tree) -> String {
        if let Some(n) = self.name_of(t) {
            return n.to_string();
        }
        match t {
            Tree::Product(fs) => fs
                .iter()
                .map(|f| self.render_tree(f))
                .collect::<Vec<_>>()
                .join("*"),
            Tree::Integ(c) => format!("I({})", self.render_tree(c)),
            Tree::IntegPrime(c) => format!("I'({})", self.render_tree(c)),
            other => other.to_string(),
        }
    }

    pub fn render(&self, x: &TreeCombination) -> String {
        render_terms(x.terms().map(|(t, c)| (self.render_tree(t), c)))
    }

    pub fn render_tensor(&self, x: &TensorElement) -> String {
        render_terms(
            x.terms()
                .map(|(l, r, c)| (format!("{} ⊗ {}", self.render_tree(l), self.render_tree(r)), c)),
        )
    }
}

fn render_terms<'a, I: Iterator<Item = (String, &'a Poly)>>(terms: I) -> String {
    let mut out = String::new();
    for (i, (body, c)) in terms.enumerate() {
        let sep = if i == 0 { "" } else { " + " };
        match c.as_constant() {
            Some(r) if r == 1.into() => write!(out, "{sep}{body}"),
            Some(r) => write!(out, "{sep}({r})*{body}"),
            None => write!(out, "{sep}({c})*{body}"),
        }
        .expect("writing to a String");
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// The fourteen basis symbols with their computed degrees, in table order.
pub fn basis_w(table: &DiagramTable) -> Vec<BasisElement> {
    table
        .basis_rows()
        .map(|r| BasisElement {
            name: r.name.clone(),
            tree: r.tree.clone(),
            degree: r.tree.degree(),
        })
        .collect()
}
