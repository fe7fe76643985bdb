//! Comparison of computed images against the reference table.

use serde::Serialize;

use crate::combination::TreeCombination;
use crate::coproduct::{coproduct_with, PrimeRule};
use crate::degree::ExactDegree;
use crate::parse::parse_poly;
use crate::picard::{picard_dw, picard_w, q_leq0_nonlinearity, renorm_constants, PicardOptions};
use crate::poly::rat;
use crate::renorm::{renormalize_with, Expansion, RenormParams};
use crate::sectors::sector_exponents;
use crate::structure_group::{check_structure_group, gamma_f, CharacterF};
use crate::tables::DiagramTable;
use crate::AlgebraError;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub rows_checked: usize,
    pub mismatches: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VerificationReport {
    pub tables: Vec<CheckResult>,
    pub derived: Vec<CheckResult>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.tables.iter().chain(&self.derived).all(|c| c.passed)
    }

    pub fn tables_exact(&self) -> usize {
        self.tables.iter().filter(|c| c.passed).count()
    }

    /// Plain text rendering, one line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in self.tables.iter().chain(&self.derived) {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {} ({} rows)\n", c.name, c.rows_checked));
            for m in &c.mismatches {
                out.push_str(&format!("    {m}\n"));
            }
        }
        out.push_str(&format!("{}/{} tables exact\n", self.tables_exact(), self.tables.len()));
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

fn result(name: &str, rows: usize, mismatches: Vec<String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: mismatches.is_empty(),
        rows_checked: rows,
        mismatches,
    }
}

fn err_string(e: AlgebraError) -> String {
    e.to_string()
}

/// Run every table comparison and derived check against `table`.
pub fn verify_tables(table: &DiagramTable) -> VerificationReport {
    let mut tables = Vec::new();
    let f = CharacterF::symbolic("");
    let params = RenormParams::symbolic();

    let mut degree_bad = Vec::new();
    let mut degree_rows = 0;
    for row in table.rows() {
        if let Some(expected) = row.degree {
            degree_rows += 1;
            let got = row.tree.degree();
            if got != expected {
                degree_bad.push(format!("{}: computed {got}, table {expected}", row.name));
            }
        }
    }
    if table.basis_rows().count() != 14 {
        degree_bad.push(format!("basis has {} elements", table.basis_rows().count()));
    }
    tables.push(result("degrees", degree_rows, degree_bad));

    let mut co_bad = Vec::new();
    let mut co_rows = 0;
    let mut ga_bad = Vec::new();
    let mut ga_rows = 0;
    let mut mg_bad = Vec::new();
    let mut mg_rows = 0;
    for row in table.rows() {
        if let Some(expected) = &row.coproduct {
            co_rows += 1;
            match coproduct_with(&row.tree, PrimeRule::Primitive) {
                Ok(got) if &got == expected => {}
                Ok(got) => co_bad.push(format!(
                    "{}: computed {}, table {}",
                    row.name,
                    table.render_tensor(&got),
                    table.render_tensor(expected)
                )),
                Err(e) => co_bad.push(format!("{}: {}", row.name, err_string(e))),
            }
        }
        if let Some(expected) = &row.gamma {
            ga_rows += 1;
            match gamma_f(&f, &TreeCombination::tree(row.tree.clone())) {
                Ok(got) if &got == expected => {}
                Ok(got) => ga_bad.push(format!(
                    "{}: computed {}, table {}",
                    row.name,
                    table.render(&got),
                    table.render(expected)
                )),
                Err(e) => ga_bad.push(format!("{}: {}", row.name, err_string(e))),
            }
        }
        if let Some(expected) = &row.renormalization {
            mg_rows += 1;
            let got = renormalize_with(&params, &TreeCombination::tree(row.tree.clone()), Expansion::FirstOrder);
            if &got != expected {
                mg_bad.push(format!(
                    "{}: computed {}, table {}",
                    row.name,
                    table.render(&got),
                    table.render(expected)
                ));
            }
        }
    }
    tables.push(result("coproduct", co_rows, co_bad));
    tables.push(result("structure group action", ga_rows, ga_bad));
    tables.push(result("renormalisation", mg_rows, mg_bad));

    let derived = vec![
        structure_group_check(&f),
        expansion_check(table),
        nonlinearity_check(table),
        constants_check(&params),
        sectors_check(),
    ];

    VerificationReport {
        tables,
        derived,
        notes: notes(table, &params),
    }
}

fn structure_group_check(f: &CharacterF) -> CheckResult {
    let report = check_structure_group(f);
    let bad = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.property, c.witness.clone().unwrap_or_default()))
        .collect();
    result("structure group properties", report.checks.len(), bad)
}

fn expect_combination(table: &DiagramTable, name: &str, got: Result<TreeCombination, AlgebraError>, want: &str) -> CheckResult {
    let want = table.parse_combination(want).expect("reference expression parses");
    let bad = match got {
        Ok(g) if g == want => Vec::new(),
        Ok(g) => vec![format!("computed {}, expected {}", table.render(&g), table.render(&want))],
        Err(e) => vec![err_string(e)],
    };
    result(name, 1, bad)
}

fn expansion_check(table: &DiagramTable) -> CheckResult {
    let opts = PicardOptions::default();
    let mut w = expect_combination(
        table,
        "solution expansion",
        picard_w(&opts),
        "w0 + wt*X1 + 1/2*<2d1> + 1/4*<2d2d1> + (a1_0 + wt/2)*<1d1>",
    );
    let dw = expect_combination(
        table,
        "derivative of the solution",
        picard_dw(&opts),
        "wt + 1/2*<2d1d> + 1/4*<2d2d1d> + (a1_0 + wt/2)*<1d1d>",
    );
    w.mismatches.extend(dw.mismatches);
    w.rows_checked = 2;
    w.passed = w.mismatches.is_empty();
    w
}

fn nonlinearity_check(table: &DiagramTable) -> CheckResult {
    expect_combination(
        table,
        "projected nonlinearity",
        q_leq0_nonlinearity(&PicardOptions::default()),
        "wt*wt + 1/4*<tree2> + wt*<2d1d> + 2*wt*<1d> + <2d2d> + 1/2*<tree1> + (2*a1_0 + wt)*<1d2d> + <2d>",
    )
}

fn constants_check(params: &RenormParams) -> CheckResult {
    let expected = [
        parse_poly("C0").expect("literal"),
        parse_poly("2*C0").expect("literal"),
        parse_poly("1/4*C2 + 1/2*C3 + 2*a1_0*C0 + C1").expect("literal"),
    ];
    let bad = match renorm_constants(params, &PicardOptions::default()) {
        Ok(c) => [c.c1, c.c2, c.c3]
            .iter()
            .zip(&expected)
            .enumerate()
            .filter(|(_, (g, e))| g != e)
            .map(|(i, (g, e))| format!("c{}: computed {g}, expected {e}", i + 1))
            .collect(),
        Err(e) => vec![err_string(e)],
    };
    result("renormalised equation constants", 3, bad)
}

fn sectors_check() -> CheckResult {
    let d = |p: i64, q: i64, k: i64| ExactDegree::frac(p, q, k);
    let expected = [
        [d(-2, 1, 2), d(-1, 1, 4), d(-2, 1, 2), d(0, 1, -4)],
        [d(-3, 2, 0), d(-1, 1, 1), d(-3, 2, 0), d(-1, 2, -3)],
        [d(-1, 1, -2), d(-1, 1, -2), d(-1, 1, -2), d(-1, 1, -2)],
        [d(-1, 1, 1), d(-1, 2, 2), d(-1, 1, 1), d(0, 1, -2)],
        [d(-1, 2, -1), d(-1, 2, -1), d(-1, 2, -1), d(-1, 2, -1)],
        [d(0, 1, 0); 4],
    ];
    let bad = match sector_exponents() {
        Ok(rows) => rows
            .iter()
            .zip(expected)
            .enumerate()
            .filter_map(|(i, (r, e))| {
                let got = [r.eta, r.sigma, r.mu, r.alpha];
                (got != e || r.gamma != d(0, 1, 1)).then(|| {
                    format!(
                        "row {i}: computed ({}, {}, {}, {}), expected ({}, {}, {}, {})",
                        got[0], got[1], got[2], got[3], e[0], e[1], e[2], e[3]
                    )
                })
            })
            .collect(),
        Err(e) => vec![err_string(e)],
    };
    result("sector exponents", 6, bad)
}

fn notes(table: &DiagramTable, params: &RenormParams) -> Vec<String> {
    let mut notes = Vec::new();
    for row in table.basis_rows() {
        let (Ok(p), Ok(r)) = (
            coproduct_with(&row.tree, PrimeRule::Primitive),
            coproduct_with(&row.tree, PrimeRule::Recentred),
        ) else {
            continue;
        };
        let diff = &r - &p;
        if !diff.is_zero() {
            notes.push(format!(
                "recentring I' adds {} to the coproduct of {}",
                table.render_tensor(&diff),
                row.name
            ));
        }
    }
    for row in table.basis_rows() {
        let t = TreeCombination::tree(row.tree.clone());
        let diff = &renormalize_with(params, &t, Expansion::Exponential) - &renormalize_with(params, &t, Expansion::FirstOrder);
        if !diff.is_zero() {
            notes.push(format!(
                "the exponential of the contractions adds {} to M_g {}",
                table.render(&diff),
                row.name
            ));
        }
    }
    let exp_opts = PicardOptions {
        expansion: Expansion::Exponential,
        ..PicardOptions::default()
    };
    if let Ok(c) = renorm_constants(params, &exp_opts) {
        notes.push(format!("with the exponential, c3 = {}", c.c3));
    }
    let unit = PicardOptions {
        cross_weight: rat(1, 1),
        ..PicardOptions::default()
    };
    if let Ok(w) = picard_w(&unit) {
        notes.push(format!("with unit weight on dW dPsi, W = {}", table.render(&w)));
    }
    notes
}
