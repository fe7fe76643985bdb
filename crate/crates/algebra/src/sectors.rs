//! Exponents of the sectors in the fixed point problem.

use crate::degree::ExactDegree;
use crate::picard::{picard_dw, PicardOptions};
use crate::tables::DiagramTable;
use crate::AlgebraError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectorRow {
    pub gamma: ExactDegree,
    pub eta: ExactDegree,
    pub sigma: ExactDegree,
    pub mu: ExactDegree,
    pub alpha: ExactDegree,
}

/// Exponents `(eta, sigma, mu)` of a factor.
type Triple = [ExactDegree; 3];

fn add(x: Triple, y: Triple) -> Triple {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
}

/// Rows for `dW^2, dW dPsi, dPsi^2, a1 dW, a1 dPsi, a2`.
pub fn sector_exponents() -> Result<[SectorRow; 6], AlgebraError> {
    let kappa = ExactDegree::frac(0, 1, 1);
    let one = ExactDegree::int(1);
    let eta = kappa;
    let sigma = ExactDegree::frac(1, 2, 2);

    let table = DiagramTable::standard();
    let dw = picard_dw(&PicardOptions::default())?;
    let alpha_dw = dw.trees().map(|t| t.degree()).min().unwrap_or(ExactDegree::zero());
    let alpha_psi = table.tree("<1d>")?.degree();

    let dw_w: Triple = [eta - one, sigma - one, kappa - one];
    let psi_w: Triple = [alpha_psi; 3];
    let poly_w: Triple = [ExactDegree::zero(); 3];
    let zero = ExactDegree::zero();

    let rows: [(Triple, ExactDegree); 6] = [
        (add(dw_w, dw_w), alpha_dw + alpha_dw),
        (add(dw_w, psi_w), alpha_dw + alpha_psi),
        (add(psi_w, psi_w), alpha_psi + alpha_psi),
        (add(poly_w, dw_w), alpha_dw),
        (add(poly_w, psi_w), alpha_psi),
        (poly_w, zero),
    ];
    Ok(rows.map(|(w, alpha)| SectorRow {
        gamma: kappa,
        eta: w[0],
        sigma: w[1],
        mu: w[2],
        alpha,
    }))
}
