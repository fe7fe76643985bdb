//! Picard expansion of the abstract solution and the constants of the
//! renormalised equation.

use crate::combination::TreeCombination;
use crate::degree::ExactDegree;
use crate::poly::{rat, Poly, Rational};
use crate::renorm::{renormalize_with, Expansion, RenormParams};
use crate::tree::Tree;
use crate::AlgebraError;

/// Variable for the `X1` coefficient of `W`.
pub const W_TILDE: &str = "wt";
/// Variable for the constant coefficient of `W`.
pub const W_CONST: &str = "w0";
/// Variables for `a1(X1) = a1_0 + a1_1 X1`.
pub const A1_0: &str = "a1_0";
pub const A1_1: &str = "a1_1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PicardOptions {
    /// Weight of `dW dPsi` in the integrated nonlinearity.
    pub cross_weight: Rational,
    pub expansion: Expansion,
    pub max_iterations: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            cross_weight: rat(1, 2),
            expansion: Expansion::FirstOrder,
            max_iterations: 16,
        }
    }
}

/// Solution regularity `3/2 + kappa`.
pub fn gamma() -> ExactDegree {
    ExactDegree::frac(3, 2, 1)
}

fn var(name: &str) -> TreeCombination {
    TreeCombination::scalar(Poly::var(name))
}

fn derivative(x: &TreeCombination) -> Result<TreeCombination, AlgebraError> {
    x.derivative().map_err(|t| AlgebraError::NotDifferentiable(t.to_string()))
}

/// `W` from Picard iteration, truncated below `gamma`.
pub fn picard_w(opts: &PicardOptions) -> Result<TreeCombination, AlgebraError> {
    let poly_part = &var(W_CONST) + &TreeCombination::term(Poly::var(W_TILDE), Tree::x1());
    let psi = TreeCombination::tree(Tree::psi());
    let a1 = &var(A1_0) + &TreeCombination::term(Poly::var(A1_1), Tree::x1());
    let half = rat(1, 2);

    let mut w = poly_part.clone();
    for _ in 0..opts.max_iterations {
        let dw = derivative(&w)?;
        let rhs = [
            (&dw * &dw).scale_rational(half),
            (&dw * &psi).scale_rational(opts.cross_weight),
            (&psi * &psi).scale_rational(half),
            &a1 * &dw,
            &a1 * &psi,
        ]
        .iter()
        .fold(TreeCombination::zero(), |acc, x| &acc + x);
        let next = &rhs.integ().project_lt(gamma()) + &poly_part;
        if next == w {
            return Ok(w);
        }
        w = next;
    }
    Err(AlgebraError::ShapeMismatch("Picard iteration did not stabilise".into()))
}

pub fn picard_dw(opts: &PicardOptions) -> Result<TreeCombination, AlgebraError> {
    derivative(&picard_w(opts)?)
}

/// `Q_{<=0}((dW)^2 + 2 dW dPsi + (dPsi)^2)`.
pub fn q_leq0_nonlinearity(opts: &PicardOptions) -> Result<TreeCombination, AlgebraError> {
    let dw = picard_dw(opts)?;
    Ok(square_form(&dw))
}

fn square_form(dw: &TreeCombination) -> TreeCombination {
    let psi = TreeCombination::tree(Tree::psi());
    let sum = &(&(dw * dw) + &(dw * &psi).scale_rational(rat(2, 1))) + &(&psi * &psi);
    sum.project_leq(ExactDegree::zero())
}

/// Constants of the renormalised equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenormConstants {
    pub c1: Poly,
    pub c2: Poly,
    pub c3: Poly,
}

/// Match `M_g Q(...)` against
/// `Q((M_g dW)^2 + 2 (M_g dW) dPsi + dPsi^2) - c1 Q(M_g dW) - c2 dPsi - c3`.
pub fn renorm_constants(params: &RenormParams, opts: &PicardOptions) -> Result<RenormConstants, AlgebraError> {
    let dw = picard_dw(opts)?;
    let mdw = renormalize_with(params, &dw, opts.expansion);
    let q = square_form(&dw);
    let lhs = renormalize_with(params, &q, opts.expansion);
    let d = &lhs - &square_form(&mdw);
    let q_mdw = mdw.project_leq(ExactDegree::zero());

    let table = crate::tables::DiagramTable::standard();
    let anchor = table.tree("<2d1d>")?;
    let anchor_coef = q_mdw.coefficient(&anchor);
    let Some(anchor_coef) = anchor_coef.as_constant().filter(|c| *c != Rational::from_integer(0)) else {
        return Err(AlgebraError::ShapeMismatch(format!("Q(M dW) = {q_mdw}")));
    };
    let c1 = (-&d.coefficient(&anchor)).scale(anchor_coef.recip());
    let psi = Tree::psi();
    let c2 = -&(&d.coefficient(&psi) + &(&c1 * &q_mdw.coefficient(&psi)));
    let one = Tree::one();
    let c3 = -&(&d.coefficient(&one) + &(&c1 * &q_mdw.coefficient(&one)));

    let mut residual = &d + &q_mdw.scale(&c1);
    residual = &residual + &TreeCombination::term(c2.clone(), psi);
    residual = &residual + &TreeCombination::scalar(c3.clone());
    if !residual.is_zero() {
        return Err(AlgebraError::ShapeMismatch(residual.to_string()));
    }

    // The linear part must commute with M_g up to the same projection.
    let a1 = &var(A1_0) + &TreeCombination::term(Poly::var(A1_1), Tree::x1());
    let psi_c = TreeCombination::tree(Tree::psi());
    let lin = |x: &TreeCombination| (&(&a1 * x) + &(&a1 * &psi_c)).project_leq(ExactDegree::zero());
    let lin_residual = &renormalize_with(params, &lin(&dw), opts.expansion) - &lin(&mdw);
    if !lin_residual.is_zero() {
        return Err(AlgebraError::ShapeMismatch(lin_residual.to_string()));
    }
    Ok(RenormConstants { c1, c2, c3 })
}
