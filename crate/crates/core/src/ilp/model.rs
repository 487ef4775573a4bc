use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::exact::{self, compare, grid_pi_multiples, rational, CoefficientExpr, Rational};

use super::IlpError;

type E = CoefficientExpr;

/// How the packing constraint is written before rounding its weights down.
///
/// Both forms state ∑ n_i σ(C[·, a_i]) ≤ 1, but they round different
/// quantities onto the 1/D grid, so the resulting programs can differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintForm {
    /// Weights ⌊D·(1 − cos a_i)/2⌋/D against capacity 1.
    #[default]
    Halved,
    /// Weights ⌊D·(1 − cos a_i)⌋/D against capacity 2.
    Doubled,
}

impl ConstraintForm {
    pub fn capacity(self) -> Rational {
        match self {
            ConstraintForm::Halved => Rational::one(),
            ConstraintForm::Doubled => rational(2, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstraintForm::Halved => "halved",
            ConstraintForm::Doubled => "doubled",
        }
    }
}

/// Number of caps of radius ≥ π/4 any cap body can have.
pub const BIGCAP_CAPACITY: u32 = 4;

/// The discretized integer program
///
/// maximize ∑ n_i c_i  subject to  ∑ n_i w_i ≤ capacity,
///                                 ∑_{i ∈ bigcap} n_i ≤ 4,  n_i ∈ ℤ≥0,
///
/// with every coefficient an exact multiple of 1/D.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    pub t: usize,
    pub d: u64,
    pub form: ConstraintForm,
    /// a_i/π for i = 0..=t.
    pub grid: Vec<Rational>,
    /// c_i ≥ 1 − σ(C_{π/2 − a_{i+1}}), rounded up.
    pub obj: Vec<Rational>,
    /// w_i ≤ packing weight of a cap of radius a_i, rounded down.
    pub weight: Vec<Rational>,
    pub capacity: Rational,
    /// Indices i with a_i ≥ π/4 (sorted).
    pub bigcap_indices: Vec<usize>,
    pub bigcap_capacity: u32,
}

impl IlpModel {
    pub fn is_big(&self, i: usize) -> bool {
        self.bigcap_indices.binary_search(&i).is_ok()
    }
}

/// Which closed form of σ(C_θ) applies at θ = qπ, decided by certified
/// comparison against ½·arccos(−1/3) and arccos(1/3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectivePiece {
    /// θ = 0 (only at a_t = π/2): the limiting coefficient 1.
    Degenerate,
    Disjoint,
    Overlapping,
    Covering,
}

pub fn theta_tangent_expr() -> CoefficientExpr {
    E::ratio(-1, 3).arccos() / E::int(2)
}

pub fn theta_cover_expr() -> CoefficientExpr {
    E::ratio(1, 3).arccos()
}

/// A_θ = (1/2π)·(−arccos((−1/3 − cos²θ)/sin²θ) − 2·arccos(√2·cot θ)·cos θ + π).
pub fn lune_area_expr(theta: &CoefficientExpr) -> CoefficientExpr {
    let cos = theta.clone().cos();
    let sin = theta.clone().sin();
    let first = ((E::ratio(-1, 3) - cos.clone() * cos.clone()) / (sin.clone() * sin)).arccos();
    let second = (E::int(2).sqrt() * theta.clone().cot()).arccos();
    (-first - E::int(2) * second * cos + E::pi()) / (E::int(2) * E::pi())
}

pub fn objective_piece(theta_pi: &Rational) -> Result<ObjectivePiece, IlpError> {
    if theta_pi.is_zero() {
        return Ok(ObjectivePiece::Degenerate);
    }
    let theta = E::pi_times(theta_pi.clone());
    if compare(&theta, &theta_tangent_expr())? == Ordering::Less {
        return Ok(ObjectivePiece::Disjoint);
    }
    if compare(&theta, &theta_cover_expr())? == Ordering::Less {
        return Ok(ObjectivePiece::Overlapping);
    }
    Ok(ObjectivePiece::Covering)
}

/// Exact expression for the unlit probability 1 − σ(C_θ) of a cap whose
/// radius is the grid point π/2 − θ, θ = `theta_pi`·π.
pub fn objective_expr(theta_pi: &Rational) -> Result<CoefficientExpr, IlpError> {
    let theta = E::pi_times(theta_pi.clone());
    let single = E::int(2) * (E::int(1) - theta.clone().cos());
    Ok(match objective_piece(theta_pi)? {
        ObjectivePiece::Degenerate => E::int(1),
        ObjectivePiece::Disjoint => E::int(1) - single,
        ObjectivePiece::Overlapping => E::int(1) - (single - E::int(6) * lune_area_expr(&theta)),
        ObjectivePiece::Covering => E::int(0),
    })
}

/// Exact packing weight of a cap of radius a = `a_pi`·π in the given form.
pub fn weight_expr(a_pi: &Rational, form: ConstraintForm) -> CoefficientExpr {
    let gap = E::int(1) - E::pi_times(a_pi.clone()).cos();
    match form {
        ConstraintForm::Halved => gap / E::int(2),
        ConstraintForm::Doubled => gap,
    }
}

/// a_i ≥ π/4, decided exactly. An exact tie is excluded, which only
/// relaxes the big-cap constraint.
fn is_big(a_pi: &Rational) -> bool {
    *a_pi > rational(1, 4)
}

/// Builds the certified model for the uniform partition with `t` intervals
/// and rounding denominator `d`, using the default constraint form.
pub fn build_model(t: usize, d: u64) -> Result<IlpModel, IlpError> {
    build_model_with(t, d, ConstraintForm::default())
}

pub fn build_model_with(t: usize, d: u64, form: ConstraintForm) -> Result<IlpModel, IlpError> {
    if t == 0 || d == 0 {
        return Err(IlpError::InvalidParameters);
    }
    let grid = grid_pi_multiples(t);
    let half = rational(1, 2);
    let coefficients: Vec<(Rational, Rational)> = (0..t)
        .into_par_iter()
        .map(|i| {
            let theta_pi = &half - &grid[i + 1];
            let c = exact::round_up(&objective_expr(&theta_pi)?, d)?;
            let w = exact::round_down(&weight_expr(&grid[i], form), d)?;
            Ok((c, w))
        })
        .collect::<Result<_, IlpError>>()?;
    let (obj, weight) = coefficients.into_iter().unzip();
    let bigcap_indices = (0..t).filter(|&i| is_big(&grid[i])).collect();
    Ok(IlpModel {
        t,
        d,
        form,
        grid,
        obj,
        weight,
        capacity: form.capacity(),
        bigcap_indices,
        bigcap_capacity: BIGCAP_CAPACITY,
    })
}

/// Outcome of re-checking every rounded coefficient against an
/// independent enclosure of its exact value.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingAudit {
    pub objective_checked: usize,
    pub weights_checked: usize,
    pub violations: Vec<String>,
}

/// Confirms c_i ≥ exact objective coefficient and w_i ≤ exact weight by
/// interval evaluation at `precision_bits`, and that each rounded value is
/// within 1/D of the exact one.
pub fn audit_rounding(model: &IlpModel, precision_bits: u32) -> Result<RoundingAudit, IlpError> {
    let half = rational(1, 2);
    let step = Rational::new(BigInt::one(), BigInt::from(model.d));
    let mut violations = Vec::new();
    for i in 0..model.t {
        let exact_obj = exact::eval_interval(&objective_expr(&(&half - &model.grid[i + 1]))?, precision_bits)?;
        if model.obj[i] < exact_obj.hi {
            violations.push(format!("c_{i} = {} below exact value ≤ {}", model.obj[i], exact_obj.hi));
        }
        if &model.obj[i] - &exact_obj.lo > step {
            violations.push(format!("c_{i} = {} more than 1/D above exact value", model.obj[i]));
        }
        let exact_w = exact::eval_interval(&weight_expr(&model.grid[i], model.form), precision_bits)?;
        if model.weight[i] > exact_w.lo {
            violations.push(format!("w_{i} = {} above exact value ≥ {}", model.weight[i], exact_w.lo));
        }
        if &exact_w.hi - &model.weight[i] > step {
            violations.push(format!("w_{i} = {} more than 1/D below exact value", model.weight[i]));
        }
    }
    Ok(RoundingAudit { objective_checked: model.t, weights_checked: model.t, violations })
}
