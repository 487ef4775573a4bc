//! Exact solver for the two-constraint program.
//!
//! After scaling by D the packing constraint is an integer knapsack of
//! capacity D·capacity and the big-cap constraint a cardinality limit on a
//! subset, so a dynamic program over (capacity used) × (big caps used)
//! solves it exactly. Items are processed from the last index to the first;
//! one bit per state records whether item i is taken there, which is enough
//! to recover the lexicographically smallest optimal count vector.

use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::cover_measure;
use crate::exact::{grid_pi_multiples, rational, rational_to_f64, Rational};

use super::model::{IlpModel, BIGCAP_CAPACITY};
use super::IlpError;

/// Packing-constraint grid (per unit of capacity) used by the float solver.
/// Weights are floored onto it, which can only raise the optimum.
pub const FLOAT_WEIGHT_GRID: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofMode {
    Exact,
    Float,
}

impl ProofMode {
    pub fn name(self) -> &'static str {
        match self {
            ProofMode::Exact => "exact",
            ProofMode::Float => "float",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlpSolution {
    /// Optimal value. In float mode, the exact dyadic value of the f64 optimum.
    pub objective: Rational,
    pub counts: Vec<u64>,
    pub mode: ProofMode,
}

impl IlpSolution {
    pub fn objective_f64(&self) -> f64 {
        rational_to_f64(&self.objective)
    }
}

/// Knapsack items in integer weight units.
pub(crate) struct Items<'a, V> {
    pub values: &'a [V],
    pub weights: &'a [u64],
    pub big: &'a [bool],
    pub capacity: u64,
    pub big_capacity: u32,
}

/// Maximizes ∑ n_i v_i subject to ∑ n_i w_i ≤ capacity and
/// ∑_{big} n_i ≤ big_capacity. Returns the optimum and the
/// lexicographically smallest optimal counts.
///
/// The caller must rule out zero-weight non-big items with positive value.
pub(crate) fn knapsack<V>(items: &Items<'_, V>, zero: V) -> (V, Vec<u64>)
where
    V: Copy + PartialOrd + Add<Output = V>,
{
    let n = items.values.len();
    let cap = items.capacity as usize;
    let kk = items.big_capacity as usize + 1;
    let states = (cap + 1) * kk;
    let words = states.div_ceil(64);
    let idx = |c: usize, k: usize| c * kk + k;

    let mut next = vec![zero; states];
    let mut cur = vec![zero; states];
    let mut take = vec![0u64; n * words];

    for i in (0..n).rev() {
        let w = items.weights[i] as usize;
        let v = items.values[i];
        let b = usize::from(items.big[i]);
        let bits = &mut take[i * words..(i + 1) * words];
        for c in 0..=cap {
            for k in 0..kk {
                let s = idx(c, k);
                cur[s] = next[s];
                if w <= c && k >= b && (w > 0 || b > 0) {
                    let cand = cur[idx(c - w, k - b)] + v;
                    if cand > cur[s] {
                        cur[s] = cand;
                        bits[s / 64] |= 1 << (s % 64);
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }

    let best = next[idx(cap, kk - 1)];
    let mut counts = vec![0u64; n];
    let (mut c, mut k) = (cap, kk - 1);
    for (i, count) in counts.iter_mut().enumerate() {
        let bits = &take[i * words..(i + 1) * words];
        loop {
            let s = idx(c, k);
            if bits[s / 64] >> (s % 64) & 1 == 0 {
                break;
            }
            *count += 1;
            c -= items.weights[i] as usize;
            k -= usize::from(items.big[i]);
        }
    }
    (best, counts)
}

/// k with r = k/D, or an error when r is off the grid.
fn scaled(r: &Rational, d: u64, what: &str) -> Result<i64, IlpError> {
    let s = r * Rational::from_integer(BigInt::from(d));
    if !s.is_integer() {
        return Err(IlpError::OffGrid(format!("{what} = {r} is not a multiple of 1/{d}")));
    }
    s.to_integer().to_i64().ok_or_else(|| IlpError::OffGrid(format!("{what} = {r} is too large")))
}

/// Exact optimum of the model. The witness is re-verified in rational
/// arithmetic before it is returned.
pub fn solve_exact(model: &IlpModel) -> Result<IlpSolution, IlpError> {
    let d = model.d;
    let capacity = scaled(&model.capacity, d, "capacity")?;
    if capacity < 0 {
        return Err(IlpError::InfeasibleModel);
    }
    let mut values = Vec::with_capacity(model.t);
    let mut weights = Vec::with_capacity(model.t);
    let mut big = Vec::with_capacity(model.t);
    for i in 0..model.t {
        let v = scaled(&model.obj[i], d, &format!("c_{i}"))?;
        let w = scaled(&model.weight[i], d, &format!("w_{i}"))?;
        if v < 0 || w < 0 {
            return Err(IlpError::OffGrid(format!("negative coefficient at index {i}")));
        }
        let b = model.is_big(i);
        if w == 0 && !b && v > 0 {
            return Err(IlpError::Unbounded { index: i });
        }
        values.push(v);
        weights.push(w as u64);
        big.push(b);
    }
    let items = Items {
        values: &values,
        weights: &weights,
        big: &big,
        capacity: capacity as u64,
        big_capacity: model.bigcap_capacity,
    };
    let (best, counts) = knapsack(&items, 0i64);
    let solution =
        IlpSolution { objective: Rational::new(BigInt::from(best), BigInt::from(d)), counts, mode: ProofMode::Exact };
    super::certify::check_witness(&solution, model)?;
    Ok(solution)
}

/// The unrounded program in double precision, for exploring large t.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatModel {
    pub t: usize,
    pub obj: Vec<f64>,
    pub weight: Vec<f64>,
    pub big: Vec<bool>,
}

pub fn build_float_model(t: usize) -> Result<FloatModel, IlpError> {
    if t == 0 {
        return Err(IlpError::InvalidParameters);
    }
    let grid = grid_pi_multiples(t);
    let pi = std::f64::consts::PI;
    let radius = |q: &Rational| rational_to_f64(q) * pi;
    let half = rational(1, 2);
    let mut obj = Vec::with_capacity(t);
    for q in &grid[1..] {
        obj.push(if *q == half {
            1.0
        } else {
            cover_measure::unlit_probability(radius(q)).map_err(|e| IlpError::OffGrid(e.to_string()))?
        });
    }
    let weight = grid[..t].iter().map(|q| (1.0 - radius(q).cos()) / 2.0).collect();
    let big = grid[..t].iter().map(|q| *q > rational(1, 4)).collect();
    Ok(FloatModel { t, obj, weight, big })
}

/// Non-certified optimum of the unrounded program, solved by the same DP
/// with weights floored onto [`FLOAT_WEIGHT_GRID`].
pub fn solve_float(t: usize) -> Result<IlpSolution, IlpError> {
    let model = build_float_model(t)?;
    let grid = FLOAT_WEIGHT_GRID as f64;
    let weights: Vec<u64> = model.weight.iter().map(|w| (w * grid).floor() as u64).collect();
    if let Some(i) = (0..t).find(|&i| weights[i] == 0 && !model.big[i] && model.obj[i] > 0.0) {
        return Err(IlpError::Unbounded { index: i });
    }
    let items = Items {
        values: &model.obj,
        weights: &weights,
        big: &model.big,
        capacity: FLOAT_WEIGHT_GRID,
        big_capacity: BIGCAP_CAPACITY,
    };
    let (best, counts) = knapsack(&items, 0.0f64);
    let objective = BigRational::from_float(best).unwrap_or_else(Rational::zero);
    Ok(IlpSolution { objective, counts, mode: ProofMode::Float })
}
