//! Finding and checking illuminating direction sets.
//!
//! A cap body with base caps C[x̂_i, φ_i] is illuminated by directions
//! v_1, …, v_k if every open cap C(−x̂_i, π/2 − φ_i) contains some v_j and
//! the v_j positively span E³. This is a sufficient condition; a direction
//! set failing it is reported as not verified, never as not illuminating.
//!
//! The constructive side samples Haar rotations of the regular tetrahedron
//! until one leaves at most two caps dark, then adds −x̂_i for each of them.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cap_body::CapBody;
use crate::cover_measure::chunk_rng;
use crate::sphere::{random_rotation, tetrahedron, Cap, Rotation, UnitVector};

/// Default number of rotations tried by [`search_rotation`].
pub const DEFAULT_BUDGET: u64 = 100_000;
/// Rotations drawn from one RNG stream.
pub const ROTATION_BLOCK: u64 = 1024;
/// Blocks evaluated between early-exit checks.
const BLOCKS_PER_BATCH: u64 = 8;
/// Threshold on the optimal ε of the positive-hull program.
pub const HULL_EPSILON: f64 = 1e-9;
/// Most caps a successful search may leave dark.
pub const MAX_UNLIT: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IlluminationError {
    #[error("a direction set needs at least one direction")]
    EmptyDirectionSet,
    #[error("the rotation budget must be at least 1")]
    InvalidBudget,
    #[error("every one of {budget} rotations left more than {MAX_UNLIT} caps unlit (best: {best_unlit})")]
    SearchExhausted { budget: u64, best_unlit: usize },
    #[error("constructed direction set failed verification: {0}")]
    VerificationFailed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    directions: Vec<UnitVector>,
}

impl DirectionSet {
    pub fn new(directions: Vec<UnitVector>) -> Result<Self, IlluminationError> {
        if directions.is_empty() {
            return Err(IlluminationError::EmptyDirectionSet);
        }
        Ok(Self { directions })
    }

    pub fn directions(&self) -> &[UnitVector] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// ±e_1, ±e_2, ±e_3 in that order.
    pub fn octahedron() -> Self {
        let e = [UnitVector::E_X, UnitVector::E_Y, UnitVector::E_Z];
        Self { directions: e.iter().flat_map(|v| [*v, -*v]).collect() }
    }

    pub fn tetrahedron() -> Self {
        Self { directions: tetrahedron().to_vec() }
    }

    pub fn rotated(&self, r: &Rotation) -> Self {
        Self { directions: self.directions.iter().map(|v| r.apply(v)).collect() }
    }
}

/// v lies in the open cap C(−center, π/2 − φ), i.e. ⟨center, v⟩ < −sin φ.
pub fn cap_illuminated_by(cap: &Cap, v: &UnitVector) -> bool {
    cap.center.dot(v) < -cap.radius.sin()
}

/// Whether the origin is interior to the convex hull of `dirs`: the optimum
/// of max ε s.t. ∑λ_i v_i = 0, ∑λ_i = 1, λ_i ≥ ε exceeds [`HULL_EPSILON`],
/// and the directions have rank 3. Without the rank condition a set such
/// as {e_1, −e_1} would pass while spanning only a line.
pub fn positive_hull_spans(dirs: &DirectionSet) -> bool {
    has_full_rank(dirs) && hull_margin(dirs).is_some_and(|eps| eps > HULL_EPSILON)
}

/// Rank 3 by Gaussian elimination with partial pivoting.
fn has_full_rank(dirs: &DirectionSet) -> bool {
    let mut rows: Vec<[f64; 3]> = dirs.directions.iter().map(|v| v.to_array()).collect();
    for col in 0..3 {
        let Some(p) = (col..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs())) else {
            return false;
        };
        if rows[p][col].abs() <= HULL_EPSILON {
            return false;
        }
        rows.swap(col, p);
        let pivot = rows[col];
        for row in rows.iter_mut().skip(col + 1) {
            let f = row[col] / pivot[col];
            for c in col..3 {
                row[c] -= f * pivot[c];
            }
        }
    }
    true
}

/// Optimal ε of the hull program restricted to ε ≥ 0, or `None` if even
/// ε = 0 is infeasible.
pub fn hull_margin(dirs: &DirectionSet) -> Option<f64> {
    // Variables μ_i = λ_i − ε ≥ 0 and ε ≥ 0.
    let k = dirs.len();
    let mut a = vec![vec![0.0; k + 1]; 4];
    for (i, v) in dirs.directions.iter().enumerate() {
        let p = v.to_array();
        for d in 0..3 {
            a[d][i] = p[d];
            a[d][k] += p[d];
        }
        a[3][i] = 1.0;
    }
    a[3][k] = k as f64;
    let b = [0.0, 0.0, 0.0, 1.0];
    let mut cost = vec![0.0; k + 1];
    cost[k] = 1.0;
    simplex::maximize(&a, &b, &cost)
}

fn lit_by_any(cap: &Cap, dirs: &[UnitVector]) -> Option<usize> {
    let s = -cap.radius.sin();
    dirs.iter().position(|v| cap.center.dot(v) < s)
}

/// Indices of caps no direction illuminates.
pub fn unlit_caps(body: &CapBody, dirs: &DirectionSet) -> Vec<usize> {
    body.caps().iter().enumerate().filter(|(_, c)| lit_by_any(c, &dirs.directions).is_none()).map(|(i, _)| i).collect()
}

/// Best rotation found by [`search_rotation`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub rotation: Rotation,
    /// Position of the rotation in the sample sequence.
    pub sample_index: u64,
    pub unlit: Vec<usize>,
    pub samples_evaluated: u64,
}

fn rotation_at(seed: u64, block: u64, offset: u64) -> Rotation {
    let mut rng = chunk_rng(seed, block);
    let mut r = random_rotation(&mut rng);
    for _ in 0..offset {
        r = random_rotation(&mut rng);
    }
    r
}

/// Best (unlit count, sample index) within one block of rotations.
fn scan_block(caps: &[(UnitVector, f64)], seed: u64, block: u64, len: u64) -> (usize, u64) {
    let tet = tetrahedron();
    let mut rng = chunk_rng(seed, block);
    let mut best = (usize::MAX, 0);
    for j in 0..len {
        let r = random_rotation(&mut rng);
        let dirs = tet.map(|v| r.apply(&v));
        let mut dark = 0;
        for (center, s) in caps {
            if dirs.iter().all(|v| center.dot(v) >= *s) {
                dark += 1;
                if dark >= best.0 {
                    break;
                }
            }
        }
        if dark < best.0 {
            best = (dark, block * ROTATION_BLOCK + j);
            if dark == 0 {
                break;
            }
        }
    }
    best
}

/// Samples up to `budget` Haar rotations of the tetrahedron and returns the
/// one leaving the fewest caps unlit, ties going to the earliest sample.
/// Stops as soon as a rotation lights every cap. The sample sequence, and
/// hence the result, depends only on `seed`, not on the thread count.
pub fn search_rotation(body: &CapBody, budget: u64, seed: u64) -> Result<SearchOutcome, IlluminationError> {
    if budget == 0 {
        return Err(IlluminationError::InvalidBudget);
    }
    let caps: Vec<(UnitVector, f64)> = body.caps().iter().map(|c| (c.center, -c.radius.sin())).collect();
    let blocks = budget.div_ceil(ROTATION_BLOCK);
    let mut best = (usize::MAX, 0u64);
    let mut evaluated_blocks = 0;
    while evaluated_blocks < blocks && best.0 > 0 {
        let end = (evaluated_blocks + BLOCKS_PER_BATCH).min(blocks);
        let batch_best = (evaluated_blocks..end)
            .into_par_iter()
            .map(|b| scan_block(&caps, seed, b, ROTATION_BLOCK.min(budget - b * ROTATION_BLOCK)))
            .min()
            .expect("batch is nonempty");
        best = best.min(batch_best);
        evaluated_blocks = end;
    }
    let (block, offset) = (best.1 / ROTATION_BLOCK, best.1 % ROTATION_BLOCK);
    let rotation = rotation_at(seed, block, offset);
    let unlit = unlit_caps(body, &DirectionSet::tetrahedron().rotated(&rotation));
    if unlit.len() > MAX_UNLIT {
        return Err(IlluminationError::SearchExhausted { budget, best_unlit: unlit.len() });
    }
    Ok(SearchOutcome {
        rotation,
        sample_index: best.1,
        unlit,
        samples_evaluated: (evaluated_blocks * ROTATION_BLOCK).min(budget),
    })
}

/// One cap and the first direction illuminating it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapAssignment {
    pub cap: usize,
    pub direction: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IlluminationReport {
    pub illuminated: bool,
    pub hull_ok: bool,
    pub unlit: Vec<usize>,
    pub per_cap: Vec<CapAssignment>,
}

impl IlluminationReport {
    pub fn verdict(&self) -> &'static str {
        if self.illuminated {
            "illuminated"
        } else {
            "not verified by this criterion"
        }
    }
}

/// Checks both conditions: every cap lit, and positive spanning.
pub fn verify_illumination(body: &CapBody, dirs: &DirectionSet) -> IlluminationReport {
    let per_cap: Vec<CapAssignment> = body
        .caps()
        .iter()
        .enumerate()
        .map(|(i, c)| CapAssignment { cap: i, direction: lit_by_any(c, &dirs.directions) })
        .collect();
    let unlit: Vec<usize> = per_cap.iter().filter(|a| a.direction.is_none()).map(|a| a.cap).collect();
    let hull_ok = positive_hull_spans(dirs);
    IlluminationReport { illuminated: unlit.is_empty() && hull_ok, hull_ok, unlit, per_cap }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Illumination {
    pub directions: DirectionSet,
    pub search: SearchOutcome,
    pub report: IlluminationReport,
}

/// The best rotated tetrahedron followed by −x̂_i for each cap it leaves
/// unlit: between 4 and 6 directions, verified before returning.
pub fn illuminate(body: &CapBody, budget: u64, seed: u64) -> Result<Illumination, IlluminationError> {
    let search = search_rotation(body, budget, seed)?;
    let mut directions = DirectionSet::tetrahedron().rotated(&search.rotation).directions;
    directions.extend(search.unlit.iter().map(|&i| -body.caps()[i].center));
    let directions = DirectionSet::new(directions)?;
    let report = verify_illumination(body, &directions);
    if !report.illuminated {
        return Err(IlluminationError::VerificationFailed(format!(
            "unlit caps {:?}, hull_ok = {}",
            report.unlit, report.hull_ok
        )));
    }
    Ok(Illumination { directions, search, report })
}

/// Dense two-phase simplex with Bland's rule, for the tiny hull program.
mod simplex {
    const TOL: f64 = 1e-12;

    struct Tableau {
        rows: Vec<Vec<f64>>,
        basis: Vec<usize>,
        width: usize,
    }

    impl Tableau {
        fn pivot(&mut self, r: usize, c: usize) {
            let p = self.rows[r][c];
            self.rows[r].iter_mut().for_each(|x| *x /= p);
            let pivot_row = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != r && row[c] != 0.0 {
                    let f = row[c];
                    row.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
                }
            }
            self.basis[r] = c;
        }

        /// Maximizes cost·x over columns `< allowed`. Returns false if unbounded.
        fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
            loop {
                let reduced = |j: usize| {
                    cost[j] - self.rows.iter().zip(&self.basis).map(|(row, &b)| cost[b] * row[j]).sum::<f64>()
                };
                let Some(enter) = (0..allowed).find(|&j| !self.basis.contains(&j) && reduced(j) > TOL) else {
                    return true;
                };
                let mut leave: Option<(usize, f64)> = None;
                for (r, row) in self.rows.iter().enumerate() {
                    if row[enter] > TOL {
                        let ratio = row[self.width] / row[enter];
                        let better = match leave {
                            None => true,
                            Some((lr, lratio)) => {
                                ratio < lratio - TOL || (ratio <= lratio + TOL && self.basis[r] < self.basis[lr])
                            }
                        };
                        if better {
                            leave = Some((r, ratio));
                        }
                    }
                }
                match leave {
                    Some((r, _)) => self.pivot(r, enter),
                    None => return false,
                }
            }
        }

        fn value(&self, cost: &[f64]) -> f64 {
            self.rows.iter().zip(&self.basis).map(|(row, &b)| cost[b] * row[self.width]).sum()
        }
    }

    /// max cost·x s.t. a·x = b, x ≥ 0. `None` if infeasible or unbounded.
    pub(super) fn maximize(a: &[Vec<f64>], b: &[f64], cost: &[f64]) -> Option<f64> {
        let m = a.len();
        let n = cost.len();
        let width = n + m;
        let rows = a
            .iter()
            .zip(b)
            .enumerate()
            .map(|(r, (row, &rhs))| {
                let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
                let mut t: Vec<f64> = row.iter().map(|x| sign * x).collect();
                t.extend((0..m).map(|j| if j == r { 1.0 } else { 0.0 }));
                t.push(sign * rhs);
                t
            })
            .collect();
        let mut tab = Tableau { rows, basis: (n..width).collect(), width };

        let phase1: Vec<f64> = (0..width).map(|j| if j < n { 0.0 } else { -1.0 }).collect();
        tab.optimize(&phase1, width);
        if tab.value(&phase1) < -1e-9 {
            return None;
        }
        for r in 0..m {
            if tab.basis[r] >= n {
                if let Some(c) = (0..n).find(|&c| tab.rows[r][c].abs() > 1e-9) {
                    tab.pivot(r, c);
                }
            }
        }

        let mut phase2 = cost.to_vec();
        phase2.resize(width, 0.0);
        if !tab.optimize(&phase2, n) {
            return None;
        }
        Some(tab.value(&phase2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap_body::k0;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn illumination_test_is_strict() {
        let cap = Cap::closed(UnitVector::E_Z, FRAC_PI_4);
        assert!(cap_illuminated_by(&cap, &-UnitVector::E_Z));
        assert!(!cap_illuminated_by(&cap, &UnitVector::E_Z));
        // ⟨e_3, v⟩ = −sin(π/4) exactly.
        let s = FRAC_PI_4.sin();
        let boundary = UnitVector::new((1.0 - s * s).sqrt(), 0.0, -s).unwrap();
        assert_eq!(cap.center.dot(&boundary), -FRAC_PI_4.sin());
        assert!(!cap_illuminated_by(&cap, &boundary));
    }

    #[test]
    fn hull_examples() {
        assert!(positive_hull_spans(&DirectionSet::tetrahedron()));
        assert!(positive_hull_spans(&DirectionSet::octahedron()));
        let basis = DirectionSet::new(vec![UnitVector::E_X, UnitVector::E_Y, UnitVector::E_Z]).unwrap();
        assert!(!positive_hull_spans(&basis));
        assert!(!positive_hull_spans(&DirectionSet::new(vec![UnitVector::E_X]).unwrap()));
        // ±e_1 alone: origin on the hull but not interior in E³.
        let line = DirectionSet::new(vec![UnitVector::E_X, -UnitVector::E_X]).unwrap();
        assert!(!positive_hull_spans(&line));
        // Regular tetrahedron optimum is ε = 1/4.
        assert!((hull_margin(&DirectionSet::tetrahedron()).unwrap() - 0.25).abs() < 1e-12);
        assert!((hull_margin(&DirectionSet::octahedron()).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn empty_direction_set_rejected() {
        assert_eq!(DirectionSet::new(vec![]), Err(IlluminationError::EmptyDirectionSet));
    }

    #[test]
    fn k0_unlit_examples() {
        let body = k0();
        assert!(unlit_caps(&body, &DirectionSet::octahedron()).is_empty());
        let five = DirectionSet::new(DirectionSet::octahedron().directions()[..5].to_vec()).unwrap();
        // Missing −e_3 leaves the cap centered at +e_3 dark.
        let unlit = unlit_caps(&body, &five);
        assert_eq!(unlit.len(), 1);
        assert_eq!(body.caps()[unlit[0]].center, UnitVector::E_Z);
        assert!(unlit_caps(&body, &DirectionSet::tetrahedron()).len() >= 2);
    }

    #[test]
    fn k0_reports() {
        let body = k0();
        let r = verify_illumination(&body, &DirectionSet::octahedron());
        assert!(r.illuminated && r.hull_ok);
        assert_eq!(r.verdict(), "illuminated");
        let r = verify_illumination(&body, &DirectionSet::tetrahedron());
        assert!(!r.illuminated);
        assert_eq!(r.verdict(), "not verified by this criterion");
        let r = verify_illumination(&body, &DirectionSet::new(vec![UnitVector::E_X]).unwrap());
        assert!(!r.hull_ok);
    }

    #[test]
    fn k0_needs_six() {
        let out = illuminate(&k0(), DEFAULT_BUDGET, 7).unwrap();
        assert_eq!(out.directions.len(), 6);
        assert!(out.report.illuminated);
    }

    #[test]
    fn small_caps_lit_by_first_rotation() {
        let body = CapBody::from_caps(vec![Cap::closed(UnitVector::E_Z, 0.1)]).unwrap();
        let s = search_rotation(&body, 1, 3).unwrap();
        assert!(s.unlit.is_empty());
        assert_eq!(s.sample_index, 0);
        assert_eq!(illuminate(&body, 5, 3).unwrap().directions.len(), 4);
    }

    #[test]
    fn zero_budget_rejected() {
        assert_eq!(search_rotation(&k0(), 0, 1), Err(IlluminationError::InvalidBudget));
    }

    #[test]
    fn search_is_reproducible_and_budget_independent_once_found() {
        let body = k0();
        let a = search_rotation(&body, 5000, 11).unwrap();
        let b = search_rotation(&body, 5000, 11).unwrap();
        assert_eq!(a, b);
        let r = rotation_at(11, a.sample_index / ROTATION_BLOCK, a.sample_index % ROTATION_BLOCK);
        assert_eq!(r, a.rotation);
    }
}
