use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exact::{rational, Rational};

use super::model::IlpModel;
use super::solve::{IlpSolution, ProofMode};
use super::IlpError;

/// Re-checked summary of a solved program.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub t: usize,
    pub d: u64,
    pub m_t: Rational,
    pub floor_m_t: BigInt,
    pub verdict_lt_3: bool,
    /// 4 + ⌊M_t⌋: tetrahedron plus one completion per dark cap.
    pub directions_bound: BigInt,
    pub counts: Vec<u64>,
    pub mode: ProofMode,
    pub weight_used: Rational,
    pub big_used: u64,
}

/// Checks both constraints and the objective of `sol` in exact arithmetic.
pub(crate) fn check_witness(sol: &IlpSolution, model: &IlpModel) -> Result<(Rational, u64), IlpError> {
    if sol.counts.len() != model.t {
        return Err(IlpError::VerificationFailed(format!("{} counts for {} variables", sol.counts.len(), model.t)));
    }
    let mut value = Rational::zero();
    let mut weight = Rational::zero();
    let mut big = 0u64;
    for (i, &n) in sol.counts.iter().enumerate() {
        let n_r = Rational::from_integer(BigInt::from(n));
        value += &model.obj[i] * &n_r;
        weight += &model.weight[i] * &n_r;
        if model.is_big(i) {
            big += n;
        }
    }
    if weight > model.capacity {
        return Err(IlpError::VerificationFailed(format!("packing constraint: {weight} > {}", model.capacity)));
    }
    if big > u64::from(model.bigcap_capacity) {
        return Err(IlpError::VerificationFailed(format!("big-cap constraint: {big} > {}", model.bigcap_capacity)));
    }
    if value != sol.objective {
        return Err(IlpError::VerificationFailed(format!(
            "objective recomputes to {value}, solution claims {}",
            sol.objective
        )));
    }
    Ok((weight, big))
}

/// Re-verifies an exact solution against its model and derives the verdict.
pub fn certify(sol: &IlpSolution, model: &IlpModel) -> Result<CertificateReport, IlpError> {
    if sol.mode != ProofMode::Exact {
        return Err(IlpError::VerificationFailed("only exact solutions can be certified".into()));
    }
    if sol.objective.is_negative() {
        return Err(IlpError::VerificationFailed(format!("negative objective {}", sol.objective)));
    }
    let (weight_used, big_used) = check_witness(sol, model)?;
    let floor_m_t = sol.objective.floor().to_integer();
    Ok(CertificateReport {
        t: model.t,
        d: model.d,
        m_t: sol.objective.clone(),
        directions_bound: &floor_m_t + BigInt::from(4),
        floor_m_t,
        verdict_lt_3: sol.objective < rational(3, 1),
        counts: sol.counts.clone(),
        mode: sol.mode,
        weight_used,
        big_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::{build_model, solve_exact};

    #[test]
    fn zero_solution_certifies() {
        let m = build_model(5, 60).unwrap();
        let sol = IlpSolution { objective: Rational::zero(), counts: vec![0; 5], mode: ProofMode::Exact };
        let r = certify(&sol, &m).unwrap();
        assert!(r.verdict_lt_3);
        assert_eq!(r.floor_m_t, BigInt::zero());
        assert_eq!(r.directions_bound, BigInt::from(4));
    }

    #[test]
    fn single_interval_fails_verdict() {
        let m = build_model(1, 3000).unwrap();
        let r = certify(&solve_exact(&m).unwrap(), &m).unwrap();
        assert_eq!(r.m_t, rational(37, 1));
        assert!(!r.verdict_lt_3);
    }

    #[test]
    fn tampered_witnesses_rejected() {
        let m = build_model(40, 3000).unwrap();
        let first_big = m.bigcap_indices[0];
        let mut counts = vec![0; 40];
        counts[first_big] = 5;
        let objective = &m.obj[first_big] * Rational::from_integer(BigInt::from(5));
        let sol = IlpSolution { objective, counts, mode: ProofMode::Exact };
        assert!(matches!(certify(&sol, &m), Err(IlpError::VerificationFailed(_))));

        let mut sol = solve_exact(&m).unwrap();
        sol.objective += rational(1, 3000);
        assert!(matches!(certify(&sol, &m), Err(IlpError::VerificationFailed(_))));

        let mut sol = solve_exact(&m).unwrap();
        sol.counts[0] += 1000;
        assert!(matches!(certify(&sol, &m), Err(IlpError::VerificationFailed(_))));

        let mut sol = solve_exact(&m).unwrap();
        sol.mode = ProofMode::Float;
        assert!(certify(&sol, &m).is_err());
    }
}
