use crate::error::{invalid, Error, Result};
use crate::formulations::{build_pp_pne, Coefficients, SmallSolution, WorstCaseConfig};
use crate::game::{GeneralizedGame, Mask, SocialKind, SocialSpec};
use crate::oracle::social_optimum;
use crate::representative::RepresentativeModel;
use crate::scalar::Scalar;

/// Players whose witness value sits on `e({j},{j})` rather than on the two
/// singleton resources (those with `alpha_jj < 0` when `epsilon > 0`).
pub fn lemma1_shared_players<S: Scalar>(cfg: &WorstCaseConfig<S>) -> Vec<usize> {
    if cfg.epsilon <= S::zero() {
        return Vec::new();
    }
    (0..cfg.n()).filter(|&j| cfg.alpha[j][j] < S::zero()).collect()
}

/// The always-feasible primal point of value 1 using basis function `k_star`.
///
/// Player `j` contributes through the two resources used by `j` alone, once
/// under `sigma*` and once under `o*`. When `alpha_jj < 0` and `epsilon > 0`
/// that pair would break player `j`'s equilibrium row, so the shared resource
/// `e({j},{j})` carries the value instead; it enters no equilibrium row and
/// contributes identically to both social values.
pub fn lemma1_witness<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    rep: &RepresentativeModel<S>,
    k_star: usize,
) -> Result<SmallSolution<S>> {
    let coefs = Coefficients::new(cfg)?;
    let r = cfg.basis.len();
    if k_star >= r {
        return Err(invalid!("basis index {k_star} out of range"));
    }
    let n = cfg.n();
    let f = |j: usize| coefs.values[k_star][1usize << j].clone();
    let mut coefficients = vec![vec![S::zero(); r]; rep.resource_count()];
    let shared = lemma1_shared_players(cfg);
    let mut place = |j: usize, value: S| {
        let bit = (1 << j) as Mask;
        let targets = if shared.contains(&j) {
            vec![rep.resource(bit, bit)]
        } else {
            vec![rep.resource(bit, 0), rep.resource(0, bit)]
        };
        for e in targets {
            coefficients[e][k_star] = value.clone();
        }
    };

    match cfg.spec.kind {
        SocialKind::Sum => {
            let eligible: Vec<usize> = (0..n)
                .filter(|&j| cfg.spec.column_sum(j) > S::zero() && f(j) > S::zero())
                .collect();
            if eligible.is_empty() {
                return Err(Error::Degenerate(format!(
                    "no player has both a positive beta column and f_{k_star}(w_j) > 0"
                )));
            }
            let m = S::from_i64(eligible.len() as i64);
            for &j in &eligible {
                let denom = m.clone() * f(j) * cfg.weights[j].clone() * cfg.spec.column_sum(j);
                place(j, S::one() / denom);
            }
            Ok(SmallSolution { coefficients, t: None, designated: None })
        }
        SocialKind::Max => {
            let d = (0..n).fold(0, |best, i| {
                if cfg.spec.row_sum(i) > cfg.spec.row_sum(best) {
                    i
                } else {
                    best
                }
            });
            let row_sum = cfg.spec.row_sum(d);
            for j in 0..n {
                if f(j) > S::zero() {
                    place(j, S::one() / (f(j) * cfg.weights[j].clone() * row_sum.clone()));
                } else if cfg.spec.beta[d][j] > S::zero() {
                    return Err(Error::Degenerate(format!(
                        "f_{k_star} vanishes at the weight of player {}",
                        j + 1
                    )));
                }
            }
            Ok(SmallSolution { coefficients, t: Some(S::one()), designated: Some(d) })
        }
    }
}

/// The representative model with the solution's coefficients as latencies.
pub fn extract_worst_game<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    rep: &RepresentativeModel<S>,
    sol: &SmallSolution<S>,
) -> Result<GeneralizedGame<S>> {
    let lp = build_pp_pne(cfg, rep, sol.designated)?;
    let x = sol.to_primal();
    if x.len() != lp.variables().len() {
        return Err(invalid!(
            "solution has {} values for {} variables",
            x.len(),
            lp.variables().len()
        ));
    }
    if let Some((label, viol)) = lp.first_violation(&x, &S::tol(1e-9)) {
        return Err(invalid!("solution violates `{label}` by {viol}"));
    }
    GeneralizedGame::new(
        rep.model().clone(),
        cfg.basis.clone(),
        sol.coefficients.clone(),
        cfg.alpha.clone(),
    )
}

/// Rescales the latencies so that the social optimum is 1.
pub fn normalize_game<S: Scalar>(
    game: &GeneralizedGame<S>,
    spec: &SocialSpec<S>,
    cap: u128,
) -> Result<GeneralizedGame<S>> {
    let optimum = social_optimum(game, spec, cap)?;
    if optimum.value <= S::tol(1e-9) {
        return Err(Error::Degenerate(format!(
            "cannot normalise: social optimum is {}",
            optimum.value
        )));
    }
    if optimum.value == S::one() {
        return Ok(game.clone());
    }
    game.scaled(&(S::one() / optimum.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{g1, BasisFunction};
    use crate::oracle::DEFAULT_PROFILE_CAP;
    use crate::representative::{build_representative, DEFAULT_REPRESENTATIVE_CAP};
    use crate::scalar::{identity, Rational};

    #[test]
    fn sum_and_max_witness_values() {
        let spec = SocialSpec::identity(SocialKind::Sum, 2);
        let cfg = WorstCaseConfig::new(
            vec![Rational::from_i64(1); 2],
            identity(2),
            spec,
            Rational::from_i64(0),
            vec![BasisFunction::monomial(1)],
        )
        .unwrap();
        let rep = build_representative(cfg.weights.clone(), DEFAULT_REPRESENTATIVE_CAP).unwrap();
        let w = lemma1_witness(&cfg, &rep, 0).unwrap();
        let half = Rational::ratio(1, 2);
        for (p, q) in [(1, 0), (0, 1), (2, 0), (0, 2)] {
            assert_eq!(w.coefficients[rep.resource(p, q)][0], half);
        }
        let lp = build_pp_pne(&cfg, &rep, None).unwrap();
        assert_eq!(lp.objective_value(&w.to_primal()), Rational::from_i64(1));
        assert!(lp.first_violation(&w.to_primal(), &Rational::from_i64(0)).is_none());

        let cfg = cfg.with_kind(SocialKind::Max);
        let w = lemma1_witness(&cfg, &rep, 0).unwrap();
        assert_eq!(w.t, Some(Rational::from_i64(1)));
        assert_eq!(w.coefficients[rep.resource(1, 0)][0], Rational::from_i64(1));
        let lp = build_pp_pne(&cfg, &rep, w.designated).unwrap();
        assert!(lp.first_violation(&w.to_primal(), &Rational::from_i64(0)).is_none());
    }

    #[test]
    fn normalisation_of_g1() {
        let game = g1::<Rational>();
        let sum = SocialSpec::identity(SocialKind::Sum, 2);
        let norm = normalize_game(&game, &sum, DEFAULT_PROFILE_CAP).unwrap();
        assert_eq!(norm.coefficients()[0][0], Rational::ratio(1, 2));
        let max = SocialSpec::identity(SocialKind::Max, 2);
        assert_eq!(normalize_game(&game, &max, DEFAULT_PROFILE_CAP).unwrap(), game);
    }
}
