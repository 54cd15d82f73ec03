//! Brute-force ground truth for small games.

use crate::error::{Error, Result};
use crate::game::{GeneralizedGame, Predicate, ProfileDistribution, SocialKind, SocialSpec, StrategyProfile};
use crate::lp::{solve_with, LinearProgram, Relation, Sense, SolverOptions, Status};
use crate::par_map;
use crate::scalar::Scalar;

pub const DEFAULT_PROFILE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub cap: u128,
    /// Slack allowed in equilibrium checks (ignored in exact mode).
    pub tolerance: f64,
    pub solver: SolverOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_PROFILE_CAP,
            tolerance: 1e-9,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum<S> {
    pub profile: StrategyProfile,
    pub value: S,
}

fn all_profiles<S: Scalar>(game: &GeneralizedGame<S>, cap: u128) -> Result<Vec<StrategyProfile>> {
    game.model().enumeration_guard(cap)?;
    Ok(game.model().profiles().collect())
}

/// Minimum social value over pure profiles; ties go to the lexicographically
/// first profile.
pub fn social_optimum<S: Scalar>(
    game: &GeneralizedGame<S>,
    spec: &SocialSpec<S>,
    cap: u128,
) -> Result<Optimum<S>> {
    game.check_spec(spec)?;
    let profiles = all_profiles(game, cap)?;
    let values = par_map(&profiles, |p| game.social_value_profile(spec, p));
    let mut best = 0;
    for (idx, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = idx;
        }
    }
    Ok(Optimum {
        profile: profiles[best].clone(),
        value: values[best].clone(),
    })
}

pub fn enumerate_eps_pne<S: Scalar>(
    game: &GeneralizedGame<S>,
    epsilon: &S,
    predicate: Predicate,
    opts: &OracleOptions,
) -> Result<Vec<StrategyProfile>> {
    let profiles = all_profiles(game, opts.cap)?;
    let tol = S::tol(opts.tolerance);
    let keep = par_map(&profiles, |p| game.is_eps_pne_with(p, epsilon, predicate, &tol));
    Ok(profiles
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ppoa<S> {
    Value {
        ratio: S,
        worst_value: S,
        /// Every equilibrium attaining `worst_value`.
        worst: Vec<StrategyProfile>,
        equilibrium_count: usize,
        optimum: Optimum<S>,
    },
    NoEquilibrium {
        optimum: Optimum<S>,
    },
}

impl<S: Scalar> Ppoa<S> {
    pub fn ratio(&self) -> Option<&S> {
        match self {
            Ppoa::Value { ratio, .. } => Some(ratio),
            Ppoa::NoEquilibrium { .. } => None,
        }
    }

    pub fn optimum(&self) -> &Optimum<S> {
        match self {
            Ppoa::Value { optimum, .. } | Ppoa::NoEquilibrium { optimum } => optimum,
        }
    }
}

fn positive_optimum<S: Scalar>(game: &GeneralizedGame<S>, spec: &SocialSpec<S>, opts: &OracleOptions) -> Result<Optimum<S>> {
    let optimum = social_optimum(game, spec, opts.cap)?;
    if optimum.value <= S::tol(opts.tolerance) {
        return Err(Error::Degenerate(format!(
            "social optimum {} at {} is not positive",
            optimum.value, optimum.profile
        )));
    }
    Ok(optimum)
}

pub fn exact_ppoa<S: Scalar>(
    game: &GeneralizedGame<S>,
    spec: &SocialSpec<S>,
    epsilon: &S,
    predicate: Predicate,
    opts: &OracleOptions,
) -> Result<Ppoa<S>> {
    let optimum = positive_optimum(game, spec, opts)?;
    let equilibria = enumerate_eps_pne(game, epsilon, predicate, opts)?;
    if equilibria.is_empty() {
        return Ok(Ppoa::NoEquilibrium { optimum });
    }
    let values = par_map(&equilibria, |p| game.social_value_profile(spec, p));
    let worst_value = values.iter().cloned().reduce(S::max_of).expect("non-empty");
    let worst = equilibria
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v == worst_value)
        .map(|(p, _)| p.clone())
        .collect();
    Ok(Ppoa::Value {
        ratio: worst_value.clone() / optimum.value.clone(),
        worst_value,
        worst,
        equilibrium_count: equilibria.len(),
        optimum,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCce<S> {
    pub value: S,
    pub ratio: S,
    pub optimum: Optimum<S>,
    /// Support of an optimal distribution.
    pub distribution: Vec<(StrategyProfile, S)>,
}

/// Largest social value over approximate coarse correlated equilibria, by LP
/// over distributions. MAX solves one program per player.
///
/// `None` when no distribution qualifies. At `epsilon = 0` a mixed Nash
/// equilibrium always qualifies, but with negative perceived costs the factor
/// `1 + epsilon` tightens the constraints and the set can become empty.
pub fn worst_cce_value<S: Scalar>(
    game: &GeneralizedGame<S>,
    spec: &SocialSpec<S>,
    epsilon: &S,
    predicate: Predicate,
    opts: &OracleOptions,
) -> Result<Option<WorstCce<S>>> {
    let optimum = positive_optimum(game, spec, opts)?;
    let profiles = all_profiles(game, opts.cap)?;
    let gaps = par_map(&profiles, |p| game.gaps(p, epsilon, predicate));
    let costs = par_map(&profiles, |p| game.beta_costs(spec, p));

    let build = |weights: &dyn Fn(&[S]) -> S| -> Result<LinearProgram<S>> {
        let mut lp = LinearProgram::new(Sense::Maximize);
        for (idx, p) in profiles.iter().enumerate() {
            let v = lp.add_nonneg(format!("p{p}"))?;
            lp.set_objective(v, weights(&costs[idx]));
        }
        for i in 0..game.n() {
            for x in 0..game.model().strategies(i).len() {
                let coeffs = (0..profiles.len()).map(|s| (s, gaps[s][i][x].clone())).collect();
                lp.add_row(format!("cce[{},{}]", i + 1, x), coeffs, Relation::Le, S::zero())?;
            }
        }
        let all = (0..profiles.len()).map(|s| (s, S::one())).collect();
        lp.add_row("mass", all, Relation::Eq, S::one())?;
        Ok(lp)
    };

    let objectives: Vec<Option<usize>> = match spec.kind {
        SocialKind::Sum => vec![None],
        SocialKind::Max => (0..game.n()).map(Some).collect(),
    };
    let runs = par_map(&objectives, |target| -> Result<Option<(S, Vec<S>)>> {
        let lp = match target {
            None => build(&|c: &[S]| c.iter().fold(S::zero(), |a, b| a + b.clone()))?,
            Some(i) => build(&|c: &[S]| c[*i].clone())?,
        };
        let report = solve_with(&lp, &opts.solver)?;
        match report.status {
            Status::Optimal => Ok(Some((report.value.clone().expect("optimal value"), report.primal))),
            Status::Infeasible => Ok(None),
            // The feasible set lies in the simplex.
            Status::Unbounded => Err(Error::Solver("coarse correlated program reported unbounded".into())),
        }
    });
    let mut best: Option<(S, Vec<S>)> = None;
    for run in runs {
        let Some(run) = run? else {
            return Ok(None);
        };
        if best.as_ref().is_none_or(|(v, _)| run.0 > *v) {
            best = Some(run);
        }
    }
    let (value, weights) = best.expect("at least one program");
    let distribution = profiles
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > S::tol(1e-12))
        .collect();
    Ok(Some(WorstCce {
        ratio: value.clone() / optimum.value.clone(),
        value,
        optimum,
        distribution,
    }))
}

/// The distribution found by [`worst_cce_value`], renormalised for checks.
pub fn cce_distribution<S: Scalar>(cce: &WorstCce<S>) -> Result<ProfileDistribution<S>> {
    let total = cce.distribution.iter().fold(S::zero(), |a, (_, w)| a + w.clone());
    ProfileDistribution::new(
        cce.distribution
            .iter()
            .map(|(p, w)| (p.clone(), w.clone() / total.clone()))
            .collect(),
    )
}
