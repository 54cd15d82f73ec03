//! Smoothness certificates and the robust price of anarchy of a finite game.
//!
//! Costs here are the players' perceived costs, the costs equilibria are
//! defined on; with `alpha = I` they are the individual costs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GeneralizedGame, Predicate, SocialSpec, StrategyProfile};
use crate::lp::SolverOptions;
use crate::oracle::{exact_ppoa, worst_cce_value, OracleOptions};
use crate::par_map;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessCertificate<S> {
    pub lambda: S,
    pub mu: S,
    pub bound: S,
}

impl<S: Scalar> SmoothnessCertificate<S> {
    pub fn new(lambda: S, mu: S) -> Result<Self> {
        if lambda <= S::zero() || mu >= S::one() {
            return Err(Error::Invalid(format!(
                "certificate needs lambda > 0 and mu < 1, got ({lambda}, {mu})"
            )));
        }
        let bound = lambda.clone() / (S::one() - mu.clone());
        Ok(SmoothnessCertificate { lambda, mu, bound })
    }
}

/// Social values and deviation sums over all profiles of a game.
struct PairTable<S> {
    profiles: Vec<StrategyProfile>,
    social: Vec<S>,
    own: Vec<S>,
    /// `deviation[s][i][x] = c^_i(s_-i, x)`.
    deviation: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> PairTable<S> {
    fn build(game: &GeneralizedGame<S>, spec: &SocialSpec<S>, cap: u128, pairs: bool) -> Result<Self> {
        game.check_spec(spec)?;
        let count = game.model().profile_count();
        let size = if pairs { count.saturating_mul(count) } else { count };
        if size > cap {
            return Err(Error::SizeCap {
                what: if pairs { "profile pair count" } else { "profile count" },
                size,
                cap,
            });
        }
        let profiles: Vec<StrategyProfile> = game.model().profiles().collect();
        let social = par_map(&profiles, |p| game.social_value_profile(spec, p));
        let own = par_map(&profiles, |p| game.perceived_costs(p).into_iter().fold(S::zero(), |a, c| a + c));
        let deviation = if pairs {
            par_map(&profiles, |p| {
                (0..game.n())
                    .map(|i| {
                        (0..game.model().strategies(i).len())
                            .map(|x| game.perceived_costs(&p.with(i, x))[i].clone())
                            .collect()
                    })
                    .collect()
            })
        } else {
            Vec::new()
        };
        Ok(PairTable { profiles, social, own, deviation })
    }

    /// `sum_i c^_i(s_-i, s'_i)`.
    fn mixed(&self, s: usize, t: usize) -> S {
        let target = &self.profiles[t];
        self.deviation[s]
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, row)| acc + row[target.choice(i)].clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumBounded<S> {
    pub holds: bool,
    /// First profile (lexicographic) with social value above the cost sum.
    pub witness: Option<StrategyProfile>,
    /// Its social value and cost sum.
    pub witness_values: Option<(S, S)>,
}

pub fn is_sum_bounded<S: Scalar>(game: &GeneralizedGame<S>, spec: &SocialSpec<S>, cap: u128) -> Result<SumBounded<S>> {
    let table = PairTable::build(game, spec, cap, false)?;
    let tol = S::tol(1e-9);
    for (idx, p) in table.profiles.iter().enumerate() {
        if table.social[idx] > table.own[idx].clone() + tol.clone() {
            return Ok(SumBounded {
                holds: false,
                witness: Some(p.clone()),
                witness_values: Some((table.social[idx].clone(), table.own[idx].clone())),
            });
        }
    }
    Ok(SumBounded { holds: true, witness: None, witness_values: None })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairViolation<S> {
    pub sigma: StrategyProfile,
    pub sigma_prime: StrategyProfile,
    /// Left side minus right side of the smoothness inequality.
    pub excess: S,
}

/// First ordered pair `(s, s')` with
/// `sum_i c^_i(s_-i, s'_i) > lambda SF(s') + mu SF(s)`.
pub fn check_smooth<S: Scalar>(
    game: &GeneralizedGame<S>,
    spec: &SocialSpec<S>,
    cert: &SmoothnessCertificate<S>,
    cap: u128,
) -> Result<Option<PairViolation<S>>> {
    let table = PairTable::build(game, spec, cap, true)?;
    Ok(first_violation(&table, &cert.lambda, &cert.mu, &S::tol(1e-9)))
}

fn first_violation<S: Scalar>(table: &PairTable<S>, lambda: &S, mu: &S, tol: &S) -> Option<PairViolation<S>> {
    let m = table.profiles.len();
    for s in 0..m {
        for t in 0..m {
            let lhs = table.mixed(s, t);
            let rhs = lambda.clone() * table.social[t].clone() + mu.clone() * table.social[s].clone();
            let excess = lhs - rhs;
            if excess > *tol {
                return Some(PairViolation {
                    sigma: table.profiles[s].clone(),
                    sigma_prime: table.profiles[t].clone(),
                    excess,
                });
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RobustPoa<S> {
    Value {
        value: S,
        certificate: SmoothnessCertificate<S>,
        /// Largest bound known to be infeasible when bisection stopped.
        lower: S,
        iterations: usize,
    },
    NotSmoothable {
        reason: String,
    },
}

impl<S: Scalar> RobustPoa<S> {
    pub fn value(&self) -> Option<&S> {
        match self {
            RobustPoa::Value { value, .. } => Some(value),
            RobustPoa::NotSmoothable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustOptions {
    pub cap: u128,
    /// Absolute width at which bisection stops.
    pub precision: f64,
    pub solver: SolverOptions,
}

impl Default for RobustOptions {
    fn default() -> Self {
        RobustOptions {
            cap: 1_000_000,
            precision: 1e-6,
            solver: SolverOptions::default(),
        }
    }
}

/// Whether some certificate with `lambda / (1 - mu) <= rho` exists; returns it.
///
/// Raising lambda only helps because social values are non-negative, so take
/// `lambda = rho (1 - mu)`. Each pair then reads
/// `mu (SF(s) - rho SF(t)) >= A(s, t) - rho SF(t)`, a one-sided bound on mu,
/// and feasibility is an interval check.
fn certificate_at<S: Scalar>(table: &PairTable<S>, rho: &S) -> Result<Option<SmoothnessCertificate<S>>> {
    if *rho <= S::zero() {
        return Ok(None);
    }
    let tol = S::tol(1e-12);
    let mut lower: Option<S> = None;
    let mut upper = S::one();
    let m = table.profiles.len();
    for s in 0..m {
        for t in 0..m {
            let slope = table.social[s].clone() - rho.clone() * table.social[t].clone();
            let need = table.mixed(s, t) - rho.clone() * table.social[t].clone();
            if slope > tol {
                let b = need / slope;
                lower = Some(lower.map_or(b.clone(), |l| S::max_of(l, b)));
            } else if slope < -tol.clone() {
                upper = S::min_of(upper, need / slope);
            } else if need > tol {
                return Ok(None);
            }
        }
    }
    let mu = match lower {
        Some(l) if l > upper => return Ok(None),
        Some(l) => l,
        None => S::min_of(upper.clone(), S::zero()),
    };
    if mu >= S::one() {
        return Ok(None);
    }
    let lambda = rho.clone() * (S::one() - mu.clone());
    if first_violation(table, &lambda, &mu, &S::tol(1e-7)).is_some() {
        return Ok(None);
    }
    SmoothnessCertificate::new(lambda, mu).map(Some)
}

/// Infimum of `lambda / (1 - mu)` over valid certificates, by bisection.
pub fn robust_poa<S: Scalar>(game: &GeneralizedGame<S>, spec: &SocialSpec<S>, opts: &RobustOptions) -> Result<RobustPoa<S>> {
    let bounded = is_sum_bounded(game, spec, opts.cap)?;
    if !bounded.holds {
        return Ok(RobustPoa::NotSmoothable {
            reason: format!(
                "social function is not sum-bounded (profile {})",
                bounded.witness.expect("witness")
            ),
        });
    }
    let table = PairTable::build(game, spec, opts.cap, true)?;
    let m = table.profiles.len();
    // With mu = 0 the largest pair ratio always certifies.
    let mut hi = S::one();
    for s in 0..m {
        for t in 0..m {
            if table.social[t] > S::zero() {
                hi = S::max_of(hi, table.mixed(s, t) / table.social[t].clone());
            }
        }
    }
    let mut cert = None;
    for _ in 0..64 {
        if let Some(c) = certificate_at(&table, &hi)? {
            cert = Some(c);
            break;
        }
        hi = hi * S::from_i64(2);
    }
    let Some(mut cert) = cert else {
        return Ok(RobustPoa::NotSmoothable {
            reason: "no (lambda, mu) pair satisfies every profile pair".into(),
        });
    };
    let mut lo = S::zero();
    let precision = S::from_f64(opts.precision);
    let two = S::from_i64(2);
    let mut iterations = 0;
    while hi.clone() - lo.clone() > precision {
        let mid = if S::EXACT {
            // Snap to a short dyadic value so rationals stay small.
            let width = hi.clone() - lo.clone();
            S::from_f64(((lo.clone() + width / two.clone()).to_f64() * 1048576.0).round() / 1048576.0)
        } else {
            (lo.clone() + hi.clone()) / two.clone()
        };
        let mid = if mid <= lo || mid >= hi { (lo.clone() + hi.clone()) / two.clone() } else { mid };
        iterations += 1;
        match certificate_at(&table, &mid)? {
            Some(c) => {
                hi = mid;
                cert = c;
            }
            None => lo = mid,
        }
    }
    Ok(RobustPoa::Value {
        value: hi,
        certificate: cert,
        lower: lo,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessReport<S> {
    pub sum_bounded: SumBounded<S>,
    pub robust: Option<RobustPoa<S>>,
    /// Exact pure price of anarchy at eps = 0; `None` without pure equilibria.
    pub exact_ppoa: Option<S>,
    pub exact_ccpoa: S,
    /// `exact_ppoa <= robust_poa + 1e-6`, when both exist.
    pub claim_pne: Option<bool>,
    /// `exact_ccpoa <= robust_poa + 1e-6`, when robust exists.
    pub claim_cce: Option<bool>,
    /// `robust_poa - exact_ppoa`.
    pub gap: Option<S>,
}

/// Compares the robust bound with the exact equilibrium ratios at eps = 0.
pub fn validate_smoothness_claims<S: Scalar>(
    game: &GeneralizedGame<S>,
    spec: &SocialSpec<S>,
    opts: &RobustOptions,
) -> Result<SmoothnessReport<S>> {
    let oracle = OracleOptions { cap: opts.cap, solver: opts.solver, ..Default::default() };
    let zero = S::zero();
    let ppoa = exact_ppoa(game, spec, &zero, Predicate::Verbatim, &oracle)?;
    let exact_ppoa = ppoa.ratio().cloned();
    let exact_ccpoa = worst_cce_value(game, spec, &zero, Predicate::Verbatim, &oracle)?
        .ok_or_else(|| Error::Invariant("no coarse correlated equilibrium at eps = 0".into()))?
        .ratio;
    let sum_bounded = is_sum_bounded(game, spec, opts.cap)?;
    let robust = if sum_bounded.holds { Some(robust_poa(game, spec, opts)?) } else { None };
    let value = robust.as_ref().and_then(|r| r.value().cloned());
    let slack = S::from_f64(1e-6);
    let claim_pne = match (&value, &exact_ppoa) {
        (Some(r), Some(p)) => Some(*p <= r.clone() + slack.clone()),
        _ => None,
    };
    let claim_cce = value.as_ref().map(|r| exact_ccpoa <= r.clone() + slack.clone());
    let gap = match (&value, &exact_ppoa) {
        (Some(r), Some(p)) => Some(r.clone() - p.clone()),
        _ => None,
    };
    Ok(SmoothnessReport {
        sum_bounded,
        robust,
        exact_ppoa,
        exact_ccpoa,
        claim_pne,
        claim_cce,
        gap,
    })
}
