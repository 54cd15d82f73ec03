//! Seeded generators for test games, configurations and distributions.
//!
//! Every value is drawn from a grid of small rationals so that the same seed
//! gives the same instance in float and exact mode.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::formulations::WorstCaseConfig;
use crate::game::{BasisFunction, CongestionModel, GeneralizedGame, ProfileDistribution, SocialKind, SocialSpec, StrategyProfile};
use crate::scalar::{identity, Scalar};

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k / den` for a uniform integer `k` with the result in `[lo, hi]`.
pub fn grid<S: Scalar>(rng: &mut Rng64, lo: i64, hi: i64, den: i64) -> S {
    S::ratio(rng.gen_range(lo * den..=hi * den), den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelShape {
    pub resources: RangeInclusive<usize>,
    pub strategies: RangeInclusive<usize>,
    pub max_strategy_size: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            resources: 2..=4,
            strategies: 1..=3,
            max_strategy_size: 2,
        }
    }
}

pub fn random_model<S: Scalar>(rng: &mut Rng64, weights: &[S], shape: &ModelShape) -> Result<CongestionModel<S>> {
    let m = rng.gen_range(shape.resources.clone());
    let resources = (0..m).map(|e| format!("r{e}")).collect();
    let all: Vec<usize> = (0..m).collect();
    let strategies = weights
        .iter()
        .map(|_| {
            let count = rng.gen_range(shape.strategies.clone());
            (0..count)
                .map(|_| {
                    let size = rng.gen_range(1..=shape.max_strategy_size.min(m).max(1));
                    all.choose_multiple(rng, size).copied().collect()
                })
                .collect()
        })
        .collect();
    CongestionModel::new(weights.to_vec(), resources, strategies)
}

/// Coefficients are quarters in `[0, 3]`, with at least one positive entry
/// per resource so that every used resource has a positive latency.
pub fn random_coefficients<S: Scalar>(rng: &mut Rng64, resources: usize, r: usize) -> Vec<Vec<S>> {
    (0..resources)
        .map(|_| {
            let mut row: Vec<S> = (0..r).map(|_| grid(rng, 0, 3, 4)).collect();
            if row.iter().all(|v| *v == S::zero()) {
                let k = rng.gen_range(0..r);
                row[k] = S::ratio(rng.gen_range(1..=12), 4);
            }
            row
        })
        .collect()
}

/// A random game over a fresh model with the given weights, basis and alpha.
pub fn random_game<S: Scalar>(
    rng: &mut Rng64,
    weights: &[S],
    basis: &[BasisFunction<S>],
    alpha: &[Vec<S>],
    shape: &ModelShape,
) -> Result<GeneralizedGame<S>> {
    let model = random_model(rng, weights, shape)?;
    let coefficients = random_coefficients(rng, model.resource_count(), basis.len());
    GeneralizedGame::new(model, basis.to_vec(), coefficients, alpha.to_vec())
}

/// A random game in the class of `cfg`.
pub fn random_game_in_class<S: Scalar>(rng: &mut Rng64, cfg: &WorstCaseConfig<S>, shape: &ModelShape) -> Result<GeneralizedGame<S>> {
    random_game(rng, &cfg.weights, &cfg.basis, &cfg.alpha, shape)
}

/// Weights are halves in `[1/2, 2]`.
pub fn random_weights<S: Scalar>(rng: &mut Rng64, n: usize) -> Vec<S> {
    (0..n).map(|_| S::ratio(rng.gen_range(1..=4), 2)).collect()
}

/// Entries are quarters in `[lo, 1]`.
pub fn random_alpha<S: Scalar>(rng: &mut Rng64, n: usize, lo: i64) -> Vec<Vec<S>> {
    (0..n).map(|_| (0..n).map(|_| grid(rng, lo, 1, 4)).collect()).collect()
}

/// Non-negative quarters in `[0, 2]` with a positive diagonal.
pub fn random_beta<S: Scalar>(rng: &mut Rng64, n: usize) -> Vec<Vec<S>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        S::ratio(rng.gen_range(1..=8), 4)
                    } else {
                        grid(rng, 0, 2, 4)
                    }
                })
                .collect()
        })
        .collect()
}

/// A non-empty subset of `{x, x^2, 1[x>0]}`.
pub fn random_basis<S: Scalar>(rng: &mut Rng64) -> Vec<BasisFunction<S>> {
    let bits = rng.gen_range(1..8u8);
    basis_subset(bits)
}

/// Basis for bit set `bits` over `{x, x^2, 1[x>0]}`, in that order.
pub fn basis_subset<S: Scalar>(bits: u8) -> Vec<BasisFunction<S>> {
    let all = [BasisFunction::monomial(1), BasisFunction::monomial(2), BasisFunction::indicator()];
    all.into_iter()
        .enumerate()
        .filter(|(k, _)| bits & (1 << k) != 0)
        .map(|(_, f)| f)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigShape {
    pub unit_weights: bool,
    pub random_alpha: bool,
    /// Lower end of alpha entries when random.
    pub alpha_lo: i64,
    /// Redraw diagonal alpha entries from `[1/4, 1]`.
    pub alpha_positive_diagonal: bool,
    pub random_beta: bool,
}

impl Default for ConfigShape {
    fn default() -> Self {
        ConfigShape {
            unit_weights: false,
            random_alpha: true,
            alpha_lo: -1,
            alpha_positive_diagonal: false,
            random_beta: true,
        }
    }
}

pub fn random_config<S: Scalar>(
    rng: &mut Rng64,
    n: usize,
    kind: SocialKind,
    epsilon: S,
    shape: &ConfigShape,
) -> Result<WorstCaseConfig<S>> {
    let weights = if shape.unit_weights { vec![S::one(); n] } else { random_weights(rng, n) };
    let mut alpha = if shape.random_alpha { random_alpha(rng, n, shape.alpha_lo) } else { identity(n) };
    if shape.random_alpha && shape.alpha_positive_diagonal {
        for (i, row) in alpha.iter_mut().enumerate() {
            row[i] = S::ratio(rng.gen_range(1..=4), 4);
        }
    }
    let spec = if shape.random_beta {
        SocialSpec::new(kind, random_beta(rng, n))?
    } else {
        SocialSpec::identity(kind, n)
    };
    WorstCaseConfig::new(weights, alpha, spec, epsilon, random_basis(rng))
}

/// The regression grid: n in {2,3}, unit weights, eps in {0, 1/2}, alpha and
/// beta identity or seeded, every non-empty subset of `{x, x^2, 1[x>0]}`, SUM
/// and MAX. 224 named configurations, identical in both arithmetic modes.
pub fn regression_grid<S: Scalar>() -> Vec<(String, WorstCaseConfig<S>)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    for n in [2usize, 3] {
        for eps in [S::zero(), S::ratio(1, 2)] {
            for random_a in [false, true] {
                for random_b in [false, true] {
                    for bits in 1u8..8 {
                        for kind in [SocialKind::Sum, SocialKind::Max] {
                            seed += 1;
                            let mut rng = seeded(seed);
                            let alpha = if random_a { random_alpha(&mut rng, n, -1) } else { identity(n) };
                            let spec = if random_b {
                                SocialSpec::new(kind, random_beta(&mut rng, n)).expect("non-negative beta")
                            } else {
                                SocialSpec::identity(kind, n)
                            };
                            let cfg = WorstCaseConfig::new(vec![S::one(); n], alpha, spec, eps.clone(), basis_subset(bits))
                                .expect("valid grid configuration");
                            let name = format!(
                                "n={n} eps={eps} alpha={} beta={} basis={} {}",
                                if random_a { "rand" } else { "I" },
                                if random_b { "rand" } else { "I" },
                                cfg.basis.iter().map(|f| f.label()).collect::<Vec<_>>().join("+"),
                                if kind == SocialKind::Sum { "sum" } else { "max" },
                            );
                            out.push((name, cfg));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn random_profile<S: Scalar>(rng: &mut Rng64, model: &CongestionModel<S>) -> StrategyProfile {
    StrategyProfile((0..model.n()).map(|i| rng.gen_range(0..model.strategies(i).len())).collect())
}

/// Rational weights on up to `max_support` distinct profiles.
pub fn random_distribution<S: Scalar>(
    rng: &mut Rng64,
    model: &CongestionModel<S>,
    max_support: usize,
) -> Result<ProfileDistribution<S>> {
    let k = rng.gen_range(1..=max_support.max(1));
    let mut picked: Vec<StrategyProfile> = (0..k).map(|_| random_profile(rng, model)).collect();
    picked.sort();
    picked.dedup();
    let raw: Vec<i64> = picked.iter().map(|_| rng.gen_range(1..=8)).collect();
    let total: i64 = raw.iter().sum();
    ProfileDistribution::new(picked.into_iter().zip(raw).map(|(p, w)| (p, S::ratio(w, total))).collect())
}
