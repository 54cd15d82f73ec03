//! Weighted congestion models, generalized games and exact evaluation of
//! costs, deviation gaps, social functions and equilibrium predicates.
//!
//! Congestion values are only ever subset sums of the player weights, so every
//! latency is looked up by the bitmask of the players using a resource. Basis
//! values are tabulated per mask when a game is built, which is also where
//! lookup-table coverage and latency non-negativity are checked.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Largest player count supported by the mask-indexed evaluation.
pub const MAX_PLAYERS: usize = 20;

pub type Mask = u32;

pub fn mask_players(mask: Mask) -> impl Iterator<Item = usize> {
    (0..Mask::BITS as usize).filter(move |&i| mask & (1 << i) != 0)
}

/// Sum of the weights of the players in `mask`.
pub fn mask_weight<S: Scalar>(weights: &[S], mask: Mask) -> S {
    mask_players(mask).fold(S::zero(), |acc, j| acc + weights[j].clone())
}

/// `sum_{j in mask} row[j] * w_j`.
pub fn weighted_row_sum<S: Scalar>(row: &[S], weights: &[S], mask: Mask) -> S {
    mask_players(mask).fold(S::zero(), |acc, j| {
        acc + row[j].clone() * weights[j].clone()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum BasisKind<S> {
    Monomial(u32),
    /// 1 for every positive congestion.
    Indicator,
    /// Exact lookup table of (congestion, value) pairs.
    Table(Vec<(S, S)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction<S> {
    pub kind: BasisKind<S>,
}

impl<S: Scalar> BasisFunction<S> {
    pub fn monomial(degree: u32) -> Self {
        BasisFunction {
            kind: BasisKind::Monomial(degree),
        }
    }

    pub fn indicator() -> Self {
        BasisFunction {
            kind: BasisKind::Indicator,
        }
    }

    pub fn table(entries: Vec<(S, S)>) -> Self {
        BasisFunction {
            kind: BasisKind::Table(entries),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            BasisKind::Monomial(0) => Err(invalid!("monomial degree must be at least 1")),
            BasisKind::Table(entries) => {
                if let Some((x, y)) = entries
                    .iter()
                    .find(|(x, y)| *x <= S::zero() || *y < S::zero())
                {
                    return Err(invalid!(
                        "table entry ({x}, {y}) must have positive congestion and non-negative value"
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Evaluates the function; `None` when a table does not cover `x`.
    /// `f(0) = 0` for every kind.
    pub fn eval(&self, x: &S) -> Option<S> {
        if *x <= S::zero() {
            return Some(S::zero());
        }
        match &self.kind {
            BasisKind::Monomial(d) => {
                Some((0..*d).fold(S::one(), |acc, _| acc * x.clone()))
            }
            BasisKind::Indicator => Some(S::one()),
            BasisKind::Table(entries) => entries
                .iter()
                .find(|(key, _)| key.approx_eq(x, 1e-9, 1e-12))
                .map(|(_, v)| v.clone()),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            BasisKind::Monomial(1) => "x".to_string(),
            BasisKind::Monomial(d) => format!("x^{d}"),
            BasisKind::Indicator => "1[x>0]".to_string(),
            BasisKind::Table(entries) => format!("table[{}]", entries.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrategyProfile(pub Vec<usize>);

impl StrategyProfile {
    /// The profile `(sigma_{-i}, x)`.
    pub fn with(&self, i: usize, x: usize) -> StrategyProfile {
        let mut choices = self.0.clone();
        choices[i] = x;
        StrategyProfile(choices)
    }

    pub fn choice(&self, i: usize) -> usize {
        self.0[i]
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CongestionModel<S> {
    weights: Vec<S>,
    resources: Vec<String>,
    resource_index: HashMap<String, usize>,
    /// Per player, per strategy: sorted resource indices.
    strategies: Vec<Vec<Vec<usize>>>,
}

impl<S: Scalar> CongestionModel<S> {
    pub fn new(
        weights: Vec<S>,
        resources: Vec<String>,
        strategies: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let n = weights.len();
        if n < 2 {
            return Err(invalid!("a congestion model needs at least 2 players, got {n}"));
        }
        if n > MAX_PLAYERS {
            return Err(Error::SizeCap {
                what: "player count",
                size: n as u128,
                cap: MAX_PLAYERS as u128,
            });
        }
        if let Some(i) = weights.iter().position(|w| *w <= S::zero()) {
            return Err(invalid!("weight of player {} must be positive", i + 1));
        }
        if resources.is_empty() {
            return Err(invalid!("resource set is empty"));
        }
        let mut resource_index = HashMap::with_capacity(resources.len());
        for (idx, id) in resources.iter().enumerate() {
            if resource_index.insert(id.clone(), idx).is_some() {
                return Err(invalid!("duplicate resource id `{id}`"));
            }
        }
        if strategies.len() != n {
            return Err(invalid!(
                "expected strategy sets for {n} players, got {}",
                strategies.len()
            ));
        }
        let mut normalized = Vec::with_capacity(n);
        for (i, set) in strategies.into_iter().enumerate() {
            if set.is_empty() {
                return Err(invalid!("player {} has no strategies", i + 1));
            }
            let mut out = Vec::with_capacity(set.len());
            for mut strategy in set {
                strategy.sort_unstable();
                strategy.dedup();
                if strategy.is_empty() {
                    return Err(invalid!("player {} has an empty strategy", i + 1));
                }
                if let Some(&e) = strategy.iter().find(|&&e| e >= resources.len()) {
                    return Err(invalid!("player {} uses unknown resource index {e}", i + 1));
                }
                out.push(strategy);
            }
            normalized.push(out);
        }
        Ok(CongestionModel {
            weights,
            resources,
            resource_index,
            strategies: normalized,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn resources(&self) -> &[String] {
        &self.resources
    }

    pub fn resource_count(&self) -> usize {
        self.resources.len()
    }

    pub fn resource_id(&self, name: &str) -> Option<usize> {
        self.resource_index.get(name).copied()
    }

    pub fn strategies(&self, i: usize) -> &[Vec<usize>] {
        &self.strategies[i]
    }

    pub fn strategy(&self, i: usize, x: usize) -> &[usize] {
        &self.strategies[i][x]
    }

    pub fn profile_count(&self) -> u128 {
        self.strategies.iter().map(|s| s.len() as u128).product()
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.0.len() != self.n() {
            return Err(invalid!(
                "profile has {} choices for {} players",
                profile.0.len(),
                self.n()
            ));
        }
        for (i, &c) in profile.0.iter().enumerate() {
            if c >= self.strategies[i].len() {
                return Err(invalid!("player {} has no strategy {c}", i + 1));
            }
        }
        Ok(())
    }

    /// Lexicographic enumeration of all profiles (player 1 most significant).
    pub fn profiles(&self) -> ProfileIter {
        ProfileIter {
            radices: self.strategies.iter().map(Vec::len).collect(),
            next: Some(vec![0; self.n()]),
        }
    }

    /// Bitmask of the players using each resource.
    pub fn users(&self, profile: &StrategyProfile) -> Vec<Mask> {
        let mut users = vec![0; self.resources.len()];
        for (i, &c) in profile.0.iter().enumerate() {
            for &e in &self.strategies[i][c] {
                users[e] |= 1 << i;
            }
        }
        users
    }

    /// Players that use `e` in at least one strategy.
    pub fn potential_users(&self) -> Vec<Mask> {
        let mut users = vec![0; self.resources.len()];
        for (i, set) in self.strategies.iter().enumerate() {
            for strategy in set {
                for &e in strategy {
                    users[e] |= 1 << i;
                }
            }
        }
        users
    }

    pub fn congestion(&self, profile: &StrategyProfile, e: usize) -> Result<S> {
        if e >= self.resources.len() {
            return Err(invalid!("unknown resource index {e}"));
        }
        self.check_profile(profile)?;
        let mask = profile
            .0
            .iter()
            .enumerate()
            .filter(|(i, &c)| self.strategies[*i][c].binary_search(&e).is_ok())
            .fold(0, |m, (i, _)| m | (1 << i));
        Ok(mask_weight(&self.weights, mask))
    }

    pub fn enumeration_guard(&self, cap: u128) -> Result<()> {
        let count = self.profile_count();
        if count > cap {
            return Err(Error::SizeCap {
                what: "profile count",
                size: count,
                cap,
            });
        }
        Ok(())
    }
}

pub struct ProfileIter {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for ProfileIter {
    type Item = StrategyProfile;

    fn next(&mut self) -> Option<StrategyProfile> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.radices[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(StrategyProfile(current))
    }
}

/// Which form of the approximate-equilibrium condition to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Predicate {
    /// The grouped deviation expression the linear programs are built from.
    Eq1,
    /// `c^_i(s) <= (1 + eps) c^_i(s_-i, x)` taken literally.
    Verbatim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SocialKind {
    Sum,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocialSpec<S> {
    pub kind: SocialKind,
    pub beta: Vec<Vec<S>>,
}

impl<S: Scalar> SocialSpec<S> {
    pub fn new(kind: SocialKind, beta: Vec<Vec<S>>) -> Result<Self> {
        let n = beta.len();
        if beta.iter().any(|row| row.len() != n) {
            return Err(invalid!("beta must be a square matrix"));
        }
        if beta.iter().flatten().any(|b| *b < S::zero()) {
            return Err(invalid!("beta must be entrywise non-negative"));
        }
        if !beta.iter().flatten().any(|b| *b > S::zero()) {
            return Err(invalid!("beta must have a positive entry"));
        }
        Ok(SocialSpec { kind, beta })
    }

    pub fn identity(kind: SocialKind, n: usize) -> Self {
        SocialSpec {
            kind,
            beta: crate::scalar::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    /// `sum_i beta_ij`.
    pub fn column_sum(&self, j: usize) -> S {
        self.beta.iter().fold(S::zero(), |acc, row| acc + row[j].clone())
    }

    /// `sum_j beta_ij`.
    pub fn row_sum(&self, i: usize) -> S {
        self.beta[i].iter().fold(S::zero(), |acc, b| acc + b.clone())
    }

    /// `sum_i sum_{j in mask} beta_ij w_j`, the SUM weight of a user set.
    pub fn sum_weight(&self, weights: &[S], mask: Mask) -> S {
        mask_players(mask).fold(S::zero(), |acc, j| {
            acc + self.column_sum(j) * weights[j].clone()
        })
    }

    /// Aggregates per-player expected beta-costs into the social value.
    pub fn aggregate(&self, beta_costs: &[S]) -> S {
        match self.kind {
            SocialKind::Sum => beta_costs.iter().fold(S::zero(), |a, c| a + c.clone()),
            SocialKind::Max => beta_costs
                .iter()
                .cloned()
                .reduce(S::max_of)
                .unwrap_or_else(S::zero),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileDistribution<S> {
    entries: Vec<(StrategyProfile, S)>,
}

impl<S: Scalar> ProfileDistribution<S> {
    pub fn new(entries: Vec<(StrategyProfile, S)>) -> Result<Self> {
        if entries.iter().any(|(_, p)| *p < S::zero()) {
            return Err(invalid!("probability masses must be non-negative"));
        }
        let total = entries.iter().fold(S::zero(), |a, (_, p)| a + p.clone());
        if !total.approx_eq(&S::one(), 1e-12, 0.0) {
            return Err(invalid!("probability masses sum to {total}, not 1"));
        }
        Ok(ProfileDistribution { entries })
    }

    pub fn point(profile: StrategyProfile) -> Self {
        ProfileDistribution {
            entries: vec![(profile, S::one())],
        }
    }

    pub fn uniform(profiles: Vec<StrategyProfile>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(invalid!("uniform distribution over no profiles"));
        }
        let mass = S::one() / S::from_i64(profiles.len() as i64);
        Ok(ProfileDistribution {
            entries: profiles.into_iter().map(|p| (p, mass.clone())).collect(),
        })
    }

    pub fn entries(&self) -> &[(StrategyProfile, S)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = &(StrategyProfile, S)> {
        self.entries.iter().filter(|(_, p)| !p.is_zero())
    }
}

/// A congestion model with latency coefficients over a basis and an altruism
/// matrix `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedGame<S> {
    model: CongestionModel<S>,
    basis: Vec<BasisFunction<S>>,
    /// `coefficients[e][k]`.
    coefficients: Vec<Vec<S>>,
    alpha: Vec<Vec<S>>,
    /// `basis_values[k][mask] = f_k(W(mask))`.
    basis_values: Vec<Vec<S>>,
}

/// Tabulates `f_k(W(mask))` for every mask; fails on table misses.
pub fn tabulate_basis<S: Scalar>(
    basis: &[BasisFunction<S>],
    weights: &[S],
) -> Result<Vec<Vec<S>>> {
    let n = weights.len();
    let masks = 1usize << n;
    let sums: Vec<S> = (0..masks).map(|m| mask_weight(weights, m as Mask)).collect();
    basis
        .iter()
        .enumerate()
        .map(|(k, f)| {
            sums.iter()
                .map(|x| {
                    f.eval(x).ok_or_else(|| Error::TableMiss {
                        basis: k,
                        value: x.to_string(),
                    })
                })
                .collect()
        })
        .collect()
}

impl<S: Scalar> GeneralizedGame<S> {
    pub fn new(
        model: CongestionModel<S>,
        basis: Vec<BasisFunction<S>>,
        coefficients: Vec<Vec<S>>,
        alpha: Vec<Vec<S>>,
    ) -> Result<Self> {
        let n = model.n();
        if basis.is_empty() {
            return Err(invalid!("basis is empty"));
        }
        for f in &basis {
            f.validate()?;
        }
        if coefficients.len() != model.resource_count() {
            return Err(invalid!(
                "expected coefficients for {} resources, got {}",
                model.resource_count(),
                coefficients.len()
            ));
        }
        if let Some(e) = coefficients.iter().position(|c| c.len() != basis.len()) {
            return Err(invalid!(
                "resource `{}` has {} coefficients for {} basis functions",
                model.resources()[e],
                coefficients[e].len(),
                basis.len()
            ));
        }
        if alpha.len() != n || alpha.iter().any(|row| row.len() != n) {
            return Err(invalid!("alpha must be {n}x{n}"));
        }
        let basis_values = tabulate_basis(&basis, model.weights())?;
        let game = GeneralizedGame {
            model,
            basis,
            coefficients,
            alpha,
            basis_values,
        };
        game.check_latencies()?;
        Ok(game)
    }

    fn check_latencies(&self) -> Result<()> {
        let tol = S::tol(1e-12);
        for (e, potential) in self.model.potential_users().into_iter().enumerate() {
            let mut sub = potential;
            while sub != 0 {
                let l = self.latency(e, sub);
                if l < -tol.clone() {
                    return Err(invalid!(
                        "latency of resource `{}` is negative ({l}) at congestion {}",
                        self.model.resources()[e],
                        mask_weight(self.model.weights(), sub)
                    ));
                }
                sub = (sub - 1) & potential;
            }
        }
        Ok(())
    }

    pub fn model(&self) -> &CongestionModel<S> {
        &self.model
    }

    pub fn basis(&self) -> &[BasisFunction<S>] {
        &self.basis
    }

    pub fn coefficients(&self) -> &[Vec<S>] {
        &self.coefficients
    }

    pub fn alpha(&self) -> &[Vec<S>] {
        &self.alpha
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn basis_value(&self, k: usize, mask: Mask) -> &S {
        &self.basis_values[k][mask as usize]
    }

    /// Same model, basis and alpha with every coefficient multiplied by `c`.
    pub fn scaled(&self, c: &S) -> Result<Self> {
        let coefficients = self
            .coefficients
            .iter()
            .map(|row| row.iter().map(|v| v.clone() * c.clone()).collect())
            .collect();
        GeneralizedGame::new(
            self.model.clone(),
            self.basis.clone(),
            coefficients,
            self.alpha.clone(),
        )
    }

    pub fn with_alpha(&self, alpha: Vec<Vec<S>>) -> Result<Self> {
        GeneralizedGame::new(
            self.model.clone(),
            self.basis.clone(),
            self.coefficients.clone(),
            alpha,
        )
    }

    /// `l_e` at the congestion produced by the user set `mask`.
    pub fn latency(&self, e: usize, mask: Mask) -> S {
        if mask == 0 {
            return S::zero();
        }
        self.coefficients[e]
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (k, v)| {
                acc + v.clone() * self.basis_values[k][mask as usize].clone()
            })
    }

    fn check_player(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(invalid!("unknown player index {i}"));
        }
        Ok(())
    }

    fn cost_with_users(&self, users: &[Mask], profile: &StrategyProfile, i: usize) -> S {
        let sum = self
            .model
            .strategy(i, profile.choice(i))
            .iter()
            .fold(S::zero(), |acc, &e| acc + self.latency(e, users[e]));
        self.model.weights()[i].clone() * sum
    }

    pub fn individual_cost(&self, profile: &StrategyProfile, i: usize) -> Result<S> {
        self.model.check_profile(profile)?;
        self.check_player(i)?;
        let users = self.model.users(profile);
        Ok(self.cost_with_users(&users, profile, i))
    }

    /// `c_i(s)` for every player.
    pub fn individual_costs(&self, profile: &StrategyProfile) -> Vec<S> {
        let users = self.model.users(profile);
        (0..self.n())
            .map(|i| self.cost_with_users(&users, profile, i))
            .collect()
    }

    fn combine(row: &[S], costs: &[S]) -> S {
        row.iter()
            .zip(costs)
            .fold(S::zero(), |acc, (a, c)| acc + a.clone() * c.clone())
    }

    /// `c^_i(s) = sum_j alpha_ij c_j(s)`.
    pub fn perceived_cost(&self, profile: &StrategyProfile, i: usize) -> Result<S> {
        self.model.check_profile(profile)?;
        self.check_player(i)?;
        Ok(Self::combine(&self.alpha[i], &self.individual_costs(profile)))
    }

    /// Perceived costs of all players.
    pub fn perceived_costs(&self, profile: &StrategyProfile) -> Vec<S> {
        let costs = self.individual_costs(profile);
        self.alpha.iter().map(|row| Self::combine(row, &costs)).collect()
    }

    /// The resource-grouped form
    /// `sum_e sum_k v_k^e f_k(n_e) sum_{j: e in s_j} alpha_ij w_j`.
    pub fn perceived_cost_by_resource(&self, profile: &StrategyProfile, i: usize) -> Result<S> {
        self.model.check_profile(profile)?;
        self.check_player(i)?;
        let users = self.model.users(profile);
        let weights = self.model.weights();
        Ok(users.iter().enumerate().fold(S::zero(), |acc, (e, &mask)| {
            if mask == 0 {
                acc
            } else {
                acc + self.latency(e, mask) * weighted_row_sum(&self.alpha[i], weights, mask)
            }
        }))
    }

    /// The grouped deviation expression for player `i` moving to strategy `x`:
    ///
    /// `sum_{e in s_i \ x} l_e(n_e) sum_{j: e in s_j} alpha_ij w_j
    ///  - (1+eps) sum_{e in x \ s_i} l_e(n_e + w_i) (alpha_ii w_i + sum_{j: e in s_j} alpha_ij w_j)`.
    pub fn deviation_gap(
        &self,
        profile: &StrategyProfile,
        i: usize,
        x: usize,
        epsilon: &S,
    ) -> Result<S> {
        self.model.check_profile(profile)?;
        self.check_player(i)?;
        if x >= self.model.strategies(i).len() {
            return Err(invalid!("player {} has no strategy {x}", i + 1));
        }
        let users = self.model.users(profile);
        Ok(self.gap_with_users(&users, profile, i, x, epsilon))
    }

    fn gap_with_users(
        &self,
        users: &[Mask],
        profile: &StrategyProfile,
        i: usize,
        x: usize,
        epsilon: &S,
    ) -> S {
        let current = self.model.strategy(i, profile.choice(i));
        let target = self.model.strategy(i, x);
        let weights = self.model.weights();
        let row = &self.alpha[i];
        let mut leave = S::zero();
        for &e in difference(current, target) {
            leave = leave + self.latency(e, users[e]) * weighted_row_sum(row, weights, users[e]);
        }
        let mut join = S::zero();
        let own = row[i].clone() * weights[i].clone();
        for &e in difference(target, current) {
            let mult = own.clone() + weighted_row_sum(row, weights, users[e]);
            join = join + self.latency(e, users[e] | (1 << i)) * mult;
        }
        leave - (S::one() + epsilon.clone()) * join
    }

    /// `c^_i(s) - (1+eps) c^_i(s_-i, x)` evaluated literally.
    pub fn verbatim_gap(
        &self,
        profile: &StrategyProfile,
        i: usize,
        x: usize,
        epsilon: &S,
    ) -> S {
        let now = Self::combine(&self.alpha[i], &self.individual_costs(profile));
        let moved = Self::combine(&self.alpha[i], &self.individual_costs(&profile.with(i, x)));
        now - (S::one() + epsilon.clone()) * moved
    }

    /// `gap_i(s, x)` under the chosen predicate for every player and target.
    pub fn gaps(
        &self,
        profile: &StrategyProfile,
        epsilon: &S,
        predicate: Predicate,
    ) -> Vec<Vec<S>> {
        let users = self.model.users(profile);
        (0..self.n())
            .map(|i| {
                (0..self.model.strategies(i).len())
                    .map(|x| match predicate {
                        Predicate::Eq1 => self.gap_with_users(&users, profile, i, x, epsilon),
                        Predicate::Verbatim => self.verbatim_gap(profile, i, x, epsilon),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn beta_cost(&self, spec: &SocialSpec<S>, profile: &StrategyProfile, i: usize) -> Result<S> {
        self.check_spec(spec)?;
        self.model.check_profile(profile)?;
        self.check_player(i)?;
        Ok(Self::combine(&spec.beta[i], &self.individual_costs(profile)))
    }

    pub fn beta_costs(&self, spec: &SocialSpec<S>, profile: &StrategyProfile) -> Vec<S> {
        let costs = self.individual_costs(profile);
        spec.beta.iter().map(|row| Self::combine(row, &costs)).collect()
    }

    pub fn check_spec(&self, spec: &SocialSpec<S>) -> Result<()> {
        if spec.n() != self.n() {
            return Err(invalid!(
                "beta is {}x{} for a {}-player game",
                spec.n(),
                spec.n(),
                self.n()
            ));
        }
        Ok(())
    }

    pub fn social_value_profile(&self, spec: &SocialSpec<S>, profile: &StrategyProfile) -> S {
        spec.aggregate(&self.beta_costs(spec, profile))
    }

    /// SUM: `sum_i E[beta-cost_i]`; MAX: `max_i E[beta-cost_i]`.
    pub fn social_value(&self, spec: &SocialSpec<S>, dist: &ProfileDistribution<S>) -> Result<S> {
        self.check_spec(spec)?;
        let mut expected = vec![S::zero(); self.n()];
        for (profile, p) in dist.support() {
            self.model.check_profile(profile)?;
            for (acc, c) in expected.iter_mut().zip(self.beta_costs(spec, profile)) {
                *acc = acc.clone() + p.clone() * c;
            }
        }
        Ok(spec.aggregate(&expected))
    }

    pub fn is_eps_pne_with(
        &self,
        profile: &StrategyProfile,
        epsilon: &S,
        predicate: Predicate,
        tol: &S,
    ) -> bool {
        self.gaps(profile, epsilon, predicate)
            .iter()
            .flatten()
            .all(|g| g <= tol)
    }

    /// Every deviation gap (grouped form) is at most `tol`.
    pub fn is_eps_pne(&self, profile: &StrategyProfile, epsilon: &S, tol: &S) -> bool {
        self.is_eps_pne_with(profile, epsilon, Predicate::Eq1, tol)
    }

    pub fn is_eps_pne_verbatim(&self, profile: &StrategyProfile, epsilon: &S, tol: &S) -> bool {
        self.is_eps_pne_with(profile, epsilon, Predicate::Verbatim, tol)
    }

    /// Expected gaps `sum_s p_s gap_i(s, x)` for every player and target.
    pub fn expected_gaps(
        &self,
        dist: &ProfileDistribution<S>,
        epsilon: &S,
        predicate: Predicate,
    ) -> Vec<Vec<S>> {
        let mut acc: Vec<Vec<S>> = (0..self.n())
            .map(|i| vec![S::zero(); self.model.strategies(i).len()])
            .collect();
        for (profile, p) in dist.support() {
            for (row, gaps) in acc.iter_mut().zip(self.gaps(profile, epsilon, predicate)) {
                for (a, g) in row.iter_mut().zip(gaps) {
                    *a = a.clone() + p.clone() * g;
                }
            }
        }
        acc
    }

    pub fn is_eps_cce_with(
        &self,
        dist: &ProfileDistribution<S>,
        epsilon: &S,
        predicate: Predicate,
        tol: &S,
    ) -> bool {
        self.expected_gaps(dist, epsilon, predicate)
            .iter()
            .flatten()
            .all(|g| g <= tol)
    }

    /// The coarse correlated condition on expected perceived costs, literally.
    pub fn is_eps_cce(&self, dist: &ProfileDistribution<S>, epsilon: &S, tol: &S) -> bool {
        self.is_eps_cce_with(dist, epsilon, Predicate::Verbatim, tol)
    }
}

/// Elements of sorted `a` missing from sorted `b`.
fn difference<'a>(a: &'a [usize], b: &'a [usize]) -> impl Iterator<Item = &'a usize> + 'a {
    a.iter().filter(move |e| b.binary_search(e).is_err())
}

/// The canonical two-player game: two unit-weight players, resources `a` and
/// `b` with latency `x`, each player picks one resource, alpha = I.
pub fn g1<S: Scalar>() -> GeneralizedGame<S> {
    let model = CongestionModel::new(
        vec![S::one(), S::one()],
        vec!["a".into(), "b".into()],
        vec![vec![vec![0], vec![1]], vec![vec![0], vec![1]]],
    )
    .expect("valid model");
    GeneralizedGame::new(
        model,
        vec![BasisFunction::monomial(1)],
        vec![vec![S::one()], vec![S::one()]],
        crate::scalar::identity(2),
    )
    .expect("valid game")
}
