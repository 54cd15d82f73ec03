//! Primal and dual programs over latency coefficients.
//!
//! Every program is assembled from one [`Column`] per (resource, basis index):
//! the coefficient of `v^e_k` in each player's equilibrium row and in each
//! player's beta-cost under the equilibrium and the optimum. The primal uses
//! columns as columns and the dual uses them as rows, which keeps the pair
//! consistent by construction.

mod witness;
mod worst_case;

use crate::error::{invalid, Result};
use crate::game::{
    tabulate_basis, weighted_row_sum, BasisFunction, CongestionModel, Mask,
    ProfileDistribution, SocialKind, SocialSpec, StrategyProfile,
};
use crate::lp::{LinearProgram, Relation, Sense};
use crate::representative::RepresentativeModel;
use crate::scalar::Scalar;

pub use witness::{extract_worst_game, lemma1_shared_players, lemma1_witness, normalize_game};
pub use worst_case::{solve_worst_case, verify_extension, DesignatedRun, WorstCase, WorstCaseOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseConfig<S> {
    pub weights: Vec<S>,
    pub alpha: Vec<Vec<S>>,
    pub spec: SocialSpec<S>,
    pub epsilon: S,
    pub basis: Vec<BasisFunction<S>>,
}

impl<S: Scalar> WorstCaseConfig<S> {
    pub fn new(
        weights: Vec<S>,
        alpha: Vec<Vec<S>>,
        spec: SocialSpec<S>,
        epsilon: S,
        basis: Vec<BasisFunction<S>>,
    ) -> Result<Self> {
        let cfg = WorstCaseConfig { weights, alpha, spec, epsilon, basis };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        if n < 2 {
            return Err(invalid!("need at least 2 players, got {n}"));
        }
        if let Some(i) = self.weights.iter().position(|w| *w <= S::zero()) {
            return Err(invalid!("weight of player {} must be positive", i + 1));
        }
        if self.alpha.len() != n || self.alpha.iter().any(|r| r.len() != n) {
            return Err(invalid!("alpha must be {n}x{n}"));
        }
        if self.spec.n() != n {
            return Err(invalid!("beta must be {n}x{n}"));
        }
        if self.epsilon < S::zero() {
            return Err(invalid!("epsilon must be non-negative"));
        }
        if self.basis.is_empty() {
            return Err(invalid!("basis is empty"));
        }
        for f in &self.basis {
            f.validate()?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn with_epsilon(&self, epsilon: S) -> Self {
        WorstCaseConfig { epsilon, ..self.clone() }
    }

    pub fn with_kind(&self, kind: SocialKind) -> Self {
        let mut cfg = self.clone();
        cfg.spec.kind = kind;
        cfg
    }
}

/// Coefficients of one `v^e_k` across all rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Column<S> {
    pub label: String,
    /// Coefficient in player `i`'s equilibrium row.
    pub eq: Vec<S>,
    /// Coefficient in `beta-cost_i` under the equilibrium (or its expectation).
    pub sigma: Vec<S>,
    /// Coefficient in `beta-cost_i` under the optimum.
    pub opt: Vec<S>,
}

/// Evaluates column entries from the user sets `P` (equilibrium side) and
/// `Q` (deviation side) of a resource.
pub(crate) struct Coefficients<'a, S> {
    cfg: &'a WorstCaseConfig<S>,
    /// `values[k][mask] = f_k(W(mask))`.
    pub(crate) values: Vec<Vec<S>>,
    one_plus_eps: S,
}

impl<'a, S: Scalar> Coefficients<'a, S> {
    pub(crate) fn new(cfg: &'a WorstCaseConfig<S>) -> Result<Self> {
        cfg.validate()?;
        Ok(Coefficients {
            values: tabulate_basis(&cfg.basis, &cfg.weights)?,
            one_plus_eps: S::one() + cfg.epsilon.clone(),
            cfg,
        })
    }

    /// Coefficient of `v^e_k` in the grouped deviation expression of player
    /// `i` moving from the equilibrium to the optimum strategy.
    pub(crate) fn eq(&self, i: usize, p: Mask, q: Mask, k: usize) -> S {
        let bit = 1 << i;
        let w = &self.cfg.weights;
        let row = &self.cfg.alpha[i];
        match (p & bit != 0, q & bit != 0) {
            (true, false) => self.values[k][p as usize].clone() * weighted_row_sum(row, w, p),
            (false, true) => {
                let mult = row[i].clone() * w[i].clone() + weighted_row_sum(row, w, p);
                -(self.one_plus_eps.clone() * self.values[k][(p | bit) as usize].clone() * mult)
            }
            _ => S::zero(),
        }
    }

    /// Coefficient of `v^e_k` in `beta-cost_i` when the users are `mask`.
    pub(crate) fn social(&self, i: usize, mask: Mask, k: usize) -> S {
        if mask == 0 {
            return S::zero();
        }
        self.values[k][mask as usize].clone() * weighted_row_sum(&self.cfg.spec.beta[i], &self.cfg.weights, mask)
    }

    pub(crate) fn column(&self, label: String, p: Mask, q: Mask, k: usize) -> Column<S> {
        let n = self.cfg.n();
        Column {
            label,
            eq: (0..n).map(|i| self.eq(i, p, q, k)).collect(),
            sigma: (0..n).map(|i| self.social(i, p, k)).collect(),
            opt: (0..n).map(|i| self.social(i, q, k)).collect(),
        }
    }
}

fn var_label(resource: &str, k: usize) -> String {
    format!("v[{resource},{k}]")
}

/// Columns of the representative model in resource-major order.
pub fn representative_columns<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    rep: &RepresentativeModel<S>,
) -> Result<Vec<Column<S>>> {
    check_rep(cfg, rep)?;
    let coefs = Coefficients::new(cfg)?;
    let r = cfg.basis.len();
    let mut cols = Vec::with_capacity(rep.resource_count() * r);
    for e in 0..rep.resource_count() {
        let (p, q) = rep.masks(e);
        for k in 0..r {
            cols.push(coefs.column(var_label(&rep.model().resources()[e], k), p, q, k));
        }
    }
    Ok(cols)
}

/// Columns of an arbitrary model under a distribution `p` and optimum `o`;
/// equilibrium-side entries are expectations over `p`.
pub fn cce_columns<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    model: &CongestionModel<S>,
    p: &ProfileDistribution<S>,
    o: &StrategyProfile,
) -> Result<Vec<Column<S>>> {
    if model.weights() != cfg.weights.as_slice() {
        return Err(invalid!("model weights differ from the configuration weights"));
    }
    model.check_profile(o)?;
    let total = p.entries().iter().fold(S::zero(), |a, (_, m)| a + m.clone());
    if !total.approx_eq(&S::one(), 1e-12, 0.0) {
        return Err(invalid!("distribution sums to {total}, not 1"));
    }
    let coefs = Coefficients::new(cfg)?;
    let opt_users = model.users(o);
    let mut support = Vec::new();
    for (profile, mass) in p.support() {
        model.check_profile(profile)?;
        support.push((model.users(profile), mass.clone()));
    }
    let n = cfg.n();
    let r = cfg.basis.len();
    let mut cols = Vec::with_capacity(model.resource_count() * r);
    for e in 0..model.resource_count() {
        let q = opt_users[e];
        for k in 0..r {
            let mut col = Column {
                label: var_label(&model.resources()[e], k),
                eq: vec![S::zero(); n],
                sigma: vec![S::zero(); n],
                opt: (0..n).map(|i| coefs.social(i, q, k)).collect(),
            };
            for (users, mass) in &support {
                let pe = users[e];
                for i in 0..n {
                    col.eq[i] = col.eq[i].clone() + mass.clone() * coefs.eq(i, pe, q, k);
                    col.sigma[i] = col.sigma[i].clone() + mass.clone() * coefs.social(i, pe, k);
                }
            }
            cols.push(col);
        }
    }
    Ok(cols)
}

fn check_rep<S: Scalar>(cfg: &WorstCaseConfig<S>, rep: &RepresentativeModel<S>) -> Result<()> {
    if rep.weights() != cfg.weights.as_slice() {
        return Err(invalid!("representative model was built for different weights"));
    }
    Ok(())
}

fn check_designated<S: Scalar>(cfg: &WorstCaseConfig<S>, designated: Option<usize>) -> Result<()> {
    match (cfg.spec.kind, designated) {
        (SocialKind::Sum, None) => Ok(()),
        (SocialKind::Sum, Some(_)) => Err(invalid!("SUM programs take no designated player")),
        (SocialKind::Max, Some(d)) if d < cfg.n() => Ok(()),
        (SocialKind::Max, Some(d)) => Err(invalid!("designated player {d} out of range")),
        (SocialKind::Max, None) => Err(invalid!("MAX programs need a designated player")),
    }
}

fn sum_of<S: Scalar>(xs: &[S]) -> S {
    xs.iter().fold(S::zero(), |a, b| a + b.clone())
}

/// Primal program over the given columns. Variables are the column labels,
/// plus `t` for MAX. Rows: `eq[i]`, then `norm` (SUM) or `attain[i]` and
/// `norm[i]` (MAX), with players numbered from 1.
pub fn primal_program<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    cols: &[Column<S>],
    designated: Option<usize>,
) -> Result<LinearProgram<S>> {
    check_designated(cfg, designated)?;
    let n = cfg.n();
    let mut lp = LinearProgram::new(Sense::Maximize);
    for c in cols {
        lp.add_nonneg(c.label.clone())?;
    }
    let entries = |f: &dyn Fn(&Column<S>) -> S| -> Vec<(usize, S)> {
        cols.iter().enumerate().map(|(j, c)| (j, f(c))).collect()
    };
    for i in 0..n {
        lp.add_row(format!("eq[{}]", i + 1), entries(&|c| c.eq[i].clone()), Relation::Le, S::zero())?;
    }
    match designated {
        None => {
            for (j, c) in cols.iter().enumerate() {
                lp.set_objective(j, sum_of(&c.sigma));
            }
            lp.add_row("norm", entries(&|c| sum_of(&c.opt)), Relation::Le, S::one())?;
        }
        Some(d) => {
            let t = lp.add_nonneg("t")?;
            lp.set_objective(t, S::one());
            for i in 0..n {
                let mut coeffs = entries(&|c| c.sigma[i].clone());
                coeffs.push((t, -S::one()));
                let rel = if i == d { Relation::Eq } else { Relation::Le };
                lp.add_row(format!("attain[{}]", i + 1), coeffs, rel, S::zero())?;
            }
            for i in 0..n {
                lp.add_row(format!("norm[{}]", i + 1), entries(&|c| c.opt[i].clone()), Relation::Le, S::one())?;
            }
        }
    }
    Ok(lp)
}

/// Dual program over the given columns, one row `dual[label]` per column.
/// SUM: variables `y[i] >= 0`, `gamma >= 0`, minimise `gamma`. MAX: variables
/// `y[i] >= 0`, `z[i]`, `gamma[i] >= 0`, minimise `sum gamma[i]`, plus the row
/// `zsum`: `sum z[i] <= -1`. The designated player's `z` is free, the others
/// are non-negative.
pub fn dual_program<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    cols: &[Column<S>],
    designated: Option<usize>,
) -> Result<LinearProgram<S>> {
    check_designated(cfg, designated)?;
    let n = cfg.n();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let y: Vec<usize> = (0..n)
        .map(|i| lp.add_nonneg(format!("y[{}]", i + 1)))
        .collect::<Result<_>>()?;
    match designated {
        None => {
            let gamma = lp.add_nonneg("gamma")?;
            lp.set_objective(gamma, S::one());
            for c in cols {
                let mut coeffs: Vec<(usize, S)> = y.iter().zip(&c.eq).map(|(&v, a)| (v, a.clone())).collect();
                coeffs.push((gamma, sum_of(&c.opt)));
                lp.add_row(format!("dual[{}]", c.label), coeffs, Relation::Ge, sum_of(&c.sigma))?;
            }
        }
        Some(d) => {
            let z: Vec<usize> = (0..n)
                .map(|i| {
                    let lower = if i == d { None } else { Some(S::zero()) };
                    lp.add_var(format!("z[{}]", i + 1), lower, None)
                })
                .collect::<Result<_>>()?;
            let gamma: Vec<usize> = (0..n)
                .map(|i| lp.add_nonneg(format!("gamma[{}]", i + 1)))
                .collect::<Result<_>>()?;
            for &g in &gamma {
                lp.set_objective(g, S::one());
            }
            for c in cols {
                let mut coeffs = Vec::with_capacity(3 * n);
                for i in 0..n {
                    coeffs.push((y[i], c.eq[i].clone()));
                    coeffs.push((z[i], c.sigma[i].clone()));
                    coeffs.push((gamma[i], c.opt[i].clone()));
                }
                lp.add_row(format!("dual[{}]", c.label), coeffs, Relation::Ge, S::zero())?;
            }
            let zs = z.iter().map(|&v| (v, S::one())).collect();
            lp.add_row("zsum", zs, Relation::Le, -S::one())?;
        }
    }
    Ok(lp)
}

pub fn build_pp_pne<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    rep: &RepresentativeModel<S>,
    designated: Option<usize>,
) -> Result<LinearProgram<S>> {
    primal_program(cfg, &representative_columns(cfg, rep)?, designated)
}

pub fn build_dp_pne<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    rep: &RepresentativeModel<S>,
    designated: Option<usize>,
) -> Result<LinearProgram<S>> {
    dual_program(cfg, &representative_columns(cfg, rep)?, designated)
}

pub fn build_pp_cce<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    model: &CongestionModel<S>,
    p: &ProfileDistribution<S>,
    o: &StrategyProfile,
    designated: Option<usize>,
) -> Result<LinearProgram<S>> {
    primal_program(cfg, &cce_columns(cfg, model, p, o)?, designated)
}

pub fn build_dp_cce<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    model: &CongestionModel<S>,
    p: &ProfileDistribution<S>,
    o: &StrategyProfile,
    designated: Option<usize>,
) -> Result<LinearProgram<S>> {
    dual_program(cfg, &cce_columns(cfg, model, p, o)?, designated)
}

/// Primal assignment: latency coefficients per (resource, basis index) and
/// `t` for MAX programs.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallSolution<S> {
    /// `coefficients[e][k]`.
    pub coefficients: Vec<Vec<S>>,
    pub t: Option<S>,
    pub designated: Option<usize>,
}

impl<S: Scalar> SmallSolution<S> {
    /// Reads a solution of [`build_pp_pne`] back into coefficient form.
    pub fn from_primal(primal: &[S], resources: usize, r: usize, designated: Option<usize>) -> Self {
        let coefficients = (0..resources)
            .map(|e| {
                (0..r)
                    .map(|k| S::max_of(primal[e * r + k].clone(), S::zero()))
                    .collect()
            })
            .collect();
        SmallSolution {
            coefficients,
            t: designated.map(|_| primal[resources * r].clone()),
            designated,
        }
    }

    /// Variable values in the column order of [`primal_program`].
    pub fn to_primal(&self) -> Vec<S> {
        let mut x: Vec<S> = self.coefficients.iter().flatten().cloned().collect();
        if let Some(t) = &self.t {
            x.push(t.clone());
        }
        x
    }
}

/// A solution of a dual program in named form.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution<S> {
    pub y: Vec<S>,
    /// One entry for SUM, one per player for MAX.
    pub gamma: Vec<S>,
    /// Empty for SUM.
    pub z: Vec<S>,
    pub designated: Option<usize>,
}

impl<S: Scalar> DualSolution<S> {
    pub fn from_report(lp: &LinearProgram<S>, x: &[S], designated: Option<usize>) -> Self {
        let get = |name: String| lp.var_id(&name).map(|j| x[j].clone()).unwrap_or_else(S::zero);
        let n = (1..).take_while(|i| lp.var_id(&format!("y[{i}]")).is_some()).count();
        let y = (1..=n).map(|i| get(format!("y[{i}]"))).collect();
        match designated {
            None => DualSolution { y, gamma: vec![get("gamma".into())], z: Vec::new(), designated },
            Some(_) => DualSolution {
                y,
                gamma: (1..=n).map(|i| get(format!("gamma[{i}]"))).collect(),
                z: (1..=n).map(|i| get(format!("z[{i}]"))).collect(),
                designated,
            },
        }
    }

    pub fn value(&self) -> S {
        sum_of(&self.gamma)
    }

    /// Assignment for a program built by [`dual_program`].
    pub fn assignment(&self, lp: &LinearProgram<S>) -> Result<Vec<S>> {
        let mut pairs: Vec<(String, S)> = self
            .y
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("y[{}]", i + 1), v.clone()))
            .collect();
        if self.designated.is_none() {
            pairs.push(("gamma".into(), self.gamma[0].clone()));
        } else {
            for (i, g) in self.gamma.iter().enumerate() {
                pairs.push((format!("gamma[{}]", i + 1), g.clone()));
            }
            for (i, z) in self.z.iter().enumerate() {
                pairs.push((format!("z[{}]", i + 1), z.clone()));
            }
        }
        lp.assignment(pairs.iter().map(|(k, v)| (k.as_str(), v.clone())))
    }
}
