//! The representative model: one resource per ordered pair `(P, Q)` of player
//! sets, with `P` the users under `sigma*` and `Q` the users under `o*`.

use crate::error::{invalid, Error, Result};
use crate::game::{mask_players, CongestionModel, Mask, StrategyProfile};
use crate::scalar::Scalar;

pub const DEFAULT_REPRESENTATIVE_CAP: usize = 10;

/// Strategy index of `sigma*_i` in every player's strategy set.
pub const SIGMA: usize = 0;
/// Strategy index of `o*_i`.
pub const OPT: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentativeModel<S> {
    model: CongestionModel<S>,
}

/// `"P:{1,3}|Q:{}"` with 1-based player numbers.
pub fn resource_name(p: Mask, q: Mask) -> String {
    let set = |m: Mask| {
        mask_players(m)
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("P:{{{}}}|Q:{{{}}}", set(p), set(q))
}

pub fn build_representative<S: Scalar>(weights: Vec<S>, cap: usize) -> Result<RepresentativeModel<S>> {
    let n = weights.len();
    if n > cap {
        return Err(Error::SizeCap {
            what: "representative model player count",
            size: n as u128,
            cap: cap as u128,
        });
    }
    if n < 2 {
        return Err(invalid!("a congestion model needs at least 2 players, got {n}"));
    }
    let subsets = 1usize << n;
    let mut resources = Vec::with_capacity(subsets * subsets);
    for p in 0..subsets {
        for q in 0..subsets {
            resources.push(resource_name(p as Mask, q as Mask));
        }
    }
    let strategies = (0..n)
        .map(|i| {
            let bit = 1usize << i;
            let sigma: Vec<usize> = (0..subsets * subsets).filter(|e| (e / subsets) & bit != 0).collect();
            let opt: Vec<usize> = (0..subsets * subsets).filter(|e| (e % subsets) & bit != 0).collect();
            vec![sigma, opt]
        })
        .collect();
    Ok(RepresentativeModel {
        model: CongestionModel::new(weights, resources, strategies)?,
    })
}

impl<S: Scalar> RepresentativeModel<S> {
    pub fn model(&self) -> &CongestionModel<S> {
        &self.model
    }

    pub fn into_model(self) -> CongestionModel<S> {
        self.model
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn weights(&self) -> &[S] {
        self.model.weights()
    }

    pub fn resource_count(&self) -> usize {
        self.model.resource_count()
    }

    pub fn resource(&self, p: Mask, q: Mask) -> usize {
        ((p as usize) << self.n()) | q as usize
    }

    /// `(P, Q)` of a resource index.
    pub fn masks(&self, e: usize) -> (Mask, Mask) {
        let n = self.n();
        ((e >> n) as Mask, (e & ((1 << n) - 1)) as Mask)
    }

    pub fn sigma_star(&self) -> StrategyProfile {
        StrategyProfile(vec![SIGMA; self.n()])
    }

    pub fn o_star(&self) -> StrategyProfile {
        StrategyProfile(vec![OPT; self.n()])
    }

    /// The resource of this model playing the role of `e` under `(sigma, tau)`.
    pub fn map(
        &self,
        model: &CongestionModel<S>,
        e: usize,
        sigma: &StrategyProfile,
        tau: &StrategyProfile,
    ) -> Result<usize> {
        if model.n() != self.n() {
            return Err(invalid!("model has {} players, representative has {}", model.n(), self.n()));
        }
        let (p, q) = map_to_representative(model, e, sigma, tau)?;
        Ok(self.resource(p, q))
    }
}

/// `(P, Q)` with `P = {i : e in sigma_i}` and `Q = {i : e in tau_i}`.
pub fn map_to_representative<S: Scalar>(
    model: &CongestionModel<S>,
    e: usize,
    sigma: &StrategyProfile,
    tau: &StrategyProfile,
) -> Result<(Mask, Mask)> {
    if e >= model.resource_count() {
        return Err(invalid!("unknown resource index {e}"));
    }
    model.check_profile(sigma)?;
    model.check_profile(tau)?;
    Ok((model.users(sigma)[e], model.users(tau)[e]))
}
