#![allow(dead_code)]

use poa_core::formulations::WorstCaseConfig;
use poa_core::game::SocialKind;
use poa_core::random::{random_config, regression_grid, seeded, ConfigShape};
use poa_core::scalar::Scalar;

pub struct GridConfig<S> {
    pub name: String,
    pub cfg: WorstCaseConfig<S>,
}

pub fn grid<S: Scalar>() -> Vec<GridConfig<S>> {
    regression_grid().into_iter().map(|(name, cfg)| GridConfig { name, cfg }).collect()
}

/// Configurations for the eps-monotonicity check: random weights, alpha in
/// [0,1] with a positive diagonal, random beta.
pub fn monotone_configs(count: u64) -> Vec<WorstCaseConfig<f64>> {
    let shape = ConfigShape { alpha_lo: 0, alpha_positive_diagonal: true, ..Default::default() };
    (0..count)
        .map(|seed| {
            let n = 2 + (seed % 2) as usize;
            let kind = if seed % 4 < 2 { SocialKind::Sum } else { SocialKind::Max };
            random_config(&mut seeded(900 + seed), n, kind, 0.0, &shape).unwrap()
        })
        .collect()
}

/// Non-decreasing up to `tol` relative; equal infinities are fine.
pub fn non_decreasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] || w[1] >= w[0] - tol * w[0].abs().max(1.0))
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
