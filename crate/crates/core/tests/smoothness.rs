use poa_core::game::{g1, BasisFunction, CongestionModel, GeneralizedGame, Predicate, SocialKind, SocialSpec, StrategyProfile};
use poa_core::lp::{solve, LinearProgram, Relation, Sense};
use poa_core::oracle::{exact_ppoa, worst_cce_value, OracleOptions};
use poa_core::random::{random_game, seeded, ModelShape};
use poa_core::scalar::{identity, Rational, Scalar};
use poa_core::smoothness::{
    check_smooth, is_sum_bounded, robust_poa, validate_smoothness_claims, RobustOptions, RobustPoa,
    SmoothnessCertificate,
};

fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

/// `sum_i c^_i(s_-i, t_i)`.
fn mixed<S: Scalar>(game: &GeneralizedGame<S>, s: &StrategyProfile, t: &StrategyProfile) -> S {
    (0..game.n()).fold(S::zero(), |acc, i| acc + game.perceived_cost(&s.with(i, t.choice(i)), i).unwrap())
}

/// The robust bound as one linear program: with u = 1 / (1 - mu), a = lambda u
/// and b = mu u = u - 1, minimise a subject to
/// `a SF(t) + b (SF(s) - A(s, t)) >= A(s, t)` for every pair and b >= -1.
fn charnes_cooper<S: Scalar>(game: &GeneralizedGame<S>, spec: &SocialSpec<S>) -> S {
    let profiles: Vec<StrategyProfile> = game.model().profiles().collect();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let a = lp.add_nonneg("a").unwrap();
    let b = lp.add_var("b", Some(-S::one()), None).unwrap();
    lp.set_objective(a, S::one());
    for s in &profiles {
        for t in &profiles {
            let m = mixed(game, s, t);
            let (sf_s, sf_t) = (game.social_value_profile(spec, s), game.social_value_profile(spec, t));
            lp.add_row(format!("{s}{t}"), vec![(a, sf_t), (b, sf_s - m.clone())], Relation::Ge, m).unwrap();
        }
    }
    solve(&lp).unwrap().value.unwrap()
}

#[test]
fn g1_robust_bound_is_five_thirds() {
    let exact = g1::<Rational>();
    let sum = SocialSpec::identity(SocialKind::Sum, 2);
    assert_eq!(charnes_cooper(&exact, &sum), Rational::ratio(5, 3));
    let cert = SmoothnessCertificate::new(Rational::ratio(5, 3), Rational::ratio(1, 3)).unwrap();
    assert_eq!(check_smooth(&exact, &sum, &cert, 1_000_000).unwrap(), None);
    let tight = SmoothnessCertificate::new(Rational::ratio(3, 2), Rational::ratio(1, 3)).unwrap();
    assert!(check_smooth(&exact, &sum, &tight, 1_000_000).unwrap().is_some());

    let game = g1::<f64>();
    let sum = SocialSpec::identity(SocialKind::Sum, 2);
    let r = robust_poa(&game, &sum, &RobustOptions::default()).unwrap();
    let RobustPoa::Value { value, lower, certificate, .. } = &r else { panic!("{r:?}") };
    assert!((value - 5.0 / 3.0).abs() <= 1e-6 && value - lower <= 1e-6);
    assert!((certificate.bound - value).abs() <= 1e-9);
    assert_eq!(check_smooth(&game, &sum, certificate, 1_000_000).unwrap(), None);
}

#[test]
fn single_profile_game_has_robust_bound_one() {
    let model = CongestionModel::new(vec![1.0, 2.0], vec!["a".into()], vec![vec![vec![0]], vec![vec![0]]]).unwrap();
    let game = GeneralizedGame::new(model, vec![BasisFunction::monomial(1)], vec![vec![1.0]], identity(2)).unwrap();
    let r = robust_poa(&game, &SocialSpec::identity(SocialKind::Sum, 2), &RobustOptions::default()).unwrap();
    assert!((r.value().unwrap() - 1.0).abs() <= 1e-6, "{r:?}");
}

#[test]
fn bisection_agrees_with_the_single_program() {
    let shape = ModelShape { resources: 2..=3, strategies: 1..=3, max_strategy_size: 2 };
    let basis = poa_core::random::basis_subset(3);
    let mut checked = 0;
    for seed in 0..25u64 {
        let mut rng = seeded(400 + seed);
        let n = 2 + (seed % 2) as usize;
        let game = random_game::<f64>(&mut rng, &vec![1.0; n], &basis, &identity(n), &shape).unwrap();
        let spec = SocialSpec::identity(SocialKind::Sum, n);
        let Ok(opt) = poa_core::oracle::social_optimum(&game, &spec, 1_000_000) else { continue };
        if opt.value <= 0.0 {
            continue;
        }
        let expected = charnes_cooper(&game, &spec);
        let r = robust_poa(&game, &spec, &RobustOptions::default()).unwrap();
        let value = *r.value().expect("sum-bounded game");
        assert!((value - expected).abs() <= 2e-6, "seed {seed}: {value} vs {expected}");
        checked += 1;
    }
    assert!(checked >= 20);
}

#[test]
fn exact_mode_bisection_brackets_the_bound() {
    let game = g1::<Rational>();
    let sum = SocialSpec::identity(SocialKind::Sum, 2);
    let r = robust_poa(&game, &sum, &RobustOptions::default()).unwrap();
    let RobustPoa::Value { value, lower, .. } = r else { panic!() };
    let target = Rational::ratio(5, 3);
    assert!(lower < target && target <= value);
    assert!((value - lower).to_f64() <= 1e-6);
}

#[test]
fn inflated_beta_is_not_sum_bounded() {
    let game = g1::<Rational>();
    let spec = SocialSpec::new(SocialKind::Sum, vec![vec![q(3), q(0)], vec![q(0), q(3)]]).unwrap();
    let sb = is_sum_bounded(&game, &spec, 1_000_000).unwrap();
    assert!(!sb.holds);
    assert_eq!(sb.witness, Some(StrategyProfile(vec![0, 0])));
    assert_eq!(sb.witness_values, Some((q(12), q(4))));
    assert!(matches!(
        robust_poa(&game, &spec, &RobustOptions::default()).unwrap(),
        RobustPoa::NotSmoothable { .. }
    ));
}

#[test]
fn robust_bound_dominates_exact_ratios() {
    let game = g1::<f64>();
    let sum = SocialSpec::identity(SocialKind::Sum, 2);
    let report = validate_smoothness_claims(&game, &sum, &RobustOptions::default()).unwrap();
    assert_eq!(report.claim_pne, Some(true));
    assert_eq!(report.claim_cce, Some(true));
    let opts = OracleOptions::default();
    let ppoa = exact_ppoa(&game, &sum, &0.0, Predicate::Verbatim, &opts).unwrap();
    let cce = worst_cce_value(&game, &sum, &0.0, Predicate::Verbatim, &opts).unwrap().unwrap();
    assert_eq!(report.exact_ppoa, ppoa.ratio().cloned());
    assert!((report.exact_ccpoa - cce.ratio).abs() < 1e-12);
    assert!((report.gap.unwrap() - (5.0 / 3.0 - 1.0)).abs() <= 1e-6);
}

#[test]
fn certificates_need_mu_below_one() {
    assert!(SmoothnessCertificate::new(1.0, 1.0).is_err());
    assert!(SmoothnessCertificate::new(0.0, 0.5).is_err());
    assert!((SmoothnessCertificate::new(1.0, 0.5).unwrap().bound - 2.0).abs() < 1e-15);
}
