use poa_core::game::{g1, ProfileDistribution, SocialKind, SocialSpec, StrategyProfile};
use poa_core::io::{parse_json, read_json, write_json, ConfigFile, GameFile};
use poa_core::random::{random_config, random_game_in_class, random_profile, seeded, ConfigShape, ModelShape};
use poa_core::scalar::{Rational, Scalar};
use poa_core::Error;
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

fn p(a: usize, b: usize) -> StrategyProfile {
    StrategyProfile(vec![a, b])
}

#[test]
fn g1_costs_and_social_values() {
    let game = g1::<Rational>();
    let sum = SocialSpec::identity(SocialKind::Sum, 2);
    let max = SocialSpec::identity(SocialKind::Max, 2);
    assert_eq!(game.individual_cost(&p(0, 0), 0).unwrap(), q(2));
    assert_eq!(game.perceived_cost(&p(0, 0), 0).unwrap(), q(2));
    assert_eq!(game.beta_cost(&sum, &p(0, 0), 1).unwrap(), q(2));
    assert_eq!(game.deviation_gap(&p(0, 0), 0, 1, &q(0)).unwrap(), q(1));
    assert_eq!(game.deviation_gap(&p(0, 1), 0, 1, &q(0)).unwrap(), q(-1));
    assert_eq!(game.deviation_gap(&p(0, 1), 0, 0, &q(3)).unwrap(), q(0));

    let point = ProfileDistribution::point(p(0, 1));
    assert_eq!(game.social_value(&sum, &point).unwrap(), q(2));
    assert_eq!(game.social_value(&max, &ProfileDistribution::point(p(0, 0))).unwrap(), q(2));
    let split = ProfileDistribution::uniform(vec![p(0, 0), p(1, 1)]).unwrap();
    assert_eq!(game.social_value(&sum, &split).unwrap(), q(4));

    assert!(game.is_eps_pne(&p(0, 1), &q(0), &q(0)));
    assert!(!game.is_eps_pne_verbatim(&p(0, 0), &q(0), &q(0)));
    assert!(game.is_eps_pne_verbatim(&p(0, 0), &q(1), &q(0)));
}

#[test]
fn game_files_round_trip() {
    let text = r#"{
        "n": 2, "weights": [1, "3/2"], "resources": ["a", "b"],
        "strategies": [[["a"], ["b"]], [["a"], ["a", "b"]]],
        "basis": [{"kind": "monomial", "degree": 2}, {"kind": "table", "table": [[1, 2], ["3/2", "0.5"], ["5/2", 7]]}],
        "coefficients": [[1, 0], ["1/4", 1]],
        "alpha": [[1, 0], ["-1/2", 1]], "beta": [[1, 0], [0, 2]], "epsilon": "1/10"
    }"#;
    let file: GameFile = parse_json(text).unwrap();
    let game = file.game::<Rational>().unwrap();
    assert_eq!(game.model().weights()[1], Rational::ratio(3, 2));
    assert_eq!(file.epsilon::<Rational>(), Some(Rational::ratio(1, 10)));
    assert_eq!(file.spec::<Rational>(SocialKind::Max).unwrap().beta[1][1], q(2));

    let dir = std::env::temp_dir().join(format!("poa-game-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("game.json");
    let beta = file.spec::<Rational>(SocialKind::Sum).unwrap().beta;
    write_json(&path, &GameFile::from_game(&game, Some(&beta), file.epsilon::<Rational>().as_ref())).unwrap();
    let back: GameFile = read_json(&path).unwrap();
    assert_eq!(back.game::<Rational>().unwrap(), game);
    assert_eq!(back.epsilon::<Rational>(), Some(Rational::ratio(1, 10)));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table_lookups_must_cover_every_load() {
    // Player weights 1 and 3/2 give loads 1, 3/2 and 5/2; 3/2 is missing.
    let text = r#"{"n": 2, "weights": [1, "3/2"], "resources": ["a"],
        "strategies": [[["a"]], [["a"]]],
        "basis": [{"kind": "table", "table": [[1, 1], ["5/2", 2]]}],
        "coefficients": [[1]], "alpha": [[1, 0], [0, 1]]}"#;
    let err = parse_json::<GameFile>(text).unwrap().game::<f64>().unwrap_err();
    assert!(matches!(err, Error::TableMiss { .. }), "{err:?}");
}

#[test]
fn malformed_files_are_rejected() {
    let cases = [
        r#"{"n": 2, "weights": [1], "resources": ["a"], "strategies": [[["a"]], [["a"]]], "coefficients": [[1]]}"#,
        r#"{"n": 2, "weights": [1, 1], "resources": ["a"], "strategies": [[["z"]], [["a"]]], "coefficients": [[1]]}"#,
        r#"{"n": 2, "weights": [1, -1], "resources": ["a"], "strategies": [[["a"]], [["a"]]], "coefficients": [[1]]}"#,
        r#"{"n": 2, "weights": [1, 1], "resources": ["a"], "strategies": [[["a"]], [["a"]]], "coefficients": [["x/y"]]}"#,
        r#"{"n": 2, "weights": [1, 1], "resources": ["a"], "strategies": [[["a"]], [["a"]]], "extra": 1}"#,
    ];
    for text in cases {
        let parsed = parse_json::<GameFile>(text).and_then(|f| f.game::<f64>());
        assert!(matches!(parsed, Err(Error::Invalid(_))), "{text} gave {parsed:?}");
    }
}

#[test]
fn config_files_fill_defaults() {
    let file: ConfigFile = parse_json(r#"{"weights": [1, 2], "basis": [{"kind": "indicator"}]}"#).unwrap();
    let cfg = file.config::<f64>(Some(SocialKind::Max), Some(0.5)).unwrap();
    assert_eq!(cfg.alpha, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    assert_eq!(cfg.spec.kind, SocialKind::Max);
    assert_eq!(cfg.epsilon, 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perceived_cost_forms_agree(seed in 0u64..100_000, n in 2usize..4) {
        let mut rng = seeded(seed);
        let cfg = random_config::<Rational>(&mut rng, n, SocialKind::Sum, q(0), &ConfigShape::default()).unwrap();
        let game = random_game_in_class(&mut rng, &cfg, &ModelShape::default()).unwrap();
        let profile = random_profile(&mut rng, game.model());
        for i in 0..n {
            prop_assert_eq!(
                game.perceived_cost(&profile, i).unwrap(),
                game.perceived_cost_by_resource(&profile, i).unwrap()
            );
        }
    }

    #[test]
    fn scaling_scales_costs_and_keeps_equilibria(seed in 0u64..100_000, c in 1i64..9) {
        let mut rng = seeded(seed);
        let cfg = random_config::<Rational>(&mut rng, 2, SocialKind::Max, Rational::ratio(1, 2), &ConfigShape::default()).unwrap();
        let game = random_game_in_class(&mut rng, &cfg, &ModelShape::default()).unwrap();
        let c = Rational::ratio(c, 3);
        let scaled = game.scaled(&c).unwrap();
        for profile in game.model().profiles() {
            prop_assert_eq!(
                scaled.social_value_profile(&cfg.spec, &profile),
                c.clone() * game.social_value_profile(&cfg.spec, &profile)
            );
            prop_assert_eq!(
                scaled.is_eps_pne(&profile, &cfg.epsilon, &q(0)),
                game.is_eps_pne(&profile, &cfg.epsilon, &q(0))
            );
        }
    }
}
