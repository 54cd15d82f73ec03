//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.
//!
//! Lines go straight to the stderr handle so they show without `--nocapture`.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::{close, grid, monotone_configs, non_decreasing, GridConfig};
use poa_core::formulations::{
    build_pp_pne, lemma1_witness, normalize_game, solve_worst_case, verify_extension, WorstCase,
    WorstCaseConfig, WorstCaseOptions,
};
use poa_core::game::{g1, BasisFunction, Predicate, SocialKind, SocialSpec, StrategyProfile};
use poa_core::lp::Status;
use poa_core::oracle::{enumerate_eps_pne, exact_ppoa, worst_cce_value, OracleOptions, DEFAULT_PROFILE_CAP};
use poa_core::random::{
    random_config, random_distribution, random_game_in_class, random_model, random_profile, seeded, ConfigShape,
    ModelShape,
};
use poa_core::representative::{build_representative, DEFAULT_REPRESENTATIVE_CAP};
use poa_core::scalar::{identity, Rational, Scalar};
use poa_core::smoothness::{is_sum_bounded, validate_smoothness_claims, RobustOptions, RobustPoa};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        let mut detail = summary;
        for f in failures.iter().take(5) {
            detail.push_str(&format!("\n    {f}"));
        }
        if failures.len() > 5 {
            detail.push_str(&format!("\n    ... {} more", failures.len() - 5));
        }
        Outcome { pass: failures.is_empty(), detail }
    }
}

fn report(id: usize, title: &str, outcome: &Outcome, elapsed: Duration) {
    let verdict = if outcome.pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {id:>2} {verdict}: {title} ({:.1}s) {}\n", elapsed.as_secs_f64(), outcome.detail);
    let mut err = std::io::stderr().lock();
    let _ = err.write_all(line.as_bytes());
    let _ = err.flush();
}

fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

type Solved = Vec<(GridConfig<f64>, WorstCase<f64>)>;

fn criterion_1(solved: &mut Solved, elapsed: &mut Duration) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut optimal, mut unbounded, mut runs) = (0, 0, 0);
    for g in grid::<f64>() {
        match solve_worst_case(&g.cfg, &WorstCaseOptions::default()) {
            Ok(wc) => {
                for run in &wc.runs {
                    runs += 1;
                    let who = run.designated.map_or(String::new(), |d| format!(" player {}", d + 1));
                    match run.primal.status {
                        Status::Optimal => {
                            let p = run.primal.value.unwrap();
                            let d = run.dual.value.unwrap_or(f64::NAN);
                            let m = run.mechanical.value.unwrap_or(f64::NAN);
                            if !close(p, d, 1e-6) || !close(p, m, 1e-6) {
                                failures.push(format!("{}{who}: primal {p} dual {d} mechanical {m}", g.name));
                            }
                        }
                        Status::Unbounded => {
                            if run.dual.status != Status::Infeasible || run.mechanical.status != Status::Infeasible {
                                failures.push(format!("{}{who}: unbounded primal with feasible dual", g.name));
                            }
                        }
                        Status::Infeasible => failures.push(format!("{}{who}: infeasible primal", g.name)),
                    }
                }
                match wc.status {
                    Status::Optimal => optimal += 1,
                    _ => unbounded += 1,
                }
                solved.push((g, wc));
            }
            Err(e) => failures.push(format!("{}: {e}", g.name)),
        }
    }
    *elapsed = start.elapsed();
    if *elapsed > Duration::from_secs(120) {
        failures.push(format!("took {:?}, limit 2 minutes", elapsed));
    }
    Outcome::new(
        &failures,
        format!("{} configs, {runs} program variants, {optimal} optimal, {unbounded} unbounded", optimal + unbounded),
    )
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    let exact = grid::<Rational>();
    let float = grid::<f64>();
    for (ge, gf) in exact.iter().zip(&float) {
        let rep_e = build_representative(ge.cfg.weights.clone(), DEFAULT_REPRESENTATIVE_CAP).unwrap();
        let rep_f = build_representative(gf.cfg.weights.clone(), DEFAULT_REPRESENTATIVE_CAP).unwrap();
        let mut any = false;
        for k in 0..ge.cfg.basis.len() {
            let (Ok(we), Ok(wf)) = (lemma1_witness(&ge.cfg, &rep_e, k), lemma1_witness(&gf.cfg, &rep_f, k)) else {
                continue;
            };
            any = true;
            checked += 1;
            let lp = build_pp_pne(&ge.cfg, &rep_e, we.designated).unwrap();
            let x = we.to_primal();
            if lp.objective_value(&x) != q(1) {
                failures.push(format!("{} k={k}: exact objective {}", ge.name, lp.objective_value(&x)));
            }
            if let Some((row, v)) = lp.first_violation(&x, &q(0)) {
                failures.push(format!("{} k={k}: exact witness violates {row} by {v}", ge.name));
            }
            let lp = build_pp_pne(&gf.cfg, &rep_f, wf.designated).unwrap();
            let x = wf.to_primal();
            if (lp.objective_value(&x) - 1.0).abs() > 1e-9 {
                failures.push(format!("{} k={k}: float objective {}", gf.name, lp.objective_value(&x)));
            }
            if let Some((row, v)) = lp.first_violation(&x, &1e-9) {
                failures.push(format!("{} k={k}: float witness violates {row} by {v}", gf.name));
            }
        }
        if !any {
            failures.push(format!("{}: no basis function admits a witness", ge.name));
        }
    }
    Outcome::new(&failures, format!("{checked} witnesses over {} configs, exact and float", exact.len()))
}

fn criterion_3(solved: &Solved, opts: &OracleOptions) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (g, wc) in solved {
        if wc.status != Status::Optimal {
            continue;
        }
        checked += 1;
        let gamma = wc.gamma_star.unwrap();
        let Some(w) = &wc.witness else {
            failures.push(format!("{}: no witness extracted", g.name));
            continue;
        };
        let rep = &wc.representative;
        let (sigma, o) = (rep.sigma_star(), rep.o_star());
        if !w.is_eps_pne(&sigma, &g.cfg.epsilon, &1e-9) {
            failures.push(format!("{}: sigma* is not an eps-PNE", g.name));
        }
        let eq_value = w.social_value_profile(&g.cfg.spec, &sigma);
        if !close(eq_value, gamma, 1e-6) {
            failures.push(format!("{}: equilibrium value {eq_value} vs gamma* {gamma}", g.name));
        }
        let opt_value = w.social_value_profile(&g.cfg.spec, &o);
        if opt_value > 1.0 + 1e-9 {
            failures.push(format!("{}: optimum-side value {opt_value}", g.name));
        }
        match exact_ppoa(w, &g.cfg.spec, &g.cfg.epsilon, Predicate::Eq1, opts) {
            Ok(p) => match p.ratio() {
                Some(r) if *r >= gamma - 1e-6 => {}
                other => failures.push(format!("{}: exact PPoA {other:?} below gamma* {gamma}", g.name)),
            },
            Err(e) => failures.push(format!("{}: oracle {e}", g.name)),
        }
    }
    Outcome::new(&failures, format!("{checked} extracted witnesses"))
}

fn criterion_4(solved: &Solved, opts: &OracleOptions, elapsed: &mut Duration) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let shape = ModelShape::default();
    let (mut sandwiches, mut games, mut no_pne, mut no_cce, mut verbatim_above) = (0, 0, 0, 0, 0);
    for (idx, (g, wc)) in solved.iter().enumerate() {
        if g.cfg.epsilon != 0.0 {
            continue;
        }
        let gamma = wc.gamma_star.unwrap_or(f64::INFINITY);
        if let Some(w) = &wc.witness {
            sandwiches += 1;
            match worst_cce_value(w, &g.cfg.spec, &0.0, Predicate::Eq1, opts) {
                Ok(Some(c)) if close(c.ratio, gamma, 1e-6) => {}
                other => failures.push(format!("{}: witness CCPoA {:?} vs gamma* {gamma}", g.name, other.map(|c| c.map(|c| c.ratio)))),
            }
        }
        let mut rng = seeded(1000 + idx as u64);
        for t in 0..100 {
            let game = random_game_in_class(&mut rng, &g.cfg, &shape).unwrap();
            games += 1;
            match exact_ppoa(&game, &g.cfg.spec, &0.0, Predicate::Eq1, opts) {
                Ok(p) => match p.ratio() {
                    Some(r) if *r > gamma + 1e-6 => failures.push(format!("{} game {t}: PPoA {r} > {gamma}", g.name)),
                    Some(_) => {}
                    None => no_pne += 1,
                },
                Err(e) => failures.push(format!("{} game {t}: {e}", g.name)),
            }
            match worst_cce_value(&game, &g.cfg.spec, &0.0, Predicate::Eq1, opts) {
                Ok(Some(c)) if c.ratio > gamma + 1e-6 => {
                    failures.push(format!("{} game {t}: CCPoA {} > {gamma}", g.name, c.ratio))
                }
                Ok(Some(_)) => {}
                Ok(None) => no_cce += 1,
                Err(e) => failures.push(format!("{} game {t}: {e}", g.name)),
            }
            if let Ok(p) = exact_ppoa(&game, &g.cfg.spec, &0.0, Predicate::Verbatim, opts) {
                if p.ratio().is_some_and(|r| *r > gamma + 1e-6) {
                    verbatim_above += 1;
                }
            }
        }
    }
    *elapsed = start.elapsed();
    if *elapsed > Duration::from_secs(300) {
        failures.push(format!("took {:?}, limit 5 minutes", elapsed));
    }
    Outcome::new(
        &failures,
        format!(
            "{sandwiches} witness sandwiches, {games} random games ({no_pne} without PNE, {no_cce} without CCE); \
             info: verbatim PPoA above gamma* on {verbatim_above} games"
        ),
    )
}

fn criterion_5(solved: &Solved) -> Outcome {
    let mut failures = Vec::new();
    let shape = ModelShape::default();
    let mut checks = 0;
    for (idx, (g, wc)) in solved.iter().enumerate() {
        if wc.status != Status::Optimal {
            continue;
        }
        let dual = wc.best().dual_solution.clone().unwrap();
        let mut rng = seeded(5000 + idx as u64);
        for t in 0..50 {
            let model = random_model(&mut rng, &g.cfg.weights, &shape).unwrap();
            let p = random_distribution(&mut rng, &model, 4).unwrap();
            let o = random_profile(&mut rng, &model);
            checks += 1;
            match verify_extension(&dual, &g.cfg, &model, &p, &o, 1e-9) {
                Ok(None) => {}
                Ok(Some((row, v))) => failures.push(format!("{} triple {t}: row {row} violated by {v}", g.name)),
                Err(e) => failures.push(format!("{} triple {t}: {e}", g.name)),
            }
        }
    }
    Outcome::new(&failures, format!("{checks} (model, p, o) triples"))
}

fn anchor_config<S: Scalar>(n: usize, alpha: Vec<Vec<S>>) -> WorstCaseConfig<S> {
    WorstCaseConfig::new(
        vec![S::one(); n],
        alpha,
        SocialSpec::identity(SocialKind::Sum, n),
        S::zero(),
        vec![BasisFunction::monomial(1)],
    )
    .unwrap()
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let opts = WorstCaseOptions::default();
    for (n, expected) in [(2, q(2)), (3, Rational::ratio(5, 2))] {
        let exact = solve_worst_case(&anchor_config::<Rational>(n, identity(n)), &opts).unwrap();
        if exact.gamma_star.as_ref() != Some(&expected) {
            failures.push(format!("n={n}: exact gamma* {:?}, expected {expected}", exact.gamma_star));
        }
        let float = solve_worst_case(&anchor_config::<f64>(n, identity(n)), &opts).unwrap();
        if !float.gamma_star.is_some_and(|g| (g - expected.to_f64()).abs() <= 1e-6) {
            failures.push(format!("n={n}: float gamma* {:?}", float.gamma_star));
        }
    }
    let zero = solve_worst_case(&anchor_config::<Rational>(2, vec![vec![q(0); 2]; 2]), &opts).unwrap();
    if zero.status != Status::Unbounded || zero.gamma_star.is_some() {
        failures.push(format!("alpha = 0: status {:?}", zero.status));
    }
    Outcome::new(&failures, "gamma*(n=2) = 2, gamma*(n=3) = 5/2, alpha = 0 infinite".into())
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let game = g1::<Rational>();
    let sum = SocialSpec::identity(SocialKind::Sum, 2);
    let opts = OracleOptions::default();
    for (eps, expected) in [(0, q(1)), (1, q(2))] {
        let p = exact_ppoa(&game, &sum, &q(eps), Predicate::Eq1, &opts).unwrap();
        if p.ratio() != Some(&expected) {
            failures.push(format!("PPoA at eps={eps}: {:?}", p.ratio()));
        }
    }
    let cce = worst_cce_value(&game, &sum, &q(0), Predicate::Verbatim, &opts).unwrap().unwrap();
    if cce.value != q(3) || cce.ratio != Rational::ratio(3, 2) {
        failures.push(format!("worst CCE value {} ratio {}", cce.value, cce.ratio));
    }
    let pne = enumerate_eps_pne(&game, &q(0), Predicate::Eq1, &opts).unwrap();
    if pne != vec![StrategyProfile(vec![0, 1]), StrategyProfile(vec![1, 0])] {
        failures.push(format!("PNE set {pne:?}"));
    }
    Outcome::new(&failures, "exact arithmetic".into())
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let opts = OracleOptions::default();
    let shape = ModelShape::default();
    for seed in 0..100u64 {
        let n = 2 + (seed % 2) as usize;
        let kind = if seed % 3 == 0 { SocialKind::Max } else { SocialKind::Sum };
        let eps = Rational::ratio((seed % 3) as i64, 4);
        let mut rng = seeded(3000 + seed);
        let cfg = random_config::<Rational>(&mut rng, n, kind, eps.clone(), &ConfigShape::default()).unwrap();
        let game = random_game_in_class(&mut rng, &cfg, &shape).unwrap();
        let norm = normalize_game(&game, &cfg.spec, DEFAULT_PROFILE_CAP).unwrap();
        for predicate in [Predicate::Eq1, Predicate::Verbatim] {
            let before = enumerate_eps_pne(&game, &eps, predicate, &opts).unwrap();
            let after = enumerate_eps_pne(&norm, &eps, predicate, &opts).unwrap();
            if before != after {
                failures.push(format!("seed {seed} {predicate:?}: equilibrium sets differ"));
            }
            let p0 = exact_ppoa(&game, &cfg.spec, &eps, predicate, &opts).unwrap();
            let p1 = exact_ppoa(&norm, &cfg.spec, &eps, predicate, &opts).unwrap();
            if p0.ratio() != p1.ratio() {
                failures.push(format!("seed {seed} {predicate:?}: PPoA {:?} vs {:?}", p0.ratio(), p1.ratio()));
            }
            let c0 = worst_cce_value(&game, &cfg.spec, &eps, predicate, &opts).unwrap().map(|c| c.ratio);
            let c1 = worst_cce_value(&norm, &cfg.spec, &eps, predicate, &opts).unwrap().map(|c| c.ratio);
            if c0 != c1 {
                failures.push(format!("seed {seed} {predicate:?}: CCPoA {c0:?} vs {c1:?}"));
            }
        }
        // The same game in floating point, ratios to 1e-9.
        let gf = poa_core::io::GameFile::from_game(&game, None, None).game::<f64>().unwrap();
        let spec_f = SocialSpec::new(kind, poa_core::scalar::convert_matrix(&cfg.spec.beta)).unwrap();
        let nf = normalize_game(&gf, &spec_f, DEFAULT_PROFILE_CAP).unwrap();
        let ef = eps.to_f64();
        let r = |g| exact_ppoa(g, &spec_f, &ef, Predicate::Eq1, &opts).unwrap().ratio().cloned();
        match (r(&gf), r(&nf)) {
            (Some(a), Some(b)) if (a - b).abs() <= 1e-9 => {}
            (None, None) => {}
            (a, b) => failures.push(format!("seed {seed} float PPoA {a:?} vs {b:?}")),
        }
        let c = |g| worst_cce_value(g, &spec_f, &ef, Predicate::Eq1, &opts).unwrap().map(|c| c.ratio);
        match (c(&gf), c(&nf)) {
            (Some(a), Some(b)) if (a - b).abs() <= 1e-9 => {}
            (None, None) => {}
            (a, b) => failures.push(format!("seed {seed} float CCPoA {a:?} vs {b:?}")),
        }
    }
    Outcome::new(&failures, "100 seeded games, both predicates, exact sets and ratios, float ratios to 1e-9".into())
}

fn criterion_9(solved: &Solved) -> Outcome {
    let mut failures = Vec::new();
    let opts = RobustOptions::default();
    let mut worst = Duration::ZERO;
    let mut checked = 0;
    let mut check = |name: &str, game: &poa_core::game::GeneralizedGame<f64>, spec: &SocialSpec<f64>| {
        let start = Instant::now();
        let report = match validate_smoothness_claims(game, spec, &opts) {
            Ok(r) => r,
            Err(e) => return failures.push(format!("{name}: {e}")),
        };
        worst = worst.max(start.elapsed());
        checked += 1;
        if start.elapsed() > Duration::from_secs(1) {
            failures.push(format!("{name}: took {:?}", start.elapsed()));
        }
        match &report.robust {
            Some(RobustPoa::Value { value, lower, .. }) => {
                if value - lower > 1e-6 {
                    failures.push(format!("{name}: bracket [{lower}, {value}] wider than 1e-6"));
                }
            }
            other => failures.push(format!("{name}: no robust bound ({other:?})")),
        }
        if report.claim_pne == Some(false) || report.claim_cce != Some(true) {
            failures.push(format!(
                "{name}: robust {:?} vs PPoA {:?} CCPoA {}",
                report.robust.as_ref().and_then(|r| r.value().cloned()),
                report.exact_ppoa,
                report.exact_ccpoa
            ));
        }
    };

    let g1f = g1::<f64>();
    check("G1", &g1f, &SocialSpec::identity(SocialKind::Sum, 2));
    let mut not_bounded = 0;
    for (g, wc) in solved {
        let Some(w) = &wc.witness else { continue };
        if !is_sum_bounded(w, &g.cfg.spec, DEFAULT_PROFILE_CAP).unwrap().holds {
            not_bounded += 1;
            continue;
        }
        check(&g.name, w, &g.cfg.spec);
    }

    let three = SocialSpec::new(SocialKind::Sum, vec![vec![3.0, 0.0], vec![0.0, 3.0]]).unwrap();
    let sb = is_sum_bounded(&g1f, &three, DEFAULT_PROFILE_CAP).unwrap();
    if sb.holds || sb.witness.is_none() {
        failures.push("beta = 3I on G1 not detected".into());
    }
    Outcome::new(
        &failures,
        format!(
            "{checked} sum-bounded games ({not_bounded} witnesses skipped as not sum-bounded), slowest {:.0} ms, \
             beta = 3I witness {:?}",
            worst.as_secs_f64() * 1e3,
            sb.witness.map(|p| p.to_string())
        ),
    )
}

fn criterion_10(opts: &OracleOptions) -> Outcome {
    let mut failures = Vec::new();
    let eps = [0.0, 0.25, 0.5, 1.0];
    let wc_opts = WorstCaseOptions { extract_witness: false, ..Default::default() };
    for (seed, cfg) in monotone_configs(20).into_iter().enumerate() {
        let gamma: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let wc = solve_worst_case(&cfg.with_epsilon(e), &wc_opts).unwrap();
                wc.gamma_star.unwrap_or(f64::INFINITY)
            })
            .collect();
        let game = random_game_in_class(&mut seeded(seed as u64), &cfg, &ModelShape::default()).unwrap();
        let ppoa: Vec<f64> = eps
            .iter()
            .map(|e| {
                let p = exact_ppoa(&game, &cfg.spec, e, Predicate::Eq1, opts).unwrap();
                p.ratio().cloned().unwrap_or(f64::NEG_INFINITY)
            })
            .collect();
        let cce: Vec<f64> = eps
            .iter()
            .map(|e| {
                let c = worst_cce_value(&game, &cfg.spec, e, Predicate::Eq1, opts).unwrap();
                c.map_or(f64::NEG_INFINITY, |c| c.value)
            })
            .collect();
        for (what, series) in [("gamma*", &gamma), ("PPoA", &ppoa), ("worst CCE", &cce)] {
            if !non_decreasing(series, 1e-6) {
                failures.push(format!("config {seed}: {what} {series:?}"));
            }
        }
        if gamma.iter().all(|g| g.is_infinite()) {
            failures.push(format!("config {seed}: gamma* infinite at every eps"));
        }
    }
    Outcome::new(&failures, "20 configurations, eps in {0, 1/4, 1/2, 1}".into())
}

#[test]
fn acceptance() {
    let opts = OracleOptions::default();
    let mut solved = Vec::new();
    let mut results = Vec::new();
    let mut run = |id: usize, title: &str, f: &mut dyn FnMut(&mut Duration) -> Outcome| {
        let start = Instant::now();
        let mut timed = Duration::ZERO;
        let outcome = f(&mut timed);
        let elapsed = if timed.is_zero() { start.elapsed() } else { timed };
        report(id, title, &outcome, elapsed);
        results.push((id, outcome.pass));
    };

    run(1, "strong duality on the regression grid", &mut |t| criterion_1(&mut solved, t));
    run(2, "feasibility witness has objective 1", &mut |_| criterion_2());
    run(3, "worst-case game extraction", &mut |_| criterion_3(&solved, &opts));
    run(4, "PNE/CCE sandwich and dominance at eps = 0", &mut |t| criterion_4(&solved, &opts, t));
    run(5, "dual solutions extend to arbitrary games", &mut |_| criterion_5(&solved));
    run(6, "anchor values", &mut |_| criterion_6());
    run(7, "oracle fixtures on G1", &mut |_| criterion_7());
    run(8, "normalisation invariance", &mut |_| criterion_8());
    run(9, "robust PoA bounds exact ratios", &mut |_| criterion_9(&solved));
    run(10, "monotonicity in eps", &mut |_| criterion_10(&opts));

    let failed: Vec<usize> = results.iter().filter(|(_, pass)| !pass).map(|(id, _)| *id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
