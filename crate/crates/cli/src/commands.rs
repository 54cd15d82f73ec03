use std::path::{Path, PathBuf};

use poa_core::formulations::{
    build_pp_pne, lemma1_shared_players, lemma1_witness, normalize_game, solve_worst_case, verify_extension,
    DualSolution, WorstCase, WorstCaseConfig, WorstCaseOptions,
};
use poa_core::game::{GeneralizedGame, Predicate, ProfileDistribution, SocialKind, SocialSpec};
use poa_core::io::{read_json, write_json, ConfigFile, GameFile};
use poa_core::lp::{to_fixed_mps, Status};
use poa_core::oracle::{
    enumerate_eps_pne, exact_ppoa, social_optimum, worst_cce_value, OracleOptions, Ppoa, DEFAULT_PROFILE_CAP,
};
use poa_core::random::{random_distribution, random_model, random_profile, regression_grid, seeded, ModelShape};
use poa_core::representative::{build_representative, DEFAULT_REPRESENTATIVE_CAP};
use poa_core::smoothness::{validate_smoothness_claims, RobustOptions, RobustPoa};
use poa_core::{Error, Result, Scalar};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{envelope, num, nums, opt_num, profile};
use crate::{Args, Command};

pub fn run<S: Scalar>(command: &Command, args: &Args) -> Result<Value> {
    let (name, body) = match command {
        Command::BuildRepresentative { file } => ("build-representative", build_rep::<S>(args, file)?),
        Command::SolveWorstCase { file } => ("solve-worst-case", solve::<S>(args, file)?),
        Command::ExactPpoa { file } => ("exact-ppoa", ppoa::<S>(args, file)?),
        Command::CcePoa { file } => ("cce-poa", cce::<S>(args, file)?),
        Command::EnumeratePne { file } => ("enumerate-pne", enumerate::<S>(args, file)?),
        Command::Normalize { file } => ("normalize", normalize::<S>(args, file)?),
        Command::VerifyExtension { file, samples } => ("verify-extension", extension::<S>(args, file, *samples)?),
        Command::Smoothness { file } => ("smoothness", smoothness::<S>(args, file)?),
        Command::Selftest { samples } => ("selftest", selftest::<S>(args, *samples)?),
    };
    Ok(envelope::<S>(name, body))
}

fn pick<'a>(positional: &'a Option<PathBuf>, flag: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    positional
        .as_deref()
        .or(flag.as_deref())
        .ok_or_else(|| Error::Invalid(format!("no {what} file given")))
}

fn load_config<S: Scalar>(args: &Args, positional: &Option<PathBuf>) -> Result<WorstCaseConfig<S>> {
    let file: ConfigFile = read_json(pick(positional, &args.config, "config")?)?;
    file.config(args.sf.map(SocialKind::from), args.epsilon.as_ref().map(|e| e.get()))
}

struct Loaded<S> {
    game: GeneralizedGame<S>,
    spec: SocialSpec<S>,
    epsilon: S,
    file: GameFile,
}

fn load_game<S: Scalar>(args: &Args, positional: &Option<PathBuf>) -> Result<Loaded<S>> {
    let file: GameFile = read_json(pick(positional, &args.game, "game")?)?;
    let game = file.game::<S>()?;
    let spec = file.spec::<S>(args.sf.map_or(SocialKind::Sum, SocialKind::from))?;
    let epsilon = crate::epsilon(args, file.epsilon::<S>());
    Ok(Loaded { game, spec, epsilon, file })
}

fn oracle_options(args: &Args) -> OracleOptions {
    OracleOptions { cap: args.cap.unwrap_or(DEFAULT_PROFILE_CAP), ..Default::default() }
}

fn predicate(args: &Args, default: Predicate) -> Predicate {
    args.predicate.map_or(default, Predicate::from)
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Invalid(format!("cannot write {}: {e}", path.display()))
}

fn build_rep<S: Scalar>(args: &Args, config: &Option<PathBuf>) -> Result<Value> {
    let cfg = load_config::<S>(args, config)?;
    let rep = build_representative(cfg.weights.clone(), DEFAULT_REPRESENTATIVE_CAP)?;
    let skeleton = GameFile::representative_skeleton(&rep, &cfg);
    Ok(json!({
        "players": rep.n(),
        "resources": rep.resource_count(),
        "game": serde_json::to_value(&skeleton).expect("game file serialises"),
    }))
}

/// `foo.mps` becomes `foo.dual.mps`.
fn dual_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "lp".into(), |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}.dual.{}", ext.to_string_lossy()),
        None => format!("{stem}.dual"),
    };
    path.with_file_name(name)
}

fn dual_json<S: Scalar>(d: &DualSolution<S>) -> Value {
    match d.designated {
        None => json!({ "y": nums(&d.y), "gamma": num(&d.gamma[0]) }),
        Some(j) => json!({ "designated": j + 1, "y": nums(&d.y), "gamma_i": nums(&d.gamma), "z_i": nums(&d.z) }),
    }
}

fn solve<S: Scalar>(args: &Args, config: &Option<PathBuf>) -> Result<Value> {
    let cfg = load_config::<S>(args, config)?;
    let wc = solve_worst_case(&cfg, &WorstCaseOptions::default())?;
    let best = wc.best();

    let mut witness_path = Value::Null;
    if let (Some(path), Some(game)) = (&args.emit_witness, &wc.witness) {
        write_json(path, &GameFile::from_game(game, Some(&cfg.spec.beta), Some(&cfg.epsilon)))?;
        witness_path = json!(path.display().to_string());
    }
    let mut lp_paths = Value::Null;
    if let Some(path) = &args.emit_lp {
        let dual = dual_path(path);
        std::fs::write(path, to_fixed_mps(&best.primal_lp, "PP")).map_err(|e| io_error(path, e))?;
        std::fs::write(&dual, to_fixed_mps(&best.dual_lp, "DP")).map_err(|e| io_error(&dual, e))?;
        lp_paths = json!({ "primal": path.display().to_string(), "dual": dual.display().to_string() });
    }

    let mut body = json!({
        "status": wc.status,
        "gamma_star": opt_num(wc.gamma_star.as_ref()),
        "sf": cfg.spec.kind,
        "epsilon": num(&cfg.epsilon),
        "players": cfg.n(),
        "representative_resources": wc.representative.resource_count(),
        "duality_gap": num(&wc.duality_gap()),
        "witness_path": witness_path,
        "lp_paths": lp_paths,
        "runs": runs_json(&wc),
    });
    if let Some(d) = &best.dual_solution {
        if let (Value::Object(out), Value::Object(fields)) = (&mut body, dual_json(d)) {
            out.extend(fields);
        }
    }
    Ok(body)
}

fn runs_json<S: Scalar>(wc: &WorstCase<S>) -> Value {
    wc.runs
        .iter()
        .map(|r| {
            json!({
                "designated": r.designated.map(|j| j + 1),
                "primal": { "status": r.primal.status, "value": opt_num(r.primal.value.as_ref()) },
                "dual": { "status": r.dual.status, "value": opt_num(r.dual.value.as_ref()) },
                "mechanical_dual": { "status": r.mechanical.status, "value": opt_num(r.mechanical.value.as_ref()) },
            })
        })
        .collect()
}

fn ppoa<S: Scalar>(args: &Args, game: &Option<PathBuf>) -> Result<Value> {
    let g = load_game::<S>(args, game)?;
    let predicate = predicate(args, Predicate::Eq1);
    let result = exact_ppoa(&g.game, &g.spec, &g.epsilon, predicate, &oracle_options(args))?;
    let optimum = result.optimum();
    let mut body = json!({
        "sf": g.spec.kind,
        "epsilon": num(&g.epsilon),
        "predicate": predicate,
        "optimum": { "profile": profile(&optimum.profile), "value": num(&optimum.value) },
    });
    let extra = match &result {
        Ppoa::Value { ratio, worst_value, worst, equilibrium_count, .. } => json!({
            "status": "VALUE",
            "value": num(ratio),
            "worst_value": num(worst_value),
            "argmax": worst.iter().map(profile).collect::<Vec<_>>(),
            "equilibrium_count": equilibrium_count,
        }),
        Ppoa::NoEquilibrium { .. } => json!({
            "status": "NO_EQUILIBRIUM",
            "value": null,
            "argmax": [],
            "equilibrium_count": 0,
        }),
    };
    merge(&mut body, extra);
    Ok(body)
}

fn merge(body: &mut Value, extra: Value) {
    if let (Value::Object(out), Value::Object(fields)) = (body, extra) {
        out.extend(fields);
    }
}

fn cce<S: Scalar>(args: &Args, game: &Option<PathBuf>) -> Result<Value> {
    let g = load_game::<S>(args, game)?;
    let predicate = predicate(args, Predicate::Verbatim);
    let opts = oracle_options(args);
    let mut body = json!({ "sf": g.spec.kind, "epsilon": num(&g.epsilon), "predicate": predicate });
    let extra = match worst_cce_value(&g.game, &g.spec, &g.epsilon, predicate, &opts)? {
        Some(w) => json!({
            "status": "VALUE",
            "value": num(&w.ratio),
            "worst_value": num(&w.value),
            "optimum": { "profile": profile(&w.optimum.profile), "value": num(&w.optimum.value) },
            "distribution": w.distribution.iter()
                .map(|(p, mass)| json!({ "profile": profile(p), "p": num(mass) }))
                .collect::<Vec<_>>(),
        }),
        None => {
            let o = social_optimum(&g.game, &g.spec, opts.cap)?;
            json!({
                "status": "NO_EQUILIBRIUM",
                "value": null,
                "optimum": { "profile": profile(&o.profile), "value": num(&o.value) },
                "distribution": [],
            })
        }
    };
    merge(&mut body, extra);
    Ok(body)
}

fn enumerate<S: Scalar>(args: &Args, game: &Option<PathBuf>) -> Result<Value> {
    let g = load_game::<S>(args, game)?;
    let predicate = predicate(args, Predicate::Eq1);
    let opts = oracle_options(args);
    let found = enumerate_eps_pne(&g.game, &g.epsilon, predicate, &opts)?;
    let optimum = social_optimum(&g.game, &g.spec, opts.cap)?;
    let list: Vec<Value> = found
        .iter()
        .map(|p| json!({ "profile": profile(p), "social_value": num(&g.game.social_value_profile(&g.spec, p)) }))
        .collect();
    Ok(json!({
        "sf": g.spec.kind,
        "epsilon": num(&g.epsilon),
        "predicate": predicate,
        "equilibrium_count": found.len(),
        "equilibria": list,
        "optimum": { "profile": profile(&optimum.profile), "value": num(&optimum.value) },
    }))
}

fn normalize<S: Scalar>(args: &Args, game: &Option<PathBuf>) -> Result<Value> {
    let g = load_game::<S>(args, game)?;
    let cap = args.cap.unwrap_or(DEFAULT_PROFILE_CAP);
    let before = social_optimum(&g.game, &g.spec, cap)?;
    let scaled = normalize_game(&g.game, &g.spec, cap)?;
    let mut file = GameFile::from_game(&scaled, g.file.beta.is_some().then_some(g.spec.beta.as_slice()), None);
    file.epsilon = g.file.epsilon.clone();
    if let Some(path) = &args.emit_witness {
        write_json(path, &file)?;
    }
    Ok(json!({
        "sf": g.spec.kind,
        "optimum_before": num(&before.value),
        "scale": num(&(S::one() / before.value)),
        "game": serde_json::to_value(&file).expect("game file serialises"),
    }))
}

/// Checks every optimal dual of `wc` on one triple.
fn check_triple<S: Scalar>(
    wc: &WorstCase<S>,
    cfg: &WorstCaseConfig<S>,
    model: &poa_core::game::CongestionModel<S>,
    p: &ProfileDistribution<S>,
    o: &poa_core::game::StrategyProfile,
) -> Result<usize> {
    let mut checks = 0;
    for run in &wc.runs {
        let Some(dual) = &run.dual_solution else { continue };
        if let Some((row, by)) = verify_extension(dual, cfg, model, p, o, 1e-9)? {
            return Err(Error::Invariant(format!(
                "dual solution infeasible for o = {o}: row `{row}` violated by {by}"
            )));
        }
        checks += 1;
    }
    Ok(checks)
}

fn random_checks<S: Scalar>(wc: &WorstCase<S>, cfg: &WorstCaseConfig<S>, seed: u64, samples: usize) -> Result<usize> {
    let mut rng = seeded(seed);
    let mut checks = 0;
    for _ in 0..samples {
        let model = random_model(&mut rng, &cfg.weights, &ModelShape::default())?;
        let p = random_distribution(&mut rng, &model, 3)?;
        let o = random_profile(&mut rng, &model);
        checks += check_triple(wc, cfg, &model, &p, &o)?;
    }
    Ok(checks)
}

fn extension<S: Scalar>(args: &Args, config: &Option<PathBuf>, samples: usize) -> Result<Value> {
    let cfg = load_config::<S>(args, config)?;
    let wc = solve_worst_case(&cfg, &WorstCaseOptions { extract_witness: false, ..Default::default() })?;
    if wc.status != Status::Optimal {
        return Ok(json!({ "status": wc.status, "gamma_star": null, "checks": 0, "violations": 0 }));
    }
    let (source, checks) = match &args.game {
        Some(path) => {
            let file: GameFile = read_json(path)?;
            let model = file.model::<S>()?;
            let cap = args.cap.unwrap_or(DEFAULT_PROFILE_CAP);
            let m = model.profile_count();
            if m.saturating_mul(m + 1) > cap {
                return Err(Error::SizeCap { what: "extension triples", size: m.saturating_mul(m + 1), cap });
            }
            let profiles: Vec<_> = model.profiles().collect();
            let mut dists = vec![ProfileDistribution::uniform(profiles.clone())?];
            dists.extend(profiles.iter().cloned().map(ProfileDistribution::point));
            let mut checks = 0;
            for p in &dists {
                for o in &profiles {
                    checks += check_triple(&wc, &cfg, &model, p, o)?;
                }
            }
            (json!(path.display().to_string()), checks)
        }
        None => (json!({ "random_triples": samples, "seed": args.seed }), random_checks(&wc, &cfg, args.seed, samples)?),
    };
    Ok(json!({
        "status": wc.status,
        "gamma_star": opt_num(wc.gamma_star.as_ref()),
        "source": source,
        "checks": checks,
        "violations": 0,
    }))
}

fn smoothness<S: Scalar>(args: &Args, game: &Option<PathBuf>) -> Result<Value> {
    let g = load_game::<S>(args, game)?;
    let opts = RobustOptions { cap: args.cap.unwrap_or(DEFAULT_PROFILE_CAP), ..Default::default() };
    let report = validate_smoothness_claims(&g.game, &g.spec, &opts)?;
    let sb = &report.sum_bounded;
    let (robust, lambda, mu, lower, reason) = match &report.robust {
        Some(RobustPoa::Value { value, certificate, lower, .. }) => (
            num(value),
            num(&certificate.lambda),
            num(&certificate.mu),
            num(lower),
            Value::Null,
        ),
        Some(RobustPoa::NotSmoothable { reason }) => (Value::Null, Value::Null, Value::Null, Value::Null, json!(reason)),
        None => (Value::Null, Value::Null, Value::Null, Value::Null, json!("not sum-bounded")),
    };
    let cce_gap = report.robust.as_ref().and_then(|r| r.value()).map(|v| v.clone() - report.exact_ccpoa.clone());
    Ok(json!({
        "sf": g.spec.kind,
        "epsilon": 0,
        "sum_bounded": {
            "holds": sb.holds,
            "witness": sb.witness.as_ref().map(profile),
            "witness_values": sb.witness_values.as_ref().map(|(a, b)| json!([num(a), num(b)])),
        },
        "robust_poa": robust,
        "lower": lower,
        "lambda": lambda,
        "mu": mu,
        "not_smoothable": reason,
        "exact_ppoa": opt_num(report.exact_ppoa.as_ref()),
        "exact_ccpoa": num(&report.exact_ccpoa),
        "gaps": { "pne": opt_num(report.gap.as_ref()), "cce": opt_num(cce_gap.as_ref()) },
        "claims": { "pne": report.claim_pne, "cce": report.claim_cce },
    }))
}

/// Checks the value-1 feasible point for every basis function that admits
/// one; at least one must.
fn witness_check<S: Scalar>(cfg: &WorstCaseConfig<S>) -> Result<usize> {
    let rep = build_representative(cfg.weights.clone(), DEFAULT_REPRESENTATIVE_CAP)?;
    let tol = S::tol(1e-9);
    let mut checked = 0;
    for k in 0..cfg.basis.len() {
        let witness = match lemma1_witness(cfg, &rep, k) {
            Ok(w) => w,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        let lp = build_pp_pne(cfg, &rep, witness.designated)?;
        let x = witness.to_primal();
        let value = lp.objective_value(&x);
        if let Some((row, by)) = lp.first_violation(&x, &tol) {
            return Err(Error::Invariant(format!("witness for basis {k} violates `{row}` by {by}")));
        }
        if (value.clone() - S::one()).abs() > tol {
            return Err(Error::Invariant(format!("witness for basis {k} has value {value}")));
        }
        checked += 1;
    }
    if checked == 0 {
        return Err(Error::Invariant("no basis function admits a witness".into()));
    }
    Ok(checked)
}

struct GridOutcome {
    report: Value,
    optimal: bool,
    checks: usize,
}

fn grid_entry<S: Scalar>(idx: usize, name: &str, cfg: &WorstCaseConfig<S>, seed: u64, samples: usize) -> Result<GridOutcome> {
    let tag = |e: Error| Error::Invariant(format!("{name}: {e}"));
    let witnesses = witness_check(cfg).map_err(tag)?;
    let wc = solve_worst_case(cfg, &WorstCaseOptions::default()).map_err(tag)?;
    let optimal = wc.status == Status::Optimal;
    let checks = if optimal {
        random_checks(&wc, cfg, seed.wrapping_add(idx as u64), samples).map_err(tag)?
    } else {
        0
    };
    Ok(GridOutcome {
        report: json!({
            "name": name,
            "status": wc.status,
            "gamma_star": opt_num(wc.gamma_star.as_ref()),
            "duality_gap": num(&wc.duality_gap()),
            "witnesses": witnesses,
            "lemma1_shared_players": lemma1_shared_players(cfg).iter().map(|j| j + 1).collect::<Vec<_>>(),
            "extension_checks": checks,
        }),
        optimal,
        checks,
    })
}

fn selftest<S: Scalar>(args: &Args, samples: usize) -> Result<Value> {
    let grid = regression_grid::<S>();
    let outcomes: Vec<GridOutcome> = grid
        .par_iter()
        .enumerate()
        .map(|(idx, (name, cfg))| grid_entry(idx, name, cfg, args.seed, samples))
        .collect::<Result<_>>()?;
    let optimal = outcomes.iter().filter(|o| o.optimal).count();
    Ok(json!({
        "passed": true,
        "configurations": outcomes.len(),
        "optimal": optimal,
        "unbounded": outcomes.len() - optimal,
        "extension_checks": outcomes.iter().map(|o| o.checks).sum::<usize>(),
        "samples_per_configuration": samples,
        "seed": args.seed,
        "results": outcomes.into_iter().map(|o| o.report).collect::<Vec<_>>(),
    }))
}
