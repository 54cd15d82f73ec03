//! Browser bindings for the static demo page in `www/`.
//!
//! Each export takes JSON text and returns a JSON report, or throws an error
//! string. The `*_report` functions hold the logic so they can be tested
//! natively.

use poa_core::formulations::{solve_worst_case, WorstCaseOptions};
use poa_core::game::{Predicate, SocialKind};
use poa_core::io::{parse_json, ConfigFile, GameFile};
use poa_core::oracle::{enumerate_eps_pne, exact_ppoa, worst_cce_value, OracleOptions};
use poa_core::smoothness::{validate_smoothness_claims, RobustOptions, RobustPoa};
use poa_core::{Error, Number, Rational, Result, Scalar};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Browser games stay small so the page never freezes.
const PROFILE_CAP: u128 = 4096;

fn num<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        let n = Number::from_scalar(x);
        match n.0.is_integer() {
            true => json!(n.to_string().parse::<i64>().map_or_else(|_| json!(n.to_string()), |v| json!(v))),
            false => json!(n.to_string()),
        }
    } else {
        serde_json::Number::from_f64(x.to_f64()).map_or(Value::Null, Value::Number)
    }
}

fn parse_kind(sf: &str) -> Result<SocialKind> {
    match sf {
        "sum" => Ok(SocialKind::Sum),
        "max" => Ok(SocialKind::Max),
        other => Err(Error::Invalid(format!("unknown social function `{other}`"))),
    }
}

fn parse_number<S: Scalar>(text: &str) -> Result<S> {
    text.trim()
        .parse::<Number>()
        .map(|n| n.get())
        .map_err(|e| Error::Invalid(e.to_string()))
}

/// gamma* of the class in `config` at each comma-separated epsilon.
pub fn curve_report<S: Scalar>(config: &str, sf: &str, epsilons: &str) -> Result<Value> {
    let file: ConfigFile = parse_json(config)?;
    let kind = parse_kind(sf)?;
    let opts = WorstCaseOptions { extract_witness: false, ..Default::default() };
    let mut points = Vec::new();
    for eps in epsilons.split(',').filter(|t| !t.trim().is_empty()) {
        let eps: S = parse_number(eps)?;
        let cfg = file.config(Some(kind), Some(eps.clone()))?;
        let wc = solve_worst_case(&cfg, &opts)?;
        points.push(json!({
            "epsilon": num(&eps),
            "status": wc.status,
            "gamma_star": wc.gamma_star.as_ref().map(num),
        }));
    }
    Ok(json!({ "mode": S::MODE, "sf": kind, "points": points }))
}

/// Optimum, equilibria and both exact price-of-anarchy ratios of one game.
pub fn game_report<S: Scalar>(game: &str, sf: &str, epsilon: &str) -> Result<Value> {
    let file: GameFile = parse_json(game)?;
    let g = file.game::<S>()?;
    let spec = file.spec::<S>(parse_kind(sf)?)?;
    let eps: S = parse_number(epsilon)?;
    let opts = OracleOptions { cap: PROFILE_CAP, ..Default::default() };
    let pne = exact_ppoa(&g, &spec, &eps, Predicate::Eq1, &opts)?;
    let equilibria = enumerate_eps_pne(&g, &eps, Predicate::Eq1, &opts)?;
    let cce = worst_cce_value(&g, &spec, &eps, Predicate::Verbatim, &opts)?;
    let optimum = pne.optimum();
    Ok(json!({
        "mode": S::MODE,
        "optimum": { "profile": optimum.profile.0, "value": num(&optimum.value) },
        "equilibria": equilibria.iter().map(|p| json!({
            "profile": p.0,
            "social_value": num(&g.social_value_profile(&spec, p)),
        })).collect::<Vec<_>>(),
        "ppoa": pne.ratio().map(num),
        "ccpoa": cce.as_ref().map(|c| num(&c.ratio)),
    }))
}

/// Robust bound with its certificate next to the exact ratios at eps = 0.
pub fn smoothness_report<S: Scalar>(game: &str, sf: &str) -> Result<Value> {
    let file: GameFile = parse_json(game)?;
    let g = file.game::<S>()?;
    let spec = file.spec::<S>(parse_kind(sf)?)?;
    let opts = RobustOptions { cap: PROFILE_CAP, ..Default::default() };
    let report = validate_smoothness_claims(&g, &spec, &opts)?;
    let robust = match &report.robust {
        Some(RobustPoa::Value { value, certificate, .. }) => json!({
            "value": num(value),
            "lambda": num(&certificate.lambda),
            "mu": num(&certificate.mu),
        }),
        Some(RobustPoa::NotSmoothable { reason }) => json!({ "reason": reason }),
        None => json!({ "reason": "social function is not sum-bounded" }),
    };
    Ok(json!({
        "mode": S::MODE,
        "sum_bounded": report.sum_bounded.holds,
        "robust": robust,
        "exact_ppoa": report.exact_ppoa.as_ref().map(num),
        "exact_ccpoa": num(&report.exact_ccpoa),
    }))
}

fn finish(result: Result<Value>) -> std::result::Result<String, JsValue> {
    result.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn worst_case_curve(config: &str, sf: &str, epsilons: &str, exact: bool) -> std::result::Result<String, JsValue> {
    finish(if exact {
        curve_report::<Rational>(config, sf, epsilons)
    } else {
        curve_report::<f64>(config, sf, epsilons)
    })
}

#[wasm_bindgen]
pub fn analyze_game(game: &str, sf: &str, epsilon: &str, exact: bool) -> std::result::Result<String, JsValue> {
    finish(if exact {
        game_report::<Rational>(game, sf, epsilon)
    } else {
        game_report::<f64>(game, sf, epsilon)
    })
}

#[wasm_bindgen]
pub fn robust_bound(game: &str, sf: &str, exact: bool) -> std::result::Result<String, JsValue> {
    finish(if exact {
        smoothness_report::<Rational>(game, sf)
    } else {
        smoothness_report::<f64>(game, sf)
    })
}
