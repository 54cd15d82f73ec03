//! JSON rendering of scalars and report envelopes.

use poa_core::game::StrategyProfile;
use poa_core::lp::SolverOptions;
use poa_core::{Number, Scalar, Tolerances};
use serde_json::{json, Map, Value};

/// Exact values print as integers or "p/q" strings, floats as numbers.
/// Non-finite floats become strings so the report stays valid JSON.
pub fn num<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        let n = Number::from_scalar(x);
        if n.0.is_integer() {
            // Arbitrary precision keeps big integers intact.
            serde_json::from_str(&n.to_string()).unwrap_or_else(|_| Value::String(n.to_string()))
        } else {
            Value::String(n.to_string())
        }
    } else {
        let f = x.to_f64();
        serde_json::Number::from_f64(f).map_or_else(|| Value::String(f.to_string()), Value::Number)
    }
}

pub fn nums<S: Scalar>(xs: &[S]) -> Value {
    Value::Array(xs.iter().map(num).collect())
}

pub fn opt_num<S: Scalar>(x: Option<&S>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn profile(p: &StrategyProfile) -> Value {
    json!(p.0)
}

fn tolerances<S: Scalar>() -> Value {
    if S::EXACT {
        return json!({ "feasibility": 0, "relative": 0, "equilibrium": 0 });
    }
    let t = Tolerances::default();
    let s = SolverOptions::default();
    json!({
        "feasibility": t.feasibility,
        "relative": t.relative,
        "equilibrium": 1e-9,
        "pivot": s.pivot_tol,
        "reduced_cost": s.cost_tol,
    })
}

/// Wraps `body` with the command name, arithmetic mode and tolerances.
pub fn envelope<S: Scalar>(command: &str, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("command".into(), json!(command));
    out.insert("mode".into(), json!(S::MODE));
    out.insert("tolerances".into(), tolerances::<S>());
    if let Value::Object(fields) = body {
        out.extend(fields);
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use poa_core::Rational;

    #[test]
    fn scalars_render_per_mode() {
        assert_eq!(num(&Rational::ratio(5, 3)), json!("5/3"));
        assert_eq!(num(&Rational::from_i64(-4)), json!(-4));
        assert_eq!(num(&0.5f64), json!(0.5));
        assert_eq!(num(&f64::INFINITY), json!("inf"));
    }
}
