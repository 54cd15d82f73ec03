use crate::error::Result;
use crate::lp::{LinearProgram, Relation, Sense};
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq)]
enum Sign {
    NonNeg,
    NonPos,
    Free,
}

/// Mechanical LP dual.
///
/// Bounds other than `x >= 0`, `x <= 0` or free become explicit rows named
/// `bound_lo[v]` / `bound_hi[v]`. Dual variables are named `dual[row]` and
/// dual rows `col[var]`. Signs follow the shadow-price convention, so an
/// optimal dual solution coincides with the solver's reported duals.
pub fn dualize<S: Scalar>(lp: &LinearProgram<S>) -> Result<LinearProgram<S>> {
    let mut rows: Vec<(String, Vec<(usize, S)>, Relation, S)> = lp
        .rows()
        .iter()
        .map(|r| (r.label.clone(), r.coeffs.clone(), r.relation, r.rhs.clone()))
        .collect();
    let mut signs = Vec::with_capacity(lp.variables().len());
    for (j, v) in lp.variables().iter().enumerate() {
        let zero_lo = v.lower.as_ref().is_some_and(|l| l.is_zero());
        let zero_hi = v.upper.as_ref().is_some_and(|u| u.is_zero());
        let sign = match (&v.lower, &v.upper) {
            (None, None) => Sign::Free,
            _ if zero_lo => Sign::NonNeg,
            (None, _) if zero_hi => Sign::NonPos,
            _ => Sign::Free,
        };
        if let Some(l) = &v.lower {
            if sign != Sign::NonNeg {
                rows.push((format!("bound_lo[{}]", v.name), vec![(j, S::one())], Relation::Ge, l.clone()));
            }
        }
        if let Some(u) = &v.upper {
            if sign != Sign::NonPos {
                rows.push((format!("bound_hi[{}]", v.name), vec![(j, S::one())], Relation::Le, u.clone()));
            }
        }
        signs.push(sign);
    }

    let maximize = lp.sense == Sense::Maximize;
    let mut dual = LinearProgram::new(lp.sense.flip());
    let mut columns: Vec<Vec<(usize, S)>> = vec![Vec::new(); lp.variables().len()];
    for (label, coeffs, relation, rhs) in &rows {
        let nonneg = if maximize { Relation::Le } else { Relation::Ge };
        let (lo, hi) = match relation {
            Relation::Eq => (None, None),
            r if *r == nonneg => (Some(S::zero()), None),
            _ => (None, Some(S::zero())),
        };
        let y = dual.add_var(format!("dual[{label}]"), lo, hi)?;
        dual.set_objective(y, rhs.clone());
        for (j, a) in coeffs {
            columns[*j].push((y, a.clone()));
        }
    }
    for (j, (v, column)) in lp.variables().iter().zip(columns).enumerate() {
        let relation = match (signs[j], maximize) {
            (Sign::Free, _) => Relation::Eq,
            (Sign::NonNeg, true) | (Sign::NonPos, false) => Relation::Ge,
            (Sign::NonNeg, false) | (Sign::NonPos, true) => Relation::Le,
        };
        dual.add_row(format!("col[{}]", v.name), column, relation, lp.objective()[j].clone())?;
    }
    Ok(dual)
}
