use std::fmt::Write;

use crate::lp::{LinearProgram, Relation, Sense};
use crate::scalar::Scalar;

fn num<S: Scalar>(v: &S) -> String {
    let x = v.to_f64();
    let plain = format!("{x}");
    if plain.len() <= 12 {
        plain
    } else {
        format!("{x:.5e}")
    }
}

fn field_line(out: &mut String, f1: &str, f2: &str, f3: &str, f4: &str, f5: &str, f6: &str) {
    let mut line = format!(" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}");
    if !f5.is_empty() {
        let _ = write!(line, "   {f5:<8}  {f6:>12}");
    }
    out.push_str(line.trim_end());
    out.push('\n');
}

/// Fixed-format MPS. Names are replaced by `C<k>` / `R<k>`; comment lines at
/// the top map them back to the original labels.
pub fn to_fixed_mps<S: Scalar>(lp: &LinearProgram<S>, name: &str) -> String {
    let col = |j: usize| format!("C{}", j + 1);
    let row = |i: usize| format!("R{}", i + 1);
    let mut out = String::new();
    for (j, v) in lp.variables().iter().enumerate() {
        let _ = writeln!(out, "* {} {}", col(j), v.name);
    }
    for (i, r) in lp.rows().iter().enumerate() {
        let _ = writeln!(out, "* {} {}", row(i), r.label);
    }
    let short: String = name.chars().filter(|c| !c.is_whitespace()).take(8).collect();
    let _ = writeln!(out, "NAME          {short}");
    if lp.sense == Sense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    out.push_str("ROWS\n N  OBJ\n");
    for (i, r) in lp.rows().iter().enumerate() {
        let t = match r.relation {
            Relation::Le => "L",
            Relation::Ge => "G",
            Relation::Eq => "E",
        };
        let _ = writeln!(out, " {t}  {}", row(i));
    }

    let mut columns: Vec<Vec<(String, S)>> = vec![Vec::new(); lp.variables().len()];
    for (j, c) in lp.objective().iter().enumerate() {
        if !c.is_zero() {
            columns[j].push(("OBJ".into(), c.clone()));
        }
    }
    for (i, r) in lp.rows().iter().enumerate() {
        for (j, a) in &r.coeffs {
            columns[*j].push((row(i), a.clone()));
        }
    }
    out.push_str("COLUMNS\n");
    for (j, entries) in columns.iter().enumerate() {
        if entries.is_empty() {
            // Keep the column declared so bounds can refer to it.
            field_line(&mut out, "", &col(j), "OBJ", "0", "", "");
        }
        for pair in entries.chunks(2) {
            let (r1, v1) = &pair[0];
            let (r2, v2) = pair
                .get(1)
                .map(|(r, v)| (r.as_str(), num(v)))
                .unwrap_or(("", String::new()));
            field_line(&mut out, "", &col(j), r1, &num(v1), r2, &v2);
        }
    }
    out.push_str("RHS\n");
    for (i, r) in lp.rows().iter().enumerate() {
        if !r.rhs.is_zero() {
            field_line(&mut out, "", "RHS", &row(i), &num(&r.rhs), "", "");
        }
    }
    let mut bounds = String::new();
    for (j, v) in lp.variables().iter().enumerate() {
        let c = col(j);
        match (&v.lower, &v.upper) {
            (Some(l), None) if l.is_zero() => {}
            (Some(l), None) => field_line(&mut bounds, "LO", "BND", &c, &num(l), "", ""),
            (None, None) => field_line(&mut bounds, "FR", "BND", &c, "", "", ""),
            (None, Some(u)) => {
                field_line(&mut bounds, "MI", "BND", &c, "", "", "");
                field_line(&mut bounds, "UP", "BND", &c, &num(u), "", "");
            }
            (Some(l), Some(u)) if l == u => field_line(&mut bounds, "FX", "BND", &c, &num(l), "", ""),
            (Some(l), Some(u)) => {
                if !l.is_zero() {
                    field_line(&mut bounds, "LO", "BND", &c, &num(l), "", "");
                }
                field_line(&mut bounds, "UP", "BND", &c, &num(u), "", "");
            }
        }
    }
    if !bounds.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bounds);
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_sections_in_order() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg("gamma").unwrap();
        let z = lp.add_free("z[1]").unwrap();
        lp.set_objective(x, 1.0);
        lp.add_row("norm", vec![(x, 1.0), (z, -2.5)], Relation::Eq, 1.0).unwrap();
        let text = to_fixed_mps(&lp, "pp pne");
        let order = ["* C1 gamma", "* R1 norm", "NAME", "OBJSENSE", "ROWS", " E  R1", "COLUMNS", "RHS", "BOUNDS", " FR BND", "ENDATA"];
        let mut at = 0;
        for key in order {
            let pos = text[at..].find(key).unwrap_or_else(|| panic!("missing {key} in\n{text}"));
            at += pos;
        }
        assert!(text.contains("-2.5"));
    }
}
