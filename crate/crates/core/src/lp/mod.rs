//! Linear programs, a dense two-phase simplex solver and a mechanical dualizer.

mod dual;
mod mps;
mod simplex;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

pub use dual::dualize;
pub use mps::to_fixed_mps;
pub use simplex::{solve, solve_with, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    pub fn flip(self) -> Sense {
        match self {
            Sense::Maximize => Sense::Minimize,
            Sense::Minimize => Sense::Maximize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable<S> {
    pub name: String,
    /// `None` is minus infinity.
    pub lower: Option<S>,
    /// `None` is plus infinity.
    pub upper: Option<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row<S> {
    pub label: String,
    pub coeffs: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> Row<S> {
    pub fn activity(&self, x: &[S]) -> S {
        self.coeffs
            .iter()
            .fold(S::zero(), |acc, (j, a)| acc + a.clone() * x[*j].clone())
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[S]) -> S {
        let lhs = self.activity(x);
        let zero = S::zero();
        match self.relation {
            Relation::Le => S::max_of(lhs - self.rhs.clone(), zero),
            Relation::Ge => S::max_of(self.rhs.clone() - lhs, zero),
            Relation::Eq => (lhs - self.rhs.clone()).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S> {
    pub sense: Sense,
    variables: Vec<Variable<S>>,
    objective: Vec<S>,
    rows: Vec<Row<S>>,
    var_index: HashMap<String, usize>,
    row_index: HashMap<String, usize>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            rows: Vec::new(),
            var_index: HashMap::new(),
            row_index: HashMap::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Option<S>, upper: Option<S>) -> Result<usize> {
        let name = name.into();
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l > u {
                return Err(invalid!("variable `{name}` has lower bound above upper bound"));
            }
        }
        let id = self.variables.len();
        if self.var_index.insert(name.clone(), id).is_some() {
            return Err(invalid!("duplicate variable `{name}`"));
        }
        self.variables.push(Variable { name, lower, upper });
        self.objective.push(S::zero());
        Ok(id)
    }

    pub fn add_nonneg(&mut self, name: impl Into<String>) -> Result<usize> {
        self.add_var(name, Some(S::zero()), None)
    }

    pub fn add_free(&mut self, name: impl Into<String>) -> Result<usize> {
        self.add_var(name, None, None)
    }

    pub fn set_objective(&mut self, var: usize, coef: S) {
        self.objective[var] = coef;
    }

    pub fn add_row(
        &mut self,
        label: impl Into<String>,
        coeffs: Vec<(usize, S)>,
        relation: Relation,
        rhs: S,
    ) -> Result<usize> {
        let label = label.into();
        if let Some((j, _)) = coeffs.iter().find(|(j, _)| *j >= self.variables.len()) {
            return Err(invalid!("row `{label}` references undeclared variable {j}"));
        }
        let id = self.rows.len();
        if self.row_index.insert(label.clone(), id).is_some() {
            return Err(invalid!("duplicate row label `{label}`"));
        }
        let coeffs = coeffs.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        self.rows.push(Row {
            label,
            coeffs,
            relation,
            rhs,
        });
        Ok(id)
    }

    pub fn variables(&self) -> &[Variable<S>] {
        &self.variables
    }

    pub fn rows(&self) -> &[Row<S>] {
        &self.rows
    }

    pub fn objective(&self) -> &[S] {
        &self.objective
    }

    pub fn var_id(&self, name: &str) -> Option<usize> {
        self.var_index.get(name).copied()
    }

    pub fn row_id(&self, label: &str) -> Option<usize> {
        self.row_index.get(label).copied()
    }

    pub fn row(&self, label: &str) -> Option<&Row<S>> {
        self.row_id(label).map(|i| &self.rows[i])
    }

    pub fn objective_value(&self, x: &[S]) -> S {
        self.objective
            .iter()
            .zip(x)
            .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }

    /// First row or bound violated by more than `tol`, as `(label, violation)`.
    pub fn first_violation(&self, x: &[S], tol: &S) -> Option<(String, S)> {
        for (v, val) in self.variables.iter().zip(x) {
            if let Some(l) = &v.lower {
                if l.clone() - val.clone() > *tol {
                    return Some((format!("bound:{}", v.name), l.clone() - val.clone()));
                }
            }
            if let Some(u) = &v.upper {
                if val.clone() - u.clone() > *tol {
                    return Some((format!("bound:{}", v.name), val.clone() - u.clone()));
                }
            }
        }
        self.rows.iter().find_map(|row| {
            let viol = row.violation(x);
            (viol > *tol).then(|| (row.label.clone(), viol))
        })
    }

    /// Assignment from `(name, value)` pairs; unnamed variables are zero.
    pub fn assignment<'a>(&self, values: impl IntoIterator<Item = (&'a str, S)>) -> Result<Vec<S>> {
        let mut x = vec![S::zero(); self.variables.len()];
        for (name, value) in values {
            let j = self
                .var_id(name)
                .ok_or_else(|| invalid!("unknown variable `{name}`"))?;
            x[j] = value;
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<S> {
    pub status: Status,
    /// Optimal objective value when `status` is `Optimal`.
    pub value: Option<S>,
    /// Primal values indexed like the program's variables.
    pub primal: Vec<S>,
    /// Shadow prices indexed like the program's rows: the rate of change of
    /// the optimum per unit increase of the row's right-hand side.
    pub duals: Vec<S>,
    pub iterations: usize,
}

impl<S: Scalar> SolveReport<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn primal_of(&self, lp: &LinearProgram<S>, name: &str) -> Option<S> {
        lp.var_id(name).and_then(|j| self.primal.get(j).cloned())
    }

    pub fn dual_of(&self, lp: &LinearProgram<S>, label: &str) -> Option<S> {
        lp.row_id(label).and_then(|i| self.duals.get(i).cloned())
    }
}
