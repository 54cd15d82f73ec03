//! Dense two-phase tableau simplex.
//!
//! Dantzig pricing by default, switching to Bland's rule after a streak of
//! degenerate pivots. In float mode every optimal answer is re-checked against
//! the original rows; a failed check triggers one Bland-only re-solve and then
//! an explicit error.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation, Sense, SolveReport, Status};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Consecutive zero-step pivots tolerated before switching to Bland.
    pub degenerate_streak: usize,
    pub max_iterations: usize,
    /// Smallest magnitude treated as non-zero in pricing and ratio tests.
    pub pivot_tol: f64,
    /// Reduced costs above `-cost_tol` count as non-negative.
    pub cost_tol: f64,
    /// A column without a pivot proves unboundedness only when its reduced
    /// cost is below `-ray_tol` (float mode).
    pub ray_tol: f64,
    /// Absolute row tolerance used to accept an optimal float solution.
    pub feasibility_tol: f64,
    /// Use Bland's rule from the first pivot.
    pub bland: bool,
    /// Float mode rebuilds the tableau from the basis after this many pivots.
    pub refresh_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            degenerate_streak: 50,
            max_iterations: 200_000,
            pivot_tol: 1e-10,
            cost_tol: 1e-9,
            ray_tol: 1e-7,
            feasibility_tol: 1e-9,
            bland: false,
            refresh_every: 50,
        }
    }
}

pub fn solve<S: Scalar>(lp: &LinearProgram<S>) -> Result<SolveReport<S>> {
    solve_with(lp, &SolverOptions::default())
}

pub fn solve_with<S: Scalar>(lp: &LinearProgram<S>, opts: &SolverOptions) -> Result<SolveReport<S>> {
    let report = Tableau::build(lp, opts)?.run(lp)?;
    if S::EXACT || report.status != Status::Optimal {
        return Ok(report);
    }
    let Some(problem) = certificate_problem(lp, &report, opts) else {
        return Ok(report);
    };
    if !opts.bland {
        let retry = SolverOptions { bland: true, ..*opts };
        let report = Tableau::build(lp, &retry)?.run(lp)?;
        if report.status == Status::Optimal && certificate_problem(lp, &report, opts).is_none() {
            return Ok(report);
        }
    }
    // Last resort: the same program in exact arithmetic.
    let exact = solve_with(&to_exact(lp)?, opts)?;
    if exact.status != Status::Optimal {
        return Err(Error::Solver(format!(
            "float solve claimed an optimum ({problem}) but the exact solve reports {:?}",
            exact.status
        )));
    }
    let back = |v: &[Rational]| v.iter().map(S::from_rational).collect::<Vec<S>>();
    Ok(SolveReport {
        status: Status::Optimal,
        value: exact.value.as_ref().map(S::from_rational),
        primal: back(&exact.primal),
        duals: back(&exact.duals),
        iterations: report.iterations + exact.iterations,
    })
}

fn to_exact<S: Scalar>(lp: &LinearProgram<S>) -> Result<LinearProgram<Rational>> {
    let q = |v: &S| v.to_rational();
    let mut out = LinearProgram::new(lp.sense);
    for (j, v) in lp.variables().iter().enumerate() {
        let id = out.add_var(v.name.clone(), v.lower.as_ref().map(q), v.upper.as_ref().map(q))?;
        out.set_objective(id, q(&lp.objective()[j]));
    }
    for row in lp.rows() {
        let coeffs = row.coeffs.iter().map(|(j, a)| (*j, q(a))).collect();
        out.add_row(row.label.clone(), coeffs, row.relation, q(&row.rhs))?;
    }
    Ok(out)
}

/// Checks a float optimum against its own dual values: primal rows, dual
/// signs, reduced costs and the duality gap. Returns what failed.
fn certificate_problem<S: Scalar>(lp: &LinearProgram<S>, report: &SolveReport<S>, opts: &SolverOptions) -> Option<String> {
    let x: Vec<f64> = report.primal.iter().map(Scalar::to_f64).collect();
    let tol = opts.feasibility_tol;
    if let Some((label, v)) = lp.first_violation(&report.primal, &S::from_f64(tol)) {
        return Some(format!("row `{label}` violated by {v}"));
    }
    // Work with the minimisation form: c' = s c, y' = s y.
    let s = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let y: Vec<f64> = report.duals.iter().map(|d| s * d.to_f64()).collect();
    let dual_tol = 1e-7;
    let mut dual_obj = 0.0;
    let mut scale = 1.0f64;
    let mut reduced: Vec<f64> = lp.objective().iter().map(|c| s * c.to_f64()).collect();
    for (row, yi) in lp.rows().iter().zip(&y) {
        let wrong = match row.relation {
            Relation::Le => *yi > dual_tol,
            Relation::Ge => *yi < -dual_tol,
            Relation::Eq => false,
        };
        if wrong {
            return Some(format!("dual of `{}` has the wrong sign ({yi})", row.label));
        }
        dual_obj += yi * row.rhs.to_f64();
        for (j, a) in &row.coeffs {
            let t = yi * a.to_f64();
            reduced[*j] -= t;
            scale = scale.max(t.abs());
        }
    }
    for (j, v) in lp.variables().iter().enumerate() {
        let r = reduced[j];
        let lo = v.lower.as_ref().map(Scalar::to_f64);
        let hi = v.upper.as_ref().map(Scalar::to_f64);
        let slack = dual_tol * scale.max(lp.objective()[j].to_f64().abs());
        let term = match (lo, hi) {
            (Some(l), None) if r >= -slack => r.max(0.0) * l,
            (None, Some(u)) if r <= slack => r.min(0.0) * u,
            (None, None) if r.abs() <= slack => 0.0,
            (Some(l), Some(u)) => if r > 0.0 { r * l } else { r * u },
            _ => return Some(format!("reduced cost of `{}` is {r}", v.name)),
        };
        dual_obj += term;
    }
    let primal_obj: f64 = lp.objective().iter().zip(&x).map(|(c, xi)| s * c.to_f64() * xi).sum();
    let gap = (primal_obj - dual_obj).abs();
    if gap > 1e-7 * (1.0 + primal_obj.abs()) {
        return Some(format!("duality gap {gap} between {primal_obj} and {dual_obj}"));
    }
    None
}

/// How an original variable is rebuilt from standard-form columns.
struct ColumnMap<S> {
    offset: S,
    parts: Vec<(usize, bool)>,
}

struct StdRow<S> {
    coeffs: Vec<(usize, S)>,
    relation: Relation,
    rhs: S,
    origin: Option<usize>,
}

struct Tableau<S> {
    /// `m` rows of `width + 1` entries; the last one is the right-hand side.
    rows: Vec<Vec<S>>,
    obj: Vec<S>,
    basic: Vec<usize>,
    /// Column holding the initial identity entry of each row.
    unit: Vec<usize>,
    /// Row multiplier applied to make the right-hand side non-negative.
    sign: Vec<bool>,
    origin: Vec<Option<usize>>,
    n_std: usize,
    first_artificial: usize,
    width: usize,
    cost: Vec<S>,
    maps: Vec<ColumnMap<S>>,
    opts: SolverOptions,
    bland: bool,
    iterations: usize,
    /// Rows as built, for rebuilding the tableau from the basis (float mode).
    initial: Vec<Vec<S>>,
    /// Column costs of the current phase.
    phase_costs: Vec<S>,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram<S>, opts: &SolverOptions) -> Result<Self> {
        let mut maps = Vec::with_capacity(lp.variables().len());
        let mut std_rows: Vec<StdRow<S>> = Vec::new();
        let mut n_std = 0usize;
        for v in lp.variables() {
            let map = match (&v.lower, &v.upper) {
                (Some(l), Some(u)) => {
                    let c = n_std;
                    n_std += 1;
                    std_rows.push(StdRow {
                        coeffs: vec![(c, S::one())],
                        relation: Relation::Le,
                        rhs: u.clone() - l.clone(),
                        origin: None,
                    });
                    ColumnMap { offset: l.clone(), parts: vec![(c, false)] }
                }
                (Some(l), None) => {
                    n_std += 1;
                    ColumnMap { offset: l.clone(), parts: vec![(n_std - 1, false)] }
                }
                (None, Some(u)) => {
                    n_std += 1;
                    ColumnMap { offset: u.clone(), parts: vec![(n_std - 1, true)] }
                }
                (None, None) => {
                    n_std += 2;
                    ColumnMap {
                        offset: S::zero(),
                        parts: vec![(n_std - 2, false), (n_std - 1, true)],
                    }
                }
            };
            maps.push(map);
        }

        let flip = lp.sense == Sense::Maximize;
        let mut cost = vec![S::zero(); n_std];
        for (j, c) in lp.objective().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = if flip { -c.clone() } else { c.clone() };
            for &(col, neg) in &maps[j].parts {
                cost[col] = if neg { -c.clone() } else { c.clone() };
            }
        }

        for (idx, row) in lp.rows().iter().enumerate() {
            let mut rhs = row.rhs.clone();
            let mut coeffs = Vec::with_capacity(row.coeffs.len());
            for (j, a) in &row.coeffs {
                let map = &maps[*j];
                rhs = rhs - a.clone() * map.offset.clone();
                for &(col, neg) in &map.parts {
                    coeffs.push((col, if neg { -a.clone() } else { a.clone() }));
                }
            }
            std_rows.push(StdRow { coeffs, relation: row.relation, rhs, origin: Some(idx) });
        }

        let m = std_rows.len();
        let n_slack = std_rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let n_art = std_rows
            .iter()
            .filter(|r| match r.relation {
                Relation::Le => r.rhs < S::zero(),
                Relation::Ge => r.rhs >= S::zero(),
                Relation::Eq => true,
            })
            .count();
        let first_slack = n_std;
        let first_artificial = n_std + n_slack;
        let width = first_artificial + n_art;

        let mut rows = Vec::with_capacity(m);
        let mut basic = Vec::with_capacity(m);
        let mut unit = Vec::with_capacity(m);
        let mut sign = Vec::with_capacity(m);
        let mut origin = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (first_slack, first_artificial);
        for r in std_rows {
            let negate = r.rhs < S::zero();
            let relation = match (negate, r.relation) {
                (true, Relation::Le) => Relation::Ge,
                (true, Relation::Ge) => Relation::Le,
                (_, rel) => rel,
            };
            let mut dense = vec![S::zero(); width + 1];
            for (col, a) in r.coeffs {
                let a = if negate { -a } else { a };
                dense[col] = dense[col].clone() + a;
            }
            dense[width] = if negate { -r.rhs } else { r.rhs };
            let u = match relation {
                Relation::Le => {
                    dense[next_slack] = S::one();
                    next_slack += 1;
                    next_slack - 1
                }
                Relation::Ge => {
                    dense[next_slack] = -S::one();
                    next_slack += 1;
                    dense[next_art] = S::one();
                    next_art += 1;
                    next_art - 1
                }
                Relation::Eq => {
                    dense[next_art] = S::one();
                    next_art += 1;
                    next_art - 1
                }
            };
            rows.push(dense);
            basic.push(u);
            unit.push(u);
            sign.push(negate);
            origin.push(r.origin);
        }

        let initial = if S::EXACT { Vec::new() } else { rows.clone() };
        Ok(Tableau {
            rows,
            obj: vec![S::zero(); width + 1],
            basic,
            unit,
            sign,
            origin,
            n_std,
            first_artificial,
            width,
            cost,
            maps,
            opts: *opts,
            bland: opts.bland,
            iterations: 0,
            initial,
            phase_costs: Vec::new(),
        })
    }

    fn eps(&self) -> S {
        S::tol(self.opts.pivot_tol)
    }

    fn snap(&self, v: S) -> S {
        if !S::EXACT && v.abs() < S::from_f64(1e-13) {
            S::zero()
        } else {
            v
        }
    }

    /// Reduced-cost row for the given column costs and current basis.
    fn price(&mut self, costs: &[S]) {
        if self.phase_costs.as_slice() != costs {
            self.phase_costs = costs.to_vec();
        }
        let mut obj: Vec<S> = costs.to_vec();
        obj.push(S::zero());
        for (row, &b) in self.rows.iter().zip(&self.basic) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o = o.clone() - cb.clone() * a.clone();
                }
            }
        }
        self.obj = obj;
    }

    /// Recomputes the tableau as `B^-1 A` from the initial rows and re-prices,
    /// discarding accumulated round-off. Keeps the current tableau when the
    /// basis matrix looks singular.
    fn refresh(&mut self) {
        if S::EXACT {
            return;
        }
        let m = self.rows.len();
        let w = self.width + 1;
        let mut aug: Vec<Vec<S>> = (0..m)
            .map(|i| {
                let mut row: Vec<S> = self.basic.iter().map(|&b| self.initial[i][b].clone()).collect();
                row.extend(self.initial[i].iter().cloned());
                row
            })
            .collect();
        for k in 0..m {
            let p = (k..m)
                .reduce(|a, b| if aug[b][k].abs() > aug[a][k].abs() { b } else { a })
                .expect("non-empty");
            if aug[p][k].abs() < S::from_f64(1e-11) {
                return;
            }
            aug.swap(k, p);
            let piv = aug[k][k].clone();
            for v in aug[k].iter_mut() {
                *v = v.clone() / piv.clone();
            }
            let pivot_row = aug[k].clone();
            for (i, row) in aug.iter_mut().enumerate() {
                if i == k || row[k].is_zero() {
                    continue;
                }
                let f = row[k].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row).skip(k) {
                    if !pv.is_zero() {
                        *v = v.clone() - f.clone() * pv.clone();
                    }
                }
            }
        }
        for (k, row) in aug.into_iter().enumerate() {
            let mut fresh: Vec<S> = row.into_iter().skip(m).map(|v| self.snap(v)).collect();
            debug_assert_eq!(fresh.len(), w);
            fresh[self.basic[k]] = S::one();
            if fresh[w - 1] < S::zero() && fresh[w - 1] > -S::from_f64(self.opts.feasibility_tol) {
                fresh[w - 1] = S::zero();
            }
            self.rows[k] = fresh;
        }
        let costs = std::mem::take(&mut self.phase_costs);
        self.price(&costs);
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        let nz: Vec<usize> = {
            let row = &mut self.rows[r];
            let mut nz = Vec::new();
            for (j, a) in row.iter_mut().enumerate() {
                if !a.is_zero() {
                    *a = a.clone() / piv.clone();
                    nz.push(j);
                }
            }
            row[c] = S::one();
            nz
        };
        let pivot_row = self.rows[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                let v = self.rows[i][j].clone() - f.clone() * pivot_row[j].clone();
                self.rows[i][j] = self.snap(v);
            }
            self.rows[i][c] = S::zero();
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                let v = self.obj[j].clone() - f.clone() * pivot_row[j].clone();
                self.obj[j] = self.snap(v);
            }
            self.obj[c] = S::zero();
        }
        if !S::EXACT {
            // The two-pass ratio test may leave right-hand sides a hair below
            // zero; treat those as degenerate.
            let w = self.width;
            let floor = -S::from_f64(self.opts.feasibility_tol);
            for row in &mut self.rows {
                if row[w] < S::zero() && row[w] > floor {
                    row[w] = S::zero();
                }
            }
        }
        self.basic[r] = c;
        self.iterations += 1;
    }

    /// Row and step length of the ratio test for column `c`.
    ///
    /// Exact mode and Bland mode take the minimum ratio, ties to the smallest
    /// basic index, which keeps Bland's rule finite. Otherwise float mode uses
    /// a two-pass test that prefers the largest pivot among rows whose ratio
    /// is within the feasibility tolerance of the minimum.
    fn leaving(&self, c: usize) -> Option<(usize, S)> {
        let eps = self.eps();
        if S::EXACT || self.bland {
            let mut leaving: Option<(usize, S)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[c];
                if *a <= eps {
                    continue;
                }
                let ratio = row[self.width].clone() / a.clone();
                let better = match &leaving {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basic[i] < self.basic[*l]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            return leaving;
        }
        let delta = S::from_f64(self.opts.feasibility_tol);
        let mut bound: Option<S> = None;
        for row in &self.rows {
            let a = &row[c];
            if *a > eps {
                let relaxed = (row[self.width].clone() + delta.clone()) / a.clone();
                if bound.as_ref().is_none_or(|b| relaxed < *b) {
                    bound = Some(relaxed);
                }
            }
        }
        let bound = bound?;
        let mut best: Option<(usize, S)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let a = &row[c];
            if *a <= eps {
                continue;
            }
            let ratio = row[self.width].clone() / a.clone();
            if ratio > bound {
                continue;
            }
            let take = match &best {
                None => true,
                Some((l, _)) => {
                    let b = &self.rows[*l][c];
                    *a > *b || (*a == *b && self.basic[i] < self.basic[*l])
                }
            };
            if take {
                best = Some((i, S::max_of(ratio, S::zero())));
            }
        }
        best
    }

    fn step(&mut self, streak: &mut usize, phase1: bool) -> Result<Step> {
        if self.iterations >= self.opts.max_iterations {
            return Err(Error::Solver(format!(
                "iteration limit {} reached",
                self.opts.max_iterations
            )));
        }
        let threshold = -S::tol(self.opts.cost_tol);
        let mut candidates: Vec<usize> = (0..self.first_artificial)
            .filter(|&j| self.obj[j] < threshold)
            .collect();
        if !self.bland {
            candidates.sort_by(|&a, &b| {
                self.obj[a].partial_cmp(&self.obj[b]).unwrap_or(std::cmp::Ordering::Equal)
            });
        }
        for c in candidates {
            let Some((r, ratio)) = self.leaving(c) else {
                // Phase 1 is bounded below, so a ray there is round-off; in
                // phase 2 only a clearly negative reduced cost proves one.
                if !phase1 && (S::EXACT || self.obj[c] < -S::from_f64(self.opts.ray_tol)) {
                    return Ok(Step::Unbounded);
                }
                continue;
            };
            if ratio <= self.eps() {
                *streak += 1;
                if *streak >= self.opts.degenerate_streak {
                    self.bland = true;
                }
            } else {
                *streak = 0;
            }
            self.pivot(r, c);
            return Ok(Step::Pivoted);
        }
        Ok(Step::Optimal)
    }

    fn iterate(&mut self, phase1: bool) -> Result<Step> {
        let mut streak = 0;
        let mut since_refresh = 0;
        let mut confirmed = 0;
        loop {
            match self.step(&mut streak, phase1)? {
                Step::Pivoted => {
                    since_refresh += 1;
                    if !S::EXACT && since_refresh >= self.opts.refresh_every {
                        self.refresh();
                        since_refresh = 0;
                    }
                }
                // A float verdict is only accepted on a freshly rebuilt tableau.
                done if S::EXACT || (since_refresh == 0 && confirmed > 0) || confirmed >= 5 => return Ok(done),
                _ => {
                    self.refresh();
                    since_refresh = 0;
                    confirmed += 1;
                }
            }
        }
    }

    fn run(mut self, lp: &LinearProgram<S>) -> Result<SolveReport<S>> {
        let m = self.rows.len();
        let n_vars = lp.variables().len();

        if self.first_artificial < self.width {
            let mut phase1 = vec![S::zero(); self.width];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = S::one();
            }
            self.price(&phase1);
            self.iterate(true)?;
            let infeasibility = -self.obj[self.width].clone();
            let scale = self
                .rows
                .iter()
                .fold(S::one(), |acc, r| S::max_of(acc, r[self.width].abs()));
            if infeasibility > S::tol(self.opts.feasibility_tol) * scale {
                return Ok(SolveReport {
                    status: Status::Infeasible,
                    value: None,
                    primal: vec![S::zero(); n_vars],
                    duals: vec![S::zero(); lp.rows().len()],
                    iterations: self.iterations,
                });
            }
            self.drive_out_artificials();
        }

        let mut costs = self.cost.clone();
        costs.resize(self.width, S::zero());
        self.price(&costs);
        self.bland = self.opts.bland;
        let outcome = self.iterate(false)?;

        let mut x_std = vec![S::zero(); self.n_std];
        for i in 0..m {
            let b = self.basic[i];
            if b < self.n_std {
                x_std[b] = self.rows[i][self.width].clone();
            }
        }
        let primal: Vec<S> = self
            .maps
            .iter()
            .map(|map| {
                map.parts.iter().fold(map.offset.clone(), |acc, &(col, neg)| {
                    if neg {
                        acc - x_std[col].clone()
                    } else {
                        acc + x_std[col].clone()
                    }
                })
            })
            .collect();

        if let Step::Unbounded = outcome {
            return Ok(SolveReport {
                status: Status::Unbounded,
                value: None,
                primal,
                duals: vec![S::zero(); lp.rows().len()],
                iterations: self.iterations,
            });
        }

        let mut duals = vec![S::zero(); lp.rows().len()];
        for i in 0..m {
            if let Some(o) = self.origin[i] {
                let pi = -self.obj[self.unit[i]].clone();
                let pi = if self.sign[i] { -pi } else { pi };
                duals[o] = match lp.sense {
                    Sense::Minimize => pi,
                    Sense::Maximize => -pi,
                };
            }
        }
        let value = lp.objective_value(&primal);
        Ok(SolveReport {
            status: Status::Optimal,
            value: Some(value),
            primal,
            duals,
            iterations: self.iterations,
        })
    }

    fn drive_out_artificials(&mut self) {
        let eps = self.eps();
        for i in 0..self.rows.len() {
            if self.basic[i] < self.first_artificial {
                continue;
            }
            let col = (0..self.first_artificial)
                .filter(|&j| self.rows[i][j].abs() > eps)
                .reduce(|a, b| if self.rows[i][b].abs() > self.rows[i][a].abs() { b } else { a });
            if let Some(c) = col {
                self.pivot(i, c);
            }
        }
    }
}
