use crate::error::{Error, Result};
use crate::formulations::{
    build_dp_cce, dual_program, extract_worst_game, primal_program, representative_columns,
    DualSolution, SmallSolution, WorstCaseConfig,
};
use crate::game::{CongestionModel, GeneralizedGame, ProfileDistribution, SocialKind, StrategyProfile};
use crate::lp::{dualize, solve_with, LinearProgram, SolveReport, SolverOptions, Status};
use crate::par_map;
use crate::representative::{build_representative, RepresentativeModel, DEFAULT_REPRESENTATIVE_CAP};
use crate::scalar::{Scalar, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCaseOptions {
    pub solver: SolverOptions,
    pub representative_cap: usize,
    pub extract_witness: bool,
    pub tolerances: Tolerances,
}

impl Default for WorstCaseOptions {
    fn default() -> Self {
        WorstCaseOptions {
            solver: SolverOptions::default(),
            representative_cap: DEFAULT_REPRESENTATIVE_CAP,
            extract_witness: true,
            tolerances: Tolerances::default(),
        }
    }
}

/// The three solves for one program variant (one designated player for MAX).
#[derive(Debug, Clone, PartialEq)]
pub struct DesignatedRun<S> {
    pub designated: Option<usize>,
    pub primal_lp: LinearProgram<S>,
    pub dual_lp: LinearProgram<S>,
    pub primal: SolveReport<S>,
    pub dual: SolveReport<S>,
    /// Solve of the mechanical dual of `primal_lp`.
    pub mechanical: SolveReport<S>,
    pub dual_solution: Option<DualSolution<S>>,
    pub solution: Option<SmallSolution<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase<S> {
    pub status: Status,
    /// `None` when the primal is unbounded.
    pub gamma_star: Option<S>,
    /// Index into `runs` of the variant that determines `gamma_star`.
    pub selected: usize,
    pub runs: Vec<DesignatedRun<S>>,
    pub representative: RepresentativeModel<S>,
    pub witness: Option<GeneralizedGame<S>>,
}

impl<S: Scalar> WorstCase<S> {
    pub fn best(&self) -> &DesignatedRun<S> {
        &self.runs[self.selected]
    }

    /// Largest |primal - dual| over the runs that reached an optimum.
    pub fn duality_gap(&self) -> S {
        self.runs
            .iter()
            .filter_map(|r| Some((r.primal.value.clone()? - r.dual.value.clone()?).abs()))
            .fold(S::zero(), S::max_of)
    }
}

fn agree<S: Scalar>(a: &S, b: &S, tol: &Tolerances) -> bool {
    a.approx_eq(b, tol.feasibility, tol.relative)
}

fn run_variant<S: Scalar>(
    cfg: &WorstCaseConfig<S>,
    rep: &RepresentativeModel<S>,
    designated: Option<usize>,
    opts: &WorstCaseOptions,
) -> Result<DesignatedRun<S>> {
    let cols = representative_columns(cfg, rep)?;
    let primal_lp = primal_program(cfg, &cols, designated)?;
    let dual_lp = dual_program(cfg, &cols, designated)?;
    let mechanical_lp = dualize(&primal_lp)?;
    let primal = solve_with(&primal_lp, &opts.solver)?;
    let dual = solve_with(&dual_lp, &opts.solver)?;
    let mechanical = solve_with(&mechanical_lp, &opts.solver)?;

    let who = designated.map_or(String::new(), |d| format!(" (designated player {})", d + 1));
    match primal.status {
        Status::Optimal => {
            let (p, d, m) = (primal.value.as_ref(), dual.value.as_ref(), mechanical.value.as_ref());
            let (Some(p), Some(d), Some(m)) = (p, d, m) else {
                return Err(Error::Invariant(format!(
                    "primal optimal but dual {:?} and mechanical dual {:?}{who}",
                    dual.status, mechanical.status
                )));
            };
            if !agree(p, d, &opts.tolerances) || !agree(p, m, &opts.tolerances) {
                return Err(Error::Invariant(format!(
                    "strong duality fails{who}: primal {p}, dual {d}, mechanical dual {m}"
                )));
            }
        }
        Status::Unbounded => {
            if dual.status != Status::Infeasible || mechanical.status != Status::Infeasible {
                return Err(Error::Invariant(format!(
                    "primal unbounded but dual {:?} and mechanical dual {:?}{who}",
                    dual.status, mechanical.status
                )));
            }
        }
        Status::Infeasible => {
            return Err(Error::Invariant(format!("primal program infeasible{who}")));
        }
    }
    let (dual_solution, solution) = if primal.is_optimal() {
        let resources = rep.resource_count();
        (
            Some(DualSolution::from_report(&dual_lp, &dual.primal, designated)),
            Some(SmallSolution::from_primal(&primal.primal, resources, cfg.basis.len(), designated)),
        )
    } else {
        (None, None)
    };
    Ok(DesignatedRun {
        designated,
        primal_lp,
        dual_lp,
        primal,
        dual,
        mechanical,
        dual_solution,
        solution,
    })
}

/// Solves the worst-case programs for `cfg`, checks duality and extracts the
/// worst-case game. MAX solves one variant per designated player and keeps
/// the largest optimum.
pub fn solve_worst_case<S: Scalar>(cfg: &WorstCaseConfig<S>, opts: &WorstCaseOptions) -> Result<WorstCase<S>> {
    cfg.validate()?;
    let rep = build_representative(cfg.weights.clone(), opts.representative_cap)?;
    let variants: Vec<Option<usize>> = match cfg.spec.kind {
        SocialKind::Sum => vec![None],
        SocialKind::Max => (0..cfg.n()).map(Some).collect(),
    };
    let runs = par_map(&variants, |d| run_variant(cfg, &rep, *d, opts))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let selected = match runs.iter().position(|r| r.primal.status == Status::Unbounded) {
        Some(idx) => idx,
        None => (0..runs.len())
            .reduce(|best, idx| {
                if runs[idx].primal.value > runs[best].primal.value {
                    idx
                } else {
                    best
                }
            })
            .expect("at least one variant"),
    };
    let best = &runs[selected];
    let status = best.primal.status;
    let gamma_star = best.primal.value.clone();
    if let Some(g) = &gamma_star {
        if *g < S::one() - S::tol(opts.tolerances.feasibility) {
            return Err(Error::Invariant(format!("optimum {g} is below 1")));
        }
    }
    let witness = match (&best.solution, opts.extract_witness) {
        (Some(sol), true) => Some(extract_worst_game(cfg, &rep, sol)?),
        _ => None,
    };
    Ok(WorstCase {
        status,
        gamma_star,
        selected,
        runs,
        representative: rep,
        witness,
    })
}

/// Checks a dual solution of the representative program against the dual
/// program of `(model, p, o)`. Returns the first violated row, if any.
pub fn verify_extension<S: Scalar>(
    dual: &DualSolution<S>,
    cfg: &WorstCaseConfig<S>,
    model: &CongestionModel<S>,
    p: &ProfileDistribution<S>,
    o: &StrategyProfile,
    tolerance: f64,
) -> Result<Option<(String, S)>> {
    let lp = build_dp_cce(cfg, model, p, o, dual.designated)?;
    let x = dual.assignment(&lp)?;
    Ok(lp.first_violation(&x, &S::tol(tolerance)))
}
