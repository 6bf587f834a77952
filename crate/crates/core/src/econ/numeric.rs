use alloc::vec::Vec;

use super::objective::{model_se, time_share};
use super::plan::{DeploymentPlan, PlanWarning, SeEngine, Solver};
use super::{Market, Objective};
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::se::NetworkParams;
use crate::{Error, Result};

/// Search box and effort for [`numeric_optimize_plan`]. Bounds are on
/// `λ_b` and `W`; the search runs in log coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptConfig {
    pub lambda_b_bounds: (f64, f64),
    pub w_bounds: (f64, f64),
    /// Grid points per axis, log-spaced.
    pub grid_points: usize,
    /// Number of best grid cells refined by the simplex search.
    pub starts: usize,
    pub simplex: NelderMeadOptions,
    /// Two optima closer than this in log coordinates count as one.
    pub agreement_tol: f64,
}

impl OptConfig {
    /// Eight decades either side of `λ_u` for `λ_b` and of 1 for `W`.
    pub fn for_market(market: &Market) -> Self {
        Self {
            lambda_b_bounds: (market.lambda_u * 1e-8, market.lambda_u * 1e8),
            w_bounds: (1e-8, 1e8),
            grid_points: 81,
            starts: 4,
            simplex: NelderMeadOptions {
                step: 0.2,
                x_tol: 1e-10,
                f_tol: 1e-14,
                max_iter: 20_000,
            },
            agreement_tol: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo > 0.0 && hi > lo && hi.is_finite();
        if !ok(self.lambda_b_bounds) || !ok(self.w_bounds) {
            return Err(Error::Domain("bounds must satisfy 0 < lo < hi < inf"));
        }
        if self.grid_points < 2 || self.starts == 0 {
            return Err(Error::Domain("need at least two grid points and one start"));
        }
        if !(self.agreement_tol > 0.0) {
            return Err(Error::Domain("agreement tolerance must be positive"));
        }
        Ok(())
    }
}

struct Profit<'a, E: ?Sized> {
    objective: Objective,
    market: &'a Market,
    engine: &'a E,
    gamma_alpha: f64,
    rho0: f64,
}

impl<E: SeEngine + ?Sized> Profit<'_, E> {
    fn se(&self, lambda_b: f64) -> Result<f64> {
        match self.objective {
            Objective::P2Exact => {
                let lu = self.market.lambda_u;
                let link = self
                    .engine
                    .se_exact(&NetworkParams::new(lambda_b, lu, self.market.alpha)?)?;
                Ok(time_share(lu, lambda_b)? * link)
            }
            o => Ok(model_se(o, self.market, lambda_b, self.gamma_alpha, self.rho0)),
        }
    }

    fn at(&self, lambda_b: f64, w: f64, se: f64) -> f64 {
        self.objective.evaluate(self.market, lambda_b, w, se, self.rho0)
    }
}

struct Candidate {
    x: [f64; 2],
    profit: f64,
    converged: bool,
}

/// Maximises `objective` over `(λ_b, W)` without derivatives: a log-grid
/// scan picks the `starts` best cells, each is refined by Nelder–Mead in log
/// coordinates, and the best refined point wins. Ties in profit go to the
/// cheaper deployment, then to the earlier start.
///
/// `P2Exact` evaluates the exact SE by quadrature at every probe.
pub fn numeric_optimize_plan<E: SeEngine + ?Sized>(
    objective: Objective,
    market: &Market,
    engine: &E,
    cfg: &OptConfig,
) -> Result<DeploymentPlan> {
    market.validate()?;
    cfg.validate()?;
    let alpha = market.alpha;
    let gamma_alpha = match objective {
        Objective::P3 | Objective::P3Taylor => engine.gamma_alpha(alpha)?,
        _ => f64::NAN,
    };
    let model = Profit {
        objective,
        market,
        engine,
        gamma_alpha,
        rho0: engine.rho_zero(alpha)?,
    };

    let lo = [cfg.lambda_b_bounds.0.ln(), cfg.w_bounds.0.ln()];
    let hi = [cfg.lambda_b_bounds.1.ln(), cfg.w_bounds.1.ln()];
    let n = cfg.grid_points;
    let node = |axis: usize, i: usize| lo[axis] + (hi[axis] - lo[axis]) * i as f64 / (n - 1) as f64;

    // SE depends on λ_b only, so one evaluation per row.
    let mut grid: Vec<(f64, [f64; 2])> = Vec::with_capacity(n * n);
    for i in 0..n {
        let lb = node(0, i).exp();
        let se = model.se(lb)?;
        for j in 0..n {
            let w = node(1, j).exp();
            grid.push((model.at(lb, w, se), [node(0, i), node(1, j)]));
        }
    }
    let mut order: Vec<usize> = (0..grid.len()).filter(|&k| grid[k].0.is_finite()).collect();
    order.sort_by(|&a, &b| grid[b].0.total_cmp(&grid[a].0).then(a.cmp(&b)));
    if order.is_empty() {
        return Err(Error::Numerical("profit is not finite anywhere on the grid"));
    }

    let inside = |x: &[f64]| (0..2).all(|a| x[a] >= lo[a] && x[a] <= hi[a]);
    let mut first_error = None;
    let mut neg_profit = |x: &[f64]| {
        if !inside(x) {
            return f64::NAN;
        }
        let (lb, w) = (x[0].exp(), x[1].exp());
        match model.se(lb) {
            Ok(se) => -model.at(lb, w, se),
            Err(e) => {
                first_error.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let mut opts = cfg.simplex;
    if objective == Objective::P2Exact {
        // probes carry quadrature error; do not chase it
        opts.x_tol = opts.x_tol.max(1e-8);
        opts.f_tol = opts.f_tol.max(1e-9);
    }
    opts.step = opts.step.max((hi[0] - lo[0]) / (n - 1) as f64);
    let mut candidates: Vec<Candidate> = Vec::with_capacity(cfg.starts);
    for &k in order.iter().take(cfg.starts) {
        let m = nelder_mead(&mut neg_profit, &grid[k].1, &opts);
        candidates.push(Candidate {
            x: [m.x[0], m.x[1]],
            profit: -m.f,
            converged: m.converged,
        });
    }
    if let Some(e) = first_error {
        return Err(e);
    }

    let cost = |c: &Candidate| market.costs.total(c.x[0].exp(), c.x[1].exp());
    let scale = candidates
        .iter()
        .map(|c| c.profit.abs())
        .fold(market.revenue_cap(), f64::max);
    let tie = 1e-12 * scale;
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        let b = &candidates[best];
        if c.profit > b.profit + tie || ((c.profit - b.profit).abs() <= tie && cost(c) < cost(b)) {
            best = i;
        }
    }
    let winner = &candidates[best];
    let disagree = candidates.iter().any(|c| {
        (c.profit - winner.profit).abs() <= 1e-9 * scale
            && (0..2).any(|a| (c.x[a] - winner.x[a]).abs() > cfg.agreement_tol)
    });

    let (lb, w) = (winner.x[0].exp(), winner.x[1].exp());
    let gamma = model.se(lb)?;
    let mut plan = DeploymentPlan::assemble(market, lb, w, gamma, winner.profit, objective, Solver::NumericOracle)?;
    let edge = 1e-6 * (hi[0] - lo[0]);
    if (0..2).any(|a| winner.x[a] - lo[a] < edge || hi[a] - winner.x[a] < edge) {
        plan.warnings.push(PlanWarning::GridBoundary);
    }
    if disagree {
        plan.warnings.push(PlanWarning::MultistartDisagreement);
    }
    if !winner.converged {
        plan.warnings.push(PlanWarning::NotConverged);
    }
    Ok(plan)
}
