use rayon::prelude::*;
use udn_core::econ::{
    closed_form_plan, numeric_optimize_plan, AnalyticSe, CostParams, DeploymentPlan, Market, Objective, OptConfig,
    PlanWarning,
};
use udn_core::se::{QuadratureConfig, Regime};

use crate::config::{Settings, SweepVar};
use crate::error::{CliError, Result};
use crate::output::{sci, Table};

pub const HEADER: [&str; 19] = [
    "lambda_u",
    "b",
    "alpha",
    "c_b",
    "c_w",
    "regime",
    "cf_lambda_b",
    "cf_w",
    "cf_price",
    "cf_profit",
    "cf_cost_ratio",
    "oracle_objective",
    "num_lambda_b",
    "num_w",
    "num_price",
    "num_profit",
    "num_cost_ratio",
    "warnings",
    "profit_rel_gap",
];

/// Grid resolution used for the exact-SE oracle, where every probe costs
/// a quadrature.
const GENERAL_GRID_POINTS: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    Sparse,
    UltraDense,
    General,
}

impl PlanKind {
    pub const ALL: [PlanKind; 3] = [PlanKind::Sparse, PlanKind::UltraDense, PlanKind::General];

    pub fn name(self) -> &'static str {
        match self {
            PlanKind::Sparse => "sparse",
            PlanKind::UltraDense => "ultra_dense",
            PlanKind::General => "general",
        }
    }

    /// The full (non-linearised) objective the oracle maximises.
    fn oracle(self) -> Objective {
        match self {
            PlanKind::Sparse => Objective::P3,
            PlanKind::UltraDense => Objective::P4,
            PlanKind::General => Objective::P2Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanPair {
    pub kind: PlanKind,
    pub closed_form: Option<DeploymentPlan>,
    pub numeric: DeploymentPlan,
}

pub fn solve(kind: PlanKind, market: &Market, s: &Settings) -> udn_core::Result<PlanPair> {
    let engine = AnalyticSe { cfg: s.quadrature };
    let mut cfg = OptConfig::for_market(market);
    cfg.grid_points = s.grid_points;
    cfg.starts = s.starts;
    let closed_form = match kind {
        PlanKind::Sparse => Some(Regime::Sparse),
        PlanKind::UltraDense => Some(Regime::UltraDense),
        PlanKind::General => None,
    }
    .map(|r| closed_form_plan(r, market.lambda_u, market.alpha, &market.demand, &market.costs, &engine))
    .transpose()?;
    let numeric = if kind == PlanKind::General {
        cfg.grid_points = cfg.grid_points.min(GENERAL_GRID_POINTS);
        let relaxed = AnalyticSe {
            cfg: QuadratureConfig {
                abs_tol: s.quadrature.abs_tol.max(QuadratureConfig::relaxed().abs_tol),
                rel_tol: s.quadrature.rel_tol.max(QuadratureConfig::relaxed().rel_tol),
                ..s.quadrature
            },
        };
        numeric_optimize_plan(kind.oracle(), market, &relaxed, &cfg)?
    } else {
        numeric_optimize_plan(kind.oracle(), market, &engine, &cfg)?
    };
    Ok(PlanPair {
        kind,
        closed_form,
        numeric,
    })
}

fn warning_names<'a>(source: &'a str, w: &'a [PlanWarning]) -> impl Iterator<Item = String> + 'a {
    w.iter().map(move |w| {
        let name = match w {
            PlanWarning::RegimeInconsistent { .. } => "regime_inconsistent",
            PlanWarning::GridBoundary => "grid_boundary",
            PlanWarning::MultistartDisagreement => "multistart_disagreement",
            PlanWarning::NotConverged => "not_converged",
        };
        format!("{source}:{name}")
    })
}

/// Sweep points as `(λ_u, b)`.
pub fn points(s: &Settings) -> Vec<(f64, f64)> {
    s.sweep
        .values
        .iter()
        .map(|&v| match s.sweep.variable {
            SweepVar::B => (s.lambda_u, v),
            _ => (v, s.b),
        })
        .collect()
}

/// One row per sweep point and plan kind. Closed-form columns are `NA` for
/// the general regime; the gap is `(num - cf)/max(|num|, |cf|)` in profit.
pub fn table(s: &Settings) -> Result<Table> {
    let costs = CostParams::new(s.c_b, s.c_w).map_err(|e| CliError::engine("costs", e))?;
    let jobs: Vec<(f64, f64, PlanKind)> = points(s)
        .into_iter()
        .flat_map(|(lu, b)| PlanKind::ALL.into_iter().map(move |k| (lu, b, k)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(lu, b, kind)| {
            let ctx = || format!("optimize ({}) at lambda_u={lu}, b={b}, alpha={}", kind.name(), s.alpha);
            let market = Market::new(lu, s.alpha, b, costs).map_err(|e| CliError::engine(ctx(), e))?;
            let pair = solve(kind, &market, s).map_err(|e| CliError::engine(ctx(), e))?;
            Ok(row(&market, &pair))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: HEADER.to_vec(),
        rows,
    })
}

fn row(m: &Market, pair: &PlanPair) -> Vec<String> {
    let na = || "NA".to_owned();
    let plan_cols = |p: &DeploymentPlan| {
        vec![
            sci(p.lambda_b_star),
            sci(p.w_star),
            sci(p.p_star),
            sci(p.profit),
            sci(p.cost_ratio(&m.costs)),
        ]
    };
    let mut r = vec![
        sci(m.lambda_u),
        sci(m.demand.b),
        sci(m.alpha),
        sci(m.costs.c_b),
        sci(m.costs.c_w),
        pair.kind.name().to_owned(),
    ];
    match &pair.closed_form {
        Some(p) => r.extend(plan_cols(p)),
        None => r.extend((0..5).map(|_| na())),
    }
    r.push(pair.numeric.objective.name().to_owned());
    r.extend(plan_cols(&pair.numeric));
    let mut warnings: Vec<String> = Vec::new();
    if let Some(p) = &pair.closed_form {
        warnings.extend(warning_names("cf", &p.warnings));
    }
    warnings.extend(warning_names("num", &pair.numeric.warnings));
    r.push(if warnings.is_empty() {
        "none".into()
    } else {
        warnings.join(";")
    });
    r.push(match &pair.closed_form {
        Some(p) => sci((pair.numeric.profit - p.profit) / pair.numeric.profit.abs().max(p.profit.abs())),
        None => na(),
    });
    r
}

/// Fixed-width summary for the terminal.
pub fn summary(t: &Table) -> String {
    let cols = [
        "lambda_u",
        "b",
        "regime",
        "cf_lambda_b",
        "cf_w",
        "num_lambda_b",
        "num_w",
        "profit_rel_gap",
    ];
    let idx: Vec<usize> = cols.iter().filter_map(|c| t.column(c)).collect();
    let short = |v: &str| match v.parse::<f64>() {
        Ok(x) => format!("{x:.4e}"),
        Err(_) => v.to_owned(),
    };
    let mut out = cols.iter().map(|c| format!("{c:>13}")).collect::<Vec<_>>().join(" ");
    out.push('\n');
    for r in &t.rows {
        let line: Vec<String> = idx.iter().map(|&i| format!("{:>13}", short(&r[i]))).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
