use rayon::prelude::*;
use udn_core::se::{p_active, se_exact, NetworkParams};
use udn_core::sim::{run_trial, SeAccumulator, SimConfig, SimReport, TrialOutcome};

use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::output::{sci, sci_opt, Table};

pub const HEADER: [&str; 19] = [
    "lambda_b",
    "lambda_u",
    "alpha",
    "trials",
    "seed",
    "expected_bs",
    "window_radius",
    "mc_mean",
    "mc_stderr",
    "se_exact",
    "z_score",
    "capped_trials",
    "resamples",
    "active_fraction",
    "active_fraction_stderr",
    "p_active",
    "sched_mean",
    "sched_stderr",
    "sched_selection_prob",
];

/// Runs the trials on the current rayon pool. Outcomes are folded in trial
/// order, so the report does not depend on the thread count.
pub fn simulate(params: &NetworkParams, cfg: &SimConfig) -> udn_core::Result<SimReport> {
    params.validate()?;
    cfg.check_window(params.lambda_b)?;
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(params, cfg, t).map(|r| r.outcome))
        .collect::<udn_core::Result<Vec<TrialOutcome>>>()?;
    let mut acc = SeAccumulator::new();
    for o in &outcomes {
        acc.push(o);
    }
    Ok(acc.finish())
}

pub fn sim_config(s: &Settings, lambda_b: f64) -> SimConfig {
    SimConfig::with_expected_bs(lambda_b, s.expected_bs, s.trials, s.seed)
}

/// One row per swept `λ_b`. Every window is checked before any trial runs.
pub fn table(s: &Settings) -> Result<Table> {
    let ctx = |lb: f64| {
        format!(
            "montecarlo at lambda_b={lb}, lambda_u={}, alpha={}",
            s.lambda_u, s.alpha
        )
    };
    let mut points = Vec::with_capacity(s.sweep.values.len());
    for &lb in &s.sweep.values {
        let params = NetworkParams::new(lb, s.lambda_u, s.alpha).map_err(|e| CliError::engine(ctx(lb), e))?;
        let cfg = sim_config(s, lb);
        cfg.check_window(lb).map_err(|e| CliError::engine(ctx(lb), e))?;
        points.push((params, cfg));
    }
    let mut t = Table::new(HEADER.to_vec());
    for (params, cfg) in &points {
        let wrap = |e| CliError::engine(ctx(params.lambda_b), e);
        let report = simulate(params, cfg).map_err(wrap)?;
        let exact = se_exact(params, &s.quadrature).map_err(wrap)?.value;
        t.rows.push(row(params, cfg, &report, exact).map_err(wrap)?);
    }
    Ok(t)
}

fn row(params: &NetworkParams, cfg: &SimConfig, r: &SimReport, exact: f64) -> udn_core::Result<Vec<String>> {
    let p = &r.plain;
    let z = p.std_error.filter(|&e| e > 0.0).map(|e| (p.mean - exact) / e);
    Ok(vec![
        sci(params.lambda_b),
        sci(params.lambda_u),
        sci(params.alpha),
        cfg.trials.to_string(),
        cfg.seed.to_string(),
        cfg.min_expected_bs.to_string(),
        sci(cfg.window_radius),
        sci(p.mean),
        sci_opt(p.std_error),
        sci(exact),
        sci_opt(z),
        p.capped_trials.to_string(),
        p.resamples.to_string(),
        sci(p.active_fraction),
        sci_opt(p.active_fraction_std_error),
        sci(p_active(params.lambda_u, params.lambda_b)?),
        sci(r.scheduled.mean),
        sci_opt(r.scheduled.std_error),
        sci_opt(r.scheduled.empirical_selection_prob),
    ])
}

/// Point sets of the first `count` trials at the first swept density: one
/// row per BS and per user, plus the typical user at the origin.
pub fn realizations(s: &Settings, count: u64) -> Result<Table> {
    let lb = s.sweep.values[0];
    let ctx = || format!("realization dump at lambda_b={lb}");
    let params = NetworkParams::new(lb, s.lambda_u, s.alpha).map_err(|e| CliError::engine(ctx(), e))?;
    let cfg = sim_config(s, lb);
    let mut t = Table::new(vec!["trial", "kind", "x", "y", "active", "serving"]);
    for trial in 0..count.min(s.trials) {
        let rec = run_trial(&params, &cfg, trial).map_err(|e| CliError::engine(ctx(), e))?;
        let topo = &rec.topology;
        t.rows.push(vec![
            trial.to_string(),
            "typical".into(),
            sci(0.0),
            sci(0.0),
            "NA".into(),
            "NA".into(),
        ]);
        for (i, p) in topo.bs_points.iter().enumerate() {
            t.rows.push(vec![
                trial.to_string(),
                "bs".into(),
                sci(p.x),
                sci(p.y),
                u8::from(topo.active_mask[i]).to_string(),
                u8::from(i == topo.serving_bs_index).to_string(),
            ]);
        }
        for p in &topo.user_points {
            t.rows.push(vec![
                trial.to_string(),
                "user".into(),
                sci(p.x),
                sci(p.y),
                "NA".into(),
                "NA".into(),
            ]);
        }
    }
    Ok(t)
}
