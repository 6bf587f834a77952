//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udn_cli::commands::{figures, montecarlo};
use udn_cli::config::{CommandKind, Overrides, Settings};
use udn_cli::output::Table;
use udn_cli::FigureId;
use udn_core::econ::{
    avg_demand, closed_form_plan, cost_ratio, numeric_optimize_plan, optimal_price, AnalyticSe, CostParams,
    DemandModel, Market, Objective, OptConfig, PlanWarning,
};
use udn_core::quad::QuadOptions;
use udn_core::se::{
    p_active, rho_zero_analytic, rho_zero_quadrature, se_exact, se_lower_bound_appendix, se_sparse_gamma_alpha,
    se_udn_closed_form, NetworkParams, QuadratureConfig, Regime,
};
use udn_core::sim::{SimConfig, DEFAULT_EXPECTED_BS};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn net(lb: f64, lu: f64, alpha: f64) -> NetworkParams {
    NetworkParams::new(lb, lu, alpha).unwrap()
}

fn exact(p: &NetworkParams) -> f64 {
    se_exact(p, &QuadratureConfig::default()).unwrap().value
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn rho_zero_identity() -> Outcome {
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_subdivisions: 5000,
    };
    let worst = [2.5, 3.0, 4.0, 6.0, 10.0]
        .iter()
        .map(|&a| (rho_zero_quadrature(a, &opts).unwrap() - rho_zero_analytic(a).unwrap()).abs())
        .fold(0.0, f64::max);
    outcome(
        worst < 1e-9,
        format!("max |quadrature - closed form| = {worst:.2e} (limit 1e-9)"),
    )
}

const FIG1_DENSITIES: [f64; 3] = [0.1, 0.2, 1.0];

fn fig1_ratios() -> Outcome {
    let targets = [0.8175, 0.909, 0.9796];
    let mut pass = true;
    let mut parts = Vec::new();
    for (lb, want) in FIG1_DENSITIES.iter().zip(targets) {
        let p = net(*lb, 0.02, 4.0);
        let r = se_udn_closed_form(&p).unwrap().value / exact(&p);
        let ok = (r - want).abs() <= 0.01;
        pass &= ok;
        parts.push(format!(
            "λb={lb}: {:.2}% vs {:.2}%{}",
            100.0 * r,
            100.0 * want,
            if ok { "" } else { " (off)" }
        ));
    }
    outcome(pass, parts.join(", "))
}

fn densification_gains() -> Outcome {
    let gamma4 = se_sparse_gamma_alpha(4.0, &QuadratureConfig::default()).unwrap().value;
    let targets = [1.62, 2.50, 4.64];
    let mut pass = true;
    let mut parts = Vec::new();
    for (lb, want) in FIG1_DENSITIES.iter().zip(targets) {
        let g = se_udn_closed_form(&net(*lb, 0.02, 4.0)).unwrap().value / gamma4;
        let ok = ((g - want) / want).abs() <= 0.05;
        pass &= ok;
        parts.push(format!("λb={lb}: {:.1}% vs {:.0}%", 100.0 * g, 100.0 * want));
    }
    outcome(pass, parts.join(", "))
}

fn monte_carlo_agreement() -> Outcome {
    let p = net(0.2, 0.02, 4.0);
    let cfg = SimConfig::with_expected_bs(0.2, DEFAULT_EXPECTED_BS, 20_000, 1);
    let r = montecarlo::simulate(&p, &cfg).unwrap().plain;
    let se = exact(&p);
    let sd = r.std_error.unwrap();
    let z = (r.mean - se) / sd;
    let pa = p_active(0.02, 0.2).unwrap();
    let fsd = r.active_fraction_std_error.unwrap();
    let zf = (r.active_fraction - pa) / fsd;
    outcome(
        z.abs() <= 3.0 && zf.abs() <= 3.0,
        format!(
            "mc {:.4} ± {:.4} vs exact {se:.4} (z = {z:+.2}); active fraction {:.4} ± {:.4} vs p_a {pa:.4} (z = {zf:+.2})",
            r.mean, sd, r.active_fraction, fsd
        ),
    )
}

fn sparse_flatness() -> Outcome {
    let gamma = se_sparse_gamma_alpha(4.0, &QuadratureConfig::default()).unwrap().value;
    let estimates: Vec<(f64, f64, f64)> = [0.001, 0.002, 0.005]
        .iter()
        .map(|&lb| {
            let cfg = SimConfig::with_expected_bs(lb, DEFAULT_EXPECTED_BS, 10_000, 2);
            let r = montecarlo::simulate(&net(lb, 0.1, 4.0), &cfg).unwrap().plain;
            (lb, r.mean, r.std_error.unwrap())
        })
        .collect();
    let mut pass = true;
    for (i, a) in estimates.iter().enumerate() {
        pass &= (a.1 - gamma).abs() <= 3.0 * a.2;
        for b in &estimates[i + 1..] {
            pass &= (a.1 - b.1).abs() <= 3.0 * (a.2 + b.2);
        }
    }
    let parts: Vec<String> = estimates
        .iter()
        .map(|(lb, m, s)| format!("λb={lb}: {m:.4} ± {s:.4}"))
        .collect();
    outcome(pass, format!("{} vs γ4 = {gamma:.4}", parts.join(", ")))
}

fn lower_bound_ordering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut dense = 0;
    let mut worst_gap: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..100 {
        let ratio = log_uniform(&mut rng, 1.0, 1e3);
        let alpha = rng.random_range(2.5..6.0);
        let lu = log_uniform(&mut rng, 1e-3, 1.0);
        let p = net(ratio * lu, lu, alpha);
        let ex = exact(&p);
        let lb = se_lower_bound_appendix(&p).unwrap().value;
        min_margin = min_margin.min(ex - lb);
        if ex < lb - 1e-8 {
            violations += 1;
        }
        if ratio >= 100.0 {
            dense += 1;
            let cf = se_udn_closed_form(&p).unwrap().value;
            worst_gap = worst_gap.max((lb - cf).abs() / cf);
        }
    }
    outcome(
        violations == 0 && worst_gap <= 0.05,
        format!(
            "ordering violations {violations}/100 (min exact - bound = {min_margin:.3e}); \
             worst |bound - closed form|/closed form at λb/λu ≥ 100 = {:.1}% over {dense} draws (limit 5%)",
            100.0 * worst_gap
        ),
    )
}

fn closed_form_vs_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let engine = AnalyticSe::default();
    let mut worst = [0.0f64; 2];
    let mut accepted = [0usize; 2];
    let mut drawn = 0;
    while accepted.iter().any(|&n| n < 50) && drawn < 5000 {
        drawn += 1;
        let b = log_uniform(&mut rng, 1.0, 100.0);
        let lu = log_uniform(&mut rng, 1e-3, 10.0);
        let costs = CostParams::new(log_uniform(&mut rng, 0.01, 1.0), log_uniform(&mut rng, 0.01, 1.0)).unwrap();
        let alpha = rng.random_range(2.5..6.0);
        let market = Market::new(lu, alpha, b, costs).unwrap();
        for (k, (regime, objective)) in [
            (Regime::Sparse, Objective::P3Taylor),
            (Regime::UltraDense, Objective::P4Taylor),
        ]
        .into_iter()
        .enumerate()
        {
            if accepted[k] >= 50 {
                continue;
            }
            let cf = closed_form_plan(regime, lu, alpha, &market.demand, &costs, &engine).unwrap();
            if cf
                .warnings
                .iter()
                .any(|w| matches!(w, PlanWarning::RegimeInconsistent { .. }))
            {
                continue;
            }
            accepted[k] += 1;
            let num = numeric_optimize_plan(objective, &market, &engine, &OptConfig::for_market(&market)).unwrap();
            let gap = ((num.lambda_b_star - cf.lambda_b_star) / cf.lambda_b_star)
                .abs()
                .max(((num.w_star - cf.w_star) / cf.w_star).abs());
            worst[k] = worst[k].max(gap);
        }
    }
    outcome(
        accepted == [50, 50] && worst[0] <= 0.005 && worst[1] <= 0.01,
        format!(
            "sparse worst {:.2e} over {} (limit 0.5%), ultra-dense worst {:.2e} over {} (limit 1%); {drawn} draws",
            worst[0], accepted[0], worst[1], accepted[1]
        ),
    )
}

fn cost_ratios() -> Outcome {
    let engine = AnalyticSe::default();
    let mut sparse_dev: f64 = 0.0;
    for (cb, cw, b, lu) in [(0.1, 0.1, 10.0, 1.0), (0.03, 0.7, 4.0, 0.2), (2.0, 0.05, 50.0, 9.0)] {
        let costs = CostParams::new(cb, cw).unwrap();
        let plan = closed_form_plan(Regime::Sparse, lu, 4.0, &DemandModel::new(b).unwrap(), &costs, &engine).unwrap();
        sparse_dev = sparse_dev.max((plan.cost_ratio(&costs) - 1.0).abs());
        sparse_dev = sparse_dev.max((cost_ratio(Regime::Sparse, 4.0).unwrap() - 1.0).abs());
    }
    let r4 = cost_ratio(Regime::UltraDense, 4.0).unwrap();
    let band: Vec<f64> = (1..=36)
        .map(|k| cost_ratio(Regime::UltraDense, 2.0 + 0.5 * k as f64).unwrap())
        .collect();
    let (lo, hi) = band
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    outcome(
        sparse_dev <= 1e-12 && (r4 - 0.630).abs() <= 1e-3 && lo >= 0.43 && hi <= 0.71,
        format!("sparse |ratio - 1| = {sparse_dev:.1e}; ultra-dense α=4: {r4:.4}; α ∈ [2.5, 20]: [{lo:.4}, {hi:.4}]"),
    )
}

fn pricing_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let b = log_uniform(&mut rng, 0.1, 100.0);
        let wg = log_uniform(&mut rng, 1e-3, 1e4);
        let q = optimal_price(b, wg, 1.0).unwrap();
        worst = worst.max(((avg_demand(b, q.exact).unwrap() - wg) / wg).abs());
    }
    let gaps: Vec<f64> = (0..400)
        .map(|k| 5.0 * 1.02f64.powi(k))
        .map(|wg| optimal_price(10.0, wg, 1.0).unwrap().relative_gap())
        .collect();
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        worst <= 1e-10 && max_gap <= 0.01 && monotone,
        format!(
            "worst demand mismatch {worst:.1e}; price gap at Wγ ≥ 5 at most {:.3}%, decreasing: {monotone}",
            100.0 * max_gap
        ),
    )
}

fn column(t: &Table, regime: &str, x: &str, y: &str) -> Vec<(f64, f64)> {
    let (r, xi, yi) = (t.column("regime").unwrap(), t.column(x).unwrap(), t.column(y).unwrap());
    t.rows
        .iter()
        .filter(|row| row[r] == regime)
        .map(|row| (row[xi].parse().unwrap(), row[yi].parse().unwrap()))
        .collect()
}

fn log_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Profit increase per unit of the swept variable over the top fifth of
/// the sweep.
fn end_growth(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() - 1 - pts.len() / 5;
    let (a, b) = (pts[k], pts[pts.len() - 1]);
    (b.1 - a.1) / (b.0 - a.0)
}

fn figure_orderings() -> Outcome {
    let base = Settings::from_overrides(CommandKind::Figures, &Overrides::default()).unwrap();
    let fig3 = figures::tables(FigureId::Fig3, &base).unwrap();
    let fig4 = figures::tables(FigureId::Fig4, &base).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for regime in ["sparse", "ultra_dense"] {
        let mut s = [[0.0; 2]; 2];
        for (i, (_, t)) in fig3.iter().enumerate() {
            let x = if i == 0 { "lambda_u" } else { "b" };
            s[0][i] = log_slope(&column(t, regime, x, "cf_lambda_b"));
            s[1][i] = log_slope(&column(t, regime, x, "cf_w"));
        }
        let ok = s.iter().all(|q| q[0] > 0.0 && q[1] > 0.0 && q[0] > q[1]);
        pass &= ok;
        parts.push(format!(
            "{regime} elasticities λb*: {:.3}/{:.3}, W*: {:.3}/{:.3} (λu/b)",
            s[0][0], s[0][1], s[1][0], s[1][1]
        ));
    }
    let growth = |t: &Table, x: &str, regime: &str| end_growth(&column(t, regime, x, "cf_profit"));
    let (lu_s, lu_u) = (
        growth(&fig4[0].1, "lambda_u", "sparse"),
        growth(&fig4[0].1, "lambda_u", "ultra_dense"),
    );
    let (b_s, b_u) = (
        growth(&fig4[1].1, "b", "sparse"),
        growth(&fig4[1].1, "b", "ultra_dense"),
    );
    let lu_ok = lu_u < lu_s;
    let b_ok = b_u > b_s;
    pass &= lu_ok && b_ok;
    parts.push(format!(
        "profit growth vs λu sparse {lu_s:.4} ultra-dense {lu_u:.4} ({}); vs b sparse {b_s:.4} ultra-dense {b_u:.4} ({})",
        if lu_ok { "ultra-dense slower, ok" } else { "ultra-dense not slower" },
        if b_ok { "ultra-dense faster, ok" } else { "ultra-dense not faster" },
    ));
    outcome(pass, parts.join("; "))
}

fn thread_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("udn-acceptance-{}", std::process::id()));
    let run = |threads: &str| {
        let out = dir.join(format!("t{threads}"));
        let run = Command::new(env!("CARGO_BIN_EXE_udn"))
            .args([
                "montecarlo",
                "--trials",
                "4000",
                "--seed",
                "11",
                "--threads",
                threads,
                "--out",
            ])
            .arg(&out)
            .output()
            .expect("spawn udn");
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        std::fs::read(out.join("montecarlo.csv")).unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        one == four,
        format!(
            "{} bytes with 1 thread, {} with 4, identical: {}",
            one.len(),
            four.len(),
            one == four
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("rho_0 identity", rho_zero_identity, Duration::from_secs(1)),
        ("figure 1 closed-form/exact ratios", fig1_ratios, Duration::from_secs(5)),
        ("densification gains", densification_gains, Duration::from_secs(5)),
        (
            "Monte Carlo vs quadrature",
            monte_carlo_agreement,
            Duration::from_secs(300),
        ),
        ("sparse flatness", sparse_flatness, Duration::from_secs(600)),
        (
            "lower-bound ordering and tightness",
            lower_bound_ordering,
            Duration::from_secs(60),
        ),
        (
            "closed-form plans vs numeric oracle",
            closed_form_vs_oracle,
            Duration::from_secs(60),
        ),
        ("cost ratios", cost_ratios, Duration::from_secs(60)),
        ("pricing identities", pricing_identities, Duration::from_secs(60)),
        ("figure 3/4 orderings", figure_orderings, Duration::from_secs(60)),
        ("thread-count determinism", thread_determinism, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let in_time = took <= *budget;
        let pass = o.pass && in_time;
        failed += usize::from(!pass);
        let timing = if in_time {
            format!("{:.2}s", took.as_secs_f64())
        } else {
            format!("{:.2}s, over the {}s budget", took.as_secs_f64(), budget.as_secs())
        };
        println!(
            "{} {:>2} {name}: {} [{timing}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
