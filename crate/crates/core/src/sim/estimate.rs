use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{realize_topology, trial_rng, Point, SimConfig, TopologyRealization};
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::se::NetworkParams;
use crate::Result;

/// SIR recorded when no interferer is active anywhere in the window.
pub const SIR_CAP: f64 = 1e12;

/// `h_s r_s^{-α} / Σ_{active i ≠ s} h_i r_i^{-α}` at the origin.
///
/// `fading[i]` is the power gain of BS `i`; inactive BSs are ignored.
/// Returns `None` when the interference is zero.
pub fn sir_at_origin(bs: &[Point], active: &[bool], serving: usize, fading: &[f64], alpha: f64) -> Option<f64> {
    let half = 0.5 * alpha;
    let gain = |i: usize| fading[i] * bs[i].norm2().powf(-half);
    let mut interference = 0.0;
    for (i, _) in active.iter().enumerate().filter(|&(i, &on)| on && i != serving) {
        interference += gain(i);
    }
    (interference > 0.0).then(|| gain(serving) / interference)
}

/// Everything a single trial contributes to the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// `ln(1 + SIR)`.
    pub rate: f64,
    /// `rate / N`: time share under a uniform scheduler over the `N` users of
    /// the serving cell.
    pub scheduled_rate: f64,
    /// `1 / N`.
    pub selection_prob: f64,
    pub capped: bool,
    pub resamples: u32,
    /// BSs in the inner half-radius disc, serving BS excluded.
    pub inner_bs: u32,
    /// Active BSs among `inner_bs`.
    pub inner_active: u32,
    pub serving_distance: f64,
}

/// A trial with its topology and raw SIR, for dumps and debugging.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub topology: TopologyRealization,
    pub sir: f64,
    pub outcome: TrialOutcome,
}

/// Runs trial `trial` of the experiment `(params, cfg)`.
///
/// The outcome depends only on `(params, cfg.window_radius, cfg.seed, trial)`.
pub fn run_trial(params: &NetworkParams, cfg: &SimConfig, trial: u64) -> Result<TrialRecord> {
    let mut rng = trial_rng(cfg.seed, trial);
    let topology = realize_topology(params, cfg, &mut rng)?;
    let fading = draw_fading(&topology.active_mask, &mut rng);
    let sir = sir_at_origin(
        &topology.bs_points,
        &topology.active_mask,
        topology.serving_bs_index,
        &fading,
        params.alpha,
    );
    let capped = sir.is_none();
    let sir = sir.unwrap_or(SIR_CAP);
    let rate = sir.ln_1p();
    let n = f64::from(topology.serving_cell_users);

    // Activity is counted away from the window edge, where cells are not
    // clipped, and without the serving BS, which the typical user forces on.
    let inner_r2 = 0.25 * cfg.window_radius * cfg.window_radius;
    let (mut inner_bs, mut inner_active) = (0u32, 0u32);
    for (i, p) in topology.bs_points.iter().enumerate() {
        if i != topology.serving_bs_index && p.norm2() <= inner_r2 {
            inner_bs += 1;
            inner_active += u32::from(topology.active_mask[i]);
        }
    }

    let outcome = TrialOutcome {
        rate,
        scheduled_rate: rate / n,
        selection_prob: 1.0 / n,
        capped,
        resamples: topology.resamples,
        inner_bs,
        inner_active,
        serving_distance: topology.serving_distance(),
    };
    Ok(TrialRecord { topology, sir, outcome })
}

fn draw_fading<R: Rng + ?Sized>(active: &[bool], rng: &mut R) -> alloc::vec::Vec<f64> {
    active
        .iter()
        .map(|&on| if on { Exp1.sample(rng) } else { 0.0 })
        .collect()
}

/// Mean and standard error of a Monte Carlo SE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeEstimate {
    pub mean: f64,
    /// `None` with fewer than two trials.
    pub std_error: Option<f64>,
    pub trials_used: u64,
    /// Mean of `1/N` over trials; set for scheduler estimates.
    pub empirical_selection_prob: Option<f64>,
    pub capped_trials: u64,
    pub resamples: u64,
    /// Pooled fraction of active non-serving BSs in the inner disc.
    pub active_fraction: f64,
    /// Ratio-estimator standard error of `active_fraction`.
    pub active_fraction_std_error: Option<f64>,
    pub mean_serving_distance: f64,
}

/// Plain and scheduler estimates from the same trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub plain: SeEstimate,
    pub scheduled: SeEstimate,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std_error(&self) -> Option<f64> {
        (self.n >= 2).then(|| (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt())
    }
}

/// Order-dependent accumulator; push outcomes in trial order for
/// reproducible bits.
#[derive(Debug, Clone, Default)]
pub struct SeAccumulator {
    rate: Moments,
    scheduled: Moments,
    selection: Moments,
    distance: Moments,
    capped: u64,
    resamples: u64,
    // per-trial (active, total) for the ratio estimator
    active_sum: u64,
    bs_sum: u64,
    activity: alloc::vec::Vec<(u32, u32)>,
}

impl SeAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, o: &TrialOutcome) {
        self.rate.push(o.rate);
        self.scheduled.push(o.scheduled_rate);
        self.selection.push(o.selection_prob);
        self.distance.push(o.serving_distance);
        self.capped += u64::from(o.capped);
        self.resamples += u64::from(o.resamples);
        self.active_sum += u64::from(o.inner_active);
        self.bs_sum += u64::from(o.inner_bs);
        self.activity.push((o.inner_active, o.inner_bs));
    }

    pub fn finish(&self) -> SimReport {
        let fraction = if self.bs_sum > 0 {
            self.active_sum as f64 / self.bs_sum as f64
        } else {
            0.0
        };
        let fraction_se = (self.activity.len() >= 2 && self.bs_sum > 0).then(|| {
            let k = self.activity.len() as f64;
            let mean_total = self.bs_sum as f64 / k;
            let ss: f64 = self
                .activity
                .iter()
                .map(|&(a, n)| {
                    let r = f64::from(a) - fraction * f64::from(n);
                    r * r
                })
                .sum();
            (ss / (k - 1.0) / k).sqrt() / mean_total
        });
        let base = SeEstimate {
            mean: self.rate.mean,
            std_error: self.rate.std_error(),
            trials_used: self.rate.n,
            empirical_selection_prob: None,
            capped_trials: self.capped,
            resamples: self.resamples,
            active_fraction: fraction,
            active_fraction_std_error: fraction_se,
            mean_serving_distance: self.distance.mean,
        };
        SimReport {
            plain: base,
            scheduled: SeEstimate {
                mean: self.scheduled.mean,
                std_error: self.scheduled.std_error(),
                empirical_selection_prob: Some(self.selection.mean),
                ..base
            },
        }
    }
}

/// Runs `cfg.trials` trials sequentially.
pub fn simulate(params: &NetworkParams, cfg: &SimConfig) -> Result<SimReport> {
    params.validate()?;
    cfg.check_window(params.lambda_b)?;
    let mut acc = SeAccumulator::new();
    for t in 0..cfg.trials {
        acc.push(&run_trial(params, cfg, t)?.outcome);
    }
    Ok(acc.finish())
}

/// Monte Carlo `E[ln(1 + SIR)]` at the typical user.
pub fn estimate_se(params: &NetworkParams, cfg: &SimConfig) -> Result<SeEstimate> {
    Ok(simulate(params, cfg)?.plain)
}

/// Monte Carlo SE under a uniformly random per-cell scheduler.
pub fn estimate_se_with_scheduler(params: &NetworkParams, cfg: &SimConfig) -> Result<SeEstimate> {
    Ok(simulate(params, cfg)?.scheduled)
}
