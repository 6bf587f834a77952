//! Analytic average spectral efficiency (SE) of the downlink at a typical user.
//!
//! SE is `E[ln(1 + SIR)]` in nats/s/Hz for unit spectrum, interference
//! limited (no noise), Rayleigh fading, path-loss exponent `α > 2`, and BSs
//! switched off when their Voronoi cell holds no user.
//!
//! The sparse constant [`se_sparse_gamma_alpha`] integrates
//! `[1 + ρ_t (e^t - 1)^{2/α}]^{-1}`, i.e. the exact integral with every BS on.
//! An `(e^t - 1)^{α/2}` exponent would not reduce to the all-on exact
//! integral and does not reproduce the known densification gains.

use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::quad::{integrate, QuadOptions};
use crate::special::hyp2f1_11c;
use crate::{Error, Result};

/// Shape parameter of the gamma approximation to the Voronoi cell area.
const CELL_AREA_SHAPE: f64 = 3.5;

/// Agreement required between the quadrature and closed form of `ρ_0`.
pub const RHO_ZERO_CHECK_TOL: f64 = 1e-9;

/// BS density, user density and path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub lambda_b: f64,
    pub lambda_u: f64,
    pub alpha: f64,
}

impl NetworkParams {
    pub fn new(lambda_b: f64, lambda_u: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            lambda_b,
            lambda_u,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_b > 0.0 && self.lambda_b.is_finite()) {
            return Err(Error::Domain("BS density must be positive and finite"));
        }
        if !(self.lambda_u > 0.0 && self.lambda_u.is_finite()) {
            return Err(Error::Domain("user density must be positive and finite"));
        }
        check_alpha(self.alpha)
    }

    /// `λ_b / λ_u`.
    pub fn density_ratio(&self) -> f64 {
        self.lambda_b / self.lambda_u
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("path-loss exponent must exceed 2"))
    }
}

/// How an [`SeValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactQuadrature,
    SparseClosedForm,
    UltraDenseClosedForm,
    AppendixLowerBound,
    MonteCarlo,
}

/// Density regime a formula assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeAssumption {
    None,
    Sparse,
    UltraDense,
}

/// Regime selector for formulas that only exist asymptotically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Sparse,
    UltraDense,
}

/// A spectral efficiency tagged with how it was computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeValue {
    pub value: f64,
    pub method: Method,
    pub regime_assumption: RegimeAssumption,
    /// Quadrature error estimate, when the value came from quadrature.
    pub abs_error: Option<f64>,
    /// Set when the formula was evaluated outside its validity range.
    pub outside_validity: bool,
}

impl SeValue {
    fn closed(value: f64, method: Method, regime_assumption: RegimeAssumption) -> Self {
        Self {
            value,
            method,
            regime_assumption,
            abs_error: None,
            outside_validity: false,
        }
    }
}

/// Quadrature controls for the nested SE integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper limit `T` of the outer t-integral. `None` derives it from
    /// `tail_tol` using the integrand's exponential decay.
    pub outer_truncation: Option<f64>,
    /// Bound on the discarded outer tail when `outer_truncation` is `None`.
    pub tail_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            outer_truncation: None,
            tail_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    /// Looser tolerances for inner loops of optimizers and sweeps.
    pub fn relaxed() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            tail_tol: 1e-8,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.tail_tol > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive"));
        }
        if let Some(t) = self.outer_truncation {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Domain("outer truncation must be positive and finite"));
            }
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1"));
        }
        Ok(())
    }

    fn outer(&self) -> QuadOptions {
        QuadOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }

    // Inner error aliases into the outer integrand, so run it 10x tighter.
    fn inner(&self) -> QuadOptions {
        QuadOptions {
            abs_tol: self.abs_tol * 0.1,
            rel_tol: self.rel_tol * 0.1,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// `(2π/α) csc(2π/α)`, the closed form of `ρ_0`.
pub fn rho_zero_analytic(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let x = 2.0 * PI / alpha;
    Ok(x / x.sin())
}

/// `∫_0^∞ du / (1 + u^{α/2})` by quadrature.
pub fn rho_zero_quadrature(alpha: f64, opts: &QuadOptions) -> Result<f64> {
    check_alpha(alpha)?;
    let head = integrate(|u| 1.0 / (1.0 + u.powf(0.5 * alpha)), 0.0, 1.0, opts)?.value;
    Ok(head + tail_integral(1.0, alpha, opts)?)
}

/// `ρ_0 = ∫_0^∞ du / (1 + u^{α/2})`.
///
/// Evaluates both the defining integral and the closed form, fails with
/// [`Error::CrossCheck`] if they differ by more than [`RHO_ZERO_CHECK_TOL`],
/// and returns the closed form.
pub fn rho_zero(alpha: f64) -> Result<f64> {
    let analytic = rho_zero_analytic(alpha)?;
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    };
    let numeric = rho_zero_quadrature(alpha, &opts)?;
    if (numeric - analytic).abs() > RHO_ZERO_CHECK_TOL {
        return Err(Error::CrossCheck {
            what: "rho_0",
            left: numeric,
            right: analytic,
        });
    }
    Ok(analytic)
}

/// `∫_L^∞ du / (1 + u^β)` with `β = α/2`, via `u = L e^s`.
///
/// The transformed integrand is bounded by `L^{1-β} e^{-(β-1)s}`, which fixes
/// the truncation point for an `abs_tol` tail.
fn tail_integral(lower: f64, alpha: f64, opts: &QuadOptions) -> Result<f64> {
    let beta = 0.5 * alpha;
    let decay = beta - 1.0;
    let scale = lower.powf(1.0 - beta) / decay;
    let upper = ((scale / (0.1 * opts.abs_tol)).ln() / decay).max(1.0);
    let est = integrate(
        |s| {
            let u = lower * s.exp();
            u / (1.0 + u.powf(beta))
        },
        0.0,
        upper,
        opts,
    )?;
    Ok(est.value)
}

/// `ρ_t` with `ρ_0` already known; the shared kernel of the exact integral.
fn rho_t_with(t: f64, alpha: f64, rho0: f64, opts: &QuadOptions) -> Result<f64> {
    let lower = t.exp_m1().powf(-2.0 / alpha);
    if lower <= 1.0 {
        // ρ_0 minus the short head is better conditioned than the long tail.
        let head = integrate(|u| 1.0 / (1.0 + u.powf(0.5 * alpha)), 0.0, lower, opts)?.value;
        Ok(rho0 - head)
    } else {
        tail_integral(lower, alpha, opts)
    }
}

/// `ρ_t = ∫_{(e^t-1)^{-2/α}}^∞ du / (1 + u^{α/2})` for `t > 0`.
pub fn rho_t(t: f64, alpha: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain("rho_t requires t > 0"));
    }
    let rho0 = rho_zero_analytic(alpha)?;
    if t.is_infinite() {
        return Ok(rho0);
    }
    rho_t_with(t, alpha, rho0, &QuadratureConfig::default().inner())
}

/// Probability that a BS has at least one user in its cell,
/// `1 - (1 + (λ_u/λ_b)/3.5)^{-3.5}`.
pub fn p_active(lambda_u: f64, lambda_b: f64) -> Result<f64> {
    if !(lambda_u > 0.0 && lambda_b > 0.0) {
        return Err(Error::Domain("densities must be positive"));
    }
    let ratio = lambda_u / lambda_b;
    Ok(-(-CELL_AREA_SHAPE * (ratio / CELL_AREA_SHAPE).ln_1p()).exp_m1())
}

/// Exact SE with a given BS activity probability:
/// `∫_0^∞ [1 + p_a ρ_t (e^t - 1)^{2/α}]^{-1} dt`.
///
/// `p_a = 1` gives the all-on (sparse) network.
pub fn se_exact_with_activity(alpha: f64, activity: f64, cfg: &QuadratureConfig) -> Result<SeValue> {
    check_alpha(alpha)?;
    cfg.validate()?;
    if !(activity > 0.0 && activity <= 1.0) {
        return Err(Error::Domain("activity probability must lie in (0, 1]"));
    }
    let rho0 = rho_zero_analytic(alpha)?;
    let upper = cfg
        .outer_truncation
        .unwrap_or_else(|| outer_truncation(alpha, activity, rho0, cfg.tail_tol));
    let inner = cfg.inner();
    let mut failure = None;
    let est = integrate(
        |t| match rho_t_with(t, alpha, rho0, &inner) {
            Ok(rho) => 1.0 / (1.0 + activity * rho * t.exp_m1().powf(2.0 / alpha)),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        upper,
        &cfg.outer(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let est = est?;
    Ok(SeValue {
        value: est.value,
        method: Method::ExactQuadrature,
        regime_assumption: RegimeAssumption::None,
        abs_error: Some(est.abs_error),
        outside_validity: false,
    })
}

/// `T = (α/2) ln(max(1, 1/(p_a ρ_0)) / ε)`, from the tail decay
/// `[1 + p_a ρ_0 e^{2t/α}]^{-1}`; the discarded mass is at most `(α/2) ε`.
pub fn outer_truncation(alpha: f64, activity: f64, rho0: f64, tail_tol: f64) -> f64 {
    0.5 * alpha * ((1.0 / (activity * rho0)).max(1.0) / tail_tol).ln()
}

/// Exact average SE at any density, by nested quadrature.
pub fn se_exact(params: &NetworkParams, cfg: &QuadratureConfig) -> Result<SeValue> {
    params.validate()?;
    let pa = p_active(params.lambda_u, params.lambda_b)?;
    se_exact_with_activity(params.alpha, pa, cfg)
}

/// `γ_α`: SE of a network with every BS on. Independent of both densities.
pub fn se_sparse_gamma_alpha(alpha: f64, cfg: &QuadratureConfig) -> Result<SeValue> {
    let mut v = se_exact_with_activity(alpha, 1.0, cfg)?;
    v.method = Method::SparseClosedForm;
    v.regime_assumption = RegimeAssumption::Sparse;
    Ok(v)
}

/// `ln(1 + (λ_b / (ρ_0 λ_u))^{α/2})`, the ultra-dense closed form.
pub fn se_udn_closed_form(params: &NetworkParams) -> Result<SeValue> {
    params.validate()?;
    let rho0 = rho_zero_analytic(params.alpha)?;
    Ok(SeValue::closed(
        udn_log_rate(params.density_ratio(), params.alpha, rho0),
        Method::UltraDenseClosedForm,
        RegimeAssumption::UltraDense,
    ))
}

pub(crate) fn udn_log_rate(density_ratio: f64, alpha: f64, rho0: f64) -> f64 {
    (density_ratio / rho0).powf(0.5 * alpha).ln_1p()
}

/// SE under a uniformly random scheduler (one user per BS per slot).
///
/// Sparse: `(λ_b/λ_u) γ_α`. When `λ_b > λ_u` the selection probability would
/// exceed one; the value is still returned, with `outside_validity` set.
/// Ultra-dense: identical to [`se_udn_closed_form`].
pub fn se_with_multiple_access(params: &NetworkParams, regime: Regime, cfg: &QuadratureConfig) -> Result<SeValue> {
    params.validate()?;
    match regime {
        Regime::Sparse => {
            let gamma = se_sparse_gamma_alpha(params.alpha, cfg)?;
            let ratio = params.density_ratio();
            Ok(SeValue {
                value: ratio * gamma.value,
                abs_error: gamma.abs_error.map(|e| e * ratio),
                outside_validity: ratio > 1.0,
                ..gamma
            })
        }
        Regime::UltraDense => se_udn_closed_form(params),
    }
}

/// Closed form of `∫_0^∞ [1 - a (e^t - 1)^{2/α}]^+ dt` with `a = ρ_0 λ_u/λ_b`:
///
/// ```text
/// ln(1 + a^{-α/2}) + aπ csc(2π/α) - α / (2(1 + a^{α/2})) · ₂F₁(1, 1; 1 - 2/α; 1 - 1/(a^{α/2} + 1))
/// ```
///
/// A lower bound on [`se_exact`] whenever `λ_b ≥ λ_u`. For `λ_b ≪ λ_u` the
/// three terms cancel catastrophically; a negative result is reported as
/// [`Error::Numerical`].
pub fn se_lower_bound_appendix(params: &NetworkParams) -> Result<SeValue> {
    params.validate()?;
    let alpha = params.alpha;
    let rho0 = rho_zero_analytic(alpha)?;
    let a = rho0 / params.density_ratio();
    let a_pow = a.powf(0.5 * alpha);
    let z = a_pow / (1.0 + a_pow);
    let log_term = (1.0 / a_pow).ln_1p();
    let csc_term = a * PI / (2.0 * PI / alpha).sin();
    let hyp_term = alpha / (2.0 * (1.0 + a_pow)) * hyp2f1_11c(1.0 - 2.0 / alpha, z)?;
    let value = log_term + csc_term - hyp_term;
    if value < -1e-12 * (log_term + csc_term) {
        return Err(Error::Numerical("lower-bound terms cancelled below zero"));
    }
    Ok(SeValue::closed(
        value.max(0.0),
        Method::AppendixLowerBound,
        RegimeAssumption::UltraDense,
    ))
}
