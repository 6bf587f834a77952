use alloc::vec::Vec;

use super::objective::model_se;
use super::{avg_demand, optimal_price, CostParams, DemandModel, Market, Objective};
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::se::{self, check_alpha, NetworkParams, QuadratureConfig, Regime};
use crate::Result;

/// Smallest `λ_b*/λ_u` accepted as ultra-dense without a warning.
pub const ULTRA_DENSE_MIN_RATIO: f64 = 5.0;

/// Source of the SE quantities the planners need.
pub trait SeEngine {
    /// `γ_α`, the all-BSs-on SE.
    fn gamma_alpha(&self, alpha: f64) -> Result<f64>;
    fn rho_zero(&self, alpha: f64) -> Result<f64>;
    /// Exact SE at any density.
    fn se_exact(&self, params: &NetworkParams) -> Result<f64>;
}

/// [`SeEngine`] backed by the quadrature routines in [`crate::se`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyticSe {
    pub cfg: QuadratureConfig,
}

impl SeEngine for AnalyticSe {
    fn gamma_alpha(&self, alpha: f64) -> Result<f64> {
        Ok(se::se_sparse_gamma_alpha(alpha, &self.cfg)?.value)
    }

    fn rho_zero(&self, alpha: f64) -> Result<f64> {
        se::rho_zero_analytic(alpha)
    }

    fn se_exact(&self, params: &NetworkParams) -> Result<f64> {
        Ok(se::se_exact(params, &self.cfg)?.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanRegime {
    Sparse,
    UltraDense,
    General,
}

impl From<Regime> for PlanRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::Sparse => PlanRegime::Sparse,
            Regime::UltraDense => PlanRegime::UltraDense,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    ClosedForm,
    NumericOracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanWarning {
    /// The optimum does not sit in the density regime its formula assumes.
    RegimeInconsistent { density_ratio: f64 },
    /// The numeric optimum lies on the search box; widen the bounds.
    GridBoundary,
    /// Distinct starts reached different points with equal profit.
    MultistartDisagreement,
    /// The simplex search hit its iteration cap.
    NotConverged,
}

/// An operator decision: BS density, spectrum, price and the resulting
/// per-user demand and profit per unit area.
#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentPlan {
    pub lambda_b_star: f64,
    pub w_star: f64,
    /// Exact demand-clearing price.
    pub p_star: f64,
    /// Average demand at `p_star`; equals `w_star · gamma`.
    pub x_bar: f64,
    /// SE of the network at `lambda_b_star` under the plan's model.
    pub gamma: f64,
    pub profit: f64,
    pub regime: PlanRegime,
    pub solver: Solver,
    pub objective: Objective,
    pub warnings: Vec<PlanWarning>,
}

impl DeploymentPlan {
    /// `c_b λ_b* / (c_w W*)`.
    pub fn cost_ratio(&self, costs: &CostParams) -> f64 {
        costs.c_b * self.lambda_b_star / (costs.c_w * self.w_star)
    }

    pub(crate) fn assemble(
        market: &Market,
        lambda_b: f64,
        w: f64,
        gamma: f64,
        profit: f64,
        objective: Objective,
        solver: Solver,
    ) -> Result<Self> {
        let quote = optimal_price(market.demand.b, w, gamma)?;
        let x_bar = avg_demand(market.demand.b, quote.exact)?;
        let regime = match objective {
            Objective::P3 | Objective::P3Taylor => PlanRegime::Sparse,
            Objective::P4 | Objective::P4Taylor => PlanRegime::UltraDense,
            Objective::P2Exact => PlanRegime::General,
        };
        let mut warnings = Vec::new();
        let ratio = lambda_b / market.lambda_u;
        let inconsistent = match regime {
            PlanRegime::Sparse => ratio > 1.0,
            PlanRegime::UltraDense => ratio < ULTRA_DENSE_MIN_RATIO,
            PlanRegime::General => false,
        };
        if inconsistent {
            warnings.push(PlanWarning::RegimeInconsistent { density_ratio: ratio });
        }
        Ok(Self {
            lambda_b_star: lambda_b,
            w_star: w,
            p_star: quote.exact,
            x_bar,
            gamma,
            profit,
            regime,
            solver,
            objective,
            warnings,
        })
    }
}

/// Closed-form profit-optimal `(λ_b*, W*)`.
///
/// Sparse (stationary point of the linearised sparse objective):
///
/// ```text
/// λ_b* = [b c_w / (2γ_α) · (λ_u/c_b)²]^{1/3}
/// W*   = [b c_b / (2γ_α) · (λ_u/c_w)²]^{1/3}
/// ```
///
/// Ultra-dense (stationary point of the linearised ultra-dense objective):
///
/// ```text
/// λ_b* = [(α / (2^{2.5} c_b))^8 (b c_w)^4 ρ_0^α λ_u^{α+4}]^{1/(α+8)}
/// W*   = [2^{2(α-2)} α^{-α} c_b^α / c_w^{α+4} · b^4 ρ_0^α λ_u^{α+4}]^{1/(α+8)}
/// ```
///
/// so that `c_b λ_b* = (α/4) c_w W*`. Without the `α^{-α}` factor the pair
/// is not a stationary point.
///
/// Price and demand follow from the plan's SE; profit is the matching
/// non-linearised objective (`P3` or `P4`).
pub fn closed_form_plan<E: SeEngine + ?Sized>(
    regime: Regime,
    lambda_u: f64,
    alpha: f64,
    demand: &DemandModel,
    costs: &CostParams,
    engine: &E,
) -> Result<DeploymentPlan> {
    let market = Market {
        lambda_u,
        alpha,
        demand: *demand,
        costs: *costs,
    };
    market.validate()?;
    let b = demand.b;
    let (c_b, c_w) = (costs.c_b, costs.c_w);
    let rho0 = engine.rho_zero(alpha)?;
    let (lambda_b, w, gamma_alpha, objective) = match regime {
        Regime::Sparse => {
            let ga = engine.gamma_alpha(alpha)?;
            let k = b * lambda_u * lambda_u / (2.0 * ga);
            (
                (k * c_w / (c_b * c_b)).cbrt(),
                (k * c_b / (c_w * c_w)).cbrt(),
                ga,
                Objective::P3,
            )
        }
        Regime::UltraDense => {
            let ln2 = core::f64::consts::LN_2;
            let ln_common = 4.0 * b.ln() + alpha * rho0.ln() + (alpha + 4.0) * lambda_u.ln();
            let ln_lb = 8.0 * (alpha.ln() - 2.5 * ln2 - c_b.ln()) + 4.0 * c_w.ln() + ln_common;
            let ln_w = 2.0 * (alpha - 2.0) * ln2 - alpha * alpha.ln() + alpha * c_b.ln() - (alpha + 4.0) * c_w.ln()
                + ln_common;
            let inv = 1.0 / (alpha + 8.0);
            ((ln_lb * inv).exp(), (ln_w * inv).exp(), f64::NAN, Objective::P4)
        }
    };
    let gamma = model_se(objective, &market, lambda_b, gamma_alpha, rho0);
    let profit = objective.evaluate(&market, lambda_b, w, gamma, rho0);
    DeploymentPlan::assemble(&market, lambda_b, w, gamma, profit, objective, Solver::ClosedForm)
}

/// Profit-maximising BS-to-spectrum spending ratio `c_b λ_b* / (c_w W*)`:
/// 1 for sparse networks, `2^{-2} α^{8/(α+8)}` for ultra-dense ones.
///
/// The ultra-dense value lies in `[0.43, 0.71]` for `α ∈ (2, ∞)`. The
/// stationary point returned by [`closed_form_plan`] spends `α/4` instead.
pub fn cost_ratio(regime: Regime, alpha: f64) -> Result<f64> {
    match regime {
        Regime::Sparse => Ok(1.0),
        Regime::UltraDense => {
            check_alpha(alpha)?;
            Ok(0.25 * alpha.powf(8.0 / (alpha + 8.0)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    struct Fixed {
        gamma_alpha: f64,
    }

    impl SeEngine for Fixed {
        fn gamma_alpha(&self, _: f64) -> Result<f64> {
            Ok(self.gamma_alpha)
        }
        fn rho_zero(&self, alpha: f64) -> Result<f64> {
            se::rho_zero_analytic(alpha)
        }
        fn se_exact(&self, _: &NetworkParams) -> Result<f64> {
            Err(Error::Numerical("not available"))
        }
    }

    const ENGINE: Fixed = Fixed {
        gamma_alpha: 1.488_987_624_665_83,
    };

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn sparse_symmetric_costs_give_equal_coordinates() {
        let c = CostParams::new(0.1, 0.1).unwrap();
        let d = DemandModel::new(10.0).unwrap();
        let plan = closed_form_plan(Regime::Sparse, 1.0, 4.0, &d, &c, &ENGINE).unwrap();
        assert!(rel(plan.lambda_b_star, plan.w_star) < 1e-14);
        // values from a direct evaluation of the formulas
        assert!(rel(plan.lambda_b_star, 3.226_212_518_484_182) < 1e-12);
        assert!(rel(plan.profit, 4.051_691_359_729_591) < 1e-12);
        assert_eq!(plan.solver, Solver::ClosedForm);
        assert_eq!(plan.regime, PlanRegime::Sparse);
    }

    #[test]
    fn sparse_cost_ratio_is_one() {
        let d = DemandModel::new(3.7).unwrap();
        for (cb, cw) in [(0.1, 0.3), (2.0, 0.05), (1.0, 1.0)] {
            let c = CostParams::new(cb, cw).unwrap();
            let plan = closed_form_plan(Regime::Sparse, 0.4, 3.0, &d, &c, &ENGINE).unwrap();
            assert!((plan.cost_ratio(&c) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sparse_satisfies_first_order_conditions() {
        // λ_b² W = bλ_u²/(2γ_α c_b) and W² λ_b = bλ_u²/(2γ_α c_w)
        let (b, lu, ga) = (6.0, 0.7, ENGINE.gamma_alpha);
        let c = CostParams::new(0.3, 0.05).unwrap();
        let p = closed_form_plan(Regime::Sparse, lu, 4.0, &DemandModel::new(b).unwrap(), &c, &ENGINE).unwrap();
        let k = b * lu * lu / (2.0 * ga);
        assert!(rel(p.lambda_b_star.powi(2) * p.w_star, k / c.c_b) < 1e-12);
        assert!(rel(p.w_star.powi(2) * p.lambda_b_star, k / c.c_w) < 1e-12);
    }

    #[test]
    fn ultra_dense_satisfies_first_order_conditions() {
        // λ_b* = [α b ρ_0^{α/4} / (8 c_b W*)]^{1/(α/4+1)} λ_u
        // W*   = [b λ_u^{α/4+1} (ρ_0/λ_b*)^{α/4} / (2 c_w)]^{1/2}
        for alpha in [2.5, 3.0, 4.0, 6.0] {
            let (b, lu) = (10.0, 0.8);
            let c = CostParams::new(0.1, 0.25).unwrap();
            let p = closed_form_plan(
                Regime::UltraDense,
                lu,
                alpha,
                &DemandModel::new(b).unwrap(),
                &c,
                &ENGINE,
            )
            .unwrap();
            let rho0 = se::rho_zero_analytic(alpha).unwrap();
            let q = alpha / 4.0;
            let lb = (alpha * b * rho0.powf(q) / (8.0 * c.c_b * p.w_star)).powf(1.0 / (q + 1.0)) * lu;
            let w = (b * lu.powf(q + 1.0) * (rho0 / p.lambda_b_star).powf(q) / (2.0 * c.c_w)).sqrt();
            assert!(rel(p.lambda_b_star, lb) < 1e-12, "α={alpha}");
            assert!(rel(p.w_star, w) < 1e-12, "α={alpha}");
            assert!(rel(p.cost_ratio(&c), alpha / 4.0) < 1e-12);
        }
    }

    #[test]
    fn plan_prices_clear_the_market() {
        let c = CostParams::new(0.1, 0.1).unwrap();
        let d = DemandModel::new(10.0).unwrap();
        for regime in [Regime::Sparse, Regime::UltraDense] {
            let p = closed_form_plan(regime, 5.0, 4.0, &d, &c, &ENGINE).unwrap();
            assert!(rel(p.x_bar, p.w_star * p.gamma) < 1e-10);
            assert!(p.p_star > 0.0 && p.p_star < d.b);
        }
    }

    #[test]
    fn regime_consistency_flags() {
        let c = CostParams::new(0.1, 0.1).unwrap();
        let d = DemandModel::new(10.0).unwrap();
        // few users: sparse optimum has λ_b* > λ_u
        let p = closed_form_plan(Regime::Sparse, 0.05, 4.0, &d, &c, &ENGINE).unwrap();
        assert!(matches!(p.warnings[..], [PlanWarning::RegimeInconsistent { .. }]));
        // many users: ultra-dense optimum drops below 5 λ_u
        let p = closed_form_plan(Regime::UltraDense, 50.0, 4.0, &d, &c, &ENGINE).unwrap();
        assert!(matches!(p.warnings[..], [PlanWarning::RegimeInconsistent { .. }]));
        let p = closed_form_plan(Regime::UltraDense, 0.01, 4.0, &d, &c, &ENGINE).unwrap();
        assert!(p.warnings.is_empty(), "{}", p.lambda_b_star / 0.01);
    }

    #[test]
    fn cost_ratio_values() {
        assert_eq!(cost_ratio(Regime::Sparse, 4.0).unwrap(), 1.0);
        let r4 = cost_ratio(Regime::UltraDense, 4.0).unwrap();
        assert!((r4 - 0.25 * 4f64.powf(8.0 / 12.0)).abs() < 1e-15);
        assert!((r4 - 0.630).abs() < 1e-3);
        let near_two = cost_ratio(Regime::UltraDense, 2.0 + 1e-9).unwrap();
        assert!((near_two - 0.25 * 2f64.powf(0.8)).abs() < 1e-9);
        assert!((near_two - 0.435).abs() < 1e-3);
        assert!(cost_ratio(Regime::UltraDense, 2.0).is_err());
    }

    #[test]
    fn exponents_in_demand_and_costs() {
        // log-log slopes of the closed forms: λ_u exponent beats b exponent
        let c = CostParams::new(0.1, 0.1).unwrap();
        for (regime, alpha, lu_exp, b_exp) in [
            (Regime::Sparse, 4.0, 2.0 / 3.0, 1.0 / 3.0),
            (Regime::UltraDense, 4.0, 8.0 / 12.0, 4.0 / 12.0),
            (Regime::UltraDense, 6.0, 10.0 / 14.0, 4.0 / 14.0),
        ] {
            let at = |lu: f64, b: f64| {
                closed_form_plan(regime, lu, alpha, &DemandModel::new(b).unwrap(), &c, &ENGINE).unwrap()
            };
            let base = at(1.0, 10.0);
            let more_users = at(2.0, 10.0);
            let more_b = at(1.0, 20.0);
            let slope = |a: f64, b: f64| (b / a).ln() / 2f64.ln();
            assert!((slope(base.lambda_b_star, more_users.lambda_b_star) - lu_exp).abs() < 1e-12);
            assert!((slope(base.w_star, more_users.w_star) - lu_exp).abs() < 1e-12);
            assert!((slope(base.lambda_b_star, more_b.lambda_b_star) - b_exp).abs() < 1e-12);
            assert!((slope(base.w_star, more_b.w_star) - b_exp).abs() < 1e-12);
        }
    }

    #[test]
    fn cost_substitution() {
        let d = DemandModel::new(10.0).unwrap();
        for regime in [Regime::Sparse, Regime::UltraDense] {
            let at = |cb: f64, cw: f64| {
                closed_form_plan(regime, 1.0, 4.0, &d, &CostParams::new(cb, cw).unwrap(), &ENGINE).unwrap()
            };
            let base = at(0.1, 0.1);
            let dear_bs = at(0.2, 0.1);
            let dear_spectrum = at(0.1, 0.2);
            assert!(dear_bs.lambda_b_star < base.lambda_b_star && dear_bs.w_star > base.w_star);
            assert!(dear_spectrum.lambda_b_star > base.lambda_b_star && dear_spectrum.w_star < base.w_star);
        }
    }
}
