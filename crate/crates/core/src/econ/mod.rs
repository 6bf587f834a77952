//! Operator economics: user demand, usage-based pricing, profit objectives
//! and profit-optimal BS density / spectrum.
//!
//! A user with willingness-to-pay `θ ~ U[0, b]` maximises
//! `[θ ln(1 + X) - pX]^+` over its rate `X`. The operator picks the price
//! that makes average demand equal the supplied rate `Wγ`, then chooses
//! `(λ_b, W)` to maximise revenue minus `c_b λ_b + c_w W`.
//!
//! Demand `X̄` and supply `Wγ` share one abstract rate unit; there is no unit
//! conversion layer. Every user is counted in the revenue term (no
//! participation adjustment for users whose payoff is zero).

mod demand;
mod numeric;
mod objective;
mod plan;

pub use demand::{avg_demand, optimal_price, DemandModel, PriceQuote};
pub use numeric::{numeric_optimize_plan, OptConfig};
pub use objective::{profit, profit_at_price, Market, Objective};
pub use plan::{closed_form_plan, cost_ratio, AnalyticSe, DeploymentPlan, PlanRegime, PlanWarning, SeEngine, Solver};

use crate::{Error, Result};

/// Unit BS and spectrum operating costs per unit area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub c_b: f64,
    pub c_w: f64,
}

impl CostParams {
    pub fn new(c_b: f64, c_w: f64) -> Result<Self> {
        let c = Self { c_b, c_w };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_b > 0.0 && self.c_w > 0.0 && self.c_b.is_finite() && self.c_w.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain("operating costs must be positive and finite"))
        }
    }

    /// `c_b λ_b + c_w W`.
    pub fn total(&self, lambda_b: f64, w: f64) -> f64 {
        self.c_b * lambda_b + self.c_w * w
    }
}
