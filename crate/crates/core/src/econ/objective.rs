use super::{CostParams, DemandModel};
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::se::{check_alpha, p_active, udn_log_rate, NetworkParams};
use crate::{Error, Result};

/// Demand side and cost side of the market the operator serves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Market {
    pub lambda_u: f64,
    pub alpha: f64,
    pub demand: DemandModel,
    pub costs: CostParams,
}

impl Market {
    pub fn new(lambda_u: f64, alpha: f64, b: f64, costs: CostParams) -> Result<Self> {
        let m = Self {
            lambda_u,
            alpha,
            demand: DemandModel::new(b)?,
            costs,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_u > 0.0 && self.lambda_u.is_finite()) {
            return Err(Error::Domain("user density must be positive and finite"));
        }
        check_alpha(self.alpha)?;
        self.demand.validate()?;
        self.costs.validate()
    }

    /// `λ_u b / 2`, the revenue ceiling.
    pub fn revenue_cap(&self) -> f64 {
        0.5 * self.lambda_u * self.demand.b
    }
}

/// Stage-3 profit objectives over `(λ_b, W)`.
///
/// All use the demand-clearing price in its large-`Wγ` form, which turns
/// revenue into `(λ_u b/2)(1 + 1/(Wγ))^{-1}`. They differ in the SE model
/// and in whether that fraction is linearised:
///
/// | objective | SE model                              | revenue factor          |
/// |-----------|---------------------------------------|-------------------------|
/// | `P2Exact` | `p_a (λ_b/λ_u)` × exact integral        | `(1 + 1/(Wγ))^{-1}`     |
/// | `P3`      | `(λ_b/λ_u) γ_α`                       | `(1 + 1/(Wγ))^{-1}`     |
/// | `P3Taylor`| `(λ_b/λ_u) γ_α`                       | `1 - 1/(Wγ)`            |
/// | `P4`      | `ln(1 + (λ_b/(ρ_0 λ_u))^{α/2})`       | `(1 + 1/(Wγ))^{-1}`     |
/// | `P4Taylor`| `1/ln(1+x)` replaced by `x^{-1/2}`    | `1 - x^{-1/2}/W`        |
///
/// `p_a λ_b/λ_u` is the share of time a user holds its BS; it tends to
/// `λ_b/λ_u` for sparse networks and to 1 for ultra-dense ones.
///
/// `P4Taylor` penalises `(1/W)(ρ_0 λ_u/λ_b)^{α/4}`; that exponent is the one
/// whose first-order conditions give the ultra-dense closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    P2Exact,
    P3,
    P3Taylor,
    P4,
    P4Taylor,
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Objective::P2Exact,
        Objective::P3,
        Objective::P3Taylor,
        Objective::P4,
        Objective::P4Taylor,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Objective::P2Exact => "P2_exactSE",
            Objective::P3 => "P3",
            Objective::P3Taylor => "P3_1",
            Objective::P4 => "P4",
            Objective::P4Taylor => "P4_1",
        }
    }

    /// Profit at `(λ_b, W)`, given the per-`α` constants and the SE of the
    /// network at `λ_b` under this objective's model.
    pub(crate) fn evaluate(&self, market: &Market, lambda_b: f64, w: f64, se: f64, rho0: f64) -> f64 {
        let cap = market.revenue_cap();
        let revenue = match self {
            Objective::P2Exact | Objective::P3 | Objective::P4 => cap * w * se / (1.0 + w * se),
            Objective::P3Taylor => cap * (1.0 - 1.0 / (w * se)),
            Objective::P4Taylor => {
                let penalty = (rho0 * market.lambda_u / lambda_b).powf(0.25 * market.alpha) / w;
                cap * (1.0 - penalty)
            }
        };
        revenue - market.costs.total(lambda_b, w)
    }
}

/// Share of time a user is served when every active BS splits its time
/// evenly: active BSs per user.
pub(crate) fn time_share(lambda_u: f64, lambda_b: f64) -> Result<f64> {
    Ok(p_active(lambda_u, lambda_b)? * lambda_b / lambda_u)
}

/// SE of the supply side under a given objective's model, from precomputed
/// `γ_α` and `ρ_0`. `P2Exact` needs quadrature and is handled by the caller.
pub(crate) fn model_se(objective: Objective, market: &Market, lambda_b: f64, gamma_alpha: f64, rho0: f64) -> f64 {
    match objective {
        Objective::P3 | Objective::P3Taylor => lambda_b / market.lambda_u * gamma_alpha,
        Objective::P4 | Objective::P4Taylor | Objective::P2Exact => {
            udn_log_rate(lambda_b / market.lambda_u, market.alpha, rho0)
        }
    }
}

/// Stage-3 profit `(λ_u b/2)(1 + 1/(Wγ))^{-1} - (c_b λ_b + c_w W)`.
pub fn profit(params: &NetworkParams, costs: &CostParams, demand: &DemandModel, w: f64, gamma: f64) -> Result<f64> {
    params.validate()?;
    costs.validate()?;
    demand.validate()?;
    if !(w > 0.0 && gamma > 0.0) {
        return Err(Error::Domain("spectrum and SE must be positive"));
    }
    let wg = w * gamma;
    Ok(0.5 * params.lambda_u * demand.b * wg / (1.0 + wg) - costs.total(params.lambda_b, w))
}

/// Profit `p λ_u X̄ - (c_b λ_b + c_w W)` at an explicit price and demand.
pub fn profit_at_price(params: &NetworkParams, costs: &CostParams, price: f64, x_bar: f64, w: f64) -> Result<f64> {
    params.validate()?;
    costs.validate()?;
    Ok(price * params.lambda_u * x_bar - costs.total(params.lambda_b, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::{avg_demand, optimal_price};

    fn setup() -> (NetworkParams, CostParams, DemandModel) {
        (
            NetworkParams::new(3.0, 1.0, 4.0).unwrap(),
            CostParams::new(0.1, 0.2).unwrap(),
            DemandModel::new(10.0).unwrap(),
        )
    }

    #[test]
    fn saturation_limits() {
        let (p, c, d) = setup();
        let big = profit(&p, &c, &d, 1e12, 1.0).unwrap();
        assert!((big - (0.5 * 1.0 * 10.0 - c.total(3.0, 1e12))).abs() < 1e-3);
        let tiny = profit(&p, &c, &d, 1e-12, 1.0).unwrap();
        assert!((tiny + c.total(3.0, 1e-12)).abs() < 1e-9);
    }

    #[test]
    fn matches_price_form_at_approximate_clearing_price() {
        // With X̄ = Wγ sold at b/(2(1 + Wγ)) the two forms coincide exactly.
        let (p, c, d) = setup();
        for (w, g) in [(0.3, 1.2), (2.0, 4.0), (17.0, 0.9)] {
            let q = optimal_price(d.b, w, g).unwrap();
            let a = profit(&p, &c, &d, w, g).unwrap();
            let b = profit_at_price(&p, &c, q.approx, w * g, w).unwrap();
            assert!(((a - b) / a.abs().max(1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_price_revenue_differs_by_price_gap() {
        // At the exact clearing price revenue is λ_u b (1-q)²/2 with q = p/b,
        // above the stage-3 form; the gap closes as Wγ grows.
        let (p, c, d) = setup();
        let mut last = f64::INFINITY;
        for wg in [1.0, 5.0, 25.0, 125.0] {
            let q = optimal_price(d.b, wg, 1.0).unwrap();
            let x = avg_demand(d.b, q.exact).unwrap();
            let exact = profit_at_price(&p, &c, q.exact, x, wg).unwrap();
            let stage3 = profit(&p, &c, &d, wg, 1.0).unwrap();
            let gap = exact - stage3;
            assert!(gap > 0.0 && gap < last, "wγ={wg}: {gap}");
            last = gap;
        }
    }

    #[test]
    fn invalid_inputs_rejected() {
        let (p, c, d) = setup();
        assert!(profit(&p, &c, &d, 0.0, 1.0).is_err());
        assert!(CostParams::new(0.0, 1.0).is_err());
        assert!(DemandModel::new(-2.0).is_err());
        assert!(DemandModel::with_price(2.0, 2.5).is_err());
        assert!(Market::new(0.0, 4.0, 1.0, c).is_err());
    }
}
