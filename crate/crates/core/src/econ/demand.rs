#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::{Error, Result};

/// Rate sensitivity `b` (maximum willingness-to-pay; `θ ~ U[0, b]`) and an
/// optional posted price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandModel {
    pub b: f64,
    pub price: Option<f64>,
}

impl DemandModel {
    pub fn new(b: f64) -> Result<Self> {
        let d = Self { b, price: None };
        d.validate()?;
        Ok(d)
    }

    pub fn with_price(b: f64, price: f64) -> Result<Self> {
        let d = Self { b, price: Some(price) };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::Domain("rate sensitivity b must be positive and finite"));
        }
        if let Some(p) = self.price {
            if !(p > 0.0 && p < self.b) {
                return Err(Error::Domain("price must lie in (0, b)"));
            }
        }
        Ok(())
    }

    /// Average demand at the posted price.
    pub fn demand(&self) -> Option<f64> {
        self.price.and_then(|p| avg_demand(self.b, p).ok())
    }
}

/// Payoff-maximising average rate per user, `(b - p)² / (2bp)`.
///
/// A user with `θ > p` buys `θ/p - 1`, others buy nothing; averaging over
/// `θ ~ U[0, b]` gives the closed form.
pub fn avg_demand(b: f64, p: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain("rate sensitivity b must be positive and finite"));
    }
    if !(p > 0.0 && p <= b) {
        return Err(Error::Domain("price must lie in (0, b]"));
    }
    let gap = b - p;
    Ok(gap * gap / (2.0 * b * p))
}

/// Demand-clearing price and its large-`Wγ` approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceQuote {
    /// `b(1 + Wγ)[1 - (1 - (1 + Wγ)^{-2})^{1/2}]`.
    pub exact: f64,
    /// `b / (2(1 + Wγ))`.
    pub approx: f64,
}

impl PriceQuote {
    /// `(exact - approx) / exact`.
    pub fn relative_gap(&self) -> f64 {
        (self.exact - self.approx) / self.exact
    }
}

/// Price at which average demand equals the supplied rate `wγ`.
///
/// With `wγ = 0` there is nothing to sell and the price sits at the choke
/// level `b`.
pub fn optimal_price(b: f64, w: f64, gamma: f64) -> Result<PriceQuote> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain("rate sensitivity b must be positive and finite"));
    }
    if !(w >= 0.0 && gamma >= 0.0) || !(w * gamma).is_finite() {
        return Err(Error::Domain("spectrum and SE must be non-negative and finite"));
    }
    let s = 1.0 + w * gamma;
    let y = 1.0 / (s * s);
    // 1 - √(1 - y) = y / (1 + √(1 - y)), without the cancellation
    let exact = b / (s * (1.0 + (1.0 - y).sqrt()));
    Ok(PriceQuote {
        exact: if w * gamma == 0.0 { b } else { exact },
        approx: b / (2.0 * s),
    })
}
