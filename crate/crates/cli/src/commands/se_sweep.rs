use rayon::prelude::*;
use udn_core::se::{
    p_active, se_exact, se_lower_bound_appendix, se_sparse_gamma_alpha, se_udn_closed_form, NetworkParams,
    QuadratureConfig,
};

use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::output::{sci, sci_opt, Table};

pub const HEADER: [&str; 9] = [
    "lambda_b",
    "lambda_u",
    "alpha",
    "se_exact",
    "se_udn_closed_form",
    "se_lower_bound",
    "ratio_approx_over_exact",
    "gamma_alpha",
    "p_active",
];

/// One row per `(α, λ_b)`, α-major. The lower bound is `NA` below `λ_b = λ_u`,
/// where it is not a bound.
pub fn table(s: &Settings) -> Result<Table> {
    let points: Vec<(f64, f64)> = s
        .alphas
        .iter()
        .flat_map(|&a| s.sweep.values.iter().map(move |&lb| (a, lb)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(alpha, lambda_b)| row(lambda_b, s.lambda_u, alpha, &s.quadrature))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: HEADER.to_vec(),
        rows,
    })
}

fn row(lambda_b: f64, lambda_u: f64, alpha: f64, cfg: &QuadratureConfig) -> Result<Vec<String>> {
    let ctx = || format!("se-sweep at lambda_b={lambda_b}, lambda_u={lambda_u}, alpha={alpha}");
    let wrap = |e| CliError::engine(ctx(), e);
    let params = NetworkParams::new(lambda_b, lambda_u, alpha).map_err(wrap)?;
    let exact = se_exact(&params, cfg).map_err(wrap)?.value;
    let udn = se_udn_closed_form(&params).map_err(wrap)?.value;
    let lower = if lambda_b >= lambda_u {
        Some(se_lower_bound_appendix(&params).map_err(wrap)?.value)
    } else {
        None
    };
    let gamma_alpha = se_sparse_gamma_alpha(alpha, cfg).map_err(wrap)?.value;
    let pa = p_active(lambda_u, lambda_b).map_err(wrap)?;
    Ok(vec![
        sci(lambda_b),
        sci(lambda_u),
        sci(alpha),
        sci(exact),
        sci(udn),
        sci_opt(lower),
        sci(udn / exact),
        sci(gamma_alpha),
        sci(pa),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CommandKind, Overrides, Settings, Sweep, SweepVar};

    #[test]
    fn ratio_tightens_with_density() {
        let mut s = Settings::from_overrides(CommandKind::SeSweep, &Overrides::default()).unwrap();
        s.alphas = vec![4.0];
        s.sweep = Sweep::range(SweepVar::LambdaB, 0.005, 5.0, 7, true);
        let t = table(&s).unwrap();
        assert_eq!(t.rows.len(), 7);
        let col = t.column("ratio_approx_over_exact").unwrap();
        let ratios: Vec<f64> = t.rows.iter().map(|r| r[col].parse().unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] >= w[0]), "{ratios:?}");
        let lb = t.column("se_lower_bound").unwrap();
        assert_eq!(t.rows[0][lb], "NA");
        assert_ne!(t.rows[6][lb], "NA");
    }
}
