use proptest::prelude::*;
use udn_core::econ::{avg_demand, closed_form_plan, optimal_price, AnalyticSe, CostParams, DemandModel};
use udn_core::se::{p_active, rho_t, se_exact, NetworkParams, QuadratureConfig, Regime};

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(3.0), Just(4.0), 2.2f64..7.0]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn activity_bounded_by_load(lu in 1e-4f64..1e3, lb in 1e-4f64..1e3) {
        let p = p_active(lu, lb).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        prop_assert!(p <= lu / lb * (1.0 + 1e-12));
    }

    #[test]
    fn rho_t_increases_in_t(a in alpha(), t in 0.01f64..5.0, dt in 0.01f64..2.0) {
        let lo = rho_t(t, a).unwrap();
        let hi = rho_t(t + dt, a).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn se_depends_only_on_density_ratio(
        a in alpha(),
        ratio in 0.05f64..200.0,
        lu in 1e-3f64..10.0,
        scale in 0.01f64..100.0,
    ) {
        let cfg = QuadratureConfig::default();
        let one = se_exact(&NetworkParams::new(ratio * lu, lu, a).unwrap(), &cfg).unwrap().value;
        let two = se_exact(&NetworkParams::new(ratio * lu * scale, lu * scale, a).unwrap(), &cfg).unwrap().value;
        prop_assert!((one - two).abs() <= 1e-8 * one.max(1.0));
    }

    #[test]
    fn per_user_se_grows_with_density(a in alpha(), lu in 1e-3f64..10.0, ratio in 0.05f64..100.0, step in 1.05f64..4.0) {
        let cfg = QuadratureConfig::default();
        let se = |lb: f64| se_exact(&NetworkParams::new(lb, lu, a).unwrap(), &cfg).unwrap().value;
        prop_assert!(se(ratio * lu * step) > se(ratio * lu));
    }

    #[test]
    fn clearing_price_meets_supply(b in 0.1f64..100.0, wg in 1e-3f64..1e4) {
        let q = optimal_price(b, wg, 1.0).unwrap();
        prop_assert!(q.exact >= q.approx * (1.0 - 1e-12) && q.exact < b);
        let x = avg_demand(b, q.exact).unwrap();
        prop_assert!((x - wg).abs() <= 1e-10 * wg.max(1.0));
    }

    #[test]
    fn closed_form_plans_are_positive_and_scale(
        a in alpha(),
        b in 0.5f64..50.0,
        lu in 1e-3f64..10.0,
        cb in 0.01f64..1.0,
        cw in 0.01f64..1.0,
    ) {
        let engine = AnalyticSe::default();
        let costs = CostParams::new(cb, cw).unwrap();
        let d = DemandModel::new(b).unwrap();
        for regime in [Regime::Sparse, Regime::UltraDense] {
            let p = closed_form_plan(regime, lu, a, &d, &costs, &engine).unwrap();
            prop_assert!(p.lambda_b_star > 0.0 && p.w_star > 0.0);
            prop_assert!(p.p_star > 0.0 && p.p_star < b);
            // dearer inputs buy less of both
            let dear = CostParams::new(2.0 * cb, 2.0 * cw).unwrap();
            let q = closed_form_plan(regime, lu, a, &d, &dear, &engine).unwrap();
            prop_assert!(q.lambda_b_star < p.lambda_b_star && q.w_star < p.w_star);
        }
    }
}
