use fogcell::mmwave::normal_cdf;
use fogcell::{link_margin_db, p_hop_analytic, p_hop_monte_carlo, LinkParams};
use proptest::prelude::*;

/// Composite Simpson integration of the normal density from -12 to `x`.
fn simpson_cdf(x: f64) -> f64 {
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let (a, n) = (-12.0, 20_000);
    let h = (x - a) / n as f64;
    let mut s = pdf(a) + pdf(x);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn normal_cdf_agrees_with_quadrature() {
    for i in -60..=60 {
        let x = i as f64 * 0.1;
        let q = simpson_cdf(x);
        assert!((normal_cdf(x) - q).abs() < 1e-12, "x={x}");
    }
}

#[test]
fn p_hop_bounded_and_monotone_on_grid() {
    let base = LinkParams::default();
    let mut prev = f64::INFINITY;
    for d in 1..=50 {
        let p = p_hop_analytic(d as f64, &base).unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!(p <= prev, "δ={d}");
        prev = p;

        let louder = LinkParams {
            p_tx_dbm: base.p_tx_dbm + 1.0,
            ..base
        };
        let pickier = LinkParams {
            theta_db: base.theta_db + 1.0,
            ..base
        };
        assert!(p_hop_analytic(d as f64, &louder).unwrap() >= p);
        assert!(p_hop_analytic(d as f64, &pickier).unwrap() <= p);
    }
    for d in [50.5, 51.0, 80.0, 1000.0] {
        assert_eq!(p_hop_analytic(d, &base).unwrap(), 0.0);
    }
}

#[test]
fn monte_carlo_matches_analytic_grid() {
    let link = LinkParams::default();
    for i in 1..=10 {
        let d = 5.0 * i as f64;
        let want = p_hop_analytic(d, &link).unwrap();
        let got = p_hop_monte_carlo(d, &link, 100_000, 2024).unwrap();
        assert!(
            (got.estimate - want).abs() <= 0.01,
            "δ={d}: {} vs {want}",
            got.estimate
        );
    }
}

proptest! {
    #[test]
    fn shifting_power_and_threshold_together_is_neutral(
        d in 0.5f64..50.0,
        c in -40.0f64..40.0,
        sigma in 0.5f64..12.0,
    ) {
        let a = LinkParams { sigma_db: sigma, ..LinkParams::default() };
        let b = LinkParams { p_tx_dbm: a.p_tx_dbm + c, theta_db: a.theta_db + c, ..a };
        let (pa, pb) = (p_hop_analytic(d, &a).unwrap(), p_hop_analytic(d, &b).unwrap());
        prop_assert!((pa - pb).abs() < 1e-12);
        prop_assert!((link_margin_db(d, &a).unwrap() - link_margin_db(d, &b).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn p_hop_in_unit_interval(d in 0.01f64..500.0, ptx in -50.0f64..80.0, sigma in 0.0f64..20.0) {
        let link = LinkParams { p_tx_dbm: ptx, sigma_db: sigma, ..LinkParams::default() };
        let p = p_hop_analytic(d, &link).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        if d > link.range_max_m {
            prop_assert_eq!(p, 0.0);
        }
    }
}
