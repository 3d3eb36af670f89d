mod common;

use std::f64::consts::LN_2;

use causalrd::oracle::{analytic_binary_rdf, classical_blahut, grid_lagrangian_min, OracleMethod};
use causalrd::prob::{Alphabet, CausalKernelFamily, FinitePmf};
use causalrd::rdf::{
    baa_run, expected_distortion, na_rdf_value, rd_curve, BaaConfig, CurveMode, CurveShape, DistortionSpec, Slope,
    UpdateRule,
};
use causalrd::Error;
use common::{h2, iid, markov};

fn s(v: f64) -> Slope {
    Slope::new(v).unwrap()
}

#[test]
fn expected_distortion_examples() {
    let src = iid(0.9, 0);
    let d = DistortionSpec::hamming(2, 0).unwrap();
    let id = CausalKernelFamily::identity_channel(&Alphabet::binary("x"), 0).unwrap();
    assert_eq!(expected_distortion(&src, &id, &d).unwrap(), 0.0);
    let zero = CausalKernelFamily::memoryless_channel(&Alphabet::binary("x"), &[vec![1.0, 0.0], vec![1.0, 0.0]], 0).unwrap();
    assert!((expected_distortion(&src, &zero, &d).unwrap() - 0.9).abs() < 1e-15);
    let m = markov(0.2, 0.4, 3);
    let bsc = CausalKernelFamily::binary_symmetric_channel(0.1, 3).unwrap();
    let d3 = DistortionSpec::hamming(2, 3).unwrap();
    assert!((expected_distortion(&m, &bsc, &d3).unwrap() - 0.1).abs() < 1e-14);
}

#[test]
fn bern07_horizon_one_matches_grid_oracle() {
    let src = iid(0.7, 1);
    let d = DistortionSpec::hamming(2, 1).unwrap();
    let oracle = grid_lagrangian_min(&src, &d, s(-2.0), 0.02).unwrap();
    assert_eq!(oracle.method, OracleMethod::Grid);
    let t = baa_run(&src, &d, s(-2.0), &BaaConfig::default()).unwrap();
    assert!(t.converged);
    assert!((t.final_objective() - oracle.value_nats).abs() < 1e-3);
    // The grid can only sit above the true minimum.
    assert!(oracle.value_nats >= t.final_objective() - 1e-12);
}

#[test]
fn rate_endpoints() {
    let src = iid(0.7, 2);
    let d = DistortionSpec::hamming(2, 2).unwrap();
    let t = baa_run(&src, &d, s(0.0), &BaaConfig::default()).unwrap();
    let pt = na_rdf_value(&src, &d, s(0.0), &t).unwrap();
    assert_eq!(pt.iterations, 1);
    assert!(pt.rate_nats.abs() < 1e-15);
    // Rate shrinks towards zero as the slope flattens towards -ln(7/3).
    let grid: Vec<Slope> = [-3.0, -2.0, -1.5, -1.0].into_iter().map(s).collect();
    let c = rd_curve(&src, &d, &grid, &BaaConfig::default(), CurveMode::Cold).unwrap();
    assert!(c.windows(2).all(|w| w[1].rate_nats < w[0].rate_nats));
    for p in &c {
        assert!((p.rate_nats - analytic_binary_rdf(0.7, p.distortion).unwrap()).abs() < 1e-8);
    }
    assert!(c.last().unwrap().rate_nats < 0.05);
}

#[test]
fn binary_symmetric_sweep_on_closed_form() {
    let src = iid(0.5, 2);
    let d = DistortionSpec::hamming(2, 2).unwrap();
    let grid: Vec<Slope> = (0..8).map(|k| s(-4.0 + 0.5 * k as f64)).collect();
    let c = rd_curve(&src, &d, &grid, &BaaConfig::default(), CurveMode::WarmStart).unwrap();
    for p in &c {
        assert!((p.rate_nats - (LN_2 - h2(p.distortion))).abs() < 1e-5);
        assert!((p.rate_nats - analytic_binary_rdf(0.5, p.distortion).unwrap()).abs() < 1e-5);
        assert!(p.rate_cross_check < 1e-8);
    }
    assert!(CurveShape::check(&c, 1e-9).holds());
    let single = rd_curve(&src, &d, &[s(0.0)], &BaaConfig::default(), CurveMode::WarmStart).unwrap();
    assert_eq!(single.len(), 1);
    assert!(single[0].rate_nats.abs() < 1e-15);
}

#[test]
fn markov_horizon_four_curve_and_oracle_cross_check() {
    let d4 = DistortionSpec::hamming(2, 4).unwrap();
    let grid: Vec<Slope> = (0..10).map(|k| s(-3.5 + 0.3 * k as f64)).collect();
    for rule in [UpdateRule::Stationary, UpdateRule::CausalExact] {
        let cfg = BaaConfig::default().with_rule(rule);
        let c = rd_curve(&markov(0.3, 0.3, 4), &d4, &grid, &cfg, CurveMode::WarmStart).unwrap();
        assert!(c.iter().all(|p| p.converged));
        assert!(CurveShape::check(&c, 1e-7).holds());
    }
    let src1 = markov(0.3, 0.3, 1);
    let d1 = DistortionSpec::hamming(2, 1).unwrap();
    let oracle = grid_lagrangian_min(&src1, &d1, s(-2.0), 0.02).unwrap();
    let t = baa_run(&src1, &d1, s(-2.0), &BaaConfig::default().with_rule(UpdateRule::CausalExact)).unwrap();
    assert!((t.final_objective() - oracle.value_nats).abs() < 0.06);
    assert!(oracle.value_nats >= t.final_objective() - 1e-12);
}

#[test]
fn classical_baseline_sweep() {
    let b = FinitePmf::bernoulli(0.7).unwrap();
    let rho = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    for k in 0..12 {
        let slope = s(-6.0 + 0.4 * k as f64);
        let rep = classical_blahut(&b, &rho, slope).unwrap();
        assert!(rep.converged);
        let dd = rep.distortion.unwrap();
        if dd < 0.3 - 1e-3 {
            assert!((rep.value_nats - analytic_binary_rdf(0.7, dd).unwrap()).abs() < 1e-6);
        }
    }
}

#[test]
fn grid_rejects_long_horizons() {
    let src = iid(0.5, 2);
    let d = DistortionSpec::hamming(2, 2).unwrap();
    assert!(matches!(grid_lagrangian_min(&src, &d, s(-1.0), 0.05), Err(Error::TooLarge(_))));
}
