use std::sync::OnceLock;

use scatlab::core::{l2_norm, linf_norm, relative_l2, ComplexField, FrequencyGrid, SpatialGrid};
use scatlab::dft::{BasisOptions, DistortedBasis};
use scatlab::galilei::{apply_j0, apply_jv, compare_fields, cubic_ratio, nullform_residual, Derivative};
use scatlab::jost::Mode;
use scatlab::nls::{
    cauchy_data, data_norm, default_record_times, evolve, strang_step, EvolutionState, LinearFlow, LinearStep,
    SolverConfig, SplitPropagator, GAUSSIAN_DATA_NORM,
};
use scatlab::prop::{evolve_linear, free_gaussian};
use scatlab::C64;

/// Periodic grid with `|x| <= 512` and the hybrid basis used by the solver.
fn hybrid_basis() -> &'static DistortedBasis {
    static B: OnceLock<DistortedBasis> = OnceLock::new();
    B.get_or_init(|| {
        let g = SpatialGrid::with_spacing(0.125, 8192).unwrap();
        let f = FrequencyGrid::fourier_dual(&g, g.fourier_spacing(), 8.0).unwrap();
        DistortedBasis::build(g, f, &BasisOptions::default().with_core(20.0)).unwrap()
    })
}

#[test]
fn gaussian_data_norm() {
    // ||<x> g|| = (5/4 sqrt(pi/2))^{1/2}, ||g||_{H^1} = (2 sqrt(pi/2))^{1/2}
    let c = (std::f64::consts::PI / 2.0).sqrt();
    let closed = (1.25 * c).sqrt() + (2.0 * c).sqrt();
    assert!((closed - GAUSSIAN_DATA_NORM).abs() < 1e-14);
    let g = SpatialGrid::with_spacing(0.05, 1024).unwrap();
    let f = ComplexField::from_real_fn(g, |x| (-x * x).exp());
    assert!((data_norm(&f).unwrap() - GAUSSIAN_DATA_NORM).abs() < 1e-12);
    assert!((data_norm(&cauchy_data(0.05, g)).unwrap() - 0.05).abs() < 1e-12);
}

#[test]
fn step_rule_and_record_times() {
    let c = SolverConfig::default();
    assert_eq!(c.step_size(1.0), 0.01);
    assert!((c.step_size(50.0) - 0.05).abs() < 1e-15);
    assert_eq!(c.step_size(400.0), 0.1);
    let r = default_record_times(400.0);
    assert_eq!(r[0], 1.0);
    assert_eq!(*r.last().unwrap(), 400.0);
    assert!(r.windows(2).all(|w| w[1] > w[0]));
    for t in [50.0, 100.0, 200.0] {
        assert!(r.iter().any(|&s| (s - t).abs() < 1e-9), "{t} missing");
    }
}

#[test]
fn solver_validation() {
    let ok = SolverConfig::default();
    assert!(ok.validate().is_ok());
    assert!(SolverConfig { mu: 2, ..ok.clone() }.validate().is_err());
    assert!(SolverConfig { dt0: 0.02, dt_max: 0.1, ..ok.clone() }.validate().is_err());
    assert!(SolverConfig { record_times: vec![2.0, 1.5], ..ok.clone() }.validate().is_err());
    assert!(SolverConfig { record_times: vec![500.0], ..ok }.validate().is_err());
}

#[test]
fn split_flow_matches_free_closed_form() {
    let g = SpatialGrid::with_spacing(0.1, 2048).unwrap();
    let p = SplitPropagator::new(g, Mode::Free);
    let (a, k) = (0.5, 2.0);
    let f = ComplexField::from_fn(g, |x| C64::new(-a * x * x, k * x).exp());
    let u = p.evolve_linear(&f, 3.0, 10);
    let exact = ComplexField::from_fn(g, |x| free_gaussian(a, k, x, 3.0));
    assert!(relative_l2(&u, &exact).unwrap() < 1e-10);
}

#[test]
fn split_flow_matches_distorted_flow() {
    let b = hybrid_basis();
    let p = SplitPropagator::new(*b.spatial_grid(), Mode::Potential);
    let f = ComplexField::from_fn(*b.spatial_grid(), |x| C64::new(-0.25 * x * x, 2.0 * x).exp());
    let split = p.evolve_linear(&f, 5.0, 500);
    let distorted = evolve_linear(&f, 5.0, b).unwrap();
    // limited by the frequency cut-off xi_max = 8 of the distorted basis
    let d = relative_l2(&split, &distorted).unwrap();
    assert!(d < 2e-4, "defect {d:e}");
    // the split flow is exactly unitary
    let drift = (l2_norm(&split) / l2_norm(&f) - 1.0).abs();
    assert!(drift < 1e-12, "{drift:e}");
}

#[test]
fn linear_strang_steps_are_second_order() {
    let b = hybrid_basis();
    let g = *b.spatial_grid();
    let flow = LinearFlow::new(LinearStep::Split, b);
    let u = cauchy_data(0.05, g);
    let reference = SplitPropagator::new(g, Mode::Potential).evolve_linear(&u, 0.5, 200);
    let error = |n: usize| {
        let mut s = EvolutionState::new(1.0, u.clone());
        for _ in 0..n {
            s = strang_step(&s, 0.5 / n as f64, 0, &flow).unwrap();
        }
        assert!((s.t - 1.5).abs() < 1e-12);
        relative_l2(&s.u, &reference).unwrap()
    };
    let ratio = error(10) / error(20);
    assert!((3.5..4.5).contains(&ratio), "error ratio {ratio}");
}

#[test]
fn short_nonlinear_run() {
    let b = hybrid_basis();
    let record = default_record_times(10.0);
    let config = SolverConfig { t_end: 10.0, record_times: record.clone(), ..Default::default() };
    let mut seen = Vec::new();
    let mut worst_nullform: f64 = 0.0;
    let run = evolve(&config, b, |s| {
        seen.push(s.t);
        worst_nullform = worst_nullform.max(nullform_residual(&s.u, s.t, Derivative::Spectral)?);
        Ok(())
    })
    .unwrap();
    assert!(run.aborted.is_none());
    assert_eq!(seen.len(), record.len());
    for (a, b) in seen.iter().zip(&record) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!((run.state.t - 10.0).abs() < 1e-9);
    assert!(run.series.mass_drift() < 1e-10);
    assert!(run.series.a_sup() <= 2.0 * run.series.a_vals[0]);
    assert!(worst_nullform < 1e-10);
}

#[test]
fn boundary_contact_stops_the_run() {
    let g = SpatialGrid::with_spacing(0.125, 512).unwrap();
    let f = FrequencyGrid::fourier_dual(&g, g.fourier_spacing(), 8.0).unwrap();
    let b = DistortedBasis::build(g, f, &BasisOptions::default().with_core(10.0)).unwrap();
    let config = SolverConfig { t_end: 100.0, record_times: vec![1.0, 100.0], ..Default::default() };
    let run = evolve(&config, &b, |_| Ok(())).unwrap();
    assert!(run.aborted.is_some());
    assert!(run.state.t < 100.0);
}

#[test]
fn galilei_operator_on_gaussian() {
    let g = SpatialGrid::new(10.0, 2001).unwrap();
    let f = ComplexField::from_real_fn(g, |x| (-x * x).exp());
    let j = apply_j0(&f, 2.0, Derivative::Stencil).unwrap();
    // (x - 4i d/dx) e^{-x^2} = (x + 8ix) e^{-x^2}
    let exact = ComplexField::from_fn(g, |x| C64::new(x, 8.0 * x) * (-x * x).exp());
    let d = relative_l2(&j, &exact).unwrap();
    assert!(d < 1e-7, "{d:e}");
    let spectral = apply_j0(&f, 2.0, Derivative::Spectral).unwrap();
    assert!(relative_l2(&spectral, &exact).unwrap() < 1e-12);
}

#[test]
fn free_distorted_field_is_j0() {
    let g = SpatialGrid::with_spacing(0.125, 2048).unwrap();
    let f = FrequencyGrid::fourier_dual(&g, g.fourier_spacing(), 12.0).unwrap();
    let b = DistortedBasis::build(g, f, &BasisOptions::free()).unwrap();
    // spectrum e^{-(xi - 6)^2 / 2}: negligible at the excluded zero bin. J_V(t)
    // is meant for states at time t, whose de-chirped spectra are smooth.
    let f = ComplexField::from_fn(g, |x| C64::new(-0.5 * x * x, 6.0 * x).exp());
    let u = evolve_linear(&f, 3.0, &b).unwrap();
    let jv = apply_jv(&u, 3.0, &b).unwrap();
    let j0 = apply_j0(&u, 3.0, Derivative::Spectral).unwrap();
    let d = relative_l2(&jv, &j0).unwrap();
    assert!(d < 1e-6, "{d:e}");
}

#[test]
fn comparison_constant_is_stable() {
    let b = hybrid_basis();
    let f = ComplexField::from_real_fn(*b.spatial_grid(), |x| (-x * x).exp());
    let ratios: Vec<f64> =
        [1.0, 10.0, 100.0].iter().map(|&t| compare_fields(&f, t, b).unwrap().comparison_ratio).collect();
    assert!(ratios.iter().all(|&r| r > 0.0 && r <= 20.0), "{ratios:?}");
}

#[test]
fn nullform_identity_holds_for_smooth_fields() {
    let g = SpatialGrid::with_spacing(0.05, 2048).unwrap();
    let u = ComplexField::from_fn(g, |x| {
        C64::new(-x * x / 8.0, 0.3 * x * x).exp() * C64::new(1.0 + 0.2 * x, -0.5)
    });
    assert!(nullform_residual(&u, 7.0, Derivative::Spectral).unwrap() < 1e-10);
    assert!(nullform_residual(&ComplexField::zeros(g), 1.0, Derivative::Spectral).unwrap() == 0.0);
}

#[test]
fn cubic_ratio_along_linear_flow() {
    let b = hybrid_basis();
    let data = cauchy_data(0.05, *b.spatial_grid());
    for t in [1.0, 10.0] {
        let u = evolve_linear(&data, t, b).unwrap();
        let r = cubic_ratio(&u, t, b).unwrap();
        assert!(r.ratio > 0.0 && r.ratio < 1.0, "t = {t}: {r:?}");
        assert!(r.w >= t.sqrt() * linf_norm(&u));
    }
}
