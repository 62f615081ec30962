use std::sync::OnceLock;

use scatlab::core::{l2_norm, relative_l2, ComplexField, FrequencyGrid, SpatialGrid};
use scatlab::dft::{plancherel_defect, round_trip_defect, BasisOptions, DistortedBasis};
use scatlab::jost::{integrate_jost_plus, JostOptions, Mode, ScatteringCoeffs};
use scatlab::prop::{dispersive_decay_fit, evolve_linear, free_gaussian, log_log_fit, preset, truncation_horizon};
use scatlab::{Error, C64};

fn small_grids() -> (SpatialGrid, FrequencyGrid) {
    (SpatialGrid::new(40.0, 1601).unwrap(), FrequencyGrid::new(0.01, 10.0, 1000).unwrap())
}

fn potential_basis() -> &'static DistortedBasis {
    static B: OnceLock<DistortedBasis> = OnceLock::new();
    B.get_or_init(|| {
        let (s, f) = small_grids();
        DistortedBasis::build(s, f, &BasisOptions::default()).unwrap()
    })
}

fn free_basis() -> &'static DistortedBasis {
    static B: OnceLock<DistortedBasis> = OnceLock::new();
    B.get_or_init(|| {
        let (s, f) = small_grids();
        DistortedBasis::build(s, f, &BasisOptions::free()).unwrap()
    })
}

#[test]
fn free_transform_is_the_fourier_transform() {
    let b = free_basis();
    let f = preset("gaussian", *b.spatial_grid()).unwrap();
    let spec = b.forward(&f).unwrap();
    let fg = b.frequency_grid();
    for k in (0..fg.len()).step_by(97) {
        let xi = fg.value(k);
        // (2 pi)^{-1/2} int e^{-x^2 - i x xi} dx
        let exact = (-xi * xi / 4.0).exp() / 2.0_f64.sqrt();
        assert!((spec.values[k] - exact).norm() < 1e-10, "xi = {xi}");
    }
}

#[test]
fn basis_symmetry() {
    let b = potential_basis();
    let (s, fg) = (b.spatial_grid(), b.frequency_grid());
    for j in [0, 123, 800, 1500] {
        for i in [0, 10, 500, 999] {
            let a = b.entry(j, fg.index_pos(i));
            let c = b.entry(s.mirror(j), fg.index_neg(i));
            assert!((a - c).norm() <= 1e-10 * (1.0 + a.norm()), "j = {j}, i = {i}");
        }
    }
}

#[test]
fn column_is_scaled_jost_solution() {
    let b = potential_basis();
    let fg = b.frequency_grid();
    let i = 200;
    let xi = fg.positive(i);
    let sol = integrate_jost_plus(xi, b.spatial_grid(), &JostOptions::default()).unwrap();
    let c = ScatteringCoeffs::from_jost(&sol).unwrap();
    let expected = sol.f().scale(c.t / (2.0 * std::f64::consts::PI).sqrt());
    let col = b.column(fg.index_pos(i));
    assert!(relative_l2(&col, &expected).unwrap() < 1e-10);
    assert!(b.column_residual(fg.index_pos(i)).unwrap() < 1e-4);
}

#[test]
fn plancherel_and_round_trip() {
    let b = potential_basis();
    for name in ["gaussian", "modulated", "odd"] {
        let f = preset(name, *b.spatial_grid()).unwrap();
        let p = plancherel_defect(&f, b).unwrap();
        let r = round_trip_defect(&f, b).unwrap();
        assert!(p < 1e-3, "{name}: plancherel {p:e}");
        assert!(r < 1e-2, "{name}: round trip {r:e}");
    }
}

#[test]
fn free_oracle_gaussian() {
    let b = free_basis();
    // spectrum e^{-(xi - 5)^2} is negligible near 0 and beyond xi_max
    let (a, k) = (0.25, 5.0);
    let f = ComplexField::from_fn(*b.spatial_grid(), |x| C64::new(-a * x * x, k * x).exp());
    for t in [0.5, 1.0] {
        let u = evolve_linear(&f, t, b).unwrap();
        let exact = ComplexField::from_fn(*b.spatial_grid(), |x| free_gaussian(a, k, x, t));
        assert!(relative_l2(&u, &exact).unwrap() < 1e-6, "t = {t}");
    }
}

#[test]
fn free_gaussian_closed_form() {
    // t = 0 returns the data; the L2 norm is conserved.
    let x = 0.7;
    let v = free_gaussian(0.3, 2.0, x, 0.0);
    assert!((v - C64::new(-0.3 * x * x, 2.0 * x).exp()).norm() < 1e-14);
    let g = SpatialGrid::new(200.0, 40001).unwrap();
    let n0 = l2_norm(&ComplexField::from_fn(g, |x| free_gaussian(0.3, 2.0, x, 0.0)));
    let n1 = l2_norm(&ComplexField::from_fn(g, |x| free_gaussian(0.3, 2.0, x, 7.0)));
    assert!((n0 - n1).abs() < 1e-10);
}

#[test]
fn linear_flow_is_unitary_and_a_group() {
    let b = potential_basis();
    let f = preset("modulated", *b.spatial_grid()).unwrap();
    let u1 = evolve_linear(&f, 1.0, b).unwrap();
    let u2 = evolve_linear(&u1, 1.5, b).unwrap();
    let direct = evolve_linear(&f, 2.5, b).unwrap();
    assert!((l2_norm(&u1) / l2_norm(&f) - 1.0).abs() < 1e-3);
    assert!(relative_l2(&u2, &direct).unwrap() < 1e-3);
}

#[test]
fn truncation_window_is_enforced() {
    let b = potential_basis();
    let horizon = truncation_horizon(b);
    assert!((horizon - 2.0).abs() < 1e-12);
    let f = preset("gaussian", *b.spatial_grid()).unwrap();
    let err = dispersive_decay_fit(&f, b, &[0.5, 1.0, 3.0]).unwrap_err();
    assert!(matches!(err, Error::Truncation { .. }));
}

#[test]
fn power_law_fit() {
    let t = [1.0, 2.0, 4.0, 8.0];
    let y: Vec<f64> = t.iter().map(|t: &f64| 3.0 * t.powf(-0.5)).collect();
    let (slope, intercept) = log_log_fit(&t, &y).unwrap();
    assert!((slope + 0.5).abs() < 1e-14);
    assert!((intercept - 3.0_f64.ln()).abs() < 1e-14);
    assert!(log_log_fit(&[1.0], &[1.0]).is_err());
    assert!(log_log_fit(&[1.0, 2.0], &[1.0, 0.0]).is_err());
}

#[test]
fn mode_switch() {
    let opts = BasisOptions::default().with_mode(Mode::Free);
    assert_eq!(opts.jost.mode, Mode::Free);
    assert!(preset("nope", small_grids().0).is_err());
}
