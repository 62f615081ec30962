use approx::assert_relative_eq;
use proptest::prelude::*;
use scatlab::core::{
    derivative_x, derivative_xi, inner, l2_norm, linf_norm, log_space, quadrature, ComplexField, Fourier,
    FrequencyGrid, SpatialGrid, SpectralField,
};
use scatlab::ode::Dopri5;
use scatlab::C64;

#[test]
fn spatial_grid_is_symmetric() {
    let g = SpatialGrid::new(10.0, 201).unwrap();
    assert_relative_eq!(g.dx(), 0.1, epsilon = 1e-15);
    for j in 0..g.n() {
        assert_relative_eq!(g.x(j), -g.x(g.mirror(j)), epsilon = 1e-13);
    }
    assert!(SpatialGrid::new(10.0, 1).is_err());
    assert!(SpatialGrid::new(-1.0, 11).is_err());
}

#[test]
fn gaussian_integral() {
    let g = SpatialGrid::new(12.0, 2401).unwrap();
    let f = ComplexField::from_real_fn(g, |x| (-x * x).exp());
    let q = quadrature(&f).unwrap();
    assert_relative_eq!(q.re, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
    // ||e^{-x^2}||_2^2 = sqrt(pi/2)
    assert_relative_eq!(l2_norm(&f).powi(2), (std::f64::consts::PI / 2.0).sqrt(), epsilon = 1e-12);
    assert_relative_eq!(linf_norm(&f), 1.0, epsilon = 1e-15);
}

#[test]
fn stencil_is_fourth_order() {
    let err = |n: usize| {
        let g = SpatialGrid::new(3.0, n).unwrap();
        let f = ComplexField::from_fn(g, |x| C64::new(0.0, 2.0 * x).exp() * (-x * x).exp());
        let d = derivative_x(&f).unwrap();
        (0..n)
            .map(|j| {
                let x = g.x(j);
                let exact = C64::new(-2.0 * x, 2.0) * C64::new(-x * x, 2.0 * x).exp();
                (d.values[j] - exact).norm()
            })
            .fold(0.0, f64::max)
    };
    let order = (err(301) / err(601)).log2();
    assert!(order > 3.7, "observed order {order}");
}

#[test]
fn stencil_is_exact_on_quartics() {
    let g = SpatialGrid::new(1.0, 11).unwrap();
    let f = ComplexField::from_real_fn(g, |x| x.powi(4) - 2.0 * x * x + x);
    let d = derivative_x(&f).unwrap();
    for j in 0..g.n() {
        let x = g.x(j);
        assert_relative_eq!(d.values[j].re, 4.0 * x.powi(3) - 4.0 * x + 1.0, epsilon = 1e-11);
    }
}

#[test]
fn frequency_grid_layout() {
    let fg = FrequencyGrid::new(0.1, 2.0, 20).unwrap();
    assert_eq!(fg.len(), 40);
    assert_relative_eq!(fg.value(fg.index_pos(0)), 0.1);
    assert_relative_eq!(fg.value(fg.index_neg(0)), -0.1);
    assert_relative_eq!(fg.value(fg.index_pos(19)), 2.0);
    assert_relative_eq!(fg.value(0), -2.0);
    let vals = fg.values();
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
    assert!(FrequencyGrid::new(0.0, 1.0, 10).is_err());
}

#[test]
fn derivative_xi_never_crosses_the_gap() {
    let fg = FrequencyGrid::new(0.5, 3.0, 101).unwrap();
    // sign(xi): constant on each half-line, so the derivative vanishes.
    let s = SpectralField::from_fn(fg, |xi| C64::new(xi.signum(), 0.0));
    let d = derivative_xi(&s).unwrap();
    assert!(linf_norm(&d) < 1e-12);
}

#[test]
fn fourier_dual_matches_fft_bins() {
    let g = SpatialGrid::with_spacing(0.25, 256).unwrap();
    let fg = FrequencyGrid::fourier_dual(&g, 0.1, 3.0).unwrap();
    let dk = g.fourier_spacing();
    assert_relative_eq!(fg.dxi(), dk, epsilon = 1e-12);
    let k0 = fg.fourier_offset(&g).unwrap();
    assert_relative_eq!(k0 as f64 * dk, fg.xi_min(), epsilon = 1e-12);
}

#[test]
fn fourier_multiplier_differentiates() {
    let g = SpatialGrid::with_spacing(0.1, 512).unwrap();
    let fourier = Fourier::new(g);
    let mut v: Vec<C64> = (0..g.n()).map(|j| C64::new((-g.x(j).powi(2)).exp(), 0.0)).collect();
    fourier.apply_multiplier(&mut v, |k| C64::new(0.0, k));
    for j in 0..g.n() {
        let x = g.x(j);
        assert!((v[j].re + 2.0 * x * (-x * x).exp()).abs() < 1e-10);
    }
}

#[test]
fn log_space_endpoints() {
    let t = log_space(10.0, 200.0, 20);
    assert_eq!(t.len(), 20);
    assert_relative_eq!(t[0], 10.0, epsilon = 1e-12);
    assert_relative_eq!(t[19], 200.0, epsilon = 1e-10);
    let ratio = t[1] / t[0];
    assert!(t.windows(2).all(|w| (w[1] / w[0] - ratio).abs() < 1e-12));
}

#[test]
fn dopri_matches_exponential() {
    // y' = i y, y(0) = 1
    let (ys, stats) = Dopri5::new(1e-12)
        .solve(|_, y: &[C64; 1]| [C64::new(0.0, 1.0) * y[0]], 0.0, [C64::new(1.0, 0.0)], &[1.0, 5.0, 20.0])
        .unwrap();
    for (y, t) in ys.iter().zip([1.0_f64, 5.0, 20.0]) {
        assert!((y[0] - C64::from_polar(1.0, t)).norm() < 1e-9, "t = {t}");
    }
    assert!(stats.accepted > 0);
}

#[test]
fn dopri_airy_backwards() {
    // y'' = -y, integrated leftwards from (0, 1, 0): cos x.
    let (ys, _) = Dopri5::new(1e-11)
        .solve(|_, y: &[C64; 2]| [y[1], -y[0]], 0.0, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &[-3.0])
        .unwrap();
    assert!((ys[0][0].re - 3.0_f64.cos()).abs() < 1e-9);
    assert!((ys[0][1].re - 3.0_f64.sin()).abs() < 1e-9);
}

proptest! {
    #[test]
    fn inner_product_is_sesquilinear(a in -3.0..3.0f64, b in -3.0..3.0f64, s in 0.3..3.0f64) {
        let g = SpatialGrid::new(10.0, 801).unwrap();
        let f = ComplexField::from_fn(g, |x| C64::new(-s * x * x, a * x).exp());
        let h = ComplexField::from_fn(g, |x| C64::new(-x * x, b * x).exp());
        let c = C64::new(a, b);
        let lhs = inner(&f.scale(c), &h).unwrap();
        let rhs = c * inner(&f, &h).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        let swapped = inner(&h, &f).unwrap().conj();
        prop_assert!((swapped - inner(&f, &h).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn reflection_is_an_involution(k in 0.0..5.0f64) {
        let g = SpatialGrid::new(4.0, 81).unwrap();
        let f = ComplexField::from_fn(g, |x| C64::new(x, k * x * x));
        prop_assert_eq!(f.reflect().reflect(), f);
    }
}
