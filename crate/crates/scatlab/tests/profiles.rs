//! Wave-packet extraction on a synthetic field
//! `u = t^{-1/2} e^{-ix^2/(4t) - i mu |W|^2 log t} W(x/t)`, whose profile solves
//! the asymptotic ODE up to `O(1/t)`. The amplitude matches the NLS runs: the
//! three-point time difference on record times spaced by `2^{1/4}` has error
//! of order `|W|^3 / t`, which would hide the decay for large profiles.

use scatlab::core::{ComplexField, SpatialGrid};
use scatlab::nls::default_record_times;
use scatlab::scatter::{
    bump_chi, cauchy_defects, extract_asymptotics, in_outer_region, ode_residual, profile_alpha, remainder,
    ProfileSeries, VelocityGrid,
};
use scatlab::C64;

const MU: i32 = 1;

/// Centred away from `v = 0`: the inner region `|v| < 10 t^{-1/2}` carries no
/// asymptotic profile.
fn profile(v: f64) -> C64 {
    let s = v - 1.5;
    C64::new(0.05, 0.01 * s) * (-4.0 * s * s).exp()
}

fn synthetic(grid: SpatialGrid, t: f64) -> ComplexField {
    ComplexField::from_fn(grid, |x| {
        let w = profile(x / t);
        let phase = -x * x / (4.0 * t) - MU as f64 * w.norm_sqr() * t.ln();
        w * C64::from_polar(t.powf(-0.5), phase)
    })
}

fn grid() -> SpatialGrid {
    SpatialGrid::new(1400.0, 11201).unwrap()
}

fn series() -> ProfileSeries {
    let g = grid();
    let chi = bump_chi();
    let mut s = ProfileSeries::new(VelocityGrid::new(3.0, 121).unwrap());
    for t in default_record_times(400.0) {
        s.push(&synthetic(g, t), t, &chi).unwrap();
    }
    s
}

#[test]
fn bump_has_unit_mass() {
    let chi = bump_chi();
    let n = 20000;
    let h = 10.0 / n as f64;
    let total: f64 = (0..=n).map(|j| chi.eval(-5.0 + j as f64 * h)).sum::<f64>() * h;
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(chi.eval(5.0), 0.0);
    assert_eq!(chi.eval(0.3), chi.eval(-0.3));
}

#[test]
fn velocity_grid_and_regions() {
    let v = VelocityGrid::new(12.0, 801).unwrap();
    assert!((v.dv() - 0.03).abs() < 1e-15);
    assert_eq!(v.v(0), -12.0);
    assert!((v.v(800) - 12.0).abs() < 1e-12);
    assert!(VelocityGrid::new(1.0, 3).is_err());
    assert!(in_outer_region(1.0, 100.0));
    assert!(!in_outer_region(0.5, 100.0));
}

#[test]
fn alpha_recovers_the_profile() {
    let g = grid();
    let vg = VelocityGrid::new(3.0, 61).unwrap();
    let t = 400.0;
    let alpha = profile_alpha(&synthetic(g, t), t, &vg, &bump_chi());
    for (i, a) in alpha.iter().enumerate() {
        let v = vg.v(i);
        let expected = profile(v) * C64::from_polar(1.0, -profile(v).norm_sqr() * t.ln());
        assert!((a.unwrap() - expected).norm() < 2e-3, "v = {v}");
    }
    // packets leaving the grid are reported missing
    let far = profile_alpha(&synthetic(g, t), t, &VelocityGrid::new(4.0, 5).unwrap(), &bump_chi());
    assert!(far[0].is_none() && far[4].is_none() && far[2].is_some());
}

#[test]
fn asymptotic_data_and_remainder() {
    let s = series();
    let asym = extract_asymptotics(&s, MU).unwrap();
    assert_eq!(asym.t_b, 400.0);
    for i in 0..asym.vgrid.count {
        if let Some(u) = asym.u_inf[i] {
            assert!((u - profile(asym.vgrid.v(i))).norm() < 2e-3);
        }
    }
    let defects: Vec<(f64, f64)> = cauchy_defects(&s, MU, 50.0)
        .unwrap()
        .into_iter()
        .filter(|(t, _)| [100.0, 200.0, 400.0].iter().any(|d| (t - d).abs() < 1e-9))
        .collect();
    assert_eq!(defects.len(), 3);
    assert!(defects.windows(2).all(|w| w[1].1 < w[0].1), "{defects:?}");
    let r = remainder(&synthetic(grid(), 400.0), 400.0, &asym, MU).unwrap();
    assert!(r.linf < 0.1 * 0.05 / 20.0, "{r:?}");
}

#[test]
fn ode_residual_decays() {
    let s = series();
    let r = ode_residual(&s, MU).unwrap();
    assert_eq!(r.times.len(), s.times.len() - 2);
    let exponent = r.decay_exponent(10.0, 400.0).unwrap();
    assert!(exponent < -1.05, "exponent {exponent}");
}

#[test]
fn series_requires_increasing_times() {
    let g = SpatialGrid::new(50.0, 1001).unwrap();
    let mut s = ProfileSeries::new(VelocityGrid::new(1.0, 11).unwrap());
    let u = synthetic(g, 2.0);
    s.push(&u, 2.0, &bump_chi()).unwrap();
    assert!(s.push(&u, 2.0, &bump_chi()).is_err());
    assert!(extract_asymptotics(&s, MU).is_err());
}
