use proptest::prelude::*;
use scatlab::core::SpatialGrid;
use scatlab::jost::{
    connection_coeffs, h_plus, h_plus_prime, integrate_jost_plus, jost_minus, matching_data, scattering_coeffs,
    tau0, wronskian, zero_energy_pair, JostOptions, Mode,
};
use scatlab::{Error, C64};

/// `(xi, T, R)` from `tools/scattering_oracle.py` (scipy DOP853, rtol 1e-13,
/// matching at x = 4000).
const ORACLE: [(f64, [f64; 2], [f64; 2]); 5] = [
    (0.05, [-3.696260989184e-08, 1.778496122795e-05], [9.999978401688e-01, 2.078302538032e-03]),
    (0.2, [-3.942878837325e-05, 1.203605767590e-03], [9.994631343354e-01, 3.274130240292e-02]),
    (1.0, [-2.356079956531e-01, 1.790573009359e-01], [5.779722000902e-01, 7.605100205055e-01]),
    (3.0, [4.715469323164e-01, -8.818116360007e-01], [-6.342422432360e-03, -3.391597161269e-03]),
    (8.0, [9.232831725217e-01, -3.841200116933e-01], [-2.810423160859e-08, -6.755223197485e-08]),
];

#[test]
fn matches_frozen_oracle() {
    let opts = JostOptions::default();
    for (xi, t, r) in ORACLE {
        let c = scattering_coeffs(xi, 400.0, &opts).unwrap();
        let t_ref = C64::new(t[0], t[1]);
        let r_ref = C64::new(r[0], r[1]);
        let dt = (c.t - t_ref).norm() / t_ref.norm();
        let dr = (c.r - r_ref).norm();
        assert!(dt < 1e-6, "xi = {xi}: relative T error {dt:e}");
        assert!(dr < 1e-6, "xi = {xi}: R error {dr:e}");
    }
}

#[test]
fn free_mode_is_reflectionless() {
    let opts = JostOptions { mode: Mode::Free, ..Default::default() };
    for xi in [0.01, 0.5, 7.0] {
        let c = scattering_coeffs(xi, 400.0, &opts).unwrap();
        assert!((c.t - 1.0).norm() < 1e-14);
        assert!(c.r.norm() < 1e-14);
    }
}

#[test]
fn h_plus_solves_the_inverse_square_equation() {
    for u in [2.0, 3.0, 40.0] {
        let h = 1e-3;
        let d2 = (h_plus(u + h).unwrap() - 2.0 * h_plus(u).unwrap() + h_plus(u - h).unwrap()) / (h * h);
        let res = -d2 + h_plus(u).unwrap() * (2.0 / (u * u) - 1.0);
        assert!(res.norm() < 1e-5, "u = {u}: {res}");
        let dh = (h_plus(u + h).unwrap() - h_plus(u - h).unwrap()) / (2.0 * h);
        assert!((dh - h_plus_prime(u)).norm() < 1e-6);
    }
    assert!(h_plus(0.0).is_err());
}

#[test]
fn matching_point_too_close() {
    let opts = JostOptions::default();
    assert!(matches!(matching_data(0.01, 100.0, &opts), Err(Error::MatchingPoint(_))));
    // the public shooting routine pushes the matching point out instead
    assert!(scattering_coeffs(0.01, 100.0, &opts).is_ok());
}

#[test]
fn jost_solution_on_grid() {
    let grid = SpatialGrid::new(100.0, 8001).unwrap();
    let opts = JostOptions::default();
    let xi = 0.5;
    let sol = integrate_jost_plus(xi, &grid, &opts).unwrap();
    // residual of -f'' + V f - xi^2 f from the stored derivative
    let fp = sol.fprime();
    let d = scatlab::core::derivative_x(fp).unwrap();
    let worst = (10..grid.n() - 10)
        .map(|j| {
            let x = grid.x(j);
            let f = sol.f().values[j];
            (-d.values[j] + f * (2.0 / (1.0 + x * x) - xi * xi)).norm() / (1.0 + f.norm())
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "residual {worst:e}");
    // f e^{-ix xi} -> 1 + i/(x xi)
    let j = grid.n() * 3 / 4;
    let x = grid.x(j);
    let ratio = sol.f().values[j] * C64::from_polar(1.0, -x * xi);
    assert!((ratio - C64::new(1.0, 1.0 / (x * xi))).norm() < 1e-4);
    // conjugation gives the solution at -xi
    let c = sol.conjugate();
    assert_eq!(c.xi, -xi);
    assert_eq!(c.f().values[7], sol.f().values[7].conj());
}

#[test]
fn wronskian_matches_origin_formula() {
    let grid = SpatialGrid::new(60.0, 2401).unwrap();
    let opts = JostOptions::default();
    let sol = integrate_jost_plus(1.3, &grid, &opts).unwrap();
    let minus = jost_minus(&sol).unwrap();
    let c = scattering_coeffs(1.3, 60.0, &opts).unwrap();
    for x in [-20.0, 0.0, 13.7] {
        let w = wronskian(&sol, &minus, x).unwrap();
        assert!((w - c.w).norm() < 1e-6 * c.w.norm(), "x = {x}: {w} vs {}", c.w);
    }
}

#[test]
fn zero_energy_wronskian() {
    let grid = SpatialGrid::new(5.0, 101).unwrap();
    let (f1, f2) = zero_energy_pair(&grid);
    for j in [0, 37, 100] {
        assert!((f1.wronskian_at(&f2, j) + 2.0).norm() < 1e-12);
    }
}

#[test]
fn tau0_branches_agree() {
    // series below 1e-3, closed form above
    let below = tau0(1e-3 * (1.0 - 1e-12));
    let above = tau0(1e-3 * (1.0 + 1e-12));
    assert!((below - above).abs() < 1e-15);
    let x: f64 = 0.1;
    let s = 1.0 + x * x;
    assert!((tau0(x) - (3.0 * x * x + 8.0 + 4.0 * s.ln() - 8.0 / s) / 30.0).abs() < 1e-16);
    assert_eq!(tau0(0.0), 0.0);
}

#[test]
fn connection_coefficient_scaling() {
    let opts = JostOptions::default();
    let c = connection_coeffs(0.02, 0.5, 400.0, &opts).unwrap();
    assert!((c.c2 * 0.02 + C64::new(0.0, 3.0)).norm() < 0.15);
    assert!(connection_coeffs(2.0, 0.5, 400.0, &opts).is_err());
}

#[test]
fn high_energy_phase() {
    // first Born approximation: T ~ exp(-i pi / xi) since int V = 2 pi
    let c = scattering_coeffs(8.0, 400.0, &JostOptions::default()).unwrap();
    assert!((c.t - C64::from_polar(1.0, -std::f64::consts::PI / 8.0)).norm() < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unitarity(log_xi in (0.05f64).ln()..(8.0f64).ln()) {
        let c = scattering_coeffs(log_xi.exp(), 400.0, &JostOptions::default()).unwrap();
        prop_assert!(c.unitarity_defect() < 1e-6);
        let n = c.at_negative();
        prop_assert!((n.t - c.t.conj()).norm() == 0.0);
    }
}
