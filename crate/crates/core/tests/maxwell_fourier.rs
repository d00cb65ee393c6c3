use inelastic_core::maxwell_fourier::*;
use inelastic_core::profile::maxwell_profile;
use inelastic_core::{Error, Grid};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> FourierGrid {
    FourierGrid::new(1e-4, 40.0, 16).unwrap()
}

#[test]
fn maxwell_transform_values() {
    assert_eq!(h_hat(0.0, 1.0), 1.0);
    assert!((h_hat(1.0, 1.0) - 2.0 / std::f64::consts::E).abs() < 1e-15);
    for lambda in [0.5, 1.0, 3.0] {
        let e = 1e-5;
        let d2 = (h_hat(e, lambda) - 2.0 * h_hat(0.0, lambda) + h_hat(-e, lambda)) / (e * e);
        assert!((d2 + 1.0 / (lambda * lambda)).abs() < 1e-4, "{d2}");
    }
    for s in [1e-3, 0.05, 0.0999, 0.1, 0.5, 4.0] {
        assert!((h_hat_deficit(s) - (1.0 - h_hat(s, 1.0))).abs() < 1e-15);
    }
}

#[test]
fn maxwellian_is_a_fixed_point_of_the_scheme() {
    let h = FourierField::maxwell(grid(), 1.0).unwrap();
    let next = fourier_step(&h, grid().dt()).unwrap();
    let diff = h.deficit.iter().zip(&next.deficit).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn k_distance_needs_equal_energies() {
    let a = FourierField::maxwell(grid(), 1.0).unwrap();
    let b = FourierField::maxwell(grid(), 2.0).unwrap();
    assert!(matches!(k_norm(&a, &b, 2.5), Err(Error::MomentMismatch(..))));
    assert_eq!(k_norm(&a, &a, 2.5).unwrap(), 0.0);
}

#[test]
fn cubic_deficit_has_the_analytic_k_distance() {
    let g = FourierGrid::new(1e-3, 10.0, 256).unwrap();
    let a = FourierField::from_deficit(g, 1.0, |xi| Complex64::new(xi.powi(3) * (-xi * xi).exp(), 0.0));
    let b = FourierField::from_deficit(g, 1.0, |_| Complex64::new(0.0, 0.0));
    let d = k_norm(&a, &b, 2.5).unwrap();
    let exact = 0.5f64.sqrt() * (-0.25f64).exp();
    assert!((d - exact).abs() < 1e-5, "{d} vs {exact}");
}

#[test]
fn sampled_maxwellian_transforms_to_the_closed_form() {
    let l = 200.0;
    let h = maxwell_profile(Grid::new(l, 8192).unwrap(), 1.0).unwrap();
    let g = FourierGrid::new(1e-3, 5.0, 16).unwrap();
    let f = profile_to_fourier(&h, g);
    for (j, v) in f.values().iter().enumerate() {
        assert!(v.im.abs() <= 1e-12);
        assert!(v.norm() <= 1.0);
        assert!((v.re - h_hat(g.xi(j), 1.0)).abs() < 2.0 / (std::f64::consts::PI * l), "{j}");
    }
}

#[test]
fn contraction_from_equilibrium_is_zero() {
    let g = FourierGrid::new(1e-6, 40.0, 16).unwrap();
    let h = FourierField::maxwell(g, 1.0).unwrap();
    let rep = contraction_measurement(&h, 1.0, 2.5, 10.0).unwrap();
    assert!(rep.series.iter().all(|(_, d)| *d == 0.0));
    assert_eq!(rep.monotonicity_violations, 0);
}

#[test]
fn gaussian_contracts_at_least_at_the_predicted_rate() {
    let g = FourierGrid::new(1e-8, 60.0, 16).unwrap();
    let phi = FourierField::gaussian(g, 1.0).unwrap();
    let rep = contraction_measurement(&phi, 1.0, 2.5, 100.0).unwrap();
    assert!(rep.fitted_rate >= 0.9 * sigma_rate(2.5), "{}", rep.fitted_rate);
    assert_eq!(rep.monotonicity_violations, 0);
    assert!(rep.decay_csv().lines().count() == rep.series.len() + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn characteristic_bound_is_preserved(energy in 0.2f64..3.0) {
        let g = FourierGrid::new(1e-4, 40.0, 16).unwrap();
        let mut phi = FourierField::gaussian(g, energy).unwrap();
        phi = fourier_step(&phi, 40.0 * g.dt()).unwrap();
        prop_assert!(phi.values().iter().all(|v| v.norm() <= 1.0 + 1e-12));
        prop_assert!((phi.energy - energy).abs() < 1e-12);
    }
}
