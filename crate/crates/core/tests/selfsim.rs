use inelastic_core::functionals::i_gamma_functional;
use inelastic_core::profile::{maxwell_profile, moment};
use inelastic_core::selfsim::*;
use inelastic_core::{Error, Grid, Profile};
use proptest::prelude::*;

fn cfg(gamma: f64, l: f64, n: usize) -> SolverConfig {
    SolverConfig::new(Grid::new(l, n).unwrap(), gamma, 0.25)
}

#[test]
fn drift_of_zero_is_zero() {
    let g = Profile::zeros(Grid::new(10.0, 64).unwrap());
    assert!(drift_apply(&g, 0.25).unwrap().values.iter().all(|v| *v == 0.0));
}

#[test]
fn maxwellian_is_a_near_fixed_point() {
    let mut res = Vec::new();
    for n in [256, 512, 1024] {
        let c = cfg(0.0, 40.0, n);
        let h = maxwell_profile(c.grid, 1.0).unwrap();
        let s = step(&h, &c).unwrap();
        let r = s.sub(&h).unwrap().values.iter().map(|v| v.abs()).sum::<f64>() * c.grid.dx() / Stepper::new(&c).unwrap().dt();
        res.push(r);
    }
    assert!(res[0] > res[1] && res[1] > res[2], "{res:?}");
}

#[test]
fn identical_starts_give_identical_profiles() {
    let mut c = cfg(0.2, 20.0, 128);
    c.steady_tol = 1e-7;
    let ic = InitialCondition::Gaussian { energy: 0.3 };
    let rep = uniqueness_test(0.2, &ic, &ic, &c).unwrap();
    assert!(rep.distance <= 1e-14, "{}", rep.distance);
    assert!(rep.same_profile);
}

#[test]
fn steady_profile_satisfies_the_moment_bounds() {
    let c = cfg(0.1, 40.0, 512);
    let init = c.init.sample(c.grid).unwrap();
    let r = relax_to_steady(&init, &c).unwrap();
    assert!(r.m2 > 0.0 && r.m2 <= 0.5, "{}", r.m2);
    let m_gamma = moment(&r.profile, 0.1);
    assert!(m_gamma >= 1.0 / (8.0 * 2f64.powf(0.1)), "{m_gamma}");
    let ig = i_gamma_functional(&r.profile, &r.profile, 0.1).unwrap();
    assert!(ig.abs() <= 10.0 * r.residual, "{ig} vs {}", r.residual);
    assert!((r.profile.mass() - 1.0).abs() < 1e-10);
    assert!(r.profile.asymmetry() < 1e-12);
}

#[test]
fn energy_grows_when_c_is_not_a_quarter() {
    let mut c = cfg(0.0, 40.0, 256);
    c.c = 0.5;
    c.max_time = 6.0;
    let init = c.init.sample(c.grid).unwrap();
    match relax_to_steady(&init, &c) {
        Err(Error::NotConverged { energy_growth_rate, .. }) => {
            assert!((energy_growth_rate - 0.5).abs() < 0.05, "{energy_growth_rate}")
        }
        other => panic!("expected NotConverged, got {other:?}"),
    }
}

#[test]
fn sweep_entries_stay_below_the_energy_bound() {
    let mut c = cfg(0.2, 30.0, 256);
    c.steady_tol = 1e-7;
    let sweep = gamma_sweep(&[0.1, 0.2], &c).unwrap();
    assert_eq!(sweep.iter().map(|e| e.gamma).collect::<Vec<_>>(), [0.2, 0.1]);
    for e in &sweep {
        assert!(e.converged);
        assert!(e.result.m2 <= 0.5);
        assert!((e.lambda_hat - e.result.m2.powf(-0.5)).abs() < 1e-12);
    }
    assert!(sweep[1].distance_to_limit < sweep[0].distance_to_limit);
}

#[test]
fn history_csv_has_a_row_per_sample() {
    let mut c = cfg(0.2, 20.0, 128);
    c.max_time = 3.0;
    let init = c.init.sample(c.grid).unwrap();
    let best = match relax_to_steady(&init, &c) {
        Err(Error::NotConverged { best, .. }) => *best,
        Ok(r) => r,
        Err(e) => panic!("{e}"),
    };
    let csv = best.history_csv();
    assert_eq!(csv.lines().count(), best.history.len() + 1);
    assert!(best.history.len() >= 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn step_keeps_positivity_and_mass(energy in 0.1f64..2.0, gamma in 0.0f64..1.0, uniform in any::<bool>()) {
        let c = cfg(gamma, 12.0, 128);
        let ic = if uniform { InitialCondition::Uniform { energy } } else { InitialCondition::Gaussian { energy } };
        let mut g = ic.sample(c.grid).unwrap();
        for _ in 0..20 {
            let next = step(&g, &c).unwrap();
            prop_assert!(next.values.iter().all(|v| *v >= 0.0));
            prop_assert!((next.mass() - g.mass()).abs() <= 1e-12);
            g = next;
        }
    }

    #[test]
    fn drift_telescopes(seed in 0u64..1000) {
        let grid = Grid::new(10.0, 100).unwrap();
        let v: Vec<f64> = (0..100).map(|i| ((seed + 1) as f64 * 0.731 * i as f64).sin().abs()).collect();
        let g = Profile::density(grid, v).unwrap();
        let d = drift_apply(&g, 0.25).unwrap();
        prop_assert!(d.mass().abs() <= 1e-12 * g.mass().max(1.0) * 10.0);
    }
}
