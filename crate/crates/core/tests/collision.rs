use inelastic_core::audit::Mixture;
use inelastic_core::collision::*;
use inelastic_core::profile::maxwell_profile;
use inelastic_core::{Grid, Profile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid() -> Grid {
    Grid::new(8.0, 256).unwrap()
}

fn spike(grid: Grid, j: usize) -> Profile {
    let mut v = vec![0.0; grid.len()];
    v[j] = 1.0 / grid.dx();
    Profile::density(grid, v).unwrap()
}

#[test]
fn quadratic_weak_form_is_minus_half_the_variance() {
    // sum sum f f (x - y)^2 = 2 (M0 M2 - M1^2) exactly, so at gamma = 0 the
    // weak form of x^2 is -(M0 M2 - M1^2) / 2
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let f = Mixture::random(&mut rng).sample(grid()).unwrap();
        let (m0, m1, m2) = (f.mass(), f.momentum(), f.energy());
        let w = q_weak(&f, &f, &Monomial(2), 0.0).unwrap();
        let expect = -0.5 * (m0 * m2 - m1 * m1);
        assert!((w - expect).abs() <= 1e-12 * expect.abs(), "{w} vs {expect}");
    }
    // unit-mass Maxwellian on a wide box: M2 -> 1, so the rate -> -1/2
    let h = maxwell_profile(Grid::new(400.0, 8192).unwrap(), 1.0).unwrap();
    let w = q_weak(&h, &h, &Monomial(2), 0.0).unwrap();
    assert!((w + 0.5).abs() < 0.01, "{w}");
}

#[test]
fn frequency_of_a_spike_is_the_distance_kernel() {
    let g = grid();
    let j = 97;
    for gamma in [0.0, 0.3, 1.0] {
        let s = collision_frequency(&spike(g, j), gamma).unwrap();
        for i in 0..g.len() {
            let expect = if i == j && gamma > 0.0 { 0.0 } else { (g.x(i) - g.x(j)).abs().powf(gamma) };
            assert!((s.sigma.values[i] - expect).abs() < 1e-12 * expect.max(1.0), "{gamma} {i}");
        }
    }
}

#[test]
fn frequency_of_uniform_density_at_the_centre() {
    // (1/2) int_{-1}^{1} |y|^gamma dy = 1 / (1 + gamma)
    let gamma = 0.5;
    let mut errs = Vec::new();
    for n in [512, 1024, 2048] {
        let g = Grid::new(2.0, n).unwrap();
        let f = Profile::from_fn(g, |x| if x.abs() < 1.0 { 0.5 } else { 0.0 }).unwrap();
        let s = collision_frequency(&f, gamma).unwrap();
        let mid = 0.5 * (s.sigma.values[n / 2 - 1] + s.sigma.values[n / 2]);
        errs.push((mid - 1.0 / (1.0 + gamma)).abs());
    }
    assert!(errs[2] < errs[0] && errs[2] < 5e-3, "{errs:?}");
}

#[test]
fn maxwell_frequency_is_the_mass() {
    let h = maxwell_profile(grid(), 1.0).unwrap();
    let s = collision_frequency(&h, 0.0).unwrap();
    for v in &s.sigma.values {
        assert!((v - h.mass()).abs() < 1e-12);
    }
    assert!((s.kappa_hat - h.mass()).abs() < 1e-12);
}

#[test]
fn weak_form_of_the_grid_rate_converges_at_second_order() {
    let gamma = 0.4;
    let mut err = Vec::new();
    for n in [128, 256, 512] {
        let g = Grid::new(8.0, n).unwrap();
        let f = Profile::from_fn(g, |x| (-0.5 * x * x).exp()).unwrap();
        let q = q_apply(&f, &f, gamma).unwrap();
        let e: f64 = q.rate.values.iter().zip(g.centers()).map(|(v, x)| v * x * x).sum::<f64>() * g.dx();
        let w = q_weak(&f, &f, &Monomial(2), gamma).unwrap();
        err.push(((e - w) / w).abs());
    }
    let r1 = err[0] / err[1];
    let r2 = err[1] / err[2];
    assert!(r1 > 3.5 && r2 > 3.5, "{err:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rate_conserves_and_dissipates(seed in 0u64..10_000, gamma in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(6.0, 128).unwrap();
        let f = Mixture::random(&mut rng).sample(g).unwrap();
        let h = Mixture::random(&mut rng).sample(g).unwrap();
        let q = q_apply(&f, &h, gamma).unwrap();
        let scale = f.mass() * h.mass() * (2.0 * g.half_width()).powf(gamma);
        prop_assert!(q.rate.mass().abs() <= 1e-12 * scale);
        prop_assert!(q.rate.momentum().abs() <= 1e-12 * scale * g.half_width());
        let self_rate = q_apply(&f, &f, gamma).unwrap();
        prop_assert!(self_rate.rate.energy() <= 0.0);
        prop_assert!(self_rate.dissipation >= 0.0);
    }

    #[test]
    fn gain_minus_loss_is_the_rate(seed in 0u64..10_000, gamma in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(6.0, 96).unwrap();
        let f = Mixture::random(&mut rng).sample(g).unwrap();
        let h = Mixture::random(&mut rng).sample(g).unwrap();
        let q = q_apply(&f, &h, gamma).unwrap().rate;
        let plus = q_gain(&f, &h, gamma).unwrap();
        let minus = q_loss(&f, &h, gamma).unwrap();
        let scale = plus.sup().max(minus.sup());
        for i in 0..q.values.len() {
            prop_assert!((q.values[i] - plus.values[i] + minus.values[i]).abs() <= 1e-12 * scale);
        }
    }
}
