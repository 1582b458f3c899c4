use approx::assert_relative_eq;
use ltlab::constants::*;
use ltlab::quad::QuadOptions;
use ltlab::rumin::{rumin_functional, TrialPair};
use ltlab::spectral::Operator;
use ltlab::spectral::{spectrum_1d, GridOptions, PotentialSpec};
use ltlab::sphere::{cumulative_count, cumulative_count_closed, multiplicity};
use ltlab::stability::{default_k3, stability_bound, MatterSystem};
use ltlab::Execution;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duality_round_trip(k in -3i32..=3, d in 1u32..=10) {
        let l = 10f64.powi(k);
        let back = duality_l_from_k(duality_k_from_l(l, d).unwrap(), d).unwrap();
        prop_assert!(((back - l) / l).abs() < 1e-12);
    }

    #[test]
    fn keller_round_trip(t in 0.01f64..0.99, d in 1u32..=6, k1 in 0.1f64..10.0) {
        let pmax = if d <= 2 { 8.0 } else { max_sobolev_p(d) };
        let p = 1.0 + t * (pmax - 1.0);
        let l1 = keller_duality(p, d, k1).unwrap();
        let back = keller_duality_inverse(p, d, l1).unwrap();
        prop_assert!(((back - k1) / k1).abs() < 1e-11);
        let g = gamma_from_p(p, d);
        prop_assert!((p_from_gamma(g, d) - p).abs() < 1e-12 * p);
    }

    #[test]
    fn aizenman_lieb_identity(e in 0.1f64..5.0, gamma in 0.0f64..2.0, gap in 0.2f64..2.0) {
        // E₋^σ = C ∫_0^∞ (E+τ)₋^γ τ^{σ−γ−1} dτ with E = −e
        let sigma = gamma + gap;
        let c = aizenman_lieb_constant(gamma, sigma).unwrap();
        let f = |t: f64| if t <= 0.0 || t >= e { 0.0 } else { (e - t).powf(gamma) * t.powf(sigma - gamma - 1.0) };
        let opts = QuadOptions::tol(1e-14, 1e-11);
        let rhs = ltlab::quad::integrate_points(f, &[0.0, 0.5 * e, e], &opts).unwrap().value;
        prop_assert!(((c * rhs - e.powf(sigma)) / e.powf(sigma)).abs() < 1e-8, "{} vs {}", c * rhs, e.powf(sigma));
    }

    #[test]
    fn sturm_count_matches_eigenvalues(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(5..80);
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let op = Operator::new(diag, off, (0..n).map(|i| i as f64).collect(), 1.0);
        let all = op.eigenvalues_below(20.0, Execution::Sequential);
        prop_assert_eq!(all.len(), n);
        for _ in 0..10 {
            let t = rng.gen_range(-8.0..8.0);
            prop_assert_eq!(op.count_below(t), all.iter().filter(|&&e| e < t).count());
        }
    }

    #[test]
    fn sphere_counts_exact(d in 3u32..=10, l in 0u64..=60) {
        let sum = (0..=l).map(|k| multiplicity(d, k).unwrap()).fold(num_bigint::BigUint::from(0u32), |a, b| a + b);
        prop_assert_eq!(&sum, &cumulative_count(d, l).unwrap());
        prop_assert_eq!(sum, cumulative_count_closed(d, l).unwrap());
    }

    #[test]
    fn stability_monotone(n in 1u64..1000, k in 1u64..1000, z in 0.0f64..100.0, dz in 0.01f64..5.0, extra in 1u64..50, boost in 1.0f64..3.0) {
        let base = MatterSystem::new(n, k, z, default_k3()).unwrap();
        let b = stability_bound(&base);
        prop_assert!(b < 0.0);
        prop_assert!(stability_bound(&MatterSystem::new(n, k, z + dz, default_k3()).unwrap()) < b);
        prop_assert!(stability_bound(&MatterSystem::new(n + extra, k, z, default_k3()).unwrap()) < b);
        let better = default_k3().scaled(boost, "larger lower bound").unwrap();
        prop_assert!(stability_bound(&MatterSystem::new(n, k, z, better).unwrap()) >= b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sturm_count_on_discretized_potentials(depth in 0.5f64..20.0, width in 0.3f64..3.0, seed in any::<u64>()) {
        let v = PotentialSpec::gaussian(depth, width, 1).unwrap();
        let opts = GridOptions { richardson: false, ..GridOptions::with(15.0, 0.01) };
        let s = spectrum_1d(&v, &opts, 0.0).unwrap();
        let op = ltlab::spectral::discretize_1d(&v, 15.0, 0.01, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let t = rng.gen_range(-depth..0.0);
            prop_assert_eq!(s.count_below(t) as usize, op.count_below(t));
        }
    }

    #[test]
    fn rumin_stays_above_lower_guard(a in 3.0f64..6.0, b in 0.15f64..0.4, c in 0.2f64..0.6, e in 1.5f64..3.0) {
        let tp = TrialPair::parametric([a, b, c, e]).unwrap();
        if let Ok(v) = rumin_functional(&tp, 1) {
            prop_assert!(v >= 2.0 / 3.0 - 1e-9);
        }
    }
}

#[test]
fn classical_constant_cross_formula() {
    for d in 1..=10 {
        let w = unit_ball_volume(d).unwrap();
        let direct = 2.0 / (d as f64 + 2.0) * w / (2.0 * std::f64::consts::PI).powi(d as i32);
        assert_relative_eq!(classical_l_value(1.0, d), direct, max_relative = 1e-12);
    }
}

#[test]
fn one_particle_ratio_decreasing_and_crossing() {
    let ratio = |g: f64| one_particle_l_1d(g).unwrap().value() / classical_l_value(g, 1);
    let grid: Vec<f64> = (0..=25).map(|i| 0.5 + 0.1 * i as f64).collect();
    assert!(grid.windows(2).all(|w| ratio(w[1]) < ratio(w[0])));
    assert_relative_eq!(ratio(1.5), 1.0, max_relative = 1e-10);
}

#[test]
fn richardson_is_second_order() {
    let v = PotentialSpec::poschl_teller(2.0);
    let err = |h: f64| {
        let o = GridOptions { richardson: false, ..GridOptions::with(20.0, h) };
        (spectrum_1d(&v, &o, 0.0).unwrap().eigenvalues[0] + 4.0).abs()
    };
    let (e1, e2) = (err(0.02), err(0.01));
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.1, "observed order {order}");
}

#[test]
fn box_size_robustness() {
    let v = PotentialSpec::poschl_teller(2.0);
    let a = spectrum_1d(&v, &GridOptions::with(12.0, 2e-3), 0.0).unwrap();
    let b = spectrum_1d(&v, &GridOptions::with(24.0, 2e-3), 0.0).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() < 1e-8, "{x} vs {y}");
    }
}
