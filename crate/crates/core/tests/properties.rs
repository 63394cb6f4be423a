use coulomb_core::detkernel::{density_kpoint, KernelContext};
use coulomb_core::kernel::{coulomb_g, energy_delta, energy_total, gradient_energy};
use coulomb_core::stats::{ks_two_sample, w1_empirical, w1_radial_radii};
use coulomb_core::{equilibrium_for, Complex64, Configuration, Dimension, EquilibriumLabel, GasParameters, Potential};
use proptest::prelude::*;

fn separated(coords: &[f64], d: usize, min: f64) -> bool {
    let pts: Vec<&[f64]> = coords.chunks_exact(d).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let r2: f64 = pts[i].iter().zip(pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if r2.sqrt() < min {
                return false;
            }
        }
    }
    true
}

fn gas(d: usize, n: usize, potential: Potential) -> GasParameters {
    GasParameters::new(Dimension::new(d).unwrap(), n, 1.7, potential).unwrap()
}

fn potentials() -> impl Strategy<Value = Potential> {
    prop_oneof![
        (0.1f64..2.0).prop_map(|gamma| Potential::Quadratic { gamma }),
        (0.5f64..2.0).prop_map(|prefactor| Potential::SphericalLog { prefactor }),
    ]
}

fn configs() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (2usize..=4, 2usize..=12).prop_flat_map(|(d, n)| (Just(d), Just(n), prop::collection::vec(-2.0f64..2.0, d * n)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn energy_delta_matches_recompute(
        (d, n, coords) in configs(),
        v in potentials(),
        pick in 0usize..64,
        shift in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let p = gas(d, n, v);
        prop_assume!(separated(&coords, d, 1e-3));
        let cfg = Configuration::new(coords.clone(), &p).unwrap();
        let i = pick % n;
        let x_new: Vec<f64> = cfg.point(i).iter().zip(&shift).map(|(a, b)| a + b).collect();
        let mut moved = coords.clone();
        moved[i * d..(i + 1) * d].copy_from_slice(&x_new);
        prop_assume!(separated(&moved, d, 1e-3));
        let delta = energy_delta(&cfg, i, &x_new, &p).unwrap();
        let after = energy_total(&Configuration::new(moved, &p).unwrap(), &p).unwrap();
        let before = cfg.energy();
        prop_assert!((delta - (after - before)).abs() <= 1e-10 * before.abs().max(after.abs()).max(1.0));
    }

    #[test]
    fn energy_is_permutation_invariant((d, n, coords) in configs(), v in potentials(), seed in any::<u64>()) {
        let p = gas(d, n, v);
        prop_assume!(separated(&coords, d, 1e-3));
        let mut order: Vec<usize> = (0..n).collect();
        // deterministic shuffle from the seed
        let mut s = seed;
        for k in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(k, (s >> 33) as usize % (k + 1));
        }
        let permuted: Vec<f64> = order.iter().flat_map(|&i| coords[i * d..(i + 1) * d].to_vec()).collect();
        let a = Configuration::new(coords, &p).unwrap().energy();
        let b = Configuration::new(permuted, &p).unwrap().energy();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn gradient_matches_finite_differences((d, n, coords) in configs(), v in potentials()) {
        let p = gas(d, n, v);
        prop_assume!(separated(&coords, d, 0.1));
        let cfg = Configuration::new(coords.clone(), &p).unwrap();
        let g = gradient_energy(&cfg, &p).unwrap();
        let h = 1e-5;
        for k in 0..coords.len() {
            let mut plus = coords.clone();
            let mut minus = coords.clone();
            plus[k] += h;
            minus[k] -= h;
            let fd = (energy_total(&Configuration::new(plus, &p).unwrap(), &p).unwrap()
                - energy_total(&Configuration::new(minus, &p).unwrap(), &p).unwrap()) / (2.0 * h);
            prop_assert!((g[k] - fd).abs() <= 1e-4 * g[k].abs().max(1.0), "k={} g={} fd={}", k, g[k], fd);
        }
    }

    #[test]
    fn kpoint_density_nonnegative_and_exchangeable(
        n in 1usize..=20,
        pts in prop::collection::vec((-2.5f64..2.5, -2.5f64..2.5), 1..=4),
    ) {
        prop_assume!(pts.len() <= n);
        let ctx = KernelContext::new(n).unwrap();
        let z: Vec<Complex64> = pts.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let v = density_kpoint(&ctx, &z).unwrap();
        prop_assert!(v >= 0.0);
        let mut rev = z.clone();
        rev.reverse();
        let w = density_kpoint(&ctx, &rev).unwrap();
        prop_assert!((v - w).abs() <= 1e-12 * v.max(1e-300) + 1e-300);
    }

    #[test]
    fn two_sample_ks_is_symmetric(
        a in prop::collection::vec(-5.0f64..5.0, 8..60),
        b in prop::collection::vec(-5.0f64..5.0, 8..60),
    ) {
        prop_assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, ks_two_sample(&b, &a).unwrap().statistic);
    }

    #[test]
    fn w1_radial_triangle_inequality(
        a in prop::collection::vec(0.0f64..1.5, 1..40),
        b in prop::collection::vec(0.0f64..1.5, 1..40),
    ) {
        let disc = equilibrium_for(EquilibriumLabel::UniformDisc).unwrap();
        let wa = w1_radial_radii(&a, &disc).unwrap();
        let wb = w1_radial_radii(&b, &disc).unwrap();
        let wab = w1_empirical(&a, &b).unwrap();
        prop_assert!(wa >= 0.0 && wb >= 0.0);
        prop_assert!(wa <= wab + wb + 1e-12);
    }
}

#[test]
fn coulomb_kernel_is_harmonic_away_from_origin() {
    let h = 1e-3;
    for d in [2usize, 3] {
        let dim = Dimension::new(d).unwrap();
        for base in [[0.7, -0.4, 0.3], [1.5, 0.2, -0.9], [-0.3, 0.8, 0.5]] {
            let x = &base[..d];
            let g0 = coulomb_g(dim, x).unwrap();
            let mut lap = 0.0;
            for k in 0..d {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[k] += h;
                m[k] -= h;
                lap += coulomb_g(dim, &p).unwrap() + coulomb_g(dim, &m).unwrap() - 2.0 * g0;
            }
            assert!((lap / (h * h)).abs() <= 1e-4, "d={d}: {}", lap / (h * h));
        }
    }
}

#[test]
fn quadratic_identities_hold_exactly() {
    let v = Potential::Quadratic { gamma: 0.75 };
    for d in 2..=5 {
        let dim = Dimension::new(d).unwrap();
        let x: Vec<f64> = (0..d).map(|k| 0.3 * k as f64 - 0.4).collect();
        assert_eq!(v.laplacian(&x, dim), 2.0 * 0.75 * d as f64);
        let g = v.gradient(&x);
        for k in 0..d {
            assert_eq!(g[k], 2.0 * 0.75 * x[k]);
        }
    }
}
