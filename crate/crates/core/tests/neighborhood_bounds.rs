//! Neighborhood bounds and reachability of the annealed search.

use dnc_core::linalg::distance;
use dnc_core::mapping::*;
use dnc_core::Rng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lipschitz_estimate_certifies_every_pair(
        n in 1usize..=5,
        d in 1usize..=3,
        base in prop::collection::vec(0i64..=10, 5),
        q in prop::collection::vec(-100.0f64..100.0, 31),
    ) {
        let spec = ActionSpaceSpec::uniform(n, 0.0, 10.0, 1.0).unwrap();
        let base: Vec<f64> = base[..n].iter().map(|&v| v as f64).collect();
        let nbh = generate_neighbors(&base, &spec, &PerturbationParams::new(d, 1.0).unwrap()).unwrap();
        prop_assume!(nbh.len() >= 2);
        let m = nbh.len();
        let nbh = nbh.with_q_values(q[..m].to_vec()).unwrap();
        let l = lipschitz_estimate(&nbh).unwrap();
        let mut tight = false;
        for i in 0..m {
            for j in 0..m {
                let dist = distance(&nbh.candidates[i], &nbh.candidates[j]);
                let dq = (nbh.q_values[i] - nbh.q_values[j]).abs();
                prop_assert!(dq <= l * dist * (1.0 + 1e-12) + 1e-12);
                if i != j && (dq - l * dist).abs() <= 1e-9 * (1.0 + dq) {
                    tight = true;
                }
            }
        }
        // the bound is attained, so it is the smallest certificate
        prop_assert!(tight || l == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn concave_quadratic_bounded_by_maximal_perturbations(
        n in 1usize..=6,
        d in 1usize..=3,
        eps in 1i64..=2,
        base in prop::collection::vec(6i64..=14, 6),
        c in -50.0f64..50.0,
        curvature in 0.01f64..10.0,
    ) {
        let spec = ActionSpaceSpec::uniform(n, 0.0, 20.0, 1.0).unwrap();
        let pert = PerturbationParams::new(d, eps as f64).unwrap();
        let base: Vec<f64> = base[..n].iter().map(|&v| v as f64).collect();
        let bar = base.clone();
        let q = |a: &[f64]| c - curvature * a.iter().zip(&bar).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
        let nbh = generate_neighbors(&base, &spec, &pert).unwrap();
        let outer: Vec<&Vec<f64>> = nbh
            .candidates
            .iter()
            .filter(|a| (distance(a, &base) - pert.radius()).abs() < 1e-9)
            .collect();
        prop_assert_eq!(outer.len(), 2 * n);
        let worst = outer.iter().map(|a| q(a)).fold(f64::INFINITY, f64::min);
        for a in &nbh.candidates {
            prop_assert!(q(a) >= worst);
        }
    }
}

/// A decoy peak at the start and the true peak in the far corner.
fn adversarial(a: &[f64]) -> f64 {
    let sq = |t: [f64; 2]| (a[0] - t[0]).powi(2) + (a[1] - t[1]).powi(2);
    5.0 * (-sq([1.0, 1.0])).exp() + 10.0 * (-sq([9.0, 9.0]) / 8.0).exp()
}

#[test]
fn search_reaches_global_argmax_outside_first_neighborhood() {
    let spec = ActionSpaceSpec::uniform(2, 0.0, 10.0, 1.0).unwrap();
    let all = enumerate_action_space(&spec, 5000).unwrap();
    assert_eq!(all.len(), 121);
    let oracle = FnOracle(|_: &[f64], a: &[f64]| adversarial(a));
    let target = brute_force_best(&[], &all, &oracle).unwrap();
    assert_eq!(target, vec![9.0, 9.0]);

    let pert = PerturbationParams::new(10, 1.0).unwrap();
    let params = SaParams {
        k_init_fraction: 1.0,
        cooling_fraction: 0.05,
        ..SaParams::default()
    };
    // â = -0.8 maps to grid value 1
    let a_hat = [-0.8, -0.8];
    let first = generate_neighbors(&discretize_base(&a_hat, &spec).unwrap(), &spec, &pert).unwrap();
    assert!(!first.candidates.contains(&target));

    let hits = (0..100)
        .filter(|&seed| {
            sa_search(
                &[],
                &a_hat,
                &oracle,
                &spec,
                &pert,
                &params,
                &mut Rng::new(seed),
            )
            .unwrap()
                == target
        })
        .count();
    assert!(hits >= 95, "global argmax found in {hits}/100 runs");
}
