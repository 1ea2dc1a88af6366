use ftpl_mset::oracle::{phi_exact, phi_mc, PhiQuery, QuadSettings};
use ftpl_mset::{derive_trial_rng, Perturbation};

fn dists() -> [Perturbation; 4] {
    [
        Perturbation::frechet(1.5).unwrap(),
        Perturbation::frechet(3.0).unwrap(),
        Perturbation::pareto(1.5).unwrap(),
        Perturbation::pareto(3.0).unwrap(),
    ]
}

#[test]
fn weights_sum_to_m() {
    let lambda = vec![0.0, 0.1, 0.4, 0.4, 1.0, 2.5, 4.0];
    for dist in dists() {
        for m in 1..lambda.len() {
            let total: f64 = (0..lambda.len())
                .map(|i| phi_exact(&PhiQuery::new(lambda.clone(), i, m, dist), QuadSettings::default()).unwrap())
                .sum();
            assert!((total - m as f64).abs() < 1e-6, "{dist:?} m={m}: {total}");
        }
    }
}

#[test]
fn weights_decrease_with_cumulative_loss() {
    let lambda = vec![0.0, 0.2, 0.5, 1.1, 3.0];
    for dist in dists() {
        let w: Vec<f64> = (0..5)
            .map(|i| phi_exact(&PhiQuery::new(lambda.clone(), i, 2, dist), QuadSettings::default()).unwrap())
            .collect();
        assert!(w.windows(2).all(|p| p[0] >= p[1] - 1e-9), "{w:?}");
    }
}

#[test]
fn quadrature_agrees_with_counting() {
    let mut rng = derive_trial_rng(200, 0);
    let lambda = vec![0.3, 0.0, 1.2, 0.7, 0.7, 2.0];
    for dist in dists() {
        for (arm, m) in [(0usize, 1usize), (2, 3), (5, 2), (4, 5)] {
            let q = PhiQuery::new(lambda.clone(), arm, m, dist);
            let exact = phi_exact(&q, QuadSettings::default()).unwrap();
            let (p, se) = phi_mc(&q, 200_000, &mut rng).unwrap();
            assert!((p - exact).abs() < 4.0 * se.max(1e-4), "{dist:?} arm={arm} m={m}: {p} vs {exact}");
        }
    }
}

#[test]
fn subsets_restrict_the_rivals() {
    let lambda = vec![0.0, 0.5, 1.0, 1.5];
    let dist = Perturbation::frechet(2.0).unwrap();
    let full = phi_exact(&PhiQuery::new(lambda.clone(), 3, 1, dist), QuadSettings::default()).unwrap();
    let sub = phi_exact(
        &PhiQuery::new(lambda.clone(), 3, 1, dist).with_subset(vec![1, 3]),
        QuadSettings::default(),
    )
    .unwrap();
    assert!(sub > full);
    let alone = phi_exact(&PhiQuery::new(lambda, 3, 1, dist).with_subset(vec![3]), QuadSettings::default()).unwrap();
    assert!((alone - 1.0).abs() < 1e-9);
}
