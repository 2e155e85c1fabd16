use std::sync::Arc;

use npwave::catalog::{eigenvalue, sphere_multiplicity, SpatialMode};
use npwave::{
    Domain, Operator, ProductGrid, Rational, SpectralCatalog, SpectralClass, SpectralField,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_field(cat: &Arc<SpectralCatalog>, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = (0..cat.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    SpectralField::from_coeffs(cat, c).unwrap()
}

fn presets() -> Vec<Arc<SpectralCatalog>> {
    let half = Rational::new(1, 2);
    vec![
        (Domain::circle(), Operator::polyharmonic(1).unwrap(), 6, 6),
        (Domain::circle(), Operator::shifted_laplacian(half), 5, 5),
        (
            Domain::torus(2).unwrap(),
            Operator::polyharmonic(2).unwrap(),
            3,
            6,
        ),
        (
            Domain::sphere(2).unwrap(),
            Operator::polyharmonic(1).unwrap(),
            4,
            5,
        ),
        (Domain::sphere(3).unwrap(), Operator::klein_gordon(3), 3, 4),
    ]
    .into_iter()
    .map(|(d, op, k, l)| Arc::new(SpectralCatalog::build(d, op, k, l).unwrap()))
    .collect()
}

fn grid_presets() -> Vec<Arc<SpectralCatalog>> {
    presets()
        .into_iter()
        .filter(|c| !matches!(c.domain(), Domain::Sphere { .. }))
        .collect()
}

#[test]
fn eigenvalues_and_classes_match_formula() {
    for cat in presets() {
        for m in cat.modes() {
            let lam = eigenvalue(cat.operator(), cat.domain(), &m.key.spatial, m.key.l).unwrap();
            assert_eq!(lam, m.eigenvalue);
            assert_eq!(SpectralClass::of(&lam), m.class);
        }
        let total: usize = [
            SpectralClass::Plus,
            SpectralClass::Zero,
            SpectralClass::Minus,
        ]
        .iter()
        .map(|&c| cat.indices(c).len())
        .sum();
        assert_eq!(total, cat.len());
    }
}

#[test]
fn sphere_catalog_has_full_degeneracy() {
    let cat = SpectralCatalog::build(
        Domain::sphere(3).unwrap(),
        Operator::polyharmonic(1).unwrap(),
        4,
        0,
    )
    .unwrap();
    for k in 0..=4u32 {
        let count = cat
            .modes()
            .iter()
            .filter(|m| matches!(m.key.spatial, SpatialMode::Sphere { degree, .. } if degree == k))
            .count();
        assert_eq!(count as u128, sphere_multiplicity(3, k));
    }
}

#[test]
fn kernel_grows_with_cutoff() {
    let op = Operator::polyharmonic(1).unwrap();
    let dims: Vec<usize> = [2, 4, 8, 16]
        .iter()
        .map(|&k| {
            SpectralCatalog::build(Domain::circle(), op.clone(), k, k)
                .unwrap()
                .kernel_dim()
        })
        .collect();
    assert!(dims.windows(2).all(|w| w[0] < w[1]), "{dims:?}");
}

#[test]
fn catalog_hash_is_stable() {
    let a = presets();
    let b = presets();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.content_hash(), y.content_hash());
    }
    assert_ne!(a[0].content_hash(), a[1].content_hash());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn wave_pairing_matches_energy_forms(seed in any::<u64>(), which in 0usize..5) {
        let cat = &presets()[which];
        let u = random_field(cat, seed);
        let v = random_field(cat, seed ^ 0x9e37);
        let lhs = u.wave_apply().dot(&v);
        let rhs = u.plus_inner(&v) - u.minus_inner(&v);
        let scale = u.wave_apply().dot(&u.wave_apply()).sqrt() * v.dot(&v).sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn transform_round_trip(seed in any::<u64>(), which in 0usize..3, over in 1usize..3) {
        let cat = &grid_presets()[which];
        let grid = ProductGrid::for_catalog(cat, over).unwrap();
        let u = random_field(cat, seed);
        let back = SpectralField::analyze(&u.synthesize(&grid).unwrap(), cat).unwrap();
        for (a, b) in u.coeffs().iter().zip(back.coeffs()) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn grid_quadrature_is_parseval(seed in any::<u64>(), which in 0usize..3) {
        let cat = &grid_presets()[which];
        let grid = ProductGrid::for_catalog(cat, 2).unwrap();
        let u = random_field(cat, seed);
        let v = random_field(cat, seed.wrapping_add(1));
        let su = u.synthesize(&grid).unwrap();
        let sv = v.synthesize(&grid).unwrap();
        let quad: f64 = su.values.iter().zip(&sv.values).map(|(a, b)| a * b).sum::<f64>() * grid.quad_weight();
        prop_assert!((quad - u.dot(&v)).abs() < 1e-10 * (1.0 + u.dot(&u)));
    }

    #[test]
    fn projections_are_complementary(seed in any::<u64>(), which in 0usize..5) {
        let cat = &presets()[which];
        let u = random_field(cat, seed);
        let mut sum = u.project(SpectralClass::Plus);
        sum.axpy(1.0, &u.project(SpectralClass::Zero));
        sum.axpy(1.0, &u.project(SpectralClass::Minus));
        prop_assert_eq!(sum.coeffs(), u.coeffs());
        prop_assert_eq!(u.project(SpectralClass::Plus).minus_inner(&u), 0.0);
    }
}
