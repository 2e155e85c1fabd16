use std::sync::Arc;

use npwave::functional::residual_dual_norm;
use npwave::{
    Domain, EnergyContext, Nonlinearity, Operator, PowerTerm, ProductGrid, SpectralCatalog,
    SpectralField, WeightField,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_field(cat: &Arc<SpectralCatalog>, seed: u64, amp: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = (0..cat.len())
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            amp * z
        })
        .collect();
    SpectralField::from_coeffs(cat, c).unwrap()
}

fn context(domain: Domain, op: Operator, k: u32, l: u32, nl: Nonlinearity) -> EnergyContext {
    let cat = Arc::new(SpectralCatalog::build(domain, op, k, l).unwrap());
    let grid = ProductGrid::for_catalog(&cat, 2).unwrap();
    let q = WeightField::from_fn(grid, |x, t| 1.0 + 0.5 * (x[0].cos() * t.sin())).unwrap();
    EnergyContext::new(cat, q, nl).unwrap()
}

fn contexts() -> Vec<EnergyContext> {
    let two = Nonlinearity::new(vec![
        PowerTerm { a: 1.0, p: 3.0 },
        PowerTerm { a: 0.5, p: 5.0 },
    ])
    .unwrap();
    vec![
        context(
            Domain::circle(),
            Operator::polyharmonic(2).unwrap(),
            4,
            4,
            Nonlinearity::pure_power(4.0).unwrap(),
        ),
        context(
            Domain::circle(),
            Operator::polyharmonic(1).unwrap(),
            4,
            4,
            two,
        ),
        context(
            Domain::torus(2).unwrap(),
            Operator::polyharmonic(2).unwrap(),
            2,
            3,
            Nonlinearity::pure_power(3.5).unwrap(),
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pure_power_potential_is_homogeneous(seed in any::<u64>(), t in 0.2f64..3.0) {
        let ctx = &contexts()[0];
        let u = random_field(ctx.catalog(), seed, 0.3);
        let mut tu = u.clone();
        tu.scale(t);
        let i1 = ctx.potential(&u);
        prop_assert!((ctx.potential(&tu) - t.powi(4) * i1).abs() <= 1e-10 * (1.0 + t.powi(4) * i1));
    }

    #[test]
    fn potential_is_linear_in_weight(seed in any::<u64>(), alpha in 0.1f64..5.0, which in 0usize..3) {
        let ctx = &contexts()[which];
        let u = random_field(ctx.catalog(), seed, 0.3);
        let scaled = ctx.with_scaled_weight(alpha).unwrap();
        let (a, b) = (scaled.potential(&u), alpha * ctx.potential(&u));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn nonlinearity_is_superquadratic(s in -50.0f64..50.0, a1 in 0.1f64..3.0, a2 in 0.1f64..3.0, p in 2.1f64..6.0, dp in 0.1f64..3.0) {
        let f = Nonlinearity::new(vec![PowerTerm { a: a1, p }, PowerTerm { a: a2, p: p + dp }]).unwrap();
        let (fs, big_f) = f.eval(s);
        prop_assert!(big_f >= 0.0);
        // f(s)s ≥ p·F(s) > 2F(s) away from zero
        prop_assert!(fs * s >= p * big_f * (1.0 - 1e-12));
        // s ↦ f(s)/|s| is nondecreasing on (0, ∞) and odd-symmetric
        let r = |x: f64| f.eval(x).0 / x.abs();
        let x = s.abs() + 1e-3;
        prop_assert!(r(1.1 * x) >= r(x) * (1.0 - 1e-12));
        prop_assert!((f.eval(-s).0 + fs).abs() <= 1e-12 * (1.0 + fs.abs()));
    }

    #[test]
    fn energy_gradient_matches_central_differences(seed in any::<u64>(), which in 0usize..3) {
        let ctx = &contexts()[which];
        let u = random_field(ctx.catalog(), seed, 0.2);
        let h = random_field(ctx.catalog(), seed ^ 0xabcd, 1.0);
        let g = ctx.energy_gradient(&u);
        let eps = 1e-5;
        let shifted = |s: f64| {
            let mut v = u.clone();
            v.axpy(s, &h);
            ctx.energy(&v)
        };
        let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
        let an = g.dot(&h);
        prop_assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "fd {fd} vs {an}");
    }

    #[test]
    fn residual_norm_is_a_norm(seed in any::<u64>(), s in -4.0f64..4.0) {
        let ctx = &contexts()[0];
        let g = random_field(ctx.catalog(), seed, 1.0);
        let mut sg = g.clone();
        sg.scale(s);
        prop_assert!((residual_dual_norm(&sg) - s.abs() * residual_dual_norm(&g)).abs() < 1e-10 * (1.0 + residual_dual_norm(&g)));
    }
}

#[test]
fn energy_splits_into_quadratic_and_potential() {
    for ctx in contexts() {
        let u = random_field(ctx.catalog(), 3, 0.4);
        let n = u.energy_norms();
        let quad = 0.5 * (n.plus * n.plus - n.minus * n.minus);
        assert!((ctx.quadratic_part(&u) - quad).abs() < 1e-10 * (1.0 + quad.abs()));
        assert!((ctx.energy(&u) - quad + ctx.potential(&u)).abs() < 1e-10 * (1.0 + quad.abs()));
    }
}
