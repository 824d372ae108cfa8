use epi_lab::transport::{
    brenier_map_1d, cheeger_constant, radial_profile_map, w2_1d, w2_gaussian_nd, RadialLaw,
    TransportMap1D,
};
use epi_lab::{Density1D, Law1D, QuadratureConfig, SymMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn map_pairs() -> Vec<(Density1D, Density1D)> {
    let g1 = Density1D::standard_gaussian();
    let lap = Density1D::laplace(1.0).unwrap();
    vec![
        (g1.clone(), Density1D::gaussian(4.0).unwrap()),
        (g1.clone(), lap.clone()),
        (g1.clone(), Density1D::quartic(0.1).unwrap()),
        (g1.clone(), Density1D::mixture_counterexample(0.1).unwrap()),
        (lap.clone(), g1.clone()),
        (lap, Density1D::mixture_counterexample(0.3).unwrap()),
        (
            Density1D::quartic(0.2).unwrap(),
            Density1D::laplace(0.5).unwrap(),
        ),
    ]
}

fn check_pushforward<S: Law1D, D: Law1D>(map: &TransportMap1D<S, D>) {
    for x in map.quantile_points(1000).unwrap() {
        let y = map.evaluate(x).unwrap();
        let (a, b) = if map.source().cdf(x) <= 0.5 {
            (map.target().cdf(y), map.source().cdf(x))
        } else {
            (map.target().sf(y), map.source().sf(x))
        };
        assert!((a - b).abs() <= 1e-7, "x={x}: {a} vs {b}");
    }
}

#[test]
fn maps_push_the_source_forward() {
    for (src, dst) in map_pairs() {
        check_pushforward(&brenier_map_1d(src, dst));
    }
}

#[test]
fn map_derivatives_match_finite_differences() {
    for (src, dst) in map_pairs() {
        let map = brenier_map_1d(src, dst);
        let xs = map.quantile_points(200).unwrap();
        for &x in &xs[5..195] {
            if x.abs() < 1e-3 {
                continue;
            }
            let h = 1e-4 * (1.0 + x.abs());
            let fd = (map.evaluate(x + h).unwrap() - map.evaluate(x - h).unwrap()) / (2.0 * h);
            let d = map.derivative(x).unwrap();
            assert!((fd - d).abs() <= 1e-5 * d.max(1.0), "x={x}: {fd} vs {d}");
        }
    }
}

#[test]
fn maps_onto_stronger_log_concave_targets_contract() {
    for a in [0.05, 0.2] {
        let map = brenier_map_1d(
            Density1D::standard_gaussian(),
            Density1D::quartic(a).unwrap(),
        );
        let sup = map
            .sup_derivative(&map.quantile_points(1000).unwrap())
            .unwrap();
        assert!(sup <= 1.0 + 1e-6, "a={a}: {sup}");
    }
}

#[test]
fn maps_from_laplace_are_lipschitz_with_inverse_cheeger_constant() {
    let targets = [
        Density1D::standard_gaussian(),
        Density1D::quartic(0.1).unwrap(),
        Density1D::mixture_counterexample(0.3).unwrap(),
    ];
    for dst in targets {
        let alpha = cheeger_constant(&dst, &cfg()).unwrap();
        let map = brenier_map_1d(Density1D::laplace(1.0).unwrap(), dst.clone());
        let sup = map
            .sup_derivative(&map.quantile_points(1000).unwrap())
            .unwrap();
        assert!(
            sup <= 1.0 / alpha + 1e-4,
            "{dst:?}: {sup} vs {}",
            1.0 / alpha
        );
    }
}

#[test]
fn gaussian_to_laplace_slope() {
    let map = brenier_map_1d(
        Density1D::standard_gaussian(),
        Density1D::laplace(1.0).unwrap(),
    );
    assert!((map.derivative(0.0).unwrap() - 0.797_884_6).abs() < 1e-6);
    let (lo, hi) = map.window(1e-12).unwrap();
    let g = map.growth_constant(lo, hi, 4001).unwrap();
    assert!(g.interior);
    assert!(g.value.is_finite() && g.value <= 2.0);
    assert!(
        (g.value - 1.080_434_778_529_592_2).abs() < 1e-6,
        "{}",
        g.value
    );
}

fn random_law(rng: &mut ChaCha8Rng) -> Density1D {
    match rng.random_range(0..4) {
        0 => Density1D::gaussian(rng.random_range(0.2..5.0)).unwrap(),
        1 => Density1D::mixture_counterexample(rng.random_range(0.01..0.99)).unwrap(),
        2 => Density1D::laplace(rng.random_range(0.2..3.0)).unwrap(),
        _ => Density1D::quartic(rng.random_range(0.0..1.0)).unwrap(),
    }
}

#[test]
fn w2_satisfies_the_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let (a, b, c) = (
            random_law(&mut rng),
            random_law(&mut rng),
            random_law(&mut rng),
        );
        let ab = w2_1d(&a, &b, &cfg()).unwrap().sqrt();
        let bc = w2_1d(&b, &c, &cfg()).unwrap().sqrt();
        let ac = w2_1d(&a, &c, &cfg()).unwrap().sqrt();
        assert!(ac <= ab + bc + 1e-9, "{a:?} {b:?} {c:?}");
    }
}

#[test]
fn radial_maps() {
    let scaled = radial_profile_map(2, RadialLaw::gaussian(2, 4.0).unwrap(), &cfg()).unwrap();
    for r in [0.3, 1.0, 2.5] {
        assert!((scaled.map.evaluate(r).unwrap() - 2.0 * r).abs() < 1e-8);
    }
    assert!(
        (scaled.growth.value - 2.0).abs() < 1e-6,
        "{}",
        scaled.growth.value
    );

    let expo = RadialLaw::from_profile(|r: f64| r * r * (-r).exp()).unwrap();
    let m = radial_profile_map(3, expo, &cfg()).unwrap();
    assert!(m.growth.interior);
    assert!(
        (m.growth.value - 1.373_684_682).abs() < 1e-3,
        "{}",
        m.growth.value
    );
    // the target is a Gamma(3) law
    for r in [0.5, 1.5, 3.0] {
        let y = m.map.evaluate(r).unwrap();
        let tail = (-y).exp() * (1.0 + y + 0.5 * y * y);
        assert!((tail - m.map.source().sf(r)).abs() < 1e-9);
    }
    assert!(RadialLaw::from_profile(|_| 1.0).is_err());
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    epi_lab::psd_lemma::random_pd(rng, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn commuting_covariances_have_equal_forms(d1 in prop::collection::vec(0.05f64..10.0, 1..6), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d2: Vec<f64> = d1.iter().map(|_| rng.random_range(0.05..10.0)).collect();
        let w = w2_gaussian_nd(&SymMatrix::diag(&d1), &SymMatrix::diag(&d2)).unwrap();
        prop_assert!(w.commuting);
        prop_assert!((w.bures - w.frobenius).abs() <= 1e-10 * (1.0 + w.frobenius));
    }

    #[test]
    fn bures_never_exceeds_frobenius(n in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(&mut rng, n);
        let b = random_spd(&mut rng, n);
        let w = w2_gaussian_nd(&a, &b).unwrap();
        prop_assert!(w.bures >= -1e-10);
        prop_assert!(w.bures <= w.frobenius + 1e-9 * (1.0 + w.frobenius));
    }
}
