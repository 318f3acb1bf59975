use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regulie_core::lie::sampling::{random_algebra, random_element};
use regulie_core::lie::{catalog, quaternion_left_matrix};
use regulie_core::lie_theory::*;
use regulie_core::*;

/// Rotation matrix of the unit quaternion `(w, x, y, z)`.
fn rotation_of(q: &[f64]) -> DMatrix<f64> {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    )
}

fn random_quaternion(rng: &mut ChaCha8Rng) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return q.map(|v| v / n);
        }
    }
}

fn cover() -> IntegratedHom {
    let hom = AlgebraHom::new(catalog::su2(), catalog::so3(), DMatrix::identity(3, 3)).unwrap();
    integrate(&hom, 64).unwrap()
}

#[test]
fn identity_integrates_to_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for g in [catalog::su2(), catalog::heis3(), catalog::vector(3)] {
        let f = integrate(&AlgebraHom::identity(&g).unwrap(), 64).unwrap();
        assert_eq!(f.apply(&g.identity()).unwrap().value(), g.identity().value());
        for _ in 0..10 {
            let a = random_element(&g, &mut rng, 2.0);
            assert!(g.distance(&f.apply(&a).unwrap(), &a).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn zero_map_integrates_to_trivial_hom() {
    let f = integrate(&AlgebraHom::zero(&catalog::su2(), &catalog::sl2()).unwrap(), 32).unwrap();
    let a = random_element(&catalog::su2(), &mut ChaCha8Rng::seed_from_u64(2), 3.0);
    assert_eq!(f.apply(&a).unwrap().value(), catalog::sl2().identity().value());
}

#[test]
fn su2_to_so3_is_the_double_cover() {
    let su2 = catalog::su2();
    let f = cover();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let q = random_quaternion(&mut rng);
        let g = su2.element(quaternion_left_matrix(q)).unwrap();
        assert!((f.apply(&g).unwrap().value() - rotation_of(&q)).norm() <= 1e-7);
    }
}

#[test]
fn minus_one_needs_the_factored_path() {
    let su2 = catalog::su2();
    let minus_one = su2.element(quaternion_left_matrix([-1.0, 0.0, 0.0, 0.0])).unwrap();
    assert!(matches!(su2.log(&minus_one), Err(Error::Branch(_))));
    let r = cover().apply(&minus_one).unwrap();
    assert!((r.value() - DMatrix::identity(3, 3)).norm() <= 1e-12);
}

#[test]
fn non_simply_connected_source_is_refused() {
    let hom = AlgebraHom::identity(&catalog::so3()).unwrap();
    assert!(matches!(integrate(&hom, 16), Err(Error::Precondition(_))));
}

#[test]
fn non_homomorphism_is_rejected() {
    let r = AlgebraHom::new(catalog::su2(), catalog::so3(), DMatrix::identity(3, 3) * 2.0);
    assert!(matches!(r, Err(Error::InvalidHom { residual }) if residual > 1.0));
    let r = AlgebraHom::new(catalog::su2(), catalog::so3(), DMatrix::identity(2, 3));
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn integrated_map_is_a_homomorphism() {
    let su2 = catalog::su2();
    let f = cover();
    let e = su2.identity();
    assert_eq!(f.homomorphism_residual(&[(e.clone(), e)]).unwrap(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs: Vec<_> = (0..30)
        .map(|_| (random_element(&su2, &mut rng, 6.0), random_element(&su2, &mut rng, 6.0)))
        .collect();
    assert!(f.homomorphism_residual(&pairs).unwrap() <= 1e-7);
    let xs: Vec<_> = (0..20).map(|_| random_algebra(&su2, &mut rng, 3.0)).collect();
    assert!(f.exp_naturality_residual(&xs).unwrap() <= 1e-8);
}

#[test]
fn tangent_at_identity_is_f() {
    assert!(cover().tangent_residual(1e-5).unwrap() <= 1e-5);
    let heis = catalog::heis3();
    let scale = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -0.5, -1.0]));
    let f = integrate(&AlgebraHom::new(heis.clone(), heis, scale).unwrap(), 32).unwrap();
    assert!(f.tangent_residual(1e-5).unwrap() <= 1e-5);
}

#[test]
fn path_families_agree() {
    let su2 = catalog::su2();
    let f = cover();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let g = random_element(&su2, &mut rng, 4.0);
        let radial = f.apply(&g).unwrap();
        let y = random_algebra(&su2, &mut rng, 1.0);
        let stair = f.apply_staircase(&g, &y).unwrap();
        let wiggle = f.apply_wiggle(&g, &random_algebra(&su2, &mut rng, 0.7)).unwrap();
        assert!((radial.value() - stair.value()).norm() <= 1e-7);
        assert!((radial.value() - wiggle.value()).norm() <= 1e-7);
    }
}

#[test]
fn heisenberg_scaling_automorphism() {
    let heis = catalog::heis3();
    let (a, b) = (1.7, -0.6);
    let m = DMatrix::from_diagonal(&DVector::from_vec(vec![a, b, a * b]));
    let f = integrate(&AlgebraHom::new(heis.clone(), heis.clone(), m).unwrap(), 64).unwrap();
    let (x, y, z) = (0.8, -1.2, 0.3);
    let img = f.apply(&heis.element(catalog::heis3_element(x, y, z)).unwrap()).unwrap();
    assert!((img.value() - catalog::heis3_element(a * x, b * y, a * b * z)).norm() <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heisenberg_scaling_is_multiplicative(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let heis = catalog::heis3();
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![a, b, a * b]));
        let f = integrate(&AlgebraHom::new(heis.clone(), heis.clone(), m).unwrap(), 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = vec![(random_element(&heis, &mut rng, 2.0), random_element(&heis, &mut rng, 2.0))];
        prop_assert!(f.homomorphism_residual(&pairs).unwrap() <= 1e-10);
    }
}
