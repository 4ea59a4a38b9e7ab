use approx::assert_relative_eq;
use proptest::prelude::*;

use metaplectic_core::gaussint;
use metaplectic_core::matcore::{self, c, CMat, C64};
use metaplectic_core::metaplectic;
use metaplectic_core::moyal;
use metaplectic_core::poly::Poly;
use metaplectic_core::sympgroup::{self, SpReal};
use metaplectic_core::weyl;

fn point(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-0.8f64..0.8, -0.8f64..0.8).prop_map(|(a, b)| c(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sp_exp_is_symplectic(seed in any::<u64>(), n in 1usize..=3) {
        let x = sympgroup::random_sp_lie(n, seed, 0.7);
        let g = sympgroup::sp_exp(&x).unwrap();
        prop_assert!(sympgroup::validate_sp(&g, 1e-10).ok());
        let k = sympgroup::su_from_sp(&g).unwrap();
        prop_assert!(sympgroup::validate_su(&k, 1e-10).ok());
        let back = sympgroup::sp_from_su(&k).unwrap();
        prop_assert!((back.matrix() - g.matrix()).norm() < 1e-10 * (1.0 + g.matrix().norm()));
    }

    #[test]
    fn cayley_of_symplectic_is_hamiltonian(seed in any::<u64>(), n in 1usize..=3) {
        let g = sympgroup::random_sp(n, seed, 0.6);
        let jk = weyl::cayley_j(&g).unwrap();
        prop_assert!(jk.symmetry_residual() < 1e-10 * (1.0 + jk.norm()));
    }

    #[test]
    fn kernels_intertwine(seed in any::<u64>(), n in 1usize..=3, z0 in point(3), z in point(3), w in point(3)) {
        let k = sympgroup::random_su(n, seed, 0.8);
        let (l, r) = metaplectic::intertwining_sides(&k, &z0[..n], &z[..n], &w[..n], 1.0).unwrap();
        prop_assert!((l - r).norm() <= 1e-10 * (1.0 + l.norm()));
    }

    #[test]
    fn cocycle_is_a_sign(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..=2) {
        let k = sympgroup::random_su(n, s1, 0.8);
        let kp = sympgroup::random_su(n, s2, 0.8);
        let rep = metaplectic::sigma_cocycle_sign(&k, &kp, 1.0).unwrap();
        prop_assert!(rep.sign == 1 || rep.sign == -1);
        prop_assert!((rep.scalar * rep.scalar - 1.0).norm() < 1e-8);
    }

    #[test]
    fn berezin_symbol_is_one_at_identity(z in point(2), lambda in 0.2f64..3.0) {
        let v = metaplectic::berezin_symbol_sigma(&sympgroup::SuBlocks::identity(2), &z, lambda).unwrap();
        assert_relative_eq!(v.re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn polar_relation(seed in any::<u64>(), n in 1usize..=2, lambda in 0.5f64..2.0) {
        let k = sympgroup::random_su(n, seed, 0.6);
        prop_assert!(weyl::polar_relation_residual(&k, lambda).unwrap() < 1e-8);
    }

    #[test]
    fn moyal_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (u, v, w) = (
            moyal::random_phase_poly(1, 2, s1),
            moyal::random_phase_poly(1, 2, s2),
            moyal::random_phase_poly(1, 2, s3),
        );
        let left = moyal::moyal_mul(&moyal::moyal_mul(&u, &v), &w);
        let right = moyal::moyal_mul(&u, &moyal::moyal_mul(&v, &w));
        prop_assert!(left.max_coeff_diff(&right) < 1e-12);
    }

    #[test]
    fn star_exp_series_matches_closed(seed in any::<u64>(), norm in 0.01f64..0.2, p in -1.0f64..1.0, q in -1.0f64..1.0) {
        let m = moyal::random_quad_form(1, seed, norm);
        let s = moyal::star_exp_series(&m, c(0.0, -1.0), 40, &[p, q]).unwrap();
        let closed = moyal::star_exp_quadratic_closed(&m, &[p, q]).unwrap();
        prop_assert!((s.value - closed).norm() <= 1e-10 * closed.norm());
    }

    #[test]
    fn gaussian_integral_matches_quadrature(seed in any::<u64>()) {
        let gi = gaussint::random_integrand(1, seed);
        let closed = gaussint::gaussian_integral_closed(&gi).unwrap();
        let quad = gaussint::gaussian_integral_quadrature(&gi, 80);
        prop_assert!((quad - closed).norm() <= 1e-8 * closed.norm());
    }
}

#[test]
fn rotations_compose() {
    let a = SpReal::rotation(0.4);
    let b = SpReal::rotation(-1.1);
    let ab = sympgroup::sp_mul(&a, &b).unwrap();
    let want = SpReal::rotation(-0.7);
    assert!((ab.matrix() - want.matrix()).norm() < 1e-14);
}

#[test]
fn heisenberg_commutator_in_polynomials() {
    for n in 1..=3 {
        for j in 0..n {
            let p = Poly::var(2 * n, j);
            let q = Poly::var(2 * n, n + j);
            let comm = &moyal::moyal_mul(&p, &q) - &moyal::moyal_mul(&q, &p);
            assert_eq!(comm, Poly::constant(2 * n, c(0.0, -1.0)));
        }
    }
}

#[test]
fn matrix_exp_of_generator() {
    let j = CMat::j(1);
    let e = matcore::mat_exp(&j.scale_re(std::f64::consts::FRAC_PI_2)).unwrap();
    assert_relative_eq!((e - j).norm(), 0.0, epsilon = 1e-14);
}
