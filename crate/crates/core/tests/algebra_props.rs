use proptest::prelude::*;
use quatfreq_core::complex::{alpha_beta, clarke, AugCplxVec, Cplx};
use quatfreq_core::matrix::{CplxMatrix, QuatMatrix};
use quatfreq_core::quaternion::{Axis, Quaternion};
use quatfreq_core::signal::ThreePhaseFrame;

fn quat(range: f64) -> impl Strategy<Value = Quaternion> {
    [-range..range, -range..range, -range..range, -range..range]
        .prop_map(|[r, i, j, k]| Quaternion::new(r, i, j, k))
}

fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn product_is_associative(a in quat(3.0), b in quat(3.0), c in quat(3.0)) {
        prop_assert!(close((a * b) * c, a * (b * c), 1e-13));
    }

    #[test]
    fn norm_is_multiplicative(a in quat(3.0), b in quat(3.0)) {
        prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() <= 1e-12 * (1.0 + a.norm() * b.norm()));
    }

    #[test]
    fn conjugate_reverses_products(a in quat(3.0), b in quat(3.0)) {
        prop_assert!(close((a * b).conj(), b.conj() * a.conj(), 1e-14));
    }

    #[test]
    fn inverse_is_two_sided(a in quat(3.0)) {
        prop_assume!(a.norm() > 1e-3);
        prop_assert!(close(a * a.inverse(), Quaternion::ONE, 1e-12));
        prop_assert!(close(a.inverse() * a, Quaternion::ONE, 1e-12));
    }

    #[test]
    fn involutions_are_automorphisms(a in quat(3.0), b in quat(3.0)) {
        for axis in Axis::ALL {
            prop_assert!(close((a * b).involution(axis), a.involution(axis) * b.involution(axis), 1e-13));
            prop_assert_eq!(a.involution(axis).involution(axis), a);
        }
    }

    #[test]
    fn pure_products_split_into_dot_and_cross(a in quat(3.0), b in quat(3.0)) {
        let (p, q) = (a.im(), b.im());
        let split = Quaternion::real(-p.dot_im(q)) + p.cross_im(q);
        prop_assert!(close(p * q, split, 1e-14));
    }

    #[test]
    fn exp_of_sum_of_commuting_terms(r in -2.0..2.0f64, v in quat(1.0)) {
        let q = Quaternion::real(r) + v.im();
        prop_assert!(close(q.exp(), Quaternion::real(r).exp() * v.im().exp(), 1e-13));
        prop_assert!((v.im().exp().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polar_form_reconstructs(a in quat(3.0)) {
        prop_assume!(a.im_norm() > 1e-6);
        let p = a.polar().unwrap();
        let back = (p.axis * p.angle).exp() * p.magnitude;
        prop_assert!(close(back, a, 1e-12));
        prop_assert!((0.0..=std::f64::consts::PI).contains(&p.angle));
    }

    #[test]
    fn embedding_is_a_homomorphism(
        a in prop::collection::vec(quat(1.0), 6),
        b in prop::collection::vec(quat(1.0), 6),
    ) {
        let a = QuatMatrix::from_vec(2, 3, a).unwrap();
        let b = QuatMatrix::from_vec(3, 2, b).unwrap();
        let lhs = a.try_mul(&b).unwrap().real_embed();
        let rhs = a.real_embed() * b.real_embed();
        prop_assert!((lhs - rhs).amax() < 1e-12);
        prop_assert!((a.hermitian().real_embed() - a.real_embed().transpose()).amax() == 0.0);
        let back = QuatMatrix::real_extract(&a.real_embed(), 1e-15).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn quaternion_inverse_matches_embedding(entries in prop::collection::vec(quat(1.0), 4)) {
        let mut m = QuatMatrix::from_vec(2, 2, entries).unwrap();
        // diagonally dominant keeps the condition number modest
        m[(0, 0)] += Quaternion::real(5.0);
        m[(1, 1)] += Quaternion::real(5.0);
        let inv = m.inverse(1e12).unwrap();
        let id = m.try_mul(&inv).unwrap();
        let err = (&id - &QuatMatrix::identity(2)).max_abs();
        prop_assert!(err < 1e-12, "{}", err);
    }

    #[test]
    fn hermitize_is_idempotent(entries in prop::collection::vec(quat(1.0), 9)) {
        let m = QuatMatrix::from_vec(3, 3, entries).unwrap();
        let h = m.hermitize();
        prop_assert_eq!(h.hermitian_defect(), 0.0);
        prop_assert_eq!(h.hermitize(), h.clone());
        let gram = m.try_mul(&m.hermitian()).unwrap().hermitize();
        prop_assert!(gram.min_embedded_eigenvalue() > -1e-12);
    }

    #[test]
    fn complex_embedding(re in prop::collection::vec(-1.0..1.0f64, 8), im in prop::collection::vec(-1.0..1.0f64, 8)) {
        let v: Vec<Cplx> = re.iter().zip(&im).map(|(&r, &i)| Cplx::new(r, i)).collect();
        let a = CplxMatrix::from_vec(2, 2, v[..4].to_vec()).unwrap();
        let b = CplxMatrix::from_vec(2, 2, v[4..].to_vec()).unwrap();
        let lhs = a.try_mul(&b).unwrap().real_embed();
        prop_assert!((lhs - a.real_embed() * b.real_embed()).amax() < 1e-14);
    }

    #[test]
    fn clarke_preserves_energy(va in -2.0..2.0f64, vb in -2.0..2.0f64, vc in -2.0..2.0f64) {
        let (v0, a, b) = clarke(va, vb, vc);
        prop_assert!((v0 * v0 + a * a + b * b - (va * va + vb * vb + vc * vc)).abs() < 1e-12);
        prop_assert_eq!(alpha_beta(va, vb, vc), Cplx::new(a, b));
    }

    #[test]
    fn augmentation_is_consistent(re in prop::collection::vec(-1.0..1.0f64, 3), im in prop::collection::vec(-1.0..1.0f64, 3)) {
        let x: Vec<Cplx> = re.iter().zip(&im).map(|(&r, &i)| Cplx::new(r, i)).collect();
        let aug = AugCplxVec::augment(&x);
        prop_assert_eq!(aug.consistency_defect(), 0.0);
        prop_assert_eq!(aug.head(), &x[..]);
        let mut skewed = aug.clone().into_vec();
        skewed[4] += Cplx::new(0.1, -0.2);
        let fixed = AugCplxVec::from_stacked(skewed).unwrap().project_consistent();
        prop_assert!(fixed.consistency_defect() < 1e-15);
    }

    #[test]
    fn frames_embed_as_pure_quaternions(va in -5.0..5.0f64, vb in -5.0..5.0f64, vc in -5.0..5.0f64) {
        let q = ThreePhaseFrame { n: 0, t: 0.0, va, vb, vc }.to_quaternion();
        prop_assert_eq!(q.r, 0.0);
        prop_assert_eq!((q.xi, q.xj, q.xk), (va, vb, vc));
    }
}
