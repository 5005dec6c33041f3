use proptest::prelude::*;
use quatlie::{qconj_abs, qmul, right_action, vec_norm, ModuleVector, Quat, Quat32};

fn quat() -> impl Strategy<Value = Quat> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(Quat::from_array)
}

fn close(p: Quat, q: Quat, tol: f64) -> bool {
    (p - q).abs() <= tol
}

proptest! {
    #[test]
    fn norm_is_multiplicative(p in quat(), q in quat()) {
        let lhs = qmul(p, q).abs();
        prop_assert!((lhs - p.abs() * q.abs()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn product_is_associative(p in quat(), q in quat(), r in quat()) {
        let a = qmul(qmul(p, q), r);
        let b = qmul(p, qmul(q, r));
        prop_assert!(close(a, b, 1e-11 * (1.0 + a.abs())));
    }

    #[test]
    fn conjugation_reverses_products(p in quat(), q in quat()) {
        let a = qmul(p, q).conj();
        let b = qmul(q.conj(), p.conj());
        prop_assert!(close(a, b, 1e-12 * (1.0 + a.abs())));
    }

    #[test]
    fn inverse_from_conj_abs(q in quat()) {
        prop_assume!(q.abs() > 1e-3);
        let (c, a) = qconj_abs(q);
        let inv = c.scale(1.0 / (a * a));
        prop_assert!(close(qmul(q, inv), Quat::one(), 1e-12));
    }

    #[test]
    fn right_action_scales_the_norm(p in quat(), r in quat(), q in quat()) {
        let v = ModuleVector::from_components([p, r]);
        let lhs = vec_norm(&right_action(&v, q));
        prop_assert!((lhs - vec_norm(&v) * q.abs()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn right_action_is_a_module_action(p in quat(), q in quat(), r in quat()) {
        let v = ModuleVector::scalar(p);
        let a = right_action(&right_action(&v, q), r);
        let b = right_action(&v, qmul(q, r));
        prop_assert!(close(a.components()[0], b.components()[0], 1e-11 * (1.0 + a.norm())));
    }

    #[test]
    fn single_precision_tracks_double(p in quat(), q in quat()) {
        let p32 = Quat32::from_array(p.to_array().map(|x| x as f32));
        let q32 = Quat32::from_array(q.to_array().map(|x| x as f32));
        let got = qmul(p32, q32).to_array();
        let want = qmul(p, q).to_array();
        for (g, w) in got.iter().zip(want) {
            prop_assert!((*g as f64 - w).abs() <= 1e-4 * (1.0 + p.abs() * q.abs()));
        }
    }
}
