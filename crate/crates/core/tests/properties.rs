use lgi_core::actions::{HomogeneousAction, Ts2Point, Ts2Product};
use lgi_core::integrators::{Scheme, SCHEME_NAMES};
use lgi_core::kernels::Vec3;
use lgi_core::lie::{dexp_se3, dexpinv_se3, exp_se3, Se3};
use nalgebra::DVector;
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-r..r).prop_map(Vec3::from)
}

fn ts2() -> impl Strategy<Value = Ts2Point> {
    (vec3(1.0), vec3(2.0))
        .prop_filter("q away from zero", |(q, _)| q.norm() > 0.1)
        .prop_map(|(q, w)| {
            let q = q.normalize();
            Ts2Point::new(q, w - q * q.dot(&w)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dexp_inverts_dexpinv(a in vec3(2.0), b in vec3(2.0), c in vec3(1.0), d in vec3(1.0)) {
        let u = Se3::new(a, b);
        let v = Se3::new(c, d);
        let back = dexp_se3(&u, &dexpinv_se3(&u, &v).unwrap()).unwrap();
        prop_assert!((back - v).norm() < 1e-10);
    }

    #[test]
    fn exp_of_negative_is_inverse(a in vec3(3.0), b in vec3(3.0)) {
        let x = Se3::new(a, b);
        let g = exp_se3(&x) * exp_se3(&(-x));
        prop_assert!((g.to_homogeneous() - nalgebra::Matrix4::identity()).abs().max() < 1e-13);
    }

    #[test]
    fn steps_stay_on_ts2(p1 in ts2(), p2 in ts2(), xi in prop::collection::vec(-1.0..1.0f64, 12), h in 0.01..0.3f64) {
        // A state-dependent field: the frozen element rotates with q.
        let action = Ts2Product::new(2);
        let base = DVector::from_vec(xi);
        let f = move |_t: f64, m: &Vec<Ts2Point>| {
            let mut v = base.clone();
            for (i, p) in m.iter().enumerate() {
                for k in 0..3 {
                    v[6 * i + k] += p.q[k];
                }
            }
            Ok(v)
        };
        let y = vec![p1, p2];
        for name in SCHEME_NAMES {
            let r = Scheme::from_name(name).unwrap().step(&action, &f, 0.0, &y, h).unwrap();
            for p in &r.y_next {
                prop_assert!(p.norm_defect() < 1e-13 && p.tangency_defect() < 1e-13, "{name}");
            }
        }
        let _ = action.coords(&y);
    }
}
