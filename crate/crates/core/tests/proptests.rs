//! Property tests for the library invariants: kernel identities, handle
//! membership and classification, inversion round trips, and normal-form
//! idempotency.

use fatcw::cw::{self, fixtures, ComplexPoint};
use fatcw::geometry::{self, HandlePoint, HandleSpec, RegionClass};
use fatcw::kernels::KernelContext;
use fatcw::maps;
use proptest::prelude::*;
use std::sync::OnceLock;

fn ctx() -> &'static KernelContext {
    static CTX: OnceLock<KernelContext> = OnceLock::new();
    CTX.get_or_init(|| KernelContext::new().unwrap())
}

proptest! {
    #[test]
    fn lambda_range_and_symmetry(t in -2.0f64..3.0) {
        let c = ctx();
        let v = c.lambda(t);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((c.lambda(t) + c.lambda(1.0 - t) - 1.0).abs() <= 1e-9);
        if t <= 0.0 {
            prop_assert_eq!(v, 0.0);
        }
        if t >= 1.0 {
            prop_assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn phi_translation_identity(t in -3.0f64..3.0) {
        let c = ctx();
        prop_assert!((c.phi(t) - c.phi(-t) - t).abs() <= 1e-9);
        if t.abs() >= 0.5 {
            prop_assert!((c.phi(t) + c.phi(-t) - t.abs()).abs() <= 1e-9);
        }
        prop_assert!(c.phi(t) >= 0.0);
    }

    #[test]
    fn s_func_is_even(x in -3.0f64..3.0) {
        prop_assert!((fatcw::s_func(x) - fatcw::s_func(-x)).abs() <= 1e-13);
    }

    #[test]
    fn disk_cylinder_is_inside(
        n in 1usize..4, m in 1usize..4,
        scale in 0.0f64..4.0, r in 0.0f64..1.0, seed in any::<u64>()
    ) {
        let c = ctx();
        let spec = HandleSpec::new(n, m).unwrap();
        let mut rng = fatcw::sampling::rng(seed);
        let u = fatcw::sampling::scaled_vector(&mut rng, n, scale.max(1e-3));
        let v: Vec<f64> = fatcw::sampling::unit_vector(&mut rng, m).iter().map(|c_| c_ * r).collect();
        let p = HandlePoint::new(u, v);
        prop_assert!(geometry::is_member(c, &spec, &p).unwrap());
        // flange points are members too
        let du = fatcw::sampling::unit_vector(&mut rng, n);
        let uf: Vec<f64> = du.iter().map(|c_| c_ * (1.0 + scale)).collect();
        let vf = fatcw::sampling::scaled_vector(&mut rng, m, 2.0);
        let pf = HandlePoint::new(uf, vf);
        prop_assert!(geometry::defect(c, &spec, &pf).unwrap() >= -geometry::DEFECT_TOL);
    }

    #[test]
    fn wall_classification_precedence(rv in 0.0f64..3.0) {
        let c = ctx();
        let spec = HandleSpec::new(2, 1).unwrap();
        let p = HandlePoint::new(vec![1.0, 0.0], vec![rv]);
        let class = geometry::classify(c, &spec, &p, geometry::DEFECT_TOL).unwrap();
        if rv <= 1.5 {
            prop_assert_eq!(class, RegionClass::FlangeCore);
        } else {
            prop_assert_eq!(class, RegionClass::BoundaryS);
        }
    }

    #[test]
    fn boundary_points_satisfy_equation(t in -3.0f64..3.0, seed in any::<u64>()) {
        let c = ctx();
        let spec = HandleSpec::new(2, 2).unwrap();
        let mut rng = fatcw::sampling::rng(seed);
        let du = fatcw::sampling::unit_vector(&mut rng, 2);
        let dv = fatcw::sampling::unit_vector(&mut rng, 2);
        let b = geometry::boundary_point(c, &spec, t, &du, &dv).unwrap();
        prop_assert!(geometry::defect(c, &spec, &b).unwrap().abs() <= geometry::DEFECT_TOL);
    }

    #[test]
    fn theta_round_trip(seed in any::<u64>()) {
        let c = ctx();
        let spec = HandleSpec::new(2, 1).unwrap();
        let mut rng = fatcw::sampling::rng(seed);
        let u = fatcw::sampling::scaled_vector(&mut rng, 2, 1.5);
        let v = fatcw::sampling::ball_point(&mut rng, 1, 1.0);
        let q = maps::phi_map(c, &spec, &u, &v).unwrap();
        let (u2, v2, _) = maps::theta_map(c, &spec, &q).unwrap();
        for (a, b) in u.iter().zip(&u2).chain(v.iter().zip(&v2)) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn pi_n_set_idempotent(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
        let v = vec![x, y, z];
        let once = cw::pi_n_set(&v);
        let twice = cw::pi_n_set(&once);
        // idempotent up to one re-projection ulp
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
        prop_assert!(geometry::norm(&once) <= 1.0 + 1e-12);
    }

    #[test]
    fn normalize_idempotent_on_iota(u in -4.0f64..4.0) {
        let spec = fixtures::iota();
        let p = ComplexPoint::Cell {
            level: 1,
            cell: 0,
            point: HandlePoint::new(vec![u], vec![]),
        };
        let once = cw::normalize(&spec, &p).unwrap();
        let twice = cw::normalize(&spec, &once).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn normalize_idempotent_on_fat_s2(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let spec = fixtures::fat_s2();
        let p = ComplexPoint::Cell {
            level: 2,
            cell: 0,
            point: HandlePoint::new(vec![x, y], vec![]),
        };
        let once = cw::normalize(&spec, &p).unwrap();
        let twice = cw::normalize(&spec, &once).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn import_is_ray_constant(neg in any::<bool>(), r in 1.0f64..5.0) {
        let spec = fixtures::thin_circle();
        let s = if neg { -1.0 } else { 1.0 };
        let a = ComplexPoint::Cell { level: 1, cell: 0, point: HandlePoint::new(vec![s * r], vec![]) };
        let b = ComplexPoint::Cell { level: 1, cell: 0, point: HandlePoint::new(vec![s * 2.0 * r], vec![]) };
        // attach(2u) = attach(u): both normalize to the same lower point
        prop_assert!(cw::points_equal(&spec, &a, &b, cw::POINT_TOL).unwrap());
    }
}
