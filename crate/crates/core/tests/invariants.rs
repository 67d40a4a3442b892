use std::sync::Arc;

use nalgebra::DVector;
use proptest::prelude::*;

use surfmod::holonomy::{self, PathConnection, Variation};
use surfmod::lie_model::{AlgebraVector, LieGroupModel};
use surfmod::reduction_models::LinearMomentumModel;
use surfmod::rep_cohomology::{
    build_complex, classify_orbit_type, constructors, obstruction_quadratic, random_solution,
    relator_defect, BundleClass, Tolerances,
};
use surfmod::Presentation;

fn su2() -> Arc<LieGroupModel> {
    Arc::new(LieGroupModel::su2())
}

fn algebra(v: [f64; 3]) -> AlgebraVector {
    AlgebraVector::new(v.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_solutions_satisfy_duality(genus in 1usize..=3, seed in any::<u64>()) {
        let g = su2();
        let pres = Presentation::surface(genus).unwrap();
        let class = BundleClass::trivial(&g);
        let rep = random_solution(&pres, &g, &class, seed).unwrap();
        prop_assert!(relator_defect(&pres, &rep, &class) < 1e-9);
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        prop_assert!(cd.duality_holds(genus));
        prop_assert!(cd.euler_characteristic_holds());
        prop_assert!(cd.cochain_defect() < 1e-9);
    }

    #[test]
    fn orbit_type_survives_conjugation(seed in any::<u64>(), angles in prop::array::uniform4(0.1f64..3.0)) {
        let g = su2();
        let tol = Tolerances::default();
        let pres = Presentation::surface(2).unwrap();
        let x = g.random_element_seeded(seed);
        let torus = constructors::torus(&g, &angles).unwrap();
        let irred = random_solution(&pres, &g, &BundleClass::trivial(&g), seed).unwrap();
        for rep in [torus, irred] {
            prop_assert_eq!(
                classify_orbit_type(&rep, tol.rank()),
                classify_orbit_type(&rep.conjugate(&x), tol.rank())
            );
        }
    }

    #[test]
    fn obstruction_is_quadratic(coords in prop::collection::vec(-2.0f64..2.0, 12), t in -3.0f64..3.0) {
        let g = su2();
        let pres = Presentation::surface(2).unwrap();
        let rep = constructors::central(&g, &[true, false, true, false]).unwrap();
        let cd = build_complex(&pres, &rep, &Tolerances::default());
        let u = DVector::from_vec(coords);
        let q = obstruction_quadratic(&pres, &rep, &cd, &u).unwrap();
        let qt = obstruction_quadratic(&pres, &rep, &cd, &(&u * t)).unwrap();
        prop_assert!((qt - q * (t * t)).norm() <= 1e-10 * (1.0 + u.norm_squared() * t * t));
    }

    #[test]
    fn zero_locus_samples_satisfy_relations(seed in any::<u64>()) {
        for model in [LinearMomentumModel::so2(), LinearMomentumModel::so3()] {
            for p in model.sample_zero_locus(20, seed) {
                let report = model.check_relations(&p);
                prop_assert!(report.passes(), "{:?}", report.entries);
            }
        }
    }

    #[test]
    fn group_exp_log_round_trip(v in prop::array::uniform3(-1.5f64..1.5)) {
        let g = su2();
        let x = algebra(v);
        let back = g.log(&g.exp(&x)).unwrap();
        prop_assert!(back.sub(&x).norm() < 1e-12);
    }

    #[test]
    fn holonomy_is_gauge_covariant(seed in any::<u64>(), a in prop::array::uniform3(-1.0f64..1.0)) {
        let g = su2();
        let conn = PathConnection::sample(g.clone(), 1.0, 17, |t| {
            algebra([a[0] + t, a[1] * (2.0 * t).sin(), a[2] - t * t])
        })
        .unwrap();
        let x = g.random_element_seeded(seed);
        prop_assert!(holonomy::conjugation_invariance_check(&conn, &x) < 1e-9);
    }

    #[test]
    fn holonomy_derivative_is_linear(s in -2.0f64..2.0, a in prop::array::uniform3(-1.0f64..1.0)) {
        let g = su2();
        let conn = PathConnection::sample(g, 0.8, 9, |t| algebra([a[0], a[1] + t, a[2] * t])).unwrap();
        let grid = |f: &dyn Fn(f64) -> [f64; 3]| {
            Variation::new((0..9).map(|i| algebra(f(0.1 * i as f64))).collect()).unwrap()
        };
        let v1 = grid(&|t| [1.0, t, 0.0]);
        let v2 = grid(&|t| [0.0, -t * t, 0.5]);
        let combined = holonomy::holonomy_derivative(&conn, &v1.scale(s).add(&v2)).unwrap();
        let separate = holonomy::holonomy_derivative(&conn, &v1)
            .unwrap()
            .scale(s)
            .add(&holonomy::holonomy_derivative(&conn, &v2).unwrap());
        prop_assert!(combined.sub(&separate).norm() < 1e-8);
    }
}
