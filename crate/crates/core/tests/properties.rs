use std::sync::OnceLock;

use halfball_core::operators::{curl, diffusion, divergence, gradient, Side};
use halfball_core::solvers::{
    helmholtz2d, helmholtz3d, korn_check, leray_project, navier_decompose, navier_energy, navier_energy_from_fields,
    stokes_residual, stokes_steady,
};
use halfball_core::{random_field, KernelFamily, KernelSpec, Orientation, QuadratureSettings, SymbolTable};
use proptest::prelude::*;

fn table2() -> &'static SymbolTable {
    static T: OnceLock<SymbolTable> = OnceLock::new();
    T.get_or_init(|| {
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.5 }, 2, 0.2).unwrap();
        SymbolTable::build(&k, &Orientation::from_angle(2.3), 6, QuadratureSettings::default()).unwrap()
    })
}

fn table3() -> &'static SymbolTable {
    static T: OnceLock<SymbolTable> = OnceLock::new();
    T.get_or_init(|| {
        let k = KernelSpec::normalize(KernelFamily::Constant, 3, 0.25).unwrap();
        let n = Orientation::new(&[-0.4, 1.0, 0.7]).unwrap();
        SymbolTable::build(&k, &n, 3, QuadratureSettings::default()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_and_divergence_are_negative_adjoints(seed in any::<u64>(), decay in 0.0f64..3.0) {
        for t in [table2(), table3()] {
            let d = t.dimension();
            let u = random_field(seed, d, 1, t.bound(), decay).unwrap();
            let v = random_field(seed ^ 0x9e37, d, d, t.bound(), decay).unwrap();
            let lhs = gradient(t, &u).unwrap().inner(&v).unwrap();
            let rhs = u.inner(&divergence(t, &v).unwrap()).unwrap();
            let scale = gradient(t, &u).unwrap().l2_norm() * v.l2_norm();
            prop_assert!((lhs + rhs).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn real_fields_stay_real(seed in any::<u64>()) {
        let t = table2();
        let f = random_field(seed, 2, 2, t.bound(), 2.0).unwrap();
        let s = stokes_steady(t, &f).unwrap();
        prop_assert!(s.velocity.hermitian_defect() <= 1e-14 * f.l2_norm());
        prop_assert!(s.pressure.hermitian_defect() <= 1e-14 * f.l2_norm());
        let r = stokes_residual(t, &f, &s).unwrap();
        prop_assert!(r.momentum <= 1e-12 && r.divergence <= 1e-12);
    }

    #[test]
    fn leray_projection_is_idempotent(seed in any::<u64>()) {
        let t = table2();
        let u = random_field(seed, 2, 2, t.bound(), 1.0).unwrap();
        let p = leray_project(t, &u).unwrap();
        prop_assert!(leray_project(t, &p).unwrap().sub(&p).unwrap().l2_norm() <= 1e-13 * u.l2_norm());
        prop_assert!(divergence(t, &p).unwrap().l2_norm() <= 1e-12 * u.l2_norm());
    }

    #[test]
    fn helmholtz_reconstructs(seed in any::<u64>()) {
        let h = helmholtz2d(table2(), &random_field(seed, 2, 2, 6, 1.0).unwrap()).unwrap();
        prop_assert!(h.reconstruction <= 1e-12);
        let h = helmholtz3d(table3(), &random_field(seed, 3, 3, 3, 1.0).unwrap()).unwrap();
        prop_assert!(h.reconstruction <= 1e-12 && h.gauge <= 1e-12);
    }

    #[test]
    fn vector_identity_and_curl_of_gradient(seed in any::<u64>()) {
        let t = table3();
        let f = random_field(seed, 3, 3, 3, 1.0).unwrap();
        let cc = curl(t, &curl(t, &f, Side::Plus).unwrap(), Side::Minus).unwrap();
        let gd = gradient(t, &divergence(t, &f).unwrap()).unwrap();
        let rhs = gd.sub(&diffusion(t, &f).unwrap()).unwrap();
        prop_assert!(cc.sub(&rhs).unwrap().l2_norm() <= 1e-12 * rhs.l2_norm());
        let p = random_field(seed ^ 1, 3, 1, 3, 1.0).unwrap();
        let gp = gradient(t, &p).unwrap();
        prop_assert!(curl(t, &gp, Side::Plus).unwrap().l2_norm() <= 1e-12 * gp.l2_norm());
        let dc = divergence(t, &curl(t, &f, Side::Minus).unwrap()).unwrap();
        prop_assert!(dc.l2_norm() <= 1e-12 * f.l2_norm() * 10.0);
    }

    #[test]
    fn navier_energy_identity_and_korn(seed in any::<u64>(), mu in 0.1f64..3.0, ratio in -0.95f64..3.0) {
        let lame = ratio * 2.0 * mu;
        let dec = navier_decompose(table2(), mu, lame).unwrap();
        let u = random_field(seed, 2, 2, 6, 1.0).unwrap();
        let a = navier_energy(&dec, &u).unwrap();
        let b = navier_energy_from_fields(&dec, &u).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        prop_assert!(korn_check(&dec, &u).unwrap().margin >= -1e-10);
    }
}

#[test]
fn symbols_are_conjugate_symmetric() {
    let t = table2();
    let lat = t.lattice();
    for (idx, mode) in lat.modes() {
        let neg = [-mode[0], -mode[1]];
        let a = t.lambda(idx);
        let b = t.lambda_at(&neg).unwrap();
        for k in 0..2 {
            assert_eq!(a[k], b[k].conj());
        }
    }
}
