use approx::assert_relative_eq;
use halfball_core::onedim::{double_symbol, rho_at, sine_rho_closed_form, EvenKernel};
use halfball_core::operators::oracle_gradient;
use halfball_core::symbols::SymbolEvaluator;
use halfball_core::{fit_slope, KernelFamily, KernelSpec, Orientation, QuadratureSettings};

#[test]
fn sine_rho_frozen_values() {
    let k = KernelSpec::normalize(KernelFamily::SineExample, 1, 1.0).unwrap();
    assert_relative_eq!(
        sine_rho_closed_form(0.5),
        3.0 * std::f64::consts::PI / 16.0,
        epsilon = 1e-15
    );
    assert_relative_eq!(sine_rho_closed_form(0.1), -0.013838699657330061, epsilon = 1e-15);
    for a in [0.05, 0.1, 0.37, 0.5, 0.93] {
        let q = rho_at(&k, a, 1e-12).unwrap();
        assert!((q - sine_rho_closed_form(a)).abs() < 1e-10, "a = {a}");
    }
}

fn spectral_vs_quadrature(xi: [f64; 2], family: KernelFamily, theta: f64) -> f64 {
    let k = KernelSpec::normalize(family, 2, 0.3).unwrap();
    let n = Orientation::from_angle(theta);
    let settings = QuadratureSettings::default();
    let ev = SymbolEvaluator::new(&k, &n, settings, 4.0).unwrap();
    let lam = ev.eval(&xi);
    let points: Vec<Vec<f64>> = (0..7)
        .flat_map(|i| (0..5).map(move |j| vec![-3.0 + 0.9 * i as f64, -2.5 + 1.1 * j as f64]))
        .collect();
    let direct = oracle_gradient(
        &k,
        &n,
        |x: &[f64], out: &mut [f64]| out[0] = (xi[0] * x[0] + xi[1] * x[1]).sin(),
        1,
        &points,
        settings,
    )
    .unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for (x, g) in points.iter().zip(&direct) {
        let phase = num_complex::Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1]);
        for i in 0..2 {
            let s = (lam[i] * phase).im;
            num += (s - g[i]).powi(2);
            den += s * s;
        }
    }
    (num / den).sqrt()
}

#[test]
fn spectral_gradient_matches_direct_quadrature() {
    assert!(spectral_vs_quadrature([1.0, 0.0], KernelFamily::Constant, 0.7) < 1e-4);
    assert!(spectral_vs_quadrature([1.0, 2.0], KernelFamily::Constant, 0.7) < 1e-4);
    assert!(spectral_vs_quadrature([1.0, 2.0], KernelFamily::Fractional { beta: 1.5 }, 2.0) < 1e-4);
}

#[test]
fn doubly_nonlocal_symbol_factorizes() {
    for (delta, eps) in [(0.2, 0.05), (0.1, 0.1)] {
        let gamma = EvenKernel::unit_second_moment(delta);
        let eta = EvenKernel::unit_mass(eps);
        for xi in 1..=64 {
            let xi = xi as f64;
            let prod = gamma.bond_symbol(xi) * eta.averaging_symbol(xi);
            let d = double_symbol(&gamma, &eta, xi);
            assert!((d - prod).abs() <= 1e-12 * prod.abs().max(1.0), "{delta} {eps} {xi}");
        }
    }
}

#[test]
fn slope_of_synthetic_rates() {
    let d = [0.2, 0.1, 0.05, 0.025];
    let e: Vec<f64> = d.iter().map(|x| 0.7 * x).collect();
    assert_relative_eq!(fit_slope(&d, &e).unwrap(), 1.0, epsilon = 1e-10);
}
