//! One-dimensional one-sided operators and the bond kernel `ρ_δ`.
//!
//! For a one-dimensional kernel `w_δ`,
//! `ρ_δ(a) = 2a² ∫_0^δ w_δ(b)(w_δ(a) - w_δ(a+b)) db` turns the one-sided
//! Dirichlet energy into a bond energy:
//! `∫|G⁺u|² = 2∫_Ω∫_0^δ ρ_δ(a)|(u(x+a) - u(x))/a|² da dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::kernels::{KernelFamily, KernelSpec};
use crate::quadrature::{adaptive, gauss_legendre_on, integrate_interval};

/// Default mesh size for tabulated `ρ_δ`.
pub const RHO_MESH_POINTS: usize = 2048;
/// Cutoff radii used for singular kernels.
pub const EPSILON_SEQUENCE: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

fn check_1d(kernel: &KernelSpec) -> Result<()> {
    if kernel.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: kernel.dimension(),
        });
    }
    Ok(())
}

/// Mesh on `(0, δ)` clustered quadratically at both ends.
pub fn rho_mesh(delta: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| {
            let u = i as f64 / (points + 1) as f64;
            0.5 * delta * (1.0 - (PI * u).cos())
        })
        .collect()
}

/// `w_δ(a) - w_δ(a+b)` without cancellation for the closed-form profiles.
fn kernel_drop(kernel: &KernelSpec, a: f64, b: f64) -> f64 {
    let delta = kernel.horizon();
    let wa = kernel.eval(a);
    if a + b > delta {
        return wa;
    }
    if kernel.cutoff_radius().is_some() {
        return wa - kernel.eval(a + b);
    }
    match kernel.family() {
        KernelFamily::Constant => 0.0,
        KernelFamily::Fractional { beta } => -wa * (-beta * (b / a).ln_1p()).exp_m1(),
        KernelFamily::SineExample => {
            let scale = kernel.normalization() / (delta * delta);
            let (x, y) = (PI * a / delta, PI * (a + b) / delta);
            scale * 2.0 * (0.5 * (x + y)).cos() * (0.5 * (x - y)).sin()
        }
        KernelFamily::Tabulated { .. } => wa - kernel.eval(a + b),
    }
}

fn integrate_with_cuts(f: impl Fn(f64) -> f64, lo: f64, hi: f64, cuts: &[f64], tol: f64, abs: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let mut pts = vec![lo];
    pts.extend(cuts.iter().copied().filter(|c| *c > lo && *c < hi));
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += adaptive(&f, w[0], w[1], abs, tol).map_err(|e| Error::NonConvergence {
            what: format!("one-dimensional integral on [{}, {}]", w[0], w[1]),
            estimate: e.estimate,
            tolerance: tol,
        })?;
    }
    Ok(total)
}

fn kink_points(kernel: &KernelSpec) -> Vec<f64> {
    kernel
        .profile_breakpoints()
        .into_iter()
        .map(|r| r * kernel.horizon())
        .collect()
}

/// `ρ_δ(a)` for one `a`, from the split
/// `2a²[∫_0^{δ-a} w(b)(w(a) - w(a+b)) db + w(a)∫_{δ-a}^δ w(b) db]`,
/// which stays finite for singular non-increasing kernels.
pub fn rho_at(kernel: &KernelSpec, a: f64, tol: f64) -> Result<f64> {
    check_1d(kernel)?;
    let delta = kernel.horizon();
    let a = a.abs();
    if a == 0.0 || a >= delta {
        return Ok(0.0);
    }
    let abs = tol * 1e-3 / delta.powi(3);
    let kinks = kink_points(kernel);
    let mut cuts = kinks.clone();
    cuts.extend(kinks.iter().map(|k| k - a));
    let first = integrate_with_cuts(
        |b| kernel.eval(b) * kernel_drop(kernel, a, b),
        0.0,
        delta - a,
        &cuts,
        tol,
        abs,
    )?;
    let tail = integrate_with_cuts(|b| kernel.eval(b), delta - a, delta, &kinks, tol, abs)?;
    Ok(2.0 * a * a * (first + kernel.eval(a) * tail))
}

/// Closed form of `ρ` for `w(x) = (π/2) sin(π|x|)` with `δ = 1`.
pub fn sine_rho_closed_form(a: f64) -> f64 {
    let x = a.abs();
    if x >= 1.0 {
        return 0.0;
    }
    PI * a * a * (PI * x).sin() + PI * PI * a * a / 4.0 * ((x - 1.0) * (PI * a).cos() - (PI * x).sin() / PI)
}

/// Tabulated `ρ_δ` on a graded mesh of `(0, δ)` with its L1 mass over `(-δ, δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoKernel {
    pub delta: f64,
    pub mesh: Vec<f64>,
    pub values: Vec<f64>,
    /// `‖ρ‖_{L1(-δ, δ)}` by adaptive quadrature of the pointwise formula.
    pub mass: f64,
    /// `k_δ(a) = 2 w(a) a² ∫_0^δ w` on the mesh (integrable kernels only).
    pub k_part: Option<Vec<f64>>,
}

impl RhoKernel {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `h_δ = ρ_δ - k_δ` on the mesh.
    pub fn h_part(&self) -> Option<Vec<f64>> {
        self.k_part
            .as_ref()
            .map(|k| self.values.iter().zip(k).map(|(r, k)| r - k).collect())
    }

    /// CSV with columns `a,rho`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("a,rho\n");
        for (a, r) in self.mesh.iter().zip(&self.values) {
            s.push_str(&format!("{a:.16e},{r:.16e}\n"));
        }
        s
    }
}

fn tabulate(kernel: &KernelSpec, points: usize, tol: f64) -> Result<RhoKernel> {
    let delta = kernel.horizon();
    let mesh = rho_mesh(delta, points);
    let values: Vec<f64> = mesh
        .par_iter()
        .map(|a| rho_at(kernel, *a, tol))
        .collect::<Result<_>>()?;
    let mass = rho_mass(kernel, tol)?;
    let k_part = if kernel.is_integrable() {
        let total = integrate_with_cuts(
            |b| kernel.eval(b),
            0.0,
            delta,
            &kink_points(kernel),
            tol,
            tol * 1e-3 / delta,
        )?;
        Some(mesh.iter().map(|a| 2.0 * kernel.eval(*a) * a * a * total).collect())
    } else {
        None
    };
    Ok(RhoKernel {
        delta,
        mesh,
        values,
        mass,
        k_part,
    })
}

/// `2∫_0^δ ρ_δ(a) da`.
pub fn rho_mass(kernel: &KernelSpec, tol: f64) -> Result<f64> {
    let delta = kernel.horizon();
    let inner_tol = tol * 1e-2;
    let failed = std::sync::Mutex::new(None);
    let f = |a: f64| match rho_at(kernel, a, inner_tol) {
        Ok(v) => v,
        Err(e) => {
            *failed.lock().unwrap() = Some(e);
            0.0
        }
    };
    let kinks = kink_points(kernel);
    let mut cuts = kinks.clone();
    cuts.extend(kinks.iter().map(|k| delta - k));
    let half = integrate_with_cuts(f, 0.0, delta, &cuts, tol, tol * 1e-3)?;
    if let Some(e) = failed.into_inner().unwrap() {
        return Err(e);
    }
    Ok(2.0 * half)
}

/// `ρ_δ` for an integrable kernel.
pub fn rho_from_kernel(kernel: &KernelSpec, points: usize, tol: f64) -> Result<RhoKernel> {
    check_1d(kernel)?;
    if !kernel.is_integrable() {
        return Err(Error::NonIntegrable(format!(
            "{} kernel is not integrable in one dimension; use the regularized construction",
            kernel.family().name()
        )));
    }
    tabulate(kernel, points, tol)
}

/// The ε-regularized family `ρ_δ^ε` and its limit.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedRho {
    pub epsilons: Vec<f64>,
    pub iterates: Vec<RhoKernel>,
    pub limit: RhoKernel,
    /// Largest violation of `ρ^{ε_{k+1}} ≥ ρ^{ε_k}` on the mesh (0 when monotone).
    pub monotonicity_defect: f64,
}

/// Builds `ρ_δ^ε` from the cut-off kernels `w_δ^ε` for each `ε` (decreasing)
/// and the limit `ρ_δ` from the pointwise formula.
pub fn rho_regularized(kernel: &KernelSpec, epsilons: &[f64], points: usize, tol: f64) -> Result<RegularizedRho> {
    check_1d(kernel)?;
    if !kernel.is_non_increasing() {
        return Err(Error::InvalidKernel(format!(
            "{} kernel is not non-increasing",
            kernel.family().name()
        )));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "cutoff radii must be strictly decreasing".into(),
        ));
    }
    let iterates: Vec<RhoKernel> = epsilons
        .iter()
        .map(|eps| tabulate(&kernel.epsilon_cutoff(*eps)?, points, tol))
        .collect::<Result<_>>()?;
    let limit = tabulate(kernel, points, tol)?;
    let mut defect = 0.0f64;
    let chain: Vec<&RhoKernel> = iterates.iter().chain(std::iter::once(&limit)).collect();
    for pair in chain.windows(2) {
        for (prev, next) in pair[0].values.iter().zip(&pair[1].values) {
            defect = defect.max(prev - next);
        }
    }
    Ok(RegularizedRho {
        epsilons: epsilons.to_vec(),
        iterates,
        limit,
        monotonicity_defect: defect,
    })
}

/// `∫_{-δ}^{δ} h_δ` and `1 - (∫ s² w_δ)(∫ w_δ)` (full-line integrals).
pub fn h_identity(kernel: &KernelSpec, tol: f64) -> Result<(f64, f64)> {
    check_1d(kernel)?;
    if !kernel.is_integrable() {
        return Err(Error::NonIntegrable("the split needs an integrable kernel".into()));
    }
    let delta = kernel.horizon();
    let kinks = kink_points(kernel);
    let mass = 2.0 * integrate_with_cuts(|b| kernel.eval(b), 0.0, delta, &kinks, tol, tol * 1e-3 / delta)?;
    let second = 2.0 * integrate_with_cuts(|b| b * b * kernel.eval(b), 0.0, delta, &kinks, tol, tol * 1e-3 * delta)?;
    // h(a) = -2a² ∫_0^δ w(b) w(a+b) db.
    let abs = tol * 1e-3 / delta.powi(3);
    let failed = std::sync::Mutex::new(None);
    let h = |a: f64| {
        let mut cuts = kinks.clone();
        cuts.extend(kinks.iter().map(|k| k - a));
        cuts.push(delta - a);
        match integrate_with_cuts(
            |b| kernel.eval(b) * kernel.eval(a + b),
            0.0,
            delta,
            &cuts,
            tol * 1e-2,
            abs,
        ) {
            Ok(v) => -2.0 * a * a * v,
            Err(e) => {
                *failed.lock().unwrap() = Some(e);
                0.0
            }
        }
    };
    let mut outer = kinks.clone();
    outer.extend(kinks.iter().map(|k| delta - k));
    let h_total = 2.0 * integrate_with_cuts(h, 0.0, delta, &outer, tol, tol * 1e-3)?;
    if let Some(e) = failed.into_inner().unwrap() {
        return Err(e);
    }
    Ok((h_total, 1.0 - second * mass))
}

/// One-sided symbols `λ^±(ξ) = ±2∫_0^δ w_δ(s)(e^{±iξs} - 1) ds`.
pub fn one_sided_symbol(kernel: &KernelSpec, xi: f64, plus: bool, tol: f64) -> Result<Complex64> {
    check_1d(kernel)?;
    let delta = kernel.horizon();
    let sign = if plus { 1.0 } else { -1.0 };
    let re = integrate_interval(kernel, 0.0, delta, tol, |s| {
        let h = (0.5 * xi * s).sin();
        -2.0 * h * h
    })?;
    let im = integrate_interval(kernel, 0.0, delta, tol, |s| (sign * xi * s).sin())?;
    Ok(2.0 * sign * Complex64::new(re, im))
}

/// Bond-operator symbol `4∫_0^δ (ρ(a)/a²)(cos ξa - 1) da`.
pub fn bond_symbol_from_rho(kernel: &KernelSpec, xi: f64, tol: f64) -> Result<f64> {
    let delta = kernel.horizon();
    let failed = std::sync::Mutex::new(None);
    let f = |a: f64| {
        if a == 0.0 {
            return 0.0;
        }
        match rho_at(kernel, a, tol * 1e-2) {
            Ok(r) => {
                let h = (0.5 * xi * a).sin();
                -2.0 * h * h * r / (a * a)
            }
            Err(e) => {
                *failed.lock().unwrap() = Some(e);
                0.0
            }
        }
    };
    let kinks = kink_points(kernel);
    let v = integrate_with_cuts(f, 0.0, delta, &kinks, tol, tol * 1e-6)?;
    if let Some(e) = failed.into_inner().unwrap() {
        return Err(e);
    }
    Ok(4.0 * v)
}

/// Energies `E^±` (spectral) and `E_ρ` (double quadrature) for a 1D field.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub e_plus: f64,
    pub e_minus: f64,
    pub e_rho: f64,
    /// `|E⁺ - E_ρ| / E⁺` (0 when both vanish).
    pub gap: f64,
}

/// Compares `E⁺(u) = 2π Σ|λ⁺|²|û|²` with
/// `E_ρ(u) = 2∫_Ω∫_0^δ ρ(a)|(u(x+a)-u(x))/a|² da dx`.
pub fn energy_equivalence_check(kernel: &KernelSpec, u: &SpectralField, tol: f64) -> Result<EnergyReport> {
    check_1d(kernel)?;
    if u.dimension() != 1 || u.components() != 1 {
        return Err(Error::Arity {
            expected: 1,
            got: u.components(),
        });
    }
    let lattice = u.lattice();
    let mut e_plus = 0.0;
    let mut e_minus = 0.0;
    let mut modes = Vec::new();
    for (idx, mode) in lattice.modes() {
        let c = u.at(idx)[0];
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let xi = mode[0] as f64;
        let lp = one_sided_symbol(kernel, xi, true, tol)?;
        let lm = one_sided_symbol(kernel, xi, false, tol)?;
        e_plus += lp.norm_sqr() * c.norm_sqr();
        e_minus += lm.norm_sqr() * c.norm_sqr();
        modes.push((xi, c));
    }
    e_plus *= 2.0 * PI;
    e_minus *= 2.0 * PI;

    // Trapezoid in x is exact for |u(x+a) - u(x)|², a trigonometric polynomial of degree ≤ 2N.
    let m = 2 * lattice.bound() + 2;
    let xs: Vec<f64> = (0..m).map(|j| -PI + 2.0 * PI * j as f64 / m as f64).collect();
    let eval = |x: f64| -> Complex64 { modes.iter().map(|(xi, c)| c * Complex64::from_polar(1.0, xi * x)).sum() };
    let base: Vec<Complex64> = xs.iter().map(|x| eval(*x)).collect();
    let increment = |a: f64| -> f64 {
        let h = 2.0 * PI / m as f64;
        xs.iter()
            .zip(&base)
            .map(|(x, u0)| (eval(x + a) - u0).norm_sqr())
            .sum::<f64>()
            * h
    };
    let delta = kernel.horizon();
    let failed = std::sync::Mutex::new(None);
    let f = |a: f64| {
        if a == 0.0 {
            return 0.0;
        }
        match rho_at(kernel, a, tol * 1e-2) {
            Ok(r) => r * increment(a) / (a * a),
            Err(e) => {
                *failed.lock().unwrap() = Some(e);
                0.0
            }
        }
    };
    let half = integrate_with_cuts(f, 0.0, delta, &kink_points(kernel), tol, tol * 1e-6)?;
    if let Some(e) = failed.into_inner().unwrap() {
        return Err(e);
    }
    let e_rho = 2.0 * half;
    let gap = if e_plus == 0.0 && e_rho == 0.0 {
        0.0
    } else {
        (e_plus - e_rho).abs() / e_plus.abs().max(e_rho.abs())
    };
    Ok(EnergyReport {
        e_plus,
        e_minus,
        e_rho,
        gap,
    })
}

/// Piecewise-constant even kernel `height · χ_{(-support, support)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenKernel {
    pub support: f64,
    pub height: f64,
}

const PANELS: usize = 16;
const NODES: usize = 16;

impl EvenKernel {
    /// Unit-mass averaging kernel `1/(2ε)` on `(-ε, ε)`.
    pub fn unit_mass(epsilon: f64) -> Self {
        EvenKernel {
            support: epsilon,
            height: 1.0 / (2.0 * epsilon),
        }
    }

    /// Constant kernel on `(-δ, δ)` with `∫ s² γ = 1`.
    pub fn unit_second_moment(delta: f64) -> Self {
        EvenKernel {
            support: delta,
            height: 3.0 / (2.0 * delta.powi(3)),
        }
    }

    pub fn mass(&self) -> f64 {
        2.0 * self.support * self.height
    }

    pub fn second_moment(&self) -> f64 {
        2.0 * self.height * self.support.powi(3) / 3.0
    }

    pub fn check_unit_mass(&self) -> Result<()> {
        if (self.mass() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "averaging kernel must have unit mass (got {})",
                self.mass()
            )));
        }
        Ok(())
    }

    /// Gauss nodes and weights on `(-support, support)` including the kernel value.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let s = self.support;
        let h = 2.0 * s / PANELS as f64;
        let mut out = Vec::with_capacity(PANELS * NODES);
        for p in 0..PANELS {
            let lo = -s + p as f64 * h;
            let (x, w) = gauss_legendre_on(NODES, lo, lo + h);
            out.extend(x.into_iter().zip(w.into_iter().map(|w| w * self.height)));
        }
        out
    }

    /// `∫ η(z) cos(ξz) dz`.
    pub fn cosine_transform(&self, xi: f64) -> f64 {
        self.nodes().iter().map(|(z, w)| w * (xi * z).cos()).sum()
    }

    /// `a_ε(ξ) = 1/2 + (1/2)∫ η cos(ξz) dz`.
    pub fn averaging_symbol(&self, xi: f64) -> f64 {
        0.5 + 0.5 * self.cosine_transform(xi)
    }

    /// Symbol of `2∫ γ(|a|)(u(x+a) - u(x)) da`.
    pub fn bond_symbol(&self, xi: f64) -> f64 {
        2.0 * self
            .nodes()
            .iter()
            .map(|(a, w)| {
                let h = (0.5 * xi * a).sin();
                -2.0 * w * h * h
            })
            .sum::<f64>()
    }
}

/// Symbol of `∫∫ γ(y)η(r)(u(x+y+r) - u(x) - u(x+r) + u(x+y)) dy dr` by a
/// tensor Gauss rule.
pub fn double_symbol(gamma: &EvenKernel, eta: &EvenKernel, xi: f64) -> f64 {
    let gy = gamma.nodes();
    let er = eta.nodes();
    let mut total = 0.0;
    for (y, wy) in &gy {
        let mut inner = 0.0;
        for (r, wr) in &er {
            inner += wr * ((xi * (y + r)).cos() - 1.0 - (xi * r).cos() + (xi * y).cos());
        }
        total += wy * inner;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sine() -> KernelSpec {
        KernelSpec::normalize(KernelFamily::SineExample, 1, 1.0).unwrap()
    }

    #[test]
    fn sine_rho_matches_closed_form_and_changes_sign() {
        let k = sine();
        assert_relative_eq!(sine_rho_closed_form(0.5), 3.0 * PI / 16.0, max_relative = 1e-14);
        assert_relative_eq!(
            rho_at(&k, 0.5, 1e-12).unwrap(),
            0.5890486225480862,
            max_relative = 1e-10
        );
        let r = rho_at(&k, 0.1, 1e-12).unwrap();
        assert_relative_eq!(r, -0.013838699657330061, max_relative = 1e-9);
        for a in [0.01, 0.2, 0.77, 0.999] {
            assert!((rho_at(&k, a, 1e-12).unwrap() - sine_rho_closed_form(a)).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_rho_is_cubic_with_unit_mass() {
        let k = KernelSpec::normalize(KernelFamily::Constant, 1, 1.0).unwrap();
        for a in [0.1, 0.5, 0.9] {
            assert_relative_eq!(rho_at(&k, a, 1e-12).unwrap(), 2.0 * a * a * a, max_relative = 1e-12);
        }
        assert_relative_eq!(rho_mass(&k, 1e-10).unwrap(), 1.0, max_relative = 1e-9);
        let (h, expect) = h_identity(&k, 1e-10).unwrap();
        assert_relative_eq!(h, expect, max_relative = 1e-8);
        assert_relative_eq!(h, -1.0 / 3.0, max_relative = 1e-8);
    }

    #[test]
    fn fractional_rho_regularization_is_monotone() {
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.0 }, 1, 1.0).unwrap();
        assert!(matches!(rho_from_kernel(&k, 16, 1e-8), Err(Error::NonIntegrable(_))));
        let reg = rho_regularized(&k, &[1e-1, 1e-2, 1e-3], 32, 1e-9).unwrap();
        assert!(reg.monotonicity_defect <= 1e-9);
        for (eps, it) in reg.epsilons.iter().zip(&reg.iterates) {
            assert!(it.min_value() >= 0.0);
            assert_relative_eq!(it.mass, (1.0 - eps / 2.0).powi(2), max_relative = 1e-7);
        }
        assert!((reg.limit.mass - 1.0).abs() < 1e-6);
        assert_relative_eq!(rho_at(&k, 0.3, 1e-12).unwrap(), 0.2340972, max_relative = 1e-6);
    }

    #[test]
    fn constant_regularized_path_equals_direct() {
        let k = KernelSpec::normalize(KernelFamily::Constant, 1, 0.5).unwrap();
        let direct = rho_from_kernel(&k, 64, 1e-9).unwrap();
        let reg = rho_regularized(&k, &[1e-2, 1e-3], 64, 1e-9).unwrap();
        assert_eq!(reg.iterates[1].values, direct.values);
        assert_eq!(reg.limit.values, direct.values);
    }

    #[test]
    fn bond_symbol_matches_one_sided_symbol() {
        for k in [sine(), KernelSpec::normalize(KernelFamily::Constant, 1, 0.4).unwrap()] {
            for xi in [1.0, 3.0, 7.0] {
                let lp = one_sided_symbol(&k, xi, true, 1e-12).unwrap();
                let b = bond_symbol_from_rho(&k, xi, 1e-11).unwrap();
                assert!((b + lp.norm_sqr()).abs() <= 1e-6 * lp.norm_sqr());
            }
        }
    }

    #[test]
    fn energy_equivalence_on_sine() {
        let k = KernelSpec::normalize(KernelFamily::Constant, 1, 0.5).unwrap();
        let lattice = crate::fields::Lattice::new(1, 2).unwrap();
        let u = SpectralField::from_fn(lattice, 1, |m, out| {
            out[0] = match m[0] {
                1 => Complex64::new(0.0, -0.5),
                -1 => Complex64::new(0.0, 0.5),
                _ => Complex64::new(0.0, 0.0),
            }
        });
        let r = energy_equivalence_check(&k, &u, 1e-10).unwrap();
        assert!(r.gap < 1e-6, "{r:?}");
        assert_relative_eq!(r.e_plus, r.e_minus, max_relative = 1e-10);
        let zero = SpectralField::zeros_on(lattice, 1);
        let z = energy_equivalence_check(&k, &zero, 1e-10).unwrap();
        assert_eq!((z.e_plus, z.e_rho, z.gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn double_laplacian_factorizes() {
        let gamma = EvenKernel::unit_second_moment(0.2);
        let eta = EvenKernel::unit_mass(0.05);
        assert_relative_eq!(gamma.second_moment(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(eta.averaging_symbol(0.0), 1.0, max_relative = 1e-14);
        for xi in 0..=64 {
            let xi = xi as f64;
            let lhs = double_symbol(&gamma, &eta, xi);
            let rhs = gamma.bond_symbol(xi) * eta.averaging_symbol(xi);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
        assert!(EvenKernel {
            support: 0.1,
            height: 1.0
        }
        .check_unit_mass()
        .is_err());
    }
}
