//! Radial interaction kernels `w` on the unit ball, their horizon scaling
//! `w_δ(r) = δ^{-(d+1)} w(r/δ)`, and first-moment normalization
//! `∫_{|x|≤1} w(|x|)|x| dx = d`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::RadialRule;

/// Relative tolerance on the first-moment check performed at construction.
pub const MOMENT_TOLERANCE: f64 = 1e-10;

/// Shape of the unnormalized radial profile on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelFamily {
    /// `w(r) = c`.
    Constant,
    /// `w(r) = c r^{-β}` with `1 ≤ β < 2`.
    Fractional { beta: f64 },
    /// `w(r) = c sin(π r)`; in one dimension `c = π/2`.
    SineExample,
    /// Piecewise-linear interpolation of `values` on [`graded_mesh`]`(values.len())`.
    Tabulated { values: Vec<f64> },
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Constant => "constant",
            KernelFamily::Fractional { .. } => "fractional",
            KernelFamily::SineExample => "sine",
            KernelFamily::Tabulated { .. } => "tabulated",
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            KernelFamily::Fractional { beta } => Some(*beta),
            _ => None,
        }
    }
}

/// Geometrically graded mesh on `[0, 1]` with `points` nodes, clustered at 0.
///
/// The first node is 0, the last is 1, and interior nodes form a geometric
/// progression from `1e-6` to 1.
pub fn graded_mesh(points: usize) -> Vec<f64> {
    assert!(points >= 2, "graded mesh needs at least two points");
    if points == 2 {
        return vec![0.0, 1.0];
    }
    let interior = points - 1;
    let ratio = (1e-6_f64).powf(1.0 / (interior - 1).max(1) as f64);
    let mut mesh = Vec::with_capacity(points);
    mesh.push(0.0);
    for i in 0..interior {
        mesh.push(ratio.powi((interior - 1 - i) as i32));
    }
    *mesh.last_mut().unwrap() = 1.0;
    mesh
}

/// Surface measure of the unit sphere `S^{d-1}` (2, 2π, 4π).
pub fn sphere_measure(dimension: usize) -> f64 {
    match dimension {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => f64::NAN,
    }
}

/// A normalized radial kernel with horizon δ in dimension `d ∈ {1,2,3}`.
///
/// Immutable after construction. The normalization constant is computed once
/// and stored so that every consumer sees the same bits.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    dimension: usize,
    horizon: f64,
    normalization: f64,
    /// Unit-profile mesh for tabulated kernels.
    mesh: Vec<f64>,
    /// `(ε/δ, plateau)` when built by [`KernelSpec::epsilon_cutoff`].
    cutoff: Option<(f64, f64)>,
}

impl KernelSpec {
    /// Builds a kernel of `family` in `dimension` with horizon `delta`,
    /// choosing the normalization so the first-moment condition holds.
    pub fn normalize(family: KernelFamily, dimension: usize, delta: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::InvalidKernel(format!(
                "dimension must be 1, 2 or 3 (got {dimension})"
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidKernel(format!("horizon must be positive (got {delta})")));
        }
        let d = dimension as f64;
        let mut mesh = Vec::new();
        // Profile moment M = ∫_0^1 profile(ρ) ρ^d dρ, closed form where available.
        let moment = match &family {
            KernelFamily::Constant => Some(1.0 / (d + 1.0)),
            KernelFamily::Fractional { beta } => {
                if !(1.0..2.0).contains(beta) {
                    return Err(Error::InvalidKernel(format!(
                        "fractional exponent must satisfy 1 <= beta < 2 (got {beta})"
                    )));
                }
                Some(1.0 / (d + 1.0 - beta))
            }
            KernelFamily::SineExample => Some(match dimension {
                1 => 1.0 / PI,
                2 => (PI * PI - 4.0) / PI.powi(3),
                _ => (PI * PI - 6.0) / PI.powi(3),
            }),
            KernelFamily::Tabulated { values } => {
                if values.len() < 2 {
                    return Err(Error::InvalidKernel(
                        "tabulated kernel needs at least two values".into(),
                    ));
                }
                if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                    return Err(Error::InvalidKernel(format!(
                        "tabulated kernel values must be finite and non-negative (found {v})"
                    )));
                }
                mesh = graded_mesh(values.len());
                None
            }
        };

        let mut spec = KernelSpec {
            family,
            dimension,
            horizon: delta,
            normalization: 1.0,
            mesh,
            cutoff: None,
        };
        let moment = match moment {
            Some(m) => m,
            None => spec.profile_moment_by_quadrature(dimension)?,
        };
        if !(moment > 0.0) {
            return Err(Error::InvalidKernel("kernel profile has zero first moment".into()));
        }
        spec.normalization = d / (sphere_measure(dimension) * moment);

        let check = spec.first_moment()?;
        if ((check - d) / d).abs() > MOMENT_TOLERANCE {
            return Err(Error::InvalidKernel(format!(
                "first-moment check failed: {check} != {d}"
            )));
        }
        Ok(spec)
    }

    /// Same kernel with a different horizon; the stored normalization is reused.
    pub fn with_horizon(&self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidKernel(format!("horizon must be positive (got {delta})")));
        }
        let mut out = self.clone();
        out.horizon = delta;
        Ok(out)
    }

    /// Same profile and normalization in another dimension is not meaningful,
    /// so this rebuilds the normalization for `dimension`.
    pub fn in_dimension(&self, dimension: usize) -> Result<Self> {
        KernelSpec::normalize(self.family.clone(), dimension, self.horizon)
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Cutoff radius in unit-profile coordinates (`ε/δ`) if this kernel was regularized.
    pub fn cutoff_radius(&self) -> Option<f64> {
        self.cutoff.map(|(e, _)| e)
    }

    /// Breakpoints of the unit profile in `(0, 1)` where it is not smooth.
    pub fn profile_breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        if let Some((e, _)) = self.cutoff {
            pts.push(e);
        }
        if let KernelFamily::Tabulated { .. } = self.family {
            pts.extend(self.mesh.iter().copied().filter(|r| *r > 0.0 && *r < 1.0));
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// Unnormalized base profile on `[0, 1]`, ignoring any cutoff.
    fn base_profile(&self, rho: f64) -> f64 {
        match &self.family {
            KernelFamily::Constant => 1.0,
            KernelFamily::Fractional { beta } => {
                if rho == 0.0 {
                    f64::INFINITY
                } else {
                    rho.powf(-beta)
                }
            }
            KernelFamily::SineExample => (PI * rho).sin(),
            KernelFamily::Tabulated { values } => interpolate(&self.mesh, values, rho),
        }
    }

    /// Normalized unit profile `w(ρ)` for `ρ ∈ [0, 1]`, zero beyond.
    pub fn profile(&self, rho: f64) -> f64 {
        if rho > 1.0 {
            return 0.0;
        }
        if let Some((e, plateau)) = self.cutoff {
            if rho <= e {
                return plateau;
            }
        }
        self.normalization * self.base_profile(rho)
    }

    /// Scaled kernel `w_δ(r) = δ^{-(d+1)} w(r/δ)`.
    ///
    /// Exactly zero for `r > δ`. Fractional kernels return `+∞` at `r = 0`;
    /// callers integrate them with weighted rules instead of point values.
    pub fn eval(&self, r: f64) -> f64 {
        if r > self.horizon {
            return 0.0;
        }
        let scale = self.horizon.powi(-(self.dimension as i32 + 1));
        scale * self.profile(r / self.horizon)
    }

    /// Whether the unit profile is non-increasing on `(0, 1)`.
    pub fn is_non_increasing(&self) -> bool {
        match &self.family {
            KernelFamily::Constant | KernelFamily::Fractional { .. } => true,
            KernelFamily::SineExample => false,
            KernelFamily::Tabulated { values } => values.windows(2).all(|w| w[1] <= w[0]),
        }
    }

    /// Whether `∫ w_δ` is finite (false only for the singular fractional profile
    /// in one dimension without a cutoff).
    pub fn is_integrable(&self) -> bool {
        match self.family {
            KernelFamily::Fractional { beta } => self.cutoff.is_some() || (self.dimension as f64) - 1.0 - beta > -1.0,
            _ => true,
        }
    }

    /// Regularized kernel `w_δ^ε`: equal to `w_δ` for `r > ε` and to
    /// `inf_{|y| ≤ ε} w_δ(|y|)` on the inner ball.
    pub fn epsilon_cutoff(&self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < self.horizon) {
            return Err(Error::InvalidArgument(format!(
                "cutoff radius must satisfy 0 < eps < delta (eps={epsilon}, delta={})",
                self.horizon
            )));
        }
        if self.family == KernelFamily::Constant {
            return Ok(self.clone());
        }
        let e = epsilon / self.horizon;
        let plateau = self.profile_infimum(e);
        let mut out = self.clone();
        out.cutoff = Some((e, plateau));
        Ok(out)
    }

    /// `inf_{0 < ρ ≤ e} w(ρ)` for the normalized profile.
    fn profile_infimum(&self, e: f64) -> f64 {
        match &self.family {
            KernelFamily::Constant => self.normalization,
            KernelFamily::Fractional { .. } => self.profile(e),
            KernelFamily::SineExample => self.normalization * self.base_profile(0.0).min(self.base_profile(e)),
            KernelFamily::Tabulated { values } => {
                let mut m = self.profile(e);
                for (r, v) in self.mesh.iter().zip(values) {
                    if *r <= e {
                        m = m.min(self.normalization * v);
                    }
                }
                m
            }
        }
    }

    /// `∫_{|x| ≤ δ} w_δ(|x|) |x| dx`, which equals `d` for a normalized kernel.
    pub fn first_moment(&self) -> Result<f64> {
        let rule = RadialRule::for_kernel(self, 1, 24)?;
        let unit: f64 = rule.integrate(|rho| rho);
        Ok(sphere_measure(self.dimension) * unit)
    }

    fn profile_moment_by_quadrature(&self, dimension: usize) -> Result<f64> {
        let mut probe = self.clone();
        probe.normalization = 1.0;
        probe.dimension = dimension;
        let rule = RadialRule::for_kernel(&probe, 1, 24)?;
        Ok(rule.integrate(|rho| rho))
    }
}

fn interpolate(mesh: &[f64], values: &[f64], rho: f64) -> f64 {
    if rho <= mesh[0] {
        return values[0];
    }
    let last = mesh.len() - 1;
    if rho >= mesh[last] {
        return values[last];
    }
    let idx = mesh.partition_point(|r| *r <= rho).max(1);
    let (r0, r1) = (mesh[idx - 1], mesh[idx]);
    let t = (rho - r0) / (r1 - r0);
    values[idx - 1] * (1.0 - t) + values[idx] * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_normalizations() {
        let k1 = KernelSpec::normalize(KernelFamily::Constant, 1, 1.0).unwrap();
        assert_relative_eq!(k1.normalization(), 1.0, max_relative = 1e-14);
        let k2 = KernelSpec::normalize(KernelFamily::Constant, 2, 1.0).unwrap();
        assert_relative_eq!(k2.normalization(), 3.0 / PI, max_relative = 1e-14);
        let k3 = KernelSpec::normalize(KernelFamily::Constant, 3, 1.0).unwrap();
        assert_relative_eq!(k3.normalization(), 3.0 / PI, max_relative = 1e-14);
    }

    #[test]
    fn fractional_normalization() {
        for beta in [1.0, 1.25, 1.5, 1.9] {
            let k = KernelSpec::normalize(KernelFamily::Fractional { beta }, 2, 1.0).unwrap();
            assert_relative_eq!(k.normalization(), (3.0 - beta) / PI, max_relative = 1e-14);
        }
        // β = 1 by direct integral: 2π C ∫ r dr... = π C = 2.
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.0 }, 2, 1.0).unwrap();
        assert_relative_eq!(k.normalization(), 2.0 / PI, max_relative = 1e-14);
    }

    #[test]
    fn sine_example_is_half_pi_in_one_dimension() {
        let k = KernelSpec::normalize(KernelFamily::SineExample, 1, 1.0).unwrap();
        assert_relative_eq!(k.normalization(), PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(k.eval(0.5), PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelSpec::normalize(KernelFamily::Fractional { beta: 2.0 }, 2, 1.0).is_err());
        assert!(KernelSpec::normalize(KernelFamily::Fractional { beta: 0.5 }, 2, 1.0).is_err());
        let bad = KernelFamily::Tabulated {
            values: vec![1.0, -0.1, 0.0],
        };
        assert!(KernelSpec::normalize(bad, 2, 1.0).is_err());
        assert!(KernelSpec::normalize(KernelFamily::Constant, 4, 1.0).is_err());
        assert!(KernelSpec::normalize(KernelFamily::Constant, 2, 0.0).is_err());
    }

    #[test]
    fn eval_scaling_and_support() {
        let k = KernelSpec::normalize(KernelFamily::Constant, 2, 1.0).unwrap();
        assert_relative_eq!(k.eval(0.5), 3.0 / PI, max_relative = 1e-15);
        assert_eq!(k.eval(2.0), 0.0);

        let f = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.5 }, 2, 0.5).unwrap();
        let expected = (1.5 / PI) * 0.5f64.powi(-3) * 0.5f64.powf(-1.5);
        assert_relative_eq!(f.eval(0.25), expected, max_relative = 1e-14);
        assert_eq!(f.eval(1.0), 0.0);
        assert!(f.eval(0.0).is_infinite());
    }

    #[test]
    fn moment_is_horizon_independent() {
        for family in [
            KernelFamily::Constant,
            KernelFamily::Fractional { beta: 1.5 },
            KernelFamily::SineExample,
        ] {
            for d in 1..=3 {
                let base = KernelSpec::normalize(family.clone(), d, 1.0).unwrap();
                for delta in [1.0, 0.1, 0.01] {
                    let k = base.with_horizon(delta).unwrap();
                    // ∫_{|x|≤δ} w_δ |x| dx = S_d δ^{-(d+1)} ∫ w(r/δ) r^d dr = S_d ∫ w(ρ) ρ^d dρ.
                    let m = k.first_moment().unwrap();
                    assert_relative_eq!(m, d as f64, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn tabulated_kernel_normalizes_by_quadrature() {
        let mesh = graded_mesh(33);
        let values: Vec<f64> = mesh.iter().map(|r| 2.0 - r).collect();
        let k = KernelSpec::normalize(KernelFamily::Tabulated { values }, 2, 1.0).unwrap();
        // ∫_0^1 (2 - ρ) ρ^2 dρ = 2/3 - 1/4 = 5/12, c = 2 / (2π · 5/12).
        assert_relative_eq!(k.normalization(), 12.0 / (5.0 * PI), max_relative = 1e-12);
        assert_relative_eq!(k.first_moment().unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn cutoff_plateaus() {
        let c = KernelSpec::normalize(KernelFamily::Constant, 1, 1.0).unwrap();
        let cc = c.epsilon_cutoff(0.1).unwrap();
        for r in [0.0, 0.05, 0.1, 0.5, 0.99] {
            assert_eq!(c.eval(r), cc.eval(r));
        }

        let f = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.0 }, 1, 1.0).unwrap();
        let fc = f.epsilon_cutoff(0.1).unwrap();
        assert_relative_eq!(fc.eval(0.0), f.eval(0.1), max_relative = 1e-15);
        assert_relative_eq!(fc.eval(0.03), f.eval(0.1), max_relative = 1e-15);
        assert_eq!(fc.eval(0.3), f.eval(0.3));

        let s = KernelSpec::normalize(KernelFamily::SineExample, 1, 1.0).unwrap();
        let sc = s.epsilon_cutoff(0.1).unwrap();
        assert_eq!(sc.eval(0.05), 0.0);
        assert_eq!(sc.eval(0.1), 0.0);

        assert!(f.epsilon_cutoff(1.0).is_err());
        assert!(f.epsilon_cutoff(0.0).is_err());
    }

    #[test]
    fn cutoff_is_dominated_and_monotone() {
        let f = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.5 }, 1, 0.5).unwrap();
        let fc = f.epsilon_cutoff(0.05).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..500 {
            let r = 0.5 * i as f64 / 500.0;
            let v = fc.eval(r);
            assert!(v <= f.eval(r));
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn graded_mesh_shape() {
        let m = graded_mesh(10);
        assert_eq!(m.len(), 10);
        assert_eq!(m[0], 0.0);
        assert_eq!(*m.last().unwrap(), 1.0);
        assert!(m.windows(2).all(|w| w[1] > w[0]));
        assert!(m[1] < 1e-5);
    }
}
