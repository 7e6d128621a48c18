//! Weighted quadrature over half-balls and intervals.
//!
//! Radial integrals absorb the kernel and the polar Jacobian into the rule:
//! a [`RadialRule`] for kernel `w` in dimension `d` approximates
//! `∫_0^1 w(ρ) ρ^{d-1} f(ρ) dρ` by `Σ_j W_j f(ρ_j)`. Fractional kernels use
//! Gauss–Jacobi rules with the exact weight `ρ^{d-1-β}`, smooth profiles use
//! Gauss–Legendre, and tabulated or cut-off profiles use composite panels.
//!
//! Angular integrals over the half-space `{s · n ≥ 0}` use Gauss–Legendre in
//! the angle from `n` (2D) or a Gauss–Legendre × trapezoid product rule over
//! the hemisphere (3D).

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::kernels::{KernelFamily, KernelSpec};

/// Default relative tolerance for symbol quadrature.
pub const SYMBOL_TOLERANCE: f64 = 1e-10;
/// Default relative tolerance for the one-dimensional `ρ_δ` integrals.
pub const RHO_TOLERANCE: f64 = 1e-8;
/// Largest Gauss order tried before reporting non-convergence.
pub const MAX_ORDER: usize = 512;

/// Tolerance and initial order shared by the half-ball integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Target relative tolerance.
    pub tol: f64,
    /// Initial Gauss order per panel, doubled on each refinement.
    pub panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            tol: SYMBOL_TOLERANCE,
            panels: 16,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Gauss–Jacobi rule for `∫_0^1 x^α g(x) dx`, `α > -1`, by Golub–Welsch.
pub fn gauss_jacobi_unit(n: usize, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(alpha > -1.0) {
        return Err(Error::NonIntegrable(format!("weight x^{alpha} is not integrable at 0")));
    }
    // Jacobi polynomials with weight (1-t)^0 (1+t)^α on [-1, 1].
    let (a, b) = (0.0, alpha);
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + a + b) * (2.0 * kf + a + b + 2.0))
        };
        jacobi[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + a + b;
            let off = (4.0 * j * (j + a) * (j + b) * (j + a + b) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let t = eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)];
            (0.5 * (1.0 + t), v0 * v0 / (alpha + 1.0))
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Ok(pairs.into_iter().unzip())
}

/// Radial rule `Σ_j W_j f(ρ_j) ≈ ∫_0^1 w(ρ) ρ^{d-1} f(ρ) dρ` for a kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl RadialRule {
    /// Builds the radial rule for `kernel` in its own dimension.
    ///
    /// `vanishing_order` is the power `m` with `f(ρ) = O(ρ^m)` at the origin;
    /// it only matters for singular kernels, where the Gauss–Jacobi weight
    /// `ρ^{d-1-β+m}` must be integrable.
    pub fn for_kernel(kernel: &KernelSpec, vanishing_order: u32, order: usize) -> Result<Self> {
        let d = kernel.dimension() as i32;
        let order = order.max(2);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut panels = 0;

        let push_panel = |lo: f64, hi: f64, n: usize, nodes: &mut Vec<f64>, weights: &mut Vec<f64>| {
            let (x, w) = gauss_legendre_on(n, lo, hi);
            for (r, v) in x.into_iter().zip(w) {
                nodes.push(r);
                weights.push(v * kernel.profile(r) * r.powi(d - 1));
            }
        };

        if let Some(e) = kernel.cutoff_radius() {
            push_panel(0.0, e, order, &mut nodes, &mut weights);
            panels += 1;
            // Geometric panels from the cutoff to 1 resolve the steep profile.
            let mut lo = e;
            while lo < 1.0 {
                let hi = (lo * 4.0).min(1.0);
                push_panel(lo, hi, order, &mut nodes, &mut weights);
                panels += 1;
                lo = hi;
            }
            return Ok(RadialRule { nodes, weights, panels });
        }

        match kernel.family() {
            KernelFamily::Fractional { beta } => {
                let m = vanishing_order as f64;
                let alpha = (d - 1) as f64 - beta + m;
                let (x, w) = gauss_jacobi_unit(order, alpha).map_err(|_| {
                    Error::NonIntegrable(format!(
                        "kernel r^-{beta} in dimension {d} against an integrand vanishing to order {vanishing_order}"
                    ))
                })?;
                let c = kernel.normalization();
                for (r, v) in x.into_iter().zip(w) {
                    nodes.push(r);
                    weights.push(c * v * r.powi(-(vanishing_order as i32)));
                }
                panels = 1;
            }
            KernelFamily::Tabulated { .. } => {
                let mut breaks = vec![0.0];
                breaks.extend(kernel.profile_breakpoints());
                breaks.push(1.0);
                let per = order.div_ceil(4).max(4);
                for w in breaks.windows(2) {
                    push_panel(w[0], w[1], per, &mut nodes, &mut weights);
                    panels += 1;
                }
            }
            KernelFamily::Constant | KernelFamily::SineExample => {
                push_panel(0.0, 1.0, order, &mut nodes, &mut weights);
                panels = 1;
            }
        }
        Ok(RadialRule { nodes, weights, panels })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(r, w)| w * f(*r)).sum()
    }
}

/// Unit vector parameterizing the half-space `H_n = {z : z · n ≥ 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    n: [f64; 3],
    dimension: usize,
}

impl Orientation {
    /// Normalizes `v`; fails on zero vectors or unsupported dimensions.
    pub fn new(v: &[f64]) -> Result<Self> {
        let dimension = v.len();
        if !(1..=3).contains(&dimension) {
            return Err(Error::InvalidArgument(format!(
                "orientation must have 1, 2 or 3 components (got {dimension})"
            )));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument("orientation must be a non-zero vector".into()));
        }
        let mut n = [0.0; 3];
        for (dst, src) in n.iter_mut().zip(v) {
            *dst = src / norm;
        }
        Ok(Orientation { n, dimension })
    }

    /// `n = (cos θ, sin θ)` in two dimensions.
    pub fn from_angle(theta: f64) -> Self {
        Orientation {
            n: [theta.cos(), theta.sin(), 0.0],
            dimension: 2,
        }
    }

    /// First coordinate axis in `dimension`.
    pub fn axis(dimension: usize) -> Self {
        let mut v = vec![0.0; dimension];
        v[0] = 1.0;
        Orientation::new(&v).expect("axis is a unit vector")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.n[..self.dimension]
    }

    pub fn reversed(&self) -> Self {
        Orientation {
            n: [-self.n[0], -self.n[1], -self.n[2]],
            dimension: self.dimension,
        }
    }

    /// Orthonormal frame `(n, t1, t2)` used by the hemisphere rule.
    fn frame(&self) -> [[f64; 3]; 3] {
        let n = self.n;
        let helper = if n[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let dot = helper[0] * n[0] + helper[1] * n[1] + helper[2] * n[2];
        let mut t1 = [helper[0] - dot * n[0], helper[1] - dot * n[1], helper[2] - dot * n[2]];
        let norm = (t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]).sqrt();
        t1.iter_mut().for_each(|x| *x /= norm);
        let t2 = [
            n[1] * t1[2] - n[2] * t1[1],
            n[2] * t1[0] - n[0] * t1[2],
            n[0] * t1[1] - n[1] * t1[0],
        ];
        [n, t1, t2]
    }
}

/// Which part of the unit sphere the angular rule covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// Directions with `e · n ≥ 0`.
    HalfSpace,
    /// All directions.
    Full,
}

/// Product rule over `(radius, direction)` for one kernel and orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dimension: usize,
    horizon: f64,
    radial: RadialRule,
    directions: Vec<[f64; 3]>,
    angular_weights: Vec<f64>,
    order: usize,
    tol: f64,
}

impl QuadratureRule {
    /// Rule with radial order `order` and a matching angular order.
    pub fn new(
        kernel: &KernelSpec,
        orientation: &Orientation,
        coverage: Coverage,
        order: usize,
        tol: f64,
    ) -> Result<Self> {
        let dimension = kernel.dimension();
        if orientation.dimension() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                got: orientation.dimension(),
            });
        }
        let radial = RadialRule::for_kernel(kernel, minimal_vanishing_order(kernel), order)?;
        let (directions, angular_weights) = angular_rule(orientation, coverage, order);
        Ok(QuadratureRule {
            dimension,
            horizon: kernel.horizon(),
            radial,
            directions,
            angular_weights,
            order,
            tol,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn radial(&self) -> &RadialRule {
        &self.radial
    }

    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }

    pub fn angular_weights(&self) -> &[f64] {
        &self.angular_weights
    }

    /// Number of radial panels times angular panels (1 each for Gauss rules).
    pub fn panel_count(&self) -> usize {
        self.radial.panels()
    }

    /// `∫ w_δ(|s|) f(|s|, s/|s|) ds` over the covered part of `B_δ`, for an
    /// integrand writing `out.len()` real components.
    pub fn apply<F>(&self, out_len: usize, f: F) -> Vec<f64>
    where
        F: Fn(f64, &[f64], &mut [f64]),
    {
        let mut acc = vec![0.0; out_len];
        let mut buf = vec![0.0; out_len];
        let d = self.dimension;
        for (dir, aw) in self.directions.iter().zip(&self.angular_weights) {
            for (rho, rw) in self.radial.nodes().iter().zip(self.radial.weights()) {
                buf.iter_mut().for_each(|x| *x = 0.0);
                f(self.horizon * rho, &dir[..d], &mut buf);
                let w = aw * rw;
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += w * b;
                }
            }
        }
        let scale = 1.0 / self.horizon;
        acc.iter_mut().for_each(|x| *x *= scale);
        acc
    }
}

/// Smallest `m` for which `w(ρ) ρ^{d-1+m}` is integrable at the origin.
///
/// Half-ball integrands built from `e^{iξ·s} - 1` or `|s|` vanish to first
/// order, which is what singular one-dimensional kernels require.
pub fn minimal_vanishing_order(kernel: &KernelSpec) -> u32 {
    match kernel.family() {
        KernelFamily::Fractional { beta } if kernel.cutoff_radius().is_none() => {
            let alpha = kernel.dimension() as f64 - 1.0 - beta;
            if alpha > -1.0 {
                0
            } else {
                (-1.0 - alpha).floor() as u32 + 1
            }
        }
        _ => 0,
    }
}

fn angular_rule(orientation: &Orientation, coverage: Coverage, order: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let n = orientation.as_slice();
    match orientation.dimension() {
        1 => match coverage {
            Coverage::HalfSpace => (vec![[n[0], 0.0, 0.0]], vec![1.0]),
            Coverage::Full => (vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]], vec![1.0, 1.0]),
        },
        2 => {
            let phi = n[1].atan2(n[0]);
            match coverage {
                Coverage::HalfSpace => {
                    let (x, w) = gauss_legendre_on(order, -PI / 2.0, PI / 2.0);
                    let dirs = x.iter().map(|t| [(phi + t).cos(), (phi + t).sin(), 0.0]).collect();
                    (dirs, w)
                }
                Coverage::Full => {
                    let m = 2 * order;
                    let h = 2.0 * PI / m as f64;
                    let dirs = (0..m)
                        .map(|j| {
                            let t = phi + h * (j as f64 + 0.5);
                            [t.cos(), t.sin(), 0.0]
                        })
                        .collect();
                    (dirs, vec![h; m])
                }
            }
        }
        _ => {
            let [axis, t1, t2] = orientation.frame();
            let (lo, hi) = match coverage {
                Coverage::HalfSpace => (0.0, 1.0),
                Coverage::Full => (-1.0, 1.0),
            };
            // Gauss–Legendre in cos(polar angle) absorbs the sin Jacobian.
            let (cs, cw) = gauss_legendre_on(order, lo, hi);
            let m = 2 * order;
            let h = 2.0 * PI / m as f64;
            let mut dirs = Vec::with_capacity(cs.len() * m);
            let mut weights = Vec::with_capacity(cs.len() * m);
            for (c, w) in cs.iter().zip(&cw) {
                let s = (1.0 - c * c).max(0.0).sqrt();
                for j in 0..m {
                    let psi = h * (j as f64 + 0.5);
                    let (sp, cp) = psi.sin_cos();
                    let mut e = [0.0; 3];
                    for k in 0..3 {
                        e[k] = c * axis[k] + s * (cp * t1[k] + sp * t2[k]);
                    }
                    dirs.push(e);
                    weights.push(w * h);
                }
            }
            (dirs, weights)
        }
    }
}

fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Runs `probe` on rules of increasing order until two successive refinements
/// agree to `settings.tol` (relative), returning the accepted finer rule and
/// the final error estimate.
pub fn converged_rule<F>(
    kernel: &KernelSpec,
    orientation: &Orientation,
    coverage: Coverage,
    settings: QuadratureSettings,
    what: &str,
    probe: F,
) -> Result<(QuadratureRule, f64)>
where
    F: Fn(&QuadratureRule) -> Vec<f64>,
{
    let mut order = settings.panels.max(2);
    let mut coarse = QuadratureRule::new(kernel, orientation, coverage, order, settings.tol)?;
    let mut coarse_val = probe(&coarse);
    let mut estimate = f64::INFINITY;
    while order * 2 <= MAX_ORDER {
        order *= 2;
        let fine = QuadratureRule::new(kernel, orientation, coverage, order, settings.tol)?;
        let fine_val = probe(&fine);
        estimate = relative_gap(&coarse_val, &fine_val);
        if estimate <= settings.tol {
            return Ok((fine, estimate));
        }
        coarse = fine;
        coarse_val = fine_val;
    }
    let _ = coarse;
    Err(Error::NonConvergence {
        what: what.to_string(),
        estimate,
        tolerance: settings.tol,
    })
}

/// `∫_{H_n ∩ B_δ} w_δ(|s|) f(|s|, s/|s|) ds` with refinement until two
/// successive orders agree to the requested tolerance.
pub fn integrate_halfball<F>(
    kernel: &KernelSpec,
    orientation: &Orientation,
    settings: QuadratureSettings,
    out_len: usize,
    f: F,
) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let (rule, _) = converged_rule(
        kernel,
        orientation,
        Coverage::HalfSpace,
        settings,
        "half-ball integral",
        |r| r.apply(out_len, &f),
    )?;
    Ok(rule.apply(out_len, &f))
}

/// Same as [`integrate_halfball`] over the full ball.
pub fn integrate_ball<F>(kernel: &KernelSpec, settings: QuadratureSettings, out_len: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = Orientation::axis(kernel.dimension());
    let (rule, _) = converged_rule(kernel, &n, Coverage::Full, settings, "ball integral", |r| {
        r.apply(out_len, &f)
    })?;
    Ok(rule.apply(out_len, &f))
}

// 15-point Gauss–Kronrod nodes and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Outcome of a failed adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveFailure {
    pub estimate: f64,
    /// Left end of the interval carrying the largest error.
    pub worst_at: f64,
}

/// Globally adaptive 15-point Gauss–Kronrod integration of `f` on `[a, b]`.
///
/// Returns the value once the summed error estimate is below
/// `max(abs_tol, rel_tol · |I|)`.
pub fn adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> std::result::Result<f64, AdaptiveFailure> {
    const MAX_INTERVALS: usize = 4000;
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = kronrod15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: f64 = intervals.iter().map(|x| x.2).sum();
        let err: f64 = intervals.iter().map(|x| x.3).sum();
        if total.is_finite() && err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (idx, worst) = intervals
            .iter()
            .enumerate()
            .max_by(|p, q| p.1 .3.partial_cmp(&q.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, x)| (i, *x))
            .unwrap();
        let (lo, hi, _, _) = worst;
        let mid = 0.5 * (lo + hi);
        if intervals.len() >= MAX_INTERVALS || !(mid > lo && mid < hi) || !err.is_finite() || !total.is_finite() {
            return Err(AdaptiveFailure {
                estimate: err,
                worst_at: lo,
            });
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        intervals[idx] = (lo, mid, v1, e1);
        intervals.push((mid, hi, v2, e2));
    }
}

/// Panel-adaptive `∫_a^b w_δ(s) f(s) ds` for a one-dimensional kernel.
///
/// Non-integrable pairs (for example a fractional kernel against an
/// integrand that does not vanish at the origin) are reported as
/// [`Error::NonIntegrable`].
pub fn integrate_interval(kernel: &KernelSpec, a: f64, b: f64, tol: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    if kernel.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: kernel.dimension(),
        });
    }
    let delta = kernel.horizon();
    if !(0.0 <= a && a <= b && b <= delta * (1.0 + 1e-15)) {
        return Err(Error::InvalidArgument(format!(
            "interval [{a}, {b}] must lie inside [0, {delta}]"
        )));
    }
    let b = b.min(delta);
    let integrand = |s: f64| kernel.eval(s) * f(s);
    // Breakpoints of the profile keep the panels aligned with kinks.
    let mut cuts: Vec<f64> = kernel
        .profile_breakpoints()
        .into_iter()
        .map(|r| r * delta)
        .filter(|s| *s > a && *s < b)
        .collect();
    cuts.insert(0, a);
    cuts.push(b);
    let scale = integrate_scale(kernel);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        match adaptive(
            integrand,
            w[0],
            w[1],
            tol * scale * (w[1] - w[0]) / (b - a).max(f64::MIN_POSITIVE),
            tol,
        ) {
            Ok(v) => total += v,
            Err(fail) => {
                if fail.worst_at == 0.0 && !kernel.is_integrable() {
                    return Err(Error::NonIntegrable(format!(
                        "integrand times {} kernel diverges at the origin",
                        kernel.family().name()
                    )));
                }
                return Err(Error::NonConvergence {
                    what: format!("interval integral on [{}, {}]", w[0], w[1]),
                    estimate: fail.estimate,
                    tolerance: tol,
                });
            }
        }
    }
    Ok(total)
}

/// Typical magnitude of `∫ w_δ`, used to turn relative into absolute tolerances.
fn integrate_scale(kernel: &KernelSpec) -> f64 {
    1.0 / kernel.horizon()
}
