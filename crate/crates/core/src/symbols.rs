//! Fourier symbols of the half-ball operators.
//!
//! The gradient acts on `e^{iξ·x}` as multiplication by
//! `λ(ξ) = 2∫_{H_n ∩ B_δ} w_δ(|s|) s/|s| (e^{iξ·s} - 1) ds`, and its imaginary
//! part is `Λ(|ξ|) ξ/|ξ|` with `Λ` independent of `n`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::Lattice;
use crate::kernels::{KernelFamily, KernelSpec};
use crate::quadrature::{
    converged_rule, gauss_legendre_on, Coverage, Orientation, QuadratureRule, QuadratureSettings, RadialRule, MAX_ORDER,
};

pub type Symbol = [Complex64; 3];

const CZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Evaluates `λ_δ^n(ξ)` at arbitrary real frequencies with a fixed rule.
#[derive(Debug, Clone)]
pub struct SymbolEvaluator {
    rule: QuadratureRule,
    horizon: f64,
    dimension: usize,
    estimate: f64,
}

impl SymbolEvaluator {
    /// Chooses the quadrature order by refinement at frequencies of size
    /// `max_freq` (the hardest modes of a table).
    pub fn new(
        kernel: &KernelSpec,
        orientation: &Orientation,
        settings: QuadratureSettings,
        max_freq: f64,
    ) -> Result<Self> {
        let d = kernel.dimension();
        let probes = probe_frequencies(d, max_freq.max(1.0));
        let delta = kernel.horizon();
        let (rule, estimate) = converged_rule(
            kernel,
            orientation,
            Coverage::HalfSpace,
            settings,
            "symbol quadrature",
            |rule| {
                probes
                    .iter()
                    .flat_map(|xi| {
                        let v = eval_with(rule, delta, d, xi);
                        v[..d].iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>()
                    })
                    .collect()
            },
        )?;
        Ok(SymbolEvaluator {
            rule,
            horizon: delta,
            dimension: d,
            estimate,
        })
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    /// Relative gap between the last two refinements at the probe modes.
    pub fn error_estimate(&self) -> f64 {
        self.estimate
    }

    pub fn eval(&self, xi: &[f64]) -> Symbol {
        eval_with(&self.rule, self.horizon, self.dimension, xi)
    }
}

fn probe_frequencies(d: usize, m: f64) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![m], vec![0.5 * m]],
        2 => vec![
            vec![m, m],
            vec![m, 0.0],
            vec![0.0, m],
            vec![m, -m],
            vec![0.5 * m, -0.3 * m],
        ],
        _ => vec![
            vec![m, m, m],
            vec![m, 0.0, 0.0],
            vec![0.0, m, 0.0],
            vec![0.0, 0.0, m],
            vec![m, -m, m],
            vec![-0.5 * m, 0.3 * m, 0.7 * m],
        ],
    }
}

fn eval_with(rule: &QuadratureRule, delta: f64, d: usize, xi: &[f64]) -> Symbol {
    let radial = rule.radial();
    let (nodes, weights) = (radial.nodes(), radial.weights());
    let mut acc = [CZERO; 3];
    for (e, aw) in rule.directions().iter().zip(rule.angular_weights()) {
        let dot: f64 = (0..d).map(|k| xi[k] * e[k]).sum::<f64>() * delta;
        let mut re = 0.0;
        let mut im = 0.0;
        for (rho, w) in nodes.iter().zip(weights) {
            let (s, c) = (0.5 * dot * rho).sin_cos();
            re -= w * 2.0 * s * s;
            im += w * 2.0 * s * c;
        }
        let z = Complex64::new(re, im) * *aw;
        for k in 0..d {
            acc[k] += z * e[k];
        }
    }
    let scale = 2.0 / delta;
    for z in acc.iter_mut() {
        *z *= scale;
    }
    acc
}

/// Evaluates `Λ_δ(|ξ|)` with a rule refined at a maximal frequency.
#[derive(Debug, Clone)]
pub struct RadialSymbol {
    radial: RadialRule,
    angles: (Vec<f64>, Vec<f64>),
    horizon: f64,
    dimension: usize,
}

impl RadialSymbol {
    pub fn new(kernel: &KernelSpec, settings: QuadratureSettings, max_freq: f64) -> Result<Self> {
        let mut order = settings.panels.max(2);
        let m = max_freq.max(1.0);
        let probe = |r: &RadialSymbol| [r.eval(m), r.eval(0.37 * m)];
        let mut coarse = Self::with_order(kernel, order)?;
        let mut coarse_val = probe(&coarse);
        let mut estimate = f64::INFINITY;
        while order * 2 <= MAX_ORDER {
            order *= 2;
            let fine = Self::with_order(kernel, order)?;
            let fine_val = probe(&fine);
            estimate = fine_val
                .iter()
                .zip(&coarse_val)
                .map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            if estimate <= settings.tol {
                return Ok(fine);
            }
            coarse = fine;
            coarse_val = fine_val;
        }
        let _ = coarse;
        Err(Error::NonConvergence {
            what: "radial symbol quadrature".into(),
            estimate,
            tolerance: settings.tol,
        })
    }

    fn with_order(kernel: &KernelSpec, order: usize) -> Result<Self> {
        let d = kernel.dimension();
        let radial = RadialRule::for_kernel(kernel, crate::quadrature::minimal_vanishing_order(kernel), order)?;
        let angles = match d {
            1 => (vec![0.0], vec![1.0]),
            2 => gauss_legendre_on(order, 0.0, PI / 2.0),
            _ => gauss_legendre_on(order, 0.0, 1.0),
        };
        Ok(RadialSymbol {
            radial,
            angles,
            horizon: kernel.horizon(),
            dimension: d,
        })
    }

    /// `Λ_δ(|ξ|)`.
    pub fn eval(&self, xi_norm: f64) -> f64 {
        let k = self.horizon * xi_norm;
        let inner = |c: f64| self.radial.integrate(|rho| (k * rho * c).sin());
        let delta = self.horizon;
        match self.dimension {
            1 => 2.0 / delta * inner(1.0),
            2 => {
                let s: f64 = self
                    .angles
                    .0
                    .iter()
                    .zip(&self.angles.1)
                    .map(|(t, w)| w * t.cos() * inner(t.cos()))
                    .sum();
                4.0 / delta * s
            }
            _ => {
                let s: f64 = self
                    .angles
                    .0
                    .iter()
                    .zip(&self.angles.1)
                    .map(|(c, w)| w * c * inner(*c))
                    .sum();
                4.0 * PI / delta * s
            }
        }
    }
}

/// `Λ_δ(|ξ|)` for a single frequency magnitude.
pub fn lambda_radial(kernel: &KernelSpec, xi_norm: f64, settings: QuadratureSettings) -> Result<f64> {
    if xi_norm == 0.0 {
        return Ok(0.0);
    }
    Ok(RadialSymbol::new(kernel, settings, xi_norm)?.eval(xi_norm))
}

/// Lattice extremes of the symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    /// `min_ξ |λ(ξ)|`.
    pub min_abs: f64,
    /// `max_ξ |λ(ξ)| / |ξ|`.
    pub max_ratio: f64,
    /// Mode attaining the minimum.
    pub argmin: Vec<i64>,
}

/// Cached `λ_δ^n(ξ)` over `[-N, N]^d \ {0}` together with `Λ_δ` keyed by `|ξ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    kernel: Option<KernelSpec>,
    orientation: Orientation,
    lattice: Lattice,
    values: Vec<Complex64>,
    radial: BTreeMap<i64, f64>,
    tolerance: f64,
    order: usize,
}

impl SymbolTable {
    /// Builds the table in parallel over one representative of each `±ξ` pair.
    pub fn build(
        kernel: &KernelSpec,
        orientation: &Orientation,
        bound: usize,
        settings: QuadratureSettings,
    ) -> Result<Self> {
        let d = kernel.dimension();
        if orientation.dimension() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: orientation.dimension(),
            });
        }
        let lattice = Lattice::new(d, bound)?;
        let max_freq = bound as f64;
        let evaluator = SymbolEvaluator::new(kernel, orientation, settings, max_freq)?;
        let radial_eval = RadialSymbol::new(kernel, settings, max_freq * (d as f64).sqrt())?;

        let canonical: Vec<usize> = ((lattice.zero_index() + 1)..lattice.len()).collect();
        let computed: Vec<Symbol> = canonical
            .par_iter()
            .map(|&idx| {
                let mode = lattice.mode(idx);
                let xi: Vec<f64> = mode[..d].iter().map(|k| *k as f64).collect();
                evaluator.eval(&xi)
            })
            .collect();
        let mut values = vec![CZERO; lattice.len() * d];
        for (&idx, sym) in canonical.iter().zip(&computed) {
            let neg = lattice.negated(idx);
            for k in 0..d {
                values[idx * d + k] = sym[k];
                values[neg * d + k] = sym[k].conj();
            }
        }

        let keys: Vec<i64> = {
            let mut k: Vec<i64> = canonical.iter().map(|&i| lattice.norm_sq(i)).collect();
            k.sort_unstable();
            k.dedup();
            k
        };
        let radial: BTreeMap<i64, f64> = keys
            .par_iter()
            .map(|&k2| (k2, radial_eval.eval((k2 as f64).sqrt())))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();

        let table = SymbolTable {
            kernel: Some(kernel.clone()),
            orientation: *orientation,
            lattice,
            values,
            radial,
            tolerance: settings.tol,
            order: evaluator.order(),
        };
        table.check_nondegenerate()?;
        Ok(table)
    }

    /// The local symbol `λ = iξ`, used for the δ = 0 reference solutions.
    pub fn local(dimension: usize, bound: usize) -> Result<Self> {
        let lattice = Lattice::new(dimension, bound)?;
        let d = dimension;
        let mut values = vec![CZERO; lattice.len() * d];
        let mut radial = BTreeMap::new();
        for (idx, mode) in lattice.modes() {
            for k in 0..d {
                values[idx * d + k] = Complex64::new(0.0, mode[k] as f64);
            }
            let k2 = lattice.norm_sq(idx);
            if k2 > 0 {
                radial.insert(k2, (k2 as f64).sqrt());
            }
        }
        Ok(SymbolTable {
            kernel: None,
            orientation: Orientation::axis(d),
            lattice,
            values,
            radial,
            tolerance: 0.0,
            order: 0,
        })
    }

    fn check_nondegenerate(&self) -> Result<()> {
        for idx in 0..self.lattice.len() {
            if idx == self.lattice.zero_index() {
                continue;
            }
            let m = self.abs_sq(idx).sqrt();
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::DegenerateSymbol {
                    mode: self.lattice.mode(idx)[..self.dimension()].to_vec(),
                    magnitude: m,
                });
            }
        }
        Ok(())
    }

    /// Table for the reversed orientation, `λ^{-n} = -conj(λ^n)`.
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        out.orientation = self.orientation.reversed();
        for z in out.values.iter_mut() {
            *z = -z.conj();
        }
        out
    }

    pub fn kernel(&self) -> Option<&KernelSpec> {
        self.kernel.as_ref()
    }

    pub fn is_local(&self) -> bool {
        self.kernel.is_none()
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn dimension(&self) -> usize {
        self.lattice.dimension()
    }

    pub fn bound(&self) -> usize {
        self.lattice.bound()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Gauss order accepted by refinement.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `λ(ξ)` at linear index `idx` (zero at `ξ = 0`).
    pub fn lambda(&self, idx: usize) -> &[Complex64] {
        let d = self.dimension();
        &self.values[idx * d..(idx + 1) * d]
    }

    pub fn lambda_at(&self, mode: &[i64]) -> Option<&[Complex64]> {
        self.lattice.index(mode).map(|i| self.lambda(i))
    }

    /// `|λ(ξ)|²`.
    pub fn abs_sq(&self, idx: usize) -> f64 {
        self.lambda(idx).iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Λ_δ(|ξ|)` from the cache (0 at the origin).
    pub fn radial(&self, norm_sq: i64) -> Option<f64> {
        if norm_sq == 0 {
            return Some(0.0);
        }
        self.radial.get(&norm_sq).copied()
    }

    pub fn radial_values(&self) -> &BTreeMap<i64, f64> {
        &self.radial
    }

    pub fn verify_bounds(&self) -> BoundsReport {
        let d = self.dimension();
        let mut min_abs = f64::INFINITY;
        let mut max_ratio = 0.0f64;
        let mut argmin = vec![0; d];
        for idx in 0..self.lattice.len() {
            let k2 = self.lattice.norm_sq(idx);
            if k2 == 0 {
                continue;
            }
            let m = self.abs_sq(idx).sqrt();
            if m < min_abs {
                min_abs = m;
                argmin = self.lattice.mode(idx)[..d].to_vec();
            }
            max_ratio = max_ratio.max(m / (k2 as f64).sqrt());
        }
        BoundsReport {
            min_abs,
            max_ratio,
            argmin,
        }
    }

    /// `max_ξ |Im λ(ξ) - Λ(|ξ|) ξ/|ξ|| / |ξ|`.
    pub fn im_split_defect(&self) -> f64 {
        let d = self.dimension();
        let mut worst = 0.0f64;
        for (idx, mode) in self.lattice.modes() {
            let k2 = self.lattice.norm_sq(idx);
            if k2 == 0 {
                continue;
            }
            let norm = (k2 as f64).sqrt();
            let big = self.radial(k2).unwrap_or(f64::NAN);
            let lam = self.lambda(idx);
            let err: f64 = (0..d)
                .map(|k| (lam[k].im - big * mode[k] as f64 / norm).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(err / norm);
        }
        worst
    }

    /// Ensures a field on `lattice` can be used with this table.
    pub fn check_lattice(&self, lattice: Lattice) -> Result<()> {
        if lattice.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: lattice.dimension(),
            });
        }
        if lattice.bound() != self.bound() {
            return Err(Error::TruncationMismatch {
                field: lattice.bound(),
                table: self.bound(),
            });
        }
        Ok(())
    }

    /// Writes the portable text cache.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(e.to_string());
        let kernel = self
            .kernel
            .as_ref()
            .ok_or_else(|| Error::Cache("local tables are not cached".into()))?;
        writeln!(w, "{}", self.header(kernel)).map_err(io)?;
        let d = self.dimension();
        for idx in (self.lattice.zero_index() + 1)..self.lattice.len() {
            let mode = self.lattice.mode(idx);
            let mut row: Vec<String> = mode[..d].iter().map(|k| k.to_string()).collect();
            for z in self.lambda(idx) {
                row.push(format!("{:.16e}", z.re));
                row.push(format!("{:.16e}", z.im));
            }
            writeln!(w, "{}", row.join(" ")).map_err(io)?;
        }
        for (k2, v) in &self.radial {
            writeln!(w, "R {k2} {v:.16e}").map_err(io)?;
        }
        Ok(())
    }

    fn header(&self, kernel: &KernelSpec) -> String {
        let beta = kernel
            .family()
            .beta()
            .map(|b| format!("{b:.16e}"))
            .unwrap_or_else(|| "-".into());
        let n: Vec<String> = self
            .orientation
            .as_slice()
            .iter()
            .map(|x| format!("{x:.16e}"))
            .collect();
        format!(
            "# halfball-symbols family={} beta={} delta={:.16e} d={} n={} N={} tol={:.3e} order={}",
            kernel.family().name(),
            beta,
            kernel.horizon(),
            self.dimension(),
            n.join(","),
            self.bound(),
            self.tolerance,
            self.order
        )
    }

    /// Reads a cache written by [`Self::write_cache`]. Tabulated kernels
    /// cannot be restored from the header and are rejected.
    pub fn read_cache<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Cache("empty cache".into()))?
            .map_err(|e| Error::Cache(e.to_string()))?;
        let fields: BTreeMap<&str, &str> = header
            .strip_prefix("# halfball-symbols ")
            .ok_or_else(|| Error::Cache("missing header".into()))?
            .split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .collect();
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Cache(format!("header lacks {k}")))
        };
        let parse = |k: &str| -> Result<f64> { get(k)?.parse::<f64>().map_err(|_| Error::Cache(format!("bad {k}"))) };
        let d = parse("d")? as usize;
        let bound = parse("N")? as usize;
        let delta = parse("delta")?;
        let family = match get("family")? {
            "constant" => KernelFamily::Constant,
            "sine" => KernelFamily::SineExample,
            "fractional" => KernelFamily::Fractional { beta: parse("beta")? },
            other => return Err(Error::Cache(format!("cannot restore kernel family {other}"))),
        };
        let kernel = KernelSpec::normalize(family, d, delta)?;
        let n: Vec<f64> = get("n")?
            .split(',')
            .map(|x| x.parse::<f64>().map_err(|_| Error::Cache("bad orientation".into())))
            .collect::<Result<_>>()?;
        let orientation = Orientation::new(&n)?;
        let lattice = Lattice::new(d, bound)?;
        let mut values = vec![CZERO; lattice.len() * d];
        let mut radial = BTreeMap::new();
        let mut seen = 0usize;
        for line in lines {
            let line = line.map_err(|e| Error::Cache(e.to_string()))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.is_empty() {
                continue;
            }
            if parts[0] == "R" {
                let k2 = parts.get(1).and_then(|s| s.parse::<i64>().ok());
                let v = parts.get(2).and_then(|s| s.parse::<f64>().ok());
                match (k2, v) {
                    (Some(k2), Some(v)) => {
                        radial.insert(k2, v);
                    }
                    _ => return Err(Error::Cache(format!("bad radial line: {line}"))),
                }
                continue;
            }
            if parts.len() != 3 * d {
                return Err(Error::Cache(format!("bad mode line: {line}")));
            }
            let mode: Vec<i64> = parts[..d]
                .iter()
                .map(|s| s.parse::<i64>().map_err(|_| Error::Cache(format!("bad mode: {line}"))))
                .collect::<Result<_>>()?;
            let idx = lattice
                .index(&mode)
                .ok_or_else(|| Error::Cache(format!("mode outside lattice: {line}")))?;
            let neg = lattice.negated(idx);
            for k in 0..d {
                let re: f64 = parts[d + 2 * k]
                    .parse()
                    .map_err(|_| Error::Cache(format!("bad value: {line}")))?;
                let im: f64 = parts[d + 2 * k + 1]
                    .parse()
                    .map_err(|_| Error::Cache(format!("bad value: {line}")))?;
                values[idx * d + k] = Complex64::new(re, im);
                values[neg * d + k] = Complex64::new(re, -im);
            }
            seen += 1;
        }
        if seen != (lattice.len() - 1) / 2 {
            return Err(Error::Cache(format!(
                "expected {} modes, found {seen}",
                (lattice.len() - 1) / 2
            )));
        }
        let table = SymbolTable {
            kernel: Some(kernel),
            orientation,
            lattice,
            values,
            radial,
            tolerance: parse("tol")?,
            order: parse("order")? as usize,
        };
        table.check_nondegenerate()?;
        Ok(table)
    }

    /// True when this table was built for the given kernel, orientation,
    /// bound and tolerance.
    pub fn matches(&self, kernel: &KernelSpec, orientation: &Orientation, bound: usize, tol: f64) -> bool {
        let same_n = self
            .orientation
            .as_slice()
            .iter()
            .zip(orientation.as_slice())
            .all(|(a, b)| (a - b).abs() <= 1e-15);
        self.kernel.as_ref() == Some(kernel) && same_n && self.bound() == bound && self.tolerance <= tol * (1.0 + 1e-12)
    }
}

/// Modified gradient symbol `μ*(ξ) = iΛ_δ(|ξ|) ξ/|ξ| + m_δ(ξ) k` with
/// `m_δ(ξ) = ∫_{B_δ} w_δ(|s|)(cos(ξ·s) - 1) ds ≤ 0`.
#[derive(Debug, Clone)]
pub struct StarSymbol {
    ball: QuadratureRule,
    radial: RadialSymbol,
    kvec: Vec<f64>,
    horizon: f64,
}

impl StarSymbol {
    pub fn new(kernel: &KernelSpec, kvec: &[f64], settings: QuadratureSettings, max_freq: f64) -> Result<Self> {
        let d = kernel.dimension();
        if kvec.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: kvec.len(),
            });
        }
        let probes = probe_frequencies(d, max_freq.max(1.0));
        let delta = kernel.horizon();
        let axis = Orientation::axis(d);
        let (ball, _) = converged_rule(kernel, &axis, Coverage::Full, settings, "ball quadrature", |rule| {
            probes.iter().map(|xi| ball_deficit(rule, delta, d, xi)).collect()
        })?;
        let radial = RadialSymbol::new(kernel, settings, max_freq.max(1.0) * (d as f64).sqrt())?;
        Ok(StarSymbol {
            ball,
            radial,
            kvec: kvec.to_vec(),
            horizon: delta,
        })
    }

    /// `m_δ(ξ)`.
    pub fn deficit(&self, xi: &[f64]) -> f64 {
        ball_deficit(&self.ball, self.horizon, xi.len(), xi)
    }

    pub fn eval(&self, xi: &[f64]) -> Symbol {
        let d = xi.len();
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut out = [CZERO; 3];
        if norm == 0.0 {
            return out;
        }
        let big = self.radial.eval(norm);
        let m = self.deficit(xi);
        for k in 0..d {
            out[k] = Complex64::new(m * self.kvec[k], big * xi[k] / norm);
        }
        out
    }
}

fn ball_deficit(rule: &QuadratureRule, delta: f64, d: usize, xi: &[f64]) -> f64 {
    let radial = rule.radial();
    let mut acc = 0.0;
    for (e, aw) in rule.directions().iter().zip(rule.angular_weights()) {
        let dot: f64 = (0..d).map(|k| xi[k] * e[k]).sum::<f64>() * delta;
        let s: f64 = radial
            .nodes()
            .iter()
            .zip(radial.weights())
            .map(|(rho, w)| {
                let h = (0.5 * dot * rho).sin();
                -2.0 * w * h * h
            })
            .sum();
        acc += aw * s;
    }
    acc / delta
}

/// `μ*(ξ)` for a single frequency.
pub fn star_symbol(kernel: &KernelSpec, kvec: &[f64], xi: &[f64], settings: QuadratureSettings) -> Result<Symbol> {
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("the modified symbol needs ξ ≠ 0".into()));
    }
    let max = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(StarSymbol::new(kernel, kvec, settings, max)?.eval(xi))
}

/// `(1/2π) ∫_{S¹} |λ_δ^n(ξ)|² dn` by the trapezoid rule over `samples`
/// orientations (two dimensions).
pub fn averaged_energy_density(
    kernel: &KernelSpec,
    xi: &[f64],
    samples: usize,
    settings: QuadratureSettings,
) -> Result<f64> {
    if kernel.dimension() != 2 || xi.len() != 2 {
        return Err(Error::InvalidArgument(
            "orientation averaging is defined for d = 2".into(),
        ));
    }
    if samples < 8 {
        return Err(Error::InvalidArgument(format!(
            "need at least 8 orientations (got {samples})"
        )));
    }
    if xi.iter().all(|x| *x == 0.0) {
        return Err(Error::InvalidArgument("ξ must be non-zero".into()));
    }
    let max = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut total = 0.0;
    for j in 0..samples {
        let n = Orientation::from_angle(2.0 * PI * j as f64 / samples as f64);
        let ev = SymbolEvaluator::new(kernel, &n, settings, max)?;
        let lam = ev.eval(xi);
        total += lam[..2].iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(total / samples as f64)
}

/// Independent check of `λ_δ^n(ξ)` in 2D: midpoint rule on a `cells × cells`
/// grid over the bounding box `[-δ, δ]²` with the half-disk indicator.
pub fn cartesian_midpoint_symbol(
    kernel: &KernelSpec,
    orientation: &Orientation,
    xi: &[f64],
    cells: usize,
) -> Result<Symbol> {
    if kernel.dimension() != 2 || xi.len() != 2 || orientation.dimension() != 2 {
        return Err(Error::InvalidArgument("the Cartesian check is two-dimensional".into()));
    }
    let delta = kernel.horizon();
    let h = 2.0 * delta / cells as f64;
    let n = orientation.as_slice();
    let rows: Vec<[f64; 4]> = (0..cells)
        .into_par_iter()
        .map(|i| {
            let x = -delta + (i as f64 + 0.5) * h;
            let mut acc = [0.0; 4];
            for j in 0..cells {
                let y = -delta + (j as f64 + 0.5) * h;
                let r = (x * x + y * y).sqrt();
                if r > delta || x * n[0] + y * n[1] < 0.0 {
                    continue;
                }
                let w = kernel.eval(r) / r;
                let phase = xi[0] * x + xi[1] * y;
                let c = phase.cos() - 1.0;
                let s = phase.sin();
                acc[0] += w * x * c;
                acc[1] += w * x * s;
                acc[2] += w * y * c;
                acc[3] += w * y * s;
            }
            acc
        })
        .collect();
    let mut sum = [0.0; 4];
    for r in rows {
        for k in 0..4 {
            sum[k] += r[k];
        }
    }
    let scale = 2.0 * h * h;
    Ok([
        Complex64::new(sum[0], sum[1]) * scale,
        Complex64::new(sum[2], sum[3]) * scale,
        CZERO,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constant2(delta: f64) -> KernelSpec {
        KernelSpec::normalize(KernelFamily::Constant, 2, delta).unwrap()
    }

    fn settings() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    fn close(a: &[Complex64], b: &[f64], tol: f64) {
        for (k, z) in a.iter().enumerate() {
            assert!(
                (z.re - b[2 * k]).abs() <= tol * (1.0 + b[2 * k].abs()),
                "re {k}: {} vs {}",
                z.re,
                b[2 * k]
            );
            assert!(
                (z.im - b[2 * k + 1]).abs() <= tol * (1.0 + b[2 * k + 1].abs()),
                "im {k}: {} vs {}",
                z.im,
                b[2 * k + 1]
            );
        }
    }

    #[test]
    fn frozen_symbol_values() {
        let k = constant2(0.5);
        let ev = SymbolEvaluator::new(&k, &Orientation::axis(2), settings(), 3.0).unwrap();
        close(
            &ev.eval(&[1.0, 2.0])[..2],
            &[
                -0.45504488484767336,
                0.909667975864064,
                -0.2943158947914171,
                1.8193359517281276,
            ],
            1e-10,
        );
        let n = Orientation::from_angle(0.7);
        let ev = SymbolEvaluator::new(&k, &n, settings(), 3.0).unwrap();
        close(
            &ev.eval(&[3.0, -1.0])[..2],
            &[
                -1.092519586713321,
                2.477699851993898,
                -0.12591680964965948,
                -0.8258999506646326,
            ],
            1e-10,
        );
        let f = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.5 }, 2, 0.3).unwrap();
        let ev = SymbolEvaluator::new(&f, &Orientation::axis(2), settings(), 2.0).unwrap();
        close(
            &ev.eval(&[2.0, 1.0])[..2],
            &[
                -0.3381273421607538,
                1.9523570608078824,
                -0.15001275362724542,
                0.9761785304039412,
            ],
            1e-8,
        );
    }

    #[test]
    fn frozen_radial_values() {
        for (delta, xi, expect) in [
            (0.1, 1.0, 0.9992502231781204),
            (1.0, 3.0, 1.4451487444771103),
            (0.5, 2.0, 1.8543926823815244),
        ] {
            let v = lambda_radial(&constant2(delta), xi, settings()).unwrap();
            assert_relative_eq!(v, expect, max_relative = 1e-10);
        }
        assert_eq!(lambda_radial(&constant2(0.1), 0.0, settings()).unwrap(), 0.0);
        let v = lambda_radial(&constant2(0.1), 1.0, settings()).unwrap();
        assert!((0.9..=1.0).contains(&v));
    }

    #[test]
    fn small_horizon_approaches_local_symbol() {
        let k = constant2(1e-3);
        let ev = SymbolEvaluator::new(&k, &Orientation::axis(2), settings(), 1.0).unwrap();
        let lam = ev.eval(&[1.0, 0.0]);
        let err = ((lam[0] - Complex64::new(0.0, 1.0)).norm_sqr() + lam[1].norm_sqr()).sqrt();
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn table_invariants_hold() {
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.5 }, 2, 0.2).unwrap();
        let n = Orientation::from_angle(0.3);
        let t = SymbolTable::build(&k, &n, 6, settings()).unwrap();
        let l = t.lattice();
        for idx in 0..l.len() {
            let neg = l.negated(idx);
            for k in 0..2 {
                assert_eq!(t.lambda(neg)[k], t.lambda(idx)[k].conj());
            }
        }
        assert!(t.im_split_defect() < 1e-9);
        let report = t.verify_bounds();
        assert!(report.min_abs > 0.0);
        assert!(report.max_ratio <= 2.0 * 2f64.sqrt());
        let r = t.reflect();
        let direct = SymbolTable::build(&k, &n.reversed(), 6, settings()).unwrap();
        for idx in 0..l.len() {
            for k in 0..2 {
                assert!(
                    (r.lambda(idx)[k] - direct.lambda(idx)[k]).norm() < 1e-9 * (1.0 + direct.lambda(idx)[k].norm())
                );
            }
        }
    }

    #[test]
    fn re_parallel_to_xi_when_orientation_aligned() {
        let k = constant2(0.4);
        let xi = [2.0, 1.0];
        let n = Orientation::new(&xi).unwrap();
        let lam = SymbolEvaluator::new(&k, &n, settings(), 2.0).unwrap().eval(&xi);
        let cross = lam[0].re * xi[1] - lam[1].re * xi[0];
        assert!(cross.abs() < 1e-12);
    }

    #[test]
    fn radial_is_orientation_free_and_matches_imaginary_part() {
        let k = constant2(0.3);
        let xi = [3.0, -2.0];
        let norm = 13f64.sqrt();
        let big = lambda_radial(&k, norm, settings()).unwrap();
        for theta in [0.0, PI / 4.0, 2.0] {
            let lam = SymbolEvaluator::new(&k, &Orientation::from_angle(theta), settings(), 3.0)
                .unwrap()
                .eval(&xi);
            assert_relative_eq!(lam[0].im, big * xi[0] / norm, max_relative = 1e-9);
            assert_relative_eq!(lam[1].im, big * xi[1] / norm, max_relative = 1e-9);
        }
    }

    #[test]
    fn cartesian_midpoint_agrees_with_polar_rule() {
        let k = KernelSpec::normalize(KernelFamily::SineExample, 2, 0.5).unwrap();
        let n = Orientation::axis(2);
        let ev = SymbolEvaluator::new(&k, &n, settings(), 4.0).unwrap();
        for xi in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, -1.0], [3.0, 4.0]] {
            let a = ev.eval(&xi);
            let b = cartesian_midpoint_symbol(&k, &n, &xi, 3000).unwrap();
            let diff: f64 = (0..2).map(|j| (a[j] - b[j]).norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = (0..2).map(|j| a[j].norm_sqr()).sum::<f64>().sqrt();
            assert!(diff / scale < 1e-6, "{xi:?}: {}", diff / scale);
        }
    }

    #[test]
    fn three_dimensional_symbols() {
        let k = KernelSpec::normalize(KernelFamily::Constant, 3, 0.4).unwrap();
        let n = Orientation::new(&[1.0, 2.0, 2.0]).unwrap();
        let t = SymbolTable::build(&k, &n, 3, settings()).unwrap();
        assert!(t.im_split_defect() < 1e-9);
        let b = t.verify_bounds();
        assert!(b.min_abs > 0.0 && b.max_ratio <= 3.0 * 2f64.sqrt());
    }

    #[test]
    fn one_dimensional_fractional_symbol() {
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.5 }, 1, 0.5).unwrap();
        let t = SymbolTable::build(&k, &Orientation::axis(1), 4, settings()).unwrap();
        // Λ from the table equals Im λ exactly in 1D.
        for xi in 1..=4i64 {
            let idx = t.lattice().index(&[xi]).unwrap();
            assert_relative_eq!(t.lambda(idx)[0].im, t.radial(xi * xi).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn star_symbol_properties() {
        let k = constant2(0.2);
        let s = star_symbol(&k, &[0.0, 0.0], &[2.0, 1.0], settings()).unwrap();
        assert!(s[0].re == 0.0 && s[1].re == 0.0);
        // Radially symmetric gradient by an independent full-ball integral.
        let xi = [2.0, 1.0];
        let full = crate::quadrature::integrate_ball(&k, settings(), 2, |r, e, out| {
            let sn = (r * (xi[0] * e[0] + xi[1] * e[1])).sin();
            out[0] = e[0] * sn;
            out[1] = e[1] * sn;
        })
        .unwrap();
        assert_relative_eq!(s[0].im, full[0], max_relative = 1e-9);
        assert_relative_eq!(s[1].im, full[1], max_relative = 1e-9);

        let star = StarSymbol::new(&k, &[1.0, 0.0], settings(), 8.0).unwrap();
        for xi in [[1.0, 0.0], [3.0, 4.0], [8.0, -8.0]] {
            assert!(star.deficit(&xi) < 0.0);
        }
        let m = |delta: f64| {
            StarSymbol::new(&constant2(delta), &[1.0, 0.0], settings(), 1.0)
                .unwrap()
                .deficit(&[1.0, 1.0])
                .abs()
        };
        let slope = (m(0.02) / m(0.01)).ln() / 2f64.ln();
        assert!((slope - 1.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn averaged_density_bounds_and_invariance() {
        let k = constant2(0.5);
        let a = averaged_energy_density(&k, &[3.0, 4.0], 64, settings()).unwrap();
        let b = averaged_energy_density(&k, &[5.0, 0.0], 64, settings()).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-8);
        let big = lambda_radial(&k, 5.0, settings()).unwrap();
        assert!(a >= big * big);
        assert!(averaged_energy_density(&k, &[1.0, 0.0], 4, settings()).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let k = KernelSpec::normalize(KernelFamily::Fractional { beta: 1.0 }, 2, 0.25).unwrap();
        let n = Orientation::from_angle(1.1);
        let t = SymbolTable::build(&k, &n, 3, settings()).unwrap();
        let mut buf = Vec::new();
        t.write_cache(&mut buf).unwrap();
        let back = SymbolTable::read_cache(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.values, t.values);
        assert_eq!(back.radial, t.radial);
        assert!(back.matches(&k, &n, 3, 1e-10));
        assert!(SymbolTable::read_cache(std::io::Cursor::new(b"garbage\n".to_vec())).is_err());
    }

    #[test]
    fn local_table_is_i_xi() {
        let t = SymbolTable::local(2, 2).unwrap();
        let idx = t.lattice().index(&[1, -2]).unwrap();
        assert_eq!(t.lambda(idx), &[Complex64::new(0.0, 1.0), Complex64::new(0.0, -2.0)]);
    }
}
