//! Periodic fields on `(-π, π)^d` stored as truncated Fourier coefficients.
//!
//! The expansion convention is `u(x) = Σ_ξ û(ξ) e^{iξ·x}` with zero mean.
//! Coefficients are stored densely over the cube `[-N, N]^d`, mode-major
//! (all components of one mode are contiguous).

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The frequency cube `[-N, N]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    dimension: usize,
    bound: usize,
}

impl Lattice {
    pub fn new(dimension: usize, bound: usize) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::InvalidArgument(format!(
                "dimension must be 1, 2 or 3 (got {dimension})"
            )));
        }
        if bound == 0 {
            return Err(Error::InvalidArgument("lattice bound N must be at least 1".into()));
        }
        Ok(Lattice { dimension, bound })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Points per axis, `2N + 1`.
    pub fn side(&self) -> usize {
        2 * self.bound + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Linear index of `ξ`, or `None` outside the cube.
    pub fn index(&self, mode: &[i64]) -> Option<usize> {
        if mode.len() != self.dimension {
            return None;
        }
        let n = self.bound as i64;
        let mut idx = 0usize;
        for &k in mode {
            if k < -n || k > n {
                return None;
            }
            idx = idx * self.side() + (k + n) as usize;
        }
        Some(idx)
    }

    /// Mode at linear index `idx`; unused trailing entries are 0.
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let side = self.side();
        let n = self.bound as i64;
        let mut out = [0i64; 3];
        let mut rest = idx;
        for axis in (0..self.dimension).rev() {
            out[axis] = (rest % side) as i64 - n;
            rest /= side;
        }
        out
    }

    pub fn zero_index(&self) -> usize {
        (self.len() - 1) / 2
    }

    /// Index of `-ξ`; the layout is point-symmetric.
    pub fn negated(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    /// True for one representative of each `±ξ` pair (first non-zero entry positive).
    pub fn is_canonical(&self, idx: usize) -> bool {
        idx > self.zero_index()
    }

    /// `|ξ|²` as an exact integer.
    pub fn norm_sq(&self, idx: usize) -> i64 {
        self.mode(idx)[..self.dimension].iter().map(|k| k * k).sum()
    }

    pub fn modes(&self) -> impl Iterator<Item = (usize, [i64; 3])> + '_ {
        (0..self.len()).map(move |i| (i, self.mode(i)))
    }
}

/// Zero-mean periodic field with `components` complex entries per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    lattice: Lattice,
    components: usize,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(dimension: usize, components: usize, bound: usize) -> Result<Self> {
        let lattice = Lattice::new(dimension, bound)?;
        Ok(Self::zeros_on(lattice, components))
    }

    pub fn zeros_on(lattice: Lattice, components: usize) -> Self {
        SpectralField {
            lattice,
            components,
            coeffs: vec![ZERO; lattice.len() * components],
            real: true,
        }
    }

    /// Builds a field from `f(ξ, out)`; the zero mode is forced to 0 and the
    /// realness flag is set when the result is Hermitian.
    pub fn from_fn(lattice: Lattice, components: usize, mut f: impl FnMut(&[i64], &mut [Complex64])) -> Self {
        let mut field = Self::zeros_on(lattice, components);
        let d = lattice.dimension();
        for idx in 0..lattice.len() {
            if idx == lattice.zero_index() {
                continue;
            }
            let mode = lattice.mode(idx);
            f(&mode[..d], &mut field.coeffs[idx * components..(idx + 1) * components]);
        }
        field.real = field.hermitian_defect() == 0.0;
        field
    }

    /// Field with a single non-zero mode `ξ` carrying `value`.
    pub fn single_mode(lattice: Lattice, mode: &[i64], value: &[Complex64]) -> Result<Self> {
        let idx = lattice
            .index(mode)
            .ok_or_else(|| Error::InvalidArgument(format!("mode {mode:?} outside the lattice")))?;
        if idx == lattice.zero_index() {
            return Err(Error::InvalidArgument("the zero mode is excluded".into()));
        }
        let mut field = Self::zeros_on(lattice, value.len());
        field.coeffs[idx * value.len()..(idx + 1) * value.len()].copy_from_slice(value);
        field.real = false;
        Ok(field)
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

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn at(&self, idx: usize) -> &[Complex64] {
        &self.coeffs[idx * self.components..(idx + 1) * self.components]
    }

    pub fn get(&self, mode: &[i64]) -> Option<&[Complex64]> {
        self.lattice.index(mode).map(|i| self.at(i))
    }

    /// Per-mode map producing `out_components` entries; zero mode stays 0 and
    /// realness is recomputed.
    pub fn map_modes(&self, out_components: usize, mut f: impl FnMut(usize, &[Complex64], &mut [Complex64])) -> Self {
        let mut out = Self::zeros_on(self.lattice, out_components);
        let zero = self.lattice.zero_index();
        for idx in 0..self.lattice.len() {
            if idx == zero {
                continue;
            }
            let src = &self.coeffs[idx * self.components..(idx + 1) * self.components];
            f(
                idx,
                src,
                &mut out.coeffs[idx * out_components..(idx + 1) * out_components],
            );
        }
        out.real = out.hermitian_defect() <= 1e-14 * out.l2_norm().max(f64::MIN_POSITIVE);
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect();
        Ok(SpectralField {
            lattice: self.lattice,
            components: self.components,
            coeffs,
            real: self.real && other.real,
        })
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.lattice.dimension() != other.lattice.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.lattice.dimension(),
                got: other.lattice.dimension(),
            });
        }
        if self.lattice.bound() != other.lattice.bound() {
            return Err(Error::TruncationMismatch {
                field: other.lattice.bound(),
                table: self.lattice.bound(),
            });
        }
        if self.components != other.components {
            return Err(Error::Arity {
                expected: self.components,
                got: other.components,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        SpectralField {
            lattice: self.lattice,
            components: self.components,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            real: self.real && s.im == 0.0,
        }
    }

    /// Component `c` as a scalar field.
    pub fn component(&self, c: usize) -> Self {
        self.map_modes(1, |_, v, out| out[0] = v[c])
    }

    /// Stacks scalar fields into a vector field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("cannot stack zero fields".into()))?;
        let mut out = Self::zeros_on(first.lattice, parts.len());
        for (c, p) in parts.iter().enumerate() {
            if p.components != 1 {
                return Err(Error::Arity {
                    expected: 1,
                    got: p.components,
                });
            }
            first.lattice_matches(p)?;
            for idx in 0..first.lattice.len() {
                out.coeffs[idx * parts.len() + c] = p.coeffs[idx];
            }
        }
        out.real = parts.iter().all(|p| p.real);
        Ok(out)
    }

    fn lattice_matches(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::TruncationMismatch {
                field: other.lattice.bound(),
                table: self.lattice.bound(),
            });
        }
        Ok(())
    }

    /// `max |û(-ξ) - conj(û(ξ))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let c = self.components;
        let mut worst = 0.0f64;
        for idx in 0..self.lattice.len() {
            let neg = self.lattice.negated(idx);
            for k in 0..c {
                let d = (self.coeffs[neg * c + k] - self.coeffs[idx * c + k].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Projects onto real fields: `û ← (û(ξ) + conj û(-ξ))/2`.
    pub fn symmetrize_real(&self) -> Self {
        let c = self.components;
        let mut out = self.clone();
        for idx in 0..self.lattice.len() {
            let neg = self.lattice.negated(idx);
            for k in 0..c {
                out.coeffs[idx * c + k] = 0.5 * (self.coeffs[idx * c + k] + self.coeffs[neg * c + k].conj());
            }
        }
        out.real = true;
        out
    }

    /// `Σ_ξ Σ_c a·conj(b)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    /// `(Σ |û|²)^{1/2}`, the L2 norm normalized by `(2π)^{d/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(Σ_ξ w(ξ) |û(ξ)|²)^{1/2}` for a per-mode weight.
    pub fn weighted_norm(&self, w: impl Fn(usize) -> f64) -> f64 {
        let c = self.components;
        (0..self.lattice.len())
            .map(|idx| {
                w(idx)
                    * self.coeffs[idx * c..(idx + 1) * c]
                        .iter()
                        .map(|z| z.norm_sqr())
                        .sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Uniform grid `x_j = -π + 2πj/M` along one axis.
    pub fn grid_axis(m: usize) -> Vec<f64> {
        (0..m).map(|j| -PI + 2.0 * PI * j as f64 / m as f64).collect()
    }

    /// Coefficients from samples on the `M^d` grid (row-major, last axis
    /// fastest), one sample vector per component. Returns the field and the
    /// removed mean of each component.
    pub fn forward_transform(
        dimension: usize,
        bound: usize,
        m: usize,
        samples: &[Vec<Complex64>],
    ) -> Result<(Self, Vec<Complex64>)> {
        let lattice = Lattice::new(dimension, bound)?;
        if m < lattice.side() {
            return Err(Error::InvalidArgument(format!(
                "grid of {m} points per axis cannot resolve N = {bound} (need at least {})",
                lattice.side()
            )));
        }
        let total = m.pow(dimension as u32);
        let components = samples.len();
        let mut field = Self::zeros_on(lattice, components);
        let mut means = Vec::with_capacity(components);
        let norm = 1.0 / total as f64;
        for (c, s) in samples.iter().enumerate() {
            if s.len() != total {
                return Err(Error::InvalidArgument(format!(
                    "expected {total} samples for component {c}, got {}",
                    s.len()
                )));
            }
            let mut data = s.clone();
            fft_nd(&mut data, m, dimension, false);
            for idx in 0..lattice.len() {
                let mode = lattice.mode(idx);
                let flat = wrap_index(&mode[..dimension], m);
                let sign = if mode[..dimension].iter().sum::<i64>().rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                field.coeffs[idx * components + c] = data[flat] * (norm * sign);
            }
            let z = lattice.zero_index();
            means.push(field.coeffs[z * components + c]);
            field.coeffs[z * components + c] = ZERO;
        }
        field.real = field.hermitian_defect() <= 1e-14 * field.l2_norm().max(f64::MIN_POSITIVE);
        Ok((field, means))
    }

    /// Real samples convenience wrapper around [`Self::forward_transform`].
    pub fn from_real_samples(
        dimension: usize,
        bound: usize,
        m: usize,
        samples: &[Vec<f64>],
    ) -> Result<(Self, Vec<f64>)> {
        let complex: Vec<Vec<Complex64>> = samples
            .iter()
            .map(|s| s.iter().map(|x| Complex64::new(*x, 0.0)).collect())
            .collect();
        let (field, means) = Self::forward_transform(dimension, bound, m, &complex)?;
        Ok((field.symmetrize_real(), means.into_iter().map(|z| z.re).collect()))
    }

    /// Samples on the `M^d` grid, one vector per component.
    pub fn inverse_transform(&self, m: usize) -> Result<Vec<Vec<Complex64>>> {
        let d = self.dimension();
        if m < self.lattice.side() {
            return Err(Error::InvalidArgument(format!(
                "grid of {m} points per axis cannot represent N = {}",
                self.bound()
            )));
        }
        let total = m.pow(d as u32);
        let mut out = Vec::with_capacity(self.components);
        for c in 0..self.components {
            let mut data = vec![ZERO; total];
            for idx in 0..self.lattice.len() {
                let mode = self.lattice.mode(idx);
                let flat = wrap_index(&mode[..d], m);
                let sign = if mode[..d].iter().sum::<i64>().rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                data[flat] += self.coeffs[idx * self.components + c] * sign;
            }
            fft_nd(&mut data, m, d, true);
            out.push(data);
        }
        Ok(out)
    }

    /// Writes one CSV row per mode: `xi_1,..,xi_d,re_1,im_1,..`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.dimension();
        let mut header: Vec<String> = (1..=d).map(|k| format!("xi_{k}")).collect();
        for c in 0..self.components {
            header.push(format!("re_{c}"));
            header.push(format!("im_{c}"));
        }
        writeln!(w, "{}", header.join(","))?;
        for idx in 0..self.lattice.len() {
            let mode = self.lattice.mode(idx);
            let mut row: Vec<String> = mode[..d].iter().map(|k| k.to_string()).collect();
            for z in self.at(idx) {
                row.push(format!("{:.16e}", z.re));
                row.push(format!("{:.16e}", z.im));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn wrap_index(mode: &[i64], m: usize) -> usize {
    mode.iter()
        .fold(0usize, |acc, k| acc * m + k.rem_euclid(m as i64) as usize)
}

/// In-place multi-dimensional FFT on an `m^d` row-major array. The inverse
/// is unnormalized.
fn fft_nd(data: &mut [Complex64], m: usize, d: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    let total = data.len();
    let mut line = vec![ZERO; m];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        for start in 0..total {
            // Visit each line once, from its first element.
            if !(start / stride).is_multiple_of(m) {
                continue;
            }
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[start + k * stride];
            }
            fft.process(&mut line);
            for (k, v) in line.iter().enumerate() {
                data[start + k * stride] = *v;
            }
        }
    }
}

/// Deterministic real zero-mean random field with `|û(ξ)| ∝ (1+|ξ|²)^{-s/2}`
/// and uniform random phases, generated from a PCG-32 stream.
pub fn random_field(seed: u64, dimension: usize, components: usize, bound: usize, decay: f64) -> Result<SpectralField> {
    if !(decay >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "spectrum decay must be non-negative (got {decay})"
        )));
    }
    let lattice = Lattice::new(dimension, bound)?;
    let mut rng = Pcg32::seed_from_u64(seed);
    let mut field = SpectralField::zeros_on(lattice, components);
    for idx in (lattice.zero_index() + 1)..lattice.len() {
        let amp = (1.0 + lattice.norm_sq(idx) as f64).powf(-decay / 2.0);
        let neg = lattice.negated(idx);
        for c in 0..components {
            let mag: f64 = amp * (0.5 + 0.5 * rng.gen::<f64>());
            let phase: f64 = 2.0 * PI * rng.gen::<f64>();
            let z = Complex64::from_polar(mag, phase);
            field.coeffs[idx * components + c] = z;
            field.coeffs[neg * components + c] = z.conj();
        }
    }
    field.real = true;
    Ok(field)
}
